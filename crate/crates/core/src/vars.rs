use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index into a [`VarTable`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u16);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// The alphabet of a session. Variables are created once and referenced
/// by index afterwards; display names are unique.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarTable {
    names: Vec<String>,
    lookup: HashMap<String, VarId>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table with the given names in order.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut t = Self::new();
        for n in names {
            t.add(n.as_ref())?;
        }
        Ok(t)
    }

    /// Adds a fresh variable; fails if the name is taken or malformed.
    pub fn add(&mut self, name: &str) -> Result<VarId> {
        if !is_identifier(name) {
            return Err(Error::Usage(format!("invalid variable name {name:?}")));
        }
        if self.lookup.contains_key(name) {
            return Err(Error::Usage(format!("duplicate variable name {name:?}")));
        }
        let id = u16::try_from(self.names.len())
            .map(VarId)
            .map_err(|_| Error::Usage("variable table is full".into()))?;
        self.names.push(name.to_string());
        self.lookup.insert(name.to_string(), id);
        Ok(id)
    }

    /// Existing id for `name`, or a new one.
    pub fn intern(&mut self, name: &str) -> Result<VarId> {
        match self.lookup.get(name) {
            Some(&id) => Ok(id),
            None => self.add(name),
        }
    }

    pub fn get(&self, name: &str) -> Option<VarId> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len()).map(|i| VarId(i as u16))
    }

    /// Fresh variables `prefix1..prefixk`.
    pub fn fresh_indexed(&mut self, prefix: &str, k: usize) -> Result<Vec<VarId>> {
        (1..=k).map(|i| self.add(&format!("{prefix}{i}"))).collect()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}
