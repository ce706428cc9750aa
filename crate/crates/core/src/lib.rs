//! Exact computations with free loops and free non-associative algebras:
//! Magnus expansion into truncated non-associative power series,
//! associator deviations, the Shestakov–Umirbaev primitive operations and
//! checks relating them.

pub mod coeff;
pub mod deviations;
pub mod error;
pub mod loop_term;
pub mod magma;
pub mod series;
pub mod su_ops;
pub mod suites;
pub mod tensor;
pub mod vars;
pub mod verify;

pub use coeff::Coeff;
pub use error::{Error, ParseError, Result};
pub use loop_term::{magnus, LoopTerm};
pub use magma::{Monomial, VarSet};
pub use series::{Series, Trunc};
pub use vars::{VarId, VarTable};
