#![allow(dead_code)]

use loopmag::magma::all_monomials;
use loopmag::{Coeff, Series, Trunc, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn gens(k: u16) -> Vec<VarId> {
    (0..k).map(VarId).collect()
}

/// A random series with small integer coefficients; roughly `density` of
/// the monomials in each degree are present.
pub fn random_series(
    vars: &[VarId],
    trunc: Trunc,
    constant: i64,
    density: f64,
    seed: u64,
) -> Series {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Series::constant(Coeff::from_int(constant), trunc);
    for d in 1..=trunc.degree {
        for m in all_monomials(vars, d) {
            if r.gen_bool(density) {
                let c = r.gen_range(-3i64..=3);
                s.add_term(m, Coeff::from_int(c));
            }
        }
    }
    s
}
