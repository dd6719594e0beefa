//! Seeded random operators for identity checks.
//!
//! Entries have independent real and imaginary parts uniform in [−1, 1].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::{c, condition_number, Operator};

/// Upper bound on cond(H₊) after [`regularize_hermitian_part`].
pub const REGULARIZED_COND: f64 = 1e6;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_operator<R: Rng>(dim: usize, rng: &mut R) -> Operator {
    Operator::from_fn(dim, |_, _| c(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)))
        .expect("random entries are finite")
}

pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> Operator {
    let a = random_operator(dim, rng);
    (&a + &a.adjoint()).scale_real(0.5)
}

/// Random positive semidefinite density matrix `AA†/Tr(AA†)`.
pub fn random_density<R: Rng>(dim: usize, rng: &mut R) -> Operator {
    let a = random_operator(dim, rng);
    let rho = &a * &a.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Shift `H` by `μI` with the smallest `μ ∈ {0, 0.1, 0.2, …}` such that
/// cond(H₊) ≤ [`REGULARIZED_COND`]. Only the Hermitian part moves.
pub fn regularize_hermitian_part(h: &Operator) -> Operator {
    let h_plus_of = |m: &Operator| (m + &m.adjoint()).scale_real(0.5);
    let mut k = 0u32;
    loop {
        let shifted = h.shift(c(0.1 * k as f64, 0.0));
        if condition_number(&h_plus_of(&shifted)) <= REGULARIZED_COND {
            return shifted;
        }
        k += 1;
    }
}
