//! Fixed inputs shared by the benchmarks, so every run measures the same work.

use negmono_core::states::haar_random_pure;
use negmono_core::{ComplexMatrix, PureState};

/// `n` Haar-random pure states of three `d`-level parties, seeded by index.
pub fn fixed_states(d: usize, n: usize) -> Vec<PureState> {
    (0..n as u64)
        .map(|seed| haar_random_pure([d, d, d], seed).expect("valid dimensions"))
        .collect()
}

/// The A|C reduced density matrices of [`fixed_states`].
pub fn fixed_pair_densities(d: usize, n: usize) -> Vec<ComplexMatrix> {
    fixed_states(d, n)
        .iter()
        .map(|psi| psi.reduced(&[0, 2]).expect("valid state"))
        .collect()
}
