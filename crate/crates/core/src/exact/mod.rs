//! Exact finite-`n` computations.

mod enumerate;
mod formula;
pub(crate) mod rank;
mod table;

pub use enumerate::{brute_force_distribution, evolve_distribution, BRUTE_FORCE_MAX_N, EVOLVE_MAX_N};
pub use formula::{
    binomial_tail, catalan, exact_marginal_matrix, exact_offdiag_marginal, offdiag_marginal_via_tails, Tail,
};
pub use table::{
    card_in_position_of, distribution_stats, marginal_of, tv_to_uniform, DistributionTable, ExactProb,
    MarginalMatrix, StatsSummary,
};

use crate::error::Result;
use crate::perm::ShuffleKind;

/// `p(id, right-cycle) * n^n` lower bound `2^(n-1)`, shared by the
/// position and insertion shuffles.
pub fn lower_bound_count(n: usize) -> u64 {
    1u64 << (n - 1)
}

/// `p_n^pos(id, id) * n^n` divided by `n^(n/2) e^(-n/2 + sqrt(n) - 1/4) / sqrt(2)`.
pub fn identity_asymptotic_ratio(n: usize) -> Result<f64> {
    let d = evolve_distribution(ShuffleKind::PositionCyclicTransposition, n)?;
    let count = d.rank_counts()[0] as f64;
    let nf = n as f64;
    let approx = std::f64::consts::FRAC_1_SQRT_2 * nf.powf(nf / 2.0) * (-nf / 2.0 + nf.sqrt() - 0.25).exp();
    Ok(count / approx)
}
