//! Limiting rescaled densities and the quantities derived from them.

mod density;
mod expect;
mod extrema;
pub mod quad;
mod tv;

pub use density::{density_grid, density_integral, kernel, limit_density, Density, DensityQuery, Side};
pub use expect::{expectation_extrema, expected_position, expected_position_quadrature, CurveExtrema, Expectation};
pub use extrema::{
    density_extrema, density_extrema_scan, left_corrected_threshold, right_corrected_threshold, ExtremaReport,
    InfLocation,
};
pub use tv::{tv_lower_bound, tv_lower_bound_with_grid, tv_objective, TvBound, DEFAULT_GRID as TV_DEFAULT_GRID};

/// Size of the jump of every density at `var = param`.
pub fn jump_size() -> f64 {
    (-1.0f64).exp()
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
pub(crate) fn golden_section_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    // endpoints can beat the interior when the maximum sits on the boundary
    let mid = 0.5 * (lo + hi);
    [(lo, f(lo)), (mid, f(mid)), (hi, f(hi))]
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_interior_and_boundary() {
        let (x, v) = golden_section_max(&|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && v.abs() < 1e-12);
        let (x, _) = golden_section_max(&|x| -x, 0.0, 1.0, 1e-12);
        assert!(x < 1e-9);
    }
}
