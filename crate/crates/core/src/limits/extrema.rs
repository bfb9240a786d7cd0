use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::Result;
use crate::limits::density::{check_unit, Density, Side};

/// Where the infimum of a density over its variable sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InfLocation {
    /// Approached as the variable tends to the jump from this side.
    Discontinuity(Side),
    /// Attained at this endpoint of `[0, 1]`.
    Endpoint(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremaReport {
    pub sup_value: f64,
    /// Side from which the variable approaches the jump to reach the supremum.
    pub sup_approach: Side,
    pub inf_value: f64,
    pub inf_location: InfLocation,
}

/// For `f_card`/`h_pos` the corrected branch lies left of the jump and the
/// uncorrected branch decreases towards `var = 1`; the left limit wins once
/// `e^(-s) - e^(-1) <= e^(-1)`, i.e. `s >= 1 - ln 2`.
pub fn left_corrected_threshold() -> f64 {
    1.0 - LN_2
}

/// For `f_pos`/`h_card` the corrected branch lies right of the jump and
/// the uncorrected branch increases away from `var = 0`; the right limit
/// wins once `e^(s-1) - e^(-1) <= e^(-1)`, i.e. `s <= ln 2`.
pub fn right_corrected_threshold() -> f64 {
    LN_2
}

/// Closed-form supremum and infimum of a density in its variable. One-sided
/// limits at `param` in `{0, 1}` are taken on the closed branch.
pub fn density_extrema(which: Density, param: f64) -> Result<ExtremaReport> {
    check_unit("param", param)?;
    let s = param;
    let corrected = which.corrected_side();
    let sup_approach = match corrected {
        Side::Left => Side::Right,
        _ => Side::Left,
    };
    let sup_value = which.one_sided(s, sup_approach);
    let jump_low = which.one_sided(s, corrected);
    let (jump_wins, endpoint) = match corrected {
        Side::Left => (s >= left_corrected_threshold(), 1.0),
        _ => (s <= right_corrected_threshold(), 0.0),
    };
    let (inf_value, inf_location) = if jump_wins {
        (jump_low, InfLocation::Discontinuity(corrected))
    } else {
        (which.eval_off_jump(s, endpoint), InfLocation::Endpoint(endpoint))
    };
    Ok(ExtremaReport {
        sup_value,
        sup_approach,
        inf_value,
        inf_location,
    })
}

/// Independent extrema by scanning `points` equally spaced values of the
/// variable plus both one-sided limits at the jump. Returns `(sup, inf)`.
pub fn density_extrema_scan(which: Density, param: f64, points: usize) -> Result<(f64, f64)> {
    check_unit("param", param)?;
    let mut sup = which.one_sided(param, Side::Left).max(which.one_sided(param, Side::Right));
    let mut inf = which.one_sided(param, Side::Left).min(which.one_sided(param, Side::Right));
    let last = points.max(2) - 1;
    for i in 0..=last {
        let t = i as f64 / last as f64;
        if t == param {
            continue;
        }
        let v = which.eval_off_jump(param, t);
        sup = sup.max(v);
        inf = inf.min(v);
    }
    Ok((sup, inf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn f_card_mid_parameter() {
        let r = density_extrema(Density::FCard, 0.5).unwrap();
        assert!((r.sup_value - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        assert!((r.sup_value - 1.2131).abs() < 1e-4);
        assert_eq!(r.sup_approach, Side::Right);
        assert!((r.inf_value - 0.8452).abs() < 1e-4);
        assert_eq!(r.inf_location, InfLocation::Discontinuity(Side::Left));
    }

    #[test]
    fn f_card_small_parameter_minimum_at_right_end() {
        let r = density_extrema(Density::FCard, 0.1).unwrap();
        assert_eq!(r.inf_location, InfLocation::Endpoint(1.0));
        assert!((r.inf_value - ((-0.9f64).exp() + 1.0 / E)).abs() < 1e-15);
    }

    #[test]
    fn f_pos_cases() {
        let r = density_extrema(Density::FPos, 0.5).unwrap();
        assert_eq!(r.sup_approach, Side::Left);
        assert_eq!(r.inf_location, InfLocation::Discontinuity(Side::Right));
        let r = density_extrema(Density::FPos, 0.9).unwrap();
        assert_eq!(r.inf_location, InfLocation::Endpoint(0.0));
    }

    #[test]
    fn thresholds_balance_the_candidates() {
        let s = left_corrected_threshold();
        let jump = Density::FCard.one_sided(s, Side::Left);
        let end = Density::FCard.eval(s, 1.0, Side::Auto).unwrap();
        assert!((jump - end).abs() < 1e-15);
        let s = right_corrected_threshold();
        let jump = Density::FPos.one_sided(s, Side::Right);
        let end = Density::FPos.eval(s, 0.0, Side::Auto).unwrap();
        assert!((jump - end).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_scan() {
        for which in Density::ALL {
            for i in 0..=50 {
                let s = i as f64 / 50.0;
                let r = density_extrema(which, s).unwrap();
                let (sup, inf) = density_extrema_scan(which, s, 10_000).unwrap();
                assert!((r.sup_value - sup).abs() < 1e-6, "{which} {s}");
                assert!((r.inf_value - inf).abs() < 1e-6, "{which} {s}");
                assert!(r.inf_value <= r.sup_value);
            }
        }
    }
}
