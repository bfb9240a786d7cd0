//! Total-variation lower bound `sup_b (1/2) int_0^1 |f_b^card(x) - 1| dx`.

use serde::Serialize;

use crate::error::Result;
use crate::limits::density::{check_unit, Density};
use crate::limits::{golden_section_max, quad};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvBound {
    pub value: f64,
    pub argmax_b: f64,
}

pub const DEFAULT_GRID: usize = 1001;

/// Half the L1 distance between `f_b^card` and the uniform density.
///
/// `|f - 1|` has kinks where `f` crosses 1, so each smooth branch is
/// scanned for sign changes, the crossings are located by bisection and
/// the quadrature is split there as well as at the jump `x = b`.
pub fn tv_objective(b: f64) -> Result<f64> {
    check_unit("b", b)?;
    let g = |x: f64| Density::FCard.eval_off_jump(b, x) - 1.0;
    let mut breaks = vec![0.0];
    for (lo, hi) in [(0.0, b), (b, 1.0)] {
        if hi > lo {
            breaks.extend(sign_changes(&g, lo, hi, 64));
            breaks.push(hi);
        }
    }
    Ok(0.5 * quad::integrate_pieces(|x| g(x).abs(), &breaks, 1e-12))
}

fn sign_changes(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    // interior sampling only: the endpoints may sit on the jump
    let h = (hi - lo) / samples as f64;
    let pts: Vec<f64> = (0..samples).map(|i| lo + (i as f64 + 0.5) * h).collect();
    let mut roots = Vec::new();
    for w in pts.windows(2) {
        let (mut a, mut c) = (w[0], w[1]);
        let (ga, gc) = (g(a), g(c));
        if ga == 0.0 {
            roots.push(a);
            continue;
        }
        if ga.signum() == gc.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + c);
            if m <= a || m >= c {
                break;
            }
            if g(m).signum() == ga.signum() {
                a = m;
            } else {
                c = m;
            }
        }
        roots.push(0.5 * (a + c));
    }
    roots
}

/// Maximises [`tv_objective`] over `b in [0, 1]`.
pub fn tv_lower_bound() -> TvBound {
    tv_lower_bound_with_grid(DEFAULT_GRID)
}

/// Coarse grid of `grid` points, then golden-section refinement on the
/// bracket around the best grid point.
pub fn tv_lower_bound_with_grid(grid: usize) -> TvBound {
    let last = grid.max(2) - 1;
    let bs: Vec<f64> = (0..=last).map(|i| i as f64 / last as f64).collect();
    let values = par::map_collect(&bs, |&b| tv_objective(b).expect("b in [0, 1]"));
    let best = (0..values.len()).max_by(|&i, &k| values[i].total_cmp(&values[k])).unwrap();
    let lo = bs[best.saturating_sub(1)];
    let hi = bs[(best + 1).min(last)];
    let f = |b: f64| tv_objective(b).expect("b in [0, 1]");
    let (b, v) = golden_section_max(&f, lo, hi, 1e-10);
    if v >= values[best] {
        TvBound { value: v, argmax_b: b }
    } else {
        TvBound {
            value: values[best],
            argmax_b: bs[best],
        }
    }
}
