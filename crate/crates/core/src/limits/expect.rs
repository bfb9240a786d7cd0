use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::density::{check_unit, Density};
use crate::limits::{golden_section_max, quad};

/// Expected limiting rescaled position (`Pos*`) of a card or expected
/// rescaled card number (`Card*`) at a position, for each shuffle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expectation {
    #[serde(rename = "E_pos_card")]
    PosCard,
    #[serde(rename = "E_card_card")]
    CardCard,
    #[serde(rename = "E_pos_pos")]
    PosPos,
    #[serde(rename = "E_card_pos")]
    CardPos,
}

impl Expectation {
    pub const ALL: [Expectation; 4] = [
        Expectation::PosCard,
        Expectation::CardCard,
        Expectation::PosPos,
        Expectation::CardPos,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Expectation::PosCard => "E_pos_card",
            Expectation::CardCard => "E_card_card",
            Expectation::PosPos => "E_pos_pos",
            Expectation::CardPos => "E_card_pos",
        }
    }

    /// The density this expectation integrates against.
    pub fn density(self) -> Density {
        match self {
            Expectation::PosCard => Density::FCard,
            Expectation::CardCard => Density::HCard,
            Expectation::PosPos => Density::FPos,
            Expectation::CardPos => Density::HPos,
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Expectation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expectation::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown expectation {s:?}")))
    }
}

/// Closed forms:
/// `E_pos_card(s) = E_card_pos(s) = 1 - e^(s-1)/2 - (1-s) e^(-1)` and
/// `E_card_card(s) = E_pos_pos(s) = e^(-s)/2 + s e^(-1)`.
pub fn expected_position(which: Expectation, s: f64) -> Result<f64> {
    check_unit("s", s)?;
    let inv_e = (-1.0f64).exp();
    Ok(match which {
        Expectation::PosCard | Expectation::CardPos => 1.0 - 0.5 * (s - 1.0).exp() - (1.0 - s) * inv_e,
        Expectation::CardCard | Expectation::PosPos => 0.5 * (-s).exp() + s * inv_e,
    })
}

/// `integral_0^1 t * density(s, t) dt` by quadrature split at the jump.
pub fn expected_position_quadrature(which: Expectation, s: f64) -> Result<f64> {
    check_unit("s", s)?;
    let d = which.density();
    Ok(quad::integrate_pieces(|t| t * d.eval_off_jump(s, t), &[0.0, s, 1.0], 1e-12))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveExtrema {
    pub argmax: f64,
    pub max: f64,
    pub argmin: f64,
    pub min: f64,
}

/// Extrema of an expectation curve over `s in [0, 1]`: a 1001-point grid,
/// then golden-section refinement around the best grid point.
pub fn expectation_extrema(which: Expectation) -> CurveExtrema {
    let f = |s: f64| expected_position(which, s).expect("s in [0, 1]");
    let (argmax, max) = refine_extremum(&f);
    let (argmin, neg_min) = refine_extremum(&|s| -f(s));
    CurveExtrema {
        argmax,
        max,
        argmin,
        min: -neg_min,
    }
}

fn refine_extremum(f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    const GRID: usize = 1000;
    let best = (0..=GRID)
        .map(|i| i as f64 / GRID as f64)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap();
    let lo = (best - 1.0 / GRID as f64).max(0.0);
    let hi = (best + 1.0 / GRID as f64).min(1.0);
    let (s, v) = golden_section_max(f, lo, hi, 1e-12);
    if v >= f(best) {
        (s, v)
    } else {
        (best, f(best))
    }
}
