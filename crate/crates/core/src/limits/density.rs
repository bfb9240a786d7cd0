use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::quad;

const QUAD_TOL: f64 = 1e-10;

/// The four limiting rescaled densities.
///
/// `FCard`/`FPos` are densities of the rescaled position of a card that
/// started near `b n` (parameter `b`, variable `x`); `HCard`/`HPos` are
/// densities of the rescaled card number found near position `x n`
/// (parameter `x`, variable `b`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Density {
    #[serde(rename = "f_card")]
    FCard,
    #[serde(rename = "f_pos")]
    FPos,
    #[serde(rename = "h_card")]
    HCard,
    #[serde(rename = "h_pos")]
    HPos,
}

impl Density {
    pub const ALL: [Density; 4] = [Density::FCard, Density::FPos, Density::HCard, Density::HPos];

    pub fn as_str(self) -> &'static str {
        match self {
            Density::FCard => "f_card",
            Density::FPos => "f_pos",
            Density::HCard => "h_card",
            Density::HPos => "h_pos",
        }
    }

    /// The side of the jump carrying the `e^(b-x-1)` correction.
    pub fn corrected_side(self) -> Side {
        match self {
            Density::FCard | Density::HPos => Side::Left,
            Density::FPos | Density::HCard => Side::Right,
        }
    }

    /// Kernel arguments `(b, x)` for a `(param, var)` pair. `f_card` and
    /// `h_pos` read the kernel directly, `f_pos` and `h_card` with the
    /// arguments exchanged.
    fn kernel_args(self, param: f64, var: f64) -> (f64, f64) {
        match self {
            Density::FCard | Density::HPos => (param, var),
            Density::FPos | Density::HCard => (var, param),
        }
    }

    /// Evaluates the density at `var`, using `side` only when `var == param`.
    pub fn eval(self, param: f64, var: f64, side: Side) -> Result<f64> {
        limit_density(&DensityQuery { which: self, param, var, side })
    }

    /// Evaluates off the jump; panics at `var == param`.
    pub(crate) fn eval_off_jump(self, param: f64, var: f64) -> f64 {
        let (b, x) = self.kernel_args(param, var);
        kernel(b, x, x < b)
    }

    /// One-sided limit at the jump `var -> param`.
    pub fn one_sided(self, param: f64, side: Side) -> f64 {
        let corrected = side == self.corrected_side();
        kernel(param, param, corrected)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Density {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Density::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown density {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Auto,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "auto" => Ok(Side::Auto),
            other => Err(Error::Parse(format!("unknown side {other:?}"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Auto => "auto",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityQuery {
    pub which: Density,
    pub param: f64,
    pub var: f64,
    pub side: Side,
}

/// `D(b, x) = e^(b-1) + e^(-x) - [corrected] e^(b-x-1)`, the single kernel
/// behind all four densities.
pub fn kernel(b: f64, x: f64, corrected: bool) -> f64 {
    let base = (b - 1.0).exp() + (-x).exp();
    if corrected {
        base - (b - x - 1.0).exp()
    } else {
        base
    }
}

pub fn limit_density(q: &DensityQuery) -> Result<f64> {
    check_unit("param", q.param)?;
    check_unit("var", q.var)?;
    if q.var != q.param {
        return Ok(q.which.eval_off_jump(q.param, q.var));
    }
    match q.side {
        Side::Auto => Err(Error::InvalidArgument(format!(
            "{} is discontinuous at var = param = {}; choose side left or right",
            q.which, q.param
        ))),
        side => Ok(q.which.one_sided(q.param, side)),
    }
}

pub(crate) fn check_unit(what: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} = {v} outside [0, 1]")))
    }
}

/// Integral of the density over its variable, split at the jump.
pub fn density_integral(which: Density, param: f64) -> Result<f64> {
    check_unit("param", param)?;
    Ok(quad::integrate_pieces(
        |t| which.eval_off_jump(param, t),
        &[0.0, param, 1.0],
        QUAD_TOL,
    ))
}

/// `(t, density)` pairs on `grid + 1` equally spaced points of `[0, 1]`;
/// a grid point landing on the jump takes the `at_jump` one-sided limit.
pub fn density_grid(which: Density, param: f64, grid: usize, at_jump: Side) -> Result<Vec<(f64, f64)>> {
    check_unit("param", param)?;
    if grid == 0 {
        return Err(Error::InvalidArgument("grid must be at least 1".into()));
    }
    (0..=grid)
        .map(|i| {
            let t = i as f64 / grid as f64;
            which.eval(param, t, at_jump).map(|v| (t, v))
        })
        .collect()
}
