//! Seeded Monte Carlo estimates.
//!
//! Sample `i` is always driven by stream `i` of the generator keyed by the
//! run seed, and every accumulator is an integer counter. The estimate is
//! therefore an order-independent sum over `i`, identical for any worker
//! count or block schedule.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::exact_offdiag_marginal;
use crate::limits::Density;
use crate::par;
use crate::perm::{Deck, ShuffleKind};

/// Default seed for every seeded run.
pub const DEFAULT_SEED: u64 = 0x5eed_cafe;

/// Upper bound on `samples * n` deck steps for a single estimate.
pub const MAX_WORK: u128 = 1 << 40;

const BLOCK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    fn proportion(hits: u64, samples: u64, seed: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Estimate {
            value: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
            seed,
        }
    }
}

/// What produces the sampled decks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    Shuffle(ShuffleKind),
    /// Uniform permutations (Fisher-Yates), the baseline law.
    Uniform,
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sampler::Shuffle(k) => write!(f, "{k}"),
            Sampler::Uniform => f.write_str("uniform"),
        }
    }
}

impl From<ShuffleKind> for Sampler {
    fn from(k: ShuffleKind) -> Self {
        Sampler::Shuffle(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Derangement,
    MeanFixedPoints,
    ProbIdentity,
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derangement" => Ok(Statistic::Derangement),
            "mean_fixed_points" => Ok(Statistic::MeanFixedPoints),
            "prob_identity" => Ok(Statistic::ProbIdentity),
            other => Err(Error::Parse(format!("unknown statistic {other:?}"))),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Derangement => "derangement",
            Statistic::MeanFixedPoints => "mean_fixed_points",
            Statistic::ProbIdentity => "prob_identity",
        })
    }
}

fn check_run(n: usize, samples: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if samples as u128 * n as u128 > MAX_WORK {
        return Err(Error::ResourceLimit {
            engine: "monte carlo (samples * n)",
            max: (MAX_WORK / samples as u128).min(usize::MAX as u128) as usize,
            n,
        });
    }
    Ok(())
}

fn draw(sampler: Sampler, deck: &mut Deck, seed: u64, stream: u64) {
    deck.reset();
    match sampler {
        Sampler::Shuffle(kind) => deck.shuffle_from_stream(kind, seed, stream),
        Sampler::Uniform => deck.shuffle_uniform(seed, stream),
    }
}

/// Runs `samples` draws and folds each deck into integer counters.
fn accumulate<const K: usize>(
    sampler: Sampler,
    n: usize,
    samples: u64,
    seed: u64,
    observe: impl Fn(&Deck, &mut [u64; K]) + Sync + Send,
) -> [u64; K] {
    par::map_reduce_blocks(
        0..samples,
        BLOCK,
        [0u64; K],
        |range| {
            let mut acc = [0u64; K];
            let mut deck = Deck::identity(n);
            for i in range {
                draw(sampler, &mut deck, seed, i);
                observe(&deck, &mut acc);
            }
            acc
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )
}

/// Empirical law of the final position of card `j`; entry `a - 1` is the
/// fraction of samples with card `j` in position `a`.
pub fn estimate_marginal_row(
    sampler: impl Into<Sampler>,
    n: usize,
    j: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<Estimate>> {
    let sampler = sampler.into();
    check_run(n, samples)?;
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { what: "j", value: j, n });
    }
    let counts = par::map_reduce_blocks(
        0..samples,
        BLOCK,
        Vec::new(),
        |range| {
            let mut acc = vec![0u64; n];
            let mut deck = Deck::identity(n);
            for i in range {
                draw(sampler, &mut deck, seed, i);
                acc[deck.position(j - 1)] += 1;
            }
            acc
        },
        |a, b| {
            if a.is_empty() {
                return b;
            }
            a.into_iter().zip(b).map(|(x, y)| x + y).collect()
        },
    );
    Ok(counts
        .into_iter()
        .map(|c| Estimate::proportion(c, samples, seed))
        .collect())
}

pub fn estimate_statistic(
    sampler: impl Into<Sampler>,
    n: usize,
    stat: Statistic,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    let sampler = sampler.into();
    check_run(n, samples)?;
    Ok(match stat {
        Statistic::Derangement => {
            let [hits] = accumulate::<1>(sampler, n, samples, seed, |d, acc| acc[0] += (d.fixed_points() == 0) as u64);
            Estimate::proportion(hits, samples, seed)
        }
        Statistic::ProbIdentity => {
            let [hits] =
                accumulate::<1>(sampler, n, samples, seed, |d, acc| acc[0] += (d.fixed_points() == n) as u64);
            Estimate::proportion(hits, samples, seed)
        }
        Statistic::MeanFixedPoints => {
            let [sum, sum_sq] = accumulate::<2>(sampler, n, samples, seed, |d, acc| {
                let f = d.fixed_points() as u64;
                acc[0] += f;
                acc[1] += f * f;
            });
            let m = samples as f64;
            let mean = sum as f64 / m;
            let var = if samples > 1 {
                ((sum_sq as f64 - m * mean * mean) / (m - 1.0)).max(0.0)
            } else {
                0.0
            };
            Estimate {
                value: mean,
                stderr: (var / m).sqrt(),
                samples,
                seed,
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "mc" => Ok(Mode::Mc),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub finite: f64,
    pub limit: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub kind: ShuffleKind,
    pub b: f64,
    pub x: f64,
    pub mode: Mode,
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut s = format!(
            "# kind={} b={} x={} mode={} samples={} seed={}\nn,finite,limit,abs_error\n",
            self.kind,
            crate::cli::fmt_real(self.b),
            crate::cli::fmt_real(self.x),
            match self.mode {
                Mode::Exact => "exact",
                Mode::Mc => "mc",
            },
            self.samples,
            self.seed
        );
        for r in &self.rows {
            let f = crate::cli::fmt_real;
            writeln!(s, "{},{},{},{}", r.n, f(r.finite), f(r.limit), f(r.abs_error)).unwrap();
        }
        s
    }
}

/// Minimum distance from the jump accepted by [`convergence_report`].
pub const JUMP_BAND: f64 = 0.05;

/// `round(t n)` clamped to `1..=n`.
pub fn discretize(t: f64, n: usize) -> usize {
    ((t * n as f64).round() as usize).clamp(1, n)
}

/// Tabulates `n p_n(card round(b n) -> position round(x n))` against the
/// limiting density of the kind for every `n` in `n_list`.
pub fn convergence_report(
    kind: ShuffleKind,
    b: f64,
    x: f64,
    n_list: &[usize],
    mode: Mode,
    samples: u64,
    seed: u64,
) -> Result<ConvergenceReport> {
    let density = match kind {
        ShuffleKind::CardCyclicTransposition => Density::FCard,
        ShuffleKind::PositionCyclicTransposition => Density::FPos,
        ShuffleKind::CardCyclicInsertion => return Err(Error::UnsupportedKind("the insertion shuffle")),
    };
    if b == x {
        return Err(Error::InvalidArgument("b = x sits on the discontinuity".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("n_list must be strictly ascending".into()));
    }
    let limit = density.eval(b, x, crate::limits::Side::Auto)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let (j, a) = (discretize(b, n), discretize(x, n));
        if j == a {
            return Err(Error::InvalidArgument(format!("b and x round to the same index {j} at n = {n}")));
        }
        let p = match mode {
            Mode::Exact => exact_offdiag_marginal(kind, n, j, a)?,
            Mode::Mc => estimate_marginal_row(kind, n, j, samples, seed)?[a - 1].value,
        };
        let finite = n as f64 * p;
        rows.push(ConvergenceRow {
            n,
            finite,
            limit,
            abs_error: (finite - limit).abs(),
        });
    }
    Ok(ConvergenceReport {
        kind,
        b,
        x,
        mode,
        samples,
        seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ShuffleKind::*;

    #[test]
    fn n1_row() {
        let row = estimate_marginal_row(CardCyclicTransposition, 1, 1, 10, 3).unwrap();
        assert_eq!(row.len(), 1);
        assert_eq!(row[0].value, 1.0);
    }

    #[test]
    fn n2_row_is_half() {
        let row = estimate_marginal_row(CardCyclicTransposition, 2, 1, 1_000_000, DEFAULT_SEED).unwrap();
        for e in &row {
            assert!((e.value - 0.5).abs() <= 4.0 * 0.5 / 1000.0, "{e:?}");
        }
        let hits: f64 = row.iter().map(|e| e.value * e.samples as f64).sum();
        assert_eq!(hits.round() as u64, 1_000_000);
    }

    #[test]
    fn rejects_bad_runs() {
        assert!(estimate_marginal_row(CardCyclicTransposition, 5, 0, 10, 1).is_err());
        assert!(estimate_statistic(CardCyclicTransposition, 5, Statistic::Derangement, 0, 1).is_err());
        assert!(estimate_statistic(CardCyclicTransposition, 1 << 20, Statistic::Derangement, 1 << 30, 1)
            .unwrap_err()
            .is_resource_limit());
    }

    #[test]
    fn proportion_stderr() {
        let e = Estimate::proportion(250, 1000, 0);
        assert!((e.stderr - (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn uniform_sampler_is_a_permutation_law() {
        let e = estimate_statistic(Sampler::Uniform, 3, Statistic::ProbIdentity, 60_000, 9).unwrap();
        assert!((e.value - 1.0 / 6.0).abs() < 4.0 * e.stderr + 1e-12, "{e:?}");
    }

    #[test]
    fn convergence_n2_row() {
        for kind in [CardCyclicTransposition, PositionCyclicTransposition] {
            let r = convergence_report(kind, 0.0, 1.0, &[2], Mode::Exact, 0, 0).unwrap();
            assert!((r.rows[0].finite - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn convergence_rejects() {
        assert!(convergence_report(CardCyclicTransposition, 0.4, 0.4, &[10], Mode::Exact, 0, 0).is_err());
        assert!(convergence_report(CardCyclicTransposition, 0.1, 0.4, &[20, 10], Mode::Exact, 0, 0).is_err());
        assert!(convergence_report(CardCyclicInsertion, 0.1, 0.4, &[10], Mode::Exact, 0, 0).is_err());
    }

    #[test]
    fn csv_has_provenance() {
        let r = convergence_report(CardCyclicTransposition, 0.25, 0.75, &[8, 16], Mode::Exact, 0, 7).unwrap();
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# kind=card"));
        assert_eq!(lines.next().unwrap(), "n,finite,limit,abs_error");
        assert_eq!(lines.count(), 2);
    }
}
