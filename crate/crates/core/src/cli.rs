//! Batch command-line front end.
//!
//! Every subcommand writes machine-readable output to standard output (or
//! `--out PATH`). Reals are printed with 17 significant digits in
//! scientific notation (see [`fmt_real`]); counts are exact integers.
//! Exit status is 0 on success, 2 for invalid arguments and 3 when a
//! resource guard rejects the requested deck size.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{self, DistributionTable};
use crate::limits::{self, Density, Expectation, Side};
use crate::mc::{self, Mode, Sampler, Statistic};
use crate::par;
use crate::perm::ShuffleKind;

/// Environment variable read for the default `--threads` value.
pub const THREADS_ENV: &str = "CYCLIC_SHUFFLE_THREADS";

/// Fixed decimal formatting for every emitted real: 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Brute,
    Evolve,
}

#[derive(Debug, Parser)]
#[command(name = "cyclic-shuffle", version, about = "Cyclic shuffles of an n-card deck: exact laws, limits and Monte Carlo")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cap on worker threads; results do not depend on it.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact marginal matrix, or a single entry with --j and --a.
    Marginal(MarginalArgs),
    /// Exact law by enumerating all n^n choice sequences (n <= 8).
    Brute(TableArgs),
    /// Exact law by evolving the distribution step by step (n <= 11).
    Evolve(TableArgs),
    /// Exact summary statistics and distance to uniform.
    Stats(StatsArgs),
    /// Grid of a limiting density.
    Density(DensityArgs),
    /// Expectation curves of the limiting densities.
    Expect(ExpectArgs),
    /// Total-variation lower bound from the card density.
    Tvbound(TvArgs),
    /// Monte Carlo estimates.
    Sample(SampleArgs),
    /// Finite-n rescaled marginals against the limiting density.
    Converge(ConvergeArgs),
}

#[derive(Debug, Args)]
pub struct MarginalArgs {
    #[arg(long)]
    pub kind: ShuffleKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, requires = "a")]
    pub j: Option<usize>,
    #[arg(long, requires = "j")]
    pub a: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub kind: ShuffleKind,
    #[arg(long)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub kind: ShuffleKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "evolve")]
    pub engine: Engine,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub which: Density,
    /// Parameter of f_card / f_pos.
    #[arg(long, conflicts_with = "x")]
    pub b: Option<f64>,
    /// Parameter of h_card / h_pos.
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// One-sided limit used if a grid point lands on the jump.
    #[arg(long, default_value = "right")]
    pub side: Side,
}

#[derive(Debug, Args)]
pub struct ExpectArgs {
    #[arg(long)]
    pub which: Expectation,
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct TvArgs {
    #[arg(long, default_value_t = limits::TV_DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, required_unless_present = "uniform")]
    pub kind: Option<ShuffleKind>,
    /// Sample uniform permutations instead of a shuffle.
    #[arg(long, conflicts_with = "kind")]
    pub uniform: bool,
    #[arg(long)]
    pub n: usize,
    /// Estimate the marginal row of this card.
    #[arg(long, conflicts_with = "stat")]
    pub j: Option<usize>,
    #[arg(long, default_value = "derangement")]
    pub stat: Statistic,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = mc::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub kind: ShuffleKind,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub x: f64,
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = mc::DEFAULT_SEED)]
    pub seed: u64,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = (|| -> Result<()> {
        let text = par::with_threads(cli.threads, || render(&cli.command, cli.format))?;
        match &cli.out {
            Some(path) => File::create(path)
                .and_then(|mut f| f.write_all(text.as_bytes()))
                .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut out = io::stdout().lock();
                let _ = out.write_all(text.as_bytes());
                Ok(())
            }
        }
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_resource_limit() {
                3
            } else {
                2
            }
        }
    }
}

/// Runs a command and returns its full output.
pub fn render(command: &Command, format: Format) -> Result<String> {
    match command {
        Command::Marginal(a) => marginal(a, format),
        Command::Brute(a) => table(exact::brute_force_distribution(a.kind, a.n)?, a.kind, format),
        Command::Evolve(a) => table(exact::evolve_distribution(a.kind, a.n)?, a.kind, format),
        Command::Stats(a) => stats(a, format),
        Command::Density(a) => density(a, format),
        Command::Expect(a) => expect(a, format),
        Command::Tvbound(a) => tvbound(a, format),
        Command::Sample(a) => sample(a, format),
        Command::Converge(a) => converge(a, format),
    }
}

fn to_json(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serialisable");
    s.push('\n');
    s
}

fn marginal(a: &MarginalArgs, format: Format) -> Result<String> {
    match (a.j, a.a) {
        (Some(j), Some(pos)) => {
            let p = if j == pos {
                if j == 0 || j > a.n {
                    return Err(Error::IndexOutOfRange { what: "j", value: j, n: a.n });
                }
                exact::exact_marginal_matrix(a.kind, a.n)?.get(j, j)
            } else {
                exact::exact_offdiag_marginal(a.kind, a.n, j, pos)?
            };
            Ok(match format {
                Format::Csv => format!("j,a,probability\n{j},{pos},{}\n", fmt_real(p)),
                Format::Json => to_json(json!({
                    "kind": a.kind, "n": a.n, "j": j, "a": pos, "probability": fmt_real(p),
                })),
            })
        }
        _ => {
            let m = exact::exact_marginal_matrix(a.kind, a.n)?;
            Ok(match format {
                Format::Csv => m.to_csv(),
                Format::Json => {
                    let rows: Vec<Vec<String>> =
                        (1..=a.n).map(|j| m.row(j).iter().map(|&v| fmt_real(v)).collect()).collect();
                    to_json(json!({ "kind": a.kind, "n": a.n, "entries": rows }))
                }
            })
        }
    }
}

fn table(d: DistributionTable, kind: ShuffleKind, format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => d.to_text(),
        Format::Json => {
            let rows: Vec<_> = d
                .iter()
                .map(|(p, c)| json!({ "permutation": p.to_string(), "count": c }))
                .collect();
            to_json(json!({
                "kind": kind, "n": d.n(), "denominator": d.denominator(), "counts": rows,
            }))
        }
    })
}

fn stats(a: &StatsArgs, format: Format) -> Result<String> {
    let d = match a.engine {
        Engine::Brute => exact::brute_force_distribution(a.kind, a.n)?,
        Engine::Evolve => exact::evolve_distribution(a.kind, a.n)?,
    };
    let s = exact::distribution_stats(&d);
    Ok(match format {
        Format::Csv => format!(
            "statistic,value\nkind,{}\nn,{}\nprob_identity,{}\nmin_prob,{}\nargmin,\"{}\"\nmax_prob,{}\nargmax,\"{}\"\nderangement_prob,{}\ntv_to_uniform,{}\n",
            a.kind,
            s.n,
            s.prob_identity,
            s.min_prob,
            s.argmin,
            s.max_prob,
            s.argmax,
            s.derangement_prob,
            fmt_real(s.tv_to_uniform)
        ),
        Format::Json => to_json(json!({
            "kind": a.kind,
            "n": s.n,
            "prob_identity": s.prob_identity.to_string(),
            "min_prob": s.min_prob.to_string(),
            "argmin": s.argmin.to_string(),
            "max_prob": s.max_prob.to_string(),
            "argmax": s.argmax.to_string(),
            "derangement_prob": s.derangement_prob.to_string(),
            "tv_to_uniform": fmt_real(s.tv_to_uniform),
        })),
    })
}

fn density(a: &DensityArgs, format: Format) -> Result<String> {
    let param = match a.which {
        Density::FCard | Density::FPos => a.b.ok_or_else(|| Error::InvalidArgument(format!("{} needs --b", a.which)))?,
        Density::HCard | Density::HPos => a.x.ok_or_else(|| Error::InvalidArgument(format!("{} needs --x", a.which)))?,
    };
    if a.side == Side::Auto {
        return Err(Error::InvalidArgument("--side must be left or right".into()));
    }
    let grid = limits::density_grid(a.which, param, a.grid, a.side)?;
    Ok(match format {
        Format::Csv => {
            let mut s = String::from("t,density\n");
            for (t, v) in grid {
                s.push_str(&format!("{},{}\n", fmt_real(t), fmt_real(v)));
            }
            s
        }
        Format::Json => {
            let pts: Vec<_> = grid.iter().map(|&(t, v)| [fmt_real(t), fmt_real(v)]).collect();
            to_json(json!({ "which": a.which, "param": fmt_real(param), "side": a.side, "points": pts }))
        }
    })
}

fn expect(a: &ExpectArgs, format: Format) -> Result<String> {
    if a.grid == 0 {
        return Err(Error::InvalidArgument("grid must be at least 1".into()));
    }
    let pts: Vec<(f64, f64)> = (0..=a.grid)
        .map(|i| {
            let s = i as f64 / a.grid as f64;
            limits::expected_position(a.which, s).map(|v| (s, v))
        })
        .collect::<Result<_>>()?;
    let e = limits::expectation_extrema(a.which);
    Ok(match format {
        Format::Csv => {
            let mut s = String::from("s,expectation\n");
            for (x, v) in pts {
                s.push_str(&format!("{},{}\n", fmt_real(x), fmt_real(v)));
            }
            s
        }
        Format::Json => to_json(json!({
            "which": a.which,
            "points": pts.iter().map(|&(x, v)| [fmt_real(x), fmt_real(v)]).collect::<Vec<_>>(),
            "argmax": fmt_real(e.argmax), "max": fmt_real(e.max),
            "argmin": fmt_real(e.argmin), "min": fmt_real(e.min),
        })),
    })
}

fn tvbound(a: &TvArgs, format: Format) -> Result<String> {
    if a.grid < 2 {
        return Err(Error::InvalidArgument("grid must be at least 2".into()));
    }
    let r = limits::tv_lower_bound_with_grid(a.grid);
    Ok(match format {
        Format::Csv => format!("value,argmax_b\n{},{}\n", fmt_real(r.value), fmt_real(r.argmax_b)),
        Format::Json => to_json(json!({ "value": fmt_real(r.value), "argmax_b": fmt_real(r.argmax_b) })),
    })
}

fn sample(a: &SampleArgs, format: Format) -> Result<String> {
    let sampler = match (a.kind, a.uniform) {
        (Some(k), false) => Sampler::Shuffle(k),
        _ => Sampler::Uniform,
    };
    let header = format!("# kind={sampler} n={} samples={} seed={}\n", a.n, a.samples, a.seed);
    if let Some(j) = a.j {
        let row = mc::estimate_marginal_row(sampler, a.n, j, a.samples, a.seed)?;
        return Ok(match format {
            Format::Csv => {
                let mut s = header + "a,value,stderr\n";
                for (i, e) in row.iter().enumerate() {
                    s.push_str(&format!("{},{},{}\n", i + 1, fmt_real(e.value), fmt_real(e.stderr)));
                }
                s
            }
            Format::Json => to_json(json!({
                "kind": sampler.to_string(), "n": a.n, "j": j, "samples": a.samples, "seed": a.seed,
                "row": row.iter().map(|e| json!({ "value": fmt_real(e.value), "stderr": fmt_real(e.stderr) })).collect::<Vec<_>>(),
            })),
        });
    }
    let e = mc::estimate_statistic(sampler, a.n, a.stat, a.samples, a.seed)?;
    Ok(match format {
        Format::Csv => header + &format!("statistic,value,stderr\n{},{},{}\n", a.stat, fmt_real(e.value), fmt_real(e.stderr)),
        Format::Json => to_json(json!({
            "kind": sampler.to_string(), "n": a.n, "statistic": a.stat, "samples": a.samples, "seed": a.seed,
            "value": fmt_real(e.value), "stderr": fmt_real(e.stderr),
        })),
    })
}

fn converge(a: &ConvergeArgs, format: Format) -> Result<String> {
    let r = mc::convergence_report(a.kind, a.b, a.x, &a.n_list, a.mode, a.samples, a.seed)?;
    Ok(match format {
        Format::Csv => r.to_csv(),
        Format::Json => to_json(json!({
            "kind": r.kind, "b": fmt_real(r.b), "x": fmt_real(r.x), "mode": r.mode,
            "samples": r.samples, "seed": r.seed,
            "rows": r.rows.iter().map(|row| json!({
                "n": row.n, "finite": fmt_real(row.finite), "limit": fmt_real(row.limit),
                "abs_error": fmt_real(row.abs_error),
            })).collect::<Vec<_>>(),
        })),
    })
}
