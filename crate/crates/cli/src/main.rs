mod input;
mod json;
mod report;
mod svg;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use toda_polytope::polytope::{leading_column_minors, vertices_from_halfspaces, BRUTE_FORCE_N_MAX};
use toda_polytope::sieve::{flow_limit_detailed, partition_from_direction};
use toda_polytope::{
    bfr, invert_bfr, is_spectrally_complete, spectral_polytope, toda_action, toda_trajectory, Error,
    NewtonOptions, TodaDirection, Tolerances,
};

use input::Loaded;
use report::{AnalysisParts, AnalysisReport, FlowReport, FlowSample, Input, InvertReport, LimitReport};

/// Malformed input or arguments (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A request outside the supported sizes (exit code 4).
#[derive(Debug)]
struct Unsupported(String);

impl fmt::Display for Unsupported {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Unsupported {}

#[derive(Parser)]
#[command(name = "toda-polytope", version, about = "Toda flows, boundary limits and spectral polytopes of symmetric matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Accessible vertices, spectral polytope and minor diagnostics.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Sample the Toda action t ↦ Φ(t·τ, S).
    Flow {
        #[command(flatten)]
        common: Common,
        /// Direction τ, one value per coordinate. Vector arguments accept
        /// space- or comma-separated values; use `--tau=-1e-3,0,1e-3` when a
        /// value in exponent form starts with a minus sign.
        #[arg(long, required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
        tau: Vec<f64>,
        /// Times at which to sample.
        #[arg(long, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true, default_values_t = [1.0])]
        samples: Vec<f64>,
    },
    /// Limit of Φ(log w + t·σ, S) as t → ∞.
    Limit {
        #[command(flatten)]
        common: Common,
        #[arg(long, required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
        sigma: Vec<f64>,
        /// Positive base weights w (default: all ones).
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Find τ with bfr(Φ(τ, S)) = target.
    Invert {
        #[command(flatten)]
        common: Common,
        #[arg(long, required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
        target: Vec<f64>,
        /// Max-norm residual at which Newton iteration stops.
        #[arg(long, default_value_t = NewtonOptions::default().tol)]
        newton_tol: f64,
        #[arg(long, default_value_t = NewtonOptions::default().max_iter)]
        max_iter: usize,
    },
    /// Draw the spectral polygon of a 3×3 matrix as SVG.
    Render {
        #[command(flatten)]
        common: Common,
        /// Direction of a trajectory through S, as comma-separated values
        /// such as `-1,0,2` (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        trajectory: Vec<String>,
        /// Trajectories are sampled for t in [−t_max, t_max].
        #[arg(long, default_value_t = 8.0)]
        t_max: f64,
        #[arg(long, default_value_t = 161)]
        points: usize,
    },
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    source: SourceArgs,
    /// Write the result here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceArgs {
    /// Built-in example: hexagon or quadrilateral.
    #[arg(long)]
    example: Option<String>,
    /// JSON file with {"matrix"}, {"lambda", "q"} or {"example"}.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, default_value_t = Tolerances::default().orth)]
    tol_orth: f64,
    #[arg(long, default_value_t = Tolerances::default().recon)]
    tol_recon: f64,
    #[arg(long, default_value_t = Tolerances::default().gap)]
    tol_gap: f64,
    #[arg(long, default_value_t = Tolerances::default().rank)]
    tol_rank: f64,
    #[arg(long, default_value_t = Tolerances::default().symmetry)]
    tol_symmetry: f64,
    #[arg(long, default_value_t = Tolerances::default().tie)]
    tol_tie: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            orth: self.tol_orth,
            recon: self.tol_recon,
            gap: self.tol_gap,
            rank: self.tol_rank,
            symmetry: self.tol_symmetry,
            tie: self.tol_tie,
        }
    }
}

impl Common {
    fn load(&self) -> anyhow::Result<(Loaded, Tolerances)> {
        let tol = self.tol.tolerances();
        let loaded = match (&self.source.example, &self.source.input) {
            (Some(name), _) => input::from_example(name)?,
            (None, Some(path)) => input::from_file(path, &tol)?,
            (None, None) => unreachable!("clap enforces one source"),
        };
        Ok((loaded, tol))
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        write_output(self.output.as_deref(), text)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn expect_len(name: &str, values: &[f64], n: usize) -> anyhow::Result<()> {
    if values.len() != n {
        return Err(UsageError(format!("--{name} needs {n} values, got {}", values.len())).into());
    }
    Ok(())
}

fn analyze(common: &Common) -> anyhow::Result<()> {
    let (Loaded { source, pair }, tol) = common.load()?;
    let polytope = spectral_polytope(&pair, tol.rank)?;
    let complete = is_spectrally_complete(pair.q(), tol.rank)?;
    let from_halfspaces = if pair.n() <= BRUTE_FORCE_N_MAX {
        Some(vertices_from_halfspaces(&polytope, 1e-9)?)
    } else {
        None
    };
    let minors = leading_column_minors(pair.q(), tol.rank);
    let report = AnalysisReport::new(AnalysisParts {
        source: &source,
        pair: &pair,
        polytope: &polytope,
        complete,
        from_halfspaces,
        minors: &minors,
        tol: &tol,
    });
    common.emit(&json::to_string(&report)?)
}

fn flow(common: &Common, tau: &[f64], samples: &[f64]) -> anyhow::Result<()> {
    let (Loaded { source, pair }, _) = common.load()?;
    expect_len("tau", tau, pair.n())?;
    let direction = TodaDirection::new(tau.to_vec())?;
    let samples = toda_trajectory(&pair, &direction, samples)?
        .into_iter()
        .map(|p| FlowSample {
            t: p.t,
            matrix: p.pair.reconstruct().to_rows(),
            bfr: p.bfr.0,
        })
        .collect();
    let report = FlowReport {
        input: Input::new(&source, &pair),
        tau: tau.to_vec(),
        samples,
    };
    common.emit(&json::to_string(&report)?)
}

fn limit(common: &Common, sigma: &[f64], weights: Option<&[f64]>) -> anyhow::Result<()> {
    let (Loaded { source, pair }, tol) = common.load()?;
    let n = pair.n();
    expect_len("sigma", sigma, n)?;
    let weights = weights.map_or_else(|| vec![1.0; n], <[f64]>::to_vec);
    expect_len("weights", &weights, n)?;
    let direction = TodaDirection::new(sigma.to_vec())?;
    let limit = flow_limit_detailed(&pair, &direction, &weights, &tol)?;
    let partition = partition_from_direction(&direction, tol.tie);
    let report = LimitReport::new(
        Input::new(&source, &pair),
        sigma.to_vec(),
        weights,
        partition.blocks(),
        &limit,
    );
    common.emit(&json::to_string(&report)?)
}

fn invert(common: &Common, target: &[f64], newton_tol: f64, max_iter: usize) -> anyhow::Result<()> {
    let (Loaded { source, pair }, tol) = common.load()?;
    expect_len("target", target, pair.n())?;
    let opts = NewtonOptions {
        tol: newton_tol,
        max_iter,
        rank_tol: tol.rank,
        ..NewtonOptions::default()
    };
    let inv = invert_bfr(&pair, target, &opts)?;
    let moved = toda_action(&pair, &inv.tau)?.reconstruct();
    let report = InvertReport::new(Input::new(&source, &pair), target.to_vec(), inv, &moved);
    common.emit(&json::to_string(&report)?)
}

fn parse_direction(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| UsageError(format!("bad trajectory direction {text:?}: {e}")).into())
        })
        .collect()
}

fn render(common: &Common, trajectory: &[String], t_max: f64, points: usize) -> anyhow::Result<()> {
    let (Loaded { source, pair }, tol) = common.load()?;
    if pair.n() != 3 {
        return Err(Unsupported(format!("render needs a 3×3 matrix, got n = {}", pair.n())).into());
    }
    if points < 2 || !(t_max > 0.0 && t_max.is_finite()) {
        return Err(UsageError("--points must be at least 2 and --t-max positive".into()).into());
    }
    let polytope = spectral_polytope(&pair, tol.rank)?;
    let times: Vec<f64> = (0..points)
        .map(|k| -t_max + 2.0 * t_max * k as f64 / (points - 1) as f64)
        .collect();
    let trajectories = trajectory
        .iter()
        .map(|text| {
            let sigma = parse_direction(text)?;
            expect_len("trajectory", &sigma, 3)?;
            let sigma = TodaDirection::new(sigma)?;
            Ok(toda_trajectory(&pair, &sigma, &times)?
                .into_iter()
                .map(|p| p.bfr.0)
                .collect())
        })
        .collect::<anyhow::Result<Vec<Vec<Vec<f64>>>>>()?;
    let title = format!("{}: {}", source.kind, source.name);
    let svg = svg::render(&title, &polytope, &bfr(&pair).0, &trajectories);
    common.emit(&svg)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<Unsupported>().is_some() {
        return 4;
    }
    if err.downcast_ref::<serde_json::Error>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::NonFinite
            | Error::InvalidArgument(_)
            | Error::InvalidWeights(_)
            | Error::InvalidPartition(_)
            | Error::InvalidPermutation(_)
            | Error::InvalidIndexSet(_)
            | Error::EmptyOrFullSet { .. },
        ) => 2,
        Some(Error::NotSymmetric { .. } | Error::NotOrthogonal { .. } | Error::DegenerateSpectrum { .. }) => 3,
        Some(Error::TooLarge { .. } | Error::DimensionMismatch { .. }) => 4,
        Some(
            Error::SingularInput { .. }
            | Error::RankDeficiency { .. }
            | Error::IndeterminateRank { .. }
            | Error::NumericalBreakdown(_)
            | Error::NotPositiveVector,
        ) => 5,
        Some(Error::NotInterior { .. } | Error::NoConvergence { .. }) => 6,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { common } => analyze(common),
        Command::Flow { common, tau, samples } => flow(common, tau, samples),
        Command::Limit { common, sigma, weights } => limit(common, sigma, weights.as_deref()),
        Command::Invert {
            common,
            target,
            newton_tol,
            max_iter,
        } => invert(common, target, *newton_tol, *max_iter),
        Command::Render {
            common,
            trajectory,
            t_max,
            points,
        } => render(common, trajectory, *t_max, *points),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
