//! Command-line front end: constants, parameter derivation, configuration
//! verification, annulus-code generation, counting bounds, tau sweeps, and
//! blocking witnesses.
//!
//! Every report is a JSON object whose non-`meta` fields are byte-identical
//! across runs with the same command line and seed; timestamps live only in
//! the `meta` block. Exit codes: 0 pass, 1 verification failure, 2 usage or
//! I/O error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use conewidth::diameter::{diameter_oracle, verify_configuration, Configuration};
use conewidth::geometry::{solve_optimal_r, ConeParams};
use conewidth::illum::{blocking_witness, counting_lower_bound, is_blocked};
use conewidth::optimizer::{evaluate, maximize_tau, trace_csv};
use conewidth::sphere::{generate_annulus_code, AnnulusCode, MultiplicityMode};
use conewidth::Direction;

#[derive(Parser)]
#[command(name = "conewidth", version, about = "Cone-union constructions for constant-width \
bodies: solved constants, diameter certificates, annulus codes, illumination lower bounds, \
and parameter sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Exact circle sweep (dimension 2 only)
    #[value(name = "exact_n2")]
    ExactN2,
    /// Branch and bound with a spherical Chebyshev feasibility check
    Bnb,
    /// Candidate-pool scan (uncertified)
    Heuristic,
}

impl From<ModeArg> for MultiplicityMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ExactN2 => MultiplicityMode::ExactN2,
            ModeArg::Bnb => MultiplicityMode::BranchAndBound,
            ModeArg::Heuristic => MultiplicityMode::Heuristic,
        }
    }
}

/// Cone parameters shared by commands that evaluate a configuration;
/// defaults to the solved optimum.
#[derive(Args)]
struct ParamArgs {
    /// Base-sphere radius R (requires --dist)
    #[arg(long, requires = "dist")]
    radius: Option<f64>,
    /// Apex-to-base distance d (requires --radius)
    #[arg(long, requires = "radius")]
    dist: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self) -> Result<ConeParams> {
        match (self.radius, self.dist) {
            (Some(r), Some(d)) => Ok(ConeParams::derive(r, d)?),
            _ => Ok(ConeParams::optimal()),
        }
    }
}

#[derive(Args)]
struct SeedArg {
    /// Seed for all randomized steps (defaults to 0; the report records
    /// whether it was defaulted)
    #[arg(long)]
    seed: Option<u64>,
}

impl SeedArg {
    fn resolve(&self) -> (u64, bool) {
        match self.seed {
            Some(s) => (s, false),
            None => (0, true),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the solved constants R0, d0, alpha0, beta0, tau and the
    /// exact-identity residuals
    Constants {
        /// Also write the report to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive cone parameters and the feasibility record for one (R, d)
    Params {
        /// Base-sphere radius R
        #[arg(long)]
        radius: f64,
        /// Apex-to-base distance d
        #[arg(long)]
        dist: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the pairwise diameter conditions of a configuration file and
    /// cross-examine with the sampled diameter oracle
    Verify {
        /// Annulus-code JSON file ({dimension, psi, points})
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Base-circle samples per cone for the oracle
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap on worker threads
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Generate an annulus code by greedy rejection sampling
    Gen {
        /// Ambient dimension n (points live on S^{n-1})
        #[arg(long)]
        dim: usize,
        /// Annulus lower bound psi in radians (pairwise angles stay in
        /// [psi, pi - psi])
        #[arg(long)]
        psi: f64,
        /// Target number of points
        #[arg(long)]
        target: usize,
        /// Trial budget
        #[arg(long, default_value_t = 1_000_000)]
        max_trials: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Write the bare annulus-code JSON here (the format verify/bound read)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counting lower bound on the illumination number of every
    /// constant-width completion of the cone union
    Bound {
        /// Annulus-code JSON file
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Cap-radius slack: phi = pi/2 - alpha + epsilon
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Multiplicity method
        #[arg(long, value_enum, default_value_t = ModeArg::Heuristic)]
        mode: ModeArg,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Grid sweep of tau over (R, d) with golden-section refinement
    Sweep {
        #[arg(long, default_value_t = 0.7)]
        r_min: f64,
        #[arg(long, default_value_t = 1.1)]
        r_max: f64,
        #[arg(long, default_value_t = 1.2)]
        d_min: f64,
        #[arg(long, default_value_t = 2.2)]
        d_max: f64,
        /// Grid points per (nondegenerate) axis
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Golden-section refinement iterations
        #[arg(long, default_value_t = 20)]
        refine: usize,
        /// Write the CSV trace here (header R,d,alpha,beta,psi_required,margin,tau,feasible)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Blocking verdict and base-circle witness for one (apex, direction) pair
    Witness {
        /// Ambient dimension (used for the default apex/direction)
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Apex coordinates, comma separated (normalized; default e1)
        #[arg(long)]
        apex: Option<String>,
        /// Direction coordinates, comma separated (normalized; default e1)
        #[arg(long)]
        ell: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Meta {
    tool: &'static str,
    version: &'static str,
    command: String,
    seed: Option<u64>,
    seed_defaulted: bool,
    params: Value,
    timestamp_unix: u64,
}

fn meta(seed: Option<(u64, bool)>, params: Value) -> Meta {
    Meta {
        tool: "conewidth",
        version: env!("CARGO_PKG_VERSION"),
        command: std::env::args().collect::<Vec<_>>().join(" "),
        seed: seed.map(|(s, _)| s),
        seed_defaulted: seed.is_some_and(|(_, defaulted)| defaulted),
        params,
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    }
}

/// Renders `payload` with the `meta` block injected as a sibling field and
/// prints it; optionally mirrors the bytes to `out`.
fn emit<T: Serialize>(payload: &T, meta: Meta, out: Option<&PathBuf>) -> Result<()> {
    let mut value = serde_json::to_value(payload)?;
    value
        .as_object_mut()
        .context("report payload must be a JSON object")?
        .insert("meta".to_string(), serde_json::to_value(meta)?);
    let text = format!("{}\n", serde_json::to_string_pretty(&value)?);
    print!("{text}");
    if let Some(path) = out {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(k) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .context("building thread pool")?
            .install(f)),
        None => Ok(f()),
    }
}

fn read_code(path: &PathBuf) -> Result<AnnulusCode> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let code: AnnulusCode = serde_json::from_str(&text)
        .with_context(|| format!("parsing annulus code from {}", path.display()))?;
    code.check_invariant()
        .context("annulus code violates its own pairwise bounds")?;
    Ok(code)
}

fn parse_direction(text: &str) -> Result<Direction> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().context("parsing coordinate"))
        .collect::<Result<_>>()?;
    Ok(Direction::from_vector(coords)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Constants { out } => {
            let c = solve_optimal_r();
            let payload = json!({
                "R0": c.r0,
                "d0": c.d0,
                "alpha0": c.alpha0,
                "beta0": c.beta0,
                "tau": c.tau,
                "residual_cos2_beta": c.residual_cos2_beta(),
                "residual_tau_squared": c.residual_tau_squared(),
                "solver_gap": c.solver_gap,
                "alpha0_below_pi_over_6": c.alpha0 <= std::f64::consts::PI / 6.0,
            });
            emit(&payload, meta(None, json!({})), out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Params { radius, dist, out } => {
            let record = evaluate(radius, dist);
            let m = meta(None, json!({"radius": radius, "dist": dist}));
            emit(&record, m, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            config,
            params,
            resolution,
            seed,
            out,
            threads,
        } => {
            let code = read_code(&config)?;
            let cone_params = params.resolve()?;
            let (seed_value, defaulted) = seed.resolve();
            let configuration = Configuration::from_annulus_code(&code, cone_params)?;
            let (verdict, oracle) = with_threads(threads, || {
                let verdict = verify_configuration(&configuration);
                let oracle = diameter_oracle(&configuration, resolution, seed_value);
                (verdict, oracle)
            })?;
            let verdict = verdict?;
            let d = cone_params.apex_distance;
            let oracle_within_d = oracle.diameter <= d * (1.0 + 1e-9);
            let passed = verdict.ok && oracle_within_d;
            let payload = json!({
                "params": cone_params,
                "verdicts": verdict,
                "oracle": oracle,
                "oracle_within_d": oracle_within_d,
                "passed": passed,
            });
            let m = meta(
                Some((seed_value, defaulted)),
                json!({
                    "config": config.display().to_string(),
                    "resolution": resolution,
                }),
            );
            emit(&payload, m, out.as_ref())?;
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Gen {
            dim,
            psi,
            target,
            max_trials,
            seed,
            out,
        } => {
            let (seed_value, defaulted) = seed.resolve();
            let generated = generate_annulus_code(dim, psi, target, max_trials, seed_value)?;
            if let Some(path) = &out {
                let text = format!("{}\n", serde_json::to_string_pretty(&generated.code)?);
                fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            let m = meta(
                Some((seed_value, defaulted)),
                json!({
                    "dim": dim, "psi": psi, "target": target, "max_trials": max_trials,
                }),
            );
            emit(&generated, m, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound {
            config,
            params,
            epsilon,
            mode,
            seed,
            out,
            threads,
        } => {
            let code = read_code(&config)?;
            let cone_params = params.resolve()?;
            let (seed_value, defaulted) = seed.resolve();
            let configuration = Configuration::from_annulus_code(&code, cone_params)?;
            let certificate = with_threads(threads, || {
                counting_lower_bound(&configuration, epsilon, mode.into(), seed_value)
            })??;
            let m = meta(
                Some((seed_value, defaulted)),
                json!({
                    "config": config.display().to_string(),
                    "epsilon": epsilon,
                }),
            );
            emit(&certificate, m, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            r_min,
            r_max,
            d_min,
            d_max,
            grid,
            refine,
            out,
            threads,
        } => {
            let sweep = with_threads(threads, || {
                maximize_tau((r_min, r_max), (d_min, d_max), grid, refine)
            })?;
            if let Some(path) = &out {
                fs::write(path, trace_csv(&sweep.trace))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let payload = json!({
                "best": sweep.best,
                "trace_rows": sweep.trace.len(),
                "csv": out.as_ref().map(|p| p.display().to_string()),
            });
            let m = meta(
                None,
                json!({
                    "r_range": [r_min, r_max], "d_range": [d_min, d_max],
                    "grid": grid, "refine": refine,
                }),
            );
            emit(&payload, m, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Witness {
            dim,
            apex,
            ell,
            params,
            resolution,
            out,
        } => {
            let cone_params = params.resolve()?;
            let apex = match &apex {
                Some(text) => parse_direction(text)?,
                None => Direction::basis(dim, 0),
            };
            let ell = match &ell {
                Some(text) => parse_direction(text)?,
                None => Direction::basis(dim, 0),
            };
            let verdict = is_blocked(&apex, &ell, &cone_params)?;
            let witness = blocking_witness(&apex, &ell, &cone_params, resolution)?;
            let band = 2.0 * std::f64::consts::PI / resolution as f64;
            let agreement = (witness.is_some() == verdict.blocked) || verdict.margin.abs() < band;
            let payload = json!({
                "params": cone_params,
                "apex": apex,
                "ell": ell,
                "verdict": verdict,
                "witness": witness,
                "agreement": agreement,
            });
            let m = meta(None, json!({"resolution": resolution}));
            emit(&payload, m, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
