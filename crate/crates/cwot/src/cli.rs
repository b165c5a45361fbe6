//! The `cwot` command line. Results go to stdout as one JSON object with a
//! fixed key order; diagnostics and timings go to stderr.
//!
//! Exit status: 0 on success, 1 for usage and input errors, 2 when a solver
//! fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cwot_core::cramer_wold::{cf_bound_check, truncation_bound_check, verify_cw_with, VerifyOptions};
use cwot_core::maxsliced::{grid_oracle_2d, maxsliced_w1};
use cwot_core::ot1d::w1_1d;
use cwot_core::otlp::{duality_gap, w1_exact, w1_truncated_dual};
use cwot_core::{DistributionSpec, Family, MaxSlicedConfig, MomentOrder};

use crate::error::{Error, Result};
use crate::experiments::{
    concavity_transfer_check, full_rate_sweep, projection_rate_sweep, ratio_scan, RateTable, RatioScanConfig,
    SweepConfig,
};
use crate::io::{read_measure, write_measure, KeyValues};

#[derive(Debug, Parser)]
#[command(name = "cwot", version, about = "W1 distances, max-sliced W1 and projection bounds")]
pub struct Cli {
    /// Worker threads for experiment trials (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact W1 between two one-dimensional measures.
    W1d { a: PathBuf, b: PathBuf },
    /// Exact W1 in any dimension by network simplex.
    Wnd {
        a: PathBuf,
        b: PathBuf,
        /// Also print the dual potentials on the (sorted, merged) atoms.
        #[arg(long)]
        dual: bool,
        /// Also print the truncated dual W^(r) at this radius.
        #[arg(long, value_name = "R")]
        truncated: Option<f64>,
    },
    /// Max-sliced W1 by restarted ascent.
    Maxsliced {
        a: PathBuf,
        b: PathBuf,
        /// Number of restarts (default 16 + 8d).
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also evaluate a K-direction grid (dimension 2 only).
        #[arg(long, value_name = "K")]
        grid: Option<usize>,
    },
    /// Checks the projection bound and, optionally, the auxiliary inequalities.
    Verify {
        a: PathBuf,
        b: PathBuf,
        /// Moment order: a number > 1 or `inf`.
        #[arg(long)]
        p: MomentOrder,
        #[arg(long, value_enum)]
        check: Option<Check>,
        /// Truncation radius for `--check trunc`.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Projected empirical rate sweep.
    RateProj(SweepArgs),
    /// Full-dimensional empirical rate sweep (two-sample proxy).
    RateFull(SweepArgs),
    /// Compares both sides of the transfer from projected to full rates.
    Transfer(SweepArgs),
    /// Largest ratio of W to the projection bound over random instances.
    RatioScan {
        config: PathBuf,
        /// Directory for the argmax instance files.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Writes an empirical sample as a measure file.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        dim: usize,
        /// Family parameters, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        params: Vec<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Cf,
    Trunc,
    All,
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    /// `key = value` file with the sweep settings.
    pub config: PathBuf,
    /// Also write the table as CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "cannot start thread pool: {e}");
            return 1;
        }
    };
    let start = Instant::now();
    match pool.install(|| dispatch(&cli.command)) {
        Ok(payload) => {
            let _ = writeln!(out, "{payload}");
            let _ = writeln!(err, "done in {:.3} s", start.elapsed().as_secs_f64());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command) -> Result<Value> {
    match cmd {
        Command::W1d { a, b } => {
            let (mu, nu) = (read_measure(a)?, read_measure(b)?);
            Ok(json!({ "w1": w1_1d(&mu, &nu)? }))
        }
        Command::Wnd { a, b, dual, truncated } => wnd(a, b, *dual, *truncated),
        Command::Maxsliced {
            a,
            b,
            restarts,
            seed,
            grid,
        } => maxsliced(a, b, *restarts, *seed, *grid),
        Command::Verify {
            a,
            b,
            p,
            check,
            r,
            restarts,
            seed,
        } => verify(a, b, *p, *check, *r, *restarts, *seed),
        Command::RateProj(args) => {
            let cfg = sweep_config(args)?;
            let table = projection_rate_sweep(&cfg)?;
            rate_output(&table, args.csv.as_deref(), None)
        }
        Command::RateFull(args) => {
            let cfg = sweep_config(args)?;
            let table = full_rate_sweep(&cfg)?;
            let note = "two-sample proxy W(mu_n, mu'_m): biased upwards by O(m^(-1/d)), which flattens the slope";
            rate_output(&table, args.csv.as_deref(), Some(note))
        }
        Command::Transfer(args) => {
            let cfg = sweep_config(args)?;
            Ok(serde_json::to_value(concavity_transfer_check(&cfg)?).map_err(solver)?)
        }
        Command::RatioScan { config, out_dir, seed } => {
            let mut kv = KeyValues::read(config)?;
            if let Some(seed) = seed {
                kv.set("seed", seed.to_string());
            }
            let cfg = RatioScanConfig::from_key_values(&kv)?;
            let rep = ratio_scan(&cfg, out_dir.as_deref())?;
            let files = rep.files.as_ref().map(|(a, b)| json!([a.display().to_string(), b.display().to_string()]));
            Ok(json!({
                "max_ratio": rep.max_ratio,
                "argmax": rep.argmax,
                "pair": [rep.pair.0, rep.pair.1],
                "W": rep.report.w,
                "M": rep.report.m,
                "b": rep.report.b,
                "bound": rep.report.bound,
                "budget": cfg.budget,
                "files": files,
            }))
        }
        Command::Gen {
            family,
            dim,
            params,
            n,
            seed,
            out,
        } => {
            let spec = DistributionSpec::new(Family::from_parts(family, *dim, params)?, *dim, *seed)?;
            let m = spec.sample_empirical(*n)?;
            write_measure(out, &m)?;
            Ok(json!({ "path": out.display().to_string(), "dim": m.dim(), "atoms": m.len() }))
        }
    }
}

fn solver(e: serde_json::Error) -> Error {
    Error::Solver(e.to_string())
}

fn p_value(p: MomentOrder) -> Value {
    match p {
        MomentOrder::Finite(p) => json!(p),
        MomentOrder::Infinity => json!("inf"),
    }
}

fn wnd(a: &Path, b: &Path, dual: bool, truncated: Option<f64>) -> Result<Value> {
    let (mu, nu) = (read_measure(a)?, read_measure(b)?);
    let plan = w1_exact(&mu, &nu)?;
    let mut out = serde_json::Map::new();
    out.insert("w1".into(), json!(plan.value));
    if dual {
        out.insert("source_potentials".into(), json!(plan.source_potentials));
        out.insert("target_potentials".into(), json!(plan.target_potentials));
        out.insert("duality_gap".into(), json!(duality_gap(&plan, &mu, &nu)?));
    }
    if let Some(r) = truncated {
        out.insert("r".into(), json!(r));
        out.insert("truncated".into(), json!(w1_truncated_dual(&mu, &nu, r)?));
    }
    Ok(Value::Object(out))
}

fn maxsliced(a: &Path, b: &Path, restarts: Option<usize>, seed: u64, grid: Option<usize>) -> Result<Value> {
    let (mu, nu) = (read_measure(a)?, read_measure(b)?);
    let cfg = MaxSlicedConfig {
        restarts,
        seed,
        ..Default::default()
    };
    let res = maxsliced_w1(&mu, &nu, &cfg)?;
    let mut out = serde_json::Map::new();
    out.insert("value".into(), json!(res.value));
    out.insert("direction".into(), json!(res.direction.components()));
    out.insert("restarts".into(), json!(res.restarts_used));
    out.insert("seed".into(), json!(seed));
    if let Some(k) = grid {
        out.insert("grid".into(), json!(k));
        out.insert("grid_value".into(), json!(grid_oracle_2d(&mu, &nu, k)?));
    }
    Ok(Value::Object(out))
}

/// Frequencies for the characteristic-function check: 50 points of the
/// ball of radius 20, uniformly distributed.
fn frequencies(dim: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let spec = DistributionSpec::new(Family::UniformBall, dim, seed)?;
    Ok(spec
        .sample_points(50)
        .chunks(dim)
        .map(|t| t.iter().map(|x| 20.0 * x).collect())
        .collect())
}

#[derive(Serialize)]
struct TruncationJson {
    r: f64,
    lhs: f64,
    truncated: f64,
    b: f64,
    rhs: f64,
    holds: bool,
}

fn verify(
    a: &Path,
    b: &Path,
    p: MomentOrder,
    check: Option<Check>,
    r: f64,
    restarts: Option<usize>,
    seed: u64,
) -> Result<Value> {
    let (mu, nu) = (read_measure(a)?, read_measure(b)?);
    let opts = VerifyOptions {
        b: None,
        maxsliced: MaxSlicedConfig {
            restarts,
            seed,
            ..Default::default()
        },
    };
    let rep = verify_cw_with(&mu, &nu, p, &opts)?;
    let mut out = serde_json::Map::new();
    out.insert("W".into(), json!(rep.w));
    out.insert("M".into(), json!(rep.m));
    out.insert("b".into(), json!(rep.b));
    out.insert("p".into(), p_value(rep.p));
    out.insert("d".into(), json!(rep.d));
    out.insert("alpha".into(), json!(rep.alpha));
    out.insert("bound".into(), json!(rep.bound));
    out.insert("ratio".into(), json!(rep.ratio));
    out.insert("holds".into(), json!(rep.holds));
    if matches!(check, Some(Check::Cf | Check::All)) {
        // The exact distance dominates the max-sliced one.
        let cf = cf_bound_check(&mu, &nu, rep.w, &frequencies(mu.dim(), seed)?)?;
        out.insert("cf".into(), json!({ "max_violation": cf.max_violation, "holds": cf.holds }));
    }
    if matches!(check, Some(Check::Trunc | Check::All)) {
        let t = truncation_bound_check(&mu, &nu, p, r)?;
        let t = TruncationJson {
            r,
            lhs: t.lhs,
            truncated: t.truncated,
            b: t.b,
            rhs: t.rhs,
            holds: t.holds,
        };
        out.insert("truncation".into(), serde_json::to_value(t).map_err(solver)?);
    }
    Ok(Value::Object(out))
}

fn sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let mut kv = KeyValues::read(&args.config)?;
    if let Some(seed) = args.seed {
        kv.set("seed", seed.to_string());
    }
    SweepConfig::from_key_values(&kv)
}

fn rate_output(table: &RateTable, csv: Option<&Path>, note: Option<&str>) -> Result<Value> {
    if let Some(path) = csv {
        std::fs::write(path, table.to_csv()).map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    }
    let (slope, slope_se, intercept) = match &table.fit {
        Some(f) => (json!(f.slope), json!(f.slope_se), json!(f.intercept)),
        None => (json!("degenerate"), Value::Null, Value::Null),
    };
    let mut out = serde_json::Map::new();
    out.insert("slope".into(), slope);
    out.insert("slope_se".into(), slope_se);
    out.insert("intercept".into(), intercept);
    out.insert("rows".into(), serde_json::to_value(&table.rows).map_err(solver)?);
    if let Some(note) = note {
        out.insert("note".into(), json!(note));
    }
    Ok(Value::Object(out))
}
