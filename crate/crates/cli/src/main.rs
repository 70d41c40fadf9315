//! Experiment runner: every pipeline exposed as a subcommand reading a JSON
//! config and writing CSV tables plus a summary JSON.
//!
//! Exit status: 0 all assertions pass, 1 assertion failure, 2 config error,
//! 3 I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use supershift_core::precision::Policy;

#[derive(Parser)]
#[command(name = "supershift", version, about = "band-limited extrapolation laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON config path; built-in defaults are used when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory for CSV and summary artifacts
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// mantissa bits, overriding the config
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// worker threads for grid sweeps (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// prefer exact-rational arithmetic where supported
    #[arg(long, global = true, default_value_t = false)]
    exact: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// closed-form vs expanded superoscillating sums
    Superosc,
    /// extrapolation convergence sweep over an (a, a') grid
    Extrapolate,
    /// numerical Taylor coefficients and the radius diagnostic
    Taylor,
    /// exact shifted-Legendre identities
    LegendreCheck,
    /// warped extrapolation of the glued non-analytic function
    Kantorovich,
    /// equidistant Lagrange divergence for |a|
    Divergence,
    /// periodic multiplier identity and Fourier-decay certificate
    Periodic,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Superosc => "superosc",
            Cmd::Extrapolate => "extrapolate",
            Cmd::Taylor => "taylor",
            Cmd::LegendreCheck => "legendre-check",
            Cmd::Kantorovich => "kantorovich",
            Cmd::Divergence => "divergence",
            Cmd::Periodic => "periodic",
        }
    }

    fn default_config(self) -> &'static str {
        match self {
            Cmd::Superosc => {
                r#"{
                  "n_list": [8, 16, 32, 64],
                  "lambda_list": [-3.0, 0.0, 2.0, 4.0],
                  "x_min": -10.0, "x_max": 10.0, "x_step": 0.5,
                  "eps": 0.0
                }"#
            }
            Cmd::Extrapolate => {
                r#"{
                  "target": "cos",
                  "n_list": [8, 16, 32, 64],
                  "grid_lo": -3.0, "grid_hi": 3.0, "grid_step": 0.25,
                  "family": [{"gen": "zero"},
                             {"gen": "over_n", "c": 1.0},
                             {"gen": "over_n", "c": 2.0}],
                  "rule": "bernstein",
                  "expect": "inconclusive"
                }"#
            }
            Cmd::Taylor => {
                r#"{
                  "target": "exp",
                  "b_prime": 0.0,
                  "m_list": [1, 2, 4],
                  "kappa_max_list": [8, 16],
                  "eps": {"gen": "zero"}
                }"#
            }
            Cmd::LegendreCheck => {
                r#"{
                  "target": "poly5",
                  "b_prime": "1/3",
                  "eps": "1/4",
                  "r": "2",
                  "n": 10,
                  "nu_max_orthonormality": 16
                }"#
            }
            Cmd::Kantorovich => {
                r#"{
                  "rho0": 0.5,
                  "a_grid": [-2.5, -1.5, 0.7, 2.0, 3.0],
                  "n_list": [8, 64],
                  "eps": {"gen": "zero"},
                  "final_error_max": 0.01
                }"#
            }
            Cmd::Divergence => {
                r#"{
                  "a_eval": 0.5,
                  "n_list": [5, 11, 21, 41, 81, 121, 161, 201],
                  "min_ratio": 10.0
                }"#
            }
            Cmd::Periodic => {
                r#"{
                  "period_over_pi": 2.0,
                  "modes": [[-8, 0.000335, 0.0], [-4, 0.0183, 0.0], [-2, 0.135, 0.0],
                            [-1, 0.368, 0.0], [0, 1.0, 0.0], [1, 0.368, 0.0],
                            [2, 0.135, 0.0], [4, 0.0183, 0.0], [8, 0.000335, 0.0]],
                  "identity_r": 5.0,
                  "identity_n_list": [4, 8, 16, 32],
                  "a_prime_grid": [-2.0, -0.5, 0.0, 1.25, 3.0],
                  "decay_r_list": [3.0, 5.0],
                  "decay_n_list": [4, 8, 16],
                  "chi": 4
                }"#
            }
        }
    }
}

const EXIT_ASSERT: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

fn precision_of(raw: &serde_json::Value, flag: Option<u32>) -> u32 {
    flag.unwrap_or_else(|| {
        raw.get("precision_bits")
            .and_then(serde_json::Value::as_u64)
            .map(|b| b as u32)
            .unwrap_or(supershift_core::precision::DEFAULT_BITS)
    })
}

fn run(cli: &Cli) -> std::result::Result<bool, u8> {
    let raw = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            eprintln!("config error: cannot read {}: {e}", path.display());
            EXIT_CONFIG
        })?,
        None => cli.cmd.default_config().to_string(),
    };
    let mut value: serde_json::Value = serde_json::from_str(&raw).map_err(|e| {
        eprintln!("config error: {e}");
        EXIT_CONFIG
    })?;
    let bits = precision_of(&value, cli.precision);
    // The key is consumed here; the typed configs reject unknown fields.
    if let Some(obj) = value.as_object_mut() {
        obj.remove("precision_bits");
    }
    let p = Policy::new(bits).map_err(|e| {
        eprintln!("config error: {e}");
        EXIT_CONFIG
    })?;

    #[cfg(feature = "parallel")]
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| {
                eprintln!("config error: {e}");
                EXIT_CONFIG
            })?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cli.threads;

    let cfg_err = |e: serde_json::Error| {
        eprintln!("config error: {e}");
        EXIT_CONFIG
    };
    let run_err = |e: supershift_core::Error| {
        eprintln!("config error: {e}");
        EXIT_CONFIG
    };
    let started = Instant::now();
    let artifacts = match cli.cmd {
        Cmd::Superosc => {
            commands::run_superosc(p, &serde_json::from_value(value).map_err(cfg_err)?)
        }
        Cmd::Extrapolate => {
            commands::run_extrapolate(p, &serde_json::from_value(value).map_err(cfg_err)?)
        }
        Cmd::Taylor => {
            commands::run_taylor(p, &serde_json::from_value(value).map_err(cfg_err)?, cli.exact)
        }
        Cmd::LegendreCheck => {
            commands::run_legendre(p, &serde_json::from_value(value).map_err(cfg_err)?)
        }
        Cmd::Kantorovich => {
            commands::run_kantorovich(p, &serde_json::from_value(value).map_err(cfg_err)?)
        }
        Cmd::Divergence => {
            commands::run_divergence(p, &serde_json::from_value(value).map_err(cfg_err)?)
        }
        Cmd::Periodic => {
            commands::run_periodic(p, &serde_json::from_value(value).map_err(cfg_err)?)
        }
    }
    .map_err(run_err)?;
    let wall_ms = started.elapsed().as_millis();

    output::write_artifacts(
        &cli.out,
        cli.cmd.name(),
        &output::config_sha256(&raw),
        bits,
        wall_ms,
        &artifacts,
    )
    .map_err(|e| {
        eprintln!("io error: {e}");
        EXIT_IO
    })?;

    for a in &artifacts.assertions {
        let tag = if a.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}: {}", a.name, a.detail);
    }
    Ok(artifacts.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERT),
        Err(code) => ExitCode::from(code),
    }
}
