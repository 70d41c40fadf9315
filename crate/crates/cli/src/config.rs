//! JSON experiment configurations, one schema per subcommand. Unknown keys
//! are rejected so that typos fail fast instead of silently using defaults.

use rug::Rational;
use serde::Deserialize;
use supershift_core::casebook::{GluedFunction, ThetaMap};
use supershift_core::error::{Error, Result};
use supershift_core::periodic::FourierSpectrum;
use supershift_core::precision::Policy;
use supershift_core::sampling::{EpsilonFamily, EpsilonSequence};
use supershift_core::supershift::Rule;
use supershift_core::target::Target;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperoscConfig {
    pub n_list: Vec<u32>,
    pub lambda_list: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
    #[serde(default)]
    pub eps: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapolateConfig {
    pub target: String,
    pub n_list: Vec<u32>,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_step: f64,
    pub family: Vec<EpsilonSequence>,
    pub rule: Rule,
    pub expect: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaylorConfig {
    pub target: String,
    pub b_prime: f64,
    pub m_list: Vec<u32>,
    pub kappa_max_list: Vec<u32>,
    #[serde(default = "eps_zero")]
    pub eps: EpsilonSequence,
}

fn eps_zero() -> EpsilonSequence {
    EpsilonSequence::Zero
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegendreConfig {
    pub target: String,
    /// rational strings, e.g. "1/3"
    pub b_prime: String,
    pub eps: String,
    pub r: String,
    pub n: u32,
    pub nu_max_orthonormality: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KantorovichConfig {
    pub rho0: f64,
    pub a_grid: Vec<f64>,
    pub n_list: Vec<u32>,
    #[serde(default = "eps_zero")]
    pub eps: EpsilonSequence,
    pub final_error_max: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceConfig {
    pub a_eval: f64,
    pub n_list: Vec<u32>,
    pub min_ratio: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicConfig {
    /// period expressed as a multiple of pi
    pub period_over_pi: f64,
    /// rows [kappa, re, im]
    pub modes: Vec<(i64, f64, f64)>,
    pub identity_r: f64,
    pub identity_n_list: Vec<u32>,
    pub a_prime_grid: Vec<f64>,
    pub decay_r_list: Vec<f64>,
    pub decay_n_list: Vec<u32>,
    #[serde(default = "default_chi")]
    pub chi: u32,
}

fn default_chi() -> u32 {
    supershift_core::periodic::DEFAULT_CHI
}

/// Resolve a target selector string from a config.
pub fn parse_target(name: &str) -> Result<Target> {
    if let Some(lam) = name.strip_prefix("exp_i:") {
        let lam: f64 = lam
            .parse()
            .map_err(|_| Error::Parse(format!("bad lambda in {name:?}")))?;
        return Ok(Target::ExpI {
            lambda: rug::Float::with_val(64, lam),
        });
    }
    Ok(match name {
        "const" => Target::Const(Rational::from(1)),
        "identity" => Target::Identity,
        "abs" => Target::Abs,
        "cos" => Target::Cos,
        "sinh" => Target::Sinh,
        "exp" => Target::Exp,
        "poly5" => Target::degree5_poly(),
        "glued" => Target::Glued {
            glue: GluedFunction::default_pair(),
            rho0: 0.5,
        },
        "warped_glued" => Target::WarpedGlued {
            glue: GluedFunction::default_pair(),
            theta: ThetaMap::new(0.5)?,
        },
        _ => return Err(Error::Parse(format!("unknown target {name:?}"))),
    })
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    Rational::parse(s)
        .map(|inc| Rational::from(inc))
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

pub fn build_family(members: &[EpsilonSequence]) -> EpsilonFamily {
    EpsilonFamily::new(members.to_vec())
}

pub fn build_spectrum(p: Policy, cfg: &PeriodicConfig) -> Result<FourierSpectrum> {
    let period = p.float(rug::float::Constant::Pi) * p.float(cfg.period_over_pi);
    let coeffs = cfg
        .modes
        .iter()
        .map(|&(k, re, im)| (k, p.complex((re, im))))
        .collect();
    FourierSpectrum::new(p.float(period), coeffs)
}
