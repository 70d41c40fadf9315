//! One runner per subcommand. Each consumes a validated config, executes the
//! corresponding pipeline, and returns CSV tables plus assertion outcomes.


use rug::{Float, Rational};
use serde_json::json;
use supershift_core::casebook::{abs_lagrange_divergence, glued_psi0, warped_extrapolate, GluedFunction, ThetaMap};
use supershift_core::discrete_taylor::{bernstein_form_exact, numerical_taylor, radius_diagnostic};
use supershift_core::error::{Error, Result};
use supershift_core::legendre::{coefficient_identity_check_exact, project_exact, shifted_legendre_rational};
use supershift_core::par::map_indexed;
use supershift_core::periodic::{decay_certificate, multiplier_identity_check};
use supershift_core::precision::{decimal, decimal_re_im, Policy};
use supershift_core::sampling::regular_frequencies;
use supershift_core::supershift::{extrapolate, ConvergenceReport, Rule, Verdict};

use supershift_core::trigpoly::{bernstein_coefficients, eval_regular_closed_form, lagrange_weights, TrigPoly};

use crate::config::*;
use crate::output::{Assertion, CsvTable, RunArtifacts};

/// Shared pass tolerance for float identities: 2^-64 relative.
fn identity_tol(p: Policy) -> Float {
    let mut t = p.float(1);
    t >>= 64;
    t
}

fn float_grid(p: Policy, lo: f64, hi: f64, step: f64) -> Result<Vec<Float>> {
    if !(step > 0.0) || hi < lo {
        return Err(Error::Domain("need hi >= lo and step > 0".into()));
    }
    let count = ((hi - lo) / step).round() as i64;
    Ok((0..=count)
        .map(|k| p.float(lo) + p.float(k) * p.float(step))
        .collect())
}

pub fn run_superosc(p: Policy, cfg: &SuperoscConfig) -> Result<RunArtifacts> {
    let xs = float_grid(p, cfg.x_min, cfg.x_max, cfg.x_step)?;
    let eps = p.float(cfg.eps);
    let mut table = CsvTable::new("superosc", &["N", "lambda", "x", "rel_diff"]);
    let mut worst = p.zero();
    for &n in &cfg.n_list {
        for &lam in &cfg.lambda_list {
            let lam = p.float(lam);
            let poly = TrigPoly::bernstein(p, n, &lam, &eps)?;
            let rows: Vec<Float> = map_indexed(&xs, |x| {
                let z = p.complex((x, 0));
                let direct = poly.eval(p, &z);
                let closed = eval_regular_closed_form(p, n, &eps, &lam, &z);
                let denom = Float::max(
                    p.float(1),
                    &p.float(closed.clone().abs().into_real_imag().0),
                );
                p.float(p.float(p.complex(&direct - &closed).abs().into_real_imag().0) / denom)
            });
            for (x, rel) in xs.iter().zip(rows) {
                if rel > worst {
                    worst = rel.clone();
                }
                table.push(vec![
                    n.to_string(),
                    decimal(&lam),
                    decimal(x),
                    decimal(&rel),
                ]);
            }
        }
    }
    let tol = identity_tol(p);
    let assertions = vec![Assertion::new(
        "closed_form_equivalence",
        worst <= tol,
        format!("max rel diff {:.3e} vs tol {:.3e}", worst.to_f64(), tol.to_f64()),
    )];
    Ok(RunArtifacts {
        tables: vec![table],
        assertions,
        extra: json!({ "max_rel_diff": decimal(&worst) }),
    })
}

fn parse_verdict(s: &str) -> Result<Verdict> {
    Ok(match s {
        "converging" => Verdict::Converging,
        "diverging" => Verdict::Diverging,
        "inconclusive" => Verdict::Inconclusive,
        _ => return Err(Error::Parse(format!("unknown verdict {s:?}"))),
    })
}

pub fn run_extrapolate(p: Policy, cfg: &ExtrapolateConfig) -> Result<RunArtifacts> {
    let psi = parse_target(&cfg.target)?;
    let family = build_family(&cfg.family);
    family.validate(p, &cfg.n_list)?;
    let axis = float_grid(p, cfg.grid_lo, cfg.grid_hi, cfg.grid_step)?;
    let mut points = Vec::new();
    for a in &axis {
        for a_prime in &axis {
            points.push((a.clone(), a_prime.clone()));
        }
    }
    let rule_name = match cfg.rule {
        Rule::Bernstein => "bernstein",
        Rule::Lagrange => "lagrange",
    };
    let mut table = CsvTable::new(
        "extrapolate",
        &["rule", "iota", "N", "a", "a_prime", "abs_error"],
    );
    let mut per_member = Vec::new();
    for (iota, member) in family.members.iter().enumerate() {
        let mut by_n = std::collections::BTreeMap::new();
        for &n in &cfg.n_list {
            let eps = member.value(p, n);
            let row = regular_frequencies(p, n, &eps)?;
            let errors: Vec<Result<Float>> = map_indexed(&points, |(a, a_prime)| {
                let coeffs = match cfg.rule {
                    Rule::Bernstein => bernstein_coefficients(p, n, a)?,
                    Rule::Lagrange => lagrange_weights(p, &row.values, a)?,
                };
                let got = extrapolate(p, &psi, a_prime, &row, &coeffs)?;
                let want = psi.eval(p, &p.float(a + a_prime))?;
                Ok(p.float(p.complex(&got - &want).abs().into_real_imag().0))
            });
            let mut sup = p.zero();
            for ((a, a_prime), e) in points.iter().zip(errors) {
                let e = e?;
                table.push(vec![
                    rule_name.to_string(),
                    iota.to_string(),
                    n.to_string(),
                    decimal(a),
                    decimal(a_prime),
                    decimal(&e),
                ]);
                if e > sup {
                    sup = e;
                }
            }
            by_n.insert(n, sup);
        }
        per_member.push(by_n);
    }
    let report = ConvergenceReport::assemble(p, per_member);
    let expect = parse_verdict(&cfg.expect)?;
    let assertions = vec![Assertion::new(
        "verdict",
        report.verdict == expect,
        format!("got {:?}, expected {:?}", report.verdict, expect),
    )];
    let sup_json: serde_json::Map<String, serde_json::Value> = report
        .uniform_sup
        .iter()
        .map(|(n, e)| (n.to_string(), json!(decimal(e))))
        .collect();
    Ok(RunArtifacts {
        tables: vec![table],
        assertions,
        extra: json!({ "verdict": report.verdict, "uniform_sup": sup_json }),
    })
}

pub fn run_taylor(p: Policy, cfg: &TaylorConfig, exact: bool) -> Result<RunArtifacts> {
    let psi = parse_target(&cfg.target)?;
    let b = p.float(cfg.b_prime);
    if cfg.kappa_max_list.len() < 2 || !cfg.kappa_max_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Validation(
            "kappa_max_list must be increasing with at least two entries".into(),
        ));
    }
    let mut table = CsvTable::new(
        "taylor",
        &["M", "kappa_max", "kappa", "coeff_re", "coeff_im", "root_stat"],
    );
    let mut assertions = Vec::new();
    for &m in &cfg.m_list {
        let mut stats = Vec::new();
        for &kappa_max in &cfg.kappa_max_list {
            let series = numerical_taylor(p, &psi, &b, m, kappa_max, &cfg.eps)?;
            let stat = radius_diagnostic(p, &series)?;
            for (kappa, c) in series.coeffs.iter().enumerate() {
                let (re, im) = decimal_re_im(c);
                table.push(vec![
                    m.to_string(),
                    kappa_max.to_string(),
                    kappa.to_string(),
                    re,
                    im,
                    decimal(&stat),
                ]);
            }
            stats.push(stat);
        }
        let last = stats.last().unwrap();
        let first = &stats[0];
        assertions.push(Assertion::new(
            &format!("radius_decreases_M{m}"),
            last < first,
            format!("{} -> {}", first.to_f64(), last.to_f64()),
        ));
    }
    if exact {
        // rational cross-check of the float coefficient pipeline, N <= 12
        let b_q = rational_from_dyadic(&b)?;
        if cfg.eps != supershift_core::sampling::EpsilonSequence::Zero {
            return Err(Error::Validation(
                "exact mode supports only the zero eps sequence".into(),
            ));
        }
        if psi.eval_exact(&b_q).is_none() {
            return Err(Error::Validation(format!(
                "exact mode unsupported for target {}",
                psi.name()
            )));
        }
        let mut max_diff = p.zero();
        for n in 1..=12u32 {
            let exact_coeffs = bernstein_form_exact(&psi, &b_q, n, &Rational::new())?;
            let form = supershift_core::discrete_taylor::bernstein_form(
                p,
                &psi,
                &b,
                n,
                &p.zero(),
            )?;
            for (q, c) in exact_coeffs.iter().zip(&form.coeffs) {
                let d = p.float(p.complex(c - &p.complex((p.float(q), 0))).abs().into_real_imag().0);
                if d > max_diff {
                    max_diff = d;
                }
            }
        }
        let tol = identity_tol(p);
        assertions.push(Assertion::new(
            "exact_cross_check",
            max_diff <= tol,
            format!("max coefficient diff {:.3e}", max_diff.to_f64()),
        ));
    }
    Ok(RunArtifacts {
        tables: vec![table],
        assertions,
        extra: json!({}),
    })
}

/// Exact rational value of a dyadic float (grid points and config constants
/// are dyadic by construction).
fn rational_from_dyadic(f: &Float) -> Result<Rational> {
    f.to_rational()
        .ok_or_else(|| Error::Domain("value is not finite".into()))
}

pub fn run_legendre(p: Policy, cfg: &LegendreConfig) -> Result<RunArtifacts> {
    let psi = parse_target(&cfg.target)?;
    let b = parse_rational(&cfg.b_prime)?;
    let eps = parse_rational(&cfg.eps)?;
    let r = parse_rational(&cfg.r)?;
    let coeffs = bernstein_form_exact(&psi, &b, cfg.n, &eps)?;
    let gammas_tilde = project_exact(&coeffs, &r);
    let residual = coefficient_identity_check_exact(&coeffs, &gammas_tilde, &r)?;

    let mut table = CsvTable::new("legendre", &["nu", "gamma_re", "gamma_im"]);
    for (nu, gt) in gammas_tilde.iter().enumerate() {
        // gamma = sqrt(2 nu + 1) * gamma_tilde, materialized at policy bits
        let gamma = p.float(p.float(2 * nu as u32 + 1).sqrt() * &p.float(gt));
        table.push(vec![nu.to_string(), decimal(&gamma), "0".into()]);
    }

    let mut ortho_ok = true;
    let bases: Vec<Vec<Rational>> = (0..=cfg.nu_max_orthonormality)
        .map(shifted_legendre_rational)
        .collect();
    'outer: for m in 0..bases.len() {
        for n in m..bases.len() {
            let mut integral = Rational::new();
            for (j, cj) in bases[m].iter().enumerate() {
                for (k, ck) in bases[n].iter().enumerate() {
                    integral += Rational::from(cj * ck) / Rational::from((j + k + 1) as u32);
                }
            }
            let ok = if m == n {
                integral * Rational::from((2 * n + 1) as u32) == 1
            } else {
                integral == 0
            };
            if !ok {
                ortho_ok = false;
                break 'outer;
            }
        }
    }

    let assertions = vec![
        Assertion::new(
            "identity_residual_zero",
            residual == 0,
            format!("exact residual {residual}"),
        ),
        Assertion::new(
            "orthonormality_exact",
            ortho_ok,
            format!("checked nu <= {}", cfg.nu_max_orthonormality),
        ),
    ];
    Ok(RunArtifacts {
        tables: vec![table],
        assertions,
        extra: json!({}),
    })
}

pub fn run_kantorovich(p: Policy, cfg: &KantorovichConfig) -> Result<RunArtifacts> {
    let glue = GluedFunction::default_pair();
    let theta = ThetaMap::new(cfg.rho0)?;
    if cfg.n_list.len() < 2 || !cfg.n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Validation(
            "n_list must be increasing with at least two entries".into(),
        ));
    }
    let mut table = CsvTable::new("kantorovich", &["N", "a", "value", "abs_error"]);
    let mut refined_everywhere = true;
    let mut final_max = p.zero();
    for &a in &cfg.a_grid {
        let a = p.float(a);
        let truth = glued_psi0(p, &glue, cfg.rho0, &theta.forward(p, &a))?;
        let mut errs = Vec::new();
        for &n in &cfg.n_list {
            let eps = cfg.eps.value(p, n);
            let val = warped_extrapolate(p, &glue, &theta, &a, n, &eps)?;
            let err = p.float(&val - &truth).abs();
            table.push(vec![
                n.to_string(),
                decimal(&a),
                decimal(&val),
                decimal(&err),
            ]);
            errs.push(err);
        }
        let last = errs.last().unwrap();
        if !(last < &errs[0]) {
            refined_everywhere = false;
        }
        if *last > final_max {
            final_max = last.clone();
        }
    }
    let assertions = vec![
        Assertion::new(
            "error_refines_at_every_grid_point",
            refined_everywhere,
            format!("N {} vs N {}", cfg.n_list[0], cfg.n_list[cfg.n_list.len() - 1]),
        ),
        Assertion::new(
            "final_error_below_threshold",
            final_max < cfg.final_error_max,
            format!("max {:.3e} vs {:.3e}", final_max.to_f64(), cfg.final_error_max),
        ),
    ];
    Ok(RunArtifacts {
        tables: vec![table],
        assertions,
        extra: json!({ "final_max_error": decimal(&final_max) }),
    })
}

pub fn run_divergence(p: Policy, cfg: &DivergenceConfig) -> Result<RunArtifacts> {
    let rep = abs_lagrange_divergence(p, &p.float(cfg.a_eval), &cfg.n_list)?;
    let mut table = CsvTable::new("divergence", &["N", "abs_error"]);
    for (n, e) in &rep.errors {
        table.push(vec![n.to_string(), decimal(e)]);
    }
    let vals: Vec<&Float> = rep.errors.values().collect();
    let max = vals.iter().fold(p.zero(), |acc, v| Float::max(acc, *v));
    let min = vals
        .iter()
        .fold(p.float(f64::INFINITY), |acc, v| Float::min(acc, *v));
    let ratio = p.float(&max / &min);
    let tail_up = vals[vals.len() - 1] > vals[vals.len() - 2];
    let diverging = ratio > cfg.min_ratio && tail_up;
    let assertions = vec![Assertion::new(
        "diverging",
        diverging,
        format!(
            "max/min ratio {:.3e} (threshold {}), tail increasing: {tail_up}",
            ratio.to_f64(),
            cfg.min_ratio
        ),
    )];
    Ok(RunArtifacts {
        tables: vec![table],
        assertions,
        extra: json!({
            "verdict": if diverging { "Diverging" } else { "Inconclusive" },
            "perturbed": rep.perturbed,
            "a_eval": decimal(&rep.a_eval),
        }),
    })
}

pub fn run_periodic(p: Policy, cfg: &PeriodicConfig) -> Result<RunArtifacts> {
    let spectrum = build_spectrum(p, cfg)?;
    let r = p.float(cfg.identity_r);
    let grid: Vec<Float> = cfg.a_prime_grid.iter().map(|&a| p.float(a)).collect();
    let mut worst_ratio = p.zero();
    for &n in &cfg.identity_n_list {
        let res = multiplier_identity_check(p, &spectrum, &r, &grid, n)?;
        let ratio = p.float(&res.max_residual / &res.scale);
        if ratio > worst_ratio {
            worst_ratio = ratio;
        }
    }
    let tol = identity_tol(p);
    let r_list: Vec<Float> = cfg.decay_r_list.iter().map(|&x| p.float(x)).collect();
    let cert = decay_certificate(p, &spectrum, &r_list, &cfg.decay_n_list, cfg.chi)?;
    let mut table = CsvTable::new(
        "periodic",
        &["R", "N", "kappa", "multiplier_abs", "gamma_bound", "implied_rprime"],
    );
    for row in &cert.rows {
        table.push(vec![
            decimal(&row.r),
            row.n.to_string(),
            row.kappa.to_string(),
            decimal(&row.multiplier_abs),
            decimal(&row.gamma_bound),
            decimal(&row.implied_rprime),
        ]);
    }
    let assertions = vec![
        Assertion::new(
            "multiplier_identity",
            worst_ratio <= tol,
            format!("max scaled residual {:.3e}", worst_ratio.to_f64()),
        ),
        Assertion::new(
            "positive_implied_rprime",
            cert.best_rprime > 0,
            format!("best R' = {:.4}", cert.best_rprime.to_f64()),
        ),
    ];
    Ok(RunArtifacts {
        tables: vec![table],
        assertions,
        extra: json!({ "best_rprime": decimal(&cert.best_rprime) }),
    })
}
