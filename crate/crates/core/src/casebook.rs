//! Concrete function gallery: the glued continuous-but-not-analytic target,
//! the arctan warp that turns regular rows into slightly irregular ones, and
//! the classical equidistant-Lagrange divergence demonstration for |a|.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::Policy;
use crate::sampling::{regular_frequencies, FrequencyRow};
use crate::trigpoly::lagrange_weights;

/// Entire function given by a real-rational-coefficient polynomial
/// (ascending powers).
#[derive(Clone, Debug, PartialEq)]
pub struct EntirePoly {
    pub coeffs: Vec<Rational>,
}

impl EntirePoly {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        EntirePoly { coeffs }
    }

    pub fn eval(&self, p: Policy, t: &Float) -> Float {
        let mut acc = p.zero();
        for c in self.coeffs.iter().rev() {
            acc = p.float(acc * t) + p.float(c);
        }
        acc
    }

    pub fn eval_exact(&self, t: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> EntirePoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Rational::from(c * Rational::from(k as u32)))
            .collect();
        EntirePoly::new(coeffs)
    }
}

/// Two entire halves agreeing in value, but not in slope, at the glue point
/// b = 1/2.
#[derive(Clone, Debug, PartialEq)]
pub struct GluedFunction {
    pub g_minus: EntirePoly,
    pub g_plus: EntirePoly,
}

impl GluedFunction {
    pub fn new(g_minus: EntirePoly, g_plus: EntirePoly) -> Result<Self> {
        let half = Rational::from((1, 2));
        if g_minus.eval_exact(&half) != g_plus.eval_exact(&half) {
            return Err(Error::Validation(
                "glued halves must agree in value at b = 1/2".into(),
            ));
        }
        if g_minus.derivative().eval_exact(&half) == g_plus.derivative().eval_exact(&half) {
            return Err(Error::Validation(
                "glued halves must differ in slope at b = 1/2".into(),
            ));
        }
        Ok(GluedFunction { g_minus, g_plus })
    }

    /// Default pair `G-(z) = z - 1/2`, `G+(z) = 2(z - 1/2)`.
    pub fn default_pair() -> Self {
        GluedFunction {
            g_minus: EntirePoly::new(vec![Rational::from((-1, 2)), Rational::from(1)]),
            g_plus: EntirePoly::new(vec![Rational::from(-1), Rational::from(2)]),
        }
    }

    /// The continuous map `g(b) = G-(b)` for b < 1/2, `G+(b)` otherwise.
    pub fn glue_eval(&self, p: Policy, b: &Float) -> Float {
        if *b < 0.5 {
            self.g_minus.eval(p, b)
        } else {
            self.g_plus.eval(p, b)
        }
    }
}

/// `psi0(a) = g((1+a)/2)` on `A0 = (-1-rho0, 1+rho0)`.
pub fn glued_psi0(p: Policy, glue: &GluedFunction, rho0: f64, a: &Float) -> Result<Float> {
    let bound = 1.0 + rho0;
    if a.clone().abs() >= bound {
        return Err(Error::Domain(format!(
            "a = {} outside ({}, {})",
            a.to_f64(),
            -bound,
            bound
        )));
    }
    let b = p.float(p.float(a + 1u32) / 2);
    Ok(glue.glue_eval(p, &b))
}

/// Odd strictly increasing homeomorphism of the real line onto
/// `(-(1+rho0), 1+rho0)` with fixed points 0 and +-1.
#[derive(Clone, Debug)]
pub struct ThetaMap {
    pub rho0: f64,
}

impl ThetaMap {
    pub fn new(rho0: f64) -> Result<Self> {
        if !(rho0 > 0.0) {
            return Err(Error::Domain(format!("rho0 must be > 0, got {rho0}")));
        }
        Ok(ThetaMap { rho0 })
    }

    /// `pi / (2 (1 + rho0))`
    fn half_angle(&self, p: Policy) -> Float {
        let pi = p.float(rug::float::Constant::Pi);
        p.float(pi / &p.float(2.0 * (1.0 + self.rho0)))
    }

    /// `Theta(a) = (2(1+rho0)/pi) atan(a tan(pi/(2(1+rho0))))`
    pub fn forward(&self, p: Policy, a: &Float) -> Float {
        let half = self.half_angle(p);
        let scale = half.clone().tan();
        let atan = p.float(a * &scale).atan();
        p.float(atan / &half)
    }

    /// True inverse: `tan(alpha pi/(2(1+rho0))) / tan(pi/(2(1+rho0)))`.
    pub fn inverse(&self, p: Policy, alpha: &Float) -> Result<Float> {
        let bound = 1.0 + self.rho0;
        if alpha.clone().abs() >= bound {
            return Err(Error::Domain(format!(
                "alpha = {} outside the range ({}, {})",
                alpha.to_f64(),
                -bound,
                bound
            )));
        }
        let half = self.half_angle(p);
        let scale = half.clone().tan();
        Ok(p.float(p.float(alpha * &half).tan() / &scale))
    }
}

/// Warped row: the true Theta-preimage of the regular row for (N, eps).
/// Strictly decreasing and contained in [-1,1] for eps in [0,1).
pub fn warped_frequencies(p: Policy, theta: &ThetaMap, n: u32, eps: &Float) -> Result<FrequencyRow> {
    let regular = regular_frequencies(p, n, eps)?;
    let mut values = Vec::with_capacity(regular.len());
    for h in &regular.values {
        values.push(theta.inverse(p, h)?);
    }
    FrequencyRow::new(p, n, values)
}

/// Binomial extrapolation of `psi = psi0 o Theta` steered by `Theta(a)` on
/// the warped row. Approaches `psi(a)` on compact a-grids as N grows.
pub fn warped_extrapolate(
    p: Policy,
    glue: &GluedFunction,
    theta: &ThetaMap,
    a: &Float,
    n: u32,
    eps: &Float,
) -> Result<Float> {
    let alpha = theta.forward(p, a);
    let row = warped_frequencies(p, theta, n, eps)?;
    let plus = p.float(p.float(&alpha + 1u32) / 2);
    let minus = p.float(p.float(1u32 - &alpha) / 2);
    let mut acc = p.zero();
    for (v, h) in row.values.iter().enumerate() {
        let b = Integer::from(Integer::binomial(Integer::from(n), v as u32));
        let coeff = p.float(&b) * plus.clone().pow(n - v as u32) * minus.clone().pow(v as u32);
        let sample = glued_psi0(p, glue, theta.rho0, &theta.forward(p, h))?;
        acc += p.float(coeff * &sample);
    }
    Ok(acc)
}

/// Per-N error of plain equidistant Lagrange interpolation of |a|, with the
/// evaluation point auto-perturbed off the node lattice when needed.
#[derive(Clone, Debug)]
pub struct DivergenceReport {
    pub a_eval: Float,
    pub perturbed: bool,
    pub errors: BTreeMap<u32, Float>,
}

const NODE_SNAP: f64 = 1.0 / (1 << 20) as f64;
const NODE_SHIFT: f64 = 1.0 / (1 << 16) as f64;

pub fn abs_lagrange_divergence(
    p: Policy,
    a_eval: &Float,
    n_list: &[u32],
) -> Result<DivergenceReport> {
    if a_eval.clone().abs() > 1 {
        return Err(Error::Domain("a_eval must lie in [-1,1]".into()));
    }
    let rows: Vec<FrequencyRow> = n_list
        .iter()
        .map(|&n| regular_frequencies(p, n, &p.zero()))
        .collect::<Result<_>>()?;

    let near_node = |a: &Float| {
        rows.iter().any(|row| {
            row.values
                .iter()
                .any(|h| p.float(a - h).abs() < NODE_SNAP)
        })
    };
    let mut a = a_eval.clone();
    let mut perturbed = false;
    if near_node(&a) {
        a += NODE_SHIFT;
        perturbed = true;
        if near_node(&a) {
            return Err(Error::NodeCollision(format!("{}", a.to_f64())));
        }
    }

    let mut errors = BTreeMap::new();
    for row in &rows {
        let w = lagrange_weights(p, &row.values, &a)?;
        let mut interp = p.zero();
        for (wv, h) in w.iter().zip(&row.values) {
            interp += p.float(wv * &h.clone().abs());
        }
        let err = p.float(a.clone().abs() - interp).abs();
        errors.insert(row.n, err);
    }
    Ok(DivergenceReport {
        a_eval: a,
        perturbed,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Policy {
        Policy::default()
    }

    fn theta() -> ThetaMap {
        ThetaMap::new(0.5).unwrap()
    }

    #[test]
    fn theta_fixed_points_and_oddness() {
        let pol = p();
        let th = theta();
        let tol = pol.rel_tol_minus(4);
        assert!(th.forward(pol, &pol.zero()).is_zero());
        assert!(pol.float(th.forward(pol, &pol.float(1)) - 1u32).abs() <= tol);
        assert!(pol.float(th.forward(pol, &pol.float(-1)) + 1u32).abs() <= tol);
        for a in [0.3, 1.7, 2.9] {
            let fwd = th.forward(pol, &pol.float(a));
            let neg = th.forward(pol, &pol.float(-a));
            assert!(pol.float(&fwd + &neg).abs() <= tol);
        }
    }

    #[test]
    fn theta_round_trip() {
        let pol = p();
        let th = theta();
        for a in [-2.0, -0.4, 0.0, 0.9, 3.5] {
            let a = pol.float(a);
            let back = th.inverse(pol, &th.forward(pol, &a)).unwrap();
            let tol = pol.float(pol.half_rel_tol() * Float::max(pol.float(1), &a.clone().abs()));
            assert!(pol.float(&back - &a).abs() <= tol);
        }
    }

    #[test]
    fn theta_range_is_open_interval() {
        let pol = p();
        let th = theta();
        let big = th.forward(pol, &pol.float(1e12));
        assert!(big < 1.5);
        assert!(th.inverse(pol, &pol.float(1.5)).is_err());
    }

    #[test]
    fn warped_row_matches_regular_fixed_points() {
        let pol = p();
        let row = warped_frequencies(pol, &theta(), 2, &pol.zero()).unwrap();
        let tol = pol.rel_tol_minus(4);
        assert!(pol.float(&row.values[0] - 1u32).abs() <= tol);
        assert!(row.values[1].clone().abs() <= tol);
        assert!(pol.float(&row.values[2] + 1u32).abs() <= tol);
    }

    #[test]
    fn warped_row_stays_in_unit_interval() {
        let pol = p();
        for n in [3u32, 8, 17] {
            let eps = pol.float(0.3);
            let row = warped_frequencies(pol, &theta(), n, &eps).unwrap();
            row.validate(pol).unwrap();
        }
    }

    #[test]
    fn glued_default_values() {
        let pol = p();
        let g = GluedFunction::default_pair();
        assert!(glued_psi0(pol, &g, 0.5, &pol.zero()).unwrap().is_zero());
        assert_eq!(glued_psi0(pol, &g, 0.5, &pol.float(-1)).unwrap(), pol.float(-0.5));
        assert_eq!(glued_psi0(pol, &g, 0.5, &pol.float(1)).unwrap(), 1);
        assert!(glued_psi0(pol, &g, 0.5, &pol.float(1.5)).is_err());
    }

    #[test]
    fn glued_one_sided_slopes_differ() {
        let pol = p();
        let g = GluedFunction::default_pair();
        let h = pol.float(2).pow(-60i32);
        let left = pol.float(
            glued_psi0(pol, &g, 0.5, &pol.float(-&h)).unwrap() / &pol.float(-&h),
        );
        let right = pol.float(glued_psi0(pol, &g, 0.5, &h).unwrap() / &h);
        assert!(pol.float(&left - &pol.float(0.5)).abs() <= pol.float(1e-50));
        assert!(pol.float(&right - 1u32).abs() <= pol.float(1e-50));
    }

    #[test]
    fn glued_rejects_bad_pairs() {
        // value mismatch at 1/2
        let a = EntirePoly::new(vec![Rational::from(0), Rational::from(1)]);
        let b = EntirePoly::new(vec![Rational::from(1), Rational::from(2)]);
        assert!(GluedFunction::new(a.clone(), b).is_err());
        // identical slopes
        assert!(GluedFunction::new(a.clone(), a).is_err());
    }

    #[test]
    fn warped_extrapolation_refines() {
        let pol = p();
        let g = GluedFunction::default_pair();
        let th = theta();
        let a = pol.float(2);
        let target = glued_psi0(pol, &g, 0.5, &th.forward(pol, &a)).unwrap();
        let e8 = pol
            .float(warped_extrapolate(pol, &g, &th, &a, 8, &pol.zero()).unwrap() - &target)
            .abs();
        let e64 = pol
            .float(warped_extrapolate(pol, &g, &th, &a, 64, &pol.zero()).unwrap() - &target)
            .abs();
        assert!(e64 < e8);
    }

    #[test]
    fn warped_extrapolation_at_zero() {
        let pol = p();
        let g = GluedFunction::default_pair();
        let v = warped_extrapolate(pol, &g, &theta(), &pol.zero(), 32, &pol.zero()).unwrap();
        assert!(v.abs() < 0.05);
    }

    #[test]
    fn divergence_frozen_oracle_values() {
        // brute-force exact-rational oracle values for a_eval = 1/2, eps = 0
        let pol = p();
        let rep = abs_lagrange_divergence(pol, &pol.float(0.5), &[5, 11, 21, 41]).unwrap();
        assert!(!rep.perturbed);
        let expect = [
            (5u32, 0.0224609375),
            (11, 0.005351439118385315),
            (21, 0.0028433792351724024),
            (41, 0.00508765054287463),
        ];
        for (n, want) in expect {
            let got = rep.errors[&n].to_f64();
            assert!((got - want).abs() < 1e-12, "N={n}: got {got}, want {want}");
        }
        // tail increases at the last refinement
        assert!(rep.errors[&41] > rep.errors[&21]);
    }

    #[test]
    fn divergence_small_at_odd_n_near_zero() {
        let pol = p();
        let rep = abs_lagrange_divergence(pol, &pol.zero(), &[3]).unwrap();
        // 0 is a node only for even N; for N=3 the error is exactly 1/4
        assert!(!rep.perturbed);
        assert!(pol.float(&rep.errors[&3] - &pol.float(0.25)).abs() <= pol.half_rel_tol());
    }

    #[test]
    fn divergence_perturbs_node_hits() {
        let pol = p();
        // 0.5 is the node 1 - 2*1/4 for N = 4
        let rep = abs_lagrange_divergence(pol, &pol.float(0.5), &[4]).unwrap();
        assert!(rep.perturbed);
        assert!(pol.float(&rep.a_eval - &pol.float(0.5)).abs() > 0.0);
    }
}
