//! Sampled target functions: the entire restrictions, the glued and warped
//! non-analytic cases, periodic spectra, and the closure of the gallery under
//! translation, reflection and the affine change of variables.

use std::collections::HashMap;
use std::sync::Mutex;

use rug::{Complex, Float, Rational};

use crate::casebook::{glued_psi0, GluedFunction, ThetaMap};
use crate::error::{Error, Result};
use crate::periodic::FourierSpectrum;
use crate::precision::Policy;

/// A deterministic complex-valued function of a real argument. Same policy
/// and same argument always give the bit-identical value.
#[derive(Clone, Debug)]
pub enum Target {
    Const(Rational),
    /// t -> t
    Identity,
    /// t -> |t|
    Abs,
    Cos,
    Sinh,
    /// t -> e^t
    Exp,
    /// t -> e^{i lambda t}
    ExpI { lambda: Float },
    /// polynomial with rational coefficients, ascending powers
    Poly(Vec<Rational>),
    /// the glued psi0 on (-1-rho0, 1+rho0)
    Glued { glue: GluedFunction, rho0: f64 },
    /// psi = psi0 o Theta, defined on all of R
    WarpedGlued { glue: GluedFunction, theta: ThetaMap },
    Periodic(FourierSpectrum),
    /// a -> inner(a - a0)
    Translate { inner: Box<Target>, a0: Float },
    /// a -> inner(-a)
    Reflect(Box<Target>),
    /// t -> inner(2t - 1)
    ComposeUpsilon(Box<Target>),
}

impl Target {
    pub fn degree5_poly() -> Target {
        // 1 + t - t^3/6 + t^5/120, the odd Taylor head of sin plus 1
        Target::Poly(vec![
            Rational::from(1),
            Rational::from(1),
            Rational::new(),
            Rational::from((-1, 6)),
            Rational::new(),
            Rational::from((1, 120)),
        ])
    }

    pub fn translate(self, a0: Float) -> Target {
        Target::Translate {
            inner: Box::new(self),
            a0,
        }
    }

    pub fn reflect(self) -> Target {
        Target::Reflect(Box::new(self))
    }

    pub fn compose_upsilon(self) -> Target {
        Target::ComposeUpsilon(Box::new(self))
    }

    pub fn name(&self) -> String {
        match self {
            Target::Const(c) => format!("const({c})"),
            Target::Identity => "identity".into(),
            Target::Abs => "abs".into(),
            Target::Cos => "cos".into(),
            Target::Sinh => "sinh".into(),
            Target::Exp => "exp".into(),
            Target::ExpI { lambda } => format!("exp_i({})", lambda.to_f64()),
            Target::Poly(c) => format!("poly(deg {})", c.len().saturating_sub(1)),
            Target::Glued { .. } => "glued".into(),
            Target::WarpedGlued { .. } => "warped_glued".into(),
            Target::Periodic(_) => "periodic".into(),
            Target::Translate { inner, .. } => format!("translate({})", inner.name()),
            Target::Reflect(inner) => format!("reflect({})", inner.name()),
            Target::ComposeUpsilon(inner) => format!("upsilon({})", inner.name()),
        }
    }

    /// Declared open domain.
    pub fn contains(&self, p: Policy, t: &Float) -> bool {
        match self {
            Target::Glued { rho0, .. } => t.clone().abs() < 1.0 + rho0,
            Target::Translate { inner, a0 } => inner.contains(p, &p.float(t - a0)),
            Target::Reflect(inner) => inner.contains(p, &p.float(-t)),
            Target::ComposeUpsilon(inner) => inner.contains(p, &p.float(p.float(2 * t) - 1u32)),
            _ => true,
        }
    }

    pub fn eval(&self, p: Policy, t: &Float) -> Result<Complex> {
        if !self.contains(p, t) {
            return Err(Error::Domain(format!(
                "{} undefined at t = {}",
                self.name(),
                t.to_f64()
            )));
        }
        Ok(match self {
            Target::Const(c) => p.complex((p.float(c), 0)),
            Target::Identity => p.complex((t, 0)),
            Target::Abs => p.complex((t.clone().abs(), 0)),
            Target::Cos => p.complex((t.clone().cos(), 0)),
            Target::Sinh => p.complex((t.clone().sinh(), 0)),
            Target::Exp => p.complex((t.clone().exp(), 0)),
            Target::ExpI { lambda } => p.complex((p.float(lambda * t), 0)).mul_i(false).exp(),
            Target::Poly(coeffs) => {
                let mut acc = p.zero();
                for c in coeffs.iter().rev() {
                    acc = p.float(acc * t) + p.float(c);
                }
                p.complex((acc, 0))
            }
            Target::Glued { glue, rho0 } => p.complex((glued_psi0(p, glue, *rho0, t)?, 0)),
            Target::WarpedGlued { glue, theta } => {
                let alpha = theta.forward(p, t);
                p.complex((glued_psi0(p, glue, theta.rho0, &alpha)?, 0))
            }
            Target::Periodic(s) => s.eval(p, t),
            Target::Translate { inner, a0 } => inner.eval(p, &p.float(t - a0))?,
            Target::Reflect(inner) => inner.eval(p, &p.float(-t))?,
            Target::ComposeUpsilon(inner) => inner.eval(p, &p.float(p.float(2 * t) - 1u32))?,
        })
    }

    /// Exact-rational value where the target is rational-valued at rational
    /// arguments; None for the transcendental cases.
    pub fn eval_exact(&self, t: &Rational) -> Option<Rational> {
        match self {
            Target::Const(c) => Some(c.clone()),
            Target::Identity => Some(t.clone()),
            Target::Abs => Some(t.clone().abs()),
            Target::Poly(coeffs) => {
                let mut acc = Rational::new();
                for c in coeffs.iter().rev() {
                    acc = acc * t + c;
                }
                Some(acc)
            }
            Target::Reflect(inner) => inner.eval_exact(&Rational::from(-t)),
            Target::ComposeUpsilon(inner) => {
                inner.eval_exact(&(Rational::from(2 * t) - Rational::from(1)))
            }
            _ => None,
        }
    }
}

/// Sampling cache for sweeps that revisit identical arguments. Keyed by the
/// exact bits of the argument, so a hit is bit-for-bit the cached value.
pub struct MemoTarget<'a> {
    inner: &'a Target,
    cache: Mutex<HashMap<String, Complex>>,
}

impl<'a> MemoTarget<'a> {
    pub fn new(inner: &'a Target) -> Self {
        MemoTarget {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn eval(&self, p: Policy, t: &Float) -> Result<Complex> {
        let key = t.to_string_radix(16, None);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = self.inner.eval(p, t)?;
        self.cache.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Policy {
        Policy::default()
    }

    #[test]
    fn identity_and_poly_agree_with_exact() {
        let pol = p();
        let t_f = pol.float(0.75);
        let t_q = Rational::from((3, 4));
        for target in [Target::Identity, Target::Abs, Target::degree5_poly()] {
            let f = target.eval(pol, &t_f).unwrap();
            let q = target.eval_exact(&t_q).unwrap();
            assert_eq!(*f.real(), pol.float(&q));
            assert!(f.imag().is_zero());
        }
    }

    #[test]
    fn exp_i_matches_cos_sin() {
        let pol = p();
        let lam = pol.float(3);
        let t = pol.float(0.4);
        let v = Target::ExpI { lambda: lam.clone() }
            .eval(pol, &t)
            .unwrap();
        let arg = pol.float(&lam * &t);
        assert!(pol.float(v.real() - &arg.clone().cos()).abs() <= pol.half_rel_tol());
        assert!(pol.float(v.imag() - &arg.sin()).abs() <= pol.half_rel_tol());
    }

    #[test]
    fn translate_and_reflect_compose() {
        let pol = p();
        let t = Target::Cos.translate(pol.float(1));
        let v = t.eval(pol, &pol.float(1)).unwrap();
        assert!(pol.float(v.real() - 1u32).abs() <= pol.half_rel_tol());

        let r = Target::Cos.reflect();
        let a = pol.float(1);
        let direct = Target::Cos.eval(pol, &a).unwrap();
        assert_eq!(r.eval(pol, &a).unwrap(), direct);

        let rr = Target::Sinh.reflect().reflect();
        let x = pol.float(0.3);
        assert_eq!(
            rr.eval(pol, &x).unwrap(),
            Target::Sinh.eval(pol, &x).unwrap()
        );
    }

    #[test]
    fn translate_zero_is_identity_on_samples() {
        let pol = p();
        let t = Target::degree5_poly();
        let shifted = t.clone().translate(pol.zero());
        for x in [-2.0, 0.0, 1.3] {
            let x = pol.float(x);
            assert_eq!(t.eval(pol, &x).unwrap(), shifted.eval(pol, &x).unwrap());
        }
    }

    #[test]
    fn upsilon_change_of_variables() {
        let pol = p();
        let comp = Target::Cos.compose_upsilon();
        let b = pol.float(0.25);
        let want = Target::Cos.eval(pol, &pol.float(-0.5)).unwrap();
        assert_eq!(comp.eval(pol, &b).unwrap(), want);

        let t_q = Rational::from((1, 4));
        let exact = Target::Identity.compose_upsilon().eval_exact(&t_q).unwrap();
        assert_eq!(exact, Rational::from((-1, 2)));
    }

    #[test]
    fn glued_domain_is_enforced() {
        let pol = p();
        let t = Target::Glued {
            glue: GluedFunction::default_pair(),
            rho0: 0.5,
        };
        assert!(t.eval(pol, &pol.float(1.4)).is_ok());
        assert!(matches!(
            t.eval(pol, &pol.float(1.6)),
            Err(Error::Domain(_))
        ));
        // warped version is total
        let w = Target::WarpedGlued {
            glue: GluedFunction::default_pair(),
            theta: ThetaMap::new(0.5).unwrap(),
        };
        assert!(w.eval(pol, &pol.float(100)).is_ok());
    }

    #[test]
    fn memo_returns_bit_identical_values() {
        let pol = p();
        let t = Target::Cos;
        let memo = MemoTarget::new(&t);
        let x = pol.float(1.234_f64);
        let first = memo.eval(pol, &x).unwrap();
        let second = memo.eval(pol, &x).unwrap();
        assert_eq!(first, second);
        assert_eq!(first, t.eval(pol, &x).unwrap());
    }
}
