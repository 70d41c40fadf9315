//! Shifted Legendre basis on [0,1], exact-moment projection of the monomial
//! extrapolation polynomial, and the closed-form link between monomial and
//! Legendre coefficients.
//!
//! All integrals reduce to the monomial moments `int_0^1 xi^k dxi = 1/(k+1)`,
//! so no quadrature appears anywhere in this module. The square-root scale
//! `sqrt(2 nu + 1)` is kept symbolic in the exact path by carrying the
//! reduced coefficients `gamma_nu / sqrt(2 nu + 1)`.

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::discrete_taylor::BernsteinFormPoly;
use crate::error::{Error, Result};
use crate::precision::Policy;

/// Monomial coefficients of the reduced basis polynomial
/// `l_nu(xi) / sqrt(2 nu + 1) = sum_k (-1)^k binom(nu,k) binom(nu+k,k) xi^k`.
pub fn shifted_legendre_rational(nu: u32) -> Vec<Rational> {
    (0..=nu)
        .map(|k| {
            let a = Integer::from(Integer::binomial(Integer::from(nu), k));
            let b = Integer::from(Integer::binomial(Integer::from(nu + k), k));
            let c = Rational::from(a * b);
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect()
}

/// Monomial coefficients of `l_nu` including the orthonormalizing scale.
pub fn shifted_legendre(p: Policy, nu: u32) -> Vec<Float> {
    let scale = p.float(2 * nu + 1).sqrt();
    shifted_legendre_rational(nu)
        .iter()
        .map(|c| p.float(&scale * &p.float(c)))
        .collect()
}

/// Projection coefficients `gamma_nu = int_0^1 T(R xi) l_nu(xi) dxi`.
#[derive(Clone, Debug)]
pub struct LegendreCoefficients {
    pub r: Float,
    pub gammas: Vec<Complex>,
}

/// Monomial coefficients of `xi -> T(R xi)`.
fn scaled_coeffs(p: Policy, poly: &BernsteinFormPoly, r: &Float) -> Vec<Complex> {
    poly.coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| p.complex(c * &r.clone().pow(k as u32)))
        .collect()
}

pub fn project(p: Policy, poly: &BernsteinFormPoly, r: &Float) -> Result<LegendreCoefficients> {
    if r.is_sign_negative() && !r.is_zero() {
        return Err(Error::Domain("R must be >= 0".into()));
    }
    let scaled = scaled_coeffs(p, poly, r);
    // moments s_j = int_0^1 xi^j T(R xi) dxi = sum_k c_k R^k / (j + k + 1)
    let deg = scaled.len();
    let moments: Vec<Complex> = (0..deg)
        .map(|j| {
            let mut s = p.complex_zero();
            for (k, c) in scaled.iter().enumerate() {
                s += p.complex(c / &p.float((j + k + 1) as u32));
            }
            s
        })
        .collect();
    let mut gammas = Vec::with_capacity(deg);
    for nu in 0..deg as u32 {
        let scale = p.float(2 * nu + 1).sqrt();
        let basis = shifted_legendre_rational(nu);
        let mut g = p.complex_zero();
        for (j, b) in basis.iter().enumerate() {
            g += p.complex(&moments[j] * &p.float(b));
        }
        gammas.push(p.complex(g * &scale));
    }
    Ok(LegendreCoefficients {
        r: r.clone(),
        gammas,
    })
}

/// Exact reduced coefficients `gamma_nu / sqrt(2 nu + 1)` for a rational
/// monomial polynomial.
pub fn project_exact(coeffs: &[Rational], r: &Rational) -> Vec<Rational> {
    let scaled: Vec<Rational> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| Rational::from(c * &Rational::from(r.clone().pow(k as u32))))
        .collect();
    let deg = scaled.len();
    let moments: Vec<Rational> = (0..deg)
        .map(|j| {
            let mut s = Rational::new();
            for (k, c) in scaled.iter().enumerate() {
                s += Rational::from(c / &Rational::from((j + k + 1) as u32));
            }
            s
        })
        .collect();
    (0..deg as u32)
        .map(|nu| {
            let basis = shifted_legendre_rational(nu);
            let mut g = Rational::new();
            for (j, b) in basis.iter().enumerate() {
                g += Rational::from(&moments[j] * b);
            }
            g
        })
        .collect()
}

/// `sum_nu gamma_nu l_nu(xi)`, the pointwise reconstruction.
pub fn reconstruct(p: Policy, coeffs: &LegendreCoefficients, xi: &Float) -> Complex {
    let mut acc = p.complex_zero();
    for (nu, g) in coeffs.gammas.iter().enumerate() {
        let basis = shifted_legendre(p, nu as u32);
        let mut val = p.zero();
        for b in basis.iter().rev() {
            val = p.float(val * xi) + b;
        }
        acc += p.complex(g * &val);
    }
    acc
}

/// Max over k of the residual of the closed-form identity
/// `a_k R^k = (-1)^k binom(2k,k) sum_{nu>=k} sqrt(2nu+1) binom(nu+k,nu-k) gamma_nu`.
pub fn coefficient_identity_check(
    p: Policy,
    poly: &BernsteinFormPoly,
    coeffs: &LegendreCoefficients,
) -> Result<Float> {
    if coeffs.gammas.len() != poly.coeffs.len() {
        return Err(Error::Shape(format!(
            "{} Legendre coefficients against degree-{} polynomial",
            coeffs.gammas.len(),
            poly.coeffs.len().saturating_sub(1)
        )));
    }
    let n = poly.coeffs.len() - 1;
    let mut worst = p.zero();
    for k in 0..=n {
        let lhs = p.complex(&poly.coeffs[k] * &coeffs.r.clone().pow(k as u32));
        let mut sum = p.complex_zero();
        for nu in k..=n {
            let b = Integer::from(Integer::binomial(
                Integer::from((nu + k) as u32),
                (nu - k) as u32,
            ));
            let scale = p.float(2 * nu as u32 + 1).sqrt();
            sum += p.complex(&coeffs.gammas[nu] * &p.float(&scale * &p.float(&b)));
        }
        let central = Integer::from(Integer::binomial(Integer::from(2 * k as u32), k as u32));
        let mut rhs = p.complex(sum * &p.float(&central));
        if k % 2 == 1 {
            rhs = -rhs;
        }
        let res = p.float(p.complex(&lhs - &rhs).abs().into_real_imag().0);
        if res > worst {
            worst = res;
        }
    }
    Ok(worst)
}

/// Exact residual of the same identity with reduced coefficients; zero for
/// every rational input.
pub fn coefficient_identity_check_exact(
    coeffs: &[Rational],
    gammas_tilde: &[Rational],
    r: &Rational,
) -> Result<Rational> {
    if coeffs.len() != gammas_tilde.len() {
        return Err(Error::Shape("coefficient count mismatch".into()));
    }
    let n = coeffs.len() - 1;
    let mut worst = Rational::new();
    for k in 0..=n {
        let lhs = Rational::from(&coeffs[k] * &Rational::from(r.clone().pow(k as u32)));
        let mut sum = Rational::new();
        for nu in k..=n {
            let b = Integer::from(Integer::binomial(
                Integer::from((nu + k) as u32),
                (nu - k) as u32,
            ));
            // sqrt(2nu+1) gamma_nu = (2nu+1) gamma_tilde_nu
            let scale = Rational::from((2 * nu + 1) as u32);
            sum += Rational::from(&gammas_tilde[nu] * &Rational::from(&b * scale));
        }
        let central = Integer::from(Integer::binomial(Integer::from(2 * k as u32), k as u32));
        let mut rhs = sum * Rational::from(&central);
        if k % 2 == 1 {
            rhs = -rhs;
        }
        let res = Rational::from(lhs - rhs).abs();
        if res > worst {
            worst = res;
        }
    }
    Ok(worst)
}
