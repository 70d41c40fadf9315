//! Forward-difference form of the binomial extrapolation polynomial, the
//! numerical Taylor series built from it, and the root-growth diagnostic that
//! separates analytic-type coefficient decay from the rest.

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::precision::Policy;
use crate::sampling::EpsilonSequence;
use crate::target::Target;

/// Affine change of variables `t -> 2t - 1` mapping [0,1] onto [-1,1].
pub fn upsilon(p: Policy, t: &Float) -> Float {
    p.float(p.float(2 * t) - 1u32)
}

pub fn upsilon_inv(p: Policy, a: &Float) -> Float {
    p.float(p.float(a + 1u32) / 2)
}

/// Triangular table of iterated forward differences with a fixed step.
/// Row `k` holds `Delta^k` at the first `N+1-k` sample points.
#[derive(Clone, Debug)]
pub struct ForwardDifferenceTable {
    pub b_prime: Float,
    pub step: Float,
    pub rows: Vec<Vec<Complex>>,
}

impl ForwardDifferenceTable {
    /// `Delta^k` evaluated at the base point.
    pub fn diagonal(&self) -> Vec<Complex> {
        self.rows.iter().map(|r| r[0].clone()).collect()
    }
}

fn step_size(p: Policy, n: u32, eps: &Float) -> Result<Float> {
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    if eps.is_sign_negative() && !eps.is_zero() || *eps >= 1 {
        return Err(Error::Domain("eps must lie in [0,1)".into()));
    }
    Ok(p.float(p.float(1u32 - eps) / n))
}

/// Build the table from the `N+1` samples `Psi(b' + j (1-eps)/N)` by the
/// subtraction recurrence (the float path; the alternating binomial sum is
/// reserved for the exact path).
pub fn forward_differences(
    p: Policy,
    psi: &Target,
    b_prime: &Float,
    n: u32,
    eps: &Float,
) -> Result<ForwardDifferenceTable> {
    let h = step_size(p, n, eps)?;
    let mut row = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        let t = p.float(b_prime + &p.float(&h * &p.float(j)));
        row.push(psi.eval(p, &t)?);
    }
    let mut rows = vec![row];
    for _ in 0..n {
        let prev = rows.last().unwrap();
        let next: Vec<Complex> = prev
            .windows(2)
            .map(|w| p.complex(&w[1] - &w[0]))
            .collect();
        rows.push(next);
    }
    Ok(ForwardDifferenceTable {
        b_prime: b_prime.clone(),
        step: h,
        rows,
    })
}

/// Exact diagonal `Delta^k[Psi](b')` for rational-valued targets, via the
/// alternating binomial sum; cross-validates the recurrence.
pub fn forward_differences_exact(
    psi: &Target,
    b_prime: &Rational,
    n: u32,
    eps: &Rational,
) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    let h = Rational::from((Rational::from(1) - eps) / Rational::from(n));
    let sample = |j: u32| -> Result<Rational> {
        let t = Rational::from(b_prime + Rational::from(&h * Rational::from(j)));
        psi.eval_exact(&t).ok_or_else(|| {
            Error::Validation(format!("{} has no exact-rational values", psi.name()))
        })
    };
    let mut out = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let mut acc = Rational::new();
        for j in 0..=k {
            let b = Integer::from(Integer::binomial(Integer::from(k), j));
            let term = Rational::from(&b * &sample(j)?);
            if (k - j) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// The extrapolation polynomial in the monomial basis: coefficients
/// `a_k = binom(N,k) Delta^k[Psi](b')`, degree at most N.
#[derive(Clone, Debug)]
pub struct BernsteinFormPoly {
    pub n: u32,
    pub b_prime: Float,
    pub eps: Float,
    pub coeffs: Vec<Complex>,
}

impl BernsteinFormPoly {
    /// Horner evaluation of the monomial form at X.
    pub fn eval(&self, p: Policy, x: &Float) -> Complex {
        let mut acc = p.complex_zero();
        for c in self.coeffs.iter().rev() {
            acc = p.complex(acc * x) + c;
        }
        acc
    }
}

pub fn bernstein_form(
    p: Policy,
    psi: &Target,
    b_prime: &Float,
    n: u32,
    eps: &Float,
) -> Result<BernsteinFormPoly> {
    let table = forward_differences(p, psi, b_prime, n, eps)?;
    let coeffs = table
        .diagonal()
        .into_iter()
        .enumerate()
        .map(|(k, d)| {
            let b = Integer::from(Integer::binomial(Integer::from(n), k as u32));
            p.complex(d * &p.float(&b))
        })
        .collect();
    Ok(BernsteinFormPoly {
        n,
        b_prime: b_prime.clone(),
        eps: eps.clone(),
        coeffs,
    })
}

/// Exact monomial coefficients for rational-valued targets.
pub fn bernstein_form_exact(
    psi: &Target,
    b_prime: &Rational,
    n: u32,
    eps: &Rational,
) -> Result<Vec<Rational>> {
    let diag = forward_differences_exact(psi, b_prime, n, eps)?;
    Ok(diag
        .into_iter()
        .enumerate()
        .map(|(k, d)| {
            let b = Integer::from(Integer::binomial(Integer::from(n), k as u32));
            d * Rational::from(&b)
        })
        .collect())
}

/// Direct binomial sum `sum_v binom(N,v) X^v (1-X)^(N-v) Psi(b' + v(1-eps)/N)`;
/// agrees with the monomial form by construction, up to rounding.
pub fn direct_binomial_sum(
    p: Policy,
    psi: &Target,
    b_prime: &Float,
    n: u32,
    eps: &Float,
    x: &Float,
) -> Result<Complex> {
    let h = step_size(p, n, eps)?;
    let one_minus = p.float(1u32 - x);
    let mut acc = p.complex_zero();
    for v in 0..=n {
        let b = Integer::from(Integer::binomial(Integer::from(n), v));
        let w = p.float(&b) * x.clone().pow(v) * one_minus.clone().pow(n - v);
        let t = p.float(b_prime + &p.float(&h * &p.float(v)));
        acc += psi.eval(p, &t)? * &w;
    }
    Ok(acc)
}

/// Coefficients `a_{Mk,k}` read from the degree-k slot of the size-Mk form.
#[derive(Clone, Debug)]
pub struct NumericalTaylorSeries {
    pub m: u32,
    pub b_prime: Float,
    pub coeffs: Vec<Complex>,
}

pub fn numerical_taylor(
    p: Policy,
    psi: &Target,
    b_prime: &Float,
    m: u32,
    kappa_max: u32,
    eps: &EpsilonSequence,
) -> Result<NumericalTaylorSeries> {
    if m == 0 {
        return Err(Error::Domain("M must be >= 1".into()));
    }
    let mut coeffs = Vec::with_capacity(kappa_max as usize + 1);
    coeffs.push(psi.eval(p, b_prime)?);
    for kappa in 1..=kappa_max {
        let n = m * kappa;
        let form = bernstein_form(p, psi, b_prime, n, &eps.value(p, n))?;
        coeffs.push(form.coeffs[kappa as usize].clone());
    }
    Ok(NumericalTaylorSeries {
        m,
        b_prime: b_prime.clone(),
        coeffs,
    })
}

/// `max |a_{Mk,k}|^(1/k)` over the upper half-range of k; small-k transients
/// are excluded because the statistic targets the tail.
pub fn radius_diagnostic(p: Policy, series: &NumericalTaylorSeries) -> Result<Float> {
    let kappa_max = series.coeffs.len().saturating_sub(1) as u32;
    if kappa_max < 8 {
        return Err(Error::Size("radius diagnostic needs kappa_max >= 8".into()));
    }
    let mut best = p.zero();
    for kappa in kappa_max / 2..=kappa_max {
        let mag = p.float(series.coeffs[kappa as usize].clone().abs().into_real_imag().0);
        let root = mag.pow(p.float(p.float(1) / kappa));
        if root > best {
            best = root;
        }
    }
    Ok(best)
}
