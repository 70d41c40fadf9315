//! Generalized trigonometric polynomials `sum_v C_v exp(i h_v z)` and their
//! coefficient rules: Bernstein amplitudes on regular rows, Lagrange weights
//! on arbitrary distinct nodes, and the product form attached to
//! almost-regular samplings. Closed-form growth/remainder certificates live
//! here too.

use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::precision::{decimal, Policy};
use crate::sampling::{regular_frequencies, FrequencyRow};

/// Where a polynomial's amplitudes came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Bernstein { n: u32, a: Float, eps: Float },
    Lagrange { n: u32, a: Float },
    XiProduct { n: u32, a: Float },
    Custom,
}

impl Provenance {
    fn tag(&self) -> &'static str {
        match self {
            Provenance::Bernstein { .. } => "bernstein",
            Provenance::Lagrange { .. } => "lagrange",
            Provenance::XiProduct { .. } => "xi_product",
            Provenance::Custom => "custom",
        }
    }
}

/// A finite list of (complex amplitude, real frequency) pairs with strictly
/// decreasing frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    pub terms: Vec<(Complex, Float)>,
    pub meta: Provenance,
}

/// Binomial amplitudes `binom(N,v) ((1+a)/2)^(N-v) ((1-a)/2)^v`.
///
/// For a in [-1,1] all amplitudes are non-negative; for any a they sum to 1.
pub fn bernstein_coefficients(p: Policy, n: u32, a: &Float) -> Result<Vec<Float>> {
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    p.check_guard(n, a)?;
    let plus = p.float(p.float(a + 1u32) / 2);
    let minus = p.float(p.float(1u32 - a) / 2);
    let mut out = Vec::with_capacity(n as usize + 1);
    for v in 0..=n {
        let b = Integer::from(Integer::binomial(Integer::from(n), v));
        let c = p.float(&b) * plus.clone().pow(n - v) * minus.clone().pow(v);
        out.push(p.float(c));
    }
    Ok(out)
}

/// Exact-rational Bernstein amplitudes; anchors the float pipeline in tests.
pub fn bernstein_coefficients_exact(n: u32, a: &Rational) -> Vec<Rational> {
    let plus = Rational::from((a + Rational::from(1)) / Rational::from(2));
    let minus = Rational::from((Rational::from(1) - a) / Rational::from(2));
    (0..=n)
        .map(|v| {
            let b = Integer::from(Integer::binomial(Integer::from(n), v));
            Rational::from(&b) * plus.clone().pow(n - v) * minus.clone().pow(v)
        })
        .collect()
}

/// Lagrange basis values `w_v = prod_{v' != v} (a - h_{v'}) / (h_v - h_{v'})`.
///
/// Partition of unity holds for any a; at a node the result is the indicator
/// vector of that node.
pub fn lagrange_weights(p: Policy, nodes: &[Float], a: &Float) -> Result<Vec<Float>> {
    let tol = p.rel_tol_minus(8);
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let scale = Float::max(p.float(1), &nodes[i].clone().abs());
            if p.float(&nodes[i] - &nodes[j]).abs() <= p.float(&tol * &scale) {
                return Err(Error::DegenerateNodes(format!(
                    "nodes {} and {} coincide within merge tolerance",
                    i, j
                )));
            }
        }
    }
    let mut out = Vec::with_capacity(nodes.len());
    for (v, hv) in nodes.iter().enumerate() {
        let mut w = p.float(1);
        for (vp, hvp) in nodes.iter().enumerate() {
            if vp != v {
                w *= p.float(a - hvp) / p.float(hv - hvp);
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// Exact-rational Lagrange weights for identity tests.
pub fn lagrange_weights_exact(nodes: &[Rational], a: &Rational) -> Result<Vec<Rational>> {
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if nodes[i] == nodes[j] {
                return Err(Error::DegenerateNodes(format!("nodes {i} and {j} equal")));
            }
        }
    }
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(v, hv)| {
            let mut w = Rational::from(1);
            for (vp, hvp) in nodes.iter().enumerate() {
                if vp != v {
                    w *= Rational::from(a - hvp) / Rational::from(hv - hvp);
                }
            }
            w
        })
        .collect())
}

impl TrigPoly {
    /// Build from explicit terms; frequencies must be strictly decreasing.
    pub fn new(terms: Vec<(Complex, Float)>, meta: Provenance) -> Result<Self> {
        for w in terms.windows(2) {
            if w[0].1 <= w[1].1 {
                return Err(Error::Validation(
                    "frequencies must be strictly decreasing".into(),
                ));
            }
        }
        Ok(TrigPoly { terms, meta })
    }

    /// Bernstein polynomial on the regular row for (n, eps) at parameter a.
    pub fn bernstein(p: Policy, n: u32, a: &Float, eps: &Float) -> Result<Self> {
        let coeffs = bernstein_coefficients(p, n, a)?;
        let row = regular_frequencies(p, n, eps)?;
        let terms = coeffs
            .into_iter()
            .zip(row.values)
            .map(|(c, h)| (p.complex((c, 0)), h))
            .collect();
        TrigPoly::new(
            terms,
            Provenance::Bernstein {
                n,
                a: a.clone(),
                eps: eps.clone(),
            },
        )
    }

    /// Lagrange interpolator on an arbitrary row with `nu(N) = N`.
    pub fn lagrange(p: Policy, row: &FrequencyRow, a: &Float) -> Result<Self> {
        let coeffs = lagrange_weights(p, &row.values, a)?;
        let terms = coeffs
            .into_iter()
            .zip(row.values.iter().cloned())
            .map(|(c, h)| (p.complex((c, 0)), h))
            .collect();
        TrigPoly::new(
            terms,
            Provenance::Lagrange {
                n: row.n,
                a: a.clone(),
            },
        )
    }

    /// `sum_v C_v exp(i h_v z)`, summed in fixed ascending-v order.
    pub fn eval(&self, p: Policy, z: &Complex) -> Complex {
        let mut acc = p.complex_zero();
        for (c, h) in &self.terms {
            let arg = p.complex(z * h).mul_i(false);
            acc += c * arg.exp();
        }
        acc
    }

    /// Sum of amplitudes; 1 for every Bernstein/Lagrange provenance.
    pub fn amplitude_sum(&self, p: Policy) -> Complex {
        let mut acc = p.complex_zero();
        for (c, _) in &self.terms {
            acc += c;
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        json!({
            "meta": self.meta.tag(),
            "terms": self.terms.iter().map(|(c, h)| json!({
                "amp_re": decimal(c.real()),
                "amp_im": decimal(c.imag()),
                "freq": decimal(h),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(p: Policy, v: &Value) -> Result<Self> {
        let terms_v = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"terms\"".into()))?;
        let mut terms = Vec::with_capacity(terms_v.len());
        for t in terms_v {
            let f = |k: &str| -> Result<Float> {
                p.parse(
                    t.get(k)
                        .and_then(Value::as_str)
                        .ok_or_else(|| Error::Parse(format!("term missing \"{k}\"")))?,
                )
            };
            let re = f("amp_re")?;
            let im = f("amp_im")?;
            terms.push((p.complex((re, im)), f("freq")?));
        }
        TrigPoly::new(terms, Provenance::Custom)
    }
}

/// Closed form of the regular-row Bernstein polynomial:
/// `exp(-i eps z) (cos(z(1-eps)/N) + i lambda sin(z(1-eps)/N))^N`.
///
/// The prefactor sign is pinned by the lambda = 1 collapse: the sum reduces
/// to the single term `exp(iz(1 - 2 eps))` while the power part contributes
/// `exp(iz(1 - eps))`.
pub fn eval_regular_closed_form(
    p: Policy,
    n: u32,
    eps: &Float,
    lambda: &Float,
    z: &Complex,
) -> Complex {
    let w = p.complex(z * &p.float(p.float(1u32 - eps) / n));
    let (sin, cos) = w.clone().sin_cos(p.complex_zero());
    let base = cos + p.complex(sin * lambda).mul_i(false);
    let phase = p.complex(z * eps).mul_i(true).exp();
    phase * base.pow(n)
}

/// Product form attached to an almost-regular row:
/// `prod_k ((1+a)/2 e^{(iz/N)(1-xi_k/N)} + (1-a)/2 e^{-(iz/N)(1-xi_k/N)})`.
///
/// Bounded by `exp((|a|+1)|z|)` for xi in [0,1]^N.
pub fn eval_xi_product(p: Policy, n: u32, xi_row: &[Float], a: &Float, z: &Complex) -> Result<Complex> {
    if xi_row.len() != n as usize {
        return Err(Error::Shape(format!(
            "xi row must have {n} entries, got {}",
            xi_row.len()
        )));
    }
    let plus = p.float(p.float(a + 1u32) / 2);
    let minus = p.float(p.float(1u32 - a) / 2);
    let mut acc = p.complex((1, 0));
    for xi in xi_row {
        if xi.is_sign_negative() && !xi.is_zero() || *xi > 1 {
            return Err(Error::Domain(format!(
                "xi must lie in [0,1], got {}",
                xi.to_f64()
            )));
        }
        let scale = p.float(p.float(1u32 - &p.float(xi / &p.float(n))) / n);
        let arg = p.complex(z * &scale).mul_i(false);
        let factor = p.complex(arg.clone().exp() * &plus) + p.complex((-arg).exp() * &minus);
        acc *= factor;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    LagrangeFactorial,
    HermiteContour,
    ExpGrowth,
}

/// A closed-form upper bound with the formula that produced it.
#[derive(Clone, Debug)]
pub struct ErrorCertificate {
    pub bound: Float,
    pub kind: CertificateKind,
}

/// Deviation certificates for the interpolation rules.
///
/// `LagrangeFactorial`: `((|a|+1)|z|)^(N+1) / (N+1)!`, valid for nodes in
/// [-1,1]. `HermiteContour`: `(|a|+2) e^{(|a|+2)|z|} / 2`, a boundedness
/// certificate (it does not decay in N). `ExpGrowth`: `e^{(|a|+1)|z|}`.
pub fn error_certificate(
    p: Policy,
    kind: CertificateKind,
    a: &Float,
    z: &Complex,
    n: u32,
) -> Result<ErrorCertificate> {
    let abs_a = p.float(a.clone().abs());
    let abs_z = p.float(z.clone().abs().into_real_imag().0);
    let bound = match kind {
        CertificateKind::LagrangeFactorial => {
            let base = p.float(p.float(&abs_a + 1u32) * &abs_z);
            let fact = Integer::from(Integer::factorial(n + 1));
            p.float(base.pow(n + 1) / p.float(&fact))
        }
        CertificateKind::HermiteContour => {
            let c = p.float(&abs_a + 2u32);
            p.float(p.float(p.float(&c * &abs_z).exp() * &c) / 2)
        }
        CertificateKind::ExpGrowth => p.float(p.float(&abs_a + 1u32) * &abs_z).exp(),
    };
    if !bound.is_finite() || bound.is_sign_negative() {
        return Err(Error::Precision("certificate bound not finite".into()));
    }
    Ok(ErrorCertificate { bound, kind })
}
