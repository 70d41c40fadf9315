//! Periodic pipeline: finitely supported Fourier spectra, the spectral
//! autocorrelation, the exact binomial multiplier identity and the
//! exponential-decay certificate for Fourier coefficients.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Complex, Float, Integer};

use crate::error::{Error, Result};
use crate::precision::Policy;

/// Finitely supported spectrum of a T-periodic function
/// `psi(a) = sum_k gamma_k e^{2 pi i k a / T}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSpectrum {
    pub period: Float,
    pub coeffs: BTreeMap<i64, Complex>,
}

impl FourierSpectrum {
    pub fn new(period: Float, coeffs: BTreeMap<i64, Complex>) -> Result<Self> {
        if !(period > 0) {
            return Err(Error::Domain("period must be > 0".into()));
        }
        Ok(FourierSpectrum { period, coeffs })
    }

    pub fn support(&self) -> Vec<i64> {
        self.coeffs
            .iter()
            .filter(|(_, g)| !g.is_zero())
            .map(|(k, _)| *k)
            .collect()
    }

    /// Evaluate at a real argument; terms added in ascending-k order.
    pub fn eval(&self, p: Policy, a: &Float) -> Complex {
        let two_pi = p.float(rug::float::Constant::Pi) * 2u32;
        let mut acc = p.complex_zero();
        for (k, gamma) in &self.coeffs {
            let phase = p.float(p.float(&two_pi * &p.float(*k)) * a) / &self.period;
            let e = p.complex((phase, 0)).mul_i(false).exp();
            acc += gamma * e;
        }
        acc
    }
}

/// Spectrum of the autocorrelation `(1/T) int_0^T psi(a - tau) psi(tau) dtau`:
/// each mode squares, support never grows.
pub fn autocorrelate(p: Policy, s: &FourierSpectrum) -> FourierSpectrum {
    let coeffs = s
        .coeffs
        .iter()
        .map(|(k, g)| (*k, p.complex(g * g)))
        .collect();
    FourierSpectrum {
        period: s.period.clone(),
        coeffs,
    }
}

/// The exact action of the degree-N binomial extrapolation on a pure mode:
/// `(cos w + i R sin w)^N` with `w = 2 pi k / (T N)`.
pub fn multiplier(p: Policy, n: u32, r: &Float, kappa: i64, period: &Float) -> Complex {
    let two_pi = p.float(rug::float::Constant::Pi) * 2u32;
    let w = p.float(p.float(&two_pi * &p.float(kappa)) / &p.float(period * &p.float(n)));
    let (sin, cos) = w.sin_cos(p.zero());
    let base = p.complex((cos, p.float(&sin * r)));
    base.pow(n)
}

/// Result of [`multiplier_identity_check`]: the worst residual over the grid
/// and the cancellation scale (largest binomial term magnitude) it should be
/// compared against.
#[derive(Clone, Debug)]
pub struct IdentityResidual {
    pub max_residual: Float,
    pub scale: Float,
}

/// Compare the direct binomial sum of the autocorrelation at shifted nodes
/// with its mode-by-mode multiplier evaluation. Algebraically the two sides
/// are equal; the residual is pure rounding.
pub fn multiplier_identity_check(
    p: Policy,
    s: &FourierSpectrum,
    r: &Float,
    a_prime_grid: &[Float],
    n: u32,
) -> Result<IdentityResidual> {
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    p.check_guard(n, r)?;
    let auto = autocorrelate(p, s);
    let plus = p.float(p.float(r + 1u32) / 2);
    let minus = p.float(p.float(1u32 - r) / 2);
    let two_pi = p.float(rug::float::Constant::Pi) * 2u32;

    let mut max_residual = p.zero();
    let mut scale = p.zero();
    for a_prime in a_prime_grid {
        // direct Bernstein sum of the autocorrelation at a' + (1 - 2v/N)
        let mut direct = p.complex_zero();
        for v in 0..=n {
            let b = Integer::from(Integer::binomial(Integer::from(n), v));
            let coeff = p.float(&b) * plus.clone().pow(n - v) * minus.clone().pow(v);
            let node = p.float(1) - p.float(2 * v) / n;
            let sample = auto.eval(p, &p.float(a_prime + &node));
            let term = p.complex(&sample * &coeff);
            let mag = p.float(term.clone().abs().into_real_imag().0);
            if mag > scale {
                scale = mag;
            }
            direct += term;
        }
        // spectral side: sum_k gamma_k^2 multiplier(N,R,k,T) e^{2 pi i k a'/T}
        let mut spectral = p.complex_zero();
        for (k, g2) in &auto.coeffs {
            let m = multiplier(p, n, r, *k, &s.period);
            let phase = p.float(p.float(&two_pi * &p.float(*k)) * a_prime) / &s.period;
            let e = p.complex((phase, 0)).mul_i(false).exp();
            spectral += p.complex(g2 * m) * e;
        }
        let res = p.float(p.complex(&direct - &spectral).abs().into_real_imag().0);
        if res > max_residual {
            max_residual = res;
        }
    }
    Ok(IdentityResidual {
        max_residual,
        scale: Float::max(scale, &p.float(1)),
    })
}

/// One certified bound row: for modes `kappa = +-n`, the Plancherel constant
/// pinned at extrapolation distance `r` implies
/// `|gamma_{+-n}| <= c^(1/4) exp(-rate * n)`.
#[derive(Clone, Debug)]
pub struct DecayRow {
    pub r: Float,
    pub n: u32,
    pub kappa: i64,
    pub multiplier_abs: Float,
    pub gamma_bound: Float,
    pub implied_rprime: Float,
}

#[derive(Clone, Debug)]
pub struct DecayCertificate {
    pub chi: u32,
    pub rows: Vec<DecayRow>,
    /// Largest certified exponential-decay rate over all rows.
    pub best_rprime: Float,
}

/// Default uniform constant in the distance-to-window ratio `M = [chi R]`.
pub const DEFAULT_CHI: u32 = 4;

/// Lower bound `|cos w + iR sin w|^(MN) >= exp(MN (R^2-1) w^2 / 4)` that the
/// chosen chi must realize on the used grid (only meaningful for R > 1).
fn lower_bound_holds(p: Policy, m: u32, n: u32, r: &Float, kappa: i64, period: &Float) -> bool {
    let mult = multiplier(p, m * n, r, kappa, period);
    let mag = p.float(mult.abs().into_real_imag().0);
    let two_pi = p.float(rug::float::Constant::Pi) * 2u32;
    let w = p.float(p.float(&two_pi * &p.float(kappa)) / &p.float(period * &p.float(m * n)));
    let exponent = p.float(
        p.float(p.float(r * r) - 1u32) * p.float(&w * &w) * p.float(m * n),
    ) / 4u32;
    mag >= exponent.exp()
}

/// Estimate the Plancherel constant over `n_list`, then invert the lower
/// bound into per-mode decay rates. Reports one row per (R, N) with
/// `kappa = +-N` collapsed to `kappa = N` magnitude (the two are conjugate).
pub fn decay_certificate(
    p: Policy,
    s: &FourierSpectrum,
    r_list: &[Float],
    n_list: &[u32],
    chi: u32,
) -> Result<DecayCertificate> {
    if chi == 0 {
        return Err(Error::Domain("chi must be >= 1".into()));
    }
    let mut rows = Vec::new();
    let mut best = p.float(f64::NEG_INFINITY);
    for r in r_list {
        if !(r.clone().abs() > 1) {
            return Err(Error::Domain(
                "decay certificate needs |R| > 1 extrapolation distances".into(),
            ));
        }
        let m = (p.float(chi * r.clone().abs()).floor().to_f64()) as u32;
        if m == 0 {
            return Err(Error::Domain("floor(chi R) must be >= 1".into()));
        }
        for &n in n_list {
            for kappa in [-(n as i64), n as i64] {
                if !lower_bound_holds(p, m, n, r, kappa, &s.period) {
                    return Err(Error::Validation(format!(
                        "chi = {chi} too small: multiplier lower bound fails at R={}, N={n}",
                        r.to_f64()
                    )));
                }
            }
        }
        // C(R) = sup over N of sum_{|k|<=N} |gamma_k|^4 |multiplier(MN,R,k,T)|^2
        let mut c_const = p.zero();
        for &n in n_list {
            let mut sum = p.zero();
            for (k, g) in &s.coeffs {
                if k.unsigned_abs() > n as u64 {
                    continue;
                }
                let g_abs = p.float(g.clone().abs().into_real_imag().0);
                let mult = multiplier(p, m * n, r, *k, &s.period);
                let m_abs = p.float(mult.abs().into_real_imag().0);
                sum += g_abs.pow(4) * m_abs.pow(2);
            }
            if sum > c_const {
                c_const = sum;
            }
        }
        let c_quarter = c_const.clone().pow(p.float(0.25));
        // rate = (2 pi^2 / T^2) (R^2 - 1) / (4 M)
        let pi = p.float(rug::float::Constant::Pi);
        let rate = p.float(
            p.float(p.float(&pi * &pi) * 2u32) / p.float(&s.period * &s.period),
        ) * p.float(p.float(p.float(r * r) - 1u32) / p.float(4 * m));
        for &n in n_list {
            let gamma_bound = p.float(&c_quarter * &p.float(-p.float(&rate * &p.float(n))).exp());
            // largest R' with gamma_bound * e^{R' n} <= 1
            let implied = p.float(&rate - &p.float(c_quarter.clone().ln() / n));
            let mult = multiplier(p, m * n, r, n as i64, &s.period);
            rows.push(DecayRow {
                r: r.clone(),
                n,
                kappa: n as i64,
                multiplier_abs: p.float(mult.abs().into_real_imag().0),
                gamma_bound,
                implied_rprime: implied.clone(),
            });
            if implied > best {
                best = implied;
            }
        }
    }
    Ok(DecayCertificate {
        chi,
        rows,
        best_rprime: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Policy {
        Policy::default()
    }

    fn spectrum(pairs: &[(i64, f64)]) -> FourierSpectrum {
        let pol = p();
        let period = pol.float(rug::float::Constant::Pi) * 2u32;
        let coeffs = pairs
            .iter()
            .map(|&(k, g)| (k, pol.complex((g, 0))))
            .collect();
        FourierSpectrum::new(period, coeffs).unwrap()
    }

    #[test]
    fn autocorrelate_single_mode() {
        let pol = p();
        let s = spectrum(&[(1, 1.0)]);
        let auto = autocorrelate(pol, &s);
        assert_eq!(auto.support(), vec![1]);
        assert_eq!(auto.coeffs[&1], pol.complex((1, 0)));
    }

    #[test]
    fn autocorrelate_squares_each_mode() {
        let pol = p();
        let s = spectrum(&[(-1, 0.5), (1, 0.5)]);
        let auto = autocorrelate(pol, &s);
        assert_eq!(auto.coeffs[&-1], pol.complex((0.25, 0)));
        assert_eq!(auto.coeffs[&1], pol.complex((0.25, 0)));
    }

    #[test]
    fn autocorrelate_matches_quadrature_oracle() {
        // trapezoid rule on 2^14 nodes is exact below the aliasing limit,
        // so the spectral rule must match direct quadrature of
        // (1/T) int psi(a - tau) psi(tau) dtau at random offsets.
        let pol = Policy::new(128).unwrap();
        let s = spectrum(&[(-2, 0.25), (-1, -0.5), (0, 1.0), (1, 0.5), (3, 0.125)]);
        let auto = autocorrelate(pol, &s);
        let nodes = 1 << 14;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = pol.float(rng.gen_range(-3.0..3.0));
            let mut quad = pol.complex_zero();
            for j in 0..nodes {
                let tau = pol.float(&s.period * &pol.float(j)) / nodes;
                quad += s.eval(pol, &pol.float(&a - &tau)) * s.eval(pol, &tau);
            }
            quad /= nodes;
            let spectral = auto.eval(pol, &a);
            let diff = pol
                .float(pol.complex(&quad - &spectral).abs().into_real_imag().0);
            assert!(diff <= pol.float(1e-20), "diff {}", diff.to_f64());
        }
    }

    #[test]
    fn multiplier_trivial_cases() {
        let pol = p();
        let t = pol.float(rug::float::Constant::Pi) * 2u32;
        assert_eq!(multiplier(pol, 7, &pol.float(3), 0, &t), pol.complex((1, 0)));

        // N=1, T=2pi, k=1: cos(1) + iR sin(1)
        let r = pol.float(2.5);
        let m = multiplier(pol, 1, &r, 1, &t);
        let want = pol.complex((pol.float(1).cos(), pol.float(&pol.float(1).sin() * &r)));
        let diff = pol.float(pol.complex(&m - &want).abs().into_real_imag().0);
        assert!(diff <= pol.half_rel_tol());
    }

    #[test]
    fn multiplier_contraction_for_small_r() {
        let pol = p();
        let t = pol.float(rug::float::Constant::Pi) * 2u32;
        for r in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            for (n, k) in [(3u32, 2i64), (16, 9), (33, -20)] {
                let m = multiplier(pol, n, &pol.float(r), k, &t);
                let mag = pol.float(m.abs().into_real_imag().0);
                assert!(mag <= pol.float(1) + pol.half_rel_tol());
            }
        }
    }

    #[test]
    fn multiplier_unimodular_at_r_one() {
        let pol = p();
        let t = pol.float(rug::float::Constant::Pi) * 2u32;
        for r in [1.0, -1.0] {
            let m = multiplier(pol, 12, &pol.float(r), 5, &t);
            let mag = pol.float(m.abs().into_real_imag().0);
            assert!(pol.float(&mag - 1u32).abs() <= pol.half_rel_tol());
        }
    }

    #[test]
    fn multiplier_lower_bound_at_calibration_point() {
        // N=32, R=8, kappa=+-N, M=[chi R] with chi=4
        let pol = p();
        let t = pol.float(rug::float::Constant::Pi) * 2u32;
        let r = pol.float(8);
        for kappa in [-32i64, 32] {
            assert!(lower_bound_holds(pol, 32, 32, &r, kappa, &t));
        }
    }

    #[test]
    fn identity_check_single_constant_mode() {
        let pol = p();
        let s = spectrum(&[(0, 0.75)]);
        let res =
            multiplier_identity_check(pol, &s, &pol.float(3), &[pol.zero(), pol.float(1.25)], 5)
                .unwrap();
        assert!(res.max_residual <= pol.float(&res.scale * &pol.half_rel_tol()));
    }

    #[test]
    fn identity_check_one_mode_n1() {
        let pol = p();
        let s = spectrum(&[(1, 1.0)]);
        let res = multiplier_identity_check(pol, &s, &pol.float(2), &[pol.float(0.3)], 1).unwrap();
        assert!(res.max_residual <= pol.float(&res.scale * &pol.half_rel_tol()));
    }

    #[test]
    fn identity_check_wide_spectrum() {
        let pol = p();
        let s = spectrum(&[(-4, 0.1), (-2, -0.3), (0, 0.9), (1, 0.4), (3, -0.2), (4, 0.05)]);
        let res = multiplier_identity_check(
            pol,
            &s,
            &pol.float(3),
            &[pol.float(-1.5), pol.zero(), pol.float(2.25)],
            16,
        )
        .unwrap();
        assert!(res.max_residual <= pol.float(&res.scale * &pol.half_rel_tol()));
    }

    #[test]
    fn decay_certificate_exponential_spectrum_positive_rprime() {
        let pol = p();
        let pairs: Vec<(i64, f64)> = (-16..=16)
            .map(|k| (k, (-(k as f64).abs()).exp()))
            .collect();
        let s = spectrum(&pairs);
        let cert = decay_certificate(
            pol,
            &s,
            &[pol.float(3), pol.float(5)],
            &[4, 8, 16],
            DEFAULT_CHI,
        )
        .unwrap();
        assert!(cert.best_rprime > 0);
    }

    #[test]
    fn decay_certificate_single_mode_vacuous_outside_support() {
        let pol = p();
        let s = spectrum(&[(1, 1.0)]);
        let cert =
            decay_certificate(pol, &s, &[pol.float(4)], &[8, 16], DEFAULT_CHI).unwrap();
        // gamma is 0 beyond the mode's support, so any positive bound holds
        for row in &cert.rows {
            assert!(row.gamma_bound >= 0);
        }
    }

    #[test]
    fn decay_certificate_degrades_on_polynomial_decay() {
        let pol = p();
        let make = |kmax: i64| {
            let pairs: Vec<(i64, f64)> = (-kmax..=kmax)
                .map(|k| (k, 1.0 / (1.0 + (k * k) as f64)))
                .collect();
            spectrum(&pairs)
        };
        let rprime = |kmax: i64| {
            let s = make(kmax);
            let n = kmax as u32;
            decay_certificate(pol, &s, &[pol.float(4)], &[n], DEFAULT_CHI)
                .unwrap()
                .best_rprime
        };
        let r8 = rprime(8);
        let r32 = rprime(32);
        assert!(r32 < r8, "implied R' should shrink as truncation grows");
    }
}
