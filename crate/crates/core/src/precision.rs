//! Working-precision policy for all floating evaluations.
//!
//! Every operation takes an explicit [`Policy`] so that results are
//! reproducible bit-for-bit: same policy, same summation order, same output.

use rug::{Complex, Float};

use crate::error::{Error, Result};

/// Default mantissa size in bits.
pub const DEFAULT_BITS: u32 = 256;

/// Minimum mantissa size accepted by [`Policy::new`].
pub const MIN_BITS: u32 = 64;

/// Mantissa-size policy. Summation order is always fixed ascending index,
/// so the policy is the only knob that affects numerical output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Policy {
    bits: u32,
}

impl Default for Policy {
    fn default() -> Self {
        Policy { bits: DEFAULT_BITS }
    }
}

impl Policy {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::Precision(format!(
                "mantissa_bits must be >= {MIN_BITS}, got {bits}"
            )));
        }
        Ok(Policy { bits })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    pub fn float<T>(self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    pub fn zero(self) -> Float {
        Float::with_val(self.bits, 0)
    }

    pub fn complex_zero(self) -> Complex {
        Complex::with_val(self.bits, (0, 0))
    }

    pub fn complex<T>(self, v: T) -> Complex
    where
        Complex: rug::Assign<T>,
    {
        Complex::with_val(self.bits, v)
    }

    /// Parse a decimal string at policy precision.
    pub fn parse(self, s: &str) -> Result<Float> {
        let inc = Float::parse(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Float::with_val(self.bits, inc))
    }

    /// `2^-(bits/2)`, the relative tolerance used by identity checks.
    pub fn half_rel_tol(self) -> Float {
        let mut t = Float::with_val(self.bits, 1);
        t >>= self.bits / 2;
        t
    }

    /// `2^-(bits-k)` for merge tolerances and similar near-ulp checks.
    pub fn rel_tol_minus(self, k: u32) -> Float {
        let mut t = Float::with_val(self.bits, 1);
        t >>= self.bits.saturating_sub(k);
        t
    }

    /// Mantissa bits required by the cancellation guard for a Bernstein-type
    /// sum of degree `n` at parameter `a`: amplitudes reach `((1+|a|)/2)^n`
    /// with alternating signs while the sum stays O(1).
    pub fn required_bits(n: u32, a: &Float) -> u32 {
        let one_plus = Float::with_val(64, a.clone().abs() + 1u32);
        let lg = one_plus.log2();
        let demand = (f64::from(n) * lg.to_f64()).ceil() as i64 + 64;
        demand.max(113).try_into().unwrap_or(u32::MAX)
    }

    /// Fail when the guard demands more bits than the policy provides.
    pub fn check_guard(self, n: u32, a: &Float) -> Result<()> {
        let need = Self::required_bits(n, a);
        if need > self.bits {
            return Err(Error::Precision(format!(
                "degree {n} at |a|={} needs {need} mantissa bits, policy has {}",
                a.clone().abs().to_f64(),
                self.bits
            )));
        }
        Ok(())
    }
}

/// Full-precision decimal string; parses back to the identical value at the
/// same precision.
pub fn decimal(f: &Float) -> String {
    f.to_string_radix(10, None)
}

/// Decimal pair "re,im" helpers for CSV emission.
pub fn decimal_re_im(c: &Complex) -> (String, String) {
    (decimal(c.real()), decimal(c.imag()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_mantissa() {
        assert!(Policy::new(32).is_err());
        assert!(Policy::new(64).is_ok());
    }

    #[test]
    fn decimal_round_trips() {
        let p = Policy::default();
        let x = p.float(2).sqrt();
        let s = decimal(&x);
        let back = p.parse(&s).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn guard_rule_floor_is_113() {
        let p = Policy::default();
        assert_eq!(Policy::required_bits(1, &p.float(0)), 113);
    }

    #[test]
    fn guard_rule_grows_with_degree_and_amplitude() {
        let p = Policy::default();
        let a = p.float(4);
        // 64 * log2(5) + 64 = 212.6... -> 213
        assert_eq!(Policy::required_bits(64, &a), 213);
        assert!(p.check_guard(64, &a).is_ok());
        assert!(p.check_guard(1000, &a).is_err());
    }
}
