//! Frequency samplings of the interval [-1,1].
//!
//! Three families are constructed here: regular rows `h_{N,v} =
//! 1 - 2(v + eps_N (N-v))/N`, almost-regular rows obtained as Minkowski sums
//! of symmetric pairs, and arbitrary irregular rows supplied by the caller.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::precision::{decimal, Policy};

/// Maximum `N` for which the explicit 2^N Minkowski expansion is materialized.
pub const MINKOWSKI_EXPANSION_CAP: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SamplingKind {
    Regular,
    AlmostRegular,
    Irregular,
}

/// One row of the sampling matrix: `nu(N)+1` non-increasing values in [-1,1].
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyRow {
    pub n: u32,
    pub values: Vec<Float>,
}

impl FrequencyRow {
    pub fn new(p: Policy, n: u32, values: Vec<Float>) -> Result<Self> {
        let row = FrequencyRow { n, values };
        row.validate(p)?;
        Ok(row)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn validate(&self, _p: Policy) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Validation("row index N must be >= 1".into()));
        }
        if self.values.len() < 2 {
            return Err(Error::Validation(format!(
                "row {} must have nu(N) >= 1, got {} value(s)",
                self.n,
                self.values.len()
            )));
        }
        for v in &self.values {
            if v.clone().abs() > 1 {
                return Err(Error::Validation(format!(
                    "row {}: entry {} outside [-1,1]",
                    self.n,
                    v.to_f64()
                )));
            }
        }
        for w in self.values.windows(2) {
            if w[0] < w[1] {
                return Err(Error::Validation(format!(
                    "row {}: entries must be non-increasing",
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Consecutive gaps `h_v - h_{v+1}`.
    pub fn gaps(&self, p: Policy) -> Vec<Float> {
        self.values
            .windows(2)
            .map(|w| p.float(&w[0] - &w[1]))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct FrequencyMatrix {
    pub kind: SamplingKind,
    pub rows: Vec<FrequencyRow>,
}

impl FrequencyMatrix {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "rows": self.rows.iter().map(|r| json!({
                "N": r.n,
                "values": r.values.iter().map(decimal).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(p: Policy, v: &Value) -> Result<Self> {
        let kind: SamplingKind = serde_json::from_value(
            v.get("kind")
                .cloned()
                .ok_or_else(|| Error::Parse("missing \"kind\"".into()))?,
        )
        .map_err(|e| Error::Parse(e.to_string()))?;
        let rows_v = v
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"rows\" array".into()))?;
        let mut rows = Vec::with_capacity(rows_v.len());
        for rv in rows_v {
            let n = rv
                .get("N")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse("row missing \"N\"".into()))? as u32;
            let vals_v = rv
                .get("values")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("row missing \"values\"".into()))?;
            let mut values = Vec::with_capacity(vals_v.len());
            for s in vals_v {
                let s = s
                    .as_str()
                    .ok_or_else(|| Error::Parse("values must be decimal strings".into()))?;
                values.push(p.parse(s)?);
            }
            rows.push(FrequencyRow::new(p, n, values)?);
        }
        Ok(FrequencyMatrix { kind, rows })
    }
}

/// The regular row of Eq-style nodes `1 - 2(v + eps (N-v))/N`, `v = 0..=N`.
///
/// Strictly decreasing with constant gap `2(1-eps)/N`; first entry `1-2 eps`,
/// last entry exactly -1.
pub fn regular_frequencies(p: Policy, n: u32, eps: &Float) -> Result<FrequencyRow> {
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    check_eps(eps)?;
    let mut values = Vec::with_capacity(n as usize + 1);
    for v in 0..=n {
        // 1 - 2 (v + eps (n - v)) / n
        let inner = p.float(eps * &p.float(n - v)) + v;
        let h = p.float(1) - p.float(2 * inner) / n;
        values.push(h);
    }
    FrequencyRow::new(p, n, values)
}

fn check_eps(eps: &Float) -> Result<()> {
    if eps.is_sign_negative() && !eps.is_zero() || *eps >= 1 {
        return Err(Error::Domain(format!(
            "eps_N must lie in [0,1), got {}",
            eps.to_f64()
        )));
    }
    Ok(())
}

/// Almost-regular row: Minkowski sum of the pairs `{+-(1/N)(1 - xi_k/N)}`,
/// de-duplicated within tolerance and sorted non-increasing.
pub fn minkowski_frequencies(p: Policy, n: u32, xi_row: &[Float]) -> Result<FrequencyRow> {
    if n == 0 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    if xi_row.len() != n as usize {
        return Err(Error::Shape(format!(
            "xi row must have {} entries, got {}",
            n,
            xi_row.len()
        )));
    }
    if n > MINKOWSKI_EXPANSION_CAP {
        return Err(Error::Size(format!(
            "explicit Minkowski expansion capped at N = {MINKOWSKI_EXPANSION_CAP}, got {n}; \
             use the product-form evaluator instead"
        )));
    }
    for xi in xi_row {
        if xi.is_sign_negative() && !xi.is_zero() || *xi > 1 {
            return Err(Error::Domain(format!(
                "xi must lie in [0,1], got {}",
                xi.to_f64()
            )));
        }
    }
    let mags: Vec<Float> = xi_row
        .iter()
        .map(|xi| p.float(p.float(1) - p.float(xi / &p.float(n))) / n)
        .collect();
    // all 2^n signed sums
    let mut sums = vec![p.zero()];
    for m in &mags {
        let mut next = Vec::with_capacity(sums.len() * 2);
        for s in &sums {
            next.push(p.float(s + m));
            next.push(p.float(s - m));
        }
        sums = next;
    }
    sums.sort_by(|a, b| b.partial_cmp(a).unwrap());
    // merge values closer than 2^-(bits-8) relative
    let tol = p.rel_tol_minus(8);
    let mut merged: Vec<Float> = Vec::new();
    for s in sums {
        match merged.last() {
            Some(last) => {
                let scale = Float::max(p.float(1), &last.clone().abs());
                let close = p.float(last - &s).abs() <= p.float(&tol * &scale);
                if !close {
                    merged.push(s);
                }
            }
            None => merged.push(s),
        }
    }
    FrequencyRow::new(p, n, merged)
}

/// Classify a valid matrix: `Regular` when every row matches the regular
/// construction for some eps in [0,1); `Irregular` when every row has
/// `nu(N) = N` and at least one row has non-constant gaps; `AlmostRegular`
/// otherwise.
pub fn classify(p: Policy, h: &FrequencyMatrix) -> Result<SamplingKind> {
    for row in &h.rows {
        row.validate(p)?;
    }
    if h.rows.iter().all(|r| row_is_regular(p, r)) {
        return Ok(SamplingKind::Regular);
    }
    let full_length = h.rows.iter().all(|r| r.len() == r.n as usize + 1);
    let some_nonconstant = h.rows.iter().any(|r| !gaps_constant(p, r));
    if full_length && some_nonconstant {
        return Ok(SamplingKind::Irregular);
    }
    Ok(SamplingKind::AlmostRegular)
}

fn gaps_constant(p: Policy, row: &FrequencyRow) -> bool {
    let gaps = row.gaps(p);
    let tol = p.half_rel_tol();
    gaps.iter().all(|g| {
        let scale = Float::max(p.float(1), &gaps[0].clone().abs());
        p.float(g - &gaps[0]).abs() <= p.float(&tol * &scale)
    })
}

fn row_is_regular(p: Policy, row: &FrequencyRow) -> bool {
    if row.len() != row.n as usize + 1 {
        return false;
    }
    // eps implied by the first entry, then the whole row must reproduce
    let eps = p.float(p.float(1) - &row.values[0]) / 2u32;
    if eps.is_sign_negative() && !eps.is_zero() || eps >= 1 {
        return false;
    }
    let Ok(expect) = regular_frequencies(p, row.n, &eps) else {
        return false;
    };
    let tol = p.half_rel_tol();
    row.values
        .iter()
        .zip(&expect.values)
        .all(|(a, b)| p.float(a - b).abs() <= tol)
}

/// Generator-backed sequence `N -> eps_N` in [0,1).
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "gen", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsilonSequence {
    Zero,
    /// `eps_N = c / N`
    OverN { c: f64 },
    /// `eps_N = c / log(N+1)`
    OverLog { c: f64 },
}

impl EpsilonSequence {
    pub fn value(&self, p: Policy, n: u32) -> Float {
        match self {
            EpsilonSequence::Zero => p.zero(),
            EpsilonSequence::OverN { c } => p.float(*c) / n,
            EpsilonSequence::OverLog { c } => {
                let log = p.float(n + 1).ln();
                p.float(*c) / log
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            EpsilonSequence::Zero => "0".into(),
            EpsilonSequence::OverN { c } => format!("{c}/N"),
            EpsilonSequence::OverLog { c } => format!("{c}/log(N+1)"),
        }
    }

    /// Check `eps_N` lies in [0,1) on the finite range used.
    pub fn validate(&self, p: Policy, n_list: &[u32]) -> Result<()> {
        for &n in n_list {
            check_eps(&self.value(p, n)).map_err(|_| {
                Error::Domain(format!(
                    "eps sequence {} leaves [0,1) at N={n}",
                    self.describe()
                ))
            })?;
        }
        Ok(())
    }
}

/// Finite family of eps-sequences with a shared uniform bound.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EpsilonFamily {
    pub members: Vec<EpsilonSequence>,
}

impl EpsilonFamily {
    pub fn new(members: Vec<EpsilonSequence>) -> Self {
        EpsilonFamily { members }
    }

    /// Sup over members of `eps_N`.
    pub fn uniform_bound(&self, p: Policy, n: u32) -> Float {
        self.members
            .iter()
            .map(|m| m.value(p, n))
            .fold(p.zero(), |acc, v| if v > acc { v } else { acc })
    }

    /// The uniform bound must be non-increasing over the tested range.
    pub fn validate(&self, p: Policy, n_list: &[u32]) -> Result<()> {
        if self.members.is_empty() {
            return Err(Error::Validation("empty eps family".into()));
        }
        for m in &self.members {
            m.validate(p, n_list)?;
        }
        let bounds: Vec<Float> = n_list.iter().map(|&n| self.uniform_bound(p, n)).collect();
        for w in bounds.windows(2) {
            if w[1] > w[0] {
                return Err(Error::Validation(
                    "family uniform bound is not non-increasing on the tested range".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Collection `(N, k) -> xi_{N,k}` in [0,1], `1 <= k <= N`.
#[derive(Clone, Debug)]
pub struct XiCollection {
    pub rows: BTreeMap<u32, Vec<Float>>,
}

impl XiCollection {
    pub fn new(rows: BTreeMap<u32, Vec<Float>>) -> Result<Self> {
        for (n, row) in &rows {
            if row.len() != *n as usize {
                return Err(Error::Shape(format!(
                    "xi row {n} must have {n} entries, got {}",
                    row.len()
                )));
            }
            for xi in row {
                if xi.is_sign_negative() && !xi.is_zero() || *xi > 1 {
                    return Err(Error::Domain(format!(
                        "xi must lie in [0,1], got {}",
                        xi.to_f64()
                    )));
                }
            }
        }
        Ok(XiCollection { rows })
    }

    /// Deterministic uniform draws in [0,1] from a fixed seed.
    pub fn random(p: Policy, n_list: &[u32], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = BTreeMap::new();
        for &n in n_list {
            let row: Vec<Float> = (0..n).map(|_| p.float(rng.gen_range(0.0..=1.0))).collect();
            rows.insert(n, row);
        }
        XiCollection { rows }
    }

    pub fn row(&self, n: u32) -> Result<&[Float]> {
        self.rows
            .get(&n)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Shape(format!("no xi row for N={n}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Policy {
        Policy::default()
    }

    #[test]
    fn regular_n2_eps0() {
        let row = regular_frequencies(p(), 2, &p().zero()).unwrap();
        let got: Vec<f64> = row.values.iter().map(Float::to_f64).collect();
        assert_eq!(got, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn regular_n2_eps_half() {
        let row = regular_frequencies(p(), 2, &p().float(0.5)).unwrap();
        let got: Vec<f64> = row.values.iter().map(Float::to_f64).collect();
        assert_eq!(got, vec![0.0, -0.5, -1.0]);
    }

    #[test]
    fn regular_last_entry_is_minus_one() {
        let row = regular_frequencies(p(), 4, &p().zero()).unwrap();
        assert_eq!(row.values.last().unwrap().to_f64(), -1.0);
        let row = regular_frequencies(p(), 7, &p().float(0.3)).unwrap();
        assert_eq!(*row.values.last().unwrap(), -1);
    }

    #[test]
    fn regular_gap_is_constant_exactly() {
        let pol = p();
        for n in [3u32, 5, 12] {
            let eps = pol.float(0.25);
            let row = regular_frequencies(pol, n, &eps).unwrap();
            let expect = pol.float(pol.float(2) * pol.float(pol.float(1) - &eps)) / n;
            for g in row.gaps(pol) {
                assert!(pol.float(&g - &expect).abs() <= pol.half_rel_tol());
            }
        }
    }

    #[test]
    fn regular_rejects_bad_eps() {
        assert!(regular_frequencies(p(), 3, &p().float(1)).is_err());
        assert!(regular_frequencies(p(), 3, &p().float(-0.1)).is_err());
    }

    #[test]
    fn minkowski_n1() {
        let row = minkowski_frequencies(p(), 1, &[p().zero()]).unwrap();
        let got: Vec<f64> = row.values.iter().map(Float::to_f64).collect();
        assert_eq!(got, vec![1.0, -1.0]);
    }

    #[test]
    fn minkowski_n2_zero_xi_merges_to_regular() {
        let row = minkowski_frequencies(p(), 2, &[p().zero(), p().zero()]).unwrap();
        let got: Vec<f64> = row.values.iter().map(Float::to_f64).collect();
        assert_eq!(got, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn minkowski_rejects_xi_out_of_range() {
        assert!(minkowski_frequencies(p(), 2, &[p().float(2), p().zero()]).is_err());
    }

    #[test]
    fn minkowski_rejects_above_cap() {
        let xi: Vec<Float> = (0..21).map(|_| p().zero()).collect();
        assert!(matches!(
            minkowski_frequencies(p(), 21, &xi),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn minkowski_symmetric_about_zero() {
        let pol = p();
        let xi: Vec<Float> = [0.3, 0.7, 0.1, 1.0].iter().map(|&x| pol.float(x)).collect();
        let row = minkowski_frequencies(pol, 4, &xi).unwrap();
        let m = row.len();
        for i in 0..m {
            let neg = pol.float(-&row.values[m - 1 - i]);
            assert!(pol.float(&row.values[i] - &neg).abs() < pol.half_rel_tol());
        }
    }

    #[test]
    fn classify_regular_matrix() {
        let pol = p();
        let eps = EpsilonSequence::OverN { c: 1.0 };
        let rows: Vec<FrequencyRow> = [2u32, 3, 5]
            .iter()
            .map(|&n| regular_frequencies(pol, n, &eps.value(pol, n)).unwrap())
            .collect();
        let m = FrequencyMatrix {
            kind: SamplingKind::Regular,
            rows,
        };
        assert_eq!(classify(pol, &m).unwrap(), SamplingKind::Regular);
    }

    #[test]
    fn classify_irregular_row() {
        let pol = p();
        let row = FrequencyRow::new(pol, 2, vec![pol.float(1), pol.float(0.5), pol.float(-1)])
            .unwrap();
        let m = FrequencyMatrix {
            kind: SamplingKind::Irregular,
            rows: vec![row],
        };
        assert_eq!(classify(pol, &m).unwrap(), SamplingKind::Irregular);
    }

    #[test]
    fn classify_rejects_unsorted_row() {
        let pol = p();
        let row = FrequencyRow {
            n: 2,
            values: vec![pol.float(0), pol.float(1), pol.float(-1)],
        };
        let m = FrequencyMatrix {
            kind: SamplingKind::Irregular,
            rows: vec![row],
        };
        assert!(classify(pol, &m).is_err());
    }

    #[test]
    fn matrix_json_round_trip() {
        let pol = p();
        let rows: Vec<FrequencyRow> = [2u32, 4]
            .iter()
            .map(|&n| regular_frequencies(pol, n, &pol.float(0.125)).unwrap())
            .collect();
        let m = FrequencyMatrix {
            kind: SamplingKind::Regular,
            rows,
        };
        let v = m.to_json();
        let back = FrequencyMatrix::from_json(pol, &v).unwrap();
        assert_eq!(back.kind, m.kind);
        assert_eq!(back.rows, m.rows);
    }

    #[test]
    fn eps_family_uniform_bound() {
        let pol = p();
        let fam = EpsilonFamily::new(vec![
            EpsilonSequence::Zero,
            EpsilonSequence::OverN { c: 1.0 },
            EpsilonSequence::OverN { c: 2.0 },
        ]);
        let ns = [8u32, 16, 32, 64];
        fam.validate(pol, &ns).unwrap();
        assert_eq!(fam.uniform_bound(pol, 8), pol.float(0.25));
    }
}
