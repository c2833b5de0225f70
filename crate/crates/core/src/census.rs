//! Exact censuses of residue/nonresidue patterns `(u + a_i | p) = e_i` and
//! the estimates they are compared against.
//!
//! A point `u in F_p` is counted when every shifted value `u + a_i` is
//! nonzero modulo `p` and has the prescribed symbol. Shifts wrap around the
//! field. The decomposition `N = T + U` uses the exact main term
//! `T(k, p) = (p - 1)^(k+1) / (2^k p^k)`; the residual `U` is measured, not
//! bounded. The only envelope enforced is `|N - p/2^k| <= (k + 1)(3 + sqrt p)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modcore::{PrimeModulus, PrimeRange, Primes};
use crate::symbol::{legendre, SymbolTable};

/// Longest pattern accepted anywhere.
pub const MAX_PATTERN_LEN: usize = 24;

/// Longest pattern accepted by all-pattern sweeps (`2^k` reports per prime).
pub const MAX_SWEEP_LEN: usize = 12;

/// Exclusive bound on `p` for exhaustive scans.
pub const CENSUS_P_CAP: u64 = 1 << 31;

/// Signs `e_i` at offsets `a_0 < a_1 < ... < a_{k-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolPattern {
    offsets: Vec<i64>,
    signs: Vec<i8>,
}

impl SymbolPattern {
    pub fn new(offsets: Vec<i64>, signs: Vec<i8>) -> Result<Self> {
        let k = signs.len();
        if k == 0 || k > MAX_PATTERN_LEN {
            return Err(Error::InvalidPattern(format!(
                "length {k} outside 1..={MAX_PATTERN_LEN}"
            )));
        }
        if offsets.len() != k {
            return Err(Error::InvalidPattern(format!(
                "{} offsets for {k} signs",
                offsets.len()
            )));
        }
        if offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPattern(
                "offsets must be strictly increasing".into(),
            ));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidPattern("signs must be +1 or -1".into()));
        }
        Ok(Self { offsets, signs })
    }

    /// Pattern on the run `u, u + 1, ..., u + k - 1`.
    pub fn consecutive(signs: &[i8]) -> Result<Self> {
        Self::new((0..signs.len() as i64).collect(), signs.to_vec())
    }

    /// All-residue run of length `k`.
    pub fn all_residues(k: usize) -> Result<Self> {
        Self::consecutive(&vec![1; k])
    }

    /// Consecutive pattern from its binary code: bit 1 means `+1`, the most
    /// significant of the `k` bits belongs to `a_0`.
    pub fn from_bits(bits: u32, k: usize) -> Result<Self> {
        let signs: Vec<i8> = (0..k)
            .map(|i| if bits >> (k - 1 - i) & 1 == 1 { 1 } else { -1 })
            .collect();
        Self::consecutive(&signs)
    }

    pub fn bits(&self) -> u32 {
        self.signs
            .iter()
            .fold(0, |acc, &s| (acc << 1) | u32::from(s == 1))
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_consecutive(&self) -> bool {
        self.offsets.iter().enumerate().all(|(i, &a)| a == i as i64)
    }

    /// Same signs with every offset moved by `c`.
    pub fn shifted(&self, c: i64) -> Self {
        Self {
            offsets: self.offsets.iter().map(|a| a + c).collect(),
            signs: self.signs.clone(),
        }
    }
}

impl fmt::Display for SymbolPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.signs {
            f.write_str(if s == 1 { "+" } else { "-" })?;
        }
        if !self.is_consecutive() {
            let offs: Vec<String> = self.offsets.iter().map(i64::to_string).collect();
            write!(f, "@{}", offs.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for SymbolPattern {
    type Err = Error;

    /// `"++-"` for a consecutive pattern, `"+-@0,3"` with explicit offsets.
    fn from_str(s: &str) -> Result<Self> {
        let (sign_part, offset_part) = match s.split_once('@') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let signs = sign_part
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::InvalidPattern(format!("unexpected {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        match offset_part {
            None => Self::consecutive(&signs),
            Some(list) => {
                let offsets = list
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<i64>()
                            .map_err(|e| Error::InvalidPattern(format!("{t:?}: {e}")))
                    })
                    .collect::<Result<Vec<i64>>>()?;
                Self::new(offsets, signs)
            }
        }
    }
}

fn check_census_modulus(m: &PrimeModulus) -> Result<()> {
    if m.p() >= CENSUS_P_CAP {
        return Err(Error::CostCap {
            p: m.p(),
            cap: CENSUS_P_CAP - 1,
        });
    }
    Ok(())
}

/// Symbol table of one prime plus the counting routines that read it.
/// Build once per prime when several patterns are counted.
#[derive(Debug, Clone)]
pub struct PatternCounter {
    m: PrimeModulus,
    table: SymbolTable,
}

impl PatternCounter {
    pub fn new(m: &PrimeModulus) -> Result<Self> {
        check_census_modulus(m)?;
        Ok(Self {
            m: m.clone(),
            table: SymbolTable::new(m),
        })
    }

    pub fn modulus(&self) -> &PrimeModulus {
        &self.m
    }

    #[inline]
    fn matches(&self, u: u64, shifts: &[u64], signs: &[i8]) -> bool {
        let p = self.m.p();
        shifts.iter().zip(signs).all(|(&a, &e)| {
            let v = u + a;
            let v = if v >= p { v - p } else { v };
            self.table.get(v) == e
        })
    }

    fn shifts(&self, pat: &SymbolPattern) -> Vec<u64> {
        pat.offsets.iter().map(|&a| self.m.reduce(a)).collect()
    }

    /// `N`: number of `u in F_p` matching `pat`.
    pub fn count(&self, pat: &SymbolPattern) -> u64 {
        let shifts = self.shifts(pat);
        (0..self.m.p())
            .filter(|&u| self.matches(u, &shifts, &pat.signs))
            .count() as u64
    }

    /// Matches among `start, start + 1, ..., start + length - 1` (mod p).
    pub fn count_in_interval(&self, start: u64, length: u64, pat: &SymbolPattern) -> Result<u64> {
        let p = self.m.p();
        if length == 0 || length > p {
            return Err(Error::Hypothesis(format!(
                "interval length {length} outside 1..={p}"
            )));
        }
        let shifts = self.shifts(pat);
        let start = start % p;
        Ok((0..length)
            .map(|i| (start + i) % p)
            .filter(|&u| self.matches(u, &shifts, &pat.signs))
            .count() as u64)
    }

    /// Counts of all `2^k` consecutive patterns of length `k`, indexed by
    /// [`SymbolPattern::bits`]. One pass over the field.
    pub fn histogram(&self, k: usize) -> Result<Vec<u64>> {
        if k == 0 || k > MAX_PATTERN_LEN {
            return Err(Error::InvalidPattern(format!(
                "length {k} outside 1..={MAX_PATTERN_LEN}"
            )));
        }
        let p = self.m.p() as usize;
        let symbols = self.table.as_slice();
        let mask = (1u32 << k) - 1;
        let mut counts = vec![0u64; 1 << k];
        let mut bits = 0u32;
        let mut last_zero: Option<usize> = None;
        // window for u = j + 1 - k ends at position j
        for j in 0..p + k - 1 {
            let s = symbols[j % p];
            bits = ((bits << 1) | u32::from(s == 1)) & mask;
            if s == 0 {
                last_zero = Some(j);
            }
            if j + 1 >= k {
                let clean = last_zero.is_none_or(|z| j - z >= k);
                if clean {
                    counts[bits as usize] += 1;
                }
            }
        }
        Ok(counts)
    }

    /// Twin count computed from the closed form, for comparison with
    /// [`PatternCounter::count`].
    pub fn twin_formula(&self, a: u64, e0: i8, e1: i8) -> Result<u64> {
        twin_count_formula(&self.m, a, e0, e1)
    }
}

/// Exact census `N` of `pat` over `F_p`.
pub fn count_pattern_exact(m: &PrimeModulus, pat: &SymbolPattern) -> Result<u64> {
    Ok(PatternCounter::new(m)?.count(pat))
}

/// Census restricted to the window `start .. start + length` (mod p), with
/// the naive prediction `length / 2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalCount {
    pub count: u64,
    pub prediction: f64,
}

pub fn count_pattern_in_interval(
    m: &PrimeModulus,
    start: u64,
    length: u64,
    pat: &SymbolPattern,
) -> Result<IntervalCount> {
    let count = PatternCounter::new(m)?.count_in_interval(start, length, pat)?;
    Ok(IntervalCount {
        count,
        prediction: length as f64 / 2f64.powi(pat.len() as i32),
    })
}

/// Main term `T(k, p) = (p - 1)/2^k * (1 - 1/p)^k`, held exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TTerm {
    pub k: usize,
    pub p: u64,
    pub value: BigRational,
}

impl TTerm {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::NAN)
    }

    /// The coarser form `p / 2^k`.
    pub fn second_form(&self) -> f64 {
        self.p as f64 / 2f64.powi(self.k as i32)
    }

    /// `N - T` evaluated exactly before rounding to `f64`.
    pub fn residual(&self, exact: u64) -> f64 {
        (BigRational::from_integer(BigInt::from(exact)) - &self.value)
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

pub fn t_term(k: usize, m: &PrimeModulus) -> Result<TTerm> {
    if k == 0 {
        return Err(Error::InvalidPattern("k must be at least 1".into()));
    }
    let p = BigInt::from(m.p());
    let numer = (&p - 1u32).pow(k as u32 + 1);
    let denom = (BigInt::from(1u32) << k) * p.pow(k as u32);
    Ok(TTerm {
        k,
        p: m.p(),
        value: BigRational::new(numer, denom),
    })
}

/// Measured `U = N - T` for one pattern.
pub fn u_residual(m: &PrimeModulus, pat: &SymbolPattern) -> Result<f64> {
    let exact = count_pattern_exact(m, pat)?;
    Ok(t_term(pat.len(), m)?.residual(exact))
}

/// Explicit census envelope `(k + 1)(3 + sqrt p)`.
pub fn peralta_bound(k: usize, p: u64) -> f64 {
    (k as f64 + 1.0) * (3.0 + (p as f64).sqrt())
}

fn check_sign(e: i8) -> Result<i64> {
    match e {
        1 | -1 => Ok(i64::from(e)),
        _ => Err(Error::InvalidPattern(format!("sign {e} is not +1 or -1"))),
    }
}

/// Number of `n` with `(n|p) = e0` and `(n + a|p) = e1`:
/// `(p - 2 - e0 (-a|p) - e1 (a|p) - e0 e1) / 4`.
pub fn twin_count_formula(m: &PrimeModulus, a: u64, e0: i8, e1: i8) -> Result<u64> {
    let a = a % m.p();
    if a == 0 {
        return Err(Error::ZeroArgument { p: m.p() });
    }
    let (e0, e1) = (check_sign(e0)?, check_sign(e1)?);
    let chi_a = i64::from(legendre(a as i64, m).value());
    let chi_minus_a = i64::from(legendre(-(a as i64), m).value());
    let numer = m.p() as i64 - 2 - e0 * chi_minus_a - e1 * chi_a - e0 * e1;
    debug_assert!(numer >= 0 && numer % 4 == 0);
    Ok((numer / 4) as u64)
}

/// One row of a census: exact count and every estimate it is compared to.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    pub p: u64,
    pub pattern: SymbolPattern,
    pub exact: u64,
    pub t_term: BigRational,
    /// `(p/2^k)(1 - 1/p)^k`.
    pub first_order: f64,
    /// `p/2^k`.
    pub p_over_2k: f64,
    /// `exact - t_term`.
    pub residual: f64,
    pub peralta_bound: f64,
}

impl CensusReport {
    fn from_parts(t: &TTerm, pattern: SymbolPattern, exact: u64) -> Self {
        let p = t.p as f64;
        let k = t.k as i32;
        Self {
            p: t.p,
            exact,
            t_term: t.value.clone(),
            first_order: p / 2f64.powi(k) * (1.0 - 1.0 / p).powi(k),
            p_over_2k: t.second_form(),
            residual: t.residual(exact),
            peralta_bound: peralta_bound(t.k, t.p),
            pattern,
        }
    }

    pub fn new(m: &PrimeModulus, pattern: SymbolPattern) -> Result<Self> {
        let exact = count_pattern_exact(m, &pattern)?;
        let t = t_term(pattern.len(), m)?;
        Ok(Self::from_parts(&t, pattern, exact))
    }

    pub fn k(&self) -> usize {
        self.pattern.len()
    }

    pub fn t_term_f64(&self) -> f64 {
        self.t_term.to_f64().unwrap_or(f64::NAN)
    }

    pub fn within_peralta(&self) -> bool {
        (self.exact as f64 - self.p_over_2k).abs() <= self.peralta_bound
    }
}

/// Reports for one prime: every `k <= k_max`, every sign pattern, ascending
/// by `(k, bits)`.
pub fn census_for_prime(m: &PrimeModulus, k_max: usize) -> Result<Vec<CensusReport>> {
    check_sweep_len(k_max)?;
    let counter = PatternCounter::new(m)?;
    let mut out = Vec::with_capacity((1 << (k_max + 1)) - 2);
    for k in 1..=k_max {
        let t = t_term(k, m)?;
        for (bits, &exact) in counter.histogram(k)?.iter().enumerate() {
            let pattern = SymbolPattern::from_bits(bits as u32, k)?;
            out.push(CensusReport::from_parts(&t, pattern, exact));
        }
    }
    Ok(out)
}

fn check_sweep_len(k_max: usize) -> Result<()> {
    if k_max == 0 || k_max > MAX_SWEEP_LEN {
        return Err(Error::Hypothesis(format!(
            "k_max {k_max} outside 1..={MAX_SWEEP_LEN}"
        )));
    }
    Ok(())
}

/// Streaming all-pattern census over a prime range, deterministic order
/// `(p, k, bits)`. Primes are processed in parallel batches on the current
/// rayon pool; output order never depends on scheduling.
pub struct CensusSweep {
    primes: Primes,
    k_max: usize,
    batch: std::vec::IntoIter<CensusReport>,
    error: Option<Error>,
}

const SWEEP_BATCH: usize = 256;

impl Iterator for CensusSweep {
    type Item = Result<CensusReport>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(r) = self.batch.next() {
                return Some(Ok(r));
            }
            if let Some(e) = self.error.take() {
                return Some(Err(e));
            }
            let moduli: Vec<PrimeModulus> = self
                .primes
                .by_ref()
                .filter(|&p| p > 2)
                .take(SWEEP_BATCH)
                .map(PrimeModulus::new_unchecked)
                .collect();
            if moduli.is_empty() {
                return None;
            }
            let k_max = self.k_max;
            let results: Vec<Result<Vec<CensusReport>>> = moduli
                .par_iter()
                .map(|m| census_for_prime(m, k_max))
                .collect();
            let mut rows = Vec::new();
            for r in results {
                match r {
                    Ok(v) => rows.extend(v),
                    Err(e) => {
                        self.error = Some(e);
                        break;
                    }
                }
            }
            if self.error.is_some() {
                // stop the stream after reporting
                self.primes = PrimeRange::new(1, 0).expect("empty range").primes();
            }
            self.batch = rows.into_iter();
        }
    }
}

pub fn census_sweep(range: PrimeRange, k_max: usize) -> Result<CensusSweep> {
    check_sweep_len(k_max)?;
    if range.hi() >= CENSUS_P_CAP {
        return Err(Error::CostCap {
            p: range.hi(),
            cap: CENSUS_P_CAP - 1,
        });
    }
    Ok(CensusSweep {
        primes: range.primes(),
        k_max,
        batch: Vec::new().into_iter(),
        error: None,
    })
}

/// Largest `|U|` seen for one pattern length within one decade of primes.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualExtreme {
    pub k: usize,
    /// `floor(log10 p)`.
    pub decade: u32,
    pub max_abs_residual: f64,
    pub at_p: u64,
    pub reports: u64,
}

pub fn residual_extremes<'a>(
    reports: impl IntoIterator<Item = &'a CensusReport>,
) -> Vec<ResidualExtreme> {
    let mut out: Vec<ResidualExtreme> = Vec::new();
    for r in reports {
        let decade = r.p.ilog10();
        let k = r.k();
        let abs = r.residual.abs();
        match out.iter_mut().find(|e| e.k == k && e.decade == decade) {
            Some(e) => {
                e.reports += 1;
                if abs > e.max_abs_residual {
                    e.max_abs_residual = abs;
                    e.at_p = r.p;
                }
            }
            None => out.push(ResidualExtreme {
                k,
                decade,
                max_abs_residual: abs,
                at_p: r.p,
                reports: 1,
            }),
        }
    }
    out.sort_by_key(|e| (e.k, e.decade));
    out
}
