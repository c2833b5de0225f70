//! Incomplete sums of the quadratic character, `f(x) = sum_{0 <= n <= x} (n|p)`,
//! and the bounds and identities they are checked against.

use crate::error::{Error, Result};
use crate::modcore::PrimeModulus;
use crate::symbol::{jacobi, legendre, legendre_u64, Symbol, SymbolTable};

/// Largest modulus for which a full profile is materialised.
pub const PROFILE_P_CAP: u64 = 10_000_000;

/// Smallest modulus for which the explicit Burgess inequality is stated.
pub const BURGESS_MIN_P: u64 = 10_000_000;

/// Range of the Burgess parameter `r`.
pub const BURGESS_R_RANGE: std::ops::RangeInclusive<u32> = 1..=6;

/// `f(0), ..., f(p - 1)` with its extremes and longest strictly monotone runs.
///
/// A run `f(N) < f(N+1) < ... < f(N+H)` has length `H` and corresponds to
/// `H` consecutive residues `N + 1, ..., N + H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSumProfile {
    pub p: u64,
    pub values: Vec<i32>,
    pub max_abs: u64,
    pub longest_inc_run: u64,
    pub longest_dec_run: u64,
}

impl PartialSumProfile {
    /// `f` extended to all `x >= 0` by periodicity.
    pub fn at(&self, x: u64) -> i32 {
        self.values[(x % self.p) as usize]
    }
}

#[derive(Default)]
struct RunTracker {
    inc: u64,
    dec: u64,
    best_inc: u64,
    best_dec: u64,
}

impl RunTracker {
    fn step(&mut self, chi: i8) {
        match chi {
            1 => {
                self.inc += 1;
                self.dec = 0;
            }
            -1 => {
                self.dec += 1;
                self.inc = 0;
            }
            _ => {
                self.inc = 0;
                self.dec = 0;
            }
        }
        self.best_inc = self.best_inc.max(self.inc);
        self.best_dec = self.best_dec.max(self.dec);
    }
}

pub fn partial_sum_profile(m: &PrimeModulus) -> Result<PartialSumProfile> {
    if m.p() > PROFILE_P_CAP {
        return Err(Error::CostCap {
            p: m.p(),
            cap: PROFILE_P_CAP,
        });
    }
    let table = SymbolTable::new(m);
    let mut values = Vec::with_capacity(m.p() as usize);
    let mut runs = RunTracker::default();
    let mut f = 0i32;
    let mut max_abs = 0u64;
    for (x, &chi) in table.as_slice().iter().enumerate() {
        f += i32::from(chi);
        if x > 0 {
            runs.step(chi);
        }
        max_abs = max_abs.max(u64::from(f.unsigned_abs()));
        values.push(f);
    }
    Ok(PartialSumProfile {
        p: m.p(),
        values,
        max_abs,
        longest_inc_run: runs.best_inc,
        longest_dec_run: runs.best_dec,
    })
}

fn max_partial_sum(m: &PrimeModulus) -> u64 {
    if m.p() <= PROFILE_P_CAP {
        let table = SymbolTable::new(m);
        let mut f = 0i64;
        let mut best = 0;
        for &chi in table.as_slice() {
            f += i64::from(chi);
            best = best.max(f.unsigned_abs());
        }
        return best;
    }
    let mut f = 0i64;
    let mut best = 0;
    for n in 1..m.p() {
        f += i64::from(jacobi(n, m.p()));
        best = best.max(f.unsigned_abs());
    }
    best
}

/// `max |f|` against `sqrt(p) ln p` (implied constant 1).
#[derive(Debug, Clone, PartialEq)]
pub struct PvCheck {
    pub p: u64,
    pub max_abs: u64,
    pub bound: f64,
    pub ratio: f64,
    pub satisfied: bool,
}

pub fn pv_bound(p: u64) -> f64 {
    (p as f64).sqrt() * (p as f64).ln()
}

pub fn pv_check(m: &PrimeModulus) -> PvCheck {
    pv_check_from_max(m.p(), max_partial_sum(m))
}

/// Same check reusing a profile that was already computed.
pub fn pv_check_profile(profile: &PartialSumProfile) -> PvCheck {
    pv_check_from_max(profile.p, profile.max_abs)
}

fn pv_check_from_max(p: u64, max_abs: u64) -> PvCheck {
    let bound = pv_bound(p);
    PvCheck {
        p,
        max_abs,
        bound,
        ratio: max_abs as f64 / bound,
        satisfied: max_abs as f64 <= bound,
    }
}

/// `|sum_{M <= n <= M + N} (n|p)|` against `2.7 N^(1-1/r) p^((r+1)/(4r^2)) (ln p)^(1/r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BurgessCheck {
    pub p: u64,
    pub start: u64,
    pub len: u64,
    pub r: u32,
    pub sum: i64,
    pub bound: f64,
    pub satisfied: bool,
}

pub fn burgess_bound(p: u64, len: u64, r: u32) -> f64 {
    let (p, n, r) = (p as f64, len as f64, f64::from(r));
    2.7 * n.powf(1.0 - 1.0 / r) * p.powf((r + 1.0) / (4.0 * r * r)) * p.ln().powf(1.0 / r)
}

pub fn burgess_check(p: u64, start: u64, len: u64, r: u32) -> Result<BurgessCheck> {
    if p < BURGESS_MIN_P {
        return Err(Error::Hypothesis(format!(
            "Burgess inequality needs p >= {BURGESS_MIN_P}, got {p}"
        )));
    }
    let m = PrimeModulus::new(p)?;
    if len == 0 {
        return Err(Error::Hypothesis("N must be at least 1".into()));
    }
    if !BURGESS_R_RANGE.contains(&r) {
        return Err(Error::Hypothesis(format!(
            "r = {r} outside {}..={}",
            BURGESS_R_RANGE.start(),
            BURGESS_R_RANGE.end()
        )));
    }
    let end = start
        .checked_add(len)
        .ok_or_else(|| Error::Hypothesis("M + N overflows".into()))?;
    let sum: i64 = (start..=end)
        .map(|n| i64::from(legendre_u64(n % m.p(), &m).value()))
        .sum();
    let bound = burgess_bound(p, len, r);
    Ok(BurgessCheck {
        p,
        start,
        len,
        r,
        sum,
        bound,
        satisfied: sum.unsigned_abs() as f64 <= bound,
    })
}

/// Sum of the nonzero quadratic residues in `[1, p)`; only defined here for
/// `p = 1 (mod 4)`, where it equals `p(p - 1)/4`.
pub fn qr_sum(m: &PrimeModulus) -> Result<u128> {
    if m.p() % 4 != 1 {
        return Err(Error::Hypothesis(format!("{} is not 1 mod 4", m.p())));
    }
    let table = SymbolTable::new(m);
    Ok(table
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s == 1)
        .map(|(r, _)| r as u128)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LehmerSum {
    pub value: i64,
    /// Set unless `a` and `b` are distinct nonzero squares.
    pub degenerate: bool,
}

/// `sum_{n=0}^{p-1} ((n+a)|p) (n|p) ((n+b)|p)`.
pub fn lehmer_triple_sum(m: &PrimeModulus, a: u64, b: u64) -> LehmerSum {
    let p = m.p();
    let (a, b) = (a % p, b % p);
    let table = SymbolTable::new(m);
    let value = (0..p)
        .map(|n| {
            i64::from(table.get(n + a)) * i64::from(table.get(n)) * i64::from(table.get(n + b))
        })
        .sum();
    let is_square = |x: u64| legendre(x as i64, m) == Symbol::Residue;
    LehmerSum {
        value,
        degenerate: a == b || !is_square(a) || !is_square(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{PatternCounter, SymbolPattern};
    use crate::modcore::PrimeRange;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn euler(n: u64, q: &PrimeModulus) -> i64 {
        match q.pow(n % q.p(), q.half()) {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    #[test]
    fn profile_examples() {
        let pr = partial_sum_profile(&m(7)).unwrap();
        assert_eq!(pr.values, vec![0, 1, 2, 1, 2, 1, 0]);
        assert_eq!(pr.max_abs, 2);
        assert_eq!(pr.longest_inc_run, 2);
        assert_eq!(pr.longest_dec_run, 2);
        let pr = partial_sum_profile(&m(3)).unwrap();
        assert_eq!(pr.max_abs, 1);
        assert!(matches!(
            partial_sum_profile(&m(10_000_019)),
            Err(Error::CostCap { .. })
        ));
    }

    #[test]
    fn profile_invariants() {
        for q in PrimeRange::new(3, 10_000).unwrap().moduli() {
            let pr = partial_sum_profile(&q).unwrap();
            let p = q.p();
            assert_eq!(pr.values[p as usize - 1], 0);
            for w in pr.values.windows(2) {
                assert!((w[1] - w[0]).abs() <= 1);
            }
            for x in [0, 1, p / 3, p - 2, 5 * p + 1] {
                assert_eq!(pr.at(x + p) - pr.at(x), pr.at(p - 1));
            }
        }
    }

    #[test]
    fn runs_agree_with_census() {
        for q in PrimeRange::new(3, 2000).unwrap().moduli() {
            let pr = partial_sum_profile(&q).unwrap();
            let c = PatternCounter::new(&q).unwrap();
            let longest = (1..=24)
                .take_while(|&k| c.count(&SymbolPattern::all_residues(k).unwrap()) >= 1)
                .last()
                .unwrap_or(0) as u64;
            assert_eq!(pr.longest_inc_run, longest, "p = {q}");
            let nonres = (1..=24)
                .take_while(|&k| c.count(&SymbolPattern::consecutive(&vec![-1; k]).unwrap()) >= 1)
                .last()
                .unwrap_or(0) as u64;
            assert_eq!(pr.longest_dec_run, nonres, "p = {q}");
        }
    }

    #[test]
    fn pv_examples() {
        let c = pv_check(&m(7));
        assert_eq!(c.max_abs, 2);
        assert!((c.bound - 7f64.sqrt() * 7f64.ln()).abs() < 1e-12);
        assert!(c.satisfied);
        let c = pv_check(&m(3));
        assert!(c.satisfied && (c.bound - 1.90).abs() < 0.01);
    }

    #[test]
    fn pv_holds_below_ten_thousand() {
        for q in PrimeRange::new(3, 10_000).unwrap().moduli() {
            let c = pv_check(&q);
            assert!(c.satisfied, "{c:?}");
            assert_eq!(c, pv_check_profile(&partial_sum_profile(&q).unwrap()));
        }
    }

    #[test]
    fn streaming_max_beyond_profile_cap() {
        let q = m(10_000_019);
        let c = pv_check(&q);
        assert!(c.satisfied);
        assert!(c.max_abs > 0);
    }

    #[test]
    fn burgess_examples() {
        let p = 10_000_019;
        let c2 = burgess_check(p, 0, 100_000, 2).unwrap();
        assert!(c2.satisfied);
        let c1 = burgess_check(p, 0, 100_000, 1).unwrap();
        assert!(c1.satisfied);
        assert!((c1.bound - 2.7 * (p as f64).sqrt() * (p as f64).ln()).abs() < 1e-6);
        assert_eq!(c1.sum, c2.sum);
        let single = burgess_check(p, 1_000_000, 1, 2).unwrap();
        assert!(single.sum.abs() <= 2 && single.satisfied);
        // oracle for the sum itself
        let q = m(p);
        let direct: i64 = (0..=100_000).map(|n| euler(n, &q)).sum();
        assert_eq!(c2.sum, direct);
    }

    #[test]
    fn burgess_hypotheses() {
        assert!(matches!(
            burgess_check(9_999_991, 0, 10, 2),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            burgess_check(10_000_020, 0, 10, 2),
            Err(Error::NotOddPrime(_))
        ));
        assert!(burgess_check(10_000_019, 0, 0, 2).is_err());
        assert!(burgess_check(10_000_019, 0, 10, 0).is_err());
        assert!(burgess_check(10_000_019, 0, 10, 7).is_err());
    }

    #[test]
    fn qr_sum_examples() {
        assert_eq!(qr_sum(&m(5)).unwrap(), 5);
        assert_eq!(qr_sum(&m(13)).unwrap(), 39);
        assert_eq!(qr_sum(&m(17)).unwrap(), 68);
        assert!(qr_sum(&m(7)).is_err());
    }

    #[test]
    fn qr_sum_identity() {
        for q in PrimeRange::new(3, 10_000)
            .unwrap()
            .moduli()
            .filter(|q| q.p() % 4 == 1)
        {
            let p = u128::from(q.p());
            assert_eq!(qr_sum(&q).unwrap(), p * (p - 1) / 4);
        }
    }

    #[test]
    fn lehmer_examples() {
        // brute force with Euler's criterion
        let oracle = |p: u64, a: u64, b: u64| -> i64 {
            let q = m(p);
            (0..p)
                .map(|n| euler(n + a, &q) * euler(n, &q) * euler(n + b, &q))
                .sum()
        };
        let s = lehmer_triple_sum(&m(7), 1, 4);
        assert_eq!(s.value, oracle(7, 1, 4));
        assert_eq!(s.value, 0);
        assert!(!s.degenerate);
        let s = lehmer_triple_sum(&m(5), 1, 4);
        assert_eq!(s.value, oracle(5, 1, 4));
        assert_eq!(s.value, 2);
        let s = lehmer_triple_sum(&m(7), 2, 2);
        assert!(s.degenerate);
        assert_eq!(s.value, oracle(7, 2, 2));
        assert!(lehmer_triple_sum(&m(7), 1, 3).degenerate);
        for q in PrimeRange::new(3, 200).unwrap().moduli() {
            for (a, b) in [(1, 4), (4, 9), (2, 3)] {
                assert_eq!(lehmer_triple_sum(&q, a, b).value, oracle(q.p(), a, b));
            }
        }
    }
}
