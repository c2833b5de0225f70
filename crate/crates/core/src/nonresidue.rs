//! The least quadratic nonresidue `n_p` and its statistics over prime sweeps.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modcore::{is_prime, PrimeModulus, PrimeRange, MODULUS_LIMIT, SEGMENT_LEN};
use crate::symbol::jacobi;

/// Largest sweep bound accepted by [`distribution`].
pub const DISTRIBUTION_X_CAP: u64 = 100_000_000;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| PrimeRange::new(2, 10_000).unwrap().primes().collect())
}

/// The `n`-th prime, 1-based (`nth_prime(1) = 2`).
pub fn nth_prime(n: usize) -> u64 {
    assert!(n >= 1, "primes are indexed from 1");
    let table = small_primes();
    if let Some(&q) = table.get(n - 1) {
        return q;
    }
    let mut q = *table.last().unwrap();
    let mut index = table.len();
    while index < n {
        q += 2;
        if is_prime(q).unwrap() {
            index += 1;
        }
    }
    q
}

/// Position of the prime `q` in the sequence of primes, 1-based.
pub fn prime_index(q: u64) -> usize {
    let table = small_primes();
    match table.binary_search(&q) {
        Ok(i) => i + 1,
        Err(_) => PrimeRange::new(2, q).unwrap().primes().count(),
    }
}

/// Smallest `n >= 2` with `(n|p) = -1`. Only prime candidates are tried:
/// a least nonresidue is always prime.
pub fn least_nonresidue(m: &PrimeModulus) -> u64 {
    least_nonresidue_of(m.p())
}

fn least_nonresidue_of(p: u64) -> u64 {
    for &q in small_primes() {
        if jacobi(q, p) == -1 {
            return q;
        }
    }
    // n_p <= sqrt(p) + 1, so this is reached only for p beyond 10^8
    let mut q = *small_primes().last().unwrap() + 2;
    loop {
        if is_prime(q).unwrap() && jacobi(q, p) == -1 {
            return q;
        }
        q += 2;
    }
}

/// `(ln p)(ln ln p)`, natural logarithms.
pub fn log_scale(p: u64) -> f64 {
    let l = (p as f64).ln();
    l * l.ln()
}

/// One row of the least-nonresidue table.
#[derive(Debug, Clone, PartialEq)]
pub struct NonresidueRecord {
    pub p: u64,
    pub n_p: u64,
    /// `(ln p)(ln ln p)`.
    pub scale: f64,
    /// `n_p / scale`.
    pub c_p: f64,
}

pub fn record_for(m: &PrimeModulus) -> NonresidueRecord {
    let n_p = least_nonresidue(m);
    let scale = log_scale(m.p());
    NonresidueRecord {
        p: m.p(),
        n_p,
        scale,
        c_p: n_p as f64 / scale,
    }
}

fn check_bound(bound: u64) -> Result<PrimeRange> {
    if bound >= MODULUS_LIMIT {
        return Err(Error::OutOfRange {
            value: bound,
            limit: MODULUS_LIMIT,
        });
    }
    PrimeRange::new(3, bound)
}

fn chunks(range: PrimeRange) -> Vec<PrimeRange> {
    if range.is_empty() {
        return Vec::new();
    }
    let span = range.hi() - range.lo() + 1;
    range.split(span.div_ceil(SEGMENT_LEN) as usize)
}

/// Least prime `p <= search_bound` whose least nonresidue is the `n`-th
/// prime, or `None` if the bound is exhausted.
pub fn smallest_prime_attaining(n: usize, search_bound: u64) -> Result<Option<u64>> {
    if n == 0 {
        return Err(Error::Hypothesis("prime index starts at 1".into()));
    }
    let target = nth_prime(n);
    let range = check_bound(search_bound)?;
    Ok(chunks(range)
        .par_iter()
        .find_map_first(|c| c.primes().find(|&p| least_nonresidue_of(p) == target)))
}

/// Table row: the `n`-th prime and the least prime having it as `n_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub p_n: u64,
    pub record: Option<NonresidueRecord>,
}

/// Rows `1..=n_max` of the least-nonresidue table, from one sweep of the
/// primes up to `search_bound`.
pub fn nonresidue_table(n_max: usize, search_bound: u64) -> Result<Vec<TableRow>> {
    let range = check_bound(search_bound)?;
    let targets: Vec<u64> = (1..=n_max).map(nth_prime).collect();
    let per_chunk: Vec<Vec<Option<u64>>> = chunks(range)
        .par_iter()
        .map(|c| {
            let mut first = vec![None; n_max];
            for p in c.primes() {
                let np = least_nonresidue_of(p);
                if let Ok(i) = targets.binary_search(&np) {
                    first[i].get_or_insert(p);
                }
            }
            first
        })
        .collect();
    let mut first = vec![None; n_max];
    for chunk in per_chunk {
        for (slot, found) in first.iter_mut().zip(chunk) {
            if slot.is_none() {
                *slot = found;
            }
        }
    }
    Ok(targets
        .iter()
        .zip(first)
        .enumerate()
        .map(|(i, (&p_n, p))| TableRow {
            n: i + 1,
            p_n,
            record: p.map(|p| record_for(&PrimeModulus::new_unchecked(p))),
        })
        .collect())
}

/// Histogram of `n_p` over the odd primes up to `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub x: u64,
    /// Number of odd primes `p <= x`.
    pub primes: u64,
    /// `counts[n - 1] = #{p <= x : n_p = p_n}`.
    pub counts: Vec<u64>,
    /// `sum n_p`, exact.
    pub total: u128,
}

impl DistributionReport {
    pub fn count(&self, n: usize) -> u64 {
        self.counts.get(n - 1).copied().unwrap_or(0)
    }

    pub fn frequency(&self, n: usize) -> f64 {
        if self.primes == 0 {
            return 0.0;
        }
        self.count(n) as f64 / self.primes as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (1..=self.counts.len()).map(|n| self.frequency(n)).collect()
    }

    pub fn mean(&self) -> f64 {
        if self.primes == 0 {
            return f64::NAN;
        }
        self.total as f64 / self.primes as f64
    }

    fn merge(mut self, other: DistributionReport) -> Self {
        if other.counts.len() > self.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.primes += other.primes;
        self.total += other.total;
        self
    }
}

pub fn distribution(x: u64) -> Result<DistributionReport> {
    if x > DISTRIBUTION_X_CAP {
        return Err(Error::OutOfRange {
            value: x,
            limit: DISTRIBUTION_X_CAP + 1,
        });
    }
    let empty = DistributionReport {
        x,
        primes: 0,
        counts: Vec::new(),
        total: 0,
    };
    let merged = chunks(PrimeRange::new(3, x)?)
        .par_iter()
        .map(|c| {
            let mut part = empty.clone();
            for p in c.primes() {
                let np = least_nonresidue_of(p);
                let n = prime_index(np);
                if part.counts.len() < n {
                    part.counts.resize(n, 0);
                }
                part.counts[n - 1] += 1;
                part.primes += 1;
                part.total += u128::from(np);
            }
            part
        })
        .reduce(|| empty.clone(), DistributionReport::merge);
    Ok(merged)
}

/// One bound on `n_p` evaluated at a specific prime.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub value: f64,
    pub satisfied: bool,
}

/// Classical bounds on the least nonresidue, checked as data:
/// `sqrt(p) + 1`, `p^(1/(4 sqrt e) + 0.01)`, `2 (ln p)^2` and `20 (ln p)(ln ln p)`.
pub fn bound_synopsis(m: &PrimeModulus) -> Vec<BoundCheck> {
    let n_p = least_nonresidue(m) as f64;
    let p = m.p() as f64;
    let bounds = [
        ("sqrt_p_plus_1", p.sqrt() + 1.0),
        (
            "burgess_exponent",
            p.powf(1.0 / (4.0 * std::f64::consts::E.sqrt()) + 0.01),
        ),
        ("grh_two_log_squared", 2.0 * p.ln().powi(2)),
        ("twenty_log_loglog", 20.0 * log_scale(m.p())),
    ];
    bounds
        .into_iter()
        .map(|(name, value)| BoundCheck {
            name,
            value,
            satisfied: n_p <= value,
        })
        .collect()
}
