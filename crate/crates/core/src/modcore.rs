//! Exact arithmetic modulo an odd prime, primality, prime streams,
//! primitive roots and modular square roots.
//!
//! Every modulus is kept below [`MODULUS_LIMIT`] (2^62) so that products fit
//! in a `u128` before reduction.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Exclusive upper bound on moduli and on inputs to [`is_prime`].
pub const MODULUS_LIMIT: u64 = 1 << 62;

/// Numbers sieved per segment by [`Primes`].
pub const SEGMENT_LEN: u64 = 1 << 20;

// Above this square root the base-prime table gets too large and prime
// streams fall back to testing each candidate.
const SIEVE_SQRT_LIMIT: u64 = 1 << 24;

// Miller-Rabin with these bases is exact for all n < 3.3 * 10^24.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn miller_rabin(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &WITNESSES {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality test for `n < 2^62`.
pub fn is_prime(n: u64) -> Result<bool> {
    if n >= MODULUS_LIMIT {
        return Err(Error::OutOfRange {
            value: n,
            limit: MODULUS_LIMIT,
        });
    }
    Ok(miller_rabin(n))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

// Brent's variant of Pollard rho; `n` must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        let mut power = 1u64;
        let mut lam = 1u64;
        while d == 1 {
            if power == lam {
                x = y;
                power <<= 1;
                lam = 0;
            }
            y = f(y);
            lam += 1;
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Distinct prime factors of `n`, ascending.
pub(crate) fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut factors = Vec::new();
    let mut q = 2u64;
    while q <= 1000 && q * q <= n {
        if n % q == 0 {
            factors.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    let mut stack = Vec::new();
    if n > 1 {
        stack.push(n);
    }
    while let Some(m) = stack.pop() {
        if miller_rabin(m) {
            factors.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    factors.sort_unstable();
    factors.dedup();
    factors
}

/// The two square roots of a quadratic residue, or the single root of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareRoots {
    Zero,
    /// `(r, p - r)` with `r < p - r`.
    Pair(u64, u64),
}

/// A validated odd prime `3 <= p < 2^62`.
///
/// The least primitive root is resolved on first use and cached; after that
/// the value is immutable and can be shared freely between threads.
#[derive(Debug, Clone)]
pub struct PrimeModulus {
    p: u64,
    half: u64,
    tau: OnceLock<u64>,
}

impl PartialEq for PrimeModulus {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl Eq for PrimeModulus {}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)
    }
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p)? || p == 2 {
            return Err(Error::NotOddPrime(p));
        }
        Ok(Self::new_unchecked(p))
    }

    // Callers guarantee `p` is an odd prime below the limit (e.g. values
    // coming out of a prime stream).
    pub(crate) fn new_unchecked(p: u64) -> Self {
        debug_assert!(p > 2 && p < MODULUS_LIMIT);
        Self {
            p,
            half: (p - 1) / 2,
            tau: OnceLock::new(),
        }
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// `(p - 1) / 2`.
    #[inline]
    pub fn half(&self) -> u64 {
        self.half
    }

    /// Reduces any signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, u: i64) -> u64 {
        (u as i128).rem_euclid(self.p as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.p - b % self.p)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    /// `b^e mod p` by square-and-multiply.
    #[inline]
    pub fn pow(&self, b: u64, e: u64) -> u64 {
        pow_mod(b, e, self.p)
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroArgument { p: self.p });
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Least generator of the multiplicative group.
    pub fn primitive_root(&self) -> u64 {
        *self.tau.get_or_init(|| {
            let order = self.p - 1;
            let factors = distinct_prime_factors(order);
            (2..self.p)
                .find(|&g| factors.iter().all(|&q| self.pow(g, order / q) != 1))
                .expect("every prime field has a primitive root")
        })
    }

    /// Square roots of `u` by Tonelli-Shanks; `None` for nonresidues.
    pub fn sqrt(&self, u: u64) -> Option<SquareRoots> {
        let p = self.p;
        let u = u % p;
        if u == 0 {
            return Some(SquareRoots::Zero);
        }
        if self.pow(u, self.half) != 1 {
            return None;
        }
        let r = if p % 4 == 3 {
            self.pow(u, (p + 1) / 4)
        } else {
            let s = (p - 1).trailing_zeros();
            let q = (p - 1) >> s;
            let z = (2..p)
                .find(|&z| self.pow(z, self.half) == p - 1)
                .expect("a nonresidue exists for odd p");
            let mut m = s;
            let mut c = self.pow(z, q);
            let mut t = self.pow(u, q);
            let mut r = self.pow(u, q.div_ceil(2));
            while t != 1 {
                let mut i = 0;
                let mut t2 = t;
                while t2 != 1 {
                    t2 = self.mul(t2, t2);
                    i += 1;
                }
                let b = self.pow(c, 1 << (m - i - 1));
                m = i;
                c = self.mul(b, b);
                t = self.mul(t, c);
                r = self.mul(r, b);
            }
            r
        };
        let other = p - r;
        Some(SquareRoots::Pair(r.min(other), r.max(other)))
    }
}

/// Inclusive range of integers to scan for primes. `lo > hi` is allowed and
/// yields nothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeRange {
    lo: u64,
    hi: u64,
}

impl PrimeRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if hi >= MODULUS_LIMIT {
            return Err(Error::OutOfRange {
                value: hi,
                limit: MODULUS_LIMIT,
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn single(p: u64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn primes(&self) -> Primes {
        Primes::new(*self)
    }

    /// Odd primes of the range as ready-made moduli.
    pub fn moduli(&self) -> impl Iterator<Item = PrimeModulus> {
        self.primes()
            .filter(|&p| p > 2)
            .map(PrimeModulus::new_unchecked)
    }

    /// Splits into at most `parts` disjoint, contiguous, ascending pieces.
    pub fn split(&self, parts: usize) -> Vec<PrimeRange> {
        if self.is_empty() {
            return Vec::new();
        }
        let parts = parts.max(1) as u64;
        let len = self.hi - self.lo + 1;
        let step = len.div_ceil(parts).max(1);
        let mut out = Vec::new();
        let mut lo = self.lo;
        loop {
            let hi = lo.saturating_add(step - 1).min(self.hi);
            out.push(PrimeRange { lo, hi });
            if hi == self.hi {
                break;
            }
            lo = hi + 1;
        }
        out
    }
}

impl FromStr for PrimeRange {
    type Err = Error;

    /// Parses `lo:hi`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidRange(format!("expected lo:hi, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::InvalidRange(format!("{t:?}: {e}")))
        };
        Self::new(parse(lo)?, parse(hi)?)
    }
}

impl IntoIterator for PrimeRange {
    type Item = u64;
    type IntoIter = Primes;

    fn into_iter(self) -> Primes {
        Primes::new(self)
    }
}

/// Ascending primes of `range`, generated segment by segment.
pub fn primes_in(range: PrimeRange) -> Primes {
    Primes::new(range)
}

/// Stream of primes produced by a segmented sieve of Eratosthenes, using
/// memory proportional to `sqrt(hi)` plus one segment.
#[derive(Debug)]
pub struct Primes {
    next: u64,
    hi: u64,
    done: bool,
    // None when sqrt(hi) is too large to sieve; candidates are then tested
    // individually.
    base: Option<Vec<u64>>,
    buf: Vec<u64>,
    pos: usize,
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

impl Primes {
    fn new(range: PrimeRange) -> Self {
        let lo = range.lo.max(2);
        let done = lo > range.hi;
        let root = range.hi.isqrt();
        let base = (!done && root <= SIEVE_SQRT_LIMIT).then(|| simple_sieve(root));
        Self {
            next: lo,
            hi: range.hi,
            done,
            base,
            buf: Vec::new(),
            pos: 0,
        }
    }

    fn fill(&mut self) {
        self.buf.clear();
        self.pos = 0;
        let start = self.next;
        let end = start.saturating_add(SEGMENT_LEN - 1).min(self.hi);
        match &self.base {
            Some(base) => {
                let len = (end - start + 1) as usize;
                let mut composite = vec![false; len];
                for &q in base {
                    if q * q > end {
                        break;
                    }
                    let first = (q * q).max(start.div_ceil(q) * q);
                    let mut j = first;
                    while j <= end {
                        composite[(j - start) as usize] = true;
                        j += q;
                    }
                }
                self.buf.extend(
                    composite
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| !c)
                        .map(|(i, _)| start + i as u64),
                );
            }
            None => self.buf.extend((start..=end).filter(|&n| miller_rabin(n))),
        }
        if end == self.hi {
            self.done = true;
        } else {
            self.next = end + 1;
        }
    }
}

impl Iterator for Primes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if let Some(&p) = self.buf.get(self.pos) {
                self.pos += 1;
                return Some(p);
            }
            if self.done {
                return None;
            }
            self.fill();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(2).unwrap());
        assert!(is_prime(10559).unwrap());
        assert!(!is_prime(561).unwrap());
        assert!(!is_prime(0).unwrap());
        assert!(!is_prime(1).unwrap());
        assert!(is_prime(MODULUS_LIMIT).is_err());
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n).unwrap(), trial_division(n), "n = {n}");
        }
        // Strong pseudoprimes to several small bases.
        for n in [
            2047,
            1373653,
            25326001,
            3215031751,
            2152302898747,
            3474749660383,
        ] {
            assert!(!is_prime(n).unwrap(), "{n}");
        }
        assert!(is_prime((1 << 61) - 1).unwrap());
        assert!(!is_prime((1 << 61) + 1).unwrap());
    }

    #[test]
    fn prime_streams() {
        let small: Vec<u64> = primes_in(PrimeRange::new(2, 10).unwrap()).collect();
        assert_eq!(small, vec![2, 3, 5, 7]);
        let hundred = PrimeRange::new(2, 100).unwrap().primes().count();
        assert_eq!(hundred, (2..=100).filter(|&n| trial_division(n)).count());
        assert_eq!(hundred, 25);
        let window: Vec<u64> = PrimeRange::new(1_000_000, 1_000_100)
            .unwrap()
            .primes()
            .collect();
        assert!(window.contains(&1_000_003));
        assert!(window.iter().all(|&p| trial_division(p)));
        assert_eq!(PrimeRange::new(10, 2).unwrap().primes().count(), 0);
        assert_eq!(PrimeRange::new(0, 1).unwrap().primes().count(), 0);
    }

    #[test]
    fn stream_crosses_segment_boundaries() {
        let lo = SEGMENT_LEN - 50;
        let hi = 2 * SEGMENT_LEN + 50;
        let sieved: Vec<u64> = PrimeRange::new(lo, hi).unwrap().primes().collect();
        let tested: Vec<u64> = (lo..=hi).filter(|&n| miller_rabin(n)).collect();
        assert_eq!(sieved, tested);
    }

    #[test]
    fn large_sparse_range_falls_back_to_testing() {
        let lo = (1 << 61) - 200;
        let hi = (1 << 61) - 1;
        let found: Vec<u64> = PrimeRange::new(lo, hi).unwrap().primes().collect();
        assert_eq!(found.last(), Some(&((1 << 61) - 1)));
    }

    #[test]
    fn split_is_a_partition() {
        let r = PrimeRange::new(3, 1000).unwrap();
        let pieces = r.split(7);
        assert_eq!(pieces.first().unwrap().lo(), 3);
        assert_eq!(pieces.last().unwrap().hi(), 1000);
        for w in pieces.windows(2) {
            assert_eq!(w[0].hi() + 1, w[1].lo());
        }
        let joined: Vec<u64> = pieces.iter().flat_map(|p| p.primes()).collect();
        assert_eq!(joined, r.primes().collect::<Vec<_>>());
        assert_eq!(PrimeRange::new(5, 5).unwrap().split(4).len(), 1);
    }

    #[test]
    fn range_parsing() {
        let r: PrimeRange = "3:100".parse().unwrap();
        assert_eq!((r.lo(), r.hi()), (3, 100));
        assert!("3-100".parse::<PrimeRange>().is_err());
        assert!("a:4".parse::<PrimeRange>().is_err());
    }

    #[test]
    fn modulus_validation() {
        assert_eq!(PrimeModulus::new(4), Err(Error::NotOddPrime(4)));
        assert_eq!(PrimeModulus::new(2), Err(Error::NotOddPrime(2)));
        assert!(PrimeModulus::new(1 << 62).is_err());
        assert_eq!(m(13).half(), 6);
        assert_eq!(m(7).reduce(-1), 6);
    }

    #[test]
    fn pow_examples() {
        assert_eq!(m(7).pow(3, 3), 6);
        assert_eq!(m(7).pow(3, 3), 27 % 7);
        assert_eq!(m(11).pow(5, 0), 1);
        // wide operands near the limit
        let big = m((1 << 61) - 1);
        assert_eq!(big.pow(3, big.p() - 1), 1);
    }

    #[test]
    fn fermat_exhaustive() {
        for p in PrimeRange::new(3, 2000).unwrap().moduli() {
            for b in 1..p.p() {
                assert_eq!(p.pow(b, p.p() - 1), 1);
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(m(7).inv(1).unwrap(), 1);
        assert_eq!(m(7).inv(3).unwrap(), 5);
        assert_eq!(m(11).inv(2).unwrap(), 6);
        assert_eq!(m(11).inv(22), Err(Error::ZeroArgument { p: 11 }));
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(m(7).primitive_root(), 3);
        assert_eq!(m(11).primitive_root(), 2);
        assert_eq!(m(3).primitive_root(), 2);
        for p in PrimeRange::new(3, 2000).unwrap().moduli() {
            let g = p.primitive_root();
            assert_eq!(p.pow(g, p.half()), p.p() - 1);
            // brute-force order check
            let mut x = 1;
            let mut order = 0;
            loop {
                x = p.mul(x, g);
                order += 1;
                if x == 1 {
                    break;
                }
            }
            assert_eq!(order, p.p() - 1);
            assert!((2..g).all(|h| (1..p.p() - 1).any(|e| p.pow(h, e) == 1)));
        }
    }

    #[test]
    fn primitive_root_of_large_prime() {
        let p = m(4_611_686_018_427_387_847); // largest prime below 2^62
        let g = p.primitive_root();
        for q in distinct_prime_factors(p.p() - 1) {
            assert_ne!(p.pow(g, (p.p() - 1) / q), 1);
        }
    }

    #[test]
    fn factorization() {
        assert_eq!(distinct_prime_factors(360), vec![2, 3, 5]);
        assert_eq!(distinct_prime_factors(1), Vec::<u64>::new());
        let n = 1_000_003u64 * 998_244_353;
        assert_eq!(distinct_prime_factors(n), vec![1_000_003, 998_244_353]);
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(m(7).sqrt(2), Some(SquareRoots::Pair(3, 4)));
        assert_eq!(m(7).sqrt(0), Some(SquareRoots::Zero));
        assert_eq!(m(7).sqrt(3), None);
        // p = 1 mod 8 exercises the full Tonelli-Shanks loop
        assert_eq!(m(17).sqrt(2), Some(SquareRoots::Pair(6, 11)));
    }

    #[test]
    fn sqrt_exhaustive() {
        for p in PrimeRange::new(3, 2000).unwrap().moduli() {
            let mut residues = 0;
            for u in 1..p.p() {
                let euler = p.pow(u, p.half());
                match p.sqrt(u) {
                    Some(SquareRoots::Pair(r, s)) => {
                        assert_eq!(p.mul(r, r), u);
                        assert_eq!(p.mul(s, s), u);
                        assert_eq!(r + s, p.p());
                        assert!(r < s);
                        assert_eq!(euler, 1);
                        residues += 1;
                    }
                    Some(SquareRoots::Zero) => unreachable!(),
                    None => assert_eq!(euler, p.p() - 1),
                }
            }
            assert_eq!(residues, p.half());
        }
    }
}
