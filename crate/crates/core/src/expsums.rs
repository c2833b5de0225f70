//! Complete quadratic exponential and character sums over `F_p`, evaluated
//! numerically and paired with their closed forms.
//!
//! Every phase `e^{2 pi i r / p}` is formed from a residue `r` that has
//! already been reduced exactly in integer arithmetic, so the angle never
//! sees a large `u^2`. Sums are accumulated with Neumaier compensation.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modcore::PrimeModulus;
use crate::symbol::{legendre, legendre_u64};

pub type ComplexValue = Complex64;

/// Largest modulus accepted by [`gauss_sum`] and [`twisted_gauss_sum`].
pub const GAUSS_P_CAP: u64 = 1_000_000;

/// Largest modulus accepted by [`fourier_fixed_point_residual`].
pub const FOURIER_P_CAP: u64 = 10_000;

/// The unit `eta_p`: `1` when `p = 1 (mod 4)`, `i` when `p = 3 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eta {
    One,
    I,
}

impl Eta {
    pub fn of(m: &PrimeModulus) -> Self {
        if m.p() % 4 == 1 {
            Eta::One
        } else {
            Eta::I
        }
    }

    pub fn value(self) -> ComplexValue {
        match self {
            Eta::One => Complex64::new(1.0, 0.0),
            Eta::I => Complex64::new(0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated accumulator for complex terms.
///
/// Partial accumulators may be combined with [`CompensatedSum::merge`] in any
/// order; the result agrees to within rounding of the final value.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: Neumaier,
    im: Neumaier,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: ComplexValue) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.re.add(other.re.sum);
        self.re.add(other.re.carry);
        self.im.add(other.im.sum);
        self.im.add(other.im.carry);
    }

    pub fn value(&self) -> ComplexValue {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl Extend<ComplexValue> for CompensatedSum {
    fn extend<T: IntoIterator<Item = ComplexValue>>(&mut self, iter: T) {
        for z in iter {
            self.add(z);
        }
    }
}

impl FromIterator<ComplexValue> for CompensatedSum {
    fn from_iter<T: IntoIterator<Item = ComplexValue>>(iter: T) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

/// `e^{2 pi i r / p}` for a residue `0 <= r < p`.
#[inline]
pub fn unit_root(r: u64, p: u64) -> ComplexValue {
    let (s, c) = (TAU * (r as f64 / p as f64)).sin_cos();
    Complex64::new(c, s)
}

/// Table of the `p`-th roots of unity, indexed by residue.
#[derive(Debug, Clone)]
pub struct UnitRoots {
    p: u64,
    table: Vec<ComplexValue>,
}

impl UnitRoots {
    pub fn new(p: u64) -> Self {
        Self {
            p,
            table: (0..p).map(|r| unit_root(r, p)).collect(),
        }
    }

    #[inline]
    pub fn get(&self, r: u64) -> ComplexValue {
        self.table[(r % self.p) as usize]
    }
}

fn check_cap(m: &PrimeModulus, cap: u64) -> Result<()> {
    if m.p() > cap {
        return Err(Error::CostCap { p: m.p(), cap });
    }
    Ok(())
}

/// `sum_{u in F_p} e^{2 pi i u^2 / p}` by direct summation.
pub fn gauss_sum(m: &PrimeModulus) -> Result<ComplexValue> {
    twisted_gauss_sum(m, 1)
}

/// `sum_{u in F_p} e^{2 pi i u^2 s / p}` for `s != 0` by direct summation.
pub fn twisted_gauss_sum(m: &PrimeModulus, s: u64) -> Result<ComplexValue> {
    check_cap(m, GAUSS_P_CAP)?;
    let s = s % m.p();
    if s == 0 {
        return Err(Error::ZeroArgument { p: m.p() });
    }
    let p = m.p();
    let sum: CompensatedSum = (0..p)
        .map(|u| unit_root(m.mul(m.mul(u, u), s), p))
        .collect();
    Ok(sum.value())
}

/// Closed form of the twisted sum: `(s^{-1} | p) * eta_p * sqrt(p)`.
pub fn twisted_gauss_closed_form(m: &PrimeModulus, s: u64) -> Result<ComplexValue> {
    let inv = m.inv(s)?;
    let sign = f64::from(legendre_u64(inv, m).value());
    Ok(Eta::of(m).value() * (sign * (m.p() as f64).sqrt()))
}

/// Distance between `(s | p)` and the normalised finite Fourier transform of
/// the quadratic character evaluated at `s`.
pub fn fourier_fixed_point_residual(m: &PrimeModulus, s: u64) -> Result<f64> {
    check_cap(m, FOURIER_P_CAP)?;
    let p = m.p();
    let s = s % p;
    let mut acc = CompensatedSum::new();
    for t in 1..p {
        let chi = f64::from(legendre_u64(t, m).value());
        acc.add(unit_root(m.mul(s, t), p) * chi);
    }
    let transform = acc.value() / (Eta::of(m).value() * (p as f64).sqrt());
    let expected = f64::from(legendre_u64(s, m).value());
    Ok((Complex64::new(expected, 0.0) - transform).norm())
}

/// `sum_x (a x^2 + b x + c | p)`, exactly.
pub fn quad_poly_char_sum(m: &PrimeModulus, a: u64, b: u64, c: u64) -> Result<i64> {
    let (a, b, c) = (a % m.p(), b % m.p(), c % m.p());
    if a == 0 {
        return Err(Error::ZeroArgument { p: m.p() });
    }
    Ok((0..m.p())
        .map(|x| {
            let v = m.add(m.mul(m.add(m.mul(a, x), b), x), c);
            i64::from(legendre_u64(v, m).value())
        })
        .sum())
}

/// `-(a|p)` when the discriminant is nonzero, `(a|p)(p - 1)` otherwise.
pub fn quad_poly_closed_form(m: &PrimeModulus, a: u64, b: u64, c: u64) -> Result<i64> {
    let a = a % m.p();
    if a == 0 {
        return Err(Error::ZeroArgument { p: m.p() });
    }
    let disc = m.sub(
        m.mul(b % m.p(), b % m.p()),
        m.mul(4 % m.p(), m.mul(a, c % m.p())),
    );
    let chi = i64::from(legendre(a as i64, m).value());
    Ok(if disc == 0 {
        chi * (m.p() as i64 - 1)
    } else {
        -chi
    })
}
