//! The quadratic symbol `(u|p)`, computed two independent ways, and the two
//! characteristic-function representations of the quadratic residues.

use std::ops::Mul;

use crate::error::{Error, Result};
use crate::expsums::{CompensatedSum, UnitRoots};
use crate::modcore::PrimeModulus;

/// Largest modulus accepted by the `Theta(p^2)` exponential-sum indicator.
pub const EXPSUM_P_CAP: u64 = 1000;

/// Value of the quadratic symbol. `Zero` is used only for `u = 0 (mod p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum Symbol {
    NonResidue = -1,
    Zero = 0,
    Residue = 1,
}

impl Symbol {
    #[inline]
    pub fn value(self) -> i8 {
        self as i8
    }

    #[inline]
    fn from_i8(v: i8) -> Self {
        match v {
            1 => Symbol::Residue,
            -1 => Symbol::NonResidue,
            _ => Symbol::Zero,
        }
    }
}

impl Mul for Symbol {
    type Output = Symbol;

    fn mul(self, rhs: Symbol) -> Symbol {
        Symbol::from_i8(self.value() * rhs.value())
    }
}

/// Jacobi symbol `(a|n)` for odd `n`, by the binary reciprocity algorithm.
pub fn jacobi(a: u64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a % n;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        // (2|n) = -1 exactly when n = 3, 5 (mod 8)
        if z & 1 == 1 && matches!(n % 8, 3 | 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// `(u|p)` by quadratic reciprocity. `u` may be any integer.
#[inline]
pub fn legendre(u: i64, m: &PrimeModulus) -> Symbol {
    legendre_u64(m.reduce(u), m)
}

/// [`legendre`] for a nonnegative argument.
#[inline]
pub fn legendre_u64(u: u64, m: &PrimeModulus) -> Symbol {
    Symbol::from_i8(jacobi(u, m.p()))
}

/// `(u|p)` from `u^((p-1)/2) mod p`.
pub fn euler_criterion(u: i64, m: &PrimeModulus) -> Result<Symbol> {
    let power = m.pow(m.reduce(u), m.half());
    match power {
        0 => Ok(Symbol::Zero),
        1 => Ok(Symbol::Residue),
        v if v == m.p() - 1 => Ok(Symbol::NonResidue),
        value => Err(Error::NotASign { value, p: m.p() }),
    }
}

fn nonzero(u: i64, m: &PrimeModulus) -> Result<u64> {
    match m.reduce(u) {
        0 => Err(Error::ZeroArgument { p: m.p() }),
        r => Ok(r),
    }
}

/// Indicator of the nonzero squares: `(1 + (u|p)) / 2`.
pub fn char_qr(u: i64, m: &PrimeModulus) -> Result<u8> {
    let r = nonzero(u, m)?;
    Ok(((1 + legendre_u64(r, m).value()) / 2) as u8)
}

/// Indicator of the nonresidues: `(1 - (u|p)) / 2`.
pub fn char_qnr(u: i64, m: &PrimeModulus) -> Result<u8> {
    let r = nonzero(u, m)?;
    Ok(((1 - legendre_u64(r, m).value()) / 2) as u8)
}

/// The raw double sum
/// `(1/p) sum_{0 <= n < (p-1)/2} sum_{0 <= j < p} e^{2 pi i (tau^(2n + parity) - u) j / p}`
/// where `tau` is the least primitive root. `parity = 0` enumerates the
/// residues, `parity = 1` the nonresidues.
pub fn power_class_expsum(u: i64, m: &PrimeModulus, parity: u64) -> Result<num_complex::Complex64> {
    let r = nonzero(u, m)?;
    if m.p() > EXPSUM_P_CAP {
        return Err(Error::CostCap {
            p: m.p(),
            cap: EXPSUM_P_CAP,
        });
    }
    let p = m.p();
    let roots = UnitRoots::new(p);
    let tau = m.primitive_root();
    let step = m.mul(tau, tau);
    let mut power = m.pow(tau, parity);
    let mut acc = CompensatedSum::new();
    for _ in 0..m.half() {
        let shift = m.sub(power, r);
        for j in 0..p {
            acc.add(roots.get(m.mul(shift, j)));
        }
        power = m.mul(power, step);
    }
    Ok(acc.value() / p as f64)
}

fn round_indicator(z: num_complex::Complex64) -> Result<u8> {
    let rounded = z.re.round();
    if z.im.abs() >= 1e-6 || (z.re - rounded).abs() >= 1e-6 || !(rounded == 0.0 || rounded == 1.0) {
        return Err(Error::Tolerance(format!("indicator sum evaluated to {z}")));
    }
    Ok(rounded as u8)
}

/// Residue indicator evaluated through the primitive-root exponential sum.
/// Must agree with [`char_qr`]; the cost is `Theta(p^2)`, so `p` is capped at
/// [`EXPSUM_P_CAP`].
pub fn char_qr_expsum(u: i64, m: &PrimeModulus) -> Result<u8> {
    round_indicator(power_class_expsum(u, m, 0)?)
}

/// Nonresidue indicator through the odd powers of the primitive root.
pub fn char_qnr_expsum(u: i64, m: &PrimeModulus) -> Result<u8> {
    round_indicator(power_class_expsum(u, m, 1)?)
}

/// All symbols `(u|p)` for `u in [0, p)`, built by marking the squares.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    values: Vec<i8>,
}

impl SymbolTable {
    pub fn new(m: &PrimeModulus) -> Self {
        let p = m.p();
        let mut values = vec![-1i8; p as usize];
        values[0] = 0;
        // x^2 for x = 1..half via the increments 2x - 1, no multiplication
        let mut sq = 0u64;
        for x in 1..=m.half() {
            sq += 2 * x - 1;
            if sq >= p {
                sq %= p;
            }
            values[sq as usize] = 1;
        }
        Self { values }
    }

    #[inline]
    pub fn get(&self, u: u64) -> i8 {
        self.values[(u % self.values.len() as u64) as usize]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modcore::PrimeRange;
    use proptest::prelude::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn squares(p: u64) -> Vec<u64> {
        let mut s: Vec<u64> = (1..p).map(|x| x * x % p).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(squares(7), vec![1, 2, 4]);
        assert_eq!(legendre(2, &m(7)), Symbol::Residue);
        assert_eq!(legendre(5, &m(7)), Symbol::NonResidue);
        assert_eq!(legendre(0, &m(7)), Symbol::Zero);
        assert_eq!(legendre(-7, &m(7)), Symbol::Zero);
        assert_eq!(legendre(-1, &m(7)), Symbol::NonResidue);
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_criterion(4, &m(7)).unwrap(), Symbol::Residue);
        assert_eq!(euler_criterion(3, &m(7)).unwrap(), Symbol::NonResidue);
        assert_eq!(euler_criterion(12, &m(13)).unwrap(), Symbol::Residue);
        assert_eq!(euler_criterion(0, &m(13)).unwrap(), Symbol::Zero);
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(char_qr(4, &m(7)).unwrap(), 1);
        assert_eq!(char_qr(3, &m(7)).unwrap(), 0);
        assert_eq!(char_qnr(3, &m(7)).unwrap(), 1);
        for p in [3, 5, 7, 101] {
            assert_eq!(char_qr(1, &m(p)).unwrap(), 1);
        }
        assert_eq!(char_qr(14, &m(7)), Err(Error::ZeroArgument { p: 7 }));
        assert_eq!(char_qnr(0, &m(7)), Err(Error::ZeroArgument { p: 7 }));
    }

    #[test]
    fn expsum_indicator_examples() {
        assert_eq!(char_qr_expsum(4, &m(7)).unwrap(), 1);
        assert_eq!(char_qr_expsum(3, &m(7)).unwrap(), 0);
        assert_eq!(m(11).primitive_root(), 2);
        assert_eq!(char_qr_expsum(4, &m(11)).unwrap(), 1);
        assert!(matches!(
            char_qr_expsum(1, &m(1009)),
            Err(Error::CostCap { .. })
        ));
        assert_eq!(char_qr_expsum(0, &m(7)), Err(Error::ZeroArgument { p: 7 }));
    }

    #[test]
    fn expsum_indicators_small_primes() {
        for q in PrimeRange::new(3, 60).unwrap().moduli() {
            for u in 1..q.p() as i64 {
                assert_eq!(char_qr_expsum(u, &q).unwrap(), char_qr(u, &q).unwrap());
                assert_eq!(char_qnr_expsum(u, &q).unwrap(), char_qnr(u, &q).unwrap());
            }
        }
    }

    #[test]
    fn jacobi_composite_moduli() {
        // (2|15) = (2|3)(2|5) = (-1)(-1)
        assert_eq!(jacobi(2, 15), 1);
        assert_eq!(jacobi(5, 15), 0);
        assert_eq!(jacobi(1, 1), 1);
    }

    #[test]
    fn legendre_agrees_with_euler_exhaustive() {
        for q in PrimeRange::new(3, 2000).unwrap().moduli() {
            let table = SymbolTable::new(&q);
            let mut total = 0i64;
            for u in 0..q.p() {
                let l = legendre_u64(u, &q);
                assert_eq!(l, euler_criterion(u as i64, &q).unwrap());
                assert_eq!(l.value(), table.get(u));
                total += i64::from(l.value());
            }
            assert_eq!(total, 0, "balance fails for p = {}", q.p());
        }
    }

    #[test]
    fn table_matches_enumerated_squares() {
        let q = m(31);
        let sq = squares(31);
        let t = SymbolTable::new(&q);
        for u in 1..31 {
            assert_eq!(t.get(u) == 1, sq.contains(&u));
        }
    }

    #[test]
    fn supplementary_laws() {
        for q in PrimeRange::new(3, 10_000).unwrap().moduli() {
            let p = q.p();
            let minus_one = if (p - 1) / 2 % 2 == 0 { 1 } else { -1 };
            let two = if (p * p - 1) / 8 % 2 == 0 { 1 } else { -1 };
            assert_eq!(legendre(-1, &q).value(), minus_one, "p = {p}");
            assert_eq!(legendre(2, &q).value(), two, "p = {p}");
        }
    }

    #[test]
    fn reciprocity() {
        let primes: Vec<PrimeModulus> = PrimeRange::new(3, 500).unwrap().moduli().collect();
        for p in &primes {
            for q in &primes {
                if p == q {
                    continue;
                }
                let lhs = legendre(q.p() as i64, p).value() * legendre(p.p() as i64, q).value();
                let rhs = if (p.p() - 1) * (q.p() - 1) / 4 % 2 == 0 {
                    1
                } else {
                    -1
                };
                assert_eq!(lhs, rhs, "p = {p}, q = {q}");
            }
        }
    }

    fn odd_prime() -> impl Strategy<Value = u64> {
        (3u64..1_000_000).prop_map(|n| {
            (n..)
                .find(|&c| crate::modcore::is_prime(c).unwrap())
                .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn multiplicative(p in odd_prime(), a in 1i64..1 << 40, b in 1i64..1 << 40) {
            let q = m(p);
            prop_assume!(a % p as i64 != 0 && b % p as i64 != 0);
            let ab = q.mul(q.reduce(a), q.reduce(b)) as i64;
            prop_assert_eq!(legendre(ab, &q), legendre(a, &q) * legendre(b, &q));
        }
    }

    proptest! {
        #[test]
        fn symbol_matches_euler_for_large_moduli(n in (1u64 << 40)..(1u64 << 62), u in any::<i64>()) {
            let p = (n..).find(|&c| crate::modcore::is_prime(c).unwrap()).unwrap();
            prop_assume!(p < crate::modcore::MODULUS_LIMIT);
            let q = m(p);
            prop_assert_eq!(legendre(u, &q), euler_criterion(u, &q).unwrap());
        }
    }
}
