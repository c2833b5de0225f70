//! `verify`: every exact identity, checked for all primes up to a bound.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use residue_lab::census::{census_for_prime, PatternCounter, SymbolPattern};
use residue_lab::charsum::{partial_sum_profile, pv_check_profile, qr_sum};
use residue_lab::expsums::{
    fourier_fixed_point_residual, gauss_sum, quad_poly_char_sum, quad_poly_closed_form,
    twisted_gauss_closed_form, twisted_gauss_sum, ComplexValue, Eta, FOURIER_P_CAP,
};
use residue_lab::report::{Cell, Row};
use residue_lab::symbol::{char_qnr, char_qnr_expsum, char_qr, char_qr_expsum, jacobi};
use residue_lab::{euler_criterion, legendre, PrimeModulus, PrimeRange, SquareRoots, Symbol};

use crate::{verdict, Failure, Outcome, Output};

pub const VERIFY_BOUND_CAP: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    Symbol,
    Sqrt,
    Gauss,
    Twisted,
    Fourier,
    Quadpoly,
    Twin,
    Charqr,
    Qrsum,
    Partition,
    Peralta,
    Profile,
}

impl Identity {
    fn name(self) -> &'static str {
        match self {
            Identity::Symbol => "symbol",
            Identity::Sqrt => "sqrt",
            Identity::Gauss => "gauss",
            Identity::Twisted => "twisted",
            Identity::Fourier => "fourier",
            Identity::Quadpoly => "quadpoly",
            Identity::Twin => "twin",
            Identity::Charqr => "charqr",
            Identity::Qrsum => "qrsum",
            Identity::Partition => "partition",
            Identity::Peralta => "peralta",
            Identity::Profile => "profile",
        }
    }

    /// Some identities are quadratic per prime and get a smaller bound.
    fn cap(self) -> u64 {
        match self {
            Identity::Charqr => 200,
            Identity::Fourier => FOURIER_P_CAP,
            _ => VERIFY_BOUND_CAP,
        }
    }
}

#[derive(Debug, Default, Clone)]
struct Tally {
    cases: u64,
    failures: u64,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.failures += other.failures;
        self.first = self.first.or(other.first);
        self
    }
}

struct VerifyRow {
    identity: Identity,
    bound: u64,
    tally: Tally,
}

impl Row for VerifyRow {
    const COLUMNS: &'static [&'static str] = &["identity", "bound", "cases", "failures", "status"];

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::text(self.identity.name()),
            self.bound.into(),
            self.tally.cases.into(),
            self.tally.failures.into(),
            Cell::text(if self.tally.failures == 0 {
                "pass"
            } else {
                "FAIL"
            }),
        ]
    }
}

fn rng_for(seed: u64, id: Identity, p: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p.wrapping_mul(31).wrapping_add(id as u64));
    rng
}

fn close(a: ComplexValue, b: ComplexValue, tol: f64) -> bool {
    (a - b).norm() < tol
}

fn check_prime(id: Identity, m: &PrimeModulus, seed: u64) -> Tally {
    let p = m.p();
    let mut t = Tally::default();
    let mut rng = rng_for(seed, id, p);
    let sqrt_p = (p as f64).sqrt();
    match id {
        Identity::Symbol => {
            for u in 0..p as i64 {
                let e = euler_criterion(u, m);
                t.check(e == Ok(legendre(u, m)), || format!("p={p} u={u}"));
            }
            for _ in 0..16 {
                let (a, b) = (rng.gen_range(0..p), rng.gen_range(0..p));
                let lhs = legendre(m.mul(a, b) as i64, m);
                t.check(lhs == legendre(a as i64, m) * legendre(b as i64, m), || {
                    format!("multiplicativity p={p} a={a} b={b}")
                });
            }
            let sign = |e: u64| if e % 2 == 0 { 1 } else { -1 };
            t.check(legendre(-1, m).value() == sign((p - 1) / 2), || {
                format!("(-1|{p})")
            });
            t.check(legendre(2, m).value() == sign((p * p - 1) / 8), || {
                format!("(2|{p})")
            });
            if p <= 500 {
                for q in PrimeRange::new(3, p - 1).expect("small").primes() {
                    let lhs = jacobi(p, q) * jacobi(q, p);
                    t.check(lhs == sign((p - 1) / 2 * ((q - 1) / 2)), || {
                        format!("reciprocity p={p} q={q}")
                    });
                }
            }
        }
        Identity::Sqrt => {
            for u in 0..p {
                let ok = match (m.sqrt(u), legendre(u as i64, m)) {
                    (Some(SquareRoots::Zero), Symbol::Zero) => true,
                    (Some(SquareRoots::Pair(r, s)), Symbol::Residue) => {
                        m.mul(r, r) == u && s == p - r
                    }
                    (None, Symbol::NonResidue) => true,
                    _ => false,
                };
                t.check(ok, || format!("p={p} u={u}"));
            }
        }
        Identity::Gauss => match gauss_sum(m) {
            Ok(g) => t.check(close(g, Eta::of(m).value() * sqrt_p, 1e-6 * sqrt_p), || {
                format!("p={p} G={g}")
            }),
            Err(e) => t.check(false, || e.to_string()),
        },
        Identity::Twisted => {
            for _ in 0..3 {
                let s = rng.gen_range(1..p);
                let ok = match (twisted_gauss_sum(m, s), twisted_gauss_closed_form(m, s)) {
                    (Ok(a), Ok(b)) => close(a, b, 1e-6 * sqrt_p),
                    _ => false,
                };
                t.check(ok, || format!("p={p} s={s}"));
            }
        }
        Identity::Fourier => {
            let mut ss = vec![0, 1];
            ss.extend((0..3).map(|_| rng.gen_range(0..p)));
            for s in ss {
                let r = fourier_fixed_point_residual(m, s);
                t.check(matches!(r, Ok(r) if r < 1e-6), || {
                    format!("p={p} s={s} residual {r:?}")
                });
            }
        }
        Identity::Quadpoly => {
            let mut cases: Vec<(u64, u64, u64)> = (0..4)
                .map(|_| {
                    (
                        rng.gen_range(1..p),
                        rng.gen_range(0..p),
                        rng.gen_range(0..p),
                    )
                })
                .collect();
            // a (x + t)^2: zero discriminant
            let (a, x0) = (rng.gen_range(1..p), rng.gen_range(0..p));
            cases.push((a, m.mul(m.mul(2, a), x0), m.mul(a, m.mul(x0, x0))));
            for (a, b, c) in cases {
                let ok = quad_poly_char_sum(m, a, b, c) == quad_poly_closed_form(m, a, b, c);
                t.check(ok, || format!("p={p} ({a},{b},{c})"));
            }
        }
        Identity::Twin => {
            let c = PatternCounter::new(m).expect("census range");
            for a in 1..=20.min(p - 1) {
                for (e0, e1) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    let pat = SymbolPattern::new(vec![0, a as i64], vec![e0, e1]).expect("pattern");
                    let ok = c.twin_formula(a, e0, e1) == Ok(c.count(&pat));
                    t.check(ok, || format!("p={p} a={a} signs=({e0},{e1})"));
                }
            }
        }
        Identity::Charqr => {
            for u in 1..p as i64 {
                let ok = char_qr_expsum(u, m) == char_qr(u, m)
                    && char_qnr_expsum(u, m) == char_qnr(u, m);
                t.check(ok, || format!("p={p} u={u}"));
            }
        }
        Identity::Qrsum => {
            if p % 4 == 1 {
                let want = u128::from(p) * u128::from(p - 1) / 4;
                t.check(qr_sum(m) == Ok(want), || format!("p={p}"));
            }
        }
        Identity::Partition => {
            let c = PatternCounter::new(m).expect("census range");
            for k in 1..=6usize {
                let total: u64 = c.histogram(k).expect("k <= 6").iter().sum();
                t.check(total == p - (k as u64).min(p), || {
                    format!("p={p} k={k} total={total}")
                });
            }
        }
        Identity::Peralta => {
            for r in census_for_prime(m, 8).expect("k <= 8") {
                t.check(r.within_peralta(), || {
                    format!("p={p} pattern={} exact={}", r.pattern, r.exact)
                });
            }
        }
        Identity::Profile => {
            let pr = partial_sum_profile(m).expect("below profile cap");
            t.check(pr.values[p as usize - 1] == 0, || {
                format!("f(p-1) != 0 at p={p}")
            });
            t.check(
                pr.values.windows(2).all(|w| (w[1] - w[0]).abs() <= 1),
                || format!("step > 1 at p={p}"),
            );
            t.check(pv_check_profile(&pr).satisfied, || {
                format!("Polya-Vinogradov at p={p}")
            });
            if p <= 2000 {
                let c = PatternCounter::new(m).expect("census range");
                let longest = (1..=24)
                    .take_while(|&k| {
                        c.count(&SymbolPattern::all_residues(k).expect("k <= 24")) >= 1
                    })
                    .last()
                    .unwrap_or(0) as u64;
                t.check(pr.longest_inc_run == longest, || {
                    format!("run length at p={p}")
                });
            }
        }
    }
    t
}

fn check(id: Identity, bound: u64, seed: u64) -> Tally {
    let moduli: Vec<PrimeModulus> = PrimeRange::new(3, bound)
        .expect("bound checked")
        .moduli()
        .collect();
    moduli
        .par_iter()
        .map(|m| check_prime(id, m, seed))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge)
}

pub fn run(out: &Output, bound: u64, only: Option<Identity>, seed: u64) -> Outcome {
    if !(3..=VERIFY_BOUND_CAP).contains(&bound) {
        return Err(Failure::Usage(format!(
            "--bound must lie in 3..={VERIFY_BOUND_CAP}"
        )));
    }
    let ids: Vec<Identity> = match only {
        Some(id) => vec![id],
        None => Identity::value_variants().to_vec(),
    };
    let rows: Vec<VerifyRow> = ids
        .into_iter()
        .map(|id| {
            let bound = bound.min(id.cap());
            VerifyRow {
                identity: id,
                bound,
                tally: check(id, bound, seed),
            }
        })
        .collect();
    out.emit(&rows)?;
    let mut failures = 0;
    for r in &rows {
        if let Some(first) = &r.tally.first {
            eprintln!("{}: first failure {first}", r.identity.name());
        }
        failures += r.tally.failures;
    }
    Ok(verdict(failures))
}
