//! Indefinite binary quadratic forms: reduction, cycles, class numbers and
//! principality of ideals.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{units, QFElem, QFIdeal, QuadField};

/// `A x^2 + B xy + C y^2` of discriminant `B^2 - 4AC`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndefiniteForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

/// 2x2 integer matrix, row-major.
type Mat = [BigInt; 4];

fn mat_mul(x: &Mat, y: &Mat) -> Mat {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

impl IndefiniteForm {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        IndefiniteForm { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c).is_one()
    }

    pub fn is_reduced(&self) -> bool {
        let s = self.discriminant().sqrt();
        let a2 = self.a.abs() * 2;
        self.b.is_positive() && self.b <= s && s < &a2 + &self.b && &a2 - &self.b <= s
    }

    /// One reduction step, with the substitution matrix `[[0, -1], [1, s]]`.
    fn rho_step(&self, sqrt_d: &BigInt) -> (IndefiniteForm, BigInt) {
        let d = self.discriminant();
        let c_abs = self.c.abs();
        let two_c = &c_abs * 2;
        let b_new = if c_abs > *sqrt_d {
            // -|c| < b' <= |c|
            let r = (-&self.b).mod_floor(&two_c);
            if r > c_abs {
                r - &two_c
            } else {
                r
            }
        } else {
            // largest b' = -b (mod 2|c|) with b' <= sqrt(D)
            sqrt_d - (sqrt_d + &self.b).mod_floor(&two_c)
        };
        let s = (&self.b + &b_new).div_floor(&(&self.c * 2));
        let c_new = (&b_new * &b_new - d) / (&self.c * 4);
        (IndefiniteForm { a: self.c.clone(), b: b_new, c: c_new }, s)
    }

    /// Apply reduction steps until reduced.
    pub fn reduce(&self) -> IndefiniteForm {
        let s = self.discriminant().sqrt();
        let mut f = self.clone();
        while !f.is_reduced() {
            f = f.rho_step(&s).0;
        }
        f
    }

    /// The reduced cycle containing `self` (which must be reduced).
    pub fn cycle(&self) -> Vec<IndefiniteForm> {
        let s = self.discriminant().sqrt();
        let mut out = vec![self.clone()];
        let mut f = self.rho_step(&s).0;
        while f != *self {
            out.push(f.clone());
            f = f.rho_step(&s).0;
        }
        out
    }
}

impl fmt::Display for IndefiniteForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// All primitive reduced forms of discriminant `d`.
pub fn reduced_forms(d: i64) -> Vec<IndefiniteForm> {
    let s = (d as f64).sqrt() as i64;
    let s = (s - 1..=s + 1).filter(|x| x * x <= d).max().unwrap();
    let mut out = Vec::new();
    for b in 1..=s {
        if (b - d).rem_euclid(2) != 0 {
            continue;
        }
        let num = b * b - d;
        for a_abs in 1..=(s + b) / 2 {
            if 2 * a_abs <= s - b || num % (4 * a_abs) != 0 {
                continue;
            }
            for a in [a_abs, -a_abs] {
                let f = IndefiniteForm::new(a, b, num / (4 * a));
                if f.is_primitive() {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// `(h, h_plus)`. The number of reduced cycles counts narrow classes.
pub fn class_numbers(field: &QuadField) -> (u64, u64) {
    let forms = reduced_forms(field.discriminant());
    let mut seen: HashSet<IndefiniteForm> = HashSet::new();
    let mut cycles = 0u64;
    for f in &forms {
        if seen.contains(f) {
            continue;
        }
        cycles += 1;
        seen.extend(f.cycle());
    }
    let eps = units::fundamental_unit(field);
    if eps.norm().is_negative() {
        (cycles, cycles)
    } else {
        (cycles / 2, cycles)
    }
}

/// A generator of `ideal` in canonical form, if the ideal is principal.
pub fn is_principal(ideal: &QFIdeal) -> Option<QFElem> {
    let field = ideal.field();
    let (a, _, c) = ideal.presentation();
    let beta = ideal.basis_elem();
    let f0 = IndefiniteForm::new(a.clone(), beta.trace(), beta.norm() / a);
    let sqrt_d = f0.discriminant().sqrt();

    let mut t: Mat = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()];
    let mut f = f0;
    let mut start: Option<IndefiniteForm> = None;
    loop {
        if f.a.abs().is_one() {
            let gamma = &field.int(&t[0] * a) + &beta.scale(&t[2]);
            debug_assert_eq!(gamma.norm().abs(), *a);
            let gen = gamma.scale(c);
            debug_assert_eq!(QFIdeal::principal(&gen).ok().as_ref(), Some(ideal));
            return Some(canonical_associate(&gen));
        }
        if f.is_reduced() {
            match &start {
                None => start = Some(f.clone()),
                Some(s) if *s == f => return None,
                _ => {}
            }
        }
        let (next, s) = f.rho_step(&sqrt_d);
        let m: Mat = [BigInt::zero(), BigInt::from(-1), BigInt::one(), s];
        t = mat_mul(&t, &m);
        f = next;
    }
}

fn log_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return num_traits::ToPrimitive::to_f64(&x.abs()).unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    num_traits::ToPrimitive::to_f64(&top).unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logs of `|sigma_1(g)|` and `|sigma_2(g)|`, computed without
/// cancellation.
fn log_embeddings(g: &QFElem) -> (f64, f64) {
    let m = g.field().radicand() as f64;
    let (x, y) = g.coords();
    let big = {
        let lx = if x.is_zero() { f64::NEG_INFINITY } else { log_abs(x) };
        let ly = if y.is_zero() { f64::NEG_INFINITY } else { log_abs(y) + 0.5 * m.ln() };
        let hi = lx.max(ly);
        let lo = lx.min(ly);
        hi + (1.0 + (lo - hi).exp()).ln() - std::f64::consts::LN_2
    };
    let small = log_abs(&g.norm()) - big;
    let first_is_big = (x.is_negative() == y.is_negative()) || x.is_zero() || y.is_zero();
    if first_is_big {
        (big, small)
    } else {
        (small, big)
    }
}

/// The associate `u*g` (`u = +-eps^k`) with positive first embedding and the
/// least `|trace|`; ties broken by `|y|`, then nonnegative trace, then
/// nonnegative `y`.
pub(crate) fn canonical_associate(g: &QFElem) -> QFElem {
    let field = g.field();
    let eps = units::fundamental_unit(&field);
    let eps_inv = eps.conj().scale(&eps.norm());
    let log_eps = log_embeddings(&eps).0;
    let (l1, l2) = log_embeddings(g);
    let k0 = ((l2 - l1) / (2.0 * log_eps)).round() as i64;

    let step = |x: &QFElem, k: i64| -> QFElem {
        let mut r = x.clone();
        if k >= 0 {
            for _ in 0..k {
                r = &r * &eps;
            }
        } else {
            for _ in 0..(-k) {
                r = &r * &eps_inv;
            }
        }
        r
    };
    let mut best: Option<(BigInt, BigInt, bool, bool, QFElem)> = None;
    let mut cur = step(g, k0 - 6);
    for _ in 0..13 {
        let cand = if cur.sign_at(true) > 0 { cur.clone() } else { -&cur };
        let (x, y) = cand.coords();
        let key = (x.abs(), y.abs(), x.is_negative(), y.is_negative(), cand.clone());
        let better = match &best {
            None => true,
            Some(b) => (&key.0, &key.1, key.2, key.3) < (&b.0, &b.1, b.2, b.3),
        };
        if better {
            best = Some(key);
        }
        cur = &cur * &eps;
    }
    best.unwrap().4
}
