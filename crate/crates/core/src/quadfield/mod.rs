//! Exact arithmetic in real quadratic fields `Q(sqrt(m))`.
//!
//! Elements are stored in half-integer form `(x + y*sqrt(m))/2`. When
//! `m = 1 (mod 4)` the ring of integers forces `x = y (mod 2)`; otherwise both
//! coordinates are even. Every integral element has exactly one such
//! representation, so derived equality is value equality.

mod forms;
mod ideal;
mod units;

pub use forms::{class_numbers, is_principal, reduced_forms, IndefiniteForm};
pub use ideal::{element_ideal_gcd_norm, prime_with_label, primes_above, PrimeLabel, QFIdeal, ResidueRing};
pub use units::{
    fundamental_unit, mod4_square_solvable, ray_class_order, ray_trivial_generator, unit_order_mod, units_image_order,
};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith;
use crate::residue::{FFElem, ResidueError, ResidueField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadFieldError {
    #[error("{0} is not a square-free integer greater than 1")]
    BadRadicand(i64),
    #[error("coordinates ({x}, {y}) violate the integrality parity for m = {m}")]
    Parity { x: BigInt, y: BigInt, m: i64 },
    #[error("cannot parse element literal {0:?}")]
    Literal(String),
    #[error("cannot parse ideal literal {0:?}")]
    IdealLiteral(String),
    #[error("element is not invertible modulo the prime")]
    NonIntegralResidue,
    #[error("residue field of characteristic 2 and degree 2 is not modelled")]
    UnsupportedResidue,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("lattice is not an ideal of the ring of integers")]
    NotAnIdeal,
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

/// `Q(sqrt(m))` for square-free `m > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadField {
    m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl QuadField {
    pub fn new(m: i64) -> Result<Self, QuadFieldError> {
        if m <= 1 || !arith::is_squarefree(m as u64) {
            return Err(QuadFieldError::BadRadicand(m));
        }
        Ok(QuadField { m })
    }

    /// Field with the given fundamental discriminant.
    pub fn from_discriminant(d: i64) -> Result<Self, QuadFieldError> {
        if d <= 1 || !arith::is_fundamental_discriminant(d) {
            return Err(QuadFieldError::BadRadicand(d));
        }
        Self::new(arith::squarefree_part_of_disc(d))
    }

    pub fn radicand(&self) -> i64 {
        self.m
    }

    pub fn discriminant(&self) -> i64 {
        arith::fundamental_discriminant(self.m)
    }

    /// True when the integral basis is `(1, (1+sqrt(m))/2)`.
    pub fn half_basis(&self) -> bool {
        self.m.rem_euclid(4) == 1
    }

    /// `(t, n)` with `omega^2 = t*omega + n`.
    pub(crate) fn omega_relation(&self) -> (i64, i64) {
        if self.half_basis() {
            (1, (self.m - 1) / 4)
        } else {
            (0, self.m)
        }
    }

    pub fn elem(&self, x: impl Into<BigInt>, y: impl Into<BigInt>) -> Result<QFElem, QuadFieldError> {
        QFElem::new(*self, x.into(), y.into())
    }

    /// `a + b*sqrt(m)`.
    pub fn from_ints(&self, a: i64, b: i64) -> QFElem {
        QFElem { field: *self, x: BigInt::from(2 * a), y: BigInt::from(2 * b) }
    }

    pub fn int(&self, a: impl Into<BigInt>) -> QFElem {
        QFElem { field: *self, x: a.into() * 2, y: BigInt::zero() }
    }

    pub fn zero(&self) -> QFElem {
        self.int(0)
    }

    pub fn one(&self) -> QFElem {
        self.int(1)
    }

    pub fn sqrt_m(&self) -> QFElem {
        self.from_ints(0, 1)
    }

    pub fn omega(&self) -> QFElem {
        self.from_omega_coords(BigInt::zero(), BigInt::one())
    }

    /// `u + v*omega`.
    pub fn from_omega_coords(&self, u: BigInt, v: BigInt) -> QFElem {
        if self.half_basis() {
            QFElem { field: *self, x: u * 2 + &v, y: v }
        } else {
            QFElem { field: *self, x: u * 2, y: v * 2 }
        }
    }

    pub fn splitting_type(&self, p: u64) -> Splitting {
        let d = self.discriminant();
        if d.rem_euclid(p as i64) == 0 {
            return Splitting::Ramified;
        }
        match arith::kronecker_i64(d, p as i64) {
            1 => Splitting::Split,
            _ => Splitting::Inert,
        }
    }

    /// Parse an element literal: `(x+y*s)/2`, or the shorthand `a+b*s`.
    pub fn parse_elem(&self, text: &str) -> Result<QFElem, QuadFieldError> {
        let err = || QuadFieldError::Literal(text.to_string());
        let cleaned: String =
            text.chars().filter(|c| !c.is_whitespace()).map(|c| if c == '\u{2212}' { '-' } else { c }).collect();
        if cleaned.is_empty() {
            return Err(err());
        }
        if let Some(inner) = cleaned.strip_prefix('(').and_then(|r| r.strip_suffix(")/2")) {
            let (x, y) = parse_linear(inner).ok_or_else(err)?;
            return QFElem::new(*self, x, y);
        }
        let inner = cleaned.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(&cleaned);
        let (a, b) = parse_linear(inner).ok_or_else(err)?;
        QFElem::new(*self, a * 2, b * 2)
    }
}

/// Parses `a + b*s` style sums into `(a, b)`.
fn parse_linear(text: &str) -> Option<(BigInt, BigInt)> {
    let bytes = text.as_bytes();
    if bytes.is_empty() {
        return None;
    }
    let mut a = BigInt::zero();
    let mut b = BigInt::zero();
    let mut i = 0;
    let mut first = true;
    while i < bytes.len() {
        let mut neg = false;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            // "+-3" is accepted so that printed forms like (1+-3*s)/2 read back
            while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                if bytes[i] == b'-' {
                    neg = !neg;
                }
                i += 1;
            }
        } else if !first {
            return None;
        }
        first = false;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff: Option<BigInt> = if i > start { text[start..i].parse().ok() } else { None };
        let is_s = if i < bytes.len() && bytes[i] == b'*' {
            coeff.as_ref()?;
            i += 1;
            if i < bytes.len() && bytes[i] == b's' {
                i += 1;
                true
            } else {
                return None;
            }
        } else if i < bytes.len() && bytes[i] == b's' {
            if coeff.is_some() {
                return None;
            }
            i += 1;
            true
        } else {
            false
        };
        let mut value = match (coeff, is_s) {
            (Some(c), _) => c,
            (None, true) => BigInt::one(),
            (None, false) => return None,
        };
        if neg {
            value = -value;
        }
        if is_s {
            b += value;
        } else {
            a += value;
        }
    }
    Some((a, b))
}

/// Integral element `(x + y*sqrt(m))/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QFElem {
    field: QuadField,
    x: BigInt,
    y: BigInt,
}

impl QFElem {
    pub fn new(field: QuadField, x: BigInt, y: BigInt) -> Result<Self, QuadFieldError> {
        let ok = if field.half_basis() { (&x - &y).is_even() } else { x.is_even() && y.is_even() };
        if !ok {
            return Err(QuadFieldError::Parity { x, y, m: field.m });
        }
        Ok(QFElem { field, x, y })
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    /// Numerator coordinates `(x, y)` of `(x + y*sqrt(m))/2`.
    pub fn coords(&self) -> (&BigInt, &BigInt) {
        (&self.x, &self.y)
    }

    /// `(u, v)` with `self = u + v*omega`.
    pub fn omega_coords(&self) -> (BigInt, BigInt) {
        if self.field.half_basis() {
            ((&self.x - &self.y) / 2, self.y.clone())
        } else {
            (&self.x / 2, &self.y / 2)
        }
    }

    pub fn trace(&self) -> BigInt {
        self.x.clone()
    }

    pub fn norm(&self) -> BigInt {
        (&self.x * &self.x - &self.y * &self.y * self.field.m) / 4
    }

    pub fn conj(&self) -> QFElem {
        QFElem { field: self.field, x: self.x.clone(), y: -&self.y }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// The rational value when `y = 0`.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.y.is_zero() {
            Some(&self.x / 2)
        } else {
            None
        }
    }

    pub fn pow(&self, mut e: u64) -> QFElem {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact quotient `self / other` when it is integral.
    pub fn div_exact(&self, other: &QFElem) -> Option<QFElem> {
        let n = other.norm();
        if n.is_zero() {
            return None;
        }
        let num = self * &other.conj();
        // num / n, in half form: (X + Y sqrt m)/2 / n
        if !(&num.x % &n).is_zero() || !(&num.y % &n).is_zero() {
            return None;
        }
        QFElem::new(self.field, &num.x / &n, &num.y / &n).ok()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().abs().is_one()
    }

    /// Sign of the image under `sqrt(m) -> +sqrt(m)` (`first = true`) or
    /// `sqrt(m) -> -sqrt(m)`.
    pub fn sign_at(&self, first: bool) -> i8 {
        let y = if first { self.y.clone() } else { -&self.y };
        let xs = arith::sign_of(&self.x);
        let ys = arith::sign_of(&y);
        if ys == 0 {
            return xs;
        }
        if xs == 0 || xs == ys {
            return ys;
        }
        // opposite signs: compare x^2 with m*y^2
        let lhs = &self.x * &self.x;
        let rhs = &y * &y * self.field.m;
        if lhs > rhs {
            xs
        } else {
            ys
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign_at(true) > 0 && self.sign_at(false) > 0
    }

    /// Floating-point value of the first real embedding.
    pub fn to_f64(&self) -> f64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        (x + y * (self.field.m as f64).sqrt()) / 2.0
    }

    /// Multiply by a rational integer.
    pub fn scale(&self, k: &BigInt) -> QFElem {
        QFElem { field: self.field, x: &self.x * k, y: &self.y * k }
    }

    /// Image in the residue field `O/P` of a prime ideal `P`.
    pub fn residue_at(&self, prime: &QFIdeal) -> Result<FFElem, QuadFieldError> {
        residue_reduce(self, prime)
    }
}

/// Reduce an integral element modulo a prime ideal.
///
/// Split and ramified primes land in `F_p` through the root of `omega`'s
/// minimal polynomial carried by the ideal; inert primes land in the canonical
/// model of `F_{p^2}` with `sqrt(D)` sent to the canonical square root of `D`.
pub fn residue_reduce(x: &QFElem, prime: &QFIdeal) -> Result<FFElem, QuadFieldError> {
    let info = prime.prime_info().ok_or(QuadFieldError::NotAnIdeal)?;
    let p = info.p;
    let (u, v) = x.omega_coords();
    let pb = BigInt::from(p);
    let u = u.mod_floor(&pb).to_u64().unwrap();
    let v = v.mod_floor(&pb).to_u64().unwrap();
    match info.root {
        Some(r) => {
            let field = ResidueField::prime(p)?;
            Ok(field.from_u64(u).add(&field.from_u64(arith::mul_mod(v, r, p))))
        }
        None => {
            if p == 2 {
                return Err(QuadFieldError::UnsupportedResidue);
            }
            let field = ResidueField::quadratic(p)?;
            let inv2 = field.from_u64(arith::inv_mod(2, p).unwrap());
            let root_d = field.canonical_sqrt(x.field.discriminant().rem_euclid(p as i64) as u64);
            // sqrt(D) = sqrt(m) or 2*sqrt(m)
            let s = if x.field.half_basis() { root_d } else { root_d.mul(&inv2) };
            let (t, _) = x.field.omega_relation();
            // omega = (t + sqrt(m)) * (1/2) when half basis, else sqrt(m)
            let omega = if t == 1 { field.from_u64(1).add(&s).mul(&inv2) } else { s };
            Ok(field.from_u64(u).add(&omega.mul(&field.from_u64(v))))
        }
    }
}

impl fmt::Display for QFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_negative() {
            write!(f, "({}-{}*s)/2", self.x, -&self.y)
        } else {
            write!(f, "({}+{}*s)/2", self.x, self.y)
        }
    }
}

impl<'a> Add<&'a QFElem> for &'a QFElem {
    type Output = QFElem;
    fn add(self, rhs: &QFElem) -> QFElem {
        debug_assert_eq!(self.field, rhs.field);
        QFElem { field: self.field, x: &self.x + &rhs.x, y: &self.y + &rhs.y }
    }
}

impl<'a> Sub<&'a QFElem> for &'a QFElem {
    type Output = QFElem;
    fn sub(self, rhs: &QFElem) -> QFElem {
        debug_assert_eq!(self.field, rhs.field);
        QFElem { field: self.field, x: &self.x - &rhs.x, y: &self.y - &rhs.y }
    }
}

impl<'a> Mul<&'a QFElem> for &'a QFElem {
    type Output = QFElem;
    fn mul(self, rhs: &QFElem) -> QFElem {
        debug_assert_eq!(self.field, rhs.field);
        // ((x1 + y1 r)(x2 + y2 r))/4 = ((x1x2 + m y1y2)/2 + (x1y2 + x2y1)/2 r)/2
        let x = (&self.x * &rhs.x + &self.y * &rhs.y * self.field.m) / 2;
        let y = (&self.x * &rhs.y + &rhs.x * &self.y) / 2;
        QFElem { field: self.field, x, y }
    }
}

impl Neg for &QFElem {
    type Output = QFElem;
    fn neg(self) -> QFElem {
        QFElem { field: self.field, x: -&self.x, y: -&self.y }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<QFElem> for QFElem {
            type Output = QFElem;
            fn $method(self, rhs: QFElem) -> QFElem {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QFElem {
    type Output = QFElem;
    fn neg(self) -> QFElem {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q5() -> QuadField {
        QuadField::new(5).unwrap()
    }

    #[test]
    fn parity_is_enforced() {
        assert!(q5().elem(1, 1).is_ok());
        assert!(q5().elem(1, 2).is_err());
        let q6 = QuadField::new(6).unwrap();
        assert!(q6.elem(1, 1).is_err());
        assert!(q6.elem(2, -4).is_ok());
        assert!(QuadField::new(4).is_err());
        assert!(QuadField::new(1).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let f = q5();
        let e = f.parse_elem("(1+1*s)/2").unwrap();
        assert_eq!(e, f.elem(1, 1).unwrap());
        assert_eq!(f.parse_elem(&e.to_string()).unwrap(), e);
        assert_eq!(f.parse_elem("-4+s").unwrap(), f.from_ints(-4, 1));
        assert_eq!(f.parse_elem("2*s-1").unwrap(), f.from_ints(-1, 2));
        assert_eq!(f.parse_elem("(\u{2212}2+0*s)").unwrap(), f.int(-2));
        assert_eq!(f.parse_elem(" 30 ").unwrap(), f.int(30));
        assert_eq!(f.parse_elem("(1-3*s)/2").unwrap(), f.elem(1, -3).unwrap());
        assert!(f.parse_elem("(1+2*s)/2").is_err());
        assert!(f.parse_elem("1+*s").is_err());
        assert!(f.parse_elem("").is_err());
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(q5().splitting_type(11), Splitting::Split);
        assert_eq!(q5().splitting_type(5), Splitting::Ramified);
        assert_eq!(q5().splitting_type(2), Splitting::Inert);
        assert_eq!(q5().splitting_type(7), Splitting::Inert);
        let f257 = QuadField::new(257).unwrap();
        assert_eq!(f257.splitting_type(61), Splitting::Split);
        assert_eq!(f257.splitting_type(2), Splitting::Split);
    }

    #[test]
    fn splitting_agrees_with_root_counting() {
        for m in [2i64, 3, 5, 6, 7, 13, 257] {
            let f = QuadField::new(m).unwrap();
            let d = f.discriminant();
            for p in arith::primes_up_to(1000) {
                let roots = (0..p).filter(|&x| (x * x) as i64 % p as i64 == d.rem_euclid(p as i64)).count();
                let expected = if d.rem_euclid(p as i64) == 0 || (p == 2 && d % 4 == 0) {
                    Splitting::Ramified
                } else if p == 2 {
                    // x^2 - D has a double root mod 2; use D mod 8 instead
                    if d.rem_euclid(8) == 1 {
                        Splitting::Split
                    } else {
                        Splitting::Inert
                    }
                } else if roots == 2 {
                    Splitting::Split
                } else {
                    Splitting::Inert
                };
                assert_eq!(f.splitting_type(p), expected, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn fibonacci_norm_identity() {
        let f = q5();
        let eps = f.elem(1, 1).unwrap();
        // eps^8 = 21 eps + 13
        let e8 = eps.pow(8);
        assert_eq!(e8, &eps.scale(&BigInt::from(21)) + &f.int(13));
        assert_eq!((&e8 - &f.one()).norm(), BigInt::from(-45));
        for a in -15i64..15 {
            for b in -15i64..15 {
                let z = &eps.scale(&BigInt::from(a)) + &f.int(b);
                assert_eq!(z.norm(), BigInt::from(-a * a + a * b + b * b));
            }
        }
    }

    #[test]
    fn signs() {
        let f = q5();
        let g = f.from_ints(-4, 1);
        assert_eq!(g.sign_at(true), -1);
        assert_eq!(g.sign_at(false), -1);
        let eps = f.elem(1, 1).unwrap();
        assert_eq!(eps.sign_at(true), 1);
        assert_eq!(eps.sign_at(false), -1);
        assert!(f.from_ints(6, 1).is_totally_positive());
    }

    #[test]
    fn div_exact_works() {
        let f = q5();
        let a = f.from_ints(-4, 1);
        let b = f.from_ints(3, 7);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert!(f.int(3).div_exact(&f.int(2)).is_none());
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(
            m in prop::sample::select(vec![2i64, 3, 5, 6, 13, 257]),
            u1 in -1000i64..1000, v1 in -1000i64..1000,
            u2 in -1000i64..1000, v2 in -1000i64..1000,
        ) {
            let f = QuadField::new(m).unwrap();
            let a = f.from_omega_coords(BigInt::from(u1), BigInt::from(v1));
            let b = f.from_omega_coords(BigInt::from(u2), BigInt::from(v2));
            prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
        }

        #[test]
        fn literal_print_parse(u in -10_000i64..10_000, v in -10_000i64..10_000) {
            for m in [5i64, 6, 13] {
                let f = QuadField::new(m).unwrap();
                let e = f.from_omega_coords(BigInt::from(u), BigInt::from(v));
                prop_assert_eq!(f.parse_elem(&e.to_string()).unwrap(), e);
            }
        }
    }
}
