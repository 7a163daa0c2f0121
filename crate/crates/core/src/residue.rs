//! Residue fields `F_l` and `F_{l^2}`, reductions of coefficient-field values,
//! and the characteristic-polynomial tests used by the elimination steps.

use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::arith::{self, inv_mod, mul_mod, pow_mod};
use crate::quadfield::{prime_with_label, residue_reduce, PrimeLabel, QFElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResidueError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the quadratic extension of F_2 is not modelled")]
    Unsupported,
    #[error("determinant is zero")]
    ZeroDeterminant,
    #[error("{0} has no prime labelled {1} above it")]
    BadLabel(u64, PrimeLabel),
    #[error("value is not integral at the prime")]
    NonIntegralResidue,
}

/// `F_l` (`degree = 1`) or `F_l[t]/(t^2 - r)` with `r` the least non-residue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ResidueField {
    l: u64,
    degree: u8,
    r: u64,
}

/// `c0 + c1*t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FFElem {
    field: ResidueField,
    c0: u64,
    c1: u64,
}

/// Square root of `a` modulo the prime `p` (Tonelli-Shanks).
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

fn least_nonresidue(l: u64) -> u64 {
    (2..l).find(|&z| pow_mod(z, (l - 1) / 2, l) == l - 1).expect("odd prime has a non-residue")
}

impl ResidueField {
    pub fn prime(l: u64) -> Result<Self, ResidueError> {
        if !arith::is_prime_u64(l) {
            return Err(ResidueError::NotPrime(l));
        }
        Ok(ResidueField { l, degree: 1, r: 0 })
    }

    pub fn quadratic(l: u64) -> Result<Self, ResidueError> {
        if !arith::is_prime_u64(l) {
            return Err(ResidueError::NotPrime(l));
        }
        if l == 2 {
            return Err(ResidueError::Unsupported);
        }
        Ok(ResidueField { l, degree: 2, r: least_nonresidue(l) })
    }

    pub fn new(l: u64, degree: u8) -> Result<Self, ResidueError> {
        match degree {
            1 => Self::prime(l),
            2 => Self::quadratic(l),
            _ => Err(ResidueError::Unsupported),
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.l
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    /// The non-residue `r` with `t^2 = r` (degree 2 only).
    pub fn nonresidue(&self) -> Option<u64> {
        (self.degree == 2).then_some(self.r)
    }

    pub fn order(&self) -> u128 {
        (self.l as u128).pow(self.degree as u32)
    }

    pub fn zero(&self) -> FFElem {
        FFElem { field: *self, c0: 0, c1: 0 }
    }

    pub fn one(&self) -> FFElem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, u: u64) -> FFElem {
        FFElem { field: *self, c0: u % self.l, c1: 0 }
    }

    pub fn from_i64(&self, u: i64) -> FFElem {
        self.from_u64(u.rem_euclid(self.l as i64) as u64)
    }

    pub fn from_coords(&self, c0: u64, c1: u64) -> FFElem {
        let c1 = if self.degree == 1 { 0 } else { c1 % self.l };
        FFElem { field: *self, c0: c0 % self.l, c1 }
    }

    pub fn from_bigint(&self, x: &num_bigint::BigInt) -> FFElem {
        let l = num_bigint::BigInt::from(self.l);
        let r: u64 = num_traits::ToPrimitive::to_u64(&x.mod_floor(&l)).unwrap();
        self.from_u64(r)
    }

    /// The generator `t` of the quadratic model.
    pub fn t(&self) -> FFElem {
        self.from_coords(0, 1)
    }

    /// All elements, ordered by `(c1, c0)`.
    pub fn elements(&self) -> impl Iterator<Item = FFElem> + '_ {
        let l = self.l;
        let top = if self.degree == 1 { 1 } else { l };
        (0..top).flat_map(move |c1| (0..l).map(move |c0| self.from_coords(c0, c1)))
    }

    /// The lexicographically smaller square root of the integer `d` in this
    /// field (`d` must be a square here).
    pub fn canonical_sqrt(&self, d: u64) -> FFElem {
        let l = self.l;
        let d = d % l;
        if let Some(s) = sqrt_mod(d, l) {
            return self.from_u64(s.min((l - s) % l));
        }
        assert_eq!(self.degree, 2, "{d} has no square root in F_{l}");
        // d = y^2 r, root y t
        let y = sqrt_mod(mul_mod(d, inv_mod(self.r, l).unwrap(), l), l).unwrap();
        self.from_coords(0, y.min(l - y))
    }
}

impl fmt::Display for ResidueField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 1 {
            write!(f, "F_{}", self.l)
        } else {
            write!(f, "F_{}^2", self.l)
        }
    }
}

impl FFElem {
    pub fn field(&self) -> ResidueField {
        self.field
    }

    pub fn coords(&self) -> (u64, u64) {
        (self.c0, self.c1)
    }

    pub fn is_zero(&self) -> bool {
        self.c0 == 0 && self.c1 == 0
    }

    pub fn is_one(&self) -> bool {
        self.c0 == 1 % self.field.l && self.c1 == 0
    }

    pub fn in_prime_field(&self) -> bool {
        self.c1 == 0
    }

    pub fn add(&self, o: &FFElem) -> FFElem {
        debug_assert_eq!(self.field, o.field);
        let l = self.field.l;
        FFElem {
            field: self.field,
            c0: ((self.c0 as u128 + o.c0 as u128) % l as u128) as u64,
            c1: ((self.c1 as u128 + o.c1 as u128) % l as u128) as u64,
        }
    }

    pub fn neg(&self) -> FFElem {
        let l = self.field.l;
        FFElem { field: self.field, c0: (l - self.c0) % l, c1: (l - self.c1) % l }
    }

    pub fn sub(&self, o: &FFElem) -> FFElem {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &FFElem) -> FFElem {
        debug_assert_eq!(self.field, o.field);
        let l = self.field.l;
        if self.field.degree == 1 {
            return FFElem { field: self.field, c0: mul_mod(self.c0, o.c0, l), c1: 0 };
        }
        // (a + bt)(c + dt) = ac + r bd + (ad + bc) t
        let ac = mul_mod(self.c0, o.c0, l);
        let bd = mul_mod(mul_mod(self.c1, o.c1, l), self.field.r, l);
        let ad = mul_mod(self.c0, o.c1, l);
        let bc = mul_mod(self.c1, o.c0, l);
        FFElem {
            field: self.field,
            c0: ((ac as u128 + bd as u128) % l as u128) as u64,
            c1: ((ad as u128 + bc as u128) % l as u128) as u64,
        }
    }

    pub fn scale(&self, k: u64) -> FFElem {
        self.mul(&self.field.from_u64(k))
    }

    pub fn pow(&self, mut e: u128) -> FFElem {
        let mut base = *self;
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius conjugate `x^l`.
    pub fn conj(&self) -> FFElem {
        FFElem { field: self.field, c0: self.c0, c1: (self.field.l - self.c1) % self.field.l }
    }

    /// Norm to `F_l`.
    pub fn norm(&self) -> u64 {
        self.mul(&self.conj()).c0
    }

    pub fn inv(&self) -> Option<FFElem> {
        if self.is_zero() {
            return None;
        }
        let l = self.field.l;
        let n_inv = inv_mod(self.norm(), l)?;
        Some(self.conj().scale(n_inv))
    }

    pub fn div(&self, o: &FFElem) -> Option<FFElem> {
        Some(self.mul(&o.inv()?))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self) -> u128 {
        assert!(!self.is_zero());
        let q1 = self.field.order() - 1;
        let mut ord = q1;
        for (p, _) in arith::factor(&num_bigint::BigUint::from(q1)) {
            let p: u128 = num_traits::ToPrimitive::to_u128(&p).unwrap();
            while ord.is_multiple_of(p) && self.pow(ord / p).is_one() {
                ord /= p;
            }
        }
        ord
    }

    pub fn is_square(&self) -> bool {
        if self.is_zero() || self.field.l == 2 {
            return true;
        }
        self.pow((self.field.order() - 1) / 2).is_one()
    }

    /// A square root in the same field, if one exists.
    pub fn sqrt(&self) -> Option<FFElem> {
        if self.is_zero() {
            return Some(*self);
        }
        if self.field.degree == 1 {
            return sqrt_mod(self.c0, self.field.l).map(|s| self.field.from_u64(s));
        }
        if !self.is_square() {
            return None;
        }
        if self.c1 == 0 {
            return Some(self.field.canonical_sqrt(self.c0));
        }
        // (a + bt)^2 = x + yt: a^2 + r b^2 = x, 2ab = y; a^2 is a root of
        // z^2 - xz + r y^2/4 with z = a^2 a square in F_l
        let l = self.field.l;
        let x = self.c0;
        let n = self.norm();
        let sn = sqrt_mod(n, l)?;
        let inv2 = inv_mod(2, l).unwrap();
        for s in [sn, (l - sn) % l] {
            let z = mul_mod((x + s) % l, inv2, l);
            if let Some(a) = sqrt_mod(z, l) {
                if a == 0 {
                    continue;
                }
                let b = mul_mod(self.c1, inv_mod(mul_mod(2, a, l), l).unwrap(), l);
                let cand = self.field.from_coords(a, b);
                if cand.mul(&cand) == *self {
                    return Some(cand);
                }
            }
        }
        None
    }
}

impl fmt::Display for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree == 1 {
            write!(f, "{}", self.c0)
        } else {
            write!(f, "{}+{}*t mod {}", self.c0, self.c1, self.field.l)
        }
    }
}

/// Reduce an element of `E` at the prime above `l` with the given label.
pub fn reduce_at(alpha: &QFElem, l: u64, which: PrimeLabel) -> Result<FFElem, ResidueError> {
    if !arith::is_prime_u64(l) {
        return Err(ResidueError::NotPrime(l));
    }
    let prime = prime_with_label(l, which, &alpha.field()).ok_or(ResidueError::BadLabel(l, which))?;
    residue_reduce(alpha, &prime).map_err(|e| match e {
        crate::quadfield::QuadFieldError::Residue(r) => r,
        crate::quadfield::QuadFieldError::UnsupportedResidue => ResidueError::Unsupported,
        _ => ResidueError::NonIntegralResidue,
    })
}

/// Whether `x^2 - c x + d` is irreducible over the common field of `c` and `d`.
pub fn charpoly_irreducible(c: &FFElem, d: &FFElem) -> bool {
    let field = c.field();
    if field.characteristic() == 2 {
        return !field.elements().any(|x| x.mul(&x).sub(&c.mul(&x)).add(d).is_zero());
    }
    let disc = c.mul(c).sub(&d.scale(4));
    !disc.is_zero() && !disc.is_square()
}

/// Projective order of an element with characteristic polynomial
/// `x^2 - c x + d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProjectiveOrder {
    Exact(u128),
    /// Repeated eigenvalue: scalar (order 1) or unipotent times scalar
    /// (order `l`), which the polynomial cannot tell apart.
    OneOrL(u64),
}

impl ProjectiveOrder {
    /// The order when it is determined.
    pub fn exact(&self) -> Option<u128> {
        match self {
            ProjectiveOrder::Exact(n) => Some(*n),
            ProjectiveOrder::OneOrL(_) => None,
        }
    }
}

impl fmt::Display for ProjectiveOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectiveOrder::Exact(n) => write!(f, "{n}"),
            ProjectiveOrder::OneOrL(l) => write!(f, "1 or {l}"),
        }
    }
}

type Mat2 = [FFElem; 4];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        a[0].mul(&b[0]).add(&a[1].mul(&b[2])),
        a[0].mul(&b[1]).add(&a[1].mul(&b[3])),
        a[2].mul(&b[0]).add(&a[3].mul(&b[2])),
        a[2].mul(&b[1]).add(&a[3].mul(&b[3])),
    ]
}

fn mat_pow(m: &Mat2, mut e: u128) -> Mat2 {
    let f = m[0].field();
    let mut acc = [f.one(), f.zero(), f.zero(), f.one()];
    let mut base = *m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(&acc, &base);
        }
        base = mat_mul(&base, &base);
        e >>= 1;
    }
    acc
}

fn is_scalar(m: &Mat2) -> bool {
    m[1].is_zero() && m[2].is_zero() && m[0] == m[3]
}

/// Order of the ratio of the roots of `x^2 - c x + d`, i.e. the order of the
/// companion matrix in `PGL_2`.
pub fn projective_frobenius_order(c: &FFElem, d: &FFElem) -> Result<ProjectiveOrder, ResidueError> {
    if d.is_zero() {
        return Err(ResidueError::ZeroDeterminant);
    }
    let field = c.field();
    let disc = c.mul(c).sub(&d.scale(4));
    // in characteristic 2 the roots coincide exactly when c = 0
    let repeated = if field.characteristic() == 2 { c.is_zero() } else { disc.is_zero() };
    if repeated {
        return Ok(ProjectiveOrder::OneOrL(field.characteristic()));
    }
    let q = field.order();
    let bound = if field.characteristic() == 2 {
        // the order divides q - 1 or q + 1, hence (q - 1)(q + 1)
        (q - 1) * (q + 1)
    } else if disc.is_square() {
        q - 1
    } else {
        q + 1
    };
    let companion: Mat2 = [field.zero(), d.neg(), field.one(), *c];
    let mut ord = bound;
    for (p, _) in arith::factor(&num_bigint::BigUint::from(bound)) {
        let p: u128 = num_traits::ToPrimitive::to_u128(&p).unwrap();
        while ord % p == 0 && is_scalar(&mat_pow(&companion, ord / p)) {
            ord /= p;
        }
    }
    Ok(ProjectiveOrder::Exact(ord))
}

/// Units `r mod |D|` with `(D|r) = 1`: the classes of primes split in
/// `Q(sqrt(D))`.
pub fn split_congruence_classes(d: i64) -> Vec<u64> {
    let n = d.unsigned_abs();
    (1..n).filter(|&r| r.gcd(&n) == 1 && arith::kronecker_i64(d, r as i64) == 1).collect()
}

/// `+-1, +-5 (mod 24)` style rendering of a symmetric class list.
pub fn format_classes(classes: &[u64], modulus: u64) -> String {
    let mut parts = Vec::new();
    for &r in classes {
        let other = modulus - r;
        if classes.contains(&other) {
            if r <= other {
                parts.push(format!("\u{b1}{r}"));
            }
        } else {
            parts.push(r.to_string());
        }
    }
    format!("{} (mod {modulus})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{QuadField, Splitting};
    use proptest::prelude::*;

    fn small_fields(max_q: u128) -> Vec<ResidueField> {
        let mut out = Vec::new();
        for l in arith::primes_up_to(170) {
            out.push(ResidueField::prime(l).unwrap());
            if l > 2 && (l as u128) * (l as u128) <= max_q {
                out.push(ResidueField::quadratic(l).unwrap());
            }
        }
        out.retain(|f| f.order() <= max_q);
        out
    }

    #[test]
    fn tonelli_shanks() {
        for p in arith::primes_up_to(2000) {
            for a in 0..p.min(300) {
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a),
                    None => assert!((0..p).all(|x| mul_mod(x, x, p) != a)),
                }
            }
        }
        let p = (1u64 << 61) - 1;
        let r = sqrt_mod(4, p).unwrap();
        assert!(r == 2 || r == p - 2);
    }

    #[test]
    fn square_examples() {
        let f29 = ResidueField::prime(29).unwrap();
        assert!(!f29.from_u64(11).is_square());
        assert!(f29.zero().is_square());
        assert!(ResidueField::prime(11).unwrap().from_u64(5).is_square());
    }

    #[test]
    fn is_square_matches_table() {
        for f in small_fields(169) {
            let squares: std::collections::HashSet<FFElem> = f.elements().map(|x| x.mul(&x)).collect();
            for x in f.elements() {
                assert_eq!(x.is_square(), squares.contains(&x), "{f} {x}");
                if let Some(s) = x.sqrt() {
                    assert_eq!(s.mul(&s), x);
                } else {
                    assert!(!squares.contains(&x));
                }
            }
        }
    }

    #[test]
    fn field_axioms_and_inverses() {
        for f in small_fields(49) {
            for x in f.elements() {
                if !x.is_zero() {
                    assert!(x.mul(&x.pow(f.order() - 2)).is_one());
                    assert!(x.mul(&x.inv().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn charpoly_examples() {
        let f5 = ResidueField::prime(5).unwrap();
        assert!(charpoly_irreducible(&f5.from_u64(1), &f5.from_u64(1)));
        assert!(!charpoly_irreducible(&f5.from_u64(2), &f5.from_u64(1)));
        assert!(charpoly_irreducible(&f5.zero(), &f5.from_u64(2)));
    }

    #[test]
    fn charpoly_matches_root_search() {
        for f in small_fields(49) {
            for c in f.elements() {
                for d in f.elements() {
                    let has_root = f.elements().any(|x| x.mul(&x).sub(&c.mul(&x)).add(&d).is_zero());
                    assert_eq!(charpoly_irreducible(&c, &d), !has_root, "{f} c={c} d={d}");
                }
            }
        }
    }

    #[test]
    fn projective_order_examples() {
        let f5 = ResidueField::prime(5).unwrap();
        assert_eq!(projective_frobenius_order(&f5.zero(), &f5.from_u64(3)).unwrap(), ProjectiveOrder::Exact(2));
        assert_eq!(projective_frobenius_order(&f5.one(), &f5.one()).unwrap(), ProjectiveOrder::Exact(3));
        let f7 = ResidueField::prime(7).unwrap();
        assert_eq!(projective_frobenius_order(&f7.from_u64(2), &f7.one()).unwrap(), ProjectiveOrder::OneOrL(7));
        assert_eq!(projective_frobenius_order(&f7.one(), &f7.zero()), Err(ResidueError::ZeroDeterminant));
        // (1, 1) over F_5: roots in F_25, ratio a primitive cube root
        let f25 = ResidueField::quadratic(5).unwrap();
        let roots: Vec<FFElem> = f25.elements().filter(|x| x.mul(x).sub(x).add(&f25.one()).is_zero()).collect();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0].div(&roots[1]).unwrap().order(), 3);
    }

    #[test]
    fn projective_order_matches_companion_powers() {
        for f in small_fields(25) {
            let q = f.order();
            for c in f.elements() {
                for d in f.elements().filter(|d| !d.is_zero()) {
                    let got = projective_frobenius_order(&c, &d).unwrap();
                    let m: Mat2 = [f.zero(), d.neg(), f.one(), c];
                    let mut k = 1u128;
                    let mut p = m;
                    while !is_scalar(&p) {
                        p = mat_mul(&p, &m);
                        k += 1;
                    }
                    match got {
                        ProjectiveOrder::Exact(n) => {
                            assert_eq!(n, k, "{f} c={c} d={d}");
                            assert!((q - 1) % n == 0 || (q + 1) % n == 0);
                        }
                        ProjectiveOrder::OneOrL(l) => assert!(k == 1 || k == l as u128),
                    }
                }
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let e6 = QuadField::new(6).unwrap();
        let x = reduce_at(&e6.from_ints(0, -2), 7, PrimeLabel::Inert).unwrap();
        assert_eq!(x.coords().0, 0);
        assert_ne!(x.coords().1, 0);
        let e13 = QuadField::new(13).unwrap();
        let two = reduce_at(&e13.int(2), 61, PrimeLabel::A).unwrap();
        assert_eq!(two.coords(), (2, 0));
        let t = reduce_at(&e13.sqrt_m(), 61, PrimeLabel::A).unwrap();
        assert_eq!(mul_mod(t.coords().0, t.coords().0, 61), 13);
        let c = reduce_at(&e13.from_ints(-1, 1), 61, PrimeLabel::A).unwrap();
        assert_eq!(c.coords().0, (t.coords().0 + 60) % 61);
        assert_ne!(c.coords().0, 62 % 61);
        let cb = reduce_at(&e13.from_ints(-1, 1), 61, PrimeLabel::B).unwrap();
        assert_ne!(cb.coords().0, 1);
        assert!(reduce_at(&e13.int(1), 61, PrimeLabel::Inert).is_err());
        // sqrt(5) at the A prime above 29 is the least root, 11
        let f5 = QuadField::new(5).unwrap();
        assert_eq!(reduce_at(&f5.sqrt_m(), 29, PrimeLabel::A).unwrap().coords(), (11, 0));
        assert_eq!(reduce_at(&f5.elem(1, 1).unwrap(), 5, PrimeLabel::Ramified).unwrap().coords(), (3, 0));
    }

    #[test]
    fn inert_reduction_uses_canonical_root_of_discriminant() {
        let e6 = QuadField::new(6).unwrap();
        let f49 = ResidueField::quadratic(7).unwrap();
        // sqrt(24) = 2 sqrt(6)
        let r = reduce_at(&e6.from_ints(0, 2), 7, PrimeLabel::Inert).unwrap();
        assert_eq!(r, f49.canonical_sqrt(24));
    }

    #[test]
    fn split_classes() {
        assert_eq!(split_congruence_classes(5), vec![1, 4]);
        assert_eq!(split_congruence_classes(24), vec![1, 5, 19, 23]);
        assert_eq!(split_congruence_classes(13), vec![1, 3, 4, 9, 10, 12]);
        assert_eq!(format_classes(&[1, 5, 19, 23], 24), "\u{b1}1, \u{b1}5 (mod 24)");
        for d in [5i64, 8, 12, 13, 24, 257] {
            let f = QuadField::from_discriminant(d).unwrap();
            let classes = split_congruence_classes(d);
            for p in arith::primes_up_to(500) {
                if d % p as i64 == 0 {
                    continue;
                }
                let in_class = classes.contains(&(p % d as u64));
                assert_eq!(in_class, f.splitting_type(p) == Splitting::Split, "D={d} p={p}");
            }
        }
    }

    #[test]
    fn printing() {
        let f = ResidueField::quadratic(7).unwrap();
        assert_eq!(f.from_coords(3, 4).to_string(), "3+4*t mod 7");
        assert_eq!(ResidueField::prime(7).unwrap().from_u64(3).to_string(), "3");
    }

    proptest! {
        #[test]
        fn ring_axioms(
            idx in 0usize..8,
            a in any::<(u64, u64)>(), b in any::<(u64, u64)>(), c in any::<(u64, u64)>(),
        ) {
            let fields = [
                ResidueField::prime(7).unwrap(),
                ResidueField::quadratic(7).unwrap(),
                ResidueField::quadratic(13).unwrap(),
                ResidueField::prime(1_000_000_007).unwrap(),
                ResidueField::quadratic(1_000_000_007).unwrap(),
                ResidueField::quadratic((1 << 61) - 1).unwrap(),
                ResidueField::prime(2).unwrap(),
                ResidueField::quadratic(3).unwrap(),
            ];
            let f = fields[idx];
            let (x, y, z) = (f.from_coords(a.0, a.1), f.from_coords(b.0, b.1), f.from_coords(c.0, c.1));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            if !x.is_zero() {
                prop_assert!(x.mul(&x.inv().unwrap()).is_one());
            }
        }
    }
}
