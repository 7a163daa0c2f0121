use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{QFElem, QuadField, QuadFieldError, Splitting};
use crate::arith;

/// Label of a prime ideal above a rational prime.
///
/// For split odd `p`, `A` is the prime containing `sqrt(D) - t` where `t` is
/// the least nonnegative square root of `D` mod `p`. Above 2 (where that rule
/// degenerates) `A` is the prime containing `omega`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimeLabel {
    A,
    B,
    Inert,
    Ramified,
}

impl PrimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PrimeLabel::A => "split:A",
            PrimeLabel::B => "split:B",
            PrimeLabel::Inert => "inert",
            PrimeLabel::Ramified => "ramified",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "split:A" => Some(PrimeLabel::A),
            "split:B" => Some(PrimeLabel::B),
            "inert" => Some(PrimeLabel::Inert),
            "ramified" => Some(PrimeLabel::Ramified),
            _ => None,
        }
    }
}

impl fmt::Display for PrimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Nonzero ideal in normal presentation `c * (aZ + (b + omega)Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QFIdeal {
    field: QuadField,
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

pub(crate) struct PrimeInfo {
    pub p: u64,
    /// Root of omega's minimal polynomial mod p, absent for inert primes.
    pub root: Option<u64>,
}

/// Hermite normal form `[(n1, 0), (m, n2)]` of the Z-span of `(u, v)` vectors.
fn hnf(mut vecs: Vec<(BigInt, BigInt)>) -> Option<(BigInt, BigInt, BigInt)> {
    // Euclid on the omega coordinate until one vector carries the gcd
    let mut pivot: Option<(BigInt, BigInt)> = None;
    let mut flat: Vec<BigInt> = Vec::new();
    for (u, v) in vecs.drain(..) {
        if v.is_zero() {
            flat.push(u);
            continue;
        }
        match pivot.take() {
            None => pivot = Some((u, v)),
            Some((mut pu, mut pv)) => {
                let (mut qu, mut qv) = (u, v);
                while !qv.is_zero() {
                    let k = pv.div_floor(&qv);
                    let nu = &pu - &k * &qu;
                    let nv = &pv - &k * &qv;
                    pu = std::mem::replace(&mut qu, nu);
                    pv = std::mem::replace(&mut qv, nv);
                }
                flat.push(qu);
                pivot = Some((pu, pv));
            }
        }
    }
    let (mut pu, mut pv) = pivot?;
    if pv.is_negative() {
        pu = -pu;
        pv = -pv;
    }
    let n1 = flat.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if n1.is_zero() {
        return None;
    }
    let m = pu.mod_floor(&n1);
    Some((n1, m, pv))
}

impl QFIdeal {
    /// The ideal generated (as an ideal) by the given elements.
    pub fn from_elements(field: QuadField, gens: &[QFElem]) -> Result<Self, QuadFieldError> {
        let (t, n0) = field.omega_relation();
        let mut vecs = Vec::with_capacity(gens.len() * 2);
        for g in gens {
            let (u, v) = g.omega_coords();
            let wu = &v * n0;
            let wv = &u + &v * t;
            vecs.push((u, v));
            vecs.push((wu, wv));
        }
        let (n1, m, n2) = hnf(vecs).ok_or(QuadFieldError::NotAnIdeal)?;
        Self::from_hnf(field, n1, m, n2)
    }

    pub fn principal(g: &QFElem) -> Result<Self, QuadFieldError> {
        Self::from_elements(g.field(), std::slice::from_ref(g))
    }

    pub fn from_integer(field: QuadField, n: impl Into<BigInt>) -> Result<Self, QuadFieldError> {
        Self::principal(&field.int(n))
    }

    pub fn unit(field: QuadField) -> Self {
        QFIdeal { field, a: BigInt::one(), b: BigInt::zero(), c: BigInt::one() }
    }

    fn from_hnf(field: QuadField, n1: BigInt, m: BigInt, n2: BigInt) -> Result<Self, QuadFieldError> {
        if !(&n1 % &n2).is_zero() || !(&m % &n2).is_zero() {
            return Err(QuadFieldError::NotAnIdeal);
        }
        let a = &n1 / &n2;
        let b = (&m / &n2).mod_floor(&a);
        let ideal = QFIdeal { field, a, b, c: n2 };
        // a must divide Nm(b + omega)
        if !(ideal.basis_elem().norm() % &ideal.a).is_zero() {
            return Err(QuadFieldError::NotAnIdeal);
        }
        Ok(ideal)
    }

    /// Build from a normal presentation, validating the invariants.
    pub fn from_presentation(
        field: QuadField,
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
    ) -> Result<Self, QuadFieldError> {
        let (a, b, c) = (a.into(), b.into(), c.into());
        if !a.is_positive() || !c.is_positive() {
            return Err(QuadFieldError::NotAnIdeal);
        }
        let n1 = &a * &c;
        let m = &b * &c;
        Self::from_hnf(field, n1, m, c)
    }

    /// Parse `[a, b+w; c]` (or `[a,b;c]`).
    pub fn parse(field: QuadField, text: &str) -> Result<Self, QuadFieldError> {
        let err = || QuadFieldError::IdealLiteral(text.to_string());
        let inner = text.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(err)?;
        let (left, c) = inner.split_once(';').ok_or_else(err)?;
        let (a, b) = left.split_once(',').ok_or_else(err)?;
        let b = b.trim();
        let b = b.strip_suffix("+w").map(str::trim).unwrap_or(b);
        let a: BigInt = a.trim().parse().map_err(|_| err())?;
        let b: BigInt = b.parse().map_err(|_| err())?;
        let c: BigInt = c.trim().parse().map_err(|_| err())?;
        Self::from_presentation(field, a, b, c)
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn presentation(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    pub fn norm(&self) -> BigInt {
        &self.a * &self.c * &self.c
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.a.is_one() && self.c.is_one()
    }

    /// `b + omega`, the second basis vector of the primitive part.
    pub(crate) fn basis_elem(&self) -> QFElem {
        self.field.from_omega_coords(self.b.clone(), BigInt::one())
    }

    /// HNF rows `(n1, 0), (m, n2)` in the `(1, omega)` basis.
    pub(crate) fn hnf_rows(&self) -> (BigInt, BigInt, BigInt) {
        (&self.a * &self.c, &self.b * &self.c, self.c.clone())
    }

    /// Z-basis `(c*a, c*(b + omega))`.
    pub fn z_basis(&self) -> (QFElem, QFElem) {
        (self.field.int(&self.a * &self.c), self.basis_elem().scale(&self.c))
    }

    pub fn contains(&self, x: &QFElem) -> bool {
        let (n1, m, n2) = self.hnf_rows();
        let (u, v) = x.omega_coords();
        if !(&v % &n2).is_zero() {
            return false;
        }
        let k = &v / &n2;
        ((u - k * m) % n1).is_zero()
    }

    pub fn mul(&self, other: &QFIdeal) -> QFIdeal {
        let (x1, x2) = self.z_basis();
        let (y1, y2) = other.z_basis();
        let gens = [&x1 * &y1, &x1 * &y2, &x2 * &y1, &x2 * &y2];
        QFIdeal::from_elements(self.field, &gens).expect("product of ideals is an ideal")
    }

    pub fn scale(&self, k: &BigInt) -> QFIdeal {
        QFIdeal { field: self.field, a: self.a.clone(), b: self.b.clone(), c: &self.c * k.abs() }
    }

    /// Sum of ideals (their gcd).
    pub fn add(&self, other: &QFIdeal) -> QFIdeal {
        let (x1, x2) = self.z_basis();
        let (y1, y2) = other.z_basis();
        QFIdeal::from_elements(self.field, &[x1, x2, y1, y2]).expect("sum of ideals is an ideal")
    }

    pub(crate) fn prime_info(&self) -> Option<PrimeInfo> {
        if self.c.is_one() {
            let p = self.a.to_u64()?;
            if !arith::is_prime_u64(p) {
                return None;
            }
            let root = (-&self.b).mod_floor(&self.a).to_u64()?;
            Some(PrimeInfo { p, root: Some(root) })
        } else if self.a.is_one() {
            let p = self.c.to_u64()?;
            if arith::is_prime_u64(p) && self.field.splitting_type(p) == Splitting::Inert {
                Some(PrimeInfo { p, root: None })
            } else {
                None
            }
        } else {
            None
        }
    }

    pub fn is_prime(&self) -> bool {
        self.prime_info().is_some()
    }

    /// Rational prime below a prime ideal.
    pub fn rational_prime(&self) -> Option<u64> {
        self.prime_info().map(|i| i.p)
    }

    /// Exponent of the prime ideal `prime` in `self`.
    pub fn valuation(&self, prime: &QFIdeal) -> u32 {
        let info = prime.prime_info().expect("valuation at a non-prime ideal");
        let p = BigInt::from(info.p);
        let vc = valuation_int(&self.c, &p);
        match prime.field.splitting_type(info.p) {
            Splitting::Inert => vc,
            Splitting::Ramified => 2 * vc + valuation_int(&self.a, &p),
            Splitting::Split => {
                let r = BigInt::from(info.root.unwrap());
                // b + omega lies in P = (p, omega - r) iff b + r = 0 mod p
                if ((&self.b + r) % &p).is_zero() {
                    vc + valuation_int(&self.a, &p)
                } else {
                    vc
                }
            }
        }
    }

    /// Prime ideal factorization, ordered by rational prime then label.
    pub fn factor(&self) -> Vec<(QFIdeal, u32)> {
        let n = self.norm();
        let mut out = Vec::new();
        for (p, _) in arith::factor(n.magnitude()) {
            let p = p.to_u64().expect("prime below ideal fits in u64");
            for prime in primes_above(p, &self.field).expect("rational prime") {
                let e = self.valuation(&prime);
                if e > 0 {
                    out.push((prime, e));
                }
            }
        }
        out
    }

    /// Largest ideal whose square divides `self`.
    pub fn square_root_part(&self) -> QFIdeal {
        let mut acc = QFIdeal::unit(self.field);
        for (prime, e) in self.factor() {
            for _ in 0..e / 2 {
                acc = acc.mul(&prime);
            }
        }
        acc
    }
}

fn valuation_int(n: &BigInt, p: &BigInt) -> u32 {
    let mut n = n.abs();
    let mut v = 0;
    if n.is_zero() {
        return u32::MAX;
    }
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

impl fmt::Display for QFIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}+w; {}]", self.a, self.b, self.c)
    }
}

/// Prime ideals above `p`, in label order (`A` before `B`).
pub fn primes_above(p: u64, field: &QuadField) -> Result<Vec<QFIdeal>, QuadFieldError> {
    if !arith::is_prime_u64(p) {
        return Err(QuadFieldError::NotPrime(p));
    }
    Ok(labelled_primes_above(p, field).into_iter().map(|(_, i)| i).collect())
}

pub(crate) fn labelled_primes_above(p: u64, field: &QuadField) -> Vec<(PrimeLabel, QFIdeal)> {
    let (t, _) = field.omega_relation();
    let with_root =
        |r: u64| QFIdeal { field: *field, a: BigInt::from(p), b: BigInt::from((p - r % p) % p), c: BigInt::one() };
    match field.splitting_type(p) {
        Splitting::Inert => vec![(
            PrimeLabel::Inert,
            QFIdeal { field: *field, a: BigInt::one(), b: BigInt::zero(), c: BigInt::from(p) },
        )],
        Splitting::Ramified => {
            let r = if p == 2 {
                (field.radicand().rem_euclid(2)) as u64
            } else {
                // double root of the minimal polynomial: t/2
                arith::mul_mod(t as u64, arith::inv_mod(2, p).unwrap(), p)
            };
            vec![(PrimeLabel::Ramified, with_root(r))]
        }
        Splitting::Split => {
            if p == 2 {
                return vec![(PrimeLabel::A, with_root(0)), (PrimeLabel::B, with_root(1))];
            }
            let d = field.discriminant().rem_euclid(p as i64) as u64;
            let s = crate::residue::sqrt_mod(d, p).expect("split prime has a root");
            let s = s.min(p - s);
            let inv2 = arith::inv_mod(2, p).unwrap();
            // sqrt(D) = 2*omega - t
            let r_a = arith::mul_mod((s + t as u64) % p, inv2, p);
            let r_b = ((t as u64 + p) - r_a) % p;
            vec![(PrimeLabel::A, with_root(r_a)), (PrimeLabel::B, with_root(r_b))]
        }
    }
}

/// The prime above `p` with the given label, if consistent with the splitting.
pub fn prime_with_label(p: u64, label: PrimeLabel, field: &QuadField) -> Option<QFIdeal> {
    if !arith::is_prime_u64(p) {
        return None;
    }
    labelled_primes_above(p, field).into_iter().find(|(l, _)| *l == label).map(|(_, i)| i)
}

/// Norm of the ideal generated by `x` and `y`.
pub fn element_ideal_gcd_norm(x: &QFElem, y: &QFElem) -> BigInt {
    QFIdeal::from_elements(x.field(), &[x.clone(), y.clone()]).expect("x and y not both zero").norm()
}

/// The quotient ring `O/M`, elements kept in reduced `(1, omega)` coordinates.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    field: QuadField,
    modulus: QFIdeal,
    n1: BigInt,
    m: BigInt,
    n2: BigInt,
}

impl ResidueRing {
    pub fn new(modulus: &QFIdeal) -> Self {
        let (n1, m, n2) = modulus.hnf_rows();
        ResidueRing { field: modulus.field, modulus: modulus.clone(), n1, m, n2 }
    }

    pub fn modulus(&self) -> &QFIdeal {
        &self.modulus
    }

    pub fn reduce(&self, x: &QFElem) -> (BigInt, BigInt) {
        let (u, v) = x.omega_coords();
        self.reduce_coords(u, v)
    }

    fn reduce_coords(&self, u: BigInt, v: BigInt) -> (BigInt, BigInt) {
        let q = v.div_floor(&self.n2);
        let v = &v - &q * &self.n2;
        let u = (u - q * &self.m).mod_floor(&self.n1);
        (u, v)
    }

    pub fn elem(&self, coords: &(BigInt, BigInt)) -> QFElem {
        self.field.from_omega_coords(coords.0.clone(), coords.1.clone())
    }

    pub fn mul(&self, a: &(BigInt, BigInt), b: &(BigInt, BigInt)) -> (BigInt, BigInt) {
        let prod = &self.elem(a) * &self.elem(b);
        self.reduce(&prod)
    }

    pub fn pow(&self, x: &QFElem, mut e: BigUint) -> (BigInt, BigInt) {
        let mut base = self.reduce(x);
        let mut acc = self.reduce(&self.field.one());
        let two = BigUint::from(2u32);
        while !e.is_zero() {
            if e.is_odd() {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e /= &two;
        }
        acc
    }

    pub fn is_one(&self, x: &(BigInt, BigInt)) -> bool {
        *x == self.reduce(&self.field.one())
    }

    pub fn congruent(&self, x: &QFElem, y: &QFElem) -> bool {
        self.reduce(x) == self.reduce(y)
    }

    /// `|(O/M)^x|` from the prime factorization of `M`.
    pub fn unit_group_order(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (prime, e) in self.modulus.factor() {
            let np = prime.norm().magnitude().clone();
            acc *= (&np - 1u32) * np.pow(e - 1);
        }
        acc
    }
}
