//! Candidate sets for the exceptional primes (reducible, dihedral, exotic and
//! inner-twist images) and the certificates that eliminate them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::heckedata::{Dataset, NewformSpec};
use crate::quadfield::{
    class_numbers, element_ideal_gcd_norm, fundamental_unit, is_principal, mod4_square_solvable, prime_with_label,
    ray_trivial_generator, residue_reduce, unit_order_mod, PrimeLabel, QFElem, QFIdeal, QuadField, ResidueRing,
    Splitting,
};
use crate::residue::{
    charpoly_irreducible, format_classes, projective_frobenius_order, reduce_at, split_congruence_classes, FFElem,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("no exact record at a principal prime with a ray-trivial generator")]
    NoQualifyingPrime,
    #[error("the ray-class congruence needs parallel weight")]
    NonParallelWeight,
    #[error("prime {0} divides 2*beta")]
    BadPrime(String),
    #[error("class group obstruction: {0}")]
    UnsupportedClassObstruction(String),
    #[error("no exact eigenvalue records")]
    NoExactRecords,
}

/// The data a certificate needs besides its own fields.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormContext {
    pub base_disc: i64,
    pub weight: [u32; 2],
    pub level: String,
    pub coeff_disc: i64,
}

impl FormContext {
    pub fn from_spec(spec: &NewformSpec) -> Self {
        FormContext {
            base_disc: spec.base_disc,
            weight: [spec.weight.0, spec.weight.1],
            level: spec.level.to_string(),
            coeff_disc: spec.coeff_disc,
        }
    }

    fn base_field(&self) -> Result<QuadField, String> {
        QuadField::from_discriminant(self.base_disc).map_err(|e| e.to_string())
    }

    fn coeff_field(&self) -> Result<QuadField, String> {
        QuadField::from_discriminant(self.coeff_disc).map_err(|e| e.to_string())
    }

    fn k0(&self) -> u32 {
        self.weight[0].max(self.weight[1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayWitness {
    pub p: u64,
    pub label: String,
    /// Generator of the prime, congruent to 1 and totally positive.
    pub generator: String,
    pub trace: String,
    /// `c - 1 - Nm(pi)^(k0-1)`.
    pub d: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRecord {
    pub p: u64,
    pub label: String,
    pub primes: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    /// Reducible primes divide `Nm(eps^(2e) - 1)`, `e` the order of `eps`
    /// modulo `modulus`.
    UnitOrderBound { modulus: String, exponent: u64, norm: String, primes: Vec<u64> },
    /// `ell` divides neither `value` nor `p`, where `value` is `|Nm d|` for a
    /// single witness and the norm of the ideal `(d, d')` for a conjugate pair.
    RayClassContradiction { ell: u64, modulus: String, witnesses: Vec<RayWitness>, value: String },
    /// `x^2 - trace x + det` is irreducible modulo `lambda`.
    IrreducibleAt { ell: u64, lambda: String, p: u64, label: String, trace: String, det: String },
    /// A dihedral image attached to `F(sqrt beta)` forces `ell` into `bound`.
    DihedralFactorBound { beta: String, records: Vec<FactorRecord>, bound: Vec<u64> },
    /// Exotic projective images force `2(ell - 1) <= 5(k1 + k2 - 2)`.
    ExoticWeightBound { weight: [u32; 2], bound: Vec<u64> },
    /// A Frobenius of projective order above 5 modulo `lambda`.
    ExoticOrderAt { ell: u64, lambda: String, p: u64, label: String, trace: String, det: String, order: u64 },
    /// `c^2` has nonzero `sqrt(D_E)`-coordinate `v`; with `ell` set, `ell`
    /// is inert in `E` and prime to the numerator of `v` and to `p`.
    InnerTwistCoordinate { ell: Option<u64>, p: u64, label: String, trace: String, v: String },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::UnitOrderBound { .. } => "UnitOrderBound",
            Certificate::RayClassContradiction { .. } => "RayClassContradiction",
            Certificate::IrreducibleAt { .. } => "IrreducibleAt",
            Certificate::DihedralFactorBound { .. } => "DihedralFactorBound",
            Certificate::ExoticWeightBound { .. } => "ExoticWeightBound",
            Certificate::ExoticOrderAt { .. } => "ExoticOrderAt",
            Certificate::InnerTwistCoordinate { .. } => "InnerTwistCoordinate",
        }
    }

    /// The prime a per-prime certificate eliminates.
    pub fn ell(&self) -> Option<u64> {
        match self {
            Certificate::RayClassContradiction { ell, .. }
            | Certificate::IrreducibleAt { ell, .. }
            | Certificate::ExoticOrderAt { ell, .. } => Some(*ell),
            Certificate::InnerTwistCoordinate { ell, .. } => *ell,
            _ => None,
        }
    }

    /// Re-run the operation the certificate names on its embedded data.
    pub fn replay(&self, ctx: &FormContext) -> Result<(), String> {
        let f = ctx.base_field()?;
        let e = ctx.coeff_field()?;
        let k0 = ctx.k0();
        let check = |ok: bool, what: &str| if ok { Ok(()) } else { Err(format!("{}: {what}", self.kind())) };
        match self {
            Certificate::UnitOrderBound { modulus, exponent, norm, primes } => {
                let m = QFIdeal::parse(f, modulus).map_err(|e| e.to_string())?;
                let eps = fundamental_unit(&f);
                check(unit_order_mod(&eps, &m).to_u64() == Some(*exponent), "unit order")?;
                let n = (&eps.pow(2 * exponent) - &f.one()).norm().abs();
                check(n.to_string() == *norm, "norm of eps^(2e) - 1")?;
                check(
                    prime_set(&n).ok().as_ref().map(|s| s.iter().copied().collect()) == Some(primes.clone()),
                    "primes",
                )
            }
            Certificate::RayClassContradiction { ell, modulus, witnesses, value } => {
                let m = QFIdeal::parse(f, modulus).map_err(|e| e.to_string())?;
                let ring = ResidueRing::new(&m);
                let mut ds = Vec::new();
                for w in witnesses {
                    let label = parse_label(&w.label)?;
                    let pi = prime_with_label(w.p, label, &f).ok_or("unknown prime")?;
                    let g = f.parse_elem(&w.generator).map_err(|e| e.to_string())?;
                    check(QFIdeal::principal(&g).ok() == Some(pi), "generator")?;
                    check(ring.congruent(&g, &f.one()) && g.is_totally_positive(), "ray-trivial generator")?;
                    let c = e.parse_elem(&w.trace).map_err(|e| e.to_string())?;
                    let d = ray_divisor(&c, &label_norm(w.p, label), k0);
                    check(d.to_string() == w.d, "d")?;
                    check(*ell != w.p, "ell differs from p")?;
                    ds.push(d);
                }
                let v = match ds.as_slice() {
                    [d] => d.norm().abs(),
                    [a, b] => pair_gcd_norm(a, b),
                    _ => return Err("RayClassContradiction: one or two witnesses".into()),
                };
                check(v.to_string() == *value, "value")?;
                check(!v.is_zero() && !(v % ell).is_zero(), "ell does not divide value")
            }
            Certificate::IrreducibleAt { ell, lambda, p, label, trace, det } => {
                let (cb, db) = replay_reduction(&e, *ell, lambda, *p, label, trace, det, k0, &f)?;
                check(*ell != *p && charpoly_irreducible(&cb, &db), "irreducible characteristic polynomial")
            }
            Certificate::ExoticOrderAt { ell, lambda, p, label, trace, det, order } => {
                let (cb, db) = replay_reduction(&e, *ell, lambda, *p, label, trace, det, k0, &f)?;
                let o = projective_frobenius_order(&cb, &db).map_err(|e| e.to_string())?;
                check(*ell != *p && o.exact() == Some(*order as u128) && *order > 5, "projective order")
            }
            Certificate::DihedralFactorBound { beta, records, bound } => {
                let b = f.parse_elem(beta).map_err(|e| e.to_string())?;
                for r in records {
                    let pi = prime_with_label(r.p, parse_label(&r.label)?, &f).ok_or("unknown prime")?;
                    check(inert_in_extension(&pi, &b) == Ok(true), "inert record")?;
                }
                let sets: Vec<BTreeSet<u64>> = records.iter().map(|r| with_p(&r.primes, r.p)).collect();
                check(intersect(&sets).map(|s| s.into_iter().collect()) == Some(bound.clone()), "bound")
            }
            Certificate::ExoticWeightBound { weight, bound } => {
                check(exotic_bound(weight[0], weight[1]) == *bound, "bound")
            }
            Certificate::InnerTwistCoordinate { ell, p, label, trace, v } => {
                let _ = parse_label(label)?;
                let c = e.parse_elem(trace).map_err(|e| e.to_string())?;
                let (num, den) = inner_twist_coordinate(&c);
                check(format_ratio(&num, &den) == *v && !num.is_zero(), "coordinate")?;
                match ell {
                    None => Ok(()),
                    Some(l) => check(
                        e.splitting_type(*l) == Splitting::Inert && *l != *p && !(&num % l).is_zero(),
                        "ell inert and prime to v",
                    ),
                }
            }
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::UnitOrderBound { modulus, exponent, norm, primes } => write!(
                f,
                "UnitOrderBound: eps has order {exponent} mod {modulus}; |Nm(eps^{} - 1)| = {norm}, primes {}",
                2 * exponent,
                join(primes)
            ),
            Certificate::RayClassContradiction { ell, witnesses, value, .. } => {
                let w: Vec<String> = witnesses.iter().map(|w| format!("{} {} d={}", w.p, w.label, w.d)).collect();
                write!(f, "RayClassContradiction: l={ell} does not divide {value} ({})", w.join("; "))
            }
            Certificate::IrreducibleAt { ell, lambda, p, label, trace, det } => {
                write!(f, "IrreducibleAt: l={ell} {lambda}, x^2 - ({trace})x + {det} at {p} {label}")
            }
            Certificate::DihedralFactorBound { beta, records, bound } => {
                let ps: Vec<String> = records.iter().map(|r| format!("{} {}", r.p, r.label)).collect();
                write!(f, "DihedralFactorBound: beta={beta}, inert records [{}], bound {}", ps.join(", "), join(bound))
            }
            Certificate::ExoticWeightBound { weight, bound } => {
                write!(f, "ExoticWeightBound: weight ({},{}), bound {}", weight[0], weight[1], join(bound))
            }
            Certificate::ExoticOrderAt { ell, lambda, p, label, order, .. } => {
                write!(f, "ExoticOrderAt: l={ell} {lambda}, Frobenius at {p} {label} has projective order {order}")
            }
            Certificate::InnerTwistCoordinate { ell, p, label, trace, v } => match ell {
                Some(l) => write!(f, "InnerTwistCoordinate: l={l}, c={trace} at {p} {label}, v={v}"),
                None => write!(f, "InnerTwistCoordinate: c={trace} at {p} {label}, v={v}"),
            },
        }
    }
}

fn join(xs: &[u64]) -> String {
    if xs.is_empty() {
        return "{}".into();
    }
    let s: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", s.join(","))
}

fn parse_label(s: &str) -> Result<PrimeLabel, String> {
    PrimeLabel::parse(s).ok_or_else(|| format!("bad prime label {s:?}"))
}

fn label_norm(p: u64, label: PrimeLabel) -> BigInt {
    match label {
        PrimeLabel::Inert => BigInt::from(p) * p,
        _ => BigInt::from(p),
    }
}

#[allow(clippy::too_many_arguments)]
fn replay_reduction(
    e: &QuadField,
    ell: u64,
    lambda: &str,
    p: u64,
    label: &str,
    trace: &str,
    det: &str,
    k0: u32,
    f: &QuadField,
) -> Result<(FFElem, FFElem), String> {
    let label = parse_label(label)?;
    prime_with_label(p, label, f).ok_or("unknown prime")?;
    let expected = label_norm(p, label).pow(k0 - 1);
    if expected.to_string() != det {
        return Err(format!("det {det} differs from Nm(pi)^(k0-1) = {expected}"));
    }
    let c = e.parse_elem(trace).map_err(|e| e.to_string())?;
    reduce_pair(&c, &expected, ell, parse_label(lambda)?).map_err(|e| e.to_string())
}

/// Rational primes dividing `n`, which must be nonzero.
fn prime_set(n: &BigInt) -> Result<BTreeSet<u64>, String> {
    arith::prime_divisors(n)
        .iter()
        .map(|p| p.to_u64().ok_or_else(|| format!("prime factor {p} beyond 64 bits")))
        .collect()
}

fn with_p(primes: &[u64], p: u64) -> BTreeSet<u64> {
    primes.iter().copied().chain([p]).collect()
}

fn intersect(sets: &[BTreeSet<u64>]) -> Option<BTreeSet<u64>> {
    let mut it = sets.iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, s| acc.intersection(s).copied().collect()))
}

fn ray_divisor(c: &QFElem, norm_pi: &BigInt, k0: u32) -> QFElem {
    let e = c.field();
    c - &e.int(BigInt::one() + norm_pi.pow(k0 - 1))
}

fn pair_gcd_norm(a: &QFElem, b: &QFElem) -> BigInt {
    if a.is_zero() && b.is_zero() {
        BigInt::zero()
    } else {
        element_ideal_gcd_norm(a, b)
    }
}

fn reduce_pair(
    c: &QFElem,
    det: &BigInt,
    ell: u64,
    lambda: PrimeLabel,
) -> Result<(FFElem, FFElem), crate::residue::ResidueError> {
    let cb = reduce_at(c, ell, lambda)?;
    let db = cb.field().from_bigint(det);
    Ok((cb, db))
}

/// Labels of the primes of `E` above `ell`.
pub fn lambda_labels(e: &QuadField, ell: u64) -> Vec<PrimeLabel> {
    match e.splitting_type(ell) {
        Splitting::Split => vec![PrimeLabel::A, PrimeLabel::B],
        Splitting::Inert => vec![PrimeLabel::Inert],
        Splitting::Ramified => vec![PrimeLabel::Ramified],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum Status {
    Structural(String),
    Candidate(String),
    Eliminated(Vec<Certificate>),
    Unresolved(String),
}

/// Per-prime statuses; primes absent from `entries` are excluded by the
/// bound certificates, unless `unbounded` is set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateSet {
    pub entries: BTreeMap<u64, Status>,
    pub unbounded: Option<String>,
    pub certificates: Vec<Certificate>,
    pub notes: Vec<String>,
}

impl CandidateSet {
    fn seeded(structural: &BTreeMap<u64, String>) -> Self {
        CandidateSet {
            entries: structural.iter().map(|(&l, r)| (l, Status::Structural(r.clone()))).collect(),
            ..Default::default()
        }
    }

    fn add_candidate(&mut self, l: u64, reason: &str) {
        self.entries.entry(l).or_insert_with(|| Status::Candidate(reason.to_string()));
    }

    /// All primes in the set, structural ones included.
    pub fn primes(&self) -> BTreeSet<u64> {
        self.entries.keys().copied().collect()
    }

    /// Primes in the set that are not structural.
    pub fn open(&self) -> BTreeSet<u64> {
        self.entries.iter().filter(|(_, s)| !matches!(s, Status::Structural(_))).map(|(&l, _)| l).collect()
    }
}

/// Primes outside the hypotheses of the image propositions.
pub fn structural_primes(spec: &NewformSpec) -> BTreeMap<u64, String> {
    let mut out = BTreeMap::new();
    for l in [2u64, 3] {
        out.insert(l, "small prime".to_string());
    }
    for p in arith::prime_divisors(&BigInt::from(spec.base_disc)) {
        out.entry(p.to_u64().unwrap()).or_insert_with(|| "ramified in F".to_string());
    }
    for p in arith::prime_divisors(&spec.level_norm()) {
        if let Some(p) = p.to_u64() {
            out.entry(p).or_insert_with(|| "divides Nm(level)".to_string());
        }
    }
    for l in arith::primes_up_to(spec.k0() as u64) {
        out.entry(l).or_insert_with(|| "l <= k0".to_string());
    }
    out
}

/// Structural primes of the dihedral step: also `2k_i - 1` when prime.
pub fn dihedral_structural_primes(spec: &NewformSpec) -> BTreeMap<u64, String> {
    let mut out = structural_primes(spec);
    for k in [spec.weight.0, spec.weight.1] {
        let l = 2 * k as u64 - 1;
        if arith::is_prime_u64(l) {
            out.entry(l).or_insert_with(|| "l = 2k_i - 1".to_string());
        }
    }
    out
}

/// Reducible candidates from the order of `eps` modulo `modulus` (the level
/// by default).
pub fn reducible_candidates_unit_method(ds: &Dataset, modulus: Option<&QFIdeal>) -> CandidateSet {
    let spec = &ds.spec;
    let f = spec.base_field();
    let m = modulus.unwrap_or(&spec.level);
    let eps = fundamental_unit(&f);
    let e = unit_order_mod(&eps, m).to_u64().expect("unit order fits in 64 bits");
    let norm = (&eps.pow(2 * e) - &f.one()).norm().abs();
    let mut set = CandidateSet::seeded(&structural_primes(spec));
    match prime_set(&norm) {
        Ok(primes) => {
            for &l in &primes {
                set.add_candidate(l, "divides Nm(eps^2e - 1)");
            }
            set.certificates.push(Certificate::UnitOrderBound {
                modulus: m.to_string(),
                exponent: e,
                norm: norm.to_string(),
                primes: primes.into_iter().collect(),
            });
        }
        Err(msg) => set.unbounded = Some(msg),
    }
    set
}

/// An irreducible Frobenius characteristic polynomial modulo `lambda | ell`.
pub fn certify_irreducible_charpoly(ell: u64, lambda: PrimeLabel, ds: &Dataset) -> Option<Certificate> {
    let k0 = ds.spec.k0();
    ds.exact_records().filter(|(r, _)| r.p != ell).find_map(|(r, c)| {
        let det = r.prime_norm().pow(k0 - 1);
        let (cb, db) = reduce_pair(c, &det, ell, lambda).ok()?;
        charpoly_irreducible(&cb, &db).then(|| Certificate::IrreducibleAt {
            ell,
            lambda: lambda.as_str().to_string(),
            p: r.p,
            label: r.label.as_str().to_string(),
            trace: c.to_string(),
            det: det.to_string(),
        })
    })
}

/// One congruence constraint from ray-trivial principal primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayDivisor {
    pub witnesses: Vec<RayWitness>,
    pub value: BigInt,
}

impl RayDivisor {
    fn excludes(&self, ell: u64) -> bool {
        !self.value.is_zero() && !(&self.value % ell).is_zero() && self.witnesses.iter().all(|w| w.p != ell)
    }

    fn bound(&self) -> Option<BTreeSet<u64>> {
        if self.value.is_zero() {
            return None;
        }
        let mut s = prime_set(&self.value).ok()?;
        s.extend(self.witnesses.iter().map(|w| w.p));
        Some(s)
    }
}

/// Reducible candidates from `c(f, pi) = 1 + Nm(pi)^(k0-1)` at primes with a
/// generator that is 1 modulo `m` and totally positive.
pub fn reducible_candidates_rayclass_method(
    ds: &Dataset,
    m: &QFIdeal,
) -> Result<(CandidateSet, Vec<RayDivisor>), BoundsError> {
    let spec = &ds.spec;
    if spec.weight.0 != spec.weight.1 {
        return Err(BoundsError::NonParallelWeight);
    }
    let f = spec.base_field();
    let k0 = spec.k0();
    let mut by_p: BTreeMap<u64, Vec<(RayWitness, QFElem)>> = BTreeMap::new();
    for (r, c) in ds.exact_records() {
        let Some(pi) = r.prime(&f) else { continue };
        let Some(alpha) = is_principal(&pi) else { continue };
        let Some(g) = ray_trivial_generator(&alpha, m, true) else { continue };
        let d = ray_divisor(c, &r.prime_norm(), k0);
        let w = RayWitness {
            p: r.p,
            label: r.label.as_str().to_string(),
            generator: g.to_string(),
            trace: c.to_string(),
            d: d.to_string(),
        };
        by_p.entry(r.p).or_default().push((w, d));
    }
    if by_p.is_empty() {
        return Err(BoundsError::NoQualifyingPrime);
    }
    let mut divisors = Vec::new();
    for (_, group) in by_p {
        match group.as_slice() {
            [(wa, da), (wb, db)] => {
                divisors.push(RayDivisor { witnesses: vec![wa.clone(), wb.clone()], value: pair_gcd_norm(da, db) })
            }
            _ => {
                for (w, d) in group {
                    divisors.push(RayDivisor { witnesses: vec![w], value: d.norm().abs() });
                }
            }
        }
    }
    let mut set = CandidateSet::seeded(&structural_primes(spec));
    let bounds: Vec<BTreeSet<u64>> = divisors.iter().filter_map(|d| d.bound()).collect();
    match intersect(&bounds) {
        Some(common) => {
            for l in common {
                set.add_candidate(l, "divides every ray-class divisor");
            }
        }
        None => set.unbounded = Some("every ray-class divisor vanishes".into()),
    }
    Ok((set, divisors))
}

/// The certificate eliminating `ell` through the ray-class divisors, if any.
pub fn rayclass_certificate(ell: u64, modulus: &QFIdeal, divisors: &[RayDivisor]) -> Option<Certificate> {
    divisors.iter().find(|d| d.excludes(ell)).map(|d| Certificate::RayClassContradiction {
        ell,
        modulus: modulus.to_string(),
        witnesses: d.witnesses.clone(),
        value: d.value.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionCandidate {
    pub beta: QFElem,
    /// Whether `beta` is a square modulo 4, i.e. `F(sqrt beta)` is unramified
    /// above 2.
    pub unramified_at_two: bool,
}

/// Representatives of the quadratic extensions of `F` unramified outside `S`
/// (and possibly ramified above 2 and at infinity).
pub fn enumerate_quadratic_extensions(
    field: &QuadField,
    s: &[QFIdeal],
) -> Result<Vec<ExtensionCandidate>, BoundsError> {
    let (h, _) = class_numbers(field);
    if h % 2 == 0 {
        return Err(BoundsError::UnsupportedClassObstruction(format!("class number {h} is even")));
    }
    let mut gens = vec![-&field.one(), fundamental_unit(field)];
    for p in s {
        let g =
            is_principal(p).ok_or_else(|| BoundsError::UnsupportedClassObstruction(format!("{p} is not principal")))?;
        gens.push(g);
    }
    let mut out = Vec::new();
    for mask in 1u32..(1 << gens.len()) {
        let beta =
            gens.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(field.one(), |acc, (_, g)| &acc * g);
        let unramified_at_two = mod4_square_solvable(&beta, field);
        out.push(ExtensionCandidate { beta, unramified_at_two });
    }
    Ok(out)
}

/// Whether the prime `pi` of `F` is inert in `F(sqrt beta)`.
pub fn inert_in_extension(pi: &QFIdeal, beta: &QFElem) -> Result<bool, BoundsError> {
    let bad = || BoundsError::BadPrime(pi.to_string());
    if pi.rational_prime() == Some(2) || pi.contains(beta) {
        return Err(bad());
    }
    let r = residue_reduce(beta, pi).map_err(|_| bad())?;
    Ok(!r.is_square())
}

/// Dihedral candidates: for each `beta`, the primes dividing every nonzero
/// eigenvalue norm at records inert in `F(sqrt beta)`.
pub fn dihedral_candidates(ds: &Dataset, exts: &[QFElem]) -> CandidateSet {
    let spec = &ds.spec;
    let f = spec.base_field();
    let mut set = CandidateSet::seeded(&dihedral_structural_primes(spec));
    if exts.is_empty() {
        set.notes.push("no quadratic extension: no dihedral obstruction possible".into());
    }
    let mut unresolved = Vec::new();
    for beta in exts {
        let mut records = Vec::new();
        for r in &ds.records {
            if !r.payload.is_nonzero() {
                continue;
            }
            let Some(pi) = r.prime(&f) else { continue };
            if inert_in_extension(&pi, beta) != Ok(true) {
                continue;
            }
            let Some(primes) = r.payload.norm_primes() else { continue };
            records.push(FactorRecord {
                p: r.p,
                label: r.label.as_str().to_string(),
                primes: primes.into_iter().collect(),
            });
        }
        let sets: Vec<BTreeSet<u64>> = records.iter().map(|r| with_p(&r.primes, r.p)).collect();
        let Some(bound) = intersect(&sets) else {
            unresolved.push(beta.to_string());
            continue;
        };
        for &l in &bound {
            set.add_candidate(l, &format!("dihedral for beta = {beta}"));
        }
        set.certificates.push(Certificate::DihedralFactorBound {
            beta: beta.to_string(),
            records,
            bound: bound.into_iter().collect(),
        });
    }
    if !unresolved.is_empty() {
        set.unbounded = Some(format!("no usable inert record for beta = {}", unresolved.join(", ")));
    }
    set
}

fn exotic_bound(k1: u32, k2: u32) -> Vec<u64> {
    let rhs = 5 * (k1 as u64 + k2 as u64 - 2);
    arith::primes_up_to(rhs / 2 + 1).into_iter().filter(|&l| 2 * (l - 1) <= rhs).collect()
}

/// Primes where an `A_4`, `S_4` or `A_5` projective image is not excluded by
/// the weight inequality.
pub fn exotic_candidates(spec: &NewformSpec) -> CandidateSet {
    let mut set = CandidateSet::seeded(&structural_primes(spec));
    let bound = exotic_bound(spec.weight.0, spec.weight.1);
    for &l in &bound {
        set.add_candidate(l, "2(l - 1) <= 5(k1 + k2 - 2)");
    }
    set.certificates.push(Certificate::ExoticWeightBound { weight: [spec.weight.0, spec.weight.1], bound });
    set
}

/// A Frobenius whose image in `PGL_2` modulo `lambda | ell` has order above 5.
pub fn certify_not_exotic(ell: u64, lambda: PrimeLabel, ds: &Dataset) -> Option<Certificate> {
    let k0 = ds.spec.k0();
    ds.exact_records().filter(|(r, _)| r.p != ell).find_map(|(r, c)| {
        let det = r.prime_norm().pow(k0 - 1);
        let (cb, db) = reduce_pair(c, &det, ell, lambda).ok()?;
        let order = projective_frobenius_order(&cb, &db).ok()?.exact()?;
        (order > 5).then(|| Certificate::ExoticOrderAt {
            ell,
            lambda: lambda.as_str().to_string(),
            p: r.p,
            label: r.label.as_str().to_string(),
            trace: c.to_string(),
            det: det.to_string(),
            order: order as u64,
        })
    })
}

/// The `sqrt(D_E)`-coordinate of `c^2`, as a reduced fraction.
pub fn inner_twist_coordinate(c: &QFElem) -> (BigInt, BigInt) {
    let e = c.field();
    let (x, y) = c.coords();
    // c = (x + y sqrt m)/2; the sqrt m coefficient of c^2 is xy/2, and
    // sqrt D = 2 sqrt m when D = 4m
    let den = BigInt::from(if e.discriminant() == e.radicand() { 2 } else { 4 });
    let num = x * y;
    let g = num.gcd(&den);
    if g.is_zero() {
        return (BigInt::zero(), BigInt::one());
    }
    (num / &g, den / g)
}

fn format_ratio(num: &BigInt, den: &BigInt) -> String {
    if den.is_one() {
        num.to_string()
    } else {
        format!("{num}/{den}")
    }
}

/// Primes inert in `E` at which the image may be an inner twist.
pub fn inner_twist_candidates(ds: &Dataset) -> Result<CandidateSet, BoundsError> {
    let spec = &ds.spec;
    let e = spec.coeff_field();
    let mut set = CandidateSet::seeded(&structural_primes(spec));
    let mut coords = Vec::new();
    for (r, c) in ds.exact_records() {
        let (num, den) = inner_twist_coordinate(c);
        if !num.is_zero() {
            coords.push((r, c, num, den));
        }
    }
    if ds.exact_records().next().is_none() {
        return Err(BoundsError::NoExactRecords);
    }
    if coords.is_empty() {
        set.unbounded = Some("every exact record has v = 0".into());
        return Ok(set);
    }
    let sets: Vec<BTreeSet<u64>> = coords
        .iter()
        .map(|(r, _, num, _)| {
            let mut s = prime_set(num).unwrap_or_default();
            s.insert(r.p);
            s
        })
        .collect();
    for l in intersect(&sets).unwrap() {
        if e.splitting_type(l) == Splitting::Inert {
            set.add_candidate(l, "divides v at every exact record");
        }
    }
    let (r, c, num, den) = coords.iter().min_by_key(|(_, _, n, _)| n.abs()).unwrap();
    set.certificates.push(Certificate::InnerTwistCoordinate {
        ell: None,
        p: r.p,
        label: r.label.as_str().to_string(),
        trace: c.to_string(),
        v: format_ratio(num, den),
    });
    Ok(set)
}

/// The exact record excluding an inner twist at `ell`, if any.
pub fn certify_no_inner_twist(ell: u64, ds: &Dataset) -> Option<Certificate> {
    if ds.spec.coeff_field().splitting_type(ell) != Splitting::Inert {
        return None;
    }
    ds.exact_records().filter(|(r, _)| r.p != ell).find_map(|(r, c)| {
        let (num, den) = inner_twist_coordinate(c);
        (!num.is_zero() && !(&num % ell).is_zero()).then(|| Certificate::InnerTwistCoordinate {
            ell: Some(ell),
            p: r.p,
            label: r.label.as_str().to_string(),
            trace: c.to_string(),
            v: format_ratio(&num, &den),
        })
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageDescriptor {
    pub det_exponent: u32,
    pub coeff_disc: i64,
    pub modulus: u64,
    pub split_classes: Vec<u64>,
    pub split_rule: String,
    pub split_shape: String,
    pub inert_shape: String,
    /// Primes ramified in `E`, where the residue degree is 1.
    pub ramified: Vec<u64>,
}

fn det_condition(m: u32) -> String {
    if m == 1 {
        "F_l^x".to_string()
    } else {
        format!("(F_l^x)^{m}")
    }
}

/// Expected image for primes outside the exceptional set.
pub fn image_descriptor(spec: &NewformSpec) -> ImageDescriptor {
    let m = spec.k0() - 1;
    let d = spec.coeff_disc;
    let modulus = d.unsigned_abs();
    let classes = split_congruence_classes(d);
    ImageDescriptor {
        det_exponent: m,
        coeff_disc: d,
        modulus,
        split_rule: format_classes(&classes, modulus),
        split_classes: classes,
        split_shape: format!("{{g in GL2(F_l) : det g in {}}}", det_condition(m)),
        inert_shape: format!("{{g in GL2(F_l^2) : det g in {}}}", det_condition(m)),
        ramified: arith::prime_divisors(&BigInt::from(d)).iter().filter_map(|p| p.to_u64()).collect(),
    }
}
