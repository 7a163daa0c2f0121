//! Explicit subgroups of `GL_2(F_q)` for small `q` and their Dickson-type
//! classification.
//!
//! Field elements are indices `c0 + c1*l` into the residue-field model of
//! [`crate::residue`]; matrices pack four such indices into a `u32`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::arith;
use crate::residue::{FFElem, ResidueField};

pub const DEFAULT_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DicksonError {
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("element set is not closed under multiplication")]
    NotAGroup,
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),
    #[error("subgroup matches no classification branch")]
    Unclassified,
}

/// The closure cap, honouring `HMFIMAGE_CAP`.
pub fn cap_from_env() -> usize {
    std::env::var("HMFIMAGE_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_CAP)
}

/// `F_q` with full operation tables, `q` odd and at most 169.
#[derive(Clone, Debug)]
pub struct SmallField {
    model: ResidueField,
    q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl SmallField {
    pub fn new(q: usize) -> Result<Self, DicksonError> {
        let bad = || DicksonError::UnsupportedParams(format!("q = {q} (need an odd prime or odd prime square <= 169)"));
        if q > 169 || q.is_multiple_of(2) {
            return Err(bad());
        }
        let model = if arith::is_prime_u64(q as u64) {
            ResidueField::prime(q as u64).unwrap()
        } else {
            let l = (q as f64).sqrt().round() as u64;
            if l * l != q as u64 || !arith::is_prime_u64(l) {
                return Err(bad());
            }
            ResidueField::quadratic(l).unwrap()
        };
        let elems: Vec<FFElem> = (0..q).map(|i| Self::elem_of(&model, i)).collect();
        let index = |e: &FFElem| {
            let (c0, c1) = e.coords();
            (c0 + c1 * model.characteristic()) as u8
        };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = index(&elems[i].add(&elems[j]));
                mul[i * q + j] = index(&elems[i].mul(&elems[j]));
            }
        }
        let neg = elems.iter().map(|e| index(&e.neg())).collect();
        let inv = elems.iter().map(|e| e.inv().map(|x| index(&x)).unwrap_or(0)).collect();
        Ok(SmallField { model, q, add, mul, neg, inv })
    }

    fn elem_of(model: &ResidueField, i: usize) -> FFElem {
        let l = model.characteristic() as usize;
        model.from_coords((i % l) as u64, (i / l) as u64)
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.model.characteristic()
    }

    pub fn model(&self) -> ResidueField {
        self.model
    }

    pub fn elem(&self, i: u8) -> FFElem {
        Self::elem_of(&self.model, i as usize)
    }

    pub fn index(&self, e: &FFElem) -> u8 {
        let (c0, c1) = e.coords();
        (c0 + c1 * self.characteristic()) as u8
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    pub fn is_square(&self, a: u8) -> bool {
        self.elem(a).is_square()
    }

    /// Multiplicative order of a nonzero element.
    pub fn elem_order(&self, a: u8) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 1 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// A generator of `F_q^x`.
    pub fn primitive(&self) -> u8 {
        (2..self.q as u8).find(|&a| self.elem_order(a) == self.q - 1).unwrap_or(1)
    }

    /// Elements of the prime field.
    pub fn prime_subfield(&self) -> Vec<u8> {
        (0..self.characteristic() as u8).collect()
    }

    fn roots(&self, tr: u8, det: u8) -> Vec<u8> {
        (0..self.q as u8).filter(|&x| self.add(self.sub(self.mul(x, x), self.mul(tr, x)), det) == 0).collect()
    }
}

/// A packed 2x2 matrix `(a, b; c, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GL2Elem(pub u32);

impl GL2Elem {
    pub fn new(a: u8, b: u8, c: u8, d: u8) -> Self {
        GL2Elem(a as u32 | (b as u32) << 8 | (c as u32) << 16 | (d as u32) << 24)
    }

    pub fn entries(self) -> [u8; 4] {
        let v = self.0;
        [v as u8, (v >> 8) as u8, (v >> 16) as u8, (v >> 24) as u8]
    }

    pub fn identity() -> Self {
        GL2Elem::new(1, 0, 0, 1)
    }
}

impl SmallField {
    pub fn mat_mul(&self, x: GL2Elem, y: GL2Elem) -> GL2Elem {
        let [a, b, c, d] = x.entries();
        let [e, f, g, h] = y.entries();
        GL2Elem::new(
            self.add(self.mul(a, e), self.mul(b, g)),
            self.add(self.mul(a, f), self.mul(b, h)),
            self.add(self.mul(c, e), self.mul(d, g)),
            self.add(self.mul(c, f), self.mul(d, h)),
        )
    }

    pub fn det(&self, x: GL2Elem) -> u8 {
        let [a, b, c, d] = x.entries();
        self.sub(self.mul(a, d), self.mul(b, c))
    }

    pub fn trace(&self, x: GL2Elem) -> u8 {
        let [a, _, _, d] = x.entries();
        self.add(a, d)
    }

    pub fn mat_inv(&self, x: GL2Elem) -> GL2Elem {
        let [a, b, c, d] = x.entries();
        let di = self.inv(self.det(x));
        GL2Elem::new(self.mul(d, di), self.mul(self.neg(b), di), self.mul(self.neg(c), di), self.mul(a, di))
    }

    pub fn is_scalar(&self, x: GL2Elem) -> bool {
        let [a, b, c, d] = x.entries();
        b == 0 && c == 0 && a == d
    }

    pub fn scalar(&self, z: u8) -> GL2Elem {
        GL2Elem::new(z, 0, 0, z)
    }

    /// Representative of `x` modulo scalars: first nonzero entry scaled to 1.
    pub fn projective_key(&self, x: GL2Elem) -> GL2Elem {
        let e = x.entries();
        let lead = *e.iter().find(|&&v| v != 0).expect("invertible matrix");
        let s = self.inv(lead);
        GL2Elem::new(self.mul(e[0], s), self.mul(e[1], s), self.mul(e[2], s), self.mul(e[3], s))
    }

    /// Smallest `n` with `x^n` scalar.
    pub fn projective_elem_order(&self, x: GL2Elem) -> usize {
        let mut y = x;
        let mut n = 1;
        while !self.is_scalar(y) {
            y = self.mat_mul(y, x);
            n += 1;
        }
        n
    }

    pub fn parse_matrix(&self, text: &str) -> Result<GL2Elem, DicksonError> {
        let bad =
            || DicksonError::UnsupportedParams(format!("matrix {text:?}: need a,b,c,d with entries below {}", self.q));
        let v: Vec<usize> = text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        if v.len() != 4 || v.iter().any(|&x| x >= self.q) {
            return Err(bad());
        }
        let m = GL2Elem::new(v[0] as u8, v[1] as u8, v[2] as u8, v[3] as u8);
        if self.det(m) == 0 {
            return Err(DicksonError::UnsupportedParams(format!("matrix {text:?} is singular")));
        }
        Ok(m)
    }
}

/// The subgroup generated by `gens`, by breadth-first multiplication.
pub fn closure(field: &SmallField, gens: &[GL2Elem], cap: usize) -> Result<Vec<GL2Elem>, DicksonError> {
    let id = GL2Elem::identity();
    let mut seen: HashSet<GL2Elem> = HashSet::from([id]);
    let mut order = vec![id];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = field.mat_mul(x, g);
            if seen.insert(y) {
                if seen.len() > cap {
                    return Err(DicksonError::CapExceeded(cap));
                }
                order.push(y);
                queue.push_back(y);
            }
        }
    }
    Ok(order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    Reducible,
    DihedralSplitCartan,
    DihedralNonsplitCartan,
    ExceptionalA4,
    ExceptionalS4,
    ExceptionalA5,
    ContainsSL2,
    ScalarExtendedSL2,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubgroupClassification {
    pub tag: Tag,
    pub order: usize,
    pub projective_order: usize,
    pub det_image_order: usize,
}

impl fmt::Display for SubgroupClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} order={} projective_order={} det_image_order={}",
            self.tag, self.order, self.projective_order, self.det_image_order
        )
    }
}

/// Greedy generating set of `elems`, verifying that `elems` is a group.
fn generating_set(field: &SmallField, elems: &[GL2Elem]) -> Result<Vec<GL2Elem>, DicksonError> {
    let set: HashSet<GL2Elem> = elems.iter().copied().collect();
    if !set.contains(&GL2Elem::identity()) {
        return Err(DicksonError::NotAGroup);
    }
    let mut gens = Vec::new();
    let mut span: HashSet<GL2Elem> = HashSet::from([GL2Elem::identity()]);
    for &g in elems {
        if span.contains(&g) {
            continue;
        }
        gens.push(g);
        let sub = closure(field, &gens, set.len()).map_err(|_| DicksonError::NotAGroup)?;
        if sub.iter().any(|x| !set.contains(x)) {
            return Err(DicksonError::NotAGroup);
        }
        span = sub.into_iter().collect();
    }
    Ok(gens)
}

/// Whether the line through `v` is stable under `m`.
fn preserves_line(field: &SmallField, m: GL2Elem, v: (u8, u8)) -> bool {
    let [a, b, c, d] = m.entries();
    let w0 = field.add(field.mul(a, v.0), field.mul(b, v.1));
    let w1 = field.add(field.mul(c, v.0), field.mul(d, v.1));
    field.sub(field.mul(v.0, w1), field.mul(v.1, w0)) == 0
}

/// Common eigenvector over `F_{q^2}`, tested on the eigenlines of one
/// non-scalar element.
fn is_reducible(field: &SmallField, gens: &[GL2Elem]) -> bool {
    let Some(&g) = gens.iter().find(|&&g| !field.is_scalar(g)) else {
        return true;
    };
    let roots = field.roots(field.trace(g), field.det(g));
    if roots.is_empty() {
        // eigenlines are Galois conjugate; a rational matrix fixing one fixes
        // both, i.e. commutes with g
        return gens.iter().all(|&h| field.mat_mul(g, h) == field.mat_mul(h, g));
    }
    let [a, b, c, d] = g.entries();
    roots.iter().any(|&lam| {
        let v = if b != 0 || field.sub(lam, a) != 0 { (b, field.sub(lam, a)) } else { (field.sub(lam, d), c) };
        gens.iter().all(|&h| preserves_line(field, h, v))
    })
}

/// Whether the determinant-one part contains a conjugate of `SL_2(F_l)`,
/// searched among subgroups generated by transvections.
fn contains_subfield_sl2(field: &SmallField, sl: &[GL2Elem], l: usize) -> bool {
    let target = l * (l * l - 1);
    let two = 2 % l as u8;
    let unipotents: Vec<GL2Elem> =
        sl.iter().copied().filter(|&x| field.trace(x) == two && x != GL2Elem::identity()).collect();
    if unipotents.is_empty() {
        return false;
    }
    match closure(field, &unipotents, sl.len()) {
        Ok(u) if u.len() == target => return true,
        Ok(u) if u.len() < target => return false,
        _ => {}
    }
    for (i, &u1) in unipotents.iter().enumerate() {
        for &u2 in &unipotents[i + 1..] {
            if field.mat_mul(u1, u2) == field.mat_mul(u2, u1) {
                continue;
            }
            if let Ok(h) = closure(field, &[u1, u2], target) {
                if h.len() == target {
                    return true;
                }
            }
        }
    }
    false
}

/// Classify a subgroup of `GL_2(F_q)` given as its full element list.
pub fn classify(field: &SmallField, elems: &[GL2Elem]) -> Result<SubgroupClassification, DicksonError> {
    let gens = generating_set(field, elems)?;
    let q = field.order();
    let l = field.characteristic() as usize;
    let scalars = elems.iter().filter(|&&x| field.is_scalar(x)).count();
    let projective_order = elems.len() / scalars;
    let dets: HashSet<u8> = elems.iter().map(|&x| field.det(x)).collect();
    let result =
        |tag| Ok(SubgroupClassification { tag, order: elems.len(), projective_order, det_image_order: dets.len() });

    if is_reducible(field, &gens) {
        return result(Tag::Reducible);
    }
    let sl: Vec<GL2Elem> = elems.iter().copied().filter(|&x| field.det(x) == 1).collect();
    if sl.len() == q * (q * q - 1) {
        return result(Tag::ContainsSL2);
    }
    if q == l * l && contains_subfield_sl2(field, &sl, l) {
        // traces inside F_l mean the group is defined over F_l
        let rational = elems.iter().all(|&x| (field.trace(x) as usize) < l);
        return result(if rational { Tag::ContainsSL2 } else { Tag::ScalarExtendedSL2 });
    }

    let mut proj: Vec<GL2Elem> = elems.iter().map(|&x| field.projective_key(x)).collect();
    proj.sort();
    proj.dedup();
    let orders: Vec<usize> = proj.iter().map(|&x| field.projective_elem_order(x)).collect();
    let order_set: HashSet<usize> = orders.iter().copied().collect();
    let within = |allowed: &[usize]| order_set.iter().all(|o| allowed.contains(o));
    match projective_order {
        12 if within(&[1, 2, 3]) => return result(Tag::ExceptionalA4),
        24 if within(&[1, 2, 3, 4]) && order_set.contains(&4) => return result(Tag::ExceptionalS4),
        60 if within(&[1, 2, 3, 5]) && order_set.contains(&5) => return result(Tag::ExceptionalA5),
        _ => {}
    }

    // dihedral: a cyclic projective subgroup of index 2 whose complement
    // consists of involutions
    let n = *orders.iter().max().unwrap();
    if projective_order == 2 * n && n >= 2 {
        let (cyc_gen, _) = proj.iter().zip(&orders).find(|(_, &o)| o == n).unwrap();
        let mut cyclic: HashSet<GL2Elem> = HashSet::new();
        let mut y = *cyc_gen;
        for _ in 0..n {
            cyclic.insert(field.projective_key(y));
            y = field.mat_mul(y, *cyc_gen);
        }
        let outside_are_involutions = proj.iter().zip(&orders).all(|(x, &o)| cyclic.contains(x) || o == 2);
        if outside_are_involutions {
            let splits = |x: GL2Elem| !field.roots(field.trace(x), field.det(x)).is_empty();
            let split = if n == 2 { proj.iter().any(|&x| !field.is_scalar(x) && splits(x)) } else { splits(*cyc_gen) };
            return result(if split { Tag::DihedralSplitCartan } else { Tag::DihedralNonsplitCartan });
        }
    }
    Err(DicksonError::Unclassified)
}

/// `|{g in GL_2(F_{l^f}) : det g in (F_l^x)^m}|`.
pub fn expected_image_order(l: u64, f: u32, m: u64) -> u128 {
    let q = (l as u128).pow(f);
    let dets = (l - 1) / m.gcd(&(l - 1));
    q * (q * q - 1) * dets as u128
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Borel,
    SplitCartanNormalizer,
    NonsplitCartanNormalizer,
    SL2,
    /// `{g : det g in (F_l^x)^m}` inside `GL_2(F_q)`.
    DetPowerSubgroup(u64),
    /// `{g in F_q^x GL_2(F_l) : det g in (F_l^x)^m}` for `q = l^2`.
    ScalarExtended(u64),
}

impl ShapeKind {
    pub fn expected_tag(&self) -> Tag {
        match self {
            ShapeKind::Borel => Tag::Reducible,
            ShapeKind::SplitCartanNormalizer => Tag::DihedralSplitCartan,
            ShapeKind::NonsplitCartanNormalizer => Tag::DihedralNonsplitCartan,
            ShapeKind::SL2 | ShapeKind::DetPowerSubgroup(_) => Tag::ContainsSL2,
            ShapeKind::ScalarExtended(_) => Tag::ScalarExtendedSL2,
        }
    }
}

fn sl2_generators(basis: &[u8]) -> Vec<GL2Elem> {
    basis.iter().flat_map(|&x| [GL2Elem::new(1, x, 0, 1), GL2Elem::new(1, 0, x, 1)]).collect()
}

/// Generators realising the named subgroup.
pub fn construct_shape(kind: ShapeKind, field: &SmallField) -> Result<Vec<GL2Elem>, DicksonError> {
    let q = field.order();
    let l = field.characteristic() as usize;
    let g = field.primitive();
    let additive_basis: Vec<u8> = if q == l { vec![1] } else { vec![1, l as u8] };
    match kind {
        ShapeKind::Borel => Ok(vec![GL2Elem::new(g, 0, 0, 1), GL2Elem::new(1, 0, 0, g), GL2Elem::new(1, 1, 0, 1)]),
        ShapeKind::SplitCartanNormalizer => {
            Ok(vec![GL2Elem::new(g, 0, 0, 1), GL2Elem::new(1, 0, 0, g), GL2Elem::new(0, 1, 1, 0)])
        }
        ShapeKind::NonsplitCartanNormalizer => {
            let r = (2..q as u8).find(|&x| !field.is_square(x)).expect("odd q has a non-square");
            let target = q * q - 1;
            for u in 0..q as u8 {
                for v in 1..q as u8 {
                    let m = GL2Elem::new(u, field.mul(r, v), v, u);
                    if field.det(m) == 0 {
                        continue;
                    }
                    let mut y = m;
                    let mut n = 1;
                    while y != GL2Elem::identity() {
                        y = field.mat_mul(y, m);
                        n += 1;
                    }
                    if n == target {
                        return Ok(vec![m, GL2Elem::new(1, 0, 0, field.neg(1))]);
                    }
                }
            }
            unreachable!("F_{{q^2}} has a primitive element")
        }
        ShapeKind::SL2 => Ok(sl2_generators(&additive_basis)),
        ShapeKind::DetPowerSubgroup(m) => {
            if m == 0 {
                return Err(DicksonError::UnsupportedParams("m must be positive".into()));
            }
            let gl = (0..l as u8).find(|&x| x != 0 && field.elem_order(x) == l - 1).unwrap();
            let mut gens = sl2_generators(&additive_basis);
            let mut w = 1u8;
            for _ in 0..m {
                w = field.mul(w, gl);
            }
            gens.push(GL2Elem::new(w, 0, 0, 1));
            Ok(gens)
        }
        ShapeKind::ScalarExtended(m) => {
            if q == l || m == 0 {
                return Err(DicksonError::UnsupportedParams("scalar-extended shape needs q = l^2 and m > 0".into()));
            }
            let prime_units: Vec<u8> = (1..l as u8).collect();
            let mth_powers: HashSet<u8> =
                prime_units.iter().map(|&x| (0..m).fold(1u8, |acc, _| field.mul(acc, x))).collect();
            let mut gens = sl2_generators(&[1]);
            let mut span: HashSet<GL2Elem> = closure(field, &gens, usize::MAX)?.into_iter().collect();
            for z in 1..q as u8 {
                for &w in &prime_units {
                    let det = field.mul(field.mul(z, z), w);
                    if !mth_powers.contains(&det) {
                        continue;
                    }
                    let cand = GL2Elem::new(field.mul(z, w), 0, 0, z);
                    if span.contains(&cand) {
                        continue;
                    }
                    gens.push(cand);
                    span = closure(field, &gens, usize::MAX)?.into_iter().collect();
                }
            }
            Ok(gens)
        }
    }
}
