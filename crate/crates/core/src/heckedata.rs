//! Newform descriptions and Hecke eigenvalue tables: the `.hmf` text format,
//! validation, canonical printing and a JSON importer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::arith;
use crate::quadfield::{PrimeLabel, QFElem, QFIdeal, QuadField, Splitting};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DataError {
    #[error("line {line}, column {column}: expected {expected}")]
    Syntax { line: usize, column: usize, expected: String },
    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Semantic { line: Option<usize>, message: String },
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
}

fn semantic(line: Option<usize>, message: impl Into<String>) -> DataError {
    DataError::Semantic { line, message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Character {
    Trivial,
}

impl Character {
    pub fn parse(s: &str) -> Option<Self> {
        (s == "trivial").then_some(Character::Trivial)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("trivial")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewformSpec {
    pub base_disc: i64,
    pub weight: (u32, u32),
    pub level: QFIdeal,
    /// Generator of the level as written in the source, when one was given.
    pub level_generator: Option<QFElem>,
    pub character: Character,
    pub coeff_disc: i64,
}

impl NewformSpec {
    pub fn base_field(&self) -> QuadField {
        self.level.field()
    }

    pub fn coeff_field(&self) -> QuadField {
        QuadField::from_discriminant(self.coeff_disc).expect("validated coefficient discriminant")
    }

    pub fn k0(&self) -> u32 {
        self.weight.0.max(self.weight.1)
    }

    pub fn level_norm(&self) -> BigInt {
        self.level.norm()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Exact(QFElem),
    Norm(BigInt),
    FactorSet(BTreeSet<u64>),
}

impl Payload {
    /// `Nm_{E/Q}` of the eigenvalue, when known.
    pub fn norm(&self) -> Option<BigInt> {
        match self {
            Payload::Exact(c) => Some(c.norm()),
            Payload::Norm(n) => Some(n.clone()),
            Payload::FactorSet(_) => None,
        }
    }

    /// Whether the eigenvalue is known to be nonzero.
    pub fn is_nonzero(&self) -> bool {
        match self {
            Payload::Exact(c) => !c.is_zero(),
            Payload::Norm(n) => !n.is_zero(),
            Payload::FactorSet(_) => true,
        }
    }

    /// Rational primes dividing the norm (requires a nonzero eigenvalue).
    pub fn norm_primes(&self) -> Option<BTreeSet<u64>> {
        match self {
            Payload::FactorSet(s) => Some(s.clone()),
            _ => {
                let n = self.norm()?;
                if n.is_zero() {
                    return None;
                }
                arith::prime_divisors(&n).iter().map(|p| p.to_u64()).collect()
            }
        }
    }

    pub fn exact(&self) -> Option<&QFElem> {
        match self {
            Payload::Exact(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenRecord {
    pub p: u64,
    pub label: PrimeLabel,
    pub payload: Payload,
}

impl EigenRecord {
    /// The prime ideal of the base field this record refers to.
    pub fn prime(&self, field: &QuadField) -> Option<QFIdeal> {
        crate::quadfield::prime_with_label(self.p, self.label, field)
    }

    /// `Nm(pi)`.
    pub fn prime_norm(&self) -> BigInt {
        match self.label {
            PrimeLabel::Inert => BigInt::from(self.p) * self.p,
            _ => BigInt::from(self.p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub spec: NewformSpec,
    /// Sorted by `(p, label)`.
    pub records: Vec<EigenRecord>,
    pub extensions: Option<Vec<QFElem>>,
}

impl Dataset {
    pub fn new(spec: NewformSpec, mut records: Vec<EigenRecord>, extensions: Option<Vec<QFElem>>) -> Self {
        records.sort_by_key(|r| (r.p, r.label));
        Dataset { spec, records, extensions }
    }

    pub fn exact_records(&self) -> impl Iterator<Item = (&EigenRecord, &QFElem)> {
        self.records.iter().filter_map(|r| r.payload.exact().map(|c| (r, c)))
    }

    pub fn record(&self, p: u64, label: PrimeLabel) -> Option<&EigenRecord> {
        self.records.iter().find(|r| r.p == p && r.label == label)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{s}: {}", self.message)
    }
}

/// Consistency checks; an empty list means the dataset is clean.
pub fn validate(ds: &Dataset) -> Vec<Finding> {
    let mut out = Vec::new();
    let err = |m: String| Finding { severity: Severity::Error, message: m };
    let spec = &ds.spec;
    let (k1, k2) = spec.weight;
    if k1 < 2 || k2 < 2 {
        out.push(err(format!("weights must be at least 2, got ({k1},{k2})")));
    }
    if k1 % 2 != k2 % 2 {
        out.push(err(format!("weights ({k1},{k2}) have different parity")));
    }
    let field = spec.base_field();
    let level_norm = spec.level_norm();
    let k0 = spec.k0();
    let mut seen = BTreeSet::new();
    for r in &ds.records {
        let tag = format!("record ({}, {})", r.p, r.label);
        if !seen.insert((r.p, r.label)) {
            out.push(err(format!("{tag} is duplicated")));
        }
        if !arith::is_prime_u64(r.p) {
            out.push(err(format!("{tag}: {} is not prime", r.p)));
            continue;
        }
        if (&level_norm % r.p).is_zero() {
            out.push(err(format!("{tag}: p divides the level norm {level_norm}")));
        }
        let expected = match field.splitting_type(r.p) {
            Splitting::Split => [PrimeLabel::A, PrimeLabel::B].contains(&r.label),
            Splitting::Inert => r.label == PrimeLabel::Inert,
            Splitting::Ramified => r.label == PrimeLabel::Ramified,
        };
        if !expected {
            out.push(err(format!(
                "{tag}: tag inconsistent with splitting ({:?}) of {} in the base field",
                field.splitting_type(r.p),
                r.p
            )));
        }
        if let Some(c) = r.payload.exact() {
            // |sigma(c)| <= 2 Nm(pi)^((k0 - 1)/2) at both embeddings
            let bound = 2.0 * r.prime_norm().to_f64().unwrap().powf((k0 as f64 - 1.0) / 2.0);
            let (x, y) = c.coords();
            let sm = (c.field().radicand() as f64).sqrt();
            let (x, y) = (x.to_f64().unwrap(), y.to_f64().unwrap());
            let worst = ((x + y * sm).abs()).max((x - y * sm).abs()) / 2.0;
            if worst > bound * (1.0 + 1e-12) {
                out.push(Finding {
                    severity: Severity::Warning,
                    message: format!("{tag}: eigenvalue {c} exceeds the Deligne bound {bound:.3}"),
                });
            }
        }
        if let Payload::FactorSet(s) = &r.payload {
            if let Some(q) = s.iter().find(|q| !arith::is_prime_u64(**q)) {
                out.push(err(format!("{tag}: factor set entry {q} is not prime")));
            }
        }
    }
    if let Some(exts) = &ds.extensions {
        for b in exts {
            if b.is_zero() {
                out.push(err("extension element 0 does not define a quadratic extension".into()));
            }
        }
    }
    out
}

fn check_disc(d: i64, line: usize, what: &str) -> Result<(), DataError> {
    if d > 1 && arith::is_fundamental_discriminant(d) {
        Ok(())
    } else {
        Err(semantic(Some(line), format!("{what} {d} is not a real quadratic fundamental discriminant")))
    }
}

fn parse_weight(s: &str) -> Option<(u32, u32)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn parse_level(field: QuadField, s: &str) -> Result<(QFIdeal, Option<QFElem>), String> {
    if s.trim_start().starts_with('[') {
        return QFIdeal::parse(field, s).map(|i| (i, None)).map_err(|e| e.to_string());
    }
    let g = field.parse_elem(s).map_err(|e| e.to_string())?;
    if g.is_zero() {
        return Err("level generator is zero".into());
    }
    let ideal = QFIdeal::principal(&g).map_err(|e| e.to_string())?;
    Ok((ideal, Some(g)))
}

/// Strip a trailing comment; `#` never occurs inside literals.
fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn col_of(line: &str, sub: &str) -> usize {
    let offset = sub.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

/// Parse and validate; error-level findings become `Semantic` errors.
pub fn parse_newform_file(text: &str) -> Result<Dataset, DataError> {
    let ds = parse_unchecked(text)?;
    if let Some(f) = validate(&ds).into_iter().find(|f| f.severity == Severity::Error) {
        return Err(semantic(None, f.message));
    }
    Ok(ds)
}

/// Parse without the dataset-level consistency checks.
pub fn parse_unchecked(text: &str) -> Result<Dataset, DataError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Form,
        Eigen,
        Ext,
    }
    let mut section = Section::None;
    let mut form: BTreeMap<String, (usize, usize, String)> = BTreeMap::new();
    let mut raw_records: Vec<(usize, &str, &str)> = Vec::new();
    let mut raw_exts: Vec<(usize, usize, String)> = Vec::new();
    let mut saw_ext_section = false;

    for (idx, full) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(full);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('[') {
            section = match trimmed {
                "[form]" => Section::Form,
                "[eigenvalues]" => Section::Eigen,
                "[extensions]" => {
                    saw_ext_section = true;
                    Section::Ext
                }
                _ => {
                    return Err(DataError::Syntax {
                        line: lineno,
                        column: col_of(full, trimmed),
                        expected: "section header [form], [eigenvalues] or [extensions]".into(),
                    })
                }
            };
            continue;
        }
        match section {
            Section::None => {
                return Err(DataError::Syntax {
                    line: lineno,
                    column: col_of(full, trimmed),
                    expected: "section header [form]".into(),
                })
            }
            Section::Form | Section::Ext => {
                let Some((k, v)) = trimmed.split_once('=') else {
                    return Err(DataError::Syntax {
                        line: lineno,
                        column: col_of(full, trimmed) + trimmed.chars().count(),
                        expected: "'=' after key".into(),
                    });
                };
                let key = k.trim();
                let value = v.trim();
                let vcol = col_of(full, value);
                if section == Section::Ext {
                    if key != "beta" {
                        return Err(DataError::Syntax {
                            line: lineno,
                            column: col_of(full, trimmed),
                            expected: "key 'beta'".into(),
                        });
                    }
                    raw_exts.push((lineno, vcol, value.to_string()));
                    continue;
                }
                const KEYS: [&str; 5] = ["base_disc", "weight", "level", "character", "coeff_disc"];
                if !KEYS.contains(&key) {
                    return Err(DataError::Syntax {
                        line: lineno,
                        column: col_of(full, trimmed),
                        expected: format!("one of the keys {}", KEYS.join(", ")),
                    });
                }
                if form.insert(key.to_string(), (lineno, vcol, value.to_string())).is_some() {
                    return Err(semantic(Some(lineno), format!("key {key} given twice")));
                }
            }
            Section::Eigen => raw_records.push((lineno, full, trimmed)),
        }
    }

    let get = |k: &str| -> Result<&(usize, usize, String), DataError> {
        form.get(k).ok_or_else(|| semantic(None, format!("[form] is missing the key {k}")))
    };
    let int_value = |k: &str| -> Result<(usize, i64), DataError> {
        let (l, c, v) = get(k)?;
        v.parse::<i64>().map(|x| (*l, x)).map_err(|_| DataError::Syntax {
            line: *l,
            column: *c,
            expected: "an integer".into(),
        })
    };
    let (bl, base_disc) = int_value("base_disc")?;
    check_disc(base_disc, bl, "base_disc")?;
    let (cl, coeff_disc) = int_value("coeff_disc")?;
    check_disc(coeff_disc, cl, "coeff_disc")?;
    let base = QuadField::from_discriminant(base_disc).unwrap();
    let coeff = QuadField::from_discriminant(coeff_disc).unwrap();
    let (wl, wc, wv) = get("weight")?;
    let weight = parse_weight(wv).ok_or_else(|| DataError::Syntax {
        line: *wl,
        column: *wc,
        expected: "weight k1,k2".into(),
    })?;
    let (ll, lc, lv) = get("level")?;
    let (level, level_generator) = parse_level(base, lv).map_err(|e| DataError::Syntax {
        line: *ll,
        column: *lc,
        expected: format!("element literal or [a, b+w; c] ({e})"),
    })?;
    let (chl, chc, chv) = get("character")?;
    let character = Character::parse(chv).ok_or_else(|| DataError::Syntax {
        line: *chl,
        column: *chc,
        expected: "character 'trivial'".into(),
    })?;
    let spec = NewformSpec { base_disc, weight, level, level_generator, character, coeff_disc };

    let mut records = Vec::new();
    for (lineno, full, trimmed) in raw_records {
        records.push(parse_record_line(lineno, full, trimmed, coeff)?);
    }
    let extensions = if saw_ext_section {
        let mut v = Vec::new();
        for (l, c, text) in raw_exts {
            v.push(base.parse_elem(&text).map_err(|_| DataError::Syntax {
                line: l,
                column: c,
                expected: "element literal of the base field".into(),
            })?);
        }
        Some(v)
    } else {
        None
    };
    Ok(Dataset::new(spec, records, extensions))
}

fn parse_record_line(lineno: usize, full: &str, trimmed: &str, coeff: QuadField) -> Result<EigenRecord, DataError> {
    let p_str = trimmed.split(char::is_whitespace).next().unwrap_or("");
    let p: u64 = p_str.parse().map_err(|_| DataError::Syntax {
        line: lineno,
        column: col_of(full, p_str),
        expected: "a rational prime".into(),
    })?;
    let rest = trimmed[p_str.len()..].trim_start();
    let (tag_str, payload_str) = match rest.split_once(char::is_whitespace) {
        Some((t, pl)) => (t, pl.trim()),
        None => (rest, ""),
    };
    let tag_col =
        if tag_str.is_empty() { col_of(full, trimmed) + trimmed.chars().count() } else { col_of(full, tag_str) };
    let label = PrimeLabel::parse(tag_str).ok_or_else(|| DataError::Syntax {
        line: lineno,
        column: tag_col,
        expected: "tag split:A, split:B, inert or ramified".into(),
    })?;
    let pcol = if payload_str.is_empty() { tag_col + tag_str.chars().count() } else { col_of(full, payload_str) };
    let bad = |what: &str| DataError::Syntax { line: lineno, column: pcol, expected: what.into() };
    let (kind, value) =
        payload_str.split_once('=').ok_or_else(|| bad("payload value=..., norm=... or norm_factors=..."))?;
    let value = value.trim();
    let payload = match kind.trim() {
        "value" => {
            Payload::Exact(coeff.parse_elem(value).map_err(|_| bad("element literal of the coefficient field"))?)
        }
        "norm" => Payload::Norm(value.parse().map_err(|_| bad("an integer norm"))?),
        "norm_factors" => {
            let mut s = BTreeSet::new();
            for item in value.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                s.insert(item.parse::<u64>().map_err(|_| bad("comma-separated primes"))?);
            }
            Payload::FactorSet(s)
        }
        _ => return Err(bad("payload value=..., norm=... or norm_factors=...")),
    };
    Ok(EigenRecord { p, label, payload })
}

/// Canonical text form; `parse_unchecked(&print_dataset(ds)) == ds`.
pub fn print_dataset(ds: &Dataset) -> String {
    let mut s = String::new();
    let spec = &ds.spec;
    let level = match &spec.level_generator {
        Some(g) => g.to_string(),
        None => spec.level.to_string(),
    };
    writeln!(s, "[form]").unwrap();
    writeln!(s, "base_disc  = {}", spec.base_disc).unwrap();
    writeln!(s, "weight     = {},{}", spec.weight.0, spec.weight.1).unwrap();
    writeln!(s, "level      = {level}").unwrap();
    writeln!(s, "character  = {}", spec.character).unwrap();
    writeln!(s, "coeff_disc = {}", spec.coeff_disc).unwrap();
    writeln!(s, "\n[eigenvalues]").unwrap();
    for r in &ds.records {
        let payload = match &r.payload {
            Payload::Exact(c) => format!("value={c}"),
            Payload::Norm(n) => format!("norm={n}"),
            Payload::FactorSet(f) => {
                format!("norm_factors={}", f.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
            }
        };
        writeln!(s, "{:<6} {:<9} {payload}", r.p, r.label.as_str()).unwrap();
    }
    if let Some(exts) = &ds.extensions {
        writeln!(s, "\n[extensions]").unwrap();
        for b in exts {
            writeln!(s, "beta = {b}").unwrap();
        }
    }
    s
}

/// Import the JSON shape
///
/// ```text
/// { "field_label": "2.2.5.1", "weight": [2, 2],
///   "level": { "norm": 475, "generator": [u, v] },
///   "hecke_field": { "degree": 2, "disc": 24 },
///   "hecke_eigenvalues": [ { "p": 11, "tag": "split:A", "value": [u, v] } ],
///   "extensions": [[u, v]] }
/// ```
///
/// where coordinate pairs are in the integral basis `(1, omega)`.
pub fn import_lmfdb_json(text: &str) -> Result<Dataset, DataError> {
    use serde_json::Value;
    let v: Value = serde_json::from_str(text).map_err(|e| DataError::Syntax {
        line: e.line(),
        column: e.column(),
        expected: format!("JSON ({e})"),
    })?;
    let shape = |m: &str| semantic(None, m.to_string());
    let obj = v.as_object().ok_or_else(|| shape("top-level JSON object"))?;

    let label = obj.get("field_label").and_then(Value::as_str).ok_or_else(|| shape("missing field_label"))?;
    let parts: Vec<&str> = label.split('.').collect();
    if parts.len() != 4 || parts[0] != "2" || parts[1] != "2" {
        return Err(DataError::UnsupportedShape(format!("field label {label} is not a real quadratic field")));
    }
    let base_disc: i64 = parts[2].parse().map_err(|_| shape("field_label discriminant"))?;
    let base = QuadField::from_discriminant(base_disc)
        .map_err(|_| semantic(None, format!("{base_disc} is not a fundamental discriminant")))?;

    let weight: Vec<u32> = obj
        .get("weight")
        .and_then(Value::as_array)
        .ok_or_else(|| shape("missing weight list"))?
        .iter()
        .map(|w| w.as_u64().map(|x| x as u32))
        .collect::<Option<_>>()
        .ok_or_else(|| shape("weight entries must be integers"))?;
    if weight.len() != 2 {
        return Err(DataError::UnsupportedShape(format!("weight list of length {}", weight.len())));
    }

    let hf = obj.get("hecke_field").and_then(Value::as_object).ok_or_else(|| shape("missing hecke_field"))?;
    let degree = hf.get("degree").and_then(Value::as_u64).ok_or_else(|| shape("hecke_field.degree"))?;
    if degree != 2 {
        return Err(DataError::UnsupportedShape(format!("Hecke field of degree {degree}")));
    }
    let coeff_disc = hf.get("disc").and_then(Value::as_i64).ok_or_else(|| shape("hecke_field.disc"))?;
    let coeff = QuadField::from_discriminant(coeff_disc)
        .map_err(|_| semantic(None, format!("{coeff_disc} is not a real quadratic discriminant")))?;

    let pair = |x: &Value, f: QuadField, what: &str| -> Result<QFElem, DataError> {
        let a = x.as_array().filter(|a| a.len() == 2).ok_or_else(|| shape(what))?;
        let u = a[0].as_i64().ok_or_else(|| shape(what))?;
        let w = a[1].as_i64().ok_or_else(|| shape(what))?;
        Ok(f.from_omega_coords(BigInt::from(u), BigInt::from(w)))
    };

    let level_obj = obj.get("level").and_then(Value::as_object).ok_or_else(|| shape("missing level"))?;
    let gen = pair(level_obj.get("generator").ok_or_else(|| shape("level.generator"))?, base, "level.generator pair")?;
    let level = QFIdeal::principal(&gen).map_err(|e| semantic(None, e.to_string()))?;
    if let Some(n) = level_obj.get("norm").and_then(Value::as_u64) {
        if level.norm() != BigInt::from(n) {
            return Err(semantic(None, format!("level norm {n} does not match the generator")));
        }
    }
    let character = match obj.get("character").and_then(Value::as_str) {
        None | Some("trivial") => Character::Trivial,
        Some(other) => return Err(DataError::UnsupportedShape(format!("character {other}"))),
    };

    let mut records = Vec::new();
    for item in obj.get("hecke_eigenvalues").and_then(Value::as_array).ok_or_else(|| shape("hecke_eigenvalues"))? {
        let p = item.get("p").and_then(Value::as_u64).ok_or_else(|| shape("eigenvalue entry p"))?;
        let tag = item.get("tag").and_then(Value::as_str).ok_or_else(|| shape("eigenvalue entry tag"))?;
        let label = PrimeLabel::parse(tag).ok_or_else(|| semantic(None, format!("unknown tag {tag}")))?;
        let value = pair(item.get("value").ok_or_else(|| shape("eigenvalue entry value"))?, coeff, "value pair")?;
        records.push(EigenRecord { p, label, payload: Payload::Exact(value) });
    }
    let extensions = match obj.get("extensions") {
        None => None,
        Some(list) => Some(
            list.as_array()
                .ok_or_else(|| shape("extensions list"))?
                .iter()
                .map(|x| pair(x, base, "extension pair"))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let spec = NewformSpec {
        base_disc,
        weight: (weight[0], weight[1]),
        level,
        level_generator: Some(gen),
        character,
        coeff_disc,
    };
    let ds = Dataset::new(spec, records, extensions);
    if let Some(f) = validate(&ds).into_iter().find(|f| f.severity == Severity::Error) {
        return Err(semantic(None, f.message));
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LEVEL1: &str = include_str!("../fixtures/q257_level1.hmf");
    const WEIGHT24: &str = include_str!("../fixtures/q5_weight24.hmf");
    const LEVEL40: &str = include_str!("../fixtures/q5_level40.hmf");
    const LEVEL40_JSON: &str = include_str!("../fixtures/q5_level40_lmfdb.json");

    #[test]
    fn fixtures_parse() {
        let w24 = parse_newform_file(WEIGHT24).unwrap();
        assert_eq!(w24.spec.base_disc, 5);
        assert_eq!(w24.spec.weight, (2, 4));
        assert_eq!(w24.spec.coeff_disc, 5);
        assert_eq!(w24.spec.level_generator, Some(w24.spec.base_field().int(30)));
        assert_eq!(w24.extensions.as_ref().map(Vec::len), Some(4));

        let d = parse_newform_file(LEVEL40).unwrap();
        assert_eq!(d.spec.level_norm(), BigInt::from(475));
        let f = d.spec.base_field();
        let sqrt5 = QFIdeal::principal(&f.sqrt_m()).unwrap();
        let expected = sqrt5.mul(&sqrt5).mul(&QFIdeal::principal(&f.from_ints(8, 3)).unwrap());
        assert_eq!(d.spec.level, expected);

        let o = parse_newform_file(LEVEL1).unwrap();
        assert!(validate(&o).is_empty());
        assert_eq!(o.spec.level_norm(), BigInt::from(1));
    }

    #[test]
    fn empty_table() {
        let text = "[form]\nbase_disc=5\nweight=2,2\nlevel=1\ncharacter=trivial\ncoeff_disc=5\n[eigenvalues]\n";
        let ds = parse_newform_file(text).unwrap();
        assert!(ds.records.is_empty());
        assert!(ds.extensions.is_none());
    }

    #[test]
    fn validation_findings() {
        let base = parse_newform_file(LEVEL40).unwrap();
        let mut ds = base.clone();
        ds.records.push(EigenRecord { p: 19, label: PrimeLabel::A, payload: Payload::Norm(BigInt::from(4)) });
        assert!(validate(&ds).iter().any(|f| f.severity == Severity::Error && f.message.contains("level norm")));

        let mut ds = base.clone();
        ds.records.retain(|r| r.p != 11);
        ds.records.push(EigenRecord { p: 11, label: PrimeLabel::Inert, payload: Payload::Norm(BigInt::from(4)) });
        assert!(validate(&ds).iter().any(|f| f.message.contains("inconsistent")));

        let mut ds = base.clone();
        ds.records.push(ds.records[0].clone());
        assert!(validate(&ds).iter().any(|f| f.message.contains("duplicated")));

        let mut ds = base.clone();
        let e = ds.spec.coeff_field();
        ds.records.push(EigenRecord { p: 11, label: PrimeLabel::B, payload: Payload::Exact(e.int(100)) });
        let found = validate(&ds);
        assert!(found.iter().any(|f| f.severity == Severity::Warning && f.message.contains("Deligne")));

        let mut ds = base;
        ds.spec.weight = (2, 3);
        assert!(validate(&ds).iter().any(|f| f.message.contains("parity")));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let text = "[form]\nbase_disc = 5\nweight = 2;4\nlevel=1\ncharacter=trivial\ncoeff_disc=5\n";
        assert!(matches!(parse_unchecked(text), Err(DataError::Syntax { line: 3, column: 10, .. })));
        let text = "[form]\nbase_disc = 5\n";
        assert!(matches!(parse_unchecked(text), Err(DataError::Semantic { line: None, .. })));
        let text = "[form]\nbase_disc=5\nweight=2,4\nlevel=30\ncharacter=trivial\ncoeff_disc=5\n[eigenvalues]\n11   split:C  norm=4\n";
        match parse_unchecked(text) {
            Err(DataError::Syntax { line: 8, column: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
        let text = "[form]\nbase_disc=5\nweight=2,4\nlevel=30\ncharacter=trivial\ncoeff_disc=5\n[eigenvalues]\n11 split:A value=(1+2*s)/2\n";
        assert!(matches!(parse_unchecked(text), Err(DataError::Syntax { line: 8, column: 12, .. })));
        assert!(matches!(parse_unchecked("garbage"), Err(DataError::Syntax { line: 1, column: 1, .. })));
        let text = "[form]\nbase_disc=5\nweight=2,4\nlevel=30\ncharacter=nebentypus\ncoeff_disc=5\n";
        assert!(matches!(parse_unchecked(text), Err(DataError::Syntax { line: 5, .. })));
        let text = "[form]\nbase_disc=12\nweight=2,4\nlevel=30\ncharacter=trivial\ncoeff_disc=6\n";
        assert!(matches!(parse_unchecked(text), Err(DataError::Semantic { line: Some(6), .. })));
    }

    #[test]
    fn canonical_print_round_trips_fixtures() {
        for text in [WEIGHT24, LEVEL40, LEVEL1] {
            let ds = parse_newform_file(text).unwrap();
            let printed = print_dataset(&ds);
            assert_eq!(parse_newform_file(&printed).unwrap(), ds);
            assert_eq!(print_dataset(&parse_newform_file(&printed).unwrap()), printed);
        }
    }

    #[test]
    fn json_import() {
        let from_json = import_lmfdb_json(LEVEL40_JSON).unwrap();
        let from_text = parse_newform_file(LEVEL40).unwrap();
        let exact_only = Dataset::new(
            from_text.spec.clone(),
            from_text.exact_records().map(|(r, _)| r.clone()).collect(),
            from_text.extensions.clone(),
        );
        assert_eq!(from_json, exact_only);

        let cubic = r#"{"field_label":"2.2.5.1","weight":[2,2],"level":{"norm":1,"generator":[1,0]},
            "hecke_field":{"degree":3,"disc":49},"hecke_eigenvalues":[]}"#;
        assert!(matches!(import_lmfdb_json(cubic), Err(DataError::UnsupportedShape(_))));
        let empty = r#"{"field_label":"2.2.5.1","weight":[2,2],"level":{"norm":1,"generator":[1,0]},
            "hecke_field":{"degree":2,"disc":5},"hecke_eigenvalues":[]}"#;
        assert!(import_lmfdb_json(empty).unwrap().records.is_empty());
        assert!(matches!(import_lmfdb_json("{\"a\": }"), Err(DataError::Syntax { line: 1, .. })));
    }

    fn arb_dataset() -> impl Strategy<Value = Dataset> {
        let fields = prop::sample::select(vec![(5i64, 5i64), (13, 24), (257, 13), (8, 12)]);
        (
            fields,
            (2u32..6, 0u32..3),
            prop::collection::vec((0usize..40, 0u8..3, -50i64..50, -50i64..50, any::<bool>()), 0..12),
            prop::option::of(prop::collection::vec((-9i64..9, 1i64..9), 0..4)),
            any::<bool>(),
        )
            .prop_map(|((df, de), (k, dk), recs, exts, level_as_ideal)| {
                let base = QuadField::from_discriminant(df).unwrap();
                let coeff = QuadField::from_discriminant(de).unwrap();
                let gen = base.from_ints(3, 1);
                let level = QFIdeal::principal(&gen).unwrap();
                let primes: Vec<u64> =
                    arith::primes_up_to(200).into_iter().filter(|p| !(level.norm() % *p).is_zero()).collect();
                let mut records = Vec::new();
                let mut seen = BTreeSet::new();
                for (pi, kind, x, y, b) in recs {
                    let p = primes[pi % primes.len()];
                    let label = match base.splitting_type(p) {
                        Splitting::Split if b => PrimeLabel::B,
                        Splitting::Split => PrimeLabel::A,
                        Splitting::Inert => PrimeLabel::Inert,
                        Splitting::Ramified => PrimeLabel::Ramified,
                    };
                    if !seen.insert((p, label)) {
                        continue;
                    }
                    let payload = match kind {
                        0 => Payload::Exact(coeff.from_omega_coords(BigInt::from(x), BigInt::from(y))),
                        1 => Payload::Norm(BigInt::from(x * y)),
                        _ => Payload::FactorSet(
                            arith::primes_up_to(50).into_iter().filter(|q| (x.unsigned_abs() + q) % 3 == 0).collect(),
                        ),
                    };
                    records.push(EigenRecord { p, label, payload });
                }
                let spec = NewformSpec {
                    base_disc: df,
                    weight: (k, k + 2 * dk),
                    level: level.clone(),
                    level_generator: if level_as_ideal { None } else { Some(gen) },
                    character: Character::Trivial,
                    coeff_disc: de,
                };
                let exts = exts.map(|v| v.into_iter().map(|(a, b)| base.from_ints(a, b)).collect());
                Dataset::new(spec, records, exts)
            })
    }

    proptest! {
        #[test]
        fn print_parse_identity(ds in arb_dataset()) {
            let printed = print_dataset(&ds);
            prop_assert_eq!(parse_unchecked(&printed).unwrap(), ds);
        }
    }
}
