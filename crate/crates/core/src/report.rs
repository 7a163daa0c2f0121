//! The full pipeline and its report.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    self, certify_irreducible_charpoly, certify_no_inner_twist, certify_not_exotic, dihedral_candidates,
    enumerate_quadratic_extensions, exotic_candidates, image_descriptor, inner_twist_candidates, lambda_labels,
    rayclass_certificate, reducible_candidates_rayclass_method, reducible_candidates_unit_method, Certificate,
    FormContext, ImageDescriptor,
};
use crate::dickson::{self, ShapeKind, SmallField};
use crate::heckedata::Dataset;
use crate::inertia;
use crate::quadfield::{QFElem, Splitting};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExtensionPolicy {
    /// Pinned when the dataset carries an extension list, else conservative.
    #[default]
    Auto,
    /// Only extensions unramified above 2 (plus all of them when 2 divides
    /// the level norm).
    Strict,
    /// Every square class, 2-ramified ones included.
    Conservative,
    /// Exactly the dataset's `[extensions]` block.
    Pinned,
}

impl ExtensionPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            ExtensionPolicy::Auto => "auto",
            ExtensionPolicy::Strict => "strict",
            ExtensionPolicy::Conservative => "conservative",
            ExtensionPolicy::Pinned => "pinned",
        }
    }
}

impl std::str::FromStr for ExtensionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(ExtensionPolicy::Auto),
            "strict" => Ok(ExtensionPolicy::Strict),
            "conservative" => Ok(ExtensionPolicy::Conservative),
            "pinned" => Ok(ExtensionPolicy::Pinned),
            _ => Err(format!("unknown extension policy {s:?}")),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub extensions: ExtensionPolicy,
    /// When set, build the expected image at the smallest prime outside the
    /// bound and compare its order, within this closure cap.
    pub shape_check_cap: Option<usize>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("dataset has no [extensions] block to pin")]
    NoPinnedExtensions,
    #[error(transparent)]
    Bounds(#[from] bounds::BoundsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concern {
    Reducible,
    Dihedral,
    Exotic,
    InnerTwist,
}

impl Concern {
    pub fn name(&self) -> &'static str {
        match self {
            Concern::Reducible => "reducible",
            Concern::Dihedral => "dihedral",
            Concern::Exotic => "exotic",
            Concern::InnerTwist => "inner-twist",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSummary {
    #[serde(flatten)]
    pub context: FormContext,
    pub level_generator: Option<String>,
    pub records: usize,
    pub extension_policy: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub prime: u64,
    pub concern: Concern,
    /// Indices into the certificate list.
    pub certificates: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidates {
    pub reducible: Vec<u64>,
    pub rayclass: Option<Vec<u64>>,
    pub extensions: Vec<String>,
    pub dihedral: Vec<u64>,
    pub exotic: Vec<u64>,
    pub inner_twist: Option<Vec<u64>>,
    pub eliminated: Vec<Elimination>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalBound {
    pub primes: Vec<u64>,
    /// False when some concern left an unbounded set of primes open.
    pub complete: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeCheck {
    pub ell: u64,
    pub degree: u32,
    pub closure_order: Option<u64>,
    pub expected_order: u64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageSection {
    pub descriptor: ImageDescriptor,
    /// Primes outside the bound where an inner twist is not excluded; the
    /// image then lies in a twist of the stated group.
    pub inner_twist_open: Vec<u64>,
    pub inner_twist_note: Option<String>,
    pub inertial_types_split: Vec<String>,
    pub inertial_types_inert: Vec<String>,
    pub shape_check: Option<ShapeCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unresolved {
    pub prime: Option<u64>,
    pub concern: Concern,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImageReport {
    pub form: Option<FormSummary>,
    pub structural: BTreeMap<u64, String>,
    pub candidates: Candidates,
    pub certificates: Vec<Certificate>,
    pub exceptional_bound: ExceptionalBound,
    pub image: Option<ImageSection>,
    pub unresolved: Vec<Unresolved>,
}

impl ImageReport {
    /// 0 when nothing is unresolved, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.unresolved.is_empty() {
            0
        } else {
            2
        }
    }

    /// Primes listed as unresolved.
    pub fn unresolved_primes(&self) -> BTreeSet<u64> {
        self.unresolved.iter().filter_map(|u| u.prime).collect()
    }

    pub fn eliminated_primes(&self, concern: Concern) -> BTreeSet<u64> {
        self.candidates.eliminated.iter().filter(|e| e.concern == concern).map(|e| e.prime).collect()
    }

    /// Replays every certificate; returns how many were checked.
    pub fn replay(&self) -> Result<usize, String> {
        let Some(form) = &self.form else {
            return if self.certificates.is_empty() { Ok(0) } else { Err("certificates without a form".into()) };
        };
        for c in &self.certificates {
            c.replay(&form.context)?;
        }
        Ok(self.certificates.len())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn prime_list(xs: impl IntoIterator<Item = u64>) -> String {
    let v: Vec<String> = xs.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        "none".into()
    } else {
        v.join(", ")
    }
}

/// Plain-text rendering; empty sections are omitted.
pub fn render_text(r: &ImageReport) -> String {
    let mut out = String::from("hmfimage report\n");
    if let Some(form) = &r.form {
        let c = &form.context;
        let level = match &form.level_generator {
            Some(g) => format!("{} = ({g})", c.level),
            None => c.level.clone(),
        };
        let _ = writeln!(
            out,
            "form: D_F = {}, weight ({},{}), level {level}, D_E = {}, {} records, extensions {}",
            c.base_disc, c.weight[0], c.weight[1], c.coeff_disc, form.records, form.extension_policy
        );
    }
    if !r.structural.is_empty() {
        out.push_str("structural:\n");
        for (l, why) in &r.structural {
            let _ = writeln!(out, "  {l}: {why}");
        }
    }
    let cands = &r.candidates;
    if cands != &Candidates::default() {
        out.push_str("candidates:\n");
        let _ = writeln!(out, "  reducible (unit method): {}", prime_list(cands.reducible.iter().copied()));
        if let Some(rc) = &cands.rayclass {
            let _ = writeln!(out, "  reducible (ray class): {}", prime_list(rc.iter().copied()));
        }
        if !cands.extensions.is_empty() {
            let _ = writeln!(out, "  quadratic extensions: beta in {{{}}}", cands.extensions.join(", "));
        }
        let _ = writeln!(out, "  dihedral: {}", prime_list(cands.dihedral.iter().copied()));
        let _ = writeln!(out, "  exotic: {}", prime_list(cands.exotic.iter().copied()));
        if let Some(it) = &cands.inner_twist {
            let _ = writeln!(out, "  inner twist: {}", prime_list(it.iter().copied()));
        }
        for e in &cands.eliminated {
            let ids: Vec<String> = e.certificates.iter().map(|i| format!("#{}", i + 1)).collect();
            let _ = writeln!(out, "  eliminated {} ({}): {}", e.prime, e.concern.name(), ids.join(" "));
        }
        for n in &cands.notes {
            let _ = writeln!(out, "  note: {n}");
        }
    }
    if !r.certificates.is_empty() {
        out.push_str("certificates:\n");
        for (i, c) in r.certificates.iter().enumerate() {
            let _ = writeln!(out, "  #{} {c}", i + 1);
        }
    }
    if !r.exceptional_bound.primes.is_empty() || r.form.is_some() {
        let b = &r.exceptional_bound;
        let prod: Vec<String> = b.primes.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(
            out,
            "exceptional primes divide: {}{}",
            if prod.is_empty() { "1".to_string() } else { prod.join("*") },
            if b.complete { "" } else { " (incomplete: see unresolved)" }
        );
    }
    if let Some(img) = &r.image {
        let d = &img.descriptor;
        out.push_str("image:\n");
        let _ = writeln!(out, "  l = {}: {}", d.split_rule, d.split_shape);
        let _ = writeln!(out, "  otherwise: {}", d.inert_shape);
        if !d.ramified.is_empty() {
            let _ = writeln!(out, "  ramified in E: {} (residue degree 1)", prime_list(d.ramified.iter().copied()));
        }
        if !img.inner_twist_open.is_empty() {
            let _ =
                writeln!(out, "  inner twist not excluded at: {}", prime_list(img.inner_twist_open.iter().copied()));
        }
        if let Some(n) = &img.inner_twist_note {
            let _ = writeln!(out, "  inner twist: {n}");
        }
        if !img.inertial_types_split.is_empty() {
            let _ = writeln!(out, "  inertia (l split): {}", img.inertial_types_split.join("; "));
        }
        if !img.inertial_types_inert.is_empty() {
            let _ = writeln!(out, "  inertia (l inert): {}", img.inertial_types_inert.join("; "));
        }
        if let Some(s) = &img.shape_check {
            let got = s.closure_order.map(|o| o.to_string()).unwrap_or_else(|| "-".into());
            let _ = write!(
                out,
                "  shape check at l = {} (f = {}): order {got}, expected {}",
                s.ell, s.degree, s.expected_order
            );
            match &s.note {
                Some(n) => {
                    let _ = writeln!(out, " ({n})");
                }
                None => out.push('\n'),
            }
        }
    }
    if !r.unresolved.is_empty() {
        out.push_str("unresolved:\n");
        for u in &r.unresolved {
            let who = u.prime.map(|p| format!("l = {p}")).unwrap_or_else(|| "all l".into());
            let _ = writeln!(out, "  {who} [{}]: {}", u.concern.name(), u.reason);
        }
    }
    out
}

fn select_extensions(
    ds: &Dataset,
    policy: ExtensionPolicy,
) -> Result<(Vec<QFElem>, String, Vec<String>), PipelineError> {
    let mut notes = Vec::new();
    let resolved = match policy {
        ExtensionPolicy::Auto if ds.extensions.is_some() => ExtensionPolicy::Pinned,
        ExtensionPolicy::Auto => ExtensionPolicy::Conservative,
        p => p,
    };
    if resolved == ExtensionPolicy::Pinned {
        let exts = ds.extensions.clone().ok_or(PipelineError::NoPinnedExtensions)?;
        return Ok((exts, resolved.name().to_string(), notes));
    }
    let f = ds.spec.base_field();
    let s: Vec<_> = ds.spec.level.factor().into_iter().map(|(p, _)| p).collect();
    let all = enumerate_quadratic_extensions(&f, &s)?;
    let two_in_level = (ds.spec.level_norm() % 2u32) == 0u32.into();
    let kept: Vec<QFElem> = all
        .iter()
        .filter(|e| resolved == ExtensionPolicy::Conservative || two_in_level || e.unramified_at_two)
        .map(|e| e.beta.clone())
        .collect();
    let flagged = all.iter().filter(|e| !e.unramified_at_two).count();
    if resolved == ExtensionPolicy::Conservative && flagged > 0 {
        notes.push(format!("{flagged} of {} extensions may ramify above 2 and are kept", all.len()));
    }
    Ok((kept, resolved.name().to_string(), notes))
}

struct Builder {
    certificates: Vec<Certificate>,
    eliminated: Vec<Elimination>,
    unresolved: Vec<Unresolved>,
}

impl Builder {
    fn push(&mut self, c: Certificate) -> usize {
        if let Some(i) = self.certificates.iter().position(|x| *x == c) {
            return i;
        }
        self.certificates.push(c);
        self.certificates.len() - 1
    }

    fn eliminate(&mut self, prime: u64, concern: Concern, certs: Vec<Certificate>) {
        let ids = certs.into_iter().map(|c| self.push(c)).collect();
        self.eliminated.push(Elimination { prime, concern, certificates: ids });
    }

    fn open(&mut self, prime: Option<u64>, concern: Concern, reason: impl Into<String>) {
        self.unresolved.push(Unresolved { prime, concern, reason: reason.into() });
    }
}

/// Certificates for every prime of `E` above `ell`, or `None` if one is
/// missing.
fn all_lambdas(
    ds: &Dataset,
    ell: u64,
    find: impl Fn(u64, crate::quadfield::PrimeLabel, &Dataset) -> Option<Certificate>,
) -> Option<Vec<Certificate>> {
    lambda_labels(&ds.spec.coeff_field(), ell).into_iter().map(|lambda| find(ell, lambda, ds)).collect()
}

/// Runs every elimination step and assembles the report.
pub fn run_pipeline(ds: &Dataset, options: &RunOptions) -> Result<ImageReport, PipelineError> {
    let spec = &ds.spec;
    let (exts, policy_name, mut notes) = select_extensions(ds, options.extensions)?;
    let structural = bounds::structural_primes(spec);
    let mut b = Builder { certificates: Vec::new(), eliminated: Vec::new(), unresolved: Vec::new() };

    // reducible
    let unit = reducible_candidates_unit_method(ds, None);
    for c in &unit.certificates {
        b.push(c.clone());
    }
    if let Some(why) = &unit.unbounded {
        b.open(None, Concern::Reducible, why.clone());
    }
    let modulus = spec.level.square_root_part();
    let ray = match reducible_candidates_rayclass_method(ds, &modulus) {
        Ok(r) => Some(r),
        Err(e) => {
            notes.push(format!("ray-class method: {e}"));
            None
        }
    };
    for l in unit.open() {
        if let Some(cert) = ray.as_ref().and_then(|(_, divs)| rayclass_certificate(l, &modulus, divs)) {
            b.eliminate(l, Concern::Reducible, vec![cert]);
        } else if let Some(certs) = all_lambdas(ds, l, certify_irreducible_charpoly) {
            b.eliminate(l, Concern::Reducible, certs);
        } else {
            b.open(Some(l), Concern::Reducible, "no ray-class divisor or irreducible Frobenius excludes it");
        }
    }

    // dihedral
    let dihedral = dihedral_candidates(ds, &exts);
    for c in &dihedral.certificates {
        b.push(c.clone());
    }
    notes.extend(dihedral.notes.iter().cloned());
    if let Some(why) = &dihedral.unbounded {
        b.open(None, Concern::Dihedral, why.clone());
    }
    for l in dihedral.open() {
        b.open(Some(l), Concern::Dihedral, "divides the eigenvalue norm at every inert record of some extension");
    }

    // exotic
    let exotic = exotic_candidates(spec);
    for c in &exotic.certificates {
        b.push(c.clone());
    }
    for l in exotic.open() {
        match all_lambdas(ds, l, certify_not_exotic) {
            Some(certs) => b.eliminate(l, Concern::Exotic, certs),
            None => b.open(Some(l), Concern::Exotic, "no Frobenius of projective order above 5"),
        }
    }

    // inner twists qualify the image rather than bound the exceptional set
    let mut inner_open = Vec::new();
    let mut inner_note = None;
    let inner = match inner_twist_candidates(ds) {
        Ok(set) => {
            for c in &set.certificates {
                b.push(c.clone());
            }
            if let Some(why) = &set.unbounded {
                inner_note = Some(format!("not excluded ({why})"));
            }
            for l in set.open() {
                match certify_no_inner_twist(l, ds) {
                    Some(cert) => b.eliminate(l, Concern::InnerTwist, vec![cert]),
                    None => inner_open.push(l),
                }
            }
            Some(set.open().into_iter().collect())
        }
        Err(e) => {
            inner_note = Some(format!("not excluded ({e})"));
            None
        }
    };

    let unbounded = b.unresolved.iter().any(|u| u.prime.is_none());
    let mut bound: BTreeSet<u64> = structural.keys().copied().collect();
    bound.extend(b.unresolved.iter().filter_map(|u| u.prime));
    bound.extend(bounds::dihedral_structural_primes(spec).keys().copied().filter(|l| dihedral.primes().contains(l)));
    inner_open.retain(|l| !bound.contains(l));

    let descriptor = image_descriptor(spec);
    let weight = [spec.weight.0, spec.weight.1];
    let types = |s| {
        inertia::enumerate_inertial_types(&weight, s)
            .map(|ts| ts.iter().map(|t| t.display()).collect())
            .unwrap_or_default()
    };
    let shape_check = match options.shape_check_cap {
        Some(cap) if !unbounded => shape_check(ds, &bound, cap),
        _ => None,
    };
    let image = ImageSection {
        descriptor,
        inner_twist_open: inner_open,
        inner_twist_note: inner_note,
        inertial_types_split: types(inertia::Splitting::Split),
        inertial_types_inert: types(inertia::Splitting::Inert),
        shape_check,
    };

    let mut unresolved = b.unresolved;
    unresolved.sort_by_key(|u| (u.prime.is_some(), u.prime, u.concern));
    let mut eliminated = b.eliminated;
    eliminated.sort_by_key(|e| (e.prime, e.concern));

    Ok(ImageReport {
        form: Some(FormSummary {
            context: FormContext::from_spec(spec),
            level_generator: spec.level_generator.as_ref().map(|g| g.to_string()),
            records: ds.records.len(),
            extension_policy: policy_name,
        }),
        structural,
        candidates: Candidates {
            reducible: unit.open().into_iter().collect(),
            rayclass: ray.map(|(set, _)| set.open().into_iter().collect()),
            extensions: exts.iter().map(|e| e.to_string()).collect(),
            dihedral: dihedral.open().into_iter().collect(),
            exotic: exotic.open().into_iter().collect(),
            inner_twist: inner,
            eliminated,
            notes,
        },
        certificates: b.certificates,
        exceptional_bound: ExceptionalBound { primes: bound.into_iter().collect(), complete: !unbounded },
        image: Some(image),
        unresolved,
    })
}

/// Builds the expected image at the smallest small prime outside the bound.
fn shape_check(ds: &Dataset, bound: &BTreeSet<u64>, cap: usize) -> Option<ShapeCheck> {
    let e = ds.spec.coeff_field();
    let m = (ds.spec.k0() - 1) as u64;
    let ell = [5u64, 7, 11, 13].into_iter().find(|l| !bound.contains(l))?;
    let degree = if e.splitting_type(ell) == Splitting::Inert { 2 } else { 1 };
    let kind = ShapeKind::DetPowerSubgroup(m);
    let expected = dickson::expected_image_order(ell, degree, m) as u64;
    let mut check = ShapeCheck { ell, degree, closure_order: None, expected_order: expected, note: None };
    let run = || -> Result<u64, dickson::DicksonError> {
        let field = SmallField::new(ell.pow(degree) as usize)?;
        let gens = dickson::construct_shape(kind, &field)?;
        Ok(dickson::closure(&field, &gens, cap)?.len() as u64)
    };
    match run() {
        Ok(n) => check.closure_order = Some(n),
        Err(err) => check.note = Some(err.to_string()),
    }
    Some(check)
}
