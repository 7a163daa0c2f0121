//! Tame inertia shapes of the residual representations at primes above `l`,
//! as sums of powers of fundamental characters.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InertiaError {
    #[error("bad weight {0:?}: need at least one entry, all >= 2 and of equal parity")]
    BadWeight(Vec<u32>),
    #[error("only quadratic base fields are supported")]
    Unsupported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
}

impl std::str::FromStr for Splitting {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "split" => Ok(Splitting::Split),
            "inert" => Ok(Splitting::Inert),
            other => Err(format!("unknown case {other:?} (split|inert)")),
        }
    }
}

fn check_weight(k: &[u32]) -> Result<u32, InertiaError> {
    let bad = || InertiaError::BadWeight(k.to_vec());
    let k0 = *k.iter().max().ok_or_else(bad)?;
    if k.iter().any(|&x| x < 2 || x % 2 != k0 % 2) {
        return Err(bad());
    }
    Ok(k0)
}

/// `{(k0 - k_i)/2, (k0 + k_i - 2)/2}` over all `i`, in weight order.
pub fn hodge_exponent_multiset(k: &[u32]) -> Result<Vec<u32>, InertiaError> {
    let k0 = check_weight(k)?;
    Ok(k.iter().flat_map(|&ki| [(k0 - ki) / 2, (k0 + ki - 2) / 2]).collect())
}

/// A character `omega_level^e` with `e = sum digits[j] * l^j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TameCharacter {
    pub digits: Vec<u32>,
}

impl TameCharacter {
    /// The smallest level whose fundamental character expresses this one:
    /// the digit string is periodic with that period.
    pub fn level(&self) -> usize {
        let n = self.digits.len();
        (1..=n).find(|&p| n.is_multiple_of(p) && (0..n).all(|j| self.digits[j] == self.digits[j % p])).unwrap_or(n)
    }

    fn reduced_digits(&self) -> &[u32] {
        &self.digits[..self.level()]
    }

    /// The exponent evaluated at a concrete `l`, at the stored level.
    pub fn exponent_at(&self, l: u128) -> u128 {
        self.digits.iter().rev().fold(0, |acc, &d| acc * l + d as u128)
    }

    /// Frobenius twist: exponent times `l^s` modulo `l^n - 1`.
    pub fn shifted(&self, s: usize) -> TameCharacter {
        let n = self.digits.len();
        TameCharacter { digits: (0..n).map(|j| self.digits[(j + n - s % n) % n]).collect() }
    }
}

const SUPERSCRIPT: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn superscript(n: usize) -> String {
    n.to_string().chars().map(|c| SUPERSCRIPT[c.to_digit(10).unwrap() as usize]).collect()
}

fn exponent_string(digits: &[u32]) -> String {
    let mut terms = Vec::new();
    for (j, &c) in digits.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let power = match j {
            0 => String::new(),
            1 => "ℓ".to_string(),
            _ => format!("ℓ{}", superscript(j)),
        };
        terms.push(match (c, j) {
            (_, 0) => c.to_string(),
            (1, _) => power,
            _ => format!("{c}{power}"),
        });
    }
    terms.join("+")
}

impl fmt::Display for TameCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.reduced_digits();
        let base = match digits.len() {
            1 => "ω".to_string(),
            n => format!("ω{}", ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'][n]),
        };
        let e = exponent_string(digits);
        if e.is_empty() {
            return write!(f, "1");
        }
        match e.as_str() {
            "1" => write!(f, "{base}"),
            "ℓ" => write!(f, "{base}^ℓ"),
            _ if e.chars().all(|c| c.is_ascii_digit()) => {
                write!(f, "{base}{}", superscript(e.parse().unwrap()))
            }
            _ => write!(f, "{base}^{{{e}}}"),
        }
    }
}

/// The inertia shape at one prime `v | l` of residual degree `h`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LocalType {
    pub residual_degree: usize,
    /// Whether Frobenius normalizes without centralizing the tame image,
    /// i.e. the characters live at level `2h` and are conjugate.
    pub conjugate_pair: bool,
    pub characters: [TameCharacter; 2],
}

impl LocalType {
    pub fn level(&self) -> usize {
        self.characters.iter().map(|c| c.level()).max().unwrap()
    }

    /// Digits that must reproduce the Hodge data of `v`.
    pub fn digit_multiset(&self) -> Vec<u32> {
        let mut v: Vec<u32> = if self.conjugate_pair {
            self.characters[0].digits.clone()
        } else {
            self.characters.iter().flat_map(|c| c.digits.clone()).collect()
        };
        v.sort();
        v
    }
}

impl fmt::Display for LocalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⊕ {}", self.characters[0], self.characters[1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InertialType {
    pub splitting: Splitting,
    /// One entry per prime above `l`.
    pub primes: Vec<LocalType>,
}

impl InertialType {
    pub fn level(&self) -> usize {
        self.primes.iter().map(|t| t.level()).max().unwrap()
    }

    pub fn display(&self) -> String {
        let parts: Vec<String> = self.primes.iter().map(|t| t.to_string()).collect();
        if parts.windows(2).all(|w| w[0] == w[1]) {
            parts[0].clone()
        } else {
            parts.join(" and ")
        }
    }
}

impl fmt::Display for InertialType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

/// Unordered key of a local type up to the choice of fundamental character.
fn orbit_key(t: &LocalType) -> BTreeSet<Vec<u32>> {
    let n = t.characters[0].digits.len();
    (0..n)
        .map(|s| {
            let mut pair: Vec<Vec<u32>> = t.characters.iter().map(|c| c.shifted(s).digits).collect();
            pair.sort();
            pair.concat()
        })
        .collect()
}

fn push_unique(out: &mut Vec<LocalType>, mut t: LocalType) {
    t.characters.sort_by(|a, b| a.reduced_digits().cmp(b.reduced_digits()));
    let key = orbit_key(&t);
    if !out.iter().any(|u| orbit_key(u) == key) {
        out.push(t);
    }
}

/// Local shapes at a prime of residual degree `h` whose digit at position
/// `j` and `j + h` come from the Hodge pair of embedding `j mod h`.
fn local_types(pairs: &[(u32, u32)], h: usize) -> (Vec<LocalType>, Vec<LocalType>) {
    let mut diagonal = Vec::new();
    let mut conjugate = Vec::new();
    // each embedding's pair is split between the two slots, high value first
    for mask in 0..(1u32 << h) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (j, &(lo, hi)) in pairs.iter().enumerate().take(h) {
            let (x, y) = if mask >> j & 1 == 0 { (hi, lo) } else { (lo, hi) };
            a.push(x);
            b.push(y);
        }
        push_unique(
            &mut diagonal,
            LocalType {
                residual_degree: h,
                conjugate_pair: false,
                characters: [TameCharacter { digits: a.clone() }, TameCharacter { digits: b.clone() }],
            },
        );
        let full = TameCharacter { digits: [a.clone(), b.clone()].concat() };
        let conj = full.shifted(h);
        push_unique(&mut conjugate, LocalType { residual_degree: h, conjugate_pair: true, characters: [full, conj] });
    }
    (diagonal, conjugate)
}

/// All tame inertia shapes at `l` for a quadratic base field, ordered by level
/// then exponents.
pub fn enumerate_inertial_types(k: &[u32], splitting: Splitting) -> Result<Vec<InertialType>, InertiaError> {
    let k0 = check_weight(k)?;
    if k.len() != 2 {
        return Err(InertiaError::Unsupported);
    }
    let pairs: Vec<(u32, u32)> = k.iter().map(|&ki| ((k0 - ki) / 2, (k0 + ki - 2) / 2)).collect();
    let mut out = Vec::new();
    match splitting {
        Splitting::Split => {
            // one prime per embedding, both in the same branch
            let per_prime: Vec<(Vec<LocalType>, Vec<LocalType>)> =
                pairs.iter().map(|p| local_types(std::slice::from_ref(p), 1)).collect();
            for branch in 0..2 {
                let primes: Vec<LocalType> = per_prime
                    .iter()
                    .map(|(diag, conj)| if branch == 0 { diag[0].clone() } else { conj[0].clone() })
                    .collect();
                out.push(InertialType { splitting, primes });
            }
        }
        Splitting::Inert => {
            let (diag, conj) = local_types(&pairs, 2);
            for t in diag.into_iter().chain(conj) {
                out.push(InertialType { splitting, primes: vec![t] });
            }
        }
    }
    out.sort_by(|a, b| (a.level(), &a.primes).cmp(&(b.level(), &b.primes)));
    out.dedup_by(|a, b| a.display() == b.display());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn displays(k: &[u32], s: Splitting) -> Vec<String> {
        enumerate_inertial_types(k, s).unwrap().iter().map(|t| t.display()).collect()
    }

    #[test]
    fn hodge_examples() {
        let mut h = hodge_exponent_multiset(&[2, 4]).unwrap();
        h.sort();
        assert_eq!(h, vec![0, 1, 2, 3]);
        assert_eq!(hodge_exponent_multiset(&[2, 2]).unwrap(), vec![0, 1, 0, 1]);
        assert_eq!(hodge_exponent_multiset(&[2]).unwrap(), vec![0, 1]);
        assert!(hodge_exponent_multiset(&[2, 3]).is_err());
        assert!(hodge_exponent_multiset(&[]).is_err());
    }

    #[test]
    fn character_strings() {
        let c = |d: &[u32]| TameCharacter { digits: d.to_vec() }.to_string();
        assert_eq!(c(&[0]), "1");
        assert_eq!(c(&[3]), "ω³");
        assert_eq!(c(&[1, 1]), "ω");
        assert_eq!(c(&[0, 1]), "ω₂^ℓ");
        assert_eq!(c(&[3, 0]), "ω₂³");
        assert_eq!(c(&[1, 2]), "ω₂^{1+2ℓ}");
        assert_eq!(c(&[0, 0, 1, 1]), "ω₄^{ℓ²+ℓ³}");
        assert_eq!(c(&[1, 0, 1, 0]), "ω₂");
    }

    #[test]
    fn type_counts() {
        assert_eq!(displays(&[2, 4], Splitting::Split).len(), 2);
        assert_eq!(displays(&[2, 4], Splitting::Inert).len(), 4);
        assert_eq!(displays(&[2, 2], Splitting::Split), vec!["1 ⊕ ω", "ω₂^ℓ ⊕ ω₂"]);
        assert_eq!(displays(&[2, 2], Splitting::Inert).len(), 3);
    }

    #[test]
    fn digits_reproduce_hodge_data() {
        for k in [[2u32, 2], [2, 4], [2, 6], [4, 4], [3, 5]] {
            let mut h = hodge_exponent_multiset(&k).unwrap();
            h.sort();
            for s in [Splitting::Split, Splitting::Inert] {
                for t in enumerate_inertial_types(&k, s).unwrap() {
                    let mut all: Vec<u32> = t.primes.iter().flat_map(|p| p.digit_multiset()).collect();
                    all.sort();
                    assert_eq!(all, h, "{k:?} {t}");
                }
            }
        }
    }

    #[test]
    fn conjugate_pairs_are_frobenius_twists() {
        for k in [[2u32, 2], [2, 4], [4, 6]] {
            for s in [Splitting::Split, Splitting::Inert] {
                for t in enumerate_inertial_types(&k, s).unwrap() {
                    for p in t.primes.iter().filter(|p| p.conjugate_pair) {
                        let n = p.characters[0].digits.len() as u32;
                        for l in [7u128, 11, 13] {
                            let modulus = l.pow(n) - 1;
                            let a = p.characters[0].exponent_at(l);
                            let b = p.characters[1].exponent_at(l);
                            assert_eq!(a * l.pow(n / 2) % modulus, b % modulus);
                        }
                    }
                }
            }
        }
    }
}
