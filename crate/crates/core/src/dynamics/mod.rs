//! Finite-window symbolic dynamics.
//!
//! Points of a two-sided subshift are never materialized. An open set is a
//! finite union of [`Pattern`]s (finitely many fixed coordinates), and
//! "this intersection of open sets is nonempty" is decided by looking for an
//! admissible word that carries every constraint at the right offset. All
//! answers are exact for the language up to the system's length bound.

mod chain;
mod factors;
mod returns;
mod rotation;
mod subshift;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::gammapoly::GammaError;

pub use chain::{lemma213_chain, verify_chain, ChainFailure, Lemma213Chain, Lemma213Query};
pub use returns::{
    poly_return_set, power_return_set, product_return_set, recurrence_search, return_set,
    ProductComponent, Recurrence,
};
pub use rotation::{rotation_probe, Arc, RotationControl};
pub use subshift::{minimality_probe, parse_rules, MinimalityReport, SubstitutionSystem, MAX_LANGUAGE_LEN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynError {
    #[error("bad substitution rules: {0}")]
    BadRules(String),
    #[error("query needs words of length {needed}, language is built up to {available}")]
    WindowTooLarge { needed: u128, available: usize },
    #[error("window half-width must be nonnegative, got {0}")]
    BadWindow(i64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("power must be nonzero")]
    ZeroPower,
    #[error("bad rotation: q = {q}, p = {p} ({reason})")]
    BadModulus { q: u64, p: i64, reason: &'static str },
    #[error("word {0:?} is not in the language")]
    NotAdmissible(String),
    #[error("bad query: {0}")]
    BadQuery(String),
    #[error("bad arc: {0}")]
    BadArc(&'static str),
    #[error(transparent)]
    Gamma(#[from] GammaError),
}

/// A cylinder `[w]`: points whose coordinates `0..|w|` spell `w`.
/// The empty word is the whole space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CylinderSet {
    word: Vec<u8>,
}

impl CylinderSet {
    /// Checks admissibility against `sys`.
    pub fn new(sys: &SubstitutionSystem, word: &[u8]) -> Result<Self, DynError> {
        if !word.is_empty() && !sys.is_admissible(word)? {
            return Err(DynError::NotAdmissible(String::from_utf8_lossy(word).into_owned()));
        }
        Ok(Self {
            word: word.to_vec(),
        })
    }

    pub fn whole() -> Self {
        Self { word: Vec::new() }
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// `T^{-offset}[w]`: the word placed at `offset`.
    pub fn at(&self, offset: i64) -> Pattern {
        Pattern::word_at(offset, &self.word)
    }
}

impl fmt::Display for CylinderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            f.write_str("X")
        } else {
            write!(f, "[{}]", String::from_utf8_lossy(&self.word))
        }
    }
}

/// Points with prescribed symbols at finitely many coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Pattern {
    cells: BTreeMap<i64, u8>,
}

impl Pattern {
    pub fn whole() -> Self {
        Self::default()
    }

    pub fn word_at(offset: i64, word: &[u8]) -> Self {
        Self {
            cells: word
                .iter()
                .enumerate()
                .map(|(i, &c)| (offset + i as i64, c))
                .collect(),
        }
    }

    pub fn cells(&self) -> &BTreeMap<i64, u8> {
        &self.cells
    }

    /// `None` when the two patterns disagree somewhere.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let mut cells = self.cells.clone();
        for (&k, &c) in &other.cells {
            if let Some(&old) = cells.get(&k) {
                if old != c {
                    return None;
                }
            }
            cells.insert(k, c);
        }
        Some(Self { cells })
    }

    /// `T^{-s}A`, the preimage under the `s`-th power of the shift.
    pub fn preimage(&self, s: i64) -> Self {
        Self {
            cells: self.cells.iter().map(|(&k, &c)| (k + s, c)).collect(),
        }
    }

    /// `T^{s}A`, the image under the `s`-th power of the shift.
    pub fn image(&self, s: i64) -> Self {
        self.preimage(-s)
    }

    /// Half-open coordinate range covering every fixed cell.
    pub fn span(&self) -> Option<(i64, i64)> {
        let lo = *self.cells.keys().next()?;
        let hi = *self.cells.keys().next_back()? + 1;
        Some((lo, hi))
    }

    pub fn width(&self) -> usize {
        self.span().map_or(0, |(lo, hi)| (hi - lo) as usize)
    }

    /// Does `word`, with `word[0]` sitting at coordinate `origin`, satisfy every cell?
    pub fn matches(&self, word: &[u8], origin: i64) -> bool {
        self.cells.iter().all(|(&k, &c)| {
            let i = k - origin;
            i >= 0 && (i as usize) < word.len() && word[i as usize] == c
        })
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.span() {
            None => f.write_str("X"),
            Some((lo, hi)) => {
                let body: String = (lo..hi)
                    .map(|k| self.cells.get(&k).map_or('.', |&c| c as char))
                    .collect();
                write!(f, "{body}@{lo}")
            }
        }
    }
}

/// A finite union of patterns; the empty union is the empty set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct OpenSet {
    parts: Vec<Pattern>,
}

impl OpenSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn whole() -> Self {
        Self {
            parts: vec![Pattern::whole()],
        }
    }

    pub fn from_patterns(parts: impl IntoIterator<Item = Pattern>) -> Self {
        let set: BTreeSet<Pattern> = parts.into_iter().collect();
        Self {
            parts: set.into_iter().collect(),
        }
    }

    pub fn cylinder(c: &CylinderSet) -> Self {
        Self::from_patterns([c.at(0)])
    }

    pub fn parts(&self) -> &[Pattern] {
        &self.parts
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_patterns(self.parts.iter().chain(&other.parts).cloned())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self::from_patterns(
            self.parts
                .iter()
                .flat_map(|a| other.parts.iter().filter_map(move |b| a.intersect(b))),
        )
    }

    pub fn preimage(&self, s: i64) -> Self {
        Self::from_patterns(self.parts.iter().map(|p| p.preimage(s)))
    }

    pub fn image(&self, s: i64) -> Self {
        Self::from_patterns(self.parts.iter().map(|p| p.image(s)))
    }

    /// Drops parts that no admissible word realizes.
    pub fn prune(&self, sys: &SubstitutionSystem) -> Result<Self, DynError> {
        let mut keep = Vec::new();
        for p in &self.parts {
            if sys.satisfiable(p)? {
                keep.push(p.clone());
            }
        }
        Ok(Self { parts: keep })
    }

    pub fn is_nonempty(&self, sys: &SubstitutionSystem) -> Result<bool, DynError> {
        for p in &self.parts {
            if sys.satisfiable(p)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// `self ⊆ other` inside the subshift: every admissible word realizing a part
    /// of `self` over the joint span also realizes some part of `other`.
    pub fn is_subset_of(&self, other: &Self, sys: &SubstitutionSystem) -> Result<bool, DynError> {
        for a in &self.parts {
            let mut lo = a.span().map_or(0, |s| s.0);
            let mut hi = a.span().map_or(0, |s| s.1);
            for b in &other.parts {
                if let Some((l, h)) = b.span() {
                    lo = lo.min(l);
                    hi = hi.max(h);
                }
            }
            let width = (hi - lo) as usize;
            for word in sys.realizations(a, lo, width)? {
                if !other.parts.iter().any(|b| b.matches(word, lo)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for OpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// The members of an `N(U, V)`-type set inside the window `[−W, W]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnSet {
    pub window: (i64, i64),
    pub members: BTreeSet<i64>,
    pub provenance: String,
}

impl ReturnSet {
    pub fn contains(&self, n: i64) -> bool {
        self.members.contains(&n)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `n,member` rows for every `n` in the window, ascending.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,member\n");
        for n in self.window.0..=self.window.1 {
            out.push_str(&format!("{n},{}\n", self.contains(n) as u8));
        }
        out
    }
}
