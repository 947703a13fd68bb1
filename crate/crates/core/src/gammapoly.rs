//! Polynomial expressions in the generators of a free abelian group.
//!
//! A [`GammaPolynomial`] is `g(n) = T_1^{p_1(n)} ⋯ T_d^{p_d(n)}` with every
//! exponent vanishing at zero. This module carries the PET bookkeeping:
//! weights, equivalence, weight vectors with their well-founded ordering, and the
//! two reduction steps used to push a system down that ordering.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::intpoly::{IntPolyError, IntegralPolynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("dimension mismatch: {left} generators vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("exponent of T{generator} does not vanish at 0")]
    NotVanishingAtZero { generator: usize },
    #[error("bad exponent for T{generator}: {source}")]
    Exponent {
        generator: usize,
        #[source]
        source: IntPolyError,
    },
    #[error("parse error near {token:?}: {reason}")]
    Parse { token: String, reason: &'static str },
    #[error("empty system")]
    EmptySystem,
    #[error("duplicate system member {0}")]
    DuplicateMember(String),
    #[error("identity element in a system")]
    IdentityMember,
    #[error("{0} is not a member of the system")]
    NotInSystem(String),
    #[error("{0} does not have minimal weight in the system")]
    NotMinimalWeight(String),
    #[error("bad shifts: {0}")]
    BadShifts(&'static str),
    #[error("shift collision: g[{}][{}] = g[{}][{}]", .first.0, .first.1, .second.0, .second.1)]
    ShiftCollision {
        first: (usize, usize),
        second: (usize, usize),
    },
    #[error("PET chain exceeded {steps} steps")]
    NonTermination { steps: usize },
    #[error("no collision-free shifts after {retries} retries at step {step}")]
    RetriesExhausted { step: usize, retries: usize },
    #[error("weight vector did not decrease at step {step}")]
    DescentViolation { step: usize },
}

/// `∏ T_j^{exps[j]}` with every exponent in `P₀`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaPolynomial {
    exps: Vec<IntegralPolynomial>,
}

/// `(l, k)`: highest generator with a nonzero exponent and that exponent's degree.
/// Derived ordering compares `l` first, then `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub level: usize,
    pub degree: usize,
}

impl Weight {
    pub const fn new(level: usize, degree: usize) -> Self {
        Self { level, degree }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.level, self.degree)
    }
}

impl GammaPolynomial {
    pub fn new(exps: Vec<IntegralPolynomial>) -> Result<Self, GammaError> {
        if exps.is_empty() {
            return Err(GammaError::DimensionMismatch { left: 0, right: 1 });
        }
        if let Some(j) = exps.iter().position(|p| !p.constant_term().is_zero()) {
            return Err(GammaError::NotVanishingAtZero { generator: j + 1 });
        }
        Ok(Self { exps })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            exps: vec![IntegralPolynomial::zero(); d.max(1)],
        }
    }

    /// `T_generator^{p}` in dimension `d`; `generator` is 1-based.
    pub fn single(d: usize, generator: usize, p: IntegralPolynomial) -> Result<Self, GammaError> {
        if generator == 0 || generator > d {
            return Err(GammaError::DimensionMismatch {
                left: d,
                right: generator,
            });
        }
        let mut exps = vec![IntegralPolynomial::zero(); d];
        exps[generator - 1] = p;
        Self::new(exps)
    }

    pub fn dim(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[IntegralPolynomial] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(IntegralPolynomial::is_zero)
    }

    /// Every exponent is linear, so `g(m + n) = g(m)g(n)`.
    pub fn is_homomorphism(&self) -> bool {
        self.exps.iter().all(IntegralPolynomial::is_affine)
    }

    fn check_dim(&self, other: &Self) -> Result<(), GammaError> {
        if self.dim() != other.dim() {
            return Err(GammaError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn product(&self, other: &Self) -> Result<Self, GammaError> {
        self.check_dim(other)?;
        Ok(Self {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        Self {
            exps: self.exps.iter().map(|p| -p).collect(),
        }
    }

    /// `self · other⁻¹`.
    pub fn quotient(&self, other: &Self) -> Result<Self, GammaError> {
        self.product(&other.inverse())
    }

    pub fn weight(&self) -> Weight {
        match self.exps.iter().rposition(|p| !p.is_zero()) {
            None => Weight::new(0, 0),
            Some(j) => Weight::new(j + 1, self.exps[j].degree() as usize),
        }
    }

    /// Monomial leading coefficient of the exponent at the weight's level.
    pub fn leading_coefficient(&self) -> Option<BigRational> {
        let w = self.weight();
        if w.level == 0 {
            return None;
        }
        self.exps[w.level - 1].leading_coefficient()
    }

    pub fn equivalent(&self, other: &Self) -> Result<bool, GammaError> {
        self.check_dim(other)?;
        Ok(self.class_key() == other.class_key())
    }

    fn class_key(&self) -> (Weight, Option<BigRational>) {
        (self.weight(), self.leading_coefficient())
    }

    /// Total exponent `Σ_j p_j(n)`; the action of `g(n)` when every generator is the same shift.
    pub fn total_exponent(&self, n: i64) -> BigInt {
        self.exps.iter().map(|p| p.eval_i64(n)).sum()
    }

    pub fn eval_exponents(&self, n: i64) -> Vec<BigInt> {
        self.exps.iter().map(|p| p.eval_i64(n)).collect()
    }

    /// `h(m, n) = f(m)⁻¹ f(m + n) f(n)⁻¹` as a Γ-polynomial in `n`.
    pub fn step1_reduce(&self, m: i64) -> Self {
        let m = BigInt::from(m);
        Self {
            exps: self.exps.iter().map(|p| p.shift_diff(&m)).collect(),
        }
    }

    /// `g(m)⁻¹ g(n + m)` as a Γ-polynomial in `n`.
    fn translate(&self, m: &BigInt) -> Self {
        Self {
            exps: self.exps.iter().map(|p| p.translate_vanishing(m)).collect(),
        }
    }
}

impl fmt::Display for GammaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("e");
        }
        let mut first = true;
        for (j, p) in self.exps.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" * ")?;
            }
            first = false;
            if self.dim() == 1 {
                write!(f, "T^{{{p}}}")?;
            } else {
                write!(f, "T{}^{{{p}}}", j + 1)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GammaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GammaPolynomial[d={}]({self})", self.dim())
    }
}

/// Parses `T1^{n^2} * T2^{3n}`; `T` alone means `T1`, `e` is the identity.
/// Returns the sparse factor list so a caller can fix the dimension afterwards.
fn parse_factors(src: &str) -> Result<BTreeMap<usize, IntegralPolynomial>, GammaError> {
    let src = src.trim();
    let mut out: BTreeMap<usize, IntegralPolynomial> = BTreeMap::new();
    if src == "e" || src == "1" {
        return Ok(out);
    }
    for factor in src.split('*') {
        let factor = factor.trim();
        let rest = factor.strip_prefix('T').ok_or_else(|| GammaError::Parse {
            token: factor.to_string(),
            reason: "expected a generator T<j>",
        })?;
        let caret = rest.find('^').ok_or_else(|| GammaError::Parse {
            token: factor.to_string(),
            reason: "expected ^ after the generator",
        })?;
        let index_text = &rest[..caret];
        let generator = if index_text.is_empty() {
            1
        } else {
            index_text
                .parse::<usize>()
                .ok()
                .filter(|&j| j >= 1)
                .ok_or_else(|| GammaError::Parse {
                    token: index_text.to_string(),
                    reason: "generator index must be a positive integer",
                })?
        };
        let body = rest[caret + 1..].trim();
        let body = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| GammaError::Parse {
                token: body.to_string(),
                reason: "exponent must be wrapped in braces",
            })?;
        let p: IntegralPolynomial = body
            .parse()
            .map_err(|source| GammaError::Exponent { generator, source })?;
        let slot = out.entry(generator).or_default();
        *slot = &*slot + &p;
    }
    Ok(out)
}

fn assemble(factors: BTreeMap<usize, IntegralPolynomial>, d: usize) -> Result<GammaPolynomial, GammaError> {
    let mut exps = vec![IntegralPolynomial::zero(); d];
    for (j, p) in factors {
        if j > d {
            return Err(GammaError::DimensionMismatch { left: d, right: j });
        }
        exps[j - 1] = p;
    }
    GammaPolynomial::new(exps)
}

impl GammaPolynomial {
    /// Parses with an explicit generator count.
    pub fn parse_with_dim(src: &str, d: usize) -> Result<Self, GammaError> {
        assemble(parse_factors(src)?, d)
    }
}

impl FromStr for GammaPolynomial {
    type Err = GammaError;

    /// Dimension is the largest generator index mentioned.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let factors = parse_factors(s)?;
        let d = factors.keys().next_back().copied().unwrap_or(1);
        assemble(factors, d)
    }
}

/// A finite set of pairwise-distinct Γ-polynomials over a common dimension.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolySystem {
    d: usize,
    members: Vec<GammaPolynomial>,
}

impl PolySystem {
    /// Rejects duplicates, the identity, and mixed dimensions.
    pub fn new(members: Vec<GammaPolynomial>) -> Result<Self, GammaError> {
        let d = members.first().map(GammaPolynomial::dim).unwrap_or(1);
        let mut seen = std::collections::HashSet::new();
        for g in &members {
            if g.dim() != d {
                return Err(GammaError::DimensionMismatch {
                    left: d,
                    right: g.dim(),
                });
            }
            if g.is_identity() {
                return Err(GammaError::IdentityMember);
            }
            if !seen.insert(g) {
                return Err(GammaError::DuplicateMember(g.to_string()));
            }
        }
        Ok(Self { d, members })
    }

    pub fn empty(d: usize) -> Self {
        Self {
            d: d.max(1),
            members: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn members(&self) -> &[GammaPolynomial] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: &GammaPolynomial) -> bool {
        self.members.contains(g)
    }

    pub fn weight_vector(&self) -> Result<WeightVector, GammaError> {
        if self.members.is_empty() {
            return Err(GammaError::EmptySystem);
        }
        Ok(WeightVector::of_members(&self.members))
    }

    /// First member of minimal weight.
    pub fn minimal_member(&self) -> Option<&GammaPolynomial> {
        self.members.iter().min_by_key(|g| g.weight())
    }

    /// Nothing left to reduce: every member is linear and no two are equivalent.
    pub fn is_base(&self) -> bool {
        if !self.members.iter().all(GammaPolynomial::is_homomorphism) {
            return false;
        }
        let mut keys = std::collections::HashSet::new();
        self.members.iter().all(|g| keys.insert(g.class_key()))
    }

    /// Semicolon-separated members, optionally wrapped in `{}`; dimension is the
    /// largest generator index anywhere in the list.
    pub fn parse(src: &str) -> Result<Self, GammaError> {
        let src = src.trim();
        let src = src
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .unwrap_or(src);
        let parsed: Vec<_> = src
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(parse_factors)
            .collect::<Result<_, _>>()?;
        let d = parsed
            .iter()
            .filter_map(|f| f.keys().next_back().copied())
            .max()
            .unwrap_or(1);
        let members = parsed
            .into_iter()
            .map(|f| assemble(f, d))
            .collect::<Result<_, _>>()?;
        Self::new(members)
    }
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, g) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolySystem{self}")
    }
}

/// `φ(S)`: for each weight present, the number of equivalence classes of that weight.
///
/// Ordered by `≺`: scanning weights from the greatest down, the first weight
/// where multiplicities differ decides, with absent weights counting as zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct WeightVector {
    entries: Vec<(usize, Weight)>,
}

impl WeightVector {
    /// Entries must have strictly increasing weights and positive multiplicities.
    pub fn new(entries: Vec<(usize, Weight)>) -> Option<Self> {
        let increasing = entries.windows(2).all(|w| w[0].1 < w[1].1);
        let positive = entries.iter().all(|&(m, _)| m >= 1);
        (increasing && positive).then_some(Self { entries })
    }

    fn of_members(members: &[GammaPolynomial]) -> Self {
        let mut classes: BTreeMap<Weight, std::collections::BTreeSet<Option<BigRational>>> =
            BTreeMap::new();
        for g in members {
            let (w, lead) = g.class_key();
            classes.entry(w).or_default().insert(lead);
        }
        Self {
            entries: classes.into_iter().map(|(w, c)| (c.len(), w)).collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, Weight)] {
        &self.entries
    }

    pub fn multiplicity(&self, w: Weight) -> usize {
        self.entries
            .iter()
            .find(|&&(_, u)| u == w)
            .map_or(0, |&(m, _)| m)
    }

    /// `self ≺ other`.
    pub fn precedes(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Less
    }
}

impl Ord for WeightVector {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.entries.iter().rev().peekable();
        let mut b = other.entries.iter().rev().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&&(ma, wa)), Some(&&(mb, wb))) => match wa.cmp(&wb) {
                    // the side holding the larger weight has it at positive multiplicity
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Less => return Ordering::Less,
                    Ordering::Equal => {
                        if ma != mb {
                            return ma.cmp(&mb);
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }
}

impl PartialOrd for WeightVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (m, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}{w}")?;
        }
        f.write_str(")")
    }
}

/// Replaces every `g_t ∈ S` by `g_{t,j}(n) = g_t(m_j)⁻¹ g_t(n + m_j) f(n)⁻¹` for each shift `m_j`.
///
/// Identity elements are dropped. Copies produced by a single `g_t` under
/// different shifts (which happens exactly when `g_t` is linear) are merged;
/// a coincidence between images of two different members is reported as
/// [`GammaError::ShiftCollision`] so the caller can pick other shifts.
pub fn step2_reduce(
    system: &PolySystem,
    f: &GammaPolynomial,
    shifts: &[i64],
) -> Result<PolySystem, GammaError> {
    if !system.contains(f) {
        return Err(GammaError::NotInSystem(f.to_string()));
    }
    let wf = f.weight();
    if system.members.iter().any(|g| g.weight() < wf) {
        return Err(GammaError::NotMinimalWeight(f.to_string()));
    }
    if shifts.is_empty() {
        return Err(GammaError::BadShifts("no shifts given"));
    }
    if shifts.contains(&0) {
        return Err(GammaError::BadShifts("shifts must be nonzero"));
    }
    let mut sorted = shifts.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(GammaError::BadShifts("shifts must be pairwise distinct"));
    }

    let f_inv = f.inverse();
    let mut origin: std::collections::HashMap<GammaPolynomial, (usize, usize)> =
        std::collections::HashMap::new();
    let mut members = Vec::new();
    for (t, g) in system.members.iter().enumerate() {
        for (j, &m) in shifts.iter().enumerate() {
            let reduced = g.translate(&BigInt::from(m)).product(&f_inv)?;
            if reduced.is_identity() {
                continue;
            }
            match origin.get(&reduced) {
                Some(&(s, _)) if s == t => {}
                Some(&(s, i)) => {
                    return Err(GammaError::ShiftCollision {
                        first: (s, i),
                        second: (t, j),
                    })
                }
                None => {
                    origin.insert(reduced.clone(), (t, j));
                    members.push(reduced);
                }
            }
        }
    }
    Ok(PolySystem {
        d: system.d,
        members,
    })
}

/// How `pet_chain` picks shifts: `per_step` integers starting at `start`,
/// retried with a later start and a wider spacing on each collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftPolicy {
    pub per_step: usize,
    pub start: i64,
    pub max_retries: usize,
    pub max_steps: usize,
}

impl Default for ShiftPolicy {
    fn default() -> Self {
        Self {
            per_step: 1,
            start: 1,
            max_retries: 64,
            max_steps: 10_000,
        }
    }
}

impl ShiftPolicy {
    /// Retry `r` uses `start + r, start + r + (r + 1), …`: consecutive first, then spread.
    fn shifts(&self, retry: usize) -> Vec<i64> {
        let stride = retry as i64 + 1;
        let mut out: Vec<i64> = Vec::with_capacity(self.per_step);
        let mut m = self.start + retry as i64;
        while out.len() < self.per_step {
            if m != 0 {
                out.push(m);
            }
            m += stride;
        }
        out
    }
}

/// One system in a PET chain and, unless it is the last, the reduction applied to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    pub system: PolySystem,
    pub weights: Option<WeightVector>,
    pub reduced_by: Option<GammaPolynomial>,
    pub shifts: Vec<i64>,
}

/// Runs `step2_reduce` with a minimal-weight member until the system is empty or
/// linear with pairwise-inequivalent members. Every step is checked to descend.
pub fn pet_chain(system: &PolySystem, policy: &ShiftPolicy) -> Result<Vec<ChainStep>, GammaError> {
    if policy.per_step == 0 {
        return Err(GammaError::BadShifts("per_step must be positive"));
    }
    let mut chain = Vec::new();
    let mut current = system.clone();
    loop {
        let weights = current.weight_vector().ok();
        if current.is_empty() || current.is_base() {
            chain.push(ChainStep {
                system: current,
                weights,
                reduced_by: None,
                shifts: Vec::new(),
            });
            return Ok(chain);
        }
        if chain.len() >= policy.max_steps {
            return Err(GammaError::NonTermination {
                steps: policy.max_steps,
            });
        }
        let f = current
            .minimal_member()
            .expect("nonempty system has a minimal member")
            .clone();
        let mut attempt = None;
        for retry in 0..=policy.max_retries {
            let shifts = policy.shifts(retry);
            match step2_reduce(&current, &f, &shifts) {
                Ok(next) => {
                    attempt = Some((next, shifts));
                    break;
                }
                Err(GammaError::ShiftCollision { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
        let (next, shifts) = attempt.ok_or(GammaError::RetriesExhausted {
            step: chain.len(),
            retries: policy.max_retries,
        })?;
        let next_weights = next.weight_vector().ok();
        let descended = match (&next_weights, &weights) {
            (None, _) => true,
            (Some(a), Some(b)) => a.precedes(b),
            (Some(_), None) => false,
        };
        if !descended {
            return Err(GammaError::DescentViolation { step: chain.len() });
        }
        chain.push(ChainStep {
            system: current,
            weights,
            reduced_by: Some(f),
            shifts,
        });
        current = next;
    }
}
