//! Finite truncations of IP-sets and IP-rings, Hindman/Schur-type searches,
//! and window estimators for Banach density and syndeticity.
//!
//! Everything here is finite. A witness found in a truncation is a genuine
//! intersection; not finding one says nothing about the infinite object, so
//! those answers carry the truncation that was searched.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use rayon::prelude::*;
use thiserror::Error;

pub const DEFAULT_TRUNCATION_BOUND: usize = 20;
pub const DEFAULT_COLORING_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IpError {
    #[error("truncation with {k} generators exceeds the bound {bound}")]
    TruncationTooLarge { k: usize, bound: usize },
    #[error("index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("invalid IP-ring: {0}")]
    BadRing(&'static str),
    #[error("finite sum overflows i64")]
    Overflow,
    #[error("{needed} colorings exceed the budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("bad coloring: {0}")]
    BadColoring(&'static str),
    #[error("interval length {length} does not fit a window of size {window}")]
    BadLength { length: usize, window: usize },
    #[error("member {member} outside window [{start}, {end})")]
    OutsideWindow { member: i64, start: i64, end: i64 },
}

/// A nonempty finite subset of `{1, …, 63}`, stored as a bitmask (bit `i` is index `i + 1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(u64);

impl IndexSet {
    pub fn from_indices(indices: &[usize]) -> Result<Self, IpError> {
        let mut mask = 0u64;
        for &i in indices {
            if i == 0 || i > 63 {
                return Err(IpError::IndexOutOfRange { index: i, k: 63 });
            }
            mask |= 1 << (i - 1);
        }
        if mask == 0 {
            return Err(IpError::BadRing("index sets must be nonempty"));
        }
        Ok(Self(mask))
    }

    pub fn from_mask(mask: u64) -> Option<Self> {
        (mask != 0).then_some(Self(mask))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..64).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    pub fn min_index(self) -> usize {
        self.0.trailing_zeros() as usize + 1
    }

    pub fn max_index(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    /// `self < other` in the IP-ring sense: `max self < min other`.
    pub fn precedes(self, other: Self) -> bool {
        self.max_index() < other.min_index()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet{self}")
    }
}

/// All finite sums `n_α = Σ_{i∈α} n_i` over nonempty `α ⊆ {1..k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FSTruncation {
    generators: Vec<i64>,
    /// Indexed by `mask − 1`.
    table: Vec<i64>,
}

pub fn enumerate_fs(generators: &[i64]) -> Result<FSTruncation, IpError> {
    enumerate_fs_bounded(generators, DEFAULT_TRUNCATION_BOUND)
}

pub fn enumerate_fs_bounded(generators: &[i64], bound: usize) -> Result<FSTruncation, IpError> {
    let k = generators.len();
    if k > bound || k > 63 {
        return Err(IpError::TruncationTooLarge { k, bound });
    }
    let size = (1usize << k) - 1;
    let mut table = Vec::with_capacity(size);
    for mask in 1..=size as u64 {
        // n_α = n_{α∖{low}} + n_{low}, where low is α's lowest index
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let value = if rest == 0 {
            generators[low]
        } else {
            table[(rest - 1) as usize]
        };
        let value = if rest == 0 {
            value
        } else {
            i64::checked_add(value, generators[low]).ok_or(IpError::Overflow)?
        };
        table.push(value);
    }
    Ok(FSTruncation {
        generators: generators.to_vec(),
        table,
    })
}

impl FSTruncation {
    pub fn generators(&self) -> &[i64] {
        &self.generators
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    /// Number of table entries, `2^k − 1`.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn value(&self, alpha: IndexSet) -> Option<i64> {
        self.table.get((alpha.mask() - 1) as usize).copied()
    }

    /// `(α, n_α)` in increasing mask order.
    pub fn entries(&self) -> impl Iterator<Item = (IndexSet, i64)> + '_ {
        self.table
            .iter()
            .enumerate()
            .map(|(i, &v)| (IndexSet(i as u64 + 1), v))
    }

    pub fn value_set(&self) -> BTreeSet<i64> {
        self.table.iter().copied().collect()
    }
}

/// Blocks `α_1 < α_2 < … < α_m` and every union of a nonempty subfamily.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IPRingTruncation {
    blocks: Vec<IndexSet>,
}

impl IPRingTruncation {
    pub fn new(blocks: Vec<IndexSet>) -> Result<Self, IpError> {
        if blocks.is_empty() {
            return Err(IpError::BadRing("no blocks"));
        }
        if blocks.len() > 63 {
            return Err(IpError::TruncationTooLarge {
                k: blocks.len(),
                bound: 63,
            });
        }
        if !blocks.windows(2).all(|w| w[0].precedes(w[1])) {
            return Err(IpError::BadRing("blocks must satisfy max α_i < min α_(i+1)"));
        }
        Ok(Self { blocks })
    }

    /// Singletons `{1}, {2}, …, {k}`.
    pub fn singletons(k: usize) -> Result<Self, IpError> {
        let blocks = (1..=k)
            .map(|i| IndexSet::from_indices(&[i]))
            .collect::<Result<_, _>>()?;
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[IndexSet] {
        &self.blocks
    }

    /// `∪_{i∈β} α_i` for every nonempty `β`, in increasing `β` mask order.
    pub fn unions(&self) -> Vec<IndexSet> {
        let m = self.blocks.len();
        (1..(1u64 << m))
            .map(|beta| {
                let mask = (0..m)
                    .filter(|i| beta >> i & 1 == 1)
                    .fold(0u64, |acc, i| acc | self.blocks[i].mask());
                IndexSet(mask)
            })
            .collect()
    }
}

/// The FS truncation generated by the block sums `n_{α_i}`.
pub fn restrict_to_ring(fs: &FSTruncation, ring: &IPRingTruncation) -> Result<FSTruncation, IpError> {
    let k = fs.k();
    let mut sums = Vec::with_capacity(ring.blocks.len());
    for block in &ring.blocks {
        if block.max_index() > k {
            return Err(IpError::IndexOutOfRange {
                index: block.max_index(),
                k,
            });
        }
        sums.push(fs.value(*block).expect("block within range"));
    }
    enumerate_fs_bounded(&sums, 63)
}

pub trait Membership {
    fn contains(&self, n: i64) -> bool;
}

impl<F: Fn(i64) -> bool> Membership for F {
    fn contains(&self, n: i64) -> bool {
        self(n)
    }
}

/// Built-in infinite sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    All,
    Evens,
    Odds,
    Squares,
    Multiples(i64),
}

impl Predicate {
    /// `evens`, `odds`, `squares`, `all`, `multiples:k`.
    pub fn parse(name: &str) -> Option<Self> {
        let name = name.trim();
        match name {
            "all" => Some(Self::All),
            "evens" => Some(Self::Evens),
            "odds" => Some(Self::Odds),
            "squares" => Some(Self::Squares),
            _ => {
                let k: i64 = name.strip_prefix("multiples:")?.trim().parse().ok()?;
                (k != 0).then_some(Self::Multiples(k))
            }
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::All => f.write_str("all"),
            Self::Evens => f.write_str("evens"),
            Self::Odds => f.write_str("odds"),
            Self::Squares => f.write_str("squares"),
            Self::Multiples(k) => write!(f, "multiples:{k}"),
        }
    }
}

impl Membership for Predicate {
    fn contains(&self, n: i64) -> bool {
        match *self {
            Self::All => true,
            Self::Evens => n % 2 == 0,
            Self::Odds => n % 2 != 0,
            Self::Squares => n >= 0 && {
                let r = (n as f64).sqrt() as i64;
                (r.saturating_sub(1)..=r + 1).any(|s| s * s == n)
            },
            Self::Multiples(k) => n % k == 0,
        }
    }
}

/// A subset of the half-open integer interval `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSet {
    start: i64,
    end: i64,
    members: BTreeSet<i64>,
}

impl WindowSet {
    pub fn new(start: i64, end: i64, members: impl IntoIterator<Item = i64>) -> Result<Self, IpError> {
        let members: BTreeSet<i64> = members.into_iter().collect();
        if let Some(&m) = members.iter().find(|&&m| m < start || m >= end) {
            return Err(IpError::OutsideWindow {
                member: m,
                start,
                end,
            });
        }
        Ok(Self {
            start,
            end: end.max(start),
            members,
        })
    }

    pub fn from_predicate(start: i64, end: i64, p: &impl Membership) -> Self {
        Self {
            start,
            end: end.max(start),
            members: (start..end).filter(|&n| p.contains(n)).collect(),
        }
    }

    pub fn full(start: i64, end: i64) -> Self {
        Self::from_predicate(start, end, &Predicate::All)
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn window_len(&self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn members(&self) -> &BTreeSet<i64> {
        &self.members
    }

    fn indicator(&self) -> Vec<bool> {
        let mut out = vec![false; self.window_len()];
        for &m in &self.members {
            out[(m - self.start) as usize] = true;
        }
        out
    }
}

impl Membership for WindowSet {
    fn contains(&self, n: i64) -> bool {
        self.members.contains(&n)
    }
}

/// Outcome of searching a truncation for a member of a set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IpWitness {
    Found { alpha: IndexSet, value: i64 },
    /// No `n_α` in the set; only the searched truncation is ruled out.
    Inconclusive { generators: Vec<i64>, entries: usize },
}

impl IpWitness {
    pub fn is_found(&self) -> bool {
        matches!(self, Self::Found { .. })
    }
}

impl fmt::Display for IpWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Found { alpha, value } => write!(f, "witness n_{alpha} = {value}"),
            Self::Inconclusive {
                generators,
                entries,
            } => write!(
                f,
                "inconclusive: no n_alpha in the set among {entries} sums over generators {generators:?}"
            ),
        }
    }
}

/// First `α` in mask order with `n_α ∈ set`.
pub fn ip_witness(set: &impl Membership, fs: &FSTruncation) -> IpWitness {
    fs.entries()
        .find(|&(_, v)| set.contains(v))
        .map(|(alpha, value)| IpWitness::Found { alpha, value })
        .unwrap_or_else(|| IpWitness::Inconclusive {
            generators: fs.generators.clone(),
            entries: fs.len(),
        })
}

/// Generators `a_1 ≤ … ≤ a_m` whose finite sums all land in one color class of `{1..N}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonochromaticFs {
    pub color: usize,
    pub generators: Vec<i64>,
    pub sums: BTreeSet<i64>,
}

/// Searches `coloring` (entry `i` is the color of `i + 1`) for `depth` generators
/// with monochromatic finite sums inside `{1..N}`.
///
/// Distinct generators are preferred; repeated generators (allowed in an
/// IP-set) are only used when no distinct choice exists.
pub fn monochromatic_fs(coloring: &[usize], depth: usize) -> Option<MonochromaticFs> {
    if depth == 0 {
        return None;
    }
    search_fs(coloring, depth, false).or_else(|| search_fs(coloring, depth, true))
}

fn search_fs(coloring: &[usize], depth: usize, allow_repeat: bool) -> Option<MonochromaticFs> {
    let n = coloring.len() as i64;
    let color_of = |x: i64| coloring[(x - 1) as usize];

    fn extend(
        chosen: &mut Vec<i64>,
        sums: &mut Vec<i64>,
        depth: usize,
        color: usize,
        n: i64,
        allow_repeat: bool,
        color_of: &dyn Fn(i64) -> usize,
    ) -> bool {
        if chosen.len() == depth {
            return true;
        }
        let last = *chosen.last().expect("first generator chosen by caller");
        let from = if allow_repeat { last } else { last + 1 };
        for a in from..=n {
            if color_of(a) != color {
                continue;
            }
            let new: Vec<i64> = std::iter::once(a).chain(sums.iter().map(|s| s + a)).collect();
            if new.iter().all(|&s| s <= n && color_of(s) == color) {
                let before = sums.len();
                sums.extend(new);
                chosen.push(a);
                if extend(chosen, sums, depth, color, n, allow_repeat, color_of) {
                    return true;
                }
                chosen.pop();
                sums.truncate(before);
            }
        }
        false
    }

    for a in 1..=n {
        let color = color_of(a);
        let mut chosen = vec![a];
        let mut sums = vec![a];
        if extend(&mut chosen, &mut sums, depth, color, n, allow_repeat, &color_of) {
            return Some(MonochromaticFs {
                color,
                generators: chosen,
                sums: sums.into_iter().collect(),
            });
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HindmanOutcome {
    /// Every coloring has a monochromatic depth-`m` FS set.
    Verified { colorings: u64 },
    /// The lexicographically least coloring without one.
    Counterexample { coloring: Vec<usize> },
}

/// Exhausts all `r^N` colorings of `{1..N}`.
///
/// The answer is the lexicographically least failing coloring (color of 1 most
/// significant), independent of how the search is split across threads.
pub fn hindman_all(n: usize, r: usize, depth: usize, budget: u64) -> Result<HindmanOutcome, IpError> {
    if r == 0 {
        return Err(IpError::BadColoring("at least one color is required"));
    }
    let needed = (r as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(IpError::BudgetExceeded { needed, budget });
    }
    let total = needed as u64;
    let decode = |mut idx: u64| {
        let mut coloring = vec![0usize; n];
        for slot in coloring.iter_mut().rev() {
            *slot = (idx % r as u64) as usize;
            idx /= r as u64;
        }
        coloring
    };
    let failing = (0..total)
        .into_par_iter()
        .map(decode)
        .find_first(|c| monochromatic_fs(c, depth).is_none());
    Ok(match failing {
        Some(coloring) => HindmanOutcome::Counterexample { coloring },
        None => HindmanOutcome::Verified { colorings: total },
    })
}

/// Window estimates of upper and lower Banach density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Density {
    pub length: usize,
    pub upper: Rational64,
    pub lower: Rational64,
}

/// Max and min of `|S ∩ I| / |I|` over all length-`len` intervals `I` inside the window.
pub fn window_density(set: &WindowSet, len: usize) -> Result<Density, IpError> {
    let window = set.window_len();
    if len == 0 || len > window {
        return Err(IpError::BadLength {
            length: len,
            window,
        });
    }
    let ind = set.indicator();
    let mut count = ind[..len].iter().filter(|&&b| b).count();
    let (mut hi, mut lo) = (count, count);
    for i in len..window {
        count += ind[i] as usize;
        count -= ind[i - len] as usize;
        hi = hi.max(count);
        lo = lo.min(count);
    }
    Ok(Density {
        length: len,
        upper: Rational64::new(hi as i64, len as i64),
        lower: Rational64::new(lo as i64, len as i64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureThresholds {
    /// Run length counted as "long" for thickness.
    pub thick_run: usize,
    /// Largest interval length allowed to miss the set for syndeticity.
    pub syndetic_gap: usize,
}

impl Default for StructureThresholds {
    fn default() -> Self {
        Self {
            thick_run: 10,
            syndetic_gap: 10,
        }
    }
}

/// Gap and run statistics of a window set, with indicator flags.
///
/// The flags are window-scale evidence only: `syndetic` means every interval
/// of `syndetic_gap` consecutive integers meets the set; `thick` means a run
/// of `thick_run` consecutive members exists; `piecewise_syndetic` means some
/// stretch of length at least `thick_run` is syndetic with that gap bound;
/// `thickly_syndetic` means the starts of length-`thick_run` runs are
/// themselves syndetic with that gap bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    pub window: (i64, i64),
    pub members: usize,
    /// Largest difference between consecutive members.
    pub max_gap: Option<i64>,
    pub max_run: usize,
    /// Smallest `N` such that every length-`N` interval in the window meets the set.
    pub syndetic_bound: Option<usize>,
    /// Maximal runs `(start, length)` with `length ≥ thick_run`.
    pub thick_runs: Vec<(i64, usize)>,
    pub thresholds: StructureThresholds,
    pub syndetic: bool,
    pub thick: bool,
    pub piecewise_syndetic: bool,
    pub thickly_syndetic: bool,
}

/// Lengths of maximal runs of `false` in `ind`.
fn holes(ind: &[bool]) -> impl Iterator<Item = (usize, usize)> + '_ {
    runs_of(ind, false)
}

fn runs_of(ind: &[bool], value: bool) -> impl Iterator<Item = (usize, usize)> + '_ {
    let mut i = 0;
    std::iter::from_fn(move || {
        while i < ind.len() && ind[i] != value {
            i += 1;
        }
        if i >= ind.len() {
            return None;
        }
        let start = i;
        while i < ind.len() && ind[i] == value {
            i += 1;
        }
        Some((start, i - start))
    })
}

fn syndetic_bound(ind: &[bool]) -> Option<usize> {
    if !ind.iter().any(|&b| b) {
        return None;
    }
    Some(holes(ind).map(|(_, len)| len).max().unwrap_or(0) + 1)
}

pub fn structure_classify(set: &WindowSet, thresholds: StructureThresholds) -> StructureReport {
    let ind = set.indicator();
    let members: Vec<i64> = set.members.iter().copied().collect();
    let max_gap = members.windows(2).map(|w| w[1] - w[0]).max();
    let runs: Vec<(usize, usize)> = runs_of(&ind, true).collect();
    let max_run = runs.iter().map(|&(_, l)| l).max().unwrap_or(0);
    let bound = syndetic_bound(&ind);
    let thick_runs = runs
        .iter()
        .filter(|&&(_, l)| l >= thresholds.thick_run)
        .map(|&(s, l)| (set.start + s as i64, l))
        .collect();

    let gap = thresholds.syndetic_gap;
    let syndetic = bound.is_some_and(|b| b <= gap);
    let thick = thresholds.thick_run > 0 && max_run >= thresholds.thick_run;

    // Longest span of members whose consecutive differences are at most `gap`,
    // i.e. a stretch whose internal holes are shorter than `gap`.
    let mut longest_stretch = 0usize;
    let mut first = members.first().copied();
    for w in members.windows(2) {
        if w[1] - w[0] > gap as i64 {
            first = Some(w[1]);
        }
        if let Some(f) = first {
            longest_stretch = longest_stretch.max((w[1] - f + 1) as usize);
        }
    }
    if !members.is_empty() {
        longest_stretch = longest_stretch.max(1);
    }
    let piecewise_syndetic = thresholds.thick_run > 0 && longest_stretch >= thresholds.thick_run;

    let n = thresholds.thick_run;
    let thickly_syndetic = if n == 0 || n > ind.len() {
        false
    } else {
        let starts: Vec<bool> = (0..=ind.len() - n)
            .map(|s| ind[s..s + n].iter().all(|&b| b))
            .collect();
        syndetic_bound(&starts).is_some_and(|b| b <= gap)
    };

    StructureReport {
        window: (set.start, set.end),
        members: members.len(),
        max_gap,
        max_run,
        syndetic_bound: bound,
        thick_runs,
        thresholds,
        syndetic,
        thick,
        piecewise_syndetic,
        thickly_syndetic,
    }
}
