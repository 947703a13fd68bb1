use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use super::factors::FactorIndex;
use super::{DynError, Pattern};

/// Hard cap on the configurable language length.
pub const MAX_LANGUAGE_LEN: usize = 1 << 14;

/// Total symbols the generating words may reach before the build gives up.
const MAX_GENERATED: usize = 1 << 22;

/// A substitution subshift, represented by its language up to length `max_len`.
///
/// The language is the set of factors of one generating word per seed. A
/// generating word is `σ^depth(seed)`, where `depth` is the first iterate at
/// least `4·max_len` long whose length-`max_len` factor count agrees with the
/// next iterate (which is then used). If an iterate stops growing the word is
/// extended periodically instead.
pub struct SubstitutionSystem {
    rules: Vec<(u8, Vec<u8>)>,
    seeds: Vec<u8>,
    max_len: usize,
    depth: usize,
    periodic: bool,
    generators: Vec<Vec<u8>>,
    index: FactorIndex,
    /// Per length: factor start positions in lexicographic order.
    by_len: Vec<OnceLock<Vec<u32>>>,
}

impl fmt::Debug for SubstitutionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubstitutionSystem")
            .field("rules", &self.rules_string())
            .field("seeds", &String::from_utf8_lossy(&self.seeds))
            .field("max_len", &self.max_len)
            .field("depth", &self.depth)
            .finish()
    }
}

impl SubstitutionSystem {
    pub fn new(rules: Vec<(u8, Vec<u8>)>, seeds: &[u8], max_len: usize) -> Result<Self, DynError> {
        validate(&rules, seeds)?;
        if max_len == 0 || max_len > MAX_LANGUAGE_LEN {
            return Err(DynError::WindowTooLarge {
                needed: max_len as u128,
                available: MAX_LANGUAGE_LEN,
            });
        }
        let mut depth = 0;
        let mut periodic = false;
        let mut generators = Vec::with_capacity(seeds.len());
        for &seed in seeds {
            let (word, k, per) = generate(&rules, seed, max_len)?;
            depth = depth.max(k);
            periodic |= per;
            generators.push(word);
        }
        let index = FactorIndex::new(&generators);
        Ok(Self {
            rules,
            seeds: seeds.to_vec(),
            max_len,
            depth,
            periodic,
            generators,
            index,
            by_len: (0..=max_len).map(|_| OnceLock::new()).collect(),
        })
    }

    /// `rules` like `"0->0010, 1->1"`; `seeds` defaults to the first rule's symbol.
    pub fn from_spec(rules: &str, seeds: Option<&str>, max_len: usize) -> Result<Self, DynError> {
        let rules = parse_rules(rules)?;
        let seeds: Vec<u8> = match seeds {
            Some(s) => s
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| match t.as_bytes() {
                    [c] => Ok(*c),
                    _ => Err(DynError::BadRules(format!("seed {t:?} is not a single symbol"))),
                })
                .collect::<Result<_, _>>()?,
            None => rules.first().map(|r| vec![r.0]).unwrap_or_default(),
        };
        Self::new(rules, &seeds, max_len)
    }

    /// Chacon: `0 → 0010, 1 → 1`.
    pub fn chacon(max_len: usize) -> Result<Self, DynError> {
        Self::from_spec("0->0010, 1->1", None, max_len)
    }

    /// Fibonacci: `0 → 01, 1 → 0`.
    pub fn fibonacci(max_len: usize) -> Result<Self, DynError> {
        Self::from_spec("0->01, 1->0", None, max_len)
    }

    pub fn rules(&self) -> &[(u8, Vec<u8>)] {
        &self.rules
    }

    pub fn rules_string(&self) -> String {
        self.rules
            .iter()
            .map(|(a, w)| format!("{}->{}", *a as char, String::from_utf8_lossy(w)))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn seeds(&self) -> &[u8] {
        &self.seeds
    }

    pub fn alphabet(&self) -> BTreeSet<u8> {
        self.rules.iter().map(|r| r.0).collect()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// True when some seed's iterates stopped growing and were extended periodically.
    pub fn is_periodic_extension(&self) -> bool {
        self.periodic
    }

    pub fn generating_words(&self) -> &[Vec<u8>] {
        &self.generators
    }

    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        apply(&self.rules, word)
    }

    fn check_len(&self, m: usize) -> Result<(), DynError> {
        if m > self.max_len {
            Err(DynError::WindowTooLarge {
                needed: m as u128,
                available: self.max_len,
            })
        } else {
            Ok(())
        }
    }

    fn sorted(&self, m: usize) -> &[u32] {
        self.by_len[m].get_or_init(|| {
            self.index
                .distinct(m)
                .into_iter()
                .map(|p| p as u32)
                .collect()
        })
    }

    /// Admissible words of length `m`, lexicographically sorted.
    pub fn factors(&self, m: usize) -> Result<Vec<&[u8]>, DynError> {
        self.check_len(m)?;
        if m == 0 {
            return Ok(vec![&[]]);
        }
        Ok(self
            .sorted(m)
            .iter()
            .map(|&p| self.index.slice(p as usize, m))
            .collect())
    }

    /// Every admissible word of length `1..=len`.
    pub fn language(&self, len: usize) -> Result<BTreeSet<Vec<u8>>, DynError> {
        self.check_len(len)?;
        let mut out = BTreeSet::new();
        for m in 1..=len {
            out.extend(self.factors(m)?.into_iter().map(<[u8]>::to_vec));
        }
        Ok(out)
    }

    pub fn complexity(&self, m: usize) -> Result<usize, DynError> {
        self.check_len(m)?;
        Ok(if m == 0 { 1 } else { self.sorted(m).len() })
    }

    pub fn is_admissible(&self, word: &[u8]) -> Result<bool, DynError> {
        Ok(!self.with_prefix(word, word.len())?.is_empty())
    }

    /// Admissible words of length `m` starting with `prefix`, in order.
    fn with_prefix(&self, prefix: &[u8], m: usize) -> Result<Vec<&[u8]>, DynError> {
        self.check_len(m)?;
        if m == 0 {
            return Ok(vec![&[]]);
        }
        let sorted = self.sorted(m);
        let key = |p: &u32| &self.index.slice(*p as usize, m)[..prefix.len()];
        let lo = sorted.partition_point(|p| key(p) < prefix);
        let hi = sorted.partition_point(|p| key(p) <= prefix);
        Ok(sorted[lo..hi]
            .iter()
            .map(|&p| self.index.slice(p as usize, m))
            .collect())
    }

    /// Admissible words of length `width` that satisfy `pattern` when placed
    /// with their first symbol at coordinate `origin`. Every fixed cell must
    /// fall inside `origin..origin + width`.
    pub fn realizations(&self, pattern: &Pattern, origin: i64, width: usize) -> Result<Vec<&[u8]>, DynError> {
        if let Some((lo, hi)) = pattern.span() {
            if lo < origin || hi > origin + width as i64 {
                return Ok(Vec::new());
            }
        }
        let prefix: Vec<u8> = (origin..)
            .map_while(|k| pattern.cells().get(&k).copied())
            .take(width)
            .collect();
        let words = self.with_prefix(&prefix, width)?;
        Ok(words.into_iter().filter(|w| pattern.matches(w, origin)).collect())
    }

    /// Lexicographically least admissible word realizing `pattern` over its span,
    /// together with the coordinate of its first symbol.
    pub fn witness(&self, pattern: &Pattern) -> Result<Option<(i64, Vec<u8>)>, DynError> {
        let Some((lo, hi)) = pattern.span() else {
            return Ok(Some((0, Vec::new())));
        };
        let width = (hi - lo) as usize;
        Ok(self
            .realizations(pattern, lo, width)?
            .first()
            .map(|w| (lo, w.to_vec())))
    }

    /// Whether some point of the subshift lies in the pattern's set.
    pub fn satisfiable(&self, pattern: &Pattern) -> Result<bool, DynError> {
        Ok(self.witness(pattern)?.is_some())
    }
}

impl fmt::Display for SubstitutionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "substitution {{{}}} seeds={} depth={} L={}",
            self.rules_string(),
            String::from_utf8_lossy(&self.seeds),
            self.depth,
            self.max_len
        )
    }
}

/// Parses `a->w, b->v` (also accepts `:` or `→` as the arrow and `;` between rules).
pub fn parse_rules(src: &str) -> Result<Vec<(u8, Vec<u8>)>, DynError> {
    let mut rules = Vec::new();
    for item in src.split([',', ';']).map(str::trim).filter(|s| !s.is_empty()) {
        let (lhs, rhs) = item
            .split_once("->")
            .or_else(|| item.split_once('→'))
            .or_else(|| item.split_once(':'))
            .ok_or_else(|| DynError::BadRules(format!("rule {item:?} has no arrow")))?;
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        let sym = match lhs.as_bytes() {
            [c] => *c,
            _ => return Err(DynError::BadRules(format!("left side {lhs:?} is not a single symbol"))),
        };
        rules.push((sym, rhs.as_bytes().to_vec()));
    }
    Ok(rules)
}

fn validate(rules: &[(u8, Vec<u8>)], seeds: &[u8]) -> Result<(), DynError> {
    if rules.is_empty() {
        return Err(DynError::BadRules("no rules".into()));
    }
    let usable = |c: u8| c.is_ascii_graphic();
    let mut lhs = BTreeSet::new();
    for (a, w) in rules {
        if !usable(*a) {
            return Err(DynError::BadRules(format!("symbol {:?} is not printable ASCII", *a as char)));
        }
        if !lhs.insert(*a) {
            return Err(DynError::BadRules(format!("two rules for {:?}", *a as char)));
        }
        if w.is_empty() {
            return Err(DynError::BadRules(format!("rule for {:?} is erasing", *a as char)));
        }
    }
    for (a, w) in rules {
        if let Some(c) = w.iter().find(|c| !lhs.contains(c)) {
            return Err(DynError::BadRules(format!(
                "rule for {:?} produces {:?}, which has no rule",
                *a as char, *c as char
            )));
        }
    }
    if seeds.is_empty() {
        return Err(DynError::BadRules("no seed symbol".into()));
    }
    if let Some(c) = seeds.iter().find(|c| !lhs.contains(c)) {
        return Err(DynError::BadRules(format!("seed {:?} has no rule", *c as char)));
    }
    Ok(())
}

fn apply(rules: &[(u8, Vec<u8>)], word: &[u8]) -> Vec<u8> {
    let mut table: [Option<&[u8]>; 256] = [None; 256];
    for (a, w) in rules {
        table[*a as usize] = Some(w);
    }
    let mut out = Vec::with_capacity(word.len() * 2);
    for &c in word {
        out.extend_from_slice(table[c as usize].expect("validated alphabet"));
    }
    out
}

fn complexity_of(word: &[u8], m: usize) -> usize {
    FactorIndex::new(&[word.to_vec()]).distinct(m).len()
}

/// Returns the generating word, the depth used, and whether it was periodically extended.
fn generate(rules: &[(u8, Vec<u8>)], seed: u8, max_len: usize) -> Result<(Vec<u8>, usize, bool), DynError> {
    let target = 4 * max_len;
    let mut word = vec![seed];
    let mut depth = 0;
    loop {
        let next = apply(rules, &word);
        if next.len() == word.len() {
            // No further growth: the iterates cycle through a finite set of words.
            let reps = (2 * max_len).div_ceil(word.len()) + 1;
            return Ok((word.repeat(reps), depth, true));
        }
        if next.len() > MAX_GENERATED {
            return Err(DynError::WindowTooLarge {
                needed: next.len() as u128,
                available: MAX_GENERATED,
            });
        }
        if word.len() >= target && complexity_of(&word, max_len) == complexity_of(&next, max_len) {
            return Ok((next, depth + 1, false));
        }
        word = next;
        depth += 1;
    }
}

/// Outcome of [`minimality_probe`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityReport {
    pub ell: usize,
    pub r_max: usize,
    /// Least `R` such that every admissible `R`-word contains every admissible `ℓ`-word.
    pub witness_r: Option<usize>,
    /// When no `R ≤ r_max` works: an `r_max`-word and an `ℓ`-word it misses.
    pub counterexample: Option<(Vec<u8>, Vec<u8>)>,
}

impl MinimalityReport {
    pub fn passed(&self) -> bool {
        self.witness_r.is_some()
    }
}

/// Window analogue of minimality. The property is monotone in `R`, so the
/// least `R` is found by bisection.
pub fn minimality_probe(sys: &SubstitutionSystem, ell: usize, r_max: usize) -> Result<MinimalityReport, DynError> {
    sys.check_len(r_max)?;
    let small: Vec<&[u8]> = sys.factors(ell)?;
    let missing = |r: usize| -> Result<Option<(Vec<u8>, Vec<u8>)>, DynError> {
        if r < ell {
            return Ok(Some((Vec::new(), small.first().map_or(Vec::new(), |w| w.to_vec()))));
        }
        for big in sys.factors(r)? {
            let inside: BTreeSet<&[u8]> = big.windows(ell.max(1)).collect();
            if let Some(w) = small.iter().find(|w| !w.is_empty() && !inside.contains(*w)) {
                return Ok(Some((big.to_vec(), w.to_vec())));
            }
        }
        Ok(None)
    };
    if let Some(ce) = missing(r_max)? {
        return Ok(MinimalityReport {
            ell,
            r_max,
            witness_r: None,
            counterexample: Some(ce),
        });
    }
    let (mut lo, mut hi) = (ell, r_max);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if missing(mid)?.is_none() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(MinimalityReport {
        ell,
        r_max,
        witness_r: Some(lo),
        counterexample: None,
    })
}
