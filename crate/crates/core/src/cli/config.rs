//! Experiment configuration: `[section]` headers followed by `key = value` lines.
//! `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::dynamics::parse_rules;
use crate::gammapoly::{GammaError, GammaPolynomial, PolySystem};
use crate::intpoly::{IntPolyError, IntegralPolynomial};
use crate::ipsets::{Predicate, DEFAULT_COLORING_BUDGET, DEFAULT_TRUNCATION_BOUND};

use super::CliError;

pub const DEFAULT_MAX_LEN: usize = 2048;

/// Where a diagnostic points: section, key and offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub section: String,
    pub key: String,
    pub token: String,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {:?}", self.section, self.key, self.token)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemSpec {
    Substitution {
        rules: String,
        seeds: Option<String>,
        alphabet: BTreeSet<u8>,
        max_len: usize,
    },
    Rotation {
        q: u64,
        p: i64,
        allow_non_coprime: bool,
    },
}

/// An open set before it is tied to a built system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetSpec {
    Whole,
    /// Union of words, each placed at its offset.
    Words(Vec<(Vec<u8>, i64)>),
    /// Half-open arc `[start, end)` of `ℤ_q`.
    Arc(u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowSetSpec {
    Predicate(Predicate),
    Csv(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WindowSpec {
    /// Half-width `W` of return-set windows `[−W, W]`.
    pub w: Option<i64>,
    /// Half-open domain `[start, end)` for window sets.
    pub start: Option<i64>,
    pub end: Option<i64>,
    pub density_lengths: Vec<usize>,
    pub thick_run: Option<usize>,
    pub syndetic_gap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub colorings: u64,
    pub truncation_bound: usize,
    pub max_steps: usize,
    pub max_retries: usize,
    pub shifts_per_step: usize,
    pub shift_start: i64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            colorings: DEFAULT_COLORING_BUDGET,
            truncation_bound: DEFAULT_TRUNCATION_BOUND,
            max_steps: 10_000,
            max_retries: 64,
            shifts_per_step: 1,
            shift_start: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Query {
    pub u: Option<String>,
    pub v: Vec<String>,
    pub polys: Vec<String>,
    pub maps: Vec<String>,
    pub coefficients: Vec<i64>,
    pub power: Option<i64>,
    pub t: Option<i64>,
    pub depth: Option<usize>,
    pub set: Option<String>,
    pub generators: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HindmanSpec {
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub depth: Option<usize>,
    pub coloring: Option<Vec<usize>>,
}

/// A parsed and cross-checked experiment.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExperimentConfig {
    pub system: Option<SystemSpec>,
    pub sets: BTreeMap<String, SetSpec>,
    pub window_sets: BTreeMap<String, WindowSetSpec>,
    pub polynomials: BTreeMap<String, IntegralPolynomial>,
    pub pet_system: Option<PolySystem>,
    pub maps: BTreeMap<String, GammaPolynomial>,
    pub generators: BTreeMap<String, Vec<i64>>,
    pub window: WindowSpec,
    pub budget: Budget,
    pub query: Query,
    pub hindman: HindmanSpec,
}

const SECTIONS: &[&str] = &[
    "system",
    "sets",
    "windowsets",
    "polynomials",
    "gamma",
    "generators",
    "window",
    "budget",
    "query",
    "hindman",
];

struct Entry {
    section: String,
    key: String,
    value: String,
}

impl Entry {
    fn loc(&self, token: &str) -> Location {
        Location {
            section: self.section.clone(),
            key: self.key.clone(),
            token: token.to_string(),
        }
    }

    fn invalid(&self, token: &str, reason: impl Into<String>) -> CliError {
        CliError::Validation {
            at: self.loc(token),
            reason: reason.into(),
        }
    }

    fn int<T: std::str::FromStr>(&self) -> Result<T, CliError> {
        self.value
            .parse()
            .map_err(|_| self.invalid(&self.value, "expected an integer"))
    }

    fn list<T: std::str::FromStr>(&self) -> Result<Vec<T>, CliError> {
        split_list(&self.value)
            .map(|t| t.parse().map_err(|_| self.invalid(t, "expected an integer")))
            .collect()
    }

    fn names(&self) -> Vec<String> {
        split_list(&self.value).map(str::to_string).collect()
    }

    fn flag(&self) -> Result<bool, CliError> {
        match self.value.as_str() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(self.invalid(other, "expected true or false")),
        }
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn lex(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut section: Option<String> = None;
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| CliError::Parse {
                line: line_no,
                token: line.to_string(),
                reason: "unterminated section header",
            })?;
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(CliError::Parse {
                    line: line_no,
                    token: name.to_string(),
                    reason: "unknown section",
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Parse {
                line: line_no,
                token: line.to_string(),
                reason: "expected `key = value`",
            });
        };
        let Some(section) = section.clone() else {
            return Err(CliError::Parse {
                line: line_no,
                token: key.trim().to_string(),
                reason: "key outside any section",
            });
        };
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(CliError::Parse {
                line: line_no,
                token: line.to_string(),
                reason: "empty key",
            });
        }
        if !seen.insert((section.clone(), key.clone())) {
            return Err(CliError::Validation {
                at: Location {
                    section,
                    key: key.clone(),
                    token: key,
                },
                reason: "duplicate key".into(),
            });
        }
        out.push(Entry {
            section,
            key,
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

fn poly_error(e: &Entry, source: IntPolyError) -> CliError {
    CliError::Polynomial {
        at: e.loc(&e.value),
        source,
    }
}

fn gamma_error(e: &Entry, source: GammaError) -> CliError {
    CliError::Gamma {
        at: e.loc(&e.value),
        source,
    }
}

fn parse_system(entries: &[&Entry]) -> Result<Option<SystemSpec>, CliError> {
    if entries.is_empty() {
        return Ok(None);
    }
    let get = |k: &str| entries.iter().find(|e| e.key == k).copied();
    for e in entries {
        let known = ["kind", "rules", "seeds", "max_len", "q", "p", "allow_non_coprime"];
        if !known.contains(&e.key.as_str()) {
            return Err(e.invalid(&e.key, "unknown key"));
        }
    }
    let kind = get("kind").ok_or_else(|| CliError::Validation {
        at: Location {
            section: "system".into(),
            key: "kind".into(),
            token: String::new(),
        },
        reason: "missing `kind`".into(),
    })?;
    let missing = |key: &str| CliError::Validation {
        at: Location {
            section: "system".into(),
            key: key.into(),
            token: String::new(),
        },
        reason: format!("`kind = {}` needs `{key}`", kind.value),
    };
    match kind.value.as_str() {
        "substitution" | "chacon" => {
            let (rules, seeds) = if kind.value == "chacon" {
                ("0->0010, 1->1".to_string(), None)
            } else {
                let r = get("rules").ok_or_else(|| missing("rules"))?;
                (r.value.clone(), get("seeds").map(|s| s.value.clone()))
            };
            let parsed = parse_rules(&rules).map_err(|err| {
                let e = get("rules").unwrap_or(kind);
                e.invalid(&e.value, err.to_string())
            })?;
            let alphabet = parsed.iter().map(|r| r.0).collect();
            let max_len = get("max_len").map(Entry::int).transpose()?.unwrap_or(DEFAULT_MAX_LEN);
            Ok(Some(SystemSpec::Substitution {
                rules,
                seeds,
                alphabet,
                max_len,
            }))
        }
        "rotation" => {
            let q = get("q").ok_or_else(|| missing("q"))?.int()?;
            let p = get("p").ok_or_else(|| missing("p"))?.int()?;
            let allow_non_coprime = get("allow_non_coprime").map(Entry::flag).transpose()?.unwrap_or(false);
            Ok(Some(SystemSpec::Rotation {
                q,
                p,
                allow_non_coprime,
            }))
        }
        other => Err(kind.invalid(other, "expected substitution, chacon or rotation")),
    }
}

fn parse_set(e: &Entry, system: Option<&SystemSpec>) -> Result<SetSpec, CliError> {
    let v = e.value.as_str();
    if v == "*" {
        return Ok(SetSpec::Whole);
    }
    match system {
        None => Err(e.invalid(v, "sets need a [system] section")),
        Some(SystemSpec::Rotation { q, .. }) => {
            let inner = v
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| e.invalid(v, "expected an arc `[a,b)` or `*`"))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| e.invalid(v, "expected an arc `[a,b)`"))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<u64>()
                    .ok()
                    .filter(|x| x <= q)
                    .ok_or_else(|| e.invalid(t.trim(), format!("arc endpoint must be in 0..={q}")))
            };
            Ok(SetSpec::Arc(parse(a)?, parse(b)?))
        }
        Some(SystemSpec::Substitution { alphabet, .. }) => {
            let mut parts = Vec::new();
            for term in v.split('|').map(str::trim) {
                let (word, offset) = match term.split_once('@') {
                    Some((w, o)) => (
                        w.trim(),
                        o.trim()
                            .parse::<i64>()
                            .map_err(|_| e.invalid(o.trim(), "offset must be an integer"))?,
                    ),
                    None => (term, 0),
                };
                if word.is_empty() {
                    return Err(e.invalid(term, "empty word; use `*` for the whole space"));
                }
                if let Some(c) = word.bytes().find(|c| !alphabet.contains(c)) {
                    return Err(e.invalid(word, format!("symbol {:?} is not in the alphabet", c as char)));
                }
                parts.push((word.as_bytes().to_vec(), offset));
            }
            Ok(SetSpec::Words(parts))
        }
    }
}

fn parse_window_set(e: &Entry) -> Result<WindowSetSpec, CliError> {
    if let Some(path) = e.value.strip_prefix("csv:") {
        let path = path.trim();
        if path.is_empty() {
            return Err(e.invalid(&e.value, "empty CSV path"));
        }
        return Ok(WindowSetSpec::Csv(path.to_string()));
    }
    Predicate::parse(&e.value)
        .map(WindowSetSpec::Predicate)
        .ok_or_else(|| e.invalid(&e.value, "expected csv:PATH or a predicate (all, evens, odds, squares, multiples:k)"))
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let entries = lex(text)?;
    let in_section = |s: &'static str| entries.iter().filter(move |e| e.section == s);
    let mut cfg = ExperimentConfig {
        system: parse_system(&in_section("system").collect::<Vec<_>>())?,
        ..Default::default()
    };

    for e in in_section("sets") {
        let spec = parse_set(e, cfg.system.as_ref())?;
        cfg.sets.insert(e.key.clone(), spec);
    }
    for e in in_section("windowsets") {
        cfg.window_sets.insert(e.key.clone(), parse_window_set(e)?);
    }
    for e in in_section("polynomials") {
        let p = e.value.parse::<IntegralPolynomial>().map_err(|err| poly_error(e, err))?;
        cfg.polynomials.insert(e.key.clone(), p);
    }
    for e in in_section("gamma") {
        if e.key == "system" {
            cfg.pet_system = Some(PolySystem::parse(&e.value).map_err(|err| gamma_error(e, err))?);
        } else {
            let g = e.value.parse::<GammaPolynomial>().map_err(|err| gamma_error(e, err))?;
            cfg.maps.insert(e.key.clone(), g);
        }
    }
    for e in in_section("generators") {
        let gens = e.list()?;
        if gens.is_empty() {
            return Err(e.invalid(&e.value, "empty generator list"));
        }
        cfg.generators.insert(e.key.clone(), gens);
    }
    for e in in_section("window") {
        match e.key.as_str() {
            "W" | "w" => {
                let w: i64 = e.int()?;
                if w < 0 {
                    return Err(e.invalid(&e.value, "window half-width must be nonnegative"));
                }
                cfg.window.w = Some(w);
            }
            "start" => cfg.window.start = Some(e.int()?),
            "end" => cfg.window.end = Some(e.int()?),
            "density_lengths" => cfg.window.density_lengths = e.list()?,
            "thick_run" => cfg.window.thick_run = Some(e.int()?),
            "syndetic_gap" => cfg.window.syndetic_gap = Some(e.int()?),
            _ => return Err(e.invalid(&e.key, "unknown key")),
        }
    }
    for e in in_section("budget") {
        let b = &mut cfg.budget;
        match e.key.as_str() {
            "colorings" => b.colorings = e.int()?,
            "truncation_bound" => b.truncation_bound = e.int()?,
            "max_steps" => b.max_steps = e.int()?,
            "max_retries" => b.max_retries = e.int()?,
            "shifts_per_step" => b.shifts_per_step = e.int()?,
            "shift_start" => b.shift_start = e.int()?,
            _ => return Err(e.invalid(&e.key, "unknown key")),
        }
    }
    for e in in_section("query") {
        let q = &mut cfg.query;
        match e.key.as_str() {
            "U" | "u" => q.u = Some(e.value.clone()),
            "V" | "v" => q.v = e.names(),
            "polynomials" | "polys" => q.polys = e.names(),
            "maps" => q.maps = e.names(),
            "coefficients" => q.coefficients = e.list()?,
            "power" => q.power = Some(e.int()?),
            "t" => q.t = Some(e.int()?),
            "depth" => q.depth = Some(e.int()?),
            "set" => q.set = Some(e.value.clone()),
            "generators" => q.generators = Some(e.value.clone()),
            _ => return Err(e.invalid(&e.key, "unknown key")),
        }
    }
    for e in in_section("hindman") {
        let h = &mut cfg.hindman;
        match e.key.as_str() {
            "N" | "n" => h.n = Some(e.int()?),
            "r" => h.r = Some(e.int()?),
            "depth" => h.depth = Some(e.int()?),
            "coloring" => h.coloring = Some(e.list()?),
            _ => return Err(e.invalid(&e.key, "unknown key")),
        }
    }
    resolve_references(&cfg, &entries)?;
    Ok(cfg)
}

fn resolve_references(cfg: &ExperimentConfig, entries: &[Entry]) -> Result<(), CliError> {
    let entry = |key: &str| entries.iter().find(|e| e.section == "query" && e.key == key);
    let undefined = |key: &str, name: &str, kind: &str| CliError::Validation {
        at: Location {
            section: "query".into(),
            key: entry(key).map_or(key.to_string(), |e| e.key.clone()),
            token: name.to_string(),
        },
        reason: format!("undefined {kind} `{name}`"),
    };
    let q = &cfg.query;
    if let Some(u) = &q.u {
        if !cfg.sets.contains_key(u) {
            return Err(undefined(if entry("U").is_some() { "U" } else { "u" }, u, "set"));
        }
    }
    for v in &q.v {
        if !cfg.sets.contains_key(v) {
            return Err(undefined(if entry("V").is_some() { "V" } else { "v" }, v, "set"));
        }
    }
    for p in &q.polys {
        if !cfg.polynomials.contains_key(p) {
            return Err(undefined(if entry("polys").is_some() { "polys" } else { "polynomials" }, p, "polynomial"));
        }
    }
    for m in &q.maps {
        if !cfg.maps.contains_key(m) {
            return Err(undefined("maps", m, "map"));
        }
    }
    if let Some(s) = &q.set {
        if !cfg.window_sets.contains_key(s) {
            return Err(undefined("set", s, "window set"));
        }
    }
    if let Some(g) = &q.generators {
        if !cfg.generators.contains_key(g) {
            return Err(undefined("generators", g, "generator list"));
        }
    }
    if let (Some(a), Some(b)) = (cfg.window.start, cfg.window.end) {
        if a >= b {
            return Err(CliError::Validation {
                at: Location {
                    section: "window".into(),
                    key: "end".into(),
                    token: b.to_string(),
                },
                reason: format!("window end must exceed start {a}"),
            });
        }
    }
    Ok(())
}
