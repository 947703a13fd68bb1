use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::dynamics::{
    lemma213_chain, poly_return_set, power_return_set, return_set, rotation_probe, verify_chain, Arc,
    ChainFailure, CylinderSet, Lemma213Chain, Lemma213Query, OpenSet, ReturnSet, RotationControl,
    SubstitutionSystem,
};
use crate::gammapoly::{pet_chain, GammaPolynomial, PolySystem, ShiftPolicy};
use crate::intpoly::IntegralPolynomial;
use crate::ipsets::{
    enumerate_fs_bounded, hindman_all, ip_witness, monochromatic_fs, structure_classify, window_density,
    FSTruncation, HindmanOutcome, IPRingTruncation, IpWitness, StructureThresholds, WindowSet,
};

use super::config::{parse_config, ExperimentConfig, SetSpec, SystemSpec, WindowSetSpec};
use super::{Cli, CliError, Command};

/// What a subcommand produced. `failure` is set when a run stopped early but
/// still has partial output worth writing.
#[derive(Debug)]
pub struct Artifacts {
    pub name: &'static str,
    pub csv: String,
    pub summary: String,
    pub failure: Option<CliError>,
}

const EVIDENCE: &str = "note: window-scale evidence only; the substitution system is a candidate, not a proven example";

struct Context<'a> {
    cli: &'a Cli,
    cfg: ExperimentConfig,
    base: PathBuf,
}

/// Runs the subcommand and writes its artifacts. Returns the summary text.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let (cfg, base) = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (parse_config(&text)?, base)
        }
        None => (ExperimentConfig::default(), PathBuf::new()),
    };
    let ctx = Context { cli, cfg, base };
    let artifacts = match &cli.command {
        Command::PetTrace => ctx.pet_trace()?,
        Command::Weights => ctx.weights()?,
        Command::Fs => ctx.fs()?,
        Command::Hindman { n, r, all, coloring } => ctx.hindman(*n, *r, *all, coloring.as_deref())?,
        Command::Density => ctx.density()?,
        Command::ReturnSet => ctx.return_set()?,
        Command::PolyReturn => ctx.poly_return()?,
        Command::Lemma213 => ctx.lemma213()?,
        Command::MixingReport => ctx.mixing_report()?,
    };
    write_artifacts(&cli.out, &artifacts)?;
    match artifacts.failure {
        Some(e) => Err(e),
        None => Ok(artifacts.summary),
    }
}

fn write_artifacts(dir: &Path, a: &Artifacts) -> Result<(), CliError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| CliError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv = dir.join(format!("{}.csv", a.name));
    fs::write(&csv, &a.csv).map_err(io(&csv))?;
    let txt = dir.join(format!("{}.txt", a.name));
    fs::write(&txt, &a.summary).map_err(io(&txt))?;
    Ok(())
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
}

fn missing(what: &str) -> CliError {
    CliError::Missing(what.to_string())
}

fn members_line(rs: &ReturnSet) -> String {
    const SHOWN: usize = 40;
    let mut items: Vec<String> = rs.members.iter().take(SHOWN).map(i64::to_string).collect();
    if rs.len() > SHOWN {
        items.push(format!("… ({} more)", rs.len() - SHOWN));
    }
    format!("{{{}}}", items.join(", "))
}

enum System {
    Substitution(SubstitutionSystem),
    Rotation(RotationControl),
}

impl Context<'_> {
    fn window(&self) -> Result<i64, CliError> {
        self.cli
            .window
            .or(self.cfg.window.w)
            .ok_or_else(|| missing("window half-width: set `[window] W` or pass --window"))
    }

    fn system(&self) -> Result<System, CliError> {
        match self.cfg.system.as_ref().ok_or_else(|| missing("a [system] section"))? {
            SystemSpec::Substitution {
                rules,
                seeds,
                max_len,
                ..
            } => Ok(System::Substitution(SubstitutionSystem::from_spec(
                rules,
                seeds.as_deref(),
                *max_len,
            )?)),
            SystemSpec::Rotation {
                q,
                p,
                allow_non_coprime,
            } => Ok(System::Rotation(if *allow_non_coprime {
                RotationControl::relaxed(*q, *p)?
            } else {
                RotationControl::new(*q, *p)?
            })),
        }
    }

    fn open_set(&self, sys: &SubstitutionSystem, name: &str) -> Result<OpenSet, CliError> {
        match &self.cfg.sets[name] {
            SetSpec::Whole => Ok(OpenSet::whole()),
            SetSpec::Words(parts) => {
                let mut pats = Vec::with_capacity(parts.len());
                for (word, offset) in parts {
                    pats.push(CylinderSet::new(sys, word)?.at(*offset));
                }
                Ok(OpenSet::from_patterns(pats))
            }
            SetSpec::Arc(..) => Err(missing(&format!("set {name} is an arc but the system is a substitution"))),
        }
    }

    fn arc(&self, rot: &RotationControl, name: &str) -> Result<Arc, CliError> {
        match &self.cfg.sets[name] {
            SetSpec::Whole => Ok(Arc::full(rot.q())),
            SetSpec::Arc(a, b) => Ok(Arc::new(rot.q(), *a, *b)?),
            SetSpec::Words(_) => Err(missing(&format!("set {name} is a word but the system is a rotation"))),
        }
    }

    fn u_name(&self) -> Result<&str, CliError> {
        self.cfg.query.u.as_deref().ok_or_else(|| missing("`[query] U`"))
    }

    fn v_names(&self) -> Result<&[String], CliError> {
        if self.cfg.query.v.is_empty() {
            Err(missing("`[query] V`"))
        } else {
            Ok(&self.cfg.query.v)
        }
    }

    fn polys(&self) -> Result<Vec<(String, IntegralPolynomial)>, CliError> {
        if self.cfg.query.polys.is_empty() {
            return Err(missing("`[query] polys`"));
        }
        Ok(self
            .cfg
            .query
            .polys
            .iter()
            .map(|n| (n.clone(), self.cfg.polynomials[n].clone()))
            .collect())
    }

    /// `--generators` wins; otherwise every configured list in name order.
    fn truncations(&self) -> Result<Vec<(String, FSTruncation)>, CliError> {
        let bound = self.cfg.budget.truncation_bound;
        if let Some(g) = &self.cli.generators {
            return Ok(vec![("cli".to_string(), enumerate_fs_bounded(g, bound)?)]);
        }
        if self.cfg.generators.is_empty() {
            return Err(missing("a [generators] section or --generators"));
        }
        self.cfg
            .generators
            .iter()
            .map(|(name, g)| Ok((name.clone(), enumerate_fs_bounded(g, bound)?)))
            .collect()
    }

    fn window_set(&self) -> Result<(String, WindowSet), CliError> {
        let name = self.cfg.query.set.as_deref().ok_or_else(|| missing("`[query] set`"))?;
        let (start, end) = (self.cfg.window.start, self.cfg.window.end);
        let set = match &self.cfg.window_sets[name] {
            WindowSetSpec::Predicate(p) => {
                let (Some(a), Some(b)) = (start, end) else {
                    return Err(missing("`[window] start` and `end` for a predicate window set"));
                };
                WindowSet::from_predicate(a, b, p)
            }
            WindowSetSpec::Csv(rel) => {
                let path = self.base.join(rel);
                let values = read_integer_csv(&path)?;
                let (a, b) = match (start, end) {
                    (Some(a), Some(b)) => (a, b),
                    _ => match (values.iter().min(), values.iter().max()) {
                        (Some(&lo), Some(&hi)) => (start.unwrap_or(lo), end.unwrap_or(hi + 1)),
                        _ => return Err(missing("`[window] start` and `end` for an empty CSV set")),
                    },
                };
                WindowSet::new(a, b, values)?
            }
        };
        Ok((name.to_string(), set))
    }

    fn pet_system(&self) -> Result<&PolySystem, CliError> {
        self.cfg
            .pet_system
            .as_ref()
            .ok_or_else(|| missing("`[gamma] system`"))
    }

    fn pet_trace(&self) -> Result<Artifacts, CliError> {
        let system = self.pet_system()?;
        let b = &self.cfg.budget;
        let policy = ShiftPolicy {
            per_step: b.shifts_per_step,
            start: b.shift_start,
            max_retries: b.max_retries,
            max_steps: b.max_steps,
        };
        let chain = pet_chain(system, &policy)?;
        let mut summary = String::new();
        writeln!(summary, "pet-trace").unwrap();
        writeln!(summary, "system: {system}").unwrap();
        writeln!(
            summary,
            "policy: shifts_per_step={} shift_start={} max_retries={} max_steps={}",
            policy.per_step, policy.start, policy.max_retries, policy.max_steps
        )
        .unwrap();
        let mut rows = Vec::new();
        for (i, step) in chain.iter().enumerate() {
            let phi = step.weights.as_ref().map_or("∅".to_string(), ToString::to_string);
            let f = step.reduced_by.as_ref().map_or(String::new(), ToString::to_string);
            let shifts: Vec<String> = step.shifts.iter().map(i64::to_string).collect();
            match &step.reduced_by {
                Some(_) => writeln!(
                    summary,
                    "step {i}: {} φ = {phi}; reduce by f = {f} with m = [{}]",
                    step.system,
                    shifts.join(", ")
                ),
                None => writeln!(summary, "step {i}: {} φ = {phi}", step.system),
            }
            .unwrap();
            rows.push(vec![i.to_string(), phi, f, shifts.join(" "), step.system.to_string()]);
        }
        let last = chain.last().map(|s| &s.system);
        writeln!(
            summary,
            "terminated after {} reductions: {}",
            chain.len().saturating_sub(1),
            match last {
                Some(s) if s.is_empty() => "empty system",
                _ => "base system (linear, pairwise inequivalent)",
            }
        )
        .unwrap();
        Ok(Artifacts {
            name: "pet-trace",
            csv: csv_text(&["step", "weight_vector", "reduced_by", "shifts", "system"], rows),
            summary,
            failure: None,
        })
    }

    fn weights(&self) -> Result<Artifacts, CliError> {
        let system = self.pet_system()?;
        let phi = system.weight_vector()?;
        let mut summary = format!("weights\nsystem: {system}\n");
        let mut rows = Vec::new();
        for g in system.members() {
            let lc = g.leading_coefficient().map_or(String::new(), |c| c.to_string());
            writeln!(summary, "{g}: weight {} leading coefficient {lc}", g.weight()).unwrap();
            rows.push(vec![g.to_string(), g.weight().to_string(), lc]);
        }
        for (name, g) in &self.cfg.maps {
            let lc = g.leading_coefficient().map_or(String::new(), |c| c.to_string());
            writeln!(summary, "{name} = {g}: weight {} leading coefficient {lc}", g.weight()).unwrap();
        }
        writeln!(summary, "weight vector: {phi}").unwrap();
        Ok(Artifacts {
            name: "weights",
            csv: csv_text(&["member", "weight", "leading_coefficient"], rows),
            summary,
            failure: None,
        })
    }

    fn fs(&self) -> Result<Artifacts, CliError> {
        let truncs = self.truncations()?;
        let set = match self.cfg.query.set {
            Some(_) => Some(self.window_set()?),
            None => None,
        };
        let mut summary = String::from("fs\n");
        if let Some((name, s)) = &set {
            writeln!(summary, "set: {name} on [{}, {})", s.start(), s.end()).unwrap();
        }
        let mut rows = Vec::new();
        for (name, fs) in &truncs {
            writeln!(summary, "truncation {name}: generators {:?}, {} sums", fs.generators(), fs.len()).unwrap();
            for (alpha, value) in fs.entries() {
                let member = set
                    .as_ref()
                    .map_or(String::new(), |(_, s)| (s.members().contains(&value) as u8).to_string());
                rows.push(vec![name.clone(), alpha.to_string(), value.to_string(), member]);
            }
            if let Some((_, s)) = &set {
                writeln!(summary, "  {}", ip_witness(s, fs)).unwrap();
            }
        }
        Ok(Artifacts {
            name: "fs",
            csv: csv_text(&["truncation", "alpha", "value", "member"], rows),
            summary,
            failure: None,
        })
    }

    fn hindman(
        &self,
        n: Option<usize>,
        r: Option<usize>,
        all: bool,
        coloring: Option<&[usize]>,
    ) -> Result<Artifacts, CliError> {
        let h = &self.cfg.hindman;
        let depth = self.cli.depth.or(h.depth).unwrap_or(2);
        let mut summary = String::from("hindman\n");
        if all {
            let n = n.or(h.n).ok_or_else(|| missing("--N or `[hindman] N`"))?;
            let r = r.or(h.r).ok_or_else(|| missing("--r or `[hindman] r`"))?;
            let outcome = hindman_all(n, r, depth, self.cfg.budget.colorings)?;
            writeln!(summary, "N={n} r={r} depth={depth} budget={}", self.cfg.budget.colorings).unwrap();
            let (label, count, ce) = match &outcome {
                HindmanOutcome::Verified { colorings } => ("Verified", colorings.to_string(), String::new()),
                HindmanOutcome::Counterexample { coloring } => (
                    "Counterexample",
                    String::new(),
                    coloring.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                ),
            };
            writeln!(summary, "{label}").unwrap();
            if !ce.is_empty() {
                writeln!(summary, "coloring of 1..{n}: {ce}").unwrap();
            }
            return Ok(Artifacts {
                name: "hindman",
                csv: csv_text(
                    &["n", "r", "depth", "outcome", "colorings", "counterexample"],
                    [vec![n.to_string(), r.to_string(), depth.to_string(), label.into(), count, ce]],
                ),
                summary,
                failure: None,
            });
        }
        let coloring = coloring
            .map(<[usize]>::to_vec)
            .or_else(|| h.coloring.clone())
            .ok_or_else(|| missing("--coloring, `[hindman] coloring`, or --all"))?;
        let found = monochromatic_fs(&coloring, depth);
        let shown: Vec<String> = coloring.iter().map(usize::to_string).collect();
        writeln!(summary, "coloring of 1..{}: {} depth={depth}", coloring.len(), shown.join(" ")).unwrap();
        let rows = match &found {
            Some(m) => {
                let sums: Vec<String> = m.sums.iter().map(i64::to_string).collect();
                writeln!(summary, "color {} generators {:?} sums {{{}}}", m.color, m.generators, sums.join(", ")).unwrap();
                vec![vec![
                    m.color.to_string(),
                    m.generators.iter().map(i64::to_string).collect::<Vec<_>>().join(" "),
                    sums.join(" "),
                ]]
            }
            None => {
                writeln!(summary, "no monochromatic FS set of depth {depth}").unwrap();
                Vec::new()
            }
        };
        Ok(Artifacts {
            name: "hindman",
            csv: csv_text(&["color", "generators", "sums"], rows),
            summary,
            failure: None,
        })
    }

    fn density(&self) -> Result<Artifacts, CliError> {
        let (name, set) = self.window_set()?;
        let len = set.window_len();
        let lengths = if self.cfg.window.density_lengths.is_empty() {
            let mut v = Vec::new();
            let mut l = 1;
            while l <= len {
                v.push(l);
                l *= 2;
            }
            v
        } else {
            self.cfg.window.density_lengths.clone()
        };
        let mut thresholds = StructureThresholds::default();
        if let Some(t) = self.cfg.window.thick_run {
            thresholds.thick_run = t;
        }
        if let Some(g) = self.cfg.window.syndetic_gap {
            thresholds.syndetic_gap = g;
        }
        let mut summary = format!("density\nset: {name} on [{}, {}), {} members\n", set.start(), set.end(), set.members().len());
        let mut rows = Vec::new();
        for l in lengths {
            let d = window_density(&set, l)?;
            writeln!(summary, "L={l}: upper {} lower {}", d.upper, d.lower).unwrap();
            rows.push(vec![l.to_string(), d.upper.to_string(), d.lower.to_string()]);
        }
        let s = structure_classify(&set, thresholds);
        writeln!(
            summary,
            "max gap {:?}, max run {}, syndetic bound {:?}",
            s.max_gap, s.max_run, s.syndetic_bound
        )
        .unwrap();
        writeln!(
            summary,
            "thresholds: thick_run={} syndetic_gap={}",
            s.thresholds.thick_run, s.thresholds.syndetic_gap
        )
        .unwrap();
        writeln!(
            summary,
            "syndetic={} thick={} piecewise_syndetic={} thickly_syndetic={}",
            s.syndetic, s.thick, s.piecewise_syndetic, s.thickly_syndetic
        )
        .unwrap();
        Ok(Artifacts {
            name: "density",
            csv: csv_text(&["length", "upper", "lower"], rows),
            summary,
            failure: None,
        })
    }

    fn return_set(&self) -> Result<Artifacts, CliError> {
        let w = self.window()?;
        let u = self.u_name()?;
        let vs = self.v_names()?;
        let rs = match self.system()? {
            System::Substitution(sys) => {
                let (uu, vv) = (self.open_set(&sys, u)?, self.open_set(&sys, &vs[0])?);
                match self.cfg.query.power {
                    Some(k) if k != 1 => power_return_set(&sys, k, &uu, &vv, w)?,
                    _ => return_set(&sys, &uu, &vv, w)?,
                }
            }
            System::Rotation(rot) => {
                let coeffs = &self.cfg.query.coefficients;
                let mut arcs = Vec::with_capacity(vs.len());
                for (i, v) in vs.iter().enumerate() {
                    arcs.push((self.arc(&rot, v)?, coeffs.get(i).copied().unwrap_or(i as i64 + 1)));
                }
                rotation_probe(&rot, &self.arc(&rot, u)?, &arcs, w)?
            }
        };
        Ok(self.return_artifacts("return-set", &rs))
    }

    fn return_artifacts(&self, name: &'static str, rs: &ReturnSet) -> Artifacts {
        let mut summary = format!("{name}\n{}\n", rs.provenance);
        writeln!(summary, "window [{}, {}]: {} members", rs.window.0, rs.window.1, rs.len()).unwrap();
        writeln!(summary, "members: {}", members_line(rs)).unwrap();
        if matches!(self.cfg.system, Some(SystemSpec::Substitution { .. })) {
            writeln!(summary, "{EVIDENCE}").unwrap();
        }
        Artifacts {
            name,
            csv: rs.to_csv(),
            summary,
            failure: None,
        }
    }

    fn substitution(&self) -> Result<SubstitutionSystem, CliError> {
        match self.system()? {
            System::Substitution(sys) => Ok(sys),
            System::Rotation(_) => Err(missing("a substitution system for this subcommand")),
        }
    }

    fn poly_query(&self, sys: &SubstitutionSystem) -> Result<ReturnSet, CliError> {
        let w = self.window()?;
        let u = self.open_set(sys, self.u_name()?)?;
        let vs: Vec<OpenSet> = self
            .v_names()?
            .iter()
            .map(|v| self.open_set(sys, v))
            .collect::<Result<_, _>>()?;
        let ps: Vec<IntegralPolynomial> = self.polys()?.into_iter().map(|p| p.1).collect();
        Ok(poly_return_set(sys, &u, &vs, &ps, w)?)
    }

    fn poly_return(&self) -> Result<Artifacts, CliError> {
        let sys = self.substitution()?;
        let rs = self.poly_query(&sys)?;
        Ok(self.return_artifacts("poly-return", &rs))
    }

    fn lemma213(&self) -> Result<Artifacts, CliError> {
        let sys = self.substitution()?;
        let q = &self.cfg.query;
        let sets: Vec<OpenSet> = self
            .v_names()?
            .iter()
            .map(|v| self.open_set(&sys, v))
            .collect::<Result<_, _>>()?;
        let maps: Vec<GammaPolynomial> = if q.maps.is_empty() {
            vec!["T^{n}".parse().expect("literal")]
        } else {
            q.maps.iter().map(|m| self.cfg.maps[m].clone()).collect()
        };
        let gens: Vec<i64> = match (&self.cli.generators, &q.generators) {
            (Some(g), _) => g.clone(),
            (None, Some(name)) => self.cfg.generators[name].clone(),
            (None, None) => self
                .cfg
                .generators
                .values()
                .next()
                .cloned()
                .ok_or_else(|| missing("a generator list for the IP-ring"))?,
        };
        let fs = enumerate_fs_bounded(&gens, self.cfg.budget.truncation_bound)?;
        let query = Lemma213Query {
            sets,
            maps,
            t: q.t.unwrap_or(1),
            ring: IPRingTruncation::singletons(fs.k())?,
            fs,
            depth: self.cli.depth.or(q.depth).unwrap_or(3),
            window: self.window()?,
        };
        let mut summary = String::from("lemma213\n");
        writeln!(summary, "system: {sys}").unwrap();
        let sets: Vec<String> = query.sets.iter().map(ToString::to_string).collect();
        let maps: Vec<String> = query.maps.iter().map(ToString::to_string).collect();
        writeln!(
            summary,
            "V = [{}]; g = [{}]; T = shift^{}; generators {:?}; depth {}; window {}",
            sets.join(", "),
            maps.join(", "),
            query.t,
            gens,
            query.depth,
            query.window
        )
        .unwrap();
        let (chain, failure) = match lemma213_chain(&sys, &query) {
            Ok(c) => (c, None),
            Err(ChainFailure::WitnessExhausted { depth, partial }) => {
                writeln!(summary, "witness exhausted at depth {depth}; partial chain follows").unwrap();
                let c = (*partial).clone();
                (c, Some(CliError::Chain(ChainFailure::WitnessExhausted { depth, partial })))
            }
            Err(e) => return Err(e.into()),
        };
        let rows = chain_rows(&chain, &mut summary);
        if failure.is_none() {
            let ok = verify_chain(&sys, &query, &chain)?;
            writeln!(summary, "containments verified: {ok}").unwrap();
        }
        writeln!(summary, "{EVIDENCE}").unwrap();
        Ok(Artifacts {
            name: "lemma213",
            csv: csv_text(&["level", "set", "alpha", "n_alpha", "shift", "open_set"], rows),
            summary,
            failure,
        })
    }

    fn mixing_report(&self) -> Result<Artifacts, CliError> {
        let sys = self.substitution()?;
        let rs = self.poly_query(&sys)?;
        let truncs = self.truncations()?;
        let w = rs.window.1;
        for (name, fs) in &truncs {
            if let Some(v) = fs.entries().map(|e| e.1).find(|v| v.abs() > w) {
                return Err(CliError::OutsideWindow {
                    truncation: name.clone(),
                    value: v,
                    window: w,
                });
            }
        }
        let mut summary = String::from("mixing-report\n");
        writeln!(summary, "{}", rs.provenance).unwrap();
        writeln!(summary, "return set: {} members in [{}, {}]", rs.len(), rs.window.0, rs.window.1).unwrap();
        let membership = |n: i64| rs.contains(n);
        let mut rows = Vec::new();
        for (name, fs) in &truncs {
            let gens: Vec<String> = fs.generators().iter().map(i64::to_string).collect();
            let witness = ip_witness(&membership, fs);
            writeln!(summary, "truncation {name} {{{}}}: {witness}", gens.join(", ")).unwrap();
            let (outcome, alpha, value) = match &witness {
                IpWitness::Found { alpha, value } => ("witness", alpha.to_string(), value.to_string()),
                IpWitness::Inconclusive { .. } => ("inconclusive", String::new(), String::new()),
            };
            rows.push(vec![name.clone(), gens.join(" "), outcome.to_string(), alpha, value]);
        }
        writeln!(summary, "{EVIDENCE}").unwrap();
        Ok(Artifacts {
            name: "mixing-report",
            csv: csv_text(&["truncation", "generators", "outcome", "alpha", "value"], rows),
            summary,
            failure: None,
        })
    }
}

fn chain_rows(chain: &Lemma213Chain, summary: &mut String) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (n, level) in chain.levels.iter().enumerate() {
        writeln!(
            summary,
            "level {n}: α = {} n_α = {} shifts {:?}",
            chain.alphas[n], chain.n_alphas[n], chain.shifts[n]
        )
        .unwrap();
        for (i, set) in level.iter().enumerate() {
            writeln!(summary, "  V{}^({n}) = {set}", i + 1).unwrap();
            rows.push(vec![
                n.to_string(),
                (i + 1).to_string(),
                chain.alphas[n].to_string(),
                chain.n_alphas[n].to_string(),
                chain.shifts[n][i].to_string(),
                set.to_string(),
            ]);
        }
    }
    rows
}

fn read_integer_csv(path: &Path) -> Result<Vec<i64>, CliError> {
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Input {
            path: shown.clone(),
            reason: e.to_string(),
        })?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input {
            path: shown.clone(),
            reason: e.to_string(),
        })?;
        let Some(field) = rec.get(0).filter(|f| !f.is_empty()) else {
            continue;
        };
        let v = field.parse().map_err(|_| CliError::Input {
            path: shown.clone(),
            reason: format!("record {}: {field:?} is not an integer", i + 1),
        })?;
        out.push(v);
    }
    Ok(out)
}
