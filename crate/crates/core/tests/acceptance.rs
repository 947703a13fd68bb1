//! Acceptance run: one PASS/FAIL line per check, each against its time budget.
//! Every expected value is either a worked example or recomputed here by an
//! independent brute-force oracle.

mod common;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::pet::{as_map, compare_oracle, equivalent_oracle, phi_oracle, same_class, system, triple, weight_oracle, weight_vector};
use ipdyn::dynamics::{
    lemma213_chain, poly_return_set, power_return_set, product_return_set, return_set, rotation_probe, verify_chain,
    Arc, CylinderSet, DynError, Lemma213Query, OpenSet, ProductComponent, RotationControl, SubstitutionSystem,
};
use ipdyn::gammapoly::{pet_chain, step2_reduce, GammaPolynomial, PolySystem, ShiftPolicy, Weight, WeightVector};
use ipdyn::intpoly::IntegralPolynomial;
use ipdyn::ipsets::{enumerate_fs, hindman_all, ip_witness, HindmanOutcome, IPRingTruncation, DEFAULT_COLORING_BUDGET};
use proptest::prelude::*;
use proptest::sample::Index;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sample<S: Strategy>(runner: &mut TestRunner, s: &S) -> S::Value {
    s.new_tree(runner).expect("strategy produces values").current()
}

fn poly(c: &[i64]) -> IntegralPolynomial {
    IntegralPolynomial::from_monomials_i64(c)
}

fn gp(src: &str) -> GammaPolynomial {
    src.parse().unwrap()
}

fn golden_weights() -> Outcome {
    for (src, l, k) in [("T1^{n}", 1, 1), ("T2^{n}", 2, 1), ("T1^{n} * T2^{n^3}", 2, 3)] {
        let w = gp(src).weight();
        ensure(w == Weight::new(l, k), || format!("weight({src}) = {w}"))?;
    }
    let s = PolySystem::parse(
        "{T1^{n}; T1^{2n}; T1^{3n}; T1^{n^2}; T1^{n^2+n}; T2^{3n^2+2n}; T1^{n^6} * T2^{3n^2+n}; \
         T1^{n^4+n^3+n} * T2^{3n^2+2n}; T1^{n} * T3^{n^3}; T2^{n^5} * T3^{2n^3+n^2}; \
         T1^{n^2} * T2^{n} * T3^{3n^3+2n^2}}",
    )
    .unwrap();
    ensure(s.len() == 11, || format!("{} members", s.len()))?;
    let phi = s.weight_vector().unwrap();
    let expected = WeightVector::new(vec![
        (3, Weight::new(1, 1)),
        (1, Weight::new(1, 2)),
        (1, Weight::new(2, 2)),
        (3, Weight::new(3, 3)),
    ])
    .unwrap();
    ensure(phi == expected, || format!("φ = {phi}"))?;
    Ok(format!("φ = {phi}"))
}

fn golden_reduction() -> Outcome {
    let s = PolySystem::parse("{T^{n^2}; T^{2n^2}}").unwrap();
    let f = gp("T^{n^2}");
    for m in 1..=3i64 {
        let out = step2_reduce(&s, &f, &[m]).unwrap();
        let got: BTreeSet<GammaPolynomial> = out.members().iter().cloned().collect();
        let want: BTreeSet<GammaPolynomial> = [
            GammaPolynomial::new(vec![poly(&[0, 2 * m])]).unwrap(),
            GammaPolynomial::new(vec![poly(&[0, 4 * m, 1])]).unwrap(),
        ]
        .into();
        ensure(got == want, || format!("m = {m}: {out}"))?;
        // g(m)⁻¹ g(n + m) f(n)⁻¹ evaluated directly
        for n in -10..=10i64 {
            let direct: BTreeSet<i64> = [1i64, 2].iter().map(|c| c * (n + m).pow(2) - c * m * m - n * n).collect();
            let evaluated: BTreeSet<i64> = got.iter().map(|g| i64::try_from(g.total_exponent(n)).unwrap()).collect();
            ensure(direct == evaluated, || format!("m = {m}, n = {n}"))?;
        }
    }
    Ok("{T^{2mn}, T^{n²+4mn}} for m = 1, 2, 3".into())
}

fn descent_and_termination() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let shifts = prop::collection::btree_set((-6i64..=6).prop_filter("nonzero", |m| *m != 0), 1..=3);
    let (mut reductions, mut collisions, mut longest) = (0, 0, 0);
    for case in 0..500 {
        let s = sample(&mut runner, &system());
        let f = s.minimal_member().unwrap().clone();
        let ms: Vec<i64> = sample(&mut runner, &shifts).into_iter().collect();
        match step2_reduce(&s, &f, &ms) {
            Ok(next) => {
                reductions += 1;
                if !next.is_empty() {
                    let (a, b) = (phi_oracle(next.members()), phi_oracle(s.members()));
                    ensure(compare_oracle(&a, &b) == Ordering::Less, || {
                        format!("case {case}: {s} → {next} with {ms:?} does not descend")
                    })?;
                }
            }
            Err(ipdyn::gammapoly::GammaError::ShiftCollision { .. }) => collisions += 1,
            Err(e) => return Err(format!("case {case}: {e}")),
        }
        let chain = pet_chain(&s, &ShiftPolicy::default()).map_err(|e| format!("case {case}: {s}: {e}"))?;
        ensure(chain.len() <= 10_000, || format!("case {case}: {} steps", chain.len()))?;
        for pair in chain.windows(2) {
            if !pair[1].system.is_empty() {
                let (a, b) = (phi_oracle(pair[1].system.members()), phi_oracle(pair[0].system.members()));
                ensure(compare_oracle(&a, &b) == Ordering::Less, || format!("case {case}: chain step ascends"))?;
            }
        }
        longest = longest.max(chain.len());
    }
    Ok(format!(
        "500 systems: {reductions} collision-free reductions descend ({collisions} collisions), longest chain {longest}"
    ))
}

fn group_and_order_laws() -> Outcome {
    let mut runner = TestRunner::deterministic();
    for case in 0..1000 {
        let (f, g, h) = sample(&mut runner, &triple());
        let e = GammaPolynomial::identity(f.dim());
        let assoc = f.product(&g).unwrap().product(&h).unwrap() == f.product(&g.product(&h).unwrap()).unwrap();
        let unit = f.product(&e).unwrap() == f && e.product(&f).unwrap() == f;
        let inv = f.product(&f.inverse()).unwrap().is_identity() && f.inverse().product(&f).unwrap().is_identity();
        ensure(assoc && unit && inv, || format!("group law fails on case {case}: {f}, {g}, {h}"))?;
        let wf = f.weight();
        ensure((wf.level, wf.degree) == weight_oracle(&f), || format!("weight of {f}"))?;
    }
    for case in 0..1000 {
        let (f, g, h) = sample(&mut runner, &triple());
        let (g2, h2) = (same_class(&f, &g), same_class(&f, &h));
        let items = [&f, &g, &h, &g2, &h2];
        for a in items {
            ensure(a.equivalent(a).unwrap(), || format!("case {case}: {a} not reflexive"))?;
            for b in items {
                let ab = a.equivalent(b).unwrap();
                ensure(ab == equivalent_oracle(a, b), || format!("case {case}: {a} ~ {b} disagrees with the oracle"))?;
                ensure(ab == b.equivalent(a).unwrap(), || format!("case {case}: symmetry fails"))?;
                ensure(!ab || a.weight() == b.weight(), || format!("case {case}: weights differ"))?;
                for c in items {
                    if ab && b.equivalent(c).unwrap() {
                        ensure(a.equivalent(c).unwrap(), || format!("case {case}: transitivity fails"))?;
                    }
                }
            }
        }
        ensure(f.equivalent(&g2).unwrap() && g2.equivalent(&h2).unwrap(), || format!("case {case}: class"))?;
    }
    for case in 0..1000 {
        let (a, b, c) = (
            sample(&mut runner, &weight_vector()),
            sample(&mut runner, &weight_vector()),
            sample(&mut runner, &weight_vector()),
        );
        ensure(!a.precedes(&a), || format!("case {case}: {a} ≺ {a}"))?;
        ensure(a.cmp(&b) == compare_oracle(&as_map(&a), &as_map(&b)), || format!("case {case}: {a} vs {b}"))?;
        let trichotomy = [a.precedes(&b), a == b, b.precedes(&a)].iter().filter(|&&x| x).count();
        ensure(trichotomy == 1, || format!("case {case}: trichotomy fails for {a}, {b}"))?;
        if a.precedes(&b) && b.precedes(&c) {
            ensure(a.precedes(&c), || format!("case {case}: transitivity fails"))?;
        }
    }
    Ok("3 × 1000 cases".into())
}

fn shift_diff_golden() -> Outcome {
    for (a, b) in [(1i64, 0i64), (2, 3), (-1, 5)] {
        let p = poly(&[0, b, a]);
        for m in [1i64, 2, 5] {
            let q = p.shift_diff_i64(m);
            ensure(q == poly(&[0, 2 * a * m]), || format!("shift_diff({p}, {m}) = {q}"))?;
        }
        for m in -20..=20i64 {
            let q = p.shift_diff_i64(m);
            for n in -20..=20i64 {
                let direct = a * (n + m).pow(2) + b * (n + m);
                let split = p.eval_i64(n) + p.eval_i64(m) + q.eval_i64(n);
                ensure(split == direct.into(), || format!("cocycle fails for {p} at n = {n}, m = {m}"))?;
            }
        }
    }
    Ok("2amn for 9 cases; cocycle on [−20, 20]²".into())
}

/// `{x, y, x + y}` monochromatic for some `x ≤ y`.
fn schur_triple(coloring: &[usize]) -> bool {
    let n = coloring.len();
    (1..=n).any(|x| (x..=n - x).any(|y| coloring[x - 1] == coloring[y - 1] && coloring[y - 1] == coloring[x + y - 1]))
}

fn colorings(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |bits| (0..n).map(|i| (bits >> (n - 1 - i) & 1) as usize).collect())
}

fn finite_schur() -> Outcome {
    let five = hindman_all(5, 2, 2, DEFAULT_COLORING_BUDGET).map_err(|e| e.to_string())?;
    ensure(colorings(5).all(|c| schur_triple(&c)), || "brute force finds a bad coloring of 1..5".into())?;
    ensure(five == HindmanOutcome::Verified { colorings: 32 }, || format!("N = 5: {five:?}"))?;
    let four = hindman_all(4, 2, 2, DEFAULT_COLORING_BUDGET).map_err(|e| e.to_string())?;
    let least = colorings(4).find(|c| !schur_triple(c)).ok_or("brute force finds no bad coloring of 1..4")?;
    match four {
        HindmanOutcome::Counterexample { coloring } => {
            ensure(!schur_triple(&coloring), || format!("{coloring:?} has a triple"))?;
            ensure(coloring == least, || format!("{coloring:?} is not the least bad coloring {least:?}"))?;
            Ok(format!("1..5 verified over 32 colorings; 1..4 fails with {coloring:?}"))
        }
        other => Err(format!("N = 4: {other:?}")),
    }
}

fn chacon(max_len: usize) -> SubstitutionSystem {
    SubstitutionSystem::chacon(max_len).unwrap()
}

fn cyl(sys: &SubstitutionSystem, w: &[u8]) -> OpenSet {
    OpenSet::cylinder(&CylinderSet::new(sys, w).unwrap())
}

fn window_identities() -> Outcome {
    let sys = chacon(1024);
    let text = common::chacon_prefix(80_000);
    let mut runner = TestRunner::deterministic();
    let q = (1usize..=4, any::<Index>(), 1usize..=4, any::<Index>(), 1i64..=100);
    let pick = |len: usize, i: Index| {
        let f = sys.factors(len).unwrap();
        f[i.index(f.len())].to_vec()
    };
    let queries = 24;
    for case in 0..queries {
        let (a, i, b, j, w) = sample(&mut runner, &q);
        let (u, v) = (pick(a, i), pick(b, j));
        let (cu, cv) = (cyl(&sys, &u), cyl(&sys, &v));
        let tag = format!("case {case}: U = {}, V = {}, W = {w}", String::from_utf8_lossy(&u), String::from_utf8_lossy(&v));
        let base = return_set(&sys, &cu, &cv, w).map_err(|e| e.to_string())?;
        ensure(base.members == common::orbit_return_set(&text, &u, &v, 1, w), || format!("{tag}: orbit oracle"))?;

        let poly1 = poly_return_set(&sys, &cu, std::slice::from_ref(&cv), &[poly(&[0, 1])], w).unwrap();
        ensure(poly1.members == base.members, || format!("{tag}: d = 1 polynomial set differs"))?;

        let half = w / 2;
        let twice = power_return_set(&sys, 2, &cu, &cv, half).unwrap();
        let pulled: BTreeSet<i64> = (-half..=half).filter(|&n| base.contains(2 * n)).collect();
        ensure(twice.members == pulled, || format!("{tag}: k = 2 is not the pullback"))?;

        let (x, y) = (pick(2, i), pick(3, j));
        let comps = [
            ProductComponent { system: &sys, power: 1, u: cu.clone(), v: cv.clone() },
            ProductComponent { system: &sys, power: 2, u: cyl(&sys, &x), v: cyl(&sys, &y) },
        ];
        let prod = product_return_set(&comps, half).unwrap();
        let second = common::orbit_return_set(&text, &x, &y, 2, half);
        let both: BTreeSet<i64> = (-half..=half).filter(|n| base.contains(*n) && second.contains(n)).collect();
        ensure(prod.members == both, || format!("{tag}: product is not the intersection"))?;

        let swapped = return_set(&sys, &cv, &cu, w).unwrap();
        let negated = power_return_set(&sys, -1, &cu, &cv, w).unwrap();
        for n in -w..=w {
            ensure(base.contains(n) == swapped.contains(-n), || format!("{tag}: swap symmetry at {n}"))?;
            ensure(base.contains(n) == negated.contains(-n), || format!("{tag}: negation at {n}"))?;
        }
    }
    Ok(format!("{queries} random queries, all identities exact"))
}

/// `{n : some x has u at x, v1 at x + n, v2 at x + 2n}` along the orbit.
fn orbit_progressions(text: &[u8], u: &[u8], v1: &[u8], v2: &[u8], w: i64) -> BTreeSet<i64> {
    let marks = |word: &[u8]| {
        let mut m = vec![false; text.len()];
        for p in common::occurrences(text, word) {
            m[p] = true;
        }
        m
    };
    let (m1, m2) = (marks(v1), marks(v2));
    let at = |m: &[bool], i: i64| i >= 0 && (i as usize) < m.len() && m[i as usize];
    let mut out = BTreeSet::new();
    for x in common::occurrences(text, u) {
        let x = x as i64;
        for n in -w..=w {
            if at(&m1, x + n) && at(&m2, x + 2 * n) {
                out.insert(n);
            }
        }
    }
    out
}

fn progression_probe() -> Outcome {
    let sys = chacon(1024);
    let text = common::chacon_prefix(80_000);
    let words: Vec<Vec<u8>> = (1..=2).flat_map(|m| sys.factors(m).unwrap()).map(<[u8]>::to_vec).collect();
    let ps = [poly(&[0, 1]), poly(&[0, 2])];
    let truncations = [vec![1i64, 3, 9], vec![2, 5]];
    let sums = |g: &[i64]| -> BTreeSet<i64> {
        (1u32..1 << g.len()).map(|m| (0..g.len()).filter(|i| m >> i & 1 == 1).map(|i| g[i]).sum()).collect()
    };
    let (mut queries, mut red_flags) = (0, Vec::new());
    for u in &words {
        for v1 in &words {
            for v2 in &words {
                let vs = [cyl(&sys, v1), cyl(&sys, v2)];
                let r = poly_return_set(&sys, &cyl(&sys, u), &vs, &ps, 200).map_err(|e| e.to_string())?;
                let label = [u, v1, v2].map(|w| String::from_utf8_lossy(w).into_owned()).join(",");
                ensure(r.members == orbit_progressions(&text, u, v1, v2, 200), || format!("({label}): orbit oracle"))?;
                ensure(!r.is_empty(), || format!("({label}): empty return set"))?;
                for g in &truncations {
                    let fs = enumerate_fs(g).unwrap();
                    let found = ip_witness(&|n: i64| r.contains(n), &fs);
                    let brute = sums(g).iter().any(|n| r.contains(*n));
                    ensure(found.is_found() == brute, || format!("({label}) over {g:?}: witness disagrees"))?;
                    if !brute {
                        let first: Vec<i64> = r.members.iter().copied().filter(|&n| n > 0).take(4).collect();
                        red_flags.push(format!("({label}) over {g:?}, positive members start {first:?}"));
                    }
                }
                queries += 1;
            }
        }
    }
    ensure(red_flags.is_empty(), || {
        format!(
            "{} of {queries} cylinder triples (U, V1, V2) have no IP witness: {}",
            red_flags.len(),
            red_flags.join("; ")
        )
    })?;
    Ok(format!("{queries} cylinder triples, all nonempty with witnesses over {{1,3,9}} and {{2,5}}"))
}

fn descending_chain() -> Outcome {
    let sys = chacon(1024);
    let gens = [1i64, 3, 9, 27, 81, 243];
    let q = Lemma213Query {
        sets: vec![cyl(&sys, b"0")],
        maps: vec![gp("T^{n}")],
        t: 1,
        fs: enumerate_fs(&gens).unwrap(),
        ring: IPRingTruncation::singletons(gens.len()).unwrap(),
        depth: 3,
        window: 300,
    };
    let chain = lemma213_chain(&sys, &q).map_err(|e| e.to_string())?;
    ensure(chain.len() == 4, || format!("{} levels", chain.len()))?;
    ensure(verify_chain(&sys, &q, &chain).unwrap(), || "library verification fails".into())?;
    let text = common::chacon_prefix(200_000);
    common::check_chain_on_orbit(&text, b"0", &gens, |m| m, 1, &chain)?;
    Ok(format!("n_α = {:?}, shifts {:?}", chain.n_alphas, chain.shifts.iter().map(|s| s[0]).collect::<Vec<_>>()))
}

/// `{n : some x ∈ [0, q) has x ∈ U, x + np ∈ V1, x + 2np ∈ V2}` by scanning every x.
fn rotation_scan(q: i64, p: i64, u: (i64, i64), v1: (i64, i64), v2: (i64, i64), w: i64) -> BTreeSet<i64> {
    let inside = |x: i64, (a, b): (i64, i64)| (a..b).contains(&x.rem_euclid(q));
    (-w..=w)
        .filter(|&n| (u.0..u.1).any(|x| inside(x + n * p, v1) && inside(x + 2 * n * p, v2)))
        .collect()
}

fn rotation_control() -> Outcome {
    let (q, w) = (1000u64, 10_000i64);
    ensure(matches!(RotationControl::new(q, 618), Err(DynError::BadModulus { .. })), || {
        "gcd(618, 1000) = 2 should be rejected by the strict constructor".into()
    })?;
    let u = Arc::new(q, 0, 100).unwrap();
    let far = Arc::new(q, 500, 600).unwrap();
    let near = Arc::new(q, 0, 300).unwrap();
    let mut notes = Vec::new();
    for rot in [RotationControl::relaxed(q, 618).unwrap(), RotationControl::new(q, 617).unwrap()] {
        let p = rot.p();
        let got = rotation_probe(&rot, &u, &[(u.clone(), 1), (far.clone(), 2)], w).unwrap();
        let scan = rotation_scan(q as i64, p, (0, 100), (0, 100), (500, 600), w);
        ensure(got.members == scan, || format!("p = {p}: probe differs from the exhaustive scan"))?;
        ensure(got.is_empty(), || format!("p = {p}: {} members", got.len()))?;
        let control = rotation_probe(&rot, &u, &[(u.clone(), 1), (near.clone(), 2)], 200).unwrap();
        let scan = rotation_scan(q as i64, p, (0, 100), (0, 100), (0, 300), 200);
        ensure(control.members == scan && !control.is_empty(), || format!("p = {p}: V2 = [0,300) control"))?;
        notes.push(format!("p = {p}: empty on [−{w}, {w}]"));
    }
    Ok(notes.join("; "))
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let mut names = Vec::new();
    for (i, (name, args, text)) in common::configs::cases().into_iter().enumerate() {
        let cfg = common::configs::write_config(dir.path(), &format!("{i}.cfg"), &text);
        let (a, out_a) = common::configs::run(&cfg, &args);
        let (b, out_b) = common::configs::run(&cfg, &args);
        ensure(a == 0 && b == 0, || format!("{args:?} exited with {a}, {b}"))?;
        let (x, y) = (common::configs::csv(&out_a, name), common::configs::csv(&out_b, name));
        ensure(!x.is_empty() && x == y, || format!("{args:?}: CSV differs between runs"))?;
        names.push(name);
    }
    names.dedup();
    Ok(format!("{} subcommands byte-identical", names.len()))
}

fn main() {
    let checks: [(&str, Option<u64>, fn() -> Outcome); 11] = [
        ("golden weights", Some(1), golden_weights),
        ("golden reduction", Some(1), golden_reduction),
        ("descent and termination", Some(60), descent_and_termination),
        ("group and order laws", Some(10), group_and_order_laws),
        ("shift_diff golden", Some(1), shift_diff_golden),
        ("finite Schur", Some(5), finite_schur),
        ("window identities", Some(60), window_identities),
        ("progression probe on Chacon", Some(120), progression_probe),
        ("descending chain on Chacon", Some(30), descending_chain),
        ("rotation negative control", Some(10), rotation_control),
        ("CLI determinism", None, cli_determinism),
    ];
    let mut failed = 0;
    for (name, limit, check) in checks {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let slow = limit.is_some_and(|s| took > Duration::from_secs(s));
        let budget = limit.map_or(String::new(), |s| format!(", limit {s} s"));
        match (result, slow) {
            (Ok(detail), false) => println!("PASS {name} ({:.2} s{budget}): {detail}", took.as_secs_f64()),
            (Ok(detail), true) => {
                failed += 1;
                println!("FAIL {name} ({:.2} s{budget}): too slow; {detail}", took.as_secs_f64());
            }
            (Err(why), _) => {
                failed += 1;
                println!("FAIL {name} ({:.2} s{budget}): {why}", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
