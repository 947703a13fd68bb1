use std::collections::BTreeSet;

use rayon::prelude::*;

use super::{DynError, OpenSet, Pattern, ReturnSet, SubstitutionSystem};
use crate::gammapoly::GammaPolynomial;
use crate::intpoly::{classify, IntegralPolynomial};

fn check_window(w: i64) -> Result<(), DynError> {
    if w < 0 {
        return Err(DynError::BadWindow(w));
    }
    Ok(())
}

fn width_of(parts: &[Pattern]) -> usize {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for p in parts {
        if let Some((l, h)) = p.span() {
            lo = lo.min(l);
            hi = hi.max(h);
        }
    }
    if lo > hi {
        0
    } else {
        (hi - lo) as usize
    }
}

/// Width of the widest conjunct of `U ∩ ⋂ T^{−s_i} V_i`.
fn joint_width(u: &OpenSet, vs: &[(&OpenSet, i64)]) -> usize {
    let mut best = 0;
    for pu in u.parts() {
        // An upper bound for every conjunct: the hull of all parts involved.
        let mut parts = vec![pu.clone()];
        for (v, s) in vs {
            for pv in v.parts() {
                parts.push(pv.preimage(*s));
            }
        }
        best = best.max(width_of(&parts));
    }
    best
}

fn ensure_feasible(sys: &SubstitutionSystem, needed: usize) -> Result<(), DynError> {
    if needed > sys.max_len() {
        Err(DynError::WindowTooLarge {
            needed: needed as u128,
            available: sys.max_len(),
        })
    } else {
        Ok(())
    }
}

/// `U ∩ ⋂ T^{−s_i} V_i ≠ ∅`.
fn hits(sys: &SubstitutionSystem, u: &OpenSet, vs: &[(&OpenSet, i64)]) -> Result<bool, DynError> {
    let mut acc = u.clone();
    for (v, s) in vs {
        acc = acc.intersect(&v.preimage(*s));
        if acc.parts().is_empty() {
            return Ok(false);
        }
    }
    acc.is_nonempty(sys)
}

/// Scans `[−w, w]`, optionally in parallel; the result does not depend on the split.
pub(super) fn scan(
    w: i64,
    test: impl Fn(i64) -> Result<bool, DynError> + Sync,
) -> Result<BTreeSet<i64>, DynError> {
    let hits: Vec<Result<Option<i64>, DynError>> = (-w..=w)
        .into_par_iter()
        .map(|n| test(n).map(|b| b.then_some(n)))
        .collect();
    let mut members = BTreeSet::new();
    for h in hits {
        if let Some(n) = h? {
            members.insert(n);
        }
    }
    Ok(members)
}

/// `N(U, V) ∩ [−w, w]`, where `N(U, V) = {n : U ∩ T^{−n}V ≠ ∅}`.
pub fn return_set(sys: &SubstitutionSystem, u: &OpenSet, v: &OpenSet, w: i64) -> Result<ReturnSet, DynError> {
    check_window(w)?;
    let needed = joint_width(u, &[(v, -w)]).max(joint_width(u, &[(v, w)]));
    ensure_feasible(sys, needed)?;
    let members = scan(w, |n| hits(sys, u, &[(v, n)]))?;
    Ok(ReturnSet {
        window: (-w, w),
        members,
        provenance: format!("N(U, V) on {sys}; U = {u}; V = {v}; W = {w}"),
    })
}

fn eval_i64(p: &IntegralPolynomial, n: i64, sys: &SubstitutionSystem) -> Result<i64, DynError> {
    p.eval_small(n).ok_or(DynError::WindowTooLarge {
        needed: u128::MAX,
        available: sys.max_len(),
    })
}

/// `{n : U ∩ T^{−p_1(n)}V_1 ∩ ⋯ ∩ T^{−p_d(n)}V_d ≠ ∅} ∩ [−w, w]`.
///
/// No `p_i` and no `p_i − p_j` may be constant.
pub fn poly_return_set(
    sys: &SubstitutionSystem,
    u: &OpenSet,
    vs: &[OpenSet],
    ps: &[IntegralPolynomial],
    w: i64,
) -> Result<ReturnSet, DynError> {
    check_window(w)?;
    if vs.len() != ps.len() || ps.is_empty() {
        return Err(DynError::HypothesisViolation(format!(
            "{} sets but {} polynomials",
            vs.len(),
            ps.len()
        )));
    }
    for (i, p) in ps.iter().enumerate() {
        if p.is_constant() {
            return Err(DynError::HypothesisViolation(format!("p{} = {p} is constant", i + 1)));
        }
        for (j, q) in ps.iter().enumerate().skip(i + 1) {
            if !classify(p, q).essentially_distinct {
                return Err(DynError::HypothesisViolation(format!(
                    "p{} − p{} = {} is constant",
                    i + 1,
                    j + 1,
                    p - q
                )));
            }
        }
    }
    let mut needed = 0;
    for n in -w..=w {
        let mut shifts = Vec::with_capacity(ps.len());
        for (p, v) in ps.iter().zip(vs) {
            shifts.push((v, eval_i64(p, n, sys)?));
        }
        needed = needed.max(joint_width(u, &shifts));
    }
    ensure_feasible(sys, needed)?;
    let members = scan(w, |n| {
        let shifts: Vec<(&OpenSet, i64)> = ps
            .iter()
            .zip(vs)
            .map(|(p, v)| (v, p.eval_small(n).expect("checked above")))
            .collect();
        hits(sys, u, &shifts)
    })?;
    let polys: Vec<String> = ps.iter().map(ToString::to_string).collect();
    let sets: Vec<String> = vs.iter().map(ToString::to_string).collect();
    Ok(ReturnSet {
        window: (-w, w),
        members,
        provenance: format!(
            "polynomial return set on {sys}; U = {u}; V = [{}]; p = [{}]; W = {w}",
            sets.join(", "),
            polys.join(", ")
        ),
    })
}

/// `{n : U ∩ T^{−kn}V ≠ ∅} ∩ [−w, w]`.
pub fn power_return_set(
    sys: &SubstitutionSystem,
    k: i64,
    u: &OpenSet,
    v: &OpenSet,
    w: i64,
) -> Result<ReturnSet, DynError> {
    if k == 0 {
        return Err(DynError::ZeroPower);
    }
    check_window(w)?;
    let kw = k.checked_mul(w).ok_or(DynError::WindowTooLarge {
        needed: u128::MAX,
        available: sys.max_len(),
    })?;
    let needed = joint_width(u, &[(v, -kw)]).max(joint_width(u, &[(v, kw)]));
    ensure_feasible(sys, needed)?;
    let members = scan(w, |n| hits(sys, u, &[(v, k * n)]))?;
    Ok(ReturnSet {
        window: (-w, w),
        members,
        provenance: format!("N(U, V) for T^{k} on {sys}; U = {u}; V = {v}; W = {w}"),
    })
}

/// One factor `(X_i, T^{power})` of a product system with its sets.
#[derive(Debug, Clone)]
pub struct ProductComponent<'a> {
    pub system: &'a SubstitutionSystem,
    pub power: i64,
    pub u: OpenSet,
    pub v: OpenSet,
}

/// Return set of `U_1 × ⋯ × U_d`, `V_1 × ⋯ × V_d` under the product map.
/// A point of the product hits iff each coordinate does, so `n` is a member
/// iff every component intersection is nonempty.
pub fn product_return_set(components: &[ProductComponent<'_>], w: i64) -> Result<ReturnSet, DynError> {
    check_window(w)?;
    for c in components {
        if c.power == 0 {
            return Err(DynError::ZeroPower);
        }
        let kw = c.power.checked_mul(w).ok_or(DynError::WindowTooLarge {
            needed: u128::MAX,
            available: c.system.max_len(),
        })?;
        let needed = joint_width(&c.u, &[(&c.v, -kw)]).max(joint_width(&c.u, &[(&c.v, kw)]));
        ensure_feasible(c.system, needed)?;
    }
    let members = scan(w, |n| {
        for c in components {
            if !hits(c.system, &c.u, &[(&c.v, c.power * n)])? {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    let names: Vec<String> = components
        .iter()
        .map(|c| format!("({}, T^{}, U = {}, V = {})", c.system, c.power, c.u, c.v))
        .collect();
    Ok(ReturnSet {
        window: (-w, w),
        members,
        provenance: format!("product return set of {}; W = {w}", names.join(" × ")),
    })
}

/// A point (given by a word) returning close to itself under every `g_i(n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    pub n: i64,
    /// Total shift of each `g_i(n)`.
    pub shifts: Vec<i64>,
    /// The agreeing block `x[0..ℓ]`.
    pub block: Vec<u8>,
    /// A word carrying the block at every required offset; its first symbol sits at `origin`.
    pub origin: i64,
    pub word: Vec<u8>,
}

/// Least `n ≠ 0` in `range` (in the given order) for which some admissible
/// point `x` agrees with `g_i(n)x` on coordinates `0..ℓ` for every `i`.
/// Each `g_i` acts through the sum of its exponents.
pub fn recurrence_search(
    sys: &SubstitutionSystem,
    gs: &[GammaPolynomial],
    ell: usize,
    range: impl IntoIterator<Item = i64>,
) -> Result<Option<Recurrence>, DynError> {
    let mut plan = Vec::new();
    for n in range.into_iter().filter(|&n| n != 0) {
        let mut shifts = Vec::with_capacity(gs.len());
        let (mut lo, mut hi) = (0i64, ell as i64);
        for g in gs {
            let s = i64::try_from(g.total_exponent(n)).map_err(|_| DynError::WindowTooLarge {
                needed: u128::MAX,
                available: sys.max_len(),
            })?;
            lo = lo.min(s);
            hi = hi.max(s + ell as i64);
            shifts.push(s);
        }
        ensure_feasible(sys, (hi - lo) as usize)?;
        plan.push((n, shifts));
    }
    let blocks = sys.factors(ell)?;
    for (n, shifts) in plan {
        for block in &blocks {
            let mut pat = Pattern::word_at(0, block);
            let mut ok = true;
            for &s in &shifts {
                match pat.intersect(&Pattern::word_at(s, block)) {
                    Some(p) => pat = p,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            if let Some((origin, word)) = sys.witness(&pat)? {
                return Ok(Some(Recurrence {
                    n,
                    shifts,
                    block: block.to_vec(),
                    origin,
                    word,
                }));
            }
        }
    }
    Ok(None)
}
