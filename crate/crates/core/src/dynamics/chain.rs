//! The descending open-set chain: given `V_1..V_k`, maps `g_1..g_k` and a
//! transformation `T`, pick an increasing sequence `α_0 < α_1 < …` from an
//! IP-ring and shrink each `V_i` so that `g_i(n_{α_j})T^{−j}V_i^{(n)} ⊆ V_i`
//! for every `j ≤ n`.

use thiserror::Error;

use super::{DynError, OpenSet, SubstitutionSystem};
use crate::gammapoly::GammaPolynomial;
use crate::ipsets::{FSTruncation, IPRingTruncation, IndexSet};

#[derive(Debug, Clone)]
pub struct Lemma213Query {
    pub sets: Vec<OpenSet>,
    /// Each `g_i` acts as the shift raised to the sum of its exponents.
    pub maps: Vec<GammaPolynomial>,
    /// `T` is the shift raised to this power.
    pub t: i64,
    pub fs: FSTruncation,
    pub ring: IPRingTruncation,
    /// Last index `N`; the chain has `N + 1` levels.
    pub depth: usize,
    /// Bound on the magnitude of every shift `g_i(n_α)T^{−n}`.
    pub window: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lemma213Chain {
    pub alphas: Vec<IndexSet>,
    pub n_alphas: Vec<i64>,
    /// `shifts[n][i]`: the shift power of `g_i(n_{α_n})T^{−n}`.
    pub shifts: Vec<Vec<i64>>,
    /// `levels[n][i]` = `V_i^{(n)}`.
    pub levels: Vec<Vec<OpenSet>>,
}

impl Lemma213Chain {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainFailure {
    #[error("no transitivity witness within the window at depth {depth}")]
    WitnessExhausted { depth: usize, partial: Box<Lemma213Chain> },
    #[error(transparent)]
    Dyn(#[from] DynError),
}

fn shift_of(g: &GammaPolynomial, m: i64, t: i64, n: usize) -> Option<i64> {
    let s = i64::try_from(g.total_exponent(m)).ok()?;
    s.checked_sub(t.checked_mul(n as i64)?)
}

fn validate(sys: &SubstitutionSystem, q: &Lemma213Query) -> Result<(), DynError> {
    if q.sets.is_empty() || q.sets.len() != q.maps.len() {
        return Err(DynError::BadQuery(format!(
            "{} open sets but {} maps",
            q.sets.len(),
            q.maps.len()
        )));
    }
    if q.t == 0 {
        return Err(DynError::BadQuery("T must not be the identity".into()));
    }
    if q.window < 0 {
        return Err(DynError::BadWindow(q.window));
    }
    if let Some(b) = q.ring.blocks().iter().find(|b| b.max_index() > q.fs.k()) {
        return Err(DynError::BadQuery(format!(
            "ring block {b} uses indices beyond the {} generators",
            q.fs.k()
        )));
    }
    // Every level lives inside [−window, window] plus the span of some V_i.
    let widest = q
        .sets
        .iter()
        .flat_map(|v| v.parts().iter().map(|p| p.span().map_or(0, |(lo, hi)| hi.abs().max(lo.abs()))))
        .max()
        .unwrap_or(0);
    let needed = 2 * (q.window as u128 + widest as u128) + 1;
    if needed > sys.max_len() as u128 {
        return Err(DynError::WindowTooLarge {
            needed,
            available: sys.max_len(),
        });
    }
    Ok(())
}

/// Runs the recursion `V_i^{(n)} = V_i^{(n−1)} ∩ (g_i(n_{α_n})T^{−n})^{−1}V_i`
/// (with `V_i^{(−1)} = V_i`), choosing each `α_n` greedily: the first ring
/// element, ordered by largest index then mask, with `α_n > α_{n−1}`,
/// `|n_{α_n}| > n`, all shifts inside the window and every new level nonempty.
pub fn lemma213_chain(sys: &SubstitutionSystem, q: &Lemma213Query) -> Result<Lemma213Chain, ChainFailure> {
    validate(sys, q)?;
    let mut candidates = q.ring.unions();
    candidates.sort_by_key(|a| (a.max_index(), a.mask()));
    let mut chain = Lemma213Chain::default();
    for n in 0..=q.depth {
        let prev: &[OpenSet] = chain.levels.last().map_or(&q.sets, Vec::as_slice);
        let mut accepted = None;
        for &alpha in &candidates {
            if chain.alphas.last().is_some_and(|&a| !a.precedes(alpha)) {
                continue;
            }
            let m = q.fs.value(alpha).expect("ring checked against generators");
            if m.unsigned_abs() <= n as u64 {
                continue;
            }
            let shifts: Option<Vec<i64>> = q.maps.iter().map(|g| shift_of(g, m, q.t, n)).collect();
            let Some(shifts) = shifts.filter(|s| s.iter().all(|x| x.abs() <= q.window)) else {
                continue;
            };
            let mut level = Vec::with_capacity(q.sets.len());
            for ((old, v), &s) in prev.iter().zip(&q.sets).zip(&shifts) {
                let next = old.intersect(&v.preimage(s)).prune(sys)?;
                if next.parts().is_empty() {
                    break;
                }
                level.push(next);
            }
            if level.len() == q.sets.len() {
                accepted = Some((alpha, m, shifts, level));
                break;
            }
        }
        let Some((alpha, m, shifts, level)) = accepted else {
            return Err(ChainFailure::WitnessExhausted {
                depth: n,
                partial: Box::new(chain),
            });
        };
        chain.alphas.push(alpha);
        chain.n_alphas.push(m);
        chain.shifts.push(shifts);
        chain.levels.push(level);
    }
    Ok(chain)
}

/// Re-checks a chain semantically: levels descend inside `V_i`, are nonempty,
/// `α` increases with `|n_{α_n}| > n`, and `V_i^{(n)} ⊆ T^{−s}V_i` for the
/// shift `s` of every `g_i(n_{α_j})T^{−j}`, `j ≤ n`.
pub fn verify_chain(sys: &SubstitutionSystem, q: &Lemma213Query, chain: &Lemma213Chain) -> Result<bool, DynError> {
    for (n, level) in chain.levels.iter().enumerate() {
        if n > 0 && !chain.alphas[n - 1].precedes(chain.alphas[n]) {
            return Ok(false);
        }
        if chain.n_alphas[n].unsigned_abs() <= n as u64 || q.fs.value(chain.alphas[n]) != Some(chain.n_alphas[n]) {
            return Ok(false);
        }
        for (i, set) in level.iter().enumerate() {
            if !set.is_nonempty(sys)? {
                return Ok(false);
            }
            let outer = if n == 0 { &q.sets[i] } else { &chain.levels[n - 1][i] };
            if !set.is_subset_of(outer, sys)? {
                return Ok(false);
            }
            for j in 0..=n {
                let want = shift_of(&q.maps[i], chain.n_alphas[j], q.t, j);
                if want != Some(chain.shifts[j][i]) {
                    return Ok(false);
                }
                if !set.image(chain.shifts[j][i]).is_subset_of(&q.sets[i], sys)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
