//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod configs;
pub mod pet;

use std::collections::BTreeSet;

use ipdyn::dynamics::OpenSet;

/// A prefix of the Chacon fixed point 0 → 0010, 1 → 1, at least `min_len` long.
pub fn chacon_prefix(min_len: usize) -> Vec<u8> {
    let mut w = b"0".to_vec();
    while w.len() < min_len {
        w = w
            .iter()
            .flat_map(|&c| if c == b'0' { b"0010".to_vec() } else { vec![c] })
            .collect();
    }
    w
}

pub fn occurrences(text: &[u8], word: &[u8]) -> Vec<usize> {
    if word.is_empty() {
        return (0..text.len()).collect();
    }
    text.windows(word.len())
        .enumerate()
        .filter(|(_, w)| *w == word)
        .map(|(i, _)| i)
        .collect()
}

/// `{n ∈ [−w, w] : some position x has u at x and v at x + k·n}` along the prefix.
pub fn orbit_return_set(text: &[u8], u: &[u8], v: &[u8], k: i64, w: i64) -> BTreeSet<i64> {
    let mut at_v = vec![false; text.len()];
    for p in occurrences(text, v) {
        at_v[p] = true;
    }
    let mut out = BTreeSet::new();
    for x in occurrences(text, u) {
        for n in -w..=w {
            let y = x as i64 + k * n;
            if y >= 0 && (y as usize) < text.len() && at_v[y as usize] {
                out.insert(n);
            }
        }
    }
    out
}

/// Does the point `text[x..]` lie in the open set? Cells outside the text count as a miss.
pub fn point_in(text: &[u8], x: i64, set: &OpenSet) -> bool {
    set.parts().iter().any(|p| {
        p.cells().iter().all(|(&k, &c)| {
            let i = x + k;
            i >= 0 && (i as usize) < text.len() && text[i as usize] == c
        })
    })
}

/// Checks a one-set descending chain along an orbit: `alphas` increase with
/// `|n_α| > j`, each shift is `g(n_{α_j}) − t·j`, every level is visited by the
/// orbit, and a point lies in level `n` exactly when it lies in level `n − 1`
/// and carries `v` at each shift `s_j`, `j ≤ n`, which is the containment
/// `T^{s_j} V^{(n)} ⊆ V`.
pub fn check_chain_on_orbit(
    text: &[u8],
    v: &[u8],
    generators: &[i64],
    g: impl Fn(i64) -> i64,
    t: i64,
    chain: &ipdyn::dynamics::Lemma213Chain,
) -> Result<(), String> {
    let margin = 2048usize;
    if text.len() < 4 * margin {
        return Err("orbit prefix too short".into());
    }
    let has_v = |x: i64| {
        x >= 0 && (x as usize + v.len()) <= text.len() && &text[x as usize..x as usize + v.len()] == v
    };
    let mut prev_max = 0usize;
    let mut prev: Vec<bool> = (0..text.len()).map(|x| has_v(x as i64)).collect();
    for (j, level) in chain.levels.iter().enumerate() {
        let alpha = chain.alphas[j].indices();
        if alpha[0] <= prev_max {
            return Err(format!("alpha_{j} = {:?} does not follow the previous block", alpha));
        }
        prev_max = *alpha.last().unwrap();
        let n_alpha: i64 = alpha.iter().map(|&i| generators[i - 1]).sum();
        if n_alpha != chain.n_alphas[j] || n_alpha.unsigned_abs() <= j as u64 {
            return Err(format!("n_alpha_{j} = {} is wrong", chain.n_alphas[j]));
        }
        let s = g(n_alpha) - t * j as i64;
        if chain.shifts[j][0] != s {
            return Err(format!("shift {j} is {} but should be {s}", chain.shifts[j][0]));
        }
        let shifts: Vec<i64> = (0..=j).map(|i| chain.shifts[i][0]).collect();
        let mut cur = vec![false; text.len()];
        let mut visited = false;
        for x in margin..text.len() - margin {
            let inside = point_in(text, x as i64, &level[0]);
            let expected = prev[x] && has_v(x as i64 + s);
            if inside != expected {
                return Err(format!("level {j} disagrees with the recursion at orbit position {x}"));
            }
            if inside {
                visited = true;
                if !has_v(x as i64) || shifts.iter().any(|&sj| !has_v(x as i64 + sj)) {
                    return Err(format!("containment fails at level {j}, position {x}"));
                }
            }
            cur[x] = inside;
        }
        if !visited {
            return Err(format!("level {j} is never visited by the orbit"));
        }
        prev = cur;
    }
    Ok(())
}
