use std::fmt;

use num_integer::Integer;

use super::returns::scan;
use super::{DynError, ReturnSet};

/// `x ↦ x + p` on `ℤ_q`: equicontinuous, so never weakly mixing; minimal iff `gcd(p, q) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotationControl {
    q: u64,
    p: i64,
}

impl RotationControl {
    /// Requires `gcd(p, q) = 1`, i.e. a minimal rotation.
    pub fn new(q: u64, p: i64) -> Result<Self, DynError> {
        let rot = Self::relaxed(q, p)?;
        if !rot.is_minimal() {
            return Err(DynError::BadModulus { q, p, reason: "gcd(p, q) must be 1" });
        }
        Ok(rot)
    }

    /// Any `p`: translation is a bijection of `ℤ_q` regardless, but with
    /// `gcd(p, q) > 1` the orbits are the cosets of `gcd·ℤ_q`.
    pub fn relaxed(q: u64, p: i64) -> Result<Self, DynError> {
        if q == 0 || q > i64::MAX as u64 {
            return Err(DynError::BadModulus { q, p, reason: "modulus out of range" });
        }
        Ok(Self { q, p })
    }

    pub fn is_minimal(&self) -> bool {
        (self.p.rem_euclid(self.q as i64) as u64).gcd(&self.q) == 1
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn step(&self, x: u64) -> u64 {
        self.translate(x, 1)
    }

    /// `x + k·p mod q`.
    pub fn translate(&self, x: u64, k: i64) -> u64 {
        let q = self.q as i128;
        ((x as i128 + k as i128 * self.p as i128).rem_euclid(q)) as u64
    }
}

impl fmt::Display for RotationControl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rotation x ↦ x + {} mod {}", self.p, self.q)
    }
}

/// An arc of `ℤ_q`: a union of disjoint half-open intervals inside `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    q: u64,
    parts: Vec<(u64, u64)>,
}

impl Arc {
    /// `[start, end)`, wrapping past `q` when `end < start`; `start == end` is empty.
    pub fn new(q: u64, start: u64, end: u64) -> Result<Self, DynError> {
        if q == 0 {
            return Err(DynError::BadArc("modulus must be positive"));
        }
        if start > q || end > q {
            return Err(DynError::BadArc("endpoint outside [0, q]"));
        }
        let parts = if start <= end {
            vec![(start, end)]
        } else {
            vec![(start, q), (0, end)]
        };
        Ok(Self::normalized(q, parts))
    }

    pub fn full(q: u64) -> Self {
        Self::normalized(q, vec![(0, q)])
    }

    fn normalized(q: u64, mut parts: Vec<(u64, u64)>) -> Self {
        parts.retain(|&(a, b)| a < b);
        parts.sort_unstable();
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { q, parts: merged }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn intervals(&self) -> &[(u64, u64)] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.parts.iter().any(|&(a, b)| a <= x && x < b)
    }

    /// `self + t mod q`.
    pub fn translate(&self, t: i128) -> Self {
        let q = self.q as i128;
        let t = t.rem_euclid(q) as u64;
        let mut parts = Vec::with_capacity(self.parts.len() + 1);
        for &(a, b) in &self.parts {
            let (a2, b2) = (a + t, b + t);
            if b2 <= self.q {
                parts.push((a2, b2));
            } else if a2 >= self.q {
                parts.push((a2 - self.q, b2 - self.q));
            } else {
                parts.push((a2, self.q));
                parts.push((0, b2 - self.q));
            }
        }
        Self::normalized(self.q, parts)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let (a, b) = self.parts[i];
            let (c, d) = other.parts[j];
            let (lo, hi) = (a.max(c), b.min(d));
            if lo < hi {
                out.push((lo, hi));
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { q: self.q, parts: out }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self.parts.iter().map(|(a, b)| format!("[{a},{b})")).collect();
        write!(f, "{}", parts.join("∪"))
    }
}

/// `{n ∈ [−w, w] : ∃x ∈ U with x + a_i·n·p ∈ V_i for every i}`, exact.
pub fn rotation_probe(
    rot: &RotationControl,
    u: &Arc,
    vs: &[(Arc, i64)],
    w: i64,
) -> Result<ReturnSet, DynError> {
    if w < 0 {
        return Err(DynError::BadWindow(w));
    }
    if u.modulus() != rot.q() || vs.iter().any(|(v, _)| v.modulus() != rot.q()) {
        return Err(DynError::BadArc("arc modulus differs from the rotation's"));
    }
    let members = scan(w, |n| {
        let mut acc = u.clone();
        for (v, a) in vs {
            // x + a·n·p ∈ V  ⇔  x ∈ V − a·n·p
            let t = -(*a as i128) * (n as i128) * (rot.p() as i128);
            acc = acc.intersect(&v.translate(t));
            if acc.is_empty() {
                return Ok(false);
            }
        }
        Ok(!acc.is_empty())
    })?;
    let sets: Vec<String> = vs.iter().map(|(v, a)| format!("{a}·n: {v}")).collect();
    Ok(ReturnSet {
        window: (-w, w),
        members,
        provenance: format!("{rot}; U = {u}; V = [{}]; W = {w}", sets.join(", ")),
    })
}
