//! Distinct-factor enumeration over a set of words via a suffix array.

/// Suffix array plus LCP over the concatenation `w_1 # w_2 # …`.
#[derive(Debug, Clone)]
pub(crate) struct FactorIndex {
    text: Vec<u8>,
    sa: Vec<u32>,
    /// `lcp[i]` = longest common prefix of suffixes `sa[i−1]` and `sa[i]`.
    lcp: Vec<u32>,
    /// Symbols left before the next separator, starting at each position.
    run: Vec<u32>,
}

const SEPARATOR: u8 = 0;

impl FactorIndex {
    /// Words must not contain the byte 0.
    pub(crate) fn new(words: &[Vec<u8>]) -> Self {
        let mut text = Vec::with_capacity(words.iter().map(|w| w.len() + 1).sum());
        for w in words {
            debug_assert!(!w.contains(&SEPARATOR));
            text.extend_from_slice(w);
            text.push(SEPARATOR);
        }
        let mut run = vec![0u32; text.len()];
        let mut left = 0u32;
        for i in (0..text.len()).rev() {
            left = if text[i] == SEPARATOR { 0 } else { left + 1 };
            run[i] = left;
        }
        let sa = suffix_array(&text);
        let lcp = kasai(&text, &sa);
        Self { text, sa, lcp, run }
    }

    /// Start positions of one occurrence of each distinct factor of length `m`,
    /// in lexicographic order of the factors.
    pub(crate) fn distinct(&self, m: usize) -> Vec<usize> {
        let mut out = Vec::new();
        if m == 0 {
            return out;
        }
        let mut since_valid = u32::MAX;
        let mut have_prev = false;
        for (idx, &pos) in self.sa.iter().enumerate() {
            if idx > 0 {
                since_valid = since_valid.min(self.lcp[idx]);
            }
            if (self.run[pos as usize] as usize) < m {
                continue;
            }
            if !have_prev || (since_valid as usize) < m {
                out.push(pos as usize);
            }
            have_prev = true;
            since_valid = u32::MAX;
        }
        out
    }

    pub(crate) fn slice(&self, pos: usize, m: usize) -> &[u8] {
        &self.text[pos..pos + m]
    }
}

/// Prefix doubling, `O(n log² n)`.
fn suffix_array(text: &[u8]) -> Vec<u32> {
    let n = text.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut rank: Vec<u32> = text.iter().map(|&c| c as u32).collect();
    let mut next = vec![0u32; n];
    let mut k = 1usize;
    loop {
        let key = |i: u32| {
            let i = i as usize;
            let second = if i + k < n { rank[i + k] as i64 } else { -1 };
            (rank[i], second)
        };
        sa.sort_unstable_by_key(|&i| key(i));
        next[sa[0] as usize] = 0;
        for w in 1..n {
            let bump = (key(sa[w - 1]) != key(sa[w])) as u32;
            next[sa[w] as usize] = next[sa[w - 1] as usize] + bump;
        }
        std::mem::swap(&mut rank, &mut next);
        if rank[sa[n - 1] as usize] as usize == n - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

fn kasai(text: &[u8], sa: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut rank = vec![0usize; n];
    for (i, &p) in sa.iter().enumerate() {
        rank[p as usize] = i;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1] as usize;
            while i + h < n && j + h < n && text[i + h] == text[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h as u32;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}
