//! Strategies and brute-force oracles for Γ-polynomials and weight vectors.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use ipdyn::gammapoly::{GammaPolynomial, PolySystem, Weight, WeightVector};
use ipdyn::intpoly::IntegralPolynomial;
use num_rational::BigRational;
use proptest::prelude::*;

pub fn exponent(max_deg: usize, bound: i64) -> impl Strategy<Value = IntegralPolynomial> {
    prop::collection::vec(-bound..=bound, 0..=max_deg).prop_map(|tail| {
        let mut c = vec![0];
        c.extend(tail);
        IntegralPolynomial::from_monomials_i64(&c)
    })
}

pub fn gamma(d: usize, max_deg: usize) -> impl Strategy<Value = GammaPolynomial> {
    prop::collection::vec(exponent(max_deg, 5), d).prop_map(|e| GammaPolynomial::new(e).unwrap())
}

pub fn triple() -> impl Strategy<Value = (GammaPolynomial, GammaPolynomial, GammaPolynomial)> {
    (1usize..=3).prop_flat_map(|d| (gamma(d, 4), gamma(d, 4), gamma(d, 4)))
}

// (level, degree) read straight off the monomial coefficients.
pub fn weight_oracle(g: &GammaPolynomial) -> (usize, usize) {
    for (j, p) in g.exponents().iter().enumerate().rev() {
        let mono = p.to_monomials();
        if !mono.is_empty() {
            return (j + 1, mono.len() - 1);
        }
    }
    (0, 0)
}

pub fn lead_oracle(g: &GammaPolynomial) -> Option<BigRational> {
    let (l, _) = weight_oracle(g);
    (l > 0).then(|| g.exponents()[l - 1].to_monomials().last().unwrap().clone())
}

pub fn equivalent_oracle(g: &GammaPolynomial, h: &GammaPolynomial) -> bool {
    weight_oracle(g) == weight_oracle(h) && lead_oracle(g) == lead_oracle(h)
}

pub fn phi_oracle(members: &[GammaPolynomial]) -> BTreeMap<(usize, usize), usize> {
    let mut reps: Vec<&GammaPolynomial> = Vec::new();
    for g in members {
        if !reps.iter().any(|r| equivalent_oracle(r, g)) {
            reps.push(g);
        }
    }
    let mut out = BTreeMap::new();
    for r in reps {
        *out.entry(weight_oracle(r)).or_insert(0) += 1;
    }
    out
}

// Largest weight with differing multiplicity decides; absent means zero.
pub fn compare_oracle(a: &BTreeMap<(usize, usize), usize>, b: &BTreeMap<(usize, usize), usize>) -> Ordering {
    let mut keys: Vec<_> = a.keys().chain(b.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    for w in keys.into_iter().rev() {
        let (x, y) = (a.get(&w).copied().unwrap_or(0), b.get(&w).copied().unwrap_or(0));
        if x != y {
            return x.cmp(&y);
        }
    }
    Ordering::Equal
}

pub fn as_map(v: &WeightVector) -> BTreeMap<(usize, usize), usize> {
    v.entries().iter().map(|&(m, w)| ((w.level, w.degree), m)).collect()
}

pub fn weight_vector() -> impl Strategy<Value = WeightVector> {
    prop::collection::btree_map((1usize..=3, 0usize..=3), 1usize..=3, 1..=4).prop_map(|m| {
        WeightVector::new(m.into_iter().map(|((l, k), c)| (c, Weight::new(l, k))).collect()).unwrap()
    })
}

pub fn system() -> impl Strategy<Value = PolySystem> {
    (1usize..=2)
        .prop_flat_map(|d| prop::collection::vec(gamma(d, 3), 1..=4))
        .prop_filter_map("valid system", |m| PolySystem::new(m).ok())
}

/// `f · x'`, where `x'` keeps only the part of `x` below `f`'s weight; equivalent to `f`.
pub fn same_class(f: &GammaPolynomial, x: &GammaPolynomial) -> GammaPolynomial {
    let w = f.weight();
    let exps: Vec<IntegralPolynomial> = x
        .exponents()
        .iter()
        .enumerate()
        .map(|(j, p)| match (j + 1).cmp(&w.level) {
            Ordering::Greater => IntegralPolynomial::zero(),
            Ordering::Equal => {
                let keep: Vec<BigRational> = p.to_monomials().into_iter().take(w.degree).collect();
                IntegralPolynomial::from_monomials(&keep).unwrap()
            }
            Ordering::Less => p.clone(),
        })
        .collect();
    f.product(&GammaPolynomial::new(exps).unwrap()).unwrap()
}
