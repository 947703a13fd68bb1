mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use ipdyn::dynamics::{
    lemma213_chain, poly_return_set, power_return_set, product_return_set, return_set, verify_chain, ChainFailure,
    CylinderSet, Lemma213Query, OpenSet, ProductComponent, SubstitutionSystem,
};
use ipdyn::intpoly::IntegralPolynomial;
use ipdyn::ipsets::{enumerate_fs, IPRingTruncation};
use proptest::prelude::*;
use proptest::sample::Index;

fn chacon() -> &'static SubstitutionSystem {
    static SYS: OnceLock<SubstitutionSystem> = OnceLock::new();
    SYS.get_or_init(|| SubstitutionSystem::chacon(1024).unwrap())
}

fn fibonacci() -> &'static SubstitutionSystem {
    static SYS: OnceLock<SubstitutionSystem> = OnceLock::new();
    SYS.get_or_init(|| SubstitutionSystem::fibonacci(1024).unwrap())
}

fn orbit() -> &'static [u8] {
    static TEXT: OnceLock<Vec<u8>> = OnceLock::new();
    TEXT.get_or_init(|| common::chacon_prefix(80_000))
}

fn word(sys: &SubstitutionSystem, len: usize, pick: Index) -> Vec<u8> {
    let f = sys.factors(len).unwrap();
    f[pick.index(f.len())].to_vec()
}

fn cyl(sys: &SubstitutionSystem, w: &[u8]) -> OpenSet {
    OpenSet::cylinder(&CylinderSet::new(sys, w).unwrap())
}

fn query() -> impl Strategy<Value = (Vec<u8>, Vec<u8>, i64)> {
    (1usize..=4, any::<Index>(), 1usize..=4, any::<Index>(), 0i64..=100)
        .prop_map(|(a, i, b, j, w)| (word(chacon(), a, i), word(chacon(), b, j), w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn symmetric_under_swap((u, v, w) in query()) {
        let sys = chacon();
        let (cu, cv) = (cyl(sys, &u), cyl(sys, &v));
        let uv = return_set(sys, &cu, &cv, w).unwrap();
        let vu = return_set(sys, &cv, &cu, w).unwrap();
        for n in -w..=w {
            prop_assert_eq!(uv.contains(n), vu.contains(-n));
        }
    }

    #[test]
    fn matches_orbit((u, v, w) in query()) {
        let sys = chacon();
        let r = return_set(sys, &cyl(sys, &u), &cyl(sys, &v), w).unwrap();
        prop_assert_eq!(r.members, common::orbit_return_set(orbit(), &u, &v, 1, w));
    }

    #[test]
    fn linear_polynomial_is_plain_return((u, v, w) in query()) {
        let sys = chacon();
        let (cu, cv) = (cyl(sys, &u), cyl(sys, &v));
        let p = IntegralPolynomial::monomial(1);
        let poly = poly_return_set(sys, &cu, std::slice::from_ref(&cv), &[p], w).unwrap();
        prop_assert_eq!(poly.members, return_set(sys, &cu, &cv, w).unwrap().members);
    }

    #[test]
    fn power_is_pullback((u, v, w) in query(), k in prop::sample::select(vec![-3i64, -2, -1, 2, 3])) {
        let sys = chacon();
        let w = w.min(100 / k.abs());
        let (cu, cv) = (cyl(sys, &u), cyl(sys, &v));
        let base = return_set(sys, &cu, &cv, k.abs() * w).unwrap();
        let pow = power_return_set(sys, k, &cu, &cv, w).unwrap();
        let pulled: BTreeSet<i64> = (-w..=w).filter(|&n| base.contains(k * n)).collect();
        prop_assert_eq!(&pow.members, &pulled);
        prop_assert_eq!(pow.members, common::orbit_return_set(orbit(), &u, &v, k, w));
    }

    #[test]
    fn product_is_intersection((u, v, w) in query(), fu in any::<Index>(), fv in any::<Index>(), k in 1i64..=2) {
        let (a, b) = (chacon(), fibonacci());
        let w = w.min(50);
        let (x, y) = (word(b, 2, fu), word(b, 3, fv));
        let comps = [
            ProductComponent { system: a, power: 1, u: cyl(a, &u), v: cyl(a, &v) },
            ProductComponent { system: b, power: k, u: cyl(b, &x), v: cyl(b, &y) },
        ];
        let prod = product_return_set(&comps, w).unwrap();
        let first = return_set(a, &comps[0].u, &comps[0].v, w).unwrap();
        let second = power_return_set(b, k, &comps[1].u, &comps[1].v, w).unwrap();
        let both: BTreeSet<i64> = first.members.intersection(&second.members).copied().collect();
        prop_assert_eq!(prod.members, both);
    }

    #[test]
    fn enlarging_v_never_shrinks((u, v, w) in query(), extra in any::<Index>()) {
        let sys = chacon();
        let (cu, cv) = (cyl(sys, &u), cyl(sys, &v));
        let bigger = cv.union(&cyl(sys, &word(sys, 2, extra)));
        let small = return_set(sys, &cu, &cv, w).unwrap();
        let large = return_set(sys, &cu, &bigger, w).unwrap();
        prop_assert!(small.members.is_subset(&large.members));
        let ps = [IntegralPolynomial::monomial(1), IntegralPolynomial::term(2, 1)];
        let w = w.min(40);
        let a = poly_return_set(sys, &cu, &[cv.clone(), cv.clone()], &ps, w).unwrap();
        let b = poly_return_set(sys, &cu, &[cv.clone(), bigger.clone()], &ps, w).unwrap();
        prop_assert!(a.members.is_subset(&b.members));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn chains_are_sound(gens in prop::collection::btree_set(1i64..=120, 6), v in prop::sample::select(vec!["0", "1", "00", "01"])) {
        let sys = chacon();
        let gens: Vec<i64> = gens.into_iter().collect();
        let q = Lemma213Query {
            sets: vec![cyl(sys, v.as_bytes())],
            maps: vec!["T^{n}".parse().unwrap()],
            t: 1,
            fs: enumerate_fs(&gens).unwrap(),
            ring: IPRingTruncation::singletons(gens.len()).unwrap(),
            depth: 2,
            window: 300,
        };
        match lemma213_chain(sys, &q) {
            Ok(chain) => {
                prop_assert_eq!(chain.len(), 3);
                prop_assert!(verify_chain(sys, &q, &chain).unwrap());
                let checked = common::check_chain_on_orbit(orbit(), v.as_bytes(), &gens, |m| m, 1, &chain);
                prop_assert!(checked.is_ok(), "{:?}", checked);
            }
            Err(ChainFailure::WitnessExhausted { partial, .. }) => {
                prop_assert!(verify_chain(sys, &q, &partial).unwrap());
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
