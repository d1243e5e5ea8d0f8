mod common;

use proptest::prelude::*;

use nefcone::cone::{Ambient, ConeH, LinForm};
use nefcone::engine::{effective_representation, verify_witness, EffectiveOutcome};
use nefcone::exactla::{rat, Rat};
use nefcone::lp::{self, BoundednessVerdict};
use nefcone::moduli;

fn vector(d: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-2i64..=3, d).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
}

/// Full-dimensional `(d, rays, lines)` with at most one line.
fn generators() -> impl Strategy<Value = (usize, Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    (2usize..=5)
        .prop_flat_map(|d| {
            (
                Just(d),
                prop::collection::vec(vector(d), d..=d + 3),
                prop::collection::vec(vector(d), 0..=1),
            )
        })
        .prop_filter("full-dimensional", |(d, r, l)| {
            let all: Vec<Vec<i64>> = r.iter().chain(l).cloned().collect();
            common::rank(&all, *d) == *d
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_ray_matches_oracle((d, rays, lines) in generators(), g in vector(5)) {
        let g = g[..d].to_vec();
        prop_assume!(g.iter().any(|&x| x != 0));
        let cone = ConeH::from_generators(Ambient::plain(d), &rays, &lines).unwrap();
        let mut rays2 = rays.clone();
        rays2.push(g.clone());
        prop_assert_eq!(cone.sum_ray(&g).unwrap().form_set(), common::facets(d, &rays2, &lines));
    }

    #[test]
    fn sum_line_matches_oracle((d, rays, lines) in generators(), g in vector(5)) {
        let g = g[..d].to_vec();
        prop_assume!(g.iter().any(|&x| x != 0));
        let cone = ConeH::from_generators(Ambient::plain(d), &rays, &lines).unwrap();
        let mut lines2 = lines.clone();
        lines2.push(g.clone());
        let want = common::facets(d, &rays, &lines2);
        prop_assert_eq!(cone.sum_line(&g).unwrap().form_set(), want.clone());
        prop_assert_eq!(cone.without_generators().sum_line(&g).unwrap().form_set(), want);
    }

    #[test]
    fn bounded_verdicts_carry_valid_certificates((d, rays, lines) in generators(), t in vector(5)) {
        let t = t[..d].to_vec();
        prop_assume!(t.iter().any(|&x| x != 0));
        let cone = ConeH::from_generators(Ambient::plain(d), &rays, &lines).unwrap();
        let v = lp::min_over_cone(&cone, &t).unwrap();
        prop_assert!(v.recheck(&cone, &t));
        let forms: Vec<&[i64]> = cone.forms().iter().map(|f| f.coeffs()).collect();
        if let BoundednessVerdict::Bounded(c) = &v {
            prop_assert!(lp::verify_combination(&forms, c));
        }
    }

    #[test]
    fn linform_scaling_is_invisible(v in vector(6), k in 1i64..=7) {
        let a = LinForm::new(v.clone()).unwrap();
        let b = LinForm::new(v.iter().map(|x| x * k).collect()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn classes_are_complement_invariant(mask in 0u16..(1 << 7)) {
        let members: Vec<usize> = (1..=7).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let comp: Vec<usize> = (1..=7).filter(|i| !members.contains(i)).collect();
        match (moduli::canonical_class(7, &members), moduli::canonical_class(7, &comp)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(a.is_err() && b.is_err()),
        }
    }

    #[test]
    fn orthant_points_shifted_by_relations_stay_effective(
        p in prop::collection::vec(0i64..=4, 10),
        t in prop::collection::vec(-3i64..=3, 5),
    ) {
        let idx = moduli::enumerate_classes(5).unwrap();
        let rels = moduli::relation_basis(&idx);
        let mut a: Vec<Rat> = p.iter().map(|&x| rat(x)).collect();
        for (tm, v) in t.iter().zip(&rels) {
            for (s, x) in a.iter_mut().zip(v) {
                *s += rat(tm * x);
            }
        }
        let out = effective_representation(5, &a).unwrap();
        let r = out.representation().expect("shifted orthant points are effective");
        prop_assert!(r.verify(&rels));
    }
}

#[test]
fn anti_effective_point_gets_checked_witness() {
    let idx = moduli::enumerate_classes(6).unwrap();
    let rels = moduli::relation_basis(&idx);
    let a: Vec<Rat> = (0..idx.dim()).map(|i| rat(if i == 0 { -1 } else { 0 })).collect();
    match effective_representation(6, &a).unwrap() {
        EffectiveOutcome::NotEffective { witness } => assert!(verify_witness(&a, &rels, &witness)),
        EffectiveOutcome::Effective(r) => panic!("unexpected representation {:?}", r.b),
    }
}
