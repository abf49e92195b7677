use std::sync::Arc;

use elfact_core::{
    alpha, count_classes, essential_reduction, gcd, invariant_of, iso_even, iso_graded, lcm, primary_decompose,
    ElementaryFactorization, FactoredElement, Grading, NormalizedDivisor, Potential, Prime, Sign,
};
use elfact_core::invariants::reconstruct_s;
use proptest::prelude::*;

fn element(exps: Vec<u64>) -> FactoredElement {
    let names = ["p", "q", "r", "s"];
    FactoredElement::from_exponents(Sign::Positive, exps.into_iter().zip(names).map(|(k, p)| (Prime::Symbol(p.into()), k)))
}

fn potential() -> impl Strategy<Value = Arc<Potential>> {
    (prop::collection::vec(2u64..=6, 1..=3), 0usize..=1).prop_map(|(orders, extra)| {
        let names = ["p", "q", "r"];
        let mut text: Vec<String> = orders.iter().zip(names).map(|(n, p)| format!("{p}^{n}")).collect();
        if extra == 1 {
            text.push("t".into());
        }
        Arc::new(Potential::parse(&text.join("*")).unwrap())
    })
}

fn with_divisors(k: usize) -> impl Strategy<Value = (Arc<Potential>, Vec<NormalizedDivisor>)> {
    potential().prop_flat_map(move |w| {
        let per = w.orders().iter().map(|&n| 0..=n).collect::<Vec<_>>();
        let w2 = w.clone();
        prop::collection::vec(per, k).prop_map(move |vs| {
            let ds = vs.into_iter().map(|e| NormalizedDivisor::new(&w2, e).unwrap()).collect();
            (w2.clone(), ds)
        })
    })
}

proptest! {
    #[test]
    fn gcd_lcm_product(a in prop::collection::vec(0u64..20, 4), b in prop::collection::vec(0u64..20, 4)) {
        let (a, b) = (element(a), element(b));
        prop_assert!(gcd(&a, &b).mul(&lcm(&a, &b)).associates(&a.mul(&b)));
        prop_assert!(gcd(&a, &b).divides(&a) && a.divides(&lcm(&a, &b)));
    }

    #[test]
    fn normalization_round_trip((w, ds) in with_divisors(1)) {
        let v = &ds[0];
        prop_assert_eq!(&w.normalize(&v.to_element(&w)).unwrap(), v);
        let (parsed, _) = w.parse_divisor(&v.render(&w)).unwrap();
        prop_assert_eq!(&parsed, v);
    }

    #[test]
    fn complement_is_involution((w, ds) in with_divisors(1)) {
        let v = &ds[0];
        prop_assert_eq!(&v.complement(&w).complement(&w), v);
        prop_assert_eq!(v.mul(&v.complement(&w)).to_element(&w), w.element());
    }

    #[test]
    fn annihilator_is_symmetric_and_divides_support((w, ds) in with_divisors(2)) {
        let (a, b) = (&ds[0], &ds[1]);
        let s = alpha(&w, a, b);
        prop_assert_eq!(&s, &alpha(&w, b, a));
        prop_assert!(s.divides(&a.gcd(&a.complement(&w))));
    }

    #[test]
    fn iso_is_an_equivalence((w, ds) in with_divisors(3)) {
        let es: Vec<_> = ds.iter().map(|v| ElementaryFactorization::from_divisor(w.clone(), v.clone())).collect();
        prop_assert!(iso_even(&es[0], &es[0]).unwrap());
        prop_assert_eq!(iso_graded(&es[0], &es[1]).unwrap(), iso_graded(&es[1], &es[0]).unwrap());
        if iso_even(&es[0], &es[1]).unwrap() && iso_even(&es[1], &es[2]).unwrap() {
            prop_assert!(iso_even(&es[0], &es[2]).unwrap());
        }
        // suspension swaps the roles of v and u
        prop_assert!(iso_graded(&es[0], &es[0].suspension()).unwrap());
    }

    #[test]
    fn invariant_components((w, ds) in with_divisors(1)) {
        let v = &ds[0];
        let d = invariant_of(&w, v);
        prop_assert_eq!(&d.s, &v.gcd(&v.complement(&w)));
        prop_assert_eq!(&d.s.mul(&d.v_prime), v);
        for part in [&d.x, &d.y, &d.z] {
            prop_assert!(part.divides(&d.s));
        }
        prop_assert!(d.i_x.is_disjoint(&d.i_z) && d.i_y.is_disjoint(&d.i_z));
        prop_assert_eq!(reconstruct_s(&d.x_max, &d.y_max, &d.z, &w).unwrap(), d.s);
    }

    #[test]
    fn essential_reduction_drops_essence((w, ds) in with_divisors(1)) {
        let e = ElementaryFactorization::from_divisor(w.clone(), ds[0].clone());
        let (z, reduced) = essential_reduction(&e);
        prop_assert!(invariant_of(reduced.potential(), reduced.v()).z.is_one());
        prop_assert!(z.mul(&z).divides(&NormalizedDivisor::new(&w, w.orders().to_vec()).unwrap()));
    }

    #[test]
    fn primary_parts_reassemble((w, ds) in with_divisors(1)) {
        let e = ElementaryFactorization::from_divisor(w.clone(), ds[0].clone());
        let parts = primary_decompose(&e);
        for p in parts.parts() {
            prop_assert!(p.size > 0 && p.size < p.order);
            prop_assert_eq!(p.size, ds[0].exponent(p.prime_index));
        }
    }

    #[test]
    fn counts_are_monotone_in_grading(w in potential()) {
        prop_assert!(count_classes(&w, Grading::Graded) <= count_classes(&w, Grading::Even));
    }
}
