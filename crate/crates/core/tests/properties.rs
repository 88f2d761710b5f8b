mod common;

use std::sync::Arc;

use common::*;
use coquasi_core::catalog::{
    check_h2_datum, check_h3_datum, cyclic_algebra, data_equivalent_h2, h2_relations, h2_system, h3_q, quaternion_algebra, DataEquivalence,
    H2Datum, H3Datum,
};
use coquasi_core::comodule::twist_comodule_algebra;
use coquasi_core::coquasi::Twist;
use coquasi_core::crossed::{
    build_crossed_product, check_crossed_system, check_equivalence_witness, check_theta, deform_by_a, twist_crossed_system,
    EquivalenceWitness, SearchBound,
};
use coquasi_core::hopf_modules::{check_hopf_module, equivalence_maps, induced_module, RModule};
use coquasi_core::linear::convolution_product;
use coquasi_core::{Coalgebra, Matrix, Scalar, Space, Vector};
use proptest::prelude::*;

fn scalar_in(order: u32) -> impl Strategy<Value = Scalar> {
    prop::collection::vec((-6i64..=6, 1i64..=4), order as usize).prop_map(move |cs| {
        cs.iter().enumerate().fold(Scalar::zero(), |acc, (k, &(n, d))| {
            &acc + &(&Scalar::from_frac(n, d) * &Scalar::root_of_unity(order, k as i64))
        })
    })
}

fn order() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![1u32, 3, 4, 5, 8])
}

fn small_vec(n: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-3i64..=3, n).prop_map(|xs| v(&xs))
}

/// The matrix coalgebra: Δ(e_ij) = Σ_k e_ik⊗e_kj, ε(e_ij) = δ_ij.
fn matrix_coalgebra(n: usize) -> Coalgebra {
    let idx = |i: usize, j: usize| i * n + j;
    let labels: Vec<String> = (0..n * n).map(|k| format!("e{}{}", k / n, k % n)).collect();
    let comult = (0..n * n)
        .map(|k| (0..n).map(|m| (idx(k / n, m), idx(m, k % n), Scalar::one())).collect())
        .collect();
    let counit = (0..n * n).map(|k| if k / n == k % n { Scalar::one() } else { Scalar::zero() }).collect();
    Coalgebra::new(Space::new(labels), comult, counit)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn scalar_field_laws((n, a, b, c) in order().prop_flat_map(|n| (Just(n), scalar_in(n), scalar_in(n), scalar_in(n)))) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
        let text = a.promote(n).to_string();
        prop_assert_eq!(Scalar::parse(&text, n).unwrap(), a);
    }

    #[test]
    fn convolution_is_associative(
        phi in prop::collection::vec(small_vec(4), 4),
        psi in prop::collection::vec(small_vec(4), 4),
        chi in prop::collection::vec(small_vec(4), 4),
    ) {
        let c = matrix_coalgebra(2);
        let r = quaternion_algebra();
        let left = convolution_product(&convolution_product(&phi, &psi, &c, &r), &chi, &c, &r);
        let right = convolution_product(&phi, &convolution_product(&psi, &chi, &c, &r), &c, &r);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn deforming_by_a_unit_map_gives_an_equivalent_system(
        which in 0usize..2,
        coeffs in prop::collection::vec(-3i64..=3, 6),
    ) {
        let cs = if which == 0 { h2_fixture() } else { h3_fixture() };
        let (dh, dr) = (cs.dim_h(), cs.dim_r());
        let mut a = vec![cs.r.one()];
        for k in 1..dh {
            a.push(v(&coeffs[(k - 1) * dr..k * dr]));
        }
        prop_assume!(a.iter().all(|x| cs.r.is_unit(x)));
        let w = EquivalenceWitness::new(a, &cs.host, &cs.r).unwrap();
        let d = deform_by_a(&cs, &w);
        let rep = check_crossed_system(&d);
        prop_assert!(rep.passed(), "{}", rep);
        prop_assert!(check_equivalence_witness(&cs, &d, &w).passed());
        prop_assert!(check_theta(&cs, &d, &w).passed());
    }

    #[test]
    fn twisting_commutes_with_the_crossed_product(
        which in 0usize..2,
        entries in prop::collection::vec((1i64..=4, prop::bool::ANY), 4),
    ) {
        let cs = if which == 0 { h2_fixture() } else { h3_fixture() };
        let c = &cs.host.base.coalgebra;
        let unit = cs.host.base.unit_index().unwrap();
        let t = Twist::grouplike(c, |i, j| {
            if i == unit || j == unit {
                return Scalar::one();
            }
            let (n, neg) = entries[(i * 3 + j) % 4];
            Scalar::from_i64(if neg { -n } else { n })
        })
        .unwrap();
        let tcs = twist_crossed_system(&cs, &t);
        prop_assert!(check_crossed_system(&tcs).passed());
        let lhs = build_crossed_product(&tcs).unwrap();
        let rhs = twist_comodule_algebra(&build_crossed_product(&cs).unwrap().algebra, &t);
        prop_assert_eq!(&lhs.algebra.algebra, &rhs.algebra);
        prop_assert_eq!(&lhs.algebra.coaction, &rhs.coaction);
    }

    #[test]
    fn h2_datum_conditions_match_the_crossed_system(
        f in prop::collection::vec(-2i64..=2, 4),
        c in prop::collection::vec(-2i64..=2, 2),
    ) {
        let b = cyclic_algebra(2, "t");
        let f = Matrix::from_columns(2, &[v(&f[0..2]), v(&f[2..4])]);
        let d = H2Datum { b, f, c: v(&c) };
        let chk = check_h2_datum(&d);
        prop_assert!(chk.agrees(), "{}", chk.report);
    }

    #[test]
    fn h3_datum_conditions_match_the_crossed_system(
        ef in 0i64..3,
        eg in 0i64..3,
        units in prop::collection::vec((0usize..3, 0i64..3, prop::sample::select(vec![1i64, -1, 2])), 4),
    ) {
        let spec = q3();
        let q = h3_q(spec);
        let b = cyclic_algebra(3, "s");
        let diag = |e: i64| {
            let mut m = Matrix::zeros(3, 3);
            for k in 0..3 {
                m.set(k, k, q.pow(e * k as i64).unwrap());
            }
            m
        };
        let unit = |&(k, e, lambda): &(usize, i64, i64)| {
            let s = &Scalar::from_i64(lambda) * &q.pow(e).unwrap();
            Vector::basis(3, k).scale(&s)
        };
        let d = H3Datum {
            b,
            f: diag(ef),
            g: diag(eg),
            u1: unit(&units[0]),
            u2: unit(&units[1]),
            v1: unit(&units[2]),
            v2: unit(&units[3]),
            field: spec,
        };
        let chk = check_h3_datum(&d);
        prop_assert!(chk.agrees(), "{}", chk.report);
    }

    #[test]
    fn conjugating_an_h2_datum_gives_an_isomorphic_datum(s in prop::collection::vec(-2i64..=2, 2)) {
        let d1 = coquasi_core::catalog::h2_fixture_datum();
        let b = &d1.b;
        let s = v(&s);
        prop_assume!(b.is_unit(&s));
        let si = b.inverse(&s).unwrap();
        // F' = s⁻¹F(−)s, c' = s⁻¹F(s⁻¹)c
        let cols: Vec<Vector> = (0..b.dim()).map(|i| b.mul3(&si, &d1.f.apply(&b.basis(i)), &s)).collect();
        let c2 = b.mul3(&si, &d1.f.apply(&si), &d1.c);
        let d2 = H2Datum { b: b.clone(), f: Matrix::from_columns(b.dim(), &cols), c: c2 };
        prop_assert!(check_h2_datum(&d2).passed());
        prop_assert!(h2_relations(&d1, &d2, &s).passed());
        let found = data_equivalent_h2(&d1, &d2, SearchBound::default()).unwrap();
        let equivalent = matches!(found, DataEquivalence::Equivalent { .. });
        prop_assert!(equivalent);
        prop_assert!(check_crossed_system(&h2_system(&d2).unwrap()).passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn free_modules_are_hopf_modules(which in 0usize..2, rank in 1usize..=3) {
        let cs = Arc::new(if which == 0 { h2_fixture() } else { h3_fixture() });
        let m = induced_module(&RModule::free(&cs.r, rank), cs.clone());
        prop_assert!(check_hopf_module(&m).passed());
        let eq = equivalence_maps(&m).unwrap();
        prop_assert!(eq.report.passed(), "{}", eq.report);
        prop_assert_eq!(eq.coinvariants.dim(), rank * cs.dim_r());
    }
}

#[test]
fn matrix_coalgebra_is_a_coalgebra() {
    let c = matrix_coalgebra(2);
    let mut r = coquasi_core::Report::new("M2*");
    c.check_coassociative(r.begin("coassociative"));
    c.check_counit(r.begin("counit"));
    assert!(r.passed());
    assert!(!c.all_grouplike());
}
