mod common;

use std::sync::Arc;

use common::*;
use coquasi_core::catalog::{group_algebra, h2, h3, quaternion_algebra, twisted_group_algebra};
use coquasi_core::comodule::{check_comodule_algebra, coinvariants, galois_can};
use coquasi_core::crossed::{base_field_obstruction, check_crossed_system, heisenberg_double, CrossedSystem};
use coquasi_core::hopf_modules::{
    check_hopf_module, equivalence_maps, from_relative_hopf, induced_module, regular_module, to_relative_hopf, RModule,
};
use coquasi_core::comodule::check_relative_hopf_module;
use coquasi_core::{Algebra, Matrix, Scalar, Space, Vector};

#[test]
fn clifford_twist_of_c2_squared_is_the_quaternions() {
    let a = twisted_group_algebra(2);
    assert!(check_comodule_algebra(&a).passed());
    let q = quaternion_algebra();
    // 1 ↦ 1, i ↦ e1, j ↦ e2, k ↦ -e1e2
    let phi = Matrix::from_columns(4, &[v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0]), v(&[0, 0, 1, 0]), v(&[0, 0, 0, -1])]);
    for x in 0..4 {
        for y in 0..4 {
            let lhs = phi.apply(&q.product_basis(x, y));
            let rhs = a.algebra.mul(&phi.apply(&q.basis(x)), &phi.apply(&q.basis(y)));
            assert_eq!(lhs, rhs, "{} {}", q.space.label(x), q.space.label(y));
        }
    }
    let g = galois_can(&a);
    assert!(g.bijective && g.report.passed());
    assert_eq!(g.coinvariants.dim(), 1);
}

#[test]
fn clifford_twists_stay_associative() {
    for n in 1..=3 {
        let a = twisted_group_algebra(n);
        assert!(a.algebra.is_associative());
        assert!(check_comodule_algebra(&a).passed());
        assert_eq!(coinvariants(&a).dim(), 1);
    }
}

#[test]
fn heisenberg_double_of_h3() {
    let host = Arc::new(h3(q3()).unwrap());
    let cp = heisenberg_double(host).unwrap();
    assert_eq!(cp.dim(), 9);
    assert!(check_comodule_algebra(&cp.algebra).passed());
    let g = galois_can(&cp.algebra);
    assert!(g.bijective);
    assert_eq!(g.coinvariants.dim(), 3);
}

#[test]
fn hopf_modules_over_the_h3_fixture() {
    let cs = Arc::new(h3_fixture());
    for m in [regular_module(cs.clone()), induced_module(&RModule::free(&cs.r, 2), cs.clone())] {
        assert!(check_hopf_module(&m).passed());
        let rel = to_relative_hopf(&m);
        assert!(check_relative_hopf_module(&rel).passed());
        let back = from_relative_hopf(&rel, cs.clone()).unwrap();
        assert_eq!(back.h_action, m.h_action);
        assert_eq!(back.r_action, m.r_action);
        let eq = equivalence_maps(&m).unwrap();
        assert!(eq.report.passed(), "{}", eq.report);
        assert_eq!(eq.coinvariants.dim() * 3, m.dim());
    }
}

#[test]
fn group_algebra_has_crossed_products_of_the_base_field() {
    let vals = [Scalar::one(), Scalar::from_i64(-1), Scalar::from_i64(2)];
    let ob = base_field_obstruction(Arc::new(group_algebra(3)), &vals);
    assert!(!ob.obstructed);
    assert!(ob.passing > 0);
    assert!(!ob.report.has_note("no crossed product of the base field"));
}

#[test]
fn degenerate_sigma_over_the_base_field() {
    // σ(x,x) = 0 over H(2) satisfies every crossed-system condition but has no inverse.
    let host = Arc::new(h2());
    let r = Algebra::scalars();
    let action = CrossedSystem::trivial_action(&r, &host);
    let mut sigma = CrossedSystem::trivial_sigma(&r, &host);
    sigma.set(&[1, 1], Vector(vec![Scalar::zero()]));
    let cs = CrossedSystem::new(r, host, action, sigma);
    assert!(check_crossed_system(&cs).passed());
    assert!(coquasi_core::crossed::sigma_inverse(&cs).is_err());
}

#[test]
fn fixtures_agree_across_modules() {
    for (name, cs) in fixtures() {
        let cl = cleft_of(&cs);
        let full = check_cleaving_full(&cl);
        assert!(full.passed(), "{name}: {full}");
        assert_eq!(cl.a.dim(), cs.dim_r() * cs.dim_h());
        let labels: Vec<String> = cl.a.space().labels.clone();
        assert_eq!(Space::new(labels).dim(), cl.a.dim());
    }
}
