#![allow(dead_code)]

use std::sync::Arc;

use coquasi_core::catalog::{h2, h2_fixture_datum, h2_system, h3, h3_fixture_datum, h3_system};
use coquasi_core::cleft::{check_cleaving, crossed_to_cleft, CleavingSystem};
use coquasi_core::comodule::{check_comodule_algebra, ComoduleAlgebra};
use coquasi_core::coquasi::{check_coquasi_hopf, CoquasiBialgebra, CoquasiHopf};
use coquasi_core::crossed::{build_crossed_product, check_crossed_system, CrossedSystem};
use coquasi_core::{Algebra, Coalgebra, FieldSpec, Functional, Matrix, Report, Scalar, VMap, Vector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn q3() -> FieldSpec {
    FieldSpec::cyclotomic(3)
}

pub fn h2_fixture() -> CrossedSystem {
    h2_system(&h2_fixture_datum()).unwrap()
}

pub fn h3_fixture() -> CrossedSystem {
    h3_system(&h3_fixture_datum(q3()).unwrap()).unwrap()
}

pub fn fixtures() -> Vec<(&'static str, CrossedSystem)> {
    vec![("H(2)", h2_fixture()), ("H(3)", h3_fixture())]
}

pub fn cleft_of(cs: &CrossedSystem) -> CleavingSystem {
    crossed_to_cleft(&build_crossed_product(cs).unwrap()).unwrap()
}

pub fn v(xs: &[i64]) -> Vector {
    Vector(xs.iter().map(|&x| Scalar::from_i64(x)).collect())
}

/// A structure flattened into named blocks of scalars.
pub type Blocks = Vec<(&'static str, Vec<Scalar>)>;

fn flat(vs: &[Vector]) -> Vec<Scalar> {
    vs.iter().flat_map(|v| v.0.iter().cloned()).collect()
}

fn unflat(xs: &[Scalar], len: usize) -> Vec<Vector> {
    xs.chunks(len).map(|c| Vector(c.to_vec())).collect()
}

fn algebra_blocks(a: &Algebra, out: &mut Blocks, prefix: [&'static str; 2]) {
    out.push((prefix[0], flat(&a.products())));
    out.push((prefix[1], a.one().0));
}

fn algebra_from(a: &Algebra, products: &[Scalar], unit: &[Scalar]) -> Algebra {
    let d = a.dim();
    Algebra::new(a.space.clone(), unflat(products, d), Vector(unit.to_vec()))
}

pub fn hopf_blocks(h: &CoquasiHopf) -> Blocks {
    let b = &h.base;
    let d = b.dim();
    let mut out = Vec::new();
    algebra_blocks(&b.algebra, &mut out, ["product", "unit"]);
    let mut comult = vec![Scalar::zero(); d * d * d];
    for i in 0..d {
        for (j, k, c) in b.coalgebra.comult(i) {
            comult[(i * d + j) * d + k] = &comult[(i * d + j) * d + k] + c;
        }
    }
    out.push(("comultiplication", comult));
    out.push(("counit", b.coalgebra.counit_values().to_vec()));
    out.push(("omega", b.omega.values.clone()));
    out.push(("omega-inverse", b.omega_inv.values.clone()));
    out.push(("antipode", flat(&h.antipode.columns())));
    out.push(("alpha", h.alpha.values.clone()));
    out.push(("beta", h.beta.values.clone()));
    out
}

pub fn hopf_from(h: &CoquasiHopf, blocks: &Blocks) -> CoquasiHopf {
    let b = &h.base;
    let d = b.dim();
    let g = |k: usize| &blocks[k].1;
    let algebra = algebra_from(&b.algebra, g(0), g(1));
    let comult = (0..d)
        .map(|i| {
            let mut t = Vec::new();
            for j in 0..d {
                for k in 0..d {
                    let c = &g(2)[(i * d + j) * d + k];
                    if !c.is_zero() {
                        t.push((j, k, c.clone()));
                    }
                }
            }
            t
        })
        .collect();
    let coalgebra = Coalgebra::new(b.coalgebra.space.clone(), comult, g(3).clone());
    let f3 = |k: usize| Functional { dim: d, arity: 3, values: g(k).clone() };
    let base = CoquasiBialgebra::with_inverse(coalgebra, algebra, f3(4), f3(5));
    CoquasiHopf {
        base,
        antipode: Matrix::from_columns(d, &unflat(g(6), d)),
        alpha: Functional { dim: d, arity: 1, values: g(7).clone() },
        beta: Functional { dim: d, arity: 1, values: g(8).clone() },
        twist_f: h.twist_f.clone(),
    }
}

pub fn crossed_blocks(cs: &CrossedSystem) -> Blocks {
    let mut out = Vec::new();
    algebra_blocks(&cs.r, &mut out, ["R-product", "R-unit"]);
    out.push(("action", flat(&cs.action)));
    out.push(("sigma", flat(&cs.sigma.values)));
    if let Some(s) = &cs.sigma_inv {
        out.push(("sigma-inverse", flat(&s.values)));
    }
    out
}

pub fn crossed_from(cs: &CrossedSystem, blocks: &Blocks) -> CrossedSystem {
    let dr = cs.dim_r();
    let dh = cs.dim_h();
    let vmap = |k: usize| VMap { dim: dh, arity: 2, values: unflat(&blocks[k].1, dr) };
    let mut out = CrossedSystem::new(
        algebra_from(&cs.r, &blocks[0].1, &blocks[1].1),
        cs.host.clone(),
        unflat(&blocks[2].1, dr),
        vmap(3),
    );
    if blocks.len() > 4 {
        out = out.with_sigma_inverse(vmap(4));
    }
    out
}

pub fn cleaving_blocks(c: &CleavingSystem) -> Blocks {
    let a = &c.a;
    let mut out = Vec::new();
    algebra_blocks(&a.algebra, &mut out, ["A-product", "A-unit"]);
    let (da, dh) = (a.dim(), a.host.dim());
    let mut co = vec![Scalar::zero(); da * da * dh];
    for i in 0..da {
        for (p, h, s) in a.coact(i) {
            let k = (i * da + p) * dh + h;
            co[k] = &co[k] + s;
        }
    }
    out.push(("coaction", co));
    out.push(("gamma", flat(&c.gamma)));
    out.push(("delta", flat(&c.delta)));
    out
}

pub fn cleaving_from(c: &CleavingSystem, blocks: &Blocks) -> CleavingSystem {
    let a = &c.a;
    let (da, dh) = (a.dim(), a.host.dim());
    let algebra = algebra_from(&a.algebra, &blocks[0].1, &blocks[1].1);
    let images = unflat(&blocks[2].1, da * dh);
    let a2 = ComoduleAlgebra::from_coaction_vectors(algebra, &images, a.host.clone());
    CleavingSystem::new(Arc::new(a2), unflat(&blocks[3].1, da), unflat(&blocks[4].1, da))
}

pub fn check_cleaving_full(c: &CleavingSystem) -> Report {
    let mut r = check_comodule_algebra(&c.a);
    r.absorb("", check_cleaving(c));
    r
}

/// A random nonzero perturbation: a small rational, optionally plus a root of unity.
pub fn perturbation(rng: &mut ChaCha8Rng, order: u32) -> Scalar {
    loop {
        let n: i64 = rng.gen_range(-5..=5);
        let d: i64 = rng.gen_range(1..=4);
        let mut s = Scalar::from_frac(n, d);
        if order > 1 && rng.gen_bool(0.3) {
            let k: i64 = rng.gen_range(1..order as i64);
            s = &s + &Scalar::root_of_unity(order, k);
        }
        if !s.is_zero() {
            return s;
        }
    }
}

#[derive(Debug)]
pub struct MutationOutcome {
    pub tried: usize,
    /// Mutations that left every identity intact, as (block, index, delta).
    pub undetected: Vec<(String, usize, String)>,
    /// Detected mutations whose failures carried no witness.
    pub without_witness: usize,
    /// Failed identity name to number of mutations that tripped it.
    pub tripped: std::collections::BTreeMap<String, usize>,
}

/// Adds a random perturbation to one uniformly chosen entry, `count` times.
pub fn mutate<T>(
    base: &Blocks,
    count: usize,
    rng: &mut ChaCha8Rng,
    order: u32,
    rebuild: impl Fn(&Blocks) -> T,
    check: impl Fn(&T) -> Report,
) -> MutationOutcome {
    let total: usize = base.iter().map(|(_, b)| b.len()).sum();
    let mut out = MutationOutcome { tried: 0, undetected: Vec::new(), without_witness: 0, tripped: Default::default() };
    for _ in 0..count {
        let mut k = rng.gen_range(0..total);
        let mut blocks = base.clone();
        let mut slot = 0;
        while k >= blocks[slot].1.len() {
            k -= blocks[slot].1.len();
            slot += 1;
        }
        let delta = perturbation(rng, order);
        blocks[slot].1[k] = &blocks[slot].1[k] + &delta;
        let report = check(&rebuild(&blocks));
        out.tried += 1;
        if report.passed() {
            out.undetected.push((blocks[slot].0.to_string(), k, delta.to_string()));
            continue;
        }
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed()).collect();
        if !failed.iter().any(|c| c.failures.iter().any(|f| !f.witness.is_empty())) {
            out.without_witness += 1;
        }
        for c in failed {
            *out.tripped.entry(c.identity.clone()).or_default() += 1;
        }
    }
    out
}

/// The mutation suite over every fixture, `count` mutations each.
pub fn mutation_suite(count: usize, seed: u64) -> Vec<(String, MutationOutcome)> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    for (name, host, order) in [("host H(2)", h2(), 1), ("host H(3)", h3(q3()).unwrap(), 3)] {
        let blocks = hopf_blocks(&host);
        let o = mutate(&blocks, count, &mut rng, order, |b| hopf_from(&host, b), check_coquasi_hopf);
        results.push((name.to_string(), o));
    }
    for (name, cs) in fixtures() {
        let order = if name == "H(3)" { 3 } else { 1 };
        let blocks = crossed_blocks(&cs);
        let o = mutate(&blocks, count, &mut rng, order, |b| crossed_from(&cs, b), check_crossed_system);
        results.push((format!("crossed system {name}"), o));
        let cl = cleft_of(&cs);
        let blocks = cleaving_blocks(&cl);
        let o = mutate(&blocks, count, &mut rng, order, |b| cleaving_from(&cl, b), check_cleaving_full);
        results.push((format!("cleaving system {name}"), o));
    }
    results
}
