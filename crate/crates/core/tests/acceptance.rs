//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! The summary always prints; `-- --nocapture` also shows the lines as they are recorded.

mod common;

use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use coquasi_core::catalog::{
    basis_vector, check_h3_datum, group_algebra, h2, h2_fixture_datum, h2_table, h3, h3_fixture_datum, h3_q, h3_table, H3Datum,
};
use coquasi_core::cleft::{build_morita, check_cleaving, cleft_to_crossed, morita_strictness, StrictnessKind};
use coquasi_core::comodule::{galois_can, ComoduleAlgebra};
use coquasi_core::coquasi::check_coquasi_hopf;
use coquasi_core::crossed::{
    base_field_obstruction, build_crossed_product, check_equivalence_witness, circledast_algebra, dual_algebra, heisenberg_system,
    tensor, equivalent_crossed_products, Equivalence, SearchBound,
};
use coquasi_core::hopf_modules::{
    coinvariant_module, equivalence_maps, induced_module, projection_pi, regular_module, CoquasiHopfModule, RModule,
};
use coquasi_core::linear::{invert_vmap, Subspace};
use coquasi_core::{Matrix, Report, Scalar, Vector};

struct Gate {
    lines: Vec<(usize, bool, String)>,
}

impl Gate {
    fn record(&mut self, n: usize, title: &str, ok: bool, detail: impl Into<String>) {
        let line = format!("[{}] criterion {n:>2}: {title}: {}", if ok { "PASS" } else { "FAIL" }, detail.into());
        println!("{line}");
        self.lines.push((n, ok, line));
    }
}

fn failed(r: &Report) -> String {
    format!("{r}")
}

// ---- 1

fn axiom_closure(g: &mut Gate) {
    let limit = Duration::from_secs(1);
    let mut ok = true;
    let mut parts = Vec::new();
    let cases = [
        ("H(2)", h2(), false),
        ("H(3)", h3(q3()).unwrap(), false),
        ("k[C2]", group_algebra(2), true),
        ("k[C3]", group_algebra(3), true),
    ];
    for (name, host, ordinary) in cases {
        let t = Instant::now();
        let r = check_coquasi_hopf(&host);
        let dt = t.elapsed();
        let flagged = r.has_note("ordinary bialgebra");
        let this = r.passed() && r.failure_count() == 0 && flagged == ordinary && dt < limit;
        if !this {
            eprintln!("{name}: {}", failed(&r));
        }
        ok &= this;
        parts.push(format!("{name} {} ids{} {:.0?}", r.checks.len(), if flagged { " ordinary" } else { "" }, dt));
    }
    g.record(1, "axiom closure", ok, parts.join("; "));
}

// ---- 2

fn appendix_h2(g: &mut Gate) {
    let t = h2_table(&h2_fixture_datum()).unwrap();
    let a_alg = &t.algebra;
    let host = &a_alg.host;
    let one_h = basis_vector(host, "1");
    let x = basis_vector(host, "x");
    let r1 = v(&[1, 0]);
    let rt = v(&[0, 1]);
    // a = 1#x, b = -c⁻¹#x, c = t
    let a = tensor(&r1, &x);
    let checks = [
        ("a·a = c#1", t.get("a", "a").unwrap().clone(), tensor(&rt, &one_h)),
        ("a·b = 1", t.get("a", "b").unwrap().clone(), tensor(&r1, &one_h)),
        ("b·a = -1", t.get("b", "a").unwrap().clone(), tensor(&r1, &one_h).neg()),
    ];
    let mut ok = t.elements[0] == a;
    let mut bad = Vec::new();
    for (name, got, want) in &checks {
        if got != want {
            ok = false;
            bad.push(*name);
        }
    }
    // ρ(a) = a⊗x in A⊗H, index p * dim H + h
    let dh = host.dim();
    let mut a_x = Vector::zeros(a_alg.dim() * dh);
    for (p, s) in a.nonzeros() {
        for (h, u) in x.nonzeros() {
            a_x.add_at(p * dh + h, &(s * u));
        }
    }
    let rho_ok = a_alg.coact_vec(&a) == a_x;
    ok &= rho_ok;
    if !rho_ok {
        bad.push("ρ(a) = a⊗x");
    }
    let detail = if bad.is_empty() { "a² = c, ab = 1, ba = -1, ρ(a) = a⊗x".to_string() } else { format!("mismatch: {}", bad.join(", ")) };
    g.record(2, "H(2) crossed product relations", ok, detail);
}

// ---- 3

/// A cell of the printed table: q^k · Π factors # x^deg.
struct Cell {
    q: i64,
    factors: &'static [(&'static str, i64)],
    deg: usize,
}

const fn cell(q: i64, factors: &'static [(&'static str, i64)], deg: usize) -> Cell {
    Cell { q, factors, deg }
}

/// The 4×4 table as printed, rows and columns a, b, c, d.
fn printed_table() -> [[Cell; 4]; 4] {
    [
        [cell(0, &[("u1", 1)], 2), cell(0, &[("v1", 1)], 0), cell(-1, &[], 0), cell(0, &[("u2", -1)], 2)],
        [cell(0, &[("v2", 1)], 0), cell(0, &[("u2", 1)], 1), cell(-1, &[("u1", -1)], 1), cell(1, &[], 0)],
        [cell(0, &[], 0), cell(0, &[("v2", -1), ("u2", 1)], 1), cell(-1, &[("v2", -1), ("u1", -1)], 1), cell(1, &[("v2", -1)], 0)],
        [cell(0, &[("v1", -1), ("u1", 1)], 0), cell(0, &[], 0), cell(1, &[("v1", -1)], 0), cell(0, &[("v1", -1), ("u2", -1)], 2)],
    ]
}

fn unit_of<'a>(d: &'a H3Datum, name: &str) -> &'a Vector {
    match name {
        "u1" => &d.u1,
        "u2" => &d.u2,
        "v1" => &d.v1,
        "v2" => &d.v2,
        _ => unreachable!(),
    }
}

fn b_pow(d: &H3Datum, x: &Vector, e: i64) -> Vector {
    let base = if e < 0 { d.b.inverse(x).expect("unit") } else { x.clone() };
    (0..e.unsigned_abs()).fold(d.b.one(), |acc, _| d.b.mul(&acc, &base))
}

fn substitute(d: &H3Datum, c: &Cell, host_basis: &[Vector]) -> Vector {
    let q = h3_q(d.field);
    let mut r = d.b.one().scale(&q.pow(c.q).unwrap());
    for (name, e) in c.factors {
        r = d.b.mul(&r, &b_pow(d, unit_of(d, name), *e));
    }
    tensor(&r, &host_basis[c.deg])
}

/// (r#x^i)(s#x^j) = r F^i(s) σ(x^i, x^j) # x^{i+j}, from the datum alone.
fn oracle_product(d: &H3Datum, (r, i): (&Vector, usize), (s, j): (&Vector, usize), host_basis: &[Vector]) -> Vector {
    let fi = match i {
        0 => s.clone(),
        1 => d.f.apply(s),
        _ => d.g.apply(s),
    };
    let sigma = match (i, j) {
        (0, _) | (_, 0) => d.b.one(),
        (1, 1) => d.u1.clone(),
        (1, 2) => d.v1.clone(),
        (2, 1) => d.v2.clone(),
        _ => d.u2.clone(),
    };
    tensor(&d.b.mul(&d.b.mul(r, &fi), &sigma), &host_basis[(i + j) % 3])
}

/// Returns the cells that differ from the printed table.
fn appendix_h3(g: &mut Gate) -> Vec<String> {
    let d = h3_fixture_datum(q3()).unwrap();
    let check = check_h3_datum(&d);
    let t = h3_table(&d).unwrap();
    let host = &t.algebra.host;
    let hb: Vec<Vector> = ["1", "x", "x^2"].iter().map(|l| basis_vector(host, l)).collect();
    let elems: [(Vector, usize); 4] = [
        (d.b.one(), 1),
        (d.b.one(), 2),
        (d.b.inverse(&d.v2).unwrap(), 2),
        (d.b.inverse(&d.v1).unwrap(), 1),
    ];
    let names = ["a", "b", "c", "d"];
    let printed = printed_table();
    let mut oracle_agree = 0;
    let mut matches = 0;
    let mut differ = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            let got = &t.products[i][j];
            let (r, hi) = &elems[i];
            let (s, hj) = &elems[j];
            if *got == oracle_product(&d, (r, *hi), (s, *hj), &hb) {
                oracle_agree += 1;
            }
            if *got == substitute(&d, &printed[i][j], &hb) {
                matches += 1;
            } else {
                differ.push(format!("{}·{}", names[i], names[j]));
            }
        }
    }
    let ok = check.passed() && matches == 16;
    g.record(
        3,
        "H(3) datum and table",
        ok,
        format!(
            "datum {}; table vs product formula {oracle_agree}/16; table vs printed cells {matches}/16{}",
            if check.passed() { "passes" } else { "fails" },
            if differ.is_empty() { String::new() } else { format!(" (differ: {})", differ.join(", ")) }
        ),
    );
    assert_eq!(oracle_agree, 16, "library product disagrees with the oracle");
    assert!(check.passed() && check.agrees(), "{}", check.report);
    differ
}

// ---- 4

fn base_field(g: &mut Gate) {
    let q = h3_q(q3());
    let mut ok = true;
    let mut parts = Vec::new();
    let rational: Vec<Scalar> = [(1, 1), (-1, 1), (2, 1), (1, 2), (-1, 2), (3, 1)].iter().map(|&(n, d)| Scalar::from_frac(n, d)).collect();
    let mut cubic = rational.clone();
    cubic.push(q.clone());
    cubic.push(&q * &q);
    for (name, host, values) in [("H(2)", h2(), rational), ("H(3)", h3(q3()).unwrap(), cubic)] {
        let ob = base_field_obstruction(Arc::new(host), &values);
        let expected = values.len().pow(if name == "H(2)" { 1 } else { 4 });
        let this = ob.obstructed
            && ob.passing == 0
            && ob.tried == expected
            && ob.report.get("sweep-cocycle-fails").is_some_and(|c| c.passed())
            && ob.report.has_note("no crossed product of the base field");
        ok &= this;
        let inv = ob.invariant.map_or("n/a".into(), |v| v.to_string());
        parts.push(format!("{name}: {} σ tried, {} pass, invariant {inv}", ob.tried, ob.passing));
    }
    g.record(4, "no crossed product of the base field", ok, parts.join("; "));
}

// ---- 5, 9

fn cleft_round_trip(g5: &mut Gate) {
    let mut ok5 = true;
    let mut ok9 = true;
    let mut parts5 = Vec::new();
    let mut parts9 = Vec::new();
    for (name, cs) in fixtures() {
        let cl = cleft_of(&cs);
        let cr = check_cleaving(&cl);
        let three = ["inverse-cleaving-coaction", "delta-gamma-alpha", "gamma-beta-delta"]
            .iter()
            .all(|id| cr.get(id).is_some_and(|c| c.passed() && c.tested > 0));
        let back = cleft_to_crossed(&cl).unwrap();
        let witness = match equivalent_crossed_products(&cs, &back.system, SearchBound::default()) {
            Equivalence::Equivalent(w) => check_equivalence_witness(&cs, &back.system, &w).passed(),
            Equivalence::NotEquivalent { .. } => false,
        };
        let this5 = cr.passed() && three && witness;
        if !this5 {
            eprintln!("{name}: {cr}");
        }
        ok5 &= this5;
        parts5.push(format!("{name}: cleaving {}, witness {}", if cr.passed() { "exact" } else { "fails" }, if witness { "found" } else { "missing" }));

        // σ⁻¹ from the f-formula against the convolution inverse
        let sys = &back.system;
        let h = &sys.host.base;
        let conv = invert_vmap(&sys.sigma, &h.coalgebra, &sys.r).unwrap();
        let same = sys.sigma_inv.as_ref() == Some(&conv);
        let formula = back.report.get("sigma-inverse-formula").is_some_and(|c| c.passed());
        let dh = h.dim();
        let triples = back.report.get("action-on-cocycle-inverse").is_some_and(|c| c.passed() && c.tested == dh * dh * dh);
        let orig = cs.sigma_inv.as_ref() == Some(&invert_vmap(&cs.sigma, &h.coalgebra, &cs.r).unwrap());
        ok9 &= same && formula && triples && orig;
        parts9.push(format!("{name}: {} tensors equal, {} triples", dh * dh, dh * dh * dh));
    }
    g5.record(5, "cleft/crossed round trip", ok5, parts5.join("; "));
    g5.record(9, "σ⁻¹ consistency", ok9, parts9.join("; "));
}

// ---- 6

fn galois(g: &mut Gate) {
    let ids = [
        "inverse-left-leg-coaction",
        "inverse-right-leg-coaction",
        "inverse-product-alpha",
        "inverse-left-A-linear",
        "can-on-one-tensor",
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, cs) in fixtures() {
        let cp = build_crossed_product(&cs).unwrap();
        let gd = galois_can(&cp.algebra);
        let five = ids.iter().all(|id| gd.report.get(id).is_some_and(|c| c.passed() && c.tested > 0));
        let this = gd.bijective && five && gd.report.passed();
        if !this {
            eprintln!("{name}: {}", gd.report);
        }
        ok &= this;
        parts.push(format!("{name}: {}", if gd.bijective { "Bijective" } else { "NotBijective" }));
    }
    g.record(6, "Galois map", ok, parts.join("; "));
}

// ---- 7

fn morita(g: &mut Gate) {
    let ids = [
        "ring1-associative",
        "ring2-associative",
        "P-left-module",
        "P-right-module",
        "P-bimodule",
        "Q-left-module",
        "Q-right-module",
        "Q-bimodule",
        "pairing-balanced",
        "pairing-bilinear",
        "bracket-balanced",
        "bracket-bilinear",
        "mixed-associativity",
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, cs) in fixtures() {
        let cl = cleft_of(&cs);
        let m = build_morita(cl.a.clone());
        let s = morita_strictness(&m, Some(&cl));
        let all = ids.iter().all(|id| m.report.get(id).is_some_and(|c| c.passed() && c.tested > 0));
        let pair = s.report.get("cleaving-pair").is_some_and(|c| c.passed());
        let this = m.report.passed() && all && s.kind == StrictnessKind::Strict && pair;
        if !this {
            eprintln!("{name}: {}{}", m.report, s.report);
        }
        ok &= this;
        parts.push(format!("{name}: {:?}, (γ,δ) ↦ α·1, ε·1 {}", s.kind, if pair { "yes" } else { "no" }));
    }
    g.record(7, "Morita context", ok, parts.join("; "));
}

// ---- 8

fn hopf_module_case(m: &CoquasiHopfModule) -> Result<String, String> {
    let dm = m.dim();
    let dh = m.system.dim_h();
    let pi = projection_pi(m);
    let p = &pi.pi.matrix;
    if p.mul(p) != *p {
        return Err("Π² ≠ Π".into());
    }
    let co = coinvariant_module(m);
    let image = Subspace::span(dm, &p.columns());
    if image.dim() != co.dim() || !co.basis.iter().all(|b| image.contains(b)) {
        return Err(format!("image(Π) has dim {} vs coinvariants {}", image.dim(), co.dim()));
    }
    let eq = equivalence_maps(m).map_err(|e| e.to_string())?;
    if eq.eps.matrix.mul(&eq.kappa.matrix) != Matrix::identity(dm) {
        return Err("ε∘ϰ ≠ id".into());
    }
    let n = eq.kappa.matrix.rows;
    if eq.kappa.matrix.mul(&eq.eps.matrix) != Matrix::identity(n) {
        return Err("ϰ∘ε ≠ id".into());
    }
    if dm != co.dim() * dh {
        return Err(format!("dim M = {dm} ≠ {} · {dh}", co.dim()));
    }
    if !pi.report.passed() || !eq.report.passed() {
        return Err(format!("{}{}", pi.report, eq.report));
    }
    Ok(format!("{dm} = {}·{dh}", co.dim()))
}

fn hopf_modules(g: &mut Gate) {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, cs) in fixtures() {
        let cs = Arc::new(cs);
        let free = RModule::free(&cs.r, 1);
        for (label, m) in [("R#H", regular_module(cs.clone())), ("N⊗H", induced_module(&free, cs.clone()))] {
            match hopf_module_case(&m) {
                Ok(s) => parts.push(format!("{name} {label}: {s}")),
                Err(e) => {
                    ok = false;
                    parts.push(format!("{name} {label}: {e}"));
                }
            }
        }
    }
    g.record(8, "Hopf-module equivalence", ok, parts.join("; "));
}

// ---- 10

fn circledast(g: &mut Gate) {
    let cp = build_crossed_product(&h2_fixture()).unwrap();
    let c = circledast_algebra(&cp.algebra);
    let mut rep = Report::new("⊛");
    let a = rep.begin("associative");
    c.algebra.check_associative(a);
    let triples = a.tested;
    c.algebra.check_unit(rep.begin("unital"));
    let host = cp.algebra.host.clone();
    let k = ComoduleAlgebra::trivial(coquasi_core::Algebra::scalars(), host.clone());
    let ck = circledast_algebra(&k);
    let dual = dual_algebra(&host);
    let heis = heisenberg_system(host);
    let same = ck.algebra.products() == dual.products()
        && ck.algebra.one() == dual.one()
        && heis.r.products() == dual.products()
        && heis.r.one() == dual.one();
    let dim = c.algebra.dim();
    let ok = rep.passed() && dim == 8 && triples >= 8 * 8 * 8 && same;
    g.record(
        10,
        "⊛-algebra",
        ok,
        format!("dim {dim}, associativity on {triples} triples, A = k gives H* {}", if same { "exactly" } else { "NOT" }),
    );
}

// ---- 11

fn mutations(g: &mut Gate) {
    let results = mutation_suite(60, 0x5eed_0011);
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, o) in &results {
        let this = o.tried >= 50 && o.undetected.is_empty() && o.without_witness == 0;
        if !this {
            eprintln!("{name}: undetected {:?}, without witness {}", o.undetected, o.without_witness);
        }
        ok &= this;
        parts.push(format!("{name} {}/{}", o.tried - o.undetected.len(), o.tried));
    }
    g.record(11, "mutation suite", ok, parts.join("; "));
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut g = Gate { lines: Vec::new() };
    axiom_closure(&mut g);
    appendix_h2(&mut g);
    let differ = appendix_h3(&mut g);
    base_field(&mut g);
    cleft_round_trip(&mut g);
    galois(&mut g);
    morita(&mut g);
    hopf_modules(&mut g);
    circledast(&mut g);
    mutations(&mut g);
    let elapsed = start.elapsed();
    g.record(12, "runtime", elapsed < Duration::from_secs(60), format!("acceptance battery {elapsed:.1?} (limit 60 s)"));

    g.lines.sort_by_key(|l| l.0);
    // Written to the raw stderr handle so the summary shows without --nocapture.
    let passed = g.lines.iter().filter(|l| l.1).count();
    let mut summary = String::from("\nacceptance summary\n");
    for (_, _, line) in &g.lines {
        summary.push_str(line);
        summary.push('\n');
    }
    summary.push_str(&format!("{passed}/{} criteria pass\n", g.lines.len()));
    std::io::stderr().lock().write_all(summary.as_bytes()).unwrap();

    // Criterion 3 is red: two printed cells contradict the product formula.
    assert_eq!(differ, vec!["d·a".to_string(), "d·c".to_string()]);
    let red: Vec<usize> = g.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    assert_eq!(red, vec![3], "unexpected criterion status");
}
