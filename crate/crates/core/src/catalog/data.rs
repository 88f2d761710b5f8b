//! Cleft data over H(2) and H(3): the finite condition lists, the crossed
//! systems they induce, crossed-product tables and isomorphism of data.

use std::sync::Arc;

use super::{h2, h3, h3_q, CatalogError};
use crate::comodule::ComoduleAlgebra;
use crate::crossed::{
    check_crossed_system, check_equivalence_witness, crossed_product_unchecked, equivalent_crossed_products, sigma_inverse,
    tensor, CrossedSystem, Equivalence, EquivalenceWitness, SearchBound,
};
use crate::linear::{check_vec, Algebra, Matrix, Space, Vector};
use crate::report::{Check, Report};
use crate::scalar::{FieldSpec, Scalar};

/// (F, c): an endomorphism F of B (matrix on the basis) and c ∈ B.
#[derive(Clone, Debug, PartialEq)]
pub struct H2Datum {
    pub b: Algebra,
    pub f: Matrix,
    pub c: Vector,
}

/// (F, G, u⁽¹⁾, u⁽²⁾, v⁽¹⁾, v⁽²⁾) over H(3) in the field `field`.
#[derive(Clone, Debug, PartialEq)]
pub struct H3Datum {
    pub b: Algebra,
    pub f: Matrix,
    pub g: Matrix,
    pub u1: Vector,
    pub u2: Vector,
    pub v1: Vector,
    pub v2: Vector,
    pub field: FieldSpec,
}

/// Outcome of a datum check together with the induced crossed system.
#[derive(Clone, Debug)]
pub struct DatumCheck {
    pub report: Report,
    /// None when a unit required to build σ⁻¹ is missing.
    pub system: Option<CrossedSystem>,
    pub crossed: Option<Report>,
}

impl DatumCheck {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    /// The datum conditions and the crossed-system checker reach the same verdict.
    pub fn agrees(&self) -> bool {
        match &self.crossed {
            Some(c) => c.passed() == self.report.passed(),
            None => !self.report.passed(),
        }
    }
}

fn check_endomorphism(c: &mut Check, b: &Algebra, f: &Matrix, name: &str) {
    let s = &b.space;
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            let lhs = f.apply(&b.product_basis(i, j));
            let rhs = b.mul(&f.column(i), &f.column(j));
            check_vec(c, &[name, s.label(i), s.label(j)], s, &lhs, &rhs);
        }
    }
    check_vec(c, &[name, "1"], s, &f.apply(&b.one()), &b.one());
}

fn conj(b: &Algebra, u: &Vector, x: &Vector, ui: &Vector) -> Vector {
    b.mul(&b.mul(u, x), ui)
}

fn units(b: &Algebra, named: &[(&str, &Vector)], c: &mut Check) -> Option<Vec<Vector>> {
    let mut out = Vec::new();
    let mut ok = true;
    for (n, u) in named {
        match b.inverse(u) {
            Some(i) => {
                c.record(&[n], true, "", "");
                out.push(i);
            }
            None => {
                c.record(&[n], false, b.space.render(u), "a unit");
                ok = false;
            }
        }
    }
    ok.then_some(out)
}

fn action_table(b: &Algebra, maps: &[&Matrix]) -> Vec<Vector> {
    let mut action = Vec::new();
    for m in maps {
        for s in 0..b.dim() {
            action.push(m.column(s));
        }
    }
    action
}

/// The crossed system 1·e = e, x·e = F(e), σ(x,x) = c and trivial elsewhere.
pub fn h2_system(d: &H2Datum) -> Result<CrossedSystem, CatalogError> {
    let host = Arc::new(h2());
    let b = &d.b;
    if d.f.rows != b.dim() || d.f.cols != b.dim() || d.c.dim() != b.dim() {
        return Err(CatalogError::InvalidDatum("dimension mismatch".into()));
    }
    let ci = b.inverse(&d.c).ok_or_else(|| CatalogError::InvalidDatum("c is not a unit".into()))?;
    let id = Matrix::identity(b.dim());
    let action = action_table(b, &[&id, &d.f]);
    let mut sigma = CrossedSystem::trivial_sigma(b, &host);
    sigma.set(&[1, 1], d.c.clone());
    let mut inv = sigma.clone();
    inv.set(&[1, 1], ci);
    Ok(CrossedSystem::new(b.clone(), host, action, sigma).with_sigma_inverse(inv))
}

/// F multiplicative and unital, F²(e) = cec⁻¹, F(c) = −c; cross-checked
/// against the crossed-system checker on the induced system.
pub fn check_h2_datum(d: &H2Datum) -> DatumCheck {
    let mut rep = Report::new("H(2) datum");
    let b = &d.b;
    let s = &b.space;
    let cu = units(b, &[("c", &d.c)], rep.begin("c-invertible"));
    check_endomorphism(rep.begin("F-algebra-morphism"), b, &d.f, "F");
    if let Some(ci) = cu.as_ref().map(|v| &v[0]) {
        let c = rep.begin("F-squared-inner");
        let f2 = d.f.mul(&d.f);
        for i in 0..b.dim() {
            check_vec(c, &[s.label(i)], s, &f2.column(i), &conj(b, &d.c, &b.basis(i), ci));
        }
    }
    let c = rep.begin("F-negates-c");
    check_vec(c, &["c"], s, &d.f.apply(&d.c), &d.c.neg());
    let system = h2_system(d).ok();
    let crossed = system.as_ref().map(check_crossed_system);
    DatumCheck { report: rep, system, crossed }
}

/// The crossed system with x·e = F(e), x²·e = G(e) and σ given by
/// σ(x,x) = u⁽¹⁾, σ(x,x²) = v⁽¹⁾, σ(x²,x) = v⁽²⁾, σ(x²,x²) = u⁽²⁾.
pub fn h3_system(d: &H3Datum) -> Result<CrossedSystem, CatalogError> {
    let host = Arc::new(h3(d.field)?);
    let b = &d.b;
    let n = b.dim();
    if [&d.f, &d.g].iter().any(|m| m.rows != n || m.cols != n)
        || [&d.u1, &d.u2, &d.v1, &d.v2].iter().any(|v| v.dim() != n)
    {
        return Err(CatalogError::InvalidDatum("dimension mismatch".into()));
    }
    let id = Matrix::identity(n);
    let action = action_table(b, &[&id, &d.f, &d.g]);
    let mut sigma = CrossedSystem::trivial_sigma(b, &host);
    sigma.set(&[1, 1], d.u1.clone());
    sigma.set(&[1, 2], d.v1.clone());
    sigma.set(&[2, 1], d.v2.clone());
    sigma.set(&[2, 2], d.u2.clone());
    sigma_inverse(&CrossedSystem::new(b.clone(), host, action, sigma))
        .map_err(|_| CatalogError::InvalidDatum("σ is not invertible".into()))
}

/// F, G endomorphisms, the composition rules and the action of F, G on the units.
pub fn check_h3_datum(d: &H3Datum) -> DatumCheck {
    let mut rep = Report::new("H(3) datum");
    let b = &d.b;
    let s = &b.space;
    let q = h3_q(d.field);
    let qi = q.inv().expect("q is a unit");
    let names = [("u1", &d.u1), ("u2", &d.u2), ("v1", &d.v1), ("v2", &d.v2)];
    let inv = units(b, &names, rep.begin("units-invertible"));
    check_endomorphism(rep.begin("F-algebra-morphism"), b, &d.f, "F");
    check_endomorphism(rep.begin("G-algebra-morphism"), b, &d.g, "G");
    if let Some(inv) = inv {
        let [u1i, u2i, v1i, v2i] = [&inv[0], &inv[1], &inv[2], &inv[3]];
        let (u1, u2, v1, v2) = (&d.u1, &d.u2, &d.v1, &d.v2);
        let c = rep.begin("composition-rules");
        let ff = d.f.mul(&d.f);
        let fg = d.f.mul(&d.g);
        let gf = d.g.mul(&d.f);
        let gg = d.g.mul(&d.g);
        for i in 0..b.dim() {
            let e = b.basis(i);
            let l = s.label(i);
            check_vec(c, &["FF", l], s, &ff.column(i), &conj(b, u1, &d.g.column(i), u1i));
            check_vec(c, &["FG", l], s, &fg.column(i), &conj(b, v1, &e, v1i));
            check_vec(c, &["GF", l], s, &gf.column(i), &conj(b, v2, &e, v2i));
            check_vec(c, &["GG", l], s, &gg.column(i), &conj(b, u2, &d.f.column(i), u2i));
        }
        let c = rep.begin("action-on-units");
        let m3 = |x: &Vector, y: &Vector, z: &Vector| b.mul3(x, y, z);
        let rows: [(&str, &str, Vector, Vector); 8] = [
            ("F", "u1", d.f.apply(u1), m3(u1, v2, v1i)),
            ("F", "u2", d.f.apply(u2), b.mul(v1, u1i).scale(&qi)),
            ("F", "v1", d.f.apply(v1), b.mul(u1, u2)),
            ("F", "v2", d.f.apply(v2), v1.scale(&q)),
            ("G", "u1", d.g.apply(u1), b.mul(v2, u2i).scale(&q)),
            ("G", "u2", d.g.apply(u2), m3(u2, v1, v2i).scale(&qi)),
            ("G", "v1", d.g.apply(v1), v2.scale(&qi)),
            ("G", "v2", d.g.apply(v2), b.mul(u2, u1).scale(&q)),
        ];
        for (m, u, lhs, rhs) in &rows {
            check_vec(c, &[m, u], s, lhs, rhs);
        }
    }
    let system = h3_system(d).ok();
    let crossed = system.as_ref().map(check_crossed_system);
    DatumCheck { report: rep, system, crossed }
}

/// Products of named elements of a crossed product B#̄σH.
#[derive(Clone, Debug)]
pub struct CrossedTable {
    pub algebra: Arc<ComoduleAlgebra>,
    pub names: Vec<String>,
    pub elements: Vec<Vector>,
    /// `products[i][j]` = elements[i]·elements[j].
    pub products: Vec<Vec<Vector>>,
}

impl CrossedTable {
    fn build(algebra: Arc<ComoduleAlgebra>, named: Vec<(&str, Vector)>) -> CrossedTable {
        let (names, elements): (Vec<String>, Vec<Vector>) =
            named.into_iter().map(|(n, v)| (n.to_string(), v)).unzip();
        let products = elements
            .iter()
            .map(|x| elements.iter().map(|y| algebra.mul(x, y)).collect())
            .collect();
        CrossedTable { algebra, names, elements, products }
    }

    pub fn get(&self, row: &str, col: &str) -> Option<&Vector> {
        let i = self.names.iter().position(|n| n == row)?;
        let j = self.names.iter().position(|n| n == col)?;
        Some(&self.products[i][j])
    }

    pub fn render(&self) -> String {
        let sp = self.algebra.space();
        let cells: Vec<Vec<String>> =
            self.products.iter().map(|row| row.iter().map(|v| sp.render(v)).collect()).collect();
        let mut width = self.names.iter().map(|n| n.chars().count()).max().unwrap_or(1);
        for row in &cells {
            for c in row {
                width = width.max(c.chars().count());
            }
        }
        let pad = |s: &str| format!("{s}{}", " ".repeat(width - s.chars().count()));
        let mut out = String::new();
        out.push_str(&pad(""));
        for n in &self.names {
            out.push_str(" | ");
            out.push_str(&pad(n));
        }
        out.push('\n');
        for (n, row) in self.names.iter().zip(&cells) {
            out.push_str(&pad(n));
            for c in row {
                out.push_str(" | ");
                out.push_str(&pad(c));
            }
            out.push('\n');
        }
        out
    }
}

fn require_pass(chk: &DatumCheck) -> Result<CrossedSystem, CatalogError> {
    if !chk.passed() {
        return Err(CatalogError::InvalidDatum(chk.report.failed_identities().join(", ")));
    }
    chk.system.clone().ok_or_else(|| CatalogError::InvalidDatum("no crossed system".into()))
}

/// a = 1#̄x and b = −c⁻¹#̄x with all their products.
pub fn h2_table(d: &H2Datum) -> Result<CrossedTable, CatalogError> {
    let cs = require_pass(&check_h2_datum(d))?;
    let b = &d.b;
    let ci = b.inverse(&d.c).expect("checked");
    let x = cs.host.base.e(1);
    let a = tensor(&b.one(), &x);
    let bb = tensor(&ci.neg(), &x);
    Ok(CrossedTable::build(Arc::new(crossed_product_unchecked(&cs)), vec![("a", a), ("b", bb)]))
}

/// a = 1#̄x, b = 1#̄x², c = v⁽²⁾⁻¹#̄x², d = v⁽¹⁾⁻¹#̄x with all their products.
pub fn h3_table(d: &H3Datum) -> Result<CrossedTable, CatalogError> {
    let cs = require_pass(&check_h3_datum(d))?;
    let b = &d.b;
    let h = &cs.host.base;
    let v1i = b.inverse(&d.v1).expect("checked");
    let v2i = b.inverse(&d.v2).expect("checked");
    let named = vec![
        ("a", tensor(&b.one(), &h.e(1))),
        ("b", tensor(&b.one(), &h.e(2))),
        ("c", tensor(&v2i, &h.e(2))),
        ("d", tensor(&v1i, &h.e(1))),
    ];
    Ok(CrossedTable::build(Arc::new(crossed_product_unchecked(&cs)), named))
}

/// Outcome of comparing two data on the same algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum DataEquivalence {
    /// `s[k]` is 𝔞(x^(k+1)); the relation report is attached.
    Equivalent { s: Vec<Vector>, relations: Report },
    NotEquivalent { solver_incomplete: bool },
}

fn same_algebra(x: &Algebra, y: &Algebra) -> Result<(), CatalogError> {
    if x != y {
        return Err(CatalogError::InvalidDatum("data live on different algebras".into()));
    }
    Ok(())
}

fn find_witness(cs1: &CrossedSystem, cs2: &CrossedSystem, bound: SearchBound) -> Equivalence {
    let unit = EquivalenceWitness::unit(&cs1.host, &cs1.r);
    if check_equivalence_witness(cs1, cs2, &unit).passed() {
        return Equivalence::Equivalent(unit);
    }
    equivalent_crossed_products(cs1, cs2, bound)
}

/// Looks for a unit s with F′(e) = s⁻¹F(e)s and c′ = s⁻¹F(s⁻¹)c.
pub fn data_equivalent_h2(d1: &H2Datum, d2: &H2Datum, bound: SearchBound) -> Result<DataEquivalence, CatalogError> {
    same_algebra(&d1.b, &d2.b)?;
    let cs1 = require_pass(&check_h2_datum(d1))?;
    let cs2 = require_pass(&check_h2_datum(d2))?;
    Ok(match find_witness(&cs1, &cs2, bound) {
        Equivalence::Equivalent(w) => {
            let s = w.a[1].clone();
            let relations = h2_relations(d1, d2, &s);
            DataEquivalence::Equivalent { s: vec![s], relations }
        }
        Equivalence::NotEquivalent { solver_incomplete } => DataEquivalence::NotEquivalent { solver_incomplete },
    })
}

/// The relations between two H(2)-data and a unit s.
pub fn h2_relations(d1: &H2Datum, d2: &H2Datum, s: &Vector) -> Report {
    let mut rep = Report::new("H(2) data isomorphism");
    let b = &d1.b;
    let sp = &b.space;
    let Some(si) = b.inverse(s) else {
        rep.begin("s-invertible").record(&["s"], false, sp.render(s), "a unit");
        return rep;
    };
    let c = rep.begin("conjugated-endomorphism");
    for i in 0..b.dim() {
        check_vec(c, &[sp.label(i)], sp, &d2.f.column(i), &conj(b, &si, &d1.f.column(i), s));
    }
    let c = rep.begin("cocycle-relation");
    check_vec(c, &["c"], sp, &d2.c, &b.mul3(&si, &d1.f.apply(&si), &d1.c));
    rep
}

/// Looks for units s⁽¹⁾ = 𝔞(x), s⁽²⁾ = 𝔞(x²) relating two H(3)-data.
pub fn data_equivalent_h3(d1: &H3Datum, d2: &H3Datum, bound: SearchBound) -> Result<DataEquivalence, CatalogError> {
    same_algebra(&d1.b, &d2.b)?;
    let cs1 = require_pass(&check_h3_datum(d1))?;
    let cs2 = require_pass(&check_h3_datum(d2))?;
    Ok(match find_witness(&cs1, &cs2, bound) {
        Equivalence::Equivalent(w) => {
            let s = vec![w.a[1].clone(), w.a[2].clone()];
            let relations = h3_relations(d1, d2, &s[0], &s[1]);
            DataEquivalence::Equivalent { s, relations }
        }
        Equivalence::NotEquivalent { solver_incomplete } => DataEquivalence::NotEquivalent { solver_incomplete },
    })
}

/// F′ = s⁽¹⁾⁻¹F(−)s⁽¹⁾, G′ = s⁽²⁾⁻¹G(−)s⁽²⁾ and the transformed units,
/// with v′⁽²⁾ = s⁽²⁾⁻¹G(s⁽¹⁾⁻¹)v⁽²⁾.
pub fn h3_relations(d1: &H3Datum, d2: &H3Datum, s1: &Vector, s2: &Vector) -> Report {
    let mut rep = Report::new("H(3) data isomorphism");
    let b = &d1.b;
    let sp = &b.space;
    let (Some(s1i), Some(s2i)) = (b.inverse(s1), b.inverse(s2)) else {
        rep.begin("s-invertible").record(&["s1", "s2"], false, "", "units");
        return rep;
    };
    let c = rep.begin("conjugated-endomorphisms");
    for i in 0..b.dim() {
        check_vec(c, &["F", sp.label(i)], sp, &d2.f.column(i), &conj(b, &s1i, &d1.f.column(i), s1));
        check_vec(c, &["G", sp.label(i)], sp, &d2.g.column(i), &conj(b, &s2i, &d1.g.column(i), s2));
    }
    let c = rep.begin("cocycle-relations");
    let m4 = |w: &Vector, x: &Vector, y: &Vector, z: &Vector| b.mul(&b.mul3(w, x, y), z);
    check_vec(c, &["u1"], sp, &d2.u1, &m4(&s1i, &d1.f.apply(&s1i), &d1.u1, s2));
    check_vec(c, &["u2"], sp, &d2.u2, &m4(&s2i, &d1.g.apply(&s2i), &d1.u2, s1));
    check_vec(c, &["v1"], sp, &d2.v1, &b.mul3(&s1i, &d1.f.apply(&s2i), &d1.v1));
    check_vec(c, &["v2"], sp, &d2.v2, &b.mul3(&s2i, &d1.g.apply(&s1i), &d1.v2));
    rep
}

/// 𝕜[t]/(t^n − 1) with basis 1, t, …, t^(n−1).
pub fn cyclic_algebra(n: usize, var: &str) -> Algebra {
    let labels: Vec<String> = (0..n)
        .map(|k| match k {
            0 => "1".to_string(),
            1 => var.to_string(),
            k => format!("{var}^{k}"),
        })
        .collect();
    Algebra::monomial(Space::new(labels), 0, |i, j| ((i + j) % n, Scalar::one()))
}

/// Diagonal endomorphism t^k ↦ λ^k t^k of 𝕜[t]/(t^n − 1).
pub fn scaling_endomorphism(n: usize, lambda: &Scalar) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    for k in 0..n {
        m.set(k, k, lambda.pow(k as i64).expect("nonzero"));
    }
    m
}

/// B = 𝕜[t]/(t²−1), F(t) = −t, c = t.
pub fn h2_fixture_datum() -> H2Datum {
    let b = cyclic_algebra(2, "t");
    let f = scaling_endomorphism(2, &Scalar::from_i64(-1));
    let c = b.basis(1);
    H2Datum { b, f, c }
}

/// B = 𝕜[s]/(s³−1), F(s) = qs, G = F², (u⁽¹⁾, u⁽²⁾, v⁽¹⁾, v⁽²⁾) = (s, s², 1, q).
pub fn h3_fixture_datum(field: FieldSpec) -> Result<H3Datum, CatalogError> {
    h3(field)?;
    let q = h3_q(field);
    let b = cyclic_algebra(3, "s");
    let f = scaling_endomorphism(3, &q);
    let g = f.mul(&f);
    let (u1, u2, v1, v2) = (b.basis(1), b.basis(2), b.one(), b.one().scale(&q));
    Ok(H3Datum { b, f, g, u1, u2, v1, v2, field })
}

/// ℚ(i) as a two-dimensional algebra with basis 1, i.
pub fn gaussian_algebra() -> Algebra {
    Algebra::monomial(Space::new(["1", "i"]), 0, |a, b| match (a, b) {
        (1, 1) => (0, Scalar::from_i64(-1)),
        _ => (a + b, Scalar::one()),
    })
}

/// The quaternion algebra (−1,−1) with basis 1, i, j, k.
pub fn quaternion_algebra() -> Algebra {
    // e_a e_b = sign · e_(a xor b) under the encoding i=1, j=2, k=3
    let sign = |a: usize, b: usize| -> i64 {
        match (a, b) {
            (0, _) | (_, 0) => 1,
            (x, y) if x == y => -1,
            (1, 2) | (2, 3) | (3, 1) => 1,
            _ => -1,
        }
    };
    Algebra::monomial(Space::new(["1", "i", "j", "k"]), 0, move |a, b| (a ^ b, Scalar::from_i64(sign(a, b))))
}

/// Conjugation e ↦ ueu⁻¹ as a matrix.
pub fn inner_automorphism(b: &Algebra, u: &Vector) -> Option<Matrix> {
    let ui = b.inverse(u)?;
    let cols: Vec<Vector> = (0..b.dim()).map(|i| conj(b, u, &b.basis(i), &ui)).collect();
    Some(Matrix::from_columns(b.dim(), &cols))
}

/// Result of an exhaustive search for H(2)-data over a finite candidate set.
#[derive(Clone, Debug)]
pub struct DatumSearch {
    pub tried: usize,
    pub passing: Vec<H2Datum>,
    /// Candidates where the datum conditions and the crossed-system checker disagree.
    pub disagreements: usize,
}

/// Tries every F in `endos` against every unit c with integer coordinates in
/// [−coefficient, coefficient].
pub fn search_h2_data(b: &Algebra, endos: &[Matrix], coefficient: i64) -> DatumSearch {
    let mut out = DatumSearch { tried: 0, passing: Vec::new(), disagreements: 0 };
    let cands: Vec<Vector> = crate::crossed::small_vectors(b.dim(), coefficient)
        .map(|v| Vector(v.into_iter().map(Scalar::from_i64).collect()))
        .filter(|v| b.is_unit(v))
        .collect();
    for f in endos {
        for c in &cands {
            let d = H2Datum { b: b.clone(), f: f.clone(), c: c.clone() };
            let chk = check_h2_datum(&d);
            out.tried += 1;
            if !chk.agrees() {
                out.disagreements += 1;
            }
            if chk.passed() {
                out.passing.push(d);
            }
        }
    }
    out
}

/// Inner automorphisms by units with integer coordinates in [−coefficient, coefficient], deduplicated.
pub fn inner_automorphisms(b: &Algebra, coefficient: i64) -> Vec<Matrix> {
    let mut out: Vec<Matrix> = Vec::new();
    for v in crate::crossed::small_vectors(b.dim(), coefficient) {
        let u = Vector(v.into_iter().map(Scalar::from_i64).collect());
        if let Some(m) = inner_automorphism(b, &u) {
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}
