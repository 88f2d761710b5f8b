//! Right comodule algebras over a coquasi-Hopf algebra, relative Hopf
//! modules, coinvariants, twisting, and the Galois map over the explicit
//! quotient A⊗_B A.

use std::sync::Arc;

use crate::coquasi::{twist_bialgebra, CoquasiHopf, Twist};
use crate::linear::{check_vec, merge_legs, Algebra, Legs, Matrix, Space, Subspace, Vector};
use crate::report::Report;
use crate::scalar::Scalar;

/// Sparse coaction: entry i lists (a, h, c) with ρ(e_i) = Σ c·e_a⊗h.
pub type Coaction = Vec<Vec<(usize, usize, Scalar)>>;

/// An algebra in the category of right H-comodules.
#[derive(Clone, Debug, PartialEq)]
pub struct ComoduleAlgebra {
    pub algebra: Algebra,
    pub coaction: Coaction,
    pub host: Arc<CoquasiHopf>,
}

fn coaction_from_vectors(images: &[Vector], dh: usize) -> Coaction {
    images
        .iter()
        .map(|v| v.nonzeros().map(|(k, c)| (k / dh, k % dh, c.clone())).collect())
        .collect()
}

impl ComoduleAlgebra {
    pub fn new(algebra: Algebra, coaction: Coaction, host: Arc<CoquasiHopf>) -> ComoduleAlgebra {
        assert_eq!(coaction.len(), algebra.dim());
        ComoduleAlgebra { algebra, coaction, host }
    }

    /// Coaction given as vectors in A⊗H (index a * dim H + h).
    pub fn from_coaction_vectors(algebra: Algebra, images: &[Vector], host: Arc<CoquasiHopf>) -> ComoduleAlgebra {
        let dh = host.dim();
        ComoduleAlgebra::new(algebra, coaction_from_vectors(images, dh), host)
    }

    /// H itself with ρ = Δ.
    pub fn regular(host: Arc<CoquasiHopf>) -> ComoduleAlgebra {
        let h = &host.base;
        let algebra = h.algebra.clone();
        let coaction = (0..h.dim()).map(|i| h.coalgebra.comult(i).to_vec()).collect();
        ComoduleAlgebra { algebra, coaction, host }
    }

    /// ρ(a) = a⊗1_H.
    pub fn trivial(algebra: Algebra, host: Arc<CoquasiHopf>) -> ComoduleAlgebra {
        let one = host.base.one();
        let coaction = (0..algebra.dim())
            .map(|i| one.nonzeros().map(|(h, c)| (i, h, c.clone())).collect())
            .collect();
        ComoduleAlgebra { algebra, coaction, host }
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn space(&self) -> &Space {
        &self.algebra.space
    }

    pub fn label(&self, i: usize) -> &str {
        self.algebra.space.label(i)
    }

    pub fn e(&self, i: usize) -> Vector {
        self.algebra.basis(i)
    }

    pub fn one(&self) -> Vector {
        self.algebra.one()
    }

    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        self.algebra.mul(a, b)
    }

    pub fn coact(&self, i: usize) -> &[(usize, usize, Scalar)] {
        &self.coaction[i]
    }

    /// ρ(v) as a vector in A⊗H.
    pub fn coact_vec(&self, v: &Vector) -> Vector {
        let dh = self.host.dim();
        let mut out = Vector::zeros(self.dim() * dh);
        for (i, c) in v.nonzeros() {
            for (a, h, x) in &self.coaction[i] {
                out.add_at(a * dh + h, &c.mul_ref(x));
            }
        }
        out
    }

    /// a₀⊗a₁⊗…⊗a_k: index 0 is in A, the remaining k indices in H.
    pub fn coact_legs(&self, i: usize, k: usize) -> Legs {
        let mut out = Vec::new();
        for (a, h, c) in &self.coaction[i] {
            for (hs, d) in self.host.base.legs(*h, k).iter() {
                let mut idx = Vec::with_capacity(k + 1);
                idx.push(*a);
                idx.extend_from_slice(hs);
                out.push((idx, c.mul_ref(d)));
            }
        }
        merge_legs(out)
    }

    pub fn coact_legs_vec(&self, v: &Vector, k: usize) -> Legs {
        let mut out = Vec::new();
        for (i, c) in v.nonzeros() {
            for (idx, d) in self.coact_legs(i, k) {
                out.push((idx, c.mul_ref(&d)));
            }
        }
        merge_legs(out)
    }

    fn tensor_space(&self) -> Space {
        self.space().tensor(self.host.base.space(), "⊗")
    }
}

/// Coaction coassociativity and counit law for a coaction on a space of dim `dm`.
fn check_coaction(r: &mut Report, host: &CoquasiHopf, space: &Space, coaction: &Coaction) {
    let h = &host.base;
    let dh = h.dim();
    let dm = space.dim();
    let sp3 = space.tensor(h.space(), "⊗").tensor(h.space(), "⊗");
    let c = r.begin("coaction-coassociative");
    for i in 0..dm {
        let mut lhs = Vector::zeros(dm * dh * dh);
        let mut rhs = Vector::zeros(dm * dh * dh);
        for (a, x, s) in &coaction[i] {
            for (b, y, t) in &coaction[*a] {
                lhs.add_at((b * dh + y) * dh + x, &s.mul_ref(t));
            }
            for (u, v, t) in h.coalgebra.comult(*x) {
                rhs.add_at((a * dh + u) * dh + v, &s.mul_ref(t));
            }
        }
        check_vec(c, &[space.label(i)], &sp3, &lhs, &rhs);
    }
    let c = r.begin("coaction-counital");
    for i in 0..dm {
        let mut lhs = Vector::zeros(dm);
        for (a, x, s) in &coaction[i] {
            lhs.add_at(*a, &s.mul_ref(h.eps(*x)));
        }
        check_vec(c, &[space.label(i)], space, &lhs, &Vector::basis(dm, i));
    }
}

pub fn check_comodule_algebra(a: &ComoduleAlgebra) -> Report {
    let mut r = Report::new("comodule algebra");
    let h = &a.host.base;
    let d = a.dim();
    let dh = h.dim();
    let sp = a.space().clone();
    let spt = a.tensor_space();
    check_coaction(&mut r, &a.host, &sp, &a.coaction);

    let c = r.begin("multiplication-colinear");
    for i in 0..d {
        for j in 0..d {
            let lhs = a.coact_vec(&a.algebra.product_basis(i, j));
            let mut rhs = Vector::zeros(d * dh);
            for (x, u, s) in a.coact(i) {
                for (y, v, t) in a.coact(j) {
                    let st = s.mul_ref(t);
                    let ab = a.algebra.product_terms(*x, *y);
                    let hg = h.m(*u, *v);
                    for (p, m) in ab {
                        for (q, n) in hg.nonzeros() {
                            rhs.add_at(p * dh + q, &st.mul_ref(&m.mul_ref(n)));
                        }
                    }
                }
            }
            check_vec(c, &[a.label(i), a.label(j)], &spt, &lhs, &rhs);
        }
    }

    let c = r.begin("unit-colinear");
    let mut one_one = Vector::zeros(d * dh);
    for (p, m) in a.one().nonzeros() {
        for (q, n) in h.one().nonzeros() {
            one_one.add_at(p * dh + q, &m.mul_ref(n));
        }
    }
    check_vec(c, &["1"], &spt, &a.coact_vec(&a.one()), &one_one);

    let c = r.begin("unit-law");
    a.algebra.check_unit(c);

    let c = r.begin("comodule-quasi-associativity");
    for i in 0..d {
        for j in 0..d {
            let ij = a.algebra.product_basis(i, j);
            let li = a.coact_legs(i, 1);
            let lj = a.coact_legs(j, 1);
            for k in 0..d {
                let lhs = a.mul(&ij, &a.e(k));
                let mut rhs = Vector::zeros(d);
                for (x, s) in &li {
                    for (y, t) in &lj {
                        for (z, u) in a.coact_legs(k, 1) {
                            let w = h.omega.get(&[x[1], y[1], z[1]]);
                            if w.is_zero() {
                                continue;
                            }
                            let coef = s.mul_ref(t).mul_ref(&u).mul_ref(w);
                            let inner = a.algebra.product_basis(y[0], z[0]);
                            rhs.axpy(&coef, &a.mul(&a.e(x[0]), &inner));
                        }
                    }
                }
                check_vec(c, &[a.label(i), a.label(j), a.label(k)], &sp, &lhs, &rhs);
            }
        }
    }
    r
}

/// The coinvariant subalgebra B = A^{coH} with its embedding into A.
#[derive(Clone, Debug)]
pub struct Coinvariants {
    /// Basis of B as vectors of A.
    pub basis: Vec<Vector>,
    pub algebra: Algebra,
}

impl Coinvariants {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Embedding B → A as a matrix.
    pub fn embedding(&self, ambient: usize) -> Matrix {
        Matrix::from_columns(ambient, &self.basis)
    }

    /// Coordinates in B of an element of A, when it is coinvariant.
    pub fn coords(&self, v: &Vector) -> Option<Vector> {
        Subspace::span(v.dim(), &self.basis).coords(v).map(Vector)
    }

    /// The element of A with the given coordinates in B.
    pub fn include(&self, b: &Vector) -> Vector {
        let ambient = self.basis.first().map_or(0, Vector::dim);
        let mut out = Vector::zeros(ambient);
        for (i, x) in b.nonzeros() {
            out.axpy(x, &self.basis[i]);
        }
        out
    }
}

/// Solves ρ(v) = v⊗1 for v in a space with the given coaction.
pub fn coinvariant_basis(host: &CoquasiHopf, dm: usize, coaction: &Coaction) -> Vec<Vector> {
    let dh = host.dim();
    let one = host.base.one();
    let mut m = Matrix::zeros(dm * dh, dm);
    for i in 0..dm {
        for (a, x, s) in &coaction[i] {
            m.add_at(a * dh + x, i, s);
        }
        for (q, n) in one.nonzeros() {
            m.add_at(i * dh + q, i, &n.neg_ref());
        }
    }
    let kernel = m.kernel();
    // a reduced basis with identity pivots reads best in labels
    let sub = Subspace::span(dm, &kernel);
    sub.basis
}

pub fn coinvariants(a: &ComoduleAlgebra) -> Coinvariants {
    let basis = coinvariant_basis(&a.host, a.dim(), &a.coaction);
    let labels: Vec<String> = basis.iter().map(|v| a.space().render(v)).collect();
    let algebra = a
        .algebra
        .subalgebra(Space::new(labels), &basis)
        .expect("coinvariants are closed under multiplication");
    Coinvariants { basis, algebra }
}

/// A_{τ⁻¹}: a·b = a₀b₀τ⁻¹(a₁,b₁), a comodule algebra over H_τ.
pub fn twist_comodule_algebra(a: &ComoduleAlgebra, t: &Twist) -> ComoduleAlgebra {
    let d = a.dim();
    let ti = &t.tau_inv;
    let algebra = Algebra::from_fn(a.space().clone(), a.one(), |i, j| {
        let mut v = Vector::zeros(d);
        for (x, s) in a.coact_legs(i, 1) {
            for (y, u) in a.coact_legs(j, 1) {
                let c = ti.get(&[x[1], y[1]]);
                if !c.is_zero() {
                    v.axpy(&s.mul_ref(&u).mul_ref(c), &a.algebra.product_basis(x[0], y[0]));
                }
            }
        }
        v
    });
    let host = Arc::new(twist_bialgebra(&a.host, t));
    ComoduleAlgebra { algebra, coaction: a.coaction.clone(), host }
}

/// A right (H, A)-Hopf module: action M⊗A → M and coaction M → M⊗H.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeHopfModule {
    pub space: Space,
    /// `action[m * dim A + a]` = m·a.
    pub action: Vec<Vector>,
    pub coaction: Coaction,
    pub algebra: Arc<ComoduleAlgebra>,
}

impl RelativeHopfModule {
    /// A acting on itself by multiplication.
    pub fn regular(a: Arc<ComoduleAlgebra>) -> RelativeHopfModule {
        RelativeHopfModule {
            space: a.space().clone(),
            action: a.algebra.products(),
            coaction: a.coaction.clone(),
            algebra: a,
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn act(&self, m: &Vector, x: &Vector) -> Vector {
        let da = self.algebra.dim();
        let mut out = Vector::zeros(self.dim());
        for (i, s) in m.nonzeros() {
            for (j, t) in x.nonzeros() {
                out.axpy(&s.mul_ref(t), &self.action[i * da + j]);
            }
        }
        out
    }

    pub fn coact_vec(&self, v: &Vector) -> Vector {
        let dh = self.algebra.host.dim();
        let mut out = Vector::zeros(self.dim() * dh);
        for (i, c) in v.nonzeros() {
            for (a, h, x) in &self.coaction[i] {
                out.add_at(a * dh + h, &c.mul_ref(x));
            }
        }
        out
    }

    pub fn coact_legs(&self, i: usize) -> Legs {
        self.coaction[i].iter().map(|(a, h, c)| (vec![*a, *h], c.clone())).collect()
    }
}

pub fn check_relative_hopf_module(m: &RelativeHopfModule) -> Report {
    let mut r = Report::new("relative Hopf module");
    let a = &m.algebra;
    let h = &a.host.base;
    let dm = m.dim();
    let da = a.dim();
    let dh = h.dim();
    check_coaction(&mut r, &a.host, &m.space, &m.coaction);

    let c = r.begin("module-quasi-associativity");
    for i in 0..dm {
        let li = m.coact_legs(i);
        for j in 0..da {
            let lj = a.coact_legs(j, 1);
            for k in 0..da {
                let lhs = m.act(&m.act(&Vector::basis(dm, i), &a.e(j)), &a.e(k));
                let mut rhs = Vector::zeros(dm);
                for (x, s) in &li {
                    for (y, t) in &lj {
                        for (z, u) in a.coact_legs(k, 1) {
                            let w = h.omega.get(&[x[1], y[1], z[1]]);
                            if w.is_zero() {
                                continue;
                            }
                            let coef = s.mul_ref(t).mul_ref(&u).mul_ref(w);
                            rhs.axpy(&coef, &m.act(&Vector::basis(dm, x[0]), &a.algebra.product_basis(y[0], z[0])));
                        }
                    }
                }
                check_vec(c, &[m.space.label(i), a.label(j), a.label(k)], &m.space, &lhs, &rhs);
            }
        }
    }

    let c = r.begin("module-unit");
    for i in 0..dm {
        let e = Vector::basis(dm, i);
        check_vec(c, &[m.space.label(i)], &m.space, &m.act(&e, &a.one()), &e);
    }

    let c = r.begin("action-colinear");
    let spt = m.space.tensor(h.space(), "⊗");
    for i in 0..dm {
        for j in 0..da {
            let lhs = m.coact_vec(&m.action[i * da + j]);
            let mut rhs = Vector::zeros(dm * dh);
            for (x, u, s) in &m.coaction[i] {
                for (y, v, t) in a.coact(j) {
                    let st = s.mul_ref(t);
                    let my = &m.action[x * da + y];
                    let hg = h.m(*u, *v);
                    for (p, mm) in my.nonzeros() {
                        for (q, n) in hg.nonzeros() {
                            rhs.add_at(p * dh + q, &st.mul_ref(&mm.mul_ref(n)));
                        }
                    }
                }
            }
            check_vec(c, &[m.space.label(i), a.label(j)], &spt, &lhs, &rhs);
        }
    }
    r
}

/// Basis of Hom_A^H(M, N): right A-linear, H-colinear maps, as dim N × dim M matrices.
pub fn relative_hom_space(m: &RelativeHopfModule, n: &RelativeHopfModule) -> Vec<Matrix> {
    let a = &m.algebra;
    let da = a.dim();
    let dh = a.host.dim();
    let (dm, dn) = (m.dim(), n.dim());
    // unknown f(e_i)_p at index i * dn + p
    let unknowns = dm * dn;
    let mut rows: Vec<Vector> = Vec::new();
    for i in 0..dm {
        for j in 0..da {
            // f(e_i a_j) - f(e_i) a_j = 0
            let mut eqs = vec![Vector::zeros(unknowns); dn];
            for (k, s) in m.action[i * da + j].nonzeros() {
                for (p, eq) in eqs.iter_mut().enumerate() {
                    eq.add_at(k * dn + p, s);
                }
            }
            for p in 0..dn {
                for (q, s) in n.action[p * da + j].nonzeros() {
                    eqs[q].add_at(i * dn + p, &s.neg_ref());
                }
            }
            rows.extend(eqs);
        }
        // ρ_N f(e_i) = (f⊗id) ρ_M(e_i)
        let mut eqs = vec![Vector::zeros(unknowns); dn * dh];
        for p in 0..dn {
            for (q, x, s) in &n.coaction[p] {
                eqs[q * dh + x].add_at(i * dn + p, s);
            }
        }
        for (k, x, s) in &m.coaction[i] {
            for p in 0..dn {
                eqs[p * dh + x].add_at(k * dn + p, &s.neg_ref());
            }
        }
        rows.extend(eqs);
    }
    let sys = Matrix::from_rows(unknowns, &rows);
    sys.kernel()
        .into_iter()
        .map(|v| {
            let mut f = Matrix::zeros(dn, dm);
            for i in 0..dm {
                for p in 0..dn {
                    f.set(p, i, v.0[i * dn + p].clone());
                }
            }
            f
        })
        .collect()
}

/// A⊗_B A as A⊗A modulo span{ab⊗c − a⊗bc : b ∈ B}.
#[derive(Clone, Debug)]
pub struct BalancedTensor {
    pub dim_a: usize,
    pub relations: Subspace,
    /// Indices into A⊗A whose classes form a basis of the quotient.
    pub free: Vec<usize>,
}

impl BalancedTensor {
    pub fn new(a: &ComoduleAlgebra, b: &Coinvariants) -> BalancedTensor {
        let d = a.dim();
        let mut gens = Vec::new();
        for bv in &b.basis {
            for i in 0..d {
                let ib = a.mul(&a.e(i), bv);
                for k in 0..d {
                    let bk = a.mul(bv, &a.e(k));
                    let mut v = Vector::zeros(d * d);
                    for (p, s) in ib.nonzeros() {
                        v.add_at(p * d + k, s);
                    }
                    for (p, s) in bk.nonzeros() {
                        v.add_at(i * d + p, &s.neg_ref());
                    }
                    if !v.is_zero() {
                        gens.push(v);
                    }
                }
            }
        }
        let relations = Subspace::span(d * d, &gens);
        let free = relations.free_columns();
        BalancedTensor { dim_a: d, relations, free }
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Quotient coordinates of an element of A⊗A.
    pub fn project(&self, v: &Vector) -> Vector {
        let w = self.relations.reduce(v);
        Vector(self.free.iter().map(|&k| w.0[k].clone()).collect())
    }

    /// The canonical representative of a quotient vector.
    pub fn lift(&self, q: &Vector) -> Vector {
        let mut v = Vector::zeros(self.dim_a * self.dim_a);
        for (c, &k) in q.0.iter().zip(&self.free) {
            v.0[k] = c.clone();
        }
        v
    }

    /// Representative pairs (coefficient, left index, right index).
    pub fn terms(&self, q: &Vector) -> Vec<(Scalar, usize, usize)> {
        let d = self.dim_a;
        q.nonzeros().map(|(k, c)| (c.clone(), self.free[k] / d, self.free[k] % d)).collect()
    }

    pub fn labels(&self, a: &ComoduleAlgebra) -> Vec<String> {
        let d = self.dim_a;
        self.free.iter().map(|&k| format!("{}⊗{}", a.label(k / d), a.label(k % d))).collect()
    }
}

/// can(a⊗b) = a₀b₀⊗b₄ ω⁻¹(a₁, b₁β(b₂), S(b₃)) on a representative.
pub fn can_on_pair(a: &ComoduleAlgebra, i: usize, j: usize) -> Vector {
    let hq = &a.host;
    let h = &hq.base;
    let d = a.dim();
    let dh = h.dim();
    let mut out = Vector::zeros(d * dh);
    let lb = a.coact_legs(j, 4);
    for (x, s) in a.coact_legs(i, 1) {
        for (y, t) in &lb {
            let b = hq.beta_at(y[2]);
            if b.is_zero() {
                continue;
            }
            let w = h.wi(&h.e(x[1]), &h.e(y[1]), &hq.s(y[3]));
            if w.is_zero() {
                continue;
            }
            let coef = s.mul_ref(t).mul_ref(b).mul_ref(&w);
            for (p, m) in a.algebra.product_terms(x[0], y[0]) {
                out.add_at(p * dh + y[4], &coef.mul_ref(m));
            }
        }
    }
    out
}

/// can⁻¹(1⊗h) = Σ_j l_j(h)⊗_B r_j(h), stored as quotient coordinates per basis h.
#[derive(Clone, Debug)]
pub struct CanInverse {
    pub values: Vec<Vector>,
    /// Matrix of can⁻¹ from A⊗H to the quotient.
    pub matrix: Matrix,
}

#[derive(Clone, Debug)]
pub struct GaloisData {
    pub coinvariants: Coinvariants,
    pub tensor: BalancedTensor,
    /// Matrix of can from the quotient to A⊗H.
    pub can: Matrix,
    pub bijective: bool,
    pub inverse: Option<CanInverse>,
    pub report: Report,
}

pub fn galois_can(a: &ComoduleAlgebra) -> GaloisData {
    let hq = &a.host;
    let h = &hq.base;
    let d = a.dim();
    let dh = h.dim();
    let b = coinvariants(a);
    let bt = BalancedTensor::new(a, &b);
    let mut report = Report::new("Galois map");
    let spt = a.tensor_space();

    let reps: Vec<Vector> = (0..d * d).map(|k| can_on_pair(a, k / d, k % d)).collect();
    let apply_rep = |v: &Vector| -> Vector {
        let mut out = Vector::zeros(d * dh);
        for (k, c) in v.nonzeros() {
            out.axpy(c, &reps[k]);
        }
        out
    };
    let c = report.begin("can-well-defined");
    for (n, rel) in bt.relations.basis.iter().enumerate() {
        let label = format!("relation {n}");
        check_vec(c, &[&label], &spt, &apply_rep(rel), &Vector::zeros(d * dh));
    }
    let can = Matrix::from_columns(d * dh, &bt.free.iter().map(|&k| reps[k].clone()).collect::<Vec<_>>());
    let bijective = bt.dim() == d * dh && can.rank() == bt.dim();
    report.note(format!(
        "dim A⊗_B A = {}, dim A⊗H = {}, rank can = {}",
        bt.dim(),
        d * dh,
        can.rank()
    ));
    let inverse = if bijective {
        let inv = can.inverse().expect("square full-rank matrix is invertible");
        let mut one_h = Vec::with_capacity(dh);
        for x in 0..dh {
            let mut v = Vector::zeros(d * dh);
            for (p, s) in a.one().nonzeros() {
                v.add_at(p * dh + x, s);
            }
            one_h.push(inv.apply(&v));
        }
        Some(CanInverse { values: one_h, matrix: inv })
    } else {
        None
    };
    let mut data = GaloisData { coinvariants: b, tensor: bt, can, bijective, inverse, report };
    if data.inverse.is_some() {
        let mut r = std::mem::take(&mut data.report);
        check_can_inverse(a, &data, &mut r);
        data.report = r;
    }
    data
}

/// Checks the five standard identities of l_j(h)⊗_B r_j(h).
pub fn check_can_inverse(a: &ComoduleAlgebra, g: &GaloisData, r: &mut Report) {
    let inv = g.inverse.as_ref().expect("inverse present");
    let hq = &a.host;
    let h = &hq.base;
    let d = a.dim();
    let dh = h.dim();
    let bt = &g.tensor;
    let dq = bt.dim();
    let mut qlabels = bt.labels(a);
    let qh_space = Space::new(
        qlabels
            .iter()
            .flat_map(|q| h.space().labels.iter().map(move |x| format!("{q}⊗{x}")))
            .collect::<Vec<_>>(),
    );
    let q_space = Space::new(std::mem::take(&mut qlabels));
    let spt = a.tensor_space();

    let c = r.begin("can-inverse-two-sided");
    let ident = |n: usize| Matrix::identity(n);
    let lr = g.can.mul(&inv.matrix) == ident(d * dh);
    let rl = inv.matrix.mul(&g.can) == ident(dq);
    c.record(&["can∘can⁻¹"], lr, "not identity", "identity");
    c.record(&["can⁻¹∘can"], rl, "not identity", "identity");

    // Projects Σ (A⊗A)-slices indexed by H into (A⊗_B A)⊗H.
    let project_slices = |slices: &[Vector]| -> Vector {
        let mut out = Vector::zeros(dq * dh);
        for (x, v) in slices.iter().enumerate() {
            let p = bt.project(v);
            for (k, s) in p.nonzeros() {
                out.add_at(k * dh + x, s);
            }
        }
        out
    };

    let c = r.begin("inverse-left-leg-coaction");
    for x in 0..dh {
        let mut lhs = vec![Vector::zeros(d * d); dh];
        for (s, i, j) in bt.terms(&inv.values[x]) {
            for (p, y, t) in a.coact(i) {
                lhs[*y].add_at(p * d + j, &s.mul_ref(t));
            }
        }
        let mut rhs = vec![Vector::zeros(d * d); dh];
        for (u, v, t) in h.coalgebra.comult(x) {
            let sv = hq.s(*u);
            for (y, st) in sv.nonzeros() {
                let lifted = bt.lift(&inv.values[*v]);
                rhs[y].axpy(&t.mul_ref(st), &lifted);
            }
        }
        check_vec(c, &[h.label(x)], &qh_space, &project_slices(&lhs), &project_slices(&rhs));
    }

    let c = r.begin("inverse-right-leg-coaction");
    for x in 0..dh {
        let mut lhs = vec![Vector::zeros(d * d); dh];
        for (u, v, t) in h.coalgebra.comult(x) {
            lhs[*v].axpy(t, &bt.lift(&inv.values[*u]));
        }
        let mut rhs = vec![Vector::zeros(d * d); dh];
        for (s, i, j) in bt.terms(&inv.values[x]) {
            for (p, y, t) in a.coact(j) {
                rhs[*y].add_at(i * d + p, &s.mul_ref(t));
            }
        }
        check_vec(c, &[h.label(x)], &qh_space, &project_slices(&lhs), &project_slices(&rhs));
    }

    let c = r.begin("inverse-product-alpha");
    for x in 0..dh {
        let mut lhs = Vector::zeros(d);
        for (s, i, j) in bt.terms(&inv.values[x]) {
            lhs.axpy(&s, &a.algebra.product_basis(i, j));
        }
        check_vec(c, &[h.label(x)], a.space(), &lhs, &a.one().scale(hq.alpha_at(x)));
    }

    let c = r.begin("inverse-left-A-linear");
    for i in 0..d {
        for x in 0..dh {
            let mut lhs = Vector::zeros(d * d);
            for (s, p, j) in bt.terms(&inv.values[x]) {
                for (q, t) in a.algebra.product_terms(i, p) {
                    lhs.add_at(q * d + j, &s.mul_ref(t));
                }
            }
            let rhs = inv.matrix.column(i * dh + x);
            check_vec(c, &[a.label(i), h.label(x)], &q_space, &bt.project(&lhs), &rhs);
        }
    }

    let c = r.begin("can-on-one-tensor");
    let one = a.one();
    for j in 0..d {
        let mut lhs = Vector::zeros(d * dh);
        for (i, s) in one.nonzeros() {
            lhs.axpy(s, &can_on_pair(a, i, j));
        }
        let mut rhs = Vector::zeros(d * dh);
        for (y, t) in a.coact_legs(j, 2) {
            let b = hq.beta_at(y[1]);
            if !b.is_zero() {
                rhs.add_at(y[0] * dh + y[2], &t.mul_ref(b));
            }
        }
        check_vec(c, &[a.label(j)], &spt, &lhs, &rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{group_algebra, h2, h3};
    use crate::scalar::FieldSpec;

    #[test]
    fn regular_coaction_passes_only_for_trivial_omega() {
        for host in [group_algebra(2), group_algebra(3)] {
            let a = ComoduleAlgebra::regular(Arc::new(host));
            let r = check_comodule_algebra(&a);
            assert!(r.passed(), "{r}");
        }
        let a = ComoduleAlgebra::regular(Arc::new(h2()));
        let r = check_comodule_algebra(&a);
        assert_eq!(r.failed_identities(), vec!["comodule-quasi-associativity"]);
        assert_eq!(r.get("comodule-quasi-associativity").unwrap().failures[0].witness, vec!["x", "x", "x"]);
    }

    #[test]
    fn trivial_coaction_has_everything_coinvariant() {
        let host = Arc::new(group_algebra(2));
        let a = ComoduleAlgebra::trivial(host.base.algebra.clone(), host);
        assert!(check_comodule_algebra(&a).passed());
        assert_eq!(coinvariants(&a).dim(), 2);
        let g = galois_can(&a);
        assert!(!g.bijective);
    }

    #[test]
    fn h2_regular_has_scalar_coinvariants() {
        let a = ComoduleAlgebra::regular(Arc::new(h2()));
        let b = coinvariants(&a);
        assert_eq!(b.basis, vec![a.one()]);
    }

    #[test]
    fn group_algebra_regular_is_galois() {
        for n in [2, 3] {
            let a = ComoduleAlgebra::regular(Arc::new(group_algebra(n)));
            let g = galois_can(&a);
            assert!(g.bijective);
            assert!(g.report.passed(), "{}", g.report);
        }
        let a = ComoduleAlgebra::regular(Arc::new(h3(FieldSpec::cyclotomic(3)).unwrap()));
        assert_eq!(coinvariants(&a).dim(), 1);
    }

    #[test]
    fn twisted_group_algebra_of_c2() {
        let host = Arc::new(group_algebra(2));
        let a = ComoduleAlgebra::regular(host.clone());
        let t = Twist::grouplike(&host.base.coalgebra, |i, j| {
            if i == 1 && j == 1 {
                Scalar::from_i64(-1)
            } else {
                Scalar::one()
            }
        })
        .unwrap();
        let at = twist_comodule_algebra(&a, &t);
        assert_eq!(at.algebra.product_basis(1, 1), Vector(vec![Scalar::from_i64(-1), Scalar::zero()]));
        assert!(check_comodule_algebra(&at).passed());
        let back = twist_comodule_algebra(&at, &t.inverse());
        assert_eq!(back.algebra, a.algebra);
        assert_eq!(back.host.base.omega, host.base.omega);
        assert_eq!(back.host.base.algebra, host.base.algebra);
    }

    #[test]
    fn regular_module_hom_matches_coinvariants() {
        let a = Arc::new(ComoduleAlgebra::regular(Arc::new(group_algebra(3))));
        let m = RelativeHopfModule::regular(a.clone());
        assert!(check_relative_hopf_module(&m).passed());
        let homs = relative_hom_space(&m, &m);
        assert_eq!(homs.len(), coinvariants(&a).dim());
    }
}
