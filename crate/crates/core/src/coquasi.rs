//! Coquasi-bialgebras and coquasi-Hopf algebras given by structure constants,
//! their axiom checkers, gauge twists, the twist f and duality with
//! quasi-bialgebras.

use thiserror::Error;

use crate::linear::{
    check_vec, convolve_functionals, invert_functional, Algebra, Coalgebra, Functional, LinearError, Matrix, Space,
    Vector,
};
use crate::report::Report;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoquasiError {
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error("no twist f satisfies both defining identities")]
    NoSolution,
    #[error("invalid structure: {0}")]
    Invalid(String),
}

/// Coalgebra with a multiplication that is associative up to the reassociator ω.
#[derive(Clone, Debug, PartialEq)]
pub struct CoquasiBialgebra {
    pub coalgebra: Coalgebra,
    /// Multiplication and unit; associativity is not assumed.
    pub algebra: Algebra,
    pub omega: Functional,
    pub omega_inv: Functional,
}

impl CoquasiBialgebra {
    /// Builds the structure, computing ω⁻¹ by convolution inversion.
    pub fn new(coalgebra: Coalgebra, algebra: Algebra, omega: Functional) -> Result<Self, CoquasiError> {
        let omega_inv = invert_functional(&omega, &coalgebra)?;
        Ok(CoquasiBialgebra { coalgebra, algebra, omega, omega_inv })
    }

    /// Builds the structure with a caller-supplied ω⁻¹ (revalidated by the checker).
    pub fn with_inverse(coalgebra: Coalgebra, algebra: Algebra, omega: Functional, omega_inv: Functional) -> Self {
        CoquasiBialgebra { coalgebra, algebra, omega, omega_inv }
    }

    pub fn dim(&self) -> usize {
        self.coalgebra.dim()
    }

    pub fn space(&self) -> &Space {
        &self.coalgebra.space
    }

    pub fn label(&self, i: usize) -> &str {
        self.coalgebra.space.label(i)
    }

    pub fn e(&self, i: usize) -> Vector {
        Vector::basis(self.dim(), i)
    }

    pub fn one(&self) -> Vector {
        self.algebra.unit.clone()
    }

    pub fn mul(&self, a: &Vector, b: &Vector) -> Vector {
        self.algebra.mul(a, b)
    }

    pub fn m(&self, i: usize, j: usize) -> Vector {
        self.algebra.product_basis(i, j)
    }

    pub fn eps(&self, i: usize) -> &Scalar {
        self.coalgebra.counit(i)
    }

    pub fn eps_v(&self, v: &Vector) -> Scalar {
        self.coalgebra.counit_of(v)
    }

    pub fn legs(&self, i: usize, k: usize) -> std::sync::Arc<crate::linear::Legs> {
        self.coalgebra.sweedler(i, k)
    }

    pub fn w(&self, a: &Vector, b: &Vector, c: &Vector) -> Scalar {
        self.omega.eval(&[a, b, c])
    }

    pub fn wi(&self, a: &Vector, b: &Vector, c: &Vector) -> Scalar {
        self.omega_inv.eval(&[a, b, c])
    }

    /// Index of the basis element equal to the unit, when the unit is a basis vector.
    pub fn unit_index(&self) -> Option<usize> {
        let nz: Vec<_> = self.algebra.unit.nonzeros().collect();
        (nz.len() == 1 && nz[0].1.is_one()).then(|| nz[0].0)
    }

    /// ω = ε⊗ε⊗ε.
    pub fn has_trivial_omega(&self) -> bool {
        self.omega.is_counit_power(&self.coalgebra)
    }

    /// The dual quasi-bialgebra H*: transposed structure maps and Φ = ω.
    pub fn dual_quasi(&self) -> QuasiBialgebra {
        let d = self.dim();
        let space = self.space().clone();
        // multiplication of H* is the transpose of Δ
        let algebra = Algebra::from_fn(space.clone(), Vector(self.coalgebra.counit_values().to_vec()), |i, j| {
            let mut v = Vector::zeros(d);
            for k in 0..d {
                for (a, b, c) in self.coalgebra.comult(k) {
                    if *a == i && *b == j {
                        v.add_at(k, c);
                    }
                }
            }
            v
        });
        let comult = (0..d)
            .map(|k| {
                let mut terms = Vec::new();
                for i in 0..d {
                    for j in 0..d {
                        for (t, c) in self.algebra.product_terms(i, j) {
                            if *t == k {
                                terms.push((i, j, c.clone()));
                            }
                        }
                    }
                }
                terms
            })
            .collect();
        let coalgebra = Coalgebra::new(space, comult, self.algebra.unit.0.clone());
        QuasiBialgebra { algebra, coalgebra, phi: self.omega.values.clone() }
    }
}

/// A gauge transformation τ with its convolution inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Twist {
    pub tau: Functional,
    pub tau_inv: Functional,
}

impl Twist {
    pub fn new(tau: Functional, coalgebra: &Coalgebra) -> Result<Twist, CoquasiError> {
        let tau_inv = invert_functional(&tau, coalgebra)?;
        Ok(Twist { tau, tau_inv })
    }

    pub fn trivial(coalgebra: &Coalgebra) -> Twist {
        let e = Functional::counit_power(coalgebra, 2);
        Twist { tau: e.clone(), tau_inv: e }
    }

    /// The twist τ⁻¹.
    pub fn inverse(&self) -> Twist {
        Twist { tau: self.tau_inv.clone(), tau_inv: self.tau.clone() }
    }

    /// A twist supported on grouplikes, given by its values τ(g,h).
    pub fn grouplike(coalgebra: &Coalgebra, f: impl Fn(usize, usize) -> Scalar) -> Result<Twist, CoquasiError> {
        Twist::new(Functional::from_fn(coalgebra.dim(), 2, |ix| f(ix[0], ix[1])), coalgebra)
    }

    pub fn check(&self, h: &CoquasiBialgebra) -> Report {
        let mut r = Report::new("twist");
        let one = h.one();
        let c = r.begin("twist-normalized");
        for i in 0..h.dim() {
            let e = h.e(i);
            let eps = h.eps(i).clone();
            c.compare(&[h.label(i), "left"], &self.tau.eval(&[&one, &e]), &eps);
            c.compare(&[h.label(i), "right"], &self.tau.eval(&[&e, &one]), &eps);
        }
        let c = r.begin("twist-inverse");
        let unit = Functional::counit_power(&h.coalgebra, 2);
        let a = convolve_functionals(&self.tau, &self.tau_inv, &h.coalgebra);
        let b = convolve_functionals(&self.tau_inv, &self.tau, &h.coalgebra);
        for k in 0..unit.len() {
            let ix = crate::linear::unflatten(h.dim(), 2, k);
            let w = [h.label(ix[0]), h.label(ix[1])];
            c.compare(&w, &a.values[k], &unit.values[k]);
            c.compare(&w, &b.values[k], &unit.values[k]);
        }
        r
    }
}

/// Coquasi-bialgebra with antipode data (S, α, β) and optionally the twist f.
#[derive(Clone, Debug, PartialEq)]
pub struct CoquasiHopf {
    pub base: CoquasiBialgebra,
    /// Matrix of S in the basis of H.
    pub antipode: Matrix,
    pub alpha: Functional,
    pub beta: Functional,
    pub twist_f: Option<Twist>,
}

impl CoquasiHopf {
    /// Normalizes α(1) = β(1) = 1 when α(1)β(1) = 1 and α(1) ≠ 1.
    pub fn new(base: CoquasiBialgebra, antipode: Matrix, alpha: Functional, beta: Functional) -> CoquasiHopf {
        let one = base.one();
        let a1 = alpha.eval(&[&one]);
        let b1 = beta.eval(&[&one]);
        let (alpha, beta) = if !a1.is_one() && !a1.is_zero() && (&a1 * &b1).is_one() {
            let ai = a1.inv().unwrap();
            let scale = |f: &Functional, s: &Scalar| Functional {
                dim: f.dim,
                arity: 1,
                values: f.values.iter().map(|v| v * s).collect(),
            };
            (scale(&alpha, &ai), scale(&beta, &a1))
        } else {
            (alpha, beta)
        };
        CoquasiHopf { base, antipode, alpha, beta, twist_f: None }
    }

    /// Attach the twist f computed by [`solve_twist_f`].
    pub fn with_twist_f(mut self) -> Result<CoquasiHopf, CoquasiError> {
        self.twist_f = Some(solve_twist_f(&self)?);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn h(&self) -> &CoquasiBialgebra {
        &self.base
    }

    pub fn s(&self, i: usize) -> Vector {
        self.antipode.column(i)
    }

    pub fn s_v(&self, v: &Vector) -> Vector {
        self.antipode.apply(v)
    }

    pub fn alpha_at(&self, i: usize) -> &Scalar {
        &self.alpha.values[i]
    }

    pub fn beta_at(&self, i: usize) -> &Scalar {
        &self.beta.values[i]
    }

    pub fn alpha_v(&self, v: &Vector) -> Scalar {
        self.alpha.eval(&[v])
    }

    pub fn beta_v(&self, v: &Vector) -> Scalar {
        self.beta.eval(&[v])
    }

    pub fn f(&self) -> &Twist {
        self.twist_f.as_ref().expect("twist f not attached")
    }
}

pub fn check_coquasi_bialgebra(h: &CoquasiBialgebra) -> Report {
    let mut r = Report::new("coquasi-bialgebra");
    let d = h.dim();
    let sp = h.space().clone();
    let lab = |i: usize| h.label(i);

    let c = r.begin("coassociativity");
    h.coalgebra.check_coassociative(c);
    let c = r.begin("counit");
    h.coalgebra.check_counit(c);

    let sp2 = sp.tensor(&sp, ",");
    let c = r.begin("multiplication-comultiplicative");
    for i in 0..d {
        for j in 0..d {
            let lhs = h.coalgebra.comult_vec(&h.m(i, j));
            let mut rhs = Vector::zeros(d * d);
            for (a1, a2, x) in h.coalgebra.comult(i) {
                for (b1, b2, y) in h.coalgebra.comult(j) {
                    let p1 = h.m(*a1, *b1);
                    let p2 = h.m(*a2, *b2);
                    let xy = x * y;
                    for (u, s) in p1.nonzeros() {
                        for (v, t) in p2.nonzeros() {
                            rhs.add_at(u * d + v, &(&xy * &(s * t)));
                        }
                    }
                }
            }
            check_vec(c, &[lab(i), lab(j)], &sp2, &lhs, &rhs);
        }
    }
    let c = r.begin("multiplication-counital");
    for i in 0..d {
        for j in 0..d {
            c.compare(&[lab(i), lab(j)], &h.eps_v(&h.m(i, j)), &(h.eps(i) * h.eps(j)));
        }
    }
    let c = r.begin("unit-grouplike");
    let one = h.one();
    let mut one_one = Vector::zeros(d * d);
    for (u, s) in one.nonzeros() {
        for (v, t) in one.nonzeros() {
            one_one.add_at(u * d + v, &(s * t));
        }
    }
    check_vec(c, &["1"], &sp2, &h.coalgebra.comult_vec(&one), &one_one);
    c.compare(&["1", "counit"], &h.eps_v(&one), &Scalar::one());

    let c = r.begin("unit-law");
    for i in 0..d {
        let e = h.e(i);
        check_vec(c, &[lab(i), "left"], &sp, &h.mul(&one, &e), &e);
        check_vec(c, &[lab(i), "right"], &sp, &h.mul(&e, &one), &e);
    }

    let c = r.begin("quasi-associativity");
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut lhs = Vector::zeros(d);
                let mut rhs = Vector::zeros(d);
                for (hi, x) in h.legs(i, 2).iter() {
                    for (gi, y) in h.legs(j, 2).iter() {
                        for (ki, z) in h.legs(k, 2).iter() {
                            let coef = &(x * y) * z;
                            let wl = h.omega.get(&[hi[1], gi[1], ki[1]]);
                            if !wl.is_zero() {
                                let v = h.mul(&h.e(hi[0]), &h.m(gi[0], ki[0]));
                                lhs.axpy(&(&coef * wl), &v);
                            }
                            let wr = h.omega.get(&[hi[0], gi[0], ki[0]]);
                            if !wr.is_zero() {
                                let v = h.mul(&h.m(hi[1], gi[1]), &h.e(ki[1]));
                                rhs.axpy(&(&coef * wr), &v);
                            }
                        }
                    }
                }
                check_vec(c, &[lab(i), lab(j), lab(k)], &sp, &lhs, &rhs);
            }
        }
    }

    let c = r.begin("omega-3-cocycle");
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut lhs = Scalar::zero();
                    for (hi, a) in h.legs(i, 2).iter() {
                        for (gi, b) in h.legs(j, 2).iter() {
                            for (ki, x) in h.legs(k, 2).iter() {
                                for (li, y) in h.legs(l, 2).iter() {
                                    let w1 = h.w(&h.e(hi[0]), &h.e(gi[0]), &h.m(ki[0], li[0]));
                                    if w1.is_zero() {
                                        continue;
                                    }
                                    let w2 = h.w(&h.m(hi[1], gi[1]), &h.e(ki[1]), &h.e(li[1]));
                                    let coef = &(&(a * b) * x) * y;
                                    lhs = &lhs + &(&coef * &(&w1 * &w2));
                                }
                            }
                        }
                    }
                    let mut rhs = Scalar::zero();
                    for (hi, a) in h.legs(i, 2).iter() {
                        for (gi, b) in h.legs(j, 3).iter() {
                            for (ki, x) in h.legs(k, 3).iter() {
                                for (li, y) in h.legs(l, 2).iter() {
                                    let w1 = h.omega.get(&[gi[0], ki[0], li[0]]);
                                    if w1.is_zero() {
                                        continue;
                                    }
                                    let w2 = h.w(&h.e(hi[0]), &h.m(gi[1], ki[1]), &h.e(li[1]));
                                    let w3 = h.omega.get(&[hi[1], gi[2], ki[2]]);
                                    let coef = &(&(a * b) * x) * y;
                                    rhs = &rhs + &(&coef * &(&(w1 * &w2) * w3));
                                }
                            }
                        }
                    }
                    c.compare(&[lab(i), lab(j), lab(k), lab(l)], &lhs, &rhs);
                }
            }
        }
    }

    let c = r.begin("omega-normalized");
    for i in 0..d {
        for j in 0..d {
            let v = h.w(&h.e(i), &one, &h.e(j));
            c.compare(&[lab(i), "1", lab(j)], &v, &(h.eps(i) * h.eps(j)));
        }
    }

    let c = r.begin("omega-convolution-inverse");
    let unit = Functional::counit_power(&h.coalgebra, 3);
    let a = convolve_functionals(&h.omega, &h.omega_inv, &h.coalgebra);
    let b = convolve_functionals(&h.omega_inv, &h.omega, &h.coalgebra);
    for k in 0..unit.len() {
        let ix = crate::linear::unflatten(d, 3, k);
        let w = [lab(ix[0]), lab(ix[1]), lab(ix[2])];
        c.compare(&w, &a.values[k], &unit.values[k]);
        c.compare(&w, &b.values[k], &unit.values[k]);
    }

    if r.passed() && h.has_trivial_omega() {
        r.note("ordinary bialgebra");
    }
    r
}

pub fn check_coquasi_hopf(hq: &CoquasiHopf) -> Report {
    let h = &hq.base;
    let mut r = Report::new("coquasi-Hopf algebra");
    r.absorb("", check_coquasi_bialgebra(h));
    let d = h.dim();
    let sp = h.space().clone();
    let sp2 = sp.tensor(&sp, ",");
    let lab = |i: usize| h.label(i);
    let one = h.one();

    let c = r.begin("antipode-coalgebra-antimorphism");
    for i in 0..d {
        let lhs = h.coalgebra.comult_vec(&hq.s(i));
        let mut rhs = Vector::zeros(d * d);
        for (a, b, x) in h.coalgebra.comult(i) {
            let sb = hq.s(*b);
            let sa = hq.s(*a);
            for (u, s) in sb.nonzeros() {
                for (v, t) in sa.nonzeros() {
                    rhs.add_at(u * d + v, &(x * &(s * t)));
                }
            }
        }
        check_vec(c, &[lab(i)], &sp2, &lhs, &rhs);
        c.compare(&[lab(i), "counit"], &h.eps_v(&hq.s(i)), h.eps(i));
    }

    let c = r.begin("antipode-alpha");
    for i in 0..d {
        let mut lhs = Vector::zeros(d);
        for (ix, x) in h.legs(i, 3).iter() {
            let a = hq.alpha_at(ix[1]);
            if a.is_zero() {
                continue;
            }
            lhs.axpy(&(x * a), &h.mul(&hq.s(ix[0]), &h.e(ix[2])));
        }
        check_vec(c, &[lab(i)], &sp, &lhs, &one.scale(hq.alpha_at(i)));
    }

    let c = r.begin("antipode-beta");
    for i in 0..d {
        let mut lhs = Vector::zeros(d);
        for (ix, x) in h.legs(i, 3).iter() {
            let b = hq.beta_at(ix[1]);
            if b.is_zero() {
                continue;
            }
            lhs.axpy(&(x * b), &h.mul(&h.e(ix[0]), &hq.s(ix[2])));
        }
        check_vec(c, &[lab(i)], &sp, &lhs, &one.scale(hq.beta_at(i)));
    }

    let c = r.begin("omega-antipode");
    for i in 0..d {
        let mut v = Scalar::zero();
        for (ix, x) in h.legs(i, 5).iter() {
            let ab = hq.beta_at(ix[1]) * hq.alpha_at(ix[3]);
            if ab.is_zero() {
                continue;
            }
            let w = h.w(&h.e(ix[0]), &hq.s(ix[2]), &h.e(ix[4]));
            v = &v + &(&(x * &ab) * &w);
        }
        c.compare(&[lab(i)], &v, h.eps(i));
    }

    let c = r.begin("omega-inverse-antipode");
    for i in 0..d {
        let mut v = Scalar::zero();
        for (ix, x) in h.legs(i, 5).iter() {
            let ab = hq.alpha_at(ix[1]) * hq.beta_at(ix[3]);
            if ab.is_zero() {
                continue;
            }
            let w = h.wi(&hq.s(ix[0]), &h.e(ix[2]), &hq.s(ix[4]));
            v = &v + &(&(x * &ab) * &w);
        }
        c.compare(&[lab(i)], &v, h.eps(i));
    }

    let c = r.begin("antipode-unit");
    check_vec(c, &["1"], &sp, &hq.s_v(&one), &one);
    let c = r.begin("alpha-beta-unit");
    c.compare(&["1"], &(&hq.alpha_v(&one) * &hq.beta_v(&one)), &Scalar::one());

    if let Some(f) = &hq.twist_f {
        r.absorb("f", f.check(h));
        check_twist_f_equations(hq, f, &mut r);
    }
    r
}

/// f(h₁,g₁)S(h₂g₂) = S(g₁)S(h₁)f(h₂,g₂) and the β-identity for f⁻¹.
pub fn check_twist_f_equations(hq: &CoquasiHopf, f: &Twist, r: &mut Report) {
    let h = &hq.base;
    let d = h.dim();
    let sp = h.space().clone();
    let c = r.begin("twist-f-antipode");
    for i in 0..d {
        for j in 0..d {
            let (lhs, rhs) = twist_f_sides(hq, &f.tau, i, j);
            check_vec(c, &[h.label(i), h.label(j)], &sp, &lhs, &rhs);
        }
    }
    let c = r.begin("twist-f-beta");
    for i in 0..d {
        for j in 0..d {
            let lhs = beta_f_lhs(hq, &f.tau_inv, i, j);
            let rhs = beta_f_rhs(hq, i, j);
            c.compare(&[h.label(i), h.label(j)], &lhs, &rhs);
        }
    }
}

fn twist_f_sides(hq: &CoquasiHopf, f: &Functional, i: usize, j: usize) -> (Vector, Vector) {
    let h = &hq.base;
    let d = h.dim();
    let mut lhs = Vector::zeros(d);
    let mut rhs = Vector::zeros(d);
    for (hi, x) in h.legs(i, 2).iter() {
        for (gi, y) in h.legs(j, 2).iter() {
            let xy = x * y;
            let fl = f.get(&[hi[0], gi[0]]);
            if !fl.is_zero() {
                lhs.axpy(&(&xy * fl), &hq.s_v(&h.m(hi[1], gi[1])));
            }
            let fr = f.get(&[hi[1], gi[1]]);
            if !fr.is_zero() {
                rhs.axpy(&(&xy * fr), &h.mul(&hq.s(gi[0]), &hq.s(hi[0])));
            }
        }
    }
    (lhs, rhs)
}

fn beta_f_lhs(hq: &CoquasiHopf, finv: &Functional, i: usize, j: usize) -> Scalar {
    let h = &hq.base;
    let mut v = Scalar::zero();
    for (hi, x) in h.legs(i, 2).iter() {
        for (gi, y) in h.legs(j, 2).iter() {
            let b = hq.beta_v(&h.m(hi[0], gi[0]));
            if b.is_zero() {
                continue;
            }
            v = &v + &(&(&(x * y) * &b) * finv.get(&[hi[1], gi[1]]));
        }
    }
    v
}

fn beta_f_rhs(hq: &CoquasiHopf, i: usize, j: usize) -> Scalar {
    let h = &hq.base;
    let mut v = Scalar::zero();
    for (hi, x) in h.legs(i, 4).iter() {
        for (gi, y) in h.legs(j, 5).iter() {
            let bb = hq.beta_at(hi[2]) * hq.beta_at(gi[2]);
            if bb.is_zero() {
                continue;
            }
            let w1 = h.w(&h.m(hi[0], gi[0]), &hq.s(gi[4]), &hq.s(hi[3]));
            if w1.is_zero() {
                continue;
            }
            let w2 = h.wi(&h.e(hi[1]), &h.e(gi[1]), &hq.s(gi[3]));
            v = &v + &(&(&(x * y) * &bb) * &(&w1 * &w2));
        }
    }
    v
}

/// Linear constraints f(1,h) = f(h,1) = ε(h), as rows over the d² unknowns.
fn normalization_rows(h: &CoquasiBialgebra) -> (Vec<Vector>, Vec<Scalar>) {
    let d = h.dim();
    let one = h.one();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in 0..d {
        let mut left = Vector::zeros(d * d);
        let mut right = Vector::zeros(d * d);
        for (u, s) in one.nonzeros() {
            left.add_at(u * d + k, s);
            right.add_at(k * d + u, s);
        }
        rows.push(left);
        rhs.push(h.eps(k).clone());
        rows.push(right);
        rhs.push(h.eps(k).clone());
    }
    (rows, rhs)
}

/// Bound on the integer grid searched when the linear systems leave free parameters.
pub const TWIST_F_SEARCH_BOUND: i64 = 2;

/// Solves for the twist f and its inverse.
///
/// The β-identity determines f⁻¹ linearly; when it is underdetermined the
/// defining antipode equation is solved for f instead, and any remaining
/// freedom is searched over a small integer grid, keeping the
/// lexicographically smallest valid f.
pub fn solve_twist_f(hq: &CoquasiHopf) -> Result<Twist, CoquasiError> {
    let h = &hq.base;
    let d = h.dim();
    let n = d * d;
    let (norm_rows, norm_rhs) = normalization_rows(h);

    // β-identity: linear in f⁻¹.
    let mut rows = norm_rows.clone();
    let mut rhs = norm_rhs.clone();
    for i in 0..d {
        for j in 0..d {
            let mut row = Vector::zeros(n);
            for (hi, x) in h.legs(i, 2).iter() {
                for (gi, y) in h.legs(j, 2).iter() {
                    let b = hq.beta_v(&h.m(hi[0], gi[0]));
                    row.add_at(hi[1] * d + gi[1], &(&(x * y) * &b));
                }
            }
            rows.push(row);
            rhs.push(beta_f_rhs(hq, i, j));
        }
    }
    let beta_system = Matrix::from_rows(n, &rows);
    let beta_sol = beta_system.solve_affine(&Vector(rhs));

    // Defining antipode equation: linear in f.
    let mut rows = norm_rows;
    let mut rhs = norm_rhs;
    for i in 0..d {
        for j in 0..d {
            for t in 0..d {
                let mut row = Vector::zeros(n);
                for (hi, x) in h.legs(i, 2).iter() {
                    for (gi, y) in h.legs(j, 2).iter() {
                        let xy = x * y;
                        let l = hq.s_v(&h.m(hi[1], gi[1]));
                        row.add_at(hi[0] * d + gi[0], &(&xy * &l.0[t]));
                        let rr = h.mul(&hq.s(gi[0]), &hq.s(hi[0]));
                        row.add_at(hi[1] * d + gi[1], &(&xy * &rr.0[t]).neg_ref());
                    }
                }
                rows.push(row);
                rhs.push(Scalar::zero());
            }
        }
    }
    let f_system = Matrix::from_rows(n, &rows);
    let f_sol = f_system.solve_affine(&Vector(rhs));

    let accept = |f: Functional| -> Option<Twist> {
        let t = Twist::new(f, &h.coalgebra).ok()?;
        let mut r = Report::new("f");
        check_twist_f_equations(hq, &t, &mut r);
        (r.passed() && t.check(h).passed()).then_some(t)
    };
    let to_f = |v: &Vector| Functional { dim: d, arity: 2, values: v.0.clone() };

    if let Some((p, k)) = &beta_sol {
        if k.is_empty() {
            let finv = to_f(p);
            let t = Twist::new(finv, &h.coalgebra).map_err(|_| CoquasiError::NoSolution)?.inverse();
            let mut r = Report::new("f");
            check_twist_f_equations(hq, &t, &mut r);
            return if r.passed() { Ok(t) } else { Err(CoquasiError::NoSolution) };
        }
    }
    let Some((p, kernel)) = f_sol else { return Err(CoquasiError::NoSolution) };
    if kernel.is_empty() {
        return accept(to_f(&p)).ok_or(CoquasiError::NoSolution);
    }
    let mut best: Option<Twist> = None;
    let range: Vec<i64> = (-TWIST_F_SEARCH_BOUND..=TWIST_F_SEARCH_BOUND).collect();
    let mut counter = vec![0usize; kernel.len()];
    loop {
        let mut v = p.clone();
        for (ci, kv) in counter.iter().zip(&kernel) {
            v.axpy(&Scalar::from_i64(range[*ci]), kv);
        }
        if let Some(t) = accept(to_f(&v)) {
            let better = match &best {
                None => true,
                Some(b) => lex_less(&t.tau.values, &b.tau.values),
            };
            if better {
                best = Some(t);
            }
        }
        let mut pos = 0;
        loop {
            if pos == counter.len() {
                return best.ok_or(CoquasiError::NoSolution);
            }
            counter[pos] += 1;
            if counter[pos] < range.len() {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
    }
}

fn lex_less(a: &[Scalar], b: &[Scalar]) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.lex_cmp(y) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// H_τ: deformed multiplication, reassociator, α and β; Δ, ε, unit and S unchanged.
pub fn twist_bialgebra(hq: &CoquasiHopf, t: &Twist) -> CoquasiHopf {
    let h = &hq.base;
    let d = h.dim();
    let tau = &t.tau;
    let ti = &t.tau_inv;
    let algebra = Algebra::from_fn(h.space().clone(), h.one(), |i, j| {
        let mut v = Vector::zeros(d);
        for (hi, x) in h.legs(i, 3).iter() {
            for (gi, y) in h.legs(j, 3).iter() {
                let c = tau.get(&[hi[0], gi[0]]) * ti.get(&[hi[2], gi[2]]);
                if !c.is_zero() {
                    v.axpy(&(&(x * y) * &c), &h.m(hi[1], gi[1]));
                }
            }
        }
        v
    });
    let omega = Functional::from_fn(d, 3, |ix| {
        let mut acc = Scalar::zero();
        for (hi, x) in h.legs(ix[0], 4).iter() {
            for (gi, y) in h.legs(ix[1], 5).iter() {
                for (ki, z) in h.legs(ix[2], 4).iter() {
                    let a = tau.get(&[gi[0], ki[0]]);
                    if a.is_zero() {
                        continue;
                    }
                    let b = tau.eval(&[&h.e(hi[0]), &h.m(gi[1], ki[1])]);
                    let w = h.omega.get(&[hi[1], gi[2], ki[2]]);
                    let c = ti.eval(&[&h.m(hi[2], gi[3]), &h.e(ki[3])]);
                    let e = ti.get(&[hi[3], gi[4]]);
                    let coef = &(x * y) * z;
                    acc = &acc + &(&coef * &(&(&(a * &b) * w) * &(&c * e)));
                }
            }
        }
        acc
    });
    let omega_inv = invert_functional(&omega, &h.coalgebra).expect("twisted reassociator is invertible");
    let base = CoquasiBialgebra { coalgebra: h.coalgebra.clone(), algebra, omega, omega_inv };
    let alpha = Functional::from_fn(d, 1, |ix| {
        let mut acc = Scalar::zero();
        for (l, x) in h.legs(ix[0], 3).iter() {
            let a = hq.alpha_at(l[1]);
            if !a.is_zero() {
                acc = &acc + &(&(x * a) * &ti.eval(&[&hq.s(l[0]), &h.e(l[2])]));
            }
        }
        acc
    });
    let beta = Functional::from_fn(d, 1, |ix| {
        let mut acc = Scalar::zero();
        for (l, x) in h.legs(ix[0], 3).iter() {
            let b = hq.beta_at(l[1]);
            if !b.is_zero() {
                acc = &acc + &(&(x * b) * &tau.eval(&[&h.e(l[0]), &hq.s(l[2])]));
            }
        }
        acc
    });
    CoquasiHopf { base, antipode: hq.antipode.clone(), alpha, beta, twist_f: None }
}

/// Finite-dimensional quasi-bialgebra: associative algebra, multiplicative Δ, reassociator Φ.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiBialgebra {
    pub algebra: Algebra,
    pub coalgebra: Coalgebra,
    /// Φ ∈ A⊗A⊗A, row-major coordinates.
    pub phi: Vec<Scalar>,
}

/// Linear dual of a finite-dimensional quasi-bialgebra, in the dual basis.
pub fn dualize(q: &QuasiBialgebra) -> Result<CoquasiBialgebra, CoquasiError> {
    let d = q.algebra.dim();
    let space = q.algebra.space.clone();
    let comult = (0..d)
        .map(|k| {
            let mut terms = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    for (t, c) in q.algebra.product_terms(i, j) {
                        if *t == k {
                            terms.push((i, j, c.clone()));
                        }
                    }
                }
            }
            terms
        })
        .collect();
    let coalgebra = Coalgebra::new(space.clone(), comult, q.algebra.unit.0.clone());
    let unit = Vector(q.coalgebra.counit_values().to_vec());
    let algebra = Algebra::from_fn(space, unit, |i, j| {
        let mut v = Vector::zeros(d);
        for k in 0..d {
            for (a, b, c) in q.coalgebra.comult(k) {
                if *a == i && *b == j {
                    v.add_at(k, c);
                }
            }
        }
        v
    });
    let omega = Functional { dim: d, arity: 3, values: q.phi.clone() };
    CoquasiBialgebra::new(coalgebra, algebra, omega)
}

/// The regular actions of H* on H and the weak actions of H on H*.
pub struct RegularActions<'a> {
    pub h: &'a CoquasiBialgebra,
}

impl<'a> RegularActions<'a> {
    pub fn new(h: &'a CoquasiBialgebra) -> Self {
        RegularActions { h }
    }

    /// h* ⇀ h = h₁ h*(h₂)
    pub fn star_left(&self, hs: &Functional, v: &Vector) -> Vector {
        let mut out = Vector::zeros(self.h.dim());
        for (l, c) in self.h.coalgebra.sweedler_vec(v, 2) {
            out.add_at(l[0], &(&c * hs.get(&[l[1]])));
        }
        out
    }

    /// h ↼ h* = h*(h₁) h₂
    pub fn star_right(&self, v: &Vector, hs: &Functional) -> Vector {
        let mut out = Vector::zeros(self.h.dim());
        for (l, c) in self.h.coalgebra.sweedler_vec(v, 2) {
            out.add_at(l[1], &(&c * hs.get(&[l[0]])));
        }
        out
    }

    /// (h ⇀ h*)(g) = h*(g h)
    pub fn weak_left(&self, v: &Vector, hs: &Functional) -> Functional {
        Functional::from_fn(self.h.dim(), 1, |ix| hs.eval(&[&self.h.mul(&self.h.e(ix[0]), v)]))
    }

    /// (h* ↼ h)(g) = h*(h g)
    pub fn weak_right(&self, hs: &Functional, v: &Vector) -> Functional {
        Functional::from_fn(self.h.dim(), 1, |ix| hs.eval(&[&self.h.mul(v, &self.h.e(ix[0]))]))
    }
}
