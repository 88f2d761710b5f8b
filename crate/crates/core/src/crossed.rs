//! Crossed systems (R, ·, σ) over a coquasi-Hopf algebra, the crossed product
//! R#̄σH, its deformations, equivalence of crossed products, and the regular
//! examples (Heisenberg double, the ⊛-algebra on Hom(H, A)).

use std::sync::Arc;

use thiserror::Error;

use crate::comodule::{check_comodule_algebra, ComoduleAlgebra};
use crate::coquasi::{twist_bialgebra, CoquasiHopf, Twist};
use crate::linear::{
    check_vec, convolution_inverse, convolution_product, convolution_unit, invert_vmap, Algebra, LinearError, Space,
    VMap, Vector,
};
use crate::report::Report;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CrossedError {
    #[error("crossed system fails: {}", .0.failed_identities().join(", "))]
    InvalidSystem(Box<Report>),
    #[error("cocycle is not convolution invertible: {0}")]
    NotInvertible(String),
    #[error("crossed system carries no cocycle inverse")]
    MissingSigmaInverse,
    #[error("map is not convolution invertible: {0}")]
    Witness(String),
}

/// An associative algebra R with a weak H-action and an R-valued 2-cochain σ.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedSystem {
    pub r: Algebra,
    pub host: Arc<CoquasiHopf>,
    /// `action[h * dim R + s]` = e_h · e_s.
    pub action: Vec<Vector>,
    pub sigma: VMap,
    pub sigma_inv: Option<VMap>,
}

impl CrossedSystem {
    pub fn new(r: Algebra, host: Arc<CoquasiHopf>, action: Vec<Vector>, sigma: VMap) -> CrossedSystem {
        assert_eq!(action.len(), host.dim() * r.dim());
        assert_eq!(sigma.arity, 2);
        CrossedSystem { r, host, action, sigma, sigma_inv: None }
    }

    /// h·r = ε(h)r.
    pub fn trivial_action(r: &Algebra, host: &CoquasiHopf) -> Vec<Vector> {
        let dr = r.dim();
        (0..host.dim() * dr).map(|k| r.basis(k % dr).scale(host.base.eps(k / dr))).collect()
    }

    /// σ(h,g) = ε(h)ε(g)1_R.
    pub fn trivial_sigma(r: &Algebra, host: &CoquasiHopf) -> VMap {
        VMap::unit(&host.base.coalgebra, 2, r)
    }

    pub fn dim_r(&self) -> usize {
        self.r.dim()
    }

    pub fn dim_h(&self) -> usize {
        self.host.dim()
    }

    pub fn act_basis(&self, h: usize, s: usize) -> &Vector {
        &self.action[h * self.r.dim() + s]
    }

    /// h·r for arbitrary h ∈ H, r ∈ R.
    pub fn act(&self, h: &Vector, r: &Vector) -> Vector {
        let mut out = self.r.zero();
        for (i, x) in h.nonzeros() {
            for (j, y) in r.nonzeros() {
                out.axpy(&x.mul_ref(y), self.act_basis(i, j));
            }
        }
        out
    }

    pub fn sig(&self, h: usize, g: usize) -> &Vector {
        self.sigma.get(&[h, g])
    }

    pub fn sig_v(&self, h: &Vector, g: &Vector) -> Vector {
        self.sigma.eval(&[h, g])
    }

    pub fn sig_inv(&self) -> Option<&VMap> {
        self.sigma_inv.as_ref()
    }

    pub fn with_sigma_inverse(mut self, inv: VMap) -> CrossedSystem {
        self.sigma_inv = Some(inv);
        self
    }
}

pub fn check_crossed_system(cs: &CrossedSystem) -> Report {
    let mut rep = Report::new("crossed system");
    let hq = &cs.host;
    let h = &hq.base;
    let dh = h.dim();
    let dr = cs.dim_r();
    let r = &cs.r;
    let rs = &r.space;
    let hl = |i: usize| h.label(i);

    let c = rep.begin("base-algebra-associative");
    r.check_associative(c);
    r.check_unit(c);

    let c = rep.begin("weak-action-multiplicative");
    for i in 0..dh {
        for a in 0..dr {
            for b in 0..dr {
                let lhs = cs.act(&h.e(i), &r.product_basis(a, b));
                let mut rhs = r.zero();
                for (u, v, x) in h.coalgebra.comult(i) {
                    rhs.axpy(x, &r.mul(cs.act_basis(*u, a), cs.act_basis(*v, b)));
                }
                check_vec(c, &[hl(i), rs.label(a), rs.label(b)], rs, &lhs, &rhs);
            }
        }
    }

    let c = rep.begin("weak-action-unit");
    for i in 0..dh {
        check_vec(c, &[hl(i)], rs, &cs.act(&h.e(i), &r.one()), &r.one().scale(h.eps(i)));
    }

    let c = rep.begin("action-unit");
    for a in 0..dr {
        check_vec(c, &[rs.label(a)], rs, &cs.act(&h.one(), &r.basis(a)), &r.basis(a));
    }

    let c = rep.begin("twisted-module");
    for i in 0..dh {
        for j in 0..dh {
            for a in 0..dr {
                let mut lhs = r.zero();
                let mut rhs = r.zero();
                for (u1, u2, x) in h.coalgebra.comult(i) {
                    for (v1, v2, y) in h.coalgebra.comult(j) {
                        let xy = x.mul_ref(y);
                        let inner = cs.act(&h.e(*u1), cs.act_basis(*v1, a));
                        lhs.axpy(&xy, &r.mul(&inner, cs.sig(*u2, *v2)));
                        let outer = cs.act(&h.m(*u2, *v2), &r.basis(a));
                        rhs.axpy(&xy, &r.mul(cs.sig(*u1, *v1), &outer));
                    }
                }
                check_vec(c, &[hl(i), hl(j), rs.label(a)], rs, &lhs, &rhs);
            }
        }
    }

    let c = rep.begin("cocycle-normalized");
    let one = h.one();
    for i in 0..dh {
        let e = r.one().scale(h.eps(i));
        check_vec(c, &[hl(i), "1"], rs, &cs.sig_v(&h.e(i), &one), &e);
        check_vec(c, &["1", hl(i)], rs, &cs.sig_v(&one, &h.e(i)), &e);
    }

    let c = rep.begin("cocycle-condition");
    for i in 0..dh {
        for j in 0..dh {
            for k in 0..dh {
                let (lhs, rhs) = cocycle_sides(cs, i, j, k);
                check_vec(c, &[hl(i), hl(j), hl(k)], rs, &lhs, &rhs);
            }
        }
    }

    if let Some(inv) = &cs.sigma_inv {
        let c = rep.begin("cocycle-inverse");
        let unit = VMap::unit(&h.coalgebra, 2, r);
        let t = h.coalgebra.tensor_power(2);
        let a = convolution_product(&cs.sigma.values, &inv.values, &t, r);
        let b = convolution_product(&inv.values, &cs.sigma.values, &t, r);
        for k in 0..dh * dh {
            let w = [hl(k / dh), hl(k % dh)];
            check_vec(c, &w, rs, &a[k], &unit.values[k]);
            check_vec(c, &w, rs, &b[k], &unit.values[k]);
        }
        let c = rep.begin("action-on-cocycle-inverse");
        for i in 0..dh {
            for j in 0..dh {
                for k in 0..dh {
                    let lhs = cs.act(&h.e(i), inv.get(&[j, k]));
                    let rhs = action_on_inverse_rhs(cs, inv, i, j, k);
                    check_vec(c, &[hl(i), hl(j), hl(k)], rs, &lhs, &rhs);
                }
            }
        }
    }
    rep
}

/// Both sides of [h₁·σ(g₁,l₁)]σ(h₂,g₂l₂) = σ(h₁,g₁)σ(h₂g₂,l₁)ω⁻¹(h₃,g₃,l₂).
fn cocycle_sides(cs: &CrossedSystem, i: usize, j: usize, k: usize) -> (Vector, Vector) {
    let h = &cs.host.base;
    let r = &cs.r;
    let mut lhs = r.zero();
    for (u1, u2, x) in h.coalgebra.comult(i) {
        for (v1, v2, y) in h.coalgebra.comult(j) {
            for (w1, w2, z) in h.coalgebra.comult(k) {
                let coef = x.mul_ref(y).mul_ref(z);
                let left = cs.act(&h.e(*u1), cs.sig(*v1, *w1));
                let right = cs.sig_v(&h.e(*u2), &h.m(*v2, *w2));
                lhs.axpy(&coef, &r.mul(&left, &right));
            }
        }
    }
    let mut rhs = r.zero();
    let lh = h.legs(i, 3);
    let lg = h.legs(j, 3);
    for (a, x) in lh.iter() {
        for (b, y) in lg.iter() {
            for (w1, w2, z) in h.coalgebra.comult(k) {
                let wi = h.omega_inv.get(&[a[2], b[2], *w2]);
                if wi.is_zero() {
                    continue;
                }
                let coef = x.mul_ref(y).mul_ref(z).mul_ref(wi);
                let s2 = cs.sig_v(&h.m(a[1], b[1]), &h.e(*w1));
                rhs.axpy(&coef, &r.mul(cs.sig(a[0], b[0]), &s2));
            }
        }
    }
    (lhs, rhs)
}

/// σ(h₁,g₁l₁)ω(h₂,g₂,l₂)σ⁻¹(h₃g₃,l₃)σ⁻¹(h₄,g₄).
fn action_on_inverse_rhs(cs: &CrossedSystem, inv: &VMap, i: usize, j: usize, k: usize) -> Vector {
    let h = &cs.host.base;
    let r = &cs.r;
    let mut out = r.zero();
    let lh = h.legs(i, 4);
    let lg = h.legs(j, 4);
    let ll = h.legs(k, 3);
    for (a, x) in lh.iter() {
        for (b, y) in lg.iter() {
            for (c, z) in ll.iter() {
                let w = h.omega.get(&[a[1], b[1], c[1]]);
                if w.is_zero() {
                    continue;
                }
                let coef = x.mul_ref(y).mul_ref(z).mul_ref(w);
                let s1 = cs.sig_v(&h.e(a[0]), &h.m(b[0], c[0]));
                let s2 = inv.eval(&[&h.m(a[2], b[2]), &h.e(c[2])]);
                let s3 = inv.get(&[a[3], b[3]]);
                out.axpy(&coef, &r.mul(&r.mul(&s1, &s2), s3));
            }
        }
    }
    out
}

/// The crossed product R#̄σH as a comodule algebra, with its defining system.
#[derive(Clone, Debug)]
pub struct CrossedProduct {
    pub algebra: Arc<ComoduleAlgebra>,
    pub system: CrossedSystem,
}

impl CrossedProduct {
    /// The element r#̄h.
    pub fn element(&self, r: &Vector, h: &Vector) -> Vector {
        tensor(r, h)
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }
}

/// r⊗h with index r * dim H + h.
pub fn tensor(r: &Vector, h: &Vector) -> Vector {
    let dh = h.dim();
    let mut out = Vector::zeros(r.dim() * dh);
    for (i, x) in r.nonzeros() {
        for (j, y) in h.nonzeros() {
            out.0[i * dh + j] = x.mul_ref(y);
        }
    }
    out
}

/// (r#̄h)(s#̄g) = r(h₁·s)σ(h₂,g₁)#̄h₃g₂ with coaction I⊗Δ, without checking the system.
pub fn crossed_product_unchecked(cs: &CrossedSystem) -> ComoduleAlgebra {
    let hq = &cs.host;
    let h = &hq.base;
    let dh = h.dim();
    let dr = cs.dim_r();
    let r = &cs.r;
    let space = r.space.tensor(h.space(), "#");
    let unit = tensor(&r.one(), &h.one());
    let d = dr * dh;
    // r(h₁·s)σ(h₂,g₁)⊗h₃g₂ depends on (h, s, g); r multiplies on the left
    let mut core: Vec<Vector> = Vec::with_capacity(dh * dr * dh);
    for hi in 0..dh {
        let lh = h.legs(hi, 3);
        for s in 0..dr {
            for gi in 0..dh {
                let mut v = Vector::zeros(d);
                for (a, x) in lh.iter() {
                    let hs = cs.act_basis(a[0], s);
                    if hs.is_zero() {
                        continue;
                    }
                    for (g1, g2, y) in h.coalgebra.comult(gi) {
                        let rv = r.mul(hs, cs.sig(a[1], *g1));
                        let hg = h.m(a[2], *g2);
                        let coef = x.mul_ref(y);
                        for (p, m) in rv.nonzeros() {
                            for (q, n) in hg.nonzeros() {
                                v.add_at(p * dh + q, &coef.mul_ref(&m.mul_ref(n)));
                            }
                        }
                    }
                }
                core.push(v);
            }
        }
    }
    let algebra = Algebra::from_fn(space, unit, |i, j| {
        let (ri, hi) = (i / dh, i % dh);
        let (sj, gj) = (j / dh, j % dh);
        let c = &core[(hi * dr + sj) * dh + gj];
        let mut out = Vector::zeros(d);
        for (k, x) in c.nonzeros() {
            let (p, q) = (k / dh, k % dh);
            for (t, y) in r.product_terms(ri, p) {
                out.add_at(t * dh + q, &x.mul_ref(y));
            }
        }
        out
    });
    let coaction = (0..d)
        .map(|i| {
            let (ri, hi) = (i / dh, i % dh);
            h.coalgebra.comult(hi).iter().map(|(a, b, c)| (ri * dh + a, *b, c.clone())).collect()
        })
        .collect();
    ComoduleAlgebra::new(algebra, coaction, cs.host.clone())
}

pub fn build_crossed_product(cs: &CrossedSystem) -> Result<CrossedProduct, CrossedError> {
    let rep = check_crossed_system(cs);
    if !rep.passed() {
        return Err(CrossedError::InvalidSystem(Box::new(rep)));
    }
    Ok(CrossedProduct { algebra: Arc::new(crossed_product_unchecked(cs)), system: cs.clone() })
}

/// Fills σ⁻¹ by convolution inversion in Hom(H⊗H, R).
pub fn sigma_inverse(cs: &CrossedSystem) -> Result<CrossedSystem, CrossedError> {
    let inv = invert_vmap(&cs.sigma, &cs.host.base.coalgebra, &cs.r)
        .map_err(|e| CrossedError::NotInvertible(e.to_string()))?;
    Ok(cs.clone().with_sigma_inverse(inv))
}

/// A scalar functional as an R-valued map h ↦ f(h)1_R.
fn lift_functional(f: &crate::linear::Functional, r: &Algebra) -> VMap {
    VMap { dim: f.dim, arity: f.arity, values: f.values.iter().map(|s| r.one().scale(s)).collect() }
}

/// (R, ·, στ⁻¹) over H_τ.
pub fn twist_crossed_system(cs: &CrossedSystem, t: &Twist) -> CrossedSystem {
    let c = &cs.host.base.coalgebra;
    let tau_inv = lift_functional(&t.tau_inv, &cs.r);
    let tau = lift_functional(&t.tau, &cs.r);
    let sigma = crate::linear::convolve_vmaps(&cs.sigma, &tau_inv, c, &cs.r);
    let sigma_inv = cs.sigma_inv.as_ref().map(|inv| crate::linear::convolve_vmaps(&tau, inv, c, &cs.r));
    CrossedSystem {
        r: cs.r.clone(),
        host: Arc::new(twist_bialgebra(&cs.host, t)),
        action: cs.action.clone(),
        sigma,
        sigma_inv,
    }
}

/// A convolution-invertible map 𝔞: H → R, stored by its values on the basis of H.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceWitness {
    pub a: Vec<Vector>,
    pub a_inv: Vec<Vector>,
}

impl EquivalenceWitness {
    pub fn new(a: Vec<Vector>, host: &CoquasiHopf, r: &Algebra) -> Result<EquivalenceWitness, CrossedError> {
        let a_inv =
            convolution_inverse(&a, &host.base.coalgebra, r).map_err(|e| CrossedError::Witness(e.to_string()))?;
        Ok(EquivalenceWitness { a, a_inv })
    }

    pub fn unit(host: &CoquasiHopf, r: &Algebra) -> EquivalenceWitness {
        let u = convolution_unit(&host.base.coalgebra, r);
        EquivalenceWitness { a: u.clone(), a_inv: u }
    }

    pub fn inverse(&self) -> EquivalenceWitness {
        EquivalenceWitness { a: self.a_inv.clone(), a_inv: self.a.clone() }
    }

    fn eval(values: &[Vector], v: &Vector, dr: usize) -> Vector {
        let mut out = Vector::zeros(dr);
        for (i, x) in v.nonzeros() {
            out.axpy(x, &values[i]);
        }
        out
    }
}

/// h·_𝔞 r = 𝔞⁻¹(h₁)(h₂·r)𝔞(h₃).
pub fn deformed_action(cs: &CrossedSystem, w: &EquivalenceWitness) -> Vec<Vector> {
    let h = &cs.host.base;
    let dr = cs.dim_r();
    let r = &cs.r;
    let mut out = Vec::with_capacity(h.dim() * dr);
    for i in 0..h.dim() {
        let l = h.legs(i, 3);
        for s in 0..dr {
            let mut v = r.zero();
            for (ix, x) in l.iter() {
                let mid = cs.act_basis(ix[1], s);
                if mid.is_zero() {
                    continue;
                }
                v.axpy(x, &r.mul(&r.mul(&w.a_inv[ix[0]], mid), &w.a[ix[2]]));
            }
            out.push(v);
        }
    }
    out
}

/// σ_𝔞(h,g) = 𝔞⁻¹(h₁)[h₂·𝔞⁻¹(g₁)]σ(h₃,g₂)𝔞(h₄g₃).
pub fn deformed_sigma(cs: &CrossedSystem, w: &EquivalenceWitness) -> VMap {
    let h = &cs.host.base;
    let dr = cs.dim_r();
    let r = &cs.r;
    VMap::from_fn(h.dim(), 2, |ix| {
        let mut v = r.zero();
        for (a, x) in h.legs(ix[0], 4).iter() {
            for (b, y) in h.legs(ix[1], 3).iter() {
                let coef = x.mul_ref(y);
                let t1 = cs.act(&h.e(a[1]), &w.a_inv[b[0]]);
                let t2 = EquivalenceWitness::eval(&w.a, &h.m(a[3], b[2]), dr);
                let p = r.mul(&r.mul(&r.mul(&w.a_inv[a[0]], &t1), cs.sig(a[2], b[1])), &t2);
                v.axpy(&coef, &p);
            }
        }
        v
    })
}

/// (R, ·_𝔞, σ_𝔞); σ_𝔞⁻¹ is recomputed when the input carries σ⁻¹.
pub fn deform_by_a(cs: &CrossedSystem, w: &EquivalenceWitness) -> CrossedSystem {
    let action = deformed_action(cs, w);
    let sigma = deformed_sigma(cs, w);
    let mut out = CrossedSystem { r: cs.r.clone(), host: cs.host.clone(), action, sigma, sigma_inv: None };
    if cs.sigma_inv.is_some() {
        if let Ok(inv) = invert_vmap(&out.sigma, &cs.host.base.coalgebra, &cs.r) {
            out.sigma_inv = Some(inv);
        }
    }
    out
}

/// θ(r#̄h) = r𝔞(h₁)#̄h₂ as a matrix on R⊗H.
pub fn theta_matrix(cs: &CrossedSystem, w: &EquivalenceWitness) -> crate::linear::Matrix {
    let h = &cs.host.base;
    let dh = h.dim();
    let dr = cs.dim_r();
    let cols: Vec<Vector> = (0..dr * dh)
        .map(|k| {
            let (ri, hi) = (k / dh, k % dh);
            let mut v = Vector::zeros(dr * dh);
            for (a, b, x) in h.coalgebra.comult(hi) {
                let ra = cs.r.mul(&cs.r.basis(ri), &w.a[*a]);
                for (p, y) in ra.nonzeros() {
                    v.add_at(p * dh + b, &x.mul_ref(y));
                }
            }
            v
        })
        .collect();
    crate::linear::Matrix::from_columns(dr * dh, &cols)
}

/// θ is a unital, multiplicative, colinear bijection between the two crossed products.
pub fn check_theta(cs1: &CrossedSystem, cs2: &CrossedSystem, w: &EquivalenceWitness) -> Report {
    let mut rep = Report::new("crossed product isomorphism");
    let a1 = crossed_product_unchecked(cs1);
    let a2 = crossed_product_unchecked(cs2);
    let th = theta_matrix(cs1, w);
    let d = a1.dim();
    let dh = cs1.dim_h();
    let sp = a2.space().clone();
    let c = rep.begin("theta-multiplicative");
    for i in 0..d {
        let ti = th.column(i);
        for j in 0..d {
            let lhs = th.apply(&a1.algebra.product_basis(i, j));
            let rhs = a2.mul(&ti, &th.column(j));
            check_vec(c, &[a1.label(i), a1.label(j)], &sp, &lhs, &rhs);
        }
    }
    let c = rep.begin("theta-unital");
    check_vec(c, &["1"], &sp, &th.apply(&a1.one()), &a2.one());
    let c = rep.begin("theta-colinear");
    let spt = sp.tensor(cs1.host.base.space(), "⊗");
    for i in 0..d {
        let lhs = a2.coact_vec(&th.column(i));
        let mut rhs = Vector::zeros(d * dh);
        for (a, x, s) in a1.coact(i) {
            for (p, t) in th.column(*a).nonzeros() {
                rhs.add_at(p * dh + x, &s.mul_ref(t));
            }
        }
        check_vec(c, &[a1.label(i)], &spt, &lhs, &rhs);
    }
    let c = rep.begin("theta-bijective");
    c.record(&["rank"], th.rank() == d, format!("rank {}", th.rank()), format!("rank {d}"));
    rep
}

/// Checks conditions (2) and (3) relating two systems through 𝔞.
pub fn check_equivalence_witness(cs1: &CrossedSystem, cs2: &CrossedSystem, w: &EquivalenceWitness) -> Report {
    let mut rep = Report::new("equivalence witness");
    let h = &cs1.host.base;
    let rs = &cs1.r.space;
    let dh = h.dim();
    let dr = cs1.dim_r();
    let c = rep.begin("witness-invertible");
    let t = convolution_product(&w.a, &w.a_inv, &h.coalgebra, &cs1.r);
    let u = convolution_product(&w.a_inv, &w.a, &h.coalgebra, &cs1.r);
    let unit = convolution_unit(&h.coalgebra, &cs1.r);
    for i in 0..dh {
        check_vec(c, &[h.label(i), "left"], rs, &t[i], &unit[i]);
        check_vec(c, &[h.label(i), "right"], rs, &u[i], &unit[i]);
    }
    let c = rep.begin("witness-action");
    let act = deformed_action(cs1, w);
    for k in 0..dh * dr {
        check_vec(c, &[h.label(k / dr), rs.label(k % dr)], rs, &act[k], &cs2.action[k]);
    }
    let c = rep.begin("witness-cocycle");
    let sig = deformed_sigma(cs1, w);
    for k in 0..dh * dh {
        check_vec(c, &[h.label(k / dh), h.label(k % dh)], rs, &sig.values[k], &cs2.sigma.values[k]);
    }
    rep
}

#[derive(Clone, Debug, PartialEq)]
pub enum Equivalence {
    Equivalent(EquivalenceWitness),
    /// `solver_incomplete` is false only when the search space was exhausted exactly.
    NotEquivalent { solver_incomplete: bool },
}

/// Search limits for [`equivalent_crossed_products`].
#[derive(Clone, Copy, Debug)]
pub struct SearchBound {
    /// Integer coordinates range over [−coefficient, coefficient].
    pub coefficient: i64,
    pub max_candidates: usize,
}

impl Default for SearchBound {
    fn default() -> Self {
        SearchBound { coefficient: 2, max_candidates: 20_000 }
    }
}

/// Finds 𝔞 with 𝔞(1) = 1 relating the two systems.
///
/// The action condition is linear in 𝔞 after multiplying by 𝔞 on the left:
/// 𝔞(h₁)(h₂·₂r) = (h₁·₁r)𝔞(h₂). The affine solution space is searched over
/// integer coordinates, filtering by the multiplicativity of θ, which is
/// equivalent to the cocycle condition and needs no inverse.
pub fn equivalent_crossed_products(cs1: &CrossedSystem, cs2: &CrossedSystem, bound: SearchBound) -> Equivalence {
    let h = &cs1.host.base;
    let r = &cs1.r;
    let dh = h.dim();
    let dr = r.dim();
    let n = dh * dr;
    let mut rows: Vec<Vector> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    // unknown 𝔞(e_i) coordinate p at index i * dr + p
    for i in 0..dh {
        for s in 0..dr {
            let mut eqs = vec![Vector::zeros(n); dr];
            for (u, v, x) in h.coalgebra.comult(i) {
                // 𝔞(u)(v·₂ s)
                let right = cs2.act_basis(*v, s);
                for p in 0..dr {
                    let prod = r.mul(&r.basis(p), right);
                    for (q, y) in prod.nonzeros() {
                        eqs[q].add_at(u * dr + p, &x.mul_ref(y));
                    }
                }
                // −(u·₁ s)𝔞(v)
                let left = cs1.act_basis(*u, s);
                for p in 0..dr {
                    let prod = r.mul(left, &r.basis(p));
                    for (q, y) in prod.nonzeros() {
                        eqs[q].add_at(v * dr + p, &x.mul_ref(y).neg_ref());
                    }
                }
            }
            for e in eqs {
                rows.push(e);
                rhs.push(Scalar::zero());
            }
        }
    }
    // 𝔞(1_H) = 1_R
    let one = h.one();
    for q in 0..dr {
        let mut e = Vector::zeros(n);
        for (i, x) in one.nonzeros() {
            e.add_at(i * dr + q, x);
        }
        rows.push(e);
        rhs.push(r.one().0[q].clone());
    }
    let m = crate::linear::Matrix::from_rows(n, &rows);
    let Some((x0, kernel)) = m.solve_affine(&Vector(rhs)) else {
        return Equivalence::NotEquivalent { solver_incomplete: false };
    };
    let k = kernel.len();
    let width = (2 * bound.coefficient + 1) as usize;
    let total = width.checked_pow(k as u32).unwrap_or(usize::MAX);
    let exhaustive = k == 0;
    let limit = total.min(bound.max_candidates);
    let split = |v: &Vector| -> Vec<Vector> { (0..dh).map(|i| Vector(v.0[i * dr..(i + 1) * dr].to_vec())).collect() };
    for coeffs in small_vectors(k, bound.coefficient).take(limit) {
        let mut v = x0.clone();
        for (c, kv) in coeffs.iter().zip(&kernel) {
            if *c != 0 {
                v.axpy(&Scalar::from_i64(*c), kv);
            }
        }
        let a = split(&v);
        if !theta_multiplicative(cs1, cs2, &a) {
            continue;
        }
        let Ok(w) = EquivalenceWitness::new(a, &cs1.host, r) else { continue };
        if check_equivalence_witness(cs1, cs2, &w).passed() {
            return Equivalence::Equivalent(w);
        }
    }
    Equivalence::NotEquivalent { solver_incomplete: !exhaustive }
}

/// σ₁(h₁,g₁)𝔞(h₂g₂) = 𝔞(h₁)(h₂·₂𝔞(g₁))σ₂(h₃,g₂) on all basis pairs.
fn theta_multiplicative(cs1: &CrossedSystem, cs2: &CrossedSystem, a: &[Vector]) -> bool {
    let h = &cs1.host.base;
    let r = &cs1.r;
    let dr = r.dim();
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            let mut lhs = r.zero();
            for (u1, u2, x) in h.coalgebra.comult(i) {
                for (v1, v2, y) in h.coalgebra.comult(j) {
                    let av = EquivalenceWitness::eval(a, &h.m(*u2, *v2), dr);
                    lhs.axpy(&x.mul_ref(y), &r.mul(cs1.sig(*u1, *v1), &av));
                }
            }
            let mut rhs = r.zero();
            for (l, x) in h.legs(i, 3).iter() {
                for (v1, v2, y) in h.coalgebra.comult(j) {
                    let mid = cs2.act(&h.e(l[1]), &a[*v1]);
                    rhs.axpy(&x.mul_ref(y), &r.mul(&r.mul(&a[l[0]], &mid), cs2.sig(l[2], *v2)));
                }
            }
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Integer vectors of length k with entries in [−b, b], by increasing max-norm.
pub fn small_vectors(k: usize, b: i64) -> impl Iterator<Item = Vec<i64>> {
    (0..=b).flat_map(move |norm| {
        let width = (2 * norm + 1) as usize;
        let total = if k == 0 { 1 } else { width.checked_pow(k as u32).unwrap_or(usize::MAX) };
        (0..total).filter_map(move |mut idx| {
            let mut v = Vec::with_capacity(k);
            for _ in 0..k {
                v.push((idx % width) as i64 - norm);
                idx /= width;
            }
            let m = v.iter().map(|x| x.abs()).max().unwrap_or(0);
            (m == norm).then_some(v)
        })
    })
}

/// H* with convolution product; basis δ_h dual to the basis of H.
pub fn dual_algebra(hq: &CoquasiHopf) -> Algebra {
    let q = hq.base.dual_quasi();
    let labels: Vec<String> = hq.base.space().labels.iter().map(|l| format!("δ{l}")).collect();
    Algebra::new(Space::new(labels), q.algebra.products(), q.algebra.one())
}

/// H*#̄σH with (h⇀φ)(g) = φ(gh) and σ(h,g)(k) = ω⁻¹(k,h,g).
pub fn heisenberg_system(host: Arc<CoquasiHopf>) -> CrossedSystem {
    let h = &host.base;
    let d = h.dim();
    let r = dual_algebra(&host);
    let mut action = Vec::with_capacity(d * d);
    for hi in 0..d {
        for p in 0..d {
            let v = Vector((0..d).map(|k| h.m(k, hi).0[p].clone()).collect());
            action.push(v);
        }
    }
    let sigma = VMap::from_fn(d, 2, |ix| Vector((0..d).map(|k| h.omega_inv.get(&[k, ix[0], ix[1]]).clone()).collect()));
    CrossedSystem::new(r, host.clone(), action, sigma)
}

pub fn heisenberg_double(host: Arc<CoquasiHopf>) -> Result<CrossedProduct, CrossedError> {
    build_crossed_product(&heisenberg_system(host))
}

/// Hom(H, A) with the ⊛ product and the crossed system built on it.
#[derive(Clone, Debug)]
pub struct CircledastAlgebra {
    /// Basis E_{h,a}: e_h ↦ e_a, index h * dim A + a.
    pub algebra: Algebra,
    pub system: CrossedSystem,
}

/// (φ⊛ψ)(h) = φ(ψ(h₃)₂h₂)₀ψ(h₃)₀ω⁻¹(φ(ψ(h₃)₂h₂)₁, ψ(h₃)₁, h₁).
pub fn circledast_algebra(a: &ComoduleAlgebra) -> CircledastAlgebra {
    let hq = a.host.clone();
    let h = &hq.base;
    let dh = h.dim();
    let da = a.dim();
    let n = dh * da;
    let labels: Vec<String> = (0..n).map(|k| format!("[{}↦{}]", h.label(k / da), a.label(k % da))).collect();
    let space = Space::new(labels);
    let mut unit = Vector::zeros(n);
    for k in 0..dh {
        for (p, x) in a.one().nonzeros() {
            unit.add_at(k * da + p, &x.mul_ref(h.eps(k)));
        }
    }
    let algebra = Algebra::from_fn(space, unit, |phi, psi| {
        let (pp, pa) = (phi / da, phi % da);
        let (qp, qb) = (psi / da, psi % da);
        let mut out = Vector::zeros(n);
        let lb = a.coact_legs(qb, 2);
        let la = a.coact_legs(pa, 1);
        for k in 0..dh {
            for (l, x) in h.legs(k, 3).iter() {
                if l[2] != qp {
                    continue;
                }
                for (b, y) in &lb {
                    let arg = h.m(b[2], l[1]);
                    let coord = &arg.0[pp];
                    if coord.is_zero() {
                        continue;
                    }
                    for (aa, z) in &la {
                        let wi = h.omega_inv.get(&[aa[1], b[1], l[0]]);
                        if wi.is_zero() {
                            continue;
                        }
                        let coef = x.mul_ref(y).mul_ref(z).mul_ref(coord).mul_ref(wi);
                        for (t, s) in a.algebra.product_terms(aa[0], b[0]) {
                            out.add_at(k * da + t, &coef.mul_ref(s));
                        }
                    }
                }
            }
        }
        out
    });
    let mut action = Vec::with_capacity(dh * n);
    for hi in 0..dh {
        for phi in 0..n {
            let (pp, pa) = (phi / da, phi % da);
            let mut v = Vector::zeros(n);
            for k in 0..dh {
                let c = &h.m(k, hi).0[pp];
                if !c.is_zero() {
                    v.add_at(k * da + pa, c);
                }
            }
            action.push(v);
        }
    }
    let one_a = a.one();
    let sigma = VMap::from_fn(dh, 2, |ix| {
        let mut v = Vector::zeros(n);
        for k in 0..dh {
            let w = h.omega_inv.get(&[k, ix[0], ix[1]]);
            for (p, x) in one_a.nonzeros() {
                v.add_at(k * da + p, &w.mul_ref(x));
            }
        }
        v
    });
    let system = CrossedSystem::new(algebra.clone(), hq.clone(), action, sigma);
    CircledastAlgebra { algebra, system }
}

/// Outcome of the base-field obstruction for R = 𝕜.
#[derive(Clone, Debug)]
pub struct BaseFieldObstruction {
    /// Π_j ω(x, x^j, x) for a generator x; equals 1 when ω⁻¹ is a coboundary.
    pub invariant: Option<Scalar>,
    pub obstructed: bool,
    /// Invertible σ tried in the sweep and how many passed the cocycle condition.
    pub tried: usize,
    pub passing: usize,
    pub report: Report,
}

/// Decides whether 𝕜#̄σH can exist for invertible σ on a cyclic grouplike H.
///
/// With R = 𝕜 the weak action is forced to be ε and the cocycle condition
/// reads ω⁻¹ = ∂σ. The product Π_j ω(x,x^j,x) telescopes to 1 on every
/// coboundary, so a value ≠ 1 rules out every invertible σ at once.
/// A finite sweep over σ values then runs the checker itself.
pub fn base_field_obstruction(host: Arc<CoquasiHopf>, values: &[Scalar]) -> BaseFieldObstruction {
    let h = &host.base;
    let d = h.dim();
    let mut report = Report::new("crossed products of the base field");
    let generator = cyclic_generator(&host);
    let invariant = generator.map(|x| {
        let mut acc = Scalar::one();
        let mut pow = h.unit_index().expect("grouplike unit");
        for _ in 0..d {
            acc = acc.mul_ref(h.omega.get(&[x, pow, x]));
            pow = h.m(pow, x).nonzeros().next().map(|(k, _)| k).expect("grouplike product");
        }
        acc
    });
    let obstructed = invariant.as_ref().map_or(false, |v| !v.is_one());
    let r = Algebra::scalars();
    let action = CrossedSystem::trivial_action(&r, &host);
    let unit_idx = h.unit_index().unwrap_or(0);
    let free: Vec<(usize, usize)> =
        (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).filter(|&(i, j)| i != unit_idx && j != unit_idx).collect();
    let mut tried = 0;
    let mut passing = 0;
    let width = values.len();
    let total = width.checked_pow(free.len() as u32).unwrap_or(usize::MAX).min(50_000);
    let c = report.begin("sweep-cocycle-fails");
    for mut idx in 0..total {
        let mut sigma = CrossedSystem::trivial_sigma(&r, &host);
        let mut names = Vec::new();
        for &(i, j) in &free {
            let v = values[idx % width].clone();
            idx /= width;
            names.push(format!("σ({},{})={}", h.label(i), h.label(j), v));
            sigma.set(&[i, j], Vector(vec![v]));
        }
        let cs = CrossedSystem::new(r.clone(), host.clone(), action.clone(), sigma);
        let rep = check_crossed_system(&cs);
        tried += 1;
        let fails = rep.fails("cocycle-condition");
        if !fails {
            passing += 1;
        }
        let w: Vec<&str> = names.iter().map(String::as_str).collect();
        c.record(&w, fails, "cocycle condition holds", "cocycle condition fails");
    }
    let c = report.begin("coboundary-invariant");
    let inv_text = invariant.as_ref().map_or("n/a".to_string(), |v| v.to_string());
    c.record(&["generator"], obstructed, inv_text, "≠ 1");
    if obstructed && passing == 0 {
        report.note("no crossed product of the base field");
    }
    BaseFieldObstruction { invariant, obstructed, tried, passing, report }
}

/// A grouplike x generating H as a cyclic group, if there is one.
fn cyclic_generator(hq: &CoquasiHopf) -> Option<usize> {
    let h = &hq.base;
    if !h.coalgebra.all_grouplike() {
        return None;
    }
    let unit = h.unit_index()?;
    let d = h.dim();
    (0..d).find(|&x| {
        let mut seen = vec![false; d];
        let mut p = unit;
        for _ in 0..d {
            if seen[p] {
                return false;
            }
            seen[p] = true;
            let prod = h.m(p, x);
            let nz: Vec<_> = prod.nonzeros().collect();
            if nz.len() != 1 || !nz[0].1.is_one() {
                return false;
            }
            p = nz[0].0;
        }
        p == unit
    })
}

pub fn check_crossed_product(cp: &CrossedProduct) -> Report {
    check_comodule_algebra(&cp.algebra)
}

impl From<LinearError> for CrossedError {
    fn from(e: LinearError) -> Self {
        CrossedError::NotInvertible(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{group_algebra, h2, h3};
    use crate::comodule::twist_comodule_algebra;
    use crate::scalar::FieldSpec;

    fn r2() -> Algebra {
        Algebra::monomial(Space::new(["1", "t"]), 0, |i, j| ((i + j) % 2, Scalar::one()))
    }

    /// R = k[t]/(t²−1), x·t = −t, σ(x,x) = c·t.
    fn h2_system(c: i64) -> CrossedSystem {
        let host = Arc::new(h2());
        let r = r2();
        let action = vec![r.basis(0), r.basis(1), r.basis(0), r.basis(1).neg()];
        let mut sigma = CrossedSystem::trivial_sigma(&r, &host);
        sigma.set(&[1, 1], r.basis(1).scale(&Scalar::from_i64(c)));
        CrossedSystem::new(r, host, action, sigma)
    }

    fn v(xs: &[i64]) -> Vector {
        Vector(xs.iter().map(|&x| Scalar::from_i64(x)).collect())
    }

    #[test]
    fn h2_fixture_product() {
        let cs = sigma_inverse(&h2_system(1)).unwrap();
        assert_eq!(cs.sigma_inv.as_ref().unwrap().get(&[1, 1]), &v(&[0, 1]));
        let rep = check_crossed_system(&cs);
        assert!(rep.passed(), "{rep}");
        let cp = build_crossed_product(&cs).unwrap();
        assert!(check_crossed_product(&cp).passed());
        let a = cp.element(&v(&[1, 0]), &v(&[0, 1]));
        assert_eq!(cp.algebra.mul(&a, &a), cp.element(&v(&[0, 1]), &v(&[1, 0])));
        let mut rho = Vector::zeros(8);
        rho.add_at(1 * 2 + 1, &Scalar::one());
        assert_eq!(cp.algebra.coact_vec(&a), rho);
        assert_eq!(cp.algebra.label(3), "t#x");
    }

    #[test]
    fn base_field_over_h2_fails_cocycle() {
        let host = Arc::new(h2());
        let r = Algebra::scalars();
        let action = CrossedSystem::trivial_action(&r, &host);
        let sigma = CrossedSystem::trivial_sigma(&r, &host);
        let err = build_crossed_product(&CrossedSystem::new(r, host, action, sigma)).unwrap_err();
        let CrossedError::InvalidSystem(rep) = err else { panic!() };
        assert_eq!(rep.failed_identities(), vec!["cocycle-condition"]);
    }

    #[test]
    fn deformation_by_t_negates_cocycle() {
        let cs = sigma_inverse(&h2_system(1)).unwrap();
        let w = EquivalenceWitness::new(vec![v(&[1, 0]), v(&[0, 1])], &cs.host, &cs.r).unwrap();
        let d = deform_by_a(&cs, &w);
        assert_eq!(d.sigma.get(&[1, 1]), &v(&[0, -1]));
        assert_eq!(d.action, cs.action);
        assert!(check_crossed_system(&d).passed());
        assert!(check_theta(&cs, &d, &w).passed());
        assert!(check_equivalence_witness(&cs, &d, &w).passed());
        match equivalent_crossed_products(&cs, &d, SearchBound::default()) {
            Equivalence::Equivalent(found) => assert!(check_theta(&cs, &d, &found).passed()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn different_actions_are_not_equivalent() {
        // identical cocycles but opposite actions on t cannot be related by an invertible 𝔞
        let cs = h2_system(1);
        let mut other = h2_system(1);
        other.action[3] = other.r.basis(1);
        assert_eq!(
            equivalent_crossed_products(&cs, &other, SearchBound::default()),
            Equivalence::NotEquivalent { solver_incomplete: false }
        );
    }

    #[test]
    fn heisenberg_doubles_are_crossed_products() {
        let spec = FieldSpec::cyclotomic(3);
        for host in [group_algebra(2), h2(), h3(spec).unwrap()] {
            let d = host.dim();
            let cp = heisenberg_double(Arc::new(host)).unwrap();
            assert_eq!(cp.dim(), d * d);
            let rep = check_crossed_product(&cp);
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn circledast_over_base_field_is_dual_algebra() {
        let host = Arc::new(h2());
        let k = ComoduleAlgebra::trivial(Algebra::scalars(), host.clone());
        let ca = circledast_algebra(&k);
        let dual = dual_algebra(&host);
        assert_eq!(ca.algebra.products(), dual.products());
        assert_eq!(ca.algebra.one(), dual.one());
        assert!(check_crossed_system(&ca.system).passed());
    }

    #[test]
    fn circledast_of_crossed_product_is_associative() {
        let cp = build_crossed_product(&h2_system(1)).unwrap();
        let ca = circledast_algebra(&cp.algebra);
        assert!(ca.algebra.is_associative());
        // with ω nontrivial and A coacting nontrivially, h·φ = φ(−h) is not a weak action for ⊛
        let rep = check_crossed_system(&ca.system);
        assert_eq!(rep.failed_identities(), vec!["weak-action-multiplicative", "twisted-module"]);
        let w = &rep.get("weak-action-multiplicative").unwrap().failures[0].witness;
        assert_eq!(w, &vec!["x", "[1↦1#x]", "[x↦1#x]"]);
    }

    #[test]
    fn twisting_commutes_with_building() {
        let cs = sigma_inverse(&h2_system(1)).unwrap();
        let t = Twist::grouplike(&cs.host.base.coalgebra, |a, b| {
            if a == 1 && b == 1 { Scalar::from_i64(2) } else { Scalar::one() }
        })
        .unwrap();
        let tcs = twist_crossed_system(&cs, &t);
        assert!(check_crossed_system(&tcs).passed());
        let lhs = build_crossed_product(&tcs).unwrap();
        let rhs = twist_comodule_algebra(&build_crossed_product(&cs).unwrap().algebra, &t);
        assert_eq!(lhs.algebra.algebra, rhs.algebra);
        assert_eq!(lhs.algebra.coaction, rhs.coaction);
        assert_eq!(lhs.algebra.host.base, rhs.host.base);
    }

    #[test]
    fn base_field_obstruction_h2_h3() {
        let spec = FieldSpec::cyclotomic(3);
        let q = crate::catalog::h3_q(spec);
        let vals = vec![Scalar::one(), Scalar::from_i64(-1), Scalar::from_i64(2), Scalar::from_frac(1, 2), q.clone()];
        for host in [h2(), h3(spec).unwrap()] {
            let ob = base_field_obstruction(Arc::new(host), &vals);
            assert!(ob.obstructed);
            assert_eq!(ob.passing, 0);
            assert!(ob.tried > 0);
            assert!(ob.report.passed());
        }
        let ob = base_field_obstruction(Arc::new(group_algebra(3)), &vals);
        assert!(!ob.obstructed);
        assert!(ob.passing > 0);
    }

    #[test]
    fn small_vectors_order() {
        let all: Vec<_> = small_vectors(2, 1).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
    }
}
