//! Cleaving systems, the passage between cleft extensions and crossed products
//! with invertible cocycle, and the Morita context attached to a comodule algebra.

use std::sync::Arc;

use thiserror::Error;

use crate::comodule::{coinvariants, ComoduleAlgebra, Coinvariants};
use crate::coquasi::CoquasiHopf;
use crate::crossed::{crossed_product_unchecked, CrossedProduct, CrossedSystem};
use crate::linear::{check_vec, convolution_inverse, invert_vmap, Matrix, Space, Subspace, VMap, Vector};
use crate::report::Report;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CleftError {
    #[error("invalid cleaving system: {}", .0.failed_identities().join(", "))]
    InvalidCleaving(Box<Report>),
    #[error("crossed system carries no cocycle inverse")]
    MissingSigmaInverse,
    #[error("host has no twist f attached")]
    MissingTwistF,
    #[error("map is not convolution invertible: {0}")]
    NotInvertible(String),
}

/// A pair (γ, δ) of maps H → A given by their values on the basis of H.
#[derive(Clone, Debug)]
pub struct CleavingSystem {
    pub a: Arc<ComoduleAlgebra>,
    pub gamma: Vec<Vector>,
    pub delta: Vec<Vector>,
}

impl CleavingSystem {
    pub fn new(a: Arc<ComoduleAlgebra>, gamma: Vec<Vector>, delta: Vec<Vector>) -> CleavingSystem {
        assert_eq!(gamma.len(), a.host.dim());
        assert_eq!(delta.len(), a.host.dim());
        CleavingSystem { a, gamma, delta }
    }

    pub fn gamma_v(&self, h: &Vector) -> Vector {
        eval_map(&self.gamma, h, self.a.dim())
    }

    pub fn delta_v(&self, h: &Vector) -> Vector {
        eval_map(&self.delta, h, self.a.dim())
    }
}

fn eval_map(values: &[Vector], h: &Vector, d: usize) -> Vector {
    let mut out = Vector::zeros(d);
    for (i, x) in h.nonzeros() {
        out.axpy(x, &values[i]);
    }
    out
}

/// Σ v_i ⊗ w_j into A⊗H, index a * dim H + x.
fn tensor_ah(a: &Vector, h: &Vector) -> Vector {
    crate::crossed::tensor(a, h)
}

pub fn check_cleaving(cs: &CleavingSystem) -> Report {
    let mut rep = Report::new("cleaving system");
    let a = &cs.a;
    let hq = &a.host;
    let h = &hq.base;
    let dh = h.dim();
    let sp = a.space().tensor(h.space(), "⊗");

    let c = rep.begin("cleaving-colinear");
    for i in 0..dh {
        let lhs = a.coact_vec(&cs.gamma[i]);
        let mut rhs = Vector::zeros(a.dim() * dh);
        for (u, v, x) in h.coalgebra.comult(i) {
            rhs.axpy(x, &tensor_ah(&cs.gamma[*u], &h.e(*v)));
        }
        check_vec(c, &[h.label(i)], &sp, &lhs, &rhs);
    }

    let c = rep.begin("inverse-cleaving-coaction");
    for i in 0..dh {
        let lhs = a.coact_vec(&cs.delta[i]);
        let mut rhs = Vector::zeros(a.dim() * dh);
        for (u, v, x) in h.coalgebra.comult(i) {
            rhs.axpy(x, &tensor_ah(&cs.delta[*v], &hq.s(*u)));
        }
        check_vec(c, &[h.label(i)], &sp, &lhs, &rhs);
    }

    let c = rep.begin("delta-gamma-alpha");
    for i in 0..dh {
        let mut lhs = Vector::zeros(a.dim());
        for (u, v, x) in h.coalgebra.comult(i) {
            lhs.axpy(x, &a.mul(&cs.delta[*u], &cs.gamma[*v]));
        }
        check_vec(c, &[h.label(i)], a.space(), &lhs, &a.one().scale(hq.alpha_at(i)));
    }

    let c = rep.begin("gamma-beta-delta");
    for i in 0..dh {
        let mut lhs = Vector::zeros(a.dim());
        for (l, x) in h.legs(i, 3).iter() {
            let b = hq.beta_at(l[1]);
            if b.is_zero() {
                continue;
            }
            lhs.axpy(&x.mul_ref(b), &a.mul(&cs.gamma[l[0]], &cs.delta[l[2]]));
        }
        check_vec(c, &[h.label(i)], a.space(), &lhs, &a.one().scale(h.eps(i)));
    }

    let c = rep.begin("gamma-unit-invertible");
    let g1 = cs.gamma_v(&h.one());
    let coinv = a.coact_vec(&g1) == tensor_ah(&g1, &h.one());
    let unit = a.algebra.is_unit(&g1);
    c.record(&["1"], coinv && unit, a.space().render(&g1), "an invertible coinvariant");
    rep
}

/// γ̄(h) = γ(h)γ(1)⁻¹ and δ̄(h) = γ(1)δ(h).
pub fn normalize_cleaving(cs: &CleavingSystem) -> Result<CleavingSystem, CleftError> {
    let a = &cs.a;
    let u = cs.gamma_v(&a.host.base.one());
    let ui = a.algebra.inverse(&u).ok_or_else(|| CleftError::NotInvertible("γ(1)".into()))?;
    let gamma = cs.gamma.iter().map(|g| a.mul(g, &ui)).collect();
    let delta = cs.delta.iter().map(|d| a.mul(&u, d)).collect();
    Ok(CleavingSystem { a: a.clone(), gamma, delta })
}

/// The crossed system on B = A^{coH} recovered from a cleaving system.
#[derive(Clone, Debug)]
pub struct CleftCrossed {
    pub system: CrossedSystem,
    pub coinvariants: Coinvariants,
    /// The normalized cleaving system the formulas were evaluated on.
    pub cleaving: CleavingSystem,
    /// ν(b⊗h) = bγ(h) as a matrix B⊗H → A.
    pub nu: Matrix,
    pub report: Report,
}

fn to_b(b: &Coinvariants, v: &Vector, c: &mut crate::report::Check, what: &[&str]) -> Vector {
    match b.coords(v) {
        Some(x) => {
            c.record(what, true, "", "");
            x
        }
        None => {
            c.record(what, false, format!("{v}"), "a coinvariant");
            Vector::zeros(b.dim())
        }
    }
}

/// h·b = γ(h₁)bδ(h₂↼β), σ(h,g) = [γ(h₁)γ(g₁)]δ((h₂g₂)↼β) and
/// σ⁻¹(h,g) = γ(β⇀(h₁g₁))f⁻¹(h₂,g₂)[δ(g₃)δ(h₃)].
pub fn cleft_to_crossed(cs: &CleavingSystem) -> Result<CleftCrossed, CleftError> {
    let rep0 = check_cleaving(cs);
    if !rep0.passed() {
        return Err(CleftError::InvalidCleaving(Box::new(rep0)));
    }
    let hq = cs.a.host.clone();
    let f = hq.twist_f.clone().ok_or(CleftError::MissingTwistF)?;
    let cs = normalize_cleaving(cs)?;
    let a = &cs.a;
    let h = &hq.base;
    let dh = h.dim();
    let da = a.dim();
    let b = coinvariants(a);
    let db = b.dim();
    let mut report = Report::new("cleft to crossed");

    let c = report.begin("values-coinvariant");
    let mut action = Vec::with_capacity(dh * db);
    for i in 0..dh {
        let l = h.legs(i, 3);
        for k in 0..db {
            let mut v = Vector::zeros(da);
            for (ix, x) in l.iter() {
                let be = hq.beta_at(ix[1]);
                if be.is_zero() {
                    continue;
                }
                let gb = a.mul(&cs.gamma[ix[0]], &b.basis[k]);
                v.axpy(&x.mul_ref(be), &a.mul(&gb, &cs.delta[ix[2]]));
            }
            action.push(to_b(&b, &v, c, &[h.label(i), b.algebra.space.label(k)]));
        }
    }
    let sig_err = std::cell::RefCell::new(Vec::new());
    let sigma = VMap::from_fn(dh, 2, |ix| {
        let mut v = Vector::zeros(da);
        for (p, x) in h.legs(ix[0], 3).iter() {
            for (q, y) in h.legs(ix[1], 3).iter() {
                let be = hq.beta_v(&h.m(p[1], q[1]));
                if be.is_zero() {
                    continue;
                }
                let gg = a.mul(&cs.gamma[p[0]], &cs.gamma[q[0]]);
                let d = cs.delta_v(&h.m(p[2], q[2]));
                v.axpy(&x.mul_ref(y).mul_ref(&be), &a.mul(&gg, &d));
            }
        }
        b.coords(&v).unwrap_or_else(|| {
            sig_err.borrow_mut().push(ix.to_vec());
            Vector::zeros(db)
        })
    });
    let fi = &f.tau_inv;
    let inv_err = std::cell::RefCell::new(Vec::new());
    let sigma_inv = VMap::from_fn(dh, 2, |ix| {
        let mut v = Vector::zeros(da);
        for (p, x) in h.legs(ix[0], 4).iter() {
            for (q, y) in h.legs(ix[1], 4).iter() {
                let w = hq.beta_v(&h.m(p[1], q[1])).mul_ref(fi.get(&[p[2], q[2]]));
                if w.is_zero() {
                    continue;
                }
                let g = cs.gamma_v(&h.m(p[0], q[0]));
                let dd = a.mul(&cs.delta[q[3]], &cs.delta[p[3]]);
                v.axpy(&x.mul_ref(y).mul_ref(&w), &a.mul(&g, &dd));
            }
        }
        b.coords(&v).unwrap_or_else(|| {
            inv_err.borrow_mut().push(ix.to_vec());
            Vector::zeros(db)
        })
    });
    for ix in sig_err.borrow().iter() {
        c.record(&["σ", h.label(ix[0]), h.label(ix[1])], false, "not coinvariant", "a coinvariant");
    }
    for ix in inv_err.borrow().iter() {
        c.record(&["σ⁻¹", h.label(ix[0]), h.label(ix[1])], false, "not coinvariant", "a coinvariant");
    }

    let system = CrossedSystem {
        r: b.algebra.clone(),
        host: hq.clone(),
        action,
        sigma,
        sigma_inv: Some(sigma_inv),
    };
    report.absorb("", crate::crossed::check_crossed_system(&system));

    let c = report.begin("sigma-inverse-formula");
    match invert_vmap(&system.sigma, &h.coalgebra, &system.r) {
        Ok(conv) => {
            let explicit = system.sigma_inv.as_ref().unwrap();
            for k in 0..dh * dh {
                let w = [h.label(k / dh), h.label(k % dh)];
                check_vec(c, &w, &system.r.space, &explicit.values[k], &conv.values[k]);
            }
        }
        Err(e) => {
            c.record(&["σ"], false, e.to_string(), "invertible");
        }
    }

    // ν(b⊗h) = bγ(h) and ν⁻¹(a) = a₀δ(a₁↼β)⊗a₂
    let cols: Vec<Vector> = (0..db * dh).map(|k| a.mul(&b.basis[k / dh], &cs.gamma[k % dh])).collect();
    let nu = Matrix::from_columns(da, &cols);
    let c = report.begin("normal-basis-inverse");
    let mut inv_cols = Vec::with_capacity(da);
    for i in 0..da {
        let mut v = Vector::zeros(db * dh);
        let mut ok = true;
        for (l, x) in a.coact_legs(i, 3) {
            let be = hq.beta_at(l[2]);
            if be.is_zero() {
                continue;
            }
            let prod = a.mul(&a.e(l[0]), &cs.delta[l[1]]);
            let Some(bc) = b.coords(&prod) else {
                ok = false;
                continue;
            };
            v.axpy(&x.mul_ref(be), &tensor_ah(&bc, &h.e(l[3])));
        }
        c.record(&[a.label(i)], ok, "left leg outside B", "left leg in B");
        inv_cols.push(v);
    }
    let nu_inv = Matrix::from_columns(db * dh, &inv_cols);
    let c = report.begin("normal-basis-isomorphism");
    c.record(&["ν∘ν⁻¹"], nu.mul(&nu_inv) == Matrix::identity(da), "not the identity", "identity");
    c.record(&["ν⁻¹∘ν"], nu_inv.mul(&nu) == Matrix::identity(db * dh), "not the identity", "identity");

    let c = report.begin("normal-basis-multiplicative");
    let cp = crossed_product_unchecked(&system);
    for i in 0..db * dh {
        for j in 0..db * dh {
            let lhs = nu.apply(&cp.algebra.product_basis(i, j));
            let rhs = a.mul(&nu.column(i), &nu.column(j));
            check_vec(c, &[cp.label(i), cp.label(j)], a.space(), &lhs, &rhs);
        }
    }
    let c = report.begin("normal-basis-colinear");
    let sp = a.space().tensor(h.space(), "⊗");
    for i in 0..db * dh {
        let lhs = a.coact_vec(&nu.column(i));
        let mut rhs = Vector::zeros(da * dh);
        for (u, v, x) in h.coalgebra.comult(i % dh) {
            rhs.axpy(x, &tensor_ah(&nu.column((i / dh) * dh + u), &h.e(*v)));
        }
        check_vec(c, &[cp.label(i)], &sp, &lhs, &rhs);
    }
    Ok(CleftCrossed { system, coinvariants: b, cleaving: cs, nu, report })
}

/// γ(h) = 1#̄h and δ(h) = σ⁻¹(S(h₂), h₃↼α)#̄S(h₁).
pub fn crossed_to_cleft(cp: &CrossedProduct) -> Result<CleavingSystem, CleftError> {
    let sys = &cp.system;
    let inv = sys.sigma_inv.as_ref().ok_or(CleftError::MissingSigmaInverse)?;
    let hq = &sys.host;
    let h = &hq.base;
    let dh = h.dim();
    let one_r = sys.r.one();
    let gamma = (0..dh).map(|i| crate::crossed::tensor(&one_r, &h.e(i))).collect();
    let delta = (0..dh)
        .map(|i| {
            let mut v = Vector::zeros(cp.dim());
            for (l, x) in h.legs(i, 4).iter() {
                let al = hq.alpha_at(l[3]);
                if al.is_zero() {
                    continue;
                }
                let s = inv.eval(&[&hq.s(l[1]), &h.e(l[2])]);
                v.axpy(&x.mul_ref(al), &crate::crossed::tensor(&s, &hq.s(l[0])));
            }
            v
        })
        .collect();
    Ok(CleavingSystem::new(cp.algebra.clone(), gamma, delta))
}

/// A convolution-invertible map H → B, values in coordinates of B.
#[derive(Clone, Debug, PartialEq)]
pub struct BWitness {
    pub a: Vec<Vector>,
    pub a_inv: Vec<Vector>,
}

impl BWitness {
    pub fn new(a: Vec<Vector>, host: &CoquasiHopf, b: &Coinvariants) -> Result<BWitness, CleftError> {
        let a_inv = convolution_inverse(&a, &host.base.coalgebra, &b.algebra)
            .map_err(|e| CleftError::NotInvertible(e.to_string()))?;
        Ok(BWitness { a, a_inv })
    }
}

/// γ′(h) = 𝔞⁻¹(h₁)γ(h₂), δ′(h) = δ(h₁)𝔞(h₂).
pub fn change_cleaving(cs: &CleavingSystem, w: &BWitness) -> CleavingSystem {
    let a = &cs.a;
    let h = &a.host.base;
    let b = coinvariants(a);
    let gamma = (0..h.dim())
        .map(|i| {
            let mut v = Vector::zeros(a.dim());
            for (u, x, c) in h.coalgebra.comult(i) {
                v.axpy(c, &a.mul(&b.include(&w.a_inv[*u]), &cs.gamma[*x]));
            }
            v
        })
        .collect();
    let delta = (0..h.dim())
        .map(|i| {
            let mut v = Vector::zeros(a.dim());
            for (u, x, c) in h.coalgebra.comult(i) {
                v.axpy(c, &a.mul(&cs.delta[*u], &b.include(&w.a[*x])));
            }
            v
        })
        .collect();
    CleavingSystem { a: a.clone(), gamma, delta }
}

/// 𝔞(h) = γ(h₁)β(h₂)δ′(h₃) in coordinates of B, with 𝔞⁻¹(h) = γ′(h₁)β(h₂)δ(h₃).
pub fn extract_witness(old: &CleavingSystem, new: &CleavingSystem) -> Option<BWitness> {
    let a = &old.a;
    let hq = &a.host;
    let h = &hq.base;
    let b = coinvariants(a);
    let combine = |g: &[Vector], d: &[Vector]| -> Option<Vec<Vector>> {
        (0..h.dim())
            .map(|i| {
                let mut v = Vector::zeros(a.dim());
                for (l, x) in h.legs(i, 3).iter() {
                    let be = hq.beta_at(l[1]);
                    if !be.is_zero() {
                        v.axpy(&x.mul_ref(be), &a.mul(&g[l[0]], &d[l[2]]));
                    }
                }
                b.coords(&v)
            })
            .collect()
    };
    Some(BWitness { a: combine(&old.gamma, &new.delta)?, a_inv: combine(&new.gamma, &old.delta)? })
}

/// H with the adjoint coaction ρ̄(h) = h₂⊗S(h₁)h₃, Δ̄ and ε̄ = α.
#[derive(Clone, Debug)]
pub struct AdjointCoalgebra {
    pub host: Arc<CoquasiHopf>,
    /// ρ̄(e_h) in H⊗H, index k * dim H + x.
    pub coaction: Vec<Vector>,
    /// Δ̄(e_h) in H⊗H.
    pub comult: Vec<Vector>,
}

impl AdjointCoalgebra {
    pub fn new(host: Arc<CoquasiHopf>) -> AdjointCoalgebra {
        let h = &host.base;
        let dh = h.dim();
        let coaction = (0..dh)
            .map(|i| {
                let mut v = Vector::zeros(dh * dh);
                for (l, x) in h.legs(i, 3).iter() {
                    v.axpy(x, &tensor_ah(&h.e(l[1]), &h.mul(&host.s(l[0]), &h.e(l[2]))));
                }
                v
            })
            .collect();
        let comult = (0..dh)
            .map(|i| {
                let mut v = Vector::zeros(dh * dh);
                for (a, b, c) in adjoint_kernel(&host, i) {
                    v.add_at(a * dh + b, &c);
                }
                v
            })
            .collect();
        AdjointCoalgebra { host, coaction, comult }
    }
}

/// Terms (i, j, c) of s(e_i)s̄(e_j)c in (s∗s̄)(h), which are also the terms of Δ̄(h):
/// h₃⊗h₉ ω(S(h₂)h₄, S(h₈), h₁₀) β(h₆) ω⁻¹(S(h₁), h₅, S(h₇)).
fn adjoint_kernel(hq: &CoquasiHopf, i: usize) -> Vec<(usize, usize, Scalar)> {
    let h = &hq.base;
    let mut terms = Vec::new();
    for (l, x) in h.legs(i, 10).iter() {
        let be = hq.beta_at(l[5]);
        if be.is_zero() {
            continue;
        }
        let w1 = h.w(&h.mul(&hq.s(l[1]), &h.e(l[3])), &hq.s(l[7]), &h.e(l[9]));
        if w1.is_zero() {
            continue;
        }
        let w2 = h.wi(&hq.s(l[0]), &h.e(l[4]), &hq.s(l[6]));
        let c = x.mul_ref(be).mul_ref(&w1).mul_ref(&w2);
        if !c.is_zero() {
            terms.push((vec![l[2], l[8]], c));
        }
    }
    crate::linear::merge_legs(terms).into_iter().map(|(ix, c)| (ix[0], ix[1], c)).collect()
}

pub fn check_adjoint_coalgebra(ad: &AdjointCoalgebra) -> Report {
    let mut rep = Report::new("adjoint coalgebra");
    let hq = &ad.host;
    let h = &hq.base;
    let dh = h.dim();
    let s2 = h.space().tensor(h.space(), "⊗");
    let s3 = s2.tensor(h.space(), "⊗");
    let rho = |v: &Vector| -> Vector {
        let mut out = Vector::zeros(dh * dh);
        for (i, x) in v.nonzeros() {
            out.axpy(x, &ad.coaction[i]);
        }
        out
    };
    let dbar = |v: &Vector| -> Vector {
        let mut out = Vector::zeros(dh * dh);
        for (i, x) in v.nonzeros() {
            out.axpy(x, &ad.comult[i]);
        }
        out
    };

    let c = rep.begin("adjoint-coaction");
    for i in 0..dh {
        let mut lhs = Vector::zeros(dh * dh * dh);
        let mut rhs = Vector::zeros(dh * dh * dh);
        for (k, x) in ad.coaction[i].nonzeros() {
            let (p, q) = (k / dh, k % dh);
            lhs.axpy(x, &tensor_ah(&ad.coaction[p], &h.e(q)));
            rhs.axpy(x, &tensor_ah(&h.e(p), &h.coalgebra.comult_vec(&h.e(q))));
        }
        check_vec(c, &[h.label(i), "coassociative"], &s3, &lhs, &rhs);
        let mut counit = Vector::zeros(dh);
        for (k, x) in ad.coaction[i].nonzeros() {
            counit.add_at(k / dh, &x.mul_ref(h.eps(k % dh)));
        }
        check_vec(c, &[h.label(i), "counital"], h.space(), &counit, &h.e(i));
    }

    let c = rep.begin("adjoint-comult-colinear");
    for i in 0..dh {
        let mut lhs = Vector::zeros(dh * dh * dh);
        for (k, x) in ad.comult[i].nonzeros() {
            let (p, q) = (k / dh, k % dh);
            for (m, y) in ad.coaction[p].nonzeros() {
                for (n, z) in ad.coaction[q].nonzeros() {
                    let prod = h.m(m % dh, n % dh);
                    let left = tensor_ah(&h.e(m / dh), &h.e(n / dh));
                    lhs.axpy(&x.mul_ref(y).mul_ref(z), &tensor_ah(&left, &prod));
                }
            }
        }
        let mut rhs = Vector::zeros(dh * dh * dh);
        for (k, x) in ad.coaction[i].nonzeros() {
            rhs.axpy(x, &tensor_ah(&ad.comult[k / dh], &h.e(k % dh)));
        }
        check_vec(c, &[h.label(i)], &s3, &lhs, &rhs);
    }

    let c = rep.begin("adjoint-counit-colinear");
    for i in 0..dh {
        let mut lhs = Vector::zeros(dh);
        for (k, x) in ad.coaction[i].nonzeros() {
            lhs.axpy(&x.mul_ref(hq.alpha_at(k / dh)), &h.e(k % dh));
        }
        check_vec(c, &[h.label(i)], h.space(), &lhs, &h.one().scale(hq.alpha_at(i)));
    }

    let c = rep.begin("adjoint-counit");
    for i in 0..dh {
        let mut left = Vector::zeros(dh);
        let mut right = Vector::zeros(dh);
        for (k, x) in ad.comult[i].nonzeros() {
            left.add_at(k % dh, &x.mul_ref(hq.alpha_at(k / dh)));
            right.add_at(k / dh, &x.mul_ref(hq.alpha_at(k % dh)));
        }
        check_vec(c, &[h.label(i), "left"], h.space(), &left, &h.e(i));
        check_vec(c, &[h.label(i), "right"], h.space(), &right, &h.e(i));
    }

    // Φ(x⊗y⊗z) = x₀⊗y₀⊗z₀ω(x₁,y₁,z₁) carries (Δ̄⊗I)Δ̄ to (I⊗Δ̄)Δ̄
    let c = rep.begin("adjoint-coassociative");
    for i in 0..dh {
        let mut left = Vector::zeros(dh * dh * dh);
        for (k, x) in ad.comult[i].nonzeros() {
            left.axpy(x, &tensor_ah(&dbar(&h.e(k / dh)), &h.e(k % dh)));
        }
        let mut phi = Vector::zeros(dh * dh * dh);
        for (k, x) in left.nonzeros() {
            let (p, q, r) = (k / (dh * dh), (k / dh) % dh, k % dh);
            for (m, y) in rho(&h.e(p)).nonzeros() {
                for (n, z) in rho(&h.e(q)).nonzeros() {
                    for (o, u) in rho(&h.e(r)).nonzeros() {
                        let w = h.omega.get(&[m % dh, n % dh, o % dh]);
                        if w.is_zero() {
                            continue;
                        }
                        let idx = (m / dh) * dh * dh + (n / dh) * dh + o / dh;
                        phi.add_at(idx, &x.mul_ref(y).mul_ref(z).mul_ref(u).mul_ref(w));
                    }
                }
            }
        }
        let mut right = Vector::zeros(dh * dh * dh);
        for (k, x) in ad.comult[i].nonzeros() {
            right.axpy(x, &tensor_ah(&h.e(k / dh), &dbar(&h.e(k % dh))));
        }
        check_vec(c, &[h.label(i)], &s3, &phi, &right);
    }
    rep
}

/// A subspace of Hom(H, A) ≅ A^{dim H}; a map φ is flattened with index h * dim A + a.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub name: String,
    pub dim_h: usize,
    pub dim_a: usize,
    pub sub: Subspace,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.sub.dim()
    }

    pub fn map(&self, i: usize) -> Vec<Vector> {
        unflatten_map(&self.sub.basis[i], self.dim_h, self.dim_a)
    }

    pub fn combine(&self, coords: &Vector) -> Vec<Vector> {
        unflatten_map(&self.sub.from_coords(&coords.0), self.dim_h, self.dim_a)
    }

    pub fn coords(&self, map: &[Vector]) -> Option<Vector> {
        self.sub.coords(&flatten_map(map)).map(Vector)
    }
}

pub fn flatten_map(map: &[Vector]) -> Vector {
    Vector(map.iter().flat_map(|v| v.0.iter().cloned()).collect())
}

pub fn unflatten_map(v: &Vector, dh: usize, da: usize) -> Vec<Vector> {
    (0..dh).map(|i| Vector(v.0[i * da..(i + 1) * da].to_vec())).collect()
}

/// Maps φ: X → A with ρ_A(φ(x)) = φ(x₀)⊗x₁, X = H with coaction `src` (index k * dim H + x).
fn colinear_maps(name: &str, a: &ComoduleAlgebra, src: &[Vector]) -> HomSpace {
    let dh = a.host.dim();
    let da = a.dim();
    let n = dh * da;
    let mut rows = Vec::new();
    for h in 0..dh {
        // equation for each (a', x) in A⊗H
        let mut eqs = vec![Vector::zeros(n); da * dh];
        for ai in 0..da {
            for (t, x, c) in a.coact(ai) {
                eqs[t * dh + x].add_at(h * da + ai, c);
            }
        }
        for (k, c) in src[h].nonzeros() {
            let (p, x) = (k / dh, k % dh);
            for ai in 0..da {
                eqs[ai * dh + x].add_at(p * da + ai, &c.neg_ref());
            }
        }
        rows.extend(eqs.into_iter().filter(|e| !e.is_zero()));
    }
    let kernel = if rows.is_empty() {
        (0..n).map(|i| Vector::basis(n, i)).collect()
    } else {
        Matrix::from_rows(n, &rows).kernel()
    };
    HomSpace { name: name.into(), dim_h: dh, dim_a: da, sub: Subspace::span(n, &kernel) }
}

/// A bilinear operation (φ, ψ) ↦ Σ c φ(e_i)ψ(e_j) on maps H → A, per h.
type Kernel = Vec<Vec<(usize, usize, Scalar)>>;

fn apply_kernel(a: &ComoduleAlgebra, k: &Kernel, phi: &[Vector], psi: &[Vector]) -> Vec<Vector> {
    k.iter()
        .map(|terms| {
            let mut v = Vector::zeros(a.dim());
            for (i, j, c) in terms {
                if phi[*i].is_zero() || psi[*j].is_zero() {
                    continue;
                }
                v.axpy(c, &a.mul(&phi[*i], &psi[*j]));
            }
            v
        })
        .collect()
}

fn kernel_from(hq: &CoquasiHopf, legs: usize, f: impl Fn(&[usize]) -> Option<(usize, usize, Scalar)>) -> Kernel {
    let h = &hq.base;
    (0..h.dim())
        .map(|i| {
            let mut terms = Vec::new();
            for (l, x) in h.legs(i, legs).iter() {
                if let Some((a, b, c)) = f(l) {
                    let c = c.mul_ref(x);
                    if !c.is_zero() {
                        terms.push((vec![a, b], c));
                    }
                }
            }
            crate::linear::merge_legs(terms).into_iter().map(|(ix, c)| (ix[0], ix[1], c)).collect()
        })
        .collect()
}

/// Structure constants of one bilinear operation X × Y → Z over the chosen bases.
#[derive(Clone, Debug)]
pub struct ActionTable {
    pub dim_y: usize,
    /// `entries[i * dim_y + j]` = coordinates in Z of x_i ∘ y_j.
    pub entries: Vec<Vector>,
}

impl ActionTable {
    fn build(
        a: &ComoduleAlgebra,
        k: &Kernel,
        x: &HomSpace,
        y: &HomSpace,
        z: &HomSpace,
        c: &mut crate::report::Check,
    ) -> ActionTable {
        let ym: Vec<Vec<Vector>> = (0..y.dim()).map(|j| y.map(j)).collect();
        let mut entries = Vec::with_capacity(x.dim() * y.dim());
        for i in 0..x.dim() {
            let xm = x.map(i);
            for (j, yj) in ym.iter().enumerate() {
                let prod = apply_kernel(a, k, &xm, yj);
                let wi = format!("{}[{i}]", x.name);
                let wj = format!("{}[{j}]", y.name);
                match z.coords(&prod) {
                    Some(v) => {
                        c.record(&[&wi, &wj], true, "", "");
                        entries.push(v);
                    }
                    None => {
                        c.record(&[&wi, &wj], false, "outside", z.name.clone());
                        entries.push(Vector::zeros(z.dim()));
                    }
                }
            }
        }
        ActionTable { dim_y: y.dim(), entries }
    }

    /// Product of coordinate vectors.
    pub fn apply(&self, u: &Vector, v: &Vector) -> Vector {
        let dz = self.entries.first().map_or(0, Vector::dim);
        let mut out = Vector::zeros(dz);
        for (i, x) in u.nonzeros() {
            for (j, y) in v.nonzeros() {
                out.axpy(&x.mul_ref(y), &self.entries[i * self.dim_y + j]);
            }
        }
        out
    }

    fn basis(&self, i: usize, j: usize) -> &Vector {
        &self.entries[i * self.dim_y + j]
    }
}

/// The context (Hom^H(H̄,A), Hom(H,B), Hom^H(H,A), Hom^H(H^S,A), (−,−), [−,−]).
#[derive(Clone, Debug)]
pub struct MoritaContext {
    pub a: Arc<ComoduleAlgebra>,
    pub coinvariants: Coinvariants,
    pub ring1: HomSpace,
    pub ring2: HomSpace,
    pub bimod_p: HomSpace,
    pub bimod_q: HomSpace,
    pub ring1_mul: ActionTable,
    pub ring2_mul: ActionTable,
    pub rp: ActionTable,
    pub ps: ActionTable,
    pub sq: ActionTable,
    pub qr: ActionTable,
    pub pairing: ActionTable,
    pub bracket: ActionTable,
    /// α1_A in ring1 and ε1_A in ring2, when they lie there.
    pub unit1: Option<Vector>,
    pub unit2: Option<Vector>,
    pub report: Report,
}

pub fn build_morita(a: Arc<ComoduleAlgebra>) -> MoritaContext {
    let hq = a.host.clone();
    let h = &hq.base;
    let dh = h.dim();
    let da = a.dim();
    let b = coinvariants(&a);
    let mut report = Report::new("Morita context");

    let delta_src: Vec<Vector> = (0..dh)
        .map(|i| {
            let mut v = Vector::zeros(dh * dh);
            for (u, w, c) in h.coalgebra.comult(i) {
                v.add_at(u * dh + w, c);
            }
            v
        })
        .collect();
    let s_src: Vec<Vector> = (0..dh)
        .map(|i| {
            let mut v = Vector::zeros(dh * dh);
            for (u, w, c) in h.coalgebra.comult(i) {
                v.axpy(c, &tensor_ah(&h.e(*w), &hq.s(*u)));
            }
            v
        })
        .collect();
    let adj = AdjointCoalgebra::new(hq.clone());
    let ring1 = colinear_maps("ring1", &a, &adj.coaction);
    let bimod_p = colinear_maps("P", &a, &delta_src);
    let bimod_q = colinear_maps("Q", &a, &s_src);
    let n = dh * da;
    let ring2_gens: Vec<Vector> = (0..dh)
        .flat_map(|i| {
            b.basis.iter().map(move |bv| {
                let mut v = Vector::zeros(n);
                for (k, x) in bv.nonzeros() {
                    v.add_at(i * da + k, x);
                }
                v
            })
        })
        .collect();
    let ring2 = HomSpace { name: "ring2".into(), dim_h: dh, dim_a: da, sub: Subspace::span(n, &ring2_gens) };
    report.note(format!(
        "dimensions: ring1 {}, ring2 {}, P {}, Q {}",
        ring1.dim(),
        ring2.dim(),
        bimod_p.dim(),
        bimod_q.dim()
    ));

    let conv = kernel_from(&hq, 2, |l| Some((l[0], l[1], Scalar::one())));
    let k1: Kernel = (0..dh).map(|i| adjoint_kernel(&hq, i)).collect();
    let kps = kernel_from(&hq, 6, |l| {
        let w = h.w(&h.e(l[1]), &hq.s(l[3]), &h.e(l[5]));
        Some((l[0], l[4], w.mul_ref(hq.beta_at(l[2]))))
    });
    let ksq = kernel_from(&hq, 6, |l| {
        let w = h.wi(&hq.s(l[0]), &h.e(l[2]), &hq.s(l[4]));
        Some((l[1], l[5], w.mul_ref(hq.beta_at(l[3]))))
    });
    let kpair = kernel_from(&hq, 3, |l| Some((l[0], l[2], hq.beta_at(l[1]).clone())));

    let c = report.begin("closure");
    let ring1_mul = ActionTable::build(&a, &k1, &ring1, &ring1, &ring1, c);
    let ring2_mul = ActionTable::build(&a, &conv, &ring2, &ring2, &ring2, c);
    let rp = ActionTable::build(&a, &conv, &ring2, &bimod_p, &bimod_p, c);
    let ps = ActionTable::build(&a, &kps, &bimod_p, &ring1, &bimod_p, c);
    let sq = ActionTable::build(&a, &ksq, &ring1, &bimod_q, &bimod_q, c);
    let qr = ActionTable::build(&a, &conv, &bimod_q, &ring2, &bimod_q, c);
    let pairing = ActionTable::build(&a, &kpair, &bimod_p, &bimod_q, &ring2, c);
    let bracket = ActionTable::build(&a, &conv, &bimod_q, &bimod_p, &ring1, c);

    let alpha1: Vec<Vector> = (0..dh).map(|i| a.one().scale(hq.alpha_at(i))).collect();
    let eps1: Vec<Vector> = (0..dh).map(|i| a.one().scale(h.eps(i))).collect();
    let unit1 = ring1.coords(&alpha1);
    let unit2 = ring2.coords(&eps1);
    let c = report.begin("units-present");
    c.record(&["α1_A"], unit1.is_some(), "outside ring1", "in ring1");
    c.record(&["ε1_A"], unit2.is_some(), "outside ring2", "in ring2");

    let mut m = MoritaContext {
        a,
        coinvariants: b,
        ring1,
        ring2,
        bimod_p,
        bimod_q,
        ring1_mul,
        ring2_mul,
        rp,
        ps,
        sq,
        qr,
        pairing,
        bracket,
        unit1,
        unit2,
        report: Report::default(),
    };
    check_morita_laws(&m, &mut report);
    m.report = report;
    m
}

fn basis(n: usize, i: usize) -> Vector {
    Vector::basis(n, i)
}

fn check_morita_laws(m: &MoritaContext, rep: &mut Report) {
    let (d1, d2, dp, dq) = (m.ring1.dim(), m.ring2.dim(), m.bimod_p.dim(), m.bimod_q.dim());
    let sp = |n: usize| Space::indexed("c", n);
    let (s1, s2, spp, sqq) = (sp(d1), sp(d2), sp(dp), sp(dq));

    // associativity of x(yz) = (xy)z over three tables
    #[allow(clippy::too_many_arguments)]
    fn assoc(
        c: &mut crate::report::Check,
        space: &Space,
        dims: (usize, usize, usize),
        xy: &ActionTable,
        xy_z: &ActionTable,
        yz: &ActionTable,
        x_yz: &ActionTable,
    ) {
        for i in 0..dims.0 {
            for j in 0..dims.1 {
                let left = xy.basis(i, j);
                for k in 0..dims.2 {
                    let lhs = xy_z.apply(left, &basis(dims.2, k));
                    let rhs = x_yz.apply(&basis(dims.0, i), yz.basis(j, k));
                    let wit = [i.to_string(), j.to_string(), k.to_string()];
                    let wr: Vec<&str> = wit.iter().map(String::as_str).collect();
                    check_vec(c, &wr, space, &lhs, &rhs);
                }
            }
        }
    }

    let c = rep.begin("ring1-associative");
    assoc(c, &s1, (d1, d1, d1), &m.ring1_mul, &m.ring1_mul, &m.ring1_mul, &m.ring1_mul);
    let c = rep.begin("ring2-associative");
    assoc(c, &s2, (d2, d2, d2), &m.ring2_mul, &m.ring2_mul, &m.ring2_mul, &m.ring2_mul);
    let c = rep.begin("P-left-module");
    assoc(c, &spp, (d2, d2, dp), &m.ring2_mul, &m.rp, &m.rp, &m.rp);
    let c = rep.begin("P-right-module");
    assoc(c, &spp, (dp, d1, d1), &m.ps, &m.ps, &m.ring1_mul, &m.ps);
    let c = rep.begin("P-bimodule");
    assoc(c, &spp, (d2, dp, d1), &m.rp, &m.ps, &m.ps, &m.rp);
    let c = rep.begin("Q-left-module");
    assoc(c, &sqq, (d1, d1, dq), &m.ring1_mul, &m.sq, &m.sq, &m.sq);
    let c = rep.begin("Q-right-module");
    assoc(c, &sqq, (dq, d2, d2), &m.qr, &m.qr, &m.ring2_mul, &m.qr);
    let c = rep.begin("Q-bimodule");
    assoc(c, &sqq, (d1, dq, d2), &m.sq, &m.qr, &m.qr, &m.sq);
    // (ps, q) = (p, sq)
    let c = rep.begin("pairing-balanced");
    assoc(c, &s2, (dp, d1, dq), &m.ps, &m.pairing, &m.sq, &m.pairing);
    // (rp, q) = r(p, q) and (p, qr) = (p, q)r
    let c = rep.begin("pairing-bilinear");
    assoc(c, &s2, (d2, dp, dq), &m.rp, &m.pairing, &m.pairing, &m.ring2_mul);
    assoc(c, &s2, (dp, dq, d2), &m.pairing, &m.ring2_mul, &m.qr, &m.pairing);
    // [qr, p] = [q, rp]
    let c = rep.begin("bracket-balanced");
    assoc(c, &s1, (dq, d2, dp), &m.qr, &m.bracket, &m.rp, &m.bracket);
    // [sq, p] = s[q, p] and [q, ps] = [q, p]s
    let c = rep.begin("bracket-bilinear");
    assoc(c, &s1, (d1, dq, dp), &m.sq, &m.bracket, &m.bracket, &m.ring1_mul);
    assoc(c, &s1, (dq, dp, d1), &m.bracket, &m.ring1_mul, &m.ps, &m.bracket);
    // (p, q)p̄ = p[q, p̄] and [q, p]q̄ = q(p, q̄)
    let c = rep.begin("mixed-associativity");
    assoc(c, &spp, (dp, dq, dp), &m.pairing, &m.rp, &m.bracket, &m.ps);
    assoc(c, &sqq, (dq, dp, dq), &m.bracket, &m.sq, &m.pairing, &m.qr);

    let c = rep.begin("units");
    if let Some(u) = &m.unit1 {
        for i in 0..d1 {
            let e = basis(d1, i);
            check_vec(c, &["ring1", "left", &i.to_string()], &s1, &m.ring1_mul.apply(u, &e), &e);
            check_vec(c, &["ring1", "right", &i.to_string()], &s1, &m.ring1_mul.apply(&e, u), &e);
        }
        for i in 0..dp {
            let e = basis(dp, i);
            check_vec(c, &["P", "right", &i.to_string()], &spp, &m.ps.apply(&e, u), &e);
        }
        for i in 0..dq {
            let e = basis(dq, i);
            check_vec(c, &["Q", "left", &i.to_string()], &sqq, &m.sq.apply(u, &e), &e);
        }
    }
    if let Some(u) = &m.unit2 {
        for i in 0..d2 {
            let e = basis(d2, i);
            check_vec(c, &["ring2", "left", &i.to_string()], &s2, &m.ring2_mul.apply(u, &e), &e);
            check_vec(c, &["ring2", "right", &i.to_string()], &s2, &m.ring2_mul.apply(&e, u), &e);
        }
        for i in 0..dp {
            let e = basis(dp, i);
            check_vec(c, &["P", "left", &i.to_string()], &spp, &m.rp.apply(u, &e), &e);
        }
        for i in 0..dq {
            let e = basis(dq, i);
            check_vec(c, &["Q", "right", &i.to_string()], &sqq, &m.qr.apply(&e, u), &e);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrictnessKind {
    Strict,
    SurjectiveBracketOnly,
    Neither,
}

/// A family (𝔭_i, 𝔮_i) as maps H → A.
pub type Family = Vec<(Vec<Vector>, Vec<Vector>)>;

#[derive(Clone, Debug)]
pub struct Strictness {
    pub kind: StrictnessKind,
    /// Σ[𝔮_i, 𝔭_i] = α1_A.
    pub bracket_family: Option<Family>,
    /// Σ(𝔭_i, 𝔮_i) = ε1_A.
    pub pairing_family: Option<Family>,
    /// Σ ξ_iζ_i = id_A for the bracket family.
    pub splitting: Option<bool>,
    pub report: Report,
}

/// Solves target = Σ c_ij x_i ∘ y_j over the basis products of a table.
fn solve_family(t: &ActionTable, dx: usize, dy: usize, target: &Vector) -> Option<Vec<(usize, usize, Scalar)>> {
    let pairs: Vec<(usize, usize)> = (0..dx).flat_map(|i| (0..dy).map(move |j| (i, j))).collect();
    if pairs.is_empty() {
        return None;
    }
    let cols: Vec<Vector> = pairs.iter().map(|&(i, j)| t.basis(i, j).clone()).collect();
    let m = Matrix::from_columns(target.dim(), &cols);
    let x = m.solve(target)?;
    Some(pairs.into_iter().zip(x.0).filter(|(_, c)| !c.is_zero()).map(|((i, j), c)| (i, j, c)).collect())
}

/// Decides surjectivity of [−,−] and (−,−); `hint` is tried first as the pair (γ, δ).
pub fn morita_strictness(m: &MoritaContext, hint: Option<&CleavingSystem>) -> Strictness {
    let mut report = Report::new("Morita strictness");
    let (dp, dq) = (m.bimod_p.dim(), m.bimod_q.dim());
    let mut bracket_family = None;
    let mut pairing_family = None;
    if let (Some(cs), Some(u1), Some(u2)) = (hint, &m.unit1, &m.unit2) {
        let c = report.begin("cleaving-pair");
        let gp = m.bimod_p.coords(&cs.gamma);
        let dq_ = m.bimod_q.coords(&cs.delta);
        c.record(&["γ"], gp.is_some(), "outside", "in P");
        c.record(&["δ"], dq_.is_some(), "outside", "in Q");
        if let (Some(g), Some(d)) = (gp, dq_) {
            let br = m.bracket.apply(&d, &g);
            let pa = m.pairing.apply(&g, &d);
            let okb = c.compare(&["[δ,γ]"], &br, u1);
            let okp = c.compare(&["(γ,δ)"], &pa, u2);
            let fam = vec![(cs.gamma.clone(), cs.delta.clone())];
            if okb {
                bracket_family = Some(fam.clone());
            }
            if okp {
                pairing_family = Some(fam);
            }
        }
    }
    if bracket_family.is_none() {
        if let Some(u1) = &m.unit1 {
            bracket_family = solve_family(&m.bracket, dq, dp, u1).map(|terms| {
                terms
                    .into_iter()
                    .map(|(i, j, c)| {
                        let q: Vec<Vector> = m.bimod_q.map(i).iter().map(|v| v.scale(&c)).collect();
                        (m.bimod_p.map(j), q)
                    })
                    .collect()
            });
        }
    }
    if pairing_family.is_none() {
        if let Some(u2) = &m.unit2 {
            pairing_family = solve_family(&m.pairing, dp, dq, u2).map(|terms| {
                terms
                    .into_iter()
                    .map(|(i, j, c)| {
                        let p: Vec<Vector> = m.bimod_p.map(i).iter().map(|v| v.scale(&c)).collect();
                        (p, m.bimod_q.map(j))
                    })
                    .collect()
            });
        }
    }
    let splitting = bracket_family.as_ref().map(|fam| {
        let c = report.begin("zeta-xi-splitting");
        let a = &m.a;
        let hq = &a.host;
        let mut all = true;
        for i in 0..a.dim() {
            let mut sum = Vector::zeros(a.dim());
            for (p, q) in fam {
                for (l, x) in a.coact_legs(i, 3) {
                    let be = hq.beta_at(l[1]);
                    if be.is_zero() {
                        continue;
                    }
                    let bpart = a.mul(&a.e(l[0]), &q[l[2]]);
                    sum.axpy(&x.mul_ref(be), &a.mul(&bpart, &p[l[3]]));
                }
            }
            all &= check_vec(c, &[a.label(i)], a.space(), &sum, &a.e(i));
        }
        all
    });
    let kind = match (bracket_family.is_some(), pairing_family.is_some()) {
        (true, true) => StrictnessKind::Strict,
        (true, false) => StrictnessKind::SurjectiveBracketOnly,
        _ => StrictnessKind::Neither,
    };
    report.note(format!("{kind:?}"));
    Strictness { kind, bracket_family, pairing_family, splitting, report }
}
