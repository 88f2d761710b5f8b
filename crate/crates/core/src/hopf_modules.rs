//! Right (R, H)-coquasi-Hopf modules over a crossed system, the isomorphism
//! with relative Hopf modules over R#̄σH, the projection Π onto coinvariants
//! and the equivalence with right R-modules.

use std::sync::Arc;

use thiserror::Error;

use crate::comodule::{Coaction, ComoduleAlgebra, RelativeHopfModule};
use crate::crossed::{crossed_product_unchecked, tensor, CrossedSystem};
use crate::linear::{check_vec, merge_legs, Algebra, Legs, LinMap, Matrix, Space, Subspace, Vector};
use crate::report::Report;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HopfModuleError {
    #[error("crossed system carries no cocycle inverse")]
    MissingSigmaInverse,
    #[error("relative Hopf module is not over the crossed product of this system")]
    AlgebraMismatch,
}

/// A right R-module N with basis action table.
#[derive(Clone, Debug, PartialEq)]
pub struct RModule {
    pub space: Space,
    /// `action[n * dim R + r]` = n·r.
    pub action: Vec<Vector>,
    pub r: Algebra,
}

impl RModule {
    /// R^k with the basis n_i·r_j (index i * dim R + j).
    pub fn free(r: &Algebra, rank: usize) -> RModule {
        let dr = r.dim();
        let labels: Vec<String> = (0..rank * dr)
            .map(|k| if rank == 1 { r.space.label(k).to_string() } else { format!("n{}{}", k / dr + 1, r.space.label(k % dr)) })
            .collect();
        let mut action = Vec::with_capacity(rank * dr * dr);
        for k in 0..rank * dr {
            let (i, j) = (k / dr, k % dr);
            for s in 0..dr {
                let mut v = Vector::zeros(rank * dr);
                for (t, c) in r.product_terms(j, s) {
                    v.add_at(i * dr + t, c);
                }
                action.push(v);
            }
        }
        RModule { space: Space::new(labels), action, r: r.clone() }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn act(&self, n: &Vector, r: &Vector) -> Vector {
        bilinear(&self.action, self.r.dim(), self.dim(), n, r)
    }
}

pub fn check_r_module(n: &RModule) -> Report {
    let mut rep = Report::new("right R-module");
    let r = &n.r;
    let (dn, dr) = (n.dim(), r.dim());
    let c = rep.begin("module-associative");
    for m in 0..dn {
        for a in 0..dr {
            for b in 0..dr {
                let lhs = n.act(&n.act(&e(dn, m), &r.basis(a)), &r.basis(b));
                let rhs = n.act(&e(dn, m), &r.product_basis(a, b));
                check_vec(c, &[n.space.label(m), r.space.label(a), r.space.label(b)], &n.space, &lhs, &rhs);
            }
        }
    }
    let c = rep.begin("module-unit");
    for m in 0..dn {
        check_vec(c, &[n.space.label(m)], &n.space, &n.act(&e(dn, m), &r.one()), &e(dn, m));
    }
    rep
}

/// A right (R, H)-coquasi-Hopf module: R-action, H-coaction and the H-action ∘.
#[derive(Clone, Debug, PartialEq)]
pub struct CoquasiHopfModule {
    pub space: Space,
    /// `r_action[m * dim R + r]` = m·r.
    pub r_action: Vec<Vector>,
    pub coaction: Coaction,
    /// `h_action[m * dim H + h]` = m∘h.
    pub h_action: Vec<Vector>,
    pub system: Arc<CrossedSystem>,
}

fn e(n: usize, i: usize) -> Vector {
    Vector::basis(n, i)
}

fn bilinear(table: &[Vector], d2: usize, dout: usize, x: &Vector, y: &Vector) -> Vector {
    let mut out = Vector::zeros(dout);
    for (i, s) in x.nonzeros() {
        for (j, t) in y.nonzeros() {
            out.axpy(&s.mul_ref(t), &table[i * d2 + j]);
        }
    }
    out
}

impl CoquasiHopfModule {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn act_r(&self, m: &Vector, r: &Vector) -> Vector {
        bilinear(&self.r_action, self.system.dim_r(), self.dim(), m, r)
    }

    /// m∘h.
    pub fn circ(&self, m: &Vector, h: &Vector) -> Vector {
        bilinear(&self.h_action, self.system.dim_h(), self.dim(), m, h)
    }

    /// ρ(m) in M⊗H (index m * dim H + h).
    pub fn coact_vec(&self, v: &Vector) -> Vector {
        let dh = self.system.dim_h();
        let mut out = Vector::zeros(self.dim() * dh);
        for (i, c) in v.nonzeros() {
            for (a, h, x) in &self.coaction[i] {
                out.add_at(a * dh + h, &c.mul_ref(x));
            }
        }
        out
    }

    /// Iterated coaction m₀⊗m₁⊗…⊗m_k as legs [m₀, m₁, …, m_k].
    pub fn coact_legs(&self, i: usize, k: usize) -> Legs {
        let mut legs: Legs = vec![(vec![i], Scalar::one())];
        for _ in 0..k {
            let mut next = Vec::new();
            for (ix, c) in &legs {
                for (a, h, x) in &self.coaction[ix[0]] {
                    let mut v = Vec::with_capacity(ix.len() + 1);
                    v.push(*a);
                    v.push(*h);
                    v.extend_from_slice(&ix[1..]);
                    next.push((v, c.mul_ref(x)));
                }
            }
            legs = merge_legs(next);
        }
        legs
    }

    fn coact_legs_vec(&self, v: &Vector, k: usize) -> Legs {
        let mut out = Vec::new();
        for (i, c) in v.nonzeros() {
            for (ix, x) in self.coact_legs(i, k) {
                out.push((ix, c.mul_ref(&x)));
            }
        }
        merge_legs(out)
    }

    /// M⊗H labels "m⊗h".
    pub fn tensor_space(&self) -> Space {
        self.space.tensor(self.system.host.base.space(), "⊗")
    }

    fn m_tensor_one(&self, m: &Vector) -> Vector {
        tensor(m, &self.system.host.base.one())
    }
}

/// The structures on N⊗H: (n⊗h)r = n(h₁·r)⊗h₂, ρ(n⊗h) = n⊗h₁⊗h₂,
/// (n⊗h)∘g = nσ(h₁,g₁)⊗h₂g₂.
pub fn induced_module(n: &RModule, cs: Arc<CrossedSystem>) -> CoquasiHopfModule {
    let h = &cs.host.base;
    let (dn, dr, dh) = (n.dim(), cs.dim_r(), h.dim());
    let d = dn * dh;
    let mut r_action = Vec::with_capacity(d * dr);
    let mut h_action = Vec::with_capacity(d * dh);
    let mut coaction = Vec::with_capacity(d);
    for k in 0..d {
        let (ni, hi) = (k / dh, k % dh);
        let nv = e(dn, ni);
        for s in 0..dr {
            let mut v = Vector::zeros(d);
            for (h1, h2, c) in h.coalgebra.comult(hi) {
                let x = n.act(&nv, cs.act_basis(*h1, s));
                v.axpy(c, &tensor(&x, &h.e(*h2)));
            }
            r_action.push(v);
        }
        for gi in 0..dh {
            let mut v = Vector::zeros(d);
            for (a, c) in h.legs(hi, 2).iter() {
                for (g1, g2, x) in h.coalgebra.comult(gi) {
                    let ns = n.act(&nv, cs.sig(a[0], *g1));
                    v.axpy(&c.mul_ref(x), &tensor(&ns, &h.m(a[1], *g2)));
                }
            }
            h_action.push(v);
        }
        coaction.push(h.coalgebra.comult(hi).iter().map(|(a, b, c)| (ni * dh + a, *b, c.clone())).collect());
    }
    let space = n.space.tensor(h.space(), "⊗");
    CoquasiHopfModule { space, r_action, coaction, h_action, system: cs }
}

/// Checks R-module, H-comodule, ρ(mr) = m₀r⊗m₁ and the four identities of ∘.
pub fn check_hopf_module(m: &CoquasiHopfModule) -> Report {
    let mut rep = Report::new("coquasi-Hopf module");
    let cs = &m.system;
    let hq = &cs.host;
    let h = &hq.base;
    let r = &cs.r;
    let (dm, dr, dh) = (m.dim(), cs.dim_r(), h.dim());
    let ms = &m.space;
    let ts = m.tensor_space();
    let t3 = ts.tensor(h.space(), "⊗");
    let hl = |i: usize| h.label(i);

    let c = rep.begin("r-module-associative");
    for i in 0..dm {
        for a in 0..dr {
            for b in 0..dr {
                let lhs = m.act_r(&m.act_r(&e(dm, i), &r.basis(a)), &r.basis(b));
                let rhs = m.act_r(&e(dm, i), &r.product_basis(a, b));
                check_vec(c, &[ms.label(i), r.space.label(a), r.space.label(b)], ms, &lhs, &rhs);
            }
        }
    }
    let c = rep.begin("r-module-unit");
    for i in 0..dm {
        check_vec(c, &[ms.label(i)], ms, &m.act_r(&e(dm, i), &r.one()), &e(dm, i));
    }

    let c = rep.begin("comodule-coassociative");
    for i in 0..dm {
        let rho = m.coact_vec(&e(dm, i));
        let mut lhs = Vector::zeros(dm * dh * dh);
        let mut rhs = Vector::zeros(dm * dh * dh);
        for (k, x) in rho.nonzeros() {
            let (a, b) = (k / dh, k % dh);
            for (p, y) in m.coact_vec(&e(dm, a)).nonzeros() {
                lhs.add_at(p * dh + b, &x.mul_ref(y));
            }
            for (b1, b2, y) in h.coalgebra.comult(b) {
                rhs.add_at((a * dh + b1) * dh + b2, &x.mul_ref(y));
            }
        }
        check_vec(c, &[ms.label(i)], &t3, &lhs, &rhs);
    }
    let c = rep.begin("comodule-counit");
    for i in 0..dm {
        let mut lhs = Vector::zeros(dm);
        for (a, b, x) in &m.coaction[i] {
            lhs.add_at(*a, &x.mul_ref(h.eps(*b)));
        }
        check_vec(c, &[ms.label(i)], ms, &lhs, &e(dm, i));
    }

    let c = rep.begin("r-action-colinear");
    for i in 0..dm {
        for s in 0..dr {
            let lhs = m.coact_vec(&m.act_r(&e(dm, i), &r.basis(s)));
            let mut rhs = Vector::zeros(dm * dh);
            for (a, b, x) in &m.coaction[i] {
                rhs.axpy(x, &tensor(&m.act_r(&e(dm, *a), &r.basis(s)), &h.e(*b)));
            }
            check_vec(c, &[ms.label(i), r.space.label(s)], &ts, &lhs, &rhs);
        }
    }

    let c = rep.begin("circle-colinear");
    for i in 0..dm {
        for hi in 0..dh {
            let lhs = m.coact_vec(&m.circ(&e(dm, i), &h.e(hi)));
            let mut rhs = Vector::zeros(dm * dh);
            for (a, b, x) in &m.coaction[i] {
                for (h1, h2, y) in h.coalgebra.comult(hi) {
                    let left = m.circ(&e(dm, *a), &h.e(*h1));
                    rhs.axpy(&x.mul_ref(y), &tensor(&left, &h.m(*b, *h2)));
                }
            }
            check_vec(c, &[ms.label(i), hl(hi)], &ts, &lhs, &rhs);
        }
    }

    let c = rep.begin("circle-r-linear");
    for i in 0..dm {
        for hi in 0..dh {
            for s in 0..dr {
                let lhs = m.act_r(&m.circ(&e(dm, i), &h.e(hi)), &r.basis(s));
                let mut rhs = Vector::zeros(dm);
                for (h1, h2, y) in h.coalgebra.comult(hi) {
                    let ms1 = m.act_r(&e(dm, i), cs.act_basis(*h1, s));
                    rhs.axpy(y, &m.circ(&ms1, &h.e(*h2)));
                }
                check_vec(c, &[ms.label(i), hl(hi), r.space.label(s)], ms, &lhs, &rhs);
            }
        }
    }

    let c = rep.begin("circle-associative");
    for i in 0..dm {
        let mlegs = &m.coaction[i];
        for hi in 0..dh {
            let hlegs = h.legs(hi, 3);
            for gi in 0..dh {
                let lhs = m.circ(&m.circ(&e(dm, i), &h.e(hi)), &h.e(gi));
                let glegs = h.legs(gi, 3);
                let mut rhs = Vector::zeros(dm);
                for (m0, m1, x) in mlegs {
                    for (a, y) in hlegs.iter() {
                        for (b, z) in glegs.iter() {
                            let w = h.w(&h.e(*m1), &h.e(a[2]), &h.e(b[2]));
                            if w.is_zero() {
                                continue;
                            }
                            let coef = x.mul_ref(y).mul_ref(z).mul_ref(&w);
                            let ms1 = m.act_r(&e(dm, *m0), cs.sig(a[0], b[0]));
                            rhs.axpy(&coef, &m.circ(&ms1, &h.m(a[1], b[1])));
                        }
                    }
                }
                check_vec(c, &[ms.label(i), hl(hi), hl(gi)], ms, &lhs, &rhs);
            }
        }
    }

    let c = rep.begin("circle-unit");
    for i in 0..dm {
        check_vec(c, &[ms.label(i)], ms, &m.circ(&e(dm, i), &h.one()), &e(dm, i));
    }
    rep
}

/// F: m⋇(r#̄h) = (mr)∘h, a right (H, R#̄σH)-Hopf module.
pub fn to_relative_hopf(m: &CoquasiHopfModule) -> RelativeHopfModule {
    let algebra = Arc::new(crossed_product_unchecked(&m.system));
    to_relative_hopf_over(m, algebra)
}

/// F with a prebuilt crossed product algebra (index r * dim H + h).
pub fn to_relative_hopf_over(m: &CoquasiHopfModule, algebra: Arc<ComoduleAlgebra>) -> RelativeHopfModule {
    let (dm, dr, dh) = (m.dim(), m.system.dim_r(), m.system.dim_h());
    let mut action = Vec::with_capacity(dm * dr * dh);
    for i in 0..dm {
        for rh in 0..dr * dh {
            let mr = m.act_r(&e(dm, i), &e(dr, rh / dh));
            action.push(m.circ(&mr, &e(dh, rh % dh)));
        }
    }
    RelativeHopfModule { space: m.space.clone(), action, coaction: m.coaction.clone(), algebra }
}

/// G: mr = m⋇(r#̄1), m∘h = m⋇(1#̄h).
pub fn from_relative_hopf(
    rel: &RelativeHopfModule,
    system: Arc<CrossedSystem>,
) -> Result<CoquasiHopfModule, HopfModuleError> {
    let (dr, dh) = (system.dim_r(), system.dim_h());
    if rel.algebra.dim() != dr * dh || rel.algebra.host.dim() != dh {
        return Err(HopfModuleError::AlgebraMismatch);
    }
    let dm = rel.dim();
    let one_h = system.host.base.one();
    let one_r = system.r.one();
    let mut r_action = Vec::with_capacity(dm * dr);
    let mut h_action = Vec::with_capacity(dm * dh);
    for i in 0..dm {
        for s in 0..dr {
            r_action.push(rel.act(&e(dm, i), &tensor(&e(dr, s), &one_h)));
        }
        for g in 0..dh {
            h_action.push(rel.act(&e(dm, i), &tensor(&one_r, &e(dh, g))));
        }
    }
    Ok(CoquasiHopfModule { space: rel.space.clone(), r_action, coaction: rel.coaction.clone(), h_action, system })
}

/// M^{coH} with the induced R-action in coordinates of `basis`.
#[derive(Clone, Debug)]
pub struct CoinvariantModule {
    pub basis: Vec<Vector>,
    pub sub: Subspace,
    /// The induced right R-module on the coordinates.
    pub module: RModule,
}

impl CoinvariantModule {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, v: &Vector) -> Option<Vector> {
        self.sub.coords(v).map(Vector)
    }

    pub fn include(&self, c: &Vector) -> Vector {
        let mut out = Vector::zeros(self.sub.ambient);
        for (i, x) in c.nonzeros() {
            out.axpy(x, &self.basis[i]);
        }
        out
    }
}

/// M^{coH} = ker(ρ − (−)⊗1).
pub fn coinvariant_module(m: &CoquasiHopfModule) -> CoinvariantModule {
    let (dm, dh) = (m.dim(), m.system.dim_h());
    let cols: Vec<Vector> = (0..dm).map(|i| m.coact_vec(&e(dm, i)).sub(&m.m_tensor_one(&e(dm, i)))).collect();
    let basis = Matrix::from_columns(dm * dh, &cols).kernel();
    let sub = Subspace::span(dm, &basis);
    let basis = sub.basis.clone();
    let dr = m.system.dim_r();
    let mut action = Vec::with_capacity(basis.len() * dr);
    for b in &basis {
        for s in 0..dr {
            let v = m.act_r(b, &e(dr, s));
            let c = sub.coords(&v).map(Vector).unwrap_or_else(|| Vector::zeros(basis.len()));
            action.push(c);
        }
    }
    let labels: Vec<String> = (0..basis.len()).map(|i| format!("b{}", i + 1)).collect();
    let module = RModule { space: Space::new(labels), action, r: m.system.r.clone() };
    CoinvariantModule { basis, sub, module }
}

pub fn check_coinvariant_module(m: &CoquasiHopfModule, co: &CoinvariantModule) -> Report {
    let mut rep = Report::new("coinvariant submodule");
    let ts = m.tensor_space();
    let dr = m.system.dim_r();
    let c = rep.begin("coinvariant");
    for (i, b) in co.basis.iter().enumerate() {
        let label = co.module.space.label(i).to_string();
        check_vec(c, &[&label], &ts, &m.coact_vec(b), &m.m_tensor_one(b));
    }
    let c = rep.begin("closed-under-r-action");
    for (i, b) in co.basis.iter().enumerate() {
        for s in 0..dr {
            let v = m.act_r(b, &e(dr, s));
            let label = co.module.space.label(i).to_string();
            c.record(&[&label, m.system.r.space.label(s)], co.sub.contains(&v), m.space.render(&v), "in M^coH");
        }
    }
    rep
}

/// Π(m) = m₀∘S(m₁↼β) = β(m₁) m₀∘S(m₂), with its verification report.
#[derive(Clone, Debug)]
pub struct Projection {
    pub pi: LinMap,
    pub report: Report,
}

pub fn projection_pi(m: &CoquasiHopfModule) -> Projection {
    let hq = &m.system.host;
    let dm = m.dim();
    let images: Vec<Vector> = (0..dm).map(|i| apply_pi(m, &e(dm, i))).collect();
    let pi = LinMap::from_images(&m.space, &m.space, &images);
    let mut rep = Report::new("projection onto coinvariants");
    rep.note("coinvariance checked as ρΠ(m) = Π(m)⊗1");
    let ms = &m.space;
    let ts = m.tensor_space();
    let c = rep.begin("projection-idempotent");
    for i in 0..dm {
        check_vec(c, &[ms.label(i)], ms, &pi.apply(&images[i]), &images[i]);
    }
    let c = rep.begin("projection-coinvariant");
    for i in 0..dm {
        check_vec(c, &[ms.label(i)], &ts, &m.coact_vec(&images[i]), &m.m_tensor_one(&images[i]));
    }
    let c = rep.begin("projection-r-linear");
    let dr = m.system.dim_r();
    for i in 0..dm {
        for s in 0..dr {
            let lhs = m.act_r(&images[i], &e(dr, s));
            let mut arg = Vector::zeros(dm);
            for (m0, m1, x) in &m.coaction[i] {
                let sr = m.system.act(&hq.s(*m1), &e(dr, s));
                arg.axpy(x, &m.act_r(&e(dm, *m0), &sr));
            }
            check_vec(c, &[ms.label(i), m.system.r.space.label(s)], ms, &lhs, &pi.apply(&arg));
        }
    }
    let co = coinvariant_module(m);
    let c = rep.begin("projection-fixes-coinvariants");
    for (i, b) in co.basis.iter().enumerate() {
        let label = format!("b{}", i + 1);
        check_vec(c, &[&label], ms, &pi.apply(b), b);
    }
    let image = Subspace::span(dm, &images);
    let c = rep.begin("projection-image");
    let same = image.dim() == co.dim() && co.basis.iter().all(|b| image.contains(b));
    c.record(&["Im Π"], same, format!("dim {}", image.dim()), format!("dim M^coH = {}", co.dim()));
    Projection { pi, report: rep }
}

fn apply_pi(m: &CoquasiHopfModule, v: &Vector) -> Vector {
    let hq = &m.system.host;
    let mut out = Vector::zeros(m.dim());
    for (ix, c) in m.coact_legs_vec(v, 2) {
        let b = hq.beta_at(ix[1]);
        if b.is_zero() {
            continue;
        }
        out.axpy(&c.mul_ref(b), &m.circ(&e(m.dim(), ix[0]), &hq.s(ix[2])));
    }
    out
}

/// The equivalence data for M: ε_M : M^{coH}⊗H → M, ϰ_M : M → M^{coH}⊗H,
/// and u, υ for N = M^{coH}.
#[derive(Clone, Debug)]
pub struct EquivalenceMaps {
    pub coinvariants: CoinvariantModule,
    pub eps: LinMap,
    pub kappa: LinMap,
    pub report: Report,
}

/// ϰ_M(m) = Π(m₀σ⁻¹(S(m₁), m₂↼α))⊗m₃, expanded as α(m₂)Π(m₀σ⁻¹(S(m₁), m₃))⊗m₄.
pub fn equivalence_maps(m: &CoquasiHopfModule) -> Result<EquivalenceMaps, HopfModuleError> {
    let cs = &m.system;
    let sinv = cs.sig_inv().ok_or(HopfModuleError::MissingSigmaInverse)?;
    let hq = &cs.host;
    let h = &hq.base;
    let (dm, dh) = (m.dim(), h.dim());
    let co = coinvariant_module(m);
    let dn = co.dim();
    let mut rep = Report::new("coquasi-Hopf module equivalence");
    let src = co.module.space.tensor(h.space(), "⊗");

    let eps_images: Vec<Vector> = (0..dn * dh).map(|k| m.circ(&co.basis[k / dh], &h.e(k % dh))).collect();
    let eps = LinMap::from_images(&src, &m.space, &eps_images);

    let mut kappa_images = Vec::with_capacity(dm);
    let mut not_coinvariant = Vec::new();
    for i in 0..dm {
        let mut out = Vector::zeros(dn * dh);
        for (ix, c) in m.coact_legs(i, 4) {
            let a = hq.alpha_at(ix[2]);
            if a.is_zero() {
                continue;
            }
            let s = sinv.eval(&[&hq.s(ix[1]), &h.e(ix[3])]);
            let p = apply_pi(m, &m.act_r(&e(dm, ix[0]), &s));
            match co.coords(&p) {
                Some(pc) => out.axpy(&c.mul_ref(a), &tensor(&pc, &h.e(ix[4]))),
                None => not_coinvariant.push(m.space.label(i).to_string()),
            }
        }
        kappa_images.push(out);
    }
    let kappa = LinMap::from_images(&m.space, &src, &kappa_images);

    let c = rep.begin("kappa-values-coinvariant");
    for w in &not_coinvariant {
        c.record(&[w], false, "Π value outside M^coH", "in M^coH");
    }
    if not_coinvariant.is_empty() {
        c.record(&["all"], true, "", "");
    }

    let c = rep.begin("kappa-after-eps");
    let ke = kappa.compose(&eps);
    for k in 0..dn * dh {
        check_vec(c, &[src.label(k)], &src, &ke.image_of(k), &e(dn * dh, k));
    }
    let c = rep.begin("eps-after-kappa");
    let ek = eps.compose(&kappa);
    for i in 0..dm {
        check_vec(c, &[m.space.label(i)], &m.space, &ek.image_of(i), &e(dm, i));
    }

    // ε_M is a morphism from the induced module M^{coH}⊗H
    let ind = induced_module(&co.module, cs.clone());
    let c = rep.begin("eps-r-linear");
    let dr = cs.dim_r();
    for k in 0..dn * dh {
        for s in 0..dr {
            let lhs = eps.apply(&ind.act_r(&e(dn * dh, k), &e(dr, s)));
            let rhs = m.act_r(&eps.image_of(k), &e(dr, s));
            check_vec(c, &[src.label(k), cs.r.space.label(s)], &m.space, &lhs, &rhs);
        }
    }
    let c = rep.begin("eps-colinear");
    let ts = m.tensor_space();
    for k in 0..dn * dh {
        let mut lhs = Vector::zeros(dm * dh);
        for (p, x) in ind.coact_vec(&e(dn * dh, k)).nonzeros() {
            lhs.axpy(x, &tensor(&eps.image_of(p / dh), &h.e(p % dh)));
        }
        check_vec(c, &[src.label(k)], &ts, &lhs, &m.coact_vec(&eps.image_of(k)));
    }
    let c = rep.begin("eps-circle-linear");
    for k in 0..dn * dh {
        for g in 0..dh {
            let lhs = eps.apply(&ind.circ(&e(dn * dh, k), &h.e(g)));
            let rhs = m.circ(&eps.image_of(k), &h.e(g));
            check_vec(c, &[src.label(k), h.label(g)], &m.space, &lhs, &rhs);
        }
    }

    // u_N, υ_N for N = M^{coH}, and the triangle identities
    let ind_co = coinvariant_module(&ind);
    let c = rep.begin("unit-counit-inverse");
    let mut u_images = Vec::with_capacity(dn);
    for j in 0..dn {
        let u = tensor(&e(dn, j), &h.one());
        let back = upsilon(&u, dn, h);
        check_vec(c, &[co.module.space.label(j)], &co.module.space, &back, &e(dn, j));
        u_images.push(u);
    }
    for (j, b) in ind_co.basis.iter().enumerate() {
        let n = upsilon(b, dn, h);
        let label = format!("c{}", j + 1);
        check_vec(c, &[&label], &src, &tensor(&n, &h.one()), b);
    }
    let c = rep.begin("triangle-induced");
    for k in 0..dn * dh {
        let (j, g) = (k / dh, k % dh);
        let lhs = ind.circ(&u_images[j], &h.e(g));
        check_vec(c, &[src.label(k)], &src, &lhs, &e(dn * dh, k));
    }
    let c = rep.begin("triangle-coinvariant");
    for (j, b) in co.basis.iter().enumerate() {
        let lhs = m.circ(b, &h.one());
        check_vec(c, &[co.module.space.label(j)], &m.space, &lhs, b);
    }
    let c = rep.begin("free-over-coinvariants");
    c.record(
        &[],
        dm == dn * dh,
        format!("dim M = {dm}"),
        format!("dim M^coH · dim H = {}", dn * dh),
    );
    Ok(EquivalenceMaps { coinvariants: co, eps, kappa, report: rep })
}

/// υ_N(Σn_i⊗h_i) = Σn_iε(h_i).
fn upsilon(v: &Vector, dn: usize, h: &crate::coquasi::CoquasiBialgebra) -> Vector {
    let dh = h.dim();
    let mut out = Vector::zeros(dn);
    for (k, x) in v.nonzeros() {
        out.add_at(k / dh, &x.mul_ref(h.eps(k % dh)));
    }
    out
}

/// The regular module R#̄σH pulled back along G.
pub fn regular_module(system: Arc<CrossedSystem>) -> CoquasiHopfModule {
    let algebra = Arc::new(crossed_product_unchecked(&system));
    let rel = RelativeHopfModule::regular(algebra);
    from_relative_hopf(&rel, system).expect("crossed product matches its system")
}
