//! The "coquasi-doc/1" JSON interchange format.
//!
//! Every document is an envelope `{format, kind, field, payload}`. Scalars are
//! strings such as `"1/2 - z^2"` (z is the primitive root of the document's
//! cyclotomic field) or coefficient lists `["1", "0", "-1/2"]`. Vectors are
//! dense lists of scalars. Hosts and other referenced structures are either
//! `builtin:NAME`, a path relative to the referencing file, or an inline
//! document.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use coquasi_core::catalog::{self, H2Datum, H3Datum};
use coquasi_core::cleft::CleavingSystem;
use coquasi_core::comodule::ComoduleAlgebra;
use coquasi_core::coquasi::{CoquasiBialgebra, CoquasiHopf};
use coquasi_core::crossed::CrossedSystem;
use coquasi_core::hopf_modules::CoquasiHopfModule;
use coquasi_core::linear::{Algebra, Coalgebra, Functional, Matrix, Space, VMap, Vector};
use coquasi_core::scalar::{FieldSpec, Scalar, ScalarError};

pub const FORMAT: &str = "coquasi-doc/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    CoquasiBialgebra,
    CoquasiHopf,
    ComoduleAlgebra,
    CrossedSystem,
    CleavingSystem,
    HopfModule,
    H2Datum,
    H3Datum,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::CoquasiBialgebra,
        Kind::CoquasiHopf,
        Kind::ComoduleAlgebra,
        Kind::CrossedSystem,
        Kind::CleavingSystem,
        Kind::HopfModule,
        Kind::H2Datum,
        Kind::H3Datum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::CoquasiBialgebra => "coquasi_bialgebra",
            Kind::CoquasiHopf => "coquasi_hopf",
            Kind::ComoduleAlgebra => "comodule_algebra",
            Kind::CrossedSystem => "crossed_system",
            Kind::CleavingSystem => "cleaving_system",
            Kind::HopfModule => "hopf_module",
            Kind::H2Datum => "h2_datum",
            Kind::H3Datum => "h3_datum",
        }
    }

    /// Accepts both `crossed-system` and `crossed_system`.
    pub fn parse(s: &str) -> Option<Kind> {
        let s = s.replace('-', "_");
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub format: String,
    pub kind: Kind,
    #[serde(default = "default_field")]
    pub field: u32,
    pub payload: Value,
}

fn default_field() -> u32 {
    1
}

/// A scalar as text or as a coefficient list over the power basis.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Text(String),
    Coeffs(Vec<String>),
    Int(i64),
}

type VecJson = Vec<ScalarJson>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub basis: Vec<String>,
    /// `products[i * d + j]` = e_i e_j.
    pub products: Vec<VecJson>,
    pub unit: VecJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BialgebraJson {
    pub basis: Vec<String>,
    pub products: Vec<VecJson>,
    pub unit: VecJson,
    /// `comult[i]` lists `[j, k, c]` with Δ(e_i) = Σ c e_j⊗e_k.
    pub comult: Vec<Vec<(usize, usize, ScalarJson)>>,
    pub counit: VecJson,
    /// ω on basis triples, index (i * d + j) * d + k.
    pub omega: VecJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_inv: Option<VecJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfJson {
    #[serde(flatten)]
    pub base: BialgebraJson,
    /// `antipode[i]` = S(e_i).
    pub antipode: Vec<VecJson>,
    pub alpha: VecJson,
    pub beta: VecJson,
}

/// `builtin:NAME`, a relative path, or an inline document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reference {
    Name(String),
    Inline(Box<Document>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComoduleJson {
    pub host: Reference,
    pub algebra: AlgebraJson,
    /// `coaction[i]` = ρ(e_i) in A⊗H, index a * dim H + h.
    pub coaction: Vec<VecJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossedJson {
    pub host: Reference,
    pub algebra: AlgebraJson,
    /// `action[h * dim R + r]` = e_h · e_r.
    pub action: Vec<VecJson>,
    /// `sigma[h * dim H + g]` = σ(e_h, e_g).
    pub sigma: Vec<VecJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_inv: Option<Vec<VecJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleavingJson {
    pub algebra: Reference,
    pub gamma: Vec<VecJson>,
    pub delta: Vec<VecJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleJson {
    pub system: Reference,
    pub basis: Vec<String>,
    /// `r_action[m * dim R + r]` = m·r.
    pub r_action: Vec<VecJson>,
    /// `coaction[m]` = ρ(e_m) in M⊗H.
    pub coaction: Vec<VecJson>,
    /// `h_action[m * dim H + h]` = m∘h.
    pub h_action: Vec<VecJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct H2Json {
    pub algebra: AlgebraJson,
    /// `f[i]` = F(e_i).
    pub f: Vec<VecJson>,
    pub c: VecJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct H3Json {
    pub algebra: AlgebraJson,
    pub f: Vec<VecJson>,
    pub g: Vec<VecJson>,
    pub u1: VecJson,
    pub u2: VecJson,
    pub v1: VecJson,
    pub v2: VecJson,
}

/// A loaded structure.
#[derive(Clone, Debug)]
pub enum Loaded {
    Bialgebra(CoquasiBialgebra),
    Hopf(CoquasiHopf),
    Comodule(ComoduleAlgebra),
    Crossed(CrossedSystem),
    Cleaving(CleavingSystem),
    Module(CoquasiHopfModule),
    H2(H2Datum),
    H3(H3Datum),
}

impl Loaded {
    pub fn kind(&self) -> Kind {
        match self {
            Loaded::Bialgebra(_) => Kind::CoquasiBialgebra,
            Loaded::Hopf(_) => Kind::CoquasiHopf,
            Loaded::Comodule(_) => Kind::ComoduleAlgebra,
            Loaded::Crossed(_) => Kind::CrossedSystem,
            Loaded::Cleaving(_) => Kind::CleavingSystem,
            Loaded::Module(_) => Kind::HopfModule,
            Loaded::H2(_) => Kind::H2Datum,
            Loaded::H3(_) => Kind::H3Datum,
        }
    }
}

/// Errors that map to exit code 2.
#[derive(Debug)]
pub struct InputError(pub anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

/// Names accepted after `builtin:`.
pub const BUILTIN_DOCS: &[&str] = &[
    "H2",
    "H3",
    "C<n>",
    "C2^<n>",
    "h2-fixture",
    "h3-fixture",
    "h2-datum",
    "h3-datum",
    "h2-cleft",
    "h3-cleft",
    "clifford-<n>",
];

pub struct Loader {
    /// Field requested on the command line for builtins.
    pub field: Option<u32>,
}

impl Loader {
    fn builtin_field(&self, name: &str) -> FieldSpec {
        match self.field {
            Some(n) => FieldSpec::cyclotomic(n),
            None if name.starts_with("H3") || name.starts_with("h3") => FieldSpec::cyclotomic(3),
            None => FieldSpec::rationals(),
        }
    }

    /// Resolves `builtin:NAME` or a path.
    pub fn load(&self, target: &str) -> Result<Loaded> {
        if let Some(name) = target.strip_prefix("builtin:") {
            return self.builtin(name);
        }
        let path = Path::new(target);
        self.load_path(path)
    }

    pub fn load_path(&self, path: &Path) -> Result<Loaded> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let doc: Document = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        self.from_document(&doc, &base).with_context(|| format!("in {}", path.display()))
    }

    pub fn builtin(&self, name: &str) -> Result<Loaded> {
        let spec = self.builtin_field(name);
        Ok(match name {
            "h2-fixture" => Loaded::Crossed(catalog::h2_system(&catalog::h2_fixture_datum())?),
            "h3-fixture" => Loaded::Crossed(catalog::h3_system(&catalog::h3_fixture_datum(spec)?)?),
            "h2-datum" => Loaded::H2(catalog::h2_fixture_datum()),
            "h3-datum" => Loaded::H3(catalog::h3_fixture_datum(spec)?),
            "h2-cleft" | "h3-cleft" => {
                let cs = if name == "h2-cleft" {
                    catalog::h2_system(&catalog::h2_fixture_datum())?
                } else {
                    catalog::h3_system(&catalog::h3_fixture_datum(spec)?)?
                };
                let cp = coquasi_core::crossed::build_crossed_product(&cs)?;
                Loaded::Cleaving(coquasi_core::cleft::crossed_to_cleft(&cp)?)
            }
            _ => {
                if let Some(n) = name.strip_prefix("clifford-") {
                    let n: usize = n.parse().map_err(|_| anyhow!("unknown builtin {name:?}"))?;
                    if !(1..=4).contains(&n) {
                        bail!("clifford-<n> needs 1 ≤ n ≤ 4");
                    }
                    Loaded::Comodule(catalog::twisted_group_algebra(n))
                } else {
                    Loaded::Hopf(catalog::builtin_hopf(name, spec)?)
                }
            }
        })
    }

    fn reference(&self, r: &Reference, base: &Path) -> Result<Loaded> {
        match r {
            Reference::Name(s) => {
                if let Some(name) = s.strip_prefix("builtin:") {
                    self.builtin(name)
                } else {
                    let p: PathBuf = base.join(s);
                    self.load_path(&p)
                }
            }
            Reference::Inline(doc) => self.from_document(doc, base),
        }
    }

    fn host(&self, r: &Reference, base: &Path) -> Result<Arc<CoquasiHopf>> {
        match self.reference(r, base)? {
            Loaded::Hopf(h) => Ok(Arc::new(h)),
            other => bail!("host must be a coquasi_hopf document, found {}", other.kind().name()),
        }
    }

    pub fn from_document(&self, doc: &Document, base: &Path) -> Result<Loaded> {
        if doc.format != FORMAT {
            bail!("unsupported format {:?}, expected {FORMAT:?}", doc.format);
        }
        if doc.field == 0 {
            bail!("field must be a positive cyclotomic order");
        }
        let n = doc.field;
        let p = doc.payload.clone();
        Ok(match doc.kind {
            Kind::CoquasiBialgebra => {
                let j: BialgebraJson = serde_json::from_value(p)?;
                Loaded::Bialgebra(bialgebra(&j, n)?)
            }
            Kind::CoquasiHopf => {
                let j: HopfJson = serde_json::from_value(p)?;
                Loaded::Hopf(hopf(&j, n)?)
            }
            Kind::ComoduleAlgebra => {
                let j: ComoduleJson = serde_json::from_value(p)?;
                let host = self.host(&j.host, base)?;
                let algebra = algebra(&j.algebra, n)?;
                let dh = host.dim();
                let images = vectors(&j.coaction, n, algebra.dim() * dh, algebra.dim(), "coaction")?;
                Loaded::Comodule(ComoduleAlgebra::from_coaction_vectors(algebra, &images, host))
            }
            Kind::CrossedSystem => {
                let j: CrossedJson = serde_json::from_value(p)?;
                let host = self.host(&j.host, base)?;
                let r = algebra(&j.algebra, n)?;
                let (dh, dr) = (host.dim(), r.dim());
                let action = vectors(&j.action, n, dr, dh * dr, "action")?;
                let sigma = vmap(&vectors(&j.sigma, n, dr, dh * dh, "sigma")?, dh);
                let mut cs = CrossedSystem::new(r, host, action, sigma);
                if let Some(si) = &j.sigma_inv {
                    cs = cs.with_sigma_inverse(vmap(&vectors(si, n, dr, dh * dh, "sigma_inv")?, dh));
                }
                Loaded::Crossed(cs)
            }
            Kind::CleavingSystem => {
                let j: CleavingJson = serde_json::from_value(p)?;
                let a = match self.reference(&j.algebra, base)? {
                    Loaded::Comodule(a) => Arc::new(a),
                    other => bail!("cleaving system needs a comodule_algebra, found {}", other.kind().name()),
                };
                let (da, dh) = (a.dim(), a.host.dim());
                let gamma = vectors(&j.gamma, n, da, dh, "gamma")?;
                let delta = vectors(&j.delta, n, da, dh, "delta")?;
                Loaded::Cleaving(CleavingSystem::new(a, gamma, delta))
            }
            Kind::HopfModule => {
                let j: ModuleJson = serde_json::from_value(p)?;
                let system = match self.reference(&j.system, base)? {
                    Loaded::Crossed(cs) => Arc::new(cs),
                    other => bail!("hopf module needs a crossed_system, found {}", other.kind().name()),
                };
                let (dm, dr, dh) = (j.basis.len(), system.dim_r(), system.dim_h());
                let r_action = vectors(&j.r_action, n, dm, dm * dr, "r_action")?;
                let h_action = vectors(&j.h_action, n, dm, dm * dh, "h_action")?;
                let co = vectors(&j.coaction, n, dm * dh, dm, "coaction")?;
                let coaction = co
                    .iter()
                    .map(|v| v.nonzeros().map(|(k, c)| (k / dh, k % dh, c.clone())).collect())
                    .collect();
                Loaded::Module(CoquasiHopfModule { space: Space::new(j.basis.clone()), r_action, coaction, h_action, system })
            }
            Kind::H2Datum => {
                let j: H2Json = serde_json::from_value(p)?;
                let b = algebra(&j.algebra, n)?;
                let d = b.dim();
                let f = Matrix::from_columns(d, &vectors(&j.f, n, d, d, "f")?);
                let c = vector(&j.c, n, d, "c")?;
                Loaded::H2(H2Datum { b, f, c })
            }
            Kind::H3Datum => {
                let j: H3Json = serde_json::from_value(p)?;
                if n % 3 != 0 {
                    bail!("h3_datum needs a field with a primitive cube root of unity (field divisible by 3), got {n}");
                }
                let b = algebra(&j.algebra, n)?;
                let d = b.dim();
                Loaded::H3(H3Datum {
                    f: Matrix::from_columns(d, &vectors(&j.f, n, d, d, "f")?),
                    g: Matrix::from_columns(d, &vectors(&j.g, n, d, d, "g")?),
                    u1: vector(&j.u1, n, d, "u1")?,
                    u2: vector(&j.u2, n, d, "u2")?,
                    v1: vector(&j.v1, n, d, "v1")?,
                    v2: vector(&j.v2, n, d, "v2")?,
                    b,
                    field: FieldSpec::cyclotomic(n),
                })
            }
        })
    }
}

pub fn scalar(s: &ScalarJson, order: u32) -> Result<Scalar> {
    let r: Result<Scalar, ScalarError> = match s {
        ScalarJson::Text(t) => Scalar::parse(t, order),
        ScalarJson::Coeffs(c) => Scalar::from_coeff_strings(c, order),
        ScalarJson::Int(i) => Ok(Scalar::from_i64(*i)),
    };
    r.map_err(|e| match e {
        ScalarError::DivisionByZero => anyhow!("DivisionByZero: scalar {s:?} has a zero denominator"),
        e => anyhow!(e),
    })
}

pub fn vector(v: &[ScalarJson], order: u32, dim: usize, what: &str) -> Result<Vector> {
    if v.len() != dim {
        bail!("{what}: expected a vector of length {dim}, got {}", v.len());
    }
    Ok(Vector(v.iter().map(|s| scalar(s, order)).collect::<Result<_>>()?))
}

fn vectors(v: &[VecJson], order: u32, dim: usize, count: usize, what: &str) -> Result<Vec<Vector>> {
    if v.len() != count {
        bail!("{what}: expected {count} vectors, got {}", v.len());
    }
    v.iter().enumerate().map(|(i, x)| vector(x, order, dim, &format!("{what}[{i}]"))).collect()
}

fn vmap(values: &[Vector], dh: usize) -> VMap {
    VMap::from_fn(dh, 2, |ix| values[ix[0] * dh + ix[1]].clone())
}

fn algebra(j: &AlgebraJson, order: u32) -> Result<Algebra> {
    let d = j.basis.len();
    if d == 0 {
        bail!("algebra basis is empty");
    }
    let products = vectors(&j.products, order, d, d * d, "products")?;
    let unit = vector(&j.unit, order, d, "unit")?;
    Ok(Algebra::new(Space::new(j.basis.clone()), products, unit))
}

fn bialgebra(j: &BialgebraJson, order: u32) -> Result<CoquasiBialgebra> {
    let d = j.basis.len();
    let alg = algebra(&AlgebraJson { basis: j.basis.clone(), products: j.products.clone(), unit: j.unit.clone() }, order)?;
    if j.comult.len() != d {
        bail!("comult: expected {d} entries, got {}", j.comult.len());
    }
    let mut comult = Vec::with_capacity(d);
    for (i, terms) in j.comult.iter().enumerate() {
        let mut t = Vec::new();
        for (a, b, c) in terms {
            if *a >= d || *b >= d {
                bail!("comult[{i}]: index out of range");
            }
            t.push((*a, *b, scalar(c, order)?));
        }
        comult.push(t);
    }
    let counit = vector(&j.counit, order, d, "counit")?;
    let co = Coalgebra::new(alg.space.clone(), comult, counit.0);
    let omega = Functional { dim: d, arity: 3, values: vector(&j.omega, order, d * d * d, "omega")?.0 };
    match &j.omega_inv {
        Some(wi) => {
            let wi = Functional { dim: d, arity: 3, values: vector(wi, order, d * d * d, "omega_inv")?.0 };
            Ok(CoquasiBialgebra::with_inverse(co, alg, omega, wi))
        }
        None => CoquasiBialgebra::new(co, alg, omega).map_err(|e| anyhow!("omega: {e}")),
    }
}

fn hopf(j: &HopfJson, order: u32) -> Result<CoquasiHopf> {
    let base = bialgebra(&j.base, order)?;
    let d = base.dim();
    let s = Matrix::from_columns(d, &vectors(&j.antipode, order, d, d, "antipode")?);
    let alpha = Functional { dim: d, arity: 1, values: vector(&j.alpha, order, d, "alpha")?.0 };
    let beta = Functional { dim: d, arity: 1, values: vector(&j.beta, order, d, "beta")?.0 };
    let h = CoquasiHopf::new(base, s, alpha, beta);
    // f is only needed downstream; its absence is reported by the consumers
    Ok(match h.clone().with_twist_f() {
        Ok(x) => x,
        Err(_) => h,
    })
}

// ---- writing

/// Smallest cyclotomic order containing every scalar in the structure.
pub struct FieldCollector(pub FieldSpec);

impl FieldCollector {
    pub fn new(start: u32) -> Self {
        FieldCollector(FieldSpec::cyclotomic(start.max(1)))
    }

    pub fn scalar(&mut self, s: &Scalar) {
        if !s.is_rational() {
            self.0 = self.0.join(&s.field());
        }
    }

    pub fn vectors<'a>(&mut self, vs: impl IntoIterator<Item = &'a Vector>) {
        for v in vs {
            for x in &v.0 {
                self.scalar(x);
            }
        }
    }
}

fn sj(s: &Scalar, order: u32) -> ScalarJson {
    ScalarJson::Text(s.promote(order).to_string())
}

fn vj(v: &Vector, order: u32) -> VecJson {
    v.0.iter().map(|s| sj(s, order)).collect()
}

fn vsj(vs: &[Vector], order: u32) -> Vec<VecJson> {
    vs.iter().map(|v| vj(v, order)).collect()
}

fn algebra_json(a: &Algebra, order: u32) -> AlgebraJson {
    AlgebraJson {
        basis: (0..a.dim()).map(|i| a.space.label(i).to_string()).collect(),
        products: vsj(&a.products(), order),
        unit: vj(&a.one(), order),
    }
}

fn collect_algebra(fc: &mut FieldCollector, a: &Algebra) {
    fc.vectors(&a.products());
    fc.vectors([&a.one()]);
}

fn envelope(kind: Kind, field: u32, payload: impl Serialize) -> Document {
    Document {
        format: FORMAT.to_string(),
        kind,
        field,
        payload: serde_json::to_value(payload).expect("payload serializes"),
    }
}

fn bialgebra_json(h: &CoquasiBialgebra, order: u32) -> BialgebraJson {
    let d = h.dim();
    BialgebraJson {
        basis: (0..d).map(|i| h.label(i).to_string()).collect(),
        products: vsj(&h.algebra.products(), order),
        unit: vj(&h.one(), order),
        comult: (0..d)
            .map(|i| h.coalgebra.comult(i).iter().map(|(a, b, c)| (*a, *b, sj(c, order))).collect())
            .collect(),
        counit: h.coalgebra.counit_values().iter().map(|s| sj(s, order)).collect(),
        omega: h.omega.values.iter().map(|s| sj(s, order)).collect(),
        omega_inv: Some(h.omega_inv.values.iter().map(|s| sj(s, order)).collect()),
    }
}

fn collect_bialgebra(fc: &mut FieldCollector, h: &CoquasiBialgebra) {
    collect_algebra(fc, &h.algebra);
    for i in 0..h.dim() {
        for (_, _, c) in h.coalgebra.comult(i) {
            fc.scalar(c);
        }
    }
    for s in h.omega.values.iter().chain(&h.omega_inv.values).chain(h.coalgebra.counit_values()) {
        fc.scalar(s);
    }
}

fn hopf_json(h: &CoquasiHopf, order: u32) -> HopfJson {
    HopfJson {
        base: bialgebra_json(&h.base, order),
        antipode: vsj(&h.antipode.columns(), order),
        alpha: h.alpha.values.iter().map(|s| sj(s, order)).collect(),
        beta: h.beta.values.iter().map(|s| sj(s, order)).collect(),
    }
}

fn collect_hopf(fc: &mut FieldCollector, h: &CoquasiHopf) {
    collect_bialgebra(fc, &h.base);
    fc.vectors(&h.antipode.columns());
    for s in h.alpha.values.iter().chain(&h.beta.values) {
        fc.scalar(s);
    }
}

fn coaction_vectors(coaction: &[Vec<(usize, usize, Scalar)>], dm: usize, dh: usize) -> Vec<Vector> {
    coaction
        .iter()
        .map(|terms| {
            let mut v = Vector::zeros(dm * dh);
            for (a, h, c) in terms {
                v.add_at(a * dh + h, c);
            }
            v
        })
        .collect()
}

fn comodule_json(a: &ComoduleAlgebra, order: u32) -> ComoduleJson {
    ComoduleJson {
        host: Reference::Inline(Box::new(envelope(Kind::CoquasiHopf, order, hopf_json(&a.host, order)))),
        algebra: algebra_json(&a.algebra, order),
        coaction: vsj(&coaction_vectors(&a.coaction, a.dim(), a.host.dim()), order),
    }
}

fn collect_comodule(fc: &mut FieldCollector, a: &ComoduleAlgebra) {
    collect_hopf(fc, &a.host);
    collect_algebra(fc, &a.algebra);
    fc.vectors(&coaction_vectors(&a.coaction, a.dim(), a.host.dim()));
}

fn crossed_json(cs: &CrossedSystem, order: u32) -> CrossedJson {
    CrossedJson {
        host: Reference::Inline(Box::new(envelope(Kind::CoquasiHopf, order, hopf_json(&cs.host, order)))),
        algebra: algebra_json(&cs.r, order),
        action: vsj(&cs.action, order),
        sigma: vsj(&cs.sigma.values, order),
        sigma_inv: cs.sigma_inv.as_ref().map(|s| vsj(&s.values, order)),
    }
}

fn collect_crossed(fc: &mut FieldCollector, cs: &CrossedSystem) {
    collect_hopf(fc, &cs.host);
    collect_algebra(fc, &cs.r);
    fc.vectors(&cs.action);
    fc.vectors(&cs.sigma.values);
    if let Some(s) = &cs.sigma_inv {
        fc.vectors(&s.values);
    }
}

/// Serializes a structure with inline references.
pub fn to_document(x: &Loaded, min_field: u32) -> Document {
    let mut fc = FieldCollector::new(min_field);
    match x {
        Loaded::Bialgebra(h) => collect_bialgebra(&mut fc, h),
        Loaded::Hopf(h) => collect_hopf(&mut fc, h),
        Loaded::Comodule(a) => collect_comodule(&mut fc, a),
        Loaded::Crossed(cs) => collect_crossed(&mut fc, cs),
        Loaded::Cleaving(c) => {
            collect_comodule(&mut fc, &c.a);
            fc.vectors(c.gamma.iter().chain(&c.delta));
        }
        Loaded::Module(m) => {
            collect_crossed(&mut fc, &m.system);
            fc.vectors(m.r_action.iter().chain(&m.h_action));
            fc.vectors(&coaction_vectors(&m.coaction, m.dim(), m.system.dim_h()));
        }
        Loaded::H2(d) => {
            collect_algebra(&mut fc, &d.b);
            fc.vectors(d.f.columns().iter().chain([&d.c]));
        }
        Loaded::H3(d) => {
            fc.0 = fc.0.join(&d.field);
            collect_algebra(&mut fc, &d.b);
            fc.vectors(d.f.columns().iter().chain(&d.g.columns()));
            fc.vectors([&d.u1, &d.u2, &d.v1, &d.v2]);
        }
    }
    let n = fc.0.cyclotomic_order;
    match x {
        Loaded::Bialgebra(h) => envelope(Kind::CoquasiBialgebra, n, bialgebra_json(h, n)),
        Loaded::Hopf(h) => envelope(Kind::CoquasiHopf, n, hopf_json(h, n)),
        Loaded::Comodule(a) => envelope(Kind::ComoduleAlgebra, n, comodule_json(a, n)),
        Loaded::Crossed(cs) => envelope(Kind::CrossedSystem, n, crossed_json(cs, n)),
        Loaded::Cleaving(c) => envelope(
            Kind::CleavingSystem,
            n,
            CleavingJson {
                algebra: Reference::Inline(Box::new(envelope(Kind::ComoduleAlgebra, n, comodule_json(&c.a, n)))),
                gamma: vsj(&c.gamma, n),
                delta: vsj(&c.delta, n),
            },
        ),
        Loaded::Module(m) => envelope(
            Kind::HopfModule,
            n,
            ModuleJson {
                system: Reference::Inline(Box::new(envelope(Kind::CrossedSystem, n, crossed_json(&m.system, n)))),
                basis: (0..m.dim()).map(|i| m.space.label(i).to_string()).collect(),
                r_action: vsj(&m.r_action, n),
                coaction: vsj(&coaction_vectors(&m.coaction, m.dim(), m.system.dim_h()), n),
                h_action: vsj(&m.h_action, n),
            },
        ),
        Loaded::H2(d) => envelope(
            Kind::H2Datum,
            n,
            H2Json { algebra: algebra_json(&d.b, n), f: vsj(&d.f.columns(), n), c: vj(&d.c, n) },
        ),
        Loaded::H3(d) => envelope(
            Kind::H3Datum,
            n,
            H3Json {
                algebra: algebra_json(&d.b, n),
                f: vsj(&d.f.columns(), n),
                g: vsj(&d.g.columns(), n),
                u1: vj(&d.u1, n),
                u2: vj(&d.u2, n),
                v1: vj(&d.v1, n),
                v2: vj(&d.v2, n),
            },
        ),
    }
}

/// Pretty JSON with sorted keys.
pub fn to_json_string(v: &impl Serialize) -> String {
    let value = serde_json::to_value(v).expect("serializable");
    serde_json::to_string_pretty(&value).expect("serializable")
}
