//! Command-line front end: `check` runs the identity checkers on a document,
//! `build` runs the constructions and writes documents or tables.

pub mod doc;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use coquasi_core::catalog::{self, CrossedTable};
use coquasi_core::cleft::{build_morita, check_cleaving, cleft_to_crossed, crossed_to_cleft, morita_strictness, CleavingSystem, StrictnessKind};
use coquasi_core::comodule::{check_comodule_algebra, galois_can, twist_comodule_algebra, ComoduleAlgebra};
use coquasi_core::coquasi::{check_coquasi_bialgebra, check_coquasi_hopf, twist_bialgebra, CoquasiHopf, Twist};
use coquasi_core::crossed::{
    build_crossed_product, check_crossed_system, circledast_algebra, deform_by_a, heisenberg_double, twist_crossed_system,
    EquivalenceWitness,
};
use coquasi_core::hopf_modules::check_hopf_module;
use coquasi_core::linear::{Functional, Vector};
use coquasi_core::report::Report;

use doc::{InputError, Kind, Loaded, Loader, ScalarJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "coquasi", version, about = "Exact checks and constructions for coquasi-Hopf algebras and their crossed products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run every identity checker that applies to a document.
    Check(CheckArgs),
    /// Build a derived structure from a document.
    #[command(subcommand)]
    Build(Build),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Document kind, e.g. coquasi-hopf or crossed-system.
    #[arg(long)]
    pub kind: String,
    /// A document path or builtin:NAME.
    pub target: String,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Cyclotomic order for builtins.
    #[arg(long)]
    pub field: Option<u32>,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Write the result here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Cyclotomic order for builtins.
    #[arg(long)]
    pub field: Option<u32>,
    /// JSON output where the result is a report or table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct Input {
    /// A document path or builtin:NAME.
    pub target: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug)]
pub enum Build {
    /// Crossed system → its crossed product as a comodule algebra.
    CrossedProduct(Input),
    /// Host → the Heisenberg double H*#H.
    Heisenberg(Input),
    /// Comodule algebra A → the crossed system on Hom(H, A).
    Circledast(Input),
    /// Twist a host, comodule algebra or crossed system by τ.
    Twist {
        #[command(flatten)]
        input: Input,
        /// JSON array of dim(H)² scalars, τ(e_i, e_j) at i * dim H + j.
        #[arg(long)]
        tau: PathBuf,
    },
    /// Deform a crossed system by a convolution-invertible map H → R.
    Deform {
        #[command(flatten)]
        input: Input,
        /// JSON array of dim(H) vectors in R.
        #[arg(long)]
        a: PathBuf,
    },
    /// Cleaving system → crossed system.
    CleftToCrossed(Input),
    /// Crossed system → cleaving system of its crossed product.
    CrossedToCleft(Input),
    /// Morita context of a cleft extension and its strictness.
    Morita(Input),
    /// Bijectivity of the Galois map.
    Can(Input),
    /// Multiplication table of the crossed product of an H(2) or H(3) datum.
    Tables {
        /// An h2_datum or h3_datum document path or builtin:NAME
        #[arg(long)]
        datum: String,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses arguments and runs; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let input = e.downcast_ref::<InputError>().is_some();
            let _ = writeln!(err, "error: {e:#}");
            if input {
                EXIT_INPUT
            } else {
                EXIT_FAILED
            }
        }
    }
}

fn input_err(e: anyhow::Error) -> anyhow::Error {
    anyhow::Error::new(InputError(e))
}

fn load(target: &str, field: Option<u32>) -> Result<Loaded> {
    Loader { field }.load(target).map_err(input_err)
}

/// Cyclotomic order used to read auxiliary files next to `target`.
fn target_field(target: &str, field: Option<u32>) -> Result<u32> {
    if let Some(n) = field {
        return Ok(n);
    }
    if let Some(name) = target.strip_prefix("builtin:") {
        return Ok(if name.to_lowercase().starts_with("h3") { 3 } else { 1 });
    }
    let text = fs::read_to_string(target).with_context(|| format!("reading {target}")).map_err(input_err)?;
    let d: doc::Document = serde_json::from_str(&text).with_context(|| format!("parsing {target}")).map_err(input_err)?;
    Ok(d.field)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Check(a) => check(&a, out),
        Command::Build(b) => build(b, out),
    }
}

/// Runs the checkers that apply to a loaded structure.
pub fn check_loaded(x: &Loaded) -> Report {
    match x {
        Loaded::Bialgebra(h) => check_coquasi_bialgebra(h),
        Loaded::Hopf(h) => check_coquasi_hopf(h),
        Loaded::Comodule(a) => check_comodule_algebra(a),
        Loaded::Crossed(cs) => check_crossed_system(cs),
        Loaded::Cleaving(c) => check_cleaving(c),
        Loaded::Module(m) => check_hopf_module(m),
        Loaded::H2(d) => datum_report(catalog::check_h2_datum(d)),
        Loaded::H3(d) => datum_report(catalog::check_h3_datum(d)),
    }
}

fn datum_report(dc: catalog::DatumCheck) -> Report {
    let mut r = dc.report;
    if let Some(c) = dc.crossed {
        r.absorb("crossed system: ", c);
    }
    r
}

fn check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let kind = Kind::parse(&a.kind).ok_or_else(|| input_err(anyhow!("unknown kind {:?}", a.kind)))?;
    let x = load(&a.target, a.field)?;
    if x.kind() != kind {
        return Err(input_err(anyhow!("{} is a {} document, not {}", a.target, x.kind().name(), kind.name())));
    }
    let report = check_loaded(&x);
    if a.json {
        writeln!(out, "{}", doc::to_json_string(&report))?;
    } else {
        write!(out, "{report}")?;
        writeln!(out, "{}", summary(&report))?;
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
}

fn summary(r: &Report) -> String {
    if r.passed() {
        format!("OK: {} identities hold", r.checks.len())
    } else {
        format!("FAILED: {}", r.failed_identities().join(", "))
    }
}

/// Fails with exit 1 and the report if an input does not pass its checker.
fn require(x: &Loaded) -> Result<()> {
    let r = check_loaded(x);
    if !r.passed() {
        bail!("input fails its checks:\n{r}");
    }
    Ok(())
}

fn emit(x: &Loaded, min_field: u32, common: &Common, out: &mut dyn Write) -> Result<i32> {
    let text = doc::to_json_string(&doc::to_document(x, min_field));
    match &common.output {
        Some(p) => {
            fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))?;
            writeln!(out, "wrote {} ({})", p.display(), x.kind().name())?;
        }
        None => writeln!(out, "{text}")?,
    }
    Ok(EXIT_OK)
}

fn emit_text(text: &str, common: &Common, out: &mut dyn Write) -> Result<i32> {
    match &common.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => write!(out, "{text}")?,
    }
    Ok(EXIT_OK)
}

fn host_of(x: &Loaded) -> Result<Arc<CoquasiHopf>> {
    Ok(match x {
        Loaded::Hopf(h) => Arc::new(h.clone()),
        Loaded::Comodule(a) => a.host.clone(),
        Loaded::Crossed(cs) => cs.host.clone(),
        other => return Err(input_err(anyhow!("expected a coquasi_hopf document, found {}", other.kind().name()))),
    })
}

/// The comodule algebra behind a document, with a cleaving hint when there is one.
fn extension(x: &Loaded) -> Result<(Arc<ComoduleAlgebra>, Option<CleavingSystem>)> {
    Ok(match x {
        Loaded::Comodule(a) => (Arc::new(a.clone()), None),
        Loaded::Cleaving(c) => (c.a.clone(), Some(c.clone())),
        Loaded::Crossed(cs) => {
            let cp = build_crossed_product(cs)?;
            let c = crossed_to_cleft(&cp)?;
            (c.a.clone(), Some(c))
        }
        Loaded::H2(_) | Loaded::H3(_) => {
            let cs = match x {
                Loaded::H2(d) => catalog::h2_system(d)?,
                Loaded::H3(d) => catalog::h3_system(d)?,
                _ => unreachable!(),
            };
            let cp = build_crossed_product(&cs)?;
            let c = crossed_to_cleft(&cp)?;
            (c.a.clone(), Some(c))
        }
        other => return Err(input_err(anyhow!("expected a comodule algebra or cleaving system, found {}", other.kind().name()))),
    })
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(input_err)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(input_err)
}

fn scalars(v: Value, order: u32, len: usize, what: &str) -> Result<Vector> {
    let items: Vec<ScalarJson> = serde_json::from_value(v).map_err(|e| input_err(anyhow!("{what}: {e}")))?;
    doc::vector(&items, order, len, what).map_err(input_err)
}

fn build(b: Build, out: &mut dyn Write) -> Result<i32> {
    match b {
        Build::CrossedProduct(i) => {
            let x = load(&i.target, i.common.field)?;
            let Loaded::Crossed(cs) = &x else {
                return Err(input_err(anyhow!("crossed-product needs a crossed_system, found {}", x.kind().name())));
            };
            require(&x)?;
            let cp = build_crossed_product(cs)?;
            emit(&Loaded::Comodule((*cp.algebra).clone()), target_field(&i.target, i.common.field)?, &i.common, out)
        }
        Build::Heisenberg(i) => {
            let x = load(&i.target, i.common.field)?;
            let host = host_of(&x)?;
            let cp = heisenberg_double(host)?;
            emit(&Loaded::Comodule((*cp.algebra).clone()), target_field(&i.target, i.common.field)?, &i.common, out)
        }
        Build::Circledast(i) => {
            let x = load(&i.target, i.common.field)?;
            let (a, _) = extension(&x)?;
            let c = circledast_algebra(&a);
            emit(&Loaded::Crossed(c.system), target_field(&i.target, i.common.field)?, &i.common, out)
        }
        Build::Twist { input: i, tau } => {
            let x = load(&i.target, i.common.field)?;
            let n = target_field(&i.target, i.common.field)?;
            let host = host_of(&x)?;
            let d = host.dim();
            let values = scalars(read_json(&tau)?, n, d * d, "tau")?;
            let t = Twist::new(Functional { dim: d, arity: 2, values: values.0 }, &host.base.coalgebra)?;
            let y = match &x {
                Loaded::Hopf(h) => Loaded::Hopf(twist_bialgebra(h, &t)),
                Loaded::Comodule(a) => Loaded::Comodule(twist_comodule_algebra(a, &t)),
                Loaded::Crossed(cs) => Loaded::Crossed(twist_crossed_system(cs, &t)),
                _ => unreachable!(),
            };
            emit(&y, n, &i.common, out)
        }
        Build::Deform { input: i, a } => {
            let x = load(&i.target, i.common.field)?;
            let Loaded::Crossed(cs) = &x else {
                return Err(input_err(anyhow!("deform needs a crossed_system, found {}", x.kind().name())));
            };
            let n = target_field(&i.target, i.common.field)?;
            let items = match read_json(&a)? {
                Value::Array(items) => items,
                _ => return Err(input_err(anyhow!("a: expected an array of vectors"))),
            };
            if items.len() != cs.dim_h() {
                return Err(input_err(anyhow!("a: expected {} vectors, got {}", cs.dim_h(), items.len())));
            }
            let vs = items
                .into_iter()
                .enumerate()
                .map(|(k, v)| scalars(v, n, cs.dim_r(), &format!("a[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            let w = EquivalenceWitness::new(vs, &cs.host, &cs.r)?;
            emit(&Loaded::Crossed(deform_by_a(cs, &w)), n, &i.common, out)
        }
        Build::CleftToCrossed(i) => {
            let x = load(&i.target, i.common.field)?;
            let Loaded::Cleaving(c) = &x else {
                return Err(input_err(anyhow!("cleft-to-crossed needs a cleaving_system, found {}", x.kind().name())));
            };
            require(&x)?;
            let cc = cleft_to_crossed(c)?;
            emit(&Loaded::Crossed(cc.system), target_field(&i.target, i.common.field)?, &i.common, out)
        }
        Build::CrossedToCleft(i) => {
            let x = load(&i.target, i.common.field)?;
            let Loaded::Crossed(cs) = &x else {
                return Err(input_err(anyhow!("crossed-to-cleft needs a crossed_system, found {}", x.kind().name())));
            };
            require(&x)?;
            let cp = build_crossed_product(cs)?;
            let c = crossed_to_cleft(&cp)?;
            emit(&Loaded::Cleaving(c), target_field(&i.target, i.common.field)?, &i.common, out)
        }
        Build::Morita(i) => {
            let x = load(&i.target, i.common.field)?;
            let (a, hint) = extension(&x)?;
            morita(a, hint.as_ref(), &i.common, out)
        }
        Build::Can(i) => {
            let x = load(&i.target, i.common.field)?;
            let (a, _) = extension(&x)?;
            let g = galois_can(&a);
            let verdict = if g.bijective { "Bijective" } else { "NotBijective" };
            let text = if i.common.json {
                let v = json!({ "verdict": verdict, "report": g.report });
                format!("{}\n", doc::to_json_string(&v))
            } else {
                format!("{}{verdict}\n", g.report)
            };
            emit_text(&text, &i.common, out)?;
            Ok(if g.report.passed() { EXIT_OK } else { EXIT_FAILED })
        }
        Build::Tables { datum, common } => {
            let x = load(&datum, common.field)?;
            let table = match &x {
                Loaded::H2(d) => catalog::h2_table(d)?,
                Loaded::H3(d) => catalog::h3_table(d)?,
                other => return Err(input_err(anyhow!("tables needs an h2_datum or h3_datum, found {}", other.kind().name()))),
            };
            let text = if common.json { format!("{}\n", doc::to_json_string(&table_json(&table))) } else { table.render() };
            emit_text(&text, &common, out)
        }
    }
}

/// `{names, elements, products: {row: {col: value}}}` with rendered vectors.
pub fn table_json(t: &CrossedTable) -> Value {
    let space = t.algebra.space();
    let elements: serde_json::Map<String, Value> =
        t.names.iter().zip(&t.elements).map(|(n, e)| (n.clone(), Value::String(space.render(e)))).collect();
    let mut products = serde_json::Map::new();
    for (i, row) in t.names.iter().enumerate() {
        let cells: serde_json::Map<String, Value> =
            t.names.iter().enumerate().map(|(j, col)| (col.clone(), Value::String(space.render(&t.products[i][j])))).collect();
        products.insert(row.clone(), Value::Object(cells));
    }
    json!({ "names": t.names, "elements": elements, "products": products })
}

fn morita(a: Arc<ComoduleAlgebra>, hint: Option<&CleavingSystem>, common: &Common, out: &mut dyn Write) -> Result<i32> {
    let m = build_morita(a);
    let s = morita_strictness(&m, hint);
    let dims = format!(
        "dimensions: ring1 {}, ring2 {}, P {}, Q {}",
        m.ring1.dim(),
        m.ring2.dim(),
        m.bimod_p.dim(),
        m.bimod_q.dim()
    );
    let pair_ok = s.report.get("cleaving-pair").is_some_and(|c| c.passed());
    let verdict = match s.kind {
        StrictnessKind::Strict if pair_ok => "strict: yes; [δ,γ]=α·1; (γ,δ)=ε·1".to_string(),
        StrictnessKind::Strict => format!(
            "strict: yes; bracket family of {} pairs, pairing family of {} pairs",
            s.bracket_family.as_ref().map_or(0, Vec::len),
            s.pairing_family.as_ref().map_or(0, Vec::len)
        ),
        StrictnessKind::SurjectiveBracketOnly => "strict: no; [−,−] surjective, (−,−) not".to_string(),
        StrictnessKind::Neither => "strict: no".to_string(),
    };
    let passed = m.report.passed() && s.report.passed();
    let text = if common.json {
        let v = json!({
            "dimensions": {
                "ring1": m.ring1.dim(), "ring2": m.ring2.dim(), "P": m.bimod_p.dim(), "Q": m.bimod_q.dim(),
            },
            "strict": s.kind == StrictnessKind::Strict,
            "verdict": verdict,
            "context": m.report,
            "strictness": s.report,
        });
        format!("{}\n", doc::to_json_string(&v))
    } else {
        let mut t = format!("{}{}", m.report, s.report);
        if let Some(fam) = &s.bracket_family {
            for (k, (p, q)) in fam.iter().enumerate() {
                t += &format!("bracket witness {k}: p = {}; q = {}\n", render_map(&m, p), render_map(&m, q));
            }
        }
        t += &format!("{dims}\n{verdict}\n");
        t
    };
    emit_text(&text, common, out)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn render_map(m: &coquasi_core::cleft::MoritaContext, f: &[Vector]) -> String {
    let h = &m.a.host.base;
    let parts: Vec<String> = f.iter().enumerate().map(|(i, v)| format!("{} ↦ {}", h.label(i), m.a.space().render(v))).collect();
    format!("[{}]", parts.join(", "))
}
