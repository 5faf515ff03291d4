//! Command dispatch shared by the command-line tool and the fixture corpus.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_rational::BigRational;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::curve::{betti_and_degree, regularity_check, validate_curve, Skeleton, ToricDegree, TropicalCurve};
use crate::domain::{check_even_primitive, suitability_check, validate_delzant, wavefront, LineConfiguration, PolyhedralDomain};
use crate::error::{Error, Result};
use crate::io;
use crate::lattice::serialize_rational;
use crate::multiplicity::{
    all_roots, enumerate_count, ev_matrix_from_z, leaf_momentum, line_directions, mixed_h_product,
    multiplicity_det, splitting_check, Root, DEFAULT_KAPPA_CAP,
};
use crate::topology::{h1_order, leaf_directions, lens_parameters, piece_decomposition, surface_report, IntJsonOwned, LeafConstraints};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Multiplicity,
    H1,
    Surface,
    Pieces,
    Lens,
    Enumerate,
    Wavefront,
    Suitability,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "validate" => Command::Validate,
            "multiplicity" => Command::Multiplicity,
            "h1" => Command::H1,
            "surface" => Command::Surface,
            "pieces" => Command::Pieces,
            "lens" => Command::Lens,
            "enumerate" => Command::Enumerate,
            "wavefront" => Command::Wavefront,
            "suitability" => Command::Suitability,
            _ => return Err(Error::InvalidInput(format!("unknown command \"{s}\""))),
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Inputs {
    pub curve: Option<TropicalCurve>,
    pub domain: Option<PolyhedralDomain>,
    pub lines: Option<LineConfiguration>,
    pub degree: Option<(ToricDegree, Option<Vec<usize>>)>,
}

impl Inputs {
    pub fn load(
        curve: Option<&Path>,
        domain: Option<&Path>,
        lines: Option<&Path>,
        degree: Option<&Path>,
    ) -> Result<Self> {
        Ok(Inputs {
            curve: curve.map(io::load_curve).transpose()?,
            domain: domain.map(io::load_domain).transpose()?,
            lines: lines.map(io::load_lines).transpose()?,
            degree: degree.map(io::load_degree).transpose()?,
        })
    }

    fn curve(&self) -> Result<&TropicalCurve> {
        self.curve.as_ref().ok_or_else(|| Error::InvalidInput("--curve is required".into()))
    }

    fn domain(&self) -> Result<&PolyhedralDomain> {
        self.domain.as_ref().ok_or_else(|| Error::InvalidInput("--domain is required".into()))
    }

    fn lines(&self) -> Result<&LineConfiguration> {
        self.lines.as_ref().ok_or_else(|| Error::InvalidInput("--lines is required".into()))
    }

    /// Domain if given, otherwise lines.
    fn constraints(&self) -> Result<LeafConstraints<'_>> {
        match (&self.domain, &self.lines) {
            (Some(d), _) => Ok(LeafConstraints::Domain(d)),
            (None, Some(l)) => Ok(LeafConstraints::Lines(l)),
            (None, None) => Err(Error::InvalidInput("--domain or --lines is required".into())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Vertex id, or `leaf:N`.
    pub root: Option<String>,
    pub relaxed: bool,
    pub delta: Option<BigRational>,
    pub kappa_cap: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { root: None, relaxed: false, delta: None, kappa_cap: DEFAULT_KAPPA_CAP }
    }
}

/// A report and whether every check in it passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn parse_root(s: &Skeleton, root: &str) -> Result<Root> {
    if let Some(n) = root.strip_prefix("leaf:") {
        let j: usize = n.parse().map_err(|_| Error::InvalidInput(format!("bad leaf index \"{n}\"")))?;
        return Ok(Root::Leaf(j));
    }
    s.node_ids
        .iter()
        .position(|id| id == root)
        .map(Root::Vertex)
        .ok_or_else(|| Error::InvalidInput(format!("no vertex \"{root}\"")))
}

fn root_name(s: &Skeleton, r: Root) -> String {
    match r {
        Root::Vertex(v) => s.node_ids[v].clone(),
        Root::Leaf(j) => format!("leaf:{j}"),
    }
}

fn default_root(s: &Skeleton) -> String {
    if s.node_count() == 0 {
        "segment".into()
    } else {
        root_name(s, Root::Vertex(0))
    }
}

pub fn run(cmd: Command, inputs: &Inputs, opts: &Options) -> Result<Outcome> {
    match cmd {
        Command::Validate => validate(inputs, opts),
        Command::Multiplicity => multiplicity(inputs, opts),
        Command::H1 => {
            let r = h1_order(inputs.curve()?, inputs.constraints()?)?;
            Ok(Outcome { report: to_value(&r), ok: true })
        }
        Command::Surface => {
            let r = surface_report(inputs.curve()?, inputs.domain()?, opts.relaxed)?;
            Ok(Outcome { report: to_value(&r), ok: true })
        }
        Command::Pieces => {
            let r = piece_decomposition(inputs.curve()?, inputs.constraints()?, opts.relaxed)?;
            Ok(Outcome { report: to_value(&r), ok: true })
        }
        Command::Lens => {
            let r = lens_parameters(inputs.curve()?, inputs.constraints()?)?;
            Ok(Outcome { report: to_value(&r), ok: true })
        }
        Command::Enumerate => {
            let (degree, incidence) = match &inputs.degree {
                Some((d, i)) => (d.clone(), i.clone()),
                None => (betti_and_degree(inputs.curve()?).degree, None),
            };
            let r = enumerate_count(&degree, inputs.lines()?, incidence.as_deref(), opts.kappa_cap)?;
            Ok(Outcome { report: to_value(&r), ok: true })
        }
        Command::Wavefront => {
            let d = inputs.domain()?;
            let delta = opts.delta.as_ref().ok_or_else(|| Error::InvalidInput("--delta is required".into()))?;
            let c = wavefront(d, delta)?;
            let even = check_even_primitive(&c, d, opts.relaxed);
            let surface = if even.ok { Some(to_value(&surface_report(&c, d, opts.relaxed)?)) } else { None };
            let report = json!({
                "delta": to_value(&Rational(delta.clone())),
                "curve": to_value(&c),
                "betti": to_value(&betti_and_degree(&c)),
                "evenPrimitive": to_value(&even),
                "surface": surface,
            });
            Ok(Outcome { report, ok: even.ok })
        }
        Command::Suitability => {
            let r = suitability_check(inputs.curve()?, inputs.lines()?)?;
            Ok(Outcome { ok: r.pass, report: to_value(&r) })
        }
    }
}

#[derive(serde::Serialize)]
struct Rational(#[serde(serialize_with = "serialize_rational")] BigRational);

fn validate(inputs: &Inputs, opts: &Options) -> Result<Outcome> {
    let mut report = serde_json::Map::new();
    let mut ok = true;
    if let Some(c) = &inputs.curve {
        let v = validate_curve(c);
        ok &= v.ok;
        report.insert("curve".into(), to_value(&v));
        report.insert("betti".into(), to_value(&betti_and_degree(c)));
        let reg = match regularity_check(c) {
            Ok(r) => to_value(&r),
            Err(e) => json!({"error": {"code": e.code(), "message": e.to_string()}}),
        };
        report.insert("regularity".into(), reg);
    }
    if let Some(d) = &inputs.domain {
        match validate_delzant(d) {
            Ok(r) => {
                ok &= r.ok;
                report.insert("delzant".into(), to_value(&r));
            }
            Err(e) => {
                ok = false;
                report.insert("delzant".into(), json!({"ok": false, "error": {"code": e.code(), "message": e.to_string()}}));
            }
        }
        if let Some(c) = &inputs.curve {
            let r = check_even_primitive(c, d, opts.relaxed);
            ok &= r.ok;
            report.insert("evenPrimitive".into(), to_value(&r));
        }
    }
    if let (Some(c), Some(l)) = (&inputs.curve, &inputs.lines) {
        match suitability_check(c, l) {
            Ok(r) => {
                ok &= r.pass;
                report.insert("suitability".into(), to_value(&r));
            }
            Err(e) => {
                ok = false;
                report.insert("suitability".into(), json!({"pass": false, "error": {"code": e.code(), "message": e.to_string()}}));
            }
        }
    }
    if report.is_empty() {
        return Err(Error::InvalidInput("validate needs --curve or --domain".into()));
    }
    report.insert("ok".into(), Value::Bool(ok));
    Ok(Outcome { report: Value::Object(report), ok })
}

fn multiplicity(inputs: &Inputs, opts: &Options) -> Result<Outcome> {
    let c = inputs.curve()?;
    let s = Skeleton::from_curve(c)?;
    let z = match (&inputs.lines, &inputs.domain) {
        (Some(l), _) => line_directions(&s, l)?,
        (None, Some(d)) => leaf_directions(c, &s, LeafConstraints::Domain(d))?,
        (None, None) => return Err(Error::InvalidInput("--lines or --domain is required".into())),
    };
    let momenta = s
        .leaves
        .iter()
        .zip(&z)
        .map(|(l, zj)| leaf_momentum(&l.vector, zj).map(|r| to_value(&r)))
        .collect::<Result<Vec<_>>>()?;
    let root = opts.root.as_deref().map(|r| parse_root(&s, r)).transpose()?;
    let value = mixed_h_product(&s, &z, root)?;
    let roots: Vec<Root> = if s.node_count() == 0 { Vec::new() } else { all_roots(&s) };
    let mut by_root = serde_json::Map::new();
    for r in roots {
        let v = mixed_h_product(&s, &z, Some(r))?;
        by_root.insert(root_name(&s, r), to_value(&IntJsonOwned(v)));
    }
    let ev = ev_matrix_from_z(&s, &z, 0)?;
    let det = multiplicity_det(&ev)?;
    let mut splits = Vec::new();
    for e in 0..s.edges.len() {
        match splitting_check(&s, &z, e) {
            Ok(r) => splits.push(to_value(&r)),
            Err(Error::SplitDegenerate) => splits.push(json!({"edge": e, "error": "SPLIT_DEGENERATE"})),
            Err(err) => return Err(err),
        }
    }
    let agree = det.value == value;
    let report = json!({
        "leafMomenta": momenta,
        "root": root.map_or_else(|| default_root(&s), |r| root_name(&s, r)),
        "mixedHProduct": to_value(&IntJsonOwned(value)),
        "byRoot": by_root,
        "evMatrix": to_value(&ev),
        "determinant": to_value(&det),
        "agree": agree,
        "splits": splits,
    });
    Ok(Outcome { report, ok: agree })
}

/// One expectation of a fixture case: the value at a JSON pointer of the report.
#[derive(Clone, Debug, Deserialize)]
pub struct Expectation {
    pub pointer: String,
    pub value: Value,
    pub origin: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct FixtureCase {
    pub name: String,
    pub command: String,
    #[serde(default)]
    pub curve: Option<String>,
    #[serde(default)]
    pub domain: Option<String>,
    #[serde(default)]
    pub lines: Option<String>,
    #[serde(default)]
    pub degree: Option<String>,
    #[serde(default)]
    pub root: Option<String>,
    #[serde(default)]
    pub relaxed: bool,
    #[serde(default)]
    pub delta: Option<String>,
    #[serde(default)]
    pub error: Option<String>,
    #[serde(default)]
    pub exit: Option<i32>,
    #[serde(default)]
    pub expect: Vec<Expectation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Exit code convention: 0 ok, 2 failed validation, 1 error.
pub fn exit_code(r: &Result<Outcome>) -> i32 {
    match r {
        Ok(o) if o.ok => 0,
        Ok(_) => 2,
        Err(_) => 1,
    }
}

impl FixtureCase {
    pub fn run(&self, dir: &Path) -> Result<Outcome> {
        let p = |x: &Option<String>| x.as_ref().map(|f| dir.join(f));
        let (c, d, l, g): (Option<PathBuf>, _, _, _) = (p(&self.curve), p(&self.domain), p(&self.lines), p(&self.degree));
        let inputs = Inputs::load(c.as_deref(), d.as_deref(), l.as_deref(), g.as_deref())?;
        let delta = match &self.delta {
            Some(s) => Some(io::parse_rational_str(s).ok_or_else(|| Error::InvalidInput(format!("bad delta {s}")))?),
            None => None,
        };
        let opts = Options { root: self.root.clone(), relaxed: self.relaxed, delta, ..Options::default() };
        run(self.command.parse()?, &inputs, &opts)
    }

    pub fn check(&self, dir: &Path) -> CaseResult {
        let r = self.run(dir);
        let mut failures = Vec::new();
        let code = exit_code(&r);
        if let Some(want) = self.exit {
            if want != code {
                failures.push(format!("exit {code}, expected {want}"));
            }
        }
        match (&r, &self.error) {
            (Err(e), Some(want)) if e.code() == want => {}
            (Err(e), Some(want)) => failures.push(format!("error {}, expected {want}", e.code())),
            (Ok(_), Some(want)) => failures.push(format!("succeeded, expected {want}")),
            (Err(e), None) => failures.push(format!("error {}: {e}", e.code())),
            (Ok(o), None) => {
                for x in &self.expect {
                    if !io::pointer_matches(&o.report, &x.pointer, &x.value) {
                        let got = o.report.pointer(&x.pointer).cloned().unwrap_or(Value::Null);
                        failures.push(format!("{}: got {got}, expected {}", x.pointer, x.value));
                    }
                }
            }
        }
        CaseResult { name: self.name.clone(), passed: failures.is_empty(), detail: failures.join("; ") }
    }
}

pub fn load_corpus(path: &Path) -> Result<Vec<FixtureCase>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let doc = io::Document::parse(&path.display().to_string(), &text)?;
    let cases: Vec<FixtureCase> = serde_json::from_value(doc.root().clone())
        .map_err(|e| Error::Schema { pointer: String::new(), message: e.to_string() })?;
    for c in &cases {
        for x in &c.expect {
            if !matches!(x.origin.as_str(), "worked-example" | "hand-computed" | "definitional") {
                return Err(Error::Schema {
                    pointer: format!("/{}", c.name),
                    message: format!("unknown origin \"{}\"", x.origin),
                });
            }
        }
    }
    Ok(cases)
}
