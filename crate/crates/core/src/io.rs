//! JSON input and canonical output.
//!
//! Rationals are strings `"p/q"` or `"p"` (integers are also accepted as JSON
//! numbers); integers are JSON numbers or decimal strings. Syntax errors carry
//! a line and column, shape errors a JSON pointer.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::curve::{Edge, ToricDegree, TropicalCurve, Vertex};
use crate::domain::{Facet, Line, LineConfiguration, PolyhedralDomain};
use crate::error::{Error, Result};
use crate::lattice::{IntVector, RationalVector};

/// A parsed document together with its source text, for positioned errors.
pub struct Document<'a> {
    path: String,
    text: &'a str,
    root: Value,
}

impl<'a> Document<'a> {
    pub fn parse(path: &str, text: &'a str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Ok(Document { path: path.to_string(), text, root })
    }

    pub fn root(&self) -> &Value {
        &self.root
    }

    /// Parse error located at the first occurrence of `literal` in the source.
    fn parse_error_at(&self, literal: &str, message: String) -> Error {
        let needle = format!("\"{literal}\"");
        let (line, column) = match self.text.find(&needle) {
            Some(off) => {
                let before = &self.text[..off];
                let line = before.matches('\n').count() + 1;
                let column = off - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                (line, column)
            }
            None => (0, 0),
        };
        Error::Parse { path: self.path.clone(), line, column, message }
    }
}

fn schema(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema { pointer: pointer.to_string(), message: message.into() }
}

fn field<'v>(obj: &'v Map<String, Value>, ptr: &str, key: &str) -> Result<&'v Value> {
    obj.get(key).ok_or_else(|| schema(&format!("{ptr}/{key}"), format!("missing field \"{key}\"")))
}

fn object<'v>(v: &'v Value, ptr: &str) -> Result<&'v Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(ptr, "expected an object"))
}

fn array<'v>(v: &'v Value, ptr: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| schema(ptr, "expected an array"))
}

fn string<'v>(v: &'v Value, ptr: &str) -> Result<&'v str> {
    v.as_str().ok_or_else(|| schema(ptr, "expected a string"))
}

fn usize_of(v: &Value, ptr: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| schema(ptr, "expected a nonnegative integer"))
}

pub fn parse_int(doc: &Document, v: &Value, ptr: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(schema(ptr, format!("{n} is not an integer")))
            }
        }
        Value::String(s) => {
            BigInt::from_str(s.trim()).map_err(|_| doc.parse_error_at(s, format!("\"{s}\" is not an integer")))
        }
        _ => Err(schema(ptr, "expected an integer")),
    }
}

/// Parses `"p/q"`, `"p"`; zero denominators are rejected.
pub fn parse_rational_str(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (BigInt::from_str(n.trim()).ok()?, BigInt::from_str(d.trim()).ok()?),
        None => (BigInt::from_str(s).ok()?, BigInt::from(1)),
    };
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

pub fn parse_rational(doc: &Document, v: &Value, ptr: &str) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational_str(s)
            .ok_or_else(|| doc.parse_error_at(s, format!("\"{s}\" is not a rational \"p/q\" with q != 0"))),
        Value::Number(_) => parse_int(doc, v, ptr).map(BigRational::from_integer),
        _ => Err(schema(ptr, "expected a rational string \"p/q\"")),
    }
}

fn int_vector(doc: &Document, v: &Value, ptr: &str, dim: Option<usize>) -> Result<IntVector> {
    let a = array(v, ptr)?;
    if let Some(n) = dim {
        if a.len() != n {
            return Err(schema(ptr, format!("expected {n} coordinates, got {}", a.len())));
        }
    }
    let coords = a
        .iter()
        .enumerate()
        .map(|(i, x)| parse_int(doc, x, &format!("{ptr}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    IntVector::new(coords).map_err(|e| schema(ptr, e.to_string()))
}

fn rational_vector(doc: &Document, v: &Value, ptr: &str, dim: usize) -> Result<RationalVector> {
    let a = array(v, ptr)?;
    if a.len() != dim {
        return Err(schema(ptr, format!("expected {dim} coordinates, got {}", a.len())));
    }
    let coords = a
        .iter()
        .enumerate()
        .map(|(i, x)| parse_rational(doc, x, &format!("{ptr}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    RationalVector::new(coords).map_err(|e| schema(ptr, e.to_string()))
}

fn dim_of(obj: &Map<String, Value>, ptr: &str) -> Result<usize> {
    let n = usize_of(field(obj, ptr, "dim")?, &format!("{ptr}/dim"))?;
    if n < 2 {
        return Err(schema(&format!("{ptr}/dim"), "dimension must be at least 2"));
    }
    Ok(n)
}

pub fn curve_from_doc(doc: &Document) -> Result<TropicalCurve> {
    let obj = object(doc.root(), "")?;
    let dim = dim_of(obj, "")?;
    let verts = array(field(obj, "", "vertices")?, "/vertices")?;
    let mut vertices = Vec::with_capacity(verts.len());
    for (i, v) in verts.iter().enumerate() {
        let ptr = format!("/vertices/{i}");
        let o = object(v, &ptr)?;
        let id = string(field(o, &ptr, "id")?, &format!("{ptr}/id"))?.to_string();
        let pos = rational_vector(doc, field(o, &ptr, "pos")?, &format!("{ptr}/pos"), dim)?;
        vertices.push(Vertex { id, pos });
    }
    let index = |id: &str, ptr: &str| -> Result<usize> {
        vertices
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| schema(ptr, format!("unknown vertex \"{id}\"")))
    };
    let es = array(field(obj, "", "edges")?, "/edges")?;
    let mut edges = Vec::with_capacity(es.len());
    for (i, e) in es.iter().enumerate() {
        let ptr = format!("/edges/{i}");
        let o = object(e, &ptr)?;
        let tail = index(string(field(o, &ptr, "tail")?, &format!("{ptr}/tail"))?, &format!("{ptr}/tail"))?;
        let head = match o.get("head") {
            None | Some(Value::Null) => None,
            Some(h) => Some(index(string(h, &format!("{ptr}/head"))?, &format!("{ptr}/head"))?),
        };
        let dir = int_vector(doc, field(o, &ptr, "dir")?, &format!("{ptr}/dir"), Some(dim))?;
        let weight = match o.get("weight") {
            None => BigInt::from(1),
            Some(w) => parse_int(doc, w, &format!("{ptr}/weight"))?,
        };
        let leaf_label = match o.get("leaf_label") {
            None | Some(Value::Null) => None,
            Some(l) => Some(usize_of(l, &format!("{ptr}/leaf_label"))?),
        };
        edges.push(Edge { tail, head, dir, weight, leaf_label });
    }
    TropicalCurve::new(dim, vertices, edges)
}

pub fn domain_from_doc(doc: &Document) -> Result<PolyhedralDomain> {
    let obj = object(doc.root(), "")?;
    let dim = dim_of(obj, "")?;
    let fs = array(field(obj, "", "facets")?, "/facets")?;
    let mut facets = Vec::with_capacity(fs.len());
    for (i, f) in fs.iter().enumerate() {
        let ptr = format!("/facets/{i}");
        let o = object(f, &ptr)?;
        let normal = int_vector(doc, field(o, &ptr, "normal")?, &format!("{ptr}/normal"), Some(dim))?;
        let offset = parse_rational(doc, field(o, &ptr, "offset")?, &format!("{ptr}/offset"))?;
        facets.push(Facet { normal, offset });
    }
    PolyhedralDomain::new(dim, facets)
}

pub fn lines_from_doc(doc: &Document) -> Result<LineConfiguration> {
    let obj = object(doc.root(), "")?;
    let ls = array(field(obj, "", "lines")?, "/lines")?;
    let mut lines = Vec::with_capacity(ls.len());
    for (i, l) in ls.iter().enumerate() {
        let ptr = format!("/lines/{i}");
        let o = object(l, &ptr)?;
        let dir = int_vector(doc, field(o, &ptr, "dir")?, &format!("{ptr}/dir"), None)?;
        let base = rational_vector(doc, field(o, &ptr, "point")?, &format!("{ptr}/point"), dir.dim())?;
        lines.push(Line { base, dir });
    }
    LineConfiguration::new(lines)
}

/// `{"degree": [[..], ..], "incidence": [..]?}`.
pub fn degree_from_doc(doc: &Document) -> Result<(ToricDegree, Option<Vec<usize>>)> {
    let obj = object(doc.root(), "")?;
    let ds = array(field(obj, "", "degree")?, "/degree")?;
    let vectors = ds
        .iter()
        .enumerate()
        .map(|(i, v)| int_vector(doc, v, &format!("/degree/{i}"), None))
        .collect::<Result<Vec<_>>>()?;
    let incidence = match obj.get("incidence") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            array(v, "/incidence")?
                .iter()
                .enumerate()
                .map(|(i, x)| usize_of(x, &format!("/incidence/{i}")))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok((ToricDegree { vectors }, incidence))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

pub fn load_curve(path: &Path) -> Result<TropicalCurve> {
    let text = read(path)?;
    curve_from_doc(&Document::parse(&path.display().to_string(), &text)?)
}

pub fn load_domain(path: &Path) -> Result<PolyhedralDomain> {
    let text = read(path)?;
    domain_from_doc(&Document::parse(&path.display().to_string(), &text)?)
}

pub fn load_lines(path: &Path) -> Result<LineConfiguration> {
    let text = read(path)?;
    lines_from_doc(&Document::parse(&path.display().to_string(), &text)?)
}

pub fn load_degree(path: &Path) -> Result<(ToricDegree, Option<Vec<usize>>)> {
    let text = read(path)?;
    degree_from_doc(&Document::parse(&path.display().to_string(), &text)?)
}

pub fn parse_curve(text: &str) -> Result<TropicalCurve> {
    curve_from_doc(&Document::parse("<input>", text)?)
}

pub fn parse_domain(text: &str) -> Result<PolyhedralDomain> {
    domain_from_doc(&Document::parse("<input>", text)?)
}

pub fn parse_lines(text: &str) -> Result<LineConfiguration> {
    lines_from_doc(&Document::parse("<input>", text)?)
}

/// Pretty JSON with a trailing newline; key order follows the types.
pub fn emit<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

impl Serialize for PolyhedralDomain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_json::json!({"dim": self.dim(), "facets": self.facets()}).serialize(s)
    }
}

/// Value at a JSON pointer compared with an expected value; integers given as
/// strings and numbers compare equal.
pub fn pointer_matches(report: &Value, pointer: &str, expected: &Value) -> bool {
    let Some(actual) = report.pointer(pointer) else {
        return false;
    };
    values_equal(actual, expected)
}

fn values_equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::String(y)) | (Value::String(y), Value::Number(x)) => {
            BigInt::from_str(y).ok().zip(x.as_i64()).is_some_and(|(y, x)| y.to_i64() == Some(x))
        }
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| values_equal(p, q)),
        _ => a == b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIPOD: &str = r#"{
  "dim": 2,
  "vertices": [{"id": "v", "pos": ["1/2", "0"]}, {"id": "a", "pos": ["-1/2", "0"]}],
  "edges": [
    {"tail": "v", "head": "a", "dir": [-1, 0], "weight": 1, "leaf_label": null},
    {"tail": "v", "head": null, "dir": [0, 1], "weight": 1, "leaf_label": null},
    {"tail": "v", "head": null, "dir": [1, -1], "weight": 1, "leaf_label": null}
  ]
}"#;

    #[test]
    fn round_trip_is_stable() {
        let c = parse_curve(TRIPOD).unwrap();
        let once = emit(&c);
        let twice = emit(&parse_curve(&once).unwrap());
        assert_eq!(once, twice);
        assert!(once.contains("\"1/2\""));
    }

    #[test]
    fn zero_denominator_is_a_parse_error() {
        let bad = TRIPOD.replace("\"1/2\"", "\"1/0\"");
        let e = parse_curve(&bad).unwrap_err();
        assert_eq!(e.code(), "PARSE_ERROR");
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            _ => unreachable!(),
        }
    }

    #[test]
    fn missing_dir_points_at_the_field() {
        let bad = TRIPOD.replacen("\"dir\": [-1, 0], ", "", 1);
        match parse_curve(&bad).unwrap_err() {
            Error::Schema { pointer, .. } => assert_eq!(pointer, "/edges/0/dir"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        match parse_curve("{\n  \"dim\": 2,\n  oops\n}").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 3)),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn big_integers_as_strings() {
        let d = parse_domain(r#"{"dim": 2, "facets": [{"normal": [1, 0], "offset": "-12345678901234567890123/7"}]}"#)
            .unwrap();
        let out = emit(&d);
        assert!(out.contains("\"-12345678901234567890123/7\""));
    }
}
