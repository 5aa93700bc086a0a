//! JSON file formats. Every number is a string in the scalar grammar so that
//! radicals survive the round trip exactly.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::filters::{FarkasCertificate, MembershipAnswer};
use crate::polyhedra::{Flag, FlagKind, GammaPolyhedralSet, GammaPolyhedron};
use crate::prime::DefiningMatrix;
use crate::scalars::{fmt_rational, Rational, Scalar};
use crate::tropical::default_vars;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IneqEntry {
    pub u: Vec<i64>,
    pub gamma: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyhedronFile {
    pub ineqs: Vec<IneqEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolysetFile {
    pub pieces: Vec<PolyhedronFile>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SetOrPolyhedron {
    Set(PolysetFile),
    Single(PolyhedronFile),
}

fn json_error(text: &str, e: serde_json::Error) -> Error {
    if e.line() == 0 {
        return Error::parse_at(text, 0, e.to_string());
    }
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Parses a scalar and enforces the configured radical cap.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    Scalar::parse(text)?.check_capacity()
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    parse_scalar(text)?
        .to_rational()
        .ok_or_else(|| Error::Domain(format!("`{text}` is not rational")))
}

/// A defining matrix and its variable names.
pub fn parse_matrix(text: &str) -> Result<(DefiningMatrix, Vec<String>)> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| json_error(text, e))?;
    let n = match (&file.vars, file.rows.first()) {
        (Some(v), _) => v.len(),
        (None, Some(r)) if !r.is_empty() => r.len() - 1,
        _ => return Err(Error::InvalidMatrix("cannot infer the number of variables".into())),
    };
    let vars = file.vars.unwrap_or_else(|| default_vars(n));
    let rows = file
        .rows
        .iter()
        .map(|r| r.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok((DefiningMatrix::new(n, rows)?, vars))
}

pub fn matrix_json(m: &DefiningMatrix, vars: &[String]) -> Value {
    json!({
        "vars": vars,
        "rows": m.rows().iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn polyhedron_from_file(f: &PolyhedronFile, n: usize) -> Result<GammaPolyhedron> {
    let mut p = GammaPolyhedron::full(n);
    for row in &f.ineqs {
        p.push(row.u.clone(), parse_rational(&row.gamma)?)?;
    }
    Ok(p)
}

/// Accepts either `{"pieces": [...]}` or a bare polyhedron.
pub fn parse_polyset(text: &str, n: usize) -> Result<GammaPolyhedralSet> {
    let file: SetOrPolyhedron = serde_json::from_str(text).map_err(|e| json_error(text, e))?;
    let pieces = match file {
        SetOrPolyhedron::Set(s) => s.pieces,
        SetOrPolyhedron::Single(p) => vec![p],
    };
    GammaPolyhedralSet::new(
        pieces
            .iter()
            .map(|p| polyhedron_from_file(p, n))
            .collect::<Result<Vec<_>>>()?,
    )
}

pub fn parse_polyhedron(text: &str, n: usize) -> Result<GammaPolyhedron> {
    let file: PolyhedronFile = serde_json::from_str(text).map_err(|e| json_error(text, e))?;
    polyhedron_from_file(&file, n)
}

pub fn polyhedron_json(p: &GammaPolyhedron) -> Value {
    json!({
        "ineqs": p.rows().iter().map(|(u, g)| json!({"u": u, "gamma": fmt_rational(g)})).collect::<Vec<_>>(),
    })
}

pub fn polyset_json(s: &GammaPolyhedralSet) -> Value {
    json!({ "pieces": s.pieces().iter().map(polyhedron_json).collect::<Vec<_>>() })
}

pub fn scalars_json(v: &[Scalar]) -> Value {
    json!(v.iter().map(ToString::to_string).collect::<Vec<_>>())
}

pub fn flag_json(f: &Flag) -> Value {
    let dirs: Vec<Value> = f.dirs().iter().map(|d| scalars_json(d)).collect();
    match f.kind {
        FlagKind::Polyhedra => json!({"kind": "polyhedra", "vertex": scalars_json(f.base()), "dirs": dirs}),
        FlagKind::Cones => json!({"kind": "cones", "base": scalars_json(f.base()), "dirs": dirs}),
    }
}

pub fn certificate_json(c: &FarkasCertificate) -> Value {
    // Integers beyond i64 are emitted as strings rather than lossy numbers.
    let int = |k: &num_bigint::BigInt| -> Value {
        match i64::try_from(k) {
            Ok(x) => json!(x),
            Err(_) => json!(k.to_string()),
        }
    };
    json!({
        "m": int(&c.m),
        "m_l": c.m_l.iter().map(int).collect::<Vec<_>>(),
        "b": fmt_rational(&c.b),
    })
}

pub fn counterexample_json(x: &[Scalar]) -> Value {
    json!({ "point": scalars_json(x) })
}

pub fn membership_json(a: &MembershipAnswer) -> Value {
    json!({ "member": a.member, "piece_index": a.piece_index })
}

/// A scalar as both its exact form and a 12-digit decimal.
pub fn plot_scalar(s: &Scalar) -> Value {
    json!({ "exact": s.to_string(), "decimal": s.to_decimal(12) })
}
