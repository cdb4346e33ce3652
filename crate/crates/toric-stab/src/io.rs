//! File formats and parsing.
//!
//! All rationals cross the boundary as strings `"p/q"` in lowest terms.
//! Polytopes arrive as JSON with exactly one of `"halfspaces"` or
//! `"vertices"`; divisors as JSON lists or the inline `"0:13/14,2:5/7"`
//! syntax; piecewise-linear functions as `{"scale": i, "values": [[[x...],
//! v], ...]}` keyed by the deterministic lattice-point order. Every parser
//! here treats its input as untrusted.

use num_traits::Signed;
use serde_json::{Map, Value};

use crate::envelope::LatticeFunction;
use crate::error::{Error, Result};
use crate::geometry::{HalfSpace, LatticePolytope};
use crate::obstruction::DivisorSpec;
use crate::rational::{format_rat, parse_rat, Int, Rat, RatPoint};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn as_object(v: &Value, what: &str) -> Result<Map<String, Value>> {
    v.as_object()
        .cloned()
        .ok_or_else(|| bad(format!("{what} must be a JSON object")))
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be a JSON array")))
}

fn as_int(v: &Value, what: &str) -> Result<Int> {
    let n = v
        .as_i64()
        .ok_or_else(|| bad(format!("{what} must be a JSON integer")))?;
    Ok(Int::from(n))
}

fn as_rat(v: &Value, what: &str) -> Result<Rat> {
    let s = v
        .as_str()
        .ok_or_else(|| bad(format!("{what} must be a rational string \"p/q\"")))?;
    parse_rat(s)
}

fn int_vector(v: &Value, what: &str) -> Result<Vec<Int>> {
    as_array(v, what)?
        .iter()
        .map(|c| as_int(c, what))
        .collect()
}

/// Parses a polytope document. Accepts either the bare object
/// `{"dim": n, "halfspaces": [...]}` / `{"vertices": [...]}` or a fixture
/// dump `{"polytope": {...}, "divisors": [...]}`; in the latter case the
/// bundled divisors are returned as defaults.
pub fn parse_polytope_document(text: &str) -> Result<(LatticePolytope, Vec<DivisorSpec>)> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| bad(format!("polytope file: {e}")))?;
    let object = as_object(&value, "polytope file")?;
    if let Some(inner) = object.get("polytope") {
        let polytope = parse_polytope_value(inner)?;
        let divisors = match object.get("divisors") {
            Some(d) => parse_divisors_value(d)?,
            None => Vec::new(),
        };
        return Ok((polytope, divisors));
    }
    Ok((parse_polytope_value(&value)?, Vec::new()))
}

fn parse_polytope_value(value: &Value) -> Result<LatticePolytope> {
    let object = as_object(value, "polytope")?;
    let has_h = object.contains_key("halfspaces");
    let has_v = object.contains_key("vertices");
    if has_h == has_v {
        return Err(bad(
            "polytope needs exactly one of \"halfspaces\" or \"vertices\"",
        ));
    }
    if has_h {
        let dim = object
            .get("dim")
            .ok_or_else(|| bad("halfspace polytope needs \"dim\""))?
            .as_u64()
            .ok_or_else(|| bad("\"dim\" must be a positive integer"))? as usize;
        if dim == 0 {
            return Err(bad("\"dim\" must be a positive integer"));
        }
        let rows = as_array(object.get("halfspaces").unwrap(), "\"halfspaces\"")?;
        let mut halfspaces = Vec::with_capacity(rows.len());
        for row in rows {
            let row_object = as_object(row, "halfspace")?;
            let normal = int_vector(
                row_object
                    .get("normal")
                    .ok_or_else(|| bad("halfspace needs \"normal\""))?,
                "\"normal\"",
            )?;
            if normal.len() != dim {
                return Err(bad(format!(
                    "halfspace normal has {} entries, expected {}",
                    normal.len(),
                    dim
                )));
            }
            let offset = as_int(
                row_object
                    .get("offset")
                    .ok_or_else(|| bad("halfspace needs \"offset\""))?,
                "\"offset\"",
            )?;
            halfspaces.push(HalfSpace::new(normal, offset)?);
        }
        LatticePolytope::from_halfspaces(halfspaces)
    } else {
        let rows = as_array(object.get("vertices").unwrap(), "\"vertices\"")?;
        let mut vertices = Vec::with_capacity(rows.len());
        for row in rows {
            vertices.push(int_vector(row, "vertex")?);
        }
        if let Some(dim) = object.get("dim") {
            let dim = dim
                .as_u64()
                .ok_or_else(|| bad("\"dim\" must be a positive integer"))?
                as usize;
            if vertices.iter().any(|v| v.len() != dim) {
                return Err(bad("vertex dimensions do not match \"dim\""));
            }
        }
        LatticePolytope::from_vertices(vertices)
    }
}

/// `[{"facet": 0, "beta": "13/14"}, ...]`.
pub fn parse_divisors_json(text: &str) -> Result<Vec<DivisorSpec>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| bad(format!("divisor file: {e}")))?;
    parse_divisors_value(&value)
}

fn parse_divisors_value(value: &Value) -> Result<Vec<DivisorSpec>> {
    let rows = as_array(value, "divisor list")?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let object = as_object(row, "divisor")?;
        let facet_index = object
            .get("facet")
            .ok_or_else(|| bad("divisor needs \"facet\""))?
            .as_u64()
            .ok_or_else(|| bad("\"facet\" must be a nonnegative integer"))?
            as usize;
        let beta = as_rat(
            object
                .get("beta")
                .ok_or_else(|| bad("divisor needs \"beta\""))?,
            "\"beta\"",
        )?;
        out.push(DivisorSpec { facet_index, beta });
    }
    Ok(out)
}

/// Inline divisor syntax: comma-separated `facet:beta` pairs, e.g.
/// `0:13/14,2:5/7`. An empty string means no divisors.
pub fn parse_divisors_inline(text: &str) -> Result<Vec<DivisorSpec>> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for part in trimmed.split(',') {
        let (idx, beta) = part
            .split_once(':')
            .ok_or_else(|| bad(format!("divisor {part:?} is not facet:beta")))?;
        let facet_index: usize = idx
            .trim()
            .parse()
            .map_err(|_| bad(format!("facet index {idx:?} is not a nonnegative integer")))?;
        out.push(DivisorSpec {
            facet_index,
            beta: parse_rat(beta.trim())?,
        });
    }
    Ok(out)
}

/// Divisors: a file path when the argument names an existing file, else
/// inline syntax.
pub fn parse_divisors_arg(arg: &str) -> Result<Vec<DivisorSpec>> {
    if std::path::Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| bad(format!("cannot read divisor file {arg:?}: {e}")))?;
        return parse_divisors_json(&text);
    }
    parse_divisors_inline(arg)
}

/// Parses a piecewise-linear function file and validates its domain
/// against the polytope: the listed points must be exactly the scale-`i`
/// lattice points.
pub fn parse_pl_function_json(
    text: &str,
    polytope: &LatticePolytope,
) -> Result<LatticeFunction> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| bad(format!("function file: {e}")))?;
    let object = as_object(&value, "function file")?;
    let scale = object
        .get("scale")
        .ok_or_else(|| bad("function file needs \"scale\""))?
        .as_u64()
        .ok_or_else(|| bad("\"scale\" must be a positive integer"))?;
    if scale == 0 {
        return Err(bad("\"scale\" must be a positive integer"));
    }
    let rows = as_array(
        object
            .get("values")
            .ok_or_else(|| bad("function file needs \"values\""))?,
        "\"values\"",
    )?;
    let mut listed: Vec<(RatPoint, Rat)> = Vec::with_capacity(rows.len());
    for row in rows {
        let pair = as_array(row, "value entry")?;
        if pair.len() != 2 {
            return Err(bad("value entry must be [point, value]"));
        }
        let coords = as_array(&pair[0], "lattice point")?
            .iter()
            .map(|c| as_rat(c, "coordinate"))
            .collect::<Result<RatPoint>>()?;
        let v = as_rat(&pair[1], "value")?;
        listed.push((coords, v));
    }
    let expected = polytope.lattice_points(scale);
    if listed.len() != expected.len() {
        return Err(Error::DomainMismatch(format!(
            "function lists {} points, the scale-{scale} lattice has {}",
            listed.len(),
            expected.len()
        )));
    }
    let mut values = vec![Rat::from_integer(0.into()); expected.len()];
    let mut seen = vec![false; expected.len()];
    for (p, v) in listed {
        let Ok(k) = expected.binary_search(&p) else {
            return Err(Error::DomainMismatch(format!(
                "point {} is not a scale-{scale} lattice point of the polytope",
                crate::rational::format_point(&p)
            )));
        };
        if seen[k] {
            return Err(Error::DomainMismatch(format!(
                "point {} listed twice",
                crate::rational::format_point(&p)
            )));
        }
        seen[k] = true;
        values[k] = v;
    }
    LatticeFunction::new(polytope, scale, values)
}

pub fn rat_value(x: &Rat) -> Value {
    Value::String(format_rat(x))
}

pub fn point_value(p: &[Rat]) -> Value {
    Value::Array(p.iter().map(rat_value).collect())
}

pub fn polytope_to_value(polytope: &LatticePolytope) -> Value {
    let halfspaces: Vec<Value> = polytope
        .halfspaces()
        .iter()
        .map(|h| {
            let mut object = Map::new();
            object.insert(
                "normal".into(),
                Value::Array(
                    h.normal
                        .iter()
                        .map(|c| Value::String(c.to_string()))
                        .collect(),
                ),
            );
            object.insert("offset".into(), Value::String(h.offset.to_string()));
            Value::Object(object)
        })
        .collect();
    let mut object = Map::new();
    object.insert("dim".into(), Value::Number(polytope.dim().into()));
    object.insert("halfspaces".into(), Value::Array(halfspaces));
    Value::Object(object)
}

/// Emitted polytope files print integers as JSON numbers when they fit.
pub fn polytope_to_value_numeric(polytope: &LatticePolytope) -> Result<Value> {
    let int_num = |c: &Int| -> Result<Value> {
        let as_i64: i64 = c
            .try_into()
            .map_err(|_| bad("coordinate exceeds the JSON integer range"))?;
        Ok(Value::Number(as_i64.into()))
    };
    let halfspaces: Result<Vec<Value>> = polytope
        .halfspaces()
        .iter()
        .map(|h| {
            let normal: Result<Vec<Value>> = h.normal.iter().map(int_num).collect();
            let mut object = Map::new();
            object.insert("normal".into(), Value::Array(normal?));
            object.insert("offset".into(), int_num(&h.offset)?);
            Ok(Value::Object(object))
        })
        .collect();
    let mut object = Map::new();
    object.insert("dim".into(), Value::Number(polytope.dim().into()));
    object.insert("halfspaces".into(), Value::Array(halfspaces?));
    Ok(Value::Object(object))
}

pub fn divisors_to_value(divisors: &[DivisorSpec]) -> Value {
    Value::Array(
        divisors
            .iter()
            .map(|d| {
                let mut object = Map::new();
                object.insert("facet".into(), Value::Number(d.facet_index.into()));
                object.insert("beta".into(), rat_value(&d.beta));
                Value::Object(object)
            })
            .collect(),
    )
}

pub fn lattice_function_to_value(f: &LatticeFunction) -> Value {
    let rows: Vec<Value> = f
        .points
        .iter()
        .zip(&f.values)
        .map(|(p, v)| Value::Array(vec![point_value(p), rat_value(v)]))
        .collect();
    let mut object = Map::new();
    object.insert("scale".into(), Value::Number(f.scale.into()));
    object.insert("values".into(), Value::Array(rows));
    Value::Object(object)
}

/// FNV-1a 64-bit digest, hex. Cheap deterministic input fingerprint for
/// report reproducibility checks; not a cryptographic hash.
pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// Rendering helper for signed rational vectors: `(a, b, c)`.
pub fn render_vector(v: &[Rat]) -> String {
    crate::rational::format_point(v)
}

pub fn is_negative(x: &Rat) -> bool {
    x.is_negative()
}
