//! JSON model files. One document per model; tensors are sparse maps keyed
//! by comma-joined 1-based indices ("1,2,3"); scalars are JSON integers or
//! "p/q" strings; omitted entries are zero. Symmetry closures are never
//! auto-completed: a file must list every nonzero component it intends, and
//! inconsistent components are rejected by the validating constructors.

use crate::algebroid::{CourantModel, FiberBlock, ModelError};
use crate::genconn::{ConnError, GenConnection};
use crate::liealg::{LieAlgebra, LieError};
use crate::linalg::{Mat, Metric};
use crate::rat::{fmt_q, parse_q, qi, Q};
use crate::tensor::DenseTensor;
use num_traits::{One, Zero};
use serde::Deserialize;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::path::Path;

pub type Entries = BTreeMap<String, ScalarValue>;

/// An exact scalar as it appears in a file: an integer, or "p/q" text.
/// Anything else (floats in particular) is rejected at parse time.
#[derive(Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum ScalarValue {
    Int(i64),
    Text(String),
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default)]
    pub name: Option<String>,
    pub base: BaseFile,
    #[serde(default)]
    pub h: Entries,
    #[serde(default)]
    pub fiber: Option<FiberFile>,
    /// keyed "x,a,b": ω_{e_x} f_b = Σ_a ω[x,a,b] f_a
    #[serde(default)]
    pub omega: Entries,
    /// keyed "x,y,r": F(e_x, e_y) = Σ_r F[x,y,r] f_r
    #[serde(default)]
    pub f: Entries,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct BaseFile {
    pub dim: usize,
    #[serde(default)]
    pub bracket: Entries,
    pub metric: Entries,
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct FiberFile {
    pub dim: usize,
    #[serde(default)]
    pub bracket: Entries,
    pub pairing: Entries,
}

/// The seven connection tensors, same sparse conventions as model files.
/// Missing fields are zero tensors.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
pub struct ConnectionFile {
    #[serde(default)]
    pub a: Entries,
    #[serde(default)]
    pub b_plus: Entries,
    #[serde(default)]
    pub b_minus: Entries,
    #[serde(default)]
    pub c: Entries,
    #[serde(default)]
    pub l: Entries,
    #[serde(default)]
    pub w: Entries,
    #[serde(default)]
    pub n: Entries,
}

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("cannot read {path}: {why}")]
    Io { path: String, why: String },
    #[error("json parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: key '{key}' is not a comma-joined list of {arity} 1-based indices")]
    BadKey {
        field: String,
        key: String,
        arity: usize,
    },
    #[error("{field}: key '{key}' is out of range for axis sizes {shape:?} (indices are 1-based)")]
    KeyRange {
        field: String,
        key: String,
        shape: Vec<usize>,
    },
    #[error("{field}['{key}']: '{text}' is not an exact rational (use integers or \"p/q\")")]
    BadScalar {
        field: String,
        key: String,
        text: String,
    },
    #[error("omega/f entries supplied without a fiber block")]
    OrphanFiberData,
    #[error("invalid flag value: {why}")]
    Flag { why: String },
    #[error("fiber algebra: {0}")]
    FiberAlgebra(LieError),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("connection: {0}")]
    Connection(ConnError),
}

impl FileError {
    /// CLI convention: 2 for malformed input, 1 for a mathematical
    /// rejection of well-formed input.
    pub fn exit_code(&self) -> i32 {
        match self {
            FileError::Model(_) | FileError::FiberAlgebra(_) | FileError::Connection(_) => 1,
            _ => 2,
        }
    }
}

fn parse_key(field: &str, key: &str, shape: &[usize]) -> Result<Vec<usize>, FileError> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != shape.len() {
        return Err(FileError::BadKey {
            field: field.into(),
            key: key.into(),
            arity: shape.len(),
        });
    }
    let mut idx = Vec::with_capacity(parts.len());
    for (part, &axis) in parts.iter().zip(shape) {
        let i: usize = part.parse().map_err(|_| FileError::BadKey {
            field: field.into(),
            key: key.into(),
            arity: shape.len(),
        })?;
        if i == 0 || i > axis {
            return Err(FileError::KeyRange {
                field: field.into(),
                key: key.into(),
                shape: shape.to_vec(),
            });
        }
        idx.push(i - 1);
    }
    Ok(idx)
}

fn scalar(field: &str, key: &str, v: &ScalarValue) -> Result<Q, FileError> {
    match v {
        ScalarValue::Int(n) => Ok(qi(*n)),
        ScalarValue::Text(t) => parse_q(t).ok_or_else(|| FileError::BadScalar {
            field: field.into(),
            key: key.into(),
            text: t.clone(),
        }),
    }
}

fn dense(field: &str, entries: &Entries, shape: &[usize]) -> Result<DenseTensor, FileError> {
    let mut t = DenseTensor::zeros(shape);
    for (key, v) in entries {
        let idx = parse_key(field, key, shape)?;
        t.set(&idx, scalar(field, key, v)?);
    }
    Ok(t)
}

fn matrix(field: &str, entries: &Entries, n: usize) -> Result<Mat, FileError> {
    let t = dense(field, entries, &[n, n])?;
    Ok(Mat::from_fn(n, n, |i, j| t.get(&[i, j]).clone()))
}

pub fn parse_model(text: &str) -> Result<ModelFile, FileError> {
    Ok(serde_json::from_str(text)?)
}

pub fn build_model(file: &ModelFile) -> Result<CourantModel, FileError> {
    let n = file.base.dim;
    let bracket = dense("base.bracket", &file.base.bracket, &[n, n, n])?;
    let metric = matrix("base.metric", &file.base.metric, n)?;
    let h = dense("h", &file.h, &[n, n, n])?;
    let fiber = match &file.fiber {
        Some(fb) => {
            let m = fb.dim;
            let fbracket = dense("fiber.bracket", &fb.bracket, &[m, m, m])?;
            let pairing = matrix("fiber.pairing", &fb.pairing, m)?;
            let algebra =
                LieAlgebra::new(m, fbracket, Some(pairing)).map_err(FileError::FiberAlgebra)?;
            let omega_t = dense("omega", &file.omega, &[n, m, m])?;
            let omega: Vec<Mat> = (0..n)
                .map(|x| Mat::from_fn(m, m, |a, b| omega_t.get(&[x, a, b]).clone()))
                .collect();
            let f = dense("f", &file.f, &[n, n, m])?;
            Some(FiberBlock { algebra, omega, f })
        }
        None => {
            if !file.omega.is_empty() || !file.f.is_empty() {
                return Err(FileError::OrphanFiberData);
            }
            None
        }
    };
    let mut base = LieAlgebra::new(n, bracket, None).map_err(ModelError::Base)?;
    // When the supplied metric happens to be ad-invariant it doubles as an
    // invariant pairing on the base algebra; invariant-subspace computations
    // key off that field. A degenerate metric is reported by the model
    // constructor below, not here.
    if let Ok(gm) = Metric::new(metric.clone()) {
        if base.invariance_witness(&gm).is_none() {
            base.pairing = Some(gm);
        }
    }
    let name = file.name.clone().unwrap_or_else(|| "model".into());
    Ok(CourantModel::new(&name, base, metric, h, fiber)?)
}

pub fn load_model(path: &Path) -> Result<CourantModel, FileError> {
    let text = std::fs::read_to_string(path).map_err(|e| FileError::Io {
        path: path.display().to_string(),
        why: e.to_string(),
    })?;
    build_model(&parse_model(&text)?)
}

pub fn build_connection(
    model: &CourantModel,
    file: &ConnectionFile,
) -> Result<GenConnection, FileError> {
    let (n, m) = (model.n(), model.m());
    GenConnection::new(
        model,
        dense("a", &file.a, &[m, n, n])?,
        dense("b_plus", &file.b_plus, &[n, n, n])?,
        dense("b_minus", &file.b_minus, &[n, n, n])?,
        dense("c", &file.c, &[n, m, m])?,
        dense("l", &file.l, &[m, m, m])?,
        dense("w", &file.w, &[m, n, n])?,
        dense("n", &file.n, &[n, m, m])?,
    )
    .map_err(FileError::Connection)
}

pub fn parse_connection(text: &str) -> Result<ConnectionFile, FileError> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_connection(model: &CourantModel, path: &Path) -> Result<GenConnection, FileError> {
    let text = std::fs::read_to_string(path).map_err(|e| FileError::Io {
        path: path.display().to_string(),
        why: e.to_string(),
    })?;
    build_connection(model, &parse_connection(&text)?)
}

/// Nonzero entries of a tensor as a sparse JSON object with 1-based
/// comma-joined keys; integers become JSON numbers, everything else "p/q"
/// text. Keys come out sorted (lexicographically), so the result is
/// byte-deterministic.
pub fn tensor_entries(t: &DenseTensor) -> Value {
    let mut map = Map::new();
    for idx in t.indices() {
        let v = t.get(&idx);
        if v.is_zero() {
            continue;
        }
        let key: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        map.insert(key.join(","), scalar_value(v));
    }
    Value::Object(map)
}

pub fn scalar_value(q: &Q) -> Value {
    if q.denom().is_one() {
        match q.numer().to_string().parse::<i64>() {
            Ok(n) => Value::from(n),
            Err(_) => Value::from(fmt_q(q)),
        }
    } else {
        Value::from(fmt_q(q))
    }
}

fn matrix_entries(m: &Mat) -> Value {
    let t = DenseTensor::from_fn(&[m.rows, m.cols], |i| m[(i[0], i[1])].clone());
    tensor_entries(&t)
}

/// Canonical file form of a model: the exact inverse of `build_model` up to
/// zero entries, with sorted keys and two-space indentation. Used to ship
/// and regenerate the corpus deterministically.
pub fn export_model(model: &CourantModel) -> String {
    let mut base = Map::new();
    base.insert("dim".into(), Value::from(model.n()));
    base.insert(
        "bracket".into(),
        tensor_entries(model.base.bracket_tensor()),
    );
    base.insert("metric".into(), matrix_entries(&model.metric.mat));

    let mut root = Map::new();
    root.insert("name".into(), Value::from(model.name.clone()));
    root.insert("base".into(), Value::Object(base));
    root.insert("h".into(), tensor_entries(&model.h));
    if model.m() > 0 {
        let m = model.m();
        let mut fiber = Map::new();
        fiber.insert("dim".into(), Value::from(m));
        fiber.insert(
            "bracket".into(),
            tensor_entries(model.fiber.bracket_tensor()),
        );
        let pairing = model
            .fiber_pairing()
            .expect("models with a fiber carry a pairing");
        fiber.insert("pairing".into(), matrix_entries(&pairing.mat));
        root.insert("fiber".into(), Value::Object(fiber));
        let omega_t = DenseTensor::from_fn(&[model.n(), m, m], |i| {
            model.omega[i[0]][(i[1], i[2])].clone()
        });
        let omega = tensor_entries(&omega_t);
        if !omega.as_object().unwrap().is_empty() {
            root.insert("omega".into(), omega);
        }
        let f = tensor_entries(&model.f);
        if !f.as_object().unwrap().is_empty() {
            root.insert("f".into(), f);
        }
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(root))
        .expect("serialization of plain maps cannot fail");
    out.push('\n');
    out
}
