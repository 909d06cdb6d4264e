//! Model files: one JSON document with fields `n_s`, `alpha`, `beta`, `h0`,
//! `a`, `b` and `gamma` (row-major, as a list of rows). Complex numbers are
//! `[re, im]` pairs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::ModelParameters;
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n_s: usize,
    alpha: [f64; 2],
    beta: [f64; 2],
    h0: [f64; 2],
    a: Vec<[f64; 2]>,
    b: Vec<[f64; 2]>,
    gamma: Vec<Vec<[f64; 2]>>,
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn field_error(location: String, message: &str) -> Error {
    Error::Parse {
        location,
        message: message.into(),
    }
}

fn complex(p: [f64; 2], location: impl Fn() -> String) -> Result<C64> {
    if !(p[0].is_finite() && p[1].is_finite()) {
        return Err(field_error(location(), "non-finite value"));
    }
    Ok(C64::new(p[0], p[1]))
}

pub fn model_to_json(model: &ModelParameters) -> String {
    let n = model.n_s();
    let file = ModelFile {
        n_s: n,
        alpha: pair(model.alpha()),
        beta: pair(model.beta()),
        h0: pair(model.h0()),
        a: model.a().iter().copied().map(pair).collect(),
        b: model.b().iter().copied().map(pair).collect(),
        gamma: (0..n).map(|i| (0..n).map(|j| pair(model.gamma()[(i, j)])).collect()).collect(),
    };
    serde_json::to_string_pretty(&file).expect("model serializes") + "\n"
}

pub fn model_from_json(text: &str) -> Result<ModelParameters> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let n = file.n_s;
    let vector = |name: &str, v: &[[f64; 2]]| -> Result<CVector> {
        if v.len() != n {
            return Err(field_error(name.into(), &format!("expected {n} entries, got {}", v.len())));
        }
        let entries = v
            .iter()
            .enumerate()
            .map(|(i, &p)| complex(p, || format!("{name}[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(CVector::from_vec(entries))
    };
    let a = vector("a", &file.a)?;
    let b = vector("b", &file.b)?;
    if file.gamma.len() != n {
        return Err(field_error("gamma".into(), &format!("expected {n} rows, got {}", file.gamma.len())));
    }
    let mut gamma = CMatrix::zeros(n, n);
    for (i, row) in file.gamma.iter().enumerate() {
        if row.len() != n {
            return Err(field_error(format!("gamma[{i}]"), &format!("expected {n} columns, got {}", row.len())));
        }
        for (j, &p) in row.iter().enumerate() {
            gamma[(i, j)] = complex(p, || format!("gamma[{i}][{j}]"))?;
        }
    }
    let alpha = complex(file.alpha, || "alpha".into())?;
    let beta = complex(file.beta, || "beta".into())?;
    let h0 = complex(file.h0, || "h0".into())?;
    ModelParameters::new(alpha, beta, h0, a, b, gamma).map_err(|e| field_error("model".into(), &e.to_string()))
}

pub fn save_model(model: &ModelParameters, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model_to_json(model))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ModelParameters> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    model_from_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}
