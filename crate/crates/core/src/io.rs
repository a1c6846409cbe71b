//! JSON state descriptions.
//!
//! Two forms are accepted:
//!
//! ```json
//! {"params": {"gamma": 2.0, "s": 1.4, "theta": 1.0471975512, "alpha": [0.0, 0.0]}}
//! {"cov": [[2.0, 0.3], [0.3, 1.5]], "mean": [0.0, 0.0]}
//! ```
//!
//! `theta` and `alpha` are optional in the first form. Angles are radians;
//! strings such as `"60deg"` are rejected.

use serde_json::{json, Value};

use crate::error::{GdistError, Result};
use crate::gaussian::{CovarianceState, GaussianParams};
use crate::mat2::Mat2;

fn parse_err(field: &str, reason: impl Into<String>) -> GdistError {
    GdistError::Parse { field: field.to_string(), reason: reason.into() }
}

fn number(v: &Value, field: &str) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| parse_err(field, "not representable as f64")),
        Value::String(s) if s.contains("deg") || s.contains('°') => {
            Err(parse_err(field, "angles are radians; degree values are not accepted"))
        }
        other => Err(parse_err(field, format!("expected a number, found {}", kind(other)))),
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn pair(v: &Value, field: &str) -> Result<[f64; 2]> {
    match v.as_array() {
        Some(items) if items.len() == 2 => {
            Ok([number(&items[0], &format!("{field}[0]"))?, number(&items[1], &format!("{field}[1]"))?])
        }
        Some(items) => Err(parse_err(field, format!("expected 2 entries, found {}", items.len()))),
        None => Err(parse_err(field, format!("expected an array, found {}", kind(v)))),
    }
}

fn required<'a>(obj: &'a serde_json::Map<String, Value>, key: &str, field: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| parse_err(field, "missing"))
}

/// Parses either JSON state form. Physicality is checked with `tol`.
pub fn state_from_value(v: &Value, tol: f64) -> Result<GaussianParams<f64>> {
    let obj = v.as_object().ok_or_else(|| parse_err("$", format!("expected an object, found {}", kind(v))))?;
    if let Some(params) = obj.get("params") {
        let p = params
            .as_object()
            .ok_or_else(|| parse_err("params", format!("expected an object, found {}", kind(params))))?;
        let gamma = number(required(p, "gamma", "params.gamma")?, "params.gamma")?;
        let s = number(required(p, "s", "params.s")?, "params.s")?;
        let theta = p.get("theta").map(|t| number(t, "params.theta")).transpose()?.unwrap_or(0.0);
        let alpha = p.get("alpha").map(|a| pair(a, "params.alpha")).transpose()?.unwrap_or([0.0, 0.0]);
        if gamma < 1.0 - tol {
            return Err(GdistError::NonPhysical { det: gamma * gamma, tol });
        }
        return GaussianParams::new(gamma, s, theta, alpha[0], alpha[1]);
    }
    if let Some(cov) = obj.get("cov") {
        let rows = cov.as_array().filter(|r| r.len() == 2).ok_or_else(|| parse_err("cov", "expected a 2x2 array"))?;
        let r0 = pair(&rows[0], "cov[0]")?;
        let r1 = pair(&rows[1], "cov[1]")?;
        let mean = obj.get("mean").map(|m| pair(m, "mean")).transpose()?.unwrap_or([0.0, 0.0]);
        let state = CovarianceState::physical(Mat2::new(r0[0], r0[1], r1[0], r1[1]), mean, tol)?;
        return crate::gaussian::params_from_covariance(&state, tol);
    }
    Err(parse_err("$", "expected a `params` or a `cov` key"))
}

/// Parses a JSON document holding one state.
pub fn state_from_str(text: &str, tol: f64) -> Result<GaussianParams<f64>> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err("$", e.to_string()))?;
    state_from_value(&v, tol)
}

/// The `params` form of a state.
pub fn state_to_value(p: &GaussianParams<f64>) -> Value {
    json!({
        "params": {
            "gamma": p.gamma(),
            "s": p.s(),
            "theta": p.theta(),
            "alpha": p.alpha(),
        }
    })
}
