//! Flag values and the optional JSON config file.

use std::path::Path;

use mheis::fractions::Fraction;
use mheis::{BigInt, BilinearForm, ChainSpec, HPoint, HeisenbergContext, RadiusProfile};
use num_integer::Integer;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// Defaults read from `--config` (or `MHEIS_CONFIG`); flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: Option<Value>,
    #[serde(rename = "N")]
    pub rank: Option<usize>,
    pub b: Option<Value>,
    pub n: Option<u32>,
    pub profile: Option<Value>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage("--config", format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage("--config", e.to_string()))
    }
}

/// Inline JSON, or `@path` to read it from a file.
pub fn json_arg(flag: &str, text: &str) -> Result<Value, CliError> {
    let body = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(flag, format!("cannot read {path}: {e}")))?,
        None => text.to_string(),
    };
    serde_json::from_str(&body).map_err(|e| CliError::usage(flag, format!("invalid JSON: {e}")))
}

pub fn int_value(flag: &str, v: &Value) -> Result<BigInt, CliError> {
    let bad = || CliError::usage(flag, format!("expected an integer, got {v}"));
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string().parse().map_err(|_| bad()),
        Value::String(s) => s.trim().parse().map_err(|_| bad()),
        _ => Err(bad()),
    }
}

pub fn int_arg(flag: &str, text: &str) -> Result<BigInt, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::usage(flag, format!("expected an integer, got {text:?}")))
}

/// A matrix `[[..],..]` or a form document `{"N": .., "b": [[..],..]}`.
pub fn form_value(flag: &str, v: Value) -> Result<BilinearForm, CliError> {
    let rows = match v {
        Value::Object(_) => {
            return serde_json::from_value(v).map_err(|e| CliError::usage(flag, e.to_string()));
        }
        other => other,
    };
    let b: Vec<Vec<i64>> = serde_json::from_value(rows).map_err(|e| CliError::usage(flag, format!("expected an integer matrix: {e}")))?;
    BilinearForm::new(b).map_err(|e| CliError::usage(flag, e.to_string()))
}

/// A profile document, or a bare `"p/q"` ratio for a geometric profile.
pub fn profile_value(flag: &str, v: Value) -> Result<RadiusProfile, CliError> {
    let v = match v {
        Value::String(s) => serde_json::json!({"kind": "geometric", "base": s}),
        other => other,
    };
    let p: RadiusProfile = serde_json::from_value(v).map_err(|e| CliError::usage(flag, e.to_string()))?;
    p.validate().map_err(|e| CliError::usage(flag, e.to_string()))?;
    Ok(p)
}

/// A profile flag: JSON, or a bare ratio such as `1/3`.
pub fn profile_arg(flag: &str, text: &str) -> Result<RadiusProfile, CliError> {
    match json_arg(flag, text) {
        Ok(v) => profile_value(flag, v),
        Err(_) => profile_value(flag, Value::String(text.to_string())),
    }
}

pub fn chain_arg(flag: &str, text: &str) -> Result<ChainSpec, CliError> {
    let c: ChainSpec = serde_json::from_value(json_arg(flag, text)?).map_err(|e| CliError::usage(flag, e.to_string()))?;
    c.validate().map_err(|e| CliError::usage(flag, e.to_string()))?;
    Ok(c)
}

/// A point either in full form (`x` and `s` as m-adic documents) or in
/// shorthand `{"x": [1, 2], "s": 3}` with integers reduced mod `m^n`.
pub fn point_arg(ctx: &HeisenbergContext, flag: &str, text: &str) -> Result<HPoint, CliError> {
    let v = json_arg(flag, text)?;
    let full = v.get("s").is_some_and(Value::is_object);
    if full {
        let p: HPoint = serde_json::from_value(v).map_err(|e| CliError::usage(flag, e.to_string()))?;
        ctx.check(&p).map_err(|e| CliError::domain("HeisenbergError", &e))?;
        return Ok(p);
    }
    let xs = v
        .get("x")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::usage(flag, "expected {\"x\": [...], \"s\": ...}"))?;
    if xs.len() != ctx.rank() {
        return Err(CliError::usage(flag, format!("x has {} coordinates, N is {}", xs.len(), ctx.rank())));
    }
    let s = v.get("s").ok_or_else(|| CliError::usage(flag, "missing \"s\""))?;
    let top = ctx.ring().power(ctx.precision()).clone();
    let x = xs
        .iter()
        .map(|c| int_value(flag, c).map(|c| c.mod_floor(&top)))
        .collect::<Result<Vec<_>, _>>()?;
    let s = int_value(flag, s)?.mod_floor(&top);
    ctx.point_big(&x, &s).map_err(|e| CliError::domain("HeisenbergError", &e))
}

/// `"a/s"` kept unreduced; a bare integer means `a/1`.
pub fn fraction_arg(flag: &str, text: &str) -> Result<Fraction, CliError> {
    let (a, s) = text.split_once('/').unwrap_or((text, "1"));
    Ok(Fraction { num: int_arg(flag, a)?, den: int_arg(flag, s)? })
}

/// Integers as JSON numbers when they fit, decimal strings otherwise.
pub fn int_json(v: &BigInt) -> Value {
    match i64::try_from(v) {
        Ok(i) => Value::from(i),
        Err(_) => Value::String(v.to_string()),
    }
}

/// Replaces every serialized point (`x` a list of m-adic documents, `s` an
/// m-adic document) with the shorthand `{"x": [..], "s": ..}`.
pub fn shorten_points(v: Value) -> Value {
    fn residue(v: &Value) -> Option<Value> {
        let o = v.as_object()?;
        if o.len() == 3 && o.contains_key("m") && o.contains_key("n") {
            let r: BigInt = o.get("value")?.as_str()?.parse().ok()?;
            return Some(int_json(&r));
        }
        None
    }
    match v {
        Value::Object(o) => {
            if o.len() == 2 {
                if let (Some(Value::Array(xs)), Some(s)) = (o.get("x"), o.get("s")) {
                    let xs: Option<Vec<Value>> = xs.iter().map(residue).collect();
                    if let (Some(xs), Some(s)) = (xs, residue(s)) {
                        return serde_json::json!({"x": xs, "s": s});
                    }
                }
            }
            Value::Object(o.into_iter().map(|(k, v)| (k, shorten_points(v))).collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(shorten_points).collect()),
        other => other,
    }
}
