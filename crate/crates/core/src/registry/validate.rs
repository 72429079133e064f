//! Parameter validation against signatures and metadata, in a fixed order.

use std::cmp::Ordering;

use chrono::NaiveDate;
use serde_json::Value;

use super::error::{ConstraintSource, ErrorCode, StructuredError};
use crate::component_model::datefmt::{parse_iso, DateFormat};
use crate::component_model::{InteractionMetadata, Limit, ParamContract, ParamSpec, Params, ToolSignature};

/// JSON equality that treats `42` and `42.0` as the same number.
pub fn values_equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x.as_f64() == y.as_f64(),
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(p, q)| values_equal(p, q)),
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| values_equal(v, w)))
        }
        _ => a == b,
    }
}

fn short(values: &[Value]) -> String {
    const SHOWN: usize = 12;
    let mut parts: Vec<String> = values.iter().take(SHOWN).map(|v| v.to_string()).collect();
    if values.len() > SHOWN {
        parts.push(format!("... ({} total)", values.len()));
    }
    format!("one of [{}]", parts.join(", "))
}

pub fn validate_params(
    signatures: &[ToolSignature],
    metadata: &InteractionMetadata,
    tool: &str,
    params: &Params,
) -> Result<(), StructuredError> {
    let Some(sig) = signatures.iter().find(|s| s.name == tool) else {
        let known: Vec<&str> = signatures.iter().map(|s| s.name.as_str()).collect();
        let mut e = StructuredError::new(ErrorCode::UnknownTool, format!("tool `{tool}` is not offered"));
        e.detail.expected = Some(format!("one of [{}]", known.join(", ")));
        return Err(e);
    };
    let present = |p: &ParamSpec| params.get(&p.name).filter(|v| !v.is_null());

    for p in &sig.params {
        if p.required && present(p).is_none() {
            return Err(StructuredError::violation(
                &p.name,
                "required",
                None,
                ConstraintSource::Static,
                format!("missing required parameter `{}`", p.name),
            ));
        }
    }
    for (name, v) in params {
        if !sig.params.iter().any(|p| &p.name == name) {
            let declared: Vec<&str> = sig.params.iter().map(|p| p.name.as_str()).collect();
            return Err(StructuredError::violation(
                name,
                format!("one of [{}]", declared.join(", ")),
                Some(v),
                ConstraintSource::Static,
                format!("`{tool}` takes no parameter `{name}`"),
            ));
        }
    }
    let given: Vec<(&ParamSpec, &Value, Option<&ParamContract>)> = sig
        .params
        .iter()
        .filter_map(|p| present(p).map(|v| (p, v, metadata.param(tool, &p.name))))
        .collect();

    for (p, v, _) in &given {
        if !p.ty.accepts(v) {
            return Err(StructuredError::violation(
                &p.name,
                p.ty.as_str(),
                Some(v),
                ConstraintSource::Static,
                format!("`{}` must be a {}", p.name, p.ty.as_str()),
            ));
        }
    }
    for (p, v, c) in &given {
        let Some(c) = c else { continue };
        if let Some(allowed) = &c.schema.enum_values {
            if !allowed.iter().any(|a| values_equal(a, v)) {
                return Err(StructuredError::violation(
                    &p.name,
                    short(allowed),
                    Some(v),
                    ConstraintSource::Static,
                    format!("{v} is not an accepted value for `{}`", p.name),
                ));
            }
        }
        if let Some(allowed) = &c.runtime.allowed_values {
            if !allowed.iter().any(|a| values_equal(a, v)) {
                return Err(StructuredError::violation(
                    &p.name,
                    short(allowed),
                    Some(v),
                    ConstraintSource::Runtime,
                    format!("{v} is not currently allowed for `{}`", p.name),
                ));
            }
        }
    }
    for (p, v, c) in &given {
        let Some(c) = c else { continue };
        if let (Some(pattern), Some(text)) = (&c.schema.pattern, v.as_str()) {
            let ok = crate::component_model::pattern::matches(pattern, text).unwrap_or(false);
            if !ok {
                return Err(StructuredError::violation(
                    &p.name,
                    pattern.clone(),
                    Some(v),
                    ConstraintSource::Static,
                    format!("`{text}` does not match the required pattern"),
                ));
            }
        }
        if let Some(fmt) = &c.runtime.date_format {
            let parsed = fmt.parse::<DateFormat>().ok().zip(v.as_str()).and_then(|(f, s)| f.parse(s));
            if parsed.is_none() {
                return Err(StructuredError::violation(
                    &p.name,
                    fmt.clone(),
                    Some(v),
                    ConstraintSource::Runtime,
                    format!("{v} does not match the date format {fmt}"),
                ));
            }
        }
    }
    for (p, v, c) in &given {
        let Some(c) = c else { continue };
        check_range(&p.name, v, c)?;
    }
    Ok(())
}

enum Scalar {
    Num(f64),
    Day(NaiveDate),
}

impl Scalar {
    fn cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Num(a), Scalar::Num(b)) => a.partial_cmp(b),
            (Scalar::Day(a), Scalar::Day(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }
}

fn scalar(v: &Value, fmt: Option<&DateFormat>) -> Option<Scalar> {
    match v {
        Value::Number(n) => n.as_f64().map(Scalar::Num),
        Value::String(s) => fmt
            .and_then(|f| f.parse(s))
            .or_else(|| parse_iso(s))
            .map(Scalar::Day),
        _ => None,
    }
}

fn limit_scalar(l: &Limit, fmt: Option<&DateFormat>) -> Option<Scalar> {
    match l {
        Limit::Number(n) => Some(Scalar::Num(*n)),
        Limit::Date(s) => scalar(&Value::String(s.clone()), fmt),
    }
}

fn limit_text(l: &Limit) -> String {
    match l {
        Limit::Number(n) if n.fract() == 0.0 && n.abs() < 1e15 => format!("{}", *n as i64),
        Limit::Number(n) => n.to_string(),
        Limit::Date(s) => s.clone(),
    }
}

fn check_range(name: &str, v: &Value, c: &ParamContract) -> Result<(), StructuredError> {
    let fmt = c.runtime.date_format.as_deref().and_then(|f| f.parse::<DateFormat>().ok());
    let Some(x) = scalar(v, fmt.as_ref()) else {
        return Ok(());
    };
    let bounds = [(&c.runtime.min, Ordering::Less, ">="), (&c.runtime.max, Ordering::Greater, "<=")];
    for (limit, bad, op) in bounds {
        let Some(limit) = limit else { continue };
        if limit_scalar(limit, fmt.as_ref()).and_then(|l| x.cmp(&l)) == Some(bad) {
            return Err(StructuredError::violation(
                name,
                format!("{op} {}", limit_text(limit)),
                Some(v),
                ConstraintSource::Runtime,
                format!("{v} is out of range for `{name}`"),
            ));
        }
    }
    if let Some(excluded) = &c.runtime.excluded_values {
        let hit = excluded.iter().any(|e| match (scalar(e, fmt.as_ref()), &x) {
            (Some(Scalar::Day(a)), Scalar::Day(b)) => a == *b,
            _ => values_equal(e, v),
        });
        if hit {
            return Err(StructuredError::violation(
                name,
                format!("not {}", short(excluded)),
                Some(v),
                ConstraintSource::Runtime,
                format!("{v} is currently unavailable for `{name}`"),
            ));
        }
    }
    Ok(())
}
