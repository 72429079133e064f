//! Re-planning of tool parameters after a parameter violation.

use chrono::NaiveDate;
use serde_json::Value;

use crate::component_model::datefmt::DateFormat;
use crate::component_model::{ParamType, Params};
use crate::registry::{SemanticTriplet, StructuredError};

/// Date layouts an agent commonly produces when it guesses a format.
const COMMON_DATE_LAYOUTS: &[&str] = &["%Y-%m-%d", "%Y/%m/%d", "%Y.%m.%d", "%Y%m%d", "%d/%m/%Y", "%m/%d/%Y", "%d.%m.%Y"];

/// Corrects the offending parameter of a rejected call using the component's contract.
/// Returns `None` when no confident correction exists.
pub fn repair_params(tool: &str, params: &Params, error: &StructuredError, triplet: &SemanticTriplet) -> Option<Params> {
    let name = error.detail.param.as_deref()?;
    let got = params.get(name)?;
    let contract = triplet.metadata.param(tool, name);
    let declared = triplet
        .signatures
        .iter()
        .find(|s| s.name == tool)?
        .params
        .iter()
        .find(|p| p.name == name)?
        .ty;

    let fixed = if let Some(fmt) = contract.and_then(|c| c.runtime.date_format.as_deref()) {
        let fmt: DateFormat = fmt.parse().ok()?;
        let text = got.as_str()?;
        let date = COMMON_DATE_LAYOUTS
            .iter()
            .find_map(|l| NaiveDate::parse_from_str(text, l).ok())?;
        Value::String(fmt.format(date))
    } else {
        let allowed: Vec<&Value> = contract
            .into_iter()
            .flat_map(|c| {
                c.schema
                    .enum_values
                    .iter()
                    .flatten()
                    .chain(c.runtime.allowed_values.iter().flatten())
            })
            .collect();
        match (declared, got) {
            (ParamType::Number, Value::String(s)) => s.trim().parse::<f64>().ok().map(Value::from)?,
            (ParamType::String, Value::Number(n)) => Value::String(n.to_string()),
            (ParamType::Boolean, Value::String(s)) => Value::Bool(s.trim().parse().ok()?),
            (_, Value::String(s)) if !allowed.is_empty() => {
                let want = s.trim().to_lowercase();
                let mut hits = allowed
                    .into_iter()
                    .filter(|v| v.as_str().is_some_and(|a| a.to_lowercase() == want));
                let hit = hits.next()?.clone();
                if hits.next().is_some() {
                    return None;
                }
                hit
            }
            _ => return None,
        }
    };
    if &fixed == got {
        return None;
    }
    let mut out = params.clone();
    out.insert(name.to_string(), fixed);
    Some(out)
}
