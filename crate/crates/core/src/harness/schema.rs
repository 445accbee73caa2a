//! Validation of emitted JSON against the checked-in report schema.
//!
//! Supports the keywords the schema uses: `type` (single or list),
//! `required`, `properties`, `additionalProperties: false`, `items`, `enum`,
//! `minimum`, `maximum` and `exclusiveMinimum`.

use serde_json::Value;

use crate::error::{Error, Result};

/// The report schema.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

/// Checks `value` against the report schema.
pub fn validate_report(value: &Value) -> Result<()> {
    let schema: Value = serde_json::from_str(REPORT_SCHEMA)?;
    let errors = validate(&schema, value);
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::validation(format!("report does not match schema: {}", errors.join("; "))))
    }
}

/// All violations of `schema` by `value`, as `path: message` strings.
pub fn validate(schema: &Value, value: &Value) -> Vec<String> {
    let mut errors = Vec::new();
    check(schema, value, "$", &mut errors);
    errors
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.as_i64().is_some() || v.as_u64().is_some(),
        _ => false,
    }
}

fn check(schema: &Value, value: &Value, path: &str, errors: &mut Vec<String>) {
    let Some(s) = schema.as_object() else {
        return;
    };
    if let Some(t) = s.get("type") {
        let names: Vec<&str> = match t {
            Value::String(n) => vec![n.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        if !names.iter().any(|n| type_matches(n, value)) {
            errors.push(format!("{path}: expected type {names:?}"));
            return;
        }
    }
    if let Some(Value::Array(options)) = s.get("enum") {
        if !options.contains(value) {
            errors.push(format!("{path}: {value} is not one of {options:?}"));
        }
    }
    if let Some(x) = value.as_f64() {
        if let Some(m) = s.get("minimum").and_then(Value::as_f64) {
            if x < m {
                errors.push(format!("{path}: {x} is below the minimum {m}"));
            }
        }
        if let Some(m) = s.get("maximum").and_then(Value::as_f64) {
            if x > m {
                errors.push(format!("{path}: {x} is above the maximum {m}"));
            }
        }
        if let Some(m) = s.get("exclusiveMinimum").and_then(Value::as_f64) {
            if x <= m {
                errors.push(format!("{path}: {x} is not above {m}"));
            }
        }
    }
    if let Some(obj) = value.as_object() {
        if let Some(Value::Array(req)) = s.get("required") {
            for key in req.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    errors.push(format!("{path}: missing property {key:?}"));
                }
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (key, v) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => check(sub, v, &format!("{path}.{key}"), errors),
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{path}: unexpected property {key:?}"));
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            check(items, v, &format!("{path}[{i}]"), errors);
        }
    }
}
