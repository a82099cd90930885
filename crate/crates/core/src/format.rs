//! Canonical serialisation: numbers rounded to 15 significant digits and
//! printed in shortest round-trip form, object keys sorted.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 15;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits; non-finite values pass through.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Shortest decimal form of `round_significant(x)`; non-finite values print as `null`.
pub fn format_number(x: f64) -> String {
    match serde_json::Number::from_f64(round_significant(x)) {
        Some(n) => n.to_string(),
        None => "null".to_string(),
    }
}

fn canonicalize(value: Value) -> Value {
    match value {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_significant(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, canonicalize(v)))
                .collect(),
        ),
        other => other,
    }
}

/// Converts to a JSON value with canonical numbers.
pub fn canonical_value<T: Serialize>(value: &T) -> Result<Value> {
    let raw = serde_json::to_value(value)
        .map_err(|e| Error::validation(format!("serialisation failed: {e}")))?;
    Ok(canonicalize(raw))
}

/// Pretty-printed canonical JSON with a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = canonical_value(value)?;
    let mut out = serde_json::to_string_pretty(&v)
        .map_err(|e| Error::validation(format!("serialisation failed: {e}")))?;
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_keeps_fifteen_digits() {
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(1.666_711_331_567_594_5), "1.66671133156759");
        assert_eq!(format_number(2.0), "2.0");
        assert_eq!(format_number(1e300), "1e+300");
        assert_eq!(format_number(-0.0), "-0.0");
        assert_eq!(format_number(f64::NAN), "null");
    }

    #[test]
    fn keys_are_sorted_and_integers_untouched() {
        let v = json!({"b": 1, "a": [0.1 + 0.2, 3], "c": {"z": 1.0, "y": u64::MAX}});
        let s = to_canonical_json(&v).unwrap();
        let a = s.find("\"a\"").unwrap();
        let b = s.find("\"b\"").unwrap();
        assert!(a < b);
        assert!(s.contains("0.3"));
        assert!(s.contains(&u64::MAX.to_string()));
        assert!(s.find("\"y\"").unwrap() < s.find("\"z\"").unwrap());
    }

    #[test]
    fn canonical_output_is_idempotent() {
        let v = json!({"x": std::f64::consts::PI, "y": [1e-17, 123456.789]});
        let once = canonical_value(&v).unwrap();
        let twice = canonical_value(&once).unwrap();
        assert_eq!(once, twice);
    }
}
