//! Number formatting: 4 significant digits in reports, 9 in machine output.

use serde_json::Value;

pub const REPORT_DIGITS: usize = 4;
pub const MACHINE_DIGITS: usize = 9;

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Fixed notation with `digits` significant digits for moderate magnitudes,
/// scientific otherwise.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exponent: i32 = sci
        .split('e')
        .nth(1)
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if (-4..7).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

pub fn report(x: f64) -> String {
    sig(x, REPORT_DIGITS)
}

pub fn machine(x: f64) -> String {
    sig(x, MACHINE_DIGITS)
}

/// Rounds every number in a JSON tree to machine precision.
pub fn round_json(value: Value) -> Value {
    match value {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !(n.is_i64() || n.is_u64()) => {
                serde_json::Number::from_f64(round_sig(x, MACHINE_DIGITS))
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            }
            _ => Value::Number(n),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

pub fn json(value: Value) -> String {
    let mut out = serde_json::to_string_pretty(&round_json(value)).expect("JSON values serialize");
    out.push('\n');
    out
}
