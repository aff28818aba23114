//! Deterministic JSON and CSV rendering.

use serde::Serialize;
use serde_json::Value;

/// Significant digits kept in serialized floats.
pub const SIGNIFICANT_DIGITS: usize = 15;

/// Rounds to 15 significant digits; folds −0 into 0.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(x) = num.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                    *num = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    serde_json::to_string_pretty(&v)
}

/// Values below this magnitude in state matrices are printed as zero.
pub const SNAP: f64 = 1e-12;

/// Zeroes floating-point noise in matrix entries.
pub fn snap(x: f64) -> f64 {
    if x.abs() < SNAP {
        0.0
    } else {
        x
    }
}

/// Row-major entries with noise removed.
pub fn snapped_entries(state: &crate::composite::BipartiteState) -> [f64; 9] {
    state.entries().map(snap)
}

/// CSV field rendering for floats.
pub fn csv_float(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 || (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Comma-joined CSV line.
pub fn csv_line<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    fields.into_iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(-0.0), 0.0);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333333);
        assert_eq!(round_sig(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn json_floats_rounded() {
        let s = to_json(&serde_json::json!({"a": [0.1 + 0.2, 2], "b": -0.0})).unwrap();
        assert!(s.contains("0.3") && !s.contains("0.30000000000000004"));
        assert!(!s.contains("-0"));
    }

    #[test]
    fn csv_helpers() {
        assert_eq!(csv_line(["1", "0.5"]), "1,0.5");
        assert_eq!(csv_float(0.25), "0.25");
        assert_eq!(csv_float(1.5e-17), "1.5e-17");
        assert_eq!(snap(-3e-16), 0.0);
    }
}
