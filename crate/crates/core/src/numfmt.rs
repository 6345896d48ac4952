//! Deterministic numeric serialization.
//!
//! Goldens produced on different platforms must be byte-identical, so all
//! numeric output funnels through these helpers:
//!
//! * Corpus files use [`fmt_roundtrip`]: the shortest decimal string that
//!   parses back to exactly the same `f64`, so `load(write(c)) == c`.
//! * Report files (CSV cells, JSON values) use [`fmt_f64`] /
//!   [`round_json_floats`], which first round to [`REPORT_SIG_DIGITS`]
//!   significant digits. Rounding is performed by the standard formatter,
//!   which rounds half to even; nine significant digits are kept so no
//!   quantity of interest loses precision.

use serde_json::Value;

/// Significant digits kept in report output.
pub const REPORT_SIG_DIGITS: u32 = 9;

/// Shortest decimal representation that round-trips to the same `f64`.
///
/// Integral values print without a trailing `.0` (e.g. `800`), matching
/// the JSON encoding of whole floats.
pub fn fmt_roundtrip(x: f64) -> String {
    let mut s = format!("{x}");
    if let Some(stripped) = s.strip_suffix(".0") {
        s = stripped.to_string();
    }
    s
}

/// Round `x` to `sig` significant digits (round half to even).
///
/// Non-finite inputs are returned unchanged. `sig` must be in `1..=17`.
pub fn round_sig(x: f64, sig: u32) -> f64 {
    assert!((1..=17).contains(&sig), "sig must be in 1..=17");
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    // The std formatter performs correctly rounded decimal conversion with
    // ties to even; formatting to scientific notation with `sig` digits and
    // parsing back is exact for this digit count.
    format!("{:.*e}", sig as usize - 1, x)
        .parse::<f64>()
        .expect("scientific notation round-trip cannot fail")
}

/// Report formatting: round to [`REPORT_SIG_DIGITS`] significant digits,
/// then print the shortest round-trip form of the rounded value.
pub fn fmt_f64(x: f64) -> String {
    fmt_roundtrip(round_sig(x, REPORT_SIG_DIGITS))
}

/// Recursively round every floating-point number in a JSON tree to
/// [`REPORT_SIG_DIGITS`] significant digits.
///
/// Integer-valued JSON numbers are left untouched.
pub fn round_json_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().expect("checked is_f64");
                if let Some(rounded) = serde_json::Number::from_f64(round_sig(x, REPORT_SIG_DIGITS))
                {
                    *n = rounded;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json_floats),
        Value::Object(map) => map.values_mut().for_each(round_json_floats),
        _ => {}
    }
}
