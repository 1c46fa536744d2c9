//! Output formatting: every float leaves the crate with 12 significant digits.

/// Formats `x` with 12 significant digits, `%g` style.
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.to_string()
        }
    } else {
        s.to_string()
    }
}

/// `x` rounded to the value that [`fmt12`] prints.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt12(x).parse().unwrap()
}

/// JSON number carrying the 12-digit rounding; non-finite values become strings.
pub fn json_f64(x: f64) -> serde_json::Value {
    let r = round12(x);
    serde_json::Number::from_f64(r)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(fmt12(x)))
}

/// Serde helper: serialises an `f64` through [`json_f64`].
pub fn ser12<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    json_f64(*x).serialize(s)
}

/// Inverse of [`ser12`]: accepts numbers and the strings `inf`, `-inf`, `nan`.
pub fn de12<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    use serde::Deserialize;
    match serde_json::Value::deserialize(d)? {
        serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| serde::de::Error::custom("bad number")),
        serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
        other => Err(serde::de::Error::custom(format!("expected a number, got {other}"))),
    }
}

/// Serde helper for `Option<f64>` fields.
pub fn ser12_opt<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    x.map(json_f64).serialize(s)
}

/// Serde helper for `Vec<f64>` fields.
pub fn ser12_vec<S: serde::Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    xs.iter().map(|&x| json_f64(x)).collect::<Vec<_>>().serialize(s)
}
