//! Serializes seconds as plain decimals with at least three fractional
//! digits (`2.000`, `0.0125`), never in exponent form.

use serde::{Deserialize, Deserializer, Serializer};
use serde_json::value::RawValue;

pub fn format(value: f64) -> String {
    if !value.is_finite() {
        // JSON has no representation; validation reports these records.
        return "null".to_owned();
    }
    let mut s = format!("{value}");
    match s.find('.') {
        None => s.push_str(".000"),
        Some(dot) => {
            let frac = s.len() - dot - 1;
            for _ in frac..3 {
                s.push('0');
            }
        }
    }
    s
}

pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    let raw = RawValue::from_string(format(*value)).map_err(serde::ser::Error::custom)?;
    serde::Serialize::serialize(&raw, serializer)
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<f64, D::Error> {
    Option::<f64>::deserialize(deserializer).map(|v| v.unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::format;

    #[test]
    fn at_least_three_digits() {
        assert_eq!(format(2.0), "2.000");
        assert_eq!(format(1.5), "1.500");
        assert_eq!(format(0.0125), "0.0125");
        assert_eq!(format(-3.0), "-3.000");
        assert_eq!(format(1e-7), "0.0000001");
        assert_eq!(format(0.1 + 0.2).parse::<f64>().unwrap(), 0.1 + 0.2);
    }
}
