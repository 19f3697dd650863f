//! Serialization of extended reals.
//!
//! JSON has no infinities, so `±∞` travel as the strings `"inf"` / `"-inf"`.
//! Finite values stay plain numbers.

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Formats a float for CSV: 17 significant digits, `.` decimal point,
/// `inf` / `-inf` / `nan` for non-finite values.
pub fn fmt_csv(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        // no negative zero in the output
        format!("{:.16e}", x + 0.0)
    }
}

/// Parses the CSV/JSON spelling of an extended real.
pub fn parse_ext(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "Infinity" => Some(f64::INFINITY),
        "-inf" | "-Infinity" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

/// An `f64` that may be infinite, serialized per the module convention.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        deserialize(d).map(ExtReal)
    }
}

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if *x == f64::INFINITY {
        s.serialize_str("inf")
    } else if *x == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else {
        s.serialize_f64(*x)
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    struct ExtVisitor;
    impl Visitor<'_> for ExtVisitor {
        type Value = f64;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\"")
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "nan" => Ok(f64::NAN),
                _ => parse_ext(v).ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }
    d.deserialize_any(ExtVisitor)
}

/// `[lo, hi]` pairs of extended reals.
pub mod pair {
    use super::ExtReal;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
        [ExtReal(p.0), ExtReal(p.1)].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(f64, f64), D::Error> {
        let [a, b] = <[ExtReal; 2]>::deserialize(d)?;
        Ok((a.0, b.0))
    }
}

/// Optional extended reals (`null` when absent).
pub mod opt {
    use super::ExtReal;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(p: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        p.map(ExtReal).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<ExtReal>::deserialize(d)?.map(|e| e.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "crate::ext")]
        x: f64,
        #[serde(with = "pair")]
        d: (f64, f64),
    }

    #[test]
    fn infinities_round_trip_as_strings() {
        let h = Holder { x: f64::NEG_INFINITY, d: (0.0, f64::INFINITY) };
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"x":"-inf","d":[0.0,"inf"]}"#);
        assert_eq!(serde_json::from_str::<Holder>(&s).unwrap(), h);
    }

    #[test]
    fn csv_format_has_17_significant_digits() {
        assert_eq!(fmt_csv(-0.25), "-2.5000000000000000e-1");
        assert_eq!(fmt_csv(f64::INFINITY), "inf");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_csv(x).parse::<f64>().unwrap(), x);
    }
}
