//! Deterministic JSON output: every `f64` is written with 17 significant
//! digits, so two runs with the same inputs give byte-identical files.

use std::io;

use serde::{Serialize, Serializer};
use serde_json::ser::Formatter;

#[derive(Debug, Clone, Copy, Default)]
pub struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Serializes a float that may be infinite: finite values as numbers, the
/// rest as the strings `"+inf"`, `"-inf"`, `"nan"`.
pub fn extended<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("+inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn extended_pair<S: Serializer>(v: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Pair(#[serde(serialize_with = "extended")] f64, #[serde(serialize_with = "extended")] f64);
    Pair(v.0, v.1).serialize(s)
}
