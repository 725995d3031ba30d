//! JSON output: a versioned envelope and a float formatter that always
//! prints 17 significant digits, so reports are byte-stable.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema: u32,
    pub kind: &'a str,
    #[serde(flatten)]
    pub body: T,
}

impl<'a, T: Serialize> Report<'a, T> {
    pub fn new(kind: &'a str, body: T) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            kind,
            body,
        }
    }
}

/// Compact JSON with every `f64` written as `d.dddddddddddddddde±x`.
#[derive(Default)]
pub struct SignificantDigits(CompactFormatter);

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_writer<W: io::Write, T: Serialize>(writer: W, value: &T) -> serde_json::Result<()> {
    let mut ser = Serializer::with_formatter(writer, SignificantDigits::default());
    value.serialize(&mut ser)
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    to_writer(&mut buf, value).expect("serializing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_string(&Report::new("t", serde_json::json!({ "x": 0.1, "n": 3, "z": -2.0 })));
        assert_eq!(
            s,
            r#"{"schema":1,"kind":"t","n":3,"x":1.0000000000000001e-1,"z":-2.0000000000000000e0}"#
        );
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }
}
