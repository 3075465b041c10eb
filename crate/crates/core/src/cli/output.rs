//! JSON output with every float written to 17 significant digits.

use std::io;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Value};

/// Writes `f64` as `d.dddddddddddddddde±x`, which round-trips exactly.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_string(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    v.serialize(&mut ser)
        .expect("serialising a Value cannot fail");
    let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
    s.push('\n');
    s
}

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_vec(v: &[Complex64]) -> Value {
    Value::Array(v.iter().copied().map(complex).collect())
}

pub fn complex_matrix(m: &[Vec<Complex64>]) -> Value {
    Value::Array(m.iter().map(|r| complex_vec(r)).collect())
}
