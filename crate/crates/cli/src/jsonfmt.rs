//! Compact JSON with every float written to 17 significant digits, in the
//! style of C's `%.17g`. Negative zero is written as `0`.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// `%.17g`: shortest of fixed or exponent notation, trailing zeros removed.
pub fn g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    trim(&format!("{:.*}", decimals, x)).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct G17Formatter;

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter);
    value.serialize(&mut ser).expect("serializable value");
    String::from_utf8(out).expect("utf-8 JSON")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(g17(2.0), "2");
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(-1.5), "-1.5");
        assert_eq!(g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(g17(1e20), "1e+20");
        assert_eq!(g17(123456.0), "123456");
        assert_eq!(g17(-0.0), "0");
    }

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.718281828459045, 6.02e23, 1e-300, f64::MAX, f64::MIN_POSITIVE] {
            let s = g17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn compact_json() {
        let v = serde_json::json!({"a": [1.0, 0.5], "b": "x"});
        assert_eq!(to_string(&v), r#"{"a":[1,0.5],"b":"x"}"#);
    }
}
