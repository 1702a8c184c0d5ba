//! Number formatting shared by the JSON and CSV writers.
//!
//! Machine-readable output carries 17 significant digits, which round-trips
//! every `f64` exactly; human-readable summaries use 5.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `x` with 17 significant digits in scientific notation (valid JSON).
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    format!("{x:.16e}")
}

/// `x` with 5 significant digits for human-facing CSV/stdout.
pub fn fmt5(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.0000".to_string();
    }
    // exponent after rounding, so 0.999996 becomes 1.0000 and not 1.00000
    let sci = format!("{x:.4e}");
    let mag: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-4..5).contains(&mag) {
        let decimals = (4 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.4e}")
    }
}

/// Complex value printed as `re+imi` with 5 decimals.
pub fn fmt_complex5(re: f64, im: f64) -> String {
    // values that round to zero print unsigned
    let unsigned = |v: f64| if format!("{:.5}", v.abs()) == "0.00000" { 0.0 } else { v };
    let (re, im) = (unsigned(re), unsigned(im));
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("{re:.5}{sign}{:.5}i", im.abs())
}

/// Serializes a float with 17 significant digits. Non-finite values are
/// written as `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI, -0.0] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        let json = serde_json::to_string(&vec![Sig17(0.1), Sig17(f64::NAN)]).unwrap();
        assert_eq!(json, "[1.0000000000000001e-1,null]");
    }

    #[test]
    fn five_digit_summaries() {
        assert_eq!(fmt5(0.398942280), "0.39894");
        assert_eq!(fmt5(1.0), "1.0000");
        assert_eq!(fmt5(123.456), "123.46");
        assert_eq!(fmt5(1.5e-7), "1.5000e-7");
        assert_eq!(fmt5(0.999996), "1.0000");
        assert_eq!(fmt5(99999.7), "1.0000e5");
        assert_eq!(fmt5(0.05), "0.050000");
        assert_eq!(fmt_complex5(0.398942, -0.0), "0.39894+0.00000i");
        assert_eq!(fmt_complex5(0.398942, -3e-7), "0.39894+0.00000i");
        assert_eq!(fmt_complex5(-1e-9, -0.5), "0.00000-0.50000i");
        assert_eq!(fmt_complex5(0.398942, 0.0), "0.39894+0.00000i");
    }
}
