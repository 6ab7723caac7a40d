//! Number formatting for artifact files.

/// Formats `x` with 12 significant digits, `%.12g` style: fixed notation for
/// decimal exponents in `-4..12`, scientific otherwise, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    sig(x, 12)
}

pub fn sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Round first, then read the exponent so that 9.99…→10 carries over.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(-2.5), "-2.5");
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(123456789012.0), "123456789012");
        assert_eq!(sig12(1234567890123.0), "1.23456789012e+12");
        assert_eq!(sig12(0.0000123), "1.23e-05");
        assert_eq!(sig12(0.000123), "0.000123");
        assert_eq!(sig12(9.9999999999995), "10");
        assert_eq!(sig12(f64::NAN), "nan");
    }

    #[test]
    fn twelve_digits_round_trip_closely() {
        for &x in &[std::f64::consts::PI, -1.0e-7 / 3.0, 6.02214076e23, 1.0 / 7.0] {
            let y: f64 = sig12(x).parse().unwrap();
            assert!(((x - y) / x).abs() < 1e-11, "{x} -> {y}");
        }
    }
}
