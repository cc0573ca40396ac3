//! Number formatting shared by every CSV the tool writes.

/// Twelve significant digits in the style of C's `%.12g`: fixed notation
/// for decimal exponents in `[-4, 12)`, scientific otherwise, trailing
/// zeros removed. Negative zero prints as `0`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
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
    use super::num;

    #[test]
    fn matches_printf_g12() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.125), "0.125");
        assert_eq!(num(1.0 - (-2.0f64).exp()), "0.864664716763");
        assert_eq!(num(-0.75), "-0.75");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(123456789012.0), "123456789012");
        assert_eq!(num(1234567890123.0), "1.23456789012e+12");
        assert_eq!(num(0.0001), "0.0001");
        assert_eq!(num(0.00001234), "1.234e-05");
        assert_eq!(num(9.9999999999996), "10");
        assert_eq!(num(-2.5e-300), "-2.5e-300");
    }
}
