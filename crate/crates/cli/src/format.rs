/// `%.{digits}g`-style formatting: `digits` significant digits, trailing zeros trimmed,
/// scientific notation outside `1e-4 <= |x| < 10^digits`.
pub fn sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn g12(x: f64) -> String {
    sig(x, 12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (15.026033213, "15.026033213"),
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (123456789012.4, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.000012345, "1.2345e-05"),
            (0.00012345, "0.00012345"),
            (-3.5, "-3.5"),
            (2.0 / 3.0, "0.666666666667"),
            (9.9999999999996, "10"),
        ];
        for (x, s) in cases {
            assert_eq!(g12(x), s, "{x}");
        }
        assert_eq!(sig(f64::NAN, 12), "nan");
    }
}
