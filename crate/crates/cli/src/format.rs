/// Formats `x` with `digits` significant digits in the style of C's `%g`:
/// fixed notation for moderate exponents, scientific otherwise, and no
/// trailing zeros.
pub fn significant(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    // Round first so that e.g. 9.9999999999996 is classified by its rounded exponent.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
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
    use super::significant;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.5, "0.5"),
            (0.0, "0"),
            (1.0, "1"),
            (0.880797077977882, "0.880797077978"),
            (0.324027136831943, "0.324027136832"),
            (-2.5, "-2.5"),
            (0.05, "0.05"),
            (1.2e-7, "1.2e-07"),
            (3.0e15, "3e+15"),
            (9.99999999999996, "10"),
            (123456.7890123456, "123456.789012"),
            (0.0001234, "0.0001234"),
        ];
        for (x, want) in cases {
            assert_eq!(significant(x, 12), want, "{x}");
        }
    }

    #[test]
    fn round_trips_to_twelve_digits() {
        for x in [0.1234567890123456, 7.77e-3, 42.0 / 7.0, 1.0 / 3.0] {
            let back: f64 = significant(x, 12).parse().unwrap();
            assert!((back - x).abs() <= 5e-12 * x.abs());
        }
    }
}
