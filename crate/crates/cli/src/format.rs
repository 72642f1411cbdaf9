/// Shortest-form rendering with 12 significant digits, like `%.12g`.
pub fn g12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim_fraction(format!("{:.*}", (11 - exp) as usize, v))
    } else {
        format!("{}e{}", trim_fraction(mantissa.to_string()), exp)
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// An optional column: empty when the model has no such parameter.
pub fn opt(v: Option<f64>) -> String {
    v.map(g12).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(g12(6.888728577680618), "6.88872857768");
        assert_eq!(g12(100.0), "100");
        assert_eq!(g12(0.05), "0.05");
        assert_eq!(g12(-1.5e-9), "-1.5e-9");
        assert_eq!(g12(1.0 / 3.0 * 1e14), "3.33333333333e13");
        assert_eq!(g12(0.000123456789012345), "0.000123456789012");
        assert_eq!(g12(-0.0), "0");
    }
}
