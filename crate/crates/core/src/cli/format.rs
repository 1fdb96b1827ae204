//! Output formatting shared by all writers.

/// `printf("%.12e")` formatting: twelve mantissa digits and a signed exponent of at least two digits.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exponent) = s.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let sign = if exponent < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exponent.abs())
}

/// One CSV record with LF ending.
pub fn csv_row(values: &[f64]) -> String {
    let mut line = values.iter().map(|v| format_float(*v)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        assert_eq!(format_float(0.0), "0.000000000000e+00");
        assert_eq!(format_float(1.5), "1.500000000000e+00");
        assert_eq!(format_float(-1.234e-5), "-1.234000000000e-05");
        assert_eq!(format_float(6.02e123), "6.020000000000e+123");
        assert_eq!(csv_row(&[1.0, 2.0]), "1.000000000000e+00,2.000000000000e+00\n");
    }
}
