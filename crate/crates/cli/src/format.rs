//! Number rendering shared by the CSV and JSON writers.

use std::f64::consts::LN_10;

/// Lowercase scientific notation with 9 significant digits, e.g.
/// `1.20450727e0`.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

/// Renders `mantissa · e^{ln_scale}` in the same notation as [`sci`], also
/// when the product is outside the double range.
pub fn sci_scaled(mantissa: f64, ln_scale: f64) -> String {
    let direct = mantissa * ln_scale.exp();
    if mantissa == 0.0 || direct.is_nan() || direct.is_normal() {
        return sci(direct);
    }
    let log10 = (mantissa.abs().ln() + ln_scale) / LN_10;
    let mut exponent = log10.floor();
    let mut digits = format!("{:.8}", 10f64.powf(log10 - exponent));
    if digits.starts_with("10") {
        exponent += 1.0;
        digits = format!("{:.8}", 1.0);
    }
    let sign = if mantissa < 0.0 { "-" } else { "" };
    format!("{sign}{digits}e{exponent}")
}

/// Shortest round-trip decimal, always with a fractional part or exponent
/// (`1.0`, `0.25`, `1e-5`).
pub fn tau(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific() {
        let q0 = std::f64::consts::PI.sqrt() / 4.0 * 1f64.exp();
        assert_eq!(sci(q0), "1.20450727e0");
        assert_eq!(sci(-1.5), "-1.50000000e0");
        assert_eq!(sci(2.5e-7), "2.50000000e-7");
        assert_eq!(tau(1.0), "1.0");
        assert_eq!(tau(0.25), "0.25");
    }

    #[test]
    fn scaled_beyond_double_range() {
        assert_eq!(sci_scaled(1.5, 0.0), "1.50000000e0");
        // e^{1000} = 1.97007111e434
        assert_eq!(sci_scaled(1.0, 1000.0), "1.97007111e434");
        assert_eq!(sci_scaled(-2.0, 1000.0), "-3.94014223e434");
        assert_eq!(sci_scaled(1.0, -1000.0), "5.07595890e-435");
    }
}
