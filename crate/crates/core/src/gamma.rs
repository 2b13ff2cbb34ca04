//! Gamma function: exact recursion at integers and half-integers, Lanczos
//! approximation elsewhere.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(k/2) for a positive integer `k`, via Γ(1) = 1, Γ(1/2) = √π and
/// Γ(x + 1) = xΓ(x).
pub fn gamma_half_integer(k: u32) -> f64 {
    assert!(k > 0, "Γ(k/2) needs k > 0");
    let (mut value, mut x) = if k.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = f64::from(k) / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Lanczos approximation of Γ(x) for real `x`, with reflection for x < 1/2.
pub fn lanczos_gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * lanczos_gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEFFS[0];
        for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// Γ(x), exact whenever `2x` is a positive integer.
pub fn gamma(x: f64) -> f64 {
    let twice = 2.0 * x;
    if x > 0.0 && twice.fract() == 0.0 && twice <= 340.0 {
        gamma_half_integer(twice as u32)
    } else {
        lanczos_gamma(x)
    }
}
