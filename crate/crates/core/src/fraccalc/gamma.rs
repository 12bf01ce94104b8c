//! Gamma function via the Lanczos approximation (g = 7, n = 9).

use std::f64::consts::PI;

use super::FracError;

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

/// Largest n for which (n-1)! is exactly representable as an f64.
const EXACT_FACTORIAL_MAX: f64 = 23.0;

/// Γ(x) for finite `x` away from the poles at 0, −1, −2, ...
///
/// Positive integers up to 23 are returned exactly from the factorial
/// product. Arguments below 0.5 go through the reflection formula.
pub fn gamma(x: f64) -> Result<f64, FracError> {
    if !x.is_finite() {
        return Err(FracError::Domain(format!("gamma of non-finite value {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(FracError::Domain(format!("gamma pole at {x}")));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x > 0.0 && x == x.floor() && x <= EXACT_FACTORIAL_MAX {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }

    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }

    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // split the power so large arguments do not overflow before exp(-t) pulls them back
    let half_pow = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half_pow * (-t).exp() * half_pow * series
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_integers_are_factorials() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(2.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_eq!(gamma(11.0).unwrap(), 3_628_800.0);
    }

    #[test]
    fn half_integer() {
        let v = gamma(0.5).unwrap();
        assert!((v - PI.sqrt()).abs() / PI.sqrt() < 1e-14, "{v}");
    }

    #[test]
    fn poles_are_domain_errors() {
        for x in [0.0, -1.0, -2.0, -17.0] {
            assert!(matches!(gamma(x), Err(FracError::Domain(_))), "x = {x}");
        }
        assert!(gamma(f64::NAN).is_err());
        assert!(gamma(f64::INFINITY).is_err());
    }

    #[test]
    fn negative_non_integer_uses_reflection() {
        // Γ(-0.5) = -2√π
        let v = gamma(-0.5).unwrap();
        let want = -2.0 * PI.sqrt();
        assert!((v - want).abs() / want.abs() < 1e-14, "{v}");
    }

    #[test]
    fn recurrence_holds_on_a_grid() {
        // Γ(x + 1) = x Γ(x)
        let mut x = 0.1;
        while x < 29.0 {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!((lhs - rhs).abs() / lhs.abs() < 5e-14, "x = {x}");
            x += 0.37;
        }
    }
}
