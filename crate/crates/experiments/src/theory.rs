//! Predicted exponents and the sample-size couplings N(m).

use serde::{Deserialize, Serialize};

/// 5d for p ≥ 2 and 5d + (2/p - 1)d² for p < 2.
fn denominator(d: usize, p: f64) -> f64 {
    let d = d as f64;
    if p >= 2.0 {
        5.0 * d
    } else {
        5.0 * d + (2.0 / p - 1.0) * d * d
    }
}

/// Slope of the L_p approximation error against m.
pub fn approx_exponent(d: usize, p: f64) -> f64 {
    -2.0 * (d as f64 + 2.0) / denominator(d, p)
}

/// Slope of the excess misclassification against N under the learning coupling.
pub fn learn_exponent(d: usize, p: f64, eta: f64, tau: f64) -> f64 {
    let a = 2.0 * eta * (d as f64 + 2.0);
    -a / ((2.0 - tau) * (a + denominator(d, p)))
}

/// Slope against N under the Tsybakov coupling with η = 2.
pub fn noise_exponent(d: usize, p: f64, theta: f64) -> f64 {
    let a = 4.0 * d as f64 + 8.0;
    -theta * a / ((2.0 + theta) * (a + denominator(d, p)))
}

/// The θ → ∞ limit of [`noise_exponent`].
pub fn noise_limit_exponent(d: usize, p: f64) -> f64 {
    let a = 4.0 * d as f64 + 8.0;
    -a / (a + denominator(d, p))
}

/// log N / log m of the learning coupling.
pub fn learn_coupling_power(d: usize, p: f64, eta: f64, tau: f64) -> f64 {
    let den = denominator(d, p);
    (2.0 - tau) * (2.0 * eta * (d as f64 + 2.0) + den) / den
}

/// log N / log m of the Tsybakov coupling.
pub fn noise_coupling_power(d: usize, p: f64) -> f64 {
    let den = denominator(d, p);
    (4.0 * d as f64 + 8.0 + den) / den
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    /// ⌊m^power⌋, possibly beyond `usize`.
    pub nominal: f64,
    pub n: usize,
    pub truncated: bool,
}

/// N = ⌊m^power⌋, capped at `n_max` with the cap flagged.
pub fn coupling(m: usize, power: f64, n_max: usize) -> Coupling {
    let nominal = ((m as f64).powf(power) + 1e-9).floor().max(1.0);
    if nominal > n_max as f64 {
        Coupling {
            nominal,
            n: n_max,
            truncated: true,
        }
    } else {
        Coupling {
            nominal,
            n: nominal as usize,
            truncated: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approximation_exponents() {
        assert!((approx_exponent(1, f64::INFINITY) + 1.2).abs() < 1e-15);
        assert!((approx_exponent(2, 1.0) + 8.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn learning_exponent_hinge() {
        assert!((learn_exponent(1, f64::INFINITY, 1.0, 1.0) + 6.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn noise_exponents() {
        assert!((noise_exponent(1, f64::INFINITY, 1.0) + 12.0 / 51.0).abs() < 1e-15);
        let limit = noise_limit_exponent(1, f64::INFINITY);
        assert!((limit + 12.0 / 17.0).abs() < 1e-15);
        assert!((noise_exponent(1, f64::INFINITY, 1e9) - limit).abs() < 1e-8);
    }

    #[test]
    fn couplings() {
        let c = coupling(4, noise_coupling_power(1, f64::INFINITY), 200_000);
        assert_eq!(c.n, 111);
        assert!(!c.truncated);
        let power = learn_coupling_power(1, f64::INFINITY, 2.0, 0.0);
        assert!((power - 6.8).abs() < 1e-12);
        let c = coupling(10, power, 200_000);
        assert!(c.truncated);
        assert_eq!(c.n, 200_000);
        assert!((c.nominal.log10() - 6.8).abs() < 1e-6);
    }
}
