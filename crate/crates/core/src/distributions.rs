//! Synthetic measures ρ on D × {-1, +1} with uniform marginal and a known
//! regression function f_ρ = 2η - 1.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classification::{sign_label, LossSpec, Sample};
use crate::error::{Error, Result};
use crate::numerics::{indexed_rng, Estimate};

/// Built-in regression functions; all depend on x₁ except the checkerboard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Family {
    /// f_ρ = x₁, θ = 1.
    Linear,
    /// f_ρ = sgn(x₁)|x₁|^{1/θ}, so T(r) = r^θ.
    Power { theta: f64 },
    /// f_ρ = margin·sgn(x₁), no mass near the boundary.
    HardMargin { margin: f64 },
    /// f_ρ = sin(πx₁) sin(πx₂) in d = 2.
    Checkerboard,
    /// η ≡ eta.
    Constant { eta: f64 },
}

impl Family {
    /// Looks a family up by name, with its parameter where it has one.
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self> {
        Ok(match name {
            "linear" => Family::Linear,
            "power" => Family::Power {
                theta: param.unwrap_or(2.0),
            },
            "hard_margin" => Family::HardMargin {
                margin: param.unwrap_or(1.0),
            },
            "checkerboard" => Family::Checkerboard,
            "constant" => Family::Constant {
                eta: param.unwrap_or(0.5),
            },
            other => return Err(Error::UnknownFamily(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Power { .. } => "power",
            Family::HardMargin { .. } => "hard_margin",
            Family::Checkerboard => "checkerboard",
            Family::Constant { .. } => "constant",
        }
    }
}

/// ρ with uniform marginal on D = [-1, 1]^d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    dim: usize,
    family: Family,
}

impl Distribution {
    pub fn new(dim: usize, family: Family) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Precondition("dimension must be at least 1".into()));
        }
        match family {
            Family::Checkerboard if dim != 2 => {
                return Err(Error::Precondition("the checkerboard family lives in d = 2".into()))
            }
            Family::Power { theta } if !(theta > 0.0) => {
                return Err(Error::Precondition(format!("power family needs θ > 0, got {theta}")))
            }
            Family::HardMargin { margin } if !(margin > 0.0 && margin <= 1.0) => {
                return Err(Error::Precondition(format!("margin must lie in (0, 1], got {margin}")))
            }
            Family::Constant { eta } if !(0.0..=1.0).contains(&eta) => {
                return Err(Error::Precondition(format!("η must lie in [0, 1], got {eta}")))
            }
            _ => {}
        }
        Ok(Self { dim, family })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Marginal density 2^{-d}.
    pub fn density(&self) -> f64 {
        0.5f64.powi(self.dim as i32)
    }

    /// f_ρ(x) = 2η(x) - 1.
    pub fn regression(&self, x: &[f64]) -> f64 {
        let x1 = x[0];
        match self.family {
            Family::Linear => x1,
            Family::Power { theta } => x1.signum() * x1.abs().powf(1.0 / theta),
            Family::HardMargin { margin } => margin * sign_label(x1),
            Family::Checkerboard => (PI * x1).sin() * (PI * x[1]).sin(),
            Family::Constant { eta } => 2.0 * eta - 1.0,
        }
    }

    /// η(x) = ρ(y = 1 | x).
    pub fn eta(&self, x: &[f64]) -> f64 {
        ((1.0 + self.regression(x)) / 2.0).clamp(0.0, 1.0)
    }

    /// Declared Tsybakov exponent; `None` for hard margins and families
    /// without a closed form.
    pub fn theta(&self) -> Option<f64> {
        match self.family {
            Family::Linear => Some(1.0),
            Family::Power { theta } => Some(theta),
            _ => None,
        }
    }

    pub fn c_theta(&self) -> Option<f64> {
        self.theta().map(|_| 1.0)
    }

    /// x_i for sample index i; a pure function of (seed, i).
    pub fn point(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = indexed_rng(seed, "marginal", index);
        (0..self.dim).map(|_| rng.random_range(-1.0..=1.0)).collect()
    }

    /// n labeled draws; sample i depends only on (seed, i).
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Sample> {
        (0..n as u64)
            .map(|i| {
                let x = self.point(seed, i);
                let u: f64 = indexed_rng(seed, "label", i).random();
                let y = if u < self.eta(&x) { 1.0 } else { -1.0 };
                Sample { x, y }
            })
            .collect()
    }

    /// f_c(x) = +1 iff η(x) ≥ 1/2.
    pub fn bayes_rule(&self, x: &[f64]) -> f64 {
        if self.eta(x) >= 0.5 {
            1.0
        } else {
            -1.0
        }
    }

    /// T(r) = ρ_X({x : 0 < |f_ρ(x)| ≤ r}); closed form except for the
    /// checkerboard, which uses `probe` Monte-Carlo points.
    pub fn tsybakov_function(&self, r: f64, probe: usize) -> Result<Estimate> {
        if probe < 10_000 {
            return Err(Error::Precondition(format!(
                "Tsybakov probe needs >= 10^4 points, got {probe}"
            )));
        }
        let r = r.max(0.0);
        let step = |a: f64| if a > 0.0 && a <= r { 1.0 } else { 0.0 };
        Ok(match self.family {
            Family::Linear => Estimate::exact(r.min(1.0)),
            Family::Power { theta } => Estimate::exact(r.min(1.0).powf(theta)),
            Family::HardMargin { margin } => Estimate::exact(step(margin)),
            Family::Constant { eta } => Estimate::exact(step((2.0 * eta - 1.0).abs())),
            Family::Checkerboard => {
                let hits: Vec<f64> = (0..probe as u64)
                    .map(|i| step(self.regression(&self.point(0x7eb, i)).abs()))
                    .collect();
                Estimate::from_samples(&hits)
            }
        })
    }

    /// R(f_c) = E[min(η, 1 - η)] = (1 - E|f_ρ|)/2.
    pub fn bayes_risk(&self) -> f64 {
        let mean_abs = match self.family {
            Family::Linear => 0.5,
            Family::Power { theta } => theta / (theta + 1.0),
            Family::HardMargin { margin } => margin,
            Family::Checkerboard => 4.0 / (PI * PI),
            Family::Constant { eta } => (2.0 * eta - 1.0).abs(),
        };
        (1.0 - mean_abs) / 2.0
    }
}

/// η φ(v) + (1 - η) φ(-v).
pub fn conditional_phi_risk(eta_x: f64, v: f64, spec: &LossSpec) -> f64 {
    eta_x * spec.loss(v) + (1.0 - eta_x) * spec.loss(-v)
}

/// argmin_{v ∈ [-1, 1]} η φ(v) + (1 - η) φ(-v). For the hinge loss this is
/// sgn(2η - 1) with 0 at η = 1/2; otherwise golden-section search to 1e-10,
/// polished by bisection on the derivative because the objective is flat
/// to machine precision within ~1e-8 of its minimum.
pub fn conditional_phi_minimizer(eta_x: f64, spec: &LossSpec) -> f64 {
    let e = eta_x.clamp(0.0, 1.0);
    if e == 0.5 {
        return 0.0;
    }
    if spec.eta() == 1.0 || e == 0.0 || e == 1.0 {
        return if e > 0.5 { 1.0 } else { -1.0 };
    }
    let coarse = golden_section(|v| conditional_phi_risk(e, v, spec), -1.0, 1.0, 1e-10);
    let slope = |v: f64| e * spec.derivative(v) - (1.0 - e) * spec.derivative(-v);
    let (mut lo, mut hi) = ((coarse - 1e-6).max(-1.0), (coarse + 1e-6).min(1.0));
    if slope(lo) < 0.0 && slope(hi) > 0.0 {
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    coarse
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(d: usize, f: Family) -> Distribution {
        Distribution::new(d, f).unwrap()
    }

    #[test]
    fn constant_one_gives_positive_labels() {
        let data = dist(2, Family::Constant { eta: 1.0 }).sample(500, 3);
        assert!(data.iter().all(|s| s.y == 1.0));
    }

    #[test]
    fn fair_coin_label_mean() {
        let n = 100_000;
        let data = dist(1, Family::Constant { eta: 0.5 }).sample(n, 11);
        let mean = data.iter().map(|s| s.y).sum::<f64>() / n as f64;
        assert!(mean.abs() <= 3.0 * 0.5 / (n as f64).sqrt() * 2.0, "{mean}");
    }

    #[test]
    fn sampling_is_deterministic_and_indexed() {
        let d = dist(2, Family::Linear);
        let a = d.sample(50, 7);
        assert_eq!(a, d.sample(50, 7));
        assert_eq!(a[..20], d.sample(20, 7)[..]);
        assert_ne!(a, d.sample(50, 8));
    }

    #[test]
    fn bayes_rule_examples() {
        let c = |eta| dist(1, Family::Constant { eta }).bayes_rule(&[0.0]);
        assert_eq!(c(0.7), 1.0);
        assert_eq!(c(0.2), -1.0);
        assert_eq!(c(0.5), 1.0);
    }

    #[test]
    fn tsybakov_examples() {
        let lin = dist(1, Family::Linear);
        for r in [0.1, 0.35, 0.8] {
            assert_eq!(lin.tsybakov_function(r, 10_000).unwrap().value, r);
        }
        let one = dist(1, Family::Constant { eta: 1.0 });
        assert_eq!(one.tsybakov_function(0.9, 10_000).unwrap().value, 0.0);
        let pow = dist(1, Family::Power { theta: 2.0 });
        assert!((pow.tsybakov_function(0.25, 10_000).unwrap().value - 0.0625).abs() < 1e-15);
        assert!(lin.tsybakov_function(0.5, 10).is_err());
    }

    #[test]
    fn tsybakov_closed_forms_match_sampling() {
        let families = [
            Family::Linear,
            Family::Power { theta: 2.0 },
            Family::HardMargin { margin: 0.5 },
        ];
        for f in families {
            let d = dist(1, f);
            for r in [0.1, 0.3, 0.6] {
                let n = 40_000u64;
                let hits = (0..n).filter(|&i| {
                    let a = d.regression(&d.point(5, i)).abs();
                    a > 0.0 && a <= r
                });
                let mc = hits.count() as f64 / n as f64;
                let exact = d.tsybakov_function(r, 10_000).unwrap().value;
                assert!((mc - exact).abs() < 0.01, "{f:?} r={r}: {mc} vs {exact}");
            }
        }
    }

    #[test]
    fn minimizer_examples() {
        let two = LossSpec::new(2.0).unwrap();
        assert!((conditional_phi_minimizer(0.8, &two) - 0.6).abs() < 1e-8);
        assert_eq!(conditional_phi_minimizer(0.3, &LossSpec::hinge()), -1.0);
        for eta in [1.0, 1.5, 2.0, 3.0] {
            assert_eq!(conditional_phi_minimizer(0.5, &LossSpec::new(eta).unwrap()), 0.0);
        }
    }

    #[test]
    fn minimizer_matches_grid_oracle() {
        for eta in [1.5, 2.0, 3.0, 4.5] {
            let spec = LossSpec::new(eta).unwrap();
            for i in 1..20 {
                let e = i as f64 / 20.0;
                let v = conditional_phi_minimizer(e, &spec);
                // closed form of the interior stationary point
                let r = (e / (1.0 - e)).powf(1.0 / (eta - 1.0));
                let closed = (r - 1.0) / (r + 1.0);
                assert!((v - closed).abs() < 1e-8, "eta={eta} e={e}: {v} vs {closed}");
                let grid_best = (0..=20_000)
                    .map(|j| -1.0 + j as f64 / 10_000.0)
                    .min_by(|a, b| conditional_phi_risk(e, *a, &spec).total_cmp(&conditional_phi_risk(e, *b, &spec)))
                    .unwrap();
                assert!((v - grid_best).abs() < 2e-4);
            }
        }
    }

    #[test]
    fn bayes_risk_examples() {
        assert_eq!(dist(1, Family::Linear).bayes_risk(), 0.25);
        assert_eq!(dist(1, Family::HardMargin { margin: 1.0 }).bayes_risk(), 0.0);
        assert_eq!(dist(1, Family::Constant { eta: 0.5 }).bayes_risk(), 0.5);
    }

    #[test]
    fn invalid_families() {
        assert!(Distribution::new(1, Family::Checkerboard).is_err());
        assert!(Distribution::new(1, Family::HardMargin { margin: 1.5 }).is_err());
        assert_eq!(
            Family::from_name("spiral", None).unwrap_err(),
            Error::UnknownFamily("spiral".into())
        );
    }
}
