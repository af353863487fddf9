//! Korobov-space test functions on D = [-1, 1]^d, their mixed second
//! derivatives ∂^{2d}F / ∂x_1² … ∂x_d², the X^{2,p} norm and the periodic
//! extension to the torus [-π, π)^d.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::numerics::{lp_norm_on_cube, stream_rng, uniform_grid, QuadratureSpec};

/// A real field on a d-dimensional domain.
pub type Field = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Tolerance for "vanishes on the boundary".
pub const BOUNDARY_TOL: f64 = 1e-10;

/// One term c · ∏_j sin(n_j π x_j) of a boundary-vanishing sine sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineTerm {
    pub coeff: f64,
    pub freqs: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
enum Structure {
    SineSum(Vec<SineTerm>),
    Bump,
    Opaque,
}

/// F ∈ X^{2,p}(D) together with its mixed derivative. Built-in families also
/// know their exact norm for the exponents where a closed form exists.
#[derive(Clone)]
pub struct KorobovFunction {
    dim: usize,
    name: String,
    eval: Field,
    mixed_deriv: Field,
    structure: Structure,
    scale: f64,
}

impl fmt::Debug for KorobovFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KorobovFunction")
            .field("dim", &self.dim)
            .field("name", &self.name)
            .field("scale", &self.scale)
            .finish()
    }
}

impl KorobovFunction {
    /// A user-supplied function; no analytic norm is known.
    pub fn from_fields(dim: usize, name: impl Into<String>, eval: Field, mixed_deriv: Field) -> Self {
        Self {
            dim,
            name: name.into(),
            eval,
            mixed_deriv,
            structure: Structure::Opaque,
            scale: 1.0,
        }
    }

    /// Σ_i c_i ∏_j sin(n_ij π x_j).
    pub fn sine_sum(dim: usize, terms: Vec<SineTerm>) -> Self {
        assert!(terms
            .iter()
            .all(|t| t.freqs.len() == dim && t.freqs.iter().all(|&n| n >= 1)));
        let eval_terms = terms.clone();
        let eval: Field = Arc::new(move |x: &[f64]| {
            eval_terms
                .iter()
                .map(|t| {
                    t.coeff
                        * t.freqs
                            .iter()
                            .zip(x)
                            .map(|(&n, &xj)| (n as f64 * PI * xj).sin())
                            .product::<f64>()
                })
                .sum()
        });
        let deriv_terms = terms.clone();
        let mixed_deriv: Field = Arc::new(move |x: &[f64]| {
            deriv_terms
                .iter()
                .map(|t| {
                    t.coeff
                        * t.freqs
                            .iter()
                            .zip(x)
                            .map(|(&n, &xj)| {
                                let w = n as f64 * PI;
                                -w * w * (w * xj).sin()
                            })
                            .product::<f64>()
                })
                .sum()
        });
        let name = if terms.len() == 1 {
            "sine_product"
        } else {
            "random_trig"
        };
        Self {
            dim,
            name: name.into(),
            eval,
            mixed_deriv,
            structure: Structure::SineSum(terms),
            scale: 1.0,
        }
    }

    /// ∏_j (1 - x_j²)², which vanishes together with its first derivative at ±1.
    pub fn polynomial_bump(dim: usize) -> Self {
        let eval: Field = Arc::new(|x: &[f64]| x.iter().map(|&t| (1.0 - t * t).powi(2)).product());
        let mixed_deriv: Field = Arc::new(|x: &[f64]| x.iter().map(|&t| 12.0 * t * t - 4.0).product());
        Self {
            dim,
            name: "polynomial_bump".into(),
            eval,
            mixed_deriv,
            structure: Structure::Bump,
            scale: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.scale * (self.eval)(x)
    }

    pub fn mixed_deriv(&self, x: &[f64]) -> f64 {
        self.scale * (self.mixed_deriv)(x)
    }

    /// Sine terms of the sine families (after scaling), if any.
    pub fn sine_terms(&self) -> Option<Vec<SineTerm>> {
        match &self.structure {
            Structure::SineSum(terms) => Some(
                terms
                    .iter()
                    .map(|t| SineTerm {
                        coeff: t.coeff * self.scale,
                        freqs: t.freqs.clone(),
                    })
                    .collect(),
            ),
            _ => None,
        }
    }

    /// c · F.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale *= c;
        out
    }

    /// F + G; the sum has no analytic norm.
    pub fn sum(&self, other: &KorobovFunction) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        Ok(Self::from_fields(
            self.dim,
            format!("{}+{}", self.name, other.name),
            Arc::new(move |x: &[f64]| a.eval(x) + b.eval(x)),
            Arc::new(move |x: &[f64]| a2.mixed_deriv(x) + b2.mixed_deriv(x)),
        ))
    }

    /// Exact ‖F‖_{X^{2,p}(D)} when a closed form is available for this p.
    pub fn analytic_norm(&self, p: f64) -> Option<f64> {
        let d = self.dim as i32;
        let s = self.scale.abs();
        match &self.structure {
            Structure::SineSum(terms) if terms.len() == 1 => {
                let t = &terms[0];
                let weight: f64 = t.freqs.iter().map(|&n| (n as f64 * PI).powi(2)).product();
                let base = if p.is_infinite() {
                    1.0
                } else {
                    // ∫_{-1}^{1} |sin(nπx)|^p dx does not depend on the integer n.
                    let one_axis = 2.0 * gamma((p + 1.0) / 2.0) / (PI.sqrt() * gamma(p / 2.0 + 1.0));
                    one_axis.powf(d as f64 / p)
                };
                Some(s * t.coeff.abs() * base * (weight + 1.0))
            }
            Structure::SineSum(terms) if p == 2.0 => {
                // sin(aπx) and sin(bπx) are orthonormal on [-1, 1] for a ≠ b.
                let mut merged: Vec<(Vec<u32>, f64)> = Vec::new();
                for t in terms {
                    match merged.iter_mut().find(|(f, _)| *f == t.freqs) {
                        Some((_, c)) => *c += t.coeff,
                        None => merged.push((t.freqs.clone(), t.coeff)),
                    }
                }
                let f2: f64 = merged.iter().map(|(_, c)| c * c).sum();
                let g2: f64 = merged
                    .iter()
                    .map(|(freqs, c)| {
                        let w: f64 = freqs.iter().map(|&n| (n as f64 * PI).powi(2)).product();
                        (c * w).powi(2)
                    })
                    .sum();
                Some(s * (f2.sqrt() + g2.sqrt()))
            }
            Structure::Bump => {
                let (deriv_axis, fn_axis) = if p.is_infinite() {
                    (8.0, 1.0)
                } else if p == 1.0 {
                    (32.0 / (3.0 * 3f64.sqrt()), 16.0 / 15.0)
                } else if p == 2.0 {
                    ((128.0f64 / 5.0).sqrt(), (256.0f64 / 315.0).sqrt())
                } else {
                    return None;
                };
                Some(s * (deriv_axis.powi(d) + fn_axis.powi(d)))
            }
            _ => None,
        }
    }

    /// Samples every face of D and checks |F| < 1e-10 there.
    pub fn vanishes_on_boundary(&self) -> bool {
        self.max_on_boundary() < BOUNDARY_TOL
    }

    fn max_on_boundary(&self) -> f64 {
        let per_axis = match self.dim {
            1 => 1,
            2 => 65,
            3 => 17,
            _ => 5,
        };
        let grid = uniform_grid(-1.0, 1.0, per_axis.max(2) - 1);
        let mut worst = 0.0f64;
        let mut x = vec![0.0; self.dim];
        for face_axis in 0..self.dim {
            for side in [-1.0, 1.0] {
                let count = grid.len().pow(self.dim as u32 - 1);
                for mut code in 0..count {
                    for (j, xj) in x.iter_mut().enumerate() {
                        if j == face_axis {
                            *xj = side;
                        } else {
                            *xj = grid[code % grid.len()];
                            code /= grid.len();
                        }
                    }
                    worst = worst.max(self.eval(&x).abs());
                }
            }
        }
        worst
    }
}

/// ‖∂^{2d}F‖_{L_p(D)} + ‖F‖_{L_p(D)} by quadrature (p < ∞) or a dense-grid max.
pub fn korobov_norm(f: &KorobovFunction, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    let deriv = |x: &[f64]| f.mixed_deriv(x);
    let value = |x: &[f64]| f.eval(x);
    Ok(lp_norm_on_cube(&deriv, f.dim, p, quad)? + lp_norm_on_cube(&value, f.dim, p, quad)?)
}

/// Exact norm when the family knows it, quadrature otherwise.
pub fn korobov_norm_or_analytic(f: &KorobovFunction, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    match f.analytic_norm(p) {
        Some(v) => Ok(v),
        None => korobov_norm(f, p, quad),
    }
}

/// Built-in test-function families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFamily {
    SineProduct,
    PolynomialBump,
    RandomTrig,
}

impl FromStr for TestFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine_product" => Ok(Self::SineProduct),
            "polynomial_bump" => Ok(Self::PolynomialBump),
            "random_trig" => Ok(Self::RandomTrig),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for TestFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SineProduct => "sine_product",
            Self::PolynomialBump => "polynomial_bump",
            Self::RandomTrig => "random_trig",
        })
    }
}

/// Number of sine products in a `random_trig` function.
pub const RANDOM_TRIG_TERMS: usize = 3;

pub fn make_test_function(family: TestFamily, dim: usize, seed: u64) -> Result<KorobovFunction> {
    if dim == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    Ok(match family {
        TestFamily::SineProduct => KorobovFunction::sine_sum(
            dim,
            vec![SineTerm {
                coeff: 1.0,
                freqs: vec![1; dim],
            }],
        ),
        TestFamily::PolynomialBump => KorobovFunction::polynomial_bump(dim),
        TestFamily::RandomTrig => {
            let mut rng = stream_rng(seed, "random-trig");
            let terms = (0..RANDOM_TRIG_TERMS)
                .map(|_| SineTerm {
                    coeff: rng.random_range(-1.0..1.0),
                    freqs: (0..dim).map(|_| rng.random_range(1..=2)).collect(),
                })
                .collect();
            KorobovFunction::sine_sum(dim, terms)
        }
    })
}

/// Parses a family name and builds the function.
pub fn make_test_function_by_name(name: &str, dim: usize, seed: u64) -> Result<KorobovFunction> {
    make_test_function(name.parse()?, dim, seed)
}

/// A 2π-periodic function on the torus T^d = [-π, π)^d.
#[derive(Clone)]
pub struct PeriodicFunction {
    dim: usize,
    eval: Field,
    mixed_deriv: Field,
}

impl fmt::Debug for PeriodicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicFunction").field("dim", &self.dim).finish()
    }
}

/// Reduces t to [-π, π).
pub fn wrap_angle(t: f64) -> f64 {
    (t + PI).rem_euclid(2.0 * PI) - PI
}

impl PeriodicFunction {
    /// Wraps closures that are already 2π-periodic.
    pub fn new(dim: usize, eval: Field, mixed_deriv: Field) -> Self {
        Self { dim, eval, mixed_deriv }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        (self.eval)(t)
    }

    pub fn mixed_deriv(&self, t: &[f64]) -> f64 {
        (self.mixed_deriv)(t)
    }
}

/// f(t) = F(t/π) on [-π, π)^d, extended 2π-periodically. Direct periodization
/// is continuous because F vanishes on ∂D.
pub fn periodic_extension(f: &KorobovFunction) -> Result<PeriodicFunction> {
    if !f.vanishes_on_boundary() {
        return Err(Error::Precondition(format!(
            "{} does not vanish on the boundary (max |F| = {:e})",
            f.name,
            f.max_on_boundary()
        )));
    }
    let dim = f.dim;
    let to_cube = |t: &[f64]| -> Vec<f64> { t.iter().map(|&s| wrap_angle(s) / PI).collect() };
    let g = f.clone();
    let eval: Field = Arc::new(move |t: &[f64]| g.eval(&to_cube(t)));
    let h = f.clone();
    let chain = PI.powi(-2 * dim as i32);
    let mixed_deriv: Field = Arc::new(move |t: &[f64]| chain * h.mixed_deriv(&to_cube(t)));
    Ok(PeriodicFunction { dim, eval, mixed_deriv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn sine_norm_sup() {
        let f = make_test_function(TestFamily::SineProduct, 1, 0).unwrap();
        let expected = PI * PI + 1.0;
        let numeric = korobov_norm(&f, f64::INFINITY, &quad()).unwrap();
        assert!((numeric - expected).abs() < 1e-12, "{numeric}");
        assert!((f.analytic_norm(f64::INFINITY).unwrap() - 10.869604401089358).abs() < 1e-12);
    }

    #[test]
    fn sine_norm_l2() {
        let f = make_test_function(TestFamily::SineProduct, 1, 0).unwrap();
        let numeric = korobov_norm(&f, 2.0, &quad()).unwrap();
        assert!((numeric - (PI * PI + 1.0)).abs() < 1e-10, "{numeric}");
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let f = make_test_function(TestFamily::SineProduct, 2, 0).unwrap().scaled(0.0);
        for p in [1.0, 2.0, f64::INFINITY] {
            assert_eq!(korobov_norm(&f, p, &quad()).unwrap(), 0.0);
        }
    }

    #[test]
    fn analytic_norms_match_quadrature() {
        let fams = [
            TestFamily::SineProduct,
            TestFamily::PolynomialBump,
            TestFamily::RandomTrig,
        ];
        for fam in fams {
            for d in 1..=2 {
                let f = make_test_function(fam, d, 11).unwrap();
                for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
                    let Some(exact) = f.analytic_norm(p) else { continue };
                    // the L_1 integrand of the bump has kinks off the panel edges
                    let (q, tol) = if fam == TestFamily::PolynomialBump && p == 1.0 {
                        (
                            QuadratureSpec {
                                order: 16,
                                panels: 64,
                                ..quad()
                            },
                            1e-5,
                        )
                    } else {
                        (quad(), 1e-6)
                    };
                    let numeric = korobov_norm(&f, p, &q).unwrap();
                    let rel = (numeric - exact).abs() / exact;
                    assert!(rel < tol, "{fam} d={d} p={p}: {numeric} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn families_vanish_on_boundary() {
        for fam in [
            TestFamily::SineProduct,
            TestFamily::PolynomialBump,
            TestFamily::RandomTrig,
        ] {
            for d in 1..=3 {
                assert!(make_test_function(fam, d, 5).unwrap().vanishes_on_boundary());
            }
        }
    }

    #[test]
    fn canonical_members() {
        let f = make_test_function(TestFamily::SineProduct, 2, 99).unwrap();
        let x = [0.3, -0.7];
        assert!((f.eval(&x) - (PI * 0.3).sin() * (-PI * 0.7).sin()).abs() < 1e-15);
        let b = make_test_function(TestFamily::PolynomialBump, 1, 99).unwrap();
        assert!((b.eval(&[0.5]) - 0.5625).abs() < 1e-15);
        assert!((b.mixed_deriv(&[0.5]) - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn random_trig_is_deterministic() {
        let a = make_test_function(TestFamily::RandomTrig, 1, 7).unwrap();
        let b = make_test_function(TestFamily::RandomTrig, 1, 7).unwrap();
        assert_eq!(a.sine_terms(), b.sine_terms());
        let c = make_test_function(TestFamily::RandomTrig, 1, 8).unwrap();
        assert_ne!(a.sine_terms(), c.sine_terms());
    }

    #[test]
    fn unknown_family_is_rejected() {
        assert_eq!(
            make_test_function_by_name("gaussian", 1, 0).unwrap_err(),
            Error::UnknownFamily("gaussian".into())
        );
    }

    #[test]
    fn extension_of_sine_is_sine() {
        let f = make_test_function(TestFamily::SineProduct, 1, 0).unwrap();
        let ext = periodic_extension(&f).unwrap();
        for i in 0..50 {
            let t = -PI + i as f64 * 0.13;
            assert!((ext.eval(&[t]) - t.sin()).abs() < 1e-14);
            assert!((ext.mixed_deriv(&[t]) + t.sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn extension_is_periodic_and_continuous() {
        let f = make_test_function(TestFamily::SineProduct, 2, 0).unwrap();
        let ext = periodic_extension(&f).unwrap();
        let a = ext.eval(&[-PI + 1e-9, 0.4]);
        let b = ext.eval(&[PI - 1e-9, 0.4]);
        assert!((a - b).abs() < 1e-6);
        for j in 0..2 {
            let t = [0.37, -1.91];
            let mut s = t;
            s[j] += 2.0 * PI;
            assert!((ext.eval(&t) - ext.eval(&s)).abs() < 1e-12);
        }
    }

    #[test]
    fn extension_of_zero_is_zero() {
        let f = make_test_function(TestFamily::PolynomialBump, 2, 0)
            .unwrap()
            .scaled(0.0);
        let ext = periodic_extension(&f).unwrap();
        assert_eq!(ext.eval(&[0.1, 2.0]), 0.0);
    }

    #[test]
    fn extension_requires_boundary_vanishing() {
        let f = KorobovFunction::from_fields(1, "one", Arc::new(|_: &[f64]| 1.0), Arc::new(|_: &[f64]| 0.0));
        assert!(matches!(periodic_extension(&f), Err(Error::Precondition(_))));
    }
}
