//! Shared numerical plumbing: reproducible summation, Gauss–Legendre rules,
//! quadrature policy on the cube D = [-1, 1]^d, and named random streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pairwise (tree) summation. The reduction order depends only on the length,
/// so repeated runs give bit-identical sums.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss–Legendre rule on [a, b] with `panels` equal panels.
pub fn composite_gauss_legendre(a: f64, b: f64, order: usize, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(order * panels);
    let mut weights = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            nodes.push(lo + 0.5 * h * (x + 1.0));
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

/// How L_p integrals over D = [-1, 1]^d are computed.
///
/// Tensor composite Gauss–Legendre for `d <= 3` and finite p, Latin-hypercube
/// Monte Carlo for `d > 3`, and a max over a dense uniform grid for p = ∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Panels per axis; keep it even so that x = 0 is a panel edge.
    pub panels: usize,
    /// Uniform intervals per axis on the first two axes of the sup grid.
    pub sup_major: usize,
    /// Uniform intervals per axis on the remaining axes of the sup grid.
    pub sup_minor: usize,
    pub mc_points: usize,
    pub mc_seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 16,
            panels: 4,
            sup_major: 256,
            sup_minor: 64,
            mc_points: 1 << 16,
            mc_seed: 0x5eed,
        }
    }
}

impl QuadratureSpec {
    /// Gauss–Legendre rule with `points` nodes per axis, split into 16-node panels.
    pub fn with_resolution(points: usize) -> Self {
        let order = points.min(16);
        let panels = points.div_ceil(order);
        Self {
            order,
            panels,
            ..Self::default()
        }
    }

    pub fn points_per_axis(&self) -> usize {
        self.order * self.panels
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.points_per_axis() < 8 {
            return Err(Error::Precondition(format!(
                "quadrature needs at least 8 points per axis, got {}",
                self.points_per_axis()
            )));
        }
        Ok(())
    }

    /// Nodes and weights of the per-axis rule on [-1, 1].
    pub fn axis_rule(&self) -> (Vec<f64>, Vec<f64>) {
        composite_gauss_legendre(-1.0, 1.0, self.order, self.panels)
    }

    /// Axes of the uniform sup grid on [-1, 1]^d.
    pub fn sup_axes(&self, dim: usize) -> Vec<Vec<f64>> {
        (0..dim)
            .map(|j| uniform_grid(-1.0, 1.0, if j < 2 { self.sup_major } else { self.sup_minor }))
            .collect()
    }
}

/// Visit every point of the tensor grid spanned by `axes` in row-major order.
pub fn for_each_tensor_point(axes: &[&[f64]], mut visit: impl FnMut(&[f64], &[usize])) {
    let d = axes.len();
    if d == 0 || axes.iter().any(|a| a.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; d];
    let mut point: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    loop {
        visit(&point, &idx);
        let mut axis = d;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < axes[axis].len() {
                point[axis] = axes[axis][idx[axis]];
                break;
            }
            idx[axis] = 0;
            point[axis] = axes[axis][0];
        }
    }
}

/// Uniform grid with `intervals` intervals on [a, b], endpoints included.
pub fn uniform_grid(a: f64, b: f64, intervals: usize) -> Vec<f64> {
    let h = (b - a) / intervals as f64;
    (0..=intervals).map(|i| a + i as f64 * h).collect()
}

fn checked(point: &[f64], value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation {
            point: point.to_vec(),
            value,
        })
    }
}

/// ‖f‖_{L_p(D)} on D = [-1, 1]^d under the given quadrature policy.
pub fn lp_norm_on_cube(f: &dyn Fn(&[f64]) -> f64, dim: usize, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Precondition(format!("L_p norm needs p >= 1, got {p}")));
    }
    quad.check()?;
    if p.is_infinite() {
        return sup_on_cube(f, dim, quad);
    }
    let mut terms = Vec::new();
    let mut failure = None;
    if dim <= 3 {
        let (nodes, weights) = quad.axis_rule();
        let axes: Vec<&[f64]> = (0..dim).map(|_| nodes.as_slice()).collect();
        for_each_tensor_point(&axes, |x, idx| {
            if failure.is_some() {
                return;
            }
            match checked(x, f(x)) {
                Ok(v) => {
                    let w: f64 = idx.iter().map(|&i| weights[i]).product();
                    terms.push(w * v.abs().powf(p));
                }
                Err(e) => failure = Some(e),
            }
        });
    } else {
        let volume = 2f64.powi(dim as i32);
        let points = latin_hypercube(dim, quad.mc_points, quad.mc_seed);
        let w = volume / points.len() as f64;
        for x in &points {
            let v = checked(x, f(x))?;
            terms.push(w * v.abs().powf(p));
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(pairwise_sum(&terms).powf(1.0 / p))
}

/// Points and weights of the finite-p rule on D: the tensor Gauss–Legendre
/// grid in row-major order for `d <= 3`, Latin-hypercube points otherwise.
pub fn quadrature_points(dim: usize, quad: &QuadratureSpec) -> (Vec<Vec<f64>>, Vec<f64>) {
    if dim <= 3 {
        let (nodes, weights) = quad.axis_rule();
        let axes: Vec<&[f64]> = (0..dim).map(|_| nodes.as_slice()).collect();
        let mut points = Vec::new();
        let mut w = Vec::new();
        for_each_tensor_point(&axes, |x, idx| {
            points.push(x.to_vec());
            w.push(idx.iter().map(|&i| weights[i]).product());
        });
        (points, w)
    } else {
        let points = latin_hypercube(dim, quad.mc_points, quad.mc_seed);
        let w = vec![2f64.powi(dim as i32) / points.len() as f64; points.len()];
        (points, w)
    }
}

/// (Σ w_i |r_i|^p)^{1/p}, or max |r_i| for p = ∞.
pub fn weighted_lp(residuals: &[f64], weights: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    }
    let terms: Vec<f64> = residuals
        .iter()
        .zip(weights)
        .map(|(r, w)| w * r.abs().powf(p))
        .collect();
    pairwise_sum(&terms).powf(1.0 / p)
}

/// max_{x ∈ grid} |f(x)| over the dense uniform sup grid of `quad`.
pub fn sup_on_cube(f: &dyn Fn(&[f64]) -> f64, dim: usize, quad: &QuadratureSpec) -> Result<f64> {
    let grid = quad.sup_axes(dim);
    let axes: Vec<&[f64]> = grid.iter().map(|a| a.as_slice()).collect();
    let mut best = 0.0f64;
    let mut failure = None;
    for_each_tensor_point(&axes, |x, _| {
        if failure.is_some() {
            return;
        }
        match checked(x, f(x)) {
            Ok(v) => best = best.max(v.abs()),
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// Latin-hypercube sample of `n` points in [-1, 1]^d: each axis is split into
/// `n` strata and every stratum holds exactly one point.
pub fn latin_hypercube(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stream_rng(seed, "latin-hypercube");
    let mut points = vec![vec![0.0; dim]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for j in 0..dim {
        for i in (1..n).rev() {
            let k = rng.random_range(0..=i);
            perm.swap(i, k);
        }
        for (i, pt) in points.iter_mut().enumerate() {
            let u: f64 = rng.random();
            pt[j] = -1.0 + 2.0 * (perm[i] as f64 + u) / n as f64;
        }
    }
    points
}

/// A ChaCha generator keyed by a seed and a stream name. ChaCha is
/// counter-based, so (seed, name) fully determines the sequence.
pub fn stream_rng(seed: u64, stream: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(stream.as_bytes()));
    rng
}

/// Generator for item `index` of a named stream; used where samples must be
/// pure functions of (seed, index).
pub fn indexed_rng(seed: u64, stream: &str, index: u64) -> ChaCha8Rng {
    let mixed = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    stream_rng(mixed, stream)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0 }
    }

    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = pairwise_sum(xs) / n;
        if xs.len() < 2 {
            return Self {
                value: mean,
                std_error: 0.0,
            };
        }
        let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&sq) / (n - 1.0);
        Self {
            value: mean,
            std_error: (var / n).sqrt(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // degree 15 is exact for 8 nodes
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((integral - 2.0 / 15.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_rule_has_zero_node() {
        let (x, w) = gauss_legendre(5);
        assert_eq!(x[2], 0.0);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-14);
    }

    #[test]
    fn pairwise_matches_naive_on_small_inputs() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&xs), 249750.0);
    }

    #[test]
    fn tensor_iteration_visits_all_points() {
        let a = [0.0, 1.0];
        let b = [0.0, 1.0, 2.0];
        let mut count = 0;
        let mut sum = 0.0;
        for_each_tensor_point(&[&a, &b], |x, _| {
            count += 1;
            sum += x[0] + x[1];
        });
        assert_eq!(count, 6);
        assert_eq!(sum, 9.0);
    }

    #[test]
    fn non_finite_value_names_the_point() {
        let f = |x: &[f64]| if x[0] > 0.5 { f64::NAN } else { 0.0 };
        let err = lp_norm_on_cube(&f, 1, 2.0, &QuadratureSpec::default()).unwrap_err();
        match err {
            Error::Evaluation { point, .. } => assert!(point[0] > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn latin_hypercube_fills_every_stratum() {
        let pts = latin_hypercube(4, 64, 3);
        for j in 0..4 {
            let mut seen = [false; 64];
            for p in &pts {
                let s = ((p[j] + 1.0) / 2.0 * 64.0).floor() as usize;
                seen[s.min(63)] = true;
            }
            assert!(seen.iter().all(|&b| b));
        }
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream_rng(1, "a").random();
        let a2: u64 = stream_rng(1, "a").random();
        let b: u64 = stream_rng(1, "b").random();
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }
}
