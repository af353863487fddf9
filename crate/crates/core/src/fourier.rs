//! Fourier analysis on the torus T^d = [-π, π)^d: sparse coefficient maps,
//! the Jackson-type smoothing operator J_N, the weight v = Σ|ĉ(k)|‖k‖₁²,
//! the multiplier T_L k ↦ a_k ĉ(k) ∏ k_s², and the dyadic blocks Λ_ℓ.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::korobov::PeriodicFunction;
use crate::numerics::{for_each_tensor_point, pairwise_sum};

/// A frequency vector k ∈ Z^d.
pub type Mode = Vec<i64>;

/// Coefficients below this magnitude are not stored.
pub const PRUNE_TOL: f64 = 1e-14;

/// Sparse map k ↦ ĉ(k) for ‖k‖_∞ ≤ kmax, iterated in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    dim: usize,
    kmax: usize,
    entries: BTreeMap<Mode, Complex64>,
}

impl FourierCoefficients {
    pub fn new(dim: usize, kmax: usize) -> Self {
        Self {
            dim,
            kmax,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Stores `value` at `k`, dropping it if it is negligible.
    pub fn insert(&mut self, k: Mode, value: Complex64) {
        assert_eq!(k.len(), self.dim, "mode has wrong dimension");
        assert!(
            k.iter().all(|c| c.unsigned_abs() as usize <= self.kmax),
            "mode {k:?} outside the cutoff {}",
            self.kmax
        );
        if value.norm() < PRUNE_TOL {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, value);
        }
    }

    pub fn get(&self, k: &[i64]) -> Complex64 {
        self.entries.get(k).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex64)> {
        self.entries.iter()
    }

    /// max over stored k of |ĉ(-k) - conj ĉ(k)|.
    pub fn hermitian_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|(k, c)| {
                let neg: Mode = k.iter().map(|v| -v).collect();
                (self.get(&neg) - c.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// α·self + β·other, coefficient-wise.
    pub fn linear_combination(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::new(self.dim, self.kmax.max(other.kmax));
        for (k, c) in &self.entries {
            out.insert(k.clone(), c * alpha + other.get(k) * beta);
        }
        for (k, c) in &other.entries {
            if !self.entries.contains_key(k) {
                out.insert(k.clone(), c * beta);
            }
        }
        out
    }

    /// max_k |self(k) - other(k)|.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let keys = self.entries.keys().chain(other.entries.keys());
        keys.map(|k| (self.get(k) - other.get(k)).norm()).fold(0.0, f64::max)
    }

    /// Σ_k ĉ(k) e^{ik·t}, real part.
    pub fn eval_at(&self, t: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .entries
            .iter()
            .map(|(k, c)| {
                let phase: f64 = k.iter().zip(t).map(|(&kj, &tj)| kj as f64 * tj).sum();
                c.re * phase.cos() - c.im * phase.sin()
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Values of the trigonometric polynomial on the uniform torus grid
    /// t_j = -π + 2πj/grid, row-major.
    pub fn synthesize(&self, grid: usize) -> Vec<f64> {
        let angles: Vec<f64> = (0..grid).map(|j| grid_angle(j, grid)).collect();
        let axes: Vec<&[f64]> = (0..self.dim).map(|_| angles.as_slice()).collect();
        self.eval_tensor(&axes)
    }

    /// Values on the tensor grid spanned by `axes` (angles), row-major, by
    /// separable direct summation.
    pub fn eval_tensor(&self, axes: &[&[f64]]) -> Vec<f64> {
        assert_eq!(axes.len(), self.dim);
        let kmax = self.kmax as i64;
        let width = 2 * self.kmax + 1;
        let mut data = vec![Complex64::default(); width.pow(self.dim as u32)];
        for (k, c) in &self.entries {
            let mut flat = 0;
            for &kj in k {
                flat = flat * width + (kj + kmax) as usize;
            }
            data[flat] = *c;
        }
        let mut shape = vec![width; self.dim];
        for (axis, points) in axes.iter().enumerate() {
            let table: Vec<Vec<Complex64>> = points
                .iter()
                .map(|&t| {
                    (-kmax..=kmax)
                        .map(|k| Complex64::from_polar(1.0, k as f64 * t))
                        .collect()
                })
                .collect();
            let (next, next_shape) = axis_transform(&data, &shape, axis, &table);
            data = next;
            shape = next_shape;
        }
        data.into_iter().map(|c| c.re).collect()
    }

    /// Σ_k |ĉ(k)|².
    pub fn squared_l2(&self) -> f64 {
        let terms: Vec<f64> = self.entries.values().map(|c| c.norm_sqr()).collect();
        pairwise_sum(&terms)
    }

    /// ‖Σ ĉ(k)e^{ik·t}‖_{L_2(T^d)} under Lebesgue measure, via Parseval.
    pub fn torus_l2_norm(&self) -> f64 {
        ((2.0 * PI).powi(self.dim as i32) * self.squared_l2()).sqrt()
    }

    pub fn to_json(&self) -> String {
        let doc = CoefficientDocument {
            dim: self.dim,
            kmax: self.kmax,
            entries: self.entries.iter().map(|(k, c)| (k.clone(), c.re, c.im)).collect(),
        };
        serde_json::to_string(&doc).expect("coefficient document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CoefficientDocument = serde_json::from_str(text)?;
        let mut out = Self::new(doc.dim, doc.kmax);
        for (k, re, im) in doc.entries {
            if k.len() != doc.dim {
                return Err(Error::DimensionMismatch {
                    expected: doc.dim,
                    got: k.len(),
                });
            }
            if k.iter().any(|c| c.unsigned_abs() as usize > doc.kmax) {
                return Err(Error::Serde(format!("mode {k:?} exceeds kmax {}", doc.kmax)));
            }
            out.insert(k, Complex64::new(re, im));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct CoefficientDocument {
    dim: usize,
    kmax: usize,
    entries: Vec<(Mode, f64, f64)>,
}

fn grid_angle(j: usize, grid: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / grid as f64
}

/// Applies `table` (out_len × in_len) along `axis` of a row-major array.
fn axis_transform(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    table: &[Vec<Complex64>],
) -> (Vec<Complex64>, Vec<usize>) {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let n_in = shape[axis];
    let n_out = table.len();
    let mut out = vec![Complex64::default(); outer * n_out * inner];
    for o in 0..outer {
        for (r, row) in table.iter().enumerate() {
            debug_assert_eq!(row.len(), n_in);
            let dst = (o * n_out + r) * inner;
            for (j, w) in row.iter().enumerate() {
                let src = (o * n_in + j) * inner;
                for i in 0..inner {
                    out[dst + i] += data[src + i] * w;
                }
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = n_out;
    (out, new_shape)
}

/// ĉ(k) = (2π)^{-d} ∫ f(t) e^{-ik·t} dt for ‖k‖_∞ ≤ kmax, by the trapezoid
/// rule on a uniform grid (exact for trigonometric polynomials of degree < grid - kmax).
pub fn analyze(f: &PeriodicFunction, kmax: usize, grid: usize) -> Result<FourierCoefficients> {
    let needed = 2 * kmax + 2;
    if grid < needed {
        return Err(Error::Aliasing { grid, kmax, needed });
    }
    let d = f.dim();
    let angles: Vec<f64> = (0..grid).map(|j| grid_angle(j, grid)).collect();
    let axes: Vec<&[f64]> = (0..d).map(|_| angles.as_slice()).collect();
    let mut data = Vec::with_capacity(grid.pow(d as u32));
    let mut failure = None;
    for_each_tensor_point(&axes, |t, _| {
        let v = f.eval(t);
        if !v.is_finite() && failure.is_none() {
            failure = Some(Error::Evaluation {
                point: t.to_vec(),
                value: v,
            });
        }
        data.push(Complex64::new(v, 0.0));
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let k = kmax as i64;
    let scale = 1.0 / grid as f64;
    let table: Vec<Vec<Complex64>> = (-k..=k)
        .map(|kk| {
            angles
                .iter()
                .map(|&t| Complex64::from_polar(scale, -(kk as f64) * t))
                .collect()
        })
        .collect();
    let mut shape = vec![grid; d];
    for axis in 0..d {
        let (next, next_shape) = axis_transform(&data, &shape, axis, &table);
        data = next;
        shape = next_shape;
    }
    let width = 2 * kmax + 1;
    let mut out = FourierCoefficients::new(d, kmax);
    for (flat, c) in data.into_iter().enumerate() {
        let mut rem = flat;
        let mut mode = vec![0i64; d];
        for j in (0..d).rev() {
            mode[j] = (rem % width) as i64 - k;
            rem /= width;
        }
        out.insert(mode, c);
    }
    Ok(out)
}

/// Univariate multiplier families a^{[1]}_j supported on |j| ≤ 2^L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// Square of the Fejér kernel of order max(1, 2^{L-1}), normalized to a_0 = 1.
    Jackson2,
    /// a = 1 for |j| ≤ 2^{L-1}, then linear decay to 0 at |j| = 2^L.
    DeLaValleePoussin,
    Custom,
}

/// Degree N, level L = ⌈log₂N⌉ and the multipliers a^{[1]}_j, |j| ≤ 2^L.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacksonSpec {
    degree: usize,
    level: u32,
    kind: ProfileKind,
    /// a^{[1]}_j stored at index j + 2^L.
    profile: Vec<f64>,
}

/// ⌈log₂ n⌉ for n ≥ 1.
pub fn ceil_log2(n: usize) -> u32 {
    assert!(n >= 1);
    usize::BITS - (n - 1).leading_zeros()
}

impl JacksonSpec {
    /// Jackson-2 multipliers for degree N.
    pub fn new(degree: usize) -> Self {
        Self::with_kind(degree, ProfileKind::Jackson2)
    }

    pub fn with_kind(degree: usize, kind: ProfileKind) -> Self {
        assert!(degree >= 1, "Jackson degree must be positive");
        let level = ceil_log2(degree);
        let support = 1usize << level;
        let profile = match kind {
            ProfileKind::Jackson2 | ProfileKind::Custom => jackson2_profile(support),
            ProfileKind::DeLaValleePoussin => vallee_poussin_profile(support),
        };
        let kind = if kind == ProfileKind::Custom {
            ProfileKind::Jackson2
        } else {
            kind
        };
        Self {
            degree,
            level,
            kind,
            profile,
        }
    }

    /// A user-supplied profile of length 2·2^L + 1, centred at j = 0.
    pub fn from_profile(level: u32, profile: Vec<f64>) -> Result<Self> {
        let expected = 2 * (1usize << level) + 1;
        if profile.len() != expected {
            return Err(Error::InconsistentProfile {
                level,
                expected,
                got: profile.len(),
            });
        }
        let support = 1usize << level;
        if (profile[support] - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "profile must have a_0 = 1, got {}",
                profile[support]
            )));
        }
        if profile.iter().any(|a| a.abs() > 1.0 + 1e-12) {
            return Err(Error::Precondition("profile entries must satisfy |a_j| <= 1".into()));
        }
        Ok(Self {
            degree: support,
            level,
            kind: ProfileKind::Custom,
            profile,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// 2^L, the coordinate degree of J_N(f).
    pub fn support(&self) -> usize {
        1 << self.level
    }

    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    fn check(&self) -> Result<()> {
        let expected = 2 * self.support() + 1;
        if self.profile.len() != expected {
            return Err(Error::InconsistentProfile {
                level: self.level,
                expected,
                got: self.profile.len(),
            });
        }
        Ok(())
    }

    /// a^{[1]}_j, zero for |j| > 2^L.
    pub fn coefficient(&self, j: i64) -> f64 {
        let s = self.support() as i64;
        if j.abs() > s {
            0.0
        } else {
            self.profile[(j + s) as usize]
        }
    }

    /// a_{k,2^L} = ∏_j a^{[1]}_{k_j}.
    pub fn multiplier(&self, k: &[i64]) -> f64 {
        k.iter().map(|&kj| self.coefficient(kj)).product()
    }

    /// G(t) = Σ_{|j| ≤ 2^L} a_j e^{ijt} for a real even profile.
    pub fn kernel_1d(&self, t: f64) -> f64 {
        let s = self.support() as i64;
        let terms: Vec<f64> = (-s..=s).map(|j| self.coefficient(j) * (j as f64 * t).cos()).collect();
        pairwise_sum(&terms)
    }
}

fn jackson2_profile(support: usize) -> Vec<f64> {
    let n = (support / 2).max(1) as i64;
    let tri = |k: i64| {
        if k.abs() < n {
            1.0 - k.abs() as f64 / n as f64
        } else {
            0.0
        }
    };
    let s = support as i64;
    let raw: Vec<f64> = (-s..=s).map(|j| (-n..=n).map(|k| tri(k) * tri(j - k)).sum()).collect();
    let c0 = raw[support];
    raw.into_iter().map(|c| c / c0).collect()
}

fn vallee_poussin_profile(support: usize) -> Vec<f64> {
    let s = support as f64;
    let half = s / 2.0;
    (-(support as i64)..=support as i64)
        .map(|j| {
            let a = j.abs() as f64;
            if a <= half {
                1.0
            } else {
                (s - a) / (s - half)
            }
        })
        .collect()
}

/// Ĵ_N(k) = a_{k,2^L} ĉ(k) for ‖k‖_∞ ≤ 2^L.
pub fn jackson_apply(c: &FourierCoefficients, spec: &JacksonSpec) -> Result<FourierCoefficients> {
    spec.check()?;
    let support = spec.support();
    if c.kmax() < support {
        return Err(Error::Precondition(format!(
            "coefficients analysed up to {} but the operator needs 2^L = {support}",
            c.kmax()
        )));
    }
    let mut out = FourierCoefficients::new(c.dim(), support);
    for (k, v) in c.iter() {
        if k.iter().all(|kj| kj.unsigned_abs() as usize <= support) {
            out.insert(k.clone(), v * spec.multiplier(k));
        }
    }
    Ok(out)
}

/// Analyses `f` up to 2^L on `grid` points per axis and applies J_N.
pub fn jackson_apply_fn(f: &PeriodicFunction, spec: &JacksonSpec, grid: usize) -> Result<FourierCoefficients> {
    jackson_apply(&analyze(f, spec.support(), grid)?, spec)
}

/// v = Σ_k |ĉ(k)| ‖k‖₁².
pub fn v_weight(c: &FourierCoefficients) -> f64 {
    let terms: Vec<f64> = c
        .iter()
        .map(|(k, v)| {
            let l1: i64 = k.iter().map(|x| x.abs()).sum();
            v.norm() * (l1 * l1) as f64
        })
        .collect();
    pairwise_sum(&terms)
}

/// Coefficients of T_L f: k ↦ a_{k,2^L} ĉ(k) ∏_s k_s² on ‖k‖_∞ ≤ 2^L.
pub fn t_l_apply(c: &FourierCoefficients, spec: &JacksonSpec) -> FourierCoefficients {
    let support = spec.support();
    let mut out = FourierCoefficients::new(c.dim(), support);
    for (k, v) in c.iter() {
        if k.iter().any(|kj| kj.unsigned_abs() as usize > support) {
            continue;
        }
        let weight: f64 = k.iter().map(|&kj| (kj * kj) as f64).product();
        out.insert(k.clone(), v * (spec.multiplier(k) * weight));
    }
    out
}

/// Norms of the tensor kernel G_{2^L}(t) = ∏_j G(t_j).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelNorms {
    /// ‖G‖_{L_1} under the normalized measure (2π)^{-d} dt.
    pub l1: f64,
    pub linf: f64,
}

fn kernel_samples(spec: &JacksonSpec, grid: usize) -> Result<Vec<f64>> {
    let needed = 8 * spec.support();
    if grid < needed {
        return Err(Error::Precondition(format!(
            "kernel grid {grid} below 8·2^L = {needed}"
        )));
    }
    Ok((0..grid).map(|j| spec.kernel_1d(grid_angle(j, grid))).collect())
}

/// L_1 (normalized measure) and L_∞ norms of G on T^d, as d-th powers of the
/// univariate norms.
pub fn kernel_norms(spec: &JacksonSpec, dim: usize, grid: usize) -> Result<KernelNorms> {
    let g = kernel_samples(spec, grid)?;
    let abs: Vec<f64> = g.iter().map(|v| v.abs()).collect();
    let l1 = pairwise_sum(&abs) / grid as f64;
    let linf = abs.iter().copied().fold(0.0, f64::max);
    Ok(KernelNorms {
        l1: l1.powi(dim as i32),
        linf: linf.powi(dim as i32),
    })
}

/// ‖G‖_{L_q(T^d)} under Lebesgue measure, q > 0.
pub fn kernel_lq_norm(spec: &JacksonSpec, dim: usize, q: f64, grid: usize) -> Result<f64> {
    let g = kernel_samples(spec, grid)?;
    if q.is_infinite() {
        return Ok(g.iter().map(|v| v.abs()).fold(0.0, f64::max).powi(dim as i32));
    }
    let powered: Vec<f64> = g.iter().map(|v| v.abs().powf(q)).collect();
    let one_axis = (2.0 * PI * pairwise_sum(&powered) / grid as f64).powf(1.0 / q);
    Ok(one_axis.powi(dim as i32))
}

/// ‖g‖_{L_p(T^d)} under Lebesgue measure, by the trapezoid rule on a uniform grid.
pub fn torus_lp_norm(g: &dyn Fn(&[f64]) -> f64, dim: usize, p: f64, grid: usize) -> f64 {
    let angles: Vec<f64> = (0..grid).map(|j| grid_angle(j, grid)).collect();
    let axes: Vec<&[f64]> = (0..dim).map(|_| angles.as_slice()).collect();
    let mut vals = Vec::with_capacity(grid.pow(dim as u32));
    for_each_tensor_point(&axes, |t, _| vals.push(g(t).abs()));
    if p.is_infinite() {
        return vals.into_iter().fold(0.0, f64::max);
    }
    let cell = (2.0 * PI / grid as f64).powi(dim as i32);
    let powered: Vec<f64> = vals.iter().map(|v| v.powf(p)).collect();
    (cell * pairwise_sum(&powered)).powf(1.0 / p)
}

/// Both sides of the convolution bound on ‖T_L f‖_{L_2(T^d)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungCheck {
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl YoungCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-12)
    }
}

/// ‖T_L f‖_2 against (2π)^{-d} ‖∂^{2d}f‖_p ‖G‖_q with q = 2p/(3p-2) for p < 2;
/// for p ≥ 2 the L_2 norm of the derivative is bounded through Hölder,
/// ‖g‖_2 ≤ (2π)^{d(1/2-1/p)} ‖g‖_p, and paired with ‖G‖_1.
pub fn young_step_check(f: &PeriodicFunction, p: f64, spec: &JacksonSpec, grid: usize) -> Result<YoungCheck> {
    let d = f.dim();
    let coeffs = analyze(f, spec.support(), grid)?;
    let lhs = t_l_apply(&coeffs, spec).torus_l2_norm();
    let deriv = |t: &[f64]| f.mixed_deriv(t);
    let deriv_p = torus_lp_norm(&deriv, d, p, grid);
    let kernel_grid = grid.max(8 * spec.support());
    let scale = (2.0 * PI).powi(-(d as i32));
    let rhs = if p < 2.0 {
        let q = 2.0 * p / (3.0 * p - 2.0);
        scale * deriv_p * kernel_lq_norm(spec, d, q, kernel_grid)?
    } else {
        let holder = if p.is_infinite() { 0.5 } else { 0.5 - 1.0 / p };
        scale * deriv_p * (2.0 * PI).powf(d as f64 * holder) * kernel_lq_norm(spec, d, 1.0, kernel_grid)?
    };
    Ok(YoungCheck { p, lhs, rhs })
}

/// Λ_ℓ = {k : 2^{ℓ_j - 1} < |k_j| ≤ 2^{ℓ_j} for all j}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicBlock {
    pub level: Vec<u32>,
}

impl DyadicBlock {
    pub fn contains(&self, k: &[i64]) -> bool {
        k.len() == self.level.len()
            && k.iter().zip(&self.level).all(|(&kj, &l)| {
                let a = kj.unsigned_abs();
                // 2^{l-1} < |k| ≤ 2^l; for l = 0 this is |k| = 1
                let upper = 1u64 << l;
                let lower_exclusive = if l == 0 { 0 } else { 1u64 << (l - 1) };
                a > lower_exclusive && a <= upper
            })
    }

    /// All members of the block, lexicographically.
    pub fn members(&self) -> Vec<Mode> {
        let axes: Vec<Vec<f64>> = self
            .level
            .iter()
            .map(|&l| {
                let upper = 1i64 << l;
                let lower = if l == 0 { 0 } else { 1i64 << (l - 1) };
                (-upper..=upper).filter(|k| k.abs() > lower).map(|k| k as f64).collect()
            })
            .collect();
        let refs: Vec<&[f64]> = axes.iter().map(|a| a.as_slice()).collect();
        let mut out = Vec::new();
        for_each_tensor_point(&refs, |k, _| out.push(k.iter().map(|&v| v as i64).collect()));
        out
    }
}

/// Every block Λ_ℓ, ℓ ∈ {0, …, L}^d, in lexicographic order of ℓ.
pub fn dyadic_blocks(level: u32, dim: usize) -> impl Iterator<Item = DyadicBlock> {
    let per_axis = level as usize + 1;
    let total = per_axis.pow(dim as u32);
    (0..total).map(move |mut code| {
        let mut l = vec![0u32; dim];
        for j in (0..dim).rev() {
            l[j] = (code % per_axis) as u32;
            code /= per_axis;
        }
        DyadicBlock { level: l }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::korobov::{make_test_function, periodic_extension, TestFamily};
    use std::sync::Arc;

    fn cosine() -> PeriodicFunction {
        PeriodicFunction::new(1, Arc::new(|t: &[f64]| t[0].cos()), Arc::new(|t: &[f64]| -t[0].cos()))
    }

    #[test]
    fn analyze_cosine() {
        let c = analyze(&cosine(), 2, 16).unwrap();
        assert!((c.get(&[1]) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((c.get(&[-1]) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        for k in [-2, 0, 2] {
            assert!(c.get(&[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn analyze_constant() {
        let f = PeriodicFunction::new(2, Arc::new(|_: &[f64]| 3.5), Arc::new(|_: &[f64]| 0.0));
        let c = analyze(&f, 3, 8).unwrap();
        assert!((c.get(&[0, 0]).re - 3.5).abs() < 1e-12);
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn analyze_sine_product() {
        let f = PeriodicFunction::new(
            2,
            Arc::new(|t: &[f64]| t[0].sin() * t[1].sin()),
            Arc::new(|t: &[f64]| t[0].sin() * t[1].sin()),
        );
        let c = analyze(&f, 2, 8).unwrap();
        let expect = [([1, 1], -0.25), ([1, -1], 0.25), ([-1, 1], 0.25), ([-1, -1], -0.25)];
        for (k, v) in expect {
            assert!((c.get(&k) - Complex64::new(v, 0.0)).norm() < 1e-12, "{k:?}");
        }
        assert_eq!(c.len(), 4);
    }

    #[test]
    fn aliasing_is_rejected() {
        assert_eq!(
            analyze(&cosine(), 4, 9).unwrap_err(),
            Error::Aliasing {
                grid: 9,
                kmax: 4,
                needed: 10
            }
        );
    }

    #[test]
    fn jackson_profiles_satisfy_invariants() {
        for kind in [ProfileKind::Jackson2, ProfileKind::DeLaValleePoussin] {
            for n in [1, 2, 3, 8, 13, 32] {
                let spec = JacksonSpec::with_kind(n, kind);
                assert_eq!(spec.coefficient(0), 1.0);
                let s = spec.support() as i64;
                for j in -s - 3..=s + 3 {
                    assert!(spec.coefficient(j).abs() <= 1.0);
                    if j.abs() > s {
                        assert_eq!(spec.coefficient(j), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn level_is_ceil_log2() {
        assert_eq!(JacksonSpec::new(1).level(), 0);
        assert_eq!(JacksonSpec::new(8).level(), 3);
        assert_eq!(JacksonSpec::new(9).level(), 4);
        assert_eq!(JacksonSpec::new(12).support(), 16);
    }

    #[test]
    fn jackson2_first_multiplier_closed_form() {
        // 1 - a_1 = 3 / (2n² + 1) for the Fejér-squared profile of order n
        for (degree, n) in [(8usize, 4.0f64), (16, 8.0), (32, 16.0)] {
            let spec = JacksonSpec::new(degree);
            let expected = 1.0 - 3.0 / (2.0 * n * n + 1.0);
            assert!((spec.coefficient(1) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn inconsistent_profile_is_rejected() {
        assert!(matches!(
            JacksonSpec::from_profile(2, vec![0.0, 1.0, 0.0]),
            Err(Error::InconsistentProfile {
                level: 2,
                expected: 9,
                got: 3
            })
        ));
    }

    #[test]
    fn jackson_reproduces_constants() {
        let f = PeriodicFunction::new(1, Arc::new(|_: &[f64]| 2.0), Arc::new(|_: &[f64]| 0.0));
        let spec = JacksonSpec::new(8);
        let j = jackson_apply_fn(&f, &spec, 64).unwrap();
        assert!((j.get(&[0]).re - 2.0).abs() < 1e-12);
        assert_eq!(j.len(), 1);
    }

    #[test]
    fn jackson_cosine_rate() {
        let grid: Vec<f64> = (0..4096).map(|j| grid_angle(j, 4096)).collect();
        let errs: Vec<f64> = [8usize, 16, 32, 64]
            .iter()
            .map(|&n| {
                let spec = JacksonSpec::new(n);
                let j = jackson_apply_fn(&cosine(), &spec, 4 * spec.support()).unwrap();
                grid.iter()
                    .map(|&t| (j.eval_at(&[t]) - t.cos()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.4..=4.6).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn v_weight_examples() {
        let mut c = FourierCoefficients::new(2, 1);
        c.insert(vec![1, 1], Complex64::from_polar(1.0, 0.7));
        assert!((v_weight(&c) - 4.0).abs() < 1e-14);
        let mut z = FourierCoefficients::new(2, 1);
        z.insert(vec![0, 0], Complex64::new(5.0, 0.0));
        assert_eq!(v_weight(&z), 0.0);
        let spec = JacksonSpec::new(4);
        let j = jackson_apply_fn(&cosine(), &spec, 32).unwrap();
        assert!((v_weight(&j) - spec.coefficient(1)).abs() < 1e-12);
    }

    #[test]
    fn t_l_on_cosine_and_constant() {
        let ones = JacksonSpec::from_profile(1, vec![1.0; 5]).unwrap();
        let c = analyze(&cosine(), 2, 8).unwrap();
        let t = t_l_apply(&c, &ones);
        assert!((t.get(&[1]).re - 0.5).abs() < 1e-12);
        assert!((t.get(&[-1]).re - 0.5).abs() < 1e-12);
        let k = FourierCoefficients::from_json(r#"{"dim":1,"kmax":2,"entries":[[[0],4.0,0.0]]}"#).unwrap();
        assert!(t_l_apply(&k, &ones).is_empty());
    }

    #[test]
    fn synthesize_matches_pointwise_evaluation() {
        let f = make_test_function(TestFamily::RandomTrig, 2, 3).unwrap();
        let c = analyze(&periodic_extension(&f).unwrap(), 4, 16).unwrap();
        let grid = 12;
        let vals = c.synthesize(grid);
        for (flat, v) in vals.iter().enumerate() {
            let t = [grid_angle(flat / grid, grid), grid_angle(flat % grid, grid)];
            assert!((v - c.eval_at(&t)).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_l1_factorizes() {
        let spec = JacksonSpec::new(8);
        let one = kernel_norms(&spec, 1, 256).unwrap();
        let two = kernel_norms(&spec, 2, 256).unwrap();
        assert!((two.l1 - one.l1 * one.l1).abs() < 1e-9);
        assert!(one.l1 <= 4.0);
        assert!(kernel_norms(&spec, 1, 32).is_err());
    }

    #[test]
    fn dyadic_small_cases() {
        let blocks: Vec<_> = dyadic_blocks(1, 1).collect();
        assert_eq!(blocks[0].members(), vec![vec![-1], vec![1]]);
        assert_eq!(blocks[1].members(), vec![vec![-2], vec![2]]);
        let total: usize = dyadic_blocks(2, 2).map(|b| b.members().len()).sum();
        assert_eq!(total, 64);
    }

    #[test]
    fn dyadic_blocks_partition() {
        let blocks: Vec<_> = dyadic_blocks(3, 2).collect();
        for k0 in -9i64..=9 {
            for k1 in -9i64..=9 {
                let k = [k0, k1];
                let hits = blocks.iter().filter(|b| b.contains(&k)).count();
                let inside = (1..=8).contains(&k0.abs()) && (1..=8).contains(&k1.abs());
                assert_eq!(hits, usize::from(inside), "{k:?}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f = make_test_function(TestFamily::RandomTrig, 2, 1).unwrap();
        let c = analyze(&periodic_extension(&f).unwrap(), 3, 8).unwrap();
        let back = FourierCoefficients::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
