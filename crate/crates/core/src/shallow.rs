//! Width-m shallow ReLU networks f_m(x) = Σ β_k σ(α_k·x - b_k) + offset, the
//! constrained class H_m, the sampled ridge construction of a trigonometric
//! polynomial, and the end-to-end width-m approximation pipeline.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{analyze, jackson_apply, v_weight, FourierCoefficients, JacksonSpec, Mode, ProfileKind};
use crate::korobov::{periodic_extension, KorobovFunction};
use crate::numerics::{
    for_each_tensor_point, lp_norm_on_cube, quadrature_points, stream_rng, weighted_lp, QuadratureSpec,
};

/// Absolute slack used by the constraint checks.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Ridge damping of the β refit.
pub const REFIT_RIDGE: f64 = 1e-10;

/// One ridge atom β σ(α·x - b).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub alpha: Vec<f64>,
    pub b: f64,
    pub beta: f64,
}

impl Atom {
    pub fn value(&self, x: &[f64]) -> f64 {
        let pre: f64 = self.alpha.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() - self.b;
        self.beta * pre.max(0.0)
    }
}

/// A shallow ReLU network plus a constant offset that carries the k = 0 and
/// ridge-constant parts of a target. The offset is outside the class H_m and
/// is ignored by [`check_constraints`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShallowNet {
    #[serde(rename = "d")]
    dim: usize,
    #[serde(rename = "m")]
    width: usize,
    offset: f64,
    atoms: Vec<Atom>,
}

impl ShallowNet {
    pub fn new(dim: usize, atoms: Vec<Atom>, offset: f64) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| a.alpha.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: a.alpha.len(),
            });
        }
        Ok(Self {
            dim,
            width: atoms.len(),
            offset,
            atoms,
        })
    }

    /// The network with no atoms and zero offset.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            width: 0,
            offset: 0.0,
            atoms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// The same atoms with new outer weights.
    pub fn with_betas(&self, betas: &[f64]) -> Self {
        assert_eq!(betas.len(), self.width);
        let mut out = self.clone();
        for (a, &b) in out.atoms.iter_mut().zip(betas) {
            a.beta = b;
        }
        out
    }

    /// f_m(x) without the dimension check.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.offset + self.atoms.iter().map(|a| a.value(x)).sum::<f64>()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.value(x))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ShallowNet = serde_json::from_str(text)?;
        if raw.width != raw.atoms.len() {
            return Err(Error::Serde(format!(
                "m = {} but {} atoms listed",
                raw.width,
                raw.atoms.len()
            )));
        }
        Self::new(raw.dim, raw.atoms, raw.offset)
    }
}

/// The box defining H_m: ‖α_k‖₁ ≤ 1, 0 ≤ b_k ≤ 1, |β_k| ≤ beta_cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisConstraints {
    pub dim: usize,
    pub width: usize,
    pub beta_cap: f64,
    pub alpha_l1_cap: f64,
    pub b_range: (f64, f64),
}

impl HypothesisConstraints {
    /// beta_cap = 4π² C₅ m^{(1+2/d)/10} / m.
    pub fn new(dim: usize, width: usize, c5: f64) -> Self {
        let m = width as f64;
        let cap = 4.0 * PI * PI * c5 * m.powf((1.0 + 2.0 / dim as f64) / 10.0) / m;
        Self::with_beta_cap(dim, width, cap)
    }

    pub fn with_beta_cap(dim: usize, width: usize, beta_cap: f64) -> Self {
        Self {
            dim,
            width,
            beta_cap,
            alpha_l1_cap: 1.0,
            b_range: (0.0, 1.0),
        }
    }
}

/// Which constraint an atom broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintField {
    Alpha,
    B,
    Beta,
}

impl std::fmt::Display for ConstraintField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Alpha => "alpha",
            Self::B => "b",
            Self::Beta => "beta",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub atom: usize,
    pub field: ConstraintField,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub satisfied: bool,
    pub first_violation: Option<Violation>,
}

pub fn check_constraints(net: &ShallowNet, c: &HypothesisConstraints) -> ConstraintReport {
    let (lo, hi) = c.b_range;
    let cap_tol = CONSTRAINT_TOL * c.beta_cap.max(1.0);
    let first_violation = net.atoms.iter().enumerate().find_map(|(i, a)| {
        let l1: f64 = a.alpha.iter().map(|v| v.abs()).sum();
        if l1 > c.alpha_l1_cap + CONSTRAINT_TOL {
            Some(Violation {
                atom: i,
                field: ConstraintField::Alpha,
                value: l1,
                limit: c.alpha_l1_cap,
            })
        } else if a.b < lo - CONSTRAINT_TOL {
            Some(Violation {
                atom: i,
                field: ConstraintField::B,
                value: a.b,
                limit: lo,
            })
        } else if a.b > hi + CONSTRAINT_TOL {
            Some(Violation {
                atom: i,
                field: ConstraintField::B,
                value: a.b,
                limit: hi,
            })
        } else if a.beta.abs() > c.beta_cap + cap_tol {
            Some(Violation {
                atom: i,
                field: ConstraintField::Beta,
                value: a.beta,
                limit: c.beta_cap,
            })
        } else {
            None
        }
    });
    ConstraintReport {
        satisfied: first_violation.is_none(),
        first_violation,
    }
}

/// How the m atoms are drawn from the ridge mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingScheme {
    /// Independent draws.
    Iid,
    /// One draw per stratum [(i + U)/m, (i + 1 + U)/m) of the mixture's CDF.
    #[default]
    Stratified,
}

/// Antiderivative of |cos| that is continuous and increasing.
fn abs_cos_integral(theta: f64) -> f64 {
    let k = (theta / PI).round();
    let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
    2.0 * k + sign * theta.sin()
}

fn abs_cos_integral_inverse(y: f64) -> f64 {
    let k = (y / 2.0).round();
    k * PI + (y - 2.0 * k).clamp(-1.0, 1.0).asin()
}

/// The ridge h(u) = |c| cos(π s u + φ), u = α·x, of one mode k, written as
/// h(0) + h'(0)[σ(u) - σ(-u)] + ∫₀¹ h''(b)σ(u - b)db + ∫₀¹ h''(-b)σ(-u - b)db.
struct RidgeMixture {
    alpha: Vec<f64>,
    s: f64,
    amplitude: f64,
    phase: f64,
    /// w_k / W with w_k = |c_k| ‖k‖₁².
    probability: f64,
    /// Total-variation masses of the linear (+, -) and curvature (+, -) parts.
    masses: [f64; 4],
}

impl RidgeMixture {
    fn new(mode: &Mode, c: num_complex::Complex64, total_weight: f64) -> Self {
        let s = mode.iter().map(|k| k.abs()).sum::<i64>() as f64;
        let alpha = mode.iter().map(|&k| k as f64 / s).collect();
        let amplitude = c.norm();
        let phase = c.arg();
        let slope = amplitude * PI * s * phase.sin().abs();
        let curvature = |phi: f64| amplitude * PI * s * (abs_cos_integral(phi + PI * s) - abs_cos_integral(phi));
        Self {
            alpha,
            s,
            amplitude,
            phase,
            probability: amplitude * s * s / total_weight,
            masses: [slope, slope, curvature(phase), curvature(-phase)],
        }
    }

    fn total_variation(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// The atom at relative position r ∈ [0, 1) of this mode's mixture,
    /// weighted for a sample of width m.
    fn atom(&self, r: f64, m: usize) -> Atom {
        let tv = self.total_variation();
        let mut target = r * tv;
        let mut segment = self.masses.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        for (j, &w) in self.masses.iter().enumerate() {
            if w > 0.0 && target < w {
                segment = j;
                break;
            }
            target -= w;
        }
        let local = (target / self.masses[segment]).clamp(0.0, 1.0);
        let beta_mag = tv / (self.probability * m as f64);
        let neg_alpha = || self.alpha.iter().map(|a| -a).collect::<Vec<_>>();
        let derivative_at_zero = -self.amplitude * PI * self.s * self.phase.sin();
        match segment {
            0 => Atom {
                alpha: self.alpha.clone(),
                b: 0.0,
                beta: derivative_at_zero.signum() * beta_mag,
            },
            1 => Atom {
                alpha: neg_alpha(),
                b: 0.0,
                beta: -derivative_at_zero.signum() * beta_mag,
            },
            _ => {
                let phi = if segment == 2 { self.phase } else { -self.phase };
                let lo = abs_cos_integral(phi);
                let hi = abs_cos_integral(phi + PI * self.s);
                let theta = abs_cos_integral_inverse(lo + local * (hi - lo));
                let b = ((theta - phi) / (PI * self.s)).clamp(0.0, 1.0);
                // h'' = -|c| π² s² cos θ
                let sign = if theta.cos() >= 0.0 { -1.0 } else { 1.0 };
                let alpha = if segment == 2 { self.alpha.clone() } else { neg_alpha() };
                Atom {
                    alpha,
                    b,
                    beta: sign * beta_mag,
                }
            }
        }
    }
}

/// Samples m ridge atoms whose expectation is the trigonometric polynomial
/// x ↦ Σ_k ĉ(k) e^{iπk·x} on D. Modes are drawn with probability proportional
/// to |ĉ(k)|‖k‖₁², so every |β| stays below 4π² v / m.
pub fn maurey_construct(c: &FourierCoefficients, m: usize, seed: u64) -> Result<ShallowNet> {
    maurey_construct_with(c, m, seed, SamplingScheme::default())
}

pub fn maurey_construct_with(
    c: &FourierCoefficients,
    m: usize,
    seed: u64,
    scheme: SamplingScheme,
) -> Result<ShallowNet> {
    if m == 0 {
        return Err(Error::Precondition("width m must be at least 1".into()));
    }
    let total = v_weight(c);
    if total <= 0.0 {
        return Err(Error::DegenerateTarget);
    }
    let offset: f64 = c.iter().map(|(_, v)| v.re).sum();
    let ridges: Vec<RidgeMixture> = c
        .iter()
        .filter(|(k, _)| k.iter().any(|&kj| kj != 0))
        .map(|(k, v)| RidgeMixture::new(k, *v, total))
        .collect();
    let mut rng = stream_rng(seed, "maurey");
    let shift: f64 = rng.random();
    let mut cumulative = Vec::with_capacity(ridges.len());
    let mut acc = 0.0;
    for r in &ridges {
        acc += r.probability;
        cumulative.push(acc);
    }
    let atoms = (0..m)
        .map(|i| {
            let u = match scheme {
                SamplingScheme::Iid => rng.random::<f64>(),
                SamplingScheme::Stratified => (i as f64 + shift) / m as f64,
            } * acc;
            let j = cumulative.partition_point(|&c| c <= u).min(ridges.len() - 1);
            let start = if j == 0 { 0.0 } else { cumulative[j - 1] };
            let r = ((u - start) / ridges[j].probability).clamp(0.0, 1.0 - f64::EPSILON);
            ridges[j].atom(r, m)
        })
        .collect();
    ShallowNet::new(c.dim(), atoms, offset)
}

/// The cap 4π² v / m that every sampled atom respects.
pub fn realized_beta_cap(c: &FourierCoefficients, m: usize) -> f64 {
    4.0 * PI * PI * v_weight(c) / m as f64
}

/// Outcome of [`refit_beta`].
#[derive(Debug, Clone, PartialEq)]
pub struct Refit {
    pub net: ShallowNet,
    pub error_before: f64,
    pub error_after: f64,
    pub ridge: f64,
    pub sweeps: usize,
}

/// Box-constrained weighted least squares for β on the quadrature grid of
/// `grid`, by cyclic coordinate descent. The offset is kept fixed, and the
/// (box-projected) input is returned whenever the refit does not lower the
/// grid error.
pub fn refit_beta(net: &ShallowNet, target: &dyn Fn(&[f64]) -> f64, cap: f64, grid: &QuadratureSpec) -> Result<Refit> {
    if net.width() == 0 {
        return Err(Error::Precondition("refit needs a nonempty network".into()));
    }
    grid.check()?;
    let (points, weights) = quadrature_points(net.dim(), grid);
    let n = points.len();
    let m = net.width();
    let mut features = vec![0.0; m * n];
    for (k, atom) in net.atoms().iter().enumerate() {
        let unit = Atom {
            beta: 1.0,
            ..atom.clone()
        };
        for (i, x) in points.iter().enumerate() {
            features[k * n + i] = unit.value(x);
        }
    }
    let targets: Vec<f64> = points.iter().map(|x| target(x) - net.offset()).collect();
    let mut beta: Vec<f64> = net.atoms().iter().map(|a| a.beta.clamp(-cap, cap)).collect();
    let mut resid = targets.clone();
    for k in 0..m {
        for i in 0..n {
            resid[i] -= beta[k] * features[k * n + i];
        }
    }
    let diag: Vec<f64> = (0..m)
        .map(|k| (0..n).map(|i| weights[i] * features[k * n + i].powi(2)).sum::<f64>() + REFIT_RIDGE)
        .collect();
    let scale = targets
        .iter()
        .zip(&weights)
        .map(|(t, w)| w * t * t)
        .sum::<f64>()
        .max(1e-300);
    let max_sweeps = 500;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut change = 0.0f64;
        for k in 0..m {
            let col = &features[k * n..(k + 1) * n];
            let g: f64 = (0..n).map(|i| weights[i] * col[i] * resid[i]).sum();
            let fresh = ((diag[k] - REFIT_RIDGE) * beta[k] + g) / diag[k];
            let fresh = fresh.clamp(-cap, cap);
            let delta = fresh - beta[k];
            if delta != 0.0 {
                for i in 0..n {
                    resid[i] -= delta * col[i];
                }
                change = change.max(delta.abs() * diag[k].sqrt());
                beta[k] = fresh;
            }
        }
        if change * change < 1e-20 * scale {
            break;
        }
    }
    let grid_error = |r: &[f64]| weighted_lp(r, &weights, 2.0);
    let error_of = |candidate: &ShallowNet| {
        let r: Vec<f64> = points
            .iter()
            .zip(&targets)
            .map(|(x, t)| t - (candidate.value(x) - candidate.offset()))
            .collect();
        grid_error(&r)
    };
    let error_before = error_of(net);
    // an input outside the box is compared through its projection
    let clamped: Vec<f64> = net.atoms().iter().map(|a| a.beta.clamp(-cap, cap)).collect();
    let baseline = net.with_betas(&clamped);
    let baseline_error = if clamped.iter().zip(net.atoms()).all(|(c, a)| *c == a.beta) {
        error_before
    } else {
        error_of(&baseline)
    };
    let error_after = grid_error(&resid);
    let (net_out, error_after) = if error_after <= baseline_error {
        (net.with_betas(&beta), error_after)
    } else {
        (baseline, baseline_error)
    };
    Ok(Refit {
        net: net_out,
        error_before,
        error_after,
        ridge: REFIT_RIDGE,
        sweeps,
    })
}

/// ‖F - f_m‖_{L_p(D)} under the quadrature policy of the Korobov norm.
pub fn approx_error(f: &KorobovFunction, net: &ShallowNet, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    let diff = |x: &[f64]| f.eval(x) - net.value(x);
    lp_norm_on_cube(&diff, f.dim(), p, quad)
}

/// ‖g - f_m‖_{L_p(D)} for the trigonometric polynomial g(x) = Σ ĉ(k) e^{iπk·x}.
pub fn coefficient_gap(c: &FourierCoefficients, net: &ShallowNet, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    let d = c.dim();
    if net.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: net.dim(),
        });
    }
    let residual_on = |axes: &[Vec<f64>]| -> Vec<f64> {
        let angles: Vec<Vec<f64>> = axes.iter().map(|a| a.iter().map(|x| PI * x).collect()).collect();
        let refs: Vec<&[f64]> = angles.iter().map(|a| a.as_slice()).collect();
        let target = c.eval_tensor(&refs);
        let axis_refs: Vec<&[f64]> = axes.iter().map(|a| a.as_slice()).collect();
        let mut out = Vec::with_capacity(target.len());
        let mut flat = 0;
        for_each_tensor_point(&axis_refs, |x, _| {
            out.push(target[flat] - net.value(x));
            flat += 1;
        });
        out
    };
    if p.is_infinite() {
        return Ok(weighted_lp(&residual_on(&quad.sup_axes(d)), &[], p));
    }
    quad.check()?;
    let (points, weights) = quadrature_points(d, quad);
    let residuals: Vec<f64> = if d <= 3 {
        let (nodes, _) = quad.axis_rule();
        residual_on(&vec![nodes; d])
    } else {
        points
            .iter()
            .map(|x| c.eval_at(&x.iter().map(|v| PI * v).collect::<Vec<_>>()) - net.value(x))
            .collect()
    };
    Ok(weighted_lp(&residuals, &weights, p))
}

/// N = ⌊m^{(1+2/d)/5}⌋ for p ≥ 2 and N = ⌊m^{(d+2)/(5d+(2/p-1)d²)}⌋ for p < 2.
pub fn jackson_degree(m: usize, dim: usize, p: f64) -> usize {
    let d = dim as f64;
    let exponent = if p >= 2.0 {
        (1.0 + 2.0 / d) / 5.0
    } else {
        (d + 2.0) / (5.0 * d + (2.0 / p - 1.0) * d * d)
    };
    ((m as f64).powf(exponent) + 1e-9).floor().max(1.0) as usize
}

/// Points per torus axis used to analyse the periodic extension.
pub fn analysis_grid(dim: usize, support: usize) -> usize {
    if dim <= 2 {
        (8 * support).max(64)
    } else {
        (4 * support).max(32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub refit: bool,
    pub scheme: SamplingScheme,
    pub profile: ProfileKind,
    pub quad: QuadratureSpec,
    /// C₅ of the nominal cap; only reported.
    pub c5: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            refit: false,
            scheme: SamplingScheme::default(),
            profile: ProfileKind::Jackson2,
            quad: QuadratureSpec::default(),
            c5: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineDiagnostics {
    pub degree: usize,
    pub level: u32,
    pub v: f64,
    /// ‖J_N f - f‖ on the sup grid of D.
    pub jackson_sup_error: f64,
    pub realized_cap: f64,
    pub certificate: ConstraintReport,
    /// Whether the net also fits the nominal cap with the configured C₅.
    pub nominal_certificate: ConstraintReport,
    /// The k = 0 coefficient, i.e. the torus mean of J_N f.
    pub constant_mode: f64,
    pub offset: f64,
    /// Set when the mean exceeds a tenth of sup |J_N f|; the class H_m cannot
    /// carry it and the offset does.
    pub large_mean: bool,
    pub refit_error: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub net: ShallowNet,
    pub error: f64,
    pub diagnostics: PipelineDiagnostics,
}

/// periodic extension → analysis → J_N → sampled construction (→ refit) → error.
pub fn theorem1_pipeline(f: &KorobovFunction, m: usize, p: f64, seed: u64) -> Result<PipelineResult> {
    theorem1_pipeline_with(f, m, p, seed, &PipelineOptions::default())
}

pub fn theorem1_pipeline_with(
    f: &KorobovFunction,
    m: usize,
    p: f64,
    seed: u64,
    opts: &PipelineOptions,
) -> Result<PipelineResult> {
    if m < 2 {
        return Err(Error::Precondition(format!("pipeline needs m >= 2, got {m}")));
    }
    let d = f.dim();
    let degree = jackson_degree(m, d, p);
    let spec = JacksonSpec::with_kind(degree, opts.profile);
    let ext = periodic_extension(f)?;
    let coeffs = analyze(&ext, spec.support(), analysis_grid(d, spec.support()))?;
    let jn = jackson_apply(&coeffs, &spec)?;
    let mut net = maurey_construct_with(&jn, m, seed, opts.scheme)?;
    let realized_cap = realized_beta_cap(&jn, m);
    let mut refit_error = None;
    if opts.refit {
        let target = |x: &[f64]| f.eval(x);
        let refit = refit_beta(&net, &target, realized_cap, &opts.quad)?;
        refit_error = Some((refit.error_before, refit.error_after));
        net = refit.net;
    }
    let error = approx_error(f, &net, p, &opts.quad)?;
    let sup_axes = opts.quad.sup_axes(d);
    let angles: Vec<Vec<f64>> = sup_axes.iter().map(|a| a.iter().map(|x| PI * x).collect()).collect();
    let refs: Vec<&[f64]> = angles.iter().map(|a| a.as_slice()).collect();
    let jvals = jn.eval_tensor(&refs);
    let axis_refs: Vec<&[f64]> = sup_axes.iter().map(|a| a.as_slice()).collect();
    let mut jackson_sup_error = 0.0f64;
    let mut flat = 0;
    for_each_tensor_point(&axis_refs, |x, _| {
        jackson_sup_error = jackson_sup_error.max((jvals[flat] - f.eval(x)).abs());
        flat += 1;
    });
    let sup_j = jvals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let constant_mode = jn.get(&vec![0; d]).re;
    let diagnostics = PipelineDiagnostics {
        degree,
        level: spec.level(),
        v: v_weight(&jn),
        jackson_sup_error,
        realized_cap,
        certificate: check_constraints(&net, &HypothesisConstraints::with_beta_cap(d, m, realized_cap)),
        nominal_certificate: check_constraints(&net, &HypothesisConstraints::new(d, m, opts.c5)),
        constant_mode,
        offset: net.offset(),
        large_mean: constant_mode.abs() > 0.1 * sup_j,
        refit_error,
    };
    Ok(PipelineResult {
        net,
        error,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::korobov::{make_test_function, TestFamily};
    use num_complex::Complex64;

    fn atom(alpha: Vec<f64>, b: f64, beta: f64) -> Atom {
        Atom { alpha, b, beta }
    }

    fn cosine_coeffs() -> FourierCoefficients {
        let mut c = FourierCoefficients::new(1, 1);
        c.insert(vec![1], Complex64::new(0.5, 0.0));
        c.insert(vec![-1], Complex64::new(0.5, 0.0));
        c
    }

    #[test]
    fn evaluate_examples() {
        let net = ShallowNet::new(1, vec![atom(vec![1.0], 0.0, 1.0)], 0.0).unwrap();
        assert_eq!(net.evaluate(&[0.5]).unwrap(), 0.5);
        assert_eq!(net.evaluate(&[-1.0]).unwrap(), 0.0);
        assert_eq!(ShallowNet::zero(3).evaluate(&[0.1, 0.2, 0.3]).unwrap(), 0.0);
        assert!(matches!(
            net.evaluate(&[0.1, 0.2]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn cancelling_atoms() {
        let a = vec![0.3, -0.5];
        let net = ShallowNet::new(2, vec![atom(a.clone(), 0.2, 1.0), atom(a, 0.2, -1.0)], 0.0).unwrap();
        let mut rng = stream_rng(1, "test");
        for _ in 0..100 {
            let x = [rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)];
            assert_eq!(net.value(&x), 0.0);
        }
    }

    #[test]
    fn constraint_examples() {
        let ok = ShallowNet::new(2, vec![atom(vec![0.6, 0.4], 0.5, 0.0)], 0.0).unwrap();
        for cap in [0.0, 1.0, 1e6] {
            assert!(check_constraints(&ok, &HypothesisConstraints::with_beta_cap(2, 1, cap)).satisfied);
        }
        let bad_b = ShallowNet::new(1, vec![atom(vec![1.0], 1.5, 0.0)], 0.0).unwrap();
        let report = check_constraints(&bad_b, &HypothesisConstraints::with_beta_cap(1, 1, 1.0));
        assert!(!report.satisfied);
        assert_eq!(report.first_violation.unwrap().field, ConstraintField::B);
        let cap = 0.37;
        let bad_beta = ShallowNet::new(1, vec![atom(vec![1.0], 0.0, cap * (1.0 + 1e-6))], 0.0).unwrap();
        let report = check_constraints(&bad_beta, &HypothesisConstraints::with_beta_cap(1, 1, cap));
        assert_eq!(report.first_violation.unwrap().field, ConstraintField::Beta);
    }

    #[test]
    fn nominal_cap_formula() {
        let c = HypothesisConstraints::new(1, 32, 2.0);
        let expected = 4.0 * PI * PI * 2.0 * 32f64.powf(0.3) / 32.0;
        assert!((c.beta_cap - expected).abs() < 1e-14);
    }

    #[test]
    fn abs_cos_antiderivative_inverts() {
        for i in -40..40 {
            let theta = i as f64 * 0.37;
            let back = abs_cos_integral_inverse(abs_cos_integral(theta));
            assert!((back - theta).abs() < 1e-9, "{theta} -> {back}");
        }
        let h = 1e-6;
        for theta in [0.1, 1.4, 2.9, -2.2] {
            let deriv = (abs_cos_integral(theta + h) - abs_cos_integral(theta - h)) / (2.0 * h);
            assert!((deriv - f64::cos(theta).abs()).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_only_is_degenerate() {
        let mut c = FourierCoefficients::new(1, 2);
        c.insert(vec![0], Complex64::new(1.0, 0.0));
        assert_eq!(maurey_construct(&c, 8, 0).unwrap_err(), Error::DegenerateTarget);
    }

    #[test]
    fn construction_is_deterministic_and_capped() {
        let f = make_test_function(TestFamily::RandomTrig, 2, 4).unwrap();
        let spec = JacksonSpec::new(4);
        let ext = periodic_extension(&f).unwrap();
        let jn = jackson_apply(&analyze(&ext, 4, 64).unwrap(), &spec).unwrap();
        for scheme in [SamplingScheme::Iid, SamplingScheme::Stratified] {
            let a = maurey_construct_with(&jn, 50, 9, scheme).unwrap();
            let b = maurey_construct_with(&jn, 50, 9, scheme).unwrap();
            assert_eq!(a, b);
            let cap = HypothesisConstraints::with_beta_cap(2, 50, realized_beta_cap(&jn, 50));
            assert!(check_constraints(&a, &cap).satisfied);
        }
    }

    #[test]
    fn seed_average_reproduces_target() {
        let c = cosine_coeffs();
        let seeds = 400;
        let xs = [-0.9, -0.3, 0.0, 0.45, 0.8];
        let mut sums = [0.0; 5];
        for seed in 0..seeds {
            let net = maurey_construct_with(&c, 16, seed, SamplingScheme::Iid).unwrap();
            for (s, &x) in sums.iter_mut().zip(&xs) {
                *s += net.value(&[x]);
            }
        }
        for (s, &x) in sums.iter().zip(&xs) {
            let mean = s / seeds as f64;
            assert!((mean - (PI * x).cos()).abs() < 0.1, "x={x}: {mean}");
        }
    }

    #[test]
    fn large_width_is_accurate() {
        let c = cosine_coeffs();
        let net = maurey_construct(&c, 4096, 3).unwrap();
        let quad = QuadratureSpec::default();
        assert!(coefficient_gap(&c, &net, f64::INFINITY, &quad).unwrap() < 5e-3);
    }

    #[test]
    fn refit_keeps_an_exact_fit() {
        let net = ShallowNet::new(1, vec![atom(vec![1.0], 0.2, 0.7), atom(vec![-1.0], 0.5, -0.3)], 0.0).unwrap();
        let copy = net.clone();
        let target = move |x: &[f64]| copy.value(x);
        let out = refit_beta(&net, &target, 10.0, &QuadratureSpec::default()).unwrap();
        for (a, b) in out.net.atoms().iter().zip(net.atoms()) {
            assert!((a.beta - b.beta).abs() < 1e-8);
        }
    }

    #[test]
    fn refit_with_zero_cap() {
        let net = ShallowNet::new(1, vec![atom(vec![1.0], 0.2, 0.7)], 0.0).unwrap();
        let target = |x: &[f64]| (PI * x[0]).sin();
        let quad = QuadratureSpec::default();
        let out = refit_beta(&net, &target, 0.0, &quad).unwrap();
        assert!(out.net.atoms().iter().all(|a| a.beta == 0.0));
        let norm = lp_norm_on_cube(&target, 1, 2.0, &quad).unwrap();
        assert!((out.error_after - norm).abs() < 1e-12);
    }

    #[test]
    fn degree_rule_examples() {
        assert_eq!(jackson_degree(32, 1, f64::INFINITY), 8);
        assert_eq!(jackson_degree(1024, 2, 1.0), 7);
        assert_eq!(jackson_degree(256, 1, f64::INFINITY), 27);
    }

    #[test]
    fn approx_error_of_zero_net() {
        let f = make_test_function(TestFamily::SineProduct, 1, 0).unwrap();
        let quad = QuadratureSpec::default();
        assert!((approx_error(&f, &ShallowNet::zero(1), f64::INFINITY, &quad).unwrap() - 1.0).abs() < 1e-12);
        let z = f.scaled(0.0);
        assert_eq!(approx_error(&z, &ShallowNet::zero(1), 2.0, &quad).unwrap(), 0.0);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let c = cosine_coeffs();
        let net = maurey_construct(&c, 12, 5).unwrap();
        let text = net.to_json();
        assert!(text.contains("\"d\":1") && text.contains("\"m\":12"));
        let back = ShallowNet::from_json(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn pipeline_certificate_and_diagnostics() {
        let f = make_test_function(TestFamily::SineProduct, 1, 0).unwrap();
        let out = theorem1_pipeline(&f, 32, f64::INFINITY, 1).unwrap();
        assert_eq!(out.diagnostics.degree, 8);
        assert!(out.diagnostics.certificate.satisfied);
        assert!(!out.diagnostics.large_mean);
        assert!(out.error < 1.0);
    }
}
