//! Finite-sample checks of the inequalities behind the approximation and
//! learning bounds. Each returns its measurements and a verdict.

use std::f64::consts::PI;
use std::sync::Arc;

use korobov_relu::classification::{random_net, truncate};
use korobov_relu::distributions::conditional_phi_minimizer;
use korobov_relu::fourier::{analyze, jackson_apply, kernel_norms, t_l_apply, v_weight, young_step_check};
use korobov_relu::korobov::{korobov_norm_or_analytic, make_test_function, periodic_extension};
use korobov_relu::numerics::stream_rng;
use korobov_relu::risk::{
    comparison_bound, epsilon_star_solve, excess_generalization_error, excess_misclassification, variance_power_check,
    EpsilonStarProblem, RealFn,
};
use korobov_relu::shallow::analysis_grid;
use korobov_relu::{
    Distribution, Family, HypothesisConstraints, JacksonSpec, KorobovFunction, LossSpec, PeriodicFunction,
    QuadratureSpec, TestFamily,
};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One measured quantity against the value it must respect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub label: String,
    pub m: usize,
    pub n: usize,
    pub value: f64,
    pub std_error: f64,
    pub bound: f64,
}

impl Measurement {
    fn new(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            label: label.into(),
            m: 0,
            n: 0,
            value,
            std_error: 0.0,
            bound,
        }
    }

    fn sized(mut self, m: usize, n: usize) -> Self {
        self.m = m;
        self.n = n;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub measurements: Vec<Measurement>,
}

const FAMILIES: [TestFamily; 3] = [
    TestFamily::SineProduct,
    TestFamily::PolynomialBump,
    TestFamily::RandomTrig,
];

fn cosine() -> PeriodicFunction {
    PeriodicFunction::new(1, Arc::new(|t: &[f64]| t[0].cos()), Arc::new(|t: &[f64]| -t[0].cos()))
}

/// sup over 4096 torus points of |J_N f - f| for a univariate f.
pub fn jackson_sup_error(f: &PeriodicFunction, degree: usize) -> Result<f64> {
    let spec = JacksonSpec::new(degree);
    let coeffs = analyze(f, spec.support(), 4 * spec.support())?;
    let jn = jackson_apply(&coeffs, &spec)?;
    const FINE: usize = 4096;
    let values = jn.synthesize(FINE);
    Ok((0..FINE)
        .map(|j| {
            let t = -PI + 2.0 * PI * j as f64 / FINE as f64;
            (values[j] - f.eval(&[t])).abs()
        })
        .fold(0.0, f64::max))
}

/// error(N)/error(2N) ∈ [3, 5] for N ∈ {8, 16, 32}, on cos t and random_trig.
pub fn jackson_rate(seed: u64) -> Result<CheckOutcome> {
    let trig = periodic_extension(&make_test_function(TestFamily::RandomTrig, 1, seed)?)?;
    let mut measurements = Vec::new();
    for (name, f) in [("cos", cosine()), ("random_trig", trig)] {
        let errs = [8, 16, 32, 64]
            .iter()
            .map(|&n| jackson_sup_error(&f, n))
            .collect::<Result<Vec<f64>>>()?;
        for (i, n) in [8usize, 16, 32].into_iter().enumerate() {
            let ratio = errs[i] / errs[i + 1];
            measurements.push(Measurement::new(format!("{name}/N={n}"), ratio, 5.0).sized(0, n));
        }
    }
    let passed = measurements.iter().all(|m| (3.0..=5.0).contains(&m.value));
    Ok(outcome("jackson_rate", passed, "ratios in [3, 5]", measurements))
}

/// Σ|ĉ(k)|²(2π)^d against the trapezoid integral of |T_L f|² for d ∈ {1, 2}, L ∈ {2, 3}.
pub fn parseval() -> Result<CheckOutcome> {
    let mut measurements = Vec::new();
    for d in [1, 2] {
        for level in [2u32, 3] {
            for family in [TestFamily::PolynomialBump, TestFamily::RandomTrig] {
                let spec = JacksonSpec::new(1 << level);
                let f = periodic_extension(&make_test_function(family, d, 7)?)?;
                let coeffs = analyze(&f, spec.support(), analysis_grid(d, spec.support()))?;
                let t = t_l_apply(&coeffs, &spec);
                let by_coeffs = t.torus_l2_norm().powi(2);
                let grid = 4 * spec.support() + 4;
                let squares: Vec<f64> = t.synthesize(grid).iter().map(|v| v * v).collect();
                let cell = (2.0 * PI / grid as f64).powi(d as i32);
                let by_quadrature = cell * korobov_relu::numerics::pairwise_sum(&squares);
                let rel = (by_coeffs - by_quadrature).abs() / by_coeffs.max(f64::MIN_POSITIVE);
                measurements
                    .push(Measurement::new(format!("{family}/d={d}/L={level}"), rel, 1e-8).sized(0, 1 << level));
            }
        }
    }
    let passed = measurements.iter().all(|m| m.value <= m.bound);
    Ok(outcome("parseval", passed, "relative gap <= 1e-8", measurements))
}

/// ‖G_{2^L}‖_{L_1} ≤ 4^d for d ∈ {1, 2}, L ∈ {2, 3, 4}.
pub fn kernel_l1() -> Result<CheckOutcome> {
    let mut measurements = Vec::new();
    for d in [1usize, 2] {
        for level in [2u32, 3, 4] {
            let spec = JacksonSpec::new(1 << level);
            let norms = kernel_norms(&spec, d, 32 * spec.support())?;
            measurements
                .push(Measurement::new(format!("d={d}/L={level}"), norms.l1, 4f64.powi(d as i32)).sized(0, 1 << level));
        }
    }
    let passed = measurements.iter().all(|m| m.value <= m.bound);
    Ok(outcome("kernel_l1", passed, "normalized L1 norm <= 4^d", measurements))
}

/// ‖T_L f‖_2 against the Young/Hölder right-hand side for every built-in family.
pub fn young(seed: u64) -> Result<CheckOutcome> {
    let mut measurements = Vec::new();
    for d in [1, 2] {
        for family in FAMILIES {
            let f = periodic_extension(&make_test_function(family, d, seed)?)?;
            for degree in [4usize, 8] {
                let spec = JacksonSpec::new(degree);
                for p in [1.0, 2.0, f64::INFINITY] {
                    let check = young_step_check(&f, p, &spec, analysis_grid(d, spec.support()))?;
                    measurements
                        .push(Measurement::new(format!("{family}/d={d}/p={p}"), check.lhs, check.rhs).sized(0, degree));
                }
            }
        }
    }
    let passed = measurements.iter().all(|m| m.value <= m.bound * (1.0 + 1e-12));
    Ok(outcome("young", passed, "lhs <= rhs", measurements))
}

/// v_{J_N,2} for the smoothed periodic extension of f.
pub fn v_of(f: &KorobovFunction, degree: usize) -> Result<f64> {
    let spec = JacksonSpec::new(degree);
    let ext = periodic_extension(f)?;
    let coeffs = analyze(&ext, spec.support(), analysis_grid(f.dim(), spec.support()))?;
    Ok(v_weight(&jackson_apply(&coeffs, &spec)?))
}

/// C with v_{J_8,2} = C‖F‖√8, using the L_∞ Korobov norm.
pub fn fitted_c5(f: &KorobovFunction) -> Result<f64> {
    let norm = korobov_norm_or_analytic(f, f64::INFINITY, &QuadratureSpec::default())?;
    Ok(v_of(f, 8)? / (norm * 8f64.sqrt()))
}

/// Fit C at N = 8, then v ≤ 1.5 C‖F‖√N at N ∈ {16, 32}, d ∈ {1, 2}.
pub fn v_bound(seed: u64) -> Result<CheckOutcome> {
    let mut measurements = Vec::new();
    for d in [1, 2] {
        for family in FAMILIES {
            let f = make_test_function(family, d, seed)?;
            let norm = korobov_norm_or_analytic(&f, f64::INFINITY, &QuadratureSpec::default())?;
            let c = fitted_c5(&f)?;
            for n in [16usize, 32] {
                let v = v_of(&f, n)?;
                measurements.push(
                    Measurement::new(format!("{family}/d={d}"), v, 1.5 * c * norm * (n as f64).sqrt()).sized(0, n),
                );
            }
        }
    }
    let passed = measurements.iter().all(|m| m.value <= m.bound);
    Ok(outcome("v_bound", passed, "v <= 1.5 C ||F|| sqrt(N)", measurements))
}

/// Classification families used by the risk checks, with their dimensions.
pub fn risk_families() -> Vec<Distribution> {
    [
        (1, Family::Linear),
        (1, Family::Power { theta: 2.0 }),
        (1, Family::HardMargin { margin: 0.5 }),
        (2, Family::Checkerboard),
    ]
    .into_iter()
    .map(|(d, fam)| Distribution::new(d, fam).expect("built-in families are valid"))
    .collect()
}

fn family_label(dist: &Distribution) -> String {
    format!("{}/d={}", dist.family().name(), dist.dim())
}

/// R(sgn f) - R(f_c) ≤ ψ(𝓔(f) - 𝓔(f_ρ^φ)) on `nets` random truncated nets per
/// family; a violation needs the gap to exceed three standard errors.
pub fn comparison(eta: f64, nets: usize, points: usize, seed: u64) -> Result<CheckOutcome> {
    let spec = LossSpec::new(eta)?;
    let mut measurements = Vec::new();
    let mut violations = 0;
    for dist in risk_families() {
        let label = family_label(&dist);
        for i in 0..nets as u64 {
            let m = 1 + (i % 8) as usize;
            let net = random_net(&HypothesisConstraints::new(dist.dim(), m, 1.0), seed.wrapping_add(i));
            let f = |x: &[f64]| truncate(net.value(x));
            let point_seed = seed.wrapping_add(i) ^ 0x5eed;
            let mis = excess_misclassification(&f, &dist, points, point_seed)?;
            let gen = excess_generalization_error(&f, &dist, &spec, points, point_seed)?;
            let bound = comparison_bound(gen.value + 3.0 * gen.std_error, &spec)?;
            if mis.value - 3.0 * mis.std_error > bound {
                violations += 1;
            }
            measurements.push(Measurement {
                label: format!("{label}/eta={eta}"),
                m,
                n: points,
                value: mis.value,
                std_error: mis.std_error,
                bound: comparison_bound(gen.value, &spec)?,
            });
        }
    }
    let detail = format!("{violations} violations beyond 3 SE");
    Ok(outcome("comparison", violations == 0, &detail, measurements))
}

/// π(f_ρ^φ + εh) with h = σ + π(g)/2 for a random sign σ and random net g,
/// and ε log-uniform in [1e-3, 1]. Keeping |h| ≥ 1/2 spreads the perturbation
/// over all of D.
fn perturbed_minimizers(dist: &Distribution, spec: &LossSpec, count: usize, seed: u64) -> Vec<Box<RealFn<'static>>> {
    let mut rng = stream_rng(seed, "variance-set");
    (0..count)
        .map(|i| {
            let m = 1 + i % 8;
            let net = random_net(
                &HypothesisConstraints::new(dist.dim(), m, 1.0),
                seed.wrapping_add(i as u64),
            );
            let scale = 10f64.powf(rng.random_range(-3.0..=0.0));
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let (dist, spec) = (*dist, *spec);
            Box::new(move |x: &[f64]| {
                let h = sign + 0.5 * truncate(net.value(x));
                truncate(conditional_phi_minimizer(dist.eta(x), &spec) + scale * h)
            }) as Box<RealFn<'static>>
        })
        .collect()
}

/// The ratio test with η = 2 holds at τ = 1 and fails at τ = 1.5, per family.
pub fn variancing_power(nets: usize, points: usize, seed: u64) -> Result<CheckOutcome> {
    let spec = LossSpec::new(2.0)?;
    let mut measurements = Vec::new();
    let mut passed = true;
    for dist in risk_families() {
        let set = perturbed_minimizers(&dist, &spec, nets, seed);
        let refs: Vec<&RealFn<'_>> = set.iter().map(|f| f.as_ref()).collect();
        let good = variance_power_check(&refs, &dist, &spec, 1.0, points, seed)?;
        let control = variance_power_check(&refs, &dist, &spec, 1.5, points, seed)?;
        passed &= good.holds && !control.holds;
        for (tau, check) in [(1.0, &good), (1.5, &control)] {
            let spread = spread(&check.ratios);
            measurements
                .push(Measurement::new(format!("{}/tau={tau}", family_label(&dist)), spread, 10.0).sized(0, points));
        }
    }
    Ok(outcome(
        "variancing_power",
        passed,
        "max/min ratio < 10 at τ = 1 and >= 10 at τ = 1.5",
        measurements,
    ))
}

fn spread(ratios: &[f64]) -> f64 {
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Random satisfiable ε* problems.
pub fn random_epsilon_problems(count: usize, seed: u64) -> Vec<EpsilonStarProblem> {
    let mut rng = stream_rng(seed, "epsilon-star");
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let problem = EpsilonStarProblem {
            dim: rng.random_range(1..=3),
            m: rng.random_range(1..=64),
            n: 10f64.powf(rng.random_range(2.0..6.0)),
            delta: rng.random_range(0.01..0.5),
            tau: rng.random_range(0.0..=1.0),
            c1: rng.random_range(0.5..4.0),
            loss: LossSpec::new(if rng.random::<bool>() { 1.0 } else { 2.0 }).expect("η >= 1"),
            c5: rng.random_range(0.5..2.0),
        };
        if epsilon_star_solve(&problem).is_ok() {
            out.push(problem);
        }
    }
    out
}

/// First nonpositive point of the ε* condition by grid refinement: a log grid
/// on [1e-12, 1e3], then three 1000-point linear passes inside the bracket.
pub fn epsilon_star_grid(problem: &EpsilonStarProblem) -> f64 {
    const COARSE: usize = 3000;
    let (lo_exp, hi_exp) = (-12.0f64, 3.0f64);
    let at = |i: usize| 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / COARSE as f64);
    let first = (0..=COARSE)
        .find(|&i| problem.condition(at(i)) <= 0.0)
        .unwrap_or(COARSE);
    if first == 0 {
        return at(0);
    }
    let (mut lo, mut hi) = (at(first - 1), at(first));
    for _ in 0..3 {
        const FINE: usize = 1000;
        let step = (hi - lo) / FINE as f64;
        let j = (1..=FINE)
            .find(|&j| problem.condition(lo + step * j as f64) <= 0.0)
            .unwrap_or(FINE);
        hi = lo + step * j as f64;
        lo = hi - step;
    }
    hi
}

/// Solver against the grid oracle, and monotonicity in N and m.
pub fn epsilon_star(count: usize, seed: u64) -> Result<CheckOutcome> {
    let mut measurements = Vec::new();
    let mut agree = true;
    for (i, problem) in random_epsilon_problems(count, seed).iter().enumerate() {
        let solved = epsilon_star_solve(problem)?;
        let oracle = epsilon_star_grid(problem);
        let rel = (solved - oracle).abs() / oracle;
        agree &= rel <= 1e-6;
        measurements.push(Measurement::new(format!("tuple={i}"), rel, 1e-6).sized(problem.m, problem.n as usize));
    }
    let base = EpsilonStarProblem {
        dim: 1,
        m: 8,
        n: 1e4,
        delta: 0.05,
        tau: 1.0,
        c1: 1.0,
        loss: LossSpec::hinge(),
        c5: 1.0,
    };
    let by_n: Vec<f64> = [1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&n| epsilon_star_solve(&EpsilonStarProblem { n, ..base }))
        .collect::<korobov_relu::Result<_>>()?;
    let by_m: Vec<f64> = [1, 4, 16, 64]
        .iter()
        .map(|&m| epsilon_star_solve(&EpsilonStarProblem { m, ..base }))
        .collect::<korobov_relu::Result<_>>()?;
    let monotone = by_n.windows(2).all(|w| w[1] <= w[0]) && by_m.windows(2).all(|w| w[1] >= w[0]);
    let detail = format!("oracle agreement {agree}, non-increasing in N and non-decreasing in m {monotone}");
    Ok(outcome("epsilon_star", agree && monotone, &detail, measurements))
}

/// T(c_θ r) ≤ 1.05 r^θ at r ∈ {0.1, 0.2, 0.4} for the families with a declared θ.
pub fn tsybakov() -> Result<CheckOutcome> {
    let mut measurements = Vec::new();
    let families = [
        Family::Linear,
        Family::Power { theta: 0.5 },
        Family::Power { theta: 2.0 },
        Family::Power { theta: 3.0 },
    ];
    for family in families {
        let dist = Distribution::new(1, family)?;
        let (theta, c_theta) = (dist.theta().expect("declared"), dist.c_theta().expect("declared"));
        for r in [0.1, 0.2, 0.4] {
            let t = dist.tsybakov_function(c_theta * r, 10_000)?;
            measurements.push(Measurement::new(
                format!("{}/theta={theta}/r={r}", family.name()),
                t.value,
                1.05 * r.powf(theta),
            ));
        }
    }
    let passed = measurements.iter().all(|m| m.value <= m.bound);
    Ok(outcome("tsybakov", passed, "T(c_θ r) <= 1.05 r^θ", measurements))
}

fn outcome(name: &str, passed: bool, detail: &str, measurements: Vec<Measurement>) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        detail: detail.into(),
        measurements,
    }
}

/// Sizes of the randomized checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteSizes {
    pub comparison_nets: usize,
    pub comparison_points: usize,
    pub variance_nets: usize,
    pub variance_points: usize,
    pub epsilon_tuples: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self {
            comparison_nets: 1000,
            comparison_points: 2000,
            variance_nets: 50,
            variance_points: 4000,
            epsilon_tuples: 20,
        }
    }
}

/// Every check, in a fixed order.
pub fn inequality_suite(seed: u64, sizes: &SuiteSizes) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        jackson_rate(seed)?,
        parseval()?,
        kernel_l1()?,
        young(seed)?,
        v_bound(seed)?,
        comparison(1.0, sizes.comparison_nets, sizes.comparison_points, seed)?,
        comparison(2.0, sizes.comparison_nets, sizes.comparison_points, seed)?,
        variancing_power(sizes.variance_nets, sizes.variance_points, seed)?,
        epsilon_star(sizes.epsilon_tuples, seed)?,
        tsybakov()?,
    ])
}
