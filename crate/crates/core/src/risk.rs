//! Risk functionals, the comparison and variancing-power inequalities, the
//! approximation error D(H_m), covering numbers of H_m and the oracle
//! inequality with its ε* condition.

use std::collections::HashMap;
use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::classification::{erm_train, loss_left_derivative_magnitude, sign_label, ErmResult, LossSpec, TrainBudget};
use crate::distributions::{conditional_phi_minimizer, conditional_phi_risk, Distribution, Family};
use crate::error::{Error, Result};
use crate::numerics::{uniform_grid, Estimate};
use crate::shallow::{Atom, HypothesisConstraints, ShallowNet};

/// Smallest Monte-Carlo sample accepted by the risk estimators.
pub const MIN_MC_POINTS: usize = 1000;

/// Excess values below this count as zero in the variancing-power check.
pub const ZERO_EXCESS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RiskMethod {
    ClosedForm,
    MonteCarlo { n: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub misclass: Estimate,
    pub excess_misclass: Estimate,
    pub gen_error: Estimate,
    pub excess_gen: Estimate,
    pub method: RiskMethod,
}

fn check_n(n: usize) -> Result<()> {
    if n < MIN_MC_POINTS {
        return Err(Error::Precondition(format!(
            "Monte-Carlo risk needs n >= {MIN_MC_POINTS}, got {n}"
        )));
    }
    Ok(())
}

fn mc_mean(dist: &Distribution, n: usize, seed: u64, term: impl Fn(&[f64]) -> f64) -> Estimate {
    let values: Vec<f64> = (0..n as u64).map(|i| term(&dist.point(seed, i))).collect();
    Estimate::from_samples(&values)
}

/// R(C) = P(C(x) ≠ y), averaged over y given x.
pub fn misclassification_error(
    classifier: &dyn Fn(&[f64]) -> f64,
    dist: &Distribution,
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    check_n(n)?;
    Ok(mc_mean(dist, n, seed, |x| {
        let eta = dist.eta(x);
        if classifier(x) >= 0.0 {
            1.0 - eta
        } else {
            eta
        }
    }))
}

/// R(C) - R(f_c) = E[|f_ρ| 1{C ≠ f_c}].
pub fn excess_misclassification(
    classifier: &dyn Fn(&[f64]) -> f64,
    dist: &Distribution,
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    check_n(n)?;
    Ok(mc_mean(dist, n, seed, |x| {
        if sign_label(classifier(x)) != dist.bayes_rule(x) {
            dist.regression(x).abs()
        } else {
            0.0
        }
    }))
}

/// 𝓔(f) = E[η φ(f) + (1 - η) φ(-f)].
pub fn generalization_error(
    f: &dyn Fn(&[f64]) -> f64,
    dist: &Distribution,
    spec: &LossSpec,
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    check_n(n)?;
    Ok(mc_mean(dist, n, seed, |x| {
        conditional_phi_risk(dist.eta(x), f(x), spec)
    }))
}

/// 𝓔(f) - 𝓔(f_ρ^φ) with common random numbers; every term is nonnegative.
pub fn excess_generalization_error(
    f: &dyn Fn(&[f64]) -> f64,
    dist: &Distribution,
    spec: &LossSpec,
    n: usize,
    seed: u64,
) -> Result<Estimate> {
    check_n(n)?;
    Ok(mc_mean(dist, n, seed, |x| {
        let eta = dist.eta(x);
        let best = conditional_phi_minimizer(eta, spec);
        (conditional_phi_risk(eta, f(x), spec) - conditional_phi_risk(eta, best, spec)).max(0.0)
    }))
}

/// Intervals of [-1, 1] on which a 1-D net has constant sign, with that sign.
fn sign_intervals(net: &ShallowNet) -> Vec<(f64, f64, f64)> {
    let mut cuts = vec![-1.0, 0.0, 1.0];
    for a in net.atoms() {
        if a.alpha[0] != 0.0 {
            let x = a.b / a.alpha[0];
            if x > -1.0 && x < 1.0 {
                cuts.push(x);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (net.value(&[a]), net.value(&[b]));
        if fa * fb < 0.0 {
            let root = a + (b - a) * fa / (fa - fb);
            pieces.push((a, root));
            pieces.push((root, b));
        } else {
            pieces.push((a, b));
        }
    }
    pieces
        .into_iter()
        .filter(|(a, b)| b > a)
        .map(|(a, b)| (a, b, sign_label(net.value(&[(a + b) / 2.0]))))
        .collect()
}

/// ∫_a^b f_ρ and ∫_a^b |f_ρ| for a 1-D family on an interval not containing 0.
fn regression_integrals(dist: &Distribution, a: f64, b: f64) -> Option<(f64, f64)> {
    let side = if a + b >= 0.0 { 1.0 } else { -1.0 };
    let (lo, hi) = (a.abs().min(b.abs()), a.abs().max(b.abs()));
    let abs = match dist.family() {
        Family::Linear => (hi * hi - lo * lo) / 2.0,
        Family::Power { theta } => {
            let q = 1.0 / theta + 1.0;
            (hi.powf(q) - lo.powf(q)) / q
        }
        Family::HardMargin { margin } => margin * (hi - lo),
        Family::Constant { eta } => return Some(((2.0 * eta - 1.0) * (b - a), (2.0 * eta - 1.0).abs() * (b - a))),
        Family::Checkerboard => return None,
    };
    Some((side * abs, abs))
}

/// Exact (R(sgn f), R(sgn f) - R(f_c)) for a net on d = 1.
pub fn misclassification_exact_1d(net: &ShallowNet, dist: &Distribution) -> Result<(f64, f64)> {
    if net.dim() != 1 || dist.dim() != 1 {
        return Err(Error::Precondition(
            "exact risk integration is only available for d = 1".into(),
        ));
    }
    let mut risk = 0.0;
    let mut excess = 0.0;
    for (a, b, c) in sign_intervals(net) {
        let (signed, abs) = regression_integrals(dist, a, b)
            .ok_or_else(|| Error::Precondition("family has no 1-D closed form".into()))?;
        // P(y ≠ C | x) = (1 - C f_ρ(x)) / 2 under the density 1/2
        risk += ((b - a) - c * signed) / 4.0;
        let bayes = dist.bayes_rule(&[(a + b) / 2.0]);
        if bayes != c {
            excess += abs / 2.0;
        }
    }
    Ok((risk, excess))
}

/// Misclassification and generalization risks of f (optionally π∘f).
pub fn risk_report(
    net: &ShallowNet,
    dist: &Distribution,
    spec: &LossSpec,
    truncated: bool,
    n: usize,
    seed: u64,
) -> Result<RiskReport> {
    let f = |x: &[f64]| {
        let v = net.value(x);
        if truncated {
            v.clamp(-1.0, 1.0)
        } else {
            v
        }
    };
    let gen_error = generalization_error(&f, dist, spec, n, seed)?;
    let excess_gen = excess_generalization_error(&f, dist, spec, n, seed)?;
    if let Ok((mis, excess)) = misclassification_exact_1d(net, dist) {
        return Ok(RiskReport {
            misclass: Estimate::exact(mis),
            excess_misclass: Estimate::exact(excess),
            gen_error,
            excess_gen,
            method: RiskMethod::MonteCarlo { n, seed },
        });
    }
    Ok(RiskReport {
        misclass: misclassification_error(&f, dist, n, seed)?,
        excess_misclass: excess_misclassification(&f, dist, n, seed)?,
        gen_error,
        excess_gen,
        method: RiskMethod::MonteCarlo { n, seed },
    })
}

/// Upper bound on R(sgn f) - R(f_c) from the excess φ-risk: √(2e) for η > 1
/// and e itself for the hinge loss.
pub fn comparison_bound(excess_gen: f64, spec: &LossSpec) -> Result<f64> {
    if excess_gen < -1e-12 {
        return Err(Error::Precondition(format!(
            "excess generalization error must be >= 0, got {excess_gen}"
        )));
    }
    let e = excess_gen.max(0.0);
    Ok(if spec.eta() > 1.0 { (2.0 * e).sqrt() } else { e })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceCheck {
    pub holds: bool,
    /// max over f of E[(φ(yf) - φ(yf_ρ^φ))²] / (𝓔(f) - 𝓔(f_ρ^φ))^τ.
    pub fitted_c1: f64,
    pub ratios: Vec<f64>,
    /// Indices dropped because their excess risk vanished.
    pub excluded: Vec<usize>,
}

/// A real-valued function on the input cube.
pub type RealFn<'a> = dyn Fn(&[f64]) -> f64 + 'a;

/// Estimates both sides of the variance condition for every f in `f_set`.
/// It holds when all ratios are finite and max/min < 10.
pub fn variance_power_check(
    f_set: &[&RealFn<'_>],
    dist: &Distribution,
    spec: &LossSpec,
    tau: f64,
    n: usize,
    seed: u64,
) -> Result<VarianceCheck> {
    if f_set.is_empty() {
        return Err(Error::Precondition("variance check needs at least one function".into()));
    }
    check_n(n)?;
    let points: Vec<Vec<f64>> = (0..n as u64).map(|i| dist.point(seed, i)).collect();
    let mut ratios = Vec::new();
    let mut excluded = Vec::new();
    for (idx, f) in f_set.iter().enumerate() {
        let mut second = Vec::with_capacity(n);
        let mut first = Vec::with_capacity(n);
        for x in &points {
            let v = f(x);
            if !(v.abs() <= 2.0) {
                return Err(Error::Precondition(format!(
                    "function {idx} leaves [-2, 2] at {x:?}: {v}"
                )));
            }
            let eta = dist.eta(x);
            let best = conditional_phi_minimizer(eta, spec);
            let up = spec.loss(v) - spec.loss(best);
            let down = spec.loss(-v) - spec.loss(-best);
            second.push(eta * up * up + (1.0 - eta) * down * down);
            first.push((eta * up + (1.0 - eta) * down).max(0.0));
        }
        let variance = Estimate::from_samples(&second).value;
        let excess = Estimate::from_samples(&first).value;
        if excess < ZERO_EXCESS_TOL {
            excluded.push(idx);
            continue;
        }
        ratios.push(variance / excess.powf(tau));
    }
    let finite = !ratios.is_empty() && ratios.iter().all(|r| r.is_finite());
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let holds = finite && min > 0.0 && max / min < 10.0;
    Ok(VarianceCheck {
        holds,
        fitted_c1: max,
        ratios,
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationErrorEstimate {
    pub value: Estimate,
    pub erm: ErmResult,
}

/// Upper estimate of D(H_m) = inf_{f ∈ H_m} 𝓔(f) - 𝓔(f_ρ^φ): ERM on n fresh
/// samples followed by a population estimate of the trained net's excess.
pub fn approximation_error_d(
    c: &HypothesisConstraints,
    dist: &Distribution,
    spec: &LossSpec,
    budget: &TrainBudget,
    n: usize,
    seed: u64,
) -> Result<ApproximationErrorEstimate> {
    if c.width == 0 {
        return Err(Error::Precondition("D(H_m) needs m >= 1".into()));
    }
    if n < 10_000 {
        return Err(Error::Precondition(format!(
            "D(H_m) needs a sample of at least 10^4 points, got {n}"
        )));
    }
    let data = dist.sample(n, seed);
    let erm = erm_train(&data, c, spec, budget, seed)?;
    let f = |x: &[f64]| erm.f_z.value(x);
    let value = excess_generalization_error(&f, dist, spec, n, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    Ok(ApproximationErrorEstimate { value, erm })
}

fn covering_formula(epsilon: f64, dim: usize, m: usize, c5: f64) -> f64 {
    let d = dim as f64;
    let a = (d + 2.0) * m as f64;
    a * (1.0 / epsilon).ln() + a * ((1152.0 * E * PI * PI * c5).ln() + (d + 2.0) / (10.0 * d))
}

/// log 𝓝(H_m, ε) ≤ (d+2) m log(1/ε) + (d+2) m (log(1152 e π² C₅) + (d+2)/(10d)).
pub fn covering_bound(epsilon: f64, dim: usize, m: usize, c5: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Precondition(format!(
            "covering radius must lie in (0, 1], got {epsilon}"
        )));
    }
    if !(c5 > 0.0) {
        return Err(Error::Precondition(format!("C5 must be positive, got {c5}")));
    }
    Ok(covering_formula(epsilon, dim, m, c5))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringEstimate {
    pub epsilon: f64,
    pub bound_log: f64,
    pub empirical_log: Option<f64>,
}

impl CoveringEstimate {
    /// The bound dominates the oracle up to a log-slack of 0.5.
    pub fn dominated(&self) -> bool {
        self.empirical_log.is_none_or(|e| e <= self.bound_log + 0.5)
    }
}

/// Largest number of candidate networks the covering oracle enumerates.
pub const MAX_COVERING_CANDIDATES: usize = 4_000_000;

/// log of a greedy ε-net of H_m for d = 1, m ≤ 2, under the sup distance on
/// `eval_points` uniform points of D. Candidates span a uniform parameter
/// grid with `grid` values per coordinate of (α, b, β) per atom.
pub fn empirical_covering(c: &HypothesisConstraints, epsilon: f64, grid: usize, eval_points: usize) -> Result<f64> {
    if c.dim != 1 || c.width > 2 || c.width == 0 {
        return Err(Error::InstanceTooLarge(format!(
            "need d = 1 and m in {{1, 2}}, got d = {}, m = {}",
            c.dim, c.width
        )));
    }
    if grid < 2 || eval_points < 2 || !(epsilon > 0.0) {
        return Err(Error::Precondition(
            "covering oracle needs grid >= 2, eval_points >= 2, ε > 0".into(),
        ));
    }
    let candidates = grid.checked_pow(3 * c.width as u32).unwrap_or(usize::MAX);
    if candidates > MAX_COVERING_CANDIDATES {
        return Err(Error::InstanceTooLarge(format!("{candidates} candidate networks")));
    }
    let xs = uniform_grid(-1.0, 1.0, eval_points - 1);
    let alphas = uniform_grid(-c.alpha_l1_cap, c.alpha_l1_cap, grid - 1);
    let biases = uniform_grid(c.b_range.0, c.b_range.1, grid - 1);
    let betas = uniform_grid(-c.beta_cap, c.beta_cap, grid - 1);
    let mut atoms: Vec<Vec<f64>> = Vec::with_capacity(grid.pow(3));
    for &alpha in &alphas {
        for &b in &biases {
            for &beta in &betas {
                let atom = Atom {
                    alpha: vec![alpha],
                    b,
                    beta,
                };
                atoms.push(xs.iter().map(|&x| atom.value(&[x])).collect());
            }
        }
    }
    let mut net = GreedyNet::new(epsilon);
    if c.width == 1 {
        for v in &atoms {
            net.offer(v.clone());
        }
    } else {
        for a in &atoms {
            for b in &atoms {
                net.offer(a.iter().zip(b).map(|(p, q)| p + q).collect());
            }
        }
    }
    Ok((net.centers.len() as f64).ln())
}

/// Greedy ε-net: a candidate becomes a center unless some center is within ε.
/// Centers are bucketed by their values at the two end points.
struct GreedyNet {
    epsilon: f64,
    centers: Vec<Vec<f64>>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl GreedyNet {
    fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            centers: Vec::new(),
            buckets: HashMap::new(),
        }
    }

    fn key(&self, v: &[f64]) -> (i64, i64) {
        (
            (v[0] / self.epsilon).floor() as i64,
            (v[v.len() - 1] / self.epsilon).floor() as i64,
        )
    }

    fn offer(&mut self, v: Vec<f64>) {
        let (k0, k1) = self.key(&v);
        for d0 in -1..=1 {
            for d1 in -1..=1 {
                if let Some(ids) = self.buckets.get(&(k0 + d0, k1 + d1)) {
                    for &i in ids {
                        let c = &self.centers[i];
                        if c.iter().zip(&v).all(|(a, b)| (a - b).abs() <= self.epsilon) {
                            return;
                        }
                    }
                }
            }
        }
        self.buckets.entry((k0, k1)).or_default().push(self.centers.len());
        self.centers.push(v);
    }
}

/// Parameters of the oracle inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    pub n: f64,
    pub delta: f64,
    pub tau: f64,
    pub c1: f64,
    pub c0_prime: f64,
}

/// 4D + 8C'₀ log(2/δ)/(3N) + 2(8C₁ log(2/δ)/N)^{1/(2-τ)} + 24ε*.
pub fn oracle_inequality_bound(d_val: f64, params: &OracleParams, eps_star: f64) -> Result<f64> {
    let OracleParams {
        n,
        delta,
        tau,
        c1,
        c0_prime,
    } = *params;
    if !(delta > 0.0 && delta <= 1.0) || !(n >= 1.0) {
        return Err(Error::Precondition(format!(
            "oracle bound needs δ ∈ (0, 1] and N >= 1, got δ = {delta}, N = {n}"
        )));
    }
    let log_term = (2.0 / delta).ln();
    Ok(4.0 * d_val
        + 8.0 * c0_prime * log_term / (3.0 * n)
        + 2.0 * (8.0 * c1 * log_term / n).powf(1.0 / (2.0 - tau))
        + 24.0 * eps_star)
}

/// Inputs of the ε* condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonStarProblem {
    pub dim: usize,
    pub m: usize,
    pub n: f64,
    pub delta: f64,
    pub tau: f64,
    pub c1: f64,
    pub loss: LossSpec,
    pub c5: f64,
}

/// Largest ε searched by [`epsilon_star_solve`].
pub const EPSILON_STAR_LIMIT: f64 = 1e3;

impl EpsilonStarProblem {
    /// log 𝓝(ε/|φ'_+(-1)|) - N ε^{2-τ} / (2C₁ + (4/3)φ(-1) ε^{1-τ}) - log(δ/2);
    /// ε* is its first nonpositive point.
    pub fn condition(&self, epsilon: f64) -> f64 {
        let scaled = epsilon / loss_left_derivative_magnitude(&self.loss);
        let phi_minus_one = 2f64.powf(self.loss.eta());
        let concentration = self.n * epsilon.powf(2.0 - self.tau)
            / (2.0 * self.c1 + 4.0 / 3.0 * phi_minus_one * epsilon.powf(1.0 - self.tau));
        covering_formula(scaled, self.dim, self.m, self.c5) - concentration - (self.delta / 2.0).ln()
    }

    fn check(&self) -> Result<()> {
        let positive = [self.n, self.c1, self.c5].iter().all(|&v| v > 0.0) && self.m > 0 && self.dim > 0;
        if !positive || !(self.delta > 0.0 && self.delta < 1.0) || !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::Precondition(format!("invalid ε* problem {self:?}")));
        }
        Ok(())
    }
}

/// Smallest ε with `condition(ε) ≤ 0`, by geometric bisection to 1e-10 relative.
pub fn epsilon_star_solve(problem: &EpsilonStarProblem) -> Result<f64> {
    problem.check()?;
    let mut hi = EPSILON_STAR_LIMIT;
    if problem.condition(hi) > 0.0 {
        return Err(Error::Unsatisfiable {
            limit: EPSILON_STAR_LIMIT,
        });
    }
    let mut lo = 1e-300f64;
    if problem.condition(lo) <= 0.0 {
        return Ok(lo);
    }
    while hi / lo - 1.0 > 1e-12 {
        let mid = (lo * hi).sqrt();
        let mid = if mid <= lo || mid >= hi { (lo + hi) / 2.0 } else { mid };
        if problem.condition(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(hi)
}

/// C₆ (η > 1) and C₇ (η = 1) of the learning-rate bound, with a = max(η2^{η-1}, C₁).
pub fn learning_rate_constants(params: &OracleParams, loss: &LossSpec) -> (f64, f64) {
    let a = loss_left_derivative_magnitude(loss).max(params.c1);
    let tail = 24.0 * a + 3.0 * params.c0_prime + 2.0 * (8.0 * params.c1).powf(1.0 / (2.0 - params.tau));
    let logs = params.n.ln().max((2.0 * params.n / params.delta).ln()) * (2.0 / params.delta).ln();
    let c6 = ((8.0 * loss.c_phi() + tail) * logs).sqrt();
    let c7 = (4.0 * loss.c_phi() + tail) * logs;
    (c6, c7)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin() -> Distribution {
        Distribution::new(1, Family::Linear).unwrap()
    }

    #[test]
    fn pure_noise_misclassification() {
        let d = Distribution::new(2, Family::Constant { eta: 0.5 }).unwrap();
        let n = 4000;
        let r = misclassification_error(&|x: &[f64]| x[0], &d, n, 1).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bayes_risk_of_linear_family() {
        let d = lin();
        let bayes = |x: &[f64]| d.bayes_rule(x);
        let r = misclassification_error(&bayes, &d, 200_000, 3).unwrap();
        assert!((r.value - 0.25).abs() < 3.0 * r.std_error + 1e-3);
        let hm = Distribution::new(1, Family::HardMargin { margin: 1.0 }).unwrap();
        let wrong = |x: &[f64]| -hm.bayes_rule(x);
        assert_eq!(misclassification_error(&wrong, &hm, 1000, 0).unwrap().value, 1.0);
    }

    #[test]
    fn generalization_examples() {
        let d = lin();
        let zero = |_: &[f64]| 0.0;
        assert_eq!(
            generalization_error(&zero, &d, &LossSpec::hinge(), 1000, 0)
                .unwrap()
                .value,
            1.0
        );
        let two = LossSpec::new(2.0).unwrap();
        let best = |x: &[f64]| d.regression(x);
        let g = generalization_error(&best, &d, &two, 200_000, 1).unwrap();
        assert!((g.value - 2.0 / 3.0).abs() < 3.0 * g.std_error + 1e-3, "{g:?}");
        let one = Distribution::new(1, Family::Constant { eta: 1.0 }).unwrap();
        assert_eq!(
            generalization_error(&|_: &[f64]| 1.0, &one, &two, 1000, 0)
                .unwrap()
                .value,
            0.0
        );
        assert!(generalization_error(&zero, &d, &two, 10, 0).is_err());
    }

    #[test]
    fn exact_1d_matches_monte_carlo() {
        let d = Distribution::new(1, Family::Power { theta: 2.0 }).unwrap();
        let c = HypothesisConstraints::with_beta_cap(1, 6, 1.0);
        for seed in 0..5 {
            let net = crate::classification::random_net(&c, seed);
            let (risk, excess) = misclassification_exact_1d(&net, &d).unwrap();
            let f = |x: &[f64]| net.value(x);
            let mc = misclassification_error(&f, &d, 100_000, seed).unwrap();
            let mc_ex = excess_misclassification(&f, &d, 100_000, seed).unwrap();
            assert!((risk - mc.value).abs() < 4.0 * mc.std_error + 1e-3);
            assert!((excess - mc_ex.value).abs() < 4.0 * mc_ex.std_error + 1e-3);
            assert!((risk - d.bayes_risk() - excess).abs() < 1e-12);
        }
    }

    #[test]
    fn comparison_examples() {
        let two = LossSpec::new(2.0).unwrap();
        assert!((comparison_bound(0.08, &two).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(comparison_bound(0.3, &LossSpec::hinge()).unwrap(), 0.3);
        assert_eq!(comparison_bound(0.0, &two).unwrap(), 0.0);
        assert!(comparison_bound(-0.1, &two).is_err());
    }

    #[test]
    fn covering_bound_examples() {
        let v = covering_bound(0.1, 1, 2, 1.0).unwrap();
        assert!((v - 77.65).abs() < 0.01, "{v}");
        let at_one = covering_bound(1.0, 1, 2, 1.0).unwrap();
        assert!((at_one - 6.0 * ((1152.0 * E * PI * PI).ln() + 0.3)).abs() < 1e-12);
        for eps in [0.4, 0.1, 0.02] {
            let step = covering_bound(eps / 2.0, 2, 3, 1.5).unwrap() - covering_bound(eps, 2, 3, 1.5).unwrap();
            assert!((step - 12.0 * 2f64.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn empirical_covering_examples() {
        let c = HypothesisConstraints::with_beta_cap(1, 1, 0.3);
        assert_eq!(empirical_covering(&c, 0.6, 9, 33).unwrap(), 0.0);
        let mut last = 0.0;
        for eps in [0.2, 0.1, 0.05, 0.025] {
            let v = empirical_covering(&c, eps, 9, 33).unwrap();
            assert!(v >= last);
            last = v;
        }
        let big = HypothesisConstraints::with_beta_cap(2, 1, 0.3);
        assert!(matches!(
            empirical_covering(&big, 0.1, 5, 9),
            Err(Error::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn oracle_bound_examples() {
        let p = |n| OracleParams {
            n,
            delta: 0.5,
            tau: 1.0,
            c1: 1.0,
            c0_prime: 4.0,
        };
        let values: Vec<f64> = [1e3, 1e6, 1e9]
            .iter()
            .map(|&n| oracle_inequality_bound(0.0, &p(n), 0.0).unwrap())
            .collect();
        assert!(values[0] > values[1] && values[1] > values[2]);
        assert!(values[2] < 1e-3 * (4.0 + 1.0 + 1.0));
        let q = OracleParams {
            n: 800.0,
            delta: 2.0 / E,
            tau: 1.0,
            c1: 1.0,
            c0_prime: 0.0,
        };
        assert!((oracle_inequality_bound(0.0, &q, 0.0).unwrap() - 16.0 / 800.0).abs() < 1e-15);
        let a = oracle_inequality_bound(0.1, &q, 0.01).unwrap();
        let b = oracle_inequality_bound(0.2, &q, 0.01).unwrap();
        assert!((b - a - 0.4).abs() < 1e-12);
    }

    #[test]
    fn epsilon_star_is_a_root_and_monotone() {
        let base = EpsilonStarProblem {
            dim: 1,
            m: 4,
            n: 1e5,
            delta: 0.1,
            tau: 1.0,
            c1: 1.0,
            loss: LossSpec::hinge(),
            c5: 1.0,
        };
        let e = epsilon_star_solve(&base).unwrap();
        assert!(base.condition(e) <= 0.0);
        assert!(base.condition(e * (1.0 - 1e-8)) > 0.0);
        let more_data = epsilon_star_solve(&EpsilonStarProblem { n: 2e5, ..base }).unwrap();
        assert!(more_data <= e);
        let narrow = epsilon_star_solve(&EpsilonStarProblem { m: 1, ..base }).unwrap();
        let wide = epsilon_star_solve(&EpsilonStarProblem { m: 2, ..base }).unwrap();
        assert!(wide >= narrow);
    }

    #[test]
    fn epsilon_star_unsatisfiable() {
        let p = EpsilonStarProblem {
            dim: 3,
            m: 1_000_000,
            n: 1.0,
            delta: 0.01,
            tau: 0.0,
            c1: 1e6,
            loss: LossSpec::new(3.0).unwrap(),
            c5: 1e6,
        };
        assert_eq!(
            epsilon_star_solve(&p).unwrap_err(),
            Error::Unsatisfiable {
                limit: EPSILON_STAR_LIMIT
            }
        );
    }

    #[test]
    fn variance_check_on_the_minimizer_excludes_it() {
        let d = lin();
        let two = LossSpec::new(2.0).unwrap();
        let best = |x: &[f64]| d.regression(x);
        let f_set: [&RealFn<'_>; 1] = [&best];
        let out = variance_power_check(&f_set, &d, &two, 1.0, 2000, 0).unwrap();
        assert_eq!(out.excluded, vec![0]);
        assert!(!out.holds);
    }
}
