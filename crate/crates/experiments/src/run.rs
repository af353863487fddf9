//! The experiment drivers. Each (m, seed) cell is computed in parallel with
//! its own seed; rows are aggregated in grid order.

use std::path::Path;

use korobov_relu::classification::erm_train;
use korobov_relu::korobov::{korobov_norm_or_analytic, make_test_function};
use korobov_relu::risk::{
    covering_bound, empirical_covering, excess_misclassification, learning_rate_constants, misclassification_exact_1d,
    OracleParams,
};
use korobov_relu::shallow::{theorem1_pipeline_with, PipelineOptions};
use korobov_relu::{Distribution, Error as CoreError, Family, HypothesisConstraints, LossSpec, TestFamily};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{fitted_c5, inequality_suite};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{ExpError, Result};
use crate::fit::{fit_rate, RateFit};
use crate::output::{medians_by_size, plot_size, regenerate_svg, write_csv, Row};
use crate::theory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// C₆ and C₇ of the learning bound at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningConstants {
    pub m: usize,
    pub n: usize,
    pub c6: f64,
    pub c7: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: ExperimentKind,
    pub config_hash: String,
    pub fit: Option<RateFit>,
    pub theoretical_exponent: Option<f64>,
    /// Further predicted exponents, e.g. the other p branch or the θ → ∞ limit.
    pub reported_exponents: Vec<(String, f64)>,
    /// Per-size medians the fit was computed from.
    pub medians: Vec<(usize, f64)>,
    pub learning_constants: Vec<LearningConstants>,
    pub assertions: Vec<Assertion>,
    pub warnings: Vec<String>,
    pub all_passed: bool,
}

impl Report {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            experiment: cfg.experiment,
            config_hash: cfg.hash(),
            fit: None,
            theoretical_exponent: None,
            reported_exponents: Vec::new(),
            medians: Vec::new(),
            learning_constants: Vec::new(),
            assertions: Vec::new(),
            warnings: Vec::new(),
            all_passed: false,
        }
    }

    fn finish(mut self) -> Self {
        self.all_passed = !self.assertions.is_empty() && self.assertions.iter().all(|a| a.passed);
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub report: Report,
}

/// Rows computed so far, and the run's report or the error that stopped it.
struct Partial {
    rows: Vec<Row>,
    report: Result<Report>,
}

/// Runs the experiment without touching the file system.
pub fn run(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome> {
    let partial = compute(cfg, opts)?;
    Ok(Outcome {
        rows: partial.rows,
        report: partial.report?,
    })
}

/// Runs the experiment and writes `results.csv`, `plot.svg` and `report.json`
/// into the output directory. On failure the rows finished so far are still
/// written to `results.csv`.
pub fn run_and_write(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Outcome> {
    let partial = compute(cfg, opts)?;
    let dir = cfg.output_dir.as_path();
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join("results.csv");
    write_csv(&csv_path, &partial.rows)?;
    let report = partial.report?;
    regenerate_svg(&csv_path, &dir.join("plot.svg"))?;
    write_report(&dir.join("report.json"), &report)?;
    Ok(Outcome {
        rows: partial.rows,
        report,
    })
}

fn write_report(path: &Path, report: &Report) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn compute(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Partial> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| ExpError::Pool(e.to_string()))?;
    Ok(pool.install(|| match cfg.experiment {
        ExperimentKind::ApproxRate => approx_rate(cfg),
        ExperimentKind::LearnRate | ExperimentKind::NoiseRate => learn_rate(cfg),
        ExperimentKind::CoveringCheck => covering_check(cfg),
        ExperimentKind::InequalitySuite => suite(cfg),
    }))
}

fn base_row(cfg: &ExperimentConfig, label: &str, seed: u64, m: usize) -> Row {
    Row {
        config_hash: cfg.hash(),
        experiment: cfg.experiment.to_string(),
        label: label.into(),
        seed,
        m,
        n: 0,
        n_truncated: false,
        c1: cfg.constants.c1,
        c5: cfg.constants.c5,
        c_theta: cfg.constants.c_theta,
        c0_prime: cfg.c0_prime(),
        error: f64::NAN,
        std_error: 0.0,
        bound: f64::NAN,
    }
}

fn cells(cfg: &ExperimentConfig) -> Vec<(usize, u64)> {
    cfg.m_grid
        .iter()
        .flat_map(|&m| cfg.seeds.iter().map(move |&s| (m, s)))
        .collect()
}

/// Keeps the leading successes; the first failure ends the rows.
fn split<T>(results: Vec<Result<T>>) -> (Vec<T>, Option<ExpError>) {
    let mut ok = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => return (ok, Some(e)),
        }
    }
    (ok, None)
}

/// Counts steps where the median goes up.
fn inversions(medians: &[(usize, f64)]) -> usize {
    medians.windows(2).filter(|w| w[1].1 > w[0].1).count()
}

fn slope_assertion(report: &mut Report, medians: &[(usize, f64)], theory: f64) {
    let points: Vec<(f64, f64)> = medians.iter().map(|&(s, e)| (s as f64, e)).collect();
    match fit_rate(&points) {
        Ok(fit) => {
            for (s, e) in &fit.dropped {
                report
                    .warnings
                    .push(format!("dropped nonpositive median {e} at size {s}"));
            }
            let limit = 0.5 * theory;
            report.assertions.push(Assertion::new(
                "slope",
                fit.slope <= limit,
                format!(
                    "fitted slope {:.4} vs limit {:.4} (half of {:.4})",
                    fit.slope, limit, theory
                ),
            ));
            report.fit = Some(fit);
        }
        Err(e) => report.assertions.push(Assertion::new("slope", false, e.to_string())),
    }
}

struct ApproxCell {
    row: Row,
    certified: bool,
    large_mean: bool,
}

fn approx_rate(cfg: &ExperimentConfig) -> Partial {
    let family: TestFamily = match cfg.family.parse() {
        Ok(f) => f,
        Err(e) => {
            return Partial {
                rows: Vec::new(),
                report: Err(ExpError::Core(e)),
            }
        }
    };
    let p = cfg.p.0;
    let theory = theory::approx_exponent(cfg.d, p);
    let opts = PipelineOptions {
        c5: cfg.constants.c5,
        ..PipelineOptions::default()
    };
    let results: Vec<Result<ApproxCell>> = cells(cfg)
        .into_par_iter()
        .map(|(m, seed)| {
            let f = make_test_function(family, cfg.d, seed)?;
            let out = theorem1_pipeline_with(&f, m, p, seed, &opts)?;
            let norm = korobov_norm_or_analytic(&f, p, &opts.quad)?;
            let mut row = base_row(cfg, &cfg.family, seed, m);
            row.n = out.diagnostics.degree;
            row.error = out.error;
            row.bound = cfg.constants.c5 * norm * (m as f64).powf(theory);
            Ok(ApproxCell {
                row,
                certified: out.diagnostics.certificate.satisfied,
                large_mean: out.diagnostics.large_mean,
            })
        })
        .collect();
    let (done, failure) = split(results);
    let rows: Vec<Row> = done.iter().map(|c| c.row.clone()).collect();
    if let Some(e) = failure {
        return Partial { rows, report: Err(e) };
    }
    let mut report = Report::new(cfg);
    report.theoretical_exponent = Some(theory);
    report
        .reported_exponents
        .push(("p>=2".into(), theory::approx_exponent(cfg.d, f64::INFINITY)));
    if p < 2.0 {
        report.reported_exponents.push((format!("p={p}"), theory));
    }
    let medians = medians_by_size(&rows, plot_size)
        .remove(&cfg.family)
        .unwrap_or_default();
    report.assertions.push(Assertion::new(
        "median_monotone",
        inversions(&medians) == 0,
        format!("{} increases along the m grid", inversions(&medians)),
    ));
    slope_assertion(&mut report, &medians, theory);
    let uncertified = done.iter().filter(|c| !c.certified).count();
    report.assertions.push(Assertion::new(
        "constraint_certificate",
        uncertified == 0,
        format!("{uncertified} of {} nets violate the realized constraints", done.len()),
    ));
    if done.iter().any(|c| c.large_mean) {
        report
            .warnings
            .push("J_N f has a large mean; the net offset carries it".into());
    }
    report.medians = medians;
    Partial {
        rows,
        report: Ok(report.finish()),
    }
}

fn distribution(cfg: &ExperimentConfig) -> Result<Distribution> {
    Ok(Distribution::new(cfg.d, Family::from_name(&cfg.family, cfg.theta)?)?)
}

struct LearnCell {
    row: Row,
    note: Option<String>,
}

fn learn_rate(cfg: &ExperimentConfig) -> Partial {
    let setup = || -> Result<(Distribution, LossSpec, f64, f64)> {
        let dist = distribution(cfg)?;
        let spec = LossSpec::new(cfg.eta)?;
        let p = cfg.p.0;
        if cfg.experiment == ExperimentKind::NoiseRate {
            let theta = dist
                .theta()
                .ok_or_else(|| ExpError::Config(format!("family {} declares no Tsybakov exponent", cfg.family)))?;
            Ok((
                dist,
                spec,
                theory::noise_coupling_power(cfg.d, p),
                theory::noise_exponent(cfg.d, p, theta),
            ))
        } else {
            Ok((
                dist,
                spec,
                theory::learn_coupling_power(cfg.d, p, cfg.eta, cfg.tau),
                theory::learn_exponent(cfg.d, p, cfg.eta, cfg.tau),
            ))
        }
    };
    let (dist, spec, power, exponent) = match setup() {
        Ok(s) => s,
        Err(e) => {
            return Partial {
                rows: Vec::new(),
                report: Err(e),
            }
        }
    };
    let c0_prime = cfg.c0_prime();
    let params_at = |n: usize| OracleParams {
        n: n as f64,
        delta: cfg.delta,
        tau: cfg.tau,
        c1: cfg.constants.c1,
        c0_prime,
    };
    let results: Vec<Result<LearnCell>> = cells(cfg)
        .into_par_iter()
        .map(|(m, seed)| {
            let coupling = theory::coupling(m, power, cfg.n_max);
            let data = dist.sample(coupling.n, seed);
            let c = HypothesisConstraints::new(cfg.d, m, cfg.constants.c5);
            let (trained, note) = match erm_train(&data, &c, &spec, &cfg.budget, seed) {
                Ok(r) => (r, None),
                Err(CoreError::BudgetExhausted { iterations_done, best }) => (
                    *best,
                    Some(format!(
                        "m={m} seed={seed}: budget exhausted after {iterations_done} iterations"
                    )),
                ),
                Err(e) => return Err(e.into()),
            };
            let net = &trained.f_z;
            let (error, std_error) = match misclassification_exact_1d(net, &dist) {
                Ok((_, excess)) => (excess, 0.0),
                Err(_) => {
                    let f = |x: &[f64]| net.value(x);
                    let est = excess_misclassification(&f, &dist, cfg.risk_points, seed ^ 0x00c0_ffee)?;
                    (est.value, est.std_error)
                }
            };
            let (c6, c7) = learning_rate_constants(&params_at(coupling.n), &spec);
            let mut row = base_row(cfg, &cfg.family, seed, m);
            row.n = coupling.n;
            row.n_truncated = coupling.truncated;
            row.error = error;
            row.std_error = std_error;
            row.bound = if cfg.eta > 1.0 { c6 } else { c7 } * (coupling.n as f64).powf(exponent);
            Ok(LearnCell { row, note })
        })
        .collect();
    let (done, failure) = split(results);
    let rows: Vec<Row> = done.iter().map(|c| c.row.clone()).collect();
    if let Some(e) = failure {
        return Partial { rows, report: Err(e) };
    }
    let mut report = Report::new(cfg);
    report.theoretical_exponent = Some(exponent);
    if cfg.experiment == ExperimentKind::NoiseRate {
        report
            .reported_exponents
            .push(("theta->inf".into(), theory::noise_limit_exponent(cfg.d, cfg.p.0)));
    }
    report.warnings.extend(done.iter().filter_map(|c| c.note.clone()));
    for &m in &cfg.m_grid {
        let coupling = theory::coupling(m, power, cfg.n_max);
        if coupling.truncated {
            report.warnings.push(format!(
                "m={m}: N = {} truncated to N_max = {}",
                coupling.nominal, cfg.n_max
            ));
        }
        let (c6, c7) = learning_rate_constants(&params_at(coupling.n), &spec);
        report.learning_constants.push(LearningConstants {
            m,
            n: coupling.n,
            c6,
            c7,
        });
    }
    let medians = medians_by_size(&rows, plot_size)
        .remove(&cfg.family)
        .unwrap_or_default();
    let inv = inversions(&medians);
    report.assertions.push(Assertion::new(
        "median_monotone",
        inv <= 1,
        format!("{inv} increases along the grid, at most one allowed"),
    ));
    if cfg.experiment == ExperimentKind::LearnRate {
        if let (Some(first), Some(last)) = (medians.first(), medians.last()) {
            report.assertions.push(Assertion::new(
                "median_decrease",
                last.1 <= 0.7 * first.1,
                format!("median {:.4e} -> {:.4e}", first.1, last.1),
            ));
        }
    }
    slope_assertion(&mut report, &medians, exponent);
    report.medians = medians;
    Partial {
        rows,
        report: Ok(report.finish()),
    }
}

/// Candidate parameter values per coordinate for the covering oracle.
fn covering_grid(m: usize) -> usize {
    if m == 1 {
        64
    } else {
        12
    }
}

const COVERING_EVAL_POINTS: usize = 65;

fn covering_check(cfg: &ExperimentConfig) -> Partial {
    let c5 = if cfg.fit_c5 {
        match make_test_function_checked(cfg).and_then(|f| fitted_c5(&f)) {
            Ok(c) => c,
            Err(e) => {
                return Partial {
                    rows: Vec::new(),
                    report: Err(e),
                }
            }
        }
    } else {
        cfg.constants.c5
    };
    let seed = cfg.seeds[0];
    let grid: Vec<(usize, f64)> = cfg
        .m_grid
        .iter()
        .flat_map(|&m| cfg.epsilons.iter().map(move |&e| (m, e)))
        .collect();
    let results: Vec<Result<Row>> = grid
        .into_par_iter()
        .map(|(m, eps)| {
            let c = HypothesisConstraints::new(cfg.d, m, c5);
            let empirical = empirical_covering(&c, eps, covering_grid(m), COVERING_EVAL_POINTS)?;
            let mut row = base_row(cfg, &format!("eps={eps}"), seed, m);
            row.c5 = c5;
            row.n = covering_grid(m);
            row.error = empirical;
            row.bound = covering_bound(eps, cfg.d, m, c5)?;
            Ok(row)
        })
        .collect();
    let (rows, failure) = split(results);
    if let Some(e) = failure {
        return Partial { rows, report: Err(e) };
    }
    let mut report = Report::new(cfg);
    let violations = rows.iter().filter(|r| r.error > r.bound).count();
    report.assertions.push(Assertion::new(
        "covering_dominance",
        violations == 0,
        format!(
            "{violations} of {} (m, ε) cells exceed the bound; C5 = {c5:.6}",
            rows.len()
        ),
    ));
    Partial {
        rows,
        report: Ok(report.finish()),
    }
}

fn make_test_function_checked(cfg: &ExperimentConfig) -> Result<korobov_relu::KorobovFunction> {
    Ok(make_test_function(cfg.family.parse()?, cfg.d, cfg.seeds[0])?)
}

fn suite(cfg: &ExperimentConfig) -> Partial {
    let seed = cfg.seeds[0];
    let outcomes = match inequality_suite(seed, &cfg.suite) {
        Ok(o) => o,
        Err(e) => {
            return Partial {
                rows: Vec::new(),
                report: Err(e),
            }
        }
    };
    let mut rows = Vec::new();
    let mut report = Report::new(cfg);
    for check in &outcomes {
        for meas in &check.measurements {
            let mut row = base_row(cfg, &format!("{}/{}", check.name, meas.label), seed, meas.m);
            row.n = meas.n;
            row.error = meas.value;
            row.std_error = meas.std_error;
            row.bound = meas.bound;
            rows.push(row);
        }
        report
            .assertions
            .push(Assertion::new(&check.name, check.passed, check.detail.clone()));
    }
    // comparison runs once per η
    for (a, eta) in report
        .assertions
        .iter_mut()
        .filter(|a| a.name == "comparison")
        .zip([1, 2])
    {
        a.name = format!("comparison_eta{eta}");
    }
    Partial {
        rows,
        report: Ok(report.finish()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inversion_count() {
        assert_eq!(inversions(&[(1, 3.0), (2, 2.0), (3, 2.5), (4, 1.0)]), 1);
        assert_eq!(inversions(&[(1, 3.0), (2, 3.0)]), 0);
    }

    #[test]
    fn split_keeps_leading_successes() {
        let (ok, err) = split(vec![Ok(1), Ok(2), Err(ExpError::Config("x".into())), Ok(4)]);
        assert_eq!(ok, vec![1, 2]);
        assert!(err.is_some());
    }
}
