//! The η-norm loss φ(v) = (1 - v)_+^η, empirical risk minimization over H_m,
//! the truncation π and the induced classifier sgn(f).

use std::io::{Read, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::stream_rng;
use crate::shallow::{check_constraints, Atom, HypothesisConstraints, ShallowNet};

/// φ(v) = (1 - v)_+^η with η ≥ 1; η = 1 is the hinge loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    eta: f64,
}

impl LossSpec {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta >= 1.0) || !eta.is_finite() {
            return Err(Error::Precondition(format!(
                "loss exponent must be a finite value >= 1, got {eta}"
            )));
        }
        Ok(Self { eta })
    }

    pub fn hinge() -> Self {
        Self { eta: 1.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn loss(&self, v: f64) -> f64 {
        loss(v, self)
    }

    /// A subgradient of φ; the kink at v = 1 gets 0.
    pub fn derivative(&self, v: f64) -> f64 {
        if v >= 1.0 {
            0.0
        } else {
            -self.eta * (1.0 - v).powf(self.eta - 1.0)
        }
    }

    /// C^φ = ‖φ^{(η)}‖_∞ = Γ(η + 1), exact for integer η.
    pub fn c_phi(&self) -> f64 {
        statrs::function::gamma::gamma(self.eta + 1.0)
    }

    /// C'_0 = ‖φ‖_{L∞[-max(B,1), max(B,1)]} = (1 + max(B, 1))^η.
    pub fn c0_prime(&self, bound: f64) -> f64 {
        (1.0 + bound.max(1.0)).powf(self.eta)
    }
}

pub fn loss(v: f64, spec: &LossSpec) -> f64 {
    (1.0 - v).max(0.0).powf(spec.eta)
}

/// |φ'_+(-1)| = η 2^{η-1}.
pub fn loss_left_derivative_magnitude(spec: &LossSpec) -> f64 {
    spec.eta * 2f64.powf(spec.eta - 1.0)
}

/// π(v): clipping to [-1, 1].
pub fn truncate(v: f64) -> f64 {
    v.clamp(-1.0, 1.0)
}

/// sgn with sgn(0) = +1.
pub fn sign_label(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub fn classify(net: &ShallowNet, x: &[f64]) -> f64 {
    sign_label(net.value(x))
}

/// A labeled point (x, y) with y ∈ {-1, +1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: f64,
}

fn validate(data: &[Sample]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let d = data[0].x.len();
    for s in data {
        if s.y != 1.0 && s.y != -1.0 {
            return Err(Error::InvalidLabel(s.y));
        }
        if s.x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.x.len(),
            });
        }
    }
    Ok(())
}

/// (1/N) Σ φ(y_i f(x_i)).
pub fn empirical_risk(net: &ShallowNet, data: &[Sample], spec: &LossSpec) -> Result<f64> {
    validate(data)?;
    if data[0].x.len() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: data[0].x.len(),
        });
    }
    let terms: Vec<f64> = data.iter().map(|s| spec.loss(s.y * net.value(&s.x))).collect();
    Ok(crate::numerics::pairwise_sum(&terms) / data.len() as f64)
}

/// Restarts, iterations per restart and the step constant c of c·cap/√t.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub step: f64,
    /// Atoms with the smallest |β| redrawn once, halfway through each restart.
    pub refresh: usize,
    /// Cap on the iterations summed over all restarts.
    pub max_total_iterations: Option<usize>,
}

impl Default for TrainBudget {
    fn default() -> Self {
        Self {
            restarts: 8,
            iterations: 2000,
            step: 0.1,
            refresh: 0,
            max_total_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErmResult {
    pub f_z: ShallowNet,
    pub empirical_risk: f64,
    pub restarts_used: usize,
    pub constraint_certificate: bool,
}

/// A direction uniform on the unit ℓ1 sphere, scaled uniformly into the ball.
fn random_atom(rng: &mut ChaCha8Rng, dim: usize) -> Atom {
    let mut alpha: Vec<f64> = (0..dim)
        .map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln())
        .collect();
    let norm: f64 = alpha.iter().sum();
    let radius = rng.random::<f64>().powf(1.0 / dim as f64);
    for a in &mut alpha {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        *a = sign * radius * *a / norm;
    }
    Atom {
        alpha,
        b: rng.random(),
        beta: 0.0,
    }
}

/// A member of H_m with atoms drawn as in [`erm_train`] and β uniform in
/// [-beta_cap, beta_cap].
pub fn random_net(c: &HypothesisConstraints, seed: u64) -> ShallowNet {
    let mut rng = stream_rng(seed, "random-net");
    let atoms = (0..c.width)
        .map(|_| {
            let mut a = random_atom(&mut rng, c.dim);
            a.beta = rng.random_range(-c.beta_cap..=c.beta_cap);
            a
        })
        .collect();
    ShallowNet::new(c.dim, atoms, 0.0).expect("atoms have the constraint dimension")
}

struct Restart {
    atoms: Vec<Atom>,
    beta: Vec<f64>,
    risk: f64,
    iterations: usize,
}

fn features(atoms: &[Atom], data: &[Sample]) -> Vec<Vec<f64>> {
    data.iter()
        .map(|s| {
            atoms
                .iter()
                .map(|a| Atom { beta: 1.0, ..a.clone() }.value(&s.x))
                .collect()
        })
        .collect()
}

fn risk_of(beta: &[f64], phi: &[Vec<f64>], data: &[Sample], spec: &LossSpec) -> f64 {
    let terms: Vec<f64> = phi
        .iter()
        .zip(data)
        .map(|(row, s)| spec.loss(s.y * row.iter().zip(beta).map(|(p, b)| p * b).sum::<f64>()))
        .collect();
    crate::numerics::pairwise_sum(&terms) / data.len() as f64
}

fn run_restart(
    data: &[Sample],
    c: &HypothesisConstraints,
    spec: &LossSpec,
    budget: &TrainBudget,
    mut rng: ChaCha8Rng,
    iterations: usize,
) -> Restart {
    let m = c.width;
    let cap = c.beta_cap;
    let mut atoms: Vec<Atom> = (0..m).map(|_| random_atom(&mut rng, c.dim)).collect();
    let mut phi = features(&atoms, data);
    let mut beta = vec![0.0; m];
    let mut best = Restart {
        atoms: atoms.clone(),
        beta: beta.clone(),
        risk: risk_of(&beta, &phi, data, spec),
        iterations,
    };
    let n = data.len() as f64;
    let refresh_at = if budget.refresh > 0 { iterations / 2 } else { usize::MAX };
    let mut t_step = 0usize;
    for t in 1..=iterations {
        if t == refresh_at {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&i, &j| beta[i].abs().total_cmp(&beta[j].abs()).then(i.cmp(&j)));
            for &k in order.iter().take(budget.refresh.min(m)) {
                atoms[k] = random_atom(&mut rng, c.dim);
                beta[k] = 0.0;
            }
            phi = features(&atoms, data);
            t_step = 0;
        }
        t_step += 1;
        let mut grad = vec![0.0; m];
        for (row, s) in phi.iter().zip(data) {
            let margin = s.y * row.iter().zip(&beta).map(|(p, b)| p * b).sum::<f64>();
            let g = spec.derivative(margin) * s.y / n;
            if g != 0.0 {
                for (gk, p) in grad.iter_mut().zip(row) {
                    *gk += g * p;
                }
            }
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let step = budget.step * cap / (t_step as f64).sqrt() / norm;
        for (b, g) in beta.iter_mut().zip(&grad) {
            *b = (*b - step * g).clamp(-cap, cap);
        }
        let risk = risk_of(&beta, &phi, data, spec);
        if risk < best.risk {
            best.risk = risk;
            best.beta.clone_from(&beta);
            best.atoms.clone_from(&atoms);
        }
    }
    best
}

/// Multi-restart random-feature ERM over H_m: atoms are drawn at random and
/// the convex problem in β is solved by projected normalized subgradient
/// steps c·cap/√t. The best iterate of the best restart is returned, so the
/// empirical risk never exceeds φ(0) = 1.
pub fn erm_train(
    data: &[Sample],
    c: &HypothesisConstraints,
    spec: &LossSpec,
    budget: &TrainBudget,
    seed: u64,
) -> Result<ErmResult> {
    validate(data)?;
    if data[0].x.len() != c.dim {
        return Err(Error::DimensionMismatch {
            expected: c.dim,
            got: data[0].x.len(),
        });
    }
    if c.width == 0 || budget.restarts == 0 {
        return Err(Error::Precondition("ERM needs m >= 1 and at least one restart".into()));
    }
    let total = budget.max_total_iterations.unwrap_or(usize::MAX);
    let full = total
        .checked_div(budget.iterations)
        .map_or(budget.restarts, |k| k.min(budget.restarts));
    let (runs, partial) = if full == 0 { (1, Some(total)) } else { (full, None) };
    let restarts: Vec<Restart> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let rng = stream_rng(seed, &format!("erm-restart-{r}"));
            run_restart(data, c, spec, budget, rng, partial.unwrap_or(budget.iterations))
        })
        .collect();
    let best = restarts
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.risk.total_cmp(&b.risk).then(i.cmp(j)))
        .map(|(_, r)| r)
        .expect("at least one restart");
    let atoms: Vec<Atom> = best
        .atoms
        .iter()
        .zip(&best.beta)
        .map(|(a, &beta)| Atom { beta, ..a.clone() })
        .collect();
    let f_z = ShallowNet::new(c.dim, atoms, 0.0)?;
    let result = ErmResult {
        empirical_risk: empirical_risk(&f_z, data, spec)?,
        constraint_certificate: check_constraints(&f_z, c).satisfied,
        f_z,
        restarts_used: runs,
    };
    match partial {
        Some(done) => Err(Error::BudgetExhausted {
            iterations_done: done.min(best.iterations),
            best: Box::new(result),
        }),
        None => Ok(result),
    }
}

/// Writes `x1,…,xd,y` with a header row.
pub fn write_dataset<W: Write>(writer: W, data: &[Sample]) -> Result<()> {
    validate(data)?;
    let d = data[0].x.len();
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    header.push("y".into());
    w.write_record(&header).map_err(csv_error)?;
    for s in data {
        let mut row: Vec<String> = s.x.iter().map(|v| v.to_string()).collect();
        row.push(format!("{}", s.y as i64));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Serde(e.to_string()))
}

/// Reads a dataset written by [`write_dataset`]; the header row is mandatory.
pub fn read_dataset<R: Read>(reader: R) -> Result<Vec<Sample>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = r.headers().map_err(csv_error)?.clone();
    if header.is_empty() || header.iter().all(|h| h.trim().parse::<f64>().is_ok()) {
        return Err(Error::Serde("dataset CSV needs a header row".into()));
    }
    let mut out = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_error)?;
        let values: Vec<f64> = record
            .iter()
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Serde(format!("bad number `{v}`: {e}")))
            })
            .collect::<Result<_>>()?;
        let (y, x) = values
            .split_last()
            .ok_or_else(|| Error::Serde("empty CSV record".into()))?;
        out.push(Sample { x: x.to_vec(), y: *y });
    }
    validate(&out)?;
    Ok(out)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Serde(e.to_string())
}
