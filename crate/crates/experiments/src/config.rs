//! Experiment configuration, loaded from a single JSON document.

use std::fmt;
use std::path::{Path, PathBuf};

use korobov_relu::TrainBudget;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::checks::SuiteSizes;
use crate::error::{ExpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ApproxRate,
    LearnRate,
    NoiseRate,
    CoveringCheck,
    InequalitySuite,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::ApproxRate,
        ExperimentKind::LearnRate,
        ExperimentKind::NoiseRate,
        ExperimentKind::CoveringCheck,
        ExperimentKind::InequalitySuite,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::ApproxRate => "approx_rate",
            ExperimentKind::LearnRate => "learn_rate",
            ExperimentKind::NoiseRate => "noise_rate",
            ExperimentKind::CoveringCheck => "covering_check",
            ExperimentKind::InequalitySuite => "inequality_suite",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An L_p exponent in [1, ∞]; serialized as a number or the string "inf".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INF: Exponent = Exponent(f64::INFINITY);
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Exponent(v)),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Inf" | "∞") => Ok(Exponent::INF),
            Raw::Text(t) => t.parse().map(Exponent).map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C5")]
    pub c5: f64,
    #[serde(rename = "C_theta")]
    pub c_theta: f64,
    /// Defaults to (1 + B)^η with B = 1, the bound of truncated predictors.
    #[serde(rename = "C0prime", default)]
    pub c0_prime: Option<f64>,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c5: 1.0,
            c_theta: 1.0,
            c0_prime: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub d: usize,
    pub p: Exponent,
    #[serde(default = "one")]
    pub eta: f64,
    #[serde(default)]
    pub theta: Option<f64>,
    /// Variancing power used by the N(m) coupling of the learning sweep.
    #[serde(default = "one")]
    pub tau: f64,
    /// Test function (approximation) or distribution family (learning).
    pub family: String,
    pub m_grid: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub constants: Constants,
    pub output_dir: PathBuf,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Monte Carlo points for population risks when d > 1.
    #[serde(default = "default_risk_points")]
    pub risk_points: usize,
    /// Radii of the covering check.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    /// Replace C5 by the value fitted from the v bound at N = 8.
    #[serde(default)]
    pub fit_c5: bool,
    #[serde(default)]
    pub budget: TrainBudget,
    #[serde(default)]
    pub suite: SuiteSizes,
}

fn one() -> f64 {
    1.0
}

fn default_n_max() -> usize {
    200_000
}

fn default_delta() -> f64 {
    0.05
}

fn default_risk_points() -> usize {
    100_000
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            d: 1,
            p: Exponent::INF,
            eta: 1.0,
            theta: None,
            tau: 1.0,
            family: "linear".into(),
            m_grid: vec![8, 16, 32],
            seeds: (0..8).collect(),
            constants: Constants::default(),
            output_dir: PathBuf::from(format!("out/{kind}")),
            n_max: default_n_max(),
            delta: default_delta(),
            risk_points: default_risk_points(),
            epsilons: Vec::new(),
            fit_c5: false,
            budget: TrainBudget::default(),
            suite: SuiteSizes::default(),
        };
        match kind {
            ExperimentKind::ApproxRate => Self {
                family: "sine_product".into(),
                m_grid: vec![64, 128, 256, 512],
                seeds: (0..16).collect(),
                ..base
            },
            ExperimentKind::LearnRate => base,
            ExperimentKind::NoiseRate => Self {
                eta: 2.0,
                theta: Some(1.0),
                m_grid: vec![4, 8, 16],
                ..base
            },
            ExperimentKind::CoveringCheck => Self {
                family: "sine_product".into(),
                m_grid: vec![1, 2],
                seeds: vec![0],
                epsilons: vec![0.05, 0.1, 0.2],
                fit_c5: true,
                ..base
            },
            ExperimentKind::InequalitySuite => Self {
                family: "all".into(),
                m_grid: vec![8],
                seeds: vec![0],
                ..base
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ExpError::Config(msg));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if !(self.p.0 >= 1.0) {
            return bad(format!("p must lie in [1, inf], got {}", self.p));
        }
        if self.m_grid.is_empty() || self.m_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "m_grid must be nonempty and strictly increasing, got {:?}",
                self.m_grid
            ));
        }
        if self.seeds.is_empty() {
            return bad("seeds must be nonempty".into());
        }
        if !(self.eta >= 1.0) || !(0.0..=1.0).contains(&self.tau) {
            return bad(format!(
                "need η >= 1 and τ ∈ [0, 1], got η = {}, τ = {}",
                self.eta, self.tau
            ));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) || self.n_max == 0 {
            return bad("need δ ∈ (0, 1) and n_max >= 1".into());
        }
        let c = &self.constants;
        if ![c.c1, c.c5, c.c_theta].iter().all(|v| *v > 0.0) || c.c0_prime.is_some_and(|v| !(v > 0.0)) {
            return bad("constants must be positive".into());
        }
        match self.experiment {
            ExperimentKind::NoiseRate if self.eta != 2.0 => bad("noise_rate needs η = 2".into()),
            ExperimentKind::CoveringCheck if self.epsilons.is_empty() => bad("covering_check needs epsilons".into()),
            _ => Ok(()),
        }
    }

    /// Resolved C'_0.
    pub fn c0_prime(&self) -> f64 {
        self.constants.c0_prime.unwrap_or_else(|| 2f64.powf(self.eta))
    }

    /// SHA-256 of the canonical JSON with the output directory blanked, first 16 hex digits.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let text = serde_json::to_string(&canonical).expect("config serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Shifts every seed by `offset`.
    pub fn offset_seeds(&mut self, offset: u64) {
        for s in &mut self.seeds {
            *s = s.wrapping_add(offset);
        }
    }
}
