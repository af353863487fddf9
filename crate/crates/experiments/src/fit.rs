//! Least-squares rate fits in log-log coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// (log size, log error) of the surviving points.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Inputs with a nonpositive error, dropped before fitting.
    pub dropped: Vec<(f64, f64)>,
}

/// OLS of log error on log size. Nonpositive errors are dropped and recorded.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    let (kept, dropped): (Vec<_>, Vec<_>) = points
        .iter()
        .copied()
        .partition(|&(size, err)| size > 0.0 && err > 0.0 && err.is_finite());
    let logs: Vec<(f64, f64)> = kept.iter().map(|&(s, e)| (s.ln(), e.ln())).collect();
    if logs.len() < 3 {
        return Err(ExpError::FitFailure { survivors: logs.len() });
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(ExpError::FitFailure { survivors: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        points: logs,
        slope,
        intercept,
        r_squared,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [64.0f64, 128.0, 256.0, 512.0]
            .iter()
            .map(|&m| (m, m.powf(-1.2)))
            .collect();
        let fit = fit_rate(&pts).unwrap();
        assert!((fit.slope + 1.2).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_errors() {
        let fit = fit_rate(&[(1.0, 0.3), (2.0, 0.3), (4.0, 0.3)]).unwrap();
        assert_eq!(fit.slope, 0.0);
    }

    #[test]
    fn halving() {
        let fit = fit_rate(&[(1.0, 1.0), (2.0, 0.5), (4.0, 0.25)]).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_points_are_dropped() {
        let fit = fit_rate(&[(1.0, 1.0), (2.0, 0.0), (4.0, 0.25), (8.0, 0.125)]).unwrap();
        assert_eq!(fit.dropped, vec![(2.0, 0.0)]);
        assert_eq!(fit.points.len(), 3);
        assert!(matches!(
            fit_rate(&[(1.0, 1.0), (2.0, -1.0), (4.0, 0.5)]),
            Err(ExpError::FitFailure { survivors: 2 })
        ));
    }
}
