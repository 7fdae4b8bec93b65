//! Small descriptive-statistics helpers for Monte-Carlo summaries.

use serde::Serialize;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleMoments {
    pub n: usize,
    pub mean: f64,
    /// Unbiased variance.
    pub variance: f64,
}

impl SampleMoments {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return SampleMoments {
                n,
                mean: f64::NAN,
                variance: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let variance = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        SampleMoments { n, mean, variance }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn mean_estimate(&self) -> Estimate {
        Estimate {
            mean: self.mean,
            std_err: (self.variance / self.n as f64).sqrt(),
        }
    }

    /// Standard error of the unbiased variance estimator, from the sample's
    /// fourth central moment.
    pub fn variance_std_err(&self, xs: &[f64]) -> f64 {
        let n = self.n as f64;
        let m4 = xs.iter().map(|x| (x - self.mean).powi(4)).sum::<f64>() / n;
        let s2 = self.variance;
        ((m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
    }
}

/// Proportion `k / n` with its binomial standard error.
pub fn proportion(k: u64, n: u64) -> Estimate {
    let p = k as f64 / n as f64;
    Estimate {
        mean: p,
        std_err: (p * (1.0 - p) / n as f64).sqrt(),
    }
}

/// Least-squares slope of `ln y` against `ln x`; points with non-positive
/// coordinates are skipped. `None` with fewer than two usable points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
