//! Discrete power-law fits: maximum-likelihood exponent and cut-off chosen by
//! minimum KS distance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::zeta::hurwitz_zeta;

pub const MIN_SAMPLES: usize = 50;
pub const MIN_TAIL: usize = 10;
pub const ALPHA_MAX: f64 = 20.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} positive samples, got {found}")]
    TooFewSamples { found: usize, needed: usize },
    #[error("all samples equal {0}; a power law cannot be fitted")]
    Degenerate(u64),
    #[error("no samples at or above x_min = {0}")]
    EmptyTail(u64),
    #[error("exponent must exceed 1, got {0}")]
    InvalidAlpha(f64),
    #[error("x_min must be at least 1")]
    InvalidXmin,
    #[error("tail of {found} samples is below the minimum of {needed}")]
    TailTooSmall { found: usize, needed: usize },
    #[error("alternative fit failed: {0}")]
    Alternative(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub x_min: u64,
    pub alpha: f64,
    pub ks: f64,
    pub n_tail: usize,
    /// Set when the tail is too short to trust the fit.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warning: Option<String>,
}

/// `ln P(X = x)` for the power law on `x >= x_min`.
pub fn log_pmf(x: u64, alpha: f64, x_min: u64) -> f64 {
    -alpha * (x as f64).ln() - hurwitz_zeta(alpha, x_min as f64).ln()
}

/// `P(X <= x)` for the power law on `x >= x_min`.
pub fn cdf(x: u64, alpha: f64, x_min: u64) -> f64 {
    if x < x_min {
        return 0.0;
    }
    1.0 - hurwitz_zeta(alpha, x as f64 + 1.0) / hurwitz_zeta(alpha, x_min as f64)
}

/// Distinct sorted values with counts plus suffix sums, so any tail's
/// sufficient statistics are O(1) to read.
pub(crate) struct Summary {
    pub values: Vec<u64>,
    pub counts: Vec<usize>,
    // number of samples and sum of ln x over values[k..]
    pub tail_n: Vec<usize>,
    pub tail_ln: Vec<f64>,
}

impl Summary {
    pub fn new(samples: &[u64]) -> Self {
        let mut sorted: Vec<u64> = samples.iter().copied().filter(|&x| x > 0).collect();
        sorted.sort_unstable();
        let mut values = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for x in sorted {
            if values.last() == Some(&x) {
                *counts.last_mut().unwrap() += 1;
            } else {
                values.push(x);
                counts.push(1);
            }
        }
        let k = values.len();
        let mut tail_n = vec![0; k + 1];
        let mut tail_ln = vec![0.0; k + 1];
        for i in (0..k).rev() {
            tail_n[i] = tail_n[i + 1] + counts[i];
            tail_ln[i] = tail_ln[i + 1] + counts[i] as f64 * (values[i] as f64).ln();
        }
        Summary { values, counts, tail_n, tail_ln }
    }

    pub fn n(&self) -> usize {
        self.tail_n[0]
    }

    /// MLE of the exponent for the tail starting at `values[k]`.
    pub fn alpha_at(&self, k: usize) -> f64 {
        mle_alpha(self.tail_n[k], self.tail_ln[k], self.values[k])
    }

    /// KS distance of the tail starting at `values[k]` against exponent `alpha`.
    pub fn ks_at(&self, k: usize, alpha: f64) -> f64 {
        let x_min = self.values[k];
        let n = self.tail_n[k] as f64;
        let z_min = hurwitz_zeta(alpha, x_min as f64);
        let mut seen = 0usize;
        let mut d: f64 = 0.0;
        for i in k..self.values.len() {
            seen += self.counts[i];
            let empirical = seen as f64 / n;
            let model = 1.0 - hurwitz_zeta(alpha, self.values[i] as f64 + 1.0) / z_min;
            d = d.max((empirical - model).abs());
        }
        d.min(1.0)
    }
}

/// Maximizes `-n ln zeta(a, x_min) - a * sum_ln` over `a` in `(1, 20]` by
/// golden-section search.
pub fn mle_alpha(n: usize, sum_ln: f64, x_min: u64) -> f64 {
    let q = x_min as f64;
    let n = n as f64;
    let neg_ll = |a: f64| n * hurwitz_zeta(a, q).ln() + a * sum_ln;
    golden_section_min(neg_ll, 1.0 + 1e-6, ALPHA_MAX, 1e-9)
}

/// Minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// KS distance between the samples at or above `x_min` and the power law.
pub fn ks_distance(samples: &[u64], alpha: f64, x_min: u64) -> Result<f64, FitError> {
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(FitError::InvalidAlpha(alpha));
    }
    if x_min == 0 {
        return Err(FitError::InvalidXmin);
    }
    let tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    if tail.is_empty() {
        return Err(FitError::EmptyTail(x_min));
    }
    let summary = Summary::new(&tail);
    // the tail's own minimum may exceed x_min, so normalize at x_min
    let n = summary.n() as f64;
    let z_min = hurwitz_zeta(alpha, x_min as f64);
    let mut seen = 0usize;
    let mut d: f64 = 0.0;
    for (x, c) in summary.values.iter().zip(&summary.counts) {
        seen += c;
        let model = 1.0 - hurwitz_zeta(alpha, *x as f64 + 1.0) / z_min;
        d = d.max((seen as f64 / n - model).abs());
    }
    Ok(d.min(1.0))
}

/// Fits the exponent for every candidate cut-off and keeps the one with the
/// smallest KS distance (the smallest cut-off on ties). Zeros are ignored.
///
/// The largest distinct value is not a candidate: a tail holding a single
/// value says nothing about the exponent.
pub fn fit_power_law(samples: &[u64]) -> Result<PowerLawFit, FitError> {
    let summary = Summary::new(samples);
    if summary.n() < MIN_SAMPLES {
        return Err(FitError::TooFewSamples { found: summary.n(), needed: MIN_SAMPLES });
    }
    if summary.values.len() == 1 {
        return Err(FitError::Degenerate(summary.values[0]));
    }
    let mut best: Option<(usize, f64, f64)> = None;
    for k in 0..summary.values.len() - 1 {
        let alpha = summary.alpha_at(k);
        let ks = summary.ks_at(k, alpha);
        if best.map_or(true, |(_, _, b)| ks < b) {
            best = Some((k, alpha, ks));
        }
    }
    let (k, alpha, ks) = best.expect("at least one candidate");
    let n_tail = summary.tail_n[k];
    let warning = (n_tail < MIN_TAIL)
        .then(|| format!("only {n_tail} samples at or above x_min; the fit is unreliable"));
    Ok(PowerLawFit { x_min: summary.values[k], alpha, ks, n_tail, warning })
}

/// Fit with a fixed cut-off.
pub fn fit_alpha(samples: &[u64], x_min: u64) -> Result<f64, FitError> {
    if x_min == 0 {
        return Err(FitError::InvalidXmin);
    }
    let tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    if tail.is_empty() {
        return Err(FitError::EmptyTail(x_min));
    }
    let sum_ln = tail.iter().map(|&x| (x as f64).ln()).sum();
    Ok(mle_alpha(tail.len(), sum_ln, x_min))
}
