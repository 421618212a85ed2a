//! Log-likelihood ratio tests of the power law against alternatives fitted
//! on the same tail.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::powerlaw::{self, FitError, PowerLawFit, MIN_TAIL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alternative {
    Exponential,
    Lognormal,
}

impl Alternative {
    pub fn name(self) -> &'static str {
        match self {
            Alternative::Exponential => "exponential",
            Alternative::Lognormal => "lognormal",
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Alternative {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exponential" => Ok(Alternative::Exponential),
            "lognormal" => Ok(Alternative::Lognormal),
            _ => Err(format!("unknown alternative `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrtResult {
    pub alternative: Alternative,
    /// Positive when the power law fits better.
    pub r: f64,
    pub p: f64,
}

/// Sum of pointwise log-likelihood differences and the two-sided p-value of
/// its sign under the normal approximation.
pub fn vuong(ll_a: &[f64], ll_b: &[f64]) -> (f64, f64) {
    assert_eq!(ll_a.len(), ll_b.len(), "likelihood vectors differ in length");
    let n = ll_a.len() as f64;
    let diffs: Vec<f64> = ll_a.iter().zip(ll_b).map(|(a, b)| a - b).collect();
    let r: f64 = diffs.iter().sum();
    let mean = r / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    if var <= 0.0 || !var.is_finite() {
        return (r, if r == 0.0 { 1.0 } else { 0.0 });
    }
    let p = erfc(r.abs() / (2.0 * n * var).sqrt());
    (r, p.clamp(0.0, 1.0))
}

/// Discrete exponential `P(X = x) = (1 - e^-l) e^(-l (x - x_min))` on
/// `x >= x_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub lambda: f64,
    pub x_min: u64,
}

impl Exponential {
    pub fn fit(tail: &[u64], x_min: u64) -> Result<Self, FitError> {
        let excess =
            tail.iter().map(|&x| (x - x_min) as f64).sum::<f64>() / tail.len() as f64;
        if excess <= 0.0 {
            return Err(FitError::Alternative("tail has no spread above x_min".into()));
        }
        Ok(Exponential { lambda: (1.0 + 1.0 / excess).ln(), x_min })
    }

    pub fn log_pmf(&self, x: u64) -> f64 {
        (-(-self.lambda).exp_m1()).ln() - self.lambda * (x - self.x_min) as f64
    }
}

/// `floor(Y)` for log-normal `Y`, conditioned on `x >= x_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lognormal {
    pub mu: f64,
    pub sigma: f64,
    pub x_min: u64,
}

// ln P(Y >= y) and ln P(Y < y) for Y log-normal
fn ln_upper(z: f64) -> f64 {
    (0.5 * erfc(z / std::f64::consts::SQRT_2)).ln()
}

fn lower(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn upper(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

impl Lognormal {
    fn z(&self, y: f64) -> f64 {
        (y.ln() - self.mu) / self.sigma
    }

    pub fn log_pmf(&self, x: u64) -> f64 {
        let (z0, z1) = (self.z(x as f64), self.z(x as f64 + 1.0));
        // take the difference on whichever side keeps precision
        let mass = if z0 > 0.0 { upper(z0) - upper(z1) } else { lower(z1) - lower(z0) };
        mass.ln() - ln_upper(self.z(self.x_min as f64))
    }

    /// Maximum likelihood by Nelder-Mead over `(mu, ln sigma)`.
    pub fn fit(tail: &[u64], x_min: u64) -> Result<Self, FitError> {
        let logs: Vec<f64> = tail.iter().map(|&x| (x as f64).ln()).collect();
        let n = logs.len() as f64;
        let m = logs.iter().sum::<f64>() / n;
        let sd = (logs.iter().map(|l| (l - m).powi(2)).sum::<f64>() / n).sqrt().max(0.1);
        let mut counts: Vec<(u64, f64)> = Vec::new();
        let mut sorted = tail.to_vec();
        sorted.sort_unstable();
        for x in sorted {
            match counts.last_mut() {
                Some((v, c)) if *v == x => *c += 1.0,
                _ => counts.push((x, 1.0)),
            }
        }
        let neg_ll = |p: [f64; 2]| -> f64 {
            let d = Lognormal { mu: p[0], sigma: p[1].exp(), x_min };
            let ll: f64 = counts.iter().map(|&(x, c)| c * d.log_pmf(x)).sum();
            if ll.is_nan() {
                f64::INFINITY
            } else {
                -ll
            }
        };
        let best = nelder_mead(neg_ll, [m, sd.ln()], [0.5, 0.3], 5000, 1e-10);
        let fit = Lognormal { mu: best[0], sigma: best[1].exp(), x_min };
        if !(fit.mu.is_finite() && fit.sigma.is_finite() && fit.sigma > 0.0) {
            return Err(FitError::Alternative("log-normal fit did not converge".into()));
        }
        Ok(fit)
    }
}

/// Nelder-Mead minimization in two dimensions.
pub fn nelder_mead(
    f: impl Fn([f64; 2]) -> f64,
    start: [f64; 2],
    step: [f64; 2],
    max_iter: usize,
    tol: f64,
) -> [f64; 2] {
    let mut pts = [start, [start[0] + step[0], start[1]], [start[0], start[1] + step[1]]];
    let mut vals = pts.map(&f);
    for _ in 0..max_iter {
        let mut order = [0, 1, 2];
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.map(|i| pts[i]);
        vals = order.map(|i| vals[i]);
        if (vals[2] - vals[0]).abs() <= tol * (1.0 + vals[0].abs()) {
            break;
        }
        let c = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let along = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            if fe < fr {
                (pts[2], vals[2]) = (xe, fe);
            } else {
                (pts[2], vals[2]) = (xr, fr);
            }
        } else if fr < vals[1] {
            (pts[2], vals[2]) = (xr, fr);
        } else {
            let xc = if fr < vals[2] { along(-0.5) } else { along(0.5) };
            let fc = f(xc);
            if fc < vals[2].min(fr) {
                (pts[2], vals[2]) = (xc, fc);
            } else {
                for i in 1..3 {
                    pts[i] = [(pts[i][0] + pts[0][0]) / 2.0, (pts[i][1] + pts[0][1]) / 2.0];
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    pts[best]
}

/// Compares the fitted power law with `alternative` on the tail `x >= x_min`.
pub fn loglikelihood_ratio(
    samples: &[u64],
    fit: &PowerLawFit,
    alternative: Alternative,
) -> Result<LrtResult, FitError> {
    let tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= fit.x_min && x > 0).collect();
    if tail.len() < MIN_TAIL {
        return Err(FitError::TailTooSmall { found: tail.len(), needed: MIN_TAIL });
    }
    let ll_pl: Vec<f64> =
        tail.iter().map(|&x| powerlaw::log_pmf(x, fit.alpha, fit.x_min)).collect();
    let ll_alt: Vec<f64> = match alternative {
        Alternative::Exponential => {
            let e = Exponential::fit(&tail, fit.x_min)?;
            tail.iter().map(|&x| e.log_pmf(x)).collect()
        }
        Alternative::Lognormal => {
            let l = Lognormal::fit(&tail, fit.x_min)?;
            tail.iter().map(|&x| l.log_pmf(x)).collect()
        }
    };
    let (r, p) = vuong(&ll_pl, &ll_alt);
    Ok(LrtResult { alternative, r, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_likelihoods() {
        let ll = [-1.0, -2.5, -0.3];
        assert_eq!(vuong(&ll, &ll), (0.0, 1.0));
    }

    #[test]
    fn vuong_by_hand() {
        // differences 1, 2, 3: R = 6, variance 2/3
        let (r, p) = vuong(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]);
        assert_eq!(r, 6.0);
        let want = erfc(6.0 / (2.0 * 3.0 * (2.0 / 3.0f64)).sqrt());
        assert!((p - want).abs() < 1e-15);
    }

    #[test]
    fn exponential_mle_and_normalization() {
        let tail = [3, 3, 4, 5, 7];
        let e = Exponential::fit(&tail, 3).unwrap();
        // mean excess 1.4
        assert!((e.lambda - (1.0 + 1.0 / 1.4f64).ln()).abs() < 1e-15);
        let total: f64 = (3..2000).map(|x| e.log_pmf(x).exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(Exponential::fit(&[4, 4], 4).is_err());
    }

    #[test]
    fn lognormal_normalizes() {
        let d = Lognormal { mu: 1.3, sigma: 0.9, x_min: 2 };
        let total: f64 = (2..200_000).map(|x| d.log_pmf(x).exp()).sum();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
        // far below the median the lower-tail branch is used
        let low = Lognormal { mu: 12.0, sigma: 0.5, x_min: 1 };
        assert!(low.log_pmf(3).is_finite());
    }

    #[test]
    fn nelder_mead_on_a_bowl() {
        let p = nelder_mead(|[x, y]| (x - 1.0).powi(2) + 3.0 * (y + 2.0).powi(2), [0.0, 0.0], [1.0, 1.0], 2000, 1e-14);
        assert!((p[0] - 1.0).abs() < 1e-5 && (p[1] + 2.0).abs() < 1e-5, "{p:?}");
    }

    #[test]
    fn alternative_names() {
        for a in [Alternative::Exponential, Alternative::Lognormal] {
            assert_eq!(a.name().parse::<Alternative>().unwrap(), a);
        }
        assert_eq!(serde_json::to_string(&Alternative::Lognormal).unwrap(), "\"lognormal\"");
    }
}
