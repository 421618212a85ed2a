//! Semi-parametric bootstrap goodness-of-fit for a power-law fit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::powerlaw::{fit_power_law, FitError, PowerLawFit};
use super::sampler::PowerLawSampler;

/// Fraction of synthetic data sets whose refitted KS distance is at least the
/// observed one. Each set keeps the sample size; a value is drawn from the
/// fitted power law with probability `n_tail / n` and otherwise resampled
/// from the observed values below `x_min`. Resamples that cannot be fitted
/// are left out of the fraction.
pub fn bootstrap_gof(
    samples: &[u64],
    fit: &PowerLawFit,
    resamples: usize,
    seed: u64,
) -> Result<f64, FitError> {
    let positive: Vec<u64> = samples.iter().copied().filter(|&x| x > 0).collect();
    let body: Vec<u64> = positive.iter().copied().filter(|&x| x < fit.x_min).collect();
    let n = positive.len();
    let p_tail = fit.n_tail as f64 / n as f64;
    let sampler = PowerLawSampler::new(fit.alpha, fit.x_min);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut hits, mut fitted) = (0usize, 0usize);
    let mut data = Vec::with_capacity(n);
    for _ in 0..resamples {
        data.clear();
        for _ in 0..n {
            if body.is_empty() || rng.random::<f64>() < p_tail {
                data.push(sampler.sample(&mut rng));
            } else {
                data.push(body[rng.random_range(0..body.len())]);
            }
        }
        if let Ok(f) = fit_power_law(&data) {
            fitted += 1;
            if f.ks >= fit.ks {
                hits += 1;
            }
        }
    }
    if fitted == 0 {
        return Ok(0.0);
    }
    Ok(hits as f64 / fitted as f64)
}
