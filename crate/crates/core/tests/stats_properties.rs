use evosand::stats::{
    complementary_cdf, fit_alpha, fit_power_law, hurwitz_zeta, loglikelihood_ratio,
    survival_histogram, Alternative, PowerLawSampler,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Zeta};

// Plain partial sum with an integral remainder and one trapezoid correction.
fn zeta_oracle(s: f64, q: f64) -> f64 {
    let n = 200_000;
    let head: f64 = (0..n).map(|k| (q + k as f64).powf(-s)).sum();
    let x = q + n as f64;
    head + x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s)
}

fn ks_oracle(samples: &[u64], alpha: f64, x_min: u64) -> f64 {
    let mut tail: Vec<u64> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    tail.sort_unstable();
    let n = tail.len() as f64;
    let z = zeta_oracle(alpha, x_min as f64);
    let mut d: f64 = 0.0;
    let mut model = 0.0;
    let mut next = x_min;
    for (k, &x) in tail.iter().enumerate() {
        while next <= x {
            model += (next as f64).powf(-alpha) / z;
            next += 1;
        }
        if k + 1 == tail.len() || tail[k + 1] != x {
            d = d.max(((k + 1) as f64 / n - model).abs());
        }
    }
    d
}

fn power_law_samples(alpha: f64, x_min: u64, n: usize, seed: u64) -> Vec<u64> {
    let s = PowerLawSampler::new(alpha, x_min);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| s.sample(&mut rng)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn zeta_matches_the_plain_sum(s in 1.3f64..6.0, q in 0.5f64..60.0) {
        let want = zeta_oracle(s, q);
        let got = hurwitz_zeta(s, q);
        prop_assert!(((got - want) / want).abs() < 1e-8, "s={} q={}: {} vs {}", s, q, got, want);
    }

    #[test]
    fn histogram_is_a_distribution(samples in proptest::collection::vec(0u64..50, 1..300)) {
        let h = survival_histogram(&samples);
        let total: f64 = h.iter().map(|&(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(h.windows(2).all(|w| w[0].0 < w[1].0));
        let ccdf = complementary_cdf(&samples);
        prop_assert!((ccdf[0].1 - 1.0).abs() < 1e-12);
        prop_assert!(ccdf.windows(2).all(|w| w[0].1 >= w[1].1));
        for &(x, p) in &ccdf {
            let frac = samples.iter().filter(|&&s| s >= x).count() as f64 / samples.len() as f64;
            prop_assert!((p - frac).abs() < 1e-9);
        }
    }

    #[test]
    fn chosen_cutoff_minimizes_ks(seed in any::<u64>(), alpha in 1.8f64..3.2) {
        // a power-law tail on top of uniform small values
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = power_law_samples(alpha, 6, 150, seed);
        data.extend((0..80).map(|_| rng.random_range(1..6)));
        let fit = fit_power_law(&data).unwrap();
        let mut values: Vec<u64> = data.clone();
        values.sort_unstable();
        values.dedup();
        let mut best = f64::INFINITY;
        for &x in &values[..values.len() - 1] {
            let a = fit_alpha(&data, x).unwrap();
            best = best.min(ks_oracle(&data, a, x));
        }
        let at_choice = ks_oracle(&data, fit.alpha, fit.x_min);
        prop_assert!((at_choice - fit.ks).abs() < 1e-7, "{} vs {}", at_choice, fit.ks);
        prop_assert!(fit.ks <= best + 1e-7);
        // ties go to the smaller cut-off
        for &x in values.iter().filter(|&&x| x < fit.x_min) {
            let a = fit_alpha(&data, x).unwrap();
            prop_assert!(ks_oracle(&data, a, x) > fit.ks - 1e-7);
        }
    }
}

#[test]
fn exponent_is_consistent_across_seeds() {
    let estimates: Vec<f64> =
        (0..20).map(|seed| fit_alpha(&power_law_samples(2.5, 3, 20_000, seed), 3).unwrap()).collect();
    let mean = estimates.iter().sum::<f64>() / 20.0;
    // standard error is about (alpha - 1) / sqrt(n) = 0.011
    assert!((mean - 2.5).abs() < 0.01, "{mean}");
    assert!(estimates.iter().all(|a| (a - 2.5).abs() < 0.05), "{estimates:?}");
}

#[test]
fn exponent_of_an_outside_zeta_sampler() {
    for &a in &[1.7, 2.5, 3.5] {
        let z = Zeta::new(a).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data: Vec<u64> = (0..50_000).map(|_| z.sample(&mut rng) as u64).collect();
        let est = fit_alpha(&data, 1).unwrap();
        assert!((est - a).abs() < 0.03, "{a}: {est}");
    }
}

#[test]
fn sampler_agrees_with_an_outside_zeta_sampler() {
    let a = 2.2;
    let n = 40_000;
    let z = Zeta::new(a).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut theirs: Vec<u64> = (0..n).map(|_| z.sample(&mut rng) as u64).collect();
    let mut ours = power_law_samples(a, 1, n, 6);
    theirs.sort_unstable();
    ours.sort_unstable();
    // two-sample KS on the shared support
    let mut d: f64 = 0.0;
    for x in 1..200u64 {
        let f1 = theirs.partition_point(|&v| v <= x) as f64 / n as f64;
        let f2 = ours.partition_point(|&v| v <= x) as f64 / n as f64;
        d = d.max((f1 - f2).abs());
    }
    // 1.63 * sqrt(2 / n) is the 1% critical value
    assert!(d < 1.63 * (2.0 / n as f64).sqrt(), "{d}");
}

#[test]
fn geometric_data_prefers_the_exponential() {
    let g = Geometric::new(0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data: Vec<u64> = (0..20_000).map(|_| 1 + g.sample(&mut rng)).collect();
    let fit = fit_power_law(&data).unwrap();
    let lrt = loglikelihood_ratio(&data, &fit, Alternative::Exponential).unwrap();
    assert!(lrt.r < 0.0, "{lrt:?} with {fit:?}");
}

#[test]
fn power_law_data_beats_the_exponential() {
    let data = power_law_samples(2.5, 1, 20_000, 9);
    let fit = fit_power_law(&data).unwrap();
    let lrt = loglikelihood_ratio(&data, &fit, Alternative::Exponential).unwrap();
    assert!(lrt.r > 0.0 && lrt.p < 0.1, "{lrt:?}");
}
