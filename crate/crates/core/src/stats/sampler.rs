//! Exact inverse-CDF sampling from a discrete power law on `x >= x_min`.

use rand::Rng;

use super::zeta::hurwitz_zeta;

const TABLE_LEN: usize = 4096;

#[derive(Debug, Clone)]
pub struct PowerLawSampler {
    alpha: f64,
    x_min: u64,
    z_min: f64,
    // survival P(X >= x_min + k + 1) for k < TABLE_LEN
    table: Vec<f64>,
}

impl PowerLawSampler {
    pub fn new(alpha: f64, x_min: u64) -> Self {
        assert!(alpha > 1.0 && x_min >= 1);
        let z_min = hurwitz_zeta(alpha, x_min as f64);
        let mut table = Vec::with_capacity(TABLE_LEN);
        let mut surv = 1.0;
        for k in 0..TABLE_LEN as u64 {
            surv -= ((x_min + k) as f64).powf(-alpha) / z_min;
            table.push(surv.max(0.0));
        }
        PowerLawSampler { alpha, x_min, z_min, table }
    }

    fn survival(&self, x: u64) -> f64 {
        hurwitz_zeta(self.alpha, x as f64) / self.z_min
    }

    /// The `x` with `P(X > x) < u <= P(X >= x)`.
    pub fn quantile(&self, u: f64) -> u64 {
        // table holds P(X > x_min + k), decreasing in k
        let k = self.table.partition_point(|&s| s >= u);
        if k < self.table.len() {
            return self.x_min + k as u64;
        }
        // the last table entry still has P(X > lo) >= u
        let mut lo = self.x_min + TABLE_LEN as u64 - 1;
        let mut hi = lo * 2;
        while self.survival(hi + 1) >= u {
            lo = hi;
            hi *= 2;
        }
        // P(X > lo) >= u > P(X > hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.survival(mid + 1) >= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        // u in (0, 1]
        let u = 1.0 - rng.random::<f64>();
        self.quantile(u)
    }
}
