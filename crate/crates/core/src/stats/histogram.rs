//! Empirical size distributions for plotting.

/// Distinct sizes with their empirical probabilities, ascending by size.
pub fn survival_histogram(samples: &[u64]) -> Vec<(u64, f64)> {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut out: Vec<(u64, f64)> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for x in sorted {
        match out.last() {
            Some(&(v, _)) if v == x => *counts.last_mut().unwrap() += 1,
            _ => {
                out.push((x, 0.0));
                counts.push(1);
            }
        }
    }
    for (entry, c) in out.iter_mut().zip(counts) {
        entry.1 = c as f64 / n;
    }
    out
}

/// `P(X >= x)` at each distinct size.
pub fn complementary_cdf(samples: &[u64]) -> Vec<(u64, f64)> {
    let hist = survival_histogram(samples);
    let mut remaining = 1.0;
    hist.into_iter()
        .map(|(x, p)| {
            let s = remaining;
            remaining -= p;
            (x, s.max(0.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(survival_histogram(&[1, 1, 2]), vec![(1, 2.0 / 3.0), (2, 1.0 / 3.0)]);
        assert_eq!(survival_histogram(&[5]), vec![(5, 1.0)]);
        assert!(survival_histogram(&[]).is_empty());
    }

    #[test]
    fn ccdf_starts_at_one() {
        let c = complementary_cdf(&[3, 1, 1, 2]);
        assert_eq!(c, vec![(1, 1.0), (2, 0.5), (3, 0.25)]);
    }
}
