//! Hurwitz zeta function for real `s > 1`, `q > 0`.

// B_{2j} / (2j)! for j = 1..=10
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3617.0 / 10_670_622_842_880_000.0,
    43_867.0 / 5_109_094_217_170_944_000.0,
    -174_611.0 / 802_857_662_698_291_200_000.0,
];

// Terms below this fraction of the running total are dropped.
const REL_TOL: f64 = 1e-12;

/// `zeta(s, q) = sum_{k >= 0} (q + k)^-s`.
///
/// The first terms are summed directly until `q + k >= 10`, and the rest of
/// the series is closed with the Euler-Maclaurin tail, whose correction
/// terms are added until they fall below `1e-12` relative to the total.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0, "hurwitz_zeta needs s > 1, got {s}");
    assert!(q > 0.0, "hurwitz_zeta needs q > 0, got {q}");
    let mut sum = 0.0;
    let mut w = q;
    while w < 10.0 {
        sum += w.powf(-s);
        w += 1.0;
    }
    let w_s = w.powf(-s);
    sum += w * w_s / (s - 1.0) + 0.5 * w_s;
    // rising factorial s (s+1) ... (s+2j-2) times w^(-s-2j+1)
    let mut factor = s * w_s / w;
    let inv_w2 = 1.0 / (w * w);
    for (j, &b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = b * factor;
        sum += term;
        if term.abs() <= REL_TOL * sum.abs() {
            break;
        }
        let k = 2.0 * j as f64;
        factor *= (s + k + 1.0) * (s + k + 2.0) * inv_w2;
    }
    sum
}
