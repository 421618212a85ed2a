//! Direct solver for a central pile on the static square grid.
//!
//! On a fixed graph the final configuration and the number of times each
//! cell topples (the odometer `u`) do not depend on toppling order, and `u`
//! is the least non-negative function with `n delta_0 + lap(u) <= 3`
//! everywhere. Any `u >= 0` meeting that bound lies above the least one.
//!
//! The pile is symmetric under the eight lattice symmetries fixing the
//! origin, so is `u`, and the solver works on the octant `0 <= y <= x`;
//! toppling a cell there topples its whole orbit at once. It guesses `u`
//! from the solution for `n / 4` grains scaled up by the lattice potential
//! kernel, topples upward where the guess is short, untopples cells that went
//! negative, and finally runs a burning test. Cells that fail to burn form a
//! set that can be untoppled once without breaking the bound, so the loop
//! repeats until everything burns. The answer is exact whatever the guess;
//! the guess only decides how much work is left.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use super::grid::DenseGrid;

// Piles up to this size are toppled from zero.
const BASE_CASE: u64 = 4096;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Stable configuration and total topplings for `grains` at the origin.
pub fn stabilize_grid4(grains: u64) -> (DenseGrid, u64) {
    let sol = solve(grains as i64);
    let oct = sol.oct;
    let c = chips(grains as i64, oct, &sol.u);
    let mut topplings = 0u64;
    for (x, y, k) in oct.cells() {
        topplings += sol.u[k] as u64 * orbit_size(x, y);
    }
    // one spare ring so the pattern sits strictly inside
    let r = oct.r + 1;
    let side = (2 * r + 1) as usize;
    let mut cells = vec![0u64; side * side];
    for y in -oct.r..=oct.r {
        for x in -oct.r..=oct.r {
            let (a, b) = canon(x, y);
            cells[((y + r) as usize) * side + (x + r) as usize] = c[oct.idx(a, b)] as u64;
        }
    }
    (DenseGrid::from_cells(r as usize, cells), topplings)
}
/// Potential kernel `a(x)` of the square lattice, `a(0) = 0`, `a(1, 0) = 1`.
/// Near the origin it is integrated numerically, further out the asymptotic
/// expansion is accurate to well below 1e-6.
pub fn potential_kernel(x1: i64, x2: i64) -> f64 {
    let (x1, x2) = (x1.abs().max(x2.abs()), x1.abs().min(x2.abs()));
    if x1 == 0 && x2 == 0 {
        return 0.0;
    }
    if x1.max(x2) <= 24 {
        return kernel_integral(x1 as f64, x2 as f64);
    }
    let r2 = (x1 * x1 + x2 * x2) as f64;
    let kappa = (2.0 * EULER_GAMMA + 8f64.ln()) / PI;
    let theta = (x2 as f64).atan2(x1 as f64);
    r2.ln() / PI + kappa - (4.0 * theta).cos() / (6.0 * PI * r2)
}

// (2 / pi) * int_0^pi (1 - e^{-|x1| b} cos(x2 p)) / sinh b dp, cosh b = 2 - cos p
fn kernel_integral(x1: f64, x2: f64) -> f64 {
    let m = 4000;
    let h = PI / m as f64;
    let f = |p: f64| -> f64 {
        if p == 0.0 {
            return x1;
        }
        let b = (2.0 - p.cos()).acosh();
        (1.0 - (-x1 * b).exp() * (x2 * p).cos()) / b.sinh()
    };
    let mut s = f(0.0) + f(PI);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    2.0 / PI * s * h / 3.0
}

fn canon(x: i64, y: i64) -> (i64, i64) {
    let (x, y) = (x.abs(), y.abs());
    (x.max(y), x.min(y))
}

fn orbit_size(x: i64, y: i64) -> u64 {
    match (x, y) {
        (0, 0) => 1,
        _ if y == 0 || y == x => 4,
        _ => 8,
    }
}

/// The octant `0 <= y <= x <= r`, stored in an `(r + 1)^2` array.
#[derive(Debug, Clone, Copy)]
struct Octant {
    r: i64,
    w: usize,
}

impl Octant {
    fn new(r: i64) -> Self {
        Octant { r, w: (r + 1) as usize }
    }

    fn len(&self) -> usize {
        self.w * self.w
    }

    fn idx(&self, x: i64, y: i64) -> usize {
        y as usize * self.w + x as usize
    }

    fn cells(self) -> impl Iterator<Item = (i64, i64, usize)> {
        (0..=self.r).flat_map(move |y| (y..=self.r).map(move |x| (x, y, self.idx(x, y))))
    }

    fn is_edge(&self, k: usize) -> bool {
        k % self.w + 1 == self.w
    }

    /// Value of `v` at any lattice point, 0 outside the box.
    fn get(&self, v: &[i64], x: i64, y: i64) -> i64 {
        let (x, y) = canon(x, y);
        if x > self.r {
            0
        } else {
            v[self.idx(x, y)]
        }
    }

    /// Calls `f(j, m)` for every octant cell `j` that gains `m` chips when
    /// the orbit of `k` topples once. `k` must not be on the edge.
    #[inline]
    fn push(&self, k: usize, mut f: impl FnMut(usize, i64)) {
        let w = self.w;
        let (x, y) = ((k % w) as i64, (k / w) as i64);
        if y >= 2 && y + 2 <= x {
            f(k - 1, 1);
            f(k + 1, 1);
            f(k - w, 1);
            f(k + w, 1);
            return;
        }
        let mut seen: [(i64, i64); 4] = [(-1, -1); 4];
        for (i, (a, b)) in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)].into_iter().enumerate() {
            let (a, b) = canon(a, b);
            if seen[..i].contains(&(a, b)) {
                continue;
            }
            seen[i] = (a, b);
            let m = [(a + 1, b), (a - 1, b), (a, b + 1), (a, b - 1)]
                .into_iter()
                .filter(|&(p, q)| canon(p, q) == (x, y))
                .count() as i64;
            f(self.idx(a, b), m);
        }
    }
}

struct Solution {
    oct: Octant,
    u: Vec<i64>,
    // uncorrected guess minus the answer, on the support of `u`
    raw_err: Vec<f64>,
}

// n delta_0 + lap(u) on the octant
fn chips(n: i64, oct: Octant, u: &[i64]) -> Vec<i64> {
    let mut c = vec![0i64; oct.len()];
    for (x, y, k) in oct.cells() {
        let s = oct.get(u, x + 1, y) + oct.get(u, x - 1, y) + oct.get(u, x, y + 1) + oct.get(u, x, y - 1);
        c[k] = s - 4 * u[k];
    }
    c[0] += n;
    c
}

/// Topples every cell holding 4 or more until none does; `None` if a cell on
/// the box edge would topple.
fn raise(oct: Octant, u: &mut [i64], c: &mut [i64]) -> Option<()> {
    let mut queued = vec![false; oct.len()];
    let mut queue = VecDeque::new();
    for (_, _, k) in oct.cells() {
        if c[k] >= 4 {
            queued[k] = true;
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        queued[k] = false;
        if c[k] < 4 {
            continue;
        }
        if oct.is_edge(k) {
            return None;
        }
        let times = c[k] / 4;
        u[k] += times;
        c[k] -= 4 * times;
        oct.push(k, |j, m| {
            c[j] += m * times;
            if c[j] >= 4 && !queued[j] {
                queued[j] = true;
                queue.push_back(j);
            }
        });
    }
    Some(())
}

/// Untopples every cell of the support holding a negative count. No cell
/// goes above 3, so the result never drops below the least solution.
fn lower(oct: Octant, u: &mut [i64], c: &mut [i64]) {
    let mut queued = vec![false; oct.len()];
    let mut queue = VecDeque::new();
    for (_, _, k) in oct.cells() {
        if c[k] < 0 && u[k] > 0 {
            queued[k] = true;
            queue.push_back(k);
        }
    }
    while let Some(k) = queue.pop_front() {
        queued[k] = false;
        if c[k] >= 0 || u[k] == 0 {
            continue;
        }
        let times = ((3 - c[k]) / 4).min(u[k]);
        u[k] -= times;
        c[k] += 4 * times;
        oct.push(k, |j, m| {
            c[j] -= m * times;
            if c[j] < 0 && u[j] > 0 && !queued[j] {
                queued[j] = true;
                queue.push_back(j);
            }
        });
    }
}

/// Burning test on the support of `u`: a cell burns once its chips cover its
/// unburnt neighbors. Returns the cells that never burn. When none are left
/// no nonzero `0 <= w <= u` can be removed from `u`, so `u` is the least
/// solution; otherwise untoppling the unburnt set once keeps every cell
/// within `0..=3`.
fn unburnt(oct: Octant, u: &[i64], c: &[i64]) -> Vec<usize> {
    let mut burnt: Vec<bool> = u.iter().map(|&x| x <= 0).collect();
    let mut unburnt_nbrs = vec![0i64; oct.len()];
    let mut stack = Vec::new();
    for (x, y, k) in oct.cells() {
        if burnt[k] {
            continue;
        }
        let n = [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
            .into_iter()
            .filter(|&(a, b)| oct.get(u, a, b) > 0)
            .count() as i64;
        unburnt_nbrs[k] = n;
        if c[k] >= n {
            stack.push(k);
        }
    }
    while let Some(k) = stack.pop() {
        if burnt[k] {
            continue;
        }
        burnt[k] = true;
        oct.push(k, |j, m| {
            if !burnt[j] {
                unburnt_nbrs[j] -= m;
                if c[j] >= unburnt_nbrs[j] {
                    stack.push(j);
                }
            }
        });
    }
    oct.cells().filter(|&(_, _, k)| !burnt[k]).map(|(_, _, k)| k).collect()
}

fn initial_radius(n: i64) -> i64 {
    // the stable disc holds a little over 2 grains per cell
    ((n as f64 / 6.5).sqrt() as i64) + 4
}

fn solve(n: i64) -> Solution {
    let mut oct = Octant::new(initial_radius(n));
    if n as u64 <= BASE_CASE {
        loop {
            let mut u = vec![0; oct.len()];
            let mut c = chips(n, oct, &u);
            if raise(oct, &mut u, &mut c).is_some() {
                let raw_err = vec![0.0; u.len()];
                return Solution { oct, u, raw_err };
            }
            oct = Octant::new(oct.r + oct.r / 4 + 2);
        }
    }
    let small = solve(n / 4);
    let mut kernel: HashMap<(i64, i64), f64> = HashMap::new();
    let mut a = |x: i64, y: i64| -> f64 {
        let key = canon(x, y);
        *kernel.entry(key).or_insert_with(|| potential_kernel(key.0, key.1))
    };
    loop {
        let (raw, guess) = scaled_guess(n, oct, &small, &mut a);
        let mut u: Vec<i64> = guess.iter().map(|&g| g.round() as i64).collect();
        let on_edge = oct.cells().any(|(_, _, k)| oct.is_edge(k) && u[k] > 0);
        let mut c = chips(n, oct, &u);
        if !on_edge && raise(oct, &mut u, &mut c).is_some() {
            lower(oct, &mut u, &mut c);
            loop {
                let rest = unburnt(oct, &u, &c);
                if rest.is_empty() {
                    break;
                }
                for &k in &rest {
                    u[k] -= 1;
                    c[k] += 4;
                    oct.push(k, |j, m| c[j] -= m);
                }
                lower(oct, &mut u, &mut c);
            }
            let raw_err = u.iter().zip(&raw).map(|(&x, &g)| if x > 0 { g - x as f64 } else { 0.0 }).collect();
            return Solution { oct, u, raw_err };
        }
        oct = Octant::new(oct.r + oct.r / 4 + 2);
    }
}

// u_n(x) ~ 4 R(x / 2) - (n / 4) a(x) + (n / 4)(2 / pi) ln 2, where
// R = u_{n/4} + (n / 16) a is smooth; odd coordinates average the nearest
// coarse points, and a coarse point with no topplings pins the guess to 0.
//
// The error of this raw guess is close to four times the raw error one level
// down at x / 2, so the second vector subtracts that.
fn scaled_guess(
    n: i64,
    oct: Octant,
    small: &Solution,
    a: &mut impl FnMut(i64, i64) -> f64,
) -> (Vec<f64>, Vec<f64>) {
    let so = small.oct;
    let nf = n as f64;
    let quarter = (n / 4) as f64;
    let shift = quarter * (2.0 / PI) * 2f64.ln();
    let mut g = vec![0.0; oct.len()];
    let mut corrected = vec![0.0; oct.len()];
    for (x, y, k) in oct.cells() {
        let (x0, y0) = (x.div_euclid(2), y.div_euclid(2));
        let pts: &[(i64, i64)] = match (x.rem_euclid(2), y.rem_euclid(2)) {
            (0, 0) => &[(0, 0)],
            (1, 0) => &[(0, 0), (1, 0)],
            (0, 1) => &[(0, 0), (0, 1)],
            _ => &[(0, 0), (1, 0), (0, 1), (1, 1)],
        };
        let mut smooth = 0.0;
        let mut err = 0.0;
        let mut pinned = false;
        for &(dx, dy) in pts {
            let (p, q) = canon(x0 + dx, y0 + dy);
            let (u, e) = if p <= so.r { (small.u[so.idx(p, q)], small.raw_err[so.idx(p, q)]) } else { (0, 0.0) };
            pinned |= u == 0;
            smooth += u as f64 + quarter / 4.0 * a(p, q);
            err += e;
        }
        smooth /= pts.len() as f64;
        err /= pts.len() as f64;
        let v = if pinned { 0.0 } else { 4.0 * smooth - nf / 4.0 * a(x, y) + shift };
        g[k] = v.max(0.0);
        corrected[k] = if pinned { 0.0 } else { (v - 4.0 * err).max(0.0) };
    }
    (g, corrected)
}
