#![allow(dead_code)]

use evosand::{Schedule, StageGraph, VertexId};
use rand::Rng;

/// Undirected edges `(u, v, multiplicity)` with `u < v`.
pub type Edges = Vec<(usize, usize, u32)>;

/// Laplacian written out from an edge list, without going through
/// `StageGraph`.
pub fn laplacian_of(n: usize, edges: &Edges) -> Vec<Vec<i64>> {
    let mut l = vec![vec![0i64; n]; n];
    for &(u, v, m) in edges {
        let m = i64::from(m);
        l[u][v] -= m;
        l[v][u] -= m;
        l[u][u] += m;
        l[v][v] += m;
    }
    l
}

/// `c - sum of rows u` for `u` in `unstable` on non-sink entries; the sink
/// entry is left alone.
pub fn linear_round(c: &[u64], l: &[Vec<i64>], sink: Option<usize>) -> (Vec<u64>, Vec<usize>) {
    let n = c.len();
    let unstable: Vec<usize> =
        (0..n).filter(|&v| Some(v) != sink && c[v] as i64 >= l[v][v]).collect();
    let mut next: Vec<i64> = c.iter().map(|&x| x as i64).collect();
    for &u in &unstable {
        for v in 0..n {
            if Some(v) != sink {
                next[v] -= l[u][v];
            }
        }
    }
    (next.into_iter().map(|x| u64::try_from(x).expect("grains stay non-negative")).collect(), unstable)
}

/// Calls `f` on every ordering of `items` (Heap's algorithm).
pub fn for_each_permutation(items: &[usize], mut f: impl FnMut(&[usize])) {
    let mut a = items.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub fn random_edges<R: Rng>(rng: &mut R, n: usize, max_mult: u32) -> Edges {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let m = rng.random_range(0..=max_mult);
            if m > 0 {
                edges.push((u, v, m));
            }
        }
    }
    edges
}

pub fn stage(n: usize, sink: Option<VertexId>, edges: &Edges) -> StageGraph {
    StageGraph::from_edges(n, sink, edges)
}

pub fn schedule(n: usize, sink: Option<VertexId>, stages: &[Edges]) -> Schedule {
    Schedule::new(stages.iter().map(|e| stage(n, sink, e)).collect()).unwrap()
}

/// Rows of a picture, top row first, as a map from cell to value. Rows are
/// written with `|` between them and `,` between values; the picture is
/// centred on the origin.
pub fn picture(text: &str) -> Vec<((i64, i64), u64)> {
    let rows: Vec<Vec<u64>> = text
        .split('|')
        .map(|r| r.split(',').map(|x| x.trim().parse().unwrap()).collect())
        .collect();
    let h = rows.len() as i64;
    let mut out = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let w = row.len() as i64;
        for (m, &v) in row.iter().enumerate() {
            let (i, j) = (m as i64 - w / 2, h / 2 - k as i64);
            if v != 0 {
                out.push(((i, j), v));
            }
        }
    }
    out
}
