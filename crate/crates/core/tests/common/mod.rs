//! Reference computations that share no code with the library.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use clocklat::diagram::StarPair;
use clocklat::{PlaneGraph, Universe};

/// Ring sum for the odd grid, written out independently.
pub fn ring_sum(m: usize, n: usize) -> usize {
    let mut total = 0;
    let (mut a, mut b) = (m as isize, n as isize);
    while a > 0 && b > 0 {
        total += (a * b) as usize;
        a -= 2;
        b -= 2;
    }
    total
}

/// Domino tilings of an `rows` by `cols` board. Each cell stores the index of
/// the cell it is paired with.
fn tilings(rows: usize, cols: usize) -> Vec<Vec<u16>> {
    fn go(rows: usize, cols: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        let Some(i) = cur.iter().position(|&p| p == u16::MAX) else {
            out.push(cur.clone());
            return;
        };
        let (r, c) = (i / cols, i % cols);
        if c + 1 < cols && cur[i + 1] == u16::MAX {
            cur[i] = (i + 1) as u16;
            cur[i + 1] = i as u16;
            go(rows, cols, cur, out);
            cur[i] = u16::MAX;
            cur[i + 1] = u16::MAX;
        }
        if r + 1 < rows {
            let j = i + cols;
            cur[i] = j as u16;
            cur[j] = i as u16;
            go(rows, cols, cur, out);
            cur[i] = u16::MAX;
            cur[j] = u16::MAX;
        }
    }
    let mut out = Vec::new();
    go(rows, cols, &mut vec![u16::MAX; rows * cols], &mut out);
    out
}

/// State count and flip-graph diameter of the `m` by `n` square grid, seen as
/// domino tilings of the `(m+1)` by `(n+1)` board of lattice points.
pub fn grid_oracle(m: usize, n: usize) -> (usize, usize) {
    let (rows, cols) = (m + 1, n + 1);
    let all = tilings(rows, cols);
    let index: HashMap<&Vec<u16>, usize> = all.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let mut adj = vec![Vec::new(); all.len()];
    for (i, t) in all.iter().enumerate() {
        for r in 0..rows - 1 {
            for c in 0..cols - 1 {
                let (a, b, d, e) = (r * cols + c, r * cols + c + 1, (r + 1) * cols + c, (r + 1) * cols + c + 1);
                let mut s = t.clone();
                if t[a] as usize == b && t[d] as usize == e {
                    s[a] = d as u16;
                    s[d] = a as u16;
                    s[b] = e as u16;
                    s[e] = b as u16;
                } else if t[a] as usize == d && t[b] as usize == e {
                    s[a] = b as u16;
                    s[b] = a as u16;
                    s[d] = e as u16;
                    s[e] = d as u16;
                } else {
                    continue;
                }
                adj[i].push(index[&s]);
            }
        }
    }
    let mut diameter = 0;
    let mut dist = vec![usize::MAX; all.len()];
    for src in 0..all.len() {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(v) = q.pop_front() {
            diameter = diameter.max(dist[v]);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
    }
    (all.len(), diameter)
}

/// Spanning trees by floating-point elimination on the reduced Laplacian.
pub fn tree_count_float(n: usize, edges: &[[usize; 2]]) -> u64 {
    if n <= 1 {
        return 1;
    }
    let k = n - 1;
    let mut a = vec![vec![0.0f64; k]; k];
    for &[u, v] in edges {
        if u == v {
            continue;
        }
        for (x, y) in [(u, v), (v, u)] {
            if x > 0 {
                a[x - 1][x - 1] += 1.0;
                if y > 0 {
                    a[x - 1][y - 1] -= 1.0;
                }
            }
        }
    }
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[pivot][col].abs() < 1e-9 {
            return 0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det.round() as u64
}

/// Perfect matchings by dynamic programming over subsets of white vertices.
pub fn matching_count_dp(g: &PlaneGraph) -> u64 {
    let (nb, nw) = (g.num_black(), g.num_white());
    assert!(nw <= 24 && nb == nw);
    let mut nbrs = vec![0u32; nb];
    for e in 0..g.num_edges() {
        let [b, w] = g.ends(e);
        nbrs[b] |= 1 << (w - nb);
    }
    let mut dp = vec![0u64; 1 << nw];
    dp[0] = 1;
    for mask in 0u32..(1 << nw) {
        let ways = dp[mask as usize];
        if ways == 0 {
            continue;
        }
        let b = mask.count_ones() as usize;
        if b == nb {
            continue;
        }
        let mut free = nbrs[b] & !mask;
        while free != 0 {
            let bit = free & free.wrapping_neg();
            dp[(mask | bit) as usize] += ways;
            free ^= bit;
        }
    }
    dp[(1usize << nw) - 1]
}

/// Renames crossings by `perm` and rotates each crossing's slots by `turn`,
/// carrying the star pair along.
pub fn relabel(u: &Universe, perm: &[usize], turn: &[usize]) -> Universe {
    let n = u.num_crossings();
    let image = |d: usize| 4 * perm[d / 4] + (d % 4 + turn[d / 4]) % 4;
    let mut mate = vec![0; 4 * n];
    for d in 0..4 * n {
        mate[image(d)] = image(u.mate(d));
    }
    let v = Universe::from_pairing(mate).unwrap();
    let stars = u.stars();
    let moved = |f: usize| v.face_of(image(u.faces()[f].boundary[0]));
    let moved = StarPair { first: moved(stars.first), second: moved(stars.second) };
    v.with_stars(moved).unwrap()
}

/// Every unordered pair of faces sharing an edge.
pub fn adjacent_pairs(u: &Universe) -> Vec<StarPair> {
    let nf = u.faces().len();
    let mut out = Vec::new();
    for i in 0..nf {
        for j in i + 1..nf {
            if u.faces_adjacent(i, j) {
                out.push(StarPair { first: i, second: j });
            }
        }
    }
    out
}
