//! Perfect matchings of a balanced graph, allowed edges, elementarity,
//! resonance and the spanning-tree oracle.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::plane::PlaneGraph;
use crate::tait::{BalancedGraph, TaitGraph};

pub const DEFAULT_CAP: usize = 100_000;

/// A perfect matching, stored as the matched edge of every black vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    pub edges: Vec<u32>,
}

impl Matching {
    pub fn from_edges(edges: Vec<usize>) -> Self {
        Matching { edges: edges.into_iter().map(|e| e as u32).collect() }
    }

    pub fn edge(&self, black: usize) -> usize {
        self.edges[black] as usize
    }

    pub fn contains(&self, g: &PlaneGraph, e: usize) -> bool {
        self.edge(g.ends(e)[0]) == e
    }

    /// Matched white vertex (global id) of a black vertex.
    pub fn partner(&self, g: &PlaneGraph, black: usize) -> usize {
        g.ends(self.edge(black))[1]
    }

    /// `[black, white]` pairs with whites numbered among whites.
    pub fn pairs(&self, g: &PlaneGraph) -> Vec<[usize; 2]> {
        (0..self.edges.len()).map(|b| [b, self.partner(g, b) - g.num_black()]).collect()
    }

    /// Checks that every vertex is covered exactly once by edges of `g`.
    pub fn is_perfect(&self, g: &PlaneGraph) -> bool {
        if self.edges.len() != g.num_black() || g.num_black() != g.num_white() {
            return false;
        }
        let mut used = vec![false; g.num_white()];
        self.edges.iter().enumerate().all(|(b, &e)| {
            let e = e as usize;
            if e >= g.num_edges() || g.ends(e)[0] != b {
                return false;
            }
            let w = g.ends(e)[1] - g.num_black();
            !std::mem::replace(&mut used[w], true)
        })
    }
}

/// Edges of each black vertex ordered by (white, edge id).
fn black_choices(g: &PlaneGraph) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); g.num_black()];
    for e in 0..g.num_edges() {
        out[g.ends(e)[0]].push(e);
    }
    for list in &mut out {
        list.sort_by_key(|&e| (g.ends(e)[1], e));
    }
    out
}

/// All perfect matchings in canonical order (lexicographic in the partner of
/// black 0, then black 1, ...). Fails with `CapExceeded` past `cap` results.
pub fn enumerate_matchings(b: &BalancedGraph, cap: usize) -> Result<Vec<Matching>> {
    enumerate_graph(b.graph(), cap)
}

pub fn enumerate_graph(g: &PlaneGraph, cap: usize) -> Result<Vec<Matching>> {
    let nb = g.num_black();
    if nb != g.num_white() {
        return Ok(Vec::new());
    }
    let choices = black_choices(g);
    let mut white_edges: Vec<Vec<usize>> = vec![Vec::new(); g.num_white()];
    for e in 0..g.num_edges() {
        white_edges[g.ends(e)[1] - nb].push(e);
    }
    let mut search = Search {
        g,
        choices: &choices,
        white_edges: &white_edges,
        white_used: vec![false; nb],
        current: Vec::with_capacity(nb),
        out: Vec::new(),
        cap,
    };
    search.run(0)?;
    Ok(search.out)
}

struct Search<'a> {
    g: &'a PlaneGraph,
    choices: &'a [Vec<usize>],
    white_edges: &'a [Vec<usize>],
    white_used: Vec<bool>,
    current: Vec<u32>,
    out: Vec<Matching>,
    cap: usize,
}

impl Search<'_> {
    fn white(&self, e: usize) -> usize {
        self.g.ends(e)[1] - self.g.num_black()
    }

    /// Every remaining black still has a free partner and every free white
    /// still has a remaining black.
    fn feasible(&self, next: usize) -> bool {
        let nb = self.g.num_black();
        let blacks_ok = (next..nb).all(|v| self.choices[v].iter().any(|&e| !self.white_used[self.white(e)]));
        blacks_ok
            && (0..nb).all(|w| self.white_used[w] || self.white_edges[w].iter().any(|&e| self.g.ends(e)[0] >= next))
    }

    fn run(&mut self, v: usize) -> Result<()> {
        if v == self.g.num_black() {
            if self.out.len() == self.cap {
                return Err(Error::CapExceeded(self.cap));
            }
            self.out.push(Matching { edges: self.current.clone() });
            return Ok(());
        }
        for i in 0..self.choices[v].len() {
            let e = self.choices[v][i];
            let w = self.white(e);
            if self.white_used[w] {
                continue;
            }
            self.white_used[w] = true;
            self.current.push(e as u32);
            if self.feasible(v + 1) {
                self.run(v + 1)?;
            }
            self.current.pop();
            self.white_used[w] = false;
        }
        Ok(())
    }
}

/// Some perfect matching, by augmenting paths; `None` if there is none.
pub fn find_perfect_matching(g: &PlaneGraph) -> Option<Matching> {
    let nb = g.num_black();
    if nb != g.num_white() {
        return None;
    }
    let choices = black_choices(g);
    let mut white_match: Vec<Option<usize>> = vec![None; nb];

    fn augment(
        v: usize,
        g: &PlaneGraph,
        choices: &[Vec<usize>],
        seen: &mut [bool],
        white_match: &mut [Option<usize>],
    ) -> bool {
        for &e in &choices[v] {
            let w = g.ends(e)[1] - g.num_black();
            if seen[w] {
                continue;
            }
            seen[w] = true;
            let free = match white_match[w] {
                None => true,
                Some(f) => augment(g.ends(f)[0], g, choices, seen, white_match),
            };
            if free {
                white_match[w] = Some(e);
                return true;
            }
        }
        false
    }

    for v in 0..nb {
        let mut seen = vec![false; nb];
        if !augment(v, g, &choices, &mut seen, &mut white_match) {
            return None;
        }
    }
    let mut edges = vec![0u32; nb];
    for e in white_match.into_iter().flatten() {
        edges[g.ends(e)[0]] = e as u32;
    }
    Some(Matching { edges })
}

/// Matrix-tree count of spanning trees (loops ignored), exact.
pub fn count_spanning_trees(g: &TaitGraph) -> BigUint {
    spanning_tree_count(g.num_vertices(), &g.edges)
}

pub fn spanning_tree_count(n: usize, edges: &[[usize; 2]]) -> BigUint {
    if n <= 1 {
        return BigUint::one();
    }
    let m = n - 1;
    let mut lap = vec![vec![BigInt::zero(); m]; m];
    for &[a, b] in edges {
        if a == b {
            continue;
        }
        if a < m {
            lap[a][a] += 1;
        }
        if b < m {
            lap[b][b] += 1;
        }
        if a < m && b < m {
            lap[a][b] -= 1;
            lap[b][a] -= 1;
        }
    }
    bareiss_determinant(lap).to_biguint().expect("Laplacian minors are nonnegative")
}

/// Fraction-free Gaussian elimination.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &a[n - 1][n - 1]
    }
}

/// Per-edge allowed/forbidden flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeStatus {
    pub allowed: Vec<bool>,
}

impl EdgeStatus {
    pub fn forbidden(&self) -> Vec<usize> {
        (0..self.allowed.len()).filter(|&e| !self.allowed[e]).collect()
    }

    pub fn all_allowed(&self) -> bool {
        self.allowed.iter().all(|&a| a)
    }
}

pub fn edge_status(b: &BalancedGraph, ms: &[Matching]) -> EdgeStatus {
    let mut allowed = vec![false; b.num_edges()];
    for m in ms {
        for &e in &m.edges {
            allowed[e as usize] = true;
        }
    }
    EdgeStatus { allowed }
}

/// Allowed edges without enumeration: an edge outside a fixed perfect
/// matching is allowed iff it lies on an alternating cycle, i.e. its ends share
/// a strongly connected component of the matching digraph.
pub fn allowed_edges_by_scc(g: &PlaneGraph) -> Option<EdgeStatus> {
    let m = find_perfect_matching(g)?;
    let nv = g.num_vertices();
    // black -> white along non-matching edges, white -> black along matching edges
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for e in 0..g.num_edges() {
        let [bl, wh] = g.ends(e);
        if m.edge(bl) == e {
            adj[wh].push(bl);
        } else {
            adj[bl].push(wh);
        }
    }
    let comp = strongly_connected(&adj);
    let allowed = (0..g.num_edges())
        .map(|e| {
            let [bl, wh] = g.ends(e);
            m.edge(bl) == e || comp[bl] == comp[wh]
        })
        .collect();
    Some(EdgeStatus { allowed })
}

/// Iterative Tarjan; returns a component id per vertex.
pub(crate) fn strongly_connected(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for s in 0..n {
        if index[s] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(s, 0)];
        index[s] = next_index;
        low[s] = next_index;
        next_index += 1;
        stack.push(s);
        on_stack[s] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("vertex on stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// True iff the allowed edges form a connected spanning subgraph.
pub fn is_elementary(b: &BalancedGraph, ms: &[Matching]) -> bool {
    allowed_subgraph_connected(b.graph(), &edge_status(b, ms))
}

pub fn allowed_subgraph_connected(g: &PlaneGraph, status: &EdgeStatus) -> bool {
    let keep = vec![true; g.num_vertices()];
    let comps = g.components(&keep, &status.allowed);
    comps.len() == 1 && comps[0].len() == g.num_vertices()
}

/// Whether matching `m` alternates along the boundary walk of `face`.
pub fn alternates_on(g: &PlaneGraph, boundary: &[usize], m: &Matching) -> bool {
    if boundary.len() % 2 == 1 {
        return false;
    }
    let in_m = |h: usize| m.contains(g, h >> 1);
    (0..2).any(|parity| {
        boundary.iter().enumerate().all(|(i, &h)| in_m(h) == (i % 2 == parity))
    })
}

/// True iff some matching alternates on the boundary of `face` (bounded or
/// the infinite face).
pub fn is_resonant(b: &BalancedGraph, face: usize, ms: &[Matching]) -> bool {
    let boundary = &b.faces().cycles[face];
    ms.iter().any(|m| alternates_on(b.graph(), boundary, m))
}

/// Vertices `v` for which `G - v` has more than one odd component (single
/// vertex Tutte violations).
pub fn tutte_single_vertex_violations(g: &PlaneGraph) -> Vec<(usize, usize)> {
    let all = vec![true; g.num_edges()];
    (0..g.num_vertices())
        .filter_map(|v| {
            let mut keep = vec![true; g.num_vertices()];
            keep[v] = false;
            let odd = g.components(&keep, &all).iter().filter(|c| c.len() % 2 == 1).count();
            (odd > 1).then_some((v, odd))
        })
        .collect()
}
