//! Flip graph of perfect matchings, the clock orientation, height and
//! diameter.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matchings::{find_perfect_matching, Matching};
use crate::plane::PlaneGraph;
use crate::tait::BalancedGraph;

pub const DEFAULT_ALL_PAIRS_BOUND: usize = 20_000;
pub const LATTICE_CHECK_BOUND: usize = 2_000;

/// Which matching of a flipped square is the tail of the clock move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Convention {
    /// Tail uses the square's edges that run white to black counterclockwise.
    #[default]
    Counterclockwise,
    /// Mirror image of the above.
    Clockwise,
}

impl Convention {
    pub fn reversed(self) -> Self {
        match self {
            Convention::Counterclockwise => Convention::Clockwise,
            Convention::Clockwise => Convention::Counterclockwise,
        }
    }

    /// Parity of the half-edges of a counterclockwise square boundary that the
    /// tail matching uses: odd half-edges run white to black.
    fn tail_parity(self) -> usize {
        match self {
            Convention::Counterclockwise => 1,
            Convention::Clockwise => 0,
        }
    }
}

/// A flip between two matchings across one bounded face. `ccw_tail` holds the
/// face edges that run white to black counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FlipEdge {
    pub ccw_tail: usize,
    pub ccw_head: usize,
    pub face: usize,
}

#[derive(Debug, Clone)]
pub struct FlipGraph {
    pub nodes: Vec<Matching>,
    pub edges: Vec<FlipEdge>,
    /// Per node: (neighbor, edge id).
    pub adj: Vec<Vec<(usize, usize)>>,
}

impl FlipGraph {
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn bfs(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.nodes.len()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.nodes.is_empty() || self.bfs(0).iter().all(|&d| d != usize::MAX)
    }
}

/// `Some(true)` if `m` alternates on the square with the odd (white to black)
/// half-edges matched, `Some(false)` for the even ones, `None` otherwise.
fn square_parity(g: &PlaneGraph, boundary: &[usize], m: &Matching) -> Option<bool> {
    let first = m.contains(g, boundary[0] >> 1);
    let odd_matched = (boundary[0] & 1 == 1) == first;
    let ok = boundary.iter().all(|&h| m.contains(g, h >> 1) == ((h & 1 == 1) == odd_matched));
    ok.then_some(odd_matched)
}

/// Exchanges the matched and unmatched edges of a square `m` alternates on.
pub fn flip(g: &PlaneGraph, boundary: &[usize], m: &Matching) -> Matching {
    let mut out = m.clone();
    for &h in boundary {
        let e = h >> 1;
        if !m.contains(g, e) {
            out.edges[g.ends(e)[0]] = e as u32;
        }
    }
    out
}

/// Flip graph on the given complete list of matchings.
pub fn build_flip_graph(b: &BalancedGraph, ms: &[Matching]) -> FlipGraph {
    let g = b.graph();
    let index: HashMap<&Matching, usize> = ms.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let per_node: Vec<Vec<FlipEdge>> = ms
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            b.squares()
                .iter()
                .filter_map(|&f| {
                    let boundary = b.square_boundary(f);
                    match square_parity(g, boundary, m) {
                        Some(true) => {
                            let j = *index.get(&flip(g, boundary, m)).expect("matching list is complete");
                            Some(FlipEdge { ccw_tail: i, ccw_head: j, face: f })
                        }
                        _ => None,
                    }
                })
                .collect()
        })
        .collect();
    let edges: Vec<FlipEdge> = per_node.into_iter().flatten().collect();
    let mut adj = vec![Vec::new(); ms.len()];
    for (id, e) in edges.iter().enumerate() {
        adj[e.ccw_tail].push((e.ccw_head, id));
        adj[e.ccw_head].push((e.ccw_tail, id));
    }
    FlipGraph { nodes: ms.to_vec(), edges, adj }
}

/// The flip graph with every edge directed by a convention.
#[derive(Debug, Clone)]
pub struct ClockDag {
    pub base: FlipGraph,
    pub convention: Convention,
    /// Per edge: whether it runs from `ccw_tail` to `ccw_head`.
    pub forward: Vec<bool>,
    pub zero_hat: usize,
    pub one_hat: usize,
}

impl ClockDag {
    pub fn tail(&self, e: usize) -> usize {
        let fe = &self.base.edges[e];
        if self.forward[e] {
            fe.ccw_tail
        } else {
            fe.ccw_head
        }
    }

    pub fn head(&self, e: usize) -> usize {
        let fe = &self.base.edges[e];
        if self.forward[e] {
            fe.ccw_head
        } else {
            fe.ccw_tail
        }
    }

    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.base.num_nodes()];
        for e in 0..self.forward.len() {
            out[self.tail(e)].push(e);
        }
        out
    }

    pub fn zero_hat_matching(&self) -> &Matching {
        &self.base.nodes[self.zero_hat]
    }

    pub fn one_hat_matching(&self) -> &Matching {
        &self.base.nodes[self.one_hat]
    }
}

pub fn orient_clock(fg: FlipGraph, convention: Convention) -> Result<ClockDag> {
    let forward = vec![convention == Convention::Counterclockwise; fg.edges.len()];
    let mut dag = ClockDag { base: fg, convention, forward, zero_hat: 0, one_hat: 0 };
    let report = verify_clock_theorem(&dag);
    if !report.passes() {
        return Err(Error::ClockTheoremViolation(report.describe()));
    }
    dag.zero_hat = report.sources[0];
    dag.one_hat = report.sinks[0];
    Ok(dag)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClockReport {
    pub acyclic: bool,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    /// Nodes not reachable by directed paths from the first source.
    pub unreachable: usize,
    /// Edges whose direction contradicts the convention.
    pub misoriented: Vec<usize>,
}

impl ClockReport {
    pub fn passes(&self) -> bool {
        self.acyclic
            && self.sources.len() == 1
            && self.sinks.len() == 1
            && self.unreachable == 0
            && self.misoriented.is_empty()
    }

    pub fn describe(&self) -> String {
        format!(
            "acyclic={} sources={:?} sinks={:?} unreachable={} misoriented={:?}",
            self.acyclic, self.sources, self.sinks, self.unreachable, self.misoriented
        )
    }
}

/// Checks acyclicity, a unique source and sink, and reachability from the
/// source; never fails, the report records what does not hold.
pub fn verify_clock_theorem(cd: &ClockDag) -> ClockReport {
    let n = cd.base.num_nodes();
    let out = cd.out_edges();
    let mut indeg = vec![0usize; n];
    for e in 0..cd.forward.len() {
        indeg[cd.head(e)] += 1;
    }
    let sources: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let sinks: Vec<usize> = (0..n).filter(|&v| out[v].is_empty()).collect();

    let mut remaining = indeg.clone();
    let mut queue: VecDeque<usize> = sources.iter().copied().collect();
    let mut visited = 0;
    while let Some(v) = queue.pop_front() {
        visited += 1;
        for &e in &out[v] {
            let w = cd.head(e);
            remaining[w] -= 1;
            if remaining[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    let acyclic = visited == n;

    let unreachable = match sources.first() {
        Some(&s) => {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &e in &out[v] {
                    let w = cd.head(e);
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.iter().filter(|&&x| !x).count()
        }
        None => n,
    };
    let expected = cd.convention == Convention::Counterclockwise;
    let misoriented = (0..cd.forward.len()).filter(|&e| cd.forward[e] != expected).collect();
    ClockReport { acyclic, sources, sinks, unreachable, misoriented }
}

/// Re-derives every edge direction from the embedding: the tail must alternate
/// on the edge's face with the convention's parity. Returns offending edges.
pub fn audit_orientation(cd: &ClockDag, b: &BalancedGraph) -> Vec<usize> {
    let g = b.graph();
    let want = cd.convention.tail_parity() == 1;
    (0..cd.forward.len())
        .filter(|&e| {
            let boundary = b.square_boundary(cd.base.edges[e].face);
            square_parity(g, boundary, &cd.base.nodes[cd.tail(e)]) != Some(want)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Height {
    pub height: usize,
    pub clock_number: usize,
}

/// Undirected BFS distance from the clocked to the counterclocked state.
pub fn height(cd: &ClockDag) -> Height {
    let h = cd.base.bfs(cd.zero_hat)[cd.one_hat];
    Height { height: h, clock_number: h + 1 }
}

/// Largest shortest-path distance over all pairs of states.
pub fn diameter(fg: &FlipGraph, bound: usize) -> Result<usize> {
    let n = fg.num_nodes();
    if n > bound {
        return Err(Error::TooLarge { nodes: n, bound });
    }
    let ecc: Vec<usize> = (0..n).into_par_iter().map(|s| fg.bfs(s).into_iter().max().unwrap_or(0)).collect();
    if ecc.contains(&usize::MAX) {
        return Err(Error::ClockTheoremViolation("flip graph is disconnected".into()));
    }
    Ok(ecc.into_iter().max().unwrap_or(0))
}

fn walk_to_extreme(b: &BalancedGraph, start: Matching, parity: usize) -> Matching {
    let g = b.graph();
    let mut m = start;
    loop {
        let step = b.squares().iter().find_map(|&f| {
            let boundary = b.square_boundary(f);
            match square_parity(g, boundary, &m) {
                Some(odd) if usize::from(odd) == parity => Some(flip(g, boundary, &m)),
                _ => None,
            }
        });
        match step {
            Some(next) => m = next,
            None => return m,
        }
    }
}

/// The unique source, reached by undoing clock moves from any matching.
pub fn clocked_state_with(b: &BalancedGraph, convention: Convention) -> Result<Matching> {
    let start = find_perfect_matching(b.graph()).ok_or(Error::NoPerfectMatching)?;
    Ok(walk_to_extreme(b, start, 1 - convention.tail_parity()))
}

/// The unique sink, reached by applying clock moves from any matching.
pub fn counterclocked_state_with(b: &BalancedGraph, convention: Convention) -> Result<Matching> {
    let start = find_perfect_matching(b.graph()).ok_or(Error::NoPerfectMatching)?;
    Ok(walk_to_extreme(b, start, convention.tail_parity()))
}

pub fn clocked_state(b: &BalancedGraph) -> Result<Matching> {
    clocked_state_with(b, Convention::Counterclockwise)
}

pub fn counterclocked_state(b: &BalancedGraph) -> Result<Matching> {
    counterclocked_state_with(b, Convention::Counterclockwise)
}

/// True iff no clock move leaves `m` backwards (resp. forwards).
pub fn is_clocked(b: &BalancedGraph, m: &Matching) -> bool {
    no_square_with_parity(b, m, false)
}

pub fn is_counterclocked(b: &BalancedGraph, m: &Matching) -> bool {
    no_square_with_parity(b, m, true)
}

fn no_square_with_parity(b: &BalancedGraph, m: &Matching, odd: bool) -> bool {
    b.squares().iter().all(|&f| square_parity(b.graph(), b.square_boundary(f), m) != Some(odd))
}

/// Longest directed chain and whether every edge raises the longest-path rank
/// by exactly one (gradedness).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainDiagnostics {
    pub longest_chain: usize,
    pub bfs_height: usize,
    pub graded: bool,
}

pub fn chain_diagnostics(cd: &ClockDag) -> ChainDiagnostics {
    let rank = longest_ranks(cd);
    let graded = (0..cd.forward.len()).all(|e| rank[cd.head(e)] == rank[cd.tail(e)] + 1);
    ChainDiagnostics { longest_chain: rank[cd.one_hat], bfs_height: height(cd).height, graded }
}

fn topological_order(cd: &ClockDag) -> Vec<usize> {
    let n = cd.base.num_nodes();
    let out = cd.out_edges();
    let mut indeg = vec![0usize; n];
    for e in 0..cd.forward.len() {
        indeg[cd.head(e)] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &e in &out[v] {
            let w = cd.head(e);
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    order
}

fn longest_ranks(cd: &ClockDag) -> Vec<usize> {
    let out = cd.out_edges();
    let mut rank = vec![0usize; cd.base.num_nodes()];
    for v in topological_order(cd) {
        for &e in &out[v] {
            let w = cd.head(e);
            rank[w] = rank[w].max(rank[v] + 1);
        }
    }
    rank
}

/// Whether every pair of states has a join and a meet in the reachability
/// order. Gated to small lattices.
pub fn check_lattice(cd: &ClockDag, bound: usize) -> Result<bool> {
    let n = cd.base.num_nodes();
    if n > bound {
        return Err(Error::TooLarge { nodes: n, bound });
    }
    let order = topological_order(cd);
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let out = cd.out_edges();
    let words = n.div_ceil(64);
    // up[i]: bits (by topological position) of everything above order[i].
    let mut up = vec![vec![0u64; words]; n];
    let mut down = vec![vec![0u64; words]; n];
    for i in (0..n).rev() {
        let v = order[i];
        up[i][i / 64] |= 1 << (i % 64);
        for &e in &out[v] {
            let j = pos[cd.head(e)];
            let (lo, hi) = up.split_at_mut(j);
            for (a, b) in lo[i].iter_mut().zip(&hi[0]) {
                *a |= *b;
            }
        }
    }
    let mut preds = vec![Vec::new(); n];
    for e in 0..cd.forward.len() {
        preds[pos[cd.head(e)]].push(pos[cd.tail(e)]);
    }
    for i in 0..n {
        down[i][i / 64] |= 1 << (i % 64);
        for &j in &preds[i] {
            let (lo, hi) = down.split_at_mut(i);
            for (a, b) in hi[0].iter_mut().zip(&lo[j]) {
                *a |= *b;
            }
        }
    }
    let count = |s: &[u64]| s.iter().map(|w| w.count_ones()).sum::<u32>();
    let up_count: Vec<u32> = up.iter().map(|s| count(s)).collect();
    let down_count: Vec<u32> = down.iter().map(|s| count(s)).collect();
    let ok = (0..n).into_par_iter().all(|a| {
        let mut common = vec![0u64; words];
        (a + 1..n).all(|b| {
            for (k, c) in common.iter_mut().enumerate() {
                *c = up[a][k] & up[b][k];
            }
            // The first common upper bound in topological order is minimal;
            // it is the join iff everything common lies above it.
            let join = first_bit(&common).is_some_and(|j| up_count[j] == count(&common));
            for (k, c) in common.iter_mut().enumerate() {
                *c = down[a][k] & down[b][k];
            }
            let meet = last_bit(&common).is_some_and(|j| down_count[j] == count(&common));
            join && meet
        })
    });
    Ok(ok)
}

fn first_bit(s: &[u64]) -> Option<usize> {
    s.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, &w)| 64 * k + w.trailing_zeros() as usize)
}

fn last_bit(s: &[u64]) -> Option<usize> {
    s.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(k, &w)| 64 * k + 63 - w.leading_zeros() as usize)
}

/// Report for one balanced graph: states, extremes and height.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeSummary {
    pub height: usize,
    pub clock_number: usize,
    pub num_states: usize,
    pub zero_hat: Vec<[usize; 2]>,
    pub one_hat: Vec<[usize; 2]>,
}

pub fn summarize(cd: &ClockDag, b: &BalancedGraph) -> LatticeSummary {
    let h = height(cd);
    LatticeSummary {
        height: h.height,
        clock_number: h.clock_number,
        num_states: cd.base.num_nodes(),
        zero_hat: cd.zero_hat_matching().pairs(b.graph()),
        one_hat: cd.one_hat_matching().pairs(b.graph()),
    }
}

/// Enumerates, builds and orients in one go.
pub fn clock_dag(b: &BalancedGraph, cap: usize) -> Result<ClockDag> {
    let ms = crate::matchings::enumerate_matchings(b, cap)?;
    orient_clock(build_flip_graph(b, &ms), Convention::Counterclockwise)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;
    use crate::matchings::{enumerate_matchings, DEFAULT_CAP};
    use crate::tait::balanced_from_universe;

    fn trefoil() -> BalancedGraph {
        balanced_from_universe(&parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap()).unwrap()
    }

    #[test]
    fn trefoil_lattice_is_a_path() {
        let b = trefoil();
        let ms = enumerate_matchings(&b, DEFAULT_CAP).unwrap();
        let fg = build_flip_graph(&b, &ms);
        assert_eq!((fg.num_nodes(), fg.num_edges()), (3, 2));
        let cd = orient_clock(fg, Convention::Counterclockwise).unwrap();
        assert_eq!(height(&cd), Height { height: 2, clock_number: 3 });
        assert_eq!(diameter(&cd.base, DEFAULT_ALL_PAIRS_BOUND).unwrap(), 2);
        assert_eq!(&clocked_state(&b).unwrap(), cd.zero_hat_matching());
        assert_eq!(&counterclocked_state(&b).unwrap(), cd.one_hat_matching());
        assert!(audit_orientation(&cd, &b).is_empty());
        assert!(check_lattice(&cd, LATTICE_CHECK_BOUND).unwrap());
        assert!(chain_diagnostics(&cd).graded);
    }

    #[test]
    fn reversed_convention_swaps_extremes() {
        let b = trefoil();
        let ms = enumerate_matchings(&b, DEFAULT_CAP).unwrap();
        let fg = build_flip_graph(&b, &ms);
        let ccw = orient_clock(fg.clone(), Convention::Counterclockwise).unwrap();
        let cw = orient_clock(fg, Convention::Clockwise).unwrap();
        assert_eq!((ccw.zero_hat, ccw.one_hat), (cw.one_hat, cw.zero_hat));
        assert_eq!(height(&ccw), height(&cw));
        assert_eq!(&clocked_state_with(&b, Convention::Clockwise).unwrap(), cw.zero_hat_matching());
    }

    #[test]
    fn flipped_edge_is_reported() {
        let b = trefoil();
        let mut cd = clock_dag(&b, DEFAULT_CAP).unwrap();
        cd.forward[0] = !cd.forward[0];
        let report = verify_clock_theorem(&cd);
        assert!(!report.passes());
        assert_eq!(report.misoriented, vec![0]);
        assert_eq!(audit_orientation(&cd, &b), vec![0]);
    }

    #[test]
    fn diameter_bound() {
        let b = trefoil();
        let cd = clock_dag(&b, DEFAULT_CAP).unwrap();
        assert!(matches!(diameter(&cd.base, 2), Err(Error::TooLarge { nodes: 3, bound: 2 })));
    }
}
