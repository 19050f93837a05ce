//! Partition of a balanced graph into leaves and nested cycles, by the
//! symmetric difference of the extremal states and by peeling.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::clock::{is_clocked, is_counterclocked};
use crate::error::{Error, Result};
use crate::matchings::{
    allowed_edges_by_scc, allowed_subgraph_connected, enumerate_matchings, is_elementary, is_resonant, Matching,
};
use crate::plane::{edge_of, twin};
use crate::tait::{check_periphery, BalancedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Symdiff,
    Peel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub id: usize,
    /// Edges in order, starting at the smallest black vertex and running with
    /// the interior on the left.
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Bounded faces enclosed by the cycle.
    #[serde(skip)]
    pub interior_faces: Vec<usize>,
    pub s: usize,
    pub two_valent_blacks: Vec<usize>,
    pub parent: Option<usize>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub route: Route,
    pub leaves: Vec<usize>,
    pub cycles: Vec<Cycle>,
}

impl Decomposition {
    pub fn num_cycles(&self) -> usize {
        self.cycles.len()
    }

    pub fn s_list(&self) -> Vec<usize> {
        self.cycles.iter().map(|c| c.s).collect()
    }

    /// Leaf set and cycle edge sets, independent of route and ordering.
    pub fn same_partition(&self, other: &Decomposition) -> bool {
        let sets = |d: &Decomposition| -> BTreeSet<Vec<usize>> {
            d.cycles
                .iter()
                .map(|c| {
                    let mut e = c.edges.clone();
                    e.sort_unstable();
                    e
                })
                .collect()
        };
        self.leaves == other.leaves && sets(self) == sets(other)
    }

    pub fn to_report(&self) -> DecompositionReport {
        DecompositionReport {
            route: self.route,
            leaves: self.leaves.clone(),
            cycles: self
                .cycles
                .iter()
                .map(|c| CycleSummary { id: c.id, edges: c.edges.clone(), s: c.s, two_valent_blacks: c.two_valent_blacks.clone() })
                .collect(),
            height_formula: height_formula(self),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleSummary {
    pub id: usize,
    pub edges: Vec<usize>,
    pub s: usize,
    pub two_valent_blacks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionReport {
    pub route: Route,
    pub leaves: Vec<usize>,
    pub cycles: Vec<CycleSummary>,
    pub height_formula: usize,
}

/// Faces reachable from the infinite face without crossing a wall edge.
fn reach_from_outer(b: &BalancedGraph, wall: &[bool]) -> Vec<bool> {
    let faces = b.faces();
    let mut reached = vec![false; faces.cycles.len()];
    reached[b.outer_face()] = true;
    let mut queue = VecDeque::from([b.outer_face()]);
    while let Some(f) = queue.pop_front() {
        for &h in &faces.cycles[f] {
            if wall[edge_of(h)] {
                continue;
            }
            let g = faces.face_of[twin(h)];
            if !reached[g] {
                reached[g] = true;
                queue.push_back(g);
            }
        }
    }
    reached
}

/// Bounded faces separated from infinity by the given edges.
pub fn interior_faces(b: &BalancedGraph, edges: &[usize]) -> Vec<usize> {
    let mut wall = vec![false; b.num_edges()];
    for &e in edges {
        wall[e] = true;
    }
    let reached = reach_from_outer(b, &wall);
    (0..reached.len()).filter(|&f| !reached[f]).collect()
}

/// Edges of the interior graph: the cycle itself plus every edge bordering an
/// interior face.
pub fn interior_edge_mask(b: &BalancedGraph, cycle_edges: &[usize], interior: &[usize]) -> Vec<bool> {
    let mut mask = vec![false; b.num_edges()];
    for &e in cycle_edges {
        mask[e] = true;
    }
    for &f in interior {
        for &h in &b.faces().cycles[f] {
            mask[edge_of(h)] = true;
        }
    }
    mask
}

/// Orders a set of edges forming one simple cycle; `None` if they do not.
fn order_cycle(b: &BalancedGraph, edges: &[usize], interior: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let g = b.graph();
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); g.num_vertices()];
    for &e in edges {
        for v in g.ends(e) {
            at[v].push(e);
        }
    }
    if edges.is_empty() || at.iter().any(|l| !l.is_empty() && l.len() != 2) {
        return None;
    }
    let start = (0..g.num_vertices()).find(|&v| !at[v].is_empty())?;
    let inside: BTreeSet<usize> = interior.iter().copied().collect();
    let out_of = |e: usize, v: usize| if g.ends(e)[0] == v { 2 * e } else { 2 * e + 1 };
    let first = at[start]
        .iter()
        .map(|&e| out_of(e, start))
        .find(|&h| inside.contains(&b.faces().face_of[h]))
        .unwrap_or_else(|| out_of(at[start][0], start));
    let (mut vertices, mut order) = (vec![start], vec![edge_of(first)]);
    let mut h = first;
    loop {
        let v = g.target(h);
        if v == start {
            break;
        }
        let e = *at[v].iter().find(|&&e| e != edge_of(h))?;
        vertices.push(v);
        order.push(e);
        h = out_of(e, v);
        if order.len() > edges.len() {
            return None;
        }
    }
    (order.len() == edges.len()).then_some((vertices, order))
}

fn make_cycle(b: &BalancedGraph, edges: &[usize]) -> Result<Cycle> {
    let interior = interior_faces(b, edges);
    let (vertices, ordered) = order_cycle(b, edges, &interior)
        .ok_or_else(|| Error::ClockTheoremViolation(format!("edges {edges:?} do not form a simple cycle")))?;
    let mask = interior_edge_mask(b, edges, &interior);
    let g = b.graph();
    let two_valent_blacks = vertices
        .iter()
        .copied()
        .filter(|&v| g.is_black(v) && g.rotation(v).iter().filter(|&&h| mask[edge_of(h)]).count() == 2)
        .collect();
    Ok(Cycle {
        id: 0,
        edges: ordered,
        vertices,
        s: interior.len(),
        interior_faces: interior,
        two_valent_blacks,
        parent: None,
        depth: 0,
    })
}

/// Orders cycles by nesting depth, then smallest vertex, and fills in ids and
/// parents.
fn finish(route: Route, mut leaves: Vec<usize>, mut cycles: Vec<Cycle>) -> Decomposition {
    leaves.sort_unstable();
    let sets: Vec<BTreeSet<usize>> = cycles.iter().map(|c| c.interior_faces.iter().copied().collect()).collect();
    let encloses = |i: usize, j: usize| i != j && sets[j].is_subset(&sets[i]) && sets[j].len() < sets[i].len();
    let depth: Vec<usize> = (0..cycles.len()).map(|j| (0..cycles.len()).filter(|&i| encloses(i, j)).count()).collect();
    for (j, c) in cycles.iter_mut().enumerate() {
        c.depth = depth[j];
    }
    let parents: Vec<Option<usize>> = (0..cycles.len())
        .map(|j| (0..cycles.len()).filter(|&i| encloses(i, j)).max_by_key(|&i| depth[i]))
        .collect();
    let mut order: Vec<usize> = (0..cycles.len()).collect();
    order.sort_by_key(|&i| (cycles[i].depth, *cycles[i].vertices.iter().min().expect("nonempty cycle")));
    let mut new_id = vec![0; cycles.len()];
    for (k, &i) in order.iter().enumerate() {
        new_id[i] = k;
    }
    for (i, c) in cycles.iter_mut().enumerate() {
        c.id = new_id[i];
        c.parent = parents[i].map(|p| new_id[p]);
    }
    cycles.sort_by_key(|c| c.id);
    Decomposition { route, leaves, cycles }
}

/// Cycles are the components of `zero △ one`, leaves are `zero ∩ one`.
pub fn symdiff_decompose(b: &BalancedGraph, zero: &Matching, one: &Matching) -> Result<Decomposition> {
    let g = b.graph();
    if !zero.is_perfect(g) || !one.is_perfect(g) {
        return Err(Error::NotExtremal("inputs are not perfect matchings".into()));
    }
    if !is_clocked(b, zero) {
        return Err(Error::NotExtremal("first matching admits a backward clock move".into()));
    }
    if !is_counterclocked(b, one) {
        return Err(Error::NotExtremal("second matching admits a forward clock move".into()));
    }
    let mut diff = vec![false; b.num_edges()];
    let mut leaves = Vec::new();
    for e in 0..b.num_edges() {
        match (zero.contains(g, e), one.contains(g, e)) {
            (true, true) => leaves.push(e),
            (true, false) | (false, true) => diff[e] = true,
            _ => {}
        }
    }
    let keep = vec![true; g.num_vertices()];
    let mut cycles = Vec::new();
    for comp in g.components(&keep, &diff) {
        if comp.len() == 1 {
            continue;
        }
        let members: BTreeSet<usize> = comp.iter().copied().collect();
        let edges: Vec<usize> = (0..b.num_edges()).filter(|&e| diff[e] && members.contains(&g.ends(e)[0])).collect();
        cycles.push(make_cycle(b, &edges)?);
    }
    Ok(finish(Route::Symdiff, leaves, cycles))
}

/// The peeling construction: prune leaves, break cutvertices keeping the odd
/// component, and strip the outer cycle of 2-connected pieces.
pub fn peel_decompose(b: &BalancedGraph) -> Result<Decomposition> {
    if !b.nugatory().is_empty() {
        return Err(Error::NugatoryPresent(b.nugatory().to_vec()));
    }
    let g = b.graph();
    let parallel: Vec<usize> = (1..b.num_edges()).filter(|&e| g.ends(e) == g.ends(e - 1)).collect();
    if !parallel.is_empty() {
        return Err(Error::NugatoryPresent(parallel.iter().map(|&e| g.ends(e)[0]).collect()));
    }
    if b.prime_like() == Some(false) || !g.is_two_connected() {
        return Err(Error::NotPrimeLike);
    }
    let nv = g.num_vertices();
    let mut keep = vec![true; nv];
    let mut alive = vec![true; b.num_edges()];
    let mut leaves = Vec::new();
    let mut cycles = Vec::new();
    let mut queue: VecDeque<Vec<usize>> = g.components(&keep, &alive).into();

    let kill_vertex = |v: usize, keep: &mut Vec<bool>, alive: &mut Vec<bool>| {
        keep[v] = false;
        for &h in g.rotation(v) {
            alive[edge_of(h)] = false;
        }
    };

    while let Some(comp) = queue.pop_front() {
        let live: Vec<usize> = comp.into_iter().filter(|&v| keep[v]).collect();
        if live.is_empty() {
            continue;
        }
        let mut in_comp = vec![false; nv];
        for &v in &live {
            in_comp[v] = true;
        }
        let degree = |v: usize, alive: &[bool]| g.rotation(v).iter().filter(|&&h| alive[edge_of(h)]).count();
        if live.len() == 1 {
            return Err(Error::NoPerfectMatching);
        }
        if let Some(&v) = live.iter().find(|&&v| degree(v, &alive) == 1) {
            // Pruning: the pendant edge is forced.
            let h = *g.rotation(v).iter().find(|&&h| alive[edge_of(h)]).expect("degree one");
            let u = g.target(h);
            leaves.push(edge_of(h));
            kill_vertex(v, &mut keep, &mut alive);
            kill_vertex(u, &mut keep, &mut alive);
        } else if let Some(&x) = g.articulation_points(&in_comp, &alive).first() {
            // Breaking: keep only the edges into the odd component of K - x.
            let mut without = in_comp.clone();
            without[x] = false;
            let parts = g.components(&without, &alive);
            let odd: Vec<&Vec<usize>> = parts.iter().filter(|p| p.len() % 2 == 1).collect();
            if odd.len() != 1 {
                return Err(Error::OddComponentAssertFailed { cutvertex: x, odd: odd.len() });
            }
            let odd_set: BTreeSet<usize> = odd[0].iter().copied().collect();
            for &h in g.rotation(x) {
                if alive[edge_of(h)] && !odd_set.contains(&g.target(h)) {
                    alive[edge_of(h)] = false;
                }
            }
        } else {
            // 2-connected: its outer face is bounded by a simple cycle.
            let mut wall = vec![false; b.num_edges()];
            for e in 0..b.num_edges() {
                wall[e] = alive[e] && in_comp[g.ends(e)[0]];
            }
            let reached = reach_from_outer(b, &wall);
            let faces = b.faces();
            let boundary: Vec<usize> = (0..b.num_edges())
                .filter(|&e| wall[e] && reached[faces.face_of[2 * e]] != reached[faces.face_of[2 * e + 1]])
                .collect();
            let cycle = make_cycle(b, &boundary)?;
            for &v in &cycle.vertices {
                kill_vertex(v, &mut keep, &mut alive);
            }
            cycles.push(cycle);
        }
        let rest: Vec<bool> = (0..nv).map(|v| in_comp[v] && keep[v]).collect();
        queue.extend(g.components(&rest, &alive));
    }
    Ok(finish(Route::Peel, leaves, cycles))
}

/// `(id, s_i)` for every cycle.
pub fn square_counts(d: &Decomposition) -> Vec<(usize, usize)> {
    d.cycles.iter().map(|c| (c.id, c.s)).collect()
}

/// Sum of the square counts of all cycles.
pub fn height_formula(d: &Decomposition) -> usize {
    d.cycles.iter().map(|c| c.s).sum()
}

/// The interior graph of a cycle as a balanced graph of its own.
pub fn interior_graph(b: &BalancedGraph, cycle_edges: &[usize]) -> Result<BalancedGraph> {
    let interior = interior_faces(b, cycle_edges);
    let (vertices, ordered) = order_cycle(b, cycle_edges, &interior)
        .ok_or_else(|| Error::SchemaViolation("cycle edges do not form a simple cycle".into()))?;
    let mask = interior_edge_mask(b, cycle_edges, &interior);
    let (sub, vertex_map, edge_map) = b.graph().subgraph(&mask);
    let nb = sub.num_black();
    let g = b.graph();
    // The first cycle edge runs with the interior on its left, so its twin has
    // the new infinite face on the left.
    let e0 = ordered[0];
    let inner_half = if g.ends(e0)[0] == vertices[0] { 2 * e0 } else { 2 * e0 + 1 };
    let new_e = edge_map.iter().position(|&e| e == e0).expect("cycle edge kept");
    let outer = twin(2 * new_e + (inner_half & 1));
    let black_labels = vertex_map[..nb].iter().map(|&v| b.black_labels()[v]).collect();
    let white_labels = vertex_map[nb..].iter().map(|&v| b.white_labels()[v - b.num_black()]).collect();
    BalancedGraph::new(sub, outer, black_labels, white_labels, None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleCheck {
    pub id: usize,
    pub simple: bool,
    pub s: usize,
    pub two_valent_blacks: Vec<usize>,
    pub four_valent_on_cycle: Vec<usize>,
    pub periphery: bool,
    pub elementary: bool,
    /// `"enumeration"` or `"scc"` (used when enumeration hits the cap).
    pub elementary_route: &'static str,
    pub all_faces_resonant: Option<bool>,
    pub two_connected: bool,
    pub alternating: bool,
    pub problems: Vec<String>,
}

impl CycleCheck {
    pub fn passes(&self) -> bool {
        self.problems.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub cycles: Vec<CycleCheck>,
    pub leaves_shared: bool,
    pub partition: bool,
}

impl PropertyReport {
    pub fn passes(&self) -> bool {
        self.leaves_shared && self.partition && self.cycles.iter().all(|c| c.passes())
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.leaves_shared {
            out.push("leaves differ from the edges shared by the extremal states".into());
        }
        if !self.partition {
            out.push("cycles and leaves do not partition the vertices".into());
        }
        for c in &self.cycles {
            out.extend(c.problems.iter().map(|p| format!("cycle {}: {p}", c.id)));
        }
        out
    }
}

/// Re-derives every cycle property from the cycle's edge list alone.
pub fn check_cycle_properties(
    d: &Decomposition,
    b: &BalancedGraph,
    zero: &Matching,
    one: &Matching,
    cap: usize,
) -> PropertyReport {
    let g = b.graph();
    let mut covered = vec![0usize; g.num_vertices()];
    for &e in &d.leaves {
        for v in g.ends(e) {
            covered[v] += 1;
        }
    }
    let shared: Vec<usize> = (0..b.num_edges()).filter(|&e| zero.contains(g, e) && one.contains(g, e)).collect();
    let cycles = d
        .cycles
        .iter()
        .map(|c| {
            let mut problems = Vec::new();
            let interior = interior_faces(b, &c.edges);
            let ordered = order_cycle(b, &c.edges, &interior);
            let simple = ordered.is_some();
            if !simple {
                problems.push("edges do not form a simple cycle".to_string());
            }
            let vertices = ordered.as_ref().map(|(v, _)| v.clone()).unwrap_or_default();
            for &v in &vertices {
                covered[v] += 1;
            }
            let mask = interior_edge_mask(b, &c.edges, &interior);
            let valence = |v: usize| g.rotation(v).iter().filter(|&&h| mask[edge_of(h)]).count();
            let two_valent_blacks: Vec<usize> = vertices.iter().copied().filter(|&v| g.is_black(v) && valence(v) == 2).collect();
            let four_valent_on_cycle: Vec<usize> = vertices.iter().copied().filter(|&v| g.is_black(v) && valence(v) == 4).collect();
            if two_valent_blacks.len() != 2 {
                problems.push(format!("{} two-valent black vertices on the cycle", two_valent_blacks.len()));
            }
            if !four_valent_on_cycle.is_empty() {
                problems.push(format!("four-valent black vertices {four_valent_on_cycle:?} on the cycle"));
            }
            if interior.is_empty() {
                problems.push("cycle encloses no square".into());
            }
            let alternating = match &ordered {
                Some((_, edges)) => (0..edges.len()).all(|i| {
                    let (e, next) = (edges[i], edges[(i + 1) % edges.len()]);
                    zero.contains(g, e) != one.contains(g, e) && zero.contains(g, e) != zero.contains(g, next)
                }),
                None => false,
            };
            if !alternating {
                problems.push("cycle does not alternate between the extremal states".into());
            }
            let (mut periphery, mut elementary, mut route, mut resonant, mut two_connected) = (false, false, "enumeration", None, false);
            match simple.then(|| interior_graph(b, &c.edges)) {
                Some(Ok(sub)) => {
                    periphery = check_periphery(&sub).is_ok();
                    two_connected = sub.graph().is_two_connected();
                    match enumerate_matchings(&sub, cap) {
                        Ok(ms) => {
                            elementary = is_elementary(&sub, &ms);
                            resonant = Some((0..sub.faces().cycles.len()).all(|f| is_resonant(&sub, f, &ms)));
                        }
                        Err(_) => {
                            route = "scc";
                            elementary = allowed_edges_by_scc(sub.graph())
                                .is_some_and(|st| allowed_subgraph_connected(sub.graph(), &st));
                        }
                    }
                }
                Some(Err(e)) => problems.push(format!("interior graph invalid: {e}")),
                None => {}
            }
            if simple && !periphery {
                problems.push("interior graph fails the periphery condition".into());
            }
            if simple && !elementary {
                problems.push("interior graph is not elementary".into());
            }
            if resonant == Some(false) {
                problems.push("interior graph has a non-resonant face".into());
            }
            if simple && !two_connected {
                problems.push("interior graph is not 2-connected".into());
            }
            CycleCheck {
                id: c.id,
                simple,
                s: interior.len(),
                two_valent_blacks,
                four_valent_on_cycle,
                periphery,
                elementary,
                elementary_route: route,
                all_faces_resonant: resonant,
                two_connected,
                alternating,
                problems,
            }
        })
        .collect();
    PropertyReport { cycles, leaves_shared: shared == d.leaves, partition: covered.iter().all(|&c| c == 1) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::{clocked_state, counterclocked_state};
    use crate::diagram::parse_pd;
    use crate::generators::grid;
    use crate::matchings::DEFAULT_CAP;
    use crate::tait::balanced_from_universe;

    fn extremes(b: &BalancedGraph) -> (Matching, Matching) {
        (clocked_state(b).unwrap(), counterclocked_state(b).unwrap())
    }

    #[test]
    fn single_square() {
        let b = grid(1, 1).unwrap();
        let (z, o) = extremes(&b);
        let d = symdiff_decompose(&b, &z, &o).unwrap();
        assert_eq!(d.s_list(), vec![1]);
        assert!(d.leaves.is_empty());
        assert!(peel_decompose(&b).unwrap().same_partition(&d));
        assert!(check_cycle_properties(&d, &b, &z, &o, DEFAULT_CAP).passes());
    }

    #[test]
    fn grid_3_3_rings() {
        let b = grid(3, 3).unwrap();
        let (z, o) = extremes(&b);
        let d = symdiff_decompose(&b, &z, &o).unwrap();
        assert_eq!(d.s_list(), vec![9, 1]);
        assert_eq!(d.cycles[1].parent, Some(0));
        assert_eq!(height_formula(&d), 10);
        let p = peel_decompose(&b).unwrap();
        assert!(p.same_partition(&d));
        assert_eq!(p.cycles, d.cycles);
        let report = check_cycle_properties(&d, &b, &z, &o, DEFAULT_CAP);
        assert!(report.passes(), "{:?}", report.problems());
    }

    #[test]
    fn trefoil_one_cycle() {
        let b = balanced_from_universe(&parse_pd("X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]").unwrap()).unwrap();
        let (z, o) = extremes(&b);
        let d = symdiff_decompose(&b, &z, &o).unwrap();
        assert_eq!(d.s_list(), vec![2]);
        assert!(d.leaves.is_empty());
        assert_eq!(d.cycles[0].vertices.len(), 6);
        assert!(peel_decompose(&b).unwrap().same_partition(&d));
    }

    #[test]
    fn swapped_extremes_are_rejected() {
        let b = grid(3, 3).unwrap();
        let (z, o) = extremes(&b);
        assert!(matches!(symdiff_decompose(&b, &o, &z), Err(Error::NotExtremal(_))));
    }

    #[test]
    fn dropped_edge_is_diagnosed() {
        let b = grid(3, 3).unwrap();
        let (z, o) = extremes(&b);
        let mut d = symdiff_decompose(&b, &z, &o).unwrap();
        d.cycles[0].edges.pop();
        let report = check_cycle_properties(&d, &b, &z, &o, DEFAULT_CAP);
        assert!(!report.passes());
        assert!(!report.cycles[0].simple);
    }

    #[test]
    fn curl_is_rejected_by_peeling() {
        let b = balanced_from_universe(&parse_pd("X[1,1,2,2]").unwrap()).unwrap();
        assert!(matches!(peel_decompose(&b), Err(Error::NugatoryPresent(_))));
    }
}
