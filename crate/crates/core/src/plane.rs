//! Bipartite plane graphs stored as rotation systems.
//!
//! Every edge joins a black vertex to a white vertex. Edge `e` owns the two
//! half-edges `2e` (black to white) and `2e + 1` (white to black). Each vertex
//! lists the half-edges leaving it in counterclockwise order; faces are traced
//! with the face on the left of every half-edge, so bounded faces come out
//! counterclockwise and the infinite face clockwise around the graph.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[inline]
pub fn twin(h: usize) -> usize {
    h ^ 1
}

#[inline]
pub fn edge_of(h: usize) -> usize {
    h >> 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneGraph {
    num_black: usize,
    num_white: usize,
    /// `[black, white]` endpoints, white ids offset by `num_black`.
    ends: Vec<[usize; 2]>,
    rotation: Vec<Vec<usize>>,
    slot: Vec<usize>,
}

/// Faces of a (possibly masked) rotation system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Faces {
    pub cycles: Vec<Vec<usize>>,
    /// Face id of every half-edge; `usize::MAX` for half-edges outside the mask.
    pub face_of: Vec<usize>,
}

impl PlaneGraph {
    /// Builds a plane graph from endpoint pairs and per-vertex counterclockwise
    /// half-edge lists. White vertex ids in `ends` are global (offset by
    /// `num_black`).
    pub fn new(
        num_black: usize,
        num_white: usize,
        ends: Vec<[usize; 2]>,
        rotation: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let nv = num_black + num_white;
        if rotation.len() != nv {
            return Err(Error::SchemaViolation(format!(
                "rotation lists for {} vertices, expected {nv}",
                rotation.len()
            )));
        }
        for (e, &[b, w]) in ends.iter().enumerate() {
            if b >= num_black || w < num_black || w >= nv {
                return Err(Error::SchemaViolation(format!(
                    "edge {e} = ({b}, {w}) does not join a black vertex to a white vertex"
                )));
            }
        }
        let mut slot = vec![usize::MAX; 2 * ends.len()];
        for (v, rot) in rotation.iter().enumerate() {
            for (i, &h) in rot.iter().enumerate() {
                if h >= slot.len() {
                    return Err(Error::SchemaViolation(format!("unknown half-edge {h} at vertex {v}")));
                }
                let origin = if h % 2 == 0 { ends[h / 2][0] } else { ends[h / 2][1] };
                if origin != v || slot[h] != usize::MAX {
                    return Err(Error::SchemaViolation(format!(
                        "half-edge {h} misplaced in the rotation of vertex {v}"
                    )));
                }
                slot[h] = i;
            }
        }
        if let Some(h) = slot.iter().position(|&s| s == usize::MAX) {
            return Err(Error::SchemaViolation(format!("half-edge {h} missing from the rotation system")));
        }
        Ok(Self { num_black, num_white, ends, rotation, slot })
    }

    pub fn num_black(&self) -> usize {
        self.num_black
    }

    pub fn num_white(&self) -> usize {
        self.num_white
    }

    pub fn num_vertices(&self) -> usize {
        self.num_black + self.num_white
    }

    pub fn num_edges(&self) -> usize {
        self.ends.len()
    }

    pub fn is_black(&self, v: usize) -> bool {
        v < self.num_black
    }

    pub fn ends(&self, e: usize) -> [usize; 2] {
        self.ends[e]
    }

    pub fn origin(&self, h: usize) -> usize {
        self.ends[h >> 1][h & 1]
    }

    pub fn target(&self, h: usize) -> usize {
        self.ends[h >> 1][1 - (h & 1)]
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn position(&self, h: usize) -> usize {
        self.slot[h]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    pub fn rot_next(&self, h: usize) -> usize {
        let rot = &self.rotation[self.origin(h)];
        rot[(self.slot[h] + 1) % rot.len()]
    }

    pub fn rot_prev(&self, h: usize) -> usize {
        let rot = &self.rotation[self.origin(h)];
        rot[(self.slot[h] + rot.len() - 1) % rot.len()]
    }

    /// Next half-edge around the face lying to the left of `h`.
    pub fn face_next(&self, h: usize) -> usize {
        self.rot_prev(twin(h))
    }

    /// Like [`rot_prev`](Self::rot_prev) but skipping edges outside `alive`.
    pub fn rot_prev_alive(&self, h: usize, alive: &[bool]) -> usize {
        let rot = &self.rotation[self.origin(h)];
        let mut i = self.slot[h];
        loop {
            i = (i + rot.len() - 1) % rot.len();
            if alive[edge_of(rot[i])] {
                return rot[i];
            }
        }
    }

    pub fn faces(&self) -> Faces {
        self.faces_masked(&vec![true; self.num_edges()])
    }

    /// Traces the faces of the subgraph formed by the edges in `alive`, with
    /// the inherited embedding.
    pub fn faces_masked(&self, alive: &[bool]) -> Faces {
        let mut face_of = vec![usize::MAX; 2 * self.num_edges()];
        let mut cycles = Vec::new();
        for start in 0..face_of.len() {
            if !alive[edge_of(start)] || face_of[start] != usize::MAX {
                continue;
            }
            let id = cycles.len();
            let mut cycle = Vec::new();
            let mut h = start;
            loop {
                face_of[h] = id;
                cycle.push(h);
                h = self.rot_prev_alive(twin(h), alive);
                if h == start {
                    break;
                }
            }
            cycles.push(cycle);
        }
        Faces { cycles, face_of }
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.rotation[v].iter().map(move |&h| self.target(h))
    }

    /// Connected components over the edges in `alive`, restricted to the
    /// vertices in `keep`. Components come out ordered by smallest vertex, each
    /// sorted.
    pub fn components(&self, keep: &[bool], alive: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.num_vertices()];
        let mut out = Vec::new();
        for s in 0..self.num_vertices() {
            if !keep[s] || seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &h in &self.rotation[v] {
                    let u = self.target(h);
                    if alive[edge_of(h)] && keep[u] && !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let keep = vec![true; self.num_vertices()];
        self.components(&keep, &vec![true; self.num_edges()]).len() <= 1
    }

    /// Articulation points of the subgraph induced by `keep` and `alive`.
    pub fn articulation_points(&self, keep: &[bool], alive: &[bool]) -> Vec<usize> {
        let nv = self.num_vertices();
        let mut disc = vec![usize::MAX; nv];
        let mut low = vec![0; nv];
        let mut is_cut = vec![false; nv];
        let mut timer = 0;
        for root in 0..nv {
            if !keep[root] || disc[root] != usize::MAX {
                continue;
            }
            // Iterative DFS; frames hold (vertex, half-edge used to enter, next rotation index).
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            let mut root_children = 0;
            while let Some(&mut (v, via, ref mut i)) = stack.last_mut() {
                if *i < self.rotation[v].len() {
                    let h = self.rotation[v][*i];
                    *i += 1;
                    let u = self.target(h);
                    if !alive[edge_of(h)] || !keep[u] || (via != usize::MAX && edge_of(h) == edge_of(via)) {
                        continue;
                    }
                    if disc[u] == usize::MAX {
                        disc[u] = timer;
                        low[u] = timer;
                        timer += 1;
                        if v == root {
                            root_children += 1;
                        }
                        stack.push((u, h, 0));
                    } else {
                        low[v] = low[v].min(disc[u]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[v]);
                        if p != root && low[v] >= disc[p] {
                            is_cut[p] = true;
                        }
                    }
                }
            }
            if root_children > 1 {
                is_cut[root] = true;
            }
        }
        (0..nv).filter(|&v| is_cut[v]).collect()
    }

    /// Connected, at least three vertices and no articulation point.
    pub fn is_two_connected(&self) -> bool {
        let keep = vec![true; self.num_vertices()];
        let alive = vec![true; self.num_edges()];
        self.num_vertices() >= 3
            && self.components(&keep, &alive).len() == 1
            && self.articulation_points(&keep, &alive).is_empty()
    }

    /// Extracts the subgraph spanned by the edges in `alive` (vertices without
    /// live edges are dropped). Returns the subgraph together with the maps
    /// from new vertex ids and new edge ids back to ids in `self`.
    pub fn subgraph(&self, alive: &[bool]) -> (PlaneGraph, Vec<usize>, Vec<usize>) {
        let mut used = vec![false; self.num_vertices()];
        for (e, &[b, w]) in self.ends.iter().enumerate() {
            if alive[e] {
                used[b] = true;
                used[w] = true;
            }
        }
        let blacks: Vec<usize> = (0..self.num_black).filter(|&v| used[v]).collect();
        let whites: Vec<usize> = (self.num_black..self.num_vertices()).filter(|&v| used[v]).collect();
        let mut new_id = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in blacks.iter().chain(whites.iter()).enumerate() {
            new_id[v] = i;
        }
        let edge_map: Vec<usize> = (0..self.num_edges()).filter(|&e| alive[e]).collect();
        let mut new_edge = vec![usize::MAX; self.num_edges()];
        for (i, &e) in edge_map.iter().enumerate() {
            new_edge[e] = i;
        }
        let ends = edge_map
            .iter()
            .map(|&e| [new_id[self.ends[e][0]], new_id[self.ends[e][1]]])
            .collect();
        let vertex_map: Vec<usize> = blacks.iter().chain(whites.iter()).copied().collect();
        let rotation = vertex_map
            .iter()
            .map(|&v| {
                self.rotation[v]
                    .iter()
                    .filter(|&&h| alive[edge_of(h)])
                    .map(|&h| 2 * new_edge[edge_of(h)] + (h & 1))
                    .collect()
            })
            .collect();
        let sub = PlaneGraph::new(blacks.len(), whites.len(), ends, rotation)
            .expect("restriction of a valid rotation system is valid");
        (sub, vertex_map, edge_map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single square b0 - w2 - b1 - w3 drawn as a diamond.
    pub(crate) fn square() -> PlaneGraph {
        // b0 at west, w2 at south, b1 at east, w3 at north.
        // edges: 0 = b0-w2, 1 = b1-w2, 2 = b1-w3, 3 = b0-w3
        let ends = vec![[0, 2], [1, 2], [1, 3], [0, 3]];
        let rotation = vec![
            vec![0, 6],  // b0: toward south then north (ccw from east-ish)
            vec![4, 2],  // b1: north then south
            vec![3, 1],  // w2: toward b1 (east) then b0 (west)
            vec![5, 7],  // w3: toward b1 (east)... west
        ];
        PlaneGraph::new(2, 2, ends, rotation).unwrap()
    }

    #[test]
    fn square_has_two_faces_of_length_four() {
        let g = square();
        let faces = g.faces();
        assert_eq!(faces.cycles.len(), 2);
        assert!(faces.cycles.iter().all(|c| c.len() == 4));
        assert_eq!(g.num_vertices() + faces.cycles.len(), g.num_edges() + 2);
    }

    #[test]
    fn rejects_misplaced_half_edges() {
        let ends = vec![[0, 1]];
        assert!(PlaneGraph::new(1, 1, ends.clone(), vec![vec![1], vec![0]]).is_err());
        assert!(PlaneGraph::new(1, 1, ends, vec![vec![0], vec![]]).is_err());
    }

    #[test]
    fn articulation_points_of_a_path() {
        // b0 - w1 - b... use path b0-w2-b1-w3
        let ends = vec![[0, 2], [1, 2], [1, 3]];
        let rotation = vec![vec![0], vec![2, 4], vec![1, 3], vec![5]];
        let g = PlaneGraph::new(2, 2, ends, rotation).unwrap();
        let keep = vec![true; 4];
        let alive = vec![true; 3];
        assert_eq!(g.articulation_points(&keep, &alive), vec![1, 2]);
        assert!(!g.is_two_connected());
        assert!(square().is_two_connected());
    }

    #[test]
    fn subgraph_keeps_embedding() {
        let g = square();
        let (sub, vmap, emap) = g.subgraph(&[true, true, false, false]);
        assert_eq!(sub.num_edges(), 2);
        assert_eq!(emap, vec![0, 1]);
        assert_eq!(vmap, vec![0, 1, 2]);
        assert_eq!(sub.faces().cycles.len(), 1);
    }
}
