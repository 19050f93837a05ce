//! Tait graphs, the overlaid Tait graph and its balanced form.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagram::{self, StarPair, Universe};
use crate::error::{Error, Result};
use crate::plane::{edge_of, twin, Faces, PlaneGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub fn flip(self) -> Self {
        match self {
            Color::Black => Color::White,
            Color::White => Color::Black,
        }
    }
}

/// Checkerboard coloring of the faces of a universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<Color>,
}

impl Coloring {
    pub fn color(&self, face: usize) -> Color {
        self.colors[face]
    }

    pub fn flipped(&self) -> Coloring {
        Coloring { colors: self.colors.iter().map(|c| c.flip()).collect() }
    }
}

/// Proper 2-coloring of faces with the face `stars.first` black.
///
/// Corners alternate colors around every crossing, so the coloring is read off
/// from the parity of the corner index once one corner per crossing is fixed.
pub fn checkerboard(u: &Universe, stars: StarPair) -> Coloring {
    let nf = u.faces().len();
    let mut colors: Vec<Option<Color>> = vec![None; nf];
    colors[stars.first] = Some(Color::Black);
    let mut stack = vec![stars.first];
    while let Some(f) = stack.pop() {
        let cf = colors[f].expect("colored before push");
        for &d in &u.faces()[f].boundary {
            let c = d / 4;
            for k in 0..4 {
                let g = u.face_of(4 * c + k);
                let want = if (k + 4 - d % 4) % 2 == 0 { cf } else { cf.flip() };
                match colors[g] {
                    None => {
                        colors[g] = Some(want);
                        stack.push(g);
                    }
                    Some(have) => assert_eq!(have, want, "universe faces are not 2-colorable"),
                }
            }
        }
    }
    Coloring { colors: colors.into_iter().map(|c| c.expect("connected universe")).collect() }
}

/// A Tait graph: faces of one color as vertices, one edge per crossing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaitGraph {
    /// Universe face id of each vertex.
    pub vertices: Vec<usize>,
    /// Endpoints (vertex indices) of the edge for each crossing.
    pub edges: Vec<[usize; 2]>,
    /// Corner (dart index) realizing each half-edge `2c + side`.
    pub corners: Vec<usize>,
    /// Counterclockwise half-edges around every vertex.
    pub rotation: Vec<Vec<usize>>,
}

impl TaitGraph {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn loops(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e][0] == self.edges[e][1]).collect()
    }

    fn origin(&self, h: usize) -> usize {
        self.edges[h / 2][h % 2]
    }

    fn adjacency(&self, skip: Option<usize>) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            if a != b && Some(e) != skip {
                adj[a].push((b, e));
                adj[b].push((a, e));
            }
        }
        adj
    }

    fn component_count(&self, skip_edge: Option<usize>, skip_vertex: Option<usize>) -> usize {
        let adj = self.adjacency(skip_edge);
        let mut seen = vec![false; adj.len()];
        let mut count = 0;
        for s in 0..adj.len() {
            if seen[s] || Some(s) == skip_vertex {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(u, _) in &adj[v] {
                    if !seen[u] && Some(u) != skip_vertex {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count(None, None) <= 1
    }

    /// Edges whose removal disconnects the graph (loops excluded).
    pub fn bridges(&self) -> Vec<usize> {
        let base = self.component_count(None, None);
        (0..self.edges.len())
            .filter(|&e| self.edges[e][0] != self.edges[e][1])
            .filter(|&e| self.component_count(Some(e), None) > base)
            .collect()
    }

    pub fn cutvertices(&self) -> Vec<usize> {
        let base = self.component_count(None, None);
        (0..self.vertices.len())
            .filter(|&v| self.component_count(None, Some(v)) > base)
            .collect()
    }

    pub fn has_cutvertex(&self) -> bool {
        !self.cutvertices().is_empty()
    }

    /// Faces of the embedded Tait graph as cycles of half-edges (face on the left).
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut pos = vec![0; 2 * self.edges.len()];
        for rot in &self.rotation {
            for (i, &h) in rot.iter().enumerate() {
                pos[h] = i;
            }
        }
        let next = |h: usize| {
            let t = h ^ 1;
            let rot = &self.rotation[self.origin(t)];
            rot[(pos[t] + rot.len() - 1) % rot.len()]
        };
        let mut seen = vec![false; 2 * self.edges.len()];
        let mut out = Vec::new();
        for s in 0..seen.len() {
            if seen[s] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut h = s;
            while !seen[h] {
                seen[h] = true;
                cyc.push(h);
                h = next(h);
            }
            out.push(cyc);
        }
        out
    }
}

/// Builds the Tait graph on the black faces and its plane dual on the white
/// faces. Edge `c` of either graph is the crossing `c`.
pub fn build_tait(u: &Universe, coloring: &Coloring) -> (TaitGraph, TaitGraph) {
    (tait_for(u, coloring, Color::Black), tait_for(u, coloring, Color::White))
}

fn tait_for(u: &Universe, coloring: &Coloring, color: Color) -> TaitGraph {
    let n = u.num_crossings();
    let vertices: Vec<usize> = (0..u.faces().len()).filter(|&f| coloring.color(f) == color).collect();
    let mut index = vec![usize::MAX; u.faces().len()];
    for (i, &f) in vertices.iter().enumerate() {
        index[f] = i;
    }
    let mut edges = Vec::with_capacity(n);
    let mut corners = Vec::with_capacity(2 * n);
    for c in 0..n {
        let k = (0..4).find(|&k| coloring.color(u.face_of(4 * c + k)) == color).expect("two corners per color");
        let (a, b) = (4 * c + k, 4 * c + k + 2);
        edges.push([index[u.face_of(a)], index[u.face_of(b)]]);
        corners.push(a);
        corners.push(b);
    }
    let mut half_of_corner = vec![usize::MAX; 4 * n];
    for (h, &d) in corners.iter().enumerate() {
        half_of_corner[d] = h;
    }
    let rotation = vertices
        .iter()
        .map(|&f| u.faces()[f].boundary.iter().map(|&d| half_of_corner[d]).collect())
        .collect();
    TaitGraph { vertices, edges, corners, rotation }
}

/// The overlaid Tait graph: crossings (black) joined to every incident face
/// (white) once per corner. Edge `4c + k` is corner `k` of crossing `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlaidGraph {
    pub graph: PlaneGraph,
    pub nugatory: Vec<usize>,
    pub prime_like: Option<bool>,
}

impl OverlaidGraph {
    pub fn num_crossings(&self) -> usize {
        self.graph.num_black()
    }

    /// Two faces are adjacent in the universe iff they are the two white
    /// corners of one square of the overlaid graph.
    pub fn faces_adjacent(&self, f: usize, g: usize) -> bool {
        let n = self.num_crossings();
        self.graph.faces().cycles.iter().any(|cyc| {
            let whites: Vec<usize> =
                cyc.iter().map(|&h| self.graph.origin(h)).filter(|&v| v >= n).map(|v| v - n).collect();
            whites.contains(&f) && whites.contains(&g) && f != g
        })
    }
}

pub fn build_overlaid(u: &Universe) -> OverlaidGraph {
    let n = u.num_crossings();
    let nf = u.faces().len();
    let ends: Vec<[usize; 2]> = (0..4 * n).map(|d| [d / 4, n + u.face_of(d)]).collect();
    let mut rotation: Vec<Vec<usize>> = (0..n).map(|c| (0..4).map(|k| 2 * (4 * c + k)).collect()).collect();
    for f in u.faces() {
        rotation.push(f.boundary.iter().map(|&d| 2 * d + 1).collect());
    }
    let graph = PlaneGraph::new(n, nf, ends, rotation).expect("corner incidences form a rotation system");
    let nugatory = diagram::detect_nugatory(u);
    let prime_like = diagram::is_prime_like(u).ok();
    OverlaidGraph { graph, nugatory, prime_like }
}

/// The overlaid Tait graph with two adjacent starred faces removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedGraph {
    graph: PlaneGraph,
    faces: Faces,
    outer: usize,
    black_labels: Vec<usize>,
    white_labels: Vec<usize>,
    stars: Option<StarPair>,
    periphery: Vec<usize>,
    squares: Vec<usize>,
    nugatory: Vec<usize>,
    prime_like: Option<bool>,
}

impl BalancedGraph {
    /// Validates a plane bipartite graph as a balanced overlaid Tait graph.
    /// `outer_half_edge` has the infinite face on its left.
    pub fn new(
        graph: PlaneGraph,
        outer_half_edge: usize,
        black_labels: Vec<usize>,
        white_labels: Vec<usize>,
        stars: Option<StarPair>,
    ) -> Result<Self> {
        let nb = graph.num_black();
        if nb == 0 || nb != graph.num_white() {
            return Err(Error::SchemaViolation(format!(
                "graph is not balanced: {nb} black, {} white",
                graph.num_white()
            )));
        }
        if black_labels.len() != nb || white_labels.len() != nb {
            return Err(Error::SchemaViolation("label lists do not match vertex counts".into()));
        }
        if outer_half_edge >= 2 * graph.num_edges() {
            return Err(Error::SchemaViolation(format!("outer half-edge {outer_half_edge} out of range")));
        }
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        let faces = graph.faces();
        if graph.num_vertices() + faces.cycles.len() != graph.num_edges() + 2 {
            return Err(Error::SchemaViolation("embedding is not planar".into()));
        }
        let outer = faces.face_of[outer_half_edge];
        let squares: Vec<usize> = (0..faces.cycles.len()).filter(|&f| f != outer).collect();
        if let Some(&f) = squares.iter().find(|&&f| faces.cycles[f].len() != 4) {
            return Err(Error::SchemaViolation(format!(
                "bounded face {f} has length {}, expected 4",
                faces.cycles[f].len()
            )));
        }
        if let Some(v) = (0..nb).find(|&v| graph.degree(v) > 4 || graph.degree(v) == 0) {
            return Err(Error::SchemaViolation(format!("black vertex {v} has valence {}", graph.degree(v))));
        }
        // Walk the infinite face against its tracing direction, i.e.
        // counterclockwise around the graph, from the smallest black vertex.
        let walk: Vec<usize> = faces.cycles[outer].iter().rev().map(|&h| graph.target(h)).collect();
        let start = walk
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v < nb)
            .min_by_key(|&(_, &v)| v)
            .map(|(i, _)| i)
            .unwrap_or(0);
        let periphery: Vec<usize> = walk[start..].iter().chain(walk[..start].iter()).copied().collect();
        Ok(BalancedGraph {
            graph,
            faces,
            outer,
            black_labels,
            white_labels,
            stars,
            periphery,
            squares,
            nugatory: Vec::new(),
            prime_like: None,
        })
    }

    pub fn graph(&self) -> &PlaneGraph {
        &self.graph
    }

    pub fn num_black(&self) -> usize {
        self.graph.num_black()
    }

    pub fn num_edges(&self) -> usize {
        self.graph.num_edges()
    }

    pub fn faces(&self) -> &Faces {
        &self.faces
    }

    /// Face id of the infinite face.
    pub fn outer_face(&self) -> usize {
        self.outer
    }

    /// Half-edge cycle (counterclockwise) of every bounded face.
    pub fn squares(&self) -> &[usize] {
        &self.squares
    }

    pub fn square_boundary(&self, face: usize) -> &[usize] {
        &self.faces.cycles[face]
    }

    /// Vertices of the infinite face, counterclockwise from the smallest black.
    pub fn periphery(&self) -> &[usize] {
        &self.periphery
    }

    pub fn stars(&self) -> Option<StarPair> {
        self.stars
    }

    pub fn black_labels(&self) -> &[usize] {
        &self.black_labels
    }

    pub fn white_labels(&self) -> &[usize] {
        &self.white_labels
    }

    /// Nugatory crossings of the source universe, when known.
    pub fn nugatory(&self) -> &[usize] {
        &self.nugatory
    }

    pub fn prime_like(&self) -> Option<bool> {
        self.prime_like
    }

    /// White vertex index (0-based among whites) of global vertex `v`.
    pub fn white_index(&self, v: usize) -> usize {
        v - self.num_black()
    }

    /// Distinct vertices on the infinite face.
    pub fn periphery_set(&self) -> BTreeSet<usize> {
        self.periphery.iter().copied().collect()
    }

    pub fn to_json(&self) -> BalancedJson {
        let nb = self.num_black();
        BalancedJson {
            black: self.black_labels.clone(),
            white: self.white_labels.clone(),
            edges: (0..self.num_edges()).map(|e| {
                let [b, w] = self.graph.ends(e);
                [b, w - nb]
            }).collect(),
            embedding: Embedding {
                black: (0..nb).map(|v| self.graph.rotation(v).iter().map(|&h| edge_of(h)).collect()).collect(),
                white: (nb..2 * nb).map(|v| self.graph.rotation(v).iter().map(|&h| edge_of(h)).collect()).collect(),
            },
            outer: Some(self.faces.cycles[self.outer][0]),
            stars: self.stars.map(|s| [s.first, s.second]),
        }
    }

    /// Color- and orientation-preserving isomorphism of the embedded graphs
    /// that carries the infinite face to the infinite face.
    pub fn isomorphic(&self, other: &BalancedGraph) -> bool {
        let (g, h) = (self.graph(), other.graph());
        if g.num_black() != h.num_black() || g.num_edges() != h.num_edges() || g.num_edges() == 0 {
            return false;
        }
        let start = self.faces.cycles[self.outer][0];
        other.faces.cycles[other.outer].iter().any(|&t| half_edge_map(g, h, start, t).is_some())
    }

    /// Pretty JSON with every list on a single line.
    pub fn to_json_string(&self) -> String {
        let doc = self.to_json();
        let mut lines = vec![
            format!("  \"black\": {}", compact(&doc.black)),
            format!("  \"white\": {}", compact(&doc.white)),
            format!("  \"edges\": {}", compact(&doc.edges)),
            format!(
                "  \"embedding\": {{\n    \"black\": {},\n    \"white\": {}\n  }}",
                compact(&doc.embedding.black),
                compact(&doc.embedding.white)
            ),
        ];
        if let Some(h) = doc.outer {
            lines.push(format!("  \"outer\": {h}"));
        }
        if let Some([a, b]) = doc.stars {
            lines.push(format!("  \"stars\": [{a}, {b}]"));
        }
        format!("{{\n{}\n}}", lines.join(",\n"))
    }
}

/// Extends `a -> b` to a map of half-edges commuting with rotation and twin.
fn half_edge_map(g: &PlaneGraph, h: &PlaneGraph, a: usize, b: usize) -> Option<Vec<usize>> {
    if a & 1 != b & 1 {
        return None;
    }
    let mut map = vec![usize::MAX; 2 * g.num_edges()];
    let mut used = vec![false; 2 * h.num_edges()];
    let mut stack = vec![(a, b)];
    while let Some((x, y)) = stack.pop() {
        if map[x] != usize::MAX {
            if map[x] != y {
                return None;
            }
            continue;
        }
        if used[y] || g.degree(g.origin(x)) != h.degree(h.origin(y)) {
            return None;
        }
        map[x] = y;
        used[y] = true;
        stack.push((twin(x), twin(y)));
        stack.push((g.rot_next(x), h.rot_next(y)));
    }
    map.iter().all(|&y| y != usize::MAX).then_some(map)
}

fn compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Embedding {
    /// Counterclockwise edge indices around each black vertex.
    pub black: Vec<Vec<usize>>,
    /// Counterclockwise edge indices around each white vertex.
    pub white: Vec<Vec<usize>>,
}

/// On-disk form of a balanced graph. Edge endpoints are `[black, white]`
/// indices into the two label lists; `outer` is a half-edge (`2e` from black,
/// `2e + 1` from white) with the infinite face on its left.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalancedJson {
    pub black: Vec<usize>,
    pub white: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
    pub embedding: Embedding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stars: Option<[usize; 2]>,
}

pub fn parse_balanced_json(bytes: &[u8]) -> Result<BalancedGraph> {
    let doc: BalancedJson = serde_json::from_slice(bytes).map_err(|e| Error::SchemaViolation(e.to_string()))?;
    let nb = doc.black.len();
    let nw = doc.white.len();
    if doc.embedding.black.len() != nb || doc.embedding.white.len() != nw {
        return Err(Error::SchemaViolation("embedding does not list every vertex".into()));
    }
    for &[b, w] in &doc.edges {
        if b >= nb || w >= nw {
            return Err(Error::SchemaViolation(format!("edge ({b}, {w}) out of range")));
        }
    }
    let ends = doc.edges.iter().map(|&[b, w]| [b, nb + w]).collect();
    let mut rotation: Vec<Vec<usize>> = Vec::with_capacity(nb + nw);
    for rot in &doc.embedding.black {
        rotation.push(rot.iter().map(|&e| 2 * e).collect());
    }
    for rot in &doc.embedding.white {
        rotation.push(rot.iter().map(|&e| 2 * e + 1).collect());
    }
    let graph = PlaneGraph::new(nb, nw, ends, rotation)?;
    let outer = match doc.outer {
        Some(h) => h,
        None => default_outer(&graph)?,
    };
    BalancedGraph::new(graph, outer, doc.black, doc.white, doc.stars.map(|[first, second]| StarPair { first, second }))
}

/// The unique face that is not a square; a lone square picks the face left of
/// half-edge 1.
fn default_outer(graph: &PlaneGraph) -> Result<usize> {
    let faces = graph.faces();
    let odd: Vec<usize> = (0..faces.cycles.len()).filter(|&f| faces.cycles[f].len() != 4).collect();
    match odd.as_slice() {
        [f] => Ok(faces.cycles[*f][0]),
        [] if faces.cycles.len() == 2 => Ok(1),
        _ => Err(Error::SchemaViolation("cannot infer the infinite face; give \"outer\"".into())),
    }
}

/// Deletes the two starred white vertices from the overlaid graph.
pub fn build_balanced(g: &OverlaidGraph, s: StarPair) -> Result<BalancedGraph> {
    let n = g.num_crossings();
    let nf = g.graph.num_white();
    if s.first >= nf || s.second >= nf {
        return Err(Error::SchemaViolation(format!("star faces ({}, {}) out of range", s.first, s.second)));
    }
    if !g.faces_adjacent(s.first, s.second) {
        return Err(Error::StarsNotAdjacent { first: s.first, second: s.second });
    }
    let starred = |v: usize| v == n + s.first || v == n + s.second;
    let white_labels: Vec<usize> = (0..nf).filter(|&f| f != s.first && f != s.second).collect();
    let mut white_id = vec![usize::MAX; nf];
    for (i, &f) in white_labels.iter().enumerate() {
        white_id[f] = i;
    }
    // Surviving corners, renumbered in (black, white, corner) order.
    let mut kept: Vec<usize> = (0..g.graph.num_edges()).filter(|&e| !starred(g.graph.ends(e)[1])).collect();
    kept.sort_by_key(|&e| {
        let [b, w] = g.graph.ends(e);
        (b, white_id[w - n], e)
    });
    let mut new_edge = vec![usize::MAX; g.graph.num_edges()];
    for (i, &e) in kept.iter().enumerate() {
        new_edge[e] = i;
    }
    let ends = kept.iter().map(|&e| {
        let [b, w] = g.graph.ends(e);
        [b, n + white_id[w - n]]
    }).collect();
    let remap = |v: usize| -> Vec<usize> {
        g.graph
            .rotation(v)
            .iter()
            .filter(|&&h| new_edge[edge_of(h)] != usize::MAX)
            .map(|&h| 2 * new_edge[edge_of(h)] + (h & 1))
            .collect()
    };
    let mut rotation: Vec<Vec<usize>> = (0..n).map(remap).collect();
    rotation.extend(white_labels.iter().map(|&f| remap(n + f)));
    let graph = PlaneGraph::new(n, white_labels.len(), ends, rotation)?;

    // The infinite face fills the sector left behind by a deleted corner.
    let deleted = (0..g.graph.num_edges())
        .find(|&e| g.graph.ends(e)[1] == n + s.first)
        .map(|e| 2 * e)
        .expect("starred face has a corner");
    let mut h = deleted;
    let outer = loop {
        h = g.graph.rot_prev(h);
        if h == deleted {
            return Err(Error::PeripheryViolation {
                vertex: Some(g.graph.origin(h)),
                reason: "black vertex lost every edge".into(),
            });
        }
        if new_edge[edge_of(h)] != usize::MAX {
            break 2 * new_edge[edge_of(h)];
        }
    };
    let mut b = BalancedGraph::new(graph, outer, (0..n).collect(), white_labels, Some(s))?;
    b.nugatory = g.nugatory.clone();
    b.prime_like = g.prime_like;
    Ok(b)
}

/// Convenience: universe to balanced graph with its (explicit or automatic) stars.
pub fn balanced_from_universe(u: &Universe) -> Result<BalancedGraph> {
    build_balanced(&build_overlaid(u), u.stars())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeripheryReport {
    /// Valence counts of the black vertices on the periphery.
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
    /// Black vertices of valence one anywhere in the graph.
    pub black_leaves: Vec<usize>,
    /// Valence-two black vertices on the periphery.
    pub two_valent_blacks: Vec<usize>,
    /// Whether the infinite face is bounded by a simple cycle. Connected sums
    /// revisit a white cut vertex; that alone is not a violation.
    pub simple: bool,
    /// Black vertices met more than once around the infinite face.
    pub repeated_blacks: Vec<usize>,
}

impl PeripheryReport {
    pub fn passes(&self) -> bool {
        self.repeated_blacks.is_empty() && self.n2 == 2 && self.n4 == 0 && self.black_leaves.is_empty()
    }
}

pub fn periphery_report(b: &BalancedGraph) -> PeripheryReport {
    let g = b.graph();
    let on = b.periphery_set();
    let simple = on.len() == b.periphery().len();
    let blacks: Vec<usize> = on.iter().copied().filter(|&v| g.is_black(v)).collect();
    let count = |d: usize| blacks.iter().filter(|&&v| g.degree(v) == d).count();
    let mut seen = BTreeSet::new();
    let mut repeated_blacks: Vec<usize> =
        b.periphery().iter().copied().filter(|&v| g.is_black(v) && !seen.insert(v)).collect();
    repeated_blacks.dedup();
    PeripheryReport {
        n2: count(2),
        n3: count(3),
        n4: count(4),
        black_leaves: (0..b.num_black()).filter(|&v| g.degree(v) == 1).collect(),
        two_valent_blacks: blacks.iter().copied().filter(|&v| g.degree(v) == 2).collect(),
        simple,
        repeated_blacks,
    }
}

/// Checks that two periphery blacks are 2-valent and the rest 3-valent, with no
/// black leaf anywhere.
pub fn check_periphery(b: &BalancedGraph) -> Result<PeripheryReport> {
    let report = periphery_report(b);
    if report.passes() {
        return Ok(report);
    }
    let g = b.graph();
    let (vertex, reason) = if let Some(&v) = report.black_leaves.first() {
        (Some(v), "black leaf".to_string())
    } else if let Some(&v) = report.repeated_blacks.first() {
        (Some(v), "black vertex repeated on the periphery".to_string())
    } else if report.n4 > 0 {
        let v = b.periphery().iter().copied().find(|&v| g.is_black(v) && g.degree(v) == 4);
        (v, "four-valent black vertex on the periphery".to_string())
    } else {
        (None, format!("{} two-valent black vertices on the periphery, expected 2", report.n2))
    };
    Err(Error::PeripheryViolation { vertex, reason })
}

/// Restores the two deleted white vertices and reads the universe back off the
/// squares of the resulting overlaid graph. The returned universe carries the
/// two restored faces as its stars.
pub fn reconstruct_universe(b: &BalancedGraph) -> Result<Universe> {
    let report = check_periphery(b)?;
    let g = b.graph();
    let n = b.num_black();
    let (p, q) = (report.two_valent_blacks[0], report.two_valent_blacks[1]);
    // The infinite face is traced clockwise around the graph. Arc A runs from
    // p to q in tracing order, arc B from q back to p.
    let outer = &b.faces().cycles[b.outer_face()];
    let start = outer.iter().position(|&h| g.origin(h) == p).expect("p is on the periphery");
    let order: Vec<usize> = outer[start..].iter().chain(outer[..start].iter()).copied().collect();
    let (wa, wb) = (2 * n, 2 * n + 1);

    let mut ends: Vec<[usize; 2]> = (0..g.num_edges()).map(|e| g.ends(e)).collect();
    let mut rotation: Vec<Vec<usize>> = (0..2 * n).map(|v| g.rotation(v).to_vec()).collect();
    let mut star_rot = [Vec::new(), Vec::new()];
    let mut on_a = true;
    for &h in &order {
        let v = g.origin(h);
        if !g.is_black(v) {
            continue;
        }
        if v == q {
            on_a = false;
        }
        // New corners go into the outer sector right after the outgoing
        // boundary half-edge: first the star of the arc being entered.
        let targets: &[usize] = match (v == p, v == q, on_a) {
            (true, _, _) => &[wa, wb],
            (_, true, _) => &[wb, wa],
            (_, _, true) => &[wa],
            _ => &[wb],
        };
        let mut new = Vec::new();
        for &w in targets {
            ends.push([v, w]);
            let e = ends.len() - 1;
            new.push(2 * e);
            star_rot[w - wa].push(2 * e + 1);
        }
        let at = rotation[v].iter().position(|&x| x == h).expect("boundary half-edge") + 1;
        rotation[v].splice(at..at, new);
    }
    // Arc B ends back at p, which was visited first.
    let first_b = star_rot[1].remove(0);
    star_rot[1].push(first_b);
    let [ra, rb] = star_rot;
    rotation.push(ra);
    rotation.push(rb);
    let full = PlaneGraph::new(n, n + 2, ends, rotation)?;
    if let Some(v) = (0..n).find(|&v| full.degree(v) != 4) {
        return Err(Error::PeripheryViolation {
            vertex: Some(v),
            reason: "black vertex is not four-valent after restoring the stars".into(),
        });
    }
    universe_from_overlaid(&full, wa - n, wb - n)
}

/// Reads a universe off a 4-valent-black overlaid graph; `star_a`, `star_b`
/// are white indices (among whites) of the faces to mark as stars.
fn universe_from_overlaid(full: &PlaneGraph, star_a: usize, star_b: usize) -> Result<Universe> {
    let n = full.num_black();
    let faces = full.faces();
    let mut mate = vec![usize::MAX; 4 * n];
    for cyc in &faces.cycles {
        if cyc.len() != 4 {
            return Err(Error::SchemaViolation("overlaid graph has a non-square face".into()));
        }
        // cyc = [black->white, white->black, black->white, white->black] up to rotation.
        let i = (0..4).find(|&i| cyc[i] % 2 == 0).expect("square has a black-to-white half-edge");
        let h1 = cyc[i];
        let h2 = cyc[(i + 1) % 4];
        let c1 = full.origin(h1);
        let c2 = full.target(h2);
        let d1 = 4 * c1 + (full.position(h1) + 1) % 4;
        let d2 = 4 * c2 + full.position(twin(h2));
        if mate[d1] != usize::MAX || mate[d2] != usize::MAX {
            return Err(Error::SchemaViolation("slot used twice while reading squares".into()));
        }
        mate[d1] = d2;
        mate[d2] = d1;
    }
    let u = Universe::from_pairing(mate)?;
    // Corner k of crossing c is the k-th entry of its rotation.
    let face_of_white = |w: usize| {
        let h = full.rotation(n + w)[0];
        let t = twin(h);
        u.face_of(4 * full.origin(t) + full.position(t))
    };
    let stars = StarPair { first: face_of_white(star_a), second: face_of_white(star_b) };
    u.with_stars(stars)
}
