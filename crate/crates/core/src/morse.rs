//! Discrete Morse pairings on the sphere complex of a Tait graph, read off
//! perfect matchings of the balanced graph.

use std::collections::VecDeque;

use serde::Serialize;

use crate::diagram::{StarPair, Universe};
use crate::error::{Error, Result};
use crate::matchings::Matching;
use crate::tait::{checkerboard, BalancedGraph, Color};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub dim: u8,
    /// Face id of the universe for dimensions 0 and 2, crossing id for 1.
    pub id: usize,
}

/// 0-cells are black faces, 1-cells crossings, 2-cells white faces. Each
/// corner of the universe is one cover relation of the face poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellComplex {
    pub face_dim: Vec<u8>,
    pub num_crossings: usize,
    /// Corners `4c + k` together with the face they cover or are covered by.
    pub corner_face: Vec<usize>,
}

impl CellComplex {
    pub fn from_universe(u: &Universe, stars: StarPair) -> Self {
        let coloring = checkerboard(u, stars);
        let face_dim = (0..u.faces().len())
            .map(|f| if coloring.color(f) == Color::Black { 0 } else { 2 })
            .collect();
        CellComplex {
            face_dim,
            num_crossings: u.num_crossings(),
            corner_face: (0..4 * u.num_crossings()).map(|d| u.face_of(d)).collect(),
        }
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut out: Vec<Cell> = (0..self.face_dim.len()).map(|f| Cell { dim: self.face_dim[f], id: f }).collect();
        out.extend((0..self.num_crossings).map(|c| Cell { dim: 1, id: c }));
        out.sort();
        out
    }

    pub fn count(&self, dim: u8) -> usize {
        match dim {
            1 => self.num_crossings,
            d => self.face_dim.iter().filter(|&&x| x == d).count(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.count(0) as i64 - self.count(1) as i64 + self.count(2) as i64
    }

    fn face_cell(&self, f: usize) -> Cell {
        Cell { dim: self.face_dim[f], id: f }
    }

    fn index(&self, cell: Cell) -> usize {
        match cell.dim {
            1 => self.face_dim.len() + cell.id,
            _ => cell.id,
        }
    }

    fn num_cells(&self) -> usize {
        self.face_dim.len() + self.num_crossings
    }
}

/// A pairing of cells through corners; `corner` names the cover relation used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorsePair {
    pub lower: Cell,
    pub upper: Cell,
    pub corner: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorsePairing {
    pub complex: CellComplex,
    pub pairs: Vec<MorsePair>,
}

impl MorsePairing {
    /// Cells in no pair.
    pub fn critical(&self) -> Vec<Cell> {
        let mut used = vec![false; self.complex.num_cells()];
        for p in &self.pairs {
            used[self.complex.index(p.lower)] = true;
            used[self.complex.index(p.upper)] = true;
        }
        self.complex.cells().into_iter().filter(|&c| !used[self.complex.index(c)]).collect()
    }

    pub fn to_export(&self) -> MorseExport {
        MorseExport {
            pairs: self.pairs.iter().map(|p| (p.lower.dim, p.lower.id, p.upper.dim, p.upper.id)).collect(),
            critical: self.critical().iter().map(|c| (c.dim, c.id)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseExport {
    /// `(dim, id, paired dim, paired id)`.
    pub pairs: Vec<(u8, usize, u8, usize)>,
    pub critical: Vec<(u8, usize)>,
}

/// Pairs every crossing with the face it is matched to. `b` must be the
/// balanced graph of `u` (crossings and faces as its vertex labels).
pub fn matching_to_morse(b: &BalancedGraph, m: &Matching, u: &Universe) -> Result<MorsePairing> {
    let stars = b.stars().ok_or_else(|| Error::SchemaViolation("balanced graph carries no stars".into()))?;
    if b.num_black() != u.num_crossings() || b.black_labels().iter().enumerate().any(|(i, &c)| i != c) {
        return Err(Error::SchemaViolation("balanced graph was not built from this universe".into()));
    }
    let g = b.graph();
    if !m.is_perfect(g) {
        return Err(Error::SchemaViolation("not a perfect matching".into()));
    }
    let complex = CellComplex::from_universe(u, stars);
    let mut pairs = Vec::with_capacity(b.num_black());
    for c in 0..b.num_black() {
        let e = m.edge(c);
        let w = g.ends(e)[1];
        let face = b.white_labels()[w - b.num_black()];
        // Parallel edges between c and face follow corner order.
        let rank = (0..e).filter(|&x| g.ends(x) == g.ends(e)).count();
        let corner = (0..4)
            .map(|k| 4 * c + k)
            .filter(|&d| u.face_of(d) == face)
            .nth(rank)
            .ok_or_else(|| Error::SchemaViolation(format!("crossing {c} has no corner in face {face}")))?;
        let crossing = Cell { dim: 1, id: c };
        let region = complex.face_cell(face);
        let (lower, upper) = if region.dim == 0 { (region, crossing) } else { (crossing, region) };
        pairs.push(MorsePair { lower, upper, corner });
    }
    Ok(MorsePairing { complex, pairs })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MorseFailure {
    EmptyComplex,
    CellPairedTwice(Cell),
    NotACover(Cell, Cell),
    Cycle(Vec<Cell>),
    CriticalCount(usize),
    EulerCharacteristic(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorseReport {
    pub critical: Vec<Cell>,
    pub critical_dims: Vec<u8>,
    pub failures: Vec<MorseFailure>,
}

impl MorseReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the pairing is a matching of the Hasse diagram, that reversing the
/// paired covers leaves it acyclic, and that exactly two cells are critical.
pub fn verify_morse(p: &MorsePairing) -> MorseReport {
    let cx = &p.complex;
    let mut failures = Vec::new();
    if cx.num_cells() == 0 {
        return MorseReport { critical: Vec::new(), critical_dims: Vec::new(), failures: vec![MorseFailure::EmptyComplex] };
    }
    if cx.euler_characteristic() != 2 {
        failures.push(MorseFailure::EulerCharacteristic(cx.euler_characteristic()));
    }
    let mut seen = vec![false; cx.num_cells()];
    let mut matched_corner = vec![false; cx.corner_face.len()];
    for pair in &p.pairs {
        for cell in [pair.lower, pair.upper] {
            if std::mem::replace(&mut seen[cx.index(cell)], true) {
                failures.push(MorseFailure::CellPairedTwice(cell));
            }
        }
        let (crossing, region) = if pair.lower.dim == 1 { (pair.lower, pair.upper) } else { (pair.upper, pair.lower) };
        let covers = pair.upper.dim == pair.lower.dim + 1
            && crossing.dim == 1
            && pair.corner / 4 == crossing.id
            && cx.corner_face.get(pair.corner) == Some(&region.id)
            && cx.face_dim[region.id] == region.dim;
        if covers {
            matched_corner[pair.corner] = true;
        } else {
            failures.push(MorseFailure::NotACover(pair.lower, pair.upper));
        }
    }

    // Covers point downward; matched covers are reversed.
    let n = cx.num_cells();
    let mut adj = vec![Vec::new(); n];
    for (d, &f) in cx.corner_face.iter().enumerate() {
        let crossing = cx.index(Cell { dim: 1, id: d / 4 });
        let region = cx.index(cx.face_cell(f));
        let (upper, lower) = if cx.face_dim[f] == 0 { (crossing, region) } else { (region, crossing) };
        if matched_corner[d] {
            adj[lower].push(upper);
        } else {
            adj[upper].push(lower);
        }
    }
    if let Some(cycle) = find_cycle(&adj) {
        let cells = cx.cells();
        let by_index = |i: usize| *cells.iter().find(|&&c| cx.index(c) == i).expect("cell index");
        failures.push(MorseFailure::Cycle(cycle.into_iter().map(by_index).collect()));
    }
    let critical = p.critical();
    if critical.len() != 2 {
        failures.push(MorseFailure::CriticalCount(critical.len()));
    }
    let critical_dims = critical.iter().map(|c| c.dim).collect();
    MorseReport { critical, critical_dims, failures }
}

/// Some directed cycle, if the graph has one.
fn find_cycle(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut indeg = vec![0usize; n];
    for list in adj {
        for &w in list {
            indeg[w] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = vec![false; n];
    while let Some(v) = queue.pop_front() {
        removed[v] = true;
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    // Every remaining vertex keeps a remaining predecessor, so walking
    // predecessors must revisit a vertex.
    let start = (0..n).find(|&v| !removed[v])?;
    let mut preds = vec![Vec::new(); n];
    for (v, list) in adj.iter().enumerate() {
        for &w in list {
            preds[w].push(v);
        }
    }
    let mut pos = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut v = start;
    while pos[v] == usize::MAX {
        pos[v] = path.len();
        path.push(v);
        v = *preds[v].iter().find(|&&w| !removed[w]).expect("remaining vertex keeps a remaining predecessor");
    }
    let mut cycle = path[pos[v]..].to_vec();
    cycle.reverse();
    Some(cycle)
}
