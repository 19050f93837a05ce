//! Grid graphs and the shipped fixture corpus.

use crate::diagram::{parse_universe_json, Universe};
use crate::error::{Error, Result};
use crate::plane::PlaneGraph;
use crate::tait::{balanced_from_universe, parse_balanced_json, BalancedGraph};

/// The grid of `m` by `n` unit squares as a balanced graph: `m + 1` rows of
/// `n + 1` vertices, black where `x + y` is even.
pub fn grid(m: usize, n: usize) -> Result<BalancedGraph> {
    if m % 2 == 0 || n % 2 == 0 {
        return Err(Error::EvenDimension { m, n });
    }
    let (w, h) = (n + 1, m + 1);
    let id = |x: usize, y: usize| y * w + x;
    let is_black = |v: usize| (v % w + v / w) % 2 == 0;
    let mut local = vec![0; w * h];
    let (mut blacks, mut whites) = (Vec::new(), Vec::new());
    for v in 0..w * h {
        if is_black(v) {
            local[v] = blacks.len();
            blacks.push(v);
        } else {
            local[v] = whites.len();
            whites.push(v);
        }
    }
    let nb = blacks.len();
    let global = |v: usize| if is_black(v) { local[v] } else { nb + local[v] };
    // Neighbors counterclockwise: east, north, west, south.
    let around = |v: usize| -> Vec<usize> {
        let (x, y) = (v % w, v / w);
        let mut out = Vec::with_capacity(4);
        if x + 1 < w {
            out.push(id(x + 1, y));
        }
        if y + 1 < h {
            out.push(id(x, y + 1));
        }
        if x > 0 {
            out.push(id(x - 1, y));
        }
        if y > 0 {
            out.push(id(x, y - 1));
        }
        out
    };
    let mut pairs: Vec<(usize, usize)> =
        blacks.iter().flat_map(|&b| around(b).into_iter().map(move |u| (b, u))).collect();
    pairs.sort_by_key(|&(b, u)| (global(b), global(u)));
    let edge_id = |b: usize, u: usize| pairs.binary_search_by_key(&(global(b), global(u)), |&(p, q)| (global(p), global(q))).expect("grid edge");
    let ends = pairs.iter().map(|&(b, u)| [global(b), global(u)]).collect();
    let mut rotation = Vec::with_capacity(w * h);
    for &b in &blacks {
        rotation.push(around(b).into_iter().map(|u| 2 * edge_id(b, u)).collect());
    }
    for &u in &whites {
        rotation.push(around(u).into_iter().map(|b| 2 * edge_id(b, u) + 1).collect());
    }
    let graph = PlaneGraph::new(nb, whites.len(), ends, rotation)?;
    // Walking north from the bottom-left corner keeps the outside on the left.
    let outer = 2 * edge_id(id(0, 0), id(0, 1));
    BalancedGraph::new(graph, outer, blacks, whites, None)
}

/// Height predicted for the `m` by `n` grid: the sum of `(m - 2i)(n - 2i)`
/// over the nested rings.
pub fn grid_height_closed_form(m: usize, n: usize) -> usize {
    let (a, b) = (m.min(n), m.max(n));
    (0..=(a.saturating_sub(1)) / 2).map(|i| (a - 2 * i) * (b - 2 * i)).sum()
}

pub const FIXTURE_NAMES: &[&str] = &["trefoil", "figure8", "curl", "granny_shadow", "abe6", "k11n157"];

pub(crate) const FIXTURE_FILES: &[(&str, &str)] = &[
    ("trefoil.json", include_str!("../fixtures/trefoil.json")),
    ("figure8.json", include_str!("../fixtures/figure8.json")),
    ("curl.json", include_str!("../fixtures/curl.json")),
    ("granny_shadow.json", include_str!("../fixtures/granny_shadow.json")),
    ("abe6.json", include_str!("../fixtures/abe6.json")),
    ("abe6_universe.json", include_str!("../fixtures/abe6_universe.json")),
    ("k11n157.json", include_str!("../fixtures/k11n157.json")),
    ("k11n157_universe.json", include_str!("../fixtures/k11n157_universe.json")),
];

/// Raw text of a shipped fixture file.
pub fn fixture_text(file: &str) -> Option<&'static str> {
    FIXTURE_FILES.iter().find(|(f, _)| *f == file).map(|(_, t)| *t)
}

/// A loaded fixture: a universe, a balanced graph given directly, or both.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub universe: Option<Universe>,
    pub balanced: Option<BalancedGraph>,
}

impl Fixture {
    /// The stored balanced graph, or the one built from the universe.
    pub fn balanced(&self) -> Result<BalancedGraph> {
        match (&self.balanced, &self.universe) {
            (Some(b), _) => Ok(b.clone()),
            (None, Some(u)) => balanced_from_universe(u),
            (None, None) => unreachable!("fixtures carry at least one form"),
        }
    }
}

/// Loads a named fixture; `grid_M_N` generates the grid.
pub fn load_fixture(name: &str) -> Result<Fixture> {
    if let Some(rest) = name.strip_prefix("grid_") {
        let dims: Vec<usize> = rest.split('_').filter_map(|s| s.parse().ok()).collect();
        if let [m, n] = dims[..] {
            if m > 0 && n > 0 {
                return Ok(Fixture { name: name.into(), universe: None, balanced: Some(grid(m, n)?) });
            }
        }
        return Err(Error::UnknownFixture(name.into()));
    }
    let universe_text = fixture_text(&format!("{name}_universe.json")).or_else(|| {
        matches!(name, "trefoil" | "figure8" | "curl" | "granny_shadow").then(|| fixture_text(&format!("{name}.json"))).flatten()
    });
    let universe = match universe_text {
        Some(t) => Some(parse_universe_json(t.as_bytes())?),
        None => return Err(Error::UnknownFixture(name.into())),
    };
    let balanced = match fixture_text(&format!("{name}_universe.json")) {
        Some(_) => Some(parse_balanced_json(fixture_text(&format!("{name}.json")).expect("paired file").as_bytes())?),
        None => None,
    };
    Ok(Fixture { name: name.into(), universe, balanced })
}
