//! Knot universes: 4-regular plane graphs given by rotation systems.
//!
//! A crossing `c` owns the four darts `4c..4c + 4`, listed counterclockwise.
//! Corner `k` of a crossing is the angular sector between slot `k` and slot
//! `k + 1`; it is identified with dart `4c + k`, whose left side it is.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half of a universe edge, leaving crossing `crossing` at `slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub crossing: usize,
    pub slot: usize,
}

impl Dart {
    pub fn from_index(d: usize) -> Self {
        Dart { crossing: d / 4, slot: d % 4 }
    }

    pub fn index(self) -> usize {
        4 * self.crossing + self.slot
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub id: usize,
    /// Corners (as dart indices) in counterclockwise order around the face.
    pub boundary: Vec<usize>,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.boundary.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarPair {
    pub first: usize,
    pub second: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    mate: Vec<usize>,
    faces: Vec<Face>,
    face_of: Vec<usize>,
    label: Option<String>,
    stars: Option<StarPair>,
}

/// On-disk form of a universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniverseJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub crossings: Vec<[u64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stars: Option<[usize; 2]>,
}

impl Universe {
    /// Builds a universe from a fixed-point-free dart involution.
    pub fn from_pairing(mate: Vec<usize>) -> Result<Self> {
        if mate.is_empty() || mate.len() % 4 != 0 {
            return Err(Error::SchemaViolation(format!(
                "dart count {} is not a positive multiple of four",
                mate.len()
            )));
        }
        for (d, &m) in mate.iter().enumerate() {
            if m >= mate.len() || m == d || mate[m] != d {
                return Err(Error::SchemaViolation(format!("dart pairing is not an involution at {d}")));
            }
        }
        let n = mate.len() / 4;
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut x = x;
            while uf[x] != r {
                let next = uf[x];
                uf[x] = r;
                x = next;
            }
            r
        }
        for (d, &m) in mate.iter().enumerate() {
            let (a, b) = (find(&mut uf, d / 4), find(&mut uf, m / 4));
            uf[a] = b;
        }
        let root = find(&mut uf, 0);
        if (0..n).any(|c| find(&mut uf, c) != root) {
            return Err(Error::Disconnected);
        }
        let (faces, face_of) = trace(&mate);
        if faces.len() != n + 2 {
            return Err(Error::NonSpherical { crossings: n, faces: faces.len() });
        }
        Ok(Universe { mate, faces, face_of, label: None, stars: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Attaches an explicit star choice after checking it.
    pub fn with_stars(mut self, stars: StarPair) -> Result<Self> {
        self.check_stars(stars)?;
        self.stars = Some(stars);
        Ok(self)
    }

    pub fn num_crossings(&self) -> usize {
        self.mate.len() / 4
    }

    pub fn num_edges(&self) -> usize {
        self.mate.len() / 2
    }

    pub fn mate(&self, dart: usize) -> usize {
        self.mate[dart]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Face containing corner `dart`.
    pub fn face_of(&self, dart: usize) -> usize {
        self.face_of[dart]
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn explicit_stars(&self) -> Option<StarPair> {
        self.stars
    }

    /// The explicit star pair if one was given, else [`auto_stars`].
    pub fn stars(&self) -> StarPair {
        self.stars.unwrap_or_else(|| auto_stars(self))
    }

    /// Whether two faces share an edge of the universe.
    pub fn faces_adjacent(&self, f: usize, g: usize) -> bool {
        (0..self.mate.len()).any(|d| {
            let (left, right) = self.edge_sides(d);
            (left == f && right == g) || (left == g && right == f)
        })
    }

    /// Faces on the left and right of the edge leaving along dart `d`.
    pub fn edge_sides(&self, d: usize) -> (usize, usize) {
        let c = d / 4;
        let right = 4 * c + (d + 3) % 4;
        (self.face_of[d], self.face_of[right])
    }

    pub fn check_stars(&self, stars: StarPair) -> Result<()> {
        let nf = self.faces.len();
        if stars.first >= nf || stars.second >= nf {
            return Err(Error::SchemaViolation(format!(
                "star faces ({}, {}) out of range for {nf} faces",
                stars.first, stars.second
            )));
        }
        if stars.first == stars.second || !self.faces_adjacent(stars.first, stars.second) {
            return Err(Error::StarsNotAdjacent { first: stars.first, second: stars.second });
        }
        Ok(())
    }

    /// Canonical arc labels: edges numbered from 1 in order of their first dart.
    pub fn to_json(&self) -> UniverseJson {
        let mut labels = vec![0u64; self.mate.len()];
        let mut next = 1;
        for d in 0..self.mate.len() {
            if labels[d] == 0 {
                labels[d] = next;
                labels[self.mate[d]] = next;
                next += 1;
            }
        }
        UniverseJson {
            label: self.label.clone(),
            crossings: labels.chunks(4).map(|c| [c[0], c[1], c[2], c[3]]).collect(),
            stars: self.stars.map(|s| [s.first, s.second]),
        }
    }

    /// Pretty JSON with one crossing per line.
    pub fn to_json_string(&self) -> String {
        let doc = self.to_json();
        let mut out = String::from("{\n");
        if let Some(label) = &doc.label {
            out += &format!("  \"label\": {},\n", serde_json::to_string(label).expect("string serializes"));
        }
        let rows: Vec<String> = doc.crossings.iter().map(|c| format!("    [{}, {}, {}, {}]", c[0], c[1], c[2], c[3])).collect();
        out += &format!("  \"crossings\": [\n{}\n  ]", rows.join(",\n"));
        if let Some([a, b]) = doc.stars {
            out += &format!(",\n  \"stars\": [{a}, {b}]");
        }
        out + "\n}"
    }

    pub fn to_pd(&self) -> String {
        self.to_json()
            .crossings
            .iter()
            .map(|c| format!("X[{},{},{},{}]", c[0], c[1], c[2], c[3]))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Traces faces with the face on the left of each dart. Faces are numbered by
/// their smallest corner, i.e. by (smallest crossing, smallest slot).
fn trace(mate: &[usize]) -> (Vec<Face>, Vec<usize>) {
    let next = |d: usize| {
        let m = mate[d];
        4 * (m / 4) + (m + 3) % 4
    };
    let mut face_of = vec![usize::MAX; mate.len()];
    let mut faces = Vec::new();
    for start in 0..mate.len() {
        if face_of[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut boundary = Vec::new();
        let mut d = start;
        loop {
            face_of[d] = id;
            boundary.push(d);
            d = next(d);
            if d == start {
                break;
            }
        }
        faces.push(Face { id, boundary });
    }
    (faces, face_of)
}

/// Face list of a universe; `faces.len() == n + 2` holds for every value of
/// [`Universe`], so this cannot fail once the universe exists.
pub fn trace_faces(u: &Universe) -> Vec<Face> {
    u.faces.clone()
}

/// Parses whitespace-separated `X[a,b,c,d]` tuples. Each tuple lists arc labels
/// counterclockwise around its crossing; each label must occur exactly twice.
pub fn parse_pd(text: &str) -> Result<Universe> {
    let mut tuples: Vec<[u64; 4]> = Vec::new();
    let mut rest = text;
    let mut offset = 0;
    let bad = |offset: usize, token: &str| Error::MalformedToken { offset, token: token.to_string() };
    loop {
        let trimmed = rest.trim_start();
        offset += rest.len() - trimmed.len();
        rest = trimmed;
        if rest.is_empty() {
            break;
        }
        let Some(body) = rest.strip_prefix("X[") else {
            let token = rest.split_whitespace().next().unwrap_or(rest);
            return Err(bad(offset, token));
        };
        let Some(close) = body.find(']') else {
            return Err(bad(offset, rest));
        };
        let inner = &body[..close];
        let labels: Vec<&str> = inner.split(',').map(str::trim).collect();
        let token = &rest[..close + 3];
        if labels.len() != 4 {
            return Err(bad(offset, token));
        }
        let mut tuple = [0u64; 4];
        for (slot, l) in labels.iter().enumerate() {
            tuple[slot] = match l.parse::<u64>() {
                Ok(v) if v > 0 => v,
                _ => return Err(bad(offset, token)),
            };
        }
        tuples.push(tuple);
        offset += close + 3;
        rest = &rest[close + 3..];
    }
    if tuples.is_empty() {
        return Err(bad(0, text));
    }
    from_tuples(&tuples)
}

fn from_tuples(tuples: &[[u64; 4]]) -> Result<Universe> {
    let mut seen: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (c, t) in tuples.iter().enumerate() {
        for (slot, &l) in t.iter().enumerate() {
            seen.entry(l).or_default().push(4 * c + slot);
        }
    }
    let mut mate = vec![usize::MAX; 4 * tuples.len()];
    for (&label, darts) in &seen {
        if darts.len() != 2 {
            return Err(Error::LabelArity { label, count: darts.len() });
        }
        mate[darts[0]] = darts[1];
        mate[darts[1]] = darts[0];
    }
    Universe::from_pairing(mate)
}

/// Parses the JSON universe schema: `{label?, crossings: [[a,b,c,d],..], stars?}`.
pub fn parse_universe_json(bytes: &[u8]) -> Result<Universe> {
    let doc: UniverseJson =
        serde_json::from_slice(bytes).map_err(|e| Error::SchemaViolation(e.to_string()))?;
    if doc.crossings.is_empty() {
        return Err(Error::SchemaViolation("crossing list is empty".into()));
    }
    if let Some(bad) = doc.crossings.iter().flatten().find(|&&l| l == 0) {
        return Err(Error::SchemaViolation(format!("arc label {bad} is not positive")));
    }
    let mut u = from_tuples(&doc.crossings)?;
    u.label = doc.label;
    if let Some([first, second]) = doc.stars {
        u = u.with_stars(StarPair { first, second })?;
    }
    Ok(u)
}

/// Crossings at which one face meets two opposite corners.
pub fn detect_nugatory(u: &Universe) -> Vec<usize> {
    (0..u.num_crossings())
        .filter(|&c| {
            let f = |k: usize| u.face_of[4 * c + k];
            f(0) == f(2) || f(1) == f(3)
        })
        .collect()
}

/// True iff the Tait graph (on the color class of the first auto-chosen star)
/// has no cutvertex. Requires a diagram without nugatory crossings.
pub fn is_prime_like(u: &Universe) -> Result<bool> {
    let nugatory = detect_nugatory(u);
    if !nugatory.is_empty() {
        return Err(Error::NugatoryPresent(nugatory));
    }
    let coloring = crate::tait::checkerboard(u, u.stars());
    let (g, _) = crate::tait::build_tait(u, &coloring);
    Ok(!g.has_cutvertex())
}

/// Lexicographically smallest pair of adjacent faces.
pub fn auto_stars(u: &Universe) -> StarPair {
    let nf = u.faces.len();
    let mut adjacent = vec![false; nf * nf];
    for d in 0..u.mate.len() {
        let (l, r) = u.edge_sides(d);
        adjacent[l * nf + r] = true;
        adjacent[r * nf + l] = true;
    }
    for i in 0..nf {
        for j in i + 1..nf {
            if adjacent[i * nf + j] {
                return StarPair { first: i, second: j };
            }
        }
    }
    unreachable!("a universe with n >= 1 has at least two adjacent faces")
}

/// Orientation-preserving isomorphism: a crossing relabeling with slot
/// rotations carrying one pairing onto the other. Returns the dart map.
pub fn isomorphism(a: &Universe, b: &Universe) -> Option<Vec<usize>> {
    (0..b.mate.len()).find_map(|target| isomorphism_from(a, b, target))
}

/// Isomorphism that also carries the star pair of `a` onto that of `b`
/// (as an unordered pair).
pub fn isomorphic_with_stars(a: &Universe, b: &Universe) -> bool {
    let (sa, sb) = (a.stars(), b.stars());
    let n = a.mate.len();
    for target in 0..b.mate.len() {
        let Some(map) = isomorphism_from(a, b, target) else { continue };
        let face_map: HashMap<usize, usize> =
            (0..n).map(|d| (a.face_of[d], b.face_of[map[d]])).collect();
        let (x, y) = (face_map[&sa.first], face_map[&sa.second]);
        if (x == sb.first && y == sb.second) || (x == sb.second && y == sb.first) {
            return true;
        }
    }
    false
}

/// Attempts the isomorphism sending dart 0 of `a` to dart `target` of `b`;
/// connectivity makes the rest forced.
fn isomorphism_from(a: &Universe, b: &Universe, target: usize) -> Option<Vec<usize>> {
    if a.mate.len() != b.mate.len() {
        return None;
    }
    let mut map = vec![usize::MAX; a.mate.len()];
    let mut used = vec![false; b.mate.len()];
    let mut stack = vec![(0usize, target)];
    while let Some((da, db)) = stack.pop() {
        let (ca, sa) = (da / 4, da % 4);
        let (cb, sb) = (db / 4, db % 4);
        for k in 0..4 {
            let x = 4 * ca + (sa + k) % 4;
            let y = 4 * cb + (sb + k) % 4;
            if map[x] == usize::MAX {
                if used[y] {
                    return None;
                }
                map[x] = y;
                used[y] = true;
                stack.push((a.mate[x], b.mate[y]));
            } else if map[x] != y {
                return None;
            }
        }
    }
    let ok = map.iter().all(|&m| m != usize::MAX) && (0..a.mate.len()).all(|d| map[a.mate[d]] == b.mate[map[d]]);
    ok.then_some(map)
}
