//! Conflict-free connection colorings.
//!
//! A path is conflict-free when some color appears on exactly one of its
//! edges; an edge coloring makes a graph conflict-free connected when every
//! vertex pair is joined by such a path. This module has the certifying
//! checker, the two-color constructive pipeline (pendant matching plus a
//! Hamilton cycle on the large side), an exact solver for small edge counts,
//! and the upper-bound ladder that ties them together.
//!
//! The checker is exact in both directions: a certificate stores verified
//! witness paths, and a refutation means an exhaustive search proved some
//! pair has no conflict-free path. To stay fast on large instances it first
//! sweeps cheap candidate paths (BFS trees, one-crossing walks, and
//! compositions around single-edge color classes) and only falls back to
//! the per-pair exhaustive search for the handful of pairs those sweeps
//! miss.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rand::Rng;
use serde::Serialize;

use crate::graph::Graph;
use crate::hamilton::{self, HamOutcome};
use crate::rng;
use crate::structure::{classify_vertices, is_connected, VertexPartition};

/// Certificates keep every witness path up to this vertex count; beyond it
/// they keep a boolean per pair plus the first few witnesses.
pub const WITNESS_STORE_MAX_N: usize = 100;
/// Number of witnesses kept when the full set is too large.
pub const SAMPLED_WITNESSES: usize = 10;
/// Random two-colorings tried by the [`cfc_upper`] ladder.
pub const RANDOM_COLORING_TRIES: u64 = 50;
/// Default edge budget for [`cfc_exact`].
pub const DEFAULT_EDGE_BUDGET: usize = 14;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CfcError {
    #[error("coloring has {have} entries but the graph has {want} edges")]
    WrongLength { have: usize, want: usize },
    #[error("color {color} on edge {edge} is outside the palette 1..={palette}")]
    ColorOutOfPalette { edge: usize, color: u32, palette: u32 },
    #[error("palette must have at least one color")]
    EmptyPalette,
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("vertex pair must be two distinct vertices, got ({0}, {0})")]
    SamePair(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("graph has {m} edges, over the exact-search budget of {budget}")]
    EdgeBudget { m: usize, budget: usize },
    #[error("no conflict-free coloring with at most {max_k} colors")]
    PaletteExceeded { max_k: u32 },
    #[error("construction needs n >= 3, got {n}")]
    TooSmall { n: usize },
    #[error("no matching saturates small vertex {small} into the large side")]
    MatchingFailed { small: usize },
    #[error("no Hamilton cycle found on the large side ({})", if *.exhaustive { "exact" } else { "heuristic" })]
    HamiltonFailed { exhaustive: bool },
    #[error("cycle plus matching does not span every vertex")]
    NotSpanning,
    #[error("constructed coloring was refuted at pair ({}, {})", .pair.0, .pair.1)]
    ConstructionRefuted { pair: (usize, usize) },
}

/// Total edge coloring with colors `1..=palette`, indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    palette: u32,
    colors: Vec<u32>,
}

impl EdgeColoring {
    pub fn new(palette: u32, colors: Vec<u32>) -> Result<Self, CfcError> {
        if palette == 0 {
            return Err(CfcError::EmptyPalette);
        }
        for (edge, &color) in colors.iter().enumerate() {
            if color == 0 || color > palette {
                return Err(CfcError::ColorOutOfPalette {
                    edge,
                    color,
                    palette,
                });
            }
        }
        Ok(EdgeColoring { palette, colors })
    }

    /// Every edge gets color 1.
    pub fn monochromatic(m: usize) -> Self {
        EdgeColoring {
            palette: 1,
            colors: vec![1; m],
        }
    }

    /// Edge i gets color i + 1; trivially conflict-free on any path.
    pub fn all_distinct(m: usize) -> Self {
        EdgeColoring {
            palette: (m as u32).max(1),
            colors: (1..=m as u32).collect(),
        }
    }

    pub fn palette(&self) -> u32 {
        self.palette
    }

    pub fn color(&self, e: usize) -> u32 {
        self.colors[e]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }
}

fn check_matches(g: &Graph, col: &EdgeColoring) -> Result<(), CfcError> {
    if col.len() != g.m() {
        return Err(CfcError::WrongLength {
            have: col.len(),
            want: g.m(),
        });
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum ColoringFileError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn col_err<T>(line: usize, msg: impl Into<String>) -> Result<T, ColoringFileError> {
    Err(ColoringFileError::Parse {
        line,
        msg: msg.into(),
    })
}

/// Write the coloring file format: an `m t` header, then one `edge_id
/// color` line per edge in ascending edge-id order.
pub fn write_coloring<W: Write>(col: &EdgeColoring, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{} {}", col.len(), col.palette())?;
    for (e, &c) in col.colors().iter().enumerate() {
        writeln!(w, "{e} {c}")?;
    }
    Ok(())
}

/// Read the coloring file format. Every edge id must appear exactly once
/// and every color must fit the declared palette; errors carry 1-based
/// line numbers.
pub fn read_coloring<R: BufRead>(r: R) -> Result<EdgeColoring, ColoringFileError> {
    let mut lines = r.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return col_err(1, "missing 'm t' header"),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return col_err(1, "header must be 'm t'");
    }
    let m: usize = match fields[0].parse() {
        Ok(v) => v,
        Err(_) => return col_err(1, format!("bad edge count '{}'", fields[0])),
    };
    let t: u32 = match fields[1].parse() {
        Ok(v) if v >= 1 => v,
        _ => return col_err(1, format!("bad palette size '{}'", fields[1])),
    };
    let mut colors = vec![0u32; m];
    for i in 0..m {
        let lineno = i + 2;
        let line = match lines.next() {
            Some(line) => line?,
            None => return col_err(lineno, format!("expected {m} coloring lines, found {i}")),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return col_err(lineno, "coloring line must be 'edge_id color'");
        }
        let e: usize = match fields[0].parse() {
            Ok(v) if v < m => v,
            _ => return col_err(lineno, format!("bad edge id '{}'", fields[0])),
        };
        let c: u32 = match fields[1].parse() {
            Ok(v) if v >= 1 && v <= t => v,
            _ => {
                return col_err(
                    lineno,
                    format!("bad color '{}' for palette 1..={t}", fields[1]),
                )
            }
        };
        if colors[e] != 0 {
            return col_err(lineno, format!("edge {e} colored twice"));
        }
        colors[e] = c;
    }
    for (line, l) in lines.enumerate() {
        if !l?.trim().is_empty() {
            return col_err(m + 2 + line, "unexpected extra line");
        }
    }
    EdgeColoring::new(t, colors).map_err(|e| ColoringFileError::Parse {
        line: 0,
        msg: e.to_string(),
    })
}

// --- path predicates --------------------------------------------------------

/// Is the given edge-id path conflict-free under `col`? The path must be a
/// valid simple path of `g`: consecutive edges share an endpoint and no
/// vertex repeats.
pub fn is_conflict_free_path(
    g: &Graph,
    col: &EdgeColoring,
    edge_path: &[usize],
) -> Result<bool, CfcError> {
    check_matches(g, col)?;
    let verts = path_vertices(g, edge_path)?;
    let mut counts = vec![0u32; col.palette() as usize + 1];
    for &e in edge_path {
        counts[col.color(e) as usize] += 1;
    }
    debug_assert_eq!(verts.len(), edge_path.len() + 1);
    Ok(counts.iter().any(|&c| c == 1))
}

/// Vertex sequence of an edge-id path, validating simplicity on the way.
fn path_vertices(g: &Graph, edge_path: &[usize]) -> Result<Vec<usize>, CfcError> {
    if edge_path.is_empty() {
        return Err(CfcError::InvalidPath("empty edge sequence".into()));
    }
    for &e in edge_path {
        if e >= g.m() {
            return Err(CfcError::InvalidPath(format!("edge id {e} out of range")));
        }
    }
    let (a, b) = g.endpoints(edge_path[0]);
    let start = if edge_path.len() == 1 {
        a
    } else {
        let (c, d) = g.endpoints(edge_path[1]);
        if b == c || b == d {
            a
        } else if a == c || a == d {
            b
        } else {
            return Err(CfcError::InvalidPath(
                "consecutive edges share no endpoint".into(),
            ));
        }
    };
    let mut verts = vec![start];
    let mut cur = start;
    let mut seen = vec![false; g.n()];
    seen[start] = true;
    for &e in edge_path {
        let (x, y) = g.endpoints(e);
        let next = if cur == x {
            y
        } else if cur == y {
            x
        } else {
            return Err(CfcError::InvalidPath(
                "consecutive edges share no endpoint".into(),
            ));
        };
        if seen[next] {
            return Err(CfcError::InvalidPath(format!("vertex {next} repeats")));
        }
        seen[next] = true;
        verts.push(next);
        cur = next;
    }
    Ok(verts)
}

/// Edge ids along a vertex path; panics if some hop is missing, so callers
/// only use it on paths built from real edges.
fn edge_ids_of(g: &Graph, verts: &[usize]) -> Vec<usize> {
    verts
        .windows(2)
        .map(|w| g.edge_between(w[0], w[1]).expect("witness hop is an edge"))
        .collect()
}

fn conflict_free_vertex_path(g: &Graph, col: &EdgeColoring, verts: &[usize]) -> bool {
    let mut counts = vec![0u32; col.palette() as usize + 1];
    for w in verts.windows(2) {
        let e = g.edge_between(w[0], w[1]).expect("hop is an edge");
        counts[col.color(e) as usize] += 1;
    }
    counts.iter().any(|&c| c == 1)
}

// --- BFS helpers ------------------------------------------------------------

const UNREACHED: usize = usize::MAX;

struct BfsTree {
    dist: Vec<usize>,
    parent: Vec<usize>,
}

/// BFS tree from `src` over edges passing `edge_ok`, skipping `blocked`
/// vertices. Neighbor order is ascending, or descending when `descending`
/// is set (a cheap way to get a second, different tree).
fn bfs_tree<F: Fn(usize) -> bool>(
    g: &Graph,
    src: usize,
    descending: bool,
    blocked: Option<&[bool]>,
    edge_ok: F,
) -> BfsTree {
    let n = g.n();
    let mut dist = vec![UNREACHED; n];
    let mut parent = vec![UNREACHED; n];
    if blocked.map_or(false, |b| b[src]) {
        return BfsTree { dist, parent };
    }
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let mut relax = |w: usize, e: usize| {
            if dist[w] == UNREACHED && edge_ok(e) && !blocked.map_or(false, |b| b[w]) {
                dist[w] = dist[v] + 1;
                parent[w] = v;
                queue.push_back(w);
            }
        };
        if descending {
            for &(w, e) in g.neighbors(v).iter().rev() {
                relax(w, e);
            }
        } else {
            for &(w, e) in g.neighbors(v) {
                relax(w, e);
            }
        }
    }
    BfsTree { dist, parent }
}

/// Path target -> src along tree parents, or None when unreached.
fn tree_path(tree: &BfsTree, target: usize) -> Option<Vec<usize>> {
    if tree.dist[target] == UNREACHED {
        return None;
    }
    let mut path = vec![target];
    let mut cur = target;
    while tree.parent[cur] != UNREACHED {
        cur = tree.parent[cur];
        path.push(cur);
    }
    Some(path)
}

/// BFS over states (vertex, crossed) where "crossed" flips on edges of
/// color `c`. A shortest (src, 0) -> (v, 1) state path is a walk using
/// exactly one c-colored edge; it certifies (src, v) whenever it happens
/// to be vertex-simple.
struct CrossingWalk {
    dist: Vec<usize>,
    parent: Vec<usize>,
}

fn crossing_walk(g: &Graph, col: &EdgeColoring, c: u32, src: usize) -> CrossingWalk {
    let n = g.n();
    let mut dist = vec![UNREACHED; 2 * n];
    let mut parent = vec![UNREACHED; 2 * n];
    let s = 2 * src;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(state) = queue.pop_front() {
        let (v, crossed) = (state / 2, state % 2);
        for &(w, e) in g.neighbors(v) {
            let is_c = col.color(e) == c;
            if is_c && crossed == 1 {
                continue;
            }
            let next = 2 * w + if is_c { 1 } else { crossed };
            if dist[next] == UNREACHED {
                dist[next] = dist[state] + 1;
                parent[next] = state;
                queue.push_back(next);
            }
        }
    }
    CrossingWalk { dist, parent }
}

/// Vertex sequence src -> v of the crossing walk, or None when unreached
/// or not vertex-simple.
fn simple_crossing_path(walk: &CrossingWalk, n: usize, v: usize) -> Option<Vec<usize>> {
    let target = 2 * v + 1;
    if walk.dist[target] == UNREACHED {
        return None;
    }
    let mut states = vec![target];
    let mut cur = target;
    while walk.parent[cur] != UNREACHED {
        cur = walk.parent[cur];
        states.push(cur);
    }
    states.reverse();
    let mut seen = vec![false; n];
    let mut verts = Vec::with_capacity(states.len());
    for s in states {
        let v = s / 2;
        if seen[v] {
            return None;
        }
        seen[v] = true;
        verts.push(v);
    }
    Some(verts)
}

// --- existence of a conflict-free path --------------------------------------

/// Edge ids grouped by color; index 0 is unused.
fn color_classes(col: &EdgeColoring) -> Vec<Vec<usize>> {
    let mut classes = vec![Vec::new(); col.palette() as usize + 1];
    for (e, &c) in col.colors().iter().enumerate() {
        classes[c as usize].push(e);
    }
    classes
}

/// Find a conflict-free u-v path, or prove there is none.
///
/// The search is layered: direct edge, shortest path, one-crossing walks
/// per color, then for every (color, edge) candidate a greedy disjoint
/// composition and finally an exhaustive simple-path search. The exhaustive
/// layer makes the None answer definitive: a conflict-free path uses some
/// color exactly once, so it shows up as a path through that edge avoiding
/// the rest of its class.
pub fn exists_conflict_free_path(
    g: &Graph,
    col: &EdgeColoring,
    u: usize,
    v: usize,
) -> Result<Option<Vec<usize>>, CfcError> {
    check_matches(g, col)?;
    for &w in &[u, v] {
        if w >= g.n() {
            return Err(CfcError::VertexOutOfRange { vertex: w, n: g.n() });
        }
    }
    if u == v {
        return Err(CfcError::SamePair(u));
    }

    // A single edge is conflict-free on its own.
    if g.has_edge(u, v) {
        return Ok(Some(vec![u, v]));
    }

    // Shortest path, then one-crossing walks.
    let tree = bfs_tree(g, u, false, None, |_| true);
    if let Some(mut path) = tree_path(&tree, v) {
        path.reverse();
        if conflict_free_vertex_path(g, col, &path) {
            return Ok(Some(path));
        }
    } else {
        return Ok(None); // different components
    }
    for c in 1..=col.palette() {
        let walk = crossing_walk(g, col, c, u);
        if let Some(path) = simple_crossing_path(&walk, g.n(), v) {
            debug_assert!(conflict_free_vertex_path(g, col, &path));
            return Ok(Some(path));
        }
    }

    // Per-candidate layers, small color classes first.
    let classes = color_classes(col);
    let mut order: Vec<u32> = (1..=col.palette())
        .filter(|&c| !classes[c as usize].is_empty())
        .collect();
    order.sort_by_key(|&c| (classes[c as usize].len(), c));

    for &c in &order {
        for &e in &classes[c as usize] {
            if let Some(path) = greedy_through(g, col, c, e, u, v) {
                debug_assert!(conflict_free_vertex_path(g, col, &path));
                return Ok(Some(path));
            }
        }
    }
    for &c in &order {
        for &e in &classes[c as usize] {
            if let Some(path) = exhaustive_through(g, col, c, e, u, v) {
                debug_assert!(conflict_free_vertex_path(g, col, &path));
                return Ok(Some(path));
            }
        }
    }
    Ok(None)
}

/// Greedy two-leg composition through edge `e` of color `c`: a shortest
/// leg to one endpoint, then a disjoint leg from the other endpoint, in
/// all four orientations. Sound but incomplete.
fn greedy_through(
    g: &Graph,
    col: &EdgeColoring,
    c: u32,
    e: usize,
    u: usize,
    v: usize,
) -> Option<Vec<usize>> {
    let (x, y) = g.endpoints(e);
    let avoid_c = |eid: usize| col.color(eid) != c;
    // (first leg start, via, then other endpoint, second leg end)
    let plans = [(u, x, y, v), (u, y, x, v), (v, x, y, u), (v, y, x, u)];
    for (a, via, other, b) in plans {
        let leg1 = match tree_path(&bfs_tree(g, a, false, None, avoid_c), via) {
            Some(p) => p, // via .. a
            None => continue,
        };
        let mut blocked = vec![false; g.n()];
        for &w in &leg1 {
            blocked[w] = true;
        }
        let t2 = bfs_tree(g, other, false, Some(&blocked), avoid_c);
        let leg2 = match tree_path(&t2, b) {
            Some(p) => p, // b .. other
            None => continue,
        };
        // stitch a..via, other..b and flip so the result runs u -> v
        let mut path: Vec<usize> = leg1.into_iter().rev().collect(); // a .. via
        path.extend(leg2.into_iter().rev()); // other .. b
        if path[0] == v {
            path.reverse();
        }
        debug_assert_eq!((path[0], *path.last().unwrap()), (u, v));
        return Some(path);
    }
    None
}

/// Exhaustive search for a simple u-v path through `e` with no other
/// c-colored edge. Complete: returns None only when no such path exists.
/// A reachability prune keeps the backtracking shallow.
fn exhaustive_through(
    g: &Graph,
    col: &EdgeColoring,
    c: u32,
    e: usize,
    u: usize,
    v: usize,
) -> Option<Vec<usize>> {
    let (ex, ey) = g.endpoints(e);
    let mut visited = vec![false; g.n()];
    visited[u] = true;
    let mut path = vec![u];
    if dfs_through(g, col, c, e, (ex, ey), v, u, false, &mut visited, &mut path) {
        Some(path)
    } else {
        None
    }
}

#[allow(clippy::too_many_arguments)]
fn dfs_through(
    g: &Graph,
    col: &EdgeColoring,
    c: u32,
    e: usize,
    e_ends: (usize, usize),
    v: usize,
    cur: usize,
    used: bool,
    visited: &mut Vec<bool>,
    path: &mut Vec<usize>,
) -> bool {
    // Reachability prune over allowed edges and unvisited vertices: the
    // target must stay reachable, and so must an endpoint of `e` while it
    // is unused. Sound because the flood ignores ordering constraints.
    let mut reach = vec![false; g.n()];
    reach[cur] = true;
    let mut queue = VecDeque::from([cur]);
    while let Some(a) = queue.pop_front() {
        for &(b, eid) in g.neighbors(a) {
            if reach[b] || (visited[b] && b != v) {
                continue;
            }
            if col.color(eid) == c && eid != e {
                continue;
            }
            reach[b] = true;
            queue.push_back(b);
        }
    }
    if !reach[v] {
        return false;
    }
    if !used && !reach[e_ends.0] && !reach[e_ends.1] {
        return false;
    }

    for &(w, eid) in g.neighbors(cur) {
        let crossing = eid == e;
        if col.color(eid) == c && !crossing {
            continue;
        }
        let now_used = used || crossing;
        if w == v {
            if now_used {
                path.push(v);
                return true;
            }
            continue;
        }
        if visited[w] {
            continue;
        }
        visited[w] = true;
        path.push(w);
        if dfs_through(g, col, c, e, e_ends, v, w, now_used, visited, path) {
            return true;
        }
        path.pop();
        visited[w] = false;
    }
    false
}

// --- the certifying checker --------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertStatus {
    Certified,
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub pair: (usize, usize),
    /// Vertex sequence of a verified conflict-free path.
    pub path: Vec<usize>,
}

/// Outcome of [`is_conflict_free_connected`]. Fields serialize with sorted
/// keys; `witnesses` appears as `sampled_witnesses` in JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CfcCertificate {
    /// Lexicographically first pair with no conflict-free path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_pair: Option<(usize, usize)>,
    /// All witnesses when n <= [`WITNESS_STORE_MAX_N`], else the
    /// lexicographically first [`SAMPLED_WITNESSES`] of them.
    #[serde(rename = "sampled_witnesses")]
    pub witnesses: Vec<PairWitness>,
    pub status: CertStatus,
    /// Number of vertex pairs with a verified conflict-free path.
    pub witness_count: u64,
    /// True when `witnesses` is a sample rather than the full set.
    #[serde(skip)]
    pub sampled: bool,
}

impl CfcCertificate {
    pub fn certified(&self) -> bool {
        self.status == CertStatus::Certified
    }
}

fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// Decide whether `col` makes `g` conflict-free connected, with a
/// certificate either way. Pairs are scanned lexicographically; a
/// refutation reports the first failing pair. Errors on disconnected
/// input, where no coloring can work.
pub fn is_conflict_free_connected(
    g: &Graph,
    col: &EdgeColoring,
) -> Result<CfcCertificate, CfcError> {
    check_matches(g, col)?;
    if !is_connected(g) {
        return Err(CfcError::Disconnected);
    }
    let n = g.n();
    let pairs = n * n.saturating_sub(1) / 2;
    let store_all = n <= WITNESS_STORE_MAX_N;
    let mut done = vec![false; pairs];
    let mut witnesses: Vec<Option<Vec<usize>>> = vec![None; if store_all { pairs } else { 0 }];
    let mut sampled_store: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut remaining = pairs;

    let record = |pi: usize,
                      path: Vec<usize>,
                      done: &mut Vec<bool>,
                      witnesses: &mut Vec<Option<Vec<usize>>>,
                      sampled_store: &mut Vec<(usize, Vec<usize>)>,
                      remaining: &mut usize| {
        debug_assert!(!done[pi]);
        debug_assert!(conflict_free_vertex_path(g, col, &path));
        done[pi] = true;
        *remaining -= 1;
        if store_all {
            witnesses[pi] = Some(path);
        } else if pi < SAMPLED_WITNESSES {
            sampled_store.push((pi, path));
        }
    };

    // Sweep 1: BFS tree paths, ascending then descending neighbor order.
    let mut counts = vec![0u32; col.palette() as usize + 1];
    for descending in [false, true] {
        if remaining == 0 {
            break;
        }
        for u in 0..n {
            let tree = bfs_tree(g, u, descending, None, |_| true);
            for v in (u + 1)..n {
                let pi = pair_index(n, u, v);
                if done[pi] {
                    continue;
                }
                // walk the parent chain v -> u, counting colors
                counts.iter_mut().for_each(|c| *c = 0);
                let mut cur = v;
                while tree.parent[cur] != UNREACHED {
                    let p = tree.parent[cur];
                    let e = g.edge_between(cur, p).expect("tree edge");
                    counts[col.color(e) as usize] += 1;
                    cur = p;
                }
                debug_assert_eq!(cur, u, "connected graph reaches every vertex");
                if counts.iter().any(|&c| c == 1) {
                    let mut path = tree_path(&tree, v).expect("reached");
                    path.reverse();
                    record(
                        pi,
                        path,
                        &mut done,
                        &mut witnesses,
                        &mut sampled_store,
                        &mut remaining,
                    );
                }
            }
        }
    }

    // Sweep 2: one-crossing walks per color, amortized one BFS per source.
    for c in 1..=col.palette() {
        if remaining == 0 {
            break;
        }
        for u in 0..n {
            if (u + 1..n).all(|v| done[pair_index(n, u, v)]) {
                continue;
            }
            let walk = crossing_walk(g, col, c, u);
            for v in (u + 1)..n {
                let pi = pair_index(n, u, v);
                if done[pi] {
                    continue;
                }
                if let Some(path) = simple_crossing_path(&walk, n, v) {
                    record(
                        pi,
                        path,
                        &mut done,
                        &mut witnesses,
                        &mut sampled_store,
                        &mut remaining,
                    );
                }
            }
        }
    }

    // Sweep 3: for single-edge color classes, compose disjoint legs around
    // the lone edge. This is the shape of constructed colorings, where one
    // designated edge carries color 2.
    if remaining > 0 {
        let classes = color_classes(col);
        for c in 1..=col.palette() {
            if remaining == 0 {
                break;
            }
            if classes[c as usize].len() != 1 {
                continue;
            }
            let e = classes[c as usize][0];
            let (x, y) = g.endpoints(e);
            let avoid_c = |eid: usize| col.color(eid) != c;
            let tx = bfs_tree(g, x, false, None, avoid_c);
            let ty = bfs_tree(g, y, false, None, avoid_c);
            let mut stamp = vec![usize::MAX; n];
            for u in 0..n {
                for v in (u + 1)..n {
                    let pi = pair_index(n, u, v);
                    if done[pi] {
                        continue;
                    }
                    if let Some(path) = compose_disjoint(&tx, &ty, u, v, &mut stamp, pi) {
                        record(
                            pi,
                            path,
                            &mut done,
                            &mut witnesses,
                            &mut sampled_store,
                            &mut remaining,
                        );
                    }
                }
            }
        }
    }

    // Final pass: the complete per-pair search decides everything left.
    if remaining > 0 {
        for u in 0..n {
            for v in (u + 1)..n {
                let pi = pair_index(n, u, v);
                if done[pi] {
                    continue;
                }
                match exists_conflict_free_path(g, col, u, v)? {
                    Some(path) => record(
                        pi,
                        path,
                        &mut done,
                        &mut witnesses,
                        &mut sampled_store,
                        &mut remaining,
                    ),
                    None => {
                        return Ok(CfcCertificate {
                            failing_pair: Some((u, v)),
                            witnesses: Vec::new(),
                            status: CertStatus::Refuted,
                            witness_count: (pairs - remaining) as u64,
                            sampled: false,
                        });
                    }
                }
            }
        }
    }

    // Assemble the certificate; stored witnesses get re-validated through
    // the public path predicate.
    let mut out = Vec::new();
    if store_all {
        for u in 0..n {
            for v in (u + 1)..n {
                let path = witnesses[pair_index(n, u, v)].take().expect("all done");
                debug_assert!(is_conflict_free_path(g, col, &edge_ids_of(g, &path))?);
                out.push(PairWitness { pair: (u, v), path });
            }
        }
    } else {
        sampled_store.sort_by_key(|&(pi, _)| pi);
        for (pi, path) in sampled_store {
            let u = (0..n)
                .find(|&u| pair_index(n, u, u + 1) <= pi && pi <= pair_index(n, u, n - 1))
                .expect("pair index in range");
            let v = u + 1 + (pi - pair_index(n, u, u + 1));
            debug_assert!(is_conflict_free_path(g, col, &edge_ids_of(g, &path))?);
            out.push(PairWitness { pair: (u, v), path });
        }
    }
    Ok(CfcCertificate {
        failing_pair: None,
        witnesses: out,
        status: CertStatus::Certified,
        witness_count: pairs as u64,
        sampled: !store_all && pairs > SAMPLED_WITNESSES,
    })
}

/// Stitch tree paths u -> x and y -> v (trees rooted at the endpoints of a
/// single c-colored edge) when they are vertex-disjoint. `stamp` is an
/// epoch-marked scratch array keyed by `epoch`.
fn compose_disjoint(
    tx: &BfsTree,
    ty: &BfsTree,
    u: usize,
    v: usize,
    stamp: &mut [usize],
    epoch: usize,
) -> Option<Vec<usize>> {
    for (ta, tb, a, b) in [(tx, ty, u, v), (ty, tx, u, v)] {
        let leg1 = match tree_path(ta, a) {
            Some(p) => p, // a .. root(ta)
            None => continue,
        };
        let leg2 = match tree_path(tb, b) {
            Some(p) => p, // b .. root(tb)
            None => continue,
        };
        for &w in &leg1 {
            stamp[w] = 2 * epoch;
        }
        if leg2.iter().any(|&w| stamp[w] == 2 * epoch) {
            // mark a dead epoch so the next orientation starts clean
            for &w in &leg1 {
                stamp[w] = 2 * epoch + 1;
            }
            continue;
        }
        let mut path = leg1; // a .. x
        path.extend(leg2.into_iter().rev()); // y .. b
        if path[0] == v {
            path.reverse();
        }
        return Some(path);
    }
    None
}

// --- pendant matching and the constructive pipeline -------------------------

/// Matching of every small vertex to a private large neighbor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendantMatching {
    /// (small, large) pairs sorted by the small vertex.
    pub pairs: Vec<(usize, usize)>,
    /// Edge ids of the matching, aligned with `pairs`.
    pub edge_ids: Vec<usize>,
}

/// Match each small vertex to its own large neighbor: greedy first (when
/// small vertices share no neighbors the first pick always works), full
/// augmenting-path matching when the greedy pass collides. Failure names a
/// small vertex no matching can saturate.
pub fn build_pendant_matching(
    g: &Graph,
    part: &VertexPartition,
) -> Result<PendantMatching, CfcError> {
    let mut is_large = vec![false; g.n()];
    for &v in &part.large {
        is_large[v] = true;
    }
    let mut used = vec![false; g.n()];
    let mut pairs = Vec::with_capacity(part.small.len());
    let mut collided = false;
    for &s in &part.small {
        match g
            .neighbors(s)
            .iter()
            .map(|&(w, _)| w)
            .find(|&w| is_large[w] && !used[w])
        {
            Some(w) => {
                used[w] = true;
                pairs.push((s, w));
            }
            None => {
                collided = true;
                break;
            }
        }
    }
    if collided {
        pairs = kuhn_matching(g, &part.small, &is_large)?;
    }
    let edge_ids = pairs
        .iter()
        .map(|&(s, l)| g.edge_between(s, l).expect("matching uses real edges"))
        .collect();
    Ok(PendantMatching { pairs, edge_ids })
}

fn kuhn_matching(
    g: &Graph,
    smalls: &[usize],
    is_large: &[bool],
) -> Result<Vec<(usize, usize)>, CfcError> {
    let n = g.n();
    let mut matched_to: Vec<Option<usize>> = vec![None; n]; // large -> small
    for &s in smalls {
        let mut seen = vec![false; n];
        if !augment(g, s, is_large, &mut seen, &mut matched_to) {
            return Err(CfcError::MatchingFailed { small: s });
        }
    }
    let mut pairs: Vec<(usize, usize)> = matched_to
        .iter()
        .enumerate()
        .filter_map(|(l, s)| s.map(|s| (s, l)))
        .collect();
    pairs.sort_unstable();
    Ok(pairs)
}

fn augment(
    g: &Graph,
    s: usize,
    is_large: &[bool],
    seen: &mut Vec<bool>,
    matched_to: &mut Vec<Option<usize>>,
) -> bool {
    for &(w, _) in g.neighbors(s) {
        if !is_large[w] || seen[w] {
            continue;
        }
        seen[w] = true;
        let free = match matched_to[w] {
            None => true,
            Some(prev) => augment(g, prev, is_large, seen, matched_to),
        };
        if free {
            matched_to[w] = Some(s);
            return true;
        }
    }
    false
}

/// Everything the constructive pipeline produced, checker-certified.
#[derive(Debug, Clone)]
pub struct Cfc2Construction {
    pub coloring: EdgeColoring,
    /// Hamilton cycle over the large side, in cycle order.
    pub cycle: Vec<usize>,
    /// Edge ids along the cycle, including the closing edge.
    pub cycle_edges: Vec<usize>,
    pub matching: PendantMatching,
    /// The designated color-2 edge: the lowest edge id on the cycle.
    pub special_edge: usize,
    pub certificate: CfcCertificate,
}

/// Two-color construction: partition by degree, match small vertices into
/// the large side, find a Hamilton cycle on the large side, then color the
/// lowest-id cycle edge 2 and everything else 1. The cycle plus matching
/// spans the graph, so every pair can route through the designated edge.
/// The returned coloring is never trusted: the independent checker runs
/// and its certificate ships with the construction.
pub fn construct_cfc2_coloring(g: &Graph, seed: u64) -> Result<Cfc2Construction, CfcError> {
    if g.n() < 3 {
        return Err(CfcError::TooSmall { n: g.n() });
    }
    if !is_connected(g) {
        return Err(CfcError::Disconnected);
    }
    let part = classify_vertices(g);
    let matching = build_pendant_matching(g, &part)?;
    if part.large.len() < 3 {
        // a cycle needs three vertices; definitive, not a heuristic miss
        return Err(CfcError::HamiltonFailed { exhaustive: true });
    }
    let outcome = hamilton::hamiltonian_cycle_on_subset(
        g,
        &part.large,
        hamilton::DEFAULT_RESTARTS,
        rng::substream(seed, 0),
    )
    .expect("large side is a valid subset");
    let cycle = match outcome {
        HamOutcome::Found(c) => c,
        HamOutcome::NotFoundHeuristic => return Err(CfcError::HamiltonFailed { exhaustive: false }),
        HamOutcome::NotFoundExact => return Err(CfcError::HamiltonFailed { exhaustive: true }),
    };
    let cycle_edges = cycle.edge_ids(g).expect("verified cycle");

    let mut covered = vec![false; g.n()];
    for &v in cycle.vertices() {
        covered[v] = true;
    }
    for &(s, _) in &matching.pairs {
        covered[s] = true;
    }
    if covered.iter().any(|&c| !c) {
        return Err(CfcError::NotSpanning);
    }

    let special_edge = *cycle_edges.iter().min().expect("cycle has edges");
    let mut colors = vec![1u32; g.m()];
    colors[special_edge] = 2;
    let coloring = EdgeColoring::new(2, colors)?;
    let certificate = is_conflict_free_connected(g, &coloring)?;
    if !certificate.certified() {
        return Err(CfcError::ConstructionRefuted {
            pair: certificate.failing_pair.expect("refuted certificate"),
        });
    }
    Ok(Cfc2Construction {
        coloring,
        cycle: cycle.vertices().to_vec(),
        cycle_edges,
        matching,
        special_edge,
        certificate,
    })
}

// --- exact solver and upper-bound ladder -------------------------------------

/// Exact conflict-free connection number by canonical enumeration. The
/// first edge is pinned to color 1 and new colors appear in increasing
/// order, so each set partition of the edges is tested once. k = 1 is
/// equivalent to the graph being complete, which short-circuits the scan.
pub fn cfc_exact(g: &Graph, max_k: u32, edge_budget: usize) -> Result<u32, CfcError> {
    cfc_exact_with_certificate(g, max_k, edge_budget).map(|(k, _, _)| k)
}

/// Same as [`cfc_exact`] but also returns a witness coloring and, for
/// k >= 2, the checker certificate that confirmed it.
pub fn cfc_exact_with_certificate(
    g: &Graph,
    max_k: u32,
    edge_budget: usize,
) -> Result<(u32, EdgeColoring, Option<CfcCertificate>), CfcError> {
    if g.m() > edge_budget {
        return Err(CfcError::EdgeBudget {
            m: g.m(),
            budget: edge_budget,
        });
    }
    if !is_connected(g) {
        return Err(CfcError::Disconnected);
    }
    if g.is_complete() {
        return Ok((1, EdgeColoring::monochromatic(g.m()), None));
    }
    let m = g.m();
    let mut colors = vec![1u32; m];
    for k in 2..=max_k.min(m as u32) {
        if let Some(found) = enumerate_canonical(g, &mut colors, 1, 1, k)? {
            return Ok((k, found.0, Some(found.1)));
        }
    }
    Err(CfcError::PaletteExceeded { max_k })
}

/// Recursive canonical enumeration: position `pos`, current max color
/// `maxc`, target palette exactly `k`. Stops at the first certified
/// coloring.
fn enumerate_canonical(
    g: &Graph,
    colors: &mut Vec<u32>,
    pos: usize,
    maxc: u32,
    k: u32,
) -> Result<Option<(EdgeColoring, CfcCertificate)>, CfcError> {
    let m = colors.len();
    if pos == m {
        if maxc != k {
            return Ok(None);
        }
        let col = EdgeColoring::new(k, colors.clone())?;
        let cert = is_conflict_free_connected(g, &col)?;
        if cert.certified() {
            return Ok(Some((col, cert)));
        }
        return Ok(None);
    }
    // not enough positions left to introduce the missing colors
    if maxc + ((m - pos) as u32) < k {
        return Ok(None);
    }
    for c in 1..=(maxc + 1).min(k) {
        colors[pos] = c;
        if let Some(found) = enumerate_canonical(g, colors, pos + 1, maxc.max(c), k)? {
            return Ok(Some(found));
        }
    }
    colors[pos] = 1;
    Ok(None)
}

/// How an upper bound was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CfcMethod {
    Complete,
    Constructive,
    Randomized,
    Exact,
    Trivial,
}

impl CfcMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CfcMethod::Complete => "complete",
            CfcMethod::Constructive => "constructive",
            CfcMethod::Randomized => "randomized",
            CfcMethod::Exact => "exact",
            CfcMethod::Trivial => "trivial",
        }
    }
}

/// Result of the [`cfc_upper`] ladder.
#[derive(Debug, Clone)]
pub struct CfcUpper {
    pub bound: u32,
    pub method: CfcMethod,
    pub coloring: Option<EdgeColoring>,
    /// Present for checker-backed bounds (constructive, randomized, and
    /// exact with k >= 2). Complete and trivial bounds need no checker.
    pub certificate: Option<CfcCertificate>,
}

/// Cheapest-first upper bound on cfc(G):
/// complete graphs are 1; the constructive pipeline gives a certified 2;
/// failing that, up to [`RANDOM_COLORING_TRIES`] random 2-colorings may
/// still certify 2; small instances fall back to the exact solver; and the
/// all-distinct coloring always witnesses m.
pub fn cfc_upper(g: &Graph, seed: u64) -> Result<CfcUpper, CfcError> {
    if !is_connected(g) {
        return Err(CfcError::Disconnected);
    }
    if g.is_complete() {
        return Ok(CfcUpper {
            bound: 1,
            method: CfcMethod::Complete,
            coloring: Some(EdgeColoring::monochromatic(g.m())),
            certificate: None,
        });
    }
    match construct_cfc2_coloring(g, rng::substream(seed, 0)) {
        Ok(c) => {
            return Ok(CfcUpper {
                bound: 2,
                method: CfcMethod::Constructive,
                coloring: Some(c.coloring),
                certificate: Some(c.certificate),
            })
        }
        Err(
            CfcError::MatchingFailed { .. }
            | CfcError::HamiltonFailed { .. }
            | CfcError::NotSpanning,
        ) => {}
        Err(e) => return Err(e),
    }
    for i in 0..RANDOM_COLORING_TRIES {
        let mut r = rng::stream(rng::substream(seed, 1 + i));
        let colors: Vec<u32> = (0..g.m()).map(|_| if r.gen_bool(0.5) { 1 } else { 2 }).collect();
        let col = EdgeColoring::new(2, colors)?;
        let cert = is_conflict_free_connected(g, &col)?;
        if cert.certified() {
            return Ok(CfcUpper {
                bound: 2,
                method: CfcMethod::Randomized,
                coloring: Some(col),
                certificate: Some(cert),
            });
        }
    }
    if g.m() <= DEFAULT_EDGE_BUDGET {
        let (k, col, cert) = cfc_exact_with_certificate(g, g.m() as u32, DEFAULT_EDGE_BUDGET)?;
        return Ok(CfcUpper {
            bound: k,
            method: CfcMethod::Exact,
            coloring: Some(col),
            certificate: cert,
        });
    }
    Ok(CfcUpper {
        bound: g.m() as u32,
        method: CfcMethod::Trivial,
        coloring: Some(EdgeColoring::all_distinct(g.m())),
        certificate: None,
    })
}

// ---------------------------------------------------------------------------
