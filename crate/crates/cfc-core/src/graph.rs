//! Graph storage plus the random graph generators used across the crate.
//!
//! Vertices are `0..n`. Edges are undirected, simple, and carry dense ids
//! `0..m` assigned in insertion order. Adjacency lists hold `(neighbor,
//! edge id)` pairs sorted by neighbor, so neighbor scans are deterministic.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate vertex {0} in set")]
    DuplicateVertex(usize),
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("n*r must be even for an r-regular graph (n={n}, r={r})")]
    OddRegularity { n: usize, r: usize },
    #[error("r-regular graph needs r < n (n={n}, r={r})")]
    DegreeTooLarge { n: usize, r: usize },
    #[error("no simple {r}-regular graph found after {attempts} pairing attempts")]
    RegularRetriesExhausted { r: usize, attempts: usize },
    #[error("sets overlap at vertex {0}")]
    SetsOverlap(usize),
}

/// Undirected simple graph with dense edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Build a graph from an edge list. Endpoints are normalized to
    /// `(min, max)`; a duplicate edge collapses onto its first occurrence.
    /// Self-loops and out-of-range endpoints are rejected.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut list = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n {
                return Err(GraphError::VertexOutOfRange { vertex: a, n });
            }
            if b >= n {
                return Err(GraphError::VertexOutOfRange { vertex: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                list.push(key);
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (id, &(u, v)) in list.iter().enumerate() {
            adj[u].push((v, id));
            adj[v].push((u, id));
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// All edges as `(u, v)` with `u < v`, indexed by edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// `(neighbor, edge id)` pairs of `v`, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    /// Edge id joining `u` and `v`, if present.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n || u == v {
            return None;
        }
        self.adj[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_between(u, v).is_some()
    }

    pub fn is_complete(&self) -> bool {
        self.m() == self.n * self.n.saturating_sub(1) / 2
    }

    fn mask(&self, s: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &v in s {
            assert!(v < self.n, "vertex {v} out of range");
            mask[v] = true;
        }
        mask
    }

    /// e(S): number of edges with both endpoints in `s`.
    pub fn edges_within(&self, s: &[usize]) -> usize {
        let mask = self.mask(s);
        self.edges
            .iter()
            .filter(|&&(u, v)| mask[u] && mask[v])
            .count()
    }

    /// e(X, Y): number of edges with one endpoint in `x` and the other in
    /// `y`. The sets must be disjoint.
    pub fn edges_between(&self, x: &[usize], y: &[usize]) -> Result<usize, GraphError> {
        let mx = self.mask(x);
        let my = self.mask(y);
        if let Some(v) = (0..self.n).find(|&v| mx[v] && my[v]) {
            return Err(GraphError::SetsOverlap(v));
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(u, v)| (mx[u] && my[v]) || (my[u] && mx[v]))
            .count())
    }

    /// N(U, S): vertices of `s` outside `u_set` adjacent to some vertex of
    /// `u_set`. Sorted ascending.
    pub fn neighbors_in(&self, u_set: &[usize], s: &[usize]) -> Vec<usize> {
        let mu = self.mask(u_set);
        let ms = self.mask(s);
        (0..self.n)
            .filter(|&w| ms[w] && !mu[w] && self.adj[w].iter().any(|&(x, _)| mu[x]))
            .collect()
    }

    /// d_S(v): number of neighbors of `v` inside `s`.
    pub fn degree_in(&self, v: usize, s: &[usize]) -> usize {
        let ms = self.mask(s);
        self.adj[v].iter().filter(|&&(w, _)| ms[w]).count()
    }

    /// Induced subgraph on `verts` (distinct, in range). Returns the
    /// subgraph and the map from new vertex ids back to the originals.
    /// Edge ids are renumbered.
    pub fn induced(&self, verts: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
            if local[v] != usize::MAX {
                return Err(GraphError::DuplicateVertex(v));
            }
            local[v] = i;
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(u, v)| local[u] != usize::MAX && local[v] != usize::MAX)
            .map(|&(u, v)| (local[u], local[v]))
            .collect();
        Ok((Graph::build(verts.len(), &edges)?, verts.to_vec()))
    }
}

/// G(n, p) with a fixed scan order: pairs (u, v), u < v, lexicographic.
///
/// Each pair is an independent Bernoulli(p) draw realized as an integer
/// threshold test on the next 64-bit stream output, so the same (n, p, seed)
/// reproduces the same edge set bit for bit on any platform.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    let mut rng = rng::stream(seed);
    // p * 2^64 as a u128 so that p = 1.0 keeps every pair.
    let threshold = (p * 18_446_744_073_709_551_616.0) as u128;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if (rng.next_u64() as u128) < threshold {
                edges.push((u, v));
            }
        }
    }
    Graph::build(n, &edges)
}

/// Attempt cap for the pairing model in [`gen_random_regular`].
pub const REGULAR_MAX_ATTEMPTS: usize = 1000;

/// Random r-regular graph via the pairing model: r stubs per vertex, a
/// uniform matching on the stubs, resampled until the result is simple.
/// For r = 3 the acceptance rate is about e^-2, so the cap of
/// [`REGULAR_MAX_ATTEMPTS`] is generous. Attempt `i` draws from
/// `substream(seed, i)`.
pub fn gen_random_regular(n: usize, r: usize, seed: u64) -> Result<Graph, GraphError> {
    if r >= n {
        return Err(GraphError::DegreeTooLarge { n, r });
    }
    if n * r % 2 == 1 {
        return Err(GraphError::OddRegularity { n, r });
    }
    for attempt in 0..REGULAR_MAX_ATTEMPTS {
        let mut rng = rng::stream(rng::substream(seed, attempt as u64));
        let mut stubs: Vec<usize> = (0..n * r).map(|i| i / r).collect();
        stubs.shuffle(&mut rng);
        let mut seen = HashSet::with_capacity(n * r / 2);
        let mut edges = Vec::with_capacity(n * r / 2);
        let mut simple = true;
        for pair in stubs.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                simple = false;
                break;
            }
            edges.push((a, b));
        }
        if simple {
            return Graph::build(n, &edges);
        }
    }
    Err(GraphError::RegularRetriesExhausted {
        r,
        attempts: REGULAR_MAX_ATTEMPTS,
    })
}

/// (ln n + a) / n, clamped into [0, 1].
pub fn threshold_p(n: usize, a: f64) -> f64 {
    assert!(n >= 2, "threshold_p needs n >= 2");
    (((n as f64).ln() + a) / n as f64).clamp(0.0, 1.0)
}

#[derive(Debug, thiserror::Error)]
pub enum EdgeListError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T, EdgeListError> {
    Err(EdgeListError::Parse {
        line,
        msg: msg.into(),
    })
}

/// Write the text edge-list format: a `n m` header, then one `u v` line per
/// edge in ascending edge-id order.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{} {}", g.n(), g.m())?;
    for &(u, v) in g.edges() {
        writeln!(w, "{} {}", u, v)?;
    }
    Ok(())
}

/// Read the text edge-list format produced by [`write_edge_list`].
///
/// The reader is strict: exactly the advertised number of edge lines, two
/// tokens per line, vertices in range, no self-loops, no duplicate edges.
/// Errors carry 1-based line numbers.
pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph, EdgeListError> {
    let mut lines = r.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return parse_err(1, "missing 'n m' header"),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return parse_err(1, "header must be 'n m'");
    }
    let n: usize = match fields[0].parse() {
        Ok(v) => v,
        Err(_) => return parse_err(1, format!("bad vertex count '{}'", fields[0])),
    };
    let m: usize = match fields[1].parse() {
        Ok(v) => v,
        Err(_) => return parse_err(1, format!("bad edge count '{}'", fields[1])),
    };
    let mut edges = Vec::with_capacity(m);
    let mut seen = HashSet::with_capacity(m);
    for i in 0..m {
        let lineno = i + 2;
        let line = match lines.next() {
            Some(line) => line?,
            None => return parse_err(lineno, format!("expected {m} edge lines, found {i}")),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return parse_err(lineno, "edge line must be 'u v'");
        }
        let parse_vertex = |tok: &str| -> Result<usize, EdgeListError> {
            let v: usize = tok.parse().map_err(|_| EdgeListError::Parse {
                line: lineno,
                msg: format!("bad vertex '{tok}'"),
            })?;
            if v >= n {
                return parse_err(lineno, format!("vertex {v} out of range (n={n})"));
            }
            Ok(v)
        };
        let u = parse_vertex(fields[0])?;
        let v = parse_vertex(fields[1])?;
        if u == v {
            return parse_err(lineno, format!("self-loop at vertex {u}"));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return parse_err(lineno, format!("duplicate edge {u} {v}"));
        }
        edges.push((u, v));
    }
    for (i, line) in lines.enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            return parse_err(m + 2 + i, "unexpected extra line");
        }
    }
    Graph::build(n, &edges).map_err(|e| EdgeListError::Parse {
        line: 0,
        msg: e.to_string(),
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::build(n, &edges).unwrap()
    }

    #[test]
    fn build_triangle() {
        let g = Graph::build(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.degree(2), 2);
        assert!(g.is_complete());
    }

    #[test]
    fn build_collapses_duplicates() {
        // (1,0) repeats (0,1) after normalization
        let g = Graph::build(3, &[(0, 1), (1, 2), (1, 0)]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.endpoints(0), (0, 1));
        assert_eq!(g.endpoints(1), (1, 2));
    }

    #[test]
    fn build_rejects_self_loop_and_range() {
        assert_eq!(
            Graph::build(3, &[(2, 2)]).unwrap_err(),
            GraphError::SelfLoop(2)
        );
        assert_eq!(
            Graph::build(3, &[(0, 3)]).unwrap_err(),
            GraphError::VertexOutOfRange { vertex: 3, n: 3 }
        );
    }

    #[test]
    fn adjacency_is_sorted_with_edge_ids() {
        let g = Graph::build(4, &[(2, 0), (0, 1), (0, 3)]).unwrap();
        let nbrs: Vec<usize> = g.neighbors(0).iter().map(|&(w, _)| w).collect();
        assert_eq!(nbrs, vec![1, 2, 3]);
        assert_eq!(g.edge_between(0, 2), Some(0));
        assert_eq!(g.edge_between(1, 0), Some(1));
        assert_eq!(g.edge_between(1, 3), None);
    }

    #[test]
    fn set_queries_match_hand_counts() {
        // C5 with one chord (1,3)
        let g = Graph::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)]).unwrap();
        assert_eq!(g.edges_within(&[1, 2, 3]), 3);
        // crossing edges are (4,0) and the chord (1,3); (3,4) sits inside Y
        assert_eq!(g.edges_between(&[0, 1], &[3, 4]).unwrap(), 2);
        assert_eq!(
            g.edges_between(&[0, 1], &[1, 2]).unwrap_err(),
            GraphError::SetsOverlap(1)
        );
        assert_eq!(g.neighbors_in(&[1], &[0, 2, 3, 4]), vec![0, 2, 3]);
        assert_eq!(g.degree_in(3, &[1, 2, 0]), 2);
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = Graph::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let (sub, map) = g.induced(&[1, 2, 3]).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.m(), 2);
        assert_eq!(map, vec![1, 2, 3]);
        assert!(g.induced(&[1, 1]).is_err());
    }

    #[test]
    fn gnp_extremes() {
        let g = gen_gnp(5, 1.0, 7).unwrap();
        assert_eq!(g.m(), 10);
        assert!(g.is_complete());
        let g = gen_gnp(5, 0.0, 7).unwrap();
        assert_eq!(g.m(), 0);
        assert!(gen_gnp(5, 1.5, 7).is_err());
        assert!(gen_gnp(5, f64::NAN, 7).is_err());
    }

    #[test]
    fn gnp_is_deterministic_per_seed() {
        let a = gen_gnp(60, 0.1, 123).unwrap();
        let b = gen_gnp(60, 0.1, 123).unwrap();
        let c = gen_gnp(60, 0.1, 124).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn gnp_edge_count_near_binomial_mean() {
        // Binomial(C(1000,2), 0.01): mean 4995, sd ~70.3. A 4-sigma band
        // keeps this deterministic check honest without being brittle.
        let pairs: f64 = 1000.0 * 999.0 / 2.0;
        let mean = pairs * 0.01;
        let sd = (pairs * 0.01 * 0.99).sqrt();
        let g = gen_gnp(1000, 0.01, 42).unwrap();
        let m = g.m() as f64;
        assert!((m - mean).abs() < 4.0 * sd, "m={m} too far from {mean}");
    }

    #[test]
    fn regular_k4_is_forced() {
        // K4 is the only simple 3-regular graph on 4 vertices.
        let g = gen_random_regular(4, 3, 99).unwrap();
        assert!(g.is_complete());
        assert_eq!(g.m(), 6);
    }

    #[test]
    fn regular_degrees_audit() {
        for seed in 0..5 {
            let g = gen_random_regular(50, 3, seed).unwrap();
            assert_eq!(g.m(), 75);
            assert!((0..50).all(|v| g.degree(v) == 3));
        }
    }

    #[test]
    fn regular_rejects_odd_product_and_big_r() {
        assert_eq!(
            gen_random_regular(5, 3, 0).unwrap_err(),
            GraphError::OddRegularity { n: 5, r: 3 }
        );
        assert_eq!(
            gen_random_regular(4, 4, 0).unwrap_err(),
            GraphError::DegreeTooLarge { n: 4, r: 4 }
        );
    }

    #[test]
    fn threshold_p_values() {
        let p = threshold_p(1000, 0.0);
        assert!((p - 0.006908).abs() < 1e-6);
        assert_eq!(threshold_p(10, -100.0), 0.0);
        assert_eq!(threshold_p(2, 100.0), 1.0);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = path(6);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let cases = [
            ("", 1),
            ("3", 1),
            ("3 2\n0 1", 3),
            ("3 1\n0 x", 2),
            ("3 1\n0 0", 2),
            ("3 1\n0 9", 2),
            ("3 2\n0 1\n1 0", 3),
            ("3 1\n0 1\njunk", 3),
        ];
        for (input, want_line) in cases {
            match read_edge_list(input.as_bytes()) {
                Err(EdgeListError::Parse { line, .. }) => {
                    assert_eq!(line, want_line, "input {input:?}");
                }
                other => panic!("input {input:?}: expected parse error, got {other:?}"),
            }
        }
    }
}
