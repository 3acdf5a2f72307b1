//! Connectivity and cut structure, plus the degree-based vertex partition
//! and its sanity checks.
//!
//! The partition splits vertices at degree ln(n)/10: everything below is
//! "small", everything at or above is "large". The sampled checks probe the
//! edge-density and expansion properties that make the small side rare and
//! spread out in random graphs near the connectivity threshold. A sampled
//! pass is evidence, not proof; a sampled violation is conclusive.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::graph::Graph;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("graph is not connected")]
    Disconnected,
}

/// BFS reachability from vertex 0. The empty graph counts as connected.
pub fn is_connected(g: &Graph) -> bool {
    if g.n() == 0 {
        return true;
    }
    let mut seen = vec![false; g.n()];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &(w, _) in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == g.n()
}

/// Bridges and articulation points, plus the subgraph C(G) of cut edges.
#[derive(Debug, Clone)]
pub struct CutStructure {
    /// Edge ids of bridges, ascending.
    pub bridges: Vec<usize>,
    /// Articulation points, ascending.
    pub articulation_points: Vec<usize>,
    /// C(G): the host vertex set with exactly the bridge edges. Edge ids in
    /// this subgraph are renumbered.
    pub cut_edge_subgraph: Graph,
}

/// One low-link DFS over every component. Iterative so deep DFS trees on
/// sparse random graphs cannot overflow the stack.
pub fn find_bridges(g: &Graph) -> CutStructure {
    let n = g.n();
    let mut ord = vec![usize::MAX; n];
    let mut low = vec![usize::MAX; n];
    let mut is_artic = vec![false; n];
    let mut bridges = Vec::new();
    let mut timer = 0;

    // Stack frames: (vertex, edge id used to enter it, next adjacency index).
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if ord[root] != usize::MAX {
            continue;
        }
        ord[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut root_children = 0;
        stack.push((root, usize::MAX, 0));
        while let Some(frame) = stack.last_mut() {
            let (v, parent_edge, i) = (frame.0, frame.1, frame.2);
            if i < g.degree(v) {
                frame.2 += 1;
                let (w, e) = g.neighbors(v)[i];
                if e == parent_edge {
                    continue;
                }
                if ord[w] == usize::MAX {
                    ord[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    if v == root {
                        root_children += 1;
                    }
                    stack.push((w, e, 0));
                } else {
                    low[v] = low[v].min(ord[w]);
                }
            } else {
                stack.pop();
                if let Some(up) = stack.last() {
                    let u = up.0;
                    low[u] = low[u].min(low[v]);
                    if low[v] > ord[u] {
                        bridges.push(parent_edge);
                    }
                    if u != root && low[v] >= ord[u] {
                        is_artic[u] = true;
                    }
                }
            }
        }
        if root_children >= 2 {
            is_artic[root] = true;
        }
    }
    bridges.sort_unstable();
    let bridge_edges: Vec<(usize, usize)> = bridges.iter().map(|&e| g.endpoints(e)).collect();
    CutStructure {
        bridges,
        articulation_points: (0..n).filter(|&v| is_artic[v]).collect(),
        cut_edge_subgraph: Graph::build(n, &bridge_edges).expect("bridge edges are valid"),
    }
}

/// Connected, n >= 2, and bridge-free.
pub fn is_two_edge_connected(g: &Graph) -> bool {
    g.n() >= 2 && is_connected(g) && find_bridges(g).bridges.is_empty()
}

/// Connected, n >= 3, and without articulation points.
pub fn is_two_connected(g: &Graph) -> bool {
    g.n() >= 3 && is_connected(g) && find_bridges(g).articulation_points.is_empty()
}

/// Does every component of C(G) consist of a single edge? Equivalently, no
/// vertex lies on two bridges. Vacuously true without bridges. Errors on
/// disconnected input; the condition speaks about connected graphs only.
pub fn cjv_condition(g: &Graph) -> Result<bool, StructureError> {
    if !is_connected(g) {
        return Err(StructureError::Disconnected);
    }
    let cut = find_bridges(g);
    let mut incident = vec![0u32; g.n()];
    for &e in &cut.bridges {
        let (u, v) = g.endpoints(e);
        incident[u] += 1;
        incident[v] += 1;
    }
    Ok(incident.into_iter().all(|c| c <= 1))
}

/// Degree-threshold partition of the vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPartition {
    /// Vertices of degree < ln(n)/10, ascending.
    pub small: Vec<usize>,
    /// Vertices of degree >= ln(n)/10, ascending. Ties count as large.
    pub large: Vec<usize>,
    pub threshold: f64,
}

/// Split vertices at degree ln(n)/10. Needs n >= 2 so the threshold is
/// meaningful. Below n = e^10 (about 22026) the threshold is under 1, so
/// only isolated vertices are small.
pub fn classify_vertices(g: &Graph) -> VertexPartition {
    assert!(g.n() >= 2, "classify_vertices needs n >= 2");
    let threshold = (g.n() as f64).ln() / 10.0;
    let (small, large): (Vec<usize>, Vec<usize>) =
        (0..g.n()).partition(|&v| (g.degree(v) as f64) < threshold);
    VertexPartition {
        small,
        large,
        threshold,
    }
}

/// Outcome of one named check, sampled or exhaustive.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    /// Set when the check did not apply (for example, n too small for the
    /// size bounds); `pass` is then vacuously true.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub pass: bool,
    /// True when only sampled evidence backs a pass.
    pub sampled: bool,
    pub trials: u64,
    pub witnesses: Vec<String>,
}

impl CheckReport {
    fn exhaustive(name: &str) -> Self {
        CheckReport {
            check_name: name.to_string(),
            note: None,
            pass: true,
            sampled: false,
            trials: 0,
            witnesses: Vec::new(),
        }
    }

    fn sampled(name: &str, trials: u64) -> Self {
        CheckReport {
            check_name: name.to_string(),
            note: None,
            pass: true,
            sampled: true,
            trials,
            witnesses: Vec::new(),
        }
    }

    fn not_applicable(name: &str, why: &str) -> Self {
        CheckReport {
            check_name: name.to_string(),
            note: Some(format!("not applicable: {why}")),
            pass: true,
            sampled: false,
            trials: 0,
            witnesses: Vec::new(),
        }
    }

    fn fail(&mut self, witness: String) {
        self.pass = false;
        // Keep the report bounded; the first few witnesses are plenty.
        if self.witnesses.len() < 8 {
            self.witnesses.push(witness);
        }
    }
}

fn show_set(s: &[usize]) -> String {
    const CAP: usize = 12;
    let shown: Vec<String> = s.iter().take(CAP).map(|v| v.to_string()).collect();
    if s.len() > CAP {
        format!("{{{}, ...}} (|S|={})", shown.join(", "), s.len())
    } else {
        format!("{{{}}}", shown.join(", "))
    }
}

/// Structural expectations for the small side of a partition.
#[derive(Debug, Clone, Serialize)]
pub struct Prop2Report {
    /// Edges incident to the small side number at most floor(sqrt(n)).
    pub incident_edges: CheckReport,
    /// Any two small vertices sit at distance >= 3: never adjacent, never
    /// sharing a neighbor.
    pub pair_distance: CheckReport,
    /// The small side has at most floor(n^0.4) vertices.
    pub small_count: CheckReport,
}

impl Prop2Report {
    pub fn all_pass(&self) -> bool {
        self.incident_edges.pass && self.pair_distance.pass && self.small_count.pass
    }

    pub fn reports(&self) -> [&CheckReport; 3] {
        [&self.incident_edges, &self.pair_distance, &self.small_count]
    }
}

/// Exhaustive check of the three small-side properties. Bounds round in the
/// conservative direction (floor on upper bounds).
pub fn check_prop2(g: &Graph, part: &VertexPartition) -> Prop2Report {
    let n = g.n() as f64;

    let mut small_count = CheckReport::exhaustive("prop2.small_count");
    let cap = n.powf(0.4).floor() as usize;
    if part.small.len() > cap {
        small_count.fail(format!("|V1| = {} exceeds n^0.4 = {cap}", part.small.len()));
    }

    let mut pair_distance = CheckReport::exhaustive("prop2.pair_distance");
    for (i, &u) in part.small.iter().enumerate() {
        for &v in &part.small[i + 1..] {
            if g.has_edge(u, v) {
                pair_distance.fail(format!("small vertices {u} and {v} are adjacent"));
            } else if g.neighbors(u).iter().any(|&(w, _)| g.has_edge(w, v)) {
                pair_distance.fail(format!("small vertices {u} and {v} share a neighbor"));
            }
        }
    }

    let mut incident_edges = CheckReport::exhaustive("prop2.incident_edges");
    let mut small_mask = vec![false; g.n()];
    for &v in &part.small {
        small_mask[v] = true;
    }
    let count = g
        .edges()
        .iter()
        .filter(|&&(u, v)| small_mask[u] || small_mask[v])
        .count();
    let cap = n.sqrt().floor() as usize;
    if count > cap {
        incident_edges.fail(format!(
            "{count} edges touch the small side, above sqrt(n) = {cap}"
        ));
    }

    Prop2Report {
        incident_edges,
        pair_distance,
        small_count,
    }
}

fn part_all(g: &Graph) -> Vec<usize> {
    (0..g.n()).collect()
}

/// Sampled density checks calibrated to G(n, p).
#[derive(Debug, Clone, Serialize)]
pub struct Prop1Report {
    /// Two disjoint sets of size >= n/(ln ln n) always see an edge.
    pub crossing_edges: CheckReport,
    /// Subsets S with 2 <= |S| <= n/38 stay sparse: e(S) < |S| n p / 25.
    pub subset_density: CheckReport,
}

impl Prop1Report {
    pub fn all_pass(&self) -> bool {
        self.crossing_edges.pass && self.subset_density.pass
    }

    pub fn reports(&self) -> [&CheckReport; 2] {
        [&self.crossing_edges, &self.subset_density]
    }
}

/// Sample subsets and disjoint set pairs, looking for density violations.
///
/// Subset sizes are drawn uniformly from the allowed range and then filled
/// with a uniform subset of that size, so the small sizes (where violations
/// live) get probed as often as the large ones. Each part is marked not
/// applicable when n leaves no room for its size bounds; the ln ln n bound
/// additionally needs n >= 16 so that ln ln n > 1.
pub fn check_prop1_sampled(g: &Graph, p: f64, trials: u64, seed: u64) -> Prop1Report {
    let n = g.n();
    let mut rng = rng::stream(seed);

    let smax = n / 38;
    let subset_density = if smax < 2 {
        CheckReport::not_applicable("prop1.subset_density", "n/38 < 2")
    } else {
        let mut report = CheckReport::sampled("prop1.subset_density", trials);
        for _ in 0..trials {
            let s = rng.gen_range(2..=smax);
            let subset = rand::seq::index::sample(&mut rng, n, s).into_vec();
            let e = g.edges_within(&subset);
            let bound = s as f64 * n as f64 * p / 25.0;
            if (e as f64) >= bound {
                report.fail(format!(
                    "e(S) = {e} >= |S| n p / 25 = {bound:.4} for S = {}",
                    show_set(&subset)
                ));
            }
        }
        report
    };

    let lo = if n >= 16 {
        (n as f64 / (n as f64).ln().ln()).ceil() as usize
    } else {
        usize::MAX
    };
    let crossing_edges = if n < 16 {
        CheckReport::not_applicable("prop1.crossing_edges", "needs n >= 16 so ln ln n > 1")
    } else if lo > n / 2 {
        CheckReport::not_applicable("prop1.crossing_edges", "n/(ln ln n) > n/2 leaves no room")
    } else {
        let mut report = CheckReport::sampled("prop1.crossing_edges", trials);
        let mut pool: Vec<usize> = (0..n).collect();
        for _ in 0..trials {
            let su = rng.gen_range(lo..=n / 2);
            let sw = rng.gen_range(lo..=n / 2);
            pool.shuffle(&mut rng);
            let u_set = &pool[..su];
            let w_set = &pool[su..su + sw];
            let crossing = g
                .edges_between(u_set, w_set)
                .expect("slices of a shuffle are disjoint");
            if crossing == 0 {
                report.fail(format!("e(U, W) = 0 with |U| = {su}, |W| = {sw}"));
            }
        }
        report
    };

    Prop1Report {
        crossing_edges,
        subset_density,
    }
}

/// |N(U) \ U|: vertices outside `u_set` with a neighbor inside it.
pub fn outside_neighbor_count(g: &Graph, u_set: &[usize]) -> usize {
    g.neighbors_in(u_set, &part_all(g)).len()
}

/// Sampled (k, c)-expansion check: every U with |U| <= k should have at
/// least c |U| neighbors outside U. Violations found by sampling are
/// conclusive; a pass is sampled evidence only.
pub fn check_expander_sampled(g: &Graph, k: usize, c: f64, trials: u64, seed: u64) -> CheckReport {
    let n = g.n();
    if n == 0 || k == 0 {
        return CheckReport::not_applicable("expander", "empty graph or k = 0");
    }
    let kmax = k.min(n);
    let mut rng = rng::stream(seed);
    let mut report = CheckReport::sampled("expander", trials);
    for _ in 0..trials {
        let s = rng.gen_range(1..=kmax);
        let subset = rand::seq::index::sample(&mut rng, n, s).into_vec();
        let out = outside_neighbor_count(g, &subset);
        if (out as f64) < c * s as f64 {
            report.fail(format!(
                "|N(U)\\U| = {out} < c|U| = {:.4} for U = {}",
                c * s as f64,
                show_set(&subset)
            ));
        }
    }
    report
}

// ---------------------------------------------------------------------------
