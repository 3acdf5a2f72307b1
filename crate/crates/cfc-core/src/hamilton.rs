//! Hamilton cycle search: randomized rotation-extension with restarts,
//! backed by exact backtracking on small instances.
//!
//! The heuristic grows a path, extends greedily at either end, closes and
//! reopens cycles when the ends are adjacent, and otherwise rotates the
//! path at a random on-path neighbor of the endpoint (the Posa move). Each
//! restart draws from its own substream, so outcomes are reproducible and
//! independent of how restarts would be scheduled.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::rng;

/// Default number of heuristic restarts.
pub const DEFAULT_RESTARTS: u32 = 50;
/// Rotation budget per restart, in rotations per target vertex.
pub const ROTATIONS_PER_VERTEX: usize = 20;
/// Largest instance handed to the exact backtracker when the heuristic
/// comes up empty. Above this, a not-found answer stays heuristic.
pub const EXACT_LIMIT: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HamiltonError {
    #[error("subset of size {0} cannot carry a cycle (need at least 3)")]
    SubsetTooSmall(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("duplicate vertex {0} in subset")]
    DuplicateVertex(usize),
}

/// A Hamilton cycle of the target set, as a vertex sequence in cycle order
/// (the closing edge back to the first vertex is implicit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamCycle {
    order: Vec<usize>,
}

impl HamCycle {
    pub fn vertices(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Edge ids along the cycle, including the closing edge. None if some
    /// hop is not an edge of `g` (a cycle from another graph, say).
    pub fn edge_ids(&self, g: &Graph) -> Option<Vec<usize>> {
        let k = self.order.len();
        (0..k)
            .map(|i| g.edge_between(self.order[i], self.order[(i + 1) % k]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HamOutcome {
    Found(HamCycle),
    /// The randomized search gave up; the graph may still be Hamiltonian.
    NotFoundHeuristic,
    /// Exhaustive backtracking proved there is no cycle.
    NotFoundExact,
}

impl HamOutcome {
    pub fn found(&self) -> Option<&HamCycle> {
        match self {
            HamOutcome::Found(c) => Some(c),
            _ => None,
        }
    }
}

/// Does `order` list exactly the true entries of `in_set`, consecutive
/// (and wrap-around) pairs all adjacent in `g`?
fn verify_cycle(g: &Graph, in_set: &[bool], size: usize, order: &[usize]) -> bool {
    if order.len() != size || size < 3 {
        return false;
    }
    let mut seen = vec![false; g.n()];
    for &v in order {
        if v >= g.n() || !in_set[v] || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    (0..order.len()).all(|i| g.has_edge(order[i], order[(i + 1) % order.len()]))
}

/// Public wrapper used by tests and the acceptance suite.
pub fn is_valid_cycle(g: &Graph, subset: &[usize], order: &[usize]) -> bool {
    let mut in_set = vec![false; g.n()];
    let mut size = 0;
    for &v in subset {
        if v >= g.n() || in_set[v] {
            return false;
        }
        in_set[v] = true;
        size += 1;
    }
    verify_cycle(g, &in_set, size, order)
}

/// Hamilton cycle on the whole vertex set. For n < 3 the answer is an exact
/// not-found. Runs `restarts` rotation-extension attempts, then exact
/// backtracking when n <= [`EXACT_LIMIT`].
pub fn hamiltonian_cycle(g: &Graph, restarts: u32, seed: u64) -> HamOutcome {
    let verts: Vec<usize> = (0..g.n()).collect();
    if verts.len() < 3 {
        return HamOutcome::NotFoundExact;
    }
    search(g, &verts, restarts, seed)
}

/// Hamilton cycle on the subgraph induced by `subset` (at least 3 distinct
/// vertices). The returned cycle uses host labels.
pub fn hamiltonian_cycle_on_subset(
    g: &Graph,
    subset: &[usize],
    restarts: u32,
    seed: u64,
) -> Result<HamOutcome, HamiltonError> {
    let mut in_set = vec![false; g.n()];
    for &v in subset {
        if v >= g.n() {
            return Err(HamiltonError::VertexOutOfRange { vertex: v, n: g.n() });
        }
        if in_set[v] {
            return Err(HamiltonError::DuplicateVertex(v));
        }
        in_set[v] = true;
    }
    if subset.len() < 3 {
        return Err(HamiltonError::SubsetTooSmall(subset.len()));
    }
    Ok(search(g, subset, restarts, seed))
}

fn search(g: &Graph, verts: &[usize], restarts: u32, seed: u64) -> HamOutcome {
    let mut in_set = vec![false; g.n()];
    for &v in verts {
        in_set[v] = true;
    }
    for attempt in 0..restarts {
        let mut rng = rng::stream(rng::substream(seed, attempt as u64));
        if let Some(order) = posa_attempt(g, verts, &in_set, &mut rng) {
            assert!(
                verify_cycle(g, &in_set, verts.len(), &order),
                "rotation-extension produced an invalid cycle"
            );
            return HamOutcome::Found(HamCycle { order });
        }
    }
    if verts.len() <= EXACT_LIMIT {
        return match exact_search(g, verts) {
            Some(order) => {
                assert!(
                    verify_cycle(g, &in_set, verts.len(), &order),
                    "backtracking produced an invalid cycle"
                );
                HamOutcome::Found(HamCycle { order })
            }
            None => HamOutcome::NotFoundExact,
        };
    }
    HamOutcome::NotFoundHeuristic
}

/// One randomized rotation-extension attempt. Returns a full cycle order or
/// None when the rotation budget runs out (or the structure is hopeless).
fn posa_attempt(
    g: &Graph,
    verts: &[usize],
    in_set: &[bool],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let k = verts.len();
    let start = verts[rng.gen_range(0..k)];
    let mut path = Vec::with_capacity(k);
    let mut pos = vec![usize::MAX; g.n()];
    path.push(start);
    pos[start] = 0;

    let budget = ROTATIONS_PER_VERTEX * k;
    let mut rotations = 0usize;
    let mut fresh: Vec<usize> = Vec::new();

    loop {
        let end = *path.last().unwrap();

        // Extend at the back end if any target vertex is free.
        fresh.clear();
        fresh.extend(
            g.neighbors(end)
                .iter()
                .map(|&(w, _)| w)
                .filter(|&w| in_set[w] && pos[w] == usize::MAX),
        );
        if !fresh.is_empty() {
            let w = fresh[rng.gen_range(0..fresh.len())];
            pos[w] = path.len();
            path.push(w);
            continue;
        }

        // Back end stuck: flip the path if the front end can still extend.
        let front = path[0];
        if g.neighbors(front)
            .iter()
            .any(|&(w, _)| in_set[w] && pos[w] == usize::MAX)
        {
            path.reverse();
            for (i, &v) in path.iter().enumerate() {
                pos[v] = i;
            }
            continue;
        }

        let closes = g.has_edge(end, path[0]);
        if closes && path.len() == k {
            return Some(path);
        }
        if rotations >= budget {
            return None;
        }
        rotations += 1;

        if closes {
            // The path plus the closing edge is a cycle shorter than k.
            // Reopen it at a vertex that still has a free neighbor; if no
            // such vertex exists the free part of the target set is
            // unreachable and no restart of this kind can succeed.
            fresh.clear();
            for (idx, &x) in path.iter().enumerate() {
                if g.neighbors(x)
                    .iter()
                    .any(|&(w, _)| in_set[w] && pos[w] == usize::MAX)
                {
                    fresh.push(idx);
                }
            }
            if fresh.is_empty() {
                return None;
            }
            let idx = fresh[rng.gen_range(0..fresh.len())];
            path.rotate_left(idx + 1);
            for (i, &v) in path.iter().enumerate() {
                pos[v] = i;
            }
            continue;
        }

        // Rotation: pick an on-path neighbor of the endpoint (not the
        // predecessor) and fold the tail back onto it.
        fresh.clear();
        fresh.extend(
            g.neighbors(end)
                .iter()
                .map(|&(w, _)| w)
                .filter(|&w| pos[w] != usize::MAX && pos[w] + 2 < path.len()),
        );
        if fresh.is_empty() {
            return None;
        }
        let w = fresh[rng.gen_range(0..fresh.len())];
        let i = pos[w];
        path[i + 1..].reverse();
        for (j, &v) in path.iter().enumerate().skip(i + 1) {
            pos[v] = j;
        }
    }
}

/// Exhaustive backtracking over the induced subgraph on `verts`
/// (at most [`EXACT_LIMIT`] of them, so bitmask state fits in a u32).
/// Branches visit sparse vertices first; two sound prunes (forced-degree
/// and reachability) keep the search shallow.
fn exact_search(g: &Graph, verts: &[usize]) -> Option<Vec<usize>> {
    let k = verts.len();
    debug_assert!((3..=EXACT_LIMIT).contains(&k));
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in verts.iter().enumerate() {
        local[v] = i;
    }
    let mut adj = vec![0u32; k];
    for (i, &v) in verts.iter().enumerate() {
        for &(w, _) in g.neighbors(v) {
            if local[w] != usize::MAX {
                adj[i] |= 1 << local[w];
            }
        }
    }
    let full: u32 = if k == 32 { u32::MAX } else { (1 << k) - 1 };
    if adj.iter().any(|&a| a.count_ones() < 2) {
        return None;
    }

    fn rec(adj: &[u32], full: u32, cur: usize, visited: u32, order: &mut Vec<usize>) -> bool {
        if visited == full {
            return adj[cur] & 1 != 0;
        }
        let free = !visited & full;

        // Forced-degree prune: an unvisited vertex must keep at least two
        // usable connections (unvisited vertices, the current endpoint, or
        // the start it will eventually close onto).
        let avail = free | (1 << cur) | 1;
        let mut rest = free;
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (adj[w] & avail).count_ones() < 2 {
                return false;
            }
        }

        // Reachability prune: every unvisited vertex must be reachable from
        // the current endpoint through unvisited vertices.
        let mut reach = 1u32 << cur;
        loop {
            let mut grow = reach;
            let mut scan = reach;
            while scan != 0 {
                let w = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                grow |= adj[w] & free;
            }
            if grow == reach {
                break;
            }
            reach = grow;
        }
        if free & !reach != 0 {
            return false;
        }

        // Branch over unvisited neighbors, fewest free continuations first.
        let mut cands: Vec<(u32, usize)> = Vec::new();
        let mut scan = adj[cur] & free;
        while scan != 0 {
            let w = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            cands.push(((adj[w] & free).count_ones(), w));
        }
        cands.sort_unstable();
        for (_, w) in cands {
            order.push(w);
            if rec(adj, full, w, visited | (1 << w), order) {
                return true;
            }
            order.pop();
        }
        false
    }

    let mut order = vec![0usize];
    if rec(&adj, full, 0, 1, &mut order) {
        Some(order.into_iter().map(|i| verts[i]).collect())
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
