//! Slow reference implementations. These exist to cross-check the real
//! algorithms in tests on tiny inputs; none of them is meant to be fast.

use crate::cfc::EdgeColoring;
use crate::graph::Graph;

/// Every simple u-v path as a vertex sequence, by plain backtracking.
pub fn all_simple_paths(g: &Graph, u: usize, v: usize) -> Vec<Vec<usize>> {
    assert!(u < g.n() && v < g.n() && u != v);
    let mut out = Vec::new();
    let mut visited = vec![false; g.n()];
    visited[u] = true;
    let mut path = vec![u];
    fn rec(
        g: &Graph,
        v: usize,
        visited: &mut Vec<bool>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let cur = *path.last().unwrap();
        for &(w, _) in g.neighbors(cur) {
            if w == v {
                path.push(v);
                out.push(path.clone());
                path.pop();
                continue;
            }
            if visited[w] {
                continue;
            }
            visited[w] = true;
            path.push(w);
            rec(g, v, visited, path, out);
            path.pop();
            visited[w] = false;
        }
    }
    rec(g, v, &mut visited, &mut path, &mut out);
    out
}

fn path_is_conflict_free(g: &Graph, col: &EdgeColoring, verts: &[usize]) -> bool {
    let mut counts = vec![0u32; col.palette() as usize + 1];
    for w in verts.windows(2) {
        let e = g.edge_between(w[0], w[1]).expect("path hop");
        counts[col.color(e) as usize] += 1;
    }
    counts.iter().any(|&c| c == 1)
}

/// Conflict-free connectivity by enumerating every simple path of every
/// pair. Only sensible for very small graphs.
pub fn conflict_free_connected_naive(g: &Graph, col: &EdgeColoring) -> bool {
    assert_eq!(col.len(), g.m());
    for u in 0..g.n() {
        for v in (u + 1)..g.n() {
            let ok = all_simple_paths(g, u, v)
                .iter()
                .any(|p| path_is_conflict_free(g, col, p));
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Exact conflict-free connection number by trying all k^m colorings for
/// increasing k. None when the graph is disconnected or no k within max_k
/// works; a graph on at most one vertex is vacuously 1.
pub fn cfc_naive(g: &Graph, max_k: u32) -> Option<u32> {
    if !crate::structure::is_connected(g) {
        return None;
    }
    if g.n() <= 1 {
        return Some(1);
    }
    let m = g.m();
    for k in 1..=max_k {
        let mut colors = vec![1u32; m];
        loop {
            let col = EdgeColoring::new(k, colors.clone()).unwrap();
            if conflict_free_connected_naive(g, &col) {
                return Some(k);
            }
            // odometer increment over {1..k}^m
            let mut i = 0;
            loop {
                if i == m {
                    break;
                }
                if colors[i] < k {
                    colors[i] += 1;
                    break;
                }
                colors[i] = 1;
                i += 1;
            }
            if i == m {
                break;
            }
        }
    }
    None
}

/// Bridges found the obvious way: an edge is a bridge exactly when its
/// endpoints end up in different components after removing it. Returns
/// ascending edge ids and works on disconnected inputs too.
pub fn bridges_by_removal(g: &Graph) -> Vec<usize> {
    (0..g.m())
        .filter(|&e| {
            let kept: Vec<(usize, usize)> = (0..g.m())
                .filter(|&f| f != e)
                .map(|f| g.endpoints(f))
                .collect();
            let h = Graph::build(g.n(), &kept).unwrap();
            let (u, v) = g.endpoints(e);
            !component_of(&h, u).contains(&v)
        })
        .collect()
}

fn component_of(g: &Graph, src: usize) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    seen[src] = true;
    let mut stack = vec![src];
    let mut comp = vec![src];
    while let Some(v) = stack.pop() {
        for &(w, _) in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                comp.push(w);
                stack.push(w);
            }
        }
    }
    comp
}

/// Hamilton cycle by checking all permutations. n <= 9 keeps this sane.
pub fn hamiltonian_by_permutations(g: &Graph) -> Option<Vec<usize>> {
    assert!(g.n() <= 9, "permutation search is for tiny graphs");
    if g.n() < 3 {
        return None;
    }
    // fix vertex 0 first to kill rotational duplicates
    let mut rest: Vec<usize> = (1..g.n()).collect();
    permute(g, &mut rest, 0).map(|mut tail| {
        let mut cyc = vec![0];
        cyc.append(&mut tail);
        cyc
    })
}

fn permute(g: &Graph, rest: &mut Vec<usize>, k: usize) -> Option<Vec<usize>> {
    if k == rest.len() {
        let ok = g.has_edge(0, rest[0])
            && rest.windows(2).all(|w| g.has_edge(w[0], w[1]))
            && g.has_edge(*rest.last().unwrap(), 0);
        return ok.then(|| rest.clone());
    }
    for i in k..rest.len() {
        rest.swap(k, i);
        if let Some(found) = permute(g, rest, k + 1) {
            return Some(found);
        }
        rest.swap(k, i);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_paths_of_c4() {
        let g = Graph::build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let mut paths = all_simple_paths(&g, 0, 2);
        paths.sort();
        assert_eq!(paths, vec![vec![0, 1, 2], vec![0, 3, 2]]);
    }

    #[test]
    fn naive_checker_on_known_colorings() {
        // P3 monochromatic fails, bichromatic works
        let g = Graph::build(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(!conflict_free_connected_naive(
            &g,
            &EdgeColoring::monochromatic(2)
        ));
        let col = EdgeColoring::new(2, vec![1, 2]).unwrap();
        assert!(conflict_free_connected_naive(&g, &col));
    }

    #[test]
    fn naive_cfc_values() {
        let k3 = Graph::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(cfc_naive(&k3, 3), Some(1));
        let p4 = Graph::build(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(cfc_naive(&p4, 3), Some(2));
        let c5 = Graph::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(cfc_naive(&c5, 3), Some(2));
        // P4 cannot be done with one color
        assert_eq!(cfc_naive(&p4, 1), None);
        let disconnected = Graph::build(3, &[(0, 1)]).unwrap();
        assert_eq!(cfc_naive(&disconnected, 3), None);
    }

    #[test]
    fn removal_bridges() {
        // two triangles joined by an edge: only the joiner is a bridge
        let g = Graph::build(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)],
        )
        .unwrap();
        assert_eq!(bridges_by_removal(&g), vec![6]);
        // a path: everything is a bridge
        let p = Graph::build(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(bridges_by_removal(&p), vec![0, 1, 2]);
    }

    #[test]
    fn permutation_hamilton() {
        let c5 = Graph::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let cyc = hamiltonian_by_permutations(&c5).unwrap();
        assert_eq!(cyc.len(), 5);
        assert!(cyc.windows(2).all(|w| c5.has_edge(w[0], w[1])));
        assert!(c5.has_edge(cyc[4], cyc[0]));
        let p4 = Graph::build(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(hamiltonian_by_permutations(&p4), None);
    }
}
