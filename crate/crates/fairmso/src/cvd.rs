//! Cluster vertex deletion by branching on induced paths on three vertices.
//!
//! A graph is a disjoint union of cliques iff it has no induced P3. The
//! standard 3^k branching deletes one of the three path vertices; we always
//! branch on the lexicographically first induced P3 and try the center first,
//! so results are deterministic.

use crate::graph::{mask_from, mask_iter, Graph, VertexSet};

/// Find the lexicographically first induced P3 `(u, v, w)` in the subgraph on
/// `alive`, where `v` is the center, `u < w`, and triples are ordered by
/// `(u, v, w)`.
fn first_p3(g: &Graph, alive: VertexSet) -> Option<(usize, usize, usize)> {
    for u in mask_iter(alive) {
        for v in mask_iter(g.neighbors(u) & alive) {
            // w ranges over neighbors of v that are not adjacent to u.
            let candidates = g.neighbors(v) & alive & !g.neighbors(u) & !(1 << u);
            for w in mask_iter(candidates) {
                if w > u {
                    return Some((u, v, w));
                }
            }
        }
    }
    None
}

fn branch(g: &Graph, alive: VertexSet, budget: usize, deleted: &mut Vec<usize>) -> bool {
    match first_p3(g, alive) {
        None => true,
        Some(_) if budget == 0 => false,
        Some((u, v, w)) => {
            // Center first: deleting the middle of a path is the most common
            // way to split it, and it pins down the result for ties.
            for cand in [v, u, w] {
                deleted.push(cand);
                if branch(g, alive & !(1 << cand), budget - 1, deleted) {
                    return true;
                }
                deleted.pop();
            }
            false
        }
    }
}

/// A cluster deletion set of size at most `k`, if one exists.
pub fn find_modulator(g: &Graph, k: usize) -> Option<Vec<usize>> {
    let mut deleted = Vec::new();
    if branch(g, g.full_set(), k, &mut deleted) {
        deleted.sort_unstable();
        Some(deleted)
    } else {
        None
    }
}

/// A minimum cluster deletion set, by iterative deepening on `k`.
pub fn find_modulator_min(g: &Graph) -> Vec<usize> {
    for k in 0..=g.n() {
        if let Some(d) = find_modulator(g, k) {
            return d;
        }
    }
    unreachable!("deleting every vertex always yields a cluster graph")
}

/// Is `modulator` a cluster deletion set (no induced P3 left)?
pub fn is_modulator(g: &Graph, modulator: &[usize]) -> bool {
    let alive = g.full_set() & !mask_from(modulator.iter().copied());
    first_p3(g, alive).is_none()
}
