//! Reduction rules on modulated graphs: twin classes inside clique parts,
//! the `Q`-selection used to rebalance a part, and removal of irrelevant
//! cliques once too many identical ones exist.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{lowest_k, mask_from, ModulatedGraph, VertexSet};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("cannot select Q: part has {size} vertices but tau = {tau}")]
    PartTooSmall { size: usize, tau: usize },
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// One twin class: the vertices of a single neighborhood-type part of a
/// single clique. All of them have identical closed neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwinClass {
    pub clique: usize,
    pub nt: usize,
    pub vertices: Vec<usize>,
}

/// All twin classes, ordered by clique index, then neighborhood type.
pub fn twin_classes(mg: &ModulatedGraph) -> Vec<TwinClass> {
    let mut out = Vec::new();
    for c in 0..mg.cliques().len() {
        for nt in mg.present_types(c) {
            out.push(TwinClass {
                clique: c,
                nt,
                vertices: crate::graph::mask_vec(mg.part(c, nt)),
            });
        }
    }
    out
}

/// Pick the set `Q` to delete from a part `t` so that exactly `tau` of its
/// vertices survive and the surviving selection is balanced: afterwards the
/// selected side of the part has
///
/// * its original size, if at most `tau / 2` vertices were selected,
/// * `floor(tau / 2)`, if the selection was in the middle range, or
/// * `tau - |unselected|`, if almost everything was selected.
///
/// The lowest-indexed candidates are removed first, which keeps the
/// operation deterministic.
pub fn select_q(t: &[usize], x: VertexSet, tau: usize) -> Result<VertexSet, ReductionError> {
    let size = t.len();
    if size < tau {
        return Err(ReductionError::PartTooSmall { size, tau });
    }
    let part = mask_from(t.iter().copied());
    let selected = part & x;
    let unselected = part & !x;
    let cnt = selected.count_ones() as usize;
    // Compare against tau / 2 using doubled integers so odd tau is exact.
    let q = if 2 * cnt <= tau {
        lowest_k(unselected, size - tau)
    } else if 2 * cnt <= 2 * size - tau {
        let q1 = lowest_k(selected, cnt - tau / 2);
        let q2 = lowest_k(unselected, (size - cnt) - tau.div_ceil(2));
        q1 | q2
    } else {
        lowest_k(selected, size - tau)
    };
    Ok(q)
}

/// If more than `gamma` cliques share the same key — identical per-type
/// part sizes and selected counts — the highest-numbered one is irrelevant.
/// Removes it and returns the reduced graph, the remapped set, and the
/// removed clique's index. Returns `None` when no clique is irrelevant.
pub fn remove_irrelevant_clique(
    mg: &ModulatedGraph,
    x: VertexSet,
    gamma: u32,
) -> Result<Option<(ModulatedGraph, VertexSet, usize)>, ReductionError> {
    let num_types = mg.num_types();
    let mut groups: BTreeMap<Vec<(u32, u32)>, Vec<usize>> = BTreeMap::new();
    for c in 0..mg.cliques().len() {
        let key: Vec<(u32, u32)> = (0..num_types)
            .map(|nt| {
                let part = mg.part(c, nt);
                (part.count_ones(), (part & x).count_ones())
            })
            .collect();
        groups.entry(key).or_default().push(c);
    }
    let victim = groups
        .values()
        .filter(|cliques| cliques.len() > gamma as usize)
        .map(|cliques| *cliques.iter().max().unwrap())
        .min();
    let Some(victim) = victim else {
        return Ok(None);
    };
    let keep = mg.graph().full_set() & !mg.cliques()[victim];
    let (g, old_ids) = mg.graph().induced(keep);
    let new_of_old: BTreeMap<usize, usize> =
        old_ids.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let modulator = mg.modulator().iter().map(|v| new_of_old[v]).collect();
    let reduced = ModulatedGraph::new(g, modulator)?;
    let x_new = old_ids
        .iter()
        .enumerate()
        .filter(|&(_, &old)| x & (1 << old) != 0)
        .fold(0u64, |m, (new, _)| m | (1 << new));
    Ok(Some((reduced, x_new, victim)))
}
