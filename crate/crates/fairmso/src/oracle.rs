//! Independent reference oracles. These deliberately avoid the shape
//! pipeline: properties are checked by direct combinatorial procedures or
//! by the logic evaluator, and optimization enumerates vertex sets, so the
//! solver can be validated against them.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{lowest_k, mask_iter, Graph, ModulatedGraph, VertexSet};
use crate::logic::{evaluate, Formula, Preset, SetSpec};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("graph has {n} vertices; naive oracle is capped at {max} (set FAIRMSO_MAX_ORACLE_N to raise)")]
    TooLarge { n: usize, max: usize },
}

/// A property of a vertex set, checkable in isolation.
#[derive(Debug, Clone)]
pub enum Property {
    Formula(Formula),
    Preset(Preset),
}

impl Property {
    pub fn check(&self, g: &Graph, x: VertexSet) -> bool {
        match self {
            Property::Formula(f) => evaluate(g, x, f),
            Property::Preset(p) => check_preset(p, g, x),
        }
    }
}

/// Combinatorial check of a built-in problem, independent of the logic
/// machinery.
pub fn check_preset(preset: &Preset, g: &Graph, x: VertexSet) -> bool {
    match preset {
        Preset::Vc => is_vertex_cover(g, x),
        Preset::Fvs => deletion_leaves_forest(g, x),
        Preset::Oct => deletion_leaves_bipartite(g, x),
        Preset::Ds => is_dominating(g, x),
        Preset::SigmaRho { sigma, rho } => check_sigma_rho(g, x, sigma, rho),
    }
}

pub fn is_vertex_cover(g: &Graph, x: VertexSet) -> bool {
    g.edges().iter().all(|&(u, v)| x & (1 << u) != 0 || x & (1 << v) != 0)
}

/// Is `G - X` acyclic? Union-find over the surviving edges.
pub fn deletion_leaves_forest(g: &Graph, x: VertexSet) -> bool {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut Vec<usize>, v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            return find(parent, parent[v]);
        }
        v
    }
    for (u, v) in g.edges() {
        if x & (1 << u) != 0 || x & (1 << v) != 0 {
            continue;
        }
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru == rv {
            return false;
        }
        parent[ru] = rv;
    }
    true
}

/// Is `G - X` bipartite? Breadth-first 2-coloring.
pub fn deletion_leaves_bipartite(g: &Graph, x: VertexSet) -> bool {
    let alive = g.full_set() & !x;
    let mut color = vec![None::<bool>; g.n()];
    for start in mask_iter(alive) {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            let cv = color[v].unwrap();
            for w in mask_iter(g.neighbors(v) & alive) {
                match color[w] {
                    None => {
                        color[w] = Some(!cv);
                        queue.push(w);
                    }
                    Some(cw) if cw == cv => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

pub fn is_dominating(g: &Graph, x: VertexSet) -> bool {
    (0..g.n()).all(|v| x & (1 << v) != 0 || g.neighbors(v) & x != 0)
}

/// General domination: selected vertices need `sigma`-many selected
/// neighbors, unselected vertices need `rho`-many.
pub fn check_sigma_rho(g: &Graph, x: VertexSet, sigma: &SetSpec, rho: &SetSpec) -> bool {
    (0..g.n()).all(|v| {
        let count = (g.neighbors(v) & x).count_ones();
        if x & (1 << v) != 0 {
            sigma.contains(count)
        } else {
            rho.contains(count)
        }
    })
}

fn naive_cap() -> usize {
    std::env::var("FAIRMSO_MAX_ORACLE_N")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(15)
}

/// Minimum fair cost over all sets with the property, by full enumeration.
/// The lexicographically smallest witness among the optimal ones is
/// returned (smallest as a bitmask).
pub fn oracle_min(g: &Graph, p: &Property) -> Result<Option<(usize, VertexSet)>, OracleError> {
    let max = naive_cap();
    if g.n() > max {
        return Err(OracleError::TooLarge { n: g.n(), max });
    }
    let mut best: Option<(usize, VertexSet)> = None;
    for x in 0..(1u64 << g.n()) {
        if p.check(g, x) {
            let fc = g.fair_cost(x);
            if best.map_or(true, |(bk, _)| fc < bk) {
                best = Some((fc, x));
            }
        }
    }
    Ok(best)
}

/// Is there a set with the property and fair cost at most `k`?
pub fn oracle_decision(
    g: &Graph,
    p: &Property,
    k: usize,
) -> Result<Option<VertexSet>, OracleError> {
    let max = naive_cap();
    if g.n() > max {
        return Err(OracleError::TooLarge { n: g.n(), max });
    }
    for x in 0..(1u64 << g.n()) {
        if g.fair_cost(x) <= k && p.check(g, x) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Structured oracle for modulated graphs: instead of all `2^n` sets it
/// enumerates one representative per orbit of the automorphisms that
/// permute vertices within a clique part and swap cliques with identical
/// part structure. Sound for any property invariant under graph
/// automorphisms fixing the modulator pointwise — in particular for any
/// formula and for the fair cost.
pub fn oracle_min_modulated<F>(mg: &ModulatedGraph, check: F) -> Option<(usize, VertexSet)>
where
    F: Fn(VertexSet) -> bool,
{
    let g = mg.graph();
    // Group cliques by their part structure.
    let mut groups: BTreeMap<Vec<(usize, u32)>, Vec<usize>> = BTreeMap::new();
    for c in 0..mg.cliques().len() {
        let key: Vec<(usize, u32)> = mg
            .present_types(c)
            .into_iter()
            .map(|nt| (nt, mg.part(c, nt).count_ones()))
            .collect();
        groups.entry(key).or_default().push(c);
    }
    let groups: Vec<(Vec<(usize, u32)>, Vec<usize>)> = groups.into_iter().collect();

    // All selection profiles for one clique of a given part structure:
    // a count per part, realized on the lowest-indexed vertices.
    fn profiles(key: &[(usize, u32)]) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        for &(_, size) in key {
            let mut next = Vec::new();
            for p in &out {
                for take in 0..=size {
                    let mut q = p.clone();
                    q.push(take);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }

    fn profile_mask(mg: &ModulatedGraph, clique: usize, key: &[(usize, u32)], profile: &[u32]) -> VertexSet {
        key.iter()
            .zip(profile)
            .map(|(&(nt, _), &take)| lowest_k(mg.part(clique, nt), take as usize))
            .fold(0, |m, p| m | p)
    }

    let mut best: Option<(usize, VertexSet)> = None;

    // Non-decreasing profile assignments per group = multisets; identical
    // cliques are interchangeable.
    fn assign<F: Fn(VertexSet) -> bool>(
        mg: &ModulatedGraph,
        groups: &[(Vec<(usize, u32)>, Vec<usize>)],
        gi: usize,
        ci: usize,
        min_profile: usize,
        profs: &[Vec<Vec<u32>>],
        x: VertexSet,
        check: &F,
        best: &mut Option<(usize, VertexSet)>,
    ) {
        // Fair cost is monotone under set inclusion, so a partial
        // selection already at the incumbent's cost cannot improve on it.
        if let Some((bk, _)) = best {
            if mg.graph().fair_cost(x) >= *bk {
                return;
            }
        }
        if gi == groups.len() {
            if check(x) {
                let fc = mg.graph().fair_cost(x);
                if best.map_or(true, |(bk, _)| fc < bk) {
                    *best = Some((fc, x));
                }
            }
            return;
        }
        let (key, cliques) = &groups[gi];
        if ci == cliques.len() {
            assign(mg, groups, gi + 1, 0, 0, profs, x, check, best);
            return;
        }
        for pi in min_profile..profs[gi].len() {
            let mask = profile_mask(mg, cliques[ci], key, &profs[gi][pi]);
            assign(mg, groups, gi, ci + 1, pi, profs, x | mask, check, best);
        }
    }

    let profs: Vec<Vec<Vec<u32>>> = groups.iter().map(|(key, _)| profiles(key)).collect();
    for dsel in 0..(1usize << mg.d()) {
        let mut x: VertexSet = 0;
        for (i, &v) in mg.modulator().iter().enumerate() {
            if dsel & (1 << i) != 0 {
                x |= 1 << v;
            }
        }
        assign(mg, &groups, 0, 0, 0, &profs, x, &check, &mut best);
    }
    let _ = g;
    best
}
