//! Shapes: the finite fingerprints of solution sets on cluster-modulated
//! graphs.
//!
//! Fix an odd truncation threshold `alpha` and a counting cap `gamma`. A
//! *solution pattern* assigns each neighborhood type a value in `0..=alpha`;
//! on a clique part with at most `alpha` vertices (or below `alpha/2`) the
//! value is an exact count of selected vertices, while a value above
//! `alpha/2` counts all but `alpha - value` of the part. A *shape* is the
//! selection inside the modulator together with a matrix `M` counting, for
//! every (pattern, column type) pair, how many cliques of that column type
//! realize that pattern — saturating at `gamma`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{lowest_k, mask_iter, Graph, ModulatedGraph, VertexSet};
use crate::logic::{evaluate, Formula};
use crate::reduction::select_q;

/// Entry-per-neighborhood-type vector with values in `0..=alpha`.
pub type SolutionPattern = Vec<u32>;
/// `(alpha + 1)`-truncated clique signature; the value `alpha + 1` means
/// "unbounded".
pub type ColumnType = Vec<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleClass {
    /// The part has at most `alpha` vertices; the pattern entry is exact.
    Bounded,
    /// Unbounded part, entry below `alpha/2`: counts selected vertices.
    Thin,
    /// Unbounded part, entry above `alpha/2`: counts all but
    /// `alpha - entry`.
    Fat,
}

#[derive(Debug, Error)]
pub enum ShapeError {
    #[error("clique {clique} part of type {nt} violates alpha-compliance")]
    NotCompliant { clique: usize, nt: usize },
    #[error("pattern entry {sp} exceeds bounded column entry {ct} at type {nt}")]
    Condition3 { nt: usize, sp: u32, ct: u32 },
    #[error("shape mixes thin and fat patterns on an unbounded column entry")]
    Incoherent,
    #[error("associated instance needs {0} vertices, limit is 64")]
    TooLarge(usize),
    #[error("shape vectors have length {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Reduction(#[from] crate::reduction::ReductionError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

/// The selection fingerprint of a solution on one modulated graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Shape {
    /// Selected modulator positions, as a bitmask over modulator indices.
    pub nt_star: usize,
    /// `(column type, pattern) -> clique count`, saturating at `gamma`.
    /// Absent keys mean zero.
    pub m: BTreeMap<(ColumnType, SolutionPattern), u32>,
}

/// Classify one (pattern entry, column entry) pair.
pub fn classify(column_entry: u32, sp_entry: u32, alpha: u32) -> TripleClass {
    if column_entry <= alpha {
        TripleClass::Bounded
    } else if 2 * sp_entry < alpha {
        TripleClass::Thin
    } else {
        TripleClass::Fat
    }
}

/// How many vertices of a part of `part_size` vertices are selected when the
/// pattern entry is `sp`.
pub fn matched_count(part_size: u32, column_entry: u32, sp: u32, alpha: u32) -> u32 {
    match classify(column_entry, sp, alpha) {
        TripleClass::Bounded | TripleClass::Thin => sp,
        TripleClass::Fat => part_size - (alpha - sp),
    }
}

/// Does Condition 3 hold: on bounded column entries the pattern cannot
/// exceed the part size?
pub fn condition3(column: &[u32], pattern: &[u32], alpha: u32) -> Result<(), ShapeError> {
    for (nt, (&ct, &sp)) in column.iter().zip(pattern).enumerate() {
        if ct <= alpha && sp > ct {
            return Err(ShapeError::Condition3 { nt, sp, ct });
        }
    }
    Ok(())
}

/// Is `x` alpha-compliant: in every clique part, either the selected or the
/// unselected side has at most `alpha/2` vertices?
pub fn is_compliant(mg: &ModulatedGraph, x: VertexSet, alpha: u32) -> bool {
    violating_part(mg, x, alpha).is_none()
}

fn violating_part(mg: &ModulatedGraph, x: VertexSet, alpha: u32) -> Option<(usize, usize)> {
    for c in 0..mg.cliques().len() {
        for nt in mg.present_types(c) {
            let part = mg.part(c, nt);
            let cnt = (part & x).count_ones();
            let def = (part & !x).count_ones();
            if 2 * cnt > alpha && 2 * def > alpha {
                return Some((c, nt));
            }
        }
    }
    None
}

/// Shrink `x` until it is alpha-compliant. Every violating part is reduced
/// to exactly `alpha/2` selected vertices via a twin-class `Q`-selection, so
/// the result is a subset of `x` and the fair cost never increases. For
/// `alpha` above the theoretical bound the shrink preserves satisfaction of
/// the formula that produced the bound.
pub fn make_compliant(mg: &ModulatedGraph, x: VertexSet, alpha: u32) -> Result<VertexSet, ShapeError> {
    let mut x = x;
    while let Some((c, nt)) = violating_part(mg, x, alpha) {
        let part: Vec<usize> = mask_iter(mg.part(c, nt)).collect();
        let q = select_q(&part, x, alpha as usize)?;
        let before = x;
        x &= !q;
        debug_assert_ne!(before, x, "Q-selection must remove selected vertices");
    }
    Ok(x)
}

/// Trim every clique part with more than `alpha + 1` vertices down to
/// `alpha + 1`, keeping a selection that realizes the same pattern. Returns
/// the trimmed graph, the trimmed set, and the original index of every
/// surviving vertex.
pub fn trim(
    mg: &ModulatedGraph,
    x: VertexSet,
    alpha: u32,
) -> Result<(ModulatedGraph, VertexSet, Vec<usize>), ShapeError> {
    let mut keep = mg.modulator_set();
    for c in 0..mg.cliques().len() {
        for nt in mg.present_types(c) {
            let part = mg.part(c, nt);
            let size = part.count_ones();
            if size <= alpha + 1 {
                keep |= part;
                continue;
            }
            let cnt = (part & x).count_ones();
            let def = (part & !x).count_ones();
            // Size of the selected side after trimming to alpha + 1.
            let kept_selected = if 2 * cnt > 2 * size - alpha {
                alpha + 1 - def
            } else {
                cnt.min(alpha / 2)
            };
            keep |= lowest_k(part & x, kept_selected as usize);
            keep |= lowest_k(part & !x, (alpha + 1 - kept_selected) as usize);
        }
    }
    let (g, old_ids) = mg.graph().induced(keep);
    let new_of_old: BTreeMap<usize, usize> =
        old_ids.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let modulator = mg.modulator().iter().map(|d| new_of_old[d]).collect();
    let trimmed = ModulatedGraph::new(g, modulator)?;
    let x_new = old_ids
        .iter()
        .enumerate()
        .filter(|&(_, &old)| x & (1 << old) != 0)
        .fold(0u64, |m, (new, _)| m | (1 << new));
    Ok((trimmed, x_new, old_ids))
}

/// The unique shape that agrees with the compliant set `x` on `mg`.
pub fn compute_shape(
    mg: &ModulatedGraph,
    x: VertexSet,
    alpha: u32,
    gamma: u32,
) -> Result<Shape, ShapeError> {
    let nt_star = mg
        .modulator()
        .iter()
        .enumerate()
        .filter(|&(_, &v)| x & (1 << v) != 0)
        .fold(0usize, |m, (i, _)| m | (1 << i));
    let mut m: BTreeMap<(ColumnType, SolutionPattern), u32> = BTreeMap::new();
    for c in 0..mg.cliques().len() {
        let column = mg.truncated_signature(c, alpha + 1);
        let mut pattern = vec![0u32; mg.num_types()];
        for nt in mg.present_types(c) {
            let part = mg.part(c, nt);
            let size = part.count_ones();
            let cnt = (part & x).count_ones();
            let def = size - cnt;
            pattern[nt] = if size <= alpha {
                cnt
            } else if 2 * cnt < alpha {
                cnt
            } else if 2 * def < alpha {
                alpha - def
            } else {
                return Err(ShapeError::NotCompliant { clique: c, nt });
            };
        }
        *m.entry((column, pattern)).or_insert(0) += 1;
    }
    for v in m.values_mut() {
        *v = (*v).min(gamma);
    }
    Ok(Shape { nt_star, m })
}

/// Does the shape use only thin or only fat patterns on every unbounded
/// column entry?
pub fn is_coherent(shape: &Shape, alpha: u32) -> bool {
    let mut per_column: BTreeMap<&ColumnType, Vec<&SolutionPattern>> = BTreeMap::new();
    for ((ct, sp), &count) in &shape.m {
        if count > 0 {
            per_column.entry(ct).or_default().push(sp);
        }
    }
    for (ct, patterns) in per_column {
        for nt in 0..ct.len() {
            if ct[nt] == alpha + 1 {
                let mut saw_thin = false;
                let mut saw_fat = false;
                for sp in &patterns {
                    match classify(ct[nt], sp[nt], alpha) {
                        TripleClass::Thin => saw_thin = true,
                        TripleClass::Fat => saw_fat = true,
                        TripleClass::Bounded => unreachable!(),
                    }
                }
                if saw_thin && saw_fat {
                    return false;
                }
            }
        }
    }
    true
}

/// Materialize the canonical instance of a shape: the modulator subgraph
/// plus, for every `(column, pattern)` entry with count `c`, exactly `c`
/// cliques realizing that column and pattern. Cliques are laid out in
/// column-major order with patterns in lexicographic order, parts in type
/// order, and the lowest-numbered vertices of each part selected.
pub fn associated_instance(
    shape: &Shape,
    modulator_graph: &Graph,
    alpha: u32,
) -> Result<(ModulatedGraph, VertexSet), ShapeError> {
    let d = modulator_graph.n();
    let num_types = 1usize << d;
    let mut n = d;
    for ((ct, sp), &count) in &shape.m {
        if ct.len() != num_types {
            return Err(ShapeError::DimensionMismatch { got: ct.len(), expected: num_types });
        }
        if sp.len() != num_types {
            return Err(ShapeError::DimensionMismatch { got: sp.len(), expected: num_types });
        }
        condition3(ct, sp, alpha)?;
        n += count as usize * ct.iter().map(|&c| c as usize).sum::<usize>();
    }
    if n > crate::graph::MAX_VERTICES {
        return Err(ShapeError::TooLarge(n));
    }
    let mut g = Graph::new(n)?;
    for i in 0..d {
        for j in 0..i {
            if modulator_graph.has_edge(i, j) {
                g.add_edge(i, j)?;
            }
        }
    }
    let mut x: VertexSet = 0;
    for i in 0..d {
        if shape.nt_star & (1 << i) != 0 {
            x |= 1 << i;
        }
    }
    let mut next = d;
    for ((ct, sp), &count) in &shape.m {
        for _ in 0..count {
            let clique_start = next;
            for nt in 0..num_types {
                let size = ct[nt];
                if size == 0 {
                    continue;
                }
                let selected = matched_count(size, ct[nt], sp[nt], alpha);
                for k in 0..size {
                    let v = next;
                    next += 1;
                    if k < selected {
                        x |= 1 << v;
                    }
                    for i in 0..d {
                        if nt & (1 << i) != 0 {
                            g.add_edge(v, i)?;
                        }
                    }
                }
            }
            for u in clique_start..next {
                for w in clique_start + 1..next {
                    if w > u {
                        g.add_edge(u, w)?;
                    }
                }
            }
        }
    }
    let modulator: Vec<usize> = (0..d).collect();
    let mg = ModulatedGraph::new(g, modulator)?;
    Ok((mg, x))
}

/// Evaluate a formula on the shape's associated instance.
pub fn evaluate_shape(
    shape: &Shape,
    formula: &Formula,
    modulator_graph: &Graph,
    alpha: u32,
) -> Result<bool, ShapeError> {
    let (mg, x) = associated_instance(shape, modulator_graph, alpha)?;
    Ok(evaluate(mg.graph(), x, formula))
}

// ---------------------------------------------------------------------------
// Pattern spaces
// ---------------------------------------------------------------------------

/// Problem-specific restriction of the pattern space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternFilter {
    /// Solutions take all but at most `max_deficit` vertices of every part.
    FatOnly { max_deficit: u32 },
    /// Solutions take at most `max_count` vertices of every part.
    ThinOnly { max_count: u32 },
}

/// All patterns admissible for a column under Condition 3 and the optional
/// filter, in lexicographic order.
pub fn admissible_patterns(
    column: &[u32],
    alpha: u32,
    filter: Option<PatternFilter>,
) -> Vec<SolutionPattern> {
    let ranges: Vec<(u32, u32)> = column
        .iter()
        .map(|&ct| {
            if ct == 0 {
                return (0, 0);
            }
            let hi = ct.min(alpha);
            match filter {
                None => (0, hi),
                Some(PatternFilter::FatOnly { max_deficit }) => {
                    (hi.saturating_sub(max_deficit), hi)
                }
                Some(PatternFilter::ThinOnly { max_count }) => (0, hi.min(max_count)),
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut current: Vec<u32> = ranges.iter().map(|&(lo, _)| lo).collect();
    loop {
        out.push(current.clone());
        // Odometer increment, last coordinate fastest.
        let mut i = ranges.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < ranges[i].1 {
                current[i] += 1;
                for j in i + 1..ranges.len() {
                    current[j] = ranges[j].0;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::mask_from;
    use crate::logic::{preset_formula, Preset};

    /// A clique of `sizes[nt]` vertices per neighborhood type, attached to a
    /// fresh modulator of `d` vertices.
    fn one_clique(d: usize, sizes: &[u32]) -> ModulatedGraph {
        let n = d + sizes.iter().sum::<u32>() as usize;
        let mut g = Graph::new(n).unwrap();
        let mut v = d;
        let mut clique = Vec::new();
        for (nt, &size) in sizes.iter().enumerate() {
            for _ in 0..size {
                for i in 0..d {
                    if nt & (1 << i) != 0 {
                        g.add_edge(v, i).unwrap();
                    }
                }
                clique.push(v);
                v += 1;
            }
        }
        for (i, &a) in clique.iter().enumerate() {
            for &b in &clique[..i] {
                g.add_edge(a, b).unwrap();
            }
        }
        ModulatedGraph::new(g, (0..d).collect()).unwrap()
    }

    #[test]
    fn classify_table() {
        // alpha = 5: bounded up to 5, thin below 2.5, fat above.
        assert_eq!(classify(3, 3, 5), TripleClass::Bounded);
        assert_eq!(classify(5, 0, 5), TripleClass::Bounded);
        assert_eq!(classify(6, 2, 5), TripleClass::Thin);
        assert_eq!(classify(6, 3, 5), TripleClass::Fat);
        assert_eq!(classify(6, 5, 5), TripleClass::Fat);
    }

    #[test]
    fn compliance_and_make_compliant() {
        // One clique of 8 same-type vertices, alpha = 3: selecting 4 leaves
        // 4 unselected, so both sides exceed 3/2; not compliant.
        let mg = one_clique(1, &[0, 8]);
        let x = mask_from([1, 2, 3, 4]);
        assert!(!is_compliant(&mg, x, 3));
        let x2 = make_compliant(&mg, x, 3).unwrap();
        assert!(is_compliant(&mg, x2, 3));
        assert!(x2 & !x == 0, "result must be a subset");
        // Reduced to floor(3/2) = 1 selected vertex.
        assert_eq!(x2.count_ones(), 1);
        // Selecting 7 of 8 is compliant (1 unselected <= 3/2).
        assert!(is_compliant(&mg, mask_from([1, 2, 3, 4, 5, 6, 7]), 3));
        // fc never increases.
        assert!(mg.graph().fair_cost(x2) <= mg.graph().fair_cost(x));
    }

    #[test]
    fn trim_cases() {
        // Part of 10 vertices, alpha = 3: trims to 4.
        let mg = one_clique(1, &[0, 10]);
        // Thin selection of 1: kept as 1 of 4.
        let (tmg, tx, _) = trim(&mg, mask_from([1]), 3).unwrap();
        assert_eq!(tmg.graph().n(), 5);
        assert_eq!(tx.count_ones(), 1);
        // Fat selection of 9 (deficit 1): kept as 3 of 4.
        let x = mask_from(1..10);
        let (tmg, tx, _) = trim(&mg, x, 3).unwrap();
        assert_eq!(tmg.graph().n(), 5);
        assert_eq!(tx.count_ones(), 3);
        // Shapes agree before and after trimming.
        let s1 = compute_shape(&mg, x, 3, 10).unwrap();
        let s2 = compute_shape(&tmg, tx, 3, 10).unwrap();
        assert_eq!(s1, s2);
        // Small parts are untouched.
        let mg = one_clique(1, &[2, 2]);
        let (tmg, tx, _) = trim(&mg, mask_from([1, 3]), 3).unwrap();
        assert_eq!(tmg.graph().n(), mg.graph().n());
        assert_eq!(tx, mask_from([1, 3]));
    }

    #[test]
    fn compute_shape_parts() {
        // d = 1; clique with 2 unattached and 6 attached vertices; alpha 3.
        let mg = one_clique(1, &[2, 6]);
        // Select the modulator, 1 unattached, 5 attached (deficit 1 -> fat).
        let x = mask_from([0, 1, 3, 4, 5, 6, 7]);
        let shape = compute_shape(&mg, x, 3, 10).unwrap();
        assert_eq!(shape.nt_star, 1);
        let ((ct, sp), count) = shape.m.iter().next().unwrap();
        assert_eq!(ct, &vec![2, 4]); // truncated at alpha + 1 = 4
        assert_eq!(sp, &vec![1, 2]); // bounded exact 1; fat: alpha - deficit
        assert_eq!(*count, 1);
        // Non-compliant selection errors out.
        let bad = mask_from([3, 4, 5]);
        assert!(matches!(
            compute_shape(&mg, bad, 3, 10),
            Err(ShapeError::NotCompliant { .. })
        ));
    }

    #[test]
    fn shape_saturates_at_gamma() {
        // Five identical singleton cliques, gamma = 2.
        let mut g = Graph::new(6).unwrap();
        for v in 1..6 {
            g.add_edge(0, v).unwrap();
        }
        let mg = ModulatedGraph::new(g, vec![0]).unwrap();
        let shape = compute_shape(&mg, 0, 3, 2).unwrap();
        assert_eq!(shape.m.values().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn coherence() {
        let alpha = 3;
        let ct = vec![4u32]; // unbounded (alpha + 1)
        let thin = vec![1u32];
        let fat = vec![3u32];
        let mut m = BTreeMap::new();
        m.insert((ct.clone(), thin.clone()), 1);
        m.insert((ct.clone(), fat.clone()), 1);
        let mixed = Shape { nt_star: 0, m };
        assert!(!is_coherent(&mixed, alpha));
        let mut m = BTreeMap::new();
        m.insert((ct.clone(), fat.clone()), 2);
        assert!(is_coherent(&Shape { nt_star: 0, m }, alpha));
    }

    #[test]
    fn associated_instance_roundtrip() {
        // compute_shape of the associated instance returns the shape itself.
        let mg = one_clique(2, &[0, 2, 1, 3]);
        let alpha = 3;
        let gamma = 5;
        for x_clique in [0u64, 0b111000u64 << 2, 0b001011u64 << 2] {
            let x = x_clique | 0b01; // select first modulator vertex
            if !is_compliant(&mg, x, alpha) {
                continue;
            }
            let shape = compute_shape(&mg, x, alpha, gamma).unwrap();
            let (amg, ax) = associated_instance(&shape, &mg.modulator_graph(), alpha).unwrap();
            let shape2 = compute_shape(&amg, ax, alpha, gamma).unwrap();
            assert_eq!(shape, shape2);
        }
    }

    #[test]
    fn evaluate_shape_matches_direct_evaluation() {
        // For an untrimmed graph (all parts small) the associated instance
        // is isomorphic to the original, so evaluation must agree.
        let mg = one_clique(1, &[1, 2]);
        let f = preset_formula(&Preset::Vc);
        let alpha = 9;
        for x in 0..(1u64 << mg.graph().n()) {
            if !is_compliant(&mg, x, alpha) {
                continue;
            }
            let shape = compute_shape(&mg, x, alpha, 6).unwrap();
            let direct = evaluate(mg.graph(), x, &f);
            let via_shape = evaluate_shape(&shape, &f, &mg.modulator_graph(), alpha).unwrap();
            assert_eq!(via_shape, direct);
        }
    }

    #[test]
    fn admissible_pattern_spaces() {
        let alpha = 5;
        // Column [3, 6]: bounded entry 3, unbounded entry 6 (= alpha + 1).
        let col = vec![3u32, 6];
        let all = admissible_patterns(&col, alpha, None);
        assert_eq!(all.len(), 4 * 6); // 0..=3 times 0..=5
        let fat = admissible_patterns(&col, alpha, Some(PatternFilter::FatOnly { max_deficit: 2 }));
        assert_eq!(fat.len(), 3 * 3); // {1,2,3} x {3,4,5}
        assert!(fat.iter().all(|p| p[0] >= 1 && p[1] >= 3));
        let thin =
            admissible_patterns(&col, alpha, Some(PatternFilter::ThinOnly { max_count: 1 }));
        assert_eq!(thin.len(), 2 * 2); // {0,1} x {0,1}
        // Zero entries admit only zero.
        let empty = admissible_patterns(&[0, 2], alpha, None);
        assert!(empty.iter().all(|p| p[0] == 0));
    }
}
