//! A small exact integer-program feasibility solver, and the translation of
//! a shape plus a fair-cost budget into such a program.
//!
//! The generic solver handles bounded nonnegative integer variables and
//! linear `<=` / `=` / `>=` constraints by depth-first search with bound
//! propagation. Models arising from shapes are tiny (one variable per used
//! pattern per clique group), so no LP relaxation is needed. The solver
//! returns the lexicographically smallest feasible assignment, which keeps
//! solution extraction deterministic.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{lowest_k, ModulatedGraph, VertexSet};
use crate::shapes::{classify, condition3, matched_count, Shape, SolutionPattern, TripleClass};

#[derive(Debug, Error)]
pub enum IlpError {
    #[error("shape is not coherent; cannot linearize fat parts")]
    IncoherentShape,
    #[error("graph clique {clique} has column type absent from the shape")]
    UnknownColumn { clique: usize },
    #[error(transparent)]
    Shape(#[from] crate::shapes::ShapeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` terms.
    pub terms: Vec<(usize, i64)>,
    pub cmp: Cmp,
    pub rhs: i64,
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct IlpModel {
    pub var_names: Vec<String>,
    /// Inclusive upper bounds; all lower bounds are zero.
    pub upper: Vec<u64>,
    pub constraints: Vec<Constraint>,
}

impl IlpModel {
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    /// Lexicographically smallest feasible assignment, if any.
    pub fn solve(&self) -> Option<Vec<u64>> {
        let mut lo = vec![0u64; self.num_vars()];
        let mut hi = self.upper.clone();
        self.search(&mut lo, &mut hi)
    }

    pub fn is_feasible(&self) -> bool {
        self.solve().is_some()
    }

    fn search(&self, lo: &mut Vec<u64>, hi: &mut Vec<u64>) -> Option<Vec<u64>> {
        if !self.propagate(lo, hi) {
            return None;
        }
        let Some(branch) = (0..self.num_vars()).find(|&v| lo[v] < hi[v]) else {
            return Some(lo.clone());
        };
        for value in lo[branch]..=hi[branch] {
            let mut lo2 = lo.clone();
            let mut hi2 = hi.clone();
            lo2[branch] = value;
            hi2[branch] = value;
            if let Some(sol) = self.search(&mut lo2, &mut hi2) {
                return Some(sol);
            }
        }
        None
    }

    /// Tighten bounds until a fixpoint; false on contradiction.
    fn propagate(&self, lo: &mut [u64], hi: &mut [u64]) -> bool {
        loop {
            let mut changed = false;
            for c in &self.constraints {
                let min_act: i128 = c
                    .terms
                    .iter()
                    .map(|&(v, a)| a as i128 * if a >= 0 { lo[v] as i128 } else { hi[v] as i128 })
                    .sum();
                let max_act: i128 = c
                    .terms
                    .iter()
                    .map(|&(v, a)| a as i128 * if a >= 0 { hi[v] as i128 } else { lo[v] as i128 })
                    .sum();
                let rhs = c.rhs as i128;
                if matches!(c.cmp, Cmp::Le | Cmp::Eq) {
                    if min_act > rhs {
                        return false;
                    }
                    for &(v, a) in &c.terms {
                        // Residual slack when v sits at its cheapest value.
                        if a > 0 {
                            let rest = min_act - a as i128 * lo[v] as i128;
                            let bound = (rhs - rest).div_euclid(a as i128);
                            if bound < hi[v] as i128 {
                                if bound < lo[v] as i128 {
                                    return false;
                                }
                                hi[v] = bound as u64;
                                changed = true;
                            }
                        } else if a < 0 {
                            let rest = min_act - a as i128 * hi[v] as i128;
                            // a * x <= rhs - rest  =>  x >= ceil((rest-rhs)/(-a))
                            let need = (rest - rhs + (-a as i128) - 1).div_euclid(-a as i128);
                            if need > lo[v] as i128 {
                                if need > hi[v] as i128 {
                                    return false;
                                }
                                lo[v] = need as u64;
                                changed = true;
                            }
                        }
                    }
                }
                if matches!(c.cmp, Cmp::Ge | Cmp::Eq) {
                    if max_act < rhs {
                        return false;
                    }
                    for &(v, a) in &c.terms {
                        if a > 0 {
                            let rest = max_act - a as i128 * hi[v] as i128;
                            // a * x >= rhs - rest  =>  x >= ceil((rhs-rest)/a)
                            let need = rhs - rest;
                            if need > 0 {
                                let need = (need + a as i128 - 1).div_euclid(a as i128);
                                if need > lo[v] as i128 {
                                    if need > hi[v] as i128 {
                                        return false;
                                    }
                                    lo[v] = need as u64;
                                    changed = true;
                                }
                            }
                        } else if a < 0 {
                            let rest = max_act - a as i128 * lo[v] as i128;
                            // a * x >= rhs - rest  =>  x <= floor((rest-rhs)/(-a))
                            let bound = (rest - rhs).div_euclid(-a as i128);
                            if bound < hi[v] as i128 {
                                if bound < lo[v] as i128 {
                                    return false;
                                }
                                hi[v] = bound as u64;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Render the model in LP format for inspection with external tools.
    pub fn export_lp(&self) -> String {
        let mut out = String::from("minimize\n obj: 0\nsubject to\n");
        for c in &self.constraints {
            let mut line = format!(" {}:", c.name);
            if c.terms.is_empty() {
                line.push_str(" 0");
            }
            for (i, &(v, a)) in c.terms.iter().enumerate() {
                if i == 0 {
                    let _ = write!(line, " {} {}", a, self.var_names[v]);
                } else if a >= 0 {
                    let _ = write!(line, " + {} {}", a, self.var_names[v]);
                } else {
                    let _ = write!(line, " - {} {}", -a, self.var_names[v]);
                }
            }
            let op = match c.cmp {
                Cmp::Le => "<=",
                Cmp::Eq => "=",
                Cmp::Ge => ">=",
            };
            let _ = writeln!(out, "{} {} {}", line, op, c.rhs);
        }
        out.push_str("bounds\n");
        for (v, name) in self.var_names.iter().enumerate() {
            let _ = writeln!(out, " 0 <= {} <= {}", name, self.upper[v]);
        }
        out.push_str("general\n");
        for name in &self.var_names {
            let _ = writeln!(out, " {}", name);
        }
        out.push_str("end\n");
        out
    }
}

// ---------------------------------------------------------------------------
// Shape models
// ---------------------------------------------------------------------------

/// The fair cost a pattern induces inside one concrete clique: the maximum
/// number of selected neighbors over the clique's own vertices, assuming the
/// modulator selection `nt_star`.
pub fn clique_fc(
    mg: &ModulatedGraph,
    clique: usize,
    column: &[u32],
    pattern: &[u32],
    nt_star: usize,
    alpha: u32,
) -> u64 {
    let mut total_selected: u64 = 0;
    let mut parts = Vec::new();
    for nt in mg.present_types(clique) {
        let size = mg.part(clique, nt).count_ones();
        let sel = matched_count(size, column[nt], pattern[nt], alpha) as u64;
        total_selected += sel;
        parts.push((nt, sel == size as u64));
    }
    parts
        .iter()
        .map(|&(nt, full)| {
            let from_mod = (nt & nt_star).count_ones() as u64;
            // A selected vertex does not count itself; if some part vertex
            // is unselected the worst case keeps the full clique total.
            total_selected + from_mod - u64::from(full)
        })
        .max()
        .unwrap_or(0)
}

struct Group {
    cliques: Vec<usize>,
    /// `(pattern, variable id)` in lexicographic pattern order.
    vars: Vec<(SolutionPattern, usize)>,
}

/// A shape's feasibility program together with the bookkeeping needed to
/// turn a solution back into a vertex set.
pub struct ShapeModel {
    pub model: IlpModel,
    groups: Vec<Group>,
    nt_star: usize,
    alpha: u32,
}

/// Build the integer program deciding whether some solution with this shape
/// has fair cost at most `k` on `mg`.
pub fn build_model(
    mg: &ModulatedGraph,
    shape: &Shape,
    alpha: u32,
    gamma: u32,
    k: u64,
) -> Result<ShapeModel, IlpError> {
    if !crate::shapes::is_coherent(shape, alpha) {
        return Err(IlpError::IncoherentShape);
    }
    let num_types = mg.num_types();
    let nt_star = shape.nt_star;

    // Patterns used by the shape, per column, in lexicographic order.
    let mut per_column: BTreeMap<Vec<u32>, Vec<(&SolutionPattern, u32)>> = BTreeMap::new();
    for ((ct, sp), &count) in &shape.m {
        if count > 0 {
            per_column.entry(ct.clone()).or_default().push((sp, count));
        }
    }

    // Group cliques by (column, admissible pattern subset under budget k).
    let mut groups_by_key: BTreeMap<(Vec<u32>, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for c in 0..mg.cliques().len() {
        let column = mg.truncated_signature(c, alpha + 1);
        let Some(used) = per_column.get(&column) else {
            return Err(IlpError::UnknownColumn { clique: c });
        };
        let s: Vec<usize> = used
            .iter()
            .enumerate()
            .filter(|(_, (sp, _))| {
                condition3(&column, sp, alpha).is_ok()
                    && clique_fc(mg, c, &column, sp, nt_star, alpha) <= k
            })
            .map(|(i, _)| i)
            .collect();
        groups_by_key.entry((column, s)).or_default().push(c);
    }

    let mut var_names = Vec::new();
    let mut upper = Vec::new();
    let mut constraints = Vec::new();
    let mut groups = Vec::new();
    // (column, pattern) -> variable ids across groups, for constraints 2/3.
    let mut vars_of_entry: BTreeMap<(Vec<u32>, SolutionPattern), Vec<usize>> = BTreeMap::new();

    for (gid, ((column, s), cliques)) in groups_by_key.iter().enumerate() {
        let used = &per_column[column];
        let mut vars = Vec::new();
        for &pi in s {
            let (sp, _) = used[pi];
            let id = var_names.len();
            let fmt = |v: &[u32]| {
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-")
            };
            var_names.push(format!("x_c{}_g{}_p{}", fmt(column), gid, fmt(sp)));
            upper.push(cliques.len() as u64);
            vars.push((sp.clone(), id));
            vars_of_entry
                .entry((column.clone(), sp.clone()))
                .or_default()
                .push(id);
        }
        // (1) every clique of the group gets exactly one pattern.
        constraints.push(Constraint {
            terms: vars.iter().map(|&(_, id)| (id, 1)).collect(),
            cmp: Cmp::Eq,
            rhs: cliques.len() as i64,
            name: format!("group{}", gid),
        });
        groups.push(Group { cliques: cliques.clone(), vars });
    }

    // (2)/(3) shape multiplicities: exact below gamma, at-least at gamma.
    for ((ct, sp), &count) in &shape.m {
        if count == 0 {
            continue;
        }
        let ids = vars_of_entry.get(&(ct.clone(), sp.clone())).cloned().unwrap_or_default();
        let (cmp, label) = if count < gamma { (Cmp::Eq, "eq") } else { (Cmp::Ge, "ge") };
        constraints.push(Constraint {
            terms: ids.iter().map(|&id| (id, 1)).collect(),
            cmp,
            rhs: count as i64,
            name: format!("mult_{}_{}", label, constraints.len()),
        });
    }

    // (4) fair cost of every modulator vertex.
    for (i, &v) in mg.modulator().iter().enumerate() {
        let in_mod = (nt_star & mg.modulator_adjacency(v)).count_ones() as i64;
        let mut constant: i64 = 0;
        let mut coeff: BTreeMap<usize, i64> = BTreeMap::new();
        for group in &groups {
            let column = mg.truncated_signature(group.cliques[0], alpha + 1);
            for nt in 0..num_types {
                if nt & (1 << i) == 0 || column[nt] == 0 {
                    continue;
                }
                // Coherence: all used patterns on this entry share a class.
                let fat = column[nt] == alpha + 1
                    && group
                        .vars
                        .first()
                        .map(|(sp, _)| classify(column[nt], sp[nt], alpha) == TripleClass::Fat)
                        .unwrap_or(false);
                if fat {
                    for &c in &group.cliques {
                        constant += mg.part(c, nt).count_ones() as i64;
                    }
                    for (sp, id) in &group.vars {
                        *coeff.entry(*id).or_insert(0) -= (alpha - sp[nt]) as i64;
                    }
                } else {
                    for (sp, id) in &group.vars {
                        *coeff.entry(*id).or_insert(0) += sp[nt] as i64;
                    }
                }
            }
        }
        constraints.push(Constraint {
            terms: coeff.into_iter().filter(|&(_, a)| a != 0).collect(),
            cmp: Cmp::Le,
            rhs: k as i64 - in_mod - constant,
            name: format!("fc_mod{}", i),
        });
    }

    Ok(ShapeModel {
        model: IlpModel { var_names, upper, constraints },
        groups,
        nt_star,
        alpha,
    })
}

/// Turn a feasible assignment back into a concrete vertex set: within each
/// group the lowest-indexed cliques receive the lexicographically smallest
/// patterns, and within each part the lowest-indexed vertices are selected.
pub fn extract_solution(mg: &ModulatedGraph, sm: &ShapeModel, assignment: &[u64]) -> VertexSet {
    let mut x: VertexSet = 0;
    for (i, &v) in mg.modulator().iter().enumerate() {
        if sm.nt_star & (1 << i) != 0 {
            x |= 1 << v;
        }
    }
    for group in &sm.groups {
        let mut cliques = group.cliques.iter();
        for (sp, id) in &group.vars {
            for _ in 0..assignment[*id] {
                let &c = cliques.next().expect("assignment matches group size");
                let column = mg.truncated_signature(c, sm.alpha + 1);
                for nt in mg.present_types(c) {
                    let part = mg.part(c, nt);
                    let size = part.count_ones();
                    let sel = matched_count(size, column[nt], sp[nt], sm.alpha);
                    x |= lowest_k(part, sel as usize);
                }
            }
        }
    }
    x
}

/// Decide the shape under budget `k` and, if feasible, return a witness set.
pub fn solve_shape(
    mg: &ModulatedGraph,
    shape: &Shape,
    alpha: u32,
    gamma: u32,
    k: u64,
) -> Result<Option<VertexSet>, IlpError> {
    let sm = build_model(mg, shape, alpha, gamma, k)?;
    Ok(sm.model.solve().map(|a| extract_solution(mg, &sm, &a)))
}
