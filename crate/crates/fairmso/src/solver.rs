//! The solving pipeline: enumerate candidate shapes for a modulated graph,
//! discharge each shape's cardinality side with the integer program, check
//! the formula on the shape's associated instance, and binary-search the
//! optimal fair-cost budget.
//!
//! Shape checks are independent of the budget `k`, so their results are
//! cached and shared across all budgets probed by the search. The integer
//! program is cheap and `k`-dependent, so it runs first and the formula
//! evaluation only runs for shapes that are still alive.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Graph, ModulatedGraph, VertexSet};
use crate::ilp::{build_model, extract_solution, IlpError};
use crate::logic::{derive_params, DerivedParams, Formula, FormulaError, Preset};
use crate::oracle::Property;
use crate::shapes::{
    admissible_patterns, associated_instance, is_coherent, PatternFilter, Shape, ShapeError,
    SolutionPattern,
};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Ilp(#[from] IlpError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Logic(#[from] FormulaError),
    #[error("shape space exceeds the configured limit of {0} shapes")]
    TooManyShapes(u64),
}

/// Truncation and counting parameters plus an optional pattern restriction.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Odd truncation threshold.
    pub alpha: u32,
    /// Counting cap; clamped to the number of cliques per instance.
    pub gamma: u64,
    /// Restriction of the per-part pattern space, when the problem
    /// guarantees one.
    pub filter: Option<PatternFilter>,
    /// Abort when a single instance would enumerate more shapes than this.
    pub max_shapes: u64,
}

impl SolveConfig {
    /// Parameters guaranteed sound for an arbitrary formula, derived from
    /// its quantifier counts and the modulator size.
    pub fn from_formula(
        formula: &Formula,
        d: usize,
        alpha_override: Option<u64>,
        gamma_override: Option<u64>,
    ) -> Result<(Self, DerivedParams), FormulaError> {
        let metrics = crate::logic::metrics(formula);
        let params = derive_params(&metrics, d, alpha_override, gamma_override)?;
        let cfg = SolveConfig {
            // Instances are capped at 64 vertices, so clamping the odd
            // threshold at 65 loses nothing.
            alpha: params.alpha.min(65) as u32,
            gamma: params.gamma,
            filter: None,
            max_shapes: DEFAULT_MAX_SHAPES,
        };
        Ok((cfg, params))
    }

    /// Tight parameters for the built-in problems. The pattern restriction
    /// bounds how far any solution can deviate from taking all (or none) of
    /// a part, which keeps `alpha` small and makes `gamma` unnecessary.
    pub fn for_preset(preset: &Preset) -> Option<Self> {
        let filter = preset_pattern_filter(preset)?;
        let c = match filter {
            PatternFilter::FatOnly { max_deficit } => max_deficit,
            PatternFilter::ThinOnly { max_count } => max_count,
        };
        Some(SolveConfig {
            alpha: 2 * c + 1,
            gamma: u64::MAX,
            filter: Some(filter),
            max_shapes: DEFAULT_MAX_SHAPES,
        })
    }
}

pub const DEFAULT_MAX_SHAPES: u64 = 50_000_000;

/// The per-part pattern restriction valid for a built-in problem, if any.
///
/// Deletion problems are fat: a clique part with too many unselected
/// vertices contains an uncovered edge (vertex cover), a triangle (feedback
/// vertex set), or an odd cycle (odd cycle transversal). Domination-style
/// problems are thin: selections can be pruned to few vertices per part
/// without breaking the constraints or increasing the fair cost.
pub fn preset_pattern_filter(preset: &Preset) -> Option<PatternFilter> {
    use crate::logic::SetSpec;
    match preset {
        Preset::Vc => Some(PatternFilter::FatOnly { max_deficit: 1 }),
        Preset::Fvs | Preset::Oct => Some(PatternFilter::FatOnly { max_deficit: 2 }),
        Preset::Ds => Some(PatternFilter::ThinOnly { max_count: 1 }),
        Preset::SigmaRho { sigma, .. } => match sigma {
            SetSpec::Finite(set) => {
                let max = set.iter().max().copied().unwrap_or(0);
                Some(PatternFilter::ThinOnly { max_count: max + 1 })
            }
            _ => None,
        },
    }
}

/// Cache of shape evaluations, shared across budgets.
pub type EvalCache = BTreeMap<Shape, bool>;

/// One solved instance: the budget, a witness set, and its shape.
#[derive(Debug, Clone)]
pub struct Solution {
    pub k: u64,
    pub witness: VertexSet,
    pub shape: Shape,
}

/// All the ways `count` cliques of one column can distribute over the
/// admissible patterns, as saturated multiplicity vectors, deduplicated.
fn column_options(
    patterns: &[SolutionPattern],
    count: u32,
    gamma: u32,
) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; patterns.len()];
    fn rec(
        patterns_len: usize,
        remaining: u32,
        idx: usize,
        gamma: u32,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if idx + 1 == patterns_len {
            current[idx] = remaining.min(gamma);
            out.push(current.clone());
            return;
        }
        for take in 0..=remaining {
            current[idx] = take.min(gamma);
            rec(patterns_len, remaining - take, idx + 1, gamma, current, out);
        }
    }
    if patterns.is_empty() {
        return if count == 0 { vec![vec![]] } else { vec![] };
    }
    rec(patterns.len(), count, 0, gamma, &mut current, &mut out);
    out.sort();
    out.dedup();
    out
}

/// A column that occurs in the graph, with its patterns and options.
struct ColumnSpace {
    column: Vec<u32>,
    patterns: Vec<SolutionPattern>,
    options: Vec<Vec<u32>>,
}

fn column_spaces(
    mg: &ModulatedGraph,
    alpha: u32,
    gamma: u32,
    filter: Option<PatternFilter>,
) -> Vec<ColumnSpace> {
    let mut counts: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
    for c in 0..mg.cliques().len() {
        *counts.entry(mg.truncated_signature(c, alpha + 1)).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(column, count)| {
            let patterns = admissible_patterns(&column, alpha, filter);
            let options = column_options(&patterns, count, gamma);
            ColumnSpace { column, patterns, options }
        })
        .collect()
}

/// Decide whether some vertex set satisfying `property` has fair cost at
/// most `k`, returning a witness. `cache` carries shape evaluations between
/// calls with different budgets.
pub fn solve_decision(
    mg: &ModulatedGraph,
    property: &Property,
    cfg: &SolveConfig,
    k: u64,
    cache: &mut EvalCache,
) -> Result<Option<Solution>, SolveError> {
    let alpha = cfg.alpha;
    let gamma = cfg
        .gamma
        .min(mg.cliques().len().max(1) as u64) as u32;
    let spaces = column_spaces(mg, alpha, gamma, cfg.filter);
    let total: u64 = spaces
        .iter()
        .map(|s| s.options.len() as u64)
        .try_fold(1u64, |acc, n| acc.checked_mul(n))
        .unwrap_or(u64::MAX);
    if total.saturating_mul(1 << mg.d()) > cfg.max_shapes {
        return Err(SolveError::TooManyShapes(cfg.max_shapes));
    }
    let modulator_graph = mg.modulator_graph();
    let fat_first = matches!(cfg.filter, Some(PatternFilter::FatOnly { .. }));
    let nt_stars: Vec<usize> = if fat_first {
        (0..1usize << mg.d()).rev().collect()
    } else {
        (0..1usize << mg.d()).collect()
    };

    for nt_star in nt_stars {
        // Odometer over per-column options.
        let mut choice = vec![0usize; spaces.len()];
        loop {
            let mut m = BTreeMap::new();
            for (s, &ci) in spaces.iter().zip(&choice) {
                for (pi, &mult) in s.options[ci].iter().enumerate() {
                    if mult > 0 {
                        m.insert((s.column.clone(), s.patterns[pi].clone()), mult);
                    }
                }
            }
            let shape = Shape { nt_star, m };
            if is_coherent(&shape, alpha) {
                // Cardinality side first: cheap and budget-dependent.
                let sm = build_model(mg, &shape, alpha, gamma, k)?;
                if let Some(assignment) = sm.model.solve() {
                    let satisfied = match cache.get(&shape) {
                        Some(&v) => v,
                        None => {
                            let (inst, ix) =
                                associated_instance(&shape, &modulator_graph, alpha)?;
                            let v = property.check(inst.graph(), ix);
                            cache.insert(shape.clone(), v);
                            v
                        }
                    };
                    if satisfied {
                        let witness = extract_solution(mg, &sm, &assignment);
                        return Ok(Some(Solution { k, witness, shape }));
                    }
                }
            }
            // Advance the odometer; last column fastest.
            let mut i = spaces.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                choice[i] += 1;
                if choice[i] < spaces[i].options.len() {
                    break;
                }
                choice[i] = 0;
            }
            if choice.iter().all(|&c| c == 0) {
                break;
            }
            if spaces.is_empty() {
                break;
            }
        }
    }
    Ok(None)
}

/// Minimize the fair cost over all sets satisfying `property`. Returns
/// `None` when no set satisfies the property at all.
pub fn solve_min(
    mg: &ModulatedGraph,
    property: &Property,
    cfg: &SolveConfig,
) -> Result<Option<Solution>, SolveError> {
    let mut cache = EvalCache::new();
    // Any set has fair cost at most the maximum degree, so feasibility at
    // that budget decides satisfiability.
    let max_k = mg.graph().max_degree() as u64;
    let Some(best) = solve_decision(mg, property, cfg, max_k, &mut cache)? else {
        return Ok(None);
    };
    let mut best = best;
    let (mut lo, mut hi) = (0u64, max_k);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match solve_decision(mg, property, cfg, mid, &mut cache)? {
            Some(sol) => {
                hi = mid;
                best = sol;
            }
            None => lo = mid + 1,
        }
    }
    best.k = hi;
    Ok(Some(best))
}

/// Convenience: solve a preset problem on a graph, finding a modulator if
/// none is supplied.
pub fn solve_preset_min(
    g: &Graph,
    modulator: Option<Vec<usize>>,
    preset: &Preset,
) -> Result<Option<Solution>, SolveError> {
    let modulator = modulator.unwrap_or_else(|| crate::cvd::find_modulator_min(g));
    let mg = ModulatedGraph::new(g.clone(), modulator).map_err(ShapeError::Graph)?;
    let cfg = match SolveConfig::for_preset(preset) {
        Some(cfg) => cfg,
        None => {
            let formula = crate::logic::preset_formula(preset);
            SolveConfig::from_formula(&formula, mg.d(), None, None)?.0
        }
    };
    solve_min(&mg, &Property::Preset(preset.clone()), &cfg)
}
