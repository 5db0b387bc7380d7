//! Hard-instance generators: unary bin packing reduces to the unary
//! d-tuple problem, which reduces to fair first-order vertex deletion on a
//! graph with a d-vertex cluster modulator.
//!
//! The emitted formula speaks about the graph after deleting the chosen
//! set, so every quantifier is relativized to non-members of `Free`. The
//! vertex `u` distinguishing two clique vertices is additionally required
//! to differ from both of them: without that the distinguishing clause is
//! always witnessed by the other vertex of the pair and the formula
//! degenerates.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{mask_iter, Graph, GraphError, VertexSet};
use crate::logic::Formula;

#[derive(Debug, Error)]
pub enum HardnessError {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance invalid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Unary bin packing: pack all items into `bins` bins of size `capacity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinPackingInstance {
    pub bins: usize,
    pub capacity: u64,
    pub sizes: Vec<u64>,
}

impl BinPackingInstance {
    pub fn new(bins: usize, capacity: u64, sizes: Vec<u64>) -> Result<Self, HardnessError> {
        if bins == 0 {
            return Err(HardnessError::Invalid("need at least one bin".into()));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(HardnessError::Invalid("item sizes must be positive".into()));
        }
        Ok(BinPackingInstance { bins, capacity, sizes })
    }

    /// Format: a `bins capacity` header, then one item size per line.
    pub fn parse(text: &str) -> Result<Self, HardnessError> {
        let mut lines = numbered_lines(text);
        let (line, header) = lines
            .next()
            .ok_or(HardnessError::Parse { line: 1, msg: "missing `bins capacity` header".into() })?;
        let (bins, capacity) = {
            let mut it = header.split_whitespace();
            let bins = parse_tok(it.next(), line)?;
            let capacity = parse_tok(it.next(), line)?;
            if it.next().is_some() {
                return Err(HardnessError::Parse { line, msg: "trailing tokens".into() });
            }
            (bins as usize, capacity)
        };
        let mut sizes = Vec::new();
        for (line, l) in lines {
            sizes.push(parse_tok(Some(l), line)?);
        }
        BinPackingInstance::new(bins, capacity, sizes)
    }

    /// Exhaustive search over all assignments, with per-bin load pruning.
    pub fn brute_force(&self) -> bool {
        fn rec(sizes: &[u64], loads: &mut Vec<u64>, capacity: u64) -> bool {
            let Some((&s, rest)) = sizes.split_first() else {
                return true;
            };
            for b in 0..loads.len() {
                if loads[b] + s <= capacity {
                    loads[b] += s;
                    if rec(rest, loads, capacity) {
                        loads[b] -= s;
                        return true;
                    }
                    loads[b] -= s;
                }
                // Identical empty bins are interchangeable.
                if loads[b] == 0 {
                    break;
                }
            }
            false
        }
        let mut sorted = self.sizes.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        rec(&sorted, &mut vec![0; self.bins], self.capacity)
    }
}

/// The unary d-tuple problem: assign each tuple a coordinate so that every
/// coordinate's selected entries sum to at most `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DTupleInstance {
    pub d: usize,
    pub b: u64,
    pub tuples: Vec<Vec<u64>>,
}

impl DTupleInstance {
    pub fn new(d: usize, b: u64, tuples: Vec<Vec<u64>>) -> Result<Self, HardnessError> {
        if d == 0 {
            return Err(HardnessError::Invalid("need at least one coordinate".into()));
        }
        for t in &tuples {
            if t.len() != d {
                return Err(HardnessError::Invalid(format!(
                    "tuple {:?} has {} entries, expected {}",
                    t,
                    t.len(),
                    d
                )));
            }
            if t.iter().all(|&a| a == 0) {
                return Err(HardnessError::Invalid("tuples must be non-zero".into()));
            }
        }
        Ok(DTupleInstance { d, b, tuples })
    }

    /// Format: a `d b` header, then one whitespace-separated tuple per line.
    pub fn parse(text: &str) -> Result<Self, HardnessError> {
        let mut lines = numbered_lines(text);
        let (line, header) = lines
            .next()
            .ok_or(HardnessError::Parse { line: 1, msg: "missing `d b` header".into() })?;
        let (d, b) = {
            let mut it = header.split_whitespace();
            let d = parse_tok(it.next(), line)? as usize;
            let b = parse_tok(it.next(), line)?;
            if it.next().is_some() {
                return Err(HardnessError::Parse { line, msg: "trailing tokens".into() });
            }
            (d, b)
        };
        let mut tuples = Vec::new();
        for (line, l) in lines {
            let tuple: Vec<u64> = l
                .split_whitespace()
                .map(|tok| parse_tok(Some(tok), line))
                .collect::<Result<_, _>>()?;
            tuples.push(tuple);
        }
        DTupleInstance::new(d, b, tuples)
    }

    pub fn brute_force(&self) -> bool {
        fn rec(tuples: &[Vec<u64>], loads: &mut Vec<u64>, b: u64) -> bool {
            let Some((t, rest)) = tuples.split_first() else {
                return true;
            };
            for k in 0..loads.len() {
                if loads[k] + t[k] <= b {
                    loads[k] += t[k];
                    if rec(rest, loads, b) {
                        loads[k] -= t[k];
                        return true;
                    }
                    loads[k] -= t[k];
                }
            }
            false
        }
        rec(&self.tuples, &mut vec![0; self.d], self.b)
    }
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_tok(tok: Option<&str>, line: usize) -> Result<u64, HardnessError> {
    tok.ok_or(HardnessError::Parse { line, msg: "expected a number".into() })?
        .parse()
        .map_err(|e| HardnessError::Parse { line, msg: format!("bad number: {e}") })
}

/// Bin packing embeds into the d-tuple problem: one coordinate per bin and
/// every item becomes the constant tuple of its size.
pub fn binpack_to_dtuple(bp: &BinPackingInstance) -> DTupleInstance {
    DTupleInstance {
        d: bp.bins,
        b: bp.capacity,
        tuples: bp.sizes.iter().map(|&s| vec![s; bp.bins]).collect(),
    }
}

/// A generated fair deletion instance.
#[derive(Debug, Clone)]
pub struct FairFoInstance {
    pub graph: Graph,
    pub modulator: Vec<usize>,
    pub formula: Formula,
    pub k: u64,
    /// Tuples that survived zero-entry removal, in construction order.
    pub tuples: Vec<Vec<u64>>,
    pub warnings: Vec<String>,
}

/// Build the deletion instance: one modulator vertex per coordinate, one
/// clique per surviving tuple with `a_k` of its vertices attached to
/// modulator vertex `k`, budget `k = b`, and the deletion formula.
/// Vertices are numbered modulator first, then cliques in input order with
/// attachment groups in coordinate order.
pub fn dtuple_to_fairfo(dt: &DTupleInstance) -> Result<FairFoInstance, HardnessError> {
    // A tuple with a zero entry is assigned that coordinate for free.
    let tuples: Vec<Vec<u64>> = dt
        .tuples
        .iter()
        .filter(|t| t.iter().all(|&a| a > 0))
        .cloned()
        .collect();
    let d = dt.d;
    let n = d + tuples.iter().flatten().sum::<u64>() as usize;
    let mut g = Graph::new(n)?;
    let mut next = d;
    for tuple in &tuples {
        let start = next;
        for (k, &a) in tuple.iter().enumerate() {
            for _ in 0..a {
                g.add_edge(next, k)?;
                next += 1;
            }
        }
        for u in start..next {
            for w in u + 1..next {
                g.add_edge(u, w)?;
            }
        }
    }
    let mut warnings = Vec::new();
    if tuples.len() < 3 {
        warnings.push(format!(
            "only {} tuples survive: the formula's modulator test needs at least 3 \
             pairwise non-adjacent neighbors, so it misclassifies modulator vertices",
            tuples.len()
        ));
    }
    if d >= 2 && !tuples.is_empty() {
        warnings.push(
            "with 2 or more coordinates the pairwise-distinguisher formula is \
             satisfied by deleting every modulator vertex, which has fair cost 1; \
             budgets of 1 or more therefore always answer yes"
                .to_string(),
        );
    }
    Ok(FairFoInstance {
        graph: g,
        modulator: (0..d).collect(),
        formula: deletion_formula(d),
        k: dt.b,
        tuples,
        warnings,
    })
}

/// The reduction formula for a `d`-vertex modulator, relativized so that
/// every quantifier ranges over vertices outside `Free` (the deleted set):
/// no clique may retain vertices adjacent to `d` different modulator
/// vertices. Vertices "in the modulator" are recognized by having three
/// pairwise non-adjacent surviving neighbors.
pub fn deletion_formula(d: usize) -> Formula {
    parse_built(&deletion_formula_text(d))
}

fn parse_built(text: &str) -> Formula {
    crate::logic::parse_formula(text).expect("generated formula must parse")
}

fn conj(mut parts: Vec<String>) -> String {
    let mut body = parts.pop().expect("at least one conjunct");
    while let Some(c) = parts.pop() {
        body = format!("(and {c} {body})");
    }
    body
}

fn deletion_formula_text(d: usize) -> String {
    // modul(v): three pairwise distinct, pairwise non-adjacent surviving
    // neighbors of v.
    let modul = |v: &str| -> String {
        let inner = conj(vec![
            format!("(not (in mc Free))"),
            format!("(adj mc {v})"),
            "(not (eq ma mb))".into(),
            "(not (eq ma mc))".into(),
            "(not (eq mb mc))".into(),
            "(not (adj ma mb))".into(),
            "(not (adj mb mc))".into(),
            "(not (adj mc ma))".into(),
        ]);
        let mid = conj(vec![
            format!("(not (in mb Free))"),
            format!("(adj mb {v})"),
            format!("(existsV mc {inner})"),
        ]);
        let outer = conj(vec![
            format!("(not (in ma Free))"),
            format!("(adj ma {v})"),
            format!("(existsV mb {mid})"),
        ]);
        format!("(existsV ma {outer})")
    };
    let vars: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    let mut conjuncts: Vec<String> = Vec::new();
    for v in &vars {
        conjuncts.push(format!("(not (in {v} Free))"));
    }
    for i in 0..d {
        for j in i + 1..d {
            conjuncts.push(format!("(not (eq {} {}))", vars[i], vars[j]));
        }
    }
    for v in &vars {
        conjuncts.push(format!("(not {})", modul(v)));
    }
    for i in 0..d {
        for j in i + 1..d {
            conjuncts.push(format!("(adj {} {})", vars[i], vars[j]));
        }
    }
    for i in 0..d {
        for j in 0..d {
            if i != j {
                conjuncts.push(format!(
                    "(existsV u (and (not (in u Free)) (and (not (eq u {vi})) \
                     (and (not (eq u {vj})) (and (adj u {vi}) (not (adj u {vj})))))))",
                    vi = vars[i],
                    vj = vars[j]
                ));
            }
        }
    }
    let mut f = conj(conjuncts);
    for v in vars.iter().rev() {
        f = format!("(existsV {v} {f})");
    }
    format!("(not {f})")
}

/// Literal transcription of [`deletion_formula`], evaluated directly on the
/// graph. Used by the reference oracle where the generic evaluator is too
/// slow; equivalence with the generic evaluator is established by tests.
pub fn check_deletion_formula(g: &Graph, x: VertexSet, d: usize) -> bool {
    let alive = g.full_set() & !x;
    let survivors: Vec<usize> = mask_iter(alive).collect();
    // modul(v): three pairwise non-adjacent surviving neighbors.
    let modul = |v: usize| -> bool {
        let nb: Vec<usize> = mask_iter(g.neighbors(v) & alive).collect();
        for (ai, &a) in nb.iter().enumerate() {
            for (bi, &b) in nb.iter().enumerate().skip(ai + 1) {
                if g.has_edge(a, b) {
                    continue;
                }
                for &c in nb.iter().skip(bi + 1) {
                    if !g.has_edge(a, c) && !g.has_edge(b, c) {
                        return true;
                    }
                }
            }
        }
        false
    };
    let modul: Vec<bool> = (0..g.n())
        .map(|v| alive & (1 << v) != 0 && modul(v))
        .collect();
    let distinguish = |vi: usize, vj: usize| -> bool {
        mask_iter(g.neighbors(vi) & alive & !g.neighbors(vj))
            .any(|u| u != vi && u != vj)
    };
    // Search for d distinct pairwise-adjacent non-modul survivors that are
    // pairwise distinguishable in both directions.
    fn rec(
        survivors: &[usize],
        g: &Graph,
        modul: &[bool],
        distinguish: &dyn Fn(usize, usize) -> bool,
        chosen: &mut Vec<usize>,
        start: usize,
        d: usize,
    ) -> bool {
        if chosen.len() == d {
            return true;
        }
        for idx in start..survivors.len() {
            let v = survivors[idx];
            if modul[v] {
                continue;
            }
            if chosen
                .iter()
                .all(|&w| g.has_edge(v, w) && distinguish(v, w) && distinguish(w, v))
            {
                chosen.push(v);
                if rec(survivors, g, modul, distinguish, chosen, idx + 1, d) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    !rec(&survivors, g, &modul, &distinguish, &mut Vec::new(), 0, d)
}

/// Sidecar metadata for a generated instance, as deterministic JSON.
pub fn instance_metadata(
    dt: &DTupleInstance,
    inst: &FairFoInstance,
    expected: Option<bool>,
) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"d\": {},", dt.d);
    let _ = writeln!(out, "  \"b\": {},", dt.b);
    let tuples: Vec<String> = dt
        .tuples
        .iter()
        .map(|t| format!("[{}]", t.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    let _ = writeln!(out, "  \"tuples\": [{}],", tuples.join(","));
    let surviving: Vec<String> = inst
        .tuples
        .iter()
        .map(|t| format!("[{}]", t.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    let _ = writeln!(out, "  \"surviving_tuples\": [{}],", surviving.join(","));
    let _ = writeln!(out, "  \"k\": {},", inst.k);
    let _ = writeln!(
        out,
        "  \"expected\": {},",
        match expected {
            Some(true) => "\"yes\"",
            Some(false) => "\"no\"",
            None => "null",
        }
    );
    let warnings: Vec<String> = inst.warnings.iter().map(|w| format!("{w:?}")).collect();
    let _ = writeln!(out, "  \"warnings\": [{}]", warnings.join(","));
    out.push_str("}\n");
    out
}
