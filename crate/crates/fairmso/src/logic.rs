//! MSO₁ formulas over graphs with one free set variable `Free`.
//!
//! Formulas are s-expressions:
//!
//! ```text
//! (existsV x f)  (forallV x f)  (existsS S f)  (forallS S f)
//! (and f f)  (or f f)  (not f)  (implies f f)
//! (adj x y)  (eq x y)  (in x S)  (in x Free)
//! ```
//!
//! `Free` is reserved for the solution set being quantified over by the
//! surrounding solver; it may not be rebound.
//!
//! Two evaluators are provided. [`evaluate_exhaustive`] expands quantifiers
//! literally (set quantifiers over all `2^n` subsets) and serves as the
//! ground-truth reference. [`evaluate`] produces the same answers but only
//! enumerates quantifier candidates up to twin symmetry: vertices with equal
//! labels and identical neighborhoods (outside one another) are
//! interchangeable by an automorphism, so one representative per class — and
//! one canonical subset per per-class count vector — suffices.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{lowest_k, Graph, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SetRef {
    Var(String),
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    ExistsV(String, Box<Formula>),
    ForallV(String, Box<Formula>),
    ExistsS(String, Box<Formula>),
    ForallS(String, Box<Formula>),
    Adj(String, String),
    Eq(String, String),
    In(String, SetRef),
}

#[derive(Debug, Error)]
#[error("at byte {pos}: {msg}")]
pub struct FormulaError {
    pub pos: usize,
    pub msg: String,
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, FormulaError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                out.push((start, Token::Atom(text[start..i].to_string())));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum VarKind {
    Vertex,
    Set,
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    scope: Vec<(String, VarKind)>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FormulaError> {
        let pos = self.tokens.get(self.pos).map_or(
            self.tokens.last().map_or(0, |(p, _)| *p + 1),
            |(p, _)| *p,
        );
        Err(FormulaError { pos, msg: msg.into() })
    }

    fn next(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    fn expect_atom(&mut self, what: &str) -> Result<&'a str, FormulaError> {
        match self.tokens.get(self.pos) {
            Some((_, Token::Atom(a))) => {
                self.pos += 1;
                Ok(a)
            }
            _ => self.err(format!("expected {what}")),
        }
    }

    fn expect_close(&mut self) -> Result<(), FormulaError> {
        match self.tokens.get(self.pos) {
            Some((_, Token::Close)) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err("expected `)`"),
        }
    }

    fn lookup(&self, name: &str) -> Option<VarKind> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, k)| *k)
    }

    fn vertex_var(&mut self) -> Result<String, FormulaError> {
        let name = self.expect_atom("a vertex variable")?;
        match self.lookup(name) {
            Some(VarKind::Vertex) => Ok(name.to_string()),
            Some(VarKind::Set) => self.err(format!("`{name}` is a set variable, not a vertex variable")),
            None => self.err(format!("unbound variable `{name}`")),
        }
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        match self.next() {
            Some(Token::Open) => {}
            _ => {
                self.pos -= 1;
                return self.err("expected `(`");
            }
        }
        let op = self.expect_atom("an operator")?;
        let f = match op {
            "and" | "or" | "implies" => {
                let a = self.formula()?;
                let b = self.formula()?;
                match op {
                    "and" => Formula::And(Box::new(a), Box::new(b)),
                    "or" => Formula::Or(Box::new(a), Box::new(b)),
                    _ => Formula::Implies(Box::new(a), Box::new(b)),
                }
            }
            "not" => Formula::Not(Box::new(self.formula()?)),
            "existsV" | "forallV" | "existsS" | "forallS" => {
                let name = self.expect_atom("a variable name")?.to_string();
                if name == "Free" {
                    return self.err("`Free` is reserved and cannot be rebound");
                }
                if name == "(" || name == ")" {
                    return self.err("bad variable name");
                }
                let kind = if op.ends_with('V') { VarKind::Vertex } else { VarKind::Set };
                self.scope.push((name.clone(), kind));
                let body = self.formula()?;
                self.scope.pop();
                match op {
                    "existsV" => Formula::ExistsV(name, Box::new(body)),
                    "forallV" => Formula::ForallV(name, Box::new(body)),
                    "existsS" => Formula::ExistsS(name, Box::new(body)),
                    _ => Formula::ForallS(name, Box::new(body)),
                }
            }
            "adj" | "eq" => {
                let x = self.vertex_var()?;
                let y = self.vertex_var()?;
                if op == "adj" {
                    Formula::Adj(x, y)
                } else {
                    Formula::Eq(x, y)
                }
            }
            "in" => {
                let x = self.vertex_var()?;
                let s = self.expect_atom("a set name")?;
                let sref = if s == "Free" {
                    SetRef::Free
                } else {
                    match self.lookup(s) {
                        Some(VarKind::Set) => SetRef::Var(s.to_string()),
                        Some(VarKind::Vertex) => {
                            return self.err(format!("`{s}` is a vertex variable, not a set"))
                        }
                        None => return self.err(format!("unbound set `{s}`")),
                    }
                };
                Formula::In(x, sref)
            }
            other => return self.err(format!("unknown operator `{other}`")),
        };
        self.expect_close()?;
        Ok(f)
    }
}

/// Parse a formula, rejecting unbound variables and kind mismatches.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens: &tokens, pos: 0, scope: Vec::new() };
    let f = p.formula()?;
    if p.pos != tokens.len() {
        return p.err("trailing input after formula");
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::And(a, b) => write!(f, "(and {a} {b})"),
            Formula::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::ExistsV(x, b) => write!(f, "(existsV {x} {b})"),
            Formula::ForallV(x, b) => write!(f, "(forallV {x} {b})"),
            Formula::ExistsS(x, b) => write!(f, "(existsS {x} {b})"),
            Formula::ForallS(x, b) => write!(f, "(forallS {x} {b})"),
            Formula::Adj(x, y) => write!(f, "(adj {x} {y})"),
            Formula::Eq(x, y) => write!(f, "(eq {x} {y})"),
            Formula::In(x, SetRef::Free) => write!(f, "(in {x} Free)"),
            Formula::In(x, SetRef::Var(s)) => write!(f, "(in {x} {s})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Metrics and derived parameters
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulaMetrics {
    /// Total number of vertex quantifiers.
    pub q_v: u32,
    /// Total number of set quantifiers.
    pub q_s: u32,
}

impl FormulaMetrics {
    pub fn is_fo(&self) -> bool {
        self.q_s == 0
    }
}

/// Count quantifiers of each kind.
pub fn metrics(f: &Formula) -> FormulaMetrics {
    fn go(f: &Formula, m: &mut FormulaMetrics) {
        match f {
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                go(a, m);
                go(b, m);
            }
            Formula::Not(a) => go(a, m),
            Formula::ExistsV(_, b) | Formula::ForallV(_, b) => {
                m.q_v += 1;
                go(b, m);
            }
            Formula::ExistsS(_, b) | Formula::ForallS(_, b) => {
                m.q_s += 1;
                go(b, m);
            }
            _ => {}
        }
    }
    let mut m = FormulaMetrics { q_v: 0, q_s: 0 };
    go(f, &mut m);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivedParams {
    /// Twin-class threshold: `2 * 2^q_s * q_v`.
    pub tau: u64,
    /// Smallest odd integer strictly greater than `4 * 2^q_s * q_v`.
    pub alpha: u64,
    /// `2 * 2^(2^d * alpha * q_s) * (q_v + 1)`, saturating.
    pub gamma: u64,
    /// True when an override below the theoretical bound was applied; such
    /// runs are only sound if certified empirically.
    pub heuristic: bool,
}

/// Derive the theoretical parameter bounds for a formula on a `d`-modulator,
/// applying optional overrides.
pub fn derive_params(
    m: &FormulaMetrics,
    d: usize,
    alpha_override: Option<u64>,
    gamma_override: Option<u64>,
) -> Result<DerivedParams, FormulaError> {
    let qv = m.q_v as u128;
    let qs = m.q_s;
    let pow2_qs = 1u128.checked_shl(qs).unwrap_or(u128::MAX);
    let tau = (2 * pow2_qs).saturating_mul(qv).min(u64::MAX as u128) as u64;
    let base = (4 * pow2_qs).saturating_mul(qv).min(u64::MAX as u128 - 2) as u64;
    let alpha_theory = if (base + 1) % 2 == 1 { base + 1 } else { base + 2 };
    let gamma_theory: u64 = {
        // exponent = 2^d * alpha * q_s; astronomically large in general.
        let exp = (1u128 << d.min(127))
            .saturating_mul(alpha_theory as u128)
            .saturating_mul(qs as u128);
        if exp >= 62 {
            u64::MAX
        } else {
            2u64.saturating_mul(1u64 << exp).saturating_mul(m.q_v as u64 + 1)
        }
    };
    let mut heuristic = false;
    let alpha = match alpha_override {
        Some(a) => {
            if a % 2 == 0 {
                return Err(FormulaError {
                    pos: 0,
                    msg: format!("alpha must be odd, got {a}"),
                });
            }
            if a < alpha_theory {
                heuristic = true;
            }
            a
        }
        None => alpha_theory,
    };
    let gamma = match gamma_override {
        Some(g) => {
            if g == 0 {
                return Err(FormulaError { pos: 0, msg: "gamma must be positive".into() });
            }
            if g < gamma_theory {
                heuristic = true;
            }
            g
        }
        None => gamma_theory,
    };
    Ok(DerivedParams { tau, alpha, gamma, heuristic })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

enum Binding {
    Vertex(usize),
    Set(VertexSet),
}

struct Env<'a> {
    g: &'a Graph,
    free: VertexSet,
    stack: Vec<(&'a str, Binding)>,
}

impl<'a> Env<'a> {
    fn vertex(&self, name: &str) -> usize {
        for (n, b) in self.stack.iter().rev() {
            if *n == name {
                if let Binding::Vertex(v) = b {
                    return *v;
                }
            }
        }
        unreachable!("parser guarantees vertex binding for `{name}`")
    }

    fn set(&self, sref: &SetRef) -> VertexSet {
        match sref {
            SetRef::Free => self.free,
            SetRef::Var(name) => {
                for (n, b) in self.stack.iter().rev() {
                    if n == name {
                        if let Binding::Set(s) = b {
                            return *s;
                        }
                    }
                }
                unreachable!("parser guarantees set binding for `{name}`")
            }
        }
    }

    /// Twin classes of the current labeled structure: two vertices belong to
    /// one class iff neither is pinned by a vertex variable, they carry the
    /// same labels (membership in `Free` and every bound set), and they have
    /// identical neighborhoods outside one another. Swapping two such
    /// vertices is an automorphism, so quantifiers need only one
    /// representative (or one canonical subset) per class.
    fn twin_classes(&self) -> Vec<VertexSet> {
        let n = self.g.n();
        let mut pinned = 0u64;
        let mut label = vec![0u64; n];
        for v in 0..n {
            if self.free & (1 << v) != 0 {
                label[v] |= 1;
            }
        }
        let mut bit = 1;
        for (_, b) in &self.stack {
            match b {
                Binding::Vertex(v) => pinned |= 1 << *v,
                Binding::Set(s) => {
                    for v in 0..n {
                        if s & (1 << v) != 0 {
                            label[v] |= 1 << bit;
                        }
                    }
                    bit += 1;
                }
            }
        }
        let mut classes: Vec<VertexSet> = Vec::new();
        'vertices: for v in 0..n {
            if pinned & (1 << v) == 0 {
                for class in classes.iter_mut() {
                    let u = class.trailing_zeros() as usize;
                    if pinned & (1 << u) == 0
                        && label[u] == label[v]
                        && self.g.neighbors(u) & !(1 << v) == self.g.neighbors(v) & !(1 << u)
                    {
                        *class |= 1 << v;
                        continue 'vertices;
                    }
                }
            }
            classes.push(1 << v);
        }
        classes
    }
}

fn eval<'a>(env: &mut Env<'a>, f: &'a Formula) -> bool {
    match f {
        Formula::And(a, b) => eval(env, a) && eval(env, b),
        Formula::Or(a, b) => eval(env, a) || eval(env, b),
        Formula::Implies(a, b) => !eval(env, a) || eval(env, b),
        Formula::Not(a) => !eval(env, a),
        Formula::Adj(x, y) => {
            let (u, v) = (env.vertex(x), env.vertex(y));
            env.g.has_edge(u, v)
        }
        Formula::Eq(x, y) => env.vertex(x) == env.vertex(y),
        Formula::In(x, s) => {
            let v = env.vertex(x);
            env.set(s) & (1 << v) != 0
        }
        Formula::ExistsV(x, b) | Formula::ForallV(x, b) => {
            let exists = matches!(f, Formula::ExistsV(..));
            let classes = env.twin_classes();
            for class in classes {
                let rep = class.trailing_zeros() as usize;
                env.stack.push((x, Binding::Vertex(rep)));
                let r = eval(env, b);
                env.stack.pop();
                if r == exists {
                    return exists;
                }
            }
            !exists
        }
        Formula::ExistsS(s, b) | Formula::ForallS(s, b) => {
            let exists = matches!(f, Formula::ExistsS(..));
            let classes = env.twin_classes();
            let sizes: Vec<usize> = classes.iter().map(|c| c.count_ones() as usize).collect();
            let total: usize = sizes.iter().sum();
            // Suffix sums for pruning the count-vector enumeration.
            let mut suffix = vec![0usize; classes.len() + 1];
            for i in (0..classes.len()).rev() {
                suffix[i] = suffix[i + 1] + sizes[i];
            }
            // Enumerate canonical subsets in order of increasing cardinality
            // so satisfied existentials exit early.
            fn rec<'a>(
                env: &mut Env<'a>,
                name: &'a str,
                body: &'a Formula,
                exists: bool,
                classes: &[VertexSet],
                sizes: &[usize],
                suffix: &[usize],
                i: usize,
                remaining: usize,
                acc: VertexSet,
            ) -> Option<bool> {
                if i == classes.len() {
                    debug_assert_eq!(remaining, 0);
                    env.stack.push((name, Binding::Set(acc)));
                    let r = eval(env, body);
                    env.stack.pop();
                    if r == exists {
                        return Some(exists);
                    }
                    return None;
                }
                if remaining > suffix[i] {
                    return None;
                }
                let take_max = remaining.min(sizes[i]);
                for k in 0..=take_max {
                    if remaining - k > suffix[i + 1] {
                        continue;
                    }
                    let sub = lowest_k(classes[i], k);
                    if let Some(r) = rec(
                        env, name, body, exists, classes, sizes, suffix, i + 1,
                        remaining - k, acc | sub,
                    ) {
                        return Some(r);
                    }
                }
                None
            }
            for t in 0..=total {
                if let Some(r) =
                    rec(env, s, b, exists, &classes, &sizes, &suffix, 0, t, 0)
                {
                    return r;
                }
            }
            !exists
        }
    }
}

/// Evaluate `f` on `g` with `Free` bound to `free`, using twin-symmetry
/// reduction. Agrees with [`evaluate_exhaustive`] on all inputs.
pub fn evaluate(g: &Graph, free: VertexSet, f: &Formula) -> bool {
    let mut env = Env { g, free, stack: Vec::new() };
    eval(&mut env, f)
}

/// Reference evaluator: vertex quantifiers range over all vertices, set
/// quantifiers over all `2^n` subsets. Exponential; intended for
/// cross-checking on small graphs.
pub fn evaluate_exhaustive(g: &Graph, free: VertexSet, f: &Formula) -> bool {
    assert!(g.n() <= 26, "exhaustive evaluation is limited to 26 vertices");
    fn go<'a>(env: &mut Env<'a>, f: &'a Formula) -> bool {
        match f {
            Formula::And(a, b) => go(env, a) && go(env, b),
            Formula::Or(a, b) => go(env, a) || go(env, b),
            Formula::Implies(a, b) => !go(env, a) || go(env, b),
            Formula::Not(a) => !go(env, a),
            Formula::Adj(x, y) => {
                let (u, v) = (env.vertex(x), env.vertex(y));
                env.g.has_edge(u, v)
            }
            Formula::Eq(x, y) => env.vertex(x) == env.vertex(y),
            Formula::In(x, s) => {
                let v = env.vertex(x);
                env.set(s) & (1 << v) != 0
            }
            Formula::ExistsV(x, b) | Formula::ForallV(x, b) => {
                let exists = matches!(f, Formula::ExistsV(..));
                for v in 0..env.g.n() {
                    env.stack.push((x, Binding::Vertex(v)));
                    let r = go(env, b);
                    env.stack.pop();
                    if r == exists {
                        return exists;
                    }
                }
                !exists
            }
            Formula::ExistsS(s, b) | Formula::ForallS(s, b) => {
                let exists = matches!(f, Formula::ExistsS(..));
                let limit = 1u64 << env.g.n();
                for mask in 0..limit {
                    env.stack.push((s, Binding::Set(mask)));
                    let r = go(env, b);
                    env.stack.pop();
                    if r == exists {
                        return exists;
                    }
                }
                !exists
            }
        }
    }
    let mut env = Env { g, free, stack: Vec::new() };
    go(&mut env, f)
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// σ or ρ degree-set specification for the `[sigma, rho]` family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetSpec {
    /// A finite set of allowed counts.
    Finite(BTreeSet<u32>),
    /// All of ℕ.
    All,
    /// ℕ minus a finite set of excluded counts.
    Cofinite(BTreeSet<u32>),
}

impl SetSpec {
    pub fn contains(&self, count: u32) -> bool {
        match self {
            SetSpec::Finite(set) => set.contains(&count),
            SetSpec::All => true,
            SetSpec::Cofinite(excluded) => !excluded.contains(&count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preset {
    Vc,
    Fvs,
    Oct,
    Ds,
    SigmaRho { sigma: SetSpec, rho: SetSpec },
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Vc => "vc",
            Preset::Fvs => "fvs",
            Preset::Oct => "oct",
            Preset::Ds => "ds",
            Preset::SigmaRho { .. } => "sigma-rho",
        }
    }

    /// The admissible σ/ρ combinations: σ finite (ρ finite or cofinite), or
    /// σ = ℕ with ρ cofinite.
    pub fn validate(&self) -> Result<(), FormulaError> {
        if let Preset::SigmaRho { sigma, rho } = self {
            match (sigma, rho) {
                (SetSpec::Finite(_), SetSpec::Finite(r)) if !r.is_empty() => Ok(()),
                (SetSpec::Finite(_), SetSpec::Cofinite(_)) => Ok(()),
                (SetSpec::All, SetSpec::Cofinite(_)) => Ok(()),
                _ => Err(FormulaError {
                    pos: 0,
                    msg: "sigma/rho must be: sigma finite, or sigma = N with rho cofinite"
                        .into(),
                }),
            }
        } else {
            Ok(())
        }
    }
}

fn band(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}
fn bor(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}
fn bimplies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}
fn bnot(a: Formula) -> Formula {
    Formula::Not(Box::new(a))
}
fn bexists(x: &str, b: Formula) -> Formula {
    Formula::ExistsV(x.into(), Box::new(b))
}
fn bforall(x: &str, b: Formula) -> Formula {
    Formula::ForallV(x.into(), Box::new(b))
}
fn bexists_s(x: &str, b: Formula) -> Formula {
    Formula::ExistsS(x.into(), Box::new(b))
}
fn badj(x: &str, y: &str) -> Formula {
    Formula::Adj(x.into(), y.into())
}
fn beq(x: &str, y: &str) -> Formula {
    Formula::Eq(x.into(), y.into())
}
fn bin_free(x: &str) -> Formula {
    Formula::In(x.into(), SetRef::Free)
}
fn bin(x: &str, s: &str) -> Formula {
    Formula::In(x.into(), SetRef::Var(s.into()))
}
fn ands(mut fs: Vec<Formula>) -> Formula {
    let last = fs.pop().expect("ands of nothing");
    fs.into_iter().rev().fold(last, |acc, f| band(f, acc))
}
fn ors(mut fs: Vec<Formula>) -> Formula {
    let last = fs.pop().expect("ors of nothing");
    fs.into_iter().rev().fold(last, |acc, f| bor(f, acc))
}

/// "`v` has at least `t` distinct neighbors inside `Free`". For `t = 0` this
/// is a tautology, encoded as `(eq v v)`.
fn at_least_in_free(v: &str, t: u32) -> Formula {
    if t == 0 {
        return beq(v, v);
    }
    let names: Vec<String> = (0..t).map(|i| format!("{v}_w{i}")).collect();
    let mut conj = Vec::new();
    for (i, yi) in names.iter().enumerate() {
        conj.push(badj(yi, v));
        conj.push(bin_free(yi));
        for yj in &names[..i] {
            conj.push(bnot(beq(yj, yi)));
        }
    }
    let mut body = ands(conj);
    for yi in names.iter().rev() {
        body = bexists(yi, body);
    }
    body
}

fn exactly_in_free(v: &str, j: u32) -> Formula {
    band(at_least_in_free(v, j), bnot(at_least_in_free(v, j + 1)))
}

fn count_in_spec(v: &str, spec: &SetSpec) -> Option<Formula> {
    match spec {
        SetSpec::All => None,
        SetSpec::Finite(set) => {
            if set.is_empty() {
                Some(bnot(beq(v, v)))
            } else {
                Some(ors(set.iter().map(|&j| exactly_in_free(v, j)).collect()))
            }
        }
        SetSpec::Cofinite(excluded) => {
            if excluded.is_empty() {
                Some(beq(v, v))
            } else {
                Some(bnot(ors(
                    excluded.iter().map(|&j| exactly_in_free(v, j)).collect(),
                )))
            }
        }
    }
}

/// Build the defining formula of a preset problem, with `Free` standing for
/// the solution set.
pub fn preset_formula(p: &Preset) -> Formula {
    match p {
        // Every edge has an endpoint in the solution.
        Preset::Vc => bforall(
            "x",
            bforall(
                "y",
                bimplies(badj("x", "y"), bor(bin_free("x"), bin_free("y"))),
            ),
        ),
        // Every vertex outside the solution has a neighbor inside it.
        Preset::Ds => bforall(
            "x",
            bimplies(
                bnot(bin_free("x")),
                bexists("y", band(badj("y", "x"), bin_free("y"))),
            ),
        ),
        // No nonempty subgraph of G - Free has minimum degree 2, i.e.
        // G - Free is a forest.
        Preset::Fvs => bnot(bexists_s(
            "S",
            ands(vec![
                bexists("w", bin("w", "S")),
                bforall("x", bimplies(bin("x", "S"), bnot(bin_free("x")))),
                bforall(
                    "x",
                    bimplies(
                        bin("x", "S"),
                        bexists(
                            "y",
                            bexists(
                                "z",
                                ands(vec![
                                    bnot(beq("y", "z")),
                                    bin("y", "S"),
                                    bin("z", "S"),
                                    badj("x", "y"),
                                    badj("x", "z"),
                                ]),
                            ),
                        ),
                    ),
                ),
            ]),
        )),
        // The two color classes partition V - Free with no monochromatic
        // edge, i.e. G - Free is bipartite. Guards constraining A and B away
        // from Free come first so the evaluator discards invalid candidates
        // cheaply.
        Preset::Oct => bexists_s(
            "A",
            band(
                bforall("x", bimplies(bin("x", "A"), bnot(bin_free("x")))),
                bexists_s(
                    "B",
                    ands(vec![
                        bforall("x", bimplies(bin("x", "B"), bnot(bin_free("x")))),
                        bforall(
                            "x",
                            bimplies(
                                bnot(bin_free("x")),
                                band(
                                    bor(bin("x", "A"), bin("x", "B")),
                                    bnot(band(bin("x", "A"), bin("x", "B"))),
                                ),
                            ),
                        ),
                        bforall(
                            "x",
                            bforall(
                                "y",
                                bimplies(
                                    badj("x", "y"),
                                    bnot(bor(
                                        band(bin("x", "A"), bin("y", "A")),
                                        band(bin("x", "B"), bin("y", "B")),
                                    )),
                                ),
                            ),
                        ),
                    ]),
                ),
            ),
        ),
        // Members of the solution must see a number of solution neighbors in
        // sigma; non-members a number in rho.
        Preset::SigmaRho { sigma, rho } => {
            let sigma_cond = count_in_spec("v", sigma);
            let rho_cond = count_in_spec("v", rho);
            let mut parts = Vec::new();
            if let Some(c) = sigma_cond {
                parts.push(bimplies(bin_free("v"), c));
            }
            if let Some(c) = rho_cond {
                parts.push(bimplies(bnot(bin_free("v")), c));
            }
            if parts.is_empty() {
                // sigma = rho = N: anything goes.
                bforall("v", beq("v", "v"))
            } else {
                bforall("v", ands(parts))
            }
        }
    }
}
