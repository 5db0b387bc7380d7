//! Undirected graphs on at most 64 vertices and their cluster-modulator views.
//!
//! Vertices are dense `0..n` indices and vertex sets are `u64` bitmasks, which
//! keeps the brute-force oracles and the shape machinery cheap. 64 vertices is
//! far beyond what the doubly-exponential parameter bounds allow anyway.

use thiserror::Error;

/// A set of vertices, one bit per vertex index.
pub type VertexSet = u64;

/// A neighborhood type: bit `i` is set iff the vertex is adjacent to the
/// `i`-th modulator vertex (in modulator order).
pub type NeighborhoodType = usize;

pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("graphs are limited to {MAX_VERTICES} vertices, got {0}")]
    TooLarge(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {v} out of range (n = {n})")]
    OutOfRange { v: usize, n: usize },
    #[error("duplicate vertex {0} in modulator")]
    DuplicateModulatorVertex(usize),
    #[error("removing the modulator leaves non-adjacent vertices {u} and {v} in one component")]
    NotClusterModulator { u: usize, v: usize },
}

/// Collect an iterator of vertex indices into a bitmask.
pub fn mask_from<I: IntoIterator<Item = usize>>(iter: I) -> VertexSet {
    iter.into_iter().fold(0, |m, v| m | (1u64 << v))
}

/// Expand a bitmask into a sorted list of vertex indices.
pub fn mask_vec(mask: VertexSet) -> Vec<usize> {
    (0..MAX_VERTICES).filter(|&v| mask & (1 << v) != 0).collect()
}

/// Iterate over the vertices of a bitmask in increasing order.
pub fn mask_iter(mask: VertexSet) -> impl Iterator<Item = usize> {
    std::iter::successors(Some(mask), |&m| (m != 0).then(|| m & (m - 1)))
        .take_while(|&m| m != 0)
        .map(|m| m.trailing_zeros() as usize)
}

/// Keep only the `k` lowest-indexed vertices of `mask`.
pub fn lowest_k(mask: VertexSet, k: usize) -> VertexSet {
    let mut out = 0;
    for v in mask_iter(mask).take(k) {
        out |= 1 << v;
    }
    out
}

/// A simple undirected graph with adjacency stored as one bitmask per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooLarge(n));
        }
        Ok(Graph { n, adj: vec![0; n] })
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::OutOfRange { v: u, n: self.n });
        }
        if v >= self.n {
            return Err(GraphError::OutOfRange { v, n: self.n });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u] & (1 << v) != 0
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// The set of all vertices.
    pub fn full_set(&self) -> VertexSet {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in mask_iter(self.adj[u]) {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    /// Fair cost of a vertex set: the largest number of members of `x` found
    /// in the open neighborhood of any vertex of the graph.
    pub fn fair_cost(&self, x: VertexSet) -> usize {
        (0..self.n)
            .map(|v| (self.adj[v] & x).count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.component_of(0, self.full_set()) == self.full_set()
    }

    /// Component of `v` inside the induced subgraph on `within`.
    pub fn component_of(&self, v: usize, within: VertexSet) -> VertexSet {
        debug_assert!(within & (1 << v) != 0);
        let mut seen = 1u64 << v;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for u in mask_iter(frontier) {
                next |= self.adj[u] & within & !seen;
            }
            seen |= next;
            frontier = next;
        }
        seen
    }

    /// Connected components of the induced subgraph on `within`, ordered by
    /// their lowest vertex.
    pub fn components(&self, within: VertexSet) -> Vec<VertexSet> {
        let mut out = Vec::new();
        let mut left = within;
        while left != 0 {
            let v = left.trailing_zeros() as usize;
            let comp = self.component_of(v, within);
            out.push(comp);
            left &= !comp;
        }
        out
    }

    /// Is the induced subgraph on `mask` a complete graph?
    pub fn is_clique(&self, mask: VertexSet) -> bool {
        mask_iter(mask).all(|v| self.adj[v] & mask == mask & !(1 << v))
    }

    /// Induced subgraph on `keep`; vertices are renumbered in increasing
    /// order. Returns the graph together with the old index of each new
    /// vertex.
    pub fn induced(&self, keep: VertexSet) -> (Graph, Vec<usize>) {
        let old: Vec<usize> = mask_iter(keep & self.full_set()).collect();
        let mut g = Graph::new(old.len()).expect("induced subgraph cannot grow");
        for (i, &u) in old.iter().enumerate() {
            for (j, &v) in old.iter().enumerate().take(i) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        (g, old)
    }

    /// Parse the edge-list format: a `n m` header, `m` lines `u v`, and an
    /// optional trailing `modulator: i1 i2 ...` line.
    pub fn parse(text: &str) -> Result<(Graph, Option<Vec<usize>>), GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing `n m` header".into(),
        })?;
        let mut it = header.split_whitespace();
        let parse_num = |tok: Option<&str>, line: usize| -> Result<usize, GraphError> {
            tok.ok_or(GraphError::Parse {
                line,
                msg: "expected a number".into(),
            })?
            .parse()
            .map_err(|e| GraphError::Parse {
                line,
                msg: format!("bad number: {e}"),
            })
        };
        let n = parse_num(it.next(), line)?;
        let m = parse_num(it.next(), line)?;
        if it.next().is_some() {
            return Err(GraphError::Parse {
                line,
                msg: "trailing tokens after `n m` header".into(),
            });
        }
        let mut g = Graph::new(n)?;
        let mut modulator = None;
        let mut edges = 0usize;
        for (line, l) in lines {
            if let Some(rest) = l.strip_prefix("modulator:") {
                if modulator.is_some() {
                    return Err(GraphError::Parse {
                        line,
                        msg: "duplicate modulator line".into(),
                    });
                }
                let mut mods = Vec::new();
                for tok in rest.split_whitespace() {
                    let v: usize = tok.parse().map_err(|e| GraphError::Parse {
                        line,
                        msg: format!("bad modulator vertex: {e}"),
                    })?;
                    if v >= n {
                        return Err(GraphError::OutOfRange { v, n });
                    }
                    mods.push(v);
                }
                modulator = Some(mods);
                continue;
            }
            let mut it = l.split_whitespace();
            let u = parse_num(it.next(), line)?;
            let v = parse_num(it.next(), line)?;
            if it.next().is_some() {
                return Err(GraphError::Parse {
                    line,
                    msg: "trailing tokens after edge".into(),
                });
            }
            g.add_edge(u, v)?;
            edges += 1;
        }
        if edges != m {
            return Err(GraphError::Parse {
                line: 1,
                msg: format!("header promises {m} edges, found {edges}"),
            });
        }
        Ok((g, modulator))
    }

    /// Render in the same format accepted by [`Graph::parse`].
    pub fn to_text(&self, modulator: Option<&[usize]>) -> String {
        let edges = self.edges();
        let mut out = format!("{} {}\n", self.n, edges.len());
        for (u, v) in edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        if let Some(d) = modulator {
            out.push_str("modulator:");
            for v in d {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// A graph together with a validated cluster-deletion modulator: deleting the
/// modulator leaves a disjoint union of cliques, which are stored in order of
/// their lowest vertex.
#[derive(Debug, Clone)]
pub struct ModulatedGraph {
    graph: Graph,
    modulator: Vec<usize>,
    mod_set: VertexSet,
    cliques: Vec<VertexSet>,
    /// Neighborhood type of every non-modulator vertex.
    vertex_nt: Vec<Option<NeighborhoodType>>,
}

impl ModulatedGraph {
    /// Validate that `modulator` is a cluster deletion set of `graph`.
    pub fn new(graph: Graph, modulator: Vec<usize>) -> Result<Self, GraphError> {
        let mut mod_set = 0u64;
        for &v in &modulator {
            if v >= graph.n() {
                return Err(GraphError::OutOfRange { v, n: graph.n() });
            }
            if mod_set & (1 << v) != 0 {
                return Err(GraphError::DuplicateModulatorVertex(v));
            }
            mod_set |= 1 << v;
        }
        let rest = graph.full_set() & !mod_set;
        let cliques = graph.components(rest);
        for c in &cliques {
            if !graph.is_clique(*c) {
                // Find a witness pair for the error message.
                let vs: Vec<usize> = mask_iter(*c).collect();
                for (i, &u) in vs.iter().enumerate() {
                    for &v in &vs[i + 1..] {
                        if !graph.has_edge(u, v) {
                            return Err(GraphError::NotClusterModulator { u, v });
                        }
                    }
                }
            }
        }
        let vertex_nt = (0..graph.n())
            .map(|v| {
                if mod_set & (1 << v) != 0 {
                    None
                } else {
                    Some(
                        modulator
                            .iter()
                            .enumerate()
                            .filter(|&(_, &d)| graph.has_edge(v, d))
                            .fold(0usize, |nt, (i, _)| nt | (1 << i)),
                    )
                }
            })
            .collect();
        Ok(ModulatedGraph {
            graph,
            modulator,
            mod_set,
            cliques,
            vertex_nt,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn modulator(&self) -> &[usize] {
        &self.modulator
    }

    pub fn modulator_set(&self) -> VertexSet {
        self.mod_set
    }

    pub fn d(&self) -> usize {
        self.modulator.len()
    }

    /// Number of possible neighborhood types, `2^d`.
    pub fn num_types(&self) -> usize {
        1usize << self.modulator.len()
    }

    pub fn cliques(&self) -> &[VertexSet] {
        &self.cliques
    }

    /// Neighborhood type of a non-modulator vertex.
    pub fn neighborhood_type(&self, v: usize) -> Option<NeighborhoodType> {
        self.vertex_nt.get(v).copied().flatten()
    }

    /// The part of clique `c` with neighborhood type `nt`.
    pub fn part(&self, c: usize, nt: NeighborhoodType) -> VertexSet {
        mask_iter(self.cliques[c])
            .filter(|&v| self.vertex_nt[v] == Some(nt))
            .fold(0, |m, v| m | (1 << v))
    }

    /// Neighborhood types present in clique `c`, ascending.
    pub fn present_types(&self, c: usize) -> Vec<NeighborhoodType> {
        let mut types: Vec<NeighborhoodType> =
            mask_iter(self.cliques[c]).filter_map(|v| self.vertex_nt[v]).collect();
        types.sort_unstable();
        types.dedup();
        types
    }

    /// Full signature of clique `c`: the number of vertices of each
    /// neighborhood type, indexed by type.
    pub fn signature(&self, c: usize) -> Vec<u32> {
        let mut sig = vec![0u32; self.num_types()];
        for v in mask_iter(self.cliques[c]) {
            sig[self.vertex_nt[v].unwrap()] += 1;
        }
        sig
    }

    /// Signature with every count truncated at `cap`.
    pub fn truncated_signature(&self, c: usize, cap: u32) -> Vec<u32> {
        self.signature(c).into_iter().map(|x| x.min(cap)).collect()
    }

    /// The induced subgraph on the modulator, with vertex `i` standing for
    /// the `i`-th modulator vertex.
    pub fn modulator_graph(&self) -> Graph {
        let d = self.d();
        let mut g = Graph::new(d).expect("modulator within bounds");
        for i in 0..d {
            for j in 0..i {
                if self.graph.has_edge(self.modulator[i], self.modulator[j]) {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    }

    /// Bitmask over modulator positions adjacent to vertex `v`.
    pub fn modulator_adjacency(&self, v: usize) -> usize {
        self.modulator
            .iter()
            .enumerate()
            .filter(|&(_, &d)| self.graph.has_edge(v, d))
            .fold(0, |m, (i, _)| m | (1 << i))
    }
}
