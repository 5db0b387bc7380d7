//! Fair vertex-set solver for graphs with small cluster vertex deletion
//! sets.
//!
//! The library decides and minimizes the *fair cost* of vertex sets
//! definable in monadic second-order logic: the maximum number of selected
//! neighbors over all vertices. The pipeline factors solutions through
//! finite *shapes* relative to a cluster modulator, checks each shape on a
//! small associated instance, and discharges cardinality constraints with a
//! small integer program.

pub mod cvd;
pub mod graph;
pub mod hardness;
pub mod ilp;
pub mod logic;
pub mod oracle;
pub mod reduction;
pub mod shapes;
pub mod solver;
