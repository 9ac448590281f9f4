//! Sparsifiers for heterogeneous (typed, directed) graphs.
//!
//! Edges are grouped into buckets by `(node, direction, edge type)`. The
//! per-type method keeps up to `k` edges of every bucket; the all-types
//! method keeps at least one edge per bucket and up to `k` per node and
//! direction. Either way no node that had an edge loses all of them.
//!
//! ```
//! use hgsparse::graph::{build_graph, EdgeRecord};
//! use hgsparse::sparsify::sparsify_graph;
//! use hgsparse::metrics::{coverage_report, isolated_nodes};
//! use hgsparse::sparsify::Method;
//!
//! let edges = (1..=20).map(|i| EdgeRecord::new(0, i % 7 + 1, (i % 3) as u32));
//! let g = build_graph(edges, None).unwrap();
//! let h = sparsify_graph(&g, 1, 42).unwrap();
//! assert!(coverage_report(&g, &h.selected, 1, Method::PerType).unwrap().is_empty());
//! assert!(isolated_nodes(&g, &h.selected).unwrap().is_empty());
//! ```

pub mod cli;
pub mod edge_set;
pub mod evalproxy;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod sparsify;
pub mod synthgen;

pub use edge_set::EdgeSet;
pub use graph::{build_graph, Direction, EdgeId, EdgeRecord, EdgeTypeId, HeteroGraph, NodeId, NodeTypeId};
pub use sparsify::{sparsify, Method, SparsifierResult, SparsifyParams};
