//! Seeded synthetic heterogeneous graphs with rank-based power-law endpoints.
//!
//! Node type `i` owns a contiguous id range, in declaration order. Within a
//! population the node at rank `r` (1-based, ascending id) is drawn with
//! probability proportional to `r^-alpha`; `alpha = 0` is uniform.

use std::collections::HashSet;
use std::io::BufRead;

use rand::distributions::{Distribution, WeightedIndex};
use thiserror::Error;

use crate::graph::{build_graph, EdgeRecord, HeteroGraph, NodeInfo, NodeTable};
use crate::sparsify::rng_from_seed;

/// Draw budget per requested edge before giving up on a schema entry.
pub const RETRY_FACTOR: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeTypeSpec {
    pub src_type: usize,
    pub dst_type: usize,
    pub count: usize,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub node_type_sizes: Vec<usize>,
    pub edge_types: Vec<EdgeTypeSpec>,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("node type {index} has size 0")]
    EmptyNodeType { index: usize },
    #[error("edge type {index} requests 0 edges")]
    ZeroCount { index: usize },
    #[error("edge type {index} references undeclared node type {node_type}")]
    UnknownNodeType { index: usize, node_type: usize },
    #[error("edge type {index} has invalid skew exponent {alpha}")]
    InvalidAlpha { index: usize, alpha: f64 },
    #[error("edge type {index} requests {count} edges but only {capacity} distinct pairs exist")]
    Infeasible { index: usize, count: usize, capacity: u128 },
    #[error("edge type {index}: gave up after {draws} draws with {placed} of {count} edges placed")]
    RetryCapExceeded { index: usize, draws: usize, placed: usize, count: usize },
    #[error("spec line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Node sizes of the four node types of the PubMed benchmark graph.
pub const PUBMED_NODE_TYPES: [usize; 4] = [13_561, 20_163, 26_522, 2_863];

/// Ten edge types over the PubMed node types, totalling 236,458 edges.
/// Per-type counts are illustrative; only the totals match the benchmark.
pub const PUBMED_EDGE_TYPES: [(usize, usize, usize); 10] = [
    (0, 0, 20_000),
    (0, 1, 25_000),
    (1, 1, 10_000),
    (2, 0, 35_000),
    (2, 1, 45_000),
    (2, 2, 40_000),
    (2, 3, 20_000),
    (3, 0, 15_000),
    (3, 1, 16_458),
    (3, 3, 10_000),
];

impl GenSpec {
    /// PubMed-shaped spec: n = 63,109, m = 236,458, 4 node types, t = 10.
    pub fn pubmed_like(alpha: f64, seed: u64) -> GenSpec {
        GenSpec {
            node_type_sizes: PUBMED_NODE_TYPES.to_vec(),
            edge_types: PUBMED_EDGE_TYPES
                .iter()
                .map(|&(src_type, dst_type, count)| EdgeTypeSpec { src_type, dst_type, count, alpha })
                .collect(),
            seed,
        }
    }

    /// Yelp-shaped spec: n = 82,465, m = 16,274,179, 4 node types, t = 4.
    pub fn yelp_like(alpha: f64, seed: u64) -> GenSpec {
        let counts = [(0, 2, 8_174_179), (2, 2, 6_000_000), (0, 1, 2_000_000), (0, 3, 100_000)];
        GenSpec {
            node_type_sizes: vec![7_474, 1_407, 73_535, 49],
            edge_types: counts
                .iter()
                .map(|&(src_type, dst_type, count)| EdgeTypeSpec { src_type, dst_type, count, alpha })
                .collect(),
            seed,
        }
    }

    pub fn total_nodes(&self) -> usize {
        self.node_type_sizes.iter().sum()
    }

    pub fn total_edges(&self) -> usize {
        self.edge_types.iter().map(|e| e.count).sum()
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if let Some(index) = self.node_type_sizes.iter().position(|&s| s == 0) {
            return Err(GenError::EmptyNodeType { index });
        }
        for (index, et) in self.edge_types.iter().enumerate() {
            if et.count == 0 {
                return Err(GenError::ZeroCount { index });
            }
            for node_type in [et.src_type, et.dst_type] {
                if node_type >= self.node_type_sizes.len() {
                    return Err(GenError::UnknownNodeType { index, node_type });
                }
            }
            if !(et.alpha.is_finite() && et.alpha >= 0.0) {
                return Err(GenError::InvalidAlpha { index, alpha: et.alpha });
            }
            let capacity =
                self.node_type_sizes[et.src_type] as u128 * self.node_type_sizes[et.dst_type] as u128;
            if et.count as u128 > capacity {
                return Err(GenError::Infeasible { index, count: et.count, capacity });
            }
        }
        Ok(())
    }

    /// Parse a spec file: `key=value` lines (`seed`, `node_types` as a
    /// comma-separated size list) plus one `edges <src> <dst> <count> <alpha>`
    /// line per edge type. `#` starts a comment.
    pub fn parse<R: BufRead>(input: R) -> Result<GenSpec, GenError> {
        let mut spec = GenSpec { node_type_sizes: Vec::new(), edge_types: Vec::new(), seed: 0 };
        for (i, line) in input.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| GenError::Parse { line: line_no, message };
            if let Some(rest) = line.strip_prefix("edges") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 4 {
                    return Err(err(format!("expected `edges <src> <dst> <count> <alpha>`, got {line:?}")));
                }
                let num = |s: &str, what: &str| s.parse::<usize>().map_err(|e| err(format!("bad {what} {s:?}: {e}")));
                spec.edge_types.push(EdgeTypeSpec {
                    src_type: num(parts[0], "source type")?,
                    dst_type: num(parts[1], "destination type")?,
                    count: num(parts[2], "count")?,
                    alpha: parts[3].parse().map_err(|e| err(format!("bad alpha {:?}: {e}", parts[3])))?,
                });
            } else if let Some((key, value)) = line.split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "seed" => spec.seed = value.parse().map_err(|e| err(format!("bad seed {value:?}: {e}")))?,
                    "node_types" => {
                        spec.node_type_sizes = value
                            .split(',')
                            .map(|s| s.trim().parse::<usize>().map_err(|e| err(format!("bad node type size {s:?}: {e}"))))
                            .collect::<Result<_, _>>()?
                    }
                    other => return Err(err(format!("unknown key {other:?}"))),
                }
            } else {
                return Err(err(format!("unrecognized line {line:?}")));
            }
        }
        Ok(spec)
    }
}

/// Node table for a spec: ids `0..total`, names `t<type>_<rank>`.
pub fn node_table(spec: &GenSpec) -> NodeTable {
    let mut table = NodeTable::new();
    let mut next = 0u64;
    for (ty, &size) in spec.node_type_sizes.iter().enumerate() {
        for rank in 0..size {
            table.insert(next, NodeInfo { name: format!("t{ty}_{rank}"), node_type: ty as u32 });
            next += 1;
        }
    }
    table
}

fn rank_weights(size: usize, alpha: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=size).map(|r| (r as f64).powf(-alpha))).expect("nonempty positive weights")
}

/// Edge records for a spec, in generation order. Edge type `i` is schema entry `i`.
pub fn generate_records(spec: &GenSpec) -> Result<Vec<EdgeRecord>, GenError> {
    spec.validate()?;
    let mut offsets = Vec::with_capacity(spec.node_type_sizes.len());
    let mut acc = 0u64;
    for &s in &spec.node_type_sizes {
        offsets.push(acc);
        acc += s as u64;
    }

    let mut rng = rng_from_seed(spec.seed);
    let mut records = Vec::with_capacity(spec.total_edges());
    for (index, et) in spec.edge_types.iter().enumerate() {
        let src_dist = rank_weights(spec.node_type_sizes[et.src_type], et.alpha);
        let dst_dist = rank_weights(spec.node_type_sizes[et.dst_type], et.alpha);
        let cap = RETRY_FACTOR * et.count;
        let mut seen = HashSet::with_capacity(et.count);
        let mut draws = 0;
        while seen.len() < et.count {
            if draws == cap {
                return Err(GenError::RetryCapExceeded { index, draws, placed: seen.len(), count: et.count });
            }
            draws += 1;
            let s = offsets[et.src_type] + src_dist.sample(&mut rng) as u64;
            let d = offsets[et.dst_type] + dst_dist.sample(&mut rng) as u64;
            if seen.insert((s, d)) {
                records.push(EdgeRecord::new(s, d, index as u32));
            }
        }
    }
    Ok(records)
}

/// Generate a simple typed graph with exactly the requested edge counts.
pub fn generate(spec: &GenSpec) -> Result<HeteroGraph, GenError> {
    let records = generate_records(spec)?;
    let graph = build_graph(records, Some(&node_table(spec))).expect("generated endpoints are declared");
    debug_assert_eq!(graph.duplicates_dropped(), 0);
    Ok(graph)
}
