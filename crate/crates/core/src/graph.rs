//! Immutable typed directed graph with per-(node, direction, edge type) buckets.
//!
//! Nodes and edge types are remapped to dense indices at build time. Dense
//! node ids preserve the ascending order of the original ids, and edges are
//! stored sorted by `(src, dst, etype)`, so an [`EdgeId`] order is the same
//! as the canonical order over original identifiers.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::edge_set::EdgeSet;

macro_rules! dense_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

dense_id!(
    /// Dense node index, `0..n`.
    NodeId
);
dense_id!(
    /// Dense edge index, `0..m`, in canonical `(src, dst, etype)` order.
    EdgeId
);
dense_id!(
    /// Dense edge-type index, `0..t`.
    EdgeTypeId
);
dense_id!(
    /// Dense node-type index.
    NodeTypeId
);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Out, Direction::In];
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Out => f.write_str("out"),
            Direction::In => f.write_str("in"),
        }
    }
}

/// One edge as it appears in an input file, using original identifiers.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeRecord {
    pub src: u64,
    pub dst: u64,
    pub etype: u32,
    pub weight: Option<f64>,
}

impl EdgeRecord {
    pub fn new(src: u64, dst: u64, etype: u32) -> Self {
        EdgeRecord { src, dst, etype, weight: None }
    }

    pub fn weighted(src: u64, dst: u64, etype: u32, weight: f64) -> Self {
        EdgeRecord { src, dst, etype, weight: Some(weight) }
    }
}

/// Declared node metadata from a node file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeInfo {
    pub name: String,
    pub node_type: u32,
}

/// Declared nodes keyed by original id.
pub type NodeTable = BTreeMap<u64, NodeInfo>;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("edge {src} -> {dst} references undeclared node {node}")]
    UndeclaredNode { src: u64, dst: u64, node: u64 },
    #[error("edge {src} -> {dst} (type {etype}) has non-finite weight {weight}")]
    NonFiniteWeight { src: u64, dst: u64, etype: u32, weight: f64 },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("edge {src} -> {dst} (type {etype}) is not in the graph")]
    UnknownEdge { src: u64, dst: u64, etype: u32 },
    #[error("edge selection covers {found} edges but the graph has {expected}")]
    SelectionMismatch { expected: usize, found: usize },
}

/// Borrowed view of one stored edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeRef {
    pub id: EdgeId,
    pub src: NodeId,
    pub dst: NodeId,
    pub etype: EdgeTypeId,
    pub weight: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Segment {
    etype: EdgeTypeId,
    start: usize,
    end: usize,
}

/// CSR-style index: per node, a run of segments, one per nonempty edge type.
#[derive(Clone, Debug, Default)]
struct BucketIndex {
    node_offsets: Vec<usize>,
    segments: Vec<Segment>,
    edges: Vec<EdgeId>,
}

impl BucketIndex {
    /// `key[e]` is the node owning edge `e` in this direction. Edge ids are
    /// visited in ascending order, so every bucket ends up sorted.
    fn build(n: usize, key: &[NodeId], etype: &[EdgeTypeId]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for u in key {
            counts[u.index() + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let starts = counts;
        let mut cursor = starts.clone();
        let mut edges = vec![EdgeId(0); key.len()];
        for (e, u) in key.iter().enumerate() {
            edges[cursor[u.index()]] = EdgeId(e as u32);
            cursor[u.index()] += 1;
        }

        let mut node_offsets = Vec::with_capacity(n + 1);
        let mut segments = Vec::new();
        node_offsets.push(0);
        for u in 0..n {
            let run = &mut edges[starts[u]..starts[u + 1]];
            // stable: ascending edge id survives within each type
            run.sort_by_key(|e| etype[e.index()]);
            let mut i = 0;
            while i < run.len() {
                let ty = etype[run[i].index()];
                let mut j = i + 1;
                while j < run.len() && etype[run[j].index()] == ty {
                    j += 1;
                }
                segments.push(Segment { etype: ty, start: starts[u] + i, end: starts[u] + j });
                i = j;
            }
            node_offsets.push(segments.len());
        }
        BucketIndex { node_offsets, segments, edges }
    }

    fn node_segments(&self, u: NodeId) -> &[Segment] {
        &self.segments[self.node_offsets[u.index()]..self.node_offsets[u.index() + 1]]
    }

    fn bucket(&self, u: NodeId, etype: EdgeTypeId) -> &[EdgeId] {
        let segs = self.node_segments(u);
        match segs.binary_search_by_key(&etype, |s| s.etype) {
            Ok(i) => &self.edges[segs[i].start..segs[i].end],
            Err(_) => &[],
        }
    }

    fn incident(&self, u: NodeId) -> &[EdgeId] {
        let segs = self.node_segments(u);
        match (segs.first(), segs.last()) {
            (Some(a), Some(b)) => &self.edges[a.start..b.end],
            _ => &[],
        }
    }

    fn max_bucket(&self) -> usize {
        self.segments.iter().map(|s| s.end - s.start).max().unwrap_or(0)
    }
}

/// Summary counts for a graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub edges_per_node: f64,
    pub node_types: usize,
    pub t: usize,
    /// Edge count per original edge-type label.
    pub per_edge_type: BTreeMap<u32, usize>,
    pub max_bucket: usize,
}

#[derive(Clone, Debug)]
pub struct HeteroGraph {
    node_labels: Vec<u64>,
    node_names: Vec<String>,
    node_types: Vec<NodeTypeId>,
    node_type_labels: Vec<u32>,
    edge_type_labels: Vec<u32>,
    src: Vec<NodeId>,
    dst: Vec<NodeId>,
    etype: Vec<EdgeTypeId>,
    // NaN marks an unweighted edge; stored weights are always finite.
    weights: Vec<f64>,
    out: BucketIndex,
    inc: BucketIndex,
    duplicates_dropped: usize,
}

const DEFAULT_NODE_TYPE: u32 = 0;

/// Build a graph from edge records.
///
/// Without a node table, nodes are the distinct endpoints and all share node
/// type 0. With one, every declared node is present (isolated ones included)
/// and every endpoint must be declared. Records repeating an identity triple
/// are dropped; the first occurrence wins and the number dropped is kept in
/// [`HeteroGraph::duplicates_dropped`].
pub fn build_graph<I>(edges: I, nodes: Option<&NodeTable>) -> Result<HeteroGraph, GraphError>
where
    I: IntoIterator<Item = EdgeRecord>,
{
    let records: Vec<EdgeRecord> = edges.into_iter().collect();
    for r in &records {
        if let Some(w) = r.weight {
            if !w.is_finite() {
                return Err(GraphError::NonFiniteWeight {
                    src: r.src,
                    dst: r.dst,
                    etype: r.etype,
                    weight: w,
                });
            }
        }
    }

    let (node_labels, node_names, raw_node_types): (Vec<u64>, Vec<String>, Vec<u32>) = match nodes {
        Some(table) => {
            for r in &records {
                for node in [r.src, r.dst] {
                    if !table.contains_key(&node) {
                        return Err(GraphError::UndeclaredNode { src: r.src, dst: r.dst, node });
                    }
                }
            }
            let mut labels = Vec::with_capacity(table.len());
            let mut names = Vec::with_capacity(table.len());
            let mut types = Vec::with_capacity(table.len());
            for (id, info) in table {
                labels.push(*id);
                names.push(info.name.clone());
                types.push(info.node_type);
            }
            (labels, names, types)
        }
        None => {
            let mut labels: Vec<u64> = records.iter().flat_map(|r| [r.src, r.dst]).collect();
            labels.sort_unstable();
            labels.dedup();
            let n = labels.len();
            (labels, Vec::new(), vec![DEFAULT_NODE_TYPE; n])
        }
    };

    let mut node_type_labels = raw_node_types.clone();
    node_type_labels.sort_unstable();
    node_type_labels.dedup();
    let node_types = raw_node_types
        .iter()
        .map(|t| NodeTypeId(node_type_labels.binary_search(t).unwrap() as u32))
        .collect();

    let mut edge_type_labels: Vec<u32> = records.iter().map(|r| r.etype).collect();
    edge_type_labels.sort_unstable();
    edge_type_labels.dedup();

    let dense_node = |raw: u64| NodeId(node_labels.binary_search(&raw).unwrap() as u32);
    let dense_type = |raw: u32| EdgeTypeId(edge_type_labels.binary_search(&raw).unwrap() as u32);

    let mut keyed: Vec<(NodeId, NodeId, EdgeTypeId, f64)> = records
        .iter()
        .map(|r| (dense_node(r.src), dense_node(r.dst), dense_type(r.etype), r.weight.unwrap_or(f64::NAN)))
        .collect();
    // stable sort keeps input order among duplicates, so dedup keeps the first
    keyed.sort_by_key(|&(s, d, t, _)| (s, d, t));
    let before = keyed.len();
    keyed.dedup_by_key(|&mut (s, d, t, _)| (s, d, t));
    let duplicates_dropped = before - keyed.len();

    let m = keyed.len();
    let mut src = Vec::with_capacity(m);
    let mut dst = Vec::with_capacity(m);
    let mut etype = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (s, d, t, w) in keyed {
        src.push(s);
        dst.push(d);
        etype.push(t);
        weights.push(w);
    }
    if weights.iter().all(|w| w.is_nan()) {
        weights = Vec::new();
    }

    Ok(HeteroGraph::assemble(
        node_labels,
        node_names,
        node_types,
        node_type_labels,
        edge_type_labels,
        src,
        dst,
        etype,
        weights,
        duplicates_dropped,
    ))
}

impl HeteroGraph {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        node_labels: Vec<u64>,
        node_names: Vec<String>,
        node_types: Vec<NodeTypeId>,
        node_type_labels: Vec<u32>,
        edge_type_labels: Vec<u32>,
        src: Vec<NodeId>,
        dst: Vec<NodeId>,
        etype: Vec<EdgeTypeId>,
        weights: Vec<f64>,
        duplicates_dropped: usize,
    ) -> Self {
        let n = node_labels.len();
        let out = BucketIndex::build(n, &src, &etype);
        let inc = BucketIndex::build(n, &dst, &etype);
        HeteroGraph {
            node_labels,
            node_names,
            node_types,
            node_type_labels,
            edge_type_labels,
            src,
            dst,
            etype,
            weights,
            out,
            inc,
            duplicates_dropped,
        }
    }

    pub fn n(&self) -> usize {
        self.node_labels.len()
    }

    pub fn m(&self) -> usize {
        self.src.len()
    }

    /// Number of distinct edge types.
    pub fn t(&self) -> usize {
        self.edge_type_labels.len()
    }

    pub fn node_type_count(&self) -> usize {
        self.node_type_labels.len()
    }

    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    pub fn is_weighted(&self) -> bool {
        !self.weights.is_empty()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.n() as u32).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl ExactSizeIterator<Item = EdgeId> {
        (0..self.m() as u32).map(EdgeId)
    }

    pub fn edge_types(&self) -> impl ExactSizeIterator<Item = EdgeTypeId> {
        (0..self.t() as u32).map(EdgeTypeId)
    }

    pub fn contains_node(&self, u: NodeId) -> bool {
        u.index() < self.n()
    }

    fn check_node(&self, u: NodeId) -> Result<(), GraphError> {
        if self.contains_node(u) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(u))
        }
    }

    /// Original id of a dense node.
    pub fn node_label(&self, u: NodeId) -> u64 {
        self.node_labels[u.index()]
    }

    /// Name from the node file, if one was supplied.
    pub fn node_name(&self, u: NodeId) -> Option<&str> {
        self.node_names.get(u.index()).map(String::as_str)
    }

    /// Dense id of an original node id.
    pub fn node_id(&self, label: u64) -> Option<NodeId> {
        self.node_labels.binary_search(&label).ok().map(|i| NodeId(i as u32))
    }

    pub fn node_type(&self, u: NodeId) -> NodeTypeId {
        self.node_types[u.index()]
    }

    pub fn node_type_label(&self, t: NodeTypeId) -> u32 {
        self.node_type_labels[t.index()]
    }

    pub fn edge_type_label(&self, t: EdgeTypeId) -> u32 {
        self.edge_type_labels[t.index()]
    }

    pub fn edge_type_id(&self, label: u32) -> Option<EdgeTypeId> {
        self.edge_type_labels.binary_search(&label).ok().map(|i| EdgeTypeId(i as u32))
    }

    pub fn edge(&self, e: EdgeId) -> EdgeRef {
        let i = e.index();
        EdgeRef {
            id: e,
            src: self.src[i],
            dst: self.dst[i],
            etype: self.etype[i],
            weight: self.weight(e),
        }
    }

    pub fn weight(&self, e: EdgeId) -> Option<f64> {
        self.weights.get(e.index()).copied().filter(|w| !w.is_nan())
    }

    /// Edge record with original identifiers.
    pub fn record(&self, e: EdgeId) -> EdgeRecord {
        let r = self.edge(e);
        EdgeRecord {
            src: self.node_label(r.src),
            dst: self.node_label(r.dst),
            etype: self.edge_type_label(r.etype),
            weight: r.weight,
        }
    }

    /// Look up an edge by dense identity triple.
    pub fn find_edge(&self, src: NodeId, dst: NodeId, etype: EdgeTypeId) -> Option<EdgeId> {
        let out = self.out.bucket(src, etype);
        out.binary_search_by_key(&dst, |e| self.dst[e.index()])
            .ok()
            .map(|i| out[i])
    }

    /// Look up an edge by original identifiers.
    pub fn find_record(&self, src: u64, dst: u64, etype: u32) -> Option<EdgeId> {
        let s = self.node_id(src)?;
        let d = self.node_id(dst)?;
        let t = self.edge_type_id(etype)?;
        self.find_edge(s, d, t)
    }

    fn index(&self, dir: Direction) -> &BucketIndex {
        match dir {
            Direction::Out => &self.out,
            Direction::In => &self.inc,
        }
    }

    /// Edges of `u` in direction `dir` with type `etype`, ascending by id.
    pub fn bucket(&self, u: NodeId, dir: Direction, etype: EdgeTypeId) -> Result<&[EdgeId], GraphError> {
        self.check_node(u)?;
        Ok(self.index(dir).bucket(u, etype))
    }

    /// Nonempty buckets of `u` in direction `dir`, ascending by edge type.
    ///
    /// Panics if `u` is out of range.
    pub fn buckets(&self, u: NodeId, dir: Direction) -> impl Iterator<Item = (EdgeTypeId, &[EdgeId])> {
        let index = self.index(dir);
        index
            .node_segments(u)
            .iter()
            .map(move |s| (s.etype, &index.edges[s.start..s.end]))
    }

    /// All edges of `u` in direction `dir`, grouped by type (not globally sorted).
    ///
    /// Panics if `u` is out of range.
    pub fn incident(&self, u: NodeId, dir: Direction) -> &[EdgeId] {
        self.index(dir).incident(u)
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out.incident(u).len()
    }

    pub fn in_degree(&self, u: NodeId) -> usize {
        self.inc.incident(u).len()
    }

    /// In-degree plus out-degree; a self-loop counts once in each direction.
    pub fn degree(&self, u: NodeId) -> Result<usize, GraphError> {
        self.check_node(u)?;
        Ok(self.out_degree(u) + self.in_degree(u))
    }

    pub fn max_bucket(&self) -> usize {
        self.out.max_bucket().max(self.inc.max_bucket())
    }

    pub fn stats(&self) -> GraphStats {
        let mut per_edge_type: BTreeMap<u32, usize> =
            self.edge_type_labels.iter().map(|&l| (l, 0)).collect();
        for t in &self.etype {
            *per_edge_type.get_mut(&self.edge_type_labels[t.index()]).unwrap() += 1;
        }
        GraphStats {
            n: self.n(),
            m: self.m(),
            edges_per_node: if self.n() == 0 { 0.0 } else { self.m() as f64 / self.n() as f64 },
            node_types: self.node_type_count(),
            t: self.t(),
            per_edge_type,
            max_bucket: self.max_bucket(),
        }
    }

    /// Graph on the same node and type tables holding only `keep`.
    ///
    /// Dense node and edge-type ids are shared with `self`; edge ids are not.
    pub fn subgraph(&self, keep: &EdgeSet) -> Result<HeteroGraph, GraphError> {
        if keep.universe() != self.m() {
            return Err(GraphError::SelectionMismatch { expected: self.m(), found: keep.universe() });
        }
        let mut src = Vec::with_capacity(keep.len());
        let mut dst = Vec::with_capacity(keep.len());
        let mut etype = Vec::with_capacity(keep.len());
        let mut weights = Vec::new();
        for e in keep.iter() {
            src.push(self.src[e.index()]);
            dst.push(self.dst[e.index()]);
            etype.push(self.etype[e.index()]);
            if self.is_weighted() {
                weights.push(self.weights[e.index()]);
            }
        }
        Ok(HeteroGraph::assemble(
            self.node_labels.clone(),
            self.node_names.clone(),
            self.node_types.clone(),
            self.node_type_labels.clone(),
            self.edge_type_labels.clone(),
            src,
            dst,
            etype,
            weights,
            0,
        ))
    }
}
