//! Per-bucket neighborhood sparsifiers.
//!
//! Both methods visit nodes once in ascending order of total degree in the
//! input graph (ties by ascending node id) and handle the out-direction of a
//! node before its in-direction. Edges are only ever added to the selection,
//! so an edge picked while processing one endpoint counts toward the budget
//! of the other endpoint's bucket when that node comes up later.
//!
//! * [`Method::PerType`]: each `(node, direction, edge type)` bucket keeps at
//!   least `min(k, |bucket|)` edges. Output size is at most `2·k·t·n`.
//! * [`Method::AllTypes`]: each nonempty bucket keeps at least one edge, then
//!   each `(node, direction)` is topped up to `k` edges regardless of type.
//!   Output size is at most `2·max(k, t)·n`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edge_set::EdgeSet;
use crate::graph::{Direction, EdgeId, HeteroGraph, NodeId};

/// Deterministic random stream used by every sampling routine in the crate.
pub type SampleRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PerType,
    AllTypes,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::PerType => "per-type",
            Method::AllTypes => "all-types",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-type" => Ok(Method::PerType),
            "all-types" | "alt" => Ok(Method::AllTypes),
            other => Err(format!("unknown method {other:?} (expected per-type or all-types)")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SparsifyError {
    #[error("graph has no edges to sparsify")]
    EmptyGraph,
    #[error("k must be at least 1")]
    ZeroBudget,
    #[error("cannot sample {count} items from a pool of {pool}")]
    SampleTooLarge { count: usize, pool: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SparsifyParams {
    pub k: usize,
    pub method: Method,
    pub seed: u64,
}

impl SparsifyParams {
    pub fn new(k: usize, method: Method, seed: u64) -> Result<Self, SparsifyError> {
        if k == 0 {
            return Err(SparsifyError::ZeroBudget);
        }
        Ok(SparsifyParams { k, method, seed })
    }
}

#[derive(Clone, Debug)]
pub struct SparsifierResult {
    pub selected: EdgeSet,
    pub params: SparsifyParams,
    pub kept: usize,
    pub ratio: f64,
}

/// Nodes sorted by ascending total degree, ties by ascending id.
pub fn processing_order(g: &HeteroGraph) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = g.nodes().collect();
    order.sort_by_key(|&u| (g.out_degree(u) + g.in_degree(u), u));
    order
}

/// Run the method named in `params`.
pub fn sparsify(g: &HeteroGraph, params: &SparsifyParams) -> Result<SparsifierResult, SparsifyError> {
    if params.k == 0 {
        return Err(SparsifyError::ZeroBudget);
    }
    if g.m() == 0 {
        return Err(SparsifyError::EmptyGraph);
    }
    let mut rng = rng_from_seed(params.seed);
    let mut selected = EdgeSet::new(g.m());
    let mut scratch = Vec::new();
    for u in processing_order(g) {
        for dir in Direction::BOTH {
            match params.method {
                Method::PerType => {
                    sparsify_node_direction(g, u, dir, &mut selected, params.k, &mut rng, &mut scratch)
                }
                Method::AllTypes => {
                    sparsify_node_direction_alt(g, u, dir, &mut selected, params.k, &mut rng, &mut scratch)
                }
            }
        }
    }
    let kept = selected.len();
    Ok(SparsifierResult { selected, params: *params, kept, ratio: kept as f64 / g.m() as f64 })
}

/// Per-type sparsifier.
pub fn sparsify_graph(g: &HeteroGraph, k: usize, seed: u64) -> Result<SparsifierResult, SparsifyError> {
    sparsify(g, &SparsifyParams::new(k, Method::PerType, seed)?)
}

/// All-types sparsifier.
pub fn sparsify_alt(g: &HeteroGraph, k: usize, seed: u64) -> Result<SparsifierResult, SparsifyError> {
    sparsify(g, &SparsifyParams::new(k, Method::AllTypes, seed)?)
}

/// Per-type step for one node and direction.
///
/// A bucket smaller than `k` is taken whole. Otherwise, with `x` of its
/// edges already selected, `max(0, k - x)` more are drawn uniformly from the
/// unselected remainder. `scratch` is a reusable buffer.
pub fn sparsify_node_direction<R: Rng + ?Sized>(
    g: &HeteroGraph,
    u: NodeId,
    dir: Direction,
    selected: &mut EdgeSet,
    k: usize,
    rng: &mut R,
    scratch: &mut Vec<EdgeId>,
) {
    for (_, bucket) in g.buckets(u, dir) {
        if bucket.len() < k {
            selected.extend(bucket.iter().copied());
            continue;
        }
        let present = bucket.iter().filter(|&&e| selected.contains(e)).count();
        let need = k.saturating_sub(present);
        if need == 0 {
            continue;
        }
        scratch.clear();
        scratch.extend(bucket.iter().copied().filter(|&e| !selected.contains(e)));
        // |bucket| >= k here, so the remainder holds at least k - present edges
        partial_shuffle(scratch, need, rng);
        selected.extend(scratch[..need].iter().copied());
    }
}

/// All-types step for one node and direction.
///
/// Phase 1 adds one uniformly chosen edge to every nonempty bucket that has
/// no selected edge yet. Phase 2 counts all selected edges `y` of the node in
/// this direction and draws `max(0, k - y)` more from the unselected ones,
/// regardless of type.
pub fn sparsify_node_direction_alt<R: Rng + ?Sized>(
    g: &HeteroGraph,
    u: NodeId,
    dir: Direction,
    selected: &mut EdgeSet,
    k: usize,
    rng: &mut R,
    scratch: &mut Vec<EdgeId>,
) {
    for (_, bucket) in g.buckets(u, dir) {
        if !bucket.iter().any(|&e| selected.contains(e)) {
            selected.insert(bucket[rng.gen_range(0..bucket.len())]);
        }
    }

    let incident = g.incident(u, dir);
    let present = incident.iter().filter(|&&e| selected.contains(e)).count();
    let need = k.saturating_sub(present);
    if need == 0 {
        return;
    }
    scratch.clear();
    scratch.extend(incident.iter().copied().filter(|&e| !selected.contains(e)));
    scratch.sort_unstable();
    let take = need.min(scratch.len());
    partial_shuffle(scratch, take, rng);
    selected.extend(scratch[..take].iter().copied());
}

/// Draw `count` distinct items uniformly from `pool` without replacement.
///
/// A partial Fisher-Yates shuffle over a copy of `pool`; the result is in
/// draw order and depends only on `pool`'s order and the stream state.
pub fn sample_without_replacement<T: Clone, R: Rng + ?Sized>(
    pool: &[T],
    count: usize,
    rng: &mut R,
) -> Result<Vec<T>, SparsifyError> {
    if count > pool.len() {
        return Err(SparsifyError::SampleTooLarge { count, pool: pool.len() });
    }
    let mut items = pool.to_vec();
    partial_shuffle(&mut items, count, rng);
    items.truncate(count);
    Ok(items)
}

fn partial_shuffle<T, R: Rng + ?Sized>(items: &mut [T], count: usize, rng: &mut R) {
    debug_assert!(count <= items.len());
    for i in 0..count {
        let j = rng.gen_range(i..items.len());
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{g1, A, B};
    use crate::graph::{build_graph, EdgeRecord};

    fn all_selected(g: &HeteroGraph, r: &SparsifierResult) -> bool {
        r.kept == g.m() && g.edge_ids().all(|e| r.selected.contains(e))
    }

    #[test]
    fn zero_k_and_empty_graph() {
        assert_eq!(SparsifyParams::new(0, Method::PerType, 1), Err(SparsifyError::ZeroBudget));
        let empty = build_graph(Vec::new(), None).unwrap();
        assert_eq!(sparsify_graph(&empty, 1, 0).unwrap_err(), SparsifyError::EmptyGraph);
        assert_eq!(sparsify_alt(&empty, 1, 0).unwrap_err(), SparsifyError::EmptyGraph);
    }

    #[test]
    fn order_is_degree_then_id() {
        let g = g1();
        let order: Vec<u64> = processing_order(&g).into_iter().map(|u| g.node_label(u)).collect();
        assert_eq!(order, vec![2, 3, 4, 1]);
    }

    #[test]
    fn g1_per_type_keeps_everything() {
        let g = g1();
        for seed in 0..20 {
            let r = sparsify_graph(&g, 1, seed).unwrap();
            assert!(all_selected(&g, &r));
            assert_eq!(r.ratio, 1.0);
        }
    }

    #[test]
    fn g1_alt_keeps_everything() {
        let g = g1();
        for seed in 0..20 {
            assert!(all_selected(&g, &sparsify_alt(&g, 1, seed).unwrap()));
        }
    }

    #[test]
    fn node_step_respects_existing_selection() {
        let g = g1();
        let u = g.node_id(1).unwrap();
        let mut sel = EdgeSet::from_records(&g, &[EdgeRecord::new(1, 2, A), EdgeRecord::new(1, 3, A)]).unwrap();
        let mut rng = rng_from_seed(3);
        sparsify_node_direction(&g, u, Direction::Out, &mut sel, 1, &mut rng, &mut Vec::new());
        assert_eq!(sel.len(), 3);
        assert!(sel.contains(g.find_record(1, 4, B).unwrap()));
    }

    fn star(leaves: u64, k_types: u32) -> HeteroGraph {
        build_graph((1..=leaves).map(|i| EdgeRecord::new(0, i, (i as u32) % k_types)), None).unwrap()
    }

    #[test]
    fn bucket_equal_to_k_is_taken_whole() {
        let g = star(5, 1);
        let mut sel = EdgeSet::new(g.m());
        let mut rng = rng_from_seed(0);
        sparsify_node_direction(&g, NodeId(0), Direction::Out, &mut sel, 5, &mut rng, &mut Vec::new());
        assert_eq!(sel.len(), 5);
    }

    #[test]
    fn empty_direction_leaves_selection_alone() {
        let g = star(5, 1);
        let mut sel = EdgeSet::new(g.m());
        let mut rng = rng_from_seed(0);
        sparsify_node_direction(&g, NodeId(0), Direction::In, &mut sel, 2, &mut rng, &mut Vec::new());
        sparsify_node_direction_alt(&g, NodeId(0), Direction::In, &mut sel, 2, &mut rng, &mut Vec::new());
        assert!(sel.is_empty());
    }

    #[test]
    fn alt_star_tops_up_to_k() {
        let g = star(10, 1);
        for seed in 0..10 {
            let mut sel = EdgeSet::new(g.m());
            let mut rng = rng_from_seed(seed);
            sparsify_node_direction_alt(&g, NodeId(0), Direction::Out, &mut sel, 3, &mut rng, &mut Vec::new());
            assert_eq!(sel.len(), 3);
        }
    }

    #[test]
    fn alt_one_edge_per_type_exceeds_k() {
        let g = star(4, 4);
        assert_eq!(g.t(), 4);
        let mut sel = EdgeSet::new(g.m());
        let mut rng = rng_from_seed(1);
        sparsify_node_direction_alt(&g, NodeId(0), Direction::Out, &mut sel, 2, &mut rng, &mut Vec::new());
        assert_eq!(sel.len(), 4);
    }

    #[test]
    fn per_type_star_keeps_k_per_type() {
        // leaves have degree 1 and come first, so every edge is kept via in-buckets
        let g = star(10, 2);
        assert_eq!(sparsify_graph(&g, 1, 9).unwrap().kept, 10);
        // a hub-to-hub bucket is the only way to drop edges
        let g = build_graph((0..10).map(|i| EdgeRecord::new(100 + i % 2, 200 + i % 3, 0)), None).unwrap();
        let r = sparsify_graph(&g, 1, 4).unwrap();
        assert!(r.kept < g.m());
    }

    #[test]
    fn sample_edge_cases() {
        let pool = ["e1", "e2", "e3"];
        let mut rng = rng_from_seed(0);
        let mut all = sample_without_replacement(&pool, 3, &mut rng).unwrap();
        all.sort();
        assert_eq!(all, pool);
        assert!(sample_without_replacement(&pool, 0, &mut rng).unwrap().is_empty());
        assert_eq!(
            sample_without_replacement(&pool, 4, &mut rng),
            Err(SparsifyError::SampleTooLarge { count: 4, pool: 3 })
        );
    }

    #[test]
    fn two_element_pool_is_fair() {
        let draws = 10_000;
        let hits = (0..draws)
            .filter(|&seed| {
                let mut rng = rng_from_seed(seed);
                sample_without_replacement(&[1, 2], 1, &mut rng).unwrap()[0] == 1
            })
            .count();
        let freq = hits as f64 / draws as f64;
        assert!((0.48..=0.52).contains(&freq), "frequency {freq}");
    }

    #[test]
    fn method_parsing() {
        assert_eq!("per-type".parse::<Method>(), Ok(Method::PerType));
        assert_eq!("all-types".parse::<Method>(), Ok(Method::AllTypes));
        assert!("random".parse::<Method>().is_err());
        assert_eq!(Method::AllTypes.to_string(), "all-types");
    }
}
