//! Link-prediction proxy: hold out edges, score candidates with neighborhood
//! heuristics, and report AUC and MRR.
//!
//! The split and the negatives are drawn from the full graph, so a run on
//! the full training edges and a run on a sparsified copy of them share the
//! same test candidates.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::edge_set::EdgeSet;
use crate::graph::{EdgeId, EdgeTypeId, GraphError, HeteroGraph, NodeId};
use crate::sparsify::{self, rng_from_seed, Method, SparsifyError, SparsifyParams};

pub const DEFAULT_HOLDOUT: f64 = 0.2;
pub const DEFAULT_NEGATIVES_PER_POSITIVE: usize = 19;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("holdout fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("need at least 2 edges to split, got {0}")]
    TooFewEdges(usize),
    #[error("holdout of {test} out of {m} edges leaves an empty train or test set")]
    DegenerateSplit { test: usize, m: usize },
    #[error("negatives per positive must be at least 1")]
    ZeroNegatives,
    #[error("no type-compatible corruption exists for edge {src} -> {dst} (type {etype})")]
    NegativesExhausted { src: u64, dst: u64, etype: u32 },
    #[error("{0} list is empty")]
    EmptyInput(&'static str),
    #[error("score {0} is not a number")]
    NanScore(f64),
    #[error("rank {0} is below 1")]
    InvalidRank(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scorer {
    CommonNeighbors,
    AdamicAdar,
}

impl fmt::Display for Scorer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scorer::CommonNeighbors => "common-neighbors",
            Scorer::AdamicAdar => "adamic-adar",
        })
    }
}

impl FromStr for Scorer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "common-neighbors" => Ok(Scorer::CommonNeighbors),
            "adamic-adar" => Ok(Scorer::AdamicAdar),
            other => Err(format!("unknown scorer {other:?} (expected common-neighbors or adamic-adar)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EdgeSplit {
    pub train: EdgeSet,
    pub test_pos: EdgeSet,
    pub holdout_fraction: f64,
    pub seed: u64,
}

/// Hold out `round(fraction · m)` edges uniformly at random.
pub fn split_edges(g: &HeteroGraph, holdout_fraction: f64, seed: u64) -> Result<EdgeSplit, EvalError> {
    if !(holdout_fraction > 0.0 && holdout_fraction < 1.0) {
        return Err(EvalError::InvalidFraction(holdout_fraction));
    }
    let m = g.m();
    if m < 2 {
        return Err(EvalError::TooFewEdges(m));
    }
    let test = (holdout_fraction * m as f64).round() as usize;
    if test == 0 || test >= m {
        return Err(EvalError::DegenerateSplit { test, m });
    }
    let ids: Vec<EdgeId> = g.edge_ids().collect();
    let mut rng = rng_from_seed(seed);
    let held = sparsify::sample_without_replacement(&ids, test, &mut rng)?;
    let mut test_pos = EdgeSet::new(m);
    test_pos.extend(held);
    let train = test_pos.complement();
    Ok(EdgeSplit { train, test_pos, holdout_fraction, seed })
}

/// A candidate edge produced by corrupting a positive's destination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Corruption {
    pub src: NodeId,
    pub dst: NodeId,
    pub etype: EdgeTypeId,
}

const REJECTION_TRIES: usize = 32;

/// For every positive `(u, v, t)`, draw `per_pos` destinations `w` uniformly
/// (with replacement) among nodes of `v`'s type such that `(u, w, t)` is not
/// an edge of `g`. Positives are visited in ascending edge order.
pub fn sample_negatives(
    g: &HeteroGraph,
    test_pos: &EdgeSet,
    per_pos: usize,
    seed: u64,
) -> Result<Vec<(EdgeId, Vec<Corruption>)>, EvalError> {
    if per_pos == 0 {
        return Err(EvalError::ZeroNegatives);
    }
    let mut by_type: Vec<Vec<NodeId>> = vec![Vec::new(); g.node_type_count()];
    for u in g.nodes() {
        by_type[g.node_type(u).index()].push(u);
    }
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(test_pos.len());
    for e in test_pos.iter() {
        let pos = g.edge(e);
        let dst_type = g.node_type(pos.dst);
        let population = &by_type[dst_type.index()];
        let is_edge = |w: NodeId| g.find_edge(pos.src, w, pos.etype).is_some();
        let taken = g
            .bucket(pos.src, crate::graph::Direction::Out, pos.etype)?
            .iter()
            .filter(|&&x| g.node_type(g.edge(x).dst) == dst_type)
            .count();
        if taken == population.len() {
            let r = g.record(e);
            return Err(EvalError::NegativesExhausted { src: r.src, dst: r.dst, etype: r.etype });
        }
        let mut fallback: Option<Vec<NodeId>> = None;
        let mut draws = Vec::with_capacity(per_pos);
        for _ in 0..per_pos {
            let mut picked = None;
            if fallback.is_none() {
                for _ in 0..REJECTION_TRIES {
                    let w = population[rng.gen_range(0..population.len())];
                    if !is_edge(w) {
                        picked = Some(w);
                        break;
                    }
                }
            }
            let w = match picked {
                Some(w) => w,
                None => {
                    let valid = fallback
                        .get_or_insert_with(|| population.iter().copied().filter(|&w| !is_edge(w)).collect());
                    valid[rng.gen_range(0..valid.len())]
                }
            };
            draws.push(Corruption { src: pos.src, dst: w, etype: pos.etype });
        }
        out.push((e, draws));
    }
    Ok(out)
}

/// Undirected, type-agnostic neighbor sets. Self-loops are dropped.
#[derive(Clone, Debug)]
pub struct NeighborView {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
}

impl NeighborView {
    pub fn new(g: &HeteroGraph) -> Self {
        let mut lists: Vec<Vec<NodeId>> = vec![Vec::new(); g.n()];
        for e in g.edge_ids() {
            let r = g.edge(e);
            if r.src != r.dst {
                lists[r.src.index()].push(r.dst);
                lists[r.dst.index()].push(r.src);
            }
        }
        let mut offsets = Vec::with_capacity(g.n() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            neighbors.extend(list);
            offsets.push(neighbors.len());
        }
        NeighborView { offsets, neighbors }
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.neighbors[self.offsets[u.index()]..self.offsets[u.index() + 1]]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.neighbors(u).len()
    }

    fn for_each_common(&self, u: NodeId, v: NodeId, mut f: impl FnMut(NodeId)) {
        let (a, b) = (self.neighbors(u), self.neighbors(v));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    f(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

/// Scores of `(u, v)` for every `v` in `candidates`, equal to calling
/// [`score_pair`] on each. `marks` is scratch space of length `n`, all false
/// on entry and on return.
pub fn score_candidates(
    view: &NeighborView,
    u: NodeId,
    candidates: &[NodeId],
    scorer: Scorer,
    marks: &mut [bool],
) -> Vec<f64> {
    for w in view.neighbors(u) {
        marks[w.index()] = true;
    }
    let scores = candidates
        .iter()
        .map(|&v| {
            view.neighbors(v)
                .iter()
                .filter(|w| marks[w.index()])
                .map(|&w| match scorer {
                    Scorer::CommonNeighbors => 1.0,
                    Scorer::AdamicAdar => {
                        let d = view.degree(w);
                        if d > 1 { 1.0 / (d as f64).ln() } else { 0.0 }
                    }
                })
                .sum()
        })
        .collect();
    for w in view.neighbors(u) {
        marks[w.index()] = false;
    }
    scores
}

pub fn score_pair(view: &NeighborView, u: NodeId, v: NodeId, scorer: Scorer) -> f64 {
    let mut score = 0.0;
    match scorer {
        Scorer::CommonNeighbors => view.for_each_common(u, v, |_| score += 1.0),
        Scorer::AdamicAdar => view.for_each_common(u, v, |w| {
            let d = view.degree(w);
            if d > 1 {
                score += 1.0 / (d as f64).ln();
            }
        }),
    }
    score
}

/// Probability that a positive outscores a negative, ties counting half.
///
/// Rank-sum formulation with average ranks for ties.
pub fn auc(pos: &[f64], neg: &[f64]) -> Result<f64, EvalError> {
    if pos.is_empty() {
        return Err(EvalError::EmptyInput("positive score"));
    }
    if neg.is_empty() {
        return Err(EvalError::EmptyInput("negative score"));
    }
    if let Some(&bad) = pos.iter().chain(neg).find(|s| s.is_nan()) {
        return Err(EvalError::NanScore(bad));
    }
    let mut all: Vec<(f64, bool)> = pos.iter().map(|&s| (s, true)).chain(neg.iter().map(|&s| (s, false))).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    // twice the positive rank sum, so average ranks of tie groups stay integral
    let mut doubled_rank_sum: u128 = 0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i + 1;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // ranks i+1..=j average to (i + 1 + j) / 2
        let doubled_avg = (i + 1 + j) as u128;
        let positives = all[i..j].iter().filter(|x| x.1).count() as u128;
        doubled_rank_sum += doubled_avg * positives;
        i = j;
    }
    let (np, nn) = (pos.len() as u128, neg.len() as u128);
    let doubled_u = doubled_rank_sum - np * (np + 1);
    Ok(doubled_u as f64 / (2 * np * nn) as f64)
}

/// Rank of a positive among itself and its negatives: `1 + #higher + #tied / 2`.
pub fn rank_among(pos: f64, negatives: &[f64]) -> f64 {
    let higher = negatives.iter().filter(|&&s| s > pos).count();
    let tied = negatives.iter().filter(|&&s| s == pos).count();
    1.0 + higher as f64 + 0.5 * tied as f64
}

pub fn mrr(ranks: &[f64]) -> Result<f64, EvalError> {
    if ranks.is_empty() {
        return Err(EvalError::EmptyInput("rank"));
    }
    if let Some(&bad) = ranks.iter().find(|&&r| r.is_nan() || r < 1.0) {
        return Err(EvalError::InvalidRank(bad));
    }
    Ok(ranks.iter().map(|r| 1.0 / r).sum::<f64>() / ranks.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub auc: f64,
    pub mrr: f64,
    pub negatives_per_positive: usize,
    pub scorer: Scorer,
    pub positives: usize,
    pub scored_edges: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalConfig {
    pub holdout: f64,
    pub negatives_per_positive: usize,
    pub scorer: Scorer,
    pub seed: u64,
    /// Sparsify the training edges with `(k, method)` before scoring.
    pub sparsify: Option<(usize, Method)>,
}

impl EvalConfig {
    pub fn new(seed: u64) -> Self {
        EvalConfig {
            holdout: DEFAULT_HOLDOUT,
            negatives_per_positive: DEFAULT_NEGATIVES_PER_POSITIVE,
            scorer: Scorer::CommonNeighbors,
            seed,
            sparsify: None,
        }
    }

    pub fn with_sparsifier(mut self, k: usize, method: Method) -> Self {
        self.sparsify = Some((k, method));
        self
    }
}

pub struct EvalOutcome {
    pub report: EvalReport,
    pub split: EdgeSplit,
    /// Training edges on the full node table.
    pub train_graph: HeteroGraph,
    /// Edges of `train_graph` used for scoring.
    pub selected: EdgeSet,
}

// independent streams for the three random stages
const SPLIT_STREAM: u64 = 0;
const NEGATIVE_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;
const SPARSIFY_STREAM: u64 = 0xD1B5_4A32_D192_ED03;

/// Split, optionally sparsify the train edges, score, and report.
///
/// Per-positive scoring runs on the current rayon pool; the reduction is in
/// ascending positive order, so results do not depend on the thread count.
pub fn evaluate(g: &HeteroGraph, cfg: &EvalConfig) -> Result<EvalOutcome, EvalError> {
    let split = split_edges(g, cfg.holdout, cfg.seed ^ SPLIT_STREAM)?;
    let negatives = sample_negatives(g, &split.test_pos, cfg.negatives_per_positive, cfg.seed ^ NEGATIVE_STREAM)?;
    let train_graph = g.subgraph(&split.train)?;
    let selected = match cfg.sparsify {
        Some((k, method)) => {
            let params = SparsifyParams::new(k, method, cfg.seed ^ SPARSIFY_STREAM)?;
            sparsify::sparsify(&train_graph, &params)?.selected
        }
        None => EdgeSet::full(train_graph.m()),
    };
    let view = if selected.len() == train_graph.m() {
        NeighborView::new(&train_graph)
    } else {
        NeighborView::new(&train_graph.subgraph(&selected)?)
    };

    let scored: Vec<(f64, Vec<f64>)> = negatives
        .par_iter()
        .map_init(
            || vec![false; g.n()],
            |marks, (e, corrupted)| {
                let pos = g.edge(*e);
                // corruptions keep the positive's source, so one candidate list covers all
                let candidates: Vec<NodeId> =
                    std::iter::once(pos.dst).chain(corrupted.iter().map(|c| c.dst)).collect();
                let mut scores = score_candidates(&view, pos.src, &candidates, cfg.scorer, marks);
                let p = scores.remove(0);
                (p, scores)
            },
        )
        .collect();

    let pos_scores: Vec<f64> = scored.iter().map(|(p, _)| *p).collect();
    let neg_scores: Vec<f64> = scored.iter().flat_map(|(_, n)| n.iter().copied()).collect();
    let ranks: Vec<f64> = scored.iter().map(|(p, n)| rank_among(*p, n)).collect();

    let report = EvalReport {
        auc: auc(&pos_scores, &neg_scores)?,
        mrr: mrr(&ranks)?,
        negatives_per_positive: cfg.negatives_per_positive,
        scorer: cfg.scorer,
        positives: pos_scores.len(),
        scored_edges: selected.len(),
    };
    Ok(EvalOutcome { report, split, train_graph, selected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{g1, A};
    use crate::graph::{build_graph, EdgeRecord, NodeInfo, NodeTable};

    fn chain(m: u64) -> HeteroGraph {
        build_graph((0..m).map(|i| EdgeRecord::new(i, i + 1, 0)), None).unwrap()
    }

    #[test]
    fn split_sizes() {
        let g = chain(10);
        let s = split_edges(&g, 0.2, 1).unwrap();
        assert_eq!(s.test_pos.len(), 2);
        assert_eq!(s.train.len(), 8);
        assert!(g.edge_ids().all(|e| s.train.contains(e) != s.test_pos.contains(e)));
        let again = split_edges(&g, 0.2, 1).unwrap();
        assert_eq!(s.test_pos, again.test_pos);
    }

    #[test]
    fn split_guards() {
        let g = chain(10);
        assert_eq!(split_edges(&g, 0.999, 1).unwrap_err(), EvalError::DegenerateSplit { test: 10, m: 10 });
        assert_eq!(split_edges(&g, 0.01, 1).unwrap_err(), EvalError::DegenerateSplit { test: 0, m: 10 });
        assert_eq!(split_edges(&g, 1.0, 1).unwrap_err(), EvalError::InvalidFraction(1.0));
        assert_eq!(split_edges(&chain(1), 0.5, 1).unwrap_err(), EvalError::TooFewEdges(1));
    }

    fn typed_g1() -> HeteroGraph {
        let mut t = NodeTable::new();
        for (id, ty) in [(1u64, 0u32), (2, 1), (3, 1), (4, 2)] {
            t.insert(id, NodeInfo { name: id.to_string(), node_type: ty });
        }
        build_graph(g1().edge_ids().map(|e| g1().record(e)).collect::<Vec<_>>(), Some(&t)).unwrap()
    }

    #[test]
    fn negatives_exhausted_on_g1() {
        let g = typed_g1();
        let pos = EdgeSet::from_records(&g, &[EdgeRecord::new(1, 2, A)]).unwrap();
        assert_eq!(
            sample_negatives(&g, &pos, 1, 0).unwrap_err(),
            EvalError::NegativesExhausted { src: 1, dst: 2, etype: A }
        );
    }

    #[test]
    fn negatives_respect_type_and_non_edges() {
        // 0 -> 1 plus ten candidate nodes of the destination type
        let mut t = NodeTable::new();
        t.insert(0, NodeInfo { name: "src".into(), node_type: 0 });
        for id in 1..=11 {
            t.insert(id, NodeInfo { name: format!("d{id}"), node_type: 1 });
        }
        let g = build_graph(vec![EdgeRecord::new(0, 1, 0), EdgeRecord::new(0, 2, 0)], Some(&t)).unwrap();
        let pos = EdgeSet::from_records(&g, &[EdgeRecord::new(0, 1, 0)]).unwrap();
        let negs = sample_negatives(&g, &pos, 50, 3).unwrap();
        assert_eq!(negs.len(), 1);
        assert_eq!(negs[0].1.len(), 50);
        for c in &negs[0].1 {
            assert_eq!(g.node_type(c.dst).index(), 1);
            assert!(g.find_edge(c.src, c.dst, c.etype).is_none());
        }
        assert_eq!(negs[0].1, sample_negatives(&g, &pos, 50, 3).unwrap()[0].1);
        assert_eq!(sample_negatives(&g, &pos, 0, 3).unwrap_err(), EvalError::ZeroNegatives);
    }

    #[test]
    fn rejection_fallback_finds_the_only_gap() {
        // source already linked to 99 of 100 candidates
        let mut t = NodeTable::new();
        t.insert(0, NodeInfo { name: "s".into(), node_type: 0 });
        for id in 1..=100 {
            t.insert(id, NodeInfo { name: id.to_string(), node_type: 1 });
        }
        let g = build_graph((1..=99).map(|d| EdgeRecord::new(0, d, 0)), Some(&t)).unwrap();
        let pos = EdgeSet::from_records(&g, &[EdgeRecord::new(0, 5, 0)]).unwrap();
        let negs = sample_negatives(&g, &pos, 5, 11).unwrap();
        assert!(negs[0].1.iter().all(|c| g.node_label(c.dst) == 100));
    }

    fn view_of(edges: &[(u64, u64)]) -> (HeteroGraph, NeighborView) {
        let g = build_graph(edges.iter().map(|&(s, d)| EdgeRecord::new(s, d, 0)), None).unwrap();
        let v = NeighborView::new(&g);
        (g, v)
    }

    #[test]
    fn common_neighbors() {
        let (g, v) = view_of(&[(1, 2), (2, 3), (4, 5)]);
        let n = |l| g.node_id(l).unwrap();
        assert_eq!(score_pair(&v, n(1), n(3), Scorer::CommonNeighbors), 1.0);
        assert_eq!(score_pair(&v, n(1), n(4), Scorer::CommonNeighbors), 0.0);
    }

    #[test]
    fn adamic_adar() {
        // w = 0 has neighbors u=1, v=2, 3, 4
        let (g, v) = view_of(&[(1, 0), (0, 2), (0, 3), (4, 0)]);
        let n = |l| g.node_id(l).unwrap();
        let s = score_pair(&v, n(1), n(2), Scorer::AdamicAdar);
        assert!((s - 0.7213475204444817).abs() < 1e-12, "{s}");
        // a common neighbor of degree 1 is impossible, degree 2 contributes 1/ln 2
        let (g, v) = view_of(&[(1, 0), (0, 2)]);
        let n = |l| g.node_id(l).unwrap();
        assert!((score_pair(&v, n(1), n(2), Scorer::AdamicAdar) - 1.0 / 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn batched_scores_match_pairwise() {
        let (g, v) = view_of(&[(1, 0), (0, 2), (0, 3), (4, 0), (1, 3), (2, 3), (4, 4), (5, 1)]);
        let nodes: Vec<NodeId> = g.nodes().collect();
        let mut marks = vec![false; g.n()];
        for scorer in [Scorer::CommonNeighbors, Scorer::AdamicAdar] {
            for &u in &nodes {
                let batch = score_candidates(&v, u, &nodes, scorer, &mut marks);
                for (&w, s) in nodes.iter().zip(batch) {
                    assert!((s - score_pair(&v, u, w, scorer)).abs() < 1e-12);
                }
                assert!(marks.iter().all(|m| !m));
            }
        }
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[1.0, 1.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(auc(&[0.5], &[0.5]).unwrap(), 0.5);
        assert_eq!(auc(&[0.9, 0.4], &[0.6, 0.1]).unwrap(), 0.75);
        assert!(matches!(auc(&[], &[1.0]), Err(EvalError::EmptyInput(_))));
        assert!(matches!(auc(&[1.0], &[]), Err(EvalError::EmptyInput(_))));
        assert!(matches!(auc(&[f64::NAN], &[1.0]), Err(EvalError::NanScore(_))));
    }

    #[test]
    fn mrr_examples() {
        assert_eq!(mrr(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(mrr(&[1.0, 2.0]).unwrap(), 0.75);
        let tied = rank_among(0.3, &[0.3]);
        assert_eq!(tied, 1.5);
        assert!((mrr(&[tied]).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(matches!(mrr(&[]), Err(EvalError::EmptyInput(_))));
        assert!(matches!(mrr(&[0.5]), Err(EvalError::InvalidRank(_))));
    }

    #[test]
    fn scorer_parsing() {
        assert_eq!("adamic-adar".parse::<Scorer>(), Ok(Scorer::AdamicAdar));
        assert!("jaccard".parse::<Scorer>().is_err());
    }
}
