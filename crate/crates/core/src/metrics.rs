//! Checks for the structural guarantees of a sparsifier.

use serde::Serialize;
use thiserror::Error;

use crate::edge_set::EdgeSet;
use crate::graph::{Direction, EdgeTypeId, HeteroGraph, NodeId};
use crate::sparsify::Method;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("selection covers {found} edges but the graph has {expected}")]
    SelectionMismatch { expected: usize, found: usize },
}

/// A bucket holding fewer selected edges than its method requires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverageViolation {
    pub node: NodeId,
    pub direction: Direction,
    pub etype: EdgeTypeId,
    pub required: usize,
    pub actual: usize,
}

/// `|selected| / m`.
pub fn sparsification_ratio(g: &HeteroGraph, selected: &EdgeSet) -> Result<f64, MetricsError> {
    check_universe(g, selected)?;
    if g.m() == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    Ok(selected.len() as f64 / g.m() as f64)
}

/// Every nonempty bucket whose selected count is below `min(k, |bucket|)`
/// (per-type) or below 1 (all-types). Reported exhaustively, in node,
/// direction (out first), edge-type order.
pub fn coverage_report(
    g: &HeteroGraph,
    selected: &EdgeSet,
    k: usize,
    method: Method,
) -> Result<Vec<CoverageViolation>, MetricsError> {
    check_universe(g, selected)?;
    let mut violations = Vec::new();
    for u in g.nodes() {
        for dir in Direction::BOTH {
            for (etype, bucket) in g.buckets(u, dir) {
                let required = match method {
                    Method::PerType => k.min(bucket.len()),
                    Method::AllTypes => 1,
                };
                let actual = bucket.iter().filter(|&&e| selected.contains(e)).count();
                if actual < required {
                    violations.push(CoverageViolation { node: u, direction: dir, etype, required, actual });
                }
            }
        }
    }
    Ok(violations)
}

/// Nodes with at least one edge in `g` and none in `selected`, ascending.
pub fn isolated_nodes(g: &HeteroGraph, selected: &EdgeSet) -> Result<Vec<NodeId>, MetricsError> {
    check_universe(g, selected)?;
    let mut touched = vec![false; g.n()];
    for e in selected.iter() {
        let r = g.edge(e);
        touched[r.src.index()] = true;
        touched[r.dst.index()] = true;
    }
    Ok(g.nodes()
        .filter(|&u| !touched[u.index()] && g.out_degree(u) + g.in_degree(u) > 0)
        .collect())
}

fn check_universe(g: &HeteroGraph, selected: &EdgeSet) -> Result<(), MetricsError> {
    if selected.universe() != g.m() {
        return Err(MetricsError::SelectionMismatch { expected: g.m(), found: selected.universe() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{g1, A};
    use crate::graph::{build_graph, EdgeRecord};

    fn bipartite() -> HeteroGraph {
        let mut edges = Vec::new();
        for u in 1..=3 {
            for v in 11..=13 {
                edges.push(EdgeRecord::new(u, v, 0));
            }
        }
        build_graph(edges, None).unwrap()
    }

    #[test]
    fn ratio_values() {
        let g = g1();
        assert_eq!(sparsification_ratio(&g, &EdgeSet::full(g.m())).unwrap(), 1.0);
        let b = bipartite();
        let sel = EdgeSet::from_records(
            &b,
            &[EdgeRecord::new(1, 11, 0), EdgeRecord::new(2, 12, 0), EdgeRecord::new(3, 13, 0)],
        )
        .unwrap();
        assert_eq!(sparsification_ratio(&b, &sel).unwrap(), 1.0 / 3.0);
        let empty = build_graph(Vec::new(), None).unwrap();
        assert_eq!(sparsification_ratio(&empty, &EdgeSet::new(0)), Err(MetricsError::EmptyGraph));
    }

    #[test]
    fn empty_selection_violates_every_bucket() {
        let g = g1();
        // out(1,a) out(1,b) in(2,a) in(3,a) in(4,b)
        let v = coverage_report(&g, &EdgeSet::new(g.m()), 1, Method::PerType).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.iter().all(|x| x.required == 1 && x.actual == 0));
        let v = coverage_report(&g, &EdgeSet::new(g.m()), 2, Method::PerType).unwrap();
        let hub_a = v
            .iter()
            .find(|x| x.node == g.node_id(1).unwrap() && x.etype == g.edge_type_id(A).unwrap())
            .unwrap();
        assert_eq!(hub_a.required, 2);
    }

    #[test]
    fn full_selection_is_clean() {
        let g = g1();
        let all = EdgeSet::full(g.m());
        assert!(coverage_report(&g, &all, 5, Method::PerType).unwrap().is_empty());
        assert!(coverage_report(&g, &all, 5, Method::AllTypes).unwrap().is_empty());
        assert!(isolated_nodes(&g, &all).unwrap().is_empty());
    }

    #[test]
    fn isolation_after_dropping_leaves() {
        let g = g1();
        let sel = EdgeSet::from_records(&g, &[EdgeRecord::new(1, 2, A)]).unwrap();
        let iso: Vec<u64> = isolated_nodes(&g, &sel).unwrap().into_iter().map(|u| g.node_label(u)).collect();
        assert_eq!(iso, vec![3, 4]);
    }

    #[test]
    fn foreign_selection_rejected() {
        let g = g1();
        assert!(matches!(
            coverage_report(&g, &EdgeSet::new(99), 1, Method::PerType),
            Err(MetricsError::SelectionMismatch { .. })
        ));
    }
}
