use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::IoError;
use crate::edge_set::EdgeSet;
use crate::evalproxy::EvalReport;
use crate::graph::{Direction, HeteroGraph};
use crate::metrics::{self, CoverageViolation, MetricsError};
use crate::sparsify::Method;

/// A coverage violation expressed with original node and edge-type ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ViolationRecord {
    pub node: u64,
    pub direction: Direction,
    pub etype: u32,
    pub required: usize,
    pub actual: usize,
}

impl ViolationRecord {
    fn from_violation(g: &HeteroGraph, v: &CoverageViolation) -> Self {
        ViolationRecord {
            node: g.node_label(v.node),
            direction: v.direction,
            etype: g.edge_type_label(v.etype),
            required: v.required,
            actual: v.actual,
        }
    }
}

/// JSON report describing one edge selection over a graph.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub n: usize,
    pub m: usize,
    pub k: Option<usize>,
    pub t: usize,
    pub method: Option<Method>,
    pub seed: Option<u64>,
    pub kept_edges: usize,
    pub ratio: f64,
    pub per_type_kept: BTreeMap<u32, usize>,
    pub duplicates_dropped: usize,
    pub coverage_violations: Vec<ViolationRecord>,
    pub isolated_nodes: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

impl Report {
    /// Coverage is only checked when both `k` and `method` are known.
    pub fn for_selection(
        g: &HeteroGraph,
        selected: &EdgeSet,
        k: Option<usize>,
        method: Option<Method>,
        seed: Option<u64>,
    ) -> Result<Report, MetricsError> {
        let violations = match (k, method) {
            (Some(k), Some(method)) => metrics::coverage_report(g, selected, k, method)?,
            _ => Vec::new(),
        };
        let isolated = metrics::isolated_nodes(g, selected)?;
        let mut per_type_kept: BTreeMap<u32, usize> = g.edge_types().map(|t| (g.edge_type_label(t), 0)).collect();
        for e in selected.iter() {
            *per_type_kept.get_mut(&g.edge_type_label(g.edge(e).etype)).unwrap() += 1;
        }
        Ok(Report {
            n: g.n(),
            m: g.m(),
            k,
            t: g.t(),
            method,
            seed,
            kept_edges: selected.len(),
            ratio: if g.m() == 0 { 0.0 } else { selected.len() as f64 / g.m() as f64 },
            per_type_kept,
            duplicates_dropped: g.duplicates_dropped(),
            coverage_violations: violations.iter().map(|v| ViolationRecord::from_violation(g, v)).collect(),
            isolated_nodes: isolated.into_iter().map(|u| g.node_label(u)).collect(),
            eval: None,
            generated_at: None,
        })
    }

    pub fn passes_verification(&self) -> bool {
        self.coverage_violations.is_empty() && self.isolated_nodes.is_empty()
    }
}

pub fn write_report<W: Write>(report: &Report, mut out: W) -> Result<(), IoError> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{g1, A, B};
    use crate::graph::EdgeRecord;

    #[test]
    fn report_fields() {
        let g = g1();
        let sel = EdgeSet::from_records(&g, &[EdgeRecord::new(1, 2, A)]).unwrap();
        let r = Report::for_selection(&g, &sel, Some(1), Some(Method::PerType), Some(42)).unwrap();
        assert_eq!(r.kept_edges, 1);
        assert_eq!(r.per_type_kept[&A], 1);
        assert_eq!(r.per_type_kept[&B], 0);
        assert_eq!(r.isolated_nodes, vec![3, 4]);
        assert!(!r.passes_verification());

        let mut out = Vec::new();
        write_report(&r, &mut out).unwrap();
        let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
        for key in [
            "n",
            "m",
            "k",
            "t",
            "method",
            "seed",
            "kept_edges",
            "ratio",
            "per_type_kept",
            "duplicates_dropped",
            "coverage_violations",
            "isolated_nodes",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["method"], "per-type");
        assert_eq!(json["coverage_violations"][0]["direction"], "out");
        assert_eq!(json["coverage_violations"][0]["etype"], B);
        assert!(json.get("generated_at").is_none());
    }
}
