//! Set of edge identities over a fixed graph.

use crate::graph::{EdgeId, EdgeRecord, GraphError, HeteroGraph};

/// Membership set over `EdgeId`s `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSet {
    bits: Vec<bool>,
    len: usize,
}

impl EdgeSet {
    pub fn new(universe: usize) -> Self {
        EdgeSet { bits: vec![false; universe], len: 0 }
    }

    pub fn full(universe: usize) -> Self {
        EdgeSet { bits: vec![true; universe], len: universe }
    }

    /// Resolve records against `g`; every identity triple must exist in `g`.
    pub fn from_records<'a, I>(g: &HeteroGraph, records: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = &'a EdgeRecord>,
    {
        let mut set = EdgeSet::new(g.m());
        for r in records {
            let e = g.find_record(r.src, r.dst, r.etype).ok_or(GraphError::UnknownEdge {
                src: r.src,
                dst: r.dst,
                etype: r.etype,
            })?;
            set.insert(e);
        }
        Ok(set)
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        self.bits.get(e.index()).copied().unwrap_or(false)
    }

    /// Returns `true` if `e` was not already present. Panics if `e` is outside the universe.
    #[inline]
    pub fn insert(&mut self, e: EdgeId) -> bool {
        let slot = &mut self.bits[e.index()];
        if *slot {
            false
        } else {
            *slot = true;
            self.len += 1;
            true
        }
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| EdgeId(i as u32))
    }

    pub fn complement(&self) -> EdgeSet {
        EdgeSet {
            bits: self.bits.iter().map(|b| !b).collect(),
            len: self.universe() - self.len,
        }
    }
}

impl Extend<EdgeId> for EdgeSet {
    fn extend<T: IntoIterator<Item = EdgeId>>(&mut self, iter: T) {
        for e in iter {
            self.insert(e);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{g1, A, B};

    #[test]
    fn insert_and_complement() {
        let mut s = EdgeSet::new(4);
        assert!(s.insert(EdgeId(2)));
        assert!(!s.insert(EdgeId(2)));
        assert_eq!(s.len(), 1);
        assert!(!s.contains(EdgeId(9)));
        let c = s.complement();
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![EdgeId(0), EdgeId(1), EdgeId(3)]);
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn from_records_resolves_triples() {
        let g = g1();
        let s = EdgeSet::from_records(&g, &[EdgeRecord::new(1, 4, B)]).unwrap();
        assert_eq!(s.len(), 1);
        let err = EdgeSet::from_records(&g, &[EdgeRecord::new(4, 1, A)]).unwrap_err();
        assert_eq!(err, GraphError::UnknownEdge { src: 4, dst: 1, etype: A });
    }
}
