//! Attachment histories and the immutable multigraph view built from them.
//!
//! Vertices are 1-based everywhere. A history of length `n` stores, for each
//! vertex `t`, the vertex it attached to when it was created; `targets[t] = t`
//! is a loop. The multigraph keeps per-vertex degrees (a loop counts twice),
//! loop counts and a CSR adjacency of non-loop edge ends.

use crate::error::{Error, Result};

/// 1-based vertex index.
pub type Vertex = usize;

/// The target sequence fully describing one realization of `G_1^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AttachmentHistory {
    targets: Vec<u32>,
}

impl AttachmentHistory {
    /// Validates `1 <= targets[t] <= t` for every (1-based) `t`.
    pub fn new(targets: Vec<usize>) -> Result<Self> {
        if targets.len() > u32::MAX as usize {
            return Err(Error::TooLarge(targets.len()));
        }
        for (i, &s) in targets.iter().enumerate() {
            let t = i + 1;
            if s < 1 || s > t {
                return Err(Error::InvalidTarget { t, target: s });
            }
        }
        Ok(Self {
            targets: targets.into_iter().map(|s| s as u32).collect(),
        })
    }

    /// Caller guarantees the invariant; used by the generator and enumerator.
    pub(crate) fn from_raw(targets: Vec<u32>) -> Self {
        debug_assert!(targets
            .iter()
            .enumerate()
            .all(|(i, &s)| s >= 1 && s as usize <= i + 1));
        Self { targets }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Target of vertex `t` (1-based).
    pub fn target(&self, t: Vertex) -> Vertex {
        self.targets[t - 1] as usize
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn into_graph(self) -> MultiGraph {
        MultiGraph::from_history(&self)
    }
}

/// Undirected multigraph with loops and multi-edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    degree: Vec<u32>,
    loops: Vec<u32>,
    // CSR over non-loop edge ends, neighbor ids sorted within each vertex.
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
}

impl MultiGraph {
    /// Builds `G_1^n` from a validated history: edge `t` joins `t` and `targets[t]`.
    pub fn from_history(h: &AttachmentHistory) -> Self {
        let edges = h
            .targets
            .iter()
            .enumerate()
            .map(|(i, &s)| (i as u32 + 1, s))
            .collect();
        // Filling the CSR in creation order already yields sorted lists:
        // the parent of v is smaller than v, and children arrive in order.
        Self::build(h.len(), edges, false)
    }

    /// General constructor; endpoints must lie in `[1, n]`.
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(Error::TooLarge(n));
        }
        let mut out = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            for v in [a, b] {
                if v < 1 || v > n {
                    return Err(Error::UnknownVertex { v, n });
                }
            }
            out.push((a as u32, b as u32));
        }
        Ok(Self::build(n, out, true))
    }

    fn build(n: usize, edges: Vec<(u32, u32)>, sort_lists: bool) -> Self {
        let mut degree = vec![0u32; n];
        let mut loops = vec![0u32; n];
        for &(a, b) in &edges {
            degree[a as usize - 1] += 1;
            degree[b as usize - 1] += 1;
            if a == b {
                loops[a as usize - 1] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        let mut acc = 0usize;
        for v in 0..n {
            acc += (degree[v] - 2 * loops[v]) as usize;
            offsets.push(acc);
        }
        let mut fill = offsets[..n].to_vec();
        let mut adjacency = vec![0u32; acc];
        for &(a, b) in &edges {
            if a != b {
                let (ia, ib) = (a as usize - 1, b as usize - 1);
                adjacency[fill[ia]] = b;
                fill[ia] += 1;
                adjacency[fill[ib]] = a;
                fill[ib] += 1;
            }
        }
        if sort_lists {
            for v in 0..n {
                adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
            }
        }
        Self {
            n,
            edges,
            degree,
            loops,
            offsets,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().map(|&(a, b)| (a as usize, b as usize))
    }

    fn check(&self, v: Vertex) -> Result<usize> {
        if v < 1 || v > self.n {
            Err(Error::UnknownVertex { v, n: self.n })
        } else {
            Ok(v - 1)
        }
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: Vertex) -> Result<usize> {
        Ok(self.degree[self.check(v)?] as usize)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    pub fn has_loop(&self, v: Vertex) -> Result<bool> {
        Ok(self.loops[self.check(v)?] > 0)
    }

    pub fn loop_count(&self, v: Vertex) -> Result<usize> {
        Ok(self.loops[self.check(v)?] as usize)
    }

    /// Neighbors of `v` other than `v` itself, with multiplicity, sorted.
    pub fn neighbors(&self, v: Vertex) -> Result<&[u32]> {
        let i = self.check(v)?;
        Ok(&self.adjacency[self.offsets[i]..self.offsets[i + 1]])
    }

    fn second_degree_at(&self, i: usize) -> u64 {
        let list = &self.adjacency[self.offsets[i]..self.offsets[i + 1]];
        let mut sum = 0u64;
        let mut prev = 0u32;
        for &q in list {
            if q != prev {
                sum += self.degree[q as usize - 1] as u64;
                prev = q;
            }
        }
        // Half-edges at neighbors that pair with v itself.
        sum - list.len() as u64
    }

    /// Half-edges at the distinct neighbors of `v` (v excluded) that are not
    /// paired with `v`.
    pub fn second_degree(&self, v: Vertex) -> Result<usize> {
        Ok(self.second_degree_at(self.check(v)?) as usize)
    }

    /// Second degrees of all vertices, index `v - 1`.
    pub fn second_degrees(&self) -> Vec<u64> {
        (0..self.n).map(|i| self.second_degree_at(i)).collect()
    }

    /// Identifies consecutive blocks of `m` vertices: `v -> ceil(v / m)`.
    pub fn collapse(&self, m: usize) -> Result<MultiGraph> {
        if m == 0 || !self.n.is_multiple_of(m) {
            return Err(Error::BlockSize { n: self.n, m });
        }
        if m == 1 {
            return Ok(self.clone());
        }
        let block = |v: u32| ((v as usize - 1) / m + 1) as u32;
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (block(a), block(b)))
            .collect();
        Ok(Self::build(self.n / m, edges, true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(targets: &[usize]) -> MultiGraph {
        AttachmentHistory::new(targets.to_vec())
            .unwrap()
            .into_graph()
    }

    #[test]
    fn single_loop() {
        let g = graph(&[1]);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.degree(1).unwrap(), 2);
        assert!(g.has_loop(1).unwrap());
        assert_eq!(g.second_degree(1).unwrap(), 0);
    }

    #[test]
    fn empty_graph() {
        let g = graph(&[]);
        assert_eq!(g.vertex_count(), 0);
        assert_eq!(g.edge_count(), 0);
        assert!(g.second_degrees().is_empty());
        assert!(matches!(g.degree(1), Err(Error::UnknownVertex { .. })));
    }

    #[test]
    fn path_with_loop() {
        let g = graph(&[1, 1, 2]);
        assert_eq!(g.degrees(), &[3, 2, 1]);
        assert!(g.has_loop(1).unwrap());
        assert!(!g.has_loop(2).unwrap());
        assert!(!g.has_loop(3).unwrap());
        assert_eq!(g.second_degree(3).unwrap(), 1);
        assert_eq!(g.second_degree(2).unwrap(), 2);
        assert_eq!(g.second_degree(1).unwrap(), 1);
    }

    #[test]
    fn late_self_target_is_a_loop() {
        let g = graph(&[1, 2]);
        assert!(g.has_loop(2).unwrap());
        assert_eq!(g.second_degrees(), vec![0, 0]);
    }

    #[test]
    fn rejects_forward_targets() {
        assert!(matches!(
            AttachmentHistory::new(vec![1, 3]),
            Err(Error::InvalidTarget { t: 2, target: 3 })
        ));
        assert!(AttachmentHistory::new(vec![0]).is_err());
    }

    #[test]
    fn unknown_vertex() {
        let g = graph(&[1, 1]);
        assert!(g.second_degree(0).is_err());
        assert!(g.has_loop(3).is_err());
    }

    #[test]
    fn collapse_pairs() {
        let g = graph(&[1, 1, 2, 3]).collapse(2).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.degrees(), &[5, 3]);
        assert_eq!(g.loop_count(1).unwrap(), 2);
        assert_eq!(g.loop_count(2).unwrap(), 1);

        let g = graph(&[1, 1]).collapse(2).unwrap();
        assert_eq!(g.degrees(), &[4]);
        assert_eq!(g.loop_count(1).unwrap(), 2);
    }

    #[test]
    fn collapse_identity_and_errors() {
        let g = graph(&[1, 1, 2, 2, 4]);
        assert_eq!(g.collapse(1).unwrap(), g);
        assert!(matches!(
            g.collapse(2),
            Err(Error::BlockSize { n: 5, m: 2 })
        ));
        assert!(g.collapse(0).is_err());
        assert_eq!(graph(&[]).collapse(3).unwrap().vertex_count(), 0);
    }

    #[test]
    fn multi_edges_count_distinct_neighbors_once() {
        // Two parallel edges 1-2 plus a pendant 3 on vertex 2.
        let g = MultiGraph::from_edges(3, vec![(1, 2), (2, 1), (3, 2)]).unwrap();
        assert_eq!(g.degrees(), &[2, 3, 1]);
        // d2(1) = d(2) - 2 half-edges paired with 1.
        assert_eq!(g.second_degree(1).unwrap(), 1);
        // d2(2) = d(1) + d(3) - 3.
        assert_eq!(g.second_degree(2).unwrap(), 0);
        assert_eq!(g.second_degree(3).unwrap(), 2);
    }
}
