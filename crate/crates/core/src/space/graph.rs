//! Finite weighted graphs with the shortest-path metric.

use petgraph::algo::{dijkstra, Measure};
use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::visit::EdgeRef;

/// Undirected graph with positive edge weights and its all-pairs distance table.
#[derive(Debug, Clone)]
pub struct WeightedGraph<W> {
    graph: UnGraph<(), W>,
    table: Vec<Vec<Option<W>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphBuildError {
    NonPositiveWeight { edge: usize },
    Empty,
}

impl<W> WeightedGraph<W>
where
    W: Measure + Copy + num_traits::Zero,
{
    /// Builds the graph on vertices `0..n` where `n` is one past the largest
    /// endpoint mentioned (or `min_vertices`, whichever is larger).
    pub fn new(edges: &[(usize, usize, W)], min_vertices: usize) -> Result<Self, GraphBuildError> {
        let n = edges
            .iter()
            .map(|(u, v, _)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
            .max(min_vertices);
        if n == 0 {
            return Err(GraphBuildError::Empty);
        }
        let mut graph = UnGraph::with_capacity(n, edges.len());
        for _ in 0..n {
            graph.add_node(());
        }
        for (i, &(u, v, w)) in edges.iter().enumerate() {
            if !(w > W::zero()) {
                return Err(GraphBuildError::NonPositiveWeight { edge: i });
            }
            graph.add_edge(NodeIndex::new(u), NodeIndex::new(v), w);
        }
        let table = (0..n)
            .map(|s| {
                let reached = dijkstra(&graph, NodeIndex::new(s), None, |e| *e.weight());
                (0..n).map(|t| reached.get(&NodeIndex::new(t)).copied()).collect()
            })
            .collect();
        Ok(Self { graph, table })
    }

    pub fn vertex_count(&self) -> usize {
        self.table.len()
    }

    pub fn distance(&self, u: usize, v: usize) -> Option<W> {
        self.table.get(u)?.get(v).copied().flatten()
    }

    pub fn edges(&self) -> Vec<(usize, usize, W)> {
        self.graph
            .edge_references()
            .map(|e| (e.source().index(), e.target().index(), *e.weight()))
            .collect()
    }

    /// Vertices of a shortest path from `u` to `v`, inclusive.
    pub fn shortest_path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        self.distance(u, v)?;
        let mut path = vec![v];
        let mut cur = v;
        let mut steps = 0usize;
        while cur != u {
            // predecessor on a shortest path minimizes d(u, other) + w(other, cur)
            let mut next: Option<(usize, W, W)> = None;
            for e in self.graph.edges(NodeIndex::new(cur)) {
                let other = if e.source().index() == cur { e.target().index() } else { e.source().index() };
                let Some(du) = self.distance(u, other) else { continue };
                let via = du + *e.weight();
                let better = match next {
                    None => true,
                    Some((_, best_via, best_du)) => via < best_via || (!(best_via < via) && du < best_du),
                };
                if better {
                    next = Some((other, via, du));
                }
            }
            let (other, _, _) = next?;
            path.push(other);
            cur = other;
            steps += 1;
            if steps > self.vertex_count() {
                return None;
            }
        }
        path.reverse();
        Some(path)
    }
}
