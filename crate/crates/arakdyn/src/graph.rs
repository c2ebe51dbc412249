//! Finite directed graphs, their oriented-edge shifts, and truncated
//! (q+1)-regular tree neighborhoods of a finite base tree.
//!
//! A graph carries one record per geometric edge; oriented edges are indexed
//! `0..e` for the positive orientation (src → dst as recorded) and `e..2e`
//! for the reversal. Capitalizing the edge id names the reversed orientation.

use crate::symbolic::{Alphabet, SpecKind, SubshiftSpec, SymbolicError, Word};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {0} references a vertex that does not exist")]
    DanglingEdge(String),
    #[error("duplicate identifier {0}")]
    Duplicate(String),
    #[error("graph has a sink at vertex {0}")]
    Sink(String),
    #[error("operation requires a tree, but the graph has {edges} edges on {vertices} vertices in {components} component(s)")]
    NotATree {
        vertices: usize,
        edges: usize,
        components: usize,
    },
    #[error("residue cardinality q must be at least 2, got {0}")]
    BadResidueCardinality(usize),
    #[error("unknown preset case {0}; valid cases are 1, 2, 3")]
    BadPreset(usize),
    #[error("unknown preset name {0}; valid names are rose2, theta, dumbbell")]
    BadPresetName(String),
    #[error("vertex {0} out of range")]
    VertexRange(usize),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRec {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

/// A finite directed graph with involutive oriented edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<EdgeRec>,
}

/// Wire format: `{ "vertices": [...], "edges": [{id, src, dst}], "orientation": [...] }`
/// where `orientation` lists the edge ids chosen as the positive part.
#[derive(Serialize, Deserialize)]
struct GraphWire {
    vertices: Vec<String>,
    edges: Vec<EdgeWire>,
    orientation: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EdgeWire {
    id: String,
    src: String,
    dst: String,
}

impl Serialize for DirectedGraph {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let wire = GraphWire {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeWire {
                    id: e.id.clone(),
                    src: self.vertices[e.src].clone(),
                    dst: self.vertices[e.dst].clone(),
                })
                .collect(),
            orientation: self.edges.iter().map(|e| e.id.clone()).collect(),
        };
        wire.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DirectedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = GraphWire::deserialize(de)?;
        let index = |name: &str| wire.vertices.iter().position(|v| v == name);
        let mut edges = Vec::new();
        for e in &wire.edges {
            let src = index(&e.src)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown vertex {}", e.src)))?;
            let dst = index(&e.dst)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown vertex {}", e.dst)))?;
            edges.push(EdgeRec {
                id: e.id.clone(),
                src,
                dst,
            });
        }
        DirectedGraph::new(wire.vertices, edges).map_err(serde::de::Error::custom)
    }
}

impl DirectedGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<EdgeRec>) -> Result<Self, GraphError> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(GraphError::Duplicate(v.clone()));
            }
        }
        let mut eseen = std::collections::BTreeSet::new();
        for e in &edges {
            if e.src >= vertices.len() || e.dst >= vertices.len() {
                return Err(GraphError::DanglingEdge(e.id.clone()));
            }
            if !eseen.insert(e.id.clone()) {
                return Err(GraphError::Duplicate(e.id.clone()));
            }
        }
        Ok(Self { vertices, edges })
    }

    /// The finite quotient graphs occurring for genus 2:
    /// case 1 a rose with two loops, case 2 a theta graph,
    /// case 3 a dumbbell (two loops joined by a bridge).
    pub fn mumford_genus2_preset(case: usize) -> Result<Self, GraphError> {
        let g = |vs: &[&str], es: &[(&str, usize, usize)]| {
            DirectedGraph::new(
                vs.iter().map(|s| s.to_string()).collect(),
                es.iter()
                    .map(|(id, s, d)| EdgeRec {
                        id: id.to_string(),
                        src: *s,
                        dst: *d,
                    })
                    .collect(),
            )
        };
        match case {
            1 => g(&["v"], &[("a", 0, 0), ("b", 0, 0)]),
            2 => g(&["u", "v"], &[("a", 0, 1), ("b", 1, 0), ("c", 0, 1)]),
            3 => g(&["u", "v"], &[("a", 0, 1), ("b", 0, 0), ("c", 1, 1)]),
            other => Err(GraphError::BadPreset(other)),
        }
    }

    pub fn preset_by_name(name: &str) -> Result<Self, GraphError> {
        match name {
            "rose2" => Self::mumford_genus2_preset(1),
            "theta" => Self::mumford_genus2_preset(2),
            "dumbbell" => Self::mumford_genus2_preset(3),
            other => Err(GraphError::BadPresetName(other.to_string())),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeRec] {
        &self.edges
    }

    /// Number of oriented edges (both orientations of every edge).
    pub fn oriented_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn source(&self, oriented: usize) -> usize {
        let e = self.edges.len();
        if oriented < e {
            self.edges[oriented].src
        } else {
            self.edges[oriented - e].dst
        }
    }

    pub fn range(&self, oriented: usize) -> usize {
        let e = self.edges.len();
        if oriented < e {
            self.edges[oriented].dst
        } else {
            self.edges[oriented - e].src
        }
    }

    pub fn involution(&self, oriented: usize) -> usize {
        let e = self.edges.len();
        if oriented < e {
            oriented + e
        } else {
            oriented - e
        }
    }

    pub fn is_positive(&self, oriented: usize) -> bool {
        oriented < self.edges.len()
    }

    pub fn oriented_name(&self, oriented: usize) -> String {
        let e = self.edges.len();
        if oriented < e {
            self.edges[oriented].id.clone()
        } else {
            self.edges[oriented - e].id.to_uppercase()
        }
    }

    pub fn oriented_index(&self, name: &str) -> Option<usize> {
        let e = self.edges.len();
        for (i, rec) in self.edges.iter().enumerate() {
            if rec.id == name {
                return Some(i);
            }
            if rec.id.to_uppercase() == name && rec.id != name {
                return Some(i + e);
            }
        }
        None
    }

    pub fn total_degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.src == v) + usize::from(e.dst == v))
            .sum()
    }

    pub fn has_sink(&self) -> Option<usize> {
        (0..self.vertices.len()).find(|&v| self.edges.iter().all(|e| e.src != v))
    }

    pub fn component_count(&self) -> usize {
        let n = self.vertices.len();
        let mut comp = (0..n).collect::<Vec<_>>();
        fn find(comp: &mut Vec<usize>, i: usize) -> usize {
            if comp[i] != i {
                let r = find(comp, comp[i]);
                comp[i] = r;
            }
            comp[i]
        }
        for e in &self.edges {
            let (a, b) = (find(&mut comp, e.src), find(&mut comp, e.dst));
            if a != b {
                comp[a] = b;
            }
        }
        (0..n).filter(|&i| find(&mut comp, i) == i).count()
    }

    pub fn first_betti(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    pub fn is_tree(&self) -> bool {
        self.component_count() == 1 && self.edges.len() + 1 == self.vertices.len()
    }

    /// The oriented-edge shift: `A(w_i, w_j) = 1` iff `r(w_i) = s(w_j)` and
    /// `w_j ≠ ι(w_i)`. With `require_sink_free`, graphs with a sink are
    /// rejected so that every oriented edge admits a continuation.
    pub fn directed_edge_matrix(
        &self,
        require_sink_free: bool,
    ) -> Result<SubshiftSpec, GraphError> {
        if require_sink_free {
            if let Some(v) = self.has_sink() {
                return Err(GraphError::Sink(self.vertices[v].clone()));
            }
        }
        let n = self.oriented_count();
        let names = (0..n).map(|o| self.oriented_name(o)).collect();
        let pairing = (0..n).map(|o| self.involution(o)).collect();
        let alphabet = Alphabet::new(names, pairing)?;
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| u8::from(self.range(i) == self.source(j) && j != self.involution(i)))
                    .collect()
            })
            .collect();
        Ok(SubshiftSpec::with_kind(
            alphabet,
            matrix,
            SpecKind::General,
        )?)
    }

    /// All admissible oriented-edge sequences of length n, lexicographic.
    pub fn walks(&self, n: usize, budget: u64) -> Result<Vec<Word>, GraphError> {
        let spec = self.directed_edge_matrix(false)?;
        Ok(spec.enumerate_words(n, false, budget)?)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}\"];\n",
                self.vertices[e.src], self.vertices[e.dst], e.id
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// A depth-n truncation of the (q+1)-regular tree around a finite base tree:
/// pendant subtrees are grown until every vertex closer than depth n has
/// total degree q+1, and the distance to the base is recorded per vertex.
#[derive(Debug, Clone)]
pub struct TreeBall {
    graph: DirectedGraph,
    q: usize,
    depth: usize,
    dist: Vec<usize>,
    base_vertex_count: usize,
    base_edge_count: usize,
}

impl TreeBall {
    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// d(v, base) for every vertex, indexed like the grown graph's vertices.
    pub fn distances(&self) -> &[usize] {
        &self.dist
    }

    pub fn distance(&self, v: usize) -> Result<usize, GraphError> {
        self.dist.get(v).copied().ok_or(GraphError::VertexRange(v))
    }

    pub fn base_vertex_count(&self) -> usize {
        self.base_vertex_count
    }

    pub fn base_edge_count(&self) -> usize {
        self.base_edge_count
    }

    pub fn is_base_vertex(&self, v: usize) -> bool {
        v < self.base_vertex_count
    }

    /// Whether an oriented edge lies in the base tree (either orientation).
    pub fn is_base_edge(&self, oriented: usize) -> bool {
        let e = self.graph.edge_count();
        let idx = if oriented < e { oriented } else { oriented - e };
        idx < self.base_edge_count
    }

    /// Children one step farther from the base.
    pub fn children(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for e in self.graph.edges() {
            if e.src == v && self.dist[e.dst] == self.dist[v] + 1 {
                out.push(e.dst);
            }
            if e.dst == v && self.dist[e.src] == self.dist[v] + 1 {
                out.push(e.src);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Grow pendant (q+1)-regular subtrees of depth n attached to a finite base
/// tree. Depth 0 returns the base unchanged. New vertices are labeled by
/// their path from the attachment point, so the result is canonical and
/// serializes stably.
pub fn tree_ball(base: &DirectedGraph, q: usize, depth: usize) -> Result<TreeBall, GraphError> {
    if !base.is_tree() {
        return Err(GraphError::NotATree {
            vertices: base.vertex_count(),
            edges: base.edge_count(),
            components: base.component_count(),
        });
    }
    grow_pendants(base, q, depth)
}

/// The same pendant growth on an arbitrary finite graph, modeling the
/// depth-n truncated neighborhood of the quotient graph (where closed walks
/// exist alongside the escaping ones).
pub fn quotient_ball(base: &DirectedGraph, q: usize, depth: usize) -> Result<TreeBall, GraphError> {
    grow_pendants(base, q, depth)
}

fn grow_pendants(base: &DirectedGraph, q: usize, depth: usize) -> Result<TreeBall, GraphError> {
    if q < 2 {
        return Err(GraphError::BadResidueCardinality(q));
    }
    let mut vertices = base.vertices().to_vec();
    let mut edges = base.edges().to_vec();
    let mut dist = vec![0usize; vertices.len()];
    let mut frontier: Vec<usize> = (0..vertices.len()).collect();
    for level in 1..=depth {
        let mut next = Vec::new();
        for &v in &frontier {
            let degree = edges
                .iter()
                .map(|e| usize::from(e.src == v) + usize::from(e.dst == v))
                .sum::<usize>();
            let missing = (q + 1).saturating_sub(degree);
            for k in 0..missing {
                let child_id = format!("{}/{}", vertices[v], k);
                let child = vertices.len();
                vertices.push(child_id.clone());
                dist.push(level);
                edges.push(EdgeRec {
                    id: child_id,
                    src: v,
                    dst: child,
                });
                next.push(child);
            }
        }
        frontier = next;
    }
    let graph = DirectedGraph::new(vertices, edges)?;
    Ok(TreeBall {
        graph,
        q,
        depth,
        dist,
        base_vertex_count: base.vertex_count(),
        base_edge_count: base.edge_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_edge_matrix_matches_print() {
        let g = DirectedGraph::mumford_genus2_preset(2).unwrap();
        let spec = g.directed_edge_matrix(true).unwrap();
        let expect: Vec<Vec<u8>> = vec![
            vec![0, 1, 0, 0, 0, 1],
            vec![1, 0, 1, 0, 0, 0],
            vec![0, 1, 0, 1, 0, 0],
            vec![0, 0, 1, 0, 1, 0],
            vec![0, 0, 0, 1, 0, 1],
            vec![1, 0, 0, 0, 1, 0],
        ];
        assert_eq!(spec.matrix(), &expect);
        assert_eq!(spec.alphabet().names(), &["a", "b", "c", "A", "B", "C"]);
    }

    #[test]
    fn dumbbell_edge_matrix_matches_print() {
        let g = DirectedGraph::mumford_genus2_preset(3).unwrap();
        let spec = g.directed_edge_matrix(true).unwrap();
        let expect: Vec<Vec<u8>> = vec![
            vec![0, 0, 1, 0, 0, 1],
            vec![1, 1, 0, 0, 0, 0],
            vec![0, 0, 1, 1, 0, 0],
            vec![0, 1, 0, 0, 1, 0],
            vec![1, 0, 0, 0, 1, 0],
            vec![0, 0, 0, 1, 0, 1],
        ];
        assert_eq!(spec.matrix(), &expect);
    }

    #[test]
    fn rose_matches_free_group_shift() {
        let g = DirectedGraph::mumford_genus2_preset(1).unwrap();
        let spec = g.directed_edge_matrix(true).unwrap();
        let free = SubshiftSpec::free_group(2).unwrap();
        assert_eq!(spec.matrix(), free.matrix());
    }

    #[test]
    fn theta_has_three_positive_edges_two_vertices() {
        let g = DirectedGraph::mumford_genus2_preset(2).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn dumbbell_betti_number_two() {
        let g = DirectedGraph::mumford_genus2_preset(3).unwrap();
        assert_eq!(g.first_betti(), 2);
    }

    #[test]
    fn single_loop_matrix() {
        let g = DirectedGraph::new(
            vec!["v".into()],
            vec![EdgeRec {
                id: "e".into(),
                src: 0,
                dst: 0,
            }],
        )
        .unwrap();
        let spec = g.directed_edge_matrix(true).unwrap();
        assert_eq!(spec.matrix(), &vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn block_symmetry_of_presets() {
        for case in 1..=3 {
            let g = DirectedGraph::mumford_genus2_preset(case).unwrap();
            let spec = g.directed_edge_matrix(true).unwrap();
            let a = spec.matrix();
            let e = g.edge_count();
            for i in 0..e {
                for j in 0..e {
                    assert_eq!(a[i][e + j], a[j][e + i], "α12 symmetric, case {case}");
                    assert_eq!(a[e + i][j], a[e + j][i], "α21 symmetric, case {case}");
                    assert_eq!(a[i][j], a[e + j][e + i], "α11 = α22ᵗ, case {case}");
                }
            }
        }
    }

    #[test]
    fn row_sum_counts_continuations() {
        for case in 1..=3 {
            let g = DirectedGraph::mumford_genus2_preset(case).unwrap();
            let spec = g.directed_edge_matrix(true).unwrap();
            for w in 0..g.oriented_count() {
                let out_deg_at_range = (0..g.oriented_count())
                    .filter(|&x| g.source(x) == g.range(w))
                    .count();
                let inv_departs = usize::from(g.source(g.involution(w)) == g.range(w));
                assert_eq!(spec.out_degree(w), out_deg_at_range - inv_departs);
            }
        }
    }

    #[test]
    fn sink_rejected_when_requested() {
        // a lone positive edge u -> v leaves v without outgoing positive edge
        let g = DirectedGraph::new(
            vec!["u".into(), "v".into()],
            vec![EdgeRec {
                id: "e".into(),
                src: 0,
                dst: 1,
            }],
        )
        .unwrap();
        assert_eq!(
            g.directed_edge_matrix(true),
            Err(GraphError::Sink("v".into()))
        );
        assert!(g.directed_edge_matrix(false).is_ok());
        let theta = DirectedGraph::mumford_genus2_preset(2).unwrap();
        assert!(theta.directed_edge_matrix(true).is_ok());
    }

    #[test]
    fn walk_counts_on_presets() {
        let theta = DirectedGraph::mumford_genus2_preset(2).unwrap();
        assert_eq!(theta.walks(1, 1000).unwrap().len(), 6);
        assert_eq!(theta.walks(2, 1000).unwrap().len(), 12);
        let rose = DirectedGraph::mumford_genus2_preset(1).unwrap();
        assert_eq!(rose.walks(2, 1000).unwrap().len(), 12);
    }

    fn single_edge_tree() -> DirectedGraph {
        DirectedGraph::new(
            vec!["u".into(), "v".into()],
            vec![EdgeRec {
                id: "e".into(),
                src: 0,
                dst: 1,
            }],
        )
        .unwrap()
    }

    #[test]
    fn ball_depth_zero_is_base() {
        let base = single_edge_tree();
        let ball = tree_ball(&base, 3, 0).unwrap();
        assert_eq!(ball.graph(), &base);
        assert_eq!(ball.distances(), &[0, 0]);
    }

    #[test]
    fn ball_grows_to_regular_degree() {
        let base = single_edge_tree();
        let ball = tree_ball(&base, 2, 1).unwrap();
        // each endpoint had degree 1, gains q+1-1 = 2 pendant neighbors
        assert_eq!(ball.graph().vertex_count(), 6);
        assert_eq!(ball.graph().total_degree(0), 3);
        assert_eq!(ball.graph().total_degree(1), 3);
        let ball2 = tree_ball(&base, 2, 3).unwrap();
        assert!(ball2.graph().is_tree());
        for v in 0..ball2.graph().vertex_count() {
            let d = ball2.graph().total_degree(v);
            if ball2.distance(v).unwrap() < 3 {
                assert_eq!(d, 3, "interior vertex {v}");
            } else {
                assert_eq!(d, 1, "leaf {v}");
            }
        }
    }

    #[test]
    fn ball_nesting() {
        let base = single_edge_tree();
        let small = tree_ball(&base, 2, 1).unwrap();
        let large = tree_ball(&base, 2, 2).unwrap();
        let small_ids: std::collections::BTreeSet<_> =
            small.graph().vertices().iter().cloned().collect();
        let large_ids: std::collections::BTreeSet<_> =
            large.graph().vertices().iter().cloned().collect();
        assert!(small_ids.is_subset(&large_ids));
        // restriction of the larger ball to distance <= 1 equals the smaller
        let restricted: std::collections::BTreeSet<_> = large
            .graph()
            .vertices()
            .iter()
            .enumerate()
            .filter(|(v, _)| large.distance(*v).unwrap() <= 1)
            .map(|(_, id)| id.clone())
            .collect();
        assert_eq!(restricted, small_ids);
    }

    #[test]
    fn ball_rejects_non_tree() {
        let theta = DirectedGraph::mumford_genus2_preset(2).unwrap();
        assert!(matches!(
            tree_ball(&theta, 2, 1),
            Err(GraphError::NotATree { .. })
        ));
    }

    #[test]
    fn dot_export_lists_every_edge() {
        let g = DirectedGraph::mumford_genus2_preset(2).unwrap();
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph {"));
        for e in g.edges() {
            assert!(dot.contains(&format!("label=\"{}\"", e.id)));
        }
    }

    #[test]
    fn graph_json_roundtrip() {
        let g = DirectedGraph::mumford_genus2_preset(3).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        let back: DirectedGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }
}
