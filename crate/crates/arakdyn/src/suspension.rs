//! The mapping torus of a walk shift, its projection onto the geometric
//! realization of the underlying graph, fibers of that projection, and the
//! classification of walks in a truncated tree neighborhood.
//!
//! Infinite walks are represented by finite windows (optionally cyclic, in
//! which case the window is one period); every statement is checked at
//! window scale.

use crate::graph::{DirectedGraph, TreeBall};
use crate::symbolic::{SubshiftSpec, SymbolicError, Word};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SuspensionError {
    #[error("window index {idx} outside the finite window 0..{len}")]
    OutsideWindow { idx: i64, len: usize },
    #[error("edge parameter t={0} outside [0,1)")]
    BadParameter(f64),
    #[error("oriented edge {0} is not an edge of the graph")]
    UnknownEdge(usize),
    #[error("walk re-enters the base through a pendant branch, which cannot happen in a tree")]
    MalformedWalk,
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// A point of the mapping torus: an admissible word with a marked origin
/// index and a flow parameter, kept in the canonical form t ∈ [0,1) under
/// the identification (ω, 1) ~ (Tω, 0).
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    word: Word,
    origin: i64,
    t: f64,
}

impl TorusPoint {
    /// Build a point, folding whole flow units into the origin so that the
    /// stored parameter lies in [0,1).
    pub fn new(word: Word, origin: i64, t: f64) -> Result<Self, SuspensionError> {
        if !t.is_finite() {
            return Err(SuspensionError::BadParameter(t));
        }
        let shift = t.floor();
        let mut point = TorusPoint {
            word,
            origin: origin + shift as i64,
            t: t - shift,
        };
        if point.t >= 1.0 {
            // guard against floating fold-over at the seam
            point.origin += 1;
            point.t = 0.0;
        }
        Ok(point)
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// The letter at offset k from the origin (cyclic words wrap; finite
    /// windows reject out-of-range access).
    pub fn letter_at(&self, k: i64) -> Result<usize, SuspensionError> {
        let idx = self.origin + k;
        if self.word.is_cyclic() {
            Ok(self.word.letter_mod(idx))
        } else {
            let len = self.word.len();
            if idx < 0 || idx >= len as i64 {
                return Err(SuspensionError::OutsideWindow { idx, len });
            }
            Ok(self.word.letters()[idx as usize])
        }
    }

    /// The shift T acts by advancing the origin.
    pub fn shifted(&self) -> TorusPoint {
        TorusPoint {
            word: self.word.clone(),
            origin: self.origin + 1,
            t: self.t,
        }
    }
}

/// A point of the geometric realization of the graph: an oriented edge with
/// a parameter along it. The reversal reparameterizes by t ↦ 1-t.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgePoint {
    pub oriented: usize,
    pub t: f64,
}

/// Evaluate the projection of the suspension at flow time τ = steps + t
/// from the marked origin: the oriented edge at index ⌊τ⌋ with parameter
/// τ - ⌊τ⌋. Splitting τ into an integer part and t ∈ [0,1) keeps the
/// defining identity eval(Tω, τ) = eval(ω, τ+1) exact rather than
/// up-to-rounding.
pub fn eval_projection_at(
    graph: &DirectedGraph,
    point: &TorusPoint,
    steps: i64,
    t: f64,
) -> Result<EdgePoint, SuspensionError> {
    if !(0.0..1.0).contains(&t) {
        return Err(SuspensionError::BadParameter(t));
    }
    let oriented = point.letter_at(steps)?;
    if oriented >= graph.oriented_count() {
        return Err(SuspensionError::UnknownEdge(oriented));
    }
    Ok(EdgePoint { oriented, t })
}

/// Evaluate at the point's own flow parameter.
pub fn eval_projection(
    graph: &DirectedGraph,
    point: &TorusPoint,
) -> Result<EdgePoint, SuspensionError> {
    eval_projection_at(graph, point, 0, point.t)
}

/// The fiber of the projection over an interior edge point: the cylinder of
/// walks reading the edge forward at the origin, at the same parameter,
/// together with the cylinder reading it backward, at the reflected
/// parameter. At the endpoints t ∈ {0, 1} the same formula applies but the
/// underlying point is a vertex, which several edges share.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberDescriptor {
    pub edge: EdgePoint,
    /// (oriented edge at the origin, flow parameter) pairs.
    pub cylinders: [(usize, f64); 2],
}

pub fn fiber(graph: &DirectedGraph, at: &EdgePoint) -> Result<FiberDescriptor, SuspensionError> {
    if at.oriented >= graph.oriented_count() {
        return Err(SuspensionError::UnknownEdge(at.oriented));
    }
    let reversed = graph.involution(at.oriented);
    Ok(FiberDescriptor {
        edge: at.clone(),
        cylinders: [(at.oriented, at.t), (reversed, 1.0 - at.t)],
    })
}

impl FiberDescriptor {
    /// Membership test for finite-window torus points.
    pub fn contains(&self, point: &TorusPoint) -> bool {
        let Ok(at_origin) = point.letter_at(0) else {
            return false;
        };
        self.cylinders
            .iter()
            .any(|&(edge, t)| at_origin == edge && point.t == t)
    }
}

/// Where a walk sits in the decomposition of the walk space of a truncated
/// tree neighborhood: confined to the base graph, wandering off along a
/// pendant branch in one or both time directions, or never meeting the
/// base at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkClass {
    Confined,
    EscapesForward,
    EscapesBackward,
    EscapesBoth,
    Disjoint,
}

/// Classify a finite-window walk in the quotient model of a tree ball.
/// Pendant subtrees of a tree admit no return to the base, so an admissible
/// window is a pendant prefix, a base middle, and a pendant suffix; any
/// other interleaving is rejected as malformed.
pub fn classify_walk(
    ball: &TreeBall,
    walk: &[usize],
    spec: &SubshiftSpec,
) -> Result<WalkClass, SuspensionError> {
    spec.validate_word(walk, false)?;
    let flags: Vec<bool> = walk.iter().map(|&w| ball.is_base_edge(w)).collect();
    if flags.iter().all(|&b| !b) {
        return Ok(WalkClass::Disjoint);
    }
    let first_base = flags.iter().position(|&b| b).unwrap();
    let last_base = flags.iter().rposition(|&b| b).unwrap();
    if flags[first_base..=last_base].iter().any(|&b| !b) {
        return Err(SuspensionError::MalformedWalk);
    }
    let leading = first_base > 0;
    let trailing = last_base + 1 < flags.len();
    Ok(match (leading, trailing) {
        (false, false) => WalkClass::Confined,
        (false, true) => WalkClass::EscapesForward,
        (true, false) => WalkClass::EscapesBackward,
        (true, true) => WalkClass::EscapesBoth,
    })
}

/// Canonical label of the closed geodesic traced by a cyclic word: the
/// lexicographically minimal rotation, labeling the shift orbit and hence
/// the conjugacy class it corresponds to.
pub fn orbit_geodesic_label(word: &Word) -> Result<Word, SymbolicError> {
    if !word.is_cyclic() {
        return Err(SymbolicError::NotCyclic);
    }
    Ok(word.minimal_rotation())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DirectedGraph;

    fn theta() -> (DirectedGraph, SubshiftSpec) {
        let g = DirectedGraph::mumford_genus2_preset(2).unwrap();
        let spec = g.directed_edge_matrix(true).unwrap();
        (g, spec)
    }

    #[test]
    fn eval_reads_the_marked_edge() {
        let (g, spec) = theta();
        let w = spec.word_from_names(&["a", "b"], true).unwrap();
        let p = TorusPoint::new(w, 0, 0.25).unwrap();
        let ep = eval_projection(&g, &p).unwrap();
        assert_eq!(ep.oriented, g.oriented_index("a").unwrap());
        assert_eq!(ep.t, 0.25);
    }

    #[test]
    fn eval_equivariance() {
        let (g, spec) = theta();
        let w = spec.word_from_names(&["a", "b", "a", "C"], true).unwrap();
        let p = TorusPoint::new(w, 0, 0.0).unwrap();
        for k in 0..50i64 {
            let t = (k as f64 * 0.137).fract();
            let lhs = eval_projection_at(&g, &p.shifted(), k, t).unwrap();
            let rhs = eval_projection_at(&g, &p, k + 1, t).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn canonical_form_is_well_defined_on_the_quotient() {
        let (g, spec) = theta();
        let w = spec.word_from_names(&["a", "b"], true).unwrap();
        // (ω, 1.0) must canonicalize to (Tω, 0.0) and project identically
        let seam = TorusPoint::new(w.clone(), 0, 1.0).unwrap();
        assert_eq!(seam.t, 0.0);
        assert_eq!(seam.origin, 1);
        let shifted = TorusPoint::new(w, 1, 0.0).unwrap();
        assert_eq!(
            eval_projection(&g, &seam).unwrap(),
            eval_projection(&g, &shifted).unwrap()
        );
    }

    #[test]
    fn fiber_formula_literal() {
        let (g, _) = theta();
        let a = g.oriented_index("a").unwrap();
        let f = fiber(
            &g,
            &EdgePoint {
                oriented: a,
                t: 0.3,
            },
        )
        .unwrap();
        assert_eq!(f.cylinders[0], (a, 0.3));
        assert_eq!(f.cylinders[1], (g.oriented_index("A").unwrap(), 1.0 - 0.3));
    }

    #[test]
    fn fiber_section_property() {
        let (g, spec) = theta();
        for word in spec.enumerate_words(3, false, 10_000).unwrap() {
            for k in 0..7 {
                let t = k as f64 / 7.0;
                let p = TorusPoint::new(word.clone(), 1, t).unwrap();
                let f = fiber(&g, &eval_projection(&g, &p).unwrap()).unwrap();
                assert!(f.contains(&p));
            }
        }
    }

    #[test]
    fn window_bounds_are_enforced() {
        let (g, spec) = theta();
        let w = spec.word_from_names(&["a", "b", "a"], false).unwrap();
        let p = TorusPoint::new(w, 0, 0.5).unwrap();
        assert!(eval_projection_at(&g, &p, 2, 0.5).is_ok());
        assert!(matches!(
            eval_projection_at(&g, &p, 3, 0.5),
            Err(SuspensionError::OutsideWindow { .. })
        ));
        assert!(matches!(
            eval_projection_at(&g, &p, -1, 0.5),
            Err(SuspensionError::OutsideWindow { .. })
        ));
    }

    #[test]
    fn classify_walks_in_a_ball() {
        use crate::graph::{tree_ball, EdgeRec};
        let base = DirectedGraph::new(
            vec!["u".into(), "v".into()],
            vec![EdgeRec {
                id: "e".into(),
                src: 0,
                dst: 1,
            }],
        )
        .unwrap();
        let ball = tree_ball(&base, 2, 2).unwrap();
        let spec = ball.graph().directed_edge_matrix(false).unwrap();
        let e = spec.alphabet().index_of("e").unwrap();
        // pendant edge leaving v and its deeper continuation
        let p1 = spec.alphabet().index_of("v/0").unwrap();
        let p2 = spec.alphabet().index_of("v/0/0").unwrap();
        let into_base = spec.alphabet().index_of("U/0").unwrap();
        assert_eq!(
            classify_walk(&ball, &[e], &spec).unwrap(),
            WalkClass::Confined
        );
        assert_eq!(
            classify_walk(&ball, &[e, p1, p2], &spec).unwrap(),
            WalkClass::EscapesForward
        );
        assert_eq!(
            classify_walk(&ball, &[into_base, e], &spec).unwrap(),
            WalkClass::EscapesBackward
        );
        assert_eq!(
            classify_walk(&ball, &[p1, p2], &spec).unwrap(),
            WalkClass::Disjoint
        );
        assert_eq!(
            classify_walk(&ball, &[into_base, e, p1], &spec).unwrap(),
            WalkClass::EscapesBoth
        );
    }

    #[test]
    fn classification_is_shift_invariant_on_confined_walks() {
        use crate::graph::quotient_ball;
        // growing a q=3 neighborhood of the theta graph leaves its closed
        // walks confined, whichever rotation represents them
        let theta = DirectedGraph::mumford_genus2_preset(2).unwrap();
        let ball = quotient_ball(&theta, 3, 2).unwrap();
        let spec = ball.graph().directed_edge_matrix(false).unwrap();
        let a = spec.alphabet().index_of("a").unwrap();
        let b = spec.alphabet().index_of("b").unwrap();
        let c_back = spec.alphabet().index_of("C").unwrap();
        let w = spec.word(vec![a, b, a, c_back], true).unwrap();
        for k in 0..4 {
            let rotated = w.shifted(k).unwrap();
            assert_eq!(
                classify_walk(&ball, rotated.letters(), &spec).unwrap(),
                WalkClass::Confined
            );
        }
    }

    #[test]
    fn orbit_labels() {
        let spec = crate::symbolic::SubshiftSpec::free_group(2).unwrap();
        let w = spec.word_from_names(&["g2", "g1"], true).unwrap();
        assert_eq!(
            orbit_geodesic_label(&w).unwrap(),
            spec.word_from_names(&["g1", "g2"], true).unwrap()
        );
        let v = spec.word_from_names(&["g1", "g1"], true).unwrap();
        assert_eq!(orbit_geodesic_label(&v).unwrap(), v);
    }

    #[test]
    fn orbit_label_count_matches_orbit_count() {
        let spec = crate::symbolic::SubshiftSpec::free_group(2).unwrap();
        for n in 1..=6usize {
            let mut labels = std::collections::BTreeSet::new();
            for w in spec.enumerate_words(n, true, 1_000_000).unwrap() {
                let aperiodic = (1..n).all(|k| w.shifted(k as i64).unwrap() != w);
                if aperiodic {
                    labels.insert(orbit_geodesic_label(&w).unwrap());
                }
            }
            assert_eq!(
                crate::exact::Int::from(labels.len()),
                spec.periodic_orbit_count(n as u64).unwrap()
            );
        }
    }
}
