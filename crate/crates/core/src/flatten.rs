//! T-balanced nodes and flattening.
//!
//! A level-1 point where an E01 edge of degree `d` meets an E1Inf edge of
//! degree `-d` whose infinity end is a node or marking has tangent weights
//! summing to zero. Such a node is not a genuine fixed-locus boundary, and
//! flattening merges the two edges into a single E0Inf edge.

use thiserror::Error;

use crate::graph::{validate, DecoratedGraph, Edge, EdgeClass, Level, ValidationReport, VertexId};
use crate::weights::{edge_tangent_weights, WeightError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlattenError {
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
    #[error("not a candidate node: {0} is not an unstable vertex with exactly two edges")]
    NotCandidate(VertexId),
    #[error("vertex {0} is not T-balanced")]
    NotBalanced(VertexId),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("invalid graph: {}", .0.violations.first().map(|v| v.to_string()).unwrap_or_default())]
    Invalid(ValidationReport),
}

fn candidate_edges(graph: &DecoratedGraph, v: VertexId) -> Result<(&Edge, &Edge), FlattenError> {
    let vertex = graph.vertex(v).ok_or(FlattenError::UnknownVertex(v))?;
    let mut it = graph.incident_edges(v);
    match (vertex.stable, it.next(), it.next(), it.next()) {
        (false, Some(e), Some(f), None) if e.end_a != e.end_b && f.end_a != f.end_b => Ok((e, f)),
        _ => Err(FlattenError::NotCandidate(v)),
    }
}

/// Whether `v` is a candidate node, i.e. unstable with exactly two edges.
pub fn is_candidate(graph: &DecoratedGraph, v: VertexId) -> bool {
    candidate_edges(graph, v).is_ok()
}

/// The degree criterion for a T-balanced node.
pub fn is_t_balanced(graph: &DecoratedGraph, v: VertexId) -> Result<bool, FlattenError> {
    let (e, f) = candidate_edges(graph, v)?;
    let level = graph.vertex(v).map(|x| x.level);
    let (e01, e1inf) = match (e.class, f.class) {
        (EdgeClass::E01, EdgeClass::E1Inf) => (e, f),
        (EdgeClass::E1Inf, EdgeClass::E01) => (f, e),
        _ => return Ok(false),
    };
    Ok(level == Some(Level::One) && (e01.d() + e1inf.d()).is_zero() && e1inf.special_at_inf)
}

/// Independent check: the two tangent weights at `v` cancel.
pub fn balance_oracle(graph: &DecoratedGraph, v: VertexId) -> Result<bool, FlattenError> {
    let (e, f) = candidate_edges(graph, v)?;
    let at = |edge: &Edge| -> Result<_, FlattenError> {
        let w = edge_tangent_weights(edge)?;
        Ok(if edge.end_a == v { w.at_low } else { w.at_inf_or_high })
    };
    Ok((at(e)? + at(f)?).is_zero())
}

pub fn balanced_vertices(graph: &DecoratedGraph) -> Vec<VertexId> {
    graph.vertices().iter().map(|v| v.id).filter(|&v| matches!(is_t_balanced(graph, v), Ok(true))).collect()
}

pub fn is_flat(graph: &DecoratedGraph) -> bool {
    graph.vertices().iter().all(|v| !matches!(is_t_balanced(graph, v.id), Ok(true)))
}

/// Replaces one balanced vertex by an E0Inf edge joining the outer ends.
/// The new edge takes the next free id and is appended to the edge list.
pub fn flatten_vertex(graph: &DecoratedGraph, v: VertexId) -> Result<DecoratedGraph, FlattenError> {
    if !is_t_balanced(graph, v)? {
        return Err(FlattenError::NotBalanced(v));
    }
    let (e, f) = candidate_edges(graph, v)?;
    let (e01, e1inf) = if e.class == EdgeClass::E01 { (e, f) } else { (f, e) };
    let (removed, kept) = (e01.id, e1inf.id);
    let merged = Edge {
        id: graph.next_edge_id(),
        end_a: e01.end_a,
        end_b: e1inf.end_b,
        class: EdgeClass::E0Inf,
        deg0: e1inf.deg_inf.clone(),
        deg_inf: e1inf.deg_inf.clone(),
        orbifold_at_inf: false,
        special_at_inf: e1inf.special_at_inf,
    };
    let mut out = graph.clone();
    out.vertices_mut().retain(|x| x.id != v);
    out.edges_mut().retain(|x| x.id != removed && x.id != kept);
    out.edges_mut().push(merged);
    Ok(out)
}

/// Flattens every balanced vertex, in vertex order.
pub fn flatten(graph: &DecoratedGraph) -> Result<DecoratedGraph, FlattenError> {
    let report = validate(graph);
    if !report.is_valid() {
        return Err(FlattenError::Invalid(report));
    }
    let mut g = graph.clone();
    while let Some(&v) = balanced_vertices(&g).first() {
        g = flatten_vertex(&g, v)?;
    }
    Ok(g)
}
