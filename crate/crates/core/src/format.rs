//! The JSON graph file format.
//!
//! ```json
//! {"vertices":[{"id":0,"level":"0","genus":0,"deg0":"0","degInf":"0","stable":true}],
//!  "edges":[],
//!  "legs":[{"id":0,"vertex":0,"position":0,"monodromy":"1rho"}]}
//! ```
//!
//! Rationals are strings, an optional `"degL2"` key carries the degree of
//! `L2`, and unknown keys are rejected. Writing always produces the compact
//! form with legs listed in position order, so parsing and re-writing that
//! output is byte-identical.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DecoratedGraph, Edge, EdgeClass, EdgeId, Leg, LegId, Level, Monodromy, Vertex, VertexId};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("{path}: {message}")]
    Json { path: String, message: String },
    #[error("legs[{index}].position: duplicate position {position}")]
    DuplicatePosition { index: usize, position: u32 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    edges: Vec<EdgeDoc>,
    legs: Vec<LegDoc>,
    #[serde(default, skip_serializing_if = "Rat::is_zero")]
    deg_l2: Rat,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct VertexDoc {
    id: VertexId,
    level: Level,
    genus: u32,
    deg0: Rat,
    deg_inf: Rat,
    stable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hour: Option<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct EdgeDoc {
    id: EdgeId,
    end_a: VertexId,
    end_b: VertexId,
    class: EdgeClass,
    deg0: Rat,
    deg_inf: Rat,
    orbifold_at_inf: bool,
    special_at_inf: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LegDoc {
    id: LegId,
    vertex: VertexId,
    position: u32,
    monodromy: Monodromy,
}

fn to_doc(graph: &DecoratedGraph) -> GraphDoc {
    GraphDoc {
        vertices: graph
            .vertices()
            .iter()
            .map(|v| VertexDoc {
                id: v.id,
                level: v.level,
                genus: v.genus,
                deg0: v.deg0.clone(),
                deg_inf: v.deg_inf.clone(),
                stable: v.stable,
                hour: v.hour,
            })
            .collect(),
        edges: graph
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                id: e.id,
                end_a: e.end_a,
                end_b: e.end_b,
                class: e.class,
                deg0: e.deg0.clone(),
                deg_inf: e.deg_inf.clone(),
                orbifold_at_inf: e.orbifold_at_inf,
                special_at_inf: e.special_at_inf,
            })
            .collect(),
        legs: graph
            .legs()
            .iter()
            .enumerate()
            .map(|(i, l)| LegDoc { id: l.id, vertex: l.vertex, position: i as u32, monodromy: l.monodromy })
            .collect(),
        deg_l2: graph.deg_l2().clone(),
    }
}

fn from_doc(doc: GraphDoc) -> Result<DecoratedGraph, FormatError> {
    let mut legs: Vec<(usize, LegDoc)> = doc.legs.into_iter().enumerate().collect();
    legs.sort_by_key(|(_, l)| l.position);
    if let Some(w) = legs.windows(2).find(|w| w[0].1.position == w[1].1.position) {
        return Err(FormatError::DuplicatePosition { index: w[0].0.max(w[1].0), position: w[1].1.position });
    }
    let vertices = doc
        .vertices
        .into_iter()
        .map(|v| Vertex {
            id: v.id,
            level: v.level,
            genus: v.genus,
            deg0: v.deg0,
            deg_inf: v.deg_inf,
            stable: v.stable,
            hour: v.hour,
        })
        .collect();
    let edges = doc
        .edges
        .into_iter()
        .map(|e| Edge {
            id: e.id,
            end_a: e.end_a,
            end_b: e.end_b,
            class: e.class,
            deg0: e.deg0,
            deg_inf: e.deg_inf,
            orbifold_at_inf: e.orbifold_at_inf,
            special_at_inf: e.special_at_inf,
        })
        .collect();
    let legs = legs.into_iter().map(|(_, l)| Leg { id: l.id, vertex: l.vertex, monodromy: l.monodromy }).collect();
    Ok(DecoratedGraph::new(vertices, edges, legs).with_deg_l2(doc.deg_l2))
}

pub fn parse_graph(text: &str) -> Result<DecoratedGraph, FormatError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: GraphDoc = serde_path_to_error::deserialize(de)
        .map_err(|e| FormatError::Json { path: e.path().to_string(), message: e.inner().to_string() })?;
    from_doc(doc)
}

/// Compact single-line JSON.
pub fn write_graph(graph: &DecoratedGraph) -> String {
    serde_json::to_string(&to_doc(graph)).expect("graph documents always serialize")
}

pub fn write_graph_pretty(graph: &DecoratedGraph) -> String {
    serde_json::to_string_pretty(&to_doc(graph)).expect("graph documents always serialize")
}
