//! Decorated localization graphs.
//!
//! A graph records how a torus-fixed field decomposes into level-0, level-1
//! and level-infinity pieces: vertices are connected components of the fixed
//! curve at one level, edges are rational curves joining two levels, and legs
//! are the ordered markings.
//!
//! Graph values are never mutated in place; every surgery in this crate
//! builds a new graph. Construction does not validate, because violations
//! are reported as data by [`validate`].

use std::collections::BTreeSet;

use smallvec::SmallVec;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rat::Rat;

macro_rules! id_type {
    ($name:ident, $prefix:literal) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(VertexId, "v");
id_type!(EdgeId, "e");
id_type!(LegId, "l");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "inf")]
    Infinity,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::Zero, Level::One, Level::Infinity];
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Zero => "0",
            Level::One => "1",
            Level::Infinity => "inf",
        })
    }
}

/// Monodromy type of a marking.
///
/// `OnePhi` and `OneRho` are the two narrow refinements of the trivial
/// sector. `Broad` is the trivial sector with neither refinement; it only
/// arises for the string graph and is never produced by the enumerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Monodromy {
    #[serde(rename = "1phi")]
    OnePhi,
    #[serde(rename = "1rho")]
    OneRho,
    #[serde(rename = "m1")]
    M1,
    #[serde(rename = "m2")]
    M2,
    #[serde(rename = "broad")]
    Broad,
}

impl Monodromy {
    /// The integer `m` with `e^{2 pi i m / 3}` the monodromy.
    pub fn m(self) -> u32 {
        match self {
            Monodromy::OnePhi | Monodromy::OneRho | Monodromy::Broad => 0,
            Monodromy::M1 => 1,
            Monodromy::M2 => 2,
        }
    }

    pub fn allowed_at(self, level: Level) -> bool {
        match self {
            Monodromy::OneRho => level != Level::Infinity,
            Monodromy::OnePhi => level != Level::Zero,
            Monodromy::M1 | Monodromy::M2 | Monodromy::Broad => level == Level::Infinity,
        }
    }
}

impl fmt::Display for Monodromy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Monodromy::OnePhi => "1phi",
            Monodromy::OneRho => "1rho",
            Monodromy::M1 => "m1",
            Monodromy::M2 => "m2",
            Monodromy::Broad => "broad",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    #[serde(rename = "01")]
    E01,
    #[serde(rename = "1inf")]
    E1Inf,
    #[serde(rename = "0inf")]
    E0Inf,
}

impl EdgeClass {
    /// Levels of the (lower, higher) endpoints.
    pub fn levels(self) -> (Level, Level) {
        match self {
            EdgeClass::E01 => (Level::Zero, Level::One),
            EdgeClass::E1Inf => (Level::One, Level::Infinity),
            EdgeClass::E0Inf => (Level::Zero, Level::Infinity),
        }
    }

    pub fn between(a: Level, b: Level) -> Option<EdgeClass> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        match (lo, hi) {
            (Level::Zero, Level::One) => Some(EdgeClass::E01),
            (Level::One, Level::Infinity) => Some(EdgeClass::E1Inf),
            (Level::Zero, Level::Infinity) => Some(EdgeClass::E0Inf),
            _ => None,
        }
    }

    pub fn touches_infinity(self) -> bool {
        self != EdgeClass::E01
    }
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeClass::E01 => "01",
            EdgeClass::E1Inf => "1inf",
            EdgeClass::E0Inf => "0inf",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub id: VertexId,
    pub level: Level,
    pub genus: u32,
    /// Degree of `L1 (x) N` on the component.
    pub deg0: Rat,
    /// Degree of `N` on the component.
    pub deg_inf: Rat,
    pub stable: bool,
    pub hour: Option<u32>,
}

impl Vertex {
    /// An unstable (point) vertex: genus 0, trivial degrees.
    pub fn point(id: VertexId, level: Level) -> Vertex {
        Vertex { id, level, genus: 0, deg0: Rat::ZERO, deg_inf: Rat::ZERO, stable: false, hour: None }
    }

    pub fn stable(id: VertexId, level: Level, genus: u32) -> Vertex {
        Vertex { stable: true, genus, ..Vertex::point(id, level) }
    }

    pub fn d(&self) -> Rat {
        &self.deg0 - &self.deg_inf
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: EdgeId,
    /// The lower-level endpoint.
    pub end_a: VertexId,
    /// The higher-level endpoint.
    pub end_b: VertexId,
    pub class: EdgeClass,
    pub deg0: Rat,
    pub deg_inf: Rat,
    pub orbifold_at_inf: bool,
    pub special_at_inf: bool,
}

impl Edge {
    pub fn d(&self) -> Rat {
        &self.deg0 - &self.deg_inf
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.end_a == v || self.end_b == v
    }

    /// The endpoint opposite to `v`.
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.end_a == v {
            self.end_b
        } else {
            self.end_a
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Leg {
    pub id: LegId,
    pub vertex: VertexId,
    pub monodromy: Monodromy,
}

/// A decorated localization graph. Legs are ordered by their index in
/// [`DecoratedGraph::legs`], which is the leg's position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DecoratedGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    legs: Vec<Leg>,
    deg_l2: Rat,
}

impl DecoratedGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, legs: Vec<Leg>) -> DecoratedGraph {
        DecoratedGraph { vertices, edges, legs, deg_l2: Rat::ZERO }
    }

    /// Sets the degree of `L2`, which the graph decorations otherwise omit.
    pub fn with_deg_l2(mut self, deg_l2: Rat) -> DecoratedGraph {
        self.deg_l2 = deg_l2;
        self
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn legs(&self) -> &[Leg] {
        &self.legs
    }

    pub fn deg_l2(&self) -> &Rat {
        &self.deg_l2
    }

    pub fn into_parts(self) -> (Vec<Vertex>, Vec<Edge>, Vec<Leg>, Rat) {
        (self.vertices, self.edges, self.legs, self.deg_l2)
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty() && self.legs.is_empty()
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn leg(&self, id: LegId) -> Option<&Leg> {
        self.legs.iter().find(|l| l.id == id)
    }

    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().filter(move |e| e.touches(v))
    }

    pub fn legs_at(&self, v: VertexId) -> impl Iterator<Item = &Leg> + '_ {
        self.legs.iter().filter(move |l| l.vertex == v)
    }

    /// Number of edge-ends at `v` (a self-loop counts twice).
    pub fn edge_count(&self, v: VertexId) -> usize {
        self.edges.iter().map(|e| (e.end_a == v) as usize + (e.end_b == v) as usize).sum()
    }

    pub fn leg_count(&self, v: VertexId) -> usize {
        self.legs_at(v).count()
    }

    /// Edge-ends plus legs at `v`.
    pub fn valency(&self, v: VertexId) -> usize {
        self.edge_count(v) + self.leg_count(v)
    }

    pub fn next_vertex_id(&self) -> VertexId {
        VertexId(self.vertices.iter().map(|v| v.id.0 + 1).max().unwrap_or(0))
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.iter().map(|e| e.id.0 + 1).max().unwrap_or(0))
    }

    pub fn next_leg_id(&self) -> LegId {
        LegId(self.legs.iter().map(|l| l.id.0 + 1).max().unwrap_or(0))
    }

    /// Union-find over vertex positions; edges with dangling ends are
    /// ignored. Returns the root position of every vertex.
    pub(crate) fn component_roots(&self) -> SmallVec<[usize; 16]> {
        let n = self.vertices.len();
        let index = |id: VertexId| self.vertices.iter().position(|v| v.id == id);
        let mut parent: SmallVec<[usize; 16]> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            if let (Some(a), Some(b)) = (index(e.end_a), index(e.end_b)) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        for i in 0..n {
            parent[i] = find(&mut parent, i);
        }
        parent
    }

    /// Connected components as sorted vertex-id lists, ordered by their
    /// smallest vertex id. Edges with dangling ends are ignored.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let roots = self.component_roots();
        let mut groups: Vec<(usize, Vec<VertexId>)> = Vec::new();
        for (i, &r) in roots.iter().enumerate() {
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, g)) => g.push(self.vertices[i].id),
                None => groups.push((r, vec![self.vertices[i].id])),
            }
        }
        let mut out: Vec<Vec<VertexId>> = groups
            .into_iter()
            .map(|(_, mut g)| {
                g.sort();
                g
            })
            .collect();
        out.sort();
        out
    }

    pub fn component_count(&self) -> usize {
        self.component_roots().iter().enumerate().filter(|&(i, &r)| i == r).count()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// First Betti number `|E| - |V| + #components`.
    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + self.component_count() as i64
    }

    /// The subgraph spanned by `keep` together with all edges and legs whose
    /// ends lie in it. Leg order is preserved.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> DecoratedGraph {
        self.induced_by(|v| keep.contains(&v))
    }

    /// As [`DecoratedGraph::induced`], with the vertex set given by a
    /// predicate.
    pub fn induced_by(&self, keep: impl Fn(VertexId) -> bool) -> DecoratedGraph {
        DecoratedGraph {
            vertices: self.vertices.iter().filter(|v| keep(v.id)).cloned().collect(),
            edges: self.edges.iter().filter(|e| keep(e.end_a) && keep(e.end_b)).cloned().collect(),
            legs: self.legs.iter().filter(|l| keep(l.vertex)).copied().collect(),
            deg_l2: self.deg_l2.clone(),
        }
    }

    pub(crate) fn vertices_mut(&mut self) -> &mut Vec<Vertex> {
        &mut self.vertices
    }

    pub(crate) fn edges_mut(&mut self) -> &mut Vec<Edge> {
        &mut self.edges
    }

    pub(crate) fn legs_mut(&mut self) -> &mut Vec<Leg> {
        &mut self.legs
    }
}

/// Incremental construction with automatically assigned ids.
///
/// ```
/// use msp_localization::graph::{GraphBuilder, Level, Monodromy};
/// use msp_localization::rat::Rat;
///
/// let mut b = GraphBuilder::new();
/// let v0 = b.point(Level::Zero);
/// let vi = b.point(Level::Infinity);
/// b.e0inf(v0, vi, Rat::int(1));
/// b.leg(vi, Monodromy::OnePhi);
/// let g = b.build();
/// assert!(msp_localization::graph::validate(&g).is_valid());
/// ```
#[derive(Debug, Default)]
pub struct GraphBuilder {
    graph: DecoratedGraph,
}

impl GraphBuilder {
    pub fn new() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn vertex(&mut self, mut v: Vertex) -> VertexId {
        v.id = self.graph.next_vertex_id();
        let id = v.id;
        self.graph.vertices.push(v);
        id
    }

    pub fn point(&mut self, level: Level) -> VertexId {
        self.vertex(Vertex::point(VertexId(0), level))
    }

    pub fn stable(&mut self, level: Level, genus: u32) -> VertexId {
        self.vertex(Vertex::stable(VertexId(0), level, genus))
    }

    /// Adds an edge between vertices of different levels. The edge is
    /// oriented by level; both flags are taken as given.
    pub fn edge(
        &mut self,
        a: VertexId,
        b: VertexId,
        deg0: Rat,
        deg_inf: Rat,
        orbifold_at_inf: bool,
        special_at_inf: bool,
    ) -> EdgeId {
        let la = self.graph.vertex(a).expect("unknown vertex").level;
        let lb = self.graph.vertex(b).expect("unknown vertex").level;
        let class = EdgeClass::between(la, lb).expect("edge must join two distinct levels");
        let (end_a, end_b) = if la <= lb { (a, b) } else { (b, a) };
        let id = self.graph.next_edge_id();
        self.graph.edges.push(Edge { id, end_a, end_b, class, deg0, deg_inf, orbifold_at_inf, special_at_inf });
        id
    }

    /// E01 edge of degree `d`.
    pub fn e01(&mut self, a: VertexId, b: VertexId, d: Rat) -> EdgeId {
        self.edge(a, b, d, Rat::ZERO, false, false)
    }

    /// E1Inf edge of degree `d < 0`; the orbifold flag follows the
    /// denominator of `d`.
    pub fn e1inf(&mut self, a: VertexId, b: VertexId, d: Rat, special: bool) -> EdgeId {
        let orbifold = !d.is_integer();
        self.edge(a, b, Rat::ZERO, -d, orbifold, special)
    }

    /// E0Inf edge with `deg0 = degInf = d`.
    pub fn e0inf(&mut self, a: VertexId, b: VertexId, d: Rat) -> EdgeId {
        self.edge(a, b, d.clone(), d, false, true)
    }

    pub fn leg(&mut self, v: VertexId, monodromy: Monodromy) -> LegId {
        let id = self.graph.next_leg_id();
        self.graph.legs.push(Leg { id, vertex: v, monodromy });
        id
    }

    pub fn deg_l2(&mut self, d: Rat) -> &mut Self {
        self.graph.deg_l2 = d;
        self
    }

    pub fn build(self) -> DecoratedGraph {
        self.graph
    }
}

// ---------------------------------------------------------------------------
// Validation

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementRef {
    Graph,
    Vertex(VertexId),
    Edge(EdgeId),
    Leg(LegId),
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementRef::Graph => f.write_str("graph"),
            ElementRef::Vertex(v) => v.fmt(f),
            ElementRef::Edge(e) => e.fmt(f),
            ElementRef::Leg(l) => l.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    DuplicateId,
    DanglingReference,
    EndpointLevels,
    DenominatorNotThird,
    E01DegreeNotPositive,
    E01DegreeNotIntegral,
    E01TwistsN,
    E1InfDegreeNotNegative,
    E1InfDegreeDenominator,
    E1InfTwistsL1N,
    E0InfDegreeNotBalanced,
    E0InfDegInfNotPositive,
    E0InfDegInfNotIntegral,
    E0InfOrbifold,
    E0InfNotSpecial,
    FlagsAwayFromInfinity,
    OrbifoldNotSpecial,
    SpecialFlagMismatch,
    OrbifoldFlagMismatch,
    UnstableGenus,
    UnstableDegree,
    UnstableValency,
    LevelDegree,
    LegLevel,
    HourPartial,
    HourZero,
    DegL2,
}

impl Rule {
    pub fn message(self) -> &'static str {
        match self {
            Rule::DuplicateId => "duplicate id",
            Rule::DanglingReference => "references a missing vertex",
            Rule::EndpointLevels => "endpoint levels do not match the edge class",
            Rule::DenominatorNotThird => "degree denominator must divide 3",
            Rule::E01DegreeNotPositive => "E01 degree must be positive",
            Rule::E01DegreeNotIntegral => "E01 degree must be an integer",
            Rule::E01TwistsN => "E01 edge must have degInf = 0",
            Rule::E1InfDegreeNotNegative => "E1Inf degree must be negative",
            Rule::E1InfDegreeDenominator => {
                "E1Inf degree must be integral exactly when the infinity end is a scheme point"
            }
            Rule::E1InfTwistsL1N => "E1Inf edge must have deg0 = 0",
            Rule::E0InfDegreeNotBalanced => "E0Inf edge must have deg0 = degInf",
            Rule::E0InfDegInfNotPositive => "E0Inf degInf must be positive",
            Rule::E0InfDegInfNotIntegral => "E0Inf degInf must be an integer",
            Rule::E0InfOrbifold => "E0Inf edges have scheme points at infinity",
            Rule::E0InfNotSpecial => "E0Inf edge must end in a node or marking at infinity",
            Rule::FlagsAwayFromInfinity => "infinity-end flags set on an E01 edge",
            Rule::OrbifoldNotSpecial => "orbifold infinity end must be a node or marking",
            Rule::SpecialFlagMismatch => {
                "specialAtInf must hold exactly when the infinity end is stable or has valency >= 2"
            }
            Rule::OrbifoldFlagMismatch => {
                "edges and markings at an unstable infinity vertex disagree on orbifold structure"
            }
            Rule::UnstableGenus => "unstable vertex must have genus 0",
            Rule::UnstableDegree => "unstable vertex must have zero degrees",
            Rule::UnstableValency => "unstable vertex must have valency 1 or 2",
            Rule::LevelDegree => "vertex degrees incompatible with its level",
            Rule::LegLevel => "monodromy not allowed at this level",
            Rule::HourPartial => "hour must be present on every vertex or on none",
            Rule::HourZero => "hour must be at least 1",
            Rule::DegL2 => "degL2 must be a non-negative integer",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub element: ElementRef,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.rule)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

fn thirds(r: &Rat) -> bool {
    r.denominator_divides(3)
}

/// Checks every decoration constraint and returns all violations.
pub fn validate(graph: &DecoratedGraph) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |element, rule| out.push(Violation { element, rule });

    for (i, v) in graph.vertices.iter().enumerate() {
        if graph.vertices[..i].iter().any(|w| w.id == v.id) {
            push(ElementRef::Vertex(v.id), Rule::DuplicateId);
        }
    }
    for (i, e) in graph.edges.iter().enumerate() {
        if graph.edges[..i].iter().any(|f| f.id == e.id) {
            push(ElementRef::Edge(e.id), Rule::DuplicateId);
        }
    }
    for (i, l) in graph.legs.iter().enumerate() {
        if graph.legs[..i].iter().any(|k| k.id == l.id) {
            push(ElementRef::Leg(l.id), Rule::DuplicateId);
        }
    }

    if !graph.deg_l2.is_integer() || graph.deg_l2.is_negative() {
        push(ElementRef::Graph, Rule::DegL2);
    }

    let hours = graph.vertices.iter().filter(|v| v.hour.is_some()).count();
    if hours != 0 && hours != graph.vertices.len() {
        push(ElementRef::Graph, Rule::HourPartial);
    }

    for v in &graph.vertices {
        let at = ElementRef::Vertex(v.id);
        if v.hour == Some(0) {
            push(at, Rule::HourZero);
        }
        if !thirds(&v.deg0) || !thirds(&v.deg_inf) {
            push(at, Rule::DenominatorNotThird);
        }
        let level_ok = match v.level {
            Level::Zero => v.deg_inf.is_zero() && v.deg0.is_integer() && !v.deg0.is_negative(),
            Level::One => v.deg0.is_zero() && v.deg_inf.is_zero(),
            Level::Infinity => v.deg0.is_zero(),
        };
        if !level_ok {
            push(at, Rule::LevelDegree);
        }
        if !v.stable {
            if v.genus != 0 {
                push(at, Rule::UnstableGenus);
            }
            if !v.deg0.is_zero() || !v.deg_inf.is_zero() {
                push(at, Rule::UnstableDegree);
            }
            let val = graph.valency(v.id);
            if !(1..=2).contains(&val) {
                push(at, Rule::UnstableValency);
            }
        }
    }

    for e in &graph.edges {
        let at = ElementRef::Edge(e.id);
        let (a, b) = match (graph.vertex(e.end_a), graph.vertex(e.end_b)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                push(at, Rule::DanglingReference);
                continue;
            }
        };
        if (a.level, b.level) != e.class.levels() {
            push(at, Rule::EndpointLevels);
        }
        if !thirds(&e.deg0) || !thirds(&e.deg_inf) {
            push(at, Rule::DenominatorNotThird);
        }
        let d = e.d();
        match e.class {
            EdgeClass::E01 => {
                if !d.is_positive() {
                    push(at, Rule::E01DegreeNotPositive);
                }
                if !d.is_integer() {
                    push(at, Rule::E01DegreeNotIntegral);
                }
                if !e.deg_inf.is_zero() {
                    push(at, Rule::E01TwistsN);
                }
                if e.orbifold_at_inf || e.special_at_inf {
                    push(at, Rule::FlagsAwayFromInfinity);
                }
            }
            EdgeClass::E1Inf => {
                if !d.is_negative() {
                    push(at, Rule::E1InfDegreeNotNegative);
                }
                if d.is_integer() == e.orbifold_at_inf {
                    push(at, Rule::E1InfDegreeDenominator);
                }
                if !e.deg0.is_zero() {
                    push(at, Rule::E1InfTwistsL1N);
                }
            }
            EdgeClass::E0Inf => {
                if !d.is_zero() {
                    push(at, Rule::E0InfDegreeNotBalanced);
                }
                if !e.deg_inf.is_positive() {
                    push(at, Rule::E0InfDegInfNotPositive);
                }
                if !e.deg_inf.is_integer() {
                    push(at, Rule::E0InfDegInfNotIntegral);
                }
                if e.orbifold_at_inf {
                    push(at, Rule::E0InfOrbifold);
                }
                if !e.special_at_inf {
                    push(at, Rule::E0InfNotSpecial);
                }
            }
        }
        if e.class.touches_infinity() {
            if e.orbifold_at_inf && !e.special_at_inf {
                push(at, Rule::OrbifoldNotSpecial);
            }
            if b.level == Level::Infinity {
                let special = b.stable || graph.valency(b.id) >= 2;
                if special != e.special_at_inf {
                    push(at, Rule::SpecialFlagMismatch);
                }
            }
        }
    }

    // Orbifold structure is a property of the point, so every branch through
    // an unstable infinity vertex must agree.
    for v in graph.vertices.iter().filter(|v| !v.stable && v.level == Level::Infinity) {
        let mut flags = graph
            .incident_edges(v.id)
            .filter(|e| e.class.touches_infinity())
            .map(|e| e.orbifold_at_inf)
            .chain(graph.legs_at(v.id).map(|l| matches!(l.monodromy, Monodromy::M1 | Monodromy::M2)));
        if let Some(first) = flags.next() {
            if flags.any(|f| f != first) {
                push(ElementRef::Vertex(v.id), Rule::OrbifoldFlagMismatch);
            }
        }
    }

    for l in &graph.legs {
        let at = ElementRef::Leg(l.id);
        match graph.vertex(l.vertex) {
            None => push(at, Rule::DanglingReference),
            Some(v) => {
                if !l.monodromy.allowed_at(v.level) {
                    push(at, Rule::LegLevel);
                }
            }
        }
    }

    ValidationReport { violations: out }
}

// ---------------------------------------------------------------------------
// Aggregates and classification

/// `sum g_v + h^1`. The result is meaningful for valid graphs, where the
/// Betti number is non-negative.
pub fn total_genus(graph: &DecoratedGraph) -> u32 {
    let local: u64 = graph.vertices.iter().map(|v| u64::from(v.genus)).sum();
    (local as i64 + graph.betti()) as u32
}

/// Componentwise sum of `(deg0, degInf)` over vertices and edges.
pub fn total_degree(graph: &DecoratedGraph) -> (Rat, Rat) {
    let v0: Rat = graph.vertices.iter().map(|v| &v.deg0).sum();
    let vi: Rat = graph.vertices.iter().map(|v| &v.deg_inf).sum();
    let e0: Rat = graph.edges.iter().map(|e| &e.deg0).sum();
    let ei: Rat = graph.edges.iter().map(|e| &e.deg_inf).sum();
    (v0 + e0, vi + ei)
}

pub fn monodromy_vector(graph: &DecoratedGraph) -> Vec<Monodromy> {
    graph.legs.iter().map(|l| l.monodromy).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Classification {
    pub is_flat: bool,
    pub is_regular: bool,
    pub is_pure_loop: bool,
}

pub fn is_regular(graph: &DecoratedGraph) -> bool {
    graph.edges.iter().all(|e| e.class != EdgeClass::E0Inf)
}

pub fn is_pure_loop(graph: &DecoratedGraph) -> bool {
    !graph.vertices.is_empty()
        && graph.legs.is_empty()
        && graph.vertices.iter().all(|v| !v.stable && graph.edge_count(v.id) == 2)
}

pub fn classify(graph: &DecoratedGraph) -> Classification {
    Classification {
        is_flat: crate::flatten::is_flat(graph),
        is_regular: is_regular(graph),
        is_pure_loop: is_pure_loop(graph),
    }
}
