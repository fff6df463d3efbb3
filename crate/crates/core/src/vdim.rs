//! Virtual dimensions of fixed loci.
//!
//! Three contributions are summed: deformations of the decorated curve
//! ([`dim_d`]), deformations of the sections `mu` and `nu` ([`chi_mu_nu`]) and
//! the Euler characteristic of the remaining fields ([`chi_fields`]). A closed
//! form ([`vdim_closed_form`]) collects the same quantity in terms of edges
//! and markings, and splits additively over maximal chains.

use smallvec::{smallvec, SmallVec};
use thiserror::Error;

use crate::graph::{is_pure_loop, total_genus, DecoratedGraph, EdgeId, Level, Monodromy, Vertex, VertexId};
use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VdimError {
    #[error("formula domain: {0}")]
    FormulaDomain(&'static str),
    #[error("no chain decomposition: the graph is a pure loop")]
    NoChainDecomposition,
    #[error("inconsistent decoration at {0}: a chain end must carry exactly one (1,phi) marking")]
    InconsistentDecoration(VertexId),
}

/// The formulas are derived for graphs without level-1 vertices and without
/// `m = 1` or `(1, rho)` markings.
pub fn check_domain(graph: &DecoratedGraph) -> Result<(), VdimError> {
    if graph.vertices().iter().any(|v| v.level == Level::One) {
        return Err(VdimError::FormulaDomain("level-1 vertices present"));
    }
    if graph.legs().iter().any(|l| matches!(l.monodromy, Monodromy::M1 | Monodromy::OneRho)) {
        return Err(VdimError::FormulaDomain("m = 1 or (1,rho) markings present"));
    }
    Ok(())
}

/// Whether `e` is a string: an E0Inf edge whose level-0 end is unstable and
/// carries no other edge.
pub fn is_string(graph: &DecoratedGraph, e: EdgeId) -> bool {
    let Some(edge) = graph.edge(e) else { return false };
    edge.class == crate::graph::EdgeClass::E0Inf
        && graph.vertex(edge.end_a).is_some_and(|v| !v.stable)
        && graph.edge_count(edge.end_a) == 1
}

/// Formula domain and no strings.
pub fn is_special_case(graph: &DecoratedGraph) -> bool {
    check_domain(graph).is_ok() && !graph.edges().iter().any(|e| is_string(graph, e.id))
}

pub fn dim_d(graph: &DecoratedGraph) -> Result<i64, VdimError> {
    check_domain(graph)?;
    let mut sum = 0i64;
    for v in graph.vertices().iter().filter(|v| v.stable) {
        let g = i64::from(v.genus);
        sum += 3 * g - 3 + graph.edge_count(v.id) as i64 + graph.leg_count(v.id) as i64;
        sum += 3 * g;
    }
    Ok(sum + 3 * graph.betti() - graph.edges().len() as i64 - 3)
}

pub fn chi_mu_nu(graph: &DecoratedGraph) -> i64 {
    graph.vertices().iter().filter(|v| v.level != Level::One).map(|v| 1 - i64::from(v.genus)).sum()
}

/// Euler characteristic of the fields, summed as four terms: the `(1,phi)`
/// correction, the `L1` and `L2` Riemann-Roch terms, and the term of the
/// remaining field. The degrees of `L1` and `L2` enter the last term with
/// the opposite sign to the middle two and cancel, so only the genus and
/// the markings are needed.
pub fn chi_fields(graph: &DecoratedGraph) -> Rat {
    let (mut phi, mut rho, mut m_total) = (0i64, 0i64, 0i64);
    for l in graph.legs() {
        match l.monodromy {
            Monodromy::OnePhi => phi += 1,
            Monodromy::OneRho => rho += 1,
            _ => {}
        }
        m_total += i64::from(l.monodromy.m());
    }
    let legs = graph.legs().len() as i64;
    let g = i64::from(total_genus(graph));
    let sigma_phi = -3 * phi;
    let l1 = 3 * (1 - g) - m_total;
    let l2 = 3 * (1 - g);
    let last = 2 * g - 2 + legs - rho + 1 - g;
    Rat::int(sigma_phi + l1 + l2 + last)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VdimBreakdown {
    pub dim_d: i64,
    pub chi_mu_nu: i64,
    pub chi_fields: Rat,
    pub total: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vdim {
    pub total: Rat,
    /// Absent only for pure loops through level 1, where the closed form
    /// still applies but the three-part sum does not.
    pub breakdown: Option<VdimBreakdown>,
}

pub fn breakdown(graph: &DecoratedGraph) -> Result<VdimBreakdown, VdimError> {
    let d = dim_d(graph)?;
    let m = chi_mu_nu(graph);
    let f = chi_fields(graph);
    let total = Rat::int(d + m) + &f;
    Ok(VdimBreakdown { dim_d: d, chi_mu_nu: m, chi_fields: f, total })
}

/// Virtual dimension: the three-part sum when the graph is in the formula
/// domain; for pure loops outside it, the closed form (which vanishes).
pub fn vdim(graph: &DecoratedGraph) -> Result<Vdim, VdimError> {
    match breakdown(graph) {
        Ok(b) => Ok(Vdim { total: b.total.clone(), breakdown: Some(b) }),
        Err(_) if is_pure_loop(graph) => Ok(Vdim { total: closed_form_unchecked(graph), breakdown: None }),
        Err(e) => Err(e),
    }
}

fn closed_form_unchecked(graph: &DecoratedGraph) -> Rat {
    let stable_edges: i64 = graph.vertices().iter().filter(|v| v.stable).map(|v| graph.edge_count(v.id) as i64).sum();
    let phi = graph.legs().iter().filter(|l| l.monodromy == Monodromy::OnePhi).count() as i64;
    let stable_inf_trivial = graph
        .legs()
        .iter()
        .filter(|l| l.monodromy.m() == 0)
        .filter(|l| graph.vertex(l.vertex).is_some_and(|v| v.stable && v.level == Level::Infinity))
        .count() as i64;
    let twisted: i64 =
        graph.legs().iter().filter(|l| l.monodromy.m() != 0).map(|l| i64::from(l.monodromy.m()) - 2).sum();
    let unstable = graph.vertices().iter().filter(|v| !v.stable).count() as i64;
    Rat::int(stable_edges - 2 * phi + stable_inf_trivial - twisted - 3 * (graph.edges().len() as i64 - unstable))
}

/// The closed form in terms of edges and markings.
pub fn vdim_closed_form(graph: &DecoratedGraph) -> Result<Rat, VdimError> {
    if !is_pure_loop(graph) {
        check_domain(graph)?;
    }
    Ok(closed_form_unchecked(graph))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainEnd {
    pub vertex: VertexId,
    pub stable: bool,
}

/// A maximal path of edges whose interior vertices are unstable with two
/// edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub edges: Vec<EdgeId>,
    pub inner: Vec<VertexId>,
    pub ends: (ChainEnd, ChainEnd),
}

fn passes_through(graph: &DecoratedGraph, v: VertexId) -> bool {
    graph.vertex(v).is_some_and(|x| !x.stable) && graph.edge_count(v) == 2
}

/// Walks every maximal chain in order of its smallest edge, handing the
/// visitor the edges, the inner vertices and the two ends. The buffers are
/// reused between chains.
fn walk_chains(
    graph: &DecoratedGraph,
    mut visit: impl FnMut(&[EdgeId], &[VertexId], VertexId, VertexId) -> Result<(), VdimError>,
) -> Result<(), VdimError> {
    type Buf<T> = SmallVec<[T; 8]>;
    let edges = graph.edges();
    let mut used: SmallVec<[bool; 16]> = smallvec![false; edges.len()];
    let (mut chain_edges, mut back_edges) = (Buf::<EdgeId>::new(), Buf::<EdgeId>::new());
    let (mut inner, mut back_inner) = (Buf::<VertexId>::new(), Buf::<VertexId>::new());
    // walk from `v` away along edge `from`, appending to the buffers
    let walk = |used: &mut [bool], es: &mut Buf<EdgeId>, vs: &mut Buf<VertexId>, mut v: VertexId, mut from: EdgeId| {
        while passes_through(graph, v) {
            let i = edges.iter().position(|e| e.id != from && e.touches(v)).expect("two edges");
            if used[i] {
                return Err(VdimError::NoChainDecomposition);
            }
            used[i] = true;
            vs.push(v);
            es.push(edges[i].id);
            v = edges[i].other(v);
            from = edges[i].id;
        }
        Ok(v)
    };
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let first = &edges[start];
        back_edges.clear();
        back_inner.clear();
        let end_a = walk(&mut used, &mut back_edges, &mut back_inner, first.end_a, first.id)?;
        chain_edges.clear();
        inner.clear();
        chain_edges.extend(back_edges.iter().rev().copied());
        chain_edges.push(first.id);
        inner.extend(back_inner.iter().rev().copied());
        let end_b = walk(&mut used, &mut chain_edges, &mut inner, first.end_b, first.id)?;
        visit(&chain_edges, &inner, end_a, end_b)?;
    }
    Ok(())
}

/// Decomposes the edge set into maximal chains, in order of their smallest
/// edge. Fails on graphs containing a pure-loop component.
pub fn maximal_chains(graph: &DecoratedGraph) -> Result<Vec<Chain>, VdimError> {
    let end = |v: VertexId| ChainEnd { vertex: v, stable: graph.vertex(v).is_some_and(|x| x.stable) };
    let mut chains = Vec::new();
    walk_chains(graph, |edges, inner, a, b| {
        chains.push(Chain { edges: edges.to_vec(), inner: inner.to_vec(), ends: (end(a), end(b)) });
        Ok(())
    })?;
    Ok(chains)
}

/// The part of the closed form carried by one chain. Every maximal chain
/// contributes `-1`; an unstable end must carry exactly one `(1,phi)`
/// marking for this to hold.
pub fn chain_contribution(graph: &DecoratedGraph, chain: &Chain) -> Result<Rat, VdimError> {
    contribution(graph, chain.edges.len(), chain.inner.len(), [chain.ends.0.vertex, chain.ends.1.vertex]).map(Rat::int)
}

fn contribution(graph: &DecoratedGraph, edges: usize, inner: usize, ends: [VertexId; 2]) -> Result<i64, VdimError> {
    let mut value = -3 * edges as i64 + 3 * inner as i64;
    for end in ends {
        if graph.vertex(end).is_some_and(|v| v.stable) {
            value += 1;
            continue;
        }
        let mut legs = graph.legs_at(end);
        match (legs.next(), legs.next()) {
            (Some(l), None) if l.monodromy == Monodromy::OnePhi => value += 3 - 2,
            _ => return Err(VdimError::InconsistentDecoration(end)),
        }
    }
    Ok(value)
}

/// What remains of the graph once every edge and every unstable vertex
/// lying on an edge is removed: stable vertices and isolated points, each
/// with its markings.
pub fn stripped(graph: &DecoratedGraph) -> DecoratedGraph {
    let sub = graph.induced_by(|id| graph.vertex(id).is_some_and(|v| v.stable) || graph.edge_count(id) == 0);
    let (vertices, _, legs, deg_l2) = sub.into_parts();
    DecoratedGraph::new(vertices, Vec::new(), legs).with_deg_l2(deg_l2)
}

/// Sum of chain contributions plus the closed form of the stripped graph.
pub fn chain_sum(graph: &DecoratedGraph) -> Result<Rat, VdimError> {
    check_domain(graph)?;
    let mut chains = 0i64;
    walk_chains(graph, |edges, inner, a, b| {
        chains += contribution(graph, edges.len(), inner.len(), [a, b])?;
        Ok(())
    })?;
    Ok(stripped_closed_form(graph) + Rat::int(chains))
}

/// `vdim_closed_form(&stripped(graph))` without building the stripped graph.
fn stripped_closed_form(graph: &DecoratedGraph) -> Rat {
    let kept = |v: &Vertex| v.stable || graph.edge_count(v.id) == 0;
    let mut value = 0i64;
    for v in graph.vertices().iter().filter(|v| kept(v)) {
        if !v.stable {
            value += 3;
        }
        for l in graph.legs_at(v.id) {
            let m = i64::from(l.monodromy.m());
            if l.monodromy == Monodromy::OnePhi {
                value -= 2;
            }
            if m == 0 && v.stable && v.level == Level::Infinity {
                value += 1;
            }
            if m != 0 {
                value -= m - 2;
            }
        }
    }
    Rat::int(value)
}
