//! Shared helpers for the integration tests: a brute-force graph generator
//! used as an oracle for the enumerator, and a few hand-built graphs.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use msp_localization::enumerate::{canonical_form_unordered, for_each_graph, Caps, Scope};
use msp_localization::flatten::is_flat;
use msp_localization::graph::{
    total_degree, total_genus, validate, DecoratedGraph, Edge, EdgeClass, EdgeId, GraphBuilder, Leg, LegId, Level,
    Monodromy, Vertex, VertexId,
};
use msp_localization::Rat;

const LEVELS: [Level; 3] = [Level::Zero, Level::One, Level::Infinity];
const MARKINGS: [Monodromy; 4] = [Monodromy::OnePhi, Monodromy::OneRho, Monodromy::M1, Monodromy::M2];

/// Raw `(deg0, degInf)` pairs tried for an edge of the given class: the
/// documented search space, before any validity filtering.
fn raw_degrees(class: EdgeClass, cap: i64) -> Vec<(Rat, Rat)> {
    match class {
        EdgeClass::E01 => (1..=cap).map(|d| (Rat::int(d), Rat::ZERO)).collect(),
        EdgeClass::E0Inf => (1..=cap).map(|d| (Rat::int(d), Rat::int(d))).collect(),
        EdgeClass::E1Inf => (1..=3 * cap).map(|t| (Rat::ZERO, Rat::frac(t, 3))).collect(),
    }
}

/// All multisets of size `k` drawn from `0..n`, as non-decreasing vectors.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in multisets(n, k - 1) {
        let lo = rest.last().copied().unwrap_or(0);
        for x in lo..n {
            let mut v = rest.clone();
            v.push(x);
            out.push(v);
        }
    }
    out
}

fn product<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Every labelled graph in the search space with the given caps, filtered
/// by `validate`, flatness and connectivity, reduced to the set of
/// isomorphism classes (markings unordered).
pub fn naive_flat_classes(caps: &Caps) -> BTreeSet<Vec<u8>> {
    let cap = i64::from(caps.max_degree);
    let mut forms = BTreeSet::new();
    for n in 1..=(caps.max_edges as usize + 1) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let level_choices = product(&vec![LEVELS.to_vec(); n]);
        let stable_choices = product(&vec![vec![false, true]; n]);
        let genus_choices = product(&vec![(0..=caps.max_genus).collect::<Vec<_>>(); n]);
        let slots = MARKINGS.len() * n;
        let leg_choices: Vec<Vec<usize>> = (0..=caps.max_legs as usize).flat_map(|k| multisets(slots, k)).collect();
        for m in 0..=caps.max_edges as usize {
            for edge_set in multisets(pairs.len().max(1), m) {
                if pairs.is_empty() && m > 0 {
                    continue;
                }
                let ends: Vec<(usize, usize)> = edge_set.iter().map(|&i| pairs[i]).collect();
                let skeleton = DecoratedGraph::new(
                    (0..n).map(|v| Vertex::point(VertexId(v as u32), Level::Zero)).collect(),
                    ends.iter()
                        .enumerate()
                        .map(|(i, &(a, b))| Edge {
                            id: EdgeId(i as u32),
                            end_a: VertexId(a as u32),
                            end_b: VertexId(b as u32),
                            class: EdgeClass::E01,
                            deg0: Rat::ONE,
                            deg_inf: Rat::ZERO,
                            orbifold_at_inf: false,
                            special_at_inf: false,
                        })
                        .collect(),
                    Vec::new(),
                );
                if !skeleton.is_connected() {
                    continue;
                }
                let h1 = (m + 1 - n) as u32;
                for levels in &level_choices {
                    let classes: Option<Vec<(EdgeClass, usize, usize)>> = ends
                        .iter()
                        .map(|&(a, b)| {
                            let c = EdgeClass::between(levels[a], levels[b])?;
                            Some(if levels[a] < levels[b] { (c, a, b) } else { (c, b, a) })
                        })
                        .collect();
                    let Some(classes) = classes else { continue };
                    let per_edge: Vec<Vec<(Rat, Rat, bool, bool)>> = classes
                        .iter()
                        .map(|&(c, _, _)| {
                            raw_degrees(c, cap)
                                .into_iter()
                                .flat_map(|(d0, di)| {
                                    [(false, false), (false, true), (true, false), (true, true)]
                                        .map(|(o, s)| (d0.clone(), di.clone(), o, s))
                                })
                                .collect()
                        })
                        .collect();
                    let edge_choices = product(&per_edge);
                    for stable in &stable_choices {
                        for genus in &genus_choices {
                            if genus.iter().sum::<u32>() + h1 > caps.max_genus {
                                continue;
                            }
                            for legs in &leg_choices {
                                let vertices: Vec<Vertex> = (0..n)
                                    .map(|v| {
                                        let mut x = Vertex::point(VertexId(v as u32), levels[v]);
                                        x.stable = stable[v];
                                        x.genus = genus[v];
                                        x
                                    })
                                    .collect();
                                let leg_list: Vec<Leg> = legs
                                    .iter()
                                    .enumerate()
                                    .map(|(i, &s)| Leg {
                                        id: LegId(i as u32),
                                        vertex: VertexId((s / MARKINGS.len()) as u32),
                                        monodromy: MARKINGS[s % MARKINGS.len()],
                                    })
                                    .collect();
                                for decor in &edge_choices {
                                    let edges: Vec<Edge> = decor
                                        .iter()
                                        .zip(&classes)
                                        .enumerate()
                                        .map(|(i, ((d0, di, o, s), &(class, lo, hi)))| Edge {
                                            id: EdgeId(i as u32),
                                            end_a: VertexId(lo as u32),
                                            end_b: VertexId(hi as u32),
                                            class,
                                            deg0: d0.clone(),
                                            deg_inf: di.clone(),
                                            orbifold_at_inf: *o,
                                            special_at_inf: *s,
                                        })
                                        .collect();
                                    let g = DecoratedGraph::new(vertices.clone(), edges, leg_list.clone());
                                    if accept(&g, caps) {
                                        forms.insert(canonical_form_unordered(&g));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    forms
}

fn accept(g: &DecoratedGraph, caps: &Caps) -> bool {
    let genus: i64 = g.vertices().iter().map(|v| i64::from(v.genus)).sum::<i64>() + g.betti();
    genus <= i64::from(caps.max_genus)
        && g.is_connected()
        && g.vertices().iter().all(|v| v.stable || g.edge_count(v.id) > 0)
        && validate(g).is_valid()
        && is_flat(g)
}

/// The string graph: an E0Inf edge between two unstable vertices with a
/// broad marking at infinity.
pub fn string_graph() -> DecoratedGraph {
    let mut b = GraphBuilder::new();
    let v0 = b.point(Level::Zero);
    let vi = b.point(Level::Infinity);
    b.e0inf(v0, vi, Rat::ONE);
    b.leg(vi, Monodromy::Broad);
    b.build()
}

/// An alternating cycle of E0Inf edges of the given even length.
pub fn pure_loop(len: usize, degrees: &[i64]) -> DecoratedGraph {
    let mut b = GraphBuilder::new();
    let vs: Vec<_> = (0..len).map(|i| b.point(if i % 2 == 0 { Level::Zero } else { Level::Infinity })).collect();
    for i in 0..len {
        b.e0inf(vs[i], vs[(i + 1) % len], Rat::int(degrees[i % degrees.len()]));
    }
    b.build()
}

/// A copy of `g` with vertex `i` (in storage order) at hour `i mod n + 1`.
pub fn with_hours(g: &DecoratedGraph, n: u32) -> DecoratedGraph {
    let (mut vs, es, ls, l2) = g.clone().into_parts();
    for (i, v) in vs.iter_mut().enumerate() {
        v.hour = Some(i as u32 % n + 1);
    }
    DecoratedGraph::new(vs, es, ls).with_deg_l2(l2)
}

/// The field Euler characteristic evaluated term by term, keeping the
/// degrees of `L1` and `L2` explicit.
pub fn chi_fields_terms(g: &DecoratedGraph) -> Rat {
    let genus = Rat::int(i64::from(total_genus(g)));
    let (d0, dinf) = total_degree(g);
    let deg_l1 = d0 - dinf;
    let deg_l2 = g.deg_l2().clone();
    let count = |m: Monodromy| Rat::int(g.legs().iter().filter(|l| l.monodromy == m).count() as i64);
    let m_sum = Rat::int(g.legs().iter().map(|l| i64::from(l.monodromy.m())).sum::<i64>());
    let legs = Rat::int(g.legs().len() as i64);
    let three = Rat::int(3);
    let sigma_phi = -(&three * count(Monodromy::OnePhi));
    let l1 = &three * (&deg_l1 + Rat::ONE - &genus - &m_sum / &three);
    let l2 = &three * (&deg_l2 + Rat::ONE - &genus);
    let rest =
        Rat::int(2) * &genus - Rat::int(2) + legs - &three * &deg_l1 - &three * &deg_l2 - count(Monodromy::OneRho)
            + Rat::ONE
            - &genus;
    sigma_phi + l1 + l2 + rest
}

/// Every graph of the given scope within small caps, in enumeration order.
pub fn small_graphs(caps: &Caps, scope: Scope) -> Vec<DecoratedGraph> {
    let mut out = Vec::new();
    for_each_graph(caps, scope, |g| out.push(g));
    out
}

/// Renames every vertex, edge and leg id and shuffles the vertex and edge
/// lists, keeping the leg order.
pub fn relabel(g: &DecoratedGraph, seed: u64) -> DecoratedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut vs, mut es, mut ls, l2) = g.clone().into_parts();
    let mut fresh: Vec<u32> = (0..(vs.len() + es.len() + ls.len()) as u32).map(|i| 3 * i + 7).collect();
    fresh.shuffle(&mut rng);
    let vmap: BTreeMap<VertexId, VertexId> = vs.iter().zip(&fresh).map(|(v, &n)| (v.id, VertexId(n))).collect();
    let rest = &fresh[vs.len()..];
    for v in &mut vs {
        v.id = vmap[&v.id];
    }
    for (e, &n) in es.iter_mut().zip(rest) {
        e.id = EdgeId(n);
        e.end_a = vmap[&e.end_a];
        e.end_b = vmap[&e.end_b];
    }
    for (l, &n) in ls.iter_mut().zip(&rest[es.len()..]) {
        l.id = LegId(n);
        l.vertex = vmap[&l.vertex];
    }
    vs.shuffle(&mut rng);
    es.shuffle(&mut rng);
    DecoratedGraph::new(vs, es, ls).with_deg_l2(l2)
}
