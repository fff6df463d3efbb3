//! Exhaustive generation of decorated graphs within size caps.
//!
//! Generation runs in three layers, each producing one representative per
//! isomorphism class:
//!
//! 1. *skeletons*: connected loopless multigraphs, deduplicated by
//!    canonical form, with their full automorphism groups (vertex and
//!    parallel-edge permutations);
//! 2. *shapes*: a skeleton with levels, stability, genera, markings and
//!    orbifold flags, kept when it is lexicographically minimal in its orbit
//!    under the skeleton's automorphisms;
//! 3. *degree assignments*: edge degrees, kept when minimal under the
//!    stabilizer of the shape.
//!
//! Vertex degree pairs are always `(0, 0)`, hours are absent, and markings
//! are generated as multisets and emitted sorted by vertex and type. Only
//! connected, non-empty graphs whose unstable vertices all carry an edge are
//! produced.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use smallvec::{smallvec, SmallVec};

use crate::canon::{canonize, ColouredEdge, Labelling};
use crate::flatten::is_flat;
use crate::graph::{
    is_pure_loop, is_regular, DecoratedGraph, Edge, EdgeClass, EdgeId, Leg, LegId, Level, Monodromy, Vertex, VertexId,
};
use crate::rat::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Caps {
    pub max_genus: u32,
    pub max_edges: u32,
    pub max_legs: u32,
    pub max_degree: u32,
}

impl Caps {
    pub fn new(max_genus: u32, max_edges: u32, max_legs: u32, max_degree: u32) -> Caps {
        Caps { max_genus, max_edges, max_legs, max_degree }
    }
}

/// Which graphs to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scope {
    /// Valid graphs without T-balanced nodes.
    Flat,
    /// All valid graphs.
    All,
    /// Valid graphs with at least one T-balanced node.
    Balanced,
}

impl Scope {
    fn admits(self, flat: bool) -> bool {
        match self {
            Scope::Flat => flat,
            Scope::All => true,
            Scope::Balanced => !flat,
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical forms of decorated graphs

fn push_rat(out: &mut Vec<u8>, r: &Rat) {
    let s = r.to_string();
    out.extend_from_slice(&(s.len() as u32).to_be_bytes());
    out.extend_from_slice(s.as_bytes());
}

fn level_code(l: Level) -> u8 {
    match l {
        Level::Zero => 0,
        Level::One => 1,
        Level::Infinity => 2,
    }
}

fn monodromy_code(m: Monodromy) -> u8 {
    match m {
        Monodromy::OnePhi => 0,
        Monodromy::OneRho => 1,
        Monodromy::M1 => 2,
        Monodromy::M2 => 3,
        Monodromy::Broad => 4,
    }
}

fn edge_key(e: &Edge) -> Vec<u8> {
    let mut k = vec![e.class as u8, e.orbifold_at_inf as u8, e.special_at_inf as u8];
    push_rat(&mut k, &e.deg0);
    push_rat(&mut k, &e.deg_inf);
    k
}

fn labelling(graph: &DecoratedGraph, ordered_legs: bool) -> (Labelling, Vec<u8>) {
    let index: BTreeMap<VertexId, usize> = graph.vertices().iter().enumerate().map(|(i, v)| (v.id, i)).collect();
    let mut colours: Vec<Vec<u8>> = graph
        .vertices()
        .iter()
        .map(|v| {
            let mut c = vec![level_code(v.level), v.stable as u8];
            c.extend_from_slice(&v.genus.to_be_bytes());
            push_rat(&mut c, &v.deg0);
            push_rat(&mut c, &v.deg_inf);
            c.extend_from_slice(&v.hour.map_or(0, |h| h + 1).to_be_bytes());
            c
        })
        .collect();
    if ordered_legs {
        for (pos, l) in graph.legs().iter().enumerate() {
            if let Some(&i) = index.get(&l.vertex) {
                colours[i].extend_from_slice(&(pos as u32).to_be_bytes());
                colours[i].push(monodromy_code(l.monodromy));
            }
        }
    } else {
        let mut per_vertex = vec![Vec::new(); colours.len()];
        for l in graph.legs() {
            if let Some(&i) = index.get(&l.vertex) {
                per_vertex[i].push(monodromy_code(l.monodromy));
            }
        }
        for (c, mut ms) in colours.iter_mut().zip(per_vertex) {
            ms.sort_unstable();
            c.push(0xff);
            c.extend(ms);
        }
    }
    let mut keys: Vec<Vec<u8>> = graph.edges().iter().map(edge_key).collect();
    keys.sort();
    keys.dedup();
    let edges: Vec<ColouredEdge> = graph
        .edges()
        .iter()
        .filter_map(|e| {
            let c = keys.binary_search(&edge_key(e)).expect("present") as u32;
            Some((*index.get(&e.end_a)?, *index.get(&e.end_b)?, c))
        })
        .collect();
    let mut header = Vec::new();
    header.extend_from_slice(&(graph.legs().len() as u32).to_be_bytes());
    push_rat(&mut header, graph.deg_l2());
    header.extend_from_slice(&(keys.len() as u32).to_be_bytes());
    for k in &keys {
        header.extend_from_slice(&(k.len() as u32).to_be_bytes());
        header.extend_from_slice(k);
    }
    (canonize(&colours, &edges), header)
}

/// A byte string equal for two graphs exactly when they are isomorphic
/// (relabelling ids, preserving leg order and every decoration).
pub fn canonical_form(graph: &DecoratedGraph) -> Vec<u8> {
    let (l, mut header) = labelling(graph, true);
    header.extend(l.form);
    header
}

/// As [`canonical_form`], but treating the markings at each vertex as an
/// unordered multiset.
pub fn canonical_form_unordered(graph: &DecoratedGraph) -> Vec<u8> {
    let (l, mut header) = labelling(graph, false);
    header.extend(l.form);
    header
}

// ---------------------------------------------------------------------------
// Skeletons

#[derive(Debug, Clone)]
struct Aut {
    v: Vec<usize>,
    e: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Skeleton {
    n: usize,
    /// Endpoints with `a < b`, sorted.
    edges: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
    auts: Vec<Aut>,
    h1: u32,
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let u = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

fn skeleton_automorphisms(n: usize, edges: &[(usize, usize)], vertex_auts: Vec<Vec<usize>>) -> Vec<Aut> {
    let mut bundles: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, &p) in edges.iter().enumerate() {
        bundles.entry(p).or_default().push(i);
    }
    let mut out = Vec::new();
    for sigma in vertex_auts {
        let mut partial: Vec<Vec<usize>> = vec![vec![usize::MAX; edges.len()]];
        for (&(a, b), members) in &bundles {
            let (x, y) = (sigma[a], sigma[b]);
            let target = &bundles[&(x.min(y), x.max(y))];
            let perms = permutations(target);
            partial = partial
                .into_iter()
                .flat_map(|e| {
                    perms.iter().map(move |p| {
                        let mut e = e.clone();
                        for (&src, &dst) in members.iter().zip(p) {
                            e[src] = dst;
                        }
                        e
                    })
                })
                .collect();
        }
        for e in partial {
            out.push(Aut { v: sigma.clone(), e });
        }
    }
    debug_assert!(out.first().is_some_and(|a| a.v.iter().enumerate().all(|(i, &x)| i == x)));
    let _ = n;
    out
}

fn skeletons(caps: &Caps) -> Vec<Skeleton> {
    let mut out = Vec::new();
    for n in 1..=(caps.max_edges as usize + 1) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let lo = n - 1;
        let hi = (caps.max_edges as usize).min(n - 1 + caps.max_genus as usize);
        for m in lo..=hi {
            if m > 0 && pairs.is_empty() {
                continue;
            }
            let mut seen = HashSet::new();
            let mut found: Vec<(Vec<u8>, Skeleton)> = Vec::new();
            let mut choice = vec![0usize; m];
            loop {
                let edges: Vec<(usize, usize)> = choice.iter().map(|&i| pairs[i]).collect();
                if connected(n, &edges) {
                    let sym: Vec<ColouredEdge> = edges.iter().flat_map(|&(a, b)| [(a, b, 0), (b, a, 0)]).collect();
                    let lab = canonize(&vec![Vec::new(); n], &sym);
                    if seen.insert(lab.form.clone()) {
                        // relabel into canonical order for a deterministic representative
                        let order = &lab.orders[0];
                        let mut pos = vec![0; n];
                        for (p, &v) in order.iter().enumerate() {
                            pos[v] = p;
                        }
                        let mut canon_edges: Vec<(usize, usize)> =
                            edges.iter().map(|&(a, b)| (pos[a].min(pos[b]), pos[a].max(pos[b]))).collect();
                        canon_edges.sort();
                        let sym: Vec<ColouredEdge> =
                            canon_edges.iter().flat_map(|&(a, b)| [(a, b, 0), (b, a, 0)]).collect();
                        let vauts = canonize(&vec![Vec::new(); n], &sym).automorphisms();
                        let auts = skeleton_automorphisms(n, &canon_edges, vauts);
                        let mut incident = vec![Vec::new(); n];
                        for (i, &(a, b)) in canon_edges.iter().enumerate() {
                            incident[a].push(i);
                            incident[b].push(i);
                        }
                        let h1 = (m + 1 - n) as u32;
                        found.push((lab.form, Skeleton { n, edges: canon_edges, incident, auts, h1 }));
                    }
                }
                // next non-decreasing choice
                if m == 0 {
                    break;
                }
                let mut i = m;
                while i > 0 && choice[i - 1] == pairs.len() - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                choice[i - 1] += 1;
                let v = choice[i - 1];
                for c in choice.iter_mut().skip(i) {
                    *c = v;
                }
            }
            found.sort_by(|a, b| a.0.cmp(&b.0));
            out.extend(found.into_iter().map(|(_, s)| s));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Shapes

const LEG_TYPES: [Monodromy; 4] = [Monodromy::OnePhi, Monodromy::OneRho, Monodromy::M1, Monodromy::M2];

/// Restrictions applied during the search; each prunes whole subtrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Filter {
    /// Only shapes with at least one E0Inf edge.
    pub irregular_only: bool,
    /// No level-1 vertices, and only `(1,phi)` and `m = 2` markings.
    pub special_legs_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct VDec {
    level: Level,
    stable: bool,
    genus: u32,
    legs: [u8; 4],
}

impl VDec {
    fn leg_total(&self) -> u32 {
        self.legs.iter().map(|&c| u32::from(c)).sum()
    }

    fn code(&self) -> u32 {
        let mut c = u32::from(level_code(self.level));
        c = c * 2 + u32::from(self.stable);
        c = c * 64 + self.genus.min(63);
        for &l in &self.legs {
            c = c * 16 + u32::from(l.min(15));
        }
        c
    }

    fn twisted_legs(&self) -> bool {
        self.legs[2] + self.legs[3] > 0
    }
}

fn leg_multisets(types: &[usize], max: u32) -> Vec<[u8; 4]> {
    fn rec(types: &[usize], left: u32, cur: &mut [u8; 4], out: &mut Vec<[u8; 4]>) {
        match types.split_first() {
            None => out.push(*cur),
            Some((&t, rest)) => {
                for c in 0..=left {
                    cur[t] = c as u8;
                    rec(rest, left - c, cur, out);
                }
                cur[t] = 0;
            }
        }
    }
    let mut out = Vec::new();
    rec(types, max, &mut [0; 4], &mut out);
    out
}

/// Vertex decorations indexed by level and `min(edge count, 3)`, unstable
/// ones first and stable ones by ascending genus.
struct VertexTable {
    options: [[Vec<VDec>; 4]; 3],
}

impl VertexTable {
    fn new(caps: &Caps, filter: &Filter) -> VertexTable {
        let mut options: [[Vec<VDec>; 4]; 3] = Default::default();
        for level in Level::ALL {
            let types: Vec<usize> = (0..LEG_TYPES.len())
                .filter(|&i| LEG_TYPES[i].allowed_at(level))
                .filter(|&i| !filter.special_legs_only || matches!(LEG_TYPES[i], Monodromy::OnePhi | Monodromy::M2))
                .collect();
            for (k, slot) in options[usize::from(level_code(level))].iter_mut().enumerate() {
                if (1..=2).contains(&k) {
                    for legs in leg_multisets(&types, (2 - k as u32).min(caps.max_legs)) {
                        slot.push(VDec { level, stable: false, genus: 0, legs });
                    }
                }
                for genus in 0..=caps.max_genus {
                    for legs in leg_multisets(&types, caps.max_legs) {
                        slot.push(VDec { level, stable: true, genus, legs });
                    }
                }
            }
        }
        VertexTable { options }
    }

    fn get(&self, level: Level, edges: usize) -> &[VDec] {
        &self.options[usize::from(level_code(level))][edges.min(3)]
    }
}

/// Degree options by edge kind: E01, E0Inf, scheme E1Inf, orbifold E1Inf.
#[derive(Debug)]
struct DegreeTable {
    kinds: [Vec<(Rat, Rat)>; 4],
}

impl DegreeTable {
    fn new(cap: u32) -> DegreeTable {
        let cap = i64::from(cap);
        DegreeTable {
            kinds: [
                (1..=cap).map(|d| (Rat::int(d), Rat::ZERO)).collect(),
                (1..=cap).map(|d| (Rat::int(d), Rat::int(d))).collect(),
                (1..=cap).map(|d| (Rat::ZERO, Rat::int(d))).collect(),
                (1..3 * cap).filter(|t| t % 3 != 0).map(|t| (Rat::ZERO, Rat::frac(t, 3))).collect(),
            ],
        }
    }

    fn kind(class: EdgeClass, orbifold: bool) -> u8 {
        match (class, orbifold) {
            (EdgeClass::E01, _) => 0,
            (EdgeClass::E0Inf, _) => 1,
            (EdgeClass::E1Inf, false) => 2,
            (EdgeClass::E1Inf, true) => 3,
        }
    }
}

/// A decorated skeleton without edge degrees.
#[derive(Debug, Clone)]
pub struct Shape {
    template: DecoratedGraph,
    table: Arc<DegreeTable>,
    kinds: Vec<u8>,
    /// `(e01, e1inf)` edge indices meeting at a potential balanced node;
    /// degree option `i` of the first balances option `i` of the second.
    balance_pairs: Vec<(usize, usize)>,
    /// Edge permutations of the non-trivial shape automorphisms.
    stabilizer: Vec<Vec<usize>>,
}

impl Shape {
    /// The shape with every edge at its first degree option.
    pub fn template(&self) -> &DecoratedGraph {
        &self.template
    }

    pub fn automorphism_count(&self) -> usize {
        self.stabilizer.len() + 1
    }

    pub fn is_regular(&self) -> bool {
        self.template.edges().iter().all(|e| e.class != EdgeClass::E0Inf)
    }

    fn options(&self, e: usize) -> &[(Rat, Rat)] {
        &self.table.kinds[usize::from(self.kinds[e])]
    }

    fn is_flat(&self, idx: &[u8]) -> bool {
        self.balance_pairs.iter().all(|&(a, b)| idx[a] != idx[b])
    }

    fn is_minimal(&self, idx: &[u8], image: &mut [u8]) -> bool {
        self.stabilizer.iter().all(|tau| {
            for (e, &t) in tau.iter().enumerate() {
                image[t] = idx[e];
            }
            idx <= &image[..]
        })
    }

    /// Calls `f` with the option indices of every degree assignment that is
    /// minimal under the shape's automorphisms and lies in `scope`.
    fn for_each_assignment(&self, scope: Scope, mut f: impl FnMut(&[u8])) {
        if scope == Scope::Balanced && self.balance_pairs.is_empty() {
            return;
        }
        let m = self.kinds.len();
        let mut idx = vec![0u8; m];
        let mut image = vec![0u8; m];
        loop {
            if scope.admits(self.is_flat(&idx)) && self.is_minimal(&idx, &mut image) {
                f(&idx);
            }
            let mut i = 0;
            loop {
                if i == m {
                    return;
                }
                idx[i] += 1;
                if usize::from(idx[i]) < self.options(i).len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    fn graph(&self, idx: &[u8]) -> DecoratedGraph {
        let mut g = self.template.clone();
        for (e, (edge, &i)) in g.edges_mut().iter_mut().zip(idx).enumerate() {
            let (d0, di) = &self.table.kinds[usize::from(self.kinds[e])][usize::from(i)];
            edge.deg0 = d0.clone();
            edge.deg_inf = di.clone();
        }
        g
    }

    /// Some graph of this shape in the given scope, if there is one.
    pub fn representative(&self, scope: Scope) -> Option<DecoratedGraph> {
        if scope == Scope::Balanced {
            let &(a, b) = self.balance_pairs.first()?;
            let mut idx: SmallVec<[u8; 16]> = smallvec![0; self.kinds.len()];
            idx[a] = idx[b];
            return Some(self.graph(&idx));
        }
        let mut idx: SmallVec<[u8; 16]> = smallvec![0; self.kinds.len()];
        if scope == Scope::Flat {
            for &(a, b) in &self.balance_pairs {
                if self.options(b).len() > 1 {
                    idx[b] = 1;
                } else if self.options(a).len() > 1 {
                    idx[a] = 1;
                } else {
                    return None;
                }
            }
        }
        Some(self.graph(&idx))
    }

    /// Number of graphs of this shape in the given scope, up to
    /// isomorphism, by Burnside's lemma over the shape automorphisms.
    pub fn count(&self, scope: Scope) -> u64 {
        if scope == Scope::Balanced {
            return self.count(Scope::All) - self.count(Scope::Flat);
        }
        let m = self.kinds.len();
        let identity: SmallVec<[usize; 16]> = (0..m).collect();
        let mut total = 0u64;
        let mut cycle_of: SmallVec<[usize; 16]> = smallvec![usize::MAX; m];
        let mut cycles: SmallVec<[u64; 16]> = SmallVec::new();
        let mut partner: SmallVec<[usize; 16]> = SmallVec::new();
        for perm in std::iter::once(&identity[..]).chain(self.stabilizer.iter().map(|p| &p[..])) {
            cycle_of.fill(usize::MAX);
            cycles.clear();
            for start in 0..m {
                if cycle_of[start] != usize::MAX {
                    continue;
                }
                let mut e = start;
                while cycle_of[e] == usize::MAX {
                    cycle_of[e] = cycles.len();
                    e = perm[e];
                }
                cycles.push(self.options(start).len() as u64);
            }
            partner.clear();
            partner.resize(cycles.len(), usize::MAX);
            if scope == Scope::Flat {
                for &(a, b) in &self.balance_pairs {
                    partner[cycle_of[a]] = cycle_of[b];
                    partner[cycle_of[b]] = cycle_of[a];
                }
            }
            let mut fixed = 1u64;
            for (c, &n) in cycles.iter().enumerate() {
                match partner[c] {
                    usize::MAX => fixed *= n,
                    p if p > c => fixed *= n * cycles[p] - n.min(cycles[p]),
                    _ => {}
                }
            }
            total += fixed;
        }
        let order = self.automorphism_count() as u64;
        debug_assert_eq!(total % order, 0);
        total / order
    }

    /// Every graph of this shape in the given scope, in a fixed order.
    pub fn for_each_graph(&self, scope: Scope, mut f: impl FnMut(DecoratedGraph)) {
        self.for_each_assignment(scope, |idx| f(self.graph(idx)));
    }
}

struct ShapeSearch<'a> {
    caps: &'a Caps,
    filter: &'a Filter,
    table: &'a VertexTable,
    degrees: &'a Arc<DegreeTable>,
    skel: &'a Skeleton,
    levels: Vec<Level>,
    decs: Vec<VDec>,
    orbifold: Vec<bool>,
    vk: Vec<u32>,
    ek: Vec<u8>,
    vi: Vec<u32>,
    ei: Vec<u8>,
}

impl ShapeSearch<'_> {
    fn valency(&self, v: usize) -> usize {
        self.skel.incident[v].len() + self.decs[v].leg_total() as usize
    }

    fn infinity_end(&self, e: usize) -> Option<usize> {
        let (a, b) = self.skel.edges[e];
        match (self.levels[a], self.levels[b]) {
            (Level::Infinity, _) => Some(a),
            (_, Level::Infinity) => Some(b),
            _ => None,
        }
    }

    fn special(&self, e: usize) -> bool {
        self.infinity_end(e).is_some_and(|w| self.decs[w].stable || self.valency(w) >= 2)
    }

    fn class(&self, e: usize) -> EdgeClass {
        let (a, b) = self.skel.edges[e];
        EdgeClass::between(self.levels[a], self.levels[b]).expect("proper colouring")
    }

    fn consistent(&self) -> bool {
        for e in 0..self.skel.edges.len() {
            let special = self.special(e);
            match self.class(e) {
                EdgeClass::E0Inf if !special => return false,
                EdgeClass::E1Inf if self.orbifold[e] && !special => return false,
                _ => {}
            }
        }
        for v in 0..self.skel.n {
            let d = &self.decs[v];
            if d.stable || d.level != Level::Infinity {
                continue;
            }
            let mut flags = self.skel.incident[v]
                .iter()
                .map(|&e| self.orbifold[e])
                .chain((d.leg_total() > 0).then(|| d.twisted_legs()));
            if let Some(first) = flags.next() {
                if flags.any(|f| f != first) {
                    return false;
                }
            }
        }
        true
    }

    /// `None` if some automorphism maps the decoration to a smaller one;
    /// otherwise the edge permutations of the stabilizer.
    fn minimal_with_stabilizer(&mut self) -> Option<Vec<Vec<usize>>> {
        self.vk.clear();
        self.vk.extend(self.decs.iter().map(VDec::code));
        self.ek.clear();
        self.ek.extend(self.orbifold.iter().map(|&o| o as u8));
        let mut stab = Vec::new();
        for aut in self.skel.auts.iter().skip(1) {
            for (v, &s) in aut.v.iter().enumerate() {
                self.vi[s] = self.vk[v];
            }
            for (e, &t) in aut.e.iter().enumerate() {
                self.ei[t] = self.ek[e];
            }
            match (self.vi.as_slice(), self.ei.as_slice()).cmp(&(self.vk.as_slice(), self.ek.as_slice())) {
                std::cmp::Ordering::Less => return None,
                std::cmp::Ordering::Equal => stab.push(aut.e.clone()),
                std::cmp::Ordering::Greater => {}
            }
        }
        Some(stab)
    }

    fn build(&self, stabilizer: Vec<Vec<usize>>) -> Shape {
        let vertices = (0..self.skel.n)
            .map(|v| {
                let d = &self.decs[v];
                if d.stable {
                    Vertex::stable(VertexId(v as u32), d.level, d.genus)
                } else {
                    Vertex::point(VertexId(v as u32), d.level)
                }
            })
            .collect();
        let mut kinds = Vec::with_capacity(self.skel.edges.len());
        let edges = (0..self.skel.edges.len())
            .map(|e| {
                let (a, b) = self.skel.edges[e];
                let (lo, hi) = if self.levels[a] < self.levels[b] { (a, b) } else { (b, a) };
                let class = self.class(e);
                let orbifold = class == EdgeClass::E1Inf && self.orbifold[e];
                let kind = DegreeTable::kind(class, orbifold);
                kinds.push(kind);
                let (deg0, deg_inf) = self.degrees.kinds[usize::from(kind)][0].clone();
                Edge {
                    id: EdgeId(e as u32),
                    end_a: VertexId(lo as u32),
                    end_b: VertexId(hi as u32),
                    class,
                    deg0,
                    deg_inf,
                    orbifold_at_inf: orbifold,
                    special_at_inf: class != EdgeClass::E01 && self.special(e),
                }
            })
            .collect::<Vec<_>>();
        let mut legs = Vec::new();
        for v in 0..self.skel.n {
            for (t, &count) in self.decs[v].legs.iter().enumerate() {
                for _ in 0..count {
                    legs.push(Leg {
                        id: LegId(legs.len() as u32),
                        vertex: VertexId(v as u32),
                        monodromy: LEG_TYPES[t],
                    });
                }
            }
        }
        let mut balance_pairs = Vec::new();
        for v in 0..self.skel.n {
            let d = &self.decs[v];
            if d.stable || d.level != Level::One || self.skel.incident[v].len() != 2 {
                continue;
            }
            let (x, y) = (self.skel.incident[v][0], self.skel.incident[v][1]);
            let (e01, e1inf) = match (edges[x].class, edges[y].class) {
                (EdgeClass::E01, EdgeClass::E1Inf) => (x, y),
                (EdgeClass::E1Inf, EdgeClass::E01) => (y, x),
                _ => continue,
            };
            if edges[e1inf].special_at_inf && !edges[e1inf].orbifold_at_inf {
                balance_pairs.push((e01, e1inf));
            }
        }
        Shape {
            template: DecoratedGraph::new(vertices, edges, legs),
            table: Arc::clone(self.degrees),
            kinds,
            balance_pairs,
            stabilizer,
        }
    }

    fn orbifold_flags(&mut self, e: usize, out: &mut dyn FnMut(Shape)) {
        if e == self.skel.edges.len() {
            if self.consistent() {
                if let Some(stab) = self.minimal_with_stabilizer() {
                    out(self.build(stab));
                }
            }
            return;
        }
        self.orbifold[e] = false;
        self.orbifold_flags(e + 1, out);
        if self.class(e) == EdgeClass::E1Inf {
            self.orbifold[e] = true;
            self.orbifold_flags(e + 1, out);
            self.orbifold[e] = false;
        }
    }

    fn vertices(&mut self, v: usize, genus_left: u32, legs_left: u32, out: &mut dyn FnMut(Shape)) {
        if v == self.skel.n {
            self.orbifold_flags(0, out);
            return;
        }
        let table = self.table;
        for d in table.get(self.levels[v], self.skel.incident[v].len()) {
            if d.genus > genus_left {
                break;
            }
            if d.leg_total() > legs_left {
                continue;
            }
            self.decs[v] = *d;
            self.vertices(v + 1, genus_left - d.genus, legs_left - d.leg_total(), out);
        }
    }

    fn levels(&mut self, v: usize, out: &mut dyn FnMut(Shape)) {
        if v == self.skel.n {
            if self.filter.irregular_only && (0..self.skel.edges.len()).all(|e| self.class(e) != EdgeClass::E0Inf) {
                return;
            }
            let budget = self.caps.max_genus - self.skel.h1;
            self.vertices(0, budget, self.caps.max_legs, out);
            return;
        }
        for level in Level::ALL {
            if self.filter.special_legs_only && level == Level::One {
                continue;
            }
            let clash = self.skel.edges.iter().any(|&(a, b)| {
                (a == v && b < v && self.levels[b] == level) || (b == v && a < v && self.levels[a] == level)
            });
            if !clash {
                self.levels[v] = level;
                self.levels(v + 1, out);
            }
        }
    }
}

/// Every shape within the caps passing the filter, in a fixed order.
pub fn for_each_shape(caps: &Caps, filter: &Filter, mut f: impl FnMut(Shape)) {
    let table = VertexTable::new(caps, filter);
    let degrees = Arc::new(DegreeTable::new(caps.max_degree));
    for skel in skeletons(caps) {
        let (n, m) = (skel.n, skel.edges.len());
        let mut search = ShapeSearch {
            caps,
            filter,
            table: &table,
            degrees: &degrees,
            skel: &skel,
            levels: vec![Level::Zero; n],
            decs: vec![VDec { level: Level::Zero, stable: true, genus: 0, legs: [0; 4] }; n],
            orbifold: vec![false; m],
            vk: Vec::with_capacity(n),
            ek: Vec::with_capacity(m),
            vi: vec![0; n],
            ei: vec![0; m],
        };
        search.levels(0, &mut |s| f(s));
    }
}

/// Visits one representative of every isomorphism class of graphs in scope,
/// in a fixed order.
pub fn for_each_graph(caps: &Caps, scope: Scope, mut f: impl FnMut(DecoratedGraph)) {
    for_each_shape(caps, &Filter::default(), |s| s.for_each_graph(scope, &mut f));
}

pub fn count_graphs(caps: &Caps, scope: Scope) -> u64 {
    let mut n = 0;
    for_each_shape(caps, &Filter::default(), |s| n += s.count(scope));
    n
}

/// Every valid flat graph within the caps, one per isomorphism class,
/// sorted by canonical form.
pub fn enumerate_flat_graphs(caps: &Caps) -> Vec<DecoratedGraph> {
    let mut keyed = Vec::new();
    for_each_graph(caps, Scope::Flat, |g| keyed.push((canonical_form(&g), g)));
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, g)| g).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts {
    pub regular: u64,
    pub regular_pure_loop: u64,
    pub irregular: u64,
    pub irregular_pure_loop: u64,
}

impl ClassCounts {
    pub fn get(&self, is_regular: bool, is_pure_loop: bool) -> u64 {
        match (is_regular, is_pure_loop) {
            (true, false) => self.regular,
            (true, true) => self.regular_pure_loop,
            (false, false) => self.irregular,
            (false, true) => self.irregular_pure_loop,
        }
    }

    pub fn total(&self) -> u64 {
        self.regular + self.regular_pure_loop + self.irregular + self.irregular_pure_loop
    }
}

pub fn count_by_class<'a>(graphs: impl IntoIterator<Item = &'a DecoratedGraph>) -> ClassCounts {
    let mut c = ClassCounts::default();
    for g in graphs {
        let slot = match (is_regular(g), is_pure_loop(g)) {
            (true, false) => &mut c.regular,
            (true, true) => &mut c.regular_pure_loop,
            (false, false) => &mut c.irregular,
            (false, true) => &mut c.irregular_pure_loop,
        };
        *slot += 1;
    }
    c
}

/// Whether a graph lies in the space the enumerator covers (apart from the
/// caps): connected, non-empty, hour-free, without broad markings, with
/// trivial vertex degrees and every unstable vertex on an edge.
pub fn in_enumeration_space(graph: &DecoratedGraph, scope: Scope) -> bool {
    !graph.vertices().is_empty()
        && graph.is_connected()
        && graph.vertices().iter().all(|v| {
            v.hour.is_none() && v.deg0.is_zero() && v.deg_inf.is_zero() && (v.stable || graph.edge_count(v.id) > 0)
        })
        && graph.legs().iter().all(|l| l.monodromy != Monodromy::Broad)
        && scope.admits(is_flat(graph))
}
