//! Canonical labelling of small vertex- and edge-coloured multigraphs.
//!
//! Colour refinement followed by individualization of the first non-trivial
//! cell, exploring every branch. The minimum leaf encoding is canonical, and
//! the set of leaves attaining it yields the full automorphism group. No
//! pruning by automorphisms is attempted; graphs here have at most a dozen
//! vertices.

/// An edge `(a, b, colour)`. Direction is significant: `(a, b)` and `(b, a)`
/// are different edges.
pub type ColouredEdge = (usize, usize, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labelling {
    /// The canonical encoding.
    pub form: Vec<u8>,
    /// Every vertex order attaining `form`; `orders[k][pos]` is the vertex
    /// placed at `pos`. Two orders differ by an automorphism.
    pub orders: Vec<Vec<usize>>,
}

impl Labelling {
    /// Vertex automorphisms as maps `v -> sigma(v)`, identity first.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let base = &self.orders[0];
        self.orders
            .iter()
            .map(|o| {
                let mut sigma = vec![0; base.len()];
                for (p, &v) in base.iter().enumerate() {
                    sigma[v] = o[p];
                }
                sigma
            })
            .collect()
    }
}

/// Edge colour, direction and the current colour of the neighbour.
type Neighbour = (u32, u8, u32);

struct Problem<'a> {
    vcolours: &'a [Vec<u8>],
    adjacency: Vec<Vec<(u32, u8, usize)>>,
    edges: &'a [ColouredEdge],
}

fn rank<K: Ord + Clone>(keys: &[K]) -> (Vec<u32>, usize) {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    let ranks = keys.iter().map(|k| sorted.binary_search(k).expect("present") as u32).collect();
    (ranks, sorted.len())
}

impl Problem<'_> {
    fn refine(&self, mut colours: Vec<u32>) -> Vec<u32> {
        let mut classes = {
            let mut c = colours.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        loop {
            let keys: Vec<(u32, Vec<Neighbour>)> = (0..colours.len())
                .map(|v| {
                    let mut nbrs: Vec<Neighbour> =
                        self.adjacency[v].iter().map(|&(c, dir, u)| (c, dir, colours[u])).collect();
                    nbrs.sort_unstable();
                    (colours[v], nbrs)
                })
                .collect();
            let (next, count) = rank(&keys);
            colours = next;
            if count == classes {
                return colours;
            }
            classes = count;
        }
    }

    fn encode(&self, order: &[usize]) -> Vec<u8> {
        let n = order.len();
        let mut pos = vec![0usize; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let mut out = Vec::with_capacity(8 + 8 * n + 12 * self.edges.len());
        out.extend_from_slice(&(n as u32).to_be_bytes());
        out.extend_from_slice(&(self.edges.len() as u32).to_be_bytes());
        for &v in order {
            let c = &self.vcolours[v];
            out.extend_from_slice(&(c.len() as u32).to_be_bytes());
            out.extend_from_slice(c);
        }
        let mut es: Vec<(usize, usize, u32)> = self.edges.iter().map(|&(a, b, c)| (pos[a], pos[b], c)).collect();
        es.sort_unstable();
        for (a, b, c) in es {
            out.extend_from_slice(&(a as u32).to_be_bytes());
            out.extend_from_slice(&(b as u32).to_be_bytes());
            out.extend_from_slice(&c.to_be_bytes());
        }
        out
    }

    fn search(&self, colours: Vec<u32>, best: &mut Option<Labelling>) {
        let colours = self.refine(colours);
        let n = colours.len();
        let mut count = vec![0usize; n];
        for &c in &colours {
            count[c as usize] += 1;
        }
        match (0..n).find(|&c| count[c] > 1) {
            None => {
                let mut order = vec![0usize; n];
                for (v, &c) in colours.iter().enumerate() {
                    order[c as usize] = v;
                }
                let form = self.encode(&order);
                match best {
                    Some(b) if b.form < form => {}
                    Some(b) if b.form == form => b.orders.push(order),
                    _ => *best = Some(Labelling { form, orders: vec![order] }),
                }
            }
            Some(cell) => {
                let cell = cell as u32;
                for v in (0..n).filter(|&v| colours[v] == cell) {
                    let next =
                        colours.iter().enumerate().map(|(u, &c)| 2 * c + u32::from(c == cell && u != v)).collect();
                    self.search(next, best);
                }
            }
        }
    }
}

/// Canonical labelling of the graph with the given vertex colours and
/// edges.
pub fn canonize(vcolours: &[Vec<u8>], edges: &[ColouredEdge]) -> Labelling {
    let n = vcolours.len();
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b, c) in edges {
        adjacency[a].push((c, 0u8, b));
        adjacency[b].push((c, 1u8, a));
    }
    let problem = Problem { vcolours, adjacency, edges };
    let (initial, _) = rank(vcolours);
    let mut best = None;
    problem.search(initial, &mut best);
    best.unwrap_or_else(|| Labelling { form: problem.encode(&[]), orders: vec![Vec::new()] })
}
