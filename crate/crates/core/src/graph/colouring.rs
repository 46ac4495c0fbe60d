use std::collections::VecDeque;

use crate::error::{param, Error, Result};

use super::MultiGraph;

/// Exact counting refuses graphs with more vertices than this.
pub const ENUMERATION_LIMIT: usize = 20;

/// Assignment of a type in `{0, 1, 2}` (blue, red, green) to every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Colouring(Vec<u8>);

impl Colouring {
    pub fn new(types: Vec<u8>) -> Result<Self> {
        if let Some(t) = types.iter().find(|&&t| t > 2) {
            return Err(param(format!("colour type {t} is not in {{0, 1, 2}}")));
        }
        Ok(Self(types))
    }

    pub fn types(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Undirected simple view of a multigraph; loops are recorded separately
/// since they never supply a differently-typed neighbour.
struct Adjacency {
    neighbours: Vec<Vec<usize>>,
    has_loop: Vec<bool>,
}

impl Adjacency {
    fn of(g: &MultiGraph) -> Self {
        let mut neighbours = vec![Vec::new(); g.n()];
        let mut has_loop = vec![false; g.n()];
        for &(u, v) in g.edges() {
            if u == v {
                has_loop[u] = true;
            } else {
                neighbours[u].push(v);
                neighbours[v].push(u);
            }
        }
        for list in &mut neighbours {
            list.sort_unstable();
            list.dedup();
        }
        Self {
            neighbours,
            has_loop,
        }
    }

    /// Connected components, each listed in BFS order.
    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.neighbours.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut order = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &self.neighbours[v] {
                    if !seen[u] {
                        seen[u] = true;
                        order.push(u);
                        queue.push_back(u);
                    }
                }
            }
            out.push(order);
        }
        out
    }

    fn rigid_at(&self, v: usize, types: &[u8]) -> bool {
        let has = |t: u8| self.neighbours[v].iter().any(|&u| types[u] == t);
        match types[v] {
            0 => has(1) && has(2),
            1 => has(2),
            _ => true,
        }
    }
}

fn check_len(g: &MultiGraph, col: &Colouring) -> Result<()> {
    if col.len() != g.n() {
        return Err(param(format!(
            "colouring has {} entries for a graph on {} vertices",
            col.len(),
            g.n()
        )));
    }
    Ok(())
}

/// Every edge joins two different types (so a loop is never proper).
pub fn is_proper(g: &MultiGraph, col: &Colouring) -> Result<bool> {
    check_len(g, col)?;
    let t = col.types();
    Ok(g.edges().iter().all(|&(u, v)| t[u] != t[v]))
}

/// Proper, every blue vertex sees a red and a green neighbour, and every
/// red vertex sees a green neighbour.
pub fn is_rigid(g: &MultiGraph, col: &Colouring) -> Result<bool> {
    if !is_proper(g, col)? {
        return Ok(false);
    }
    let adj = Adjacency::of(g);
    Ok((0..g.n()).all(|v| adj.rigid_at(v, col.types())))
}

/// Backtracking over one component in BFS order. With `rigid`, a vertex is
/// checked as soon as it and all its neighbours carry a type.
struct ComponentCounter<'a> {
    adj: &'a Adjacency,
    order: &'a [usize],
    // vertices whose closed neighbourhood is complete once order[k] is set
    ready: Vec<Vec<usize>>,
    types: Vec<u8>,
    rigid: bool,
}

impl<'a> ComponentCounter<'a> {
    fn new(adj: &'a Adjacency, order: &'a [usize], n: usize, rigid: bool) -> Self {
        let mut pos = vec![usize::MAX; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut ready = vec![Vec::new(); order.len()];
        for &v in order {
            let last = adj.neighbours[v]
                .iter()
                .map(|&u| pos[u])
                .fold(pos[v], usize::max);
            ready[last].push(v);
        }
        Self {
            adj,
            order,
            ready,
            types: vec![u8::MAX; n],
            rigid,
        }
    }

    fn count(&mut self, k: usize) -> u64 {
        if k == self.order.len() {
            return 1;
        }
        let v = self.order[k];
        let mut total = 0;
        for t in 0..3u8 {
            if self.adj.neighbours[v].iter().any(|&u| self.types[u] == t) {
                continue;
            }
            self.types[v] = t;
            let ok = !self.rigid
                || self.ready[k]
                    .iter()
                    .all(|&w| self.adj.rigid_at(w, &self.types));
            if ok {
                total += self.count(k + 1);
            }
        }
        self.types[v] = u8::MAX;
        total
    }
}

fn count(g: &MultiGraph, rigid: bool) -> Result<u64> {
    if g.n() > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            n: g.n(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let adj = Adjacency::of(g);
    if adj.has_loop.iter().any(|&l| l) {
        return Ok(0);
    }
    // both conditions are local, so counts multiply over components
    let mut product = 1u64;
    for order in adj.components() {
        let c = ComponentCounter::new(&adj, &order, g.n(), rigid).count(0);
        if c == 0 {
            return Ok(0);
        }
        product *= c;
    }
    Ok(product)
}

/// Number of proper 3-colourings.
pub fn count_proper(g: &MultiGraph) -> Result<u64> {
    count(g, false)
}

/// Number of rigid 3-colourings, `R(G)`.
pub fn count_rigid(g: &MultiGraph) -> Result<u64> {
    count(g, true)
}

/// Pushes violating vertices to the largest type that keeps the colouring
/// proper until none is left. Each push raises `Σ_v type(v)`, which is at
/// most `2n`, so the loop terminates.
pub fn repair_to_rigid(g: &MultiGraph, col: &Colouring) -> Result<Colouring> {
    if !is_proper(g, col)? {
        return Err(param("repair_to_rigid needs a proper colouring"));
    }
    let adj = Adjacency::of(g);
    let mut types = col.types().to_vec();
    while let Some(v) = (0..g.n()).find(|&v| !adj.rigid_at(v, &types)) {
        let free = |t: u8| adj.neighbours[v].iter().all(|&u| types[u] != t);
        let target = (types[v] + 1..=2)
            .rev()
            .find(|&t| free(t))
            .expect("a violating vertex always has a free larger type");
        types[v] = target;
    }
    Ok(Colouring(types))
}
