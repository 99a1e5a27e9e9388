//! Dependency graph of a matrix set and its strongly connected structure.
//!
//! Vertex `i` has an edge to `j` when some matrix has a positive `(i, j)`
//! entry. A closed walk of length `n` through `i` exists exactly when some
//! length-`n` product has a positive `(i, i)` entry, which is what lets the
//! periods and shortest cycle lengths below be computed combinatorially,
//! independent of any enumeration horizon.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::matset::MatrixSet;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    n: usize,
    adj: Vec<bool>,
}

impl DependencyGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![false; n * n];
        for &(u, v) in edges {
            adj[u * n + v] = true;
        }
        Self { n, adj }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.has_edge(u, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.successors(u).map(move |v| (u, v)))
    }
}

/// Shortest-path distance between components of the condensation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Finite(usize),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Unreachable => f.write_str("unreachable"),
        }
    }
}

/// Strongly connected components and the DAG between them.
///
/// Component ids follow reverse topological order: every condensation edge
/// goes from a larger id to a smaller one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    comp_of: Vec<usize>,
    components: Vec<Vec<usize>>,
    dag_edges: Vec<(usize, usize)>,
    distance: Vec<Distance>,
    connected: Vec<bool>,
}

impl Condensation {
    pub fn component_of(&self, v: usize) -> usize {
        self.comp_of[v]
    }

    /// Sorted vertex lists, indexed by component id.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn dag_edges(&self) -> &[(usize, usize)] {
        &self.dag_edges
    }

    /// Whether the component carries at least one edge: more than one
    /// vertex, or a single vertex with a loop.
    pub fn is_connected(&self, c: usize) -> bool {
        self.connected[c]
    }

    pub fn component_distance(&self, from: usize, to: usize) -> Distance {
        self.distance[from * self.components.len() + to]
    }

    /// Distance from the component of `i` to the component of `j`.
    pub fn vertex_distance(&self, i: usize, j: usize) -> Distance {
        self.component_distance(self.comp_of[i], self.comp_of[j])
    }
}

/// Per-vertex periods and their least common multiple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodInfo {
    pub vertex_periods: Vec<u64>,
    pub global: u64,
}

pub fn build_graph<T: Scalar>(set: &MatrixSet<T>) -> DependencyGraph {
    let n = set.dim();
    let mut adj = vec![false; n * n];
    for m in set.matrices() {
        for (slot, &x) in adj.iter_mut().zip(m.as_slice()) {
            *slot |= x > T::zero();
        }
    }
    DependencyGraph { n, adj }
}

pub fn condense(g: &DependencyGraph) -> Condensation {
    let components = tarjan(g);
    let n = g.n_vertices();
    let mut comp_of = vec![0; n];
    for (c, vs) in components.iter().enumerate() {
        for &v in vs {
            comp_of[v] = c;
        }
    }
    let mut dag_edges: Vec<(usize, usize)> = g
        .edges()
        .map(|(u, v)| (comp_of[u], comp_of[v]))
        .filter(|(a, b)| a != b)
        .collect();
    dag_edges.sort_unstable();
    dag_edges.dedup();

    let nc = components.len();
    let connected = components
        .iter()
        .map(|vs| vs.len() > 1 || g.has_edge(vs[0], vs[0]))
        .collect();

    let mut succ = vec![Vec::new(); nc];
    for &(a, b) in &dag_edges {
        succ[a].push(b);
    }
    let mut distance = vec![Distance::Unreachable; nc * nc];
    for src in 0..nc {
        let row = &mut distance[src * nc..(src + 1) * nc];
        row[src] = Distance::Finite(0);
        let mut queue = VecDeque::from([src]);
        while let Some(c) = queue.pop_front() {
            let Distance::Finite(dc) = row[c] else { unreachable!() };
            for &nb in &succ[c] {
                if row[nb] == Distance::Unreachable {
                    row[nb] = Distance::Finite(dc + 1);
                    queue.push_back(nb);
                }
            }
        }
    }

    Condensation { comp_of, components, dag_edges, distance, connected }
}

/// Iterative Tarjan. Components come out sinks first, which is the reverse
/// topological order used for component ids.
fn tarjan(g: &DependencyGraph) -> Vec<Vec<usize>> {
    let n = g.n_vertices();
    let succ: Vec<Vec<usize>> = (0..n).map(|u| g.successors(u).collect()).collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (vertex, position in its successor list)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                comps.push(comp);
            }
        }
    }
    comps
}

/// gcd of the lengths of all closed walks through `i`; 1 when there are none.
pub fn vertex_period(g: &DependencyGraph, c: &Condensation, i: usize) -> u64 {
    let comp = c.component_of(i);
    if !c.is_connected(comp) {
        return 1;
    }
    component_period(g, c, comp)
}

fn component_period(g: &DependencyGraph, c: &Condensation, comp: usize) -> u64 {
    let members = &c.components()[comp];
    let root = members[0];
    let mut level = vec![usize::MAX; g.n_vertices()];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for v in g.successors(u) {
            if c.component_of(v) == comp && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut period = 0u64;
    for &u in members {
        for v in g.successors(u).filter(|&v| c.component_of(v) == comp) {
            let gap = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs();
            period = period.gcd(&gap);
        }
    }
    period.max(1)
}

/// Periods of every vertex, computed once per component.
pub fn periods(g: &DependencyGraph, c: &Condensation) -> Result<PeriodInfo> {
    let per_comp: Vec<u64> = (0..c.n_components())
        .map(|comp| if c.is_connected(comp) { component_period(g, c, comp) } else { 1 })
        .collect();
    let vertex_periods: Vec<u64> =
        (0..g.n_vertices()).map(|v| per_comp[c.component_of(v)]).collect();
    let global = global_period(&vertex_periods)?;
    Ok(PeriodInfo { vertex_periods, global })
}

/// lcm of the periods, capped at `i64::MAX`.
pub fn global_period(periods: &[u64]) -> Result<u64> {
    periods.iter().try_fold(1u64, |acc, &p| {
        let p = p.max(1);
        let l = (acc / acc.gcd(&p)).checked_mul(p).ok_or(Error::PeriodOverflow)?;
        if l > i64::MAX as u64 {
            return Err(Error::PeriodOverflow);
        }
        Ok(l)
    })
}

/// Length of the shortest closed walk through each vertex, 1 when none.
pub fn shortest_cycle_lengths(g: &DependencyGraph) -> Vec<usize> {
    let n = g.n_vertices();
    (0..n)
        .map(|i| {
            let mut dist = vec![usize::MAX; n];
            let mut queue = VecDeque::new();
            for v in g.successors(i) {
                if v == i {
                    return 1;
                }
                dist[v] = 1;
                queue.push_back(v);
            }
            while let Some(u) = queue.pop_front() {
                for v in g.successors(u) {
                    if v == i {
                        return dist[u] + 1;
                    }
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            1
        })
        .collect()
}

/// True iff the graph has no cycle, in which case the radius is exactly 0.
pub fn is_radius_trivially_zero(c: &Condensation) -> bool {
    (0..c.n_components()).all(|comp| !c.is_connected(comp))
}
