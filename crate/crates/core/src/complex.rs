//! Projection complexes `P_K(𝕐_j)`: vertices are the elements of one coordinate, and two
//! vertices span an edge when nothing in the coordinate sees them at distance `K` or more.

use std::collections::VecDeque;

use serde::Serialize;

use crate::metrics::Space;
use crate::rational::{self, int, Rational};
use crate::system::ElementId;

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionComplex {
    pub coord: usize,
    #[serde(with = "rational")]
    pub k: Rational,
    pub vertices: Vec<ElementId>,
    /// Edges as pairs of indices into `vertices`, lexicographically sorted.
    pub edges: Vec<(usize, usize)>,
    pub connected: bool,
    /// Largest ball radius around a geodesic midpoint needed to separate sampled pairs.
    pub bottleneck: Option<usize>,
    #[serde(skip)]
    positions: Vec<usize>,
}

impl ProjectionComplex {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// System positions of the vertices, in vertex order.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).is_ok()
    }

    /// Graph distances from `src`, `usize::MAX` for unreachable vertices; vertices flagged in
    /// `removed` are skipped.
    fn bfs(adj: &[Vec<usize>], src: usize, removed: &[bool]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; adj.len()];
        if removed[src] {
            return dist;
        }
        dist[src] = 0;
        let mut q = VecDeque::from([src]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX && !removed[v] {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        dist
    }

    /// Graph distance between two vertices.
    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        let d = Self::bfs(&self.adjacency(), a, &vec![false; self.vertices.len()])[b];
        (d != usize::MAX).then_some(d)
    }

    fn compute_diagnostics(&mut self, sample_pairs: usize) {
        let n = self.vertices.len();
        let adj = self.adjacency();
        let none = vec![false; n];
        if n == 0 {
            self.connected = true;
            return;
        }
        let d0 = Self::bfs(&adj, 0, &none);
        self.connected = d0.iter().all(|&d| d != usize::MAX);
        let mut pairs = Vec::new();
        'outer: for u in 0..n {
            for v in u + 1..n {
                if pairs.len() >= sample_pairs {
                    break 'outer;
                }
                pairs.push((u, v));
            }
        }
        let mut worst: Option<usize> = None;
        for (u, v) in pairs {
            let du = Self::bfs(&adj, u, &none);
            if du[v] == usize::MAX || du[v] < 2 {
                continue;
            }
            let dv = Self::bfs(&adj, v, &none);
            let half = du[v] / 2;
            let Some(w) = (0..n).find(|&w| du[w] == half && dv[w] == du[v] - half) else { continue };
            let dw = Self::bfs(&adj, w, &none);
            let cap = du[w].min(dv[w]);
            let mut need = cap;
            for r in 0..cap {
                let removed: Vec<bool> = dw.iter().map(|&d| d <= r).collect();
                if Self::bfs(&adj, u, &removed)[v] == usize::MAX {
                    need = r;
                    break;
                }
            }
            worst = Some(worst.map_or(need, |x: usize| x.max(need)));
        }
        self.bottleneck = worst;
    }

    /// Graphviz rendering with one node per vertex.
    pub fn to_dot(&self, label: impl Fn(usize) -> String) -> String {
        let mut s = format!("graph P_{} {{\n", self.coord);
        for (i, v) in self.vertices.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{} {}\"];\n", v, label(self.positions[i]).replace('"', "'")));
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("  n{a} -- n{b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// Edge test of `P_K(𝕐_j)`: `X` and `Z` are joined when no element of coordinate `j` sees them
/// at modified distance `K` or more.
pub struct EdgeRule<'a> {
    sp: Space<'a>,
    j: usize,
    k: Rational,
    k_scaled: Option<i64>,
}

impl<'a> EdgeRule<'a> {
    pub fn new(sp: Space<'a>, j: usize, k: &Rational) -> Self {
        let k_scaled = sp.sys.scale_ceil(k).filter(|_| sp.has_scaled());
        EdgeRule { sp, j, k: k.clone(), k_scaled }
    }

    pub fn joined(&self, x: usize, z: usize) -> bool {
        let sys = self.sp.sys;
        let mut ys = sys.coord_range(self.j).filter(|&y| y != x && y != z);
        match self.k_scaled {
            Some(ks) => !ys.any(|y| self.sp.d_scaled(y, x, z).is_some_and(|d| d >= ks)),
            None => !ys.any(|y| self.sp.d(y, x, z).is_some_and(|d| d >= self.k)),
        }
    }
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

/// Whether the subgraph of `P_K(𝕐_j)` induced on `members` (all of coordinate `j`) is connected.
///
/// On projection-backed systems the neighbours of a vertex are computed with bitsets: for each
/// viewer `Y` the members are grouped by their projection onto `Y`, and a member stays a
/// candidate only if its class lies within `K` of the vertex's class.
pub fn induced_connected(sp: &Space, members: &[usize], j: usize, k: &Rational) -> bool {
    let n = members.len();
    if n <= 1 {
        return true;
    }
    let sys = sp.sys;
    let words = n.div_ceil(64);
    let neighbours: Box<dyn Fn(usize) -> Vec<u64>> = if sp.has_fast_projection() {
        let weight = sys.proj_weight().expect("projection backend").clone();
        let viewers: Vec<usize> = sys.coord_range(j).collect();
        // Per viewer: members it cannot see (bitset) and members grouped by projection value.
        let tables: Vec<(Vec<u64>, Vec<(i64, Vec<u64>)>)> = viewers
            .iter()
            .map(|&y| {
                let mut free = vec![0u64; words];
                let mut classes: std::collections::BTreeMap<i64, Vec<u64>> = Default::default();
                for (a, &x) in members.iter().enumerate() {
                    match sys.proj(y, x) {
                        Some(p) if x != y => set_bit(classes.entry(p).or_insert_with(|| vec![0; words]), a),
                        _ => set_bit(&mut free, a),
                    }
                }
                (free, classes.into_iter().collect())
            })
            .collect();
        Box::new(move |a: usize| {
            let u = members[a];
            let mut out = vec![u64::MAX; words];
            for (vi, &y) in viewers.iter().enumerate() {
                if y == u {
                    continue;
                }
                let Some(pu) = sys.proj(y, u) else { continue };
                let (free, classes) = &tables[vi];
                let mut allowed = free.clone();
                for (v, bits) in classes {
                    if &weight * int((v - pu).abs()) < *k {
                        for (o, b) in allowed.iter_mut().zip(bits) {
                            *o |= b;
                        }
                    }
                }
                for (o, b) in out.iter_mut().zip(&allowed) {
                    *o &= b;
                }
            }
            out
        })
    } else {
        let rule = EdgeRule::new(*sp, j, k);
        Box::new(move |a: usize| {
            let mut out = vec![0u64; words];
            for b in 0..n {
                if b != a && rule.joined(members[a], members[b]) {
                    set_bit(&mut out, b);
                }
            }
            out
        })
    };
    let mut seen = vec![0u64; words];
    set_bit(&mut seen, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut reached = 1;
    while let Some(a) = queue.pop_front() {
        let nb = neighbours(a);
        for w in 0..words {
            let mut fresh = nb[w] & !seen[w];
            while fresh != 0 {
                let b = w * 64 + fresh.trailing_zeros() as usize;
                fresh &= fresh - 1;
                if b < n {
                    seen[w] |= 1 << (b % 64);
                    reached += 1;
                    queue.push_back(b);
                }
            }
        }
    }
    reached == n
}

/// Builds `P_K(𝕐_j)` using modified distances.
pub fn build_projection_complex(sp: &Space, j: usize, k: &Rational) -> ProjectionComplex {
    let sys = sp.sys;
    let positions: Vec<usize> = sys.coord_range(j).collect();
    let n = positions.len();
    let rule = EdgeRule::new(*sp, j, k);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rule.joined(positions[a], positions[b]) {
                edges.push((a, b));
            }
        }
    }
    let mut c = ProjectionComplex {
        coord: j,
        k: k.clone(),
        vertices: positions.iter().map(|&p| sys.id(p)).collect(),
        edges,
        connected: false,
        bottleneck: None,
        positions,
    };
    c.compute_diagnostics(200);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::DerivedMetrics;
    use crate::models::tree::p11;

    #[test]
    fn p11_complex_misses_only_the_far_pairs() {
        let sys = p11();
        let met = DerivedMetrics::exact(&sys);
        let c = build_projection_complex(&Space::new(&sys, &met), 1, &int(1));
        assert_eq!(c.vertices.len(), 4);
        // A=0, B=1, Y=2, Z=3: Y separates A from B and Z from B.
        assert_eq!(c.edges, vec![(0, 2), (0, 3), (1, 2), (2, 3)]);
        assert!(c.connected);
        assert_eq!(c.distance(0, 1), Some(2));
        assert!(c.to_dot(|p| sys.label(p)).contains("n0 -- n2"));
        let sp = Space::new(&sys, &met);
        assert!(induced_connected(&sp, &[0, 1, 2, 3], 1, &int(1)));
        assert!(!induced_connected(&sp, &[0, 1], 1, &int(1)));
    }
}
