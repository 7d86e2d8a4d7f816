//! Coloured geodesic segments in a finite tree.
//!
//! Each segment is an element; its colour is its coordinate. Two segments are active when
//! they share at most `overlap` edges, and segments of one colour never share more than that.
//! `d^π_Y(X,Z)` is the diameter, in edges, of the union of the nearest-point projections of
//! `X` and `Z` onto `Y`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::int;
use crate::system::{CompositeSystem, ElementId, SystemBuilder};

/// Parameters of the random segment generator.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(default)]
pub struct TreeParams {
    pub vertices: usize,
    pub segments: usize,
    pub colors: usize,
    pub overlap: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { vertices: 16, segments: 12, colors: 2, overlap: 0 }
    }
}

/// A tree (given by parent pointers, vertex 0 is the root) with coloured segments.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TreeSegments {
    pub parent: Vec<usize>,
    /// `(endpoint, endpoint, colour)`; colours are 1-based.
    pub segments: Vec<(usize, usize, usize)>,
    pub colors: usize,
    pub overlap: usize,
}

impl TreeSegments {
    fn depth(&self, mut v: usize) -> usize {
        let mut d = 0;
        while v != 0 {
            v = self.parent[v];
            d += 1;
        }
        d
    }

    /// Vertices of the geodesic from `a` to `b`, in order.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut u, mut v) = (a, b);
        let (mut du, mut dv) = (self.depth(u), self.depth(v));
        let (mut left, mut right) = (vec![], vec![]);
        while du > dv {
            left.push(u);
            u = self.parent[u];
            du -= 1;
        }
        while dv > du {
            right.push(v);
            v = self.parent[v];
            dv -= 1;
        }
        while u != v {
            left.push(u);
            right.push(v);
            u = self.parent[u];
            v = self.parent[v];
        }
        left.push(u);
        left.extend(right.into_iter().rev());
        left
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.parent.len()];
        for v in 1..self.parent.len() {
            adj[v].push(self.parent[v]);
            adj[self.parent[v]].push(v);
        }
        adj
    }

    /// For every vertex, the index along `path` of its nearest point on `path`.
    fn nearest_on(&self, path: &[usize], adj: &[Vec<usize>]) -> Vec<usize> {
        let mut near = vec![usize::MAX; self.parent.len()];
        let mut queue = std::collections::VecDeque::new();
        for (i, &v) in path.iter().enumerate() {
            near[v] = i;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if near[w] == usize::MAX {
                    near[w] = near[v];
                    queue.push_back(w);
                }
            }
        }
        near
    }

    fn shared_edges(a: &[usize], b: &[usize]) -> usize {
        let edges = |p: &[usize]| -> std::collections::HashSet<(usize, usize)> {
            p.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect()
        };
        edges(a).intersection(&edges(b)).count()
    }

    /// The composite projection system with `θ = 2·overlap`: two segments overlapping `Y` on
    /// either side of a shared stretch can each contribute `overlap` edges to a projection.
    pub fn system(&self) -> Result<CompositeSystem> {
        let paths: Vec<Vec<usize>> = self.segments.iter().map(|&(a, b, _)| self.path(a, b)).collect();
        let mut order: Vec<usize> = (0..self.segments.len()).collect();
        order.sort_by_key(|&s| self.segments[s].2);
        let mut ids = vec![ElementId::new(0, 0); self.segments.len()];
        let mut next = vec![0u64; self.colors + 1];
        for &s in &order {
            let c = self.segments[s].2;
            if c == 0 || c > self.colors {
                return Err(Error::InvalidInstance(format!("segment colour {c} outside 1..={}", self.colors)));
            }
            ids[s] = ElementId::new(c, next[c]);
            next[c] += 1;
        }
        let mut b = SystemBuilder::new(self.colors, int(2 * self.overlap as i64));
        for (s, &(u, v, _)) in self.segments.iter().enumerate() {
            b.labelled(ids[s], format!("[{u}..{v}]"));
        }
        let n = self.segments.len();
        let mut active = vec![vec![false; n]; n];
        for x in 0..n {
            for z in 0..n {
                let same = self.segments[x].2 == self.segments[z].2;
                let shared = Self::shared_edges(&paths[x], &paths[z]);
                if same && x != z && shared > self.overlap {
                    return Err(Error::InvalidInstance(format!(
                        "segments {} and {} share a colour and {shared} edges",
                        ids[x], ids[z]
                    )));
                }
                active[x][z] = same || shared <= self.overlap;
                if active[x][z] && !same {
                    b.active(ids[x], ids[z]);
                }
            }
        }
        let adj = self.neighbours();
        for y in 0..n {
            let near = self.nearest_on(&paths[y], &adj);
            let span = |x: usize| {
                let idx = paths[x].iter().map(|&v| near[v]);
                (idx.clone().min().unwrap(), idx.max().unwrap())
            };
            for x in 0..n {
                if x == y || !active[y][x] {
                    continue;
                }
                let (xl, xh) = span(x);
                for z in x..n {
                    if z == y || !active[y][z] {
                        continue;
                    }
                    let (zl, zh) = span(z);
                    let diam = xh.max(zh) - xl.min(zl);
                    b.dpi(ids[y], ids[x], ids[z], int(diam as i64));
                }
            }
        }
        b.build()
    }
}

/// Random segments in a random recursive tree.
pub fn gen_tree_segments(params: &TreeParams, seed: u64) -> Result<TreeSegments> {
    if params.vertices == 0 || params.colors == 0 {
        return Err(Error::InvalidInstance("tree needs at least one vertex and one colour".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parent: Vec<usize> = (0..params.vertices)
        .map(|v| if v == 0 { 0 } else { rng.gen_range(0..v) })
        .collect();
    let mut t = TreeSegments { parent, segments: Vec::new(), colors: params.colors, overlap: params.overlap };
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut attempts = 0;
    while t.segments.len() < params.segments && attempts < 50 * params.segments.max(1) {
        attempts += 1;
        let a = rng.gen_range(0..params.vertices);
        let b = rng.gen_range(0..params.vertices);
        let p = t.path(a, b);
        let mut key = p.clone();
        key.sort_unstable();
        if paths.iter().any(|q| {
            let mut k = q.clone();
            k.sort_unstable();
            k == key
        }) {
            continue;
        }
        let start = rng.gen_range(0..params.colors);
        let colour = (0..params.colors).map(|k| (start + k) % params.colors + 1).find(|&c| {
            t.segments
                .iter()
                .zip(&paths)
                .all(|(s, q)| s.2 != c || TreeSegments::shared_edges(&p, q) <= params.overlap)
        });
        if let Some(c) = colour {
            t.segments.push((a, b, c));
            paths.push(p);
        }
    }
    Ok(t)
}

/// The path `0–1–…–10` with segments `A = [0,0]`, `B = [10,10]`, `Y = [4,6]`, `Z = [2,2]`,
/// one colour and `θ = 0`. Element positions are `A = 0`, `B = 1`, `Y = 2`, `Z = 3`.
pub fn p11_segments() -> TreeSegments {
    TreeSegments {
        parent: (0..11).map(|v: usize| v.saturating_sub(1)).collect(),
        segments: vec![(0, 0, 1), (10, 10, 1), (4, 6, 1), (2, 2, 1)],
        colors: 1,
        overlap: 0,
    }
}

/// The system of [`p11_segments`].
pub fn p11() -> CompositeSystem {
    p11_segments().system().expect("fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p11_raw_distances() {
        let s = p11();
        assert_eq!(s.len(), 4);
        assert_eq!(s.dpi(2, 0, 1), Some(int(2)));
        assert_eq!(s.dpi(2, 0, 3), Some(int(0)));
        assert_eq!(s.dpi(3, 0, 1), Some(int(0)));
        assert_eq!(s.dpi(3, 2, 1), Some(int(0)));
        assert_eq!(s.dpi(0, 1, 1), Some(int(0)));
    }

    #[test]
    fn paths_follow_parents() {
        let t = p11_segments();
        assert_eq!(t.path(4, 6), vec![4, 5, 6]);
        assert_eq!(t.path(6, 4), vec![6, 5, 4]);
        assert_eq!(t.path(3, 3), vec![3]);
    }

    #[test]
    fn generator_respects_colour_overlap() {
        let p = TreeParams { vertices: 20, segments: 15, colors: 2, overlap: 1 };
        let t = gen_tree_segments(&p, 7).unwrap();
        assert!(t.system().is_ok());
        assert_eq!(gen_tree_segments(&p, 7).unwrap(), t);
    }

    #[test]
    fn overlapping_segments_pass_at_twice_the_overlap() {
        for overlap in 1..=2 {
            for seed in 0..4 {
                let p = TreeParams { vertices: 60, segments: 24, colors: 3, overlap };
                let sys = gen_tree_segments(&p, seed).unwrap().system().unwrap();
                let report = crate::axioms::check_axioms(&sys, sys.theta());
                assert!(report.passes(), "overlap {overlap} seed {seed}: {:?}", report.failing());
            }
        }
    }
}
