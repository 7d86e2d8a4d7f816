//! The bipartite tree of an unfolding step and its embedding into the projection geometry.
//!
//! White vertices are translates `g·W^s_{j0}` of the principal slice, black vertices are
//! translates `g·R` of osculators. The tree is grown breadth first from the slice itself, and
//! every black vertex is checked to separate its subtrees by the expected distances.

use std::collections::{HashSet, VecDeque};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupWord;
use crate::models::graph_product::{Coset, GraphProductModel};
use crate::rational::{self, int, Rational};
use crate::rotors::family::Check;

#[derive(Clone, Debug)]
pub struct TreeOptions {
    /// Number of black layers grown from the root.
    pub depth: usize,
    /// Rotations `ρ_R^t` with `1 ≤ |t| ≤ exponent` are used to leave a black vertex.
    pub exponent: i64,
    /// Slice and osculator elements within this cost of the cheapest one are sampled.
    pub sample_cost: u64,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions { depth: 2, exponent: 1, sample_cost: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeVertex {
    pub color: Color,
    /// Translating element `g`.
    pub word: GroupWord,
    /// The osculator `g·R` of a black vertex.
    pub osculator: Option<Coset>,
    pub parent: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeEstimates {
    pub whites: usize,
    pub blacks: usize,
    /// No two vertices have the same image.
    pub injective: bool,
    #[serde(with = "rational")]
    pub lower_bound: Rational,
    #[serde(with = "rational")]
    pub upper_bound: Rational,
    /// Pairs in different branches at a black vertex.
    pub lower: Check,
    /// Pairs in the same branch.
    pub upper: Check,
    #[serde(with = "rational::opt")]
    pub min_lower: Option<Rational>,
    #[serde(with = "rational::opt")]
    pub max_upper: Option<Rational>,
    /// Pairs skipped because an element coincides with the black vertex or is inactive with it.
    pub skipped: u64,
}

impl TreeEstimates {
    pub fn passes(&self) -> bool {
        self.injective && self.lower.passes() && self.upper.passes()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrincipalTree {
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<(usize, usize)>,
    /// Sampled image of each vertex.
    pub images: Vec<Vec<Coset>>,
    pub estimates: TreeEstimates,
}

fn cheapest(model: &GraphProductModel, ps: &[usize], slack: u64) -> Vec<Coset> {
    let costs: Vec<u64> = ps.iter().map(|&p| model.cost(model.coset(p)).unwrap_or(u64::MAX)).collect();
    let Some(&low) = costs.iter().min() else { return vec![] };
    ps.iter()
        .zip(&costs)
        .filter(|(_, &c)| c <= low.saturating_add(slack))
        .map(|(&p, _)| model.coset(p).clone())
        .collect()
}

/// Grows the principal tree for the slice `slice` (positions of `W^s_{j0}`) and the osculators
/// `osculators` (positions of `𝓡`).
pub fn principal_tree(
    model: &GraphProductModel,
    slice: &[usize],
    osculators: &[usize],
    opts: &TreeOptions,
) -> Result<PrincipalTree> {
    if slice.is_empty() || osculators.is_empty() {
        return Err(Error::Precondition("principal tree needs a slice and an osculator".into()));
    }
    let grp = model.group();
    let full_slice: Vec<Coset> = slice.iter().map(|&p| model.coset(p).clone()).collect();
    let slice_sample = cheapest(model, slice, opts.sample_cost);
    let osc_sample = cheapest(model, osculators, opts.sample_cost);

    let white_key = |g: &GroupWord| {
        let mut k: Vec<Coset> = full_slice.iter().map(|c| model.act(g, c)).collect();
        k.sort();
        k
    };
    let mut vertices = vec![TreeVertex { color: Color::White, word: GroupWord::identity(), osculator: None, parent: None }];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    for _ in 0..opts.depth {
        let mut blacks = Vec::new();
        for &w in &frontier {
            let g = vertices[w].word.clone();
            let back = vertices[w].parent.and_then(|b| vertices[b].osculator.clone());
            for r in &osc_sample {
                let gr = model.act(&g, r);
                if Some(&gr) == back.as_ref() {
                    continue;
                }
                vertices.push(TreeVertex { color: Color::Black, word: g.clone(), osculator: Some(gr), parent: Some(w) });
                edges.push((w, vertices.len() - 1));
                blacks.push((vertices.len() - 1, r.clone()));
            }
        }
        frontier.clear();
        for (b, r) in blacks {
            let g = vertices[b].word.clone();
            for t in (-opts.exponent..=opts.exponent).filter(|&t| t != 0) {
                let word = grp.mul(&g, &model.rotation_power(&r, t));
                vertices.push(TreeVertex { color: Color::White, word, osculator: None, parent: Some(b) });
                edges.push((b, vertices.len() - 1));
                frontier.push(vertices.len() - 1);
            }
        }
    }

    let mut seen_white = HashSet::new();
    let mut seen_black = HashSet::new();
    let mut injective = true;
    for v in &vertices {
        injective &= match v.color {
            Color::White => seen_white.insert(white_key(&v.word)),
            Color::Black => seen_black.insert(v.osculator.clone().unwrap()),
        };
    }
    let images: Vec<Vec<Coset>> = vertices
        .iter()
        .map(|v| match v.color {
            Color::White => slice_sample.iter().map(|c| model.act(&v.word, c)).collect(),
            Color::Black => vec![v.osculator.clone().unwrap()],
        })
        .collect();

    let estimates = estimate(model, &vertices, &edges, &images, injective);
    Ok(PrincipalTree { vertices, edges, images, estimates })
}

fn estimate(
    model: &GraphProductModel,
    vertices: &[TreeVertex],
    edges: &[(usize, usize)],
    images: &[Vec<Coset>],
    injective: bool,
) -> TreeEstimates {
    let ladder = model.ladder();
    let weight = model.weight();
    let lower_bound = &ladder.theta_rot - int(2) * &ladder.theta_p - &ladder.kappa;
    let upper_bound = int(2) * &ladder.theta_p + int(3) * &ladder.kappa;
    let lower_steps = rational::ceil_int(&(&lower_bound / weight)).to_i64().unwrap_or(i64::MAX);
    let upper_steps = (&upper_bound / weight).floor().to_integer().to_i64().unwrap_or(i64::MAX);
    let n = vertices.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let whites: Vec<usize> = (0..n).filter(|&v| vertices[v].color == Color::White).collect();
    let mut lower = Check::default();
    let mut upper = Check::default();
    let (mut min_lower, mut max_upper): (Option<i64>, Option<i64>) = (None, None);
    let mut skipped = 0u64;
    for v in (0..n).filter(|&v| vertices[v].color == Color::Black) {
        let center = vertices[v].osculator.as_ref().unwrap();
        let mut branch = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for &u in &adj[v] {
            branch[u] = u;
            queue.push_back(u);
        }
        branch[v] = v;
        while let Some(u) = queue.pop_front() {
            for &x in &adj[u] {
                if branch[x] == usize::MAX {
                    branch[x] = branch[u];
                    queue.push_back(x);
                }
            }
        }
        let values: Vec<(usize, Vec<Option<i64>>)> = whites
            .iter()
            .map(|&w| (branch[w], images[w].iter().map(|c| model.proj(center, c)).collect()))
            .collect();
        for (a, (ba, va)) in values.iter().enumerate() {
            for (bb, vb) in &values[a..] {
                for (ia, pa) in va.iter().enumerate() {
                    for (ib, pb) in vb.iter().enumerate() {
                        if std::ptr::eq(va, vb) && ib < ia {
                            continue;
                        }
                        let (Some(pa), Some(pb)) = (pa, pb) else {
                            skipped += 1;
                            continue;
                        };
                        let diff = (pa - pb).abs();
                        if ba == bb {
                            max_upper = max_upper.max(Some(diff));
                            upper.record(1, diff <= upper_steps, || format!("{} sees {diff} steps within a branch", model.label(center)));
                        } else {
                            min_lower = Some(min_lower.map_or(diff, |m| m.min(diff)));
                            lower.record(1, diff >= lower_steps, || format!("{} sees {diff} steps across branches", model.label(center)));
                        }
                    }
                }
            }
        }
    }
    TreeEstimates {
        whites: whites.len(),
        blacks: n - whites.len(),
        injective,
        lower_bound,
        upper_bound,
        lower,
        upper,
        min_lower: min_lower.map(|d| weight * int(d)),
        max_upper: max_upper.map(|d| weight * int(d)),
        skipped,
    }
}

impl PrincipalTree {
    pub fn to_dot(&self, model: &GraphProductModel) -> String {
        let mut out = String::from("graph principal_tree {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let (label, style) = match v.color {
                Color::White => (format!("{}·W", v.word.render(model.q())), "fillcolor=white"),
                Color::Black => (model.label(v.osculator.as_ref().unwrap()), "fillcolor=black, fontcolor=white"),
            };
            let color = if v.color == Color::White { "white" } else { "black" };
            out.push_str(&format!("  n{i} [label=\"{label}\", style=filled, {style}, bipartite={color}];\n"));
        }
        for (a, b) in &self.edges {
            out.push_str(&format!("  n{a} -- n{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::graph_product::GraphProductParams;

    #[test]
    fn free_product_tree() {
        let model = GraphProductModel::new(GraphProductParams::free_product(3)).unwrap();
        let q = model.q();
        let osc: Vec<usize> = model
            .system()
            .coord_range(2)
            .filter(|&p| model.coset(p).rep.syllables().iter().all(|&(l, _)| l == 1))
            .collect();
        assert_eq!(osc.len(), 7);
        let t = principal_tree(&model, &osc, &osc, &TreeOptions::default()).unwrap();
        let e = &t.estimates;
        assert!(e.passes(), "{e:?}");
        assert_eq!((e.whites, e.blacks), (1 + 6 + 24, 3 + 12));
        assert_eq!(e.min_lower, Some(int(q)));
        assert_eq!(e.max_upper, Some(rational::zero()));
        assert!(t.to_dot(&model).contains("bipartite=black"));
    }
}
