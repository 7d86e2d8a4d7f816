//! Graph products of `ℤ` acting on cosets of star subgroups.
//!
//! Coordinate `i` consists of the cosets `g · A_{st(i)}`. Two cosets of different
//! coordinates are inactive exactly when the conjugates `g a_i g⁻¹` and `h a_j h⁻¹` commute.
//! The projection coordinate of `X = h·A_{st(j)}` on `Y = g·A_{st(i)}` is the `a_i`-exponent
//! of the `A_{st(i)}`-prefix of `g⁻¹h`, and `d^π_Y(X,Z) = D · |p_Y(X) − p_Y(Z)|`.
//! The rotation group of `Y` is generated by `g a_i^q g⁻¹`.
//!
//! The finite system is the truncation to cosets whose shortest representative has cost at
//! most `radius`, where an exponent `kq + r` (with `|r| ≤ q/2`) costs `|k| + |r|` and only
//! residues with `|r| ≤ max_offset` are allowed.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::axioms::{check_axioms, AxiomReport};
use crate::error::{Error, Result};
use crate::group::{GraphProduct, GroupWord};
use crate::ladder::{calibrate_constants, ConstantLadder};
use crate::metrics::{certify_raw, DerivedMetrics, Space};
use crate::rational::{self, int, Rational};
use crate::system::{CompositeSystem, ElementId, ProjectionSource};

/// Parameters of a graph-product model.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphProductParams {
    pub m: usize,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    /// Rotation exponent; derived from the calibrated ladder when absent.
    #[serde(default)]
    pub q: Option<i64>,
    #[serde(with = "rational", default = "rational::one")]
    pub weight: Rational,
    pub radius: u32,
    #[serde(default)]
    pub max_offset: u32,
    /// Radius of the `q`-independent truncation used to certify axioms and constants.
    #[serde(default = "default_verify_radius")]
    pub verify_radius: u32,
}

fn default_verify_radius() -> u32 {
    3
}

impl GraphProductParams {
    /// Free product of two copies of `ℤ`.
    pub fn free_product(radius: u32) -> Self {
        GraphProductParams {
            m: 2,
            edges: vec![],
            q: None,
            weight: rational::one(),
            radius,
            max_offset: 0,
            verify_radius: 3,
        }
    }

    /// Three generators with `a1` and `a2` commuting.
    pub fn one_edge_three(radius: u32) -> Self {
        GraphProductParams { m: 3, edges: vec![(1, 2)], ..Self::free_product(radius) }
    }
}

/// A coset `rep · A_{st(coord)}` with its shortest representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coset {
    pub coord: usize,
    pub rep: GroupWord,
}

struct CosetProjection {
    group: GraphProduct,
    cosets: Arc<Vec<Coset>>,
    inverse: Vec<GroupWord>,
}

impl ProjectionSource for CosetProjection {
    fn projection(&self, y: usize, x: usize) -> Option<i64> {
        if y == x {
            return None;
        }
        let u = self.group.mul(&self.inverse[y], &self.cosets[x].rep);
        Some(self.group.star_prefix_exponent(&u, self.cosets[y].coord))
    }
}

/// Cost of a word: `Σ |k| + |r|` over syllables `kq + r`, or `None` when a residue exceeds
/// `max_offset`.
pub fn word_cost(w: &GroupWord, q: i64, max_offset: u32) -> Option<u64> {
    let mut total = 0u64;
    for &(_, e) in w.syllables() {
        let mut k = e.div_euclid(q);
        let mut r = e.rem_euclid(q);
        if 2 * r > q {
            k += 1;
            r -= q;
        }
        if r.unsigned_abs() > u64::from(max_offset) {
            return None;
        }
        total += k.unsigned_abs() + r.unsigned_abs();
    }
    Some(total)
}

/// Cosets of every coordinate whose shortest representative has cost at most `radius`,
/// sorted by coordinate, cost and representative.
pub fn truncation(group: &GraphProduct, q: i64, radius: u32, max_offset: u32) -> Vec<Coset> {
    let mut steps = Vec::new();
    for l in 1..=group.m() {
        steps.push(GroupWord::letter(l, q));
        steps.push(GroupWord::letter(l, -q));
        if max_offset > 0 && q > 1 {
            steps.push(GroupWord::letter(l, 1));
            steps.push(GroupWord::letter(l, -1));
        }
    }
    let mut seen: HashSet<GroupWord> = HashSet::from([GroupWord::identity()]);
    let mut frontier = vec![GroupWord::identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &steps {
                let h = group.mul(g, s);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    let mut cosets: BTreeSet<(usize, u64, GroupWord)> = BTreeSet::new();
    for g in &seen {
        if word_cost(g, q, max_offset).is_none_or(|c| c > u64::from(radius)) {
            continue;
        }
        for i in 1..=group.m() {
            let rep = group.coset_rep(g, i);
            let c = word_cost(&rep, q, max_offset).expect("sub-word of an admissible word");
            cosets.insert((i, c, rep));
        }
    }
    cosets.into_iter().map(|(coord, _, rep)| Coset { coord, rep }).collect()
}

/// Whether two cosets are active with each other.
pub fn cosets_active(group: &GraphProduct, a: &Coset, b: &Coset) -> bool {
    if a.coord == b.coord || !group.commute(a.coord, b.coord) {
        return true;
    }
    let u = group.mul(&group.inv(&a.rep), &b.rep);
    !group.in_double_coset(&u, a.coord, b.coord)
}

fn build_system(
    group: &GraphProduct,
    cosets: Vec<Coset>,
    weight: &Rational,
    q: i64,
) -> Result<(CompositeSystem, Arc<Vec<Coset>>, HashMap<Coset, usize>)> {
    let m = group.m();
    let mut ids = Vec::with_capacity(cosets.len());
    let mut next = vec![0u64; m + 1];
    for c in &cosets {
        ids.push(ElementId::new(c.coord, next[c.coord]));
        next[c.coord] += 1;
    }
    let labels = cosets.iter().map(|c| format!("{}·A{}", c.rep.render(q), c.coord)).collect();
    let cosets = Arc::new(cosets);
    let source = CosetProjection {
        group: group.clone(),
        inverse: cosets.iter().map(|c| group.inv(&c.rep)).collect(),
        cosets: cosets.clone(),
    };
    let cs = cosets.clone();
    let sys = CompositeSystem::from_projection(
        m,
        rational::zero(),
        ids,
        |a, b| cosets_active(group, &cs[a], &cs[b]),
        weight.clone(),
        Arc::new(source),
        Vec::new(),
        labels,
    )?;
    let index = cosets.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    Ok((sys, cosets, index))
}

/// Certification data produced on the `q`-independent truncation.
#[derive(Clone, Debug, Serialize)]
pub struct Certification {
    pub verify_radius: u32,
    pub elements: usize,
    pub axioms: AxiomReport,
    pub ladder: ConstantLadder,
}

/// A graph product, its rotation exponent, and the truncated composite projection system.
pub struct GraphProductModel {
    params: GraphProductParams,
    q: i64,
    group: GraphProduct,
    quotient: GraphProduct,
    cosets: Arc<Vec<Coset>>,
    index: HashMap<Coset, usize>,
    system: CompositeSystem,
    metrics: DerivedMetrics,
    certification: Certification,
}

impl std::fmt::Debug for GraphProductModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphProductModel")
            .field("m", &self.params.m)
            .field("edges", &self.params.edges)
            .field("q", &self.q)
            .field("elements", &self.system.len())
            .finish()
    }
}

impl GraphProductModel {
    /// Builds the model, refusing rotation exponents with `D·q − Θ_P < Θ_Rot`.
    pub fn new(params: GraphProductParams) -> Result<Self> {
        Self::build(params, true)
    }

    /// Builds the model without the rotation-size requirement.
    pub fn new_unrestricted(params: GraphProductParams) -> Result<Self> {
        Self::build(params, false)
    }

    fn build(params: GraphProductParams, enforce_rotation: bool) -> Result<Self> {
        if params.m == 0 {
            return Err(Error::InvalidInstance("graph product needs a generator".into()));
        }
        if !params.weight.is_positive() {
            return Err(Error::InvalidInstance("projection weight must be positive".into()));
        }
        let group = GraphProduct::new(params.m, &params.edges)?;

        let vr = params.verify_radius.min(params.radius.max(1));
        let (vsys, _, _) = build_system(&group, truncation(&group, 1, vr, 0), &params.weight, 1)?;
        vsys.precompute_rows();
        let axioms = check_axioms(&vsys, vsys.theta());
        if !axioms.passes() {
            return Err(Error::Invariant(format!(
                "graph product fails {:?} on its certification truncation",
                axioms.failing()
            )));
        }
        let certificate = certify_raw(&vsys, &format!("q-independent truncation of radius {vr}"))?;
        let exact = DerivedMetrics::exact(&vsys);
        let ladder = calibrate_constants(&Space::new(&vsys, &exact))?;

        let q = match params.q {
            Some(q) if q >= 1 => q,
            Some(q) => return Err(Error::InvalidInstance(format!("rotation exponent {q} must be positive"))),
            None => rational::ceil_int(&(&ladder.theta_rot + &ladder.theta_p))
                .to_i64()
                .ok_or_else(|| Error::InvalidInstance("derived rotation exponent overflows".into()))?
                .checked_add(1)
                .expect("small"),
        };
        if enforce_rotation && &params.weight * int(q) - &ladder.theta_p < ladder.theta_rot {
            return Err(Error::InvalidInstance(format!(
                "rotation exponent {q} is too small: D·q − Θ_P must reach Θ_Rot = {}",
                ladder.theta_rot
            )));
        }
        let (system, cosets, index) =
            build_system(&group, truncation(&group, q, params.radius, params.max_offset), &params.weight, q)?;
        system.precompute_rows();
        Ok(GraphProductModel {
            quotient: group.quotient(q),
            certification: Certification { verify_radius: vr, elements: vsys.len(), axioms, ladder },
            params,
            q,
            group,
            cosets,
            index,
            system,
            metrics: DerivedMetrics::raw(certificate),
        })
    }

    pub fn params(&self) -> &GraphProductParams {
        &self.params
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn group(&self) -> &GraphProduct {
        &self.group
    }

    pub fn quotient(&self) -> &GraphProduct {
        &self.quotient
    }

    pub fn system(&self) -> &CompositeSystem {
        &self.system
    }

    pub fn metrics(&self) -> &DerivedMetrics {
        &self.metrics
    }

    pub fn space(&self) -> Space<'_> {
        Space::new(&self.system, &self.metrics)
    }

    pub fn ladder(&self) -> &ConstantLadder {
        &self.certification.ladder
    }

    pub fn certification(&self) -> &Certification {
        &self.certification
    }

    pub fn weight(&self) -> &Rational {
        &self.params.weight
    }

    pub fn coset(&self, p: usize) -> &Coset {
        &self.cosets[p]
    }

    pub fn position(&self, c: &Coset) -> Option<usize> {
        self.index.get(c).copied()
    }

    /// The coset `g · A_{st(i)}`.
    pub fn coset_of(&self, g: &GroupWord, i: usize) -> Coset {
        Coset { coord: i, rep: self.group.coset_rep(g, i) }
    }

    /// Image of a coset under left multiplication.
    pub fn act(&self, w: &GroupWord, c: &Coset) -> Coset {
        self.coset_of(&self.group.mul(w, &c.rep), c.coord)
    }

    /// Image of a truncation element, or `None` when it leaves the truncation.
    pub fn act_pos(&self, w: &GroupWord, p: usize) -> Option<usize> {
        self.position(&self.act(w, &self.cosets[p]))
    }

    pub fn active(&self, a: &Coset, b: &Coset) -> bool {
        cosets_active(&self.group, a, b)
    }

    /// Projection coordinate of `x` on `y`, `None` when `x = y` or they are inactive.
    pub fn proj(&self, y: &Coset, x: &Coset) -> Option<i64> {
        if x == y || !self.active(x, y) {
            return None;
        }
        let u = self.group.mul(&self.group.inv(&y.rep), &x.rep);
        Some(self.group.star_prefix_exponent(&u, y.coord))
    }

    /// `d^π_Y(X,Z)` on arbitrary cosets; equal to `d^∢_Y(X,Z)` by the raw certificate.
    pub fn dist(&self, y: &Coset, x: &Coset, z: &Coset) -> Option<Rational> {
        let (px, pz) = (self.proj(y, x)?, self.proj(y, z)?);
        Some(self.weight() * int((px - pz).abs()))
    }

    /// Generator `g a_i^q g⁻¹` of the rotation group of `g · A_{st(i)}`.
    pub fn rotation(&self, y: &Coset) -> GroupWord {
        self.rotation_power(y, 1)
    }

    pub fn rotation_power(&self, y: &Coset, k: i64) -> GroupWord {
        let e = k.checked_mul(self.q).expect("exponent overflow");
        self.group.conj(&y.rep, &GroupWord::letter(y.coord, e))
    }

    /// Cost of a coset's representative, `None` when a residue exceeds the offset bound.
    pub fn cost(&self, c: &Coset) -> Option<u64> {
        word_cost(&c.rep, self.q, self.params.max_offset)
    }

    /// Truncation positions whose cost is at most `max_cost`, in position order.
    pub fn sample(&self, max_cost: u64) -> Vec<usize> {
        (0..self.cosets.len()).filter(|&p| self.cost(&self.cosets[p]).is_some_and(|c| c <= max_cost)).collect()
    }

    /// Base coset `A_{st(i)}`.
    pub fn base(&self, i: usize) -> Coset {
        Coset { coord: i, rep: GroupWord::identity() }
    }

    pub fn label(&self, c: &Coset) -> String {
        format!("{}·A{}", c.rep.render(self.q), c.coord)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_balances_residues() {
        let w = GroupWord(vec![(1, 10), (2, -7), (1, 3)]);
        assert_eq!(word_cost(&w, 5, 2), Some(2 + 3 + 3));
        assert_eq!(word_cost(&w, 5, 1), None);
        assert_eq!(word_cost(&GroupWord(vec![(1, 15)]), 5, 0), Some(3));
    }

    #[test]
    fn free_product_truncation_sizes() {
        let g = GraphProduct::new(2, &[]).unwrap();
        // Alternating words in powers of a1^q, a2^q ending in a2, by total |exponent| / q.
        let t = truncation(&g, 7, 3, 0);
        let per = |i| t.iter().filter(|c| c.coord == i).count();
        assert_eq!(per(1), 1 + 2 + 6 + 18);
        assert_eq!(per(1), per(2));
    }

    #[test]
    fn free_product_model_constants() {
        let model = GraphProductModel::new(GraphProductParams::free_product(2)).unwrap();
        let l = model.ladder();
        assert_eq!((l.kappa.clone(), l.big_theta.clone()), (int(0), int(1)));
        assert_eq!(model.q(), 4025 + 1001 + 1);
        let sys = model.system();
        let a2 = model.position(&model.base(2)).unwrap();
        let x = model.position(&model.base(1)).unwrap();
        let g = model.group().word(&[(1, model.q())]).unwrap();
        let z = model.position(&model.coset_of(&g, 2)).unwrap();
        assert_eq!(sys.dpi(x, a2, z), Some(int(model.q())));
    }
}
