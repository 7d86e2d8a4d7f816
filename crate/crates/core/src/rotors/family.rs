//! Rotation groups `Γ_Y = ⟨g a_i^q g⁻¹⟩` attached to the elements of a graph-product model,
//! together with exhaustive checks of the rotating-family conditions on the truncation.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupWord;
use crate::models::graph_product::{Coset, GraphProductModel};
use crate::order::standard_order;
use crate::rational::{self, int, Rational};

/// Image of a truncation element under a group element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Image {
    /// The image lies in the truncation, at this position.
    Inside(usize),
    /// The image leaves the truncation.
    Boundary(Coset),
}

/// Applies a normal-form word to the element at position `y`.
pub fn apply_group(model: &GraphProductModel, w: &GroupWord, y: usize) -> Result<Image> {
    model.group().validate(w.syllables()).map_err(|e| Error::MalformedWord(e.to_string()))?;
    if model.group().normal_form(w.syllables()) != *w {
        return Err(Error::MalformedWord(format!("{w} is not in normal form")));
    }
    let c = model.act(w, model.coset(y));
    Ok(match model.position(&c) {
        Some(p) => Image::Inside(p),
        None => Image::Boundary(c),
    })
}

/// Counts for one family condition.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Check {
    pub checked: u64,
    pub failures: u64,
    pub inconclusive: u64,
    /// Checks whose images left the truncation and were evaluated on cosets.
    pub outside_truncation: u64,
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn passes(&self) -> bool {
        self.failures == 0 && self.inconclusive == 0
    }

    pub(crate) fn record(&mut self, n: u64, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += n;
        if !ok {
            self.failures += n;
            if self.witnesses.len() < 8 {
                self.witnesses.push(witness());
            }
        }
    }
}

/// Results of [`RotatingFamily::verify`].
#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub q: i64,
    /// `Γ_{gX} = g Γ_X g⁻¹`.
    pub conjugation: Check,
    /// Rotation groups of inactive elements commute.
    pub commutation: Check,
    /// `p_Y(ρ_Y^k Z) = p_Y(Z) + kq`.
    pub shift: Check,
    /// `d_Y(X,Z) ≤ Θ_P` forces `d_Y(X, γZ) ≥ Θ_Rot` for nontrivial `γ ∈ Γ_Y`.
    pub rotation_bound: Check,
    /// `Γ_Y` fixes `Y` and every element inactive with `Y`.
    pub fixes_inactive: Check,
    /// `Γ_Y` preserves `d^∢_X` at elements `X` inactive with `Y`, and `G` acts by isometries.
    pub equivariance: Check,
}

impl FamilyReport {
    pub fn passes(&self) -> bool {
        [&self.conjugation, &self.commutation, &self.shift, &self.rotation_bound, &self.fixes_inactive, &self.equivariance]
            .iter()
            .all(|c| c.passes())
    }
}

#[derive(Clone, Debug)]
pub struct FamilyOptions {
    /// Nonzero exponents `k` of `ρ_Y^k` tried in the rotation bound.
    pub exponents: Vec<i64>,
    /// Cost bound of the sample used by the equivariance spot checks.
    pub sample_cost: u64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions { exponents: vec![-3, -2, -1, 1, 2, 3], sample_cost: 1 }
    }
}

/// The finite set `F(N)` of rotations moving some active element by at most `N`.
#[derive(Clone, Debug, Serialize)]
pub struct Isotropy {
    /// `F(N) = {ρ_X^k : |k| ≤ window}`.
    pub window: i64,
    pub exponents: Vec<i64>,
    /// Exponents outside the window were confirmed to move every sampled element by more than `N`.
    pub cross_checked: bool,
}

/// Result of the transfer lemma.
#[derive(Clone, Debug, Serialize)]
pub struct Transfer {
    pub exponent: i64,
    pub gamma: GroupWord,
    pub chosen: Coset,
    /// Whether `γX'` was chosen instead of `X'`.
    pub moved: bool,
}

/// Ellipticity of `G_X` on `P_K(𝕐_j)`.
#[derive(Clone, Debug, Serialize)]
pub struct Ellipticity {
    pub set: Vec<usize>,
    pub diameter: usize,
    pub holds: bool,
    pub trivial: bool,
    /// Images of the set under `ρ_X^{±1}` that stayed inside the set (and those that left the truncation).
    pub invariance: Check,
}

/// The rotating family of a graph-product model.
#[derive(Clone, Copy, Debug)]
pub struct RotatingFamily<'a> {
    model: &'a GraphProductModel,
}

impl<'a> RotatingFamily<'a> {
    pub fn new(model: &'a GraphProductModel) -> Self {
        RotatingFamily { model }
    }

    pub fn model(&self) -> &'a GraphProductModel {
        self.model
    }

    pub fn generator(&self, y: &Coset) -> GroupWord {
        self.model.rotation(y)
    }

    /// `k` with `g = ρ_Y^k`, if `g ∈ Γ_Y`.
    pub fn exponent_in(&self, y: &Coset, g: &GroupWord) -> Option<i64> {
        let grp = self.model.group();
        let u = grp.mul_all(&[&grp.inv(&y.rep), g, &y.rep]);
        match u.syllables() {
            [] => Some(0),
            [(l, e)] if *l == y.coord && e % self.model.q() == 0 => Some(e / self.model.q()),
            _ => None,
        }
    }

    /// `d^∢_Y(X,Z)` on arbitrary cosets.
    pub fn angle(&self, y: &Coset, x: &Coset, z: &Coset) -> Option<Rational> {
        self.model.dist(y, x, z)
    }

    /// Checks every rotating-family condition on the truncation.
    pub fn verify(&self, opts: &FamilyOptions) -> FamilyReport {
        let m = self.model;
        let sys = m.system();
        let grp = m.group();
        let n = sys.len();
        let q = m.q();
        let rot: Vec<GroupWord> = (0..n).map(|p| m.rotation(m.coset(p))).collect();
        let lab = |c: &Coset| m.label(c);

        let mut conjugation = Check::default();
        let mut letters = Vec::new();
        for l in 1..=sys.m() {
            for e in [q, -q, 1, -1] {
                letters.push(GroupWord::letter(l, e));
            }
        }
        for p in 0..n {
            let x = m.coset(p);
            for g in &letters {
                let gx = m.act(g, x);
                if m.position(&gx).is_none() {
                    conjugation.outside_truncation += 1;
                }
                let ok = m.rotation(&gx) == grp.conj(g, &rot[p]);
                conjugation.record(1, ok, || format!("{} by {g}", lab(x)));
            }
        }

        let mut commutation = Check::default();
        for a in 0..n {
            for b in a + 1..n {
                if sys.coord(a) != sys.coord(b) && !sys.is_active(a, b) {
                    let ok = grp.commutes(&rot[a], &rot[b]);
                    commutation.record(1, ok, || format!("{} and {}", lab(m.coset(a)), lab(m.coset(b))));
                }
            }
        }

        let (shift, rotation_bound) = self.rotation_bound(&opts.exponents);

        let mut fixes_inactive = Check::default();
        for y in 0..n {
            let cy = m.coset(y);
            for g in [rot[y].clone(), grp.inv(&rot[y])] {
                fixes_inactive.record(1, m.act(&g, cy) == *cy, || format!("{} moves itself", lab(cy)));
                for x in 0..n {
                    if x != y && !sys.is_active(x, y) {
                        let cx = m.coset(x);
                        fixes_inactive.record(1, m.act(&g, cx) == *cx, || format!("Γ of {} moves {}", lab(cy), lab(cx)));
                    }
                }
            }
        }

        let equivariance = self.equivariance(opts.sample_cost, &rot);

        FamilyReport { q, conjugation, commutation, shift, rotation_bound, fixes_inactive, equivariance }
    }

    fn rotation_bound(&self, exponents: &[i64]) -> (Check, Check) {
        let m = self.model;
        let sys = m.system();
        let ladder = m.ladder();
        let q = m.q();
        let weight = m.weight();
        let near = rational::ceil_int(&(&ladder.theta_p / weight)).to_i64().unwrap_or(i64::MAX);
        let exps: Vec<i64> = exponents.iter().copied().filter(|&k| k != 0).collect();
        let mut shift = Check::default();
        let mut bound = Check::default();
        for y in 0..sys.len() {
            let cy = m.coset(y);
            let mut classes: BTreeMap<i64, (usize, u64)> = BTreeMap::new();
            for x in sys.coord_range(sys.coord(y)) {
                if let Some(v) = sys.proj(y, x) {
                    classes.entry(v).or_insert((x, 0)).1 += 1;
                }
            }
            for (&v, &(rep, count)) in &classes {
                for &k in &exps {
                    let gz = m.act(&m.rotation_power(cy, k), m.coset(rep));
                    if m.position(&gz).is_none() {
                        shift.outside_truncation += count;
                    }
                    let ok = m.proj(cy, &gz) == Some(v + k * q);
                    shift.record(count, ok, || format!("ρ^{k} of {} seen from {}", m.label(m.coset(rep)), m.label(cy)));
                }
            }
            for (&v1, &(_, c1)) in &classes {
                for (&v2, &(_, c2)) in &classes {
                    if weight * int((v1 - v2).abs()) > ladder.theta_p || (v1 - v2).abs() > near {
                        continue;
                    }
                    for &k in &exps {
                        let d = weight * int((v1 - v2 - k * q).abs());
                        bound.record(c1 * c2, d >= ladder.theta_rot, || {
                            format!("values {v1}, {v2}, k = {k} at {}: distance {d}", m.label(cy))
                        });
                    }
                }
            }
        }
        (shift, bound)
    }

    fn equivariance(&self, sample_cost: u64, rot: &[GroupWord]) -> Check {
        let m = self.model;
        let sys = m.system();
        let q = m.q();
        let sample = m.sample(sample_cost);
        let mut check = Check::default();
        for &y in &sample {
            let cy = m.coset(y);
            for x in 0..sys.len() {
                if x == y || sys.is_active(x, y) {
                    continue;
                }
                let cx = m.coset(x);
                let act: Vec<usize> = sample.iter().copied().filter(|&w| w != x && sys.is_active(w, x)).collect();
                for &a in &act {
                    for &b in &act {
                        let (ca, cb) = (m.coset(a), m.coset(b));
                        let before = m.dist(cx, ca, cb);
                        let after = m.dist(cx, &m.act(&rot[y], ca), &m.act(&rot[y], cb));
                        check.record(1, before == after, || {
                            format!("Γ of {} changes d at {} on {}, {}", m.label(cy), m.label(cx), m.label(ca), m.label(cb))
                        });
                    }
                }
            }
        }
        let mut letters = Vec::new();
        for l in 1..=sys.m() {
            letters.push(GroupWord::letter(l, q));
            letters.push(GroupWord::letter(l, -q));
        }
        for &y in &sample {
            let cy = m.coset(y);
            let act: Vec<usize> = sample.iter().copied().filter(|&w| w != y && sys.is_active(w, y)).collect();
            for g in &letters {
                let gy = m.act(g, cy);
                for &a in &act {
                    for &b in &act {
                        let (ca, cb) = (m.coset(a), m.coset(b));
                        let ok = m.dist(cy, ca, cb) == m.dist(&gy, &m.act(g, ca), &m.act(g, cb));
                        check.record(1, ok, || format!("{g} changes d at {} on {}, {}", m.label(cy), m.label(ca), m.label(cb)));
                    }
                }
            }
        }
        check
    }

    /// `F(N)` for `X`: the rotations `ρ_X^k` with `D·|k|·q ≤ N`.
    pub fn isotropy(&self, x: &Coset, n: &Rational) -> Isotropy {
        let m = self.model;
        let step = m.weight() * int(m.q());
        let window = (n / &step).floor().to_integer().to_i64().unwrap_or(i64::MAX);
        let samples: Vec<Coset> = m
            .sample(1)
            .into_iter()
            .map(|p| m.coset(p).clone())
            .filter(|c| c != x && m.active(c, x))
            .collect();
        let mut cross_checked = !samples.is_empty();
        for k in [window + 1, -(window + 1)] {
            let g = m.rotation_power(x, k);
            for y in &samples {
                if m.dist(x, y, &m.act(&g, y)).is_none_or(|d| d <= *n) {
                    cross_checked = false;
                }
            }
        }
        for k in [0, window, -window] {
            let g = m.rotation_power(x, k);
            if !samples.iter().all(|y| m.dist(x, y, &m.act(&g, y)).is_some_and(|d| d <= *n)) {
                cross_checked = false;
            }
        }
        Isotropy { window, exponents: (-window..=window).collect(), cross_checked }
    }

    /// For `Y ∈ Act(X)` and `X' ∈ Act(Y)`, finds `γ ∈ Γ_X ∖ F(10κ)` and an element
    /// `X'' ∈ {X', γX'}` with `d^∢_Y(X'', X) ≤ κ`.
    pub fn transfer(&self, y: &Coset, x: &Coset, x_prime: &Coset, budget: usize) -> Result<Transfer> {
        let m = self.model;
        let kappa = &m.ladder().kappa;
        if y == x || !m.active(y, x) {
            return Err(Error::Precondition(format!("{} is not active with {}", m.label(y), m.label(x))));
        }
        if x_prime == y || !m.active(x_prime, y) {
            return Err(Error::Precondition(format!("{} is not active with {}", m.label(x_prime), m.label(y))));
        }
        let window = self.isotropy(x, &(int(10) * kappa)).window;
        for k in (window + 1..).take(budget.max(1)) {
            let gamma = m.rotation_power(x, k);
            if m.dist(y, x_prime, x).is_some_and(|d| d <= *kappa) {
                return Ok(Transfer { exponent: k, gamma, chosen: x_prime.clone(), moved: false });
            }
            let moved = m.act(&gamma, x_prime);
            if m.dist(y, &moved, x).is_some_and(|d| d <= *kappa) {
                return Ok(Transfer { exponent: k, gamma, chosen: moved, moved: true });
            }
        }
        Err(Error::Precondition(format!(
            "no rotation of {} brings {} within κ of it at {}",
            m.label(x),
            m.label(x_prime),
            m.label(y)
        )))
    }

    /// `𝕐^i_M(X,Z)` over the truncation, in position order.
    pub fn between(&self, i: usize, level: &Rational, x: &Coset, z: &Coset) -> Vec<usize> {
        let m = self.model;
        m.system()
            .coord_range(i)
            .filter(|&p| {
                let c = m.coset(p);
                c != x && c != z && m.dist(c, x, z).is_some_and(|d| d >= *level)
            })
            .collect()
    }

    /// The order on `𝕐^i_M(X,Z)` induced through coordinate-`i` elements rotated far away.
    /// Two independent choices of auxiliary elements must induce the same order.
    pub fn induced_order(&self, x: &Coset, z: &Coset, i: usize, level: &Rational) -> Result<Vec<usize>> {
        let m = self.model;
        let ladder = m.ladder();
        let kappa = &ladder.kappa;
        let floor = &ladder.big_theta + int(12) * kappa;
        if *level < floor {
            return Err(Error::Precondition(format!("level {level} below Θ + 12κ = {floor}")));
        }
        if x == z || !m.active(x, z) {
            return Err(Error::Precondition(format!("{} is not active with {}", m.label(x), m.label(z))));
        }
        let target = self.between(i, level, x, z);
        if target.is_empty() {
            return Ok(target);
        }
        let proxies = |c: &Coset| -> Vec<Coset> {
            let mut out = Vec::new();
            if c.coord == i {
                out.push(c.clone());
            }
            out.extend(
                m.system().coord_range(i).map(|p| m.coset(p).clone()).filter(|o| o != c && m.active(o, c)).take(2),
            );
            out
        };
        let (px, pz) = (proxies(x), proxies(z));
        if px.is_empty() || pz.is_empty() {
            return Err(Error::Precondition(format!("no coordinate-{i} element active with both endpoints")));
        }
        let wx = self.isotropy(x, &(int(10) * kappa)).window;
        let wz = self.isotropy(z, &(int(10) * kappa)).window;
        let mut orders = Vec::new();
        for choice in 0..2 {
            let xi = &px[choice.min(px.len() - 1)];
            let zi = &pz[choice.min(pz.len() - 1)];
            let ex = m.act(&m.rotation_power(x, wx + 1 + choice as i64), xi);
            let ez = m.act(&m.rotation_power(z, wz + 1 + choice as i64), zi);
            let wide = self.between(i, &(level - int(4) * kappa), &ex, &ez);
            if let Some(&missing) = target.iter().find(|p| !wide.contains(p)) {
                return Err(Error::Invariant(format!(
                    "{} lies between {} and {} but not between the rotated proxies",
                    m.label(m.coset(missing)),
                    m.label(x),
                    m.label(z)
                )));
            }
            let set: Vec<Coset> = wide.iter().map(|&p| m.coset(p).clone()).collect();
            let chain = standard_order(ex.clone(), ez.clone(), &set, kappa, |a, b, c| m.dist(a, b, c))
                .map_err(|e| Error::Invariant(format!("induced order: {e}")))?;
            let order: Vec<usize> =
                chain.iter().filter_map(|c| m.position(c)).filter(|p| target.contains(p)).collect();
            orders.push(order);
        }
        if orders[0] != orders[1] {
            return Err(Error::Invariant("induced order depends on the auxiliary choices".into()));
        }
        Ok(orders.swap_remove(0))
    }

    /// `S = {Z ∈ 𝕐_j : 𝕐^j_{(K−κ)/2}(X,Z) = ∅}` and whether it has diameter at most one in `P_K(𝕐_j)`.
    pub fn ellipticity(&self, x: &Coset, j: usize, k: &Rational) -> Result<Ellipticity> {
        let m = self.model;
        let sys = m.system();
        let ladder = m.ladder();
        let floor = int(2) * &ladder.big_theta + &ladder.kappa;
        if *k <= floor {
            return Err(Error::Precondition(format!("K = {k} must exceed 2Θ + κ = {floor}")));
        }
        if j == x.coord {
            let set: Vec<usize> = m.position(x).into_iter().collect();
            return Ok(Ellipticity { set, diameter: 0, holds: true, trivial: true, invariance: Check::default() });
        }
        let half = (k - &ladder.kappa) / int(2);
        let set: Vec<usize> = sys
            .coord_range(j)
            .filter(|&z| {
                let cz = m.coset(z);
                cz == x || self.between(j, &half, x, cz).is_empty()
            })
            .collect();
        let rule = crate::complex::EdgeRule::new(m.space(), j, k);
        let mut diameter = usize::from(set.len() > 1);
        for (a, &u) in set.iter().enumerate() {
            for &v in &set[a + 1..] {
                if !rule.joined(u, v) {
                    diameter = 2;
                }
            }
        }
        let mut invariance = Check::default();
        for g in [m.rotation_power(x, 1), m.rotation_power(x, -1)] {
            for &z in &set {
                match m.act_pos(&g, z) {
                    Some(p) => invariance.record(1, set.contains(&p), || format!("{} leaves the set", m.label(m.coset(z)))),
                    None => invariance.outside_truncation += 1,
                }
            }
        }
        Ok(Ellipticity { holds: diameter <= 1 && invariance.passes(), set, diameter, trivial: false, invariance })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::graph_product::GraphProductParams;

    fn fp2(radius: u32) -> GraphProductModel {
        GraphProductModel::new(GraphProductParams::free_product(radius)).unwrap()
    }

    fn word(model: &GraphProductModel, raw: &[(usize, i64)]) -> GroupWord {
        model.group().normal_form(raw)
    }

    #[test]
    fn free_product_family_verifies() {
        let model = fp2(3);
        let fam = RotatingFamily::new(&model);
        let r = fam.verify(&FamilyOptions::default());
        assert!(r.passes(), "{r:?}");
        assert!(r.rotation_bound.checked > 0 && r.shift.outside_truncation > 0);
        assert_eq!(r.commutation.checked, 0);
    }

    #[test]
    fn unit_rotation_fails_the_bound() {
        let params = GraphProductParams { q: Some(1), ..GraphProductParams::free_product(2) };
        assert!(GraphProductModel::new(params.clone()).is_err());
        let model = GraphProductModel::new_unrestricted(params).unwrap();
        let r = RotatingFamily::new(&model).verify(&FamilyOptions::default());
        assert!(r.rotation_bound.failures > 0 && !r.rotation_bound.witnesses.is_empty());
        assert!(r.conjugation.passes() && r.shift.passes() && r.fixes_inactive.passes());
        let with_identity = FamilyOptions { exponents: vec![0, -3, -2, -1, 1, 2, 3], ..FamilyOptions::default() };
        let base = RotatingFamily::new(&model).verify(&FamilyOptions::default());
        let again = RotatingFamily::new(&model).verify(&with_identity);
        assert_eq!(base.rotation_bound, again.rotation_bound);
    }

    #[test]
    fn commuting_generators_family_verifies() {
        let model = GraphProductModel::new(GraphProductParams::one_edge_three(2)).unwrap();
        let r = RotatingFamily::new(&model).verify(&FamilyOptions::default());
        assert!(r.passes(), "{r:?}");
        assert!(r.commutation.checked > 0 && r.fixes_inactive.checked > 0);
    }

    #[test]
    fn apply_and_membership() {
        let model = fp2(2);
        let q = model.q();
        let fam = RotatingFamily::new(&model);
        let a1 = model.position(&model.base(1)).unwrap();
        let g = word(&model, &[(2, q)]);
        assert_eq!(apply_group(&model, &GroupWord::identity(), a1).unwrap(), Image::Inside(a1));
        let Image::Inside(p) = apply_group(&model, &g, a1).unwrap() else { panic!() };
        assert_eq!(model.coset(p).rep, g);
        let far = word(&model, &[(2, 5 * q)]);
        assert!(matches!(apply_group(&model, &far, a1).unwrap(), Image::Boundary(_)));
        assert!(matches!(apply_group(&model, &GroupWord(vec![(1, 1), (1, 1)]), a1), Err(Error::MalformedWord(_))));
        let y = model.coset(p).clone();
        assert_eq!(fam.exponent_in(&y, &model.rotation_power(&y, -3)), Some(-3));
        assert_eq!(fam.exponent_in(&y, &model.rotation(&model.base(1))), None);
    }

    #[test]
    fn isotropy_and_transfer() {
        let model = fp2(2);
        let fam = RotatingFamily::new(&model);
        let a1 = model.base(1);
        let iso = fam.isotropy(&a1, &rational::zero());
        assert_eq!((iso.window, iso.exponents.clone(), iso.cross_checked), (0, vec![0], true));
        let wide = fam.isotropy(&a1, &(int(2 * model.q()) + int(1)));
        assert_eq!(wide.window, 2);
        let three = fam.isotropy(&a1, &(model.weight() * int(3 * model.q())));
        assert_eq!((three.exponents.clone(), three.cross_checked), ((-3..=3).collect(), true));
        let a2 = model.base(2);
        let xp = model.coset_of(&word(&model, &[(1, model.q())]), 1);
        let t = fam.transfer(&a2, &a1, &xp, 4).unwrap();
        assert!(model.dist(&a2, &t.chosen, &a1).unwrap() <= model.ladder().kappa);
        assert!(fam.transfer(&a1, &a1, &xp, 4).is_err());
    }

    #[test]
    fn induced_order_on_free_product() {
        let model = fp2(6);
        let q = model.q();
        let fam = RotatingFamily::new(&model);
        let x = model.coset_of(&word(&model, &[(2, -q)]), 1);
        let z = model.coset_of(&word(&model, &[(1, q), (2, q), (1, q), (2, q), (1, q)]), 2);
        let level = &model.ladder().big_theta + int(12) * &model.ladder().kappa;
        let order = fam.induced_order(&x, &z, 1, &level).unwrap();
        let labels: Vec<String> = order.iter().map(|&p| model.coset(p).rep.render(q)).collect();
        assert_eq!(labels.len(), 3, "{labels:?}");
        assert_eq!(order[0], model.position(&model.base(1)).unwrap());
        assert_eq!(model.coset(order[2]).rep, word(&model, &[(1, q), (2, q), (1, q), (2, q)]));
        assert!(fam.induced_order(&x, &z, 1, &rational::zero()).is_err());
    }

    #[test]
    fn stabilisers_are_elliptic() {
        let model = fp2(3);
        let fam = RotatingFamily::new(&model);
        let k = &model.ladder().k;
        let e = fam.ellipticity(&model.base(1), 2, k).unwrap();
        assert!(e.holds && !e.trivial && e.diameter == 1, "{e:?}");
        let e = fam.ellipticity(&model.base(1), 1, k).unwrap();
        assert!(e.trivial && e.set.len() == 1);
        assert!(fam.ellipticity(&model.base(1), 2, &rational::zero()).is_err());
    }
}
