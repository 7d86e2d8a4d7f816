//! Convex regions, osculation sets and terminal osculators.
//!
//! A region `𝒲` is a set of elements. It is *L-convex* when every element seen at distance
//! at least `L(j)` by a pair of same-coordinate members of `𝒲` (with `j` the coordinate of
//! the seeing element) already belongs to `𝒲`. The osculation set `𝕐_L(𝒲,R)` collects the
//! elements outside `𝒲` that every member of `𝒲` active with them and with `R` sees far from `R`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ladder::ConstantLadder;
use crate::metrics::Space;
use crate::rational::{self, int, Rational};
use crate::system::{CompositeSystem, ElementId};

/// A set of elements of one system, stored as a membership mask over positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    member: Vec<bool>,
    count: usize,
}

impl Region {
    pub fn empty(n: usize) -> Self {
        Region { member: vec![false; n], count: 0 }
    }

    pub fn from_positions(n: usize, ps: impl IntoIterator<Item = usize>) -> Self {
        let mut r = Region::empty(n);
        for p in ps {
            r.insert(p);
        }
        r
    }

    pub fn from_ids(sys: &CompositeSystem, ids: &[ElementId]) -> Result<Self> {
        let ps = ids.iter().map(|&id| sys.position(id)).collect::<Result<Vec<_>>>()?;
        Ok(Region::from_positions(sys.len(), ps))
    }

    pub fn contains(&self, p: usize) -> bool {
        self.member[p]
    }

    /// Adds `p`; returns whether it was new.
    pub fn insert(&mut self, p: usize) -> bool {
        if self.member[p] {
            return false;
        }
        self.member[p] = true;
        self.count += 1;
        true
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.member.len()).filter(|&p| self.member[p]).collect()
    }

    pub fn in_coord(&self, sys: &CompositeSystem, i: usize) -> Vec<usize> {
        sys.coord_range(i).filter(|&p| self.member[p]).collect()
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.member.iter().zip(&other.member).all(|(&a, &b)| !a || b)
    }

    pub fn ids(&self, sys: &CompositeSystem) -> Vec<ElementId> {
        self.members().into_iter().map(|p| sys.id(p)).collect()
    }

    pub fn universe(&self) -> usize {
        self.member.len()
    }
}

/// Convexity levels: one value for every coordinate, or a value per coordinate (1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Levels {
    Scalar(Rational),
    PerCoord(Vec<Rational>),
}

impl Levels {
    pub fn at(&self, j: usize) -> Rational {
        match self {
            Levels::Scalar(l) => l.clone(),
            Levels::PerCoord(v) => v[j - 1].clone(),
        }
    }

    pub fn min(&self) -> Rational {
        match self {
            Levels::Scalar(l) => l.clone(),
            Levels::PerCoord(v) => v.iter().min().cloned().unwrap_or_else(rational::zero),
        }
    }
}

/// A pair of members and an outside element that sees them far apart.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ConvexityWitness {
    pub x: ElementId,
    pub z: ElementId,
    pub y: ElementId,
    #[serde(with = "rational")]
    pub distance: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Convexity {
    pub convex: bool,
    /// Violations, at most one per outside element.
    pub witnesses: Vec<ConvexityWitness>,
}

/// Outside elements that break convexity, with one witnessing pair each.
fn convexity_violations(
    sp: &Space,
    w: &Region,
    levels: &Levels,
    stop_at_first: bool,
) -> Vec<(usize, usize, usize, Rational)> {
    let sys = sp.sys;
    let by_coord: Vec<Vec<usize>> = (1..=sys.m()).map(|i| w.in_coord(sys, i)).collect();
    let mut out = Vec::new();
    for y in 0..sys.len() {
        if w.contains(y) {
            continue;
        }
        let level = levels.at(sys.coord(y));
        for members in &by_coord {
            let s: Vec<usize> = members.iter().copied().filter(|&x| sys.is_active(y, x)).collect();
            if let Some((d, x, z)) = sp.max_pair(y, &s) {
                if d >= level {
                    out.push((y, x, z, d));
                    break;
                }
            }
        }
        if stop_at_first && !out.is_empty() {
            break;
        }
    }
    out
}

fn check_level_floor(levels: &Levels, kappa: &Rational) -> Result<()> {
    let floor = int(10) * kappa;
    if levels.min() <= floor {
        return Err(Error::Precondition(format!(
            "convexity level {} must exceed 10κ = {floor}",
            levels.min()
        )));
    }
    Ok(())
}

/// Decides whether `w` is convex at `levels`. Every level must exceed `10κ`.
pub fn is_convex(sp: &Space, w: &Region, levels: &Levels, kappa: &Rational) -> Result<Convexity> {
    check_level_floor(levels, kappa)?;
    let v = convexity_violations(sp, w, levels, false);
    Ok(Convexity {
        convex: v.is_empty(),
        witnesses: v
            .into_iter()
            .take(64)
            .map(|(y, x, z, d)| ConvexityWitness {
                x: sp.sys.id(x),
                z: sp.sys.id(z),
                y: sp.sys.id(y),
                distance: d,
            })
            .collect(),
    })
}

/// Every element outside `w` that breaks convexity at `levels`, in position order.
pub fn convexity_violators(sp: &Space, w: &Region, levels: &Levels, kappa: &Rational) -> Result<Vec<usize>> {
    check_level_floor(levels, kappa)?;
    Ok(convexity_violations(sp, w, levels, false).into_iter().map(|v| v.0).collect())
}

/// Smallest convex region containing `seeds`, obtained by repeatedly adding violators.
pub fn convex_closure(sp: &Space, seeds: &Region, levels: &Levels, kappa: &Rational) -> Result<Region> {
    check_level_floor(levels, kappa)?;
    let mut w = seeds.clone();
    loop {
        let v = convexity_violations(sp, &w, levels, false);
        if v.is_empty() {
            return Ok(w);
        }
        for (y, ..) in v {
            w.insert(y);
        }
    }
}

/// `𝕐_L(𝒲, R)`, in position order. Requires `R ∉ 𝒲`, `Act(R) ∩ 𝒲 ≠ ∅` and `L ≥ 10κ`.
pub fn osculation_set(sp: &Space, w: &Region, r: usize, level: &Rational, kappa: &Rational) -> Result<Vec<usize>> {
    let sys = sp.sys;
    if *level < int(10) * kappa {
        return Err(Error::Precondition(format!("osculation level {level} below 10κ")));
    }
    if w.contains(r) {
        return Err(Error::Undefined(format!("{} already lies in the region", sys.id(r))));
    }
    let near: Vec<usize> = w.members().into_iter().filter(|&x| sys.is_active(r, x)).collect();
    if near.is_empty() {
        return Err(Error::Undefined(format!("no member of the region is active with {}", sys.id(r))));
    }
    let fast = sp.has_fast_projection();
    let weight = sys.proj_weight().cloned();
    let mut out = Vec::new();
    for y in 0..sys.len() {
        if y == r || w.contains(y) || !sys.is_active(y, r) {
            continue;
        }
        let mut any = false;
        let mut all = true;
        if fast {
            let weight = weight.as_ref().unwrap();
            let Some(pr) = sys.proj(y, r) else { continue };
            for &x in &near {
                if !sys.is_active(y, x) {
                    continue;
                }
                any = true;
                match sys.proj(y, x) {
                    Some(px) if weight * int((px - pr).abs()) >= *level => {}
                    _ => {
                        all = false;
                        break;
                    }
                }
            }
        } else {
            for &x in &near {
                if !sys.is_active(y, x) {
                    continue;
                }
                any = true;
                if !sp.d_angle(y, x, r).is_some_and(|d| d >= *level) {
                    all = false;
                    break;
                }
            }
        }
        if any && all {
            out.push(y);
        }
    }
    Ok(out)
}

/// Outcome of the terminal osculator search.
#[derive(Clone, Debug, Serialize)]
pub struct TerminalOsculator {
    pub z: ElementId,
    /// Elements visited, starting with `R`.
    pub path: Vec<ElementId>,
    /// Whether invariance of the region under the rotation groups was certified by the caller.
    pub invariance: InvarianceStatus,
    #[serde(skip)]
    pub z_position: usize,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum InvarianceStatus {
    Certified,
    Unchecked,
}

/// The member of `slice` closest to the region: no other member lies between the region and it.
fn minimal_towards_region(sp: &Space, w: &Region, slice: &[usize], kappa: &Rational) -> usize {
    let sys = sp.sys;
    let between = |a: usize, b: usize| {
        w.members().into_iter().any(|x| {
            sys.is_active(x, a) && sys.is_active(x, b) && sp.d_angle(a, x, b).is_some_and(|d| d > *kappa)
        })
    };
    slice
        .iter()
        .copied()
        .find(|&b| slice.iter().all(|&a| a == b || !between(a, b)))
        .unwrap_or(slice[0])
}

/// Walks from `R` towards the region until reaching an element whose osculation set at
/// `L − 2mκ` is empty. Requires `L ≥ (2m+12)κ + Θ` and `Act(R) ∩ 𝒲 ≠ ∅`.
pub fn terminal_osculator(
    sp: &Space,
    w: &Region,
    r: usize,
    level: &Rational,
    ladder: &ConstantLadder,
    invariance: InvarianceStatus,
) -> Result<TerminalOsculator> {
    let sys = sp.sys;
    let (kappa, m) = (&ladder.kappa, sys.m());
    let floor = int(2 * m as i64 + 12) * kappa + &ladder.big_theta;
    if *level < floor {
        return Err(Error::Precondition(format!("level {level} below (2m+12)κ + Θ = {floor}")));
    }
    let target = level - int(2 * m as i64) * kappa;
    let mut cur = r;
    let mut path = vec![sys.id(r)];
    for step in 0..=m {
        if osculation_set(sp, w, cur, &target, kappa)?.is_empty() {
            return Ok(TerminalOsculator { z: sys.id(cur), path, invariance, z_position: cur });
        }
        if step == m {
            break;
        }
        let here = level - int(2 * step as i64) * kappa;
        let links = osculation_set(sp, w, cur, &here, kappa)?;
        let pool = if links.is_empty() { osculation_set(sp, w, cur, &target, kappa)? } else { links };
        let coord = pool.iter().map(|&p| sys.coord(p)).min().unwrap();
        let slice: Vec<usize> = pool.into_iter().filter(|&p| sys.coord(p) == coord).collect();
        cur = minimal_towards_region(sp, w, &slice, kappa);
        path.push(sys.id(cur));
    }
    Err(Error::Invariant(format!(
        "terminal osculator from {} not reached within {m} steps (path {:?})",
        sys.id(r),
        path.iter().map(|p| p.to_string()).collect::<Vec<_>>()
    )))
}

/// Status of one lemma evaluation.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase", tag = "status", content = "detail")]
pub enum LemmaStatus {
    Pass,
    Fail(String),
    Inapplicable(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaOutcome {
    pub lemma: &'static str,
    #[serde(flatten)]
    pub status: LemmaStatus,
    pub checked: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HullLemmaReport {
    pub outcomes: Vec<LemmaOutcome>,
    pub invariance: InvarianceStatus,
}

impl HullLemmaReport {
    pub fn failures(&self) -> Vec<&LemmaOutcome> {
        self.outcomes.iter().filter(|o| matches!(o.status, LemmaStatus::Fail(_))).collect()
    }

    pub fn get(&self, lemma: &str) -> Option<&LemmaOutcome> {
        self.outcomes.iter().find(|o| o.lemma == lemma)
    }
}

/// Inputs of [`check_hull_lemmas`].
#[derive(Clone, Debug)]
pub struct LemmaInputs {
    pub region: Region,
    pub r: usize,
    pub s: Option<usize>,
    pub level: Rational,
    pub level2: Rational,
    pub invariance: InvarianceStatus,
}

fn outcome(lemma: &'static str, checked: u64, fail: Option<String>) -> LemmaOutcome {
    if checked == 0 {
        return inapplicable(lemma, "hypotheses hold but there is nothing to check");
    }
    LemmaOutcome { lemma, status: fail.map_or(LemmaStatus::Pass, LemmaStatus::Fail), checked }
}

fn inapplicable(lemma: &'static str, why: impl Into<String>) -> LemmaOutcome {
    LemmaOutcome { lemma, status: LemmaStatus::Inapplicable(why.into()), checked: 0 }
}

fn betweenness(sp: &Space, focus: &[usize], kappa: &Rational) -> (LemmaOutcome, LemmaOutcome) {
    let sys = sp.sys;
    let two = int(2) * kappa;
    let ten = int(10) * kappa;
    let (mut c1, mut c2) = (0u64, 0u64);
    let (mut f1, mut f2) = (None, None);
    let name = |ps: &[usize]| ps.iter().map(|&p| sys.id(p).to_string()).collect::<Vec<_>>().join(",");
    for &x in focus {
        for &y in focus {
            for &z in focus {
                let Some(dyxz) = sp.d_angle(y, x, z) else { continue };
                for &t in focus {
                    if let Some(dzyt) = sp.d_angle(z, y, t) {
                        if dyxz > two && dzyt > two {
                            c1 += 1;
                            let ok = sys.is_active(z, x)
                                && sp.d_angle(z, x, t).is_some_and(|v| v >= &dzyt - &two);
                            if !ok && f1.is_none() {
                                f1 = Some(format!("X,Y,Z,T = {}", name(&[x, y, z, t])));
                            }
                        }
                    }
                    if let (Some(dzxt), Some(dyxt)) = (sp.d_angle(z, x, t), sp.d_angle(y, x, t)) {
                        if dyxz > ten && dzxt > ten {
                            c2 += 1;
                            if dyxt < &dyxz - &two && f2.is_none() {
                                f2 = Some(format!("X,Y,Z,T = {}", name(&[x, y, z, t])));
                            }
                        }
                    }
                }
            }
        }
    }
    let wrap = |lemma, c, f| {
        if c == 0 {
            inapplicable(lemma, "no quadruple satisfies the hypotheses")
        } else {
            outcome(lemma, c, f)
        }
    };
    (wrap("betweenness-first", c1, f1), wrap("betweenness-second", c2, f2))
}

/// Evaluates the hull lemmas on one configuration. Lemmas whose hypotheses fail are reported
/// as inapplicable with the failing hypothesis.
pub fn check_hull_lemmas(sp: &Space, ladder: &ConstantLadder, inp: &LemmaInputs) -> Result<HullLemmaReport> {
    let sys = sp.sys;
    let kappa = &ladder.kappa;
    let w = &inp.region;
    let (l, l2, r) = (&inp.level, &inp.level2, inp.r);
    let mut outcomes = Vec::new();

    let osc_r = osculation_set(sp, w, r, l, kappa);
    let mut focus: Vec<usize> = if sys.len() <= 48 {
        (0..sys.len()).collect()
    } else {
        let mut f = w.members();
        f.push(r);
        f.extend(inp.s);
        if let Ok(o) = &osc_r {
            f.extend(o.iter().copied());
        }
        f
    };
    focus.sort_unstable();
    focus.dedup();
    let (b1, b2) = betweenness(sp, &focus, kappa);
    outcomes.push(b1);
    outcomes.push(b2);

    let base_floor = &ladder.big_theta + int(12) * kappa;
    // Finiteness of osculation sets, via the cover used in its proof.
    match (&osc_r, *l >= base_floor) {
        (Err(e), _) => outcomes.push(inapplicable("interval-finiteness", e.to_string())),
        (_, false) => outcomes.push(inapplicable("interval-finiteness", "L below Θ + 12κ")),
        (Ok(osc), true) => {
            let near: Vec<usize> = w.members().into_iter().filter(|&x| sys.is_active(r, x)).collect();
            let mut covered = vec![false; sys.len()];
            let mut cover = Vec::new();
            for &x in &near {
                if (0..sys.len()).any(|z| sys.is_active(x, z) && !covered[z]) {
                    cover.push(x);
                    for z in 0..sys.len() {
                        if sys.is_active(x, z) {
                            covered[z] = true;
                        }
                    }
                }
            }
            let missing = osc.iter().copied().find(|&y| {
                !cover.iter().any(|&x| {
                    sys.is_active(x, y) && sp.d_angle(y, x, r).is_some_and(|d| d >= *l)
                })
            });
            outcomes.push(outcome(
                "interval-finiteness",
                osc.len() as u64,
                missing.map(|y| format!("{} escapes the finite cover", sys.id(y))),
            ));
        }
    }

    // Inclusion of osculation sets along an osculator, and anti-monotonicity in the region.
    let convex_below = l - int(6) * kappa;
    let convex_ok = convex_below > int(10) * kappa
        && is_convex(sp, w, &Levels::Scalar(convex_below.clone()), kappa)?.convex;
    match &osc_r {
        Err(e) => outcomes.push(inapplicable("osculation-inclusion", e.to_string())),
        Ok(_) if *l < base_floor => outcomes.push(inapplicable("osculation-inclusion", "L below Θ + 12κ")),
        Ok(_) if !convex_ok => outcomes.push(inapplicable("osculation-inclusion", "region not (L−6κ)-convex")),
        Ok(osc) => {
            let ss: Vec<usize> = match inp.s {
                Some(s) if osc.contains(&s) => vec![s],
                Some(_) => vec![],
                None => osc.clone(),
            };
            if ss.is_empty() {
                outcomes.push(inapplicable("osculation-inclusion", "no S in 𝕐_L(𝒲,R)"));
            } else {
                let lower = osculation_set(sp, w, r, &(l - int(2) * kappa), kappa)?;
                let mut checked = 0u64;
                let mut fail = None;
                for &s in &ss {
                    for y in osculation_set(sp, w, s, l, kappa)? {
                        checked += 1;
                        if !lower.contains(&y) && fail.is_none() {
                            fail = Some(format!("{} in 𝕐_L(𝒲,{}) but not in 𝕐_(L−2κ)(𝒲,R)", sys.id(y), sys.id(s)));
                        }
                    }
                    let mut bigger = w.clone();
                    bigger.insert(s);
                    if let Ok(osc_big) = osculation_set(sp, &bigger, r, l, kappa) {
                        for y in osc_big {
                            let shared = w
                                .members()
                                .into_iter()
                                .any(|x| sys.is_active(x, r) && sys.is_active(x, y));
                            checked += 1;
                            if shared && !osc.contains(&y) && fail.is_none() {
                                fail = Some(format!("{} osculates the enlarged region only", sys.id(y)));
                            }
                        }
                    }
                }
                outcomes.push(outcome("osculation-inclusion", checked, fail));
            }
        }
    }

    // Terminal osculator.
    let firstguy_floor = int(2 * sys.m() as i64 + 12) * kappa + &ladder.big_theta;
    match &osc_r {
        Err(e) => outcomes.push(inapplicable("terminal-osculator", e.to_string())),
        Ok(_) if *l < firstguy_floor => {
            outcomes.push(inapplicable("terminal-osculator", "L below (2m+12)κ + Θ"))
        }
        Ok(osc) => {
            let fail = match terminal_osculator(sp, w, r, l, ladder, inp.invariance) {
                Err(e) => Some(e.to_string()),
                Ok(t) => {
                    let z = t.z_position;
                    let target = l - int(2 * sys.m() as i64) * kappa;
                    if z != r && !osc.contains(&z) {
                        Some(format!("{} is neither R nor in 𝕐_L(𝒲,R)", sys.id(z)))
                    } else if !osculation_set(sp, w, z, &target, kappa)?.is_empty() {
                        Some(format!("{} still has osculators", sys.id(z)))
                    } else {
                        None
                    }
                }
            };
            outcomes.push(outcome("terminal-osculator", 1, fail));
        }
    }

    // Adding an element with no osculators keeps convexity at a higher level.
    let l_convex = *l > int(10) * kappa && is_convex(sp, w, &Levels::Scalar(l.clone()), kappa)?.convex;
    match osculation_set(sp, w, r, l2, kappa) {
        Err(e) => outcomes.push(inapplicable("osculator-convexity", e.to_string())),
        Ok(_) if *l < base_floor => outcomes.push(inapplicable("osculator-convexity", "L below Θ + 12κ")),
        Ok(_) if !l_convex => outcomes.push(inapplicable("osculator-convexity", "region not L-convex")),
        Ok(o) if !o.is_empty() => outcomes.push(inapplicable("osculator-convexity", "𝕐_L'(𝒲,R) is not empty")),
        Ok(_) => {
            let mut bigger = w.clone();
            bigger.insert(r);
            let lv = l + l2 + int(5) * kappa;
            let c = is_convex(sp, &bigger, &Levels::Scalar(lv), kappa)?;
            let fail = c.witnesses.first().map(|v| format!("{} sees {} and {} at {}", v.y, v.x, v.z, v.distance));
            outcomes.push(outcome("osculator-convexity", 1, fail));
        }
    }

    Ok(HullLemmaReport { outcomes, invariance: inp.invariance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::calibrate_constants;
    use crate::metrics::DerivedMetrics;
    use crate::models::tree::p11;

    #[test]
    fn p11_hull_operations() {
        let sys = p11();
        let met = DerivedMetrics::exact(&sys);
        let sp = Space::new(&sys, &met);
        let (a, b, y, z) = (0, 1, 2, 3);
        let k0 = rational::zero();
        let ab = Region::from_positions(4, [a, b]);
        let c = is_convex(&sp, &ab, &Levels::Scalar(int(1)), &k0).unwrap();
        assert!(!c.convex);
        assert_eq!(c.witnesses[0].y, sys.id(y));
        let aby = Region::from_positions(4, [a, b, y]);
        assert!(is_convex(&sp, &aby, &Levels::Scalar(int(1)), &k0).unwrap().convex);
        assert_eq!(convex_closure(&sp, &ab, &Levels::Scalar(int(1)), &k0).unwrap(), aby);

        let wa = Region::from_positions(4, [a]);
        assert_eq!(osculation_set(&sp, &wa, b, &int(1), &k0).unwrap(), vec![y]);
        assert!(osculation_set(&sp, &wa, a, &int(1), &k0).is_err());

        let ladder = calibrate_constants(&sp).unwrap();
        let t = terminal_osculator(&sp, &wa, b, &int(1), &ladder, InvarianceStatus::Unchecked).unwrap();
        assert_eq!(t.z, sys.id(y));
        let t = terminal_osculator(&sp, &wa, z, &int(1), &ladder, InvarianceStatus::Unchecked).unwrap();
        assert_eq!(t.z, sys.id(z));
    }

    #[test]
    fn level_floor_is_enforced() {
        let sys = p11();
        let met = DerivedMetrics::exact(&sys);
        let sp = Space::new(&sys, &met);
        let w = Region::from_positions(4, [0]);
        assert!(matches!(
            is_convex(&sp, &w, &Levels::Scalar(int(0)), &rational::zero()),
            Err(Error::Precondition(_))
        ));
    }
}
