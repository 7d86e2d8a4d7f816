//! Exhaustive verification of the projection-system axioms on a finite system.

use rayon::prelude::*;
use serde::Serialize;

use crate::rational::{self, Exact, Rational};
use crate::system::{CompositeSystem, ElementId};

const MAX_WITNESSES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Symmetry,
    Triangle,
    Behrstock,
    Properness,
    Separation,
    SymmetryInAction,
    ClosenessInInaction,
    FiniteFilling,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::Symmetry,
        Axiom::Triangle,
        Axiom::Behrstock,
        Axiom::Properness,
        Axiom::Separation,
        Axiom::SymmetryInAction,
        Axiom::ClosenessInInaction,
        Axiom::FiniteFilling,
    ];

    /// Whether the axiom's threshold is the base constant.
    pub fn depends_on_theta(self) -> bool {
        matches!(
            self,
            Axiom::Behrstock | Axiom::Properness | Axiom::Separation | Axiom::ClosenessInInaction
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Result for one axiom. Witness tuples list element ids in the order documented per axiom:
/// symmetry `[Y, X, Z]`, triangle `[Y, X, Z, W]`, Behrstock `[Y, Z, X]`, separation `[Y, Z]`,
/// symmetry in action `[X, Y]`, closeness in inaction `[Y, X, Z]`.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub verdict: Verdict,
    pub checked: u64,
    pub failures: u64,
    pub inconclusive: u64,
    pub witnesses: Vec<Vec<ElementId>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    #[serde(with = "rational")]
    pub theta: Rational,
    pub verdict: Verdict,
    pub axioms: Vec<AxiomOutcome>,
    /// Smallest base constant at which every threshold axiom passes; `None` when an axiom that
    /// does not depend on the constant fails.
    #[serde(with = "rational::opt")]
    pub minimal_theta: Option<Rational>,
    /// Elements whose active sets cover every active set (finite filling).
    pub filling_cover: Vec<ElementId>,
}

impl AxiomReport {
    pub fn outcome(&self, a: Axiom) -> &AxiomOutcome {
        self.axioms.iter().find(|o| o.axiom == a).expect("all axioms reported")
    }

    pub fn passes(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Axioms with at least one failure.
    pub fn failing(&self) -> Vec<Axiom> {
        self.axioms.iter().filter(|o| o.failures > 0).map(|o| o.axiom).collect()
    }
}

#[derive(Clone, Debug)]
struct Tally<T> {
    checked: u64,
    failures: u64,
    inconclusive: u64,
    witnesses: Vec<Vec<usize>>,
    /// Largest value that the base constant must dominate, over conclusive instances.
    need: Option<T>,
}

impl<T> Default for Tally<T> {
    fn default() -> Self {
        Tally { checked: 0, failures: 0, inconclusive: 0, witnesses: Vec::new(), need: None }
    }
}

impl<T: Exact> Tally<T> {
    fn record(&mut self, ok: bool, boundary: bool, witness: impl FnOnce() -> Vec<usize>) {
        self.record_n(1, ok, boundary, witness);
    }

    /// Records `n` instances sharing one outcome.
    fn record_n(&mut self, n: u64, ok: bool, boundary: bool, witness: impl FnOnce() -> Vec<usize>) {
        self.checked += n;
        if boundary {
            self.inconclusive += n;
        } else if !ok {
            self.failures += n;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    fn need(&mut self, v: &T) {
        if self.need.as_ref().is_none_or(|n| v > n) {
            self.need = Some(v.clone());
        }
    }

    fn merge(mut self, o: Tally<T>) -> Tally<T> {
        self.checked += o.checked;
        self.failures += o.failures;
        self.inconclusive += o.inconclusive;
        for w in o.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
        if let Some(v) = o.need {
            self.need(&v);
        }
        self
    }

    fn to_rational(&self, conv: impl Fn(&T) -> Rational) -> Tally<Rational> {
        Tally {
            checked: self.checked,
            failures: self.failures,
            inconclusive: self.inconclusive,
            witnesses: self.witnesses.clone(),
            need: self.need.as_ref().map(conv),
        }
    }
}

#[derive(Clone, Debug)]
struct PerY<T> {
    symmetry: Tally<T>,
    triangle: Tally<T>,
    behrstock: Tally<T>,
    properness: Tally<T>,
    separation: Tally<T>,
    closeness: Tally<T>,
}

impl<T> Default for PerY<T> {
    fn default() -> Self {
        PerY {
            symmetry: Tally::default(),
            triangle: Tally::default(),
            behrstock: Tally::default(),
            properness: Tally::default(),
            separation: Tally::default(),
            closeness: Tally::default(),
        }
    }
}

fn check_y<T: Exact>(
    sys: &CompositeSystem,
    theta: &T,
    y: usize,
    dpi: &(impl Fn(usize, usize, usize) -> Option<T> + Sync),
) -> PerY<T> {
    let act: Vec<usize> = sys.active_with(y);
    let bd = |ps: &[usize]| ps.iter().any(|&p| sys.is_boundary(p));
    let mut t = PerY::default();
    // On projection-backed systems every distance seen from Y depends only on the projection
    // onto Y, so elements sharing a projection value (and boundary flag) form one class.
    let mut classes: Vec<(usize, u64)> = Vec::new();
    if sys.proj_weight().is_some() {
        let mut by_key: std::collections::BTreeMap<(Option<i64>, bool), usize> = Default::default();
        for &x in &act {
            let slot = *by_key.entry((sys.proj(y, x), sys.is_boundary(x))).or_insert_with(|| {
                classes.push((x, 0));
                classes.len() - 1
            });
            classes[slot].1 += 1;
        }
    } else {
        classes = act.iter().map(|&x| (x, 1)).collect();
    }
    let row: Vec<Vec<Option<T>>> =
        classes.iter().map(|&(x, _)| classes.iter().map(|&(z, _)| dpi(y, x, z)).collect()).collect();
    for (a, &(x, nx)) in classes.iter().enumerate() {
        for (c, &(z, nz)) in classes.iter().enumerate() {
            if c > a {
                let (u, v) = (&row[a][c], &row[c][a]);
                if u.is_some() || v.is_some() {
                    t.symmetry.record_n(nx * nz, u == v, bd(&[y, x, z]), || vec![y, x, z]);
                }
            } else if c == a && nx > 1 {
                t.symmetry.record_n(nx * (nx - 1) / 2, true, bd(&[y, x]), Vec::new);
            }
            let Some(dxz) = &row[a][c] else { continue };
            for (w_i, &(w, nw)) in classes.iter().enumerate() {
                let (Some(dzw), Some(dxw)) = (&row[c][w_i], &row[a][w_i]) else { continue };
                t.triangle.record_n(
                    nx * nz * nw,
                    *dxw <= dxz.clone() + dzw.clone(),
                    bd(&[y, x, z, w]),
                    || vec![y, x, z, w],
                );
            }
        }
        if let Some(dxx) = &row[a][a] {
            let b = bd(&[y, x]);
            t.separation.record_n(nx, dxx <= theta, b, || vec![y, x]);
            if !b {
                t.separation.need(dxx);
            }
        }
    }
    for &x in &act {
        for &z in &act {
            if x == z {
                continue;
            }
            // Behrstock: min{d_Y(X,Z), d_Z(X,Y)} ≤ θ.
            if let (Some(d1), Some(d2)) = (dpi(y, x, z), dpi(z, x, y)) {
                let m = d1.min(d2);
                let bnd = bd(&[y, x, z]);
                t.behrstock.record(m <= *theta, bnd, || vec![y, z, x]);
                if !bnd {
                    t.behrstock.need(&m);
                }
            }
            // Closeness in inaction.
            if !sys.is_active(x, z) {
                if let Some(d) = dpi(y, x, z) {
                    let bnd = bd(&[y, x, z]);
                    t.closeness.record(d <= *theta, bnd, || vec![y, x, z]);
                    if !bnd {
                        t.closeness.need(&d);
                    }
                }
            }
        }
    }
    // Properness restricted to the coordinate of Y: the set is finite on a finite system;
    // instances touching the boundary cannot be certified.
    let i = sys.coord(y);
    for x in sys.coord_range(i) {
        for z in sys.coord_range(i) {
            if x < z && x != y && z != y {
                t.properness.record(true, bd(&[y, x, z]), Vec::new);
            }
        }
    }
    t
}

fn per_axiom<T: Exact>(
    sys: &CompositeSystem,
    theta: &T,
    dpi: impl Fn(usize, usize, usize) -> Option<T> + Sync,
    conv: impl Fn(&T) -> Rational,
) -> [Tally<Rational>; 6] {
    let per_y: Vec<PerY<T>> = (0..sys.len()).into_par_iter().map(|y| check_y(sys, theta, y, &dpi)).collect();
    let fold = |f: fn(&PerY<T>) -> &Tally<T>| {
        per_y.iter().fold(Tally::default(), |acc, p| acc.merge(f(p).clone())).to_rational(&conv)
    };
    [
        fold(|p| &p.symmetry),
        fold(|p| &p.triangle),
        fold(|p| &p.behrstock),
        fold(|p| &p.properness),
        fold(|p| &p.separation),
        fold(|p| &p.closeness),
    ]
}

fn outcome<T>(sys: &CompositeSystem, axiom: Axiom, t: &Tally<T>) -> AxiomOutcome {
    let verdict = if t.failures > 0 {
        Verdict::Fail
    } else if t.inconclusive > 0 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    AxiomOutcome {
        axiom,
        verdict,
        checked: t.checked,
        failures: t.failures,
        inconclusive: t.inconclusive,
        witnesses: t
            .witnesses
            .iter()
            .map(|w| w.iter().map(|&p| sys.id(p)).collect())
            .collect(),
    }
}

/// Greedy cover of `⋃ Act(X)` by active sets of the listed elements.
fn filling_cover(sys: &CompositeSystem) -> Vec<usize> {
    let n = sys.len();
    let mut covered = vec![false; n];
    let mut cover = Vec::new();
    loop {
        let best = (0..n)
            .map(|x| ((0..n).filter(|&z| !covered[z] && sys.is_active(x, z)).count(), x))
            .max_by_key(|&(c, x)| (c, std::cmp::Reverse(x)));
        match best {
            Some((c, x)) if c > 0 => {
                cover.push(x);
                for z in 0..n {
                    if sys.is_active(x, z) {
                        covered[z] = true;
                    }
                }
            }
            _ => break,
        }
    }
    cover.sort_unstable();
    cover
}

/// Checks every axiom at base constant `theta`.
pub fn check_axioms(sys: &CompositeSystem, theta: &Rational) -> AxiomReport {
    let n = sys.len();
    let [symmetry, triangle, behrstock, properness, separation, closeness] =
        match sys.scale_floor(theta) {
            Some(th) => per_axiom(sys, &th, |y, x, z| sys.dpi_scaled(y, x, z), |v| sys.unscale(*v)),
            None => per_axiom(sys, theta, |y, x, z| sys.dpi(y, x, z), |v| v.clone()),
        };

    let mut action = Tally::<Rational>::default();
    for x in 0..n {
        for y in 0..n {
            let ok = sys.is_active(x, y) == sys.is_active(y, x)
                && (sys.coord(x) != sys.coord(y) || sys.is_active(x, y));
            action.record(ok, false, || vec![x, y]);
        }
    }
    let cover = filling_cover(sys);
    let mut filling = Tally::<Rational>::default();
    filling.record(true, sys.has_boundary(), Vec::new);

    let axioms = vec![
        outcome(sys, Axiom::Symmetry, &symmetry),
        outcome(sys, Axiom::Triangle, &triangle),
        outcome(sys, Axiom::Behrstock, &behrstock),
        outcome(sys, Axiom::Properness, &properness),
        outcome(sys, Axiom::Separation, &separation),
        outcome(sys, Axiom::SymmetryInAction, &action),
        outcome(sys, Axiom::ClosenessInInaction, &closeness),
        outcome(sys, Axiom::FiniteFilling, &filling),
    ];
    let structural_ok = symmetry.failures == 0 && triangle.failures == 0 && action.failures == 0;
    let minimal_theta = structural_ok.then(|| {
        [&behrstock, &separation, &closeness]
            .iter()
            .filter_map(|t| t.need.clone())
            .fold(rational::zero(), |a, b| a.max(b))
    });
    let verdict = if axioms.iter().any(|o| o.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if axioms.iter().any(|o| o.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    AxiomReport {
        theta: theta.clone(),
        verdict,
        axioms,
        minimal_theta,
        filling_cover: cover.into_iter().map(|p| sys.id(p)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::tree::p11;
    use crate::rational::int;
    use crate::system::SystemBuilder;

    #[test]
    fn p11_passes_with_minimal_theta_zero() {
        let sys = p11();
        let r = check_axioms(&sys, sys.theta());
        assert!(r.passes(), "{:?}", r.failing());
        assert_eq!(r.minimal_theta, Some(int(0)));
    }

    #[test]
    fn asymmetric_override_fails_symmetry() {
        let base = p11();
        let mut b = SystemBuilder::new(1, int(0));
        for p in 0..base.len() {
            b.element(base.id(p));
        }
        for (y, x, z, v) in base.table_entries() {
            b.dpi(base.id(y), base.id(x), base.id(z), v);
        }
        let id = |p| base.id(p);
        b.dpi(id(2), id(0), id(1), int(2)).dpi(id(2), id(1), id(0), int(3));
        let sys = b.build().unwrap();
        let r = check_axioms(&sys, &int(0));
        let sym = r.outcome(Axiom::Symmetry);
        assert_eq!(sym.verdict, Verdict::Fail);
        assert!(sym.witnesses.contains(&vec![id(2), id(0), id(1)]));
        assert_eq!(r.minimal_theta, None);
    }
}
