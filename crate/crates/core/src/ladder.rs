//! Calibration of the constants `κ`, `Θ` and the derived ladder used by the windmill process.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::axioms::check_axioms;
use crate::error::{Error, Result};
use crate::metrics::Space;
use crate::order::standard_order;
use crate::rational::{self, int, Exact, Rational};
use crate::system::CompositeSystem;

/// All constants derived from `θ`, `κ`, `Θ` and the number of coordinates.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ConstantLadder {
    pub m: usize,
    #[serde(with = "rational")]
    pub theta: Rational,
    #[serde(with = "rational")]
    pub kappa: Rational,
    #[serde(with = "rational")]
    pub big_theta: Rational,
    #[serde(with = "rational")]
    pub c_star: Rational,
    #[serde(with = "rational")]
    pub theta_p: Rational,
    #[serde(with = "rational")]
    pub theta_rot: Rational,
    /// Threshold used for projection complexes.
    #[serde(with = "rational")]
    pub k: Rational,
    /// Which measurements fixed `κ` and `Θ`.
    pub binding: Vec<String>,
}

impl ConstantLadder {
    /// Ladder built from the three base constants with unit safety margins.
    pub fn from_base(m: usize, theta: Rational, kappa: Rational, big_theta: Rational) -> Self {
        let c_star = int(1000) * (&big_theta + &kappa) + int(1);
        let theta_p = &c_star + int(21 * m as i64) * &kappa;
        let theta_rot =
            int(2) * &c_star + int(2) * &theta_p + int(20) * (&kappa + &big_theta) + int(1);
        let k = &theta_p + int(1);
        ConstantLadder { m, theta, kappa, big_theta, c_star, theta_p, theta_rot, k, binding: vec![] }
    }

    /// Level `𝓛_j(i)` for principal coordinate `j` and target coordinate `i` (both 1-based).
    pub fn level(&self, j: usize, i: usize) -> Rational {
        let m = self.m as i64;
        let shift = (i as i64 - j as i64).rem_euclid(m);
        &self.c_star + int(20 * ((m - 1) - shift)) * &self.kappa
    }

    /// The tuple `(𝓛_j(1), …, 𝓛_j(m))`.
    pub fn levels(&self, j: usize) -> Vec<Rational> {
        (1..=self.m).map(|i| self.level(j, i)).collect()
    }

    /// Checks the ordering relations between the constants.
    ///
    /// When `κ = 0` the largest level coincides with `Θ_P − κ`; that case is accepted.
    pub fn check_invariants(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Invariant(format!("ladder: {what}")));
        let levels = self.levels(1);
        let max_l = levels.iter().max().cloned().unwrap_or_else(|| self.c_star.clone());
        let min_l = levels.iter().min().cloned().unwrap_or_else(|| self.c_star.clone());
        if min_l < self.c_star {
            return bad("min level below c*");
        }
        let cap = &self.theta_p - &self.kappa;
        if max_l > cap || (max_l == cap && self.kappa != rational::zero()) {
            return bad("max level not below Θ_P − κ");
        }
        if self.theta_p < &self.c_star + int(21 * self.m as i64) * &self.kappa {
            return bad("Θ_P below c* + 21mκ");
        }
        let floor = int(2) * &self.c_star
            + int(2) * &self.theta_p
            + int(20) * (&self.kappa + &self.big_theta);
        if self.theta_rot <= floor {
            return bad("Θ_Rot not above 2c* + 2Θ_P + 20(κ+Θ)");
        }
        if self.kappa < self.theta || self.big_theta < self.theta {
            return bad("κ or Θ below θ");
        }
        Ok(())
    }
}

struct Measurements<T> {
    kappa_eq: T,
    kappa_tri: T,
    kappa_behr: T,
    monotone_violation: Option<T>,
    values: BTreeSet<T>,
}

fn measure<T: Exact>(
    sys: &CompositeSystem,
    d: &(impl Fn(usize, usize, usize) -> Option<T> + Sync),
    dpi: &(impl Fn(usize, usize, usize) -> Option<T> + Sync),
) -> Result<Measurements<T>> {
    let calib = |bullet: &str, detail: String| Error::Calibration { bullet: bullet.into(), detail };
    let mut out = Measurements {
        kappa_eq: T::zero(),
        kappa_tri: T::zero(),
        kappa_behr: T::zero(),
        monotone_violation: None,
        values: BTreeSet::new(),
    };
    for i in 1..=sys.m() {
        let r: Vec<usize> = sys.coord_range(i).collect();
        let per_y: Vec<Result<Measurements<T>>> = r
            .par_iter()
            .map(|&y| {
                let mut o = Measurements {
                    kappa_eq: T::zero(),
                    kappa_tri: T::zero(),
                    kappa_behr: T::zero(),
                    monotone_violation: None,
                    values: BTreeSet::new(),
                };
                for &x in &r {
                    for &z in &r {
                        if y == x || y == z || x == z {
                            continue;
                        }
                        let Some(dv) = d(y, x, z) else { continue };
                        o.values.insert(dv.clone());
                        if d(y, z, x).as_ref() != Some(&dv) {
                            return Err(calib(
                                "symmetry",
                                format!("d at ({}; {}, {})", sys.id(y), sys.id(x), sys.id(z)),
                            ));
                        }
                        if let Some(raw) = dpi(y, x, z) {
                            if dv > raw {
                                return Err(calib(
                                    "coarse equality",
                                    format!("d exceeds d^π at ({}; {}, {})", sys.id(y), sys.id(x), sys.id(z)),
                                ));
                            }
                            o.kappa_eq = o.kappa_eq.clone().max(raw - dv.clone());
                        }
                        if let Some(e) = d(z, x, y) {
                            o.kappa_behr = o.kappa_behr.clone().max(dv.clone().min(e));
                        }
                        for &w in &r {
                            if w == y {
                                continue;
                            }
                            if let (Some(a), Some(b)) = (d(y, z, w), d(y, x, w)) {
                                o.kappa_tri = o.kappa_tri.clone().max(b - dv.clone() - a);
                            }
                            if w == x || w == z {
                                continue;
                            }
                            let (Some(wxy), Some(wxz), Some(wzy)) = (d(w, x, y), d(w, x, z), d(w, z, y)) else {
                                continue;
                            };
                            if (wxy > wxz || wzy > wxz) && o.monotone_violation.as_ref().is_none_or(|v| dv > *v) {
                                o.monotone_violation = Some(dv.clone());
                            }
                        }
                    }
                }
                Ok(o)
            })
            .collect();
        for o in per_y {
            let o = o?;
            out.kappa_eq = out.kappa_eq.max(o.kappa_eq);
            out.kappa_tri = out.kappa_tri.max(o.kappa_tri);
            out.kappa_behr = out.kappa_behr.max(o.kappa_behr);
            if let Some(v) = o.monotone_violation {
                if out.monotone_violation.as_ref().is_none_or(|c| v > *c) {
                    out.monotone_violation = Some(v);
                }
            }
            out.values.extend(o.values);
        }
    }
    Ok(out)
}

fn order_holds<T: Exact>(
    sys: &CompositeSystem,
    kappa: &T,
    big_theta: &T,
    d: &(impl Fn(usize, usize, usize) -> Option<T> + Sync),
) -> Option<String> {
    for i in 1..=sys.m() {
        let r = sys.coord_range(i);
        let failure = r.clone().into_par_iter().find_map_first(|x| {
            for z in r.clone() {
                if x == z {
                    continue;
                }
                let set: Vec<usize> = r
                    .clone()
                    .filter(|&y| y != x && y != z && d(y, x, z).is_some_and(|v| v >= *big_theta))
                    .collect();
                if let Err(e) = standard_order(x, z, &set, kappa, |a, b, c| d(*a, *b, *c)) {
                    return Some(format!("between {} and {}: {e}", sys.id(x), sys.id(z)));
                }
            }
            None
        });
        if failure.is_some() {
            return failure;
        }
    }
    None
}

struct Calibrated {
    kappa: Rational,
    big_theta: Rational,
    binding: Vec<String>,
}

fn calibrate_with<T: Exact>(
    sys: &CompositeSystem,
    theta: &T,
    d: impl Fn(usize, usize, usize) -> Option<T> + Sync,
    dpi: impl Fn(usize, usize, usize) -> Option<T> + Sync,
    unit: T,
    conv: impl Fn(&T) -> Rational,
) -> Result<Calibrated> {
    let meas = measure(sys, &d, &dpi)?;
    let mut binding = Vec::new();
    let big_theta = match &meas.monotone_violation {
        Some(v) if v.clone() + unit.clone() > *theta => {
            binding.push("Θ: monotonicity".to_string());
            v.clone() + unit.clone()
        }
        _ => {
            binding.push("Θ: base constant".to_string());
            theta.clone()
        }
    };
    let mut kappa = theta.clone();
    for v in [&meas.kappa_eq, &meas.kappa_tri, &meas.kappa_behr] {
        kappa = kappa.max(v.clone());
    }
    for (name, v) in [
        ("coarse equality", &meas.kappa_eq),
        ("coarse triangle", &meas.kappa_tri),
        ("Behrstock", &meas.kappa_behr),
    ] {
        if *v == kappa {
            binding.push(format!("κ: {name}"));
        }
    }
    if kappa == *theta {
        binding.push("κ: base constant".to_string());
    }
    let mut kappas: Vec<T> = meas.values.iter().filter(|v| **v > kappa).cloned().collect();
    kappas.insert(0, kappa.clone());
    let mut thetas: Vec<T> = meas.values.iter().filter(|v| **v > big_theta).cloned().collect();
    thetas.insert(0, big_theta.clone());
    let beyond = thetas.last().cloned().unwrap_or_else(|| big_theta.clone()) + unit;
    thetas.push(beyond);
    // Order only shrinks its sets as Θ grows, so for fixed κ the admissible Θ form an upper ray.
    let mut best: Option<(T, T)> = None;
    let mut last_failure = None;
    for k in &kappas {
        if let Some((bk, bt)) = &best {
            if k.clone() + thetas[0].clone() >= bk.clone() + bt.clone() {
                break;
            }
        }
        let (mut lo, mut hi) = (0, thetas.len() - 1);
        if let Some(f) = order_holds(sys, k, &thetas[hi], &d) {
            last_failure = Some(f);
            continue;
        }
        while lo < hi {
            let mid = (lo + hi) / 2;
            match order_holds(sys, k, &thetas[mid], &d) {
                None => hi = mid,
                Some(f) => {
                    last_failure = Some(f);
                    lo = mid + 1;
                }
            }
        }
        let t = thetas[lo].clone();
        let better = match &best {
            None => true,
            Some((bk, bt)) => k.clone() + t.clone() < bk.clone() + bt.clone(),
        };
        if better {
            best = Some((k.clone(), t));
        }
    }
    let Some((k, t)) = best else {
        return Err(Error::Calibration { bullet: "order".into(), detail: last_failure.unwrap_or_default() });
    };
    if k != kappas[0] {
        binding.push("κ: order".to_string());
    }
    if t != thetas[0] {
        binding.push("Θ: order".to_string());
    }
    Ok(Calibrated { kappa: conv(&k), big_theta: conv(&t), binding })
}

/// Finds the smallest `κ ≥ θ` and `Θ ≥ θ` for which every property of the modified distances
/// holds on `sp`, then builds the ladder.
pub fn calibrate_constants(sp: &Space) -> Result<ConstantLadder> {
    let sys = sp.sys;
    let theta = sys.theta().clone();
    let report = check_axioms(sys, &theta);
    if !report.passes() {
        return Err(Error::Calibration {
            bullet: "axioms".into(),
            detail: format!("system fails {:?} at θ = {theta}", report.failing()),
        });
    }
    let scaled_theta = sys.scale().and_then(|s| {
        let t = &theta * int(s);
        t.is_integer().then(|| t.to_integer().try_into().ok()).flatten()
    });
    let c = match scaled_theta.filter(|_| sp.has_scaled()) {
        Some(th) => calibrate_with(
            sys,
            &th,
            |y, x, z| sp.d_scaled(y, x, z),
            |y, x, z| sys.dpi_scaled(y, x, z),
            sys.scale().unwrap(),
            |v| sys.unscale(*v),
        )?,
        None => calibrate_with(sys, &theta, |y, x, z| sp.d(y, x, z), |y, x, z| sys.dpi(y, x, z), int(1), |v| v.clone())?,
    };
    let (kappa, big_theta, binding) = (c.kappa, c.big_theta, c.binding);
    let mut ladder = ConstantLadder::from_base(sys.m(), theta, kappa, big_theta);
    ladder.binding = binding;
    ladder.check_invariants()?;
    Ok(ladder)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::DerivedMetrics;
    use crate::models::tree::p11;
    use crate::system::SystemBuilder;

    #[test]
    fn p11_ladder() {
        let sys = p11();
        let met = DerivedMetrics::exact(&sys);
        let l = calibrate_constants(&Space::new(&sys, &met)).unwrap();
        assert_eq!(l.kappa, int(0));
        assert_eq!(l.big_theta, int(1));
        assert_eq!(l.c_star, int(1001));
        assert_eq!(l.theta_p, int(1001));
        assert_eq!(l.theta_rot, int(4025));
        assert_eq!(l.k, int(1002));
        assert_eq!(l.levels(1), vec![int(1001)]);
    }

    #[test]
    fn empty_system_keeps_base_constant() {
        let sys = SystemBuilder::new(1, int(2)).build().unwrap();
        let met = DerivedMetrics::exact(&sys);
        let l = calibrate_constants(&Space::new(&sys, &met)).unwrap();
        assert_eq!((l.kappa, l.big_theta), (int(2), int(2)));
    }

    #[test]
    fn levels_rotate_with_principal_coordinate() {
        let l = ConstantLadder::from_base(3, int(1), int(1), int(1));
        assert_eq!(l.level(1, 1), &l.c_star + int(40));
        assert_eq!(l.level(1, 3), l.c_star.clone());
        assert_eq!(l.level(2, 1), l.c_star.clone());
        assert!(l.check_invariants().is_ok());
    }
}
