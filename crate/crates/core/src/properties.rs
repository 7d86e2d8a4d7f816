//! Independent check of the properties of the modified distances `d_Y` for given `κ` and `Θ`:
//! symmetry, the band `d^π − κ ≤ d ≤ d^π`, the coarse triangle inequality, Behrstock at `κ`,
//! properness, monotonicity beyond `Θ` and the existence of the standard order.

use rayon::prelude::*;
use serde::Serialize;

use crate::ladder::ConstantLadder;
use crate::metrics::Space;
use crate::order::standard_order;
use crate::rational::{Exact, Rational};
use crate::system::CompositeSystem;

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct PropertyOutcome {
    pub name: String,
    pub checked: u64,
    pub failures: u64,
    pub witnesses: Vec<String>,
}

impl PropertyOutcome {
    fn new(name: &str) -> Self {
        PropertyOutcome { name: name.into(), ..Default::default() }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < 8 {
                self.witnesses.push(witness());
            }
        }
    }

    fn merge(&mut self, other: PropertyOutcome) {
        self.checked += other.checked;
        self.failures += other.failures;
        for w in other.witnesses {
            if self.witnesses.len() < 8 {
                self.witnesses.push(w);
            }
        }
    }

    pub fn passes(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub outcomes: Vec<PropertyOutcome>,
}

impl PropertyReport {
    pub fn passes(&self) -> bool {
        self.outcomes.iter().all(|o| o.passes())
    }

    pub fn get(&self, name: &str) -> Option<&PropertyOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

const NAMES: [&str; 7] = ["symmetry", "band", "triangle", "behrstock", "properness", "monotonicity", "order"];

fn check_with<T: Exact>(
    sys: &CompositeSystem,
    kappa: &T,
    big_theta: &T,
    d: &(impl Fn(usize, usize, usize) -> Option<T> + Sync),
    dpi: &(impl Fn(usize, usize, usize) -> Option<T> + Sync),
) -> Vec<PropertyOutcome> {
    let label = |p: usize| sys.id(p).to_string();
    let mut total: Vec<PropertyOutcome> = NAMES.iter().map(|n| PropertyOutcome::new(n)).collect();
    for i in 1..=sys.m() {
        let r: Vec<usize> = sys.coord_range(i).collect();
        let parts: Vec<Vec<PropertyOutcome>> = r
            .par_iter()
            .map(|&y| {
                let mut o: Vec<PropertyOutcome> = NAMES.iter().map(|n| PropertyOutcome::new(n)).collect();
                for &x in &r {
                    if x == y {
                        continue;
                    }
                    let mut far = 0u64;
                    for &z in &r {
                        if z == y || z == x {
                            continue;
                        }
                        let Some(dv) = d(y, x, z) else { continue };
                        let w3 = || format!("({}; {}, {})", label(y), label(x), label(z));
                        o[0].record(d(y, z, x).as_ref() == Some(&dv), w3);
                        if let Some(raw) = dpi(y, x, z) {
                            let ok = dv <= raw && raw.clone() - kappa.clone() <= dv;
                            o[1].record(ok, w3);
                        }
                        if let Some(e) = d(z, x, y) {
                            o[3].record(dv.clone().min(e) <= *kappa, w3);
                        }
                        if dv > *kappa {
                            far += 1;
                        }
                        for &w in &r {
                            if w == y {
                                continue;
                            }
                            if let (Some(a), Some(b)) = (d(y, z, w), d(y, x, w)) {
                                o[2].record(b <= dv.clone() + a + kappa.clone(), || format!("{} via {}", w3(), label(w)));
                            }
                            if dv < *big_theta || w == x || w == z {
                                continue;
                            }
                            if let (Some(wxy), Some(wxz), Some(wzy)) = (d(w, x, y), d(w, x, z), d(w, z, y)) {
                                o[5].record(wxy <= wxz && wzy <= wxz, || format!("{} seen from {}", w3(), label(w)));
                            }
                        }
                    }
                    o[4].record(far < r.len() as u64, || format!("({}, {})", label(x), label(y)));
                    let z = y;
                    let set: Vec<usize> =
                        r.iter().copied().filter(|&v| v != x && v != z && d(v, x, z).is_some_and(|t| t >= *big_theta)).collect();
                    let res = standard_order(x, z, &set, kappa, |a, b, c| d(*a, *b, *c));
                    o[6].record(res.is_ok(), || format!("between {} and {}: {}", label(x), label(z), res.unwrap_err()));
                }
                o
            })
            .collect();
        for part in parts {
            for (t, p) in total.iter_mut().zip(part) {
                t.merge(p);
            }
        }
    }
    total
}

/// Checks every property at the ladder's `κ` and `Θ`, exhaustively over all triples and quadruples.
pub fn check_properties(sp: &Space, ladder: &ConstantLadder) -> PropertyReport {
    let sys = sp.sys;
    let scaled = sys.scale().filter(|_| sp.has_scaled()).and_then(|_| {
        let k = sys.scale_floor(&ladder.kappa).filter(|&k| sys.unscale(k) == ladder.kappa)?;
        let t = sys.scale_ceil(&ladder.big_theta).filter(|&t| sys.unscale(t) == ladder.big_theta)?;
        Some((k, t))
    });
    let outcomes = match scaled {
        Some((k, t)) => check_with(sys, &k, &t, &|y, x, z| sp.d_scaled(y, x, z), &|y, x, z| sys.dpi_scaled(y, x, z)),
        None => check_with(sys, &ladder.kappa, &ladder.big_theta, &|y, x, z| sp.d(y, x, z), &|y, x, z| sp.dpi(y, x, z)),
    };
    PropertyReport { outcomes }
}

/// Checks `d_Y = d^π_Y` on every defined same-coordinate triple.
pub fn check_exact_equality(sp: &Space) -> PropertyOutcome {
    let sys = sp.sys;
    let mut o = PropertyOutcome::new("exact");
    for i in 1..=sys.m() {
        for y in sys.coord_range(i) {
            for x in sys.coord_range(i) {
                for z in sys.coord_range(i) {
                    if y == x || y == z || x == z {
                        continue;
                    }
                    let (a, b): (Option<Rational>, Option<Rational>) = (sp.d(y, x, z), sp.dpi(y, x, z));
                    if a.is_some() || b.is_some() {
                        o.record(a == b, || format!("({}; {}, {})", sys.id(y), sys.id(x), sys.id(z)));
                    }
                }
            }
        }
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::calibrate_constants;
    use crate::metrics::DerivedMetrics;
    use crate::models::tree::p11;
    use crate::rational::int;

    #[test]
    fn fixture_properties() {
        let sys = p11();
        let met = DerivedMetrics::exact(&sys);
        let sp = Space::new(&sys, &met);
        let ladder = calibrate_constants(&sp).unwrap();
        let r = check_properties(&sp, &ladder);
        assert!(r.passes(), "{r:?}");
        assert!(r.get("triangle").unwrap().checked > 0);
        assert!(check_exact_equality(&sp).passes());
        let mut loose = ladder.clone();
        loose.big_theta = int(0);
        let r = check_properties(&sp, &loose);
        assert!(!r.get("monotonicity").unwrap().passes() || !r.get("order").unwrap().passes());
    }
}
