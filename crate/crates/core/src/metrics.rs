//! Modified distances `d_Y`, the mixed distance `d^∢_Y` and the sets `𝕐^j_M(X,Z)`.
//!
//! `d_Y(X,Z)` is the minimum of `d^π_Y` over the pair family `H(X,Z)`, which consists of
//! `(X,Z)` itself, the pairs `(X,Z')` with `d^π_Z(X,Z') > 2θ`, the pairs `(X',Z)` with
//! `d^π_X(X',Z) > 2θ`, and the pairs `(X',Z')` with both `d^π_X(X',Z') > 2θ` and
//! `d^π_Z(X',Z') > 2θ`, all taken inside the coordinate of `X` and `Z`.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::order::{standard_order, OrderError};
use crate::rational::{int, Exact, Rational};
use crate::system::CompositeSystem;

/// Evidence that modified distances coincide with raw distances for a model.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RawCertificate {
    /// Description of the system on which the equality was checked.
    pub verified_on: String,
    pub verified_elements: usize,
    pub verified_triples: usize,
}

/// Modified distances of one coordinate, scaled, indexed by local positions; `-1` is undefined.
#[derive(Clone, Debug)]
struct Dense {
    start: usize,
    n: usize,
    vals: Vec<i64>,
}

impl Dense {
    fn get(&self, y: usize, x: usize, z: usize) -> Option<i64> {
        let (y, x, z) = (y - self.start, x - self.start, z - self.start);
        let v = self.vals[(y * self.n + x) * self.n + z];
        (v >= 0).then_some(v)
    }
}

#[derive(Clone, Debug)]
enum Mode {
    Scaled(Vec<Dense>),
    Exact(HashMap<(u32, u32, u32), Rational>),
    Raw(RawCertificate),
}

/// Precomputed (or certified) modified distances for one system.
#[derive(Clone, Debug)]
pub struct DerivedMetrics {
    mode: Mode,
}

fn h_family<T: Exact>(
    sys: &CompositeSystem,
    x: usize,
    z: usize,
    two_theta: &T,
    dpi: &impl Fn(usize, usize, usize) -> Option<T>,
) -> Vec<(usize, usize)> {
    let i = sys.coord(x);
    assert_eq!(i, sys.coord(z), "H(X,Z) needs X and Z in one coordinate");
    let big = |v: Option<T>| v.is_some_and(|d| d > *two_theta);
    let range = sys.coord_range(i);
    let mut out = vec![(x, z)];
    for zp in range.clone() {
        if big(dpi(z, x, zp)) {
            out.push((x, zp));
        }
    }
    for xp in range.clone() {
        if big(dpi(x, xp, z)) {
            out.push((xp, z));
        }
    }
    for xp in range.clone() {
        for zp in range.clone() {
            if big(dpi(x, xp, zp)) && big(dpi(z, xp, zp)) {
                out.push((xp, zp));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// The pair family `H(X,Z)`, sorted.
pub fn compute_h(sys: &CompositeSystem, x: usize, z: usize) -> Vec<(usize, usize)> {
    match sys.scale_floor(&(sys.theta() * int(2))) {
        Some(t) => h_family(sys, x, z, &t, &|y, a, b| sys.dpi_scaled(y, a, b)),
        None => h_family(sys, x, z, &(sys.theta() * int(2)), &|y, a, b| sys.dpi(y, a, b)),
    }
}

fn min_over_h<T: Exact>(
    y: usize,
    h: &[(usize, usize)],
    dpi: &impl Fn(usize, usize, usize) -> Option<T>,
) -> Option<T> {
    let zero = T::zero();
    let mut best: Option<T> = None;
    for &(a, b) in h {
        if let Some(v) = dpi(y, a, b) {
            if best.as_ref().is_none_or(|c| v < *c) {
                let stop = v <= zero;
                best = Some(v);
                if stop {
                    break;
                }
            }
        }
    }
    best
}

/// Modified distances `(y, x, z, d)` of one coordinate.
fn coordinate_entries<T: Exact>(
    sys: &CompositeSystem,
    i: usize,
    two_theta: &T,
    dpi: &(impl Fn(usize, usize, usize) -> Option<T> + Sync),
) -> Vec<(usize, usize, usize, T)> {
    let r = sys.coord_range(i);
    let pairs: Vec<(usize, usize)> =
        r.clone().flat_map(|x| r.clone().filter(move |&z| z != x).map(move |z| (x, z))).collect();
    pairs
        .par_iter()
        .flat_map_iter(|&(x, z)| {
            let h = h_family(sys, x, z, two_theta, dpi);
            r.clone()
                .filter(move |&y| y != x && y != z)
                .filter_map(move |y| min_over_h(y, &h, dpi).map(|d| (y, x, z, d)))
                .collect::<Vec<_>>()
        })
        .collect()
}

impl DerivedMetrics {
    /// Computes every modified distance by enumerating `H`. Intended for small systems.
    pub fn exact(sys: &CompositeSystem) -> Self {
        let two_theta = sys.theta() * int(2);
        if let Some(tt) = sys.scale_floor(&two_theta) {
            let dense = (1..=sys.m())
                .map(|i| {
                    let r = sys.coord_range(i);
                    let n = r.len();
                    let mut vals = vec![-1i64; n * n * n];
                    for (y, x, z, d) in coordinate_entries(sys, i, &tt, &|y, a, b| sys.dpi_scaled(y, a, b)) {
                        vals[((y - r.start) * n + (x - r.start)) * n + (z - r.start)] = d;
                    }
                    Dense { start: r.start, n, vals }
                })
                .collect();
            return DerivedMetrics { mode: Mode::Scaled(dense) };
        }
        let map = (1..=sys.m())
            .flat_map(|i| coordinate_entries(sys, i, &two_theta, &|y, a, b| sys.dpi(y, a, b)))
            .map(|(y, x, z, d)| ((y as u32, x as u32, z as u32), d))
            .collect();
        DerivedMetrics { mode: Mode::Exact(map) }
    }

    /// Uses raw distances as modified distances, backed by a certificate.
    pub fn raw(certificate: RawCertificate) -> Self {
        DerivedMetrics { mode: Mode::Raw(certificate) }
    }

    pub fn certificate(&self) -> Option<&RawCertificate> {
        match &self.mode {
            Mode::Raw(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_raw(&self) -> bool {
        matches!(self.mode, Mode::Raw(_))
    }

    fn in_coordinate(sys: &CompositeSystem, y: usize, x: usize, z: usize) -> bool {
        let i = sys.coord(y);
        sys.coord(x) == i && sys.coord(z) == i && y != x && y != z
    }

    /// Modified distance `d_Y(X,Z)` for `X, Y, Z` in one coordinate.
    pub fn d(&self, sys: &CompositeSystem, y: usize, x: usize, z: usize) -> Option<Rational> {
        if !Self::in_coordinate(sys, y, x, z) {
            return None;
        }
        if x == z {
            return Some(Rational::zero());
        }
        match &self.mode {
            Mode::Scaled(dense) => dense[sys.coord(y) - 1].get(y, x, z).map(|v| sys.unscale(v)),
            Mode::Exact(map) => map.get(&(y as u32, x as u32, z as u32)).cloned(),
            Mode::Raw(_) => sys.dpi(y, x, z),
        }
    }

    /// `d_Y(X,Z)` multiplied by the system scale, when a scaled view exists.
    pub fn d_scaled(&self, sys: &CompositeSystem, y: usize, x: usize, z: usize) -> Option<i64> {
        if !Self::in_coordinate(sys, y, x, z) {
            return None;
        }
        match &self.mode {
            Mode::Exact(_) => None,
            _ if x == z => sys.scale().map(|_| 0),
            Mode::Scaled(dense) => dense[sys.coord(y) - 1].get(y, x, z),
            Mode::Raw(_) => sys.dpi_scaled(y, x, z),
        }
    }

    /// Whether [`d_scaled`](Self::d_scaled) is available.
    pub fn has_scaled(&self, sys: &CompositeSystem) -> bool {
        !matches!(self.mode, Mode::Exact(_)) && sys.scale().is_some()
    }
}

fn certify_with<T: Exact>(
    sys: &CompositeSystem,
    raw: impl Fn(usize, usize, usize) -> Option<T> + Sync,
    modified: impl Fn(usize, usize, usize) -> Option<T> + Sync,
) -> Result<usize> {
    let mut triples = 0usize;
    for i in 1..=sys.m() {
        let r = sys.coord_range(i);
        let counts: Vec<Result<usize>> = r
            .clone()
            .into_par_iter()
            .map(|y| {
                let mut c = 0;
                for x in r.clone() {
                    for z in r.clone() {
                        if x == z {
                            continue;
                        }
                        let (a, b) = (raw(y, x, z), modified(y, x, z));
                        if a.is_some() || b.is_some() {
                            c += 1;
                        }
                        if a != b {
                            return Err(Error::Invariant(format!(
                                "d_Y differs from d^π_Y at ({}; {}, {})",
                                sys.id(y),
                                sys.id(x),
                                sys.id(z)
                            )));
                        }
                    }
                }
                Ok(c)
            })
            .collect();
        for c in counts {
            triples += c?;
        }
    }
    Ok(triples)
}

/// Checks exhaustively that `d_Y = d^π_Y` on `sys` and returns a certificate.
pub fn certify_raw(sys: &CompositeSystem, description: &str) -> Result<RawCertificate> {
    let exact = DerivedMetrics::exact(sys);
    let triples = if exact.has_scaled(sys) {
        certify_with(sys, |y, x, z| sys.dpi_scaled(y, x, z), |y, x, z| exact.d_scaled(sys, y, x, z))?
    } else {
        certify_with(sys, |y, x, z| sys.dpi(y, x, z), |y, x, z| exact.d(sys, y, x, z))?
    };
    Ok(RawCertificate {
        verified_on: description.to_string(),
        verified_elements: sys.len(),
        verified_triples: triples,
    })
}

/// A system paired with its modified distances.
#[derive(Clone, Copy)]
pub struct Space<'a> {
    pub sys: &'a CompositeSystem,
    pub metrics: &'a DerivedMetrics,
}

impl<'a> Space<'a> {
    pub fn new(sys: &'a CompositeSystem, metrics: &'a DerivedMetrics) -> Self {
        Space { sys, metrics }
    }

    pub fn dpi(&self, y: usize, x: usize, z: usize) -> Option<Rational> {
        self.sys.dpi(y, x, z)
    }

    pub fn d(&self, y: usize, x: usize, z: usize) -> Option<Rational> {
        self.metrics.d(self.sys, y, x, z)
    }

    pub fn d_scaled(&self, y: usize, x: usize, z: usize) -> Option<i64> {
        self.metrics.d_scaled(self.sys, y, x, z)
    }

    pub fn has_scaled(&self) -> bool {
        self.metrics.has_scaled(self.sys)
    }

    /// `d^∢_Y(X,Z)` multiplied by the system scale.
    pub fn d_angle_scaled(&self, y: usize, x: usize, z: usize) -> Option<i64> {
        let i = self.sys.coord(y);
        if self.sys.coord(x) == i && self.sys.coord(z) == i {
            self.d_scaled(y, x, z)
        } else {
            self.sys.dpi_scaled(y, x, z)
        }
    }

    /// `d^∢_Y(X,Z)`: the modified distance when all three share a coordinate, otherwise `d^π`.
    pub fn d_angle(&self, y: usize, x: usize, z: usize) -> Option<Rational> {
        let i = self.sys.coord(y);
        if self.sys.coord(x) == i && self.sys.coord(z) == i {
            self.d(y, x, z)
        } else {
            self.sys.dpi(y, x, z)
        }
    }

    /// Whether `d^∢_Y` reduces to `weight · |p_Y(X) − p_Y(Z)|` for every pair.
    pub fn has_fast_projection(&self) -> bool {
        self.metrics.is_raw() && self.sys.proj_weight().is_some()
    }

    /// `𝕐^j_M(X,Z)` in position order.
    pub fn y_set(&self, j: usize, m: &Rational, x: usize, z: usize) -> Vec<usize> {
        let candidates = self
            .sys
            .coord_range(j)
            .filter(|&y| y != x && y != z)
            .filter(|&y| self.sys.is_active(y, x) && self.sys.is_active(y, z));
        match self.sys.scale_ceil(m).filter(|_| self.has_scaled()) {
            Some(ms) => candidates.filter(|&y| self.d_angle_scaled(y, x, z).is_some_and(|d| d >= ms)).collect(),
            None => candidates.filter(|&y| self.d_angle(y, x, z).is_some_and(|d| d >= *m)).collect(),
        }
    }

    /// `𝕐^j_M(X,Z)` sorted by the standard order when `X`, `Z` lie in coordinate `j` and
    /// `M ≥ Θ`; position order otherwise.
    pub fn y_set_ordered(
        &self,
        j: usize,
        m: &Rational,
        x: usize,
        z: usize,
        kappa: &Rational,
        big_theta: &Rational,
    ) -> std::result::Result<Vec<usize>, OrderError<usize>> {
        let set = self.y_set(j, m, x, z);
        if self.sys.coord(x) == j && self.sys.coord(z) == j && m >= big_theta && x != z {
            let full = standard_order(x, z, &set, kappa, |a, b, c| self.d(*a, *b, *c))?;
            Ok(full[1..full.len() - 1].to_vec())
        } else {
            Ok(set)
        }
    }

    /// Maximum of `d^∢_Y(X,Z)` over `X, Z` in `set` (all assumed active with `y`, excluding `y`),
    /// with a pair attaining it.
    pub fn max_pair(&self, y: usize, set: &[usize]) -> Option<(Rational, usize, usize)> {
        if set.is_empty() {
            return None;
        }
        if self.has_fast_projection() {
            let w = self.sys.proj_weight().unwrap();
            let mut lo: Option<(i64, usize)> = None;
            let mut hi: Option<(i64, usize)> = None;
            for &x in set {
                let Some(p) = self.sys.proj(y, x) else { continue };
                if lo.is_none_or(|(v, _)| p < v) {
                    lo = Some((p, x));
                }
                if hi.is_none_or(|(v, _)| p > v) {
                    hi = Some((p, x));
                }
            }
            let ((a, xa), (b, xb)) = (lo?, hi?);
            return Some((w * int(b - a), xa, xb));
        }
        let mut best: Option<(Rational, usize, usize)> = None;
        for &x in set {
            for &z in set {
                if let Some(d) = self.d_angle(y, x, z) {
                    if best.as_ref().is_none_or(|(b, _, _)| d > *b) {
                        best = Some((d, x, z));
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::tree::p11;

    #[test]
    fn p11_modified_distances() {
        let sys = p11();
        let met = DerivedMetrics::exact(&sys);
        let sp = Space::new(&sys, &met);
        let [a, b, y, z] = [0, 1, 2, 3];
        assert_eq!(sp.d(y, a, b), Some(int(2)));
        assert_eq!(sp.d(y, a, a), Some(int(0)));
        assert_eq!(sp.d(y, a, z), Some(int(0)));
        assert_eq!(sp.d(y, y, a), None);
        assert_eq!(sp.d_angle(y, a, b), Some(int(2)));
        assert_eq!(sp.y_set(1, &int(1), a, b), vec![y]);
        assert!(compute_h(&sys, a, b).contains(&(a, b)));
    }
}
