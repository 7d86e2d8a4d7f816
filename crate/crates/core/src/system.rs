//! Composite projection systems: elements, the activity relation and raw projection distances.
//!
//! Elements are addressed internally by their dense position in the sorted element list.
//! [`ElementId`] is the stable external name used in files and reports.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Range;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use rayon::prelude::*;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Stable name of an element: its coordinate (1-based) and an index inside that coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementId {
    pub coord: usize,
    pub index: u64,
}

impl ElementId {
    pub fn new(coord: usize, index: u64) -> Self {
        ElementId { coord, index }
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.coord, self.index)
    }
}

/// Square bit matrix holding the activity relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = n.div_ceil(64).max(1);
        BitMatrix { n, stride, bits: vec![0; stride * n] }
    }

    pub fn get(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.stride + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn set(&mut self, a: usize, b: usize) {
        self.bits[a * self.stride + b / 64] |= 1 << (b % 64);
    }

    pub fn size(&self) -> usize {
        self.n
    }
}

/// A source of integer projection coordinates: `d^π_Y(X,Z) = weight · |p_Y(X) − p_Y(Z)|`.
pub trait ProjectionSource: Send + Sync {
    /// Projection coordinate of element `x` onto element `y` (positions), `None` when undefined.
    fn projection(&self, y: usize, x: usize) -> Option<i64>;
}

#[derive(Clone)]
pub(crate) enum Dpi {
    Table(HashMap<(u32, u32, u32), Rational>),
    Projection {
        weight: Rational,
        source: Arc<dyn ProjectionSource>,
        rows: Arc<Vec<OnceLock<Box<[Option<i64>]>>>>,
    },
}

/// Every distance multiplied by a common denominator, as machine integers.
#[derive(Clone, Debug)]
struct Scaled {
    scale: i64,
    table: Option<Arc<HashMap<(u32, u32, u32), i64>>>,
    weight: i64,
}

const SCALED_LIMIT: i64 = 1 << 40;

fn small(r: &BigInt) -> Option<i64> {
    r.to_i64().filter(|v| v.abs() <= SCALED_LIMIT)
}

fn scaled_view(dpi: &Dpi, theta: &Rational) -> Option<Scaled> {
    let mut den = theta.denom().clone();
    match dpi {
        Dpi::Table(map) => {
            for v in map.values() {
                den = den.lcm(v.denom());
            }
            let scale = small(&den)?;
            let mut table = HashMap::with_capacity(map.len());
            for (k, v) in map {
                table.insert(*k, small(&(v * &den).to_integer())?);
            }
            Some(Scaled { scale, table: Some(Arc::new(table)), weight: 0 })
        }
        Dpi::Projection { weight, .. } => {
            den = den.lcm(weight.denom());
            let scale = small(&den)?;
            let weight = small(&(weight * &den).to_integer())?;
            Some(Scaled { scale, table: None, weight })
        }
    }
}

/// An immutable composite projection system.
#[derive(Clone)]
pub struct CompositeSystem {
    m: usize,
    theta: Rational,
    scaled: Option<Scaled>,
    ids: Vec<ElementId>,
    pos: HashMap<ElementId, usize>,
    coord_start: Vec<usize>,
    act: BitMatrix,
    pub(crate) dpi: Dpi,
    boundary: Vec<bool>,
    labels: Vec<String>,
}

impl fmt::Debug for CompositeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeSystem")
            .field("m", &self.m)
            .field("theta", &self.theta.to_string())
            .field("elements", &self.ids.len())
            .field("backend", &self.backend_name())
            .finish()
    }
}

impl CompositeSystem {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn theta(&self) -> &Rational {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[ElementId] {
        &self.ids
    }

    pub fn id(&self, p: usize) -> ElementId {
        self.ids[p]
    }

    pub fn position(&self, id: ElementId) -> Result<usize> {
        self.pos
            .get(&id)
            .copied()
            .ok_or_else(|| Error::UnknownElement(id.to_string()))
    }

    pub fn coord(&self, p: usize) -> usize {
        self.ids[p].coord
    }

    /// Positions of the elements of coordinate `i`.
    pub fn coord_range(&self, i: usize) -> Range<usize> {
        if i == 0 || i > self.m {
            return 0..0;
        }
        self.coord_start[i - 1]..self.coord_start[i]
    }

    pub fn is_active(&self, a: usize, b: usize) -> bool {
        self.act.get(a, b)
    }

    pub fn is_boundary(&self, p: usize) -> bool {
        self.boundary[p]
    }

    pub fn has_boundary(&self) -> bool {
        self.boundary.iter().any(|&b| b)
    }

    /// Human readable label of an element (empty unless the system came from a model).
    pub fn label(&self, p: usize) -> String {
        self.labels.get(p).cloned().unwrap_or_else(|| self.ids[p].to_string())
    }

    pub fn backend_name(&self) -> &'static str {
        match self.dpi {
            Dpi::Table(_) => "table",
            Dpi::Projection { .. } => "projection",
        }
    }

    /// Elements active with `p`, excluding `p` itself.
    pub fn active_with(&self, p: usize) -> Vec<usize> {
        (0..self.len()).filter(|&q| q != p && self.is_active(p, q)).collect()
    }

    /// Raw projection distance `d^π_Y(X,Z)`; `None` when undefined.
    pub fn dpi(&self, y: usize, x: usize, z: usize) -> Option<Rational> {
        if x == y || z == y || !self.is_active(y, x) || !self.is_active(y, z) {
            return None;
        }
        match &self.dpi {
            Dpi::Table(map) => map.get(&(y as u32, x as u32, z as u32)).cloned(),
            Dpi::Projection { weight, .. } => {
                let px = self.proj(y, x)?;
                let pz = self.proj(y, z)?;
                Some(weight * int(px - pz).abs())
            }
        }
    }

    /// Common denominator of every distance and of `θ`, when the scaled view fits in `i64`.
    pub fn scale(&self) -> Option<i64> {
        self.scaled.as_ref().map(|s| s.scale)
    }

    /// `d^π_Y(X,Z)` multiplied by [`scale`](Self::scale).
    pub fn dpi_scaled(&self, y: usize, x: usize, z: usize) -> Option<i64> {
        if x == y || z == y || !self.is_active(y, x) || !self.is_active(y, z) {
            return None;
        }
        let s = self.scaled.as_ref()?;
        match &s.table {
            Some(t) => t.get(&(y as u32, x as u32, z as u32)).copied(),
            None => {
                let d = self.proj(y, x)?.abs_diff(self.proj(y, z)?);
                let d = i64::try_from(d).ok().and_then(|d| d.checked_mul(s.weight));
                Some(d.filter(|v| *v <= SCALED_LIMIT).expect("scaled distance exceeds the integer range"))
            }
        }
    }

    /// Largest scaled integer `v` with `v ≤ r · scale`.
    pub fn scale_floor(&self, r: &Rational) -> Option<i64> {
        let s = self.scale()?;
        (r * int(s)).floor().to_integer().to_i64()
    }

    /// Smallest scaled integer `v` with `v ≥ r · scale`.
    pub fn scale_ceil(&self, r: &Rational) -> Option<i64> {
        let s = self.scale()?;
        (r * int(s)).ceil().to_integer().to_i64()
    }

    /// The rational value of a scaled integer.
    pub fn unscale(&self, v: i64) -> Rational {
        let s = self.scale().expect("system has a scaled view");
        Rational::new(BigInt::from(v), BigInt::from(s))
    }

    /// Projection coordinate of `x` on `y` for projection-backed systems.
    pub fn proj(&self, y: usize, x: usize) -> Option<i64> {
        match &self.dpi {
            Dpi::Table(_) => None,
            Dpi::Projection { .. } => {
                if !self.is_active(y, x) {
                    return None;
                }
                self.proj_row(y).and_then(|row| row[x])
            }
        }
    }

    /// Computes and caches every projection row in parallel.
    pub fn precompute_rows(&self) {
        (0..self.len()).into_par_iter().for_each(|y| {
            self.proj_row(y);
        });
    }

    /// Full row of projection coordinates onto `y`, computed once and cached.
    pub fn proj_row(&self, y: usize) -> Option<&[Option<i64>]> {
        match &self.dpi {
            Dpi::Table(_) => None,
            Dpi::Projection { source, rows, .. } => Some(rows[y].get_or_init(|| {
                (0..self.ids.len())
                    .map(|x| if self.is_active(y, x) { source.projection(y, x) } else { None })
                    .collect()
            })),
        }
    }

    /// Weight `D` of a projection-backed system.
    pub fn proj_weight(&self) -> Option<&Rational> {
        match &self.dpi {
            Dpi::Table(_) => None,
            Dpi::Projection { weight, .. } => Some(weight),
        }
    }

    /// Defined table entries `(y, x, z, value)` in position order (table backend only).
    pub fn table_entries(&self) -> Vec<(usize, usize, usize, Rational)> {
        match &self.dpi {
            Dpi::Table(map) => {
                let mut v: Vec<_> = map
                    .iter()
                    .map(|(&(y, x, z), r)| (y as usize, x as usize, z as usize, r.clone()))
                    .collect();
                v.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
                v
            }
            Dpi::Projection { .. } => {
                let mut v = Vec::new();
                for y in 0..self.len() {
                    for x in 0..self.len() {
                        for z in 0..self.len() {
                            if let Some(d) = self.dpi(y, x, z) {
                                v.push((y, x, z, d));
                            }
                        }
                    }
                }
                v
            }
        }
    }

    /// Copy of this system with a different base constant.
    pub fn with_theta(&self, theta: Rational) -> Self {
        let mut s = self.clone();
        s.scaled = scaled_view(&s.dpi, &theta);
        s.theta = theta;
        s
    }

    /// Structural equality including every defined distance.
    pub fn same_as(&self, other: &Self) -> bool {
        if self.m != other.m
            || self.theta != other.theta
            || self.ids != other.ids
            || self.act != other.act
            || self.boundary != other.boundary
        {
            return false;
        }
        let n = self.len();
        for y in 0..n {
            for x in 0..n {
                for z in 0..n {
                    if self.dpi(y, x, z) != other.dpi(y, x, z) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Builds a projection-backed system from sorted ids and an activity predicate.
    pub fn from_projection(
        m: usize,
        theta: Rational,
        ids: Vec<ElementId>,
        active: impl Fn(usize, usize) -> bool + Sync,
        weight: Rational,
        source: Arc<dyn ProjectionSource>,
        boundary: Vec<bool>,
        labels: Vec<String>,
    ) -> Result<Self> {
        check_sorted_ids(m, &ids)?;
        let n = ids.len();
        let mut act = BitMatrix::new(n);
        let coord_start = coord_starts(m, &ids);
        for a in 0..n {
            act.set(a, a);
            for b in a + 1..n {
                if ids[a].coord == ids[b].coord || active(a, b) {
                    act.set(a, b);
                    act.set(b, a);
                }
            }
        }
        let rows = Arc::new((0..n).map(|_| OnceLock::new()).collect());
        let dpi = Dpi::Projection { weight, source, rows };
        Ok(CompositeSystem {
            m,
            scaled: scaled_view(&dpi, &theta),
            theta,
            pos: ids.iter().enumerate().map(|(i, &id)| (id, i)).collect(),
            ids,
            coord_start,
            act,
            dpi,
            boundary: if boundary.is_empty() { vec![false; n] } else { boundary },
            labels,
        })
    }
}

fn check_sorted_ids(m: usize, ids: &[ElementId]) -> Result<()> {
    for w in ids.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidInstance(format!("element ids not strictly sorted at {}", w[1])));
        }
    }
    if let Some(bad) = ids.iter().find(|id| id.coord == 0 || id.coord > m) {
        return Err(Error::InvalidInstance(format!("coordinate of {bad} outside 1..={m}")));
    }
    Ok(())
}

fn coord_starts(m: usize, ids: &[ElementId]) -> Vec<usize> {
    (1..=m + 1)
        .map(|i| ids.partition_point(|id| id.coord < i))
        .collect()
}

/// Incremental constructor for table-backed systems.
#[derive(Clone, Debug, Default)]
pub struct SystemBuilder {
    m: usize,
    theta: Rational,
    ids: BTreeSet<ElementId>,
    act: Vec<(ElementId, ElementId)>,
    dpi: Vec<(ElementId, ElementId, ElementId, Rational)>,
    boundary: BTreeSet<ElementId>,
    labels: HashMap<ElementId, String>,
}

impl SystemBuilder {
    pub fn new(m: usize, theta: Rational) -> Self {
        SystemBuilder { m, theta, ..Default::default() }
    }

    pub fn element(&mut self, id: ElementId) -> &mut Self {
        self.ids.insert(id);
        self
    }

    pub fn labelled(&mut self, id: ElementId, label: impl Into<String>) -> &mut Self {
        self.ids.insert(id);
        self.labels.insert(id, label.into());
        self
    }

    /// Declares `a` and `b` mutually active.
    pub fn active(&mut self, a: ElementId, b: ElementId) -> &mut Self {
        self.act.push((a, b));
        self
    }

    /// Sets `d^π_y(x, z)`. The mirrored entry `(y, z, x)` is filled in when not given explicitly.
    pub fn dpi(&mut self, y: ElementId, x: ElementId, z: ElementId, v: Rational) -> &mut Self {
        self.dpi.push((y, x, z, v));
        self
    }

    pub fn boundary(&mut self, id: ElementId) -> &mut Self {
        self.boundary.insert(id);
        self
    }

    pub fn build(&self) -> Result<CompositeSystem> {
        let ids: Vec<ElementId> = self.ids.iter().copied().collect();
        check_sorted_ids(self.m, &ids)?;
        let pos: HashMap<ElementId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let lookup = |id: &ElementId| {
            pos.get(id)
                .copied()
                .ok_or_else(|| Error::UnknownElement(id.to_string()))
        };
        let n = ids.len();
        let mut act = BitMatrix::new(n);
        for a in 0..n {
            for b in 0..n {
                if ids[a].coord == ids[b].coord {
                    act.set(a, b);
                }
            }
        }
        for (a, b) in &self.act {
            let (pa, pb) = (lookup(a)?, lookup(b)?);
            act.set(pa, pb);
            act.set(pb, pa);
        }
        let mut table: HashMap<(u32, u32, u32), Rational> = HashMap::new();
        for (y, x, z, v) in &self.dpi {
            let (py, px, pz) = (lookup(y)?, lookup(x)?, lookup(z)?);
            if py == px || py == pz || !act.get(py, px) || !act.get(py, pz) {
                return Err(Error::InvalidInstance(format!(
                    "dpi entry ({y}; {x}, {z}) requires {x} and {z} active with {y} and distinct from it"
                )));
            }
            if v.is_negative() {
                return Err(Error::InvalidInstance(format!("negative dpi entry ({y}; {x}, {z})")));
            }
            table.insert((py as u32, px as u32, pz as u32), v.clone());
        }
        let explicit: Vec<(u32, u32, u32)> = table.keys().copied().collect();
        for (y, x, z) in explicit {
            if !table.contains_key(&(y, z, x)) {
                let v = table[&(y, x, z)].clone();
                table.insert((y, z, x), v);
            }
        }
        let mut boundary = vec![false; n];
        for b in &self.boundary {
            boundary[lookup(b)?] = true;
        }
        let labels = if self.labels.is_empty() {
            Vec::new()
        } else {
            ids.iter()
                .map(|id| self.labels.get(id).cloned().unwrap_or_else(|| id.to_string()))
                .collect()
        };
        let dpi = Dpi::Table(table);
        Ok(CompositeSystem {
            m: self.m,
            scaled: scaled_view(&dpi, &self.theta),
            theta: self.theta.clone(),
            coord_start: coord_starts(self.m, &ids),
            ids,
            pos,
            act,
            dpi,
            boundary,
            labels,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn e(c: usize, i: u64) -> ElementId {
        ElementId::new(c, i)
    }

    #[test]
    fn builder_mirrors_and_keeps_explicit_asymmetry() {
        let mut b = SystemBuilder::new(1, int(0));
        let (y, x, z) = (e(1, 0), e(1, 1), e(1, 2));
        b.element(y).element(x).element(z);
        b.dpi(y, x, z, int(2));
        let s = b.build().unwrap();
        assert_eq!(s.dpi(0, 1, 2), Some(int(2)));
        assert_eq!(s.dpi(0, 2, 1), Some(int(2)));
        assert_eq!(s.dpi(0, 1, 1), None);

        b.dpi(y, z, x, int(3));
        let s = b.build().unwrap();
        assert_eq!(s.dpi(0, 1, 2), Some(int(2)));
        assert_eq!(s.dpi(0, 2, 1), Some(int(3)));
    }

    #[test]
    fn coordinate_mates_are_active_and_ranges_partition() {
        let mut b = SystemBuilder::new(2, int(0));
        b.element(e(1, 0)).element(e(2, 5)).element(e(1, 3));
        let s = b.build().unwrap();
        assert_eq!(s.coord_range(1), 0..2);
        assert_eq!(s.coord_range(2), 2..3);
        assert!(s.is_active(0, 1));
        assert!(!s.is_active(0, 2));
    }

    #[test]
    fn dpi_on_inactive_triple_is_rejected() {
        let mut b = SystemBuilder::new(2, int(0));
        b.element(e(1, 0)).element(e(2, 0)).element(e(1, 1));
        b.dpi(e(1, 0), e(2, 0), e(1, 1), int(1));
        assert!(b.build().is_err());
    }
}
