//! The windmill process: starting from a maximal set of mutually inactive elements, alternately
//! add osculators to the principal coordinate and close up under the rotation groups of the
//! representatives, until every element of the truncation has been absorbed.

use std::collections::VecDeque;

use serde::Serialize;

use crate::complex::induced_connected;
use crate::error::{Error, Result};
use crate::group::GroupWord;
use crate::hull::{convexity_violators, is_convex, osculation_set, terminal_osculator, InvarianceStatus, Levels, Region};
use crate::models::graph_product::GraphProductModel;
use crate::rational::{self, int, Rational};
use crate::rotors::family::{Check, RotatingFamily};
use crate::rotors::tree::{principal_tree, TreeEstimates, TreeOptions};

/// A windmill: a region invariant under the group generated by the rotations of its representatives.
#[derive(Clone, Debug)]
pub struct Windmill {
    pub region: Region,
    /// Principal coordinate, 1-based.
    pub j0: usize,
    /// Positions of the representatives whose rotations generate `G_W`.
    pub representatives: Vec<usize>,
    pub steps: usize,
}

impl Windmill {
    /// Whether every coordinate has members.
    pub fn full(&self, model: &GraphProductModel) -> bool {
        let sys = model.system();
        (1..=sys.m()).all(|i| sys.coord_range(i).any(|p| self.region.contains(p)))
    }

    pub fn absorbed(&self) -> bool {
        self.region.len() == self.region.universe()
    }

    pub fn region_sizes(&self, model: &GraphProductModel) -> Vec<usize> {
        let sys = model.system();
        (1..=sys.m()).map(|i| self.region.in_coord(sys, i).len()).collect()
    }

    /// Rotations of the representatives and their inverses.
    pub fn generators(&self, model: &GraphProductModel) -> Vec<GroupWord> {
        generators(model, &self.representatives)
    }
}

fn generators(model: &GraphProductModel, reps: &[usize]) -> Vec<GroupWord> {
    reps.iter()
        .flat_map(|&p| {
            let c = model.coset(p);
            [model.rotation_power(c, 1), model.rotation_power(c, -1)]
        })
        .collect()
}

/// Closes `seeds` under `gens` inside the truncation. The flag reports images that left it.
pub fn orbit_closure(model: &GraphProductModel, gens: &[GroupWord], seeds: &Region) -> (Region, bool) {
    let mut region = seeds.clone();
    let mut queue: VecDeque<usize> = seeds.members().into();
    let mut partial = false;
    while let Some(p) = queue.pop_front() {
        for g in gens {
            match model.act_pos(g, p) {
                Some(r) => {
                    if region.insert(r) {
                        queue.push_back(r);
                    }
                }
                None => partial = true,
            }
        }
    }
    (region, partial)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Gap,
    Neighbor,
    Trivial,
}

/// Osculators selected for one unfolding step.
#[derive(Clone, Debug, Serialize)]
pub struct Osculators {
    pub kind: StepKind,
    /// Positions of `𝓡`.
    pub members: Vec<usize>,
    /// Least position of each `G_W`-orbit in `𝓡`.
    pub transversal: Vec<usize>,
}

/// Starts the process from a greedy maximal set of mutually inactive elements.
pub fn windmill_init(fam: &RotatingFamily) -> Result<Windmill> {
    let model = fam.model();
    let sys = model.system();
    let mut chosen: Vec<usize> = Vec::new();
    for p in 0..sys.len() {
        if chosen.iter().all(|&c| sys.coord(c) != sys.coord(p) && !sys.is_active(c, p)) {
            chosen.push(p);
        }
    }
    let region = Region::from_positions(sys.len(), chosen.iter().copied());
    let ladder = model.ladder();
    let convex = is_convex(&model.space(), &region, &Levels::PerCoord(ladder.levels(1)), &ladder.kappa)?;
    if !convex.convex {
        return Err(Error::Invariant(format!("initial windmill is not convex: {:?}", convex.witnesses)));
    }
    if let Some(r) = (0..sys.len()).find(|&r| !region.contains(r) && !chosen.iter().any(|&c| sys.is_active(c, r))) {
        return Err(Error::Invariant(format!("{} is inactive with the whole initial set", model.label(model.coset(r)))));
    }
    Ok(Windmill { region, j0: 1, representatives: chosen, steps: 0 })
}

fn orbits(model: &GraphProductModel, gens: &[GroupWord], members: &[usize]) -> Vec<usize> {
    let n = model.system().len();
    let mut covered = Region::empty(n);
    let mut out = Vec::new();
    for &p in members {
        if covered.contains(p) {
            continue;
        }
        out.push(p);
        let (orbit, _) = orbit_closure(model, gens, &Region::from_positions(n, [p]));
        for r in orbit.members() {
            covered.insert(r);
        }
    }
    out
}

/// First element of coordinate `j` outside the region that sees it and has an empty osculation set.
fn neighbor_osculator(model: &GraphProductModel, w: &Region, j: usize, level: &Rational) -> Result<Option<usize>> {
    let sys = model.system();
    let sp = model.space();
    let kappa = &model.ladder().kappa;
    for r in sys.coord_range(j) {
        if w.contains(r) || !w.members().iter().any(|&x| sys.is_active(x, r)) {
            continue;
        }
        if osculation_set(&sp, w, r, level, kappa)?.is_empty() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Selects the osculators of the next unfolding step.
pub fn find_osculators(fam: &RotatingFamily, w: &Windmill) -> Result<Osculators> {
    let model = fam.model();
    let sys = model.system();
    let sp = model.space();
    let ladder = model.ladder();
    let kappa = &ladder.kappa;
    if w.absorbed() {
        return Err(Error::Complete);
    }
    let gens = w.generators(model);
    let gap_level = &ladder.c_star / int(2) - int(20) * kappa;
    let violators = convexity_violators(&sp, &w.region, &Levels::Scalar(gap_level), kappa)?;
    if !violators.is_empty() {
        let members: Vec<usize> = violators.into_iter().filter(|&p| sys.coord(p) == w.j0).collect();
        let transversal = orbits(model, &gens, &members);
        let kind = if members.is_empty() { StepKind::Trivial } else { StepKind::Gap };
        return Ok(Osculators { kind, members, transversal });
    }
    let level = &ladder.c_star / int(2);
    match neighbor_osculator(model, &w.region, w.j0, &level)? {
        Some(r) => {
            let wide = &level + int(2 * sys.m() as i64) * kappa;
            let t = terminal_osculator(&sp, &w.region, r, &wide, ladder, InvarianceStatus::Certified)?;
            if t.z_position != r {
                return Err(Error::Invariant(format!(
                    "terminal osculator from {} ends at {}",
                    model.label(model.coset(r)),
                    model.label(model.coset(t.z_position))
                )));
            }
            let (orbit, _) = orbit_closure(model, &gens, &Region::from_positions(sys.len(), [r]));
            Ok(Osculators { kind: StepKind::Neighbor, members: orbit.members(), transversal: vec![r] })
        }
        None => {
            let mut found = false;
            for j in (1..=sys.m()).filter(|&j| j != w.j0) {
                if neighbor_osculator(model, &w.region, j, &level)?.is_some() {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Invariant("convex windmill has no neighbor osculator in any coordinate".into()));
            }
            Ok(Osculators { kind: StepKind::Trivial, members: vec![], transversal: vec![] })
        }
    }
}

/// The intermediate, possibly non-full, windmill built when the principal slice was empty.
#[derive(Clone, Debug, Serialize)]
pub struct Intermediate {
    pub size: usize,
    #[serde(with = "rational")]
    pub level: Rational,
    pub convex: bool,
    pub full: bool,
}

/// One line of the unfolding trace.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub j0: usize,
    pub kind: StepKind,
    pub osculators: usize,
    pub transversal: Vec<String>,
    pub region_sizes: Vec<usize>,
    #[serde(with = "rational")]
    pub convexity_level: Rational,
    pub convexity_verified: bool,
    pub intermediate: Option<Intermediate>,
    pub tree: Option<TreeEstimates>,
    /// Some orbit image left the truncation.
    pub partial: bool,
    pub invariance: Check,
    /// Connectivity of each nonempty slice in `P_K`; `None` for empty slices.
    pub connected: Vec<Option<bool>>,
    pub absorbed: bool,
}

/// Windmill invariants checked after every step.
#[derive(Clone, Debug, Serialize)]
pub struct WindmillCheck {
    pub convex: bool,
    pub invariance: Check,
    pub connected: Vec<Option<bool>>,
}

impl WindmillCheck {
    pub fn passes(&self) -> bool {
        self.convex && self.invariance.passes() && self.connected.iter().all(|c| c.unwrap_or(true))
    }
}

/// Checks `𝓛_{j0}`-convexity, invariance under `G_W` and connectivity of each slice in `P_K`.
pub fn verify_windmill(model: &GraphProductModel, w: &Windmill) -> Result<WindmillCheck> {
    let sys = model.system();
    let ladder = model.ladder();
    let convex = is_convex(&model.space(), &w.region, &Levels::PerCoord(ladder.levels(w.j0)), &ladder.kappa)?.convex;
    let mut invariance = Check::default();
    for g in w.generators(model) {
        for p in w.region.members() {
            match model.act_pos(&g, p) {
                Some(r) => invariance.record(1, w.region.contains(r), || format!("{g} moves {} out", model.label(model.coset(p)))),
                None => invariance.outside_truncation += 1,
            }
        }
    }
    let connected = (1..=sys.m())
        .map(|i| {
            let members = w.region.in_coord(sys, i);
            (!members.is_empty()).then(|| induced_connected(&model.space(), &members, i, &ladder.k))
        })
        .collect();
    Ok(WindmillCheck { convex, invariance, connected })
}

/// Performs one unfolding step with the given osculators.
pub fn unfold_step(fam: &RotatingFamily, w: &Windmill, osc: &Osculators, tree: &TreeOptions) -> Result<(Windmill, StepRecord)> {
    let model = fam.model();
    let sys = model.system();
    let sp = model.space();
    let ladder = model.ladder();
    let kappa = &ladder.kappa;
    let m = sys.m();
    let next_j0 = w.j0 % m + 1;
    let step = w.steps + 1;
    let label = |p: usize| model.label(model.coset(p));

    if osc.members.is_empty() {
        let next = Windmill { region: w.region.clone(), j0: next_j0, representatives: w.representatives.clone(), steps: step };
        let check = verify_windmill(model, &next)?;
        if !check.passes() {
            return Err(Error::Invariant(format!("trivial unfolding breaks the windmill invariants: {check:?}")));
        }
        let record = StepRecord {
            step,
            j0: w.j0,
            kind: StepKind::Trivial,
            osculators: 0,
            transversal: vec![],
            region_sizes: next.region_sizes(model),
            convexity_level: ladder.level(next_j0, next_j0),
            convexity_verified: check.convex,
            intermediate: None,
            tree: None,
            partial: false,
            invariance: check.invariance,
            connected: check.connected,
            absorbed: next.absorbed(),
        };
        return Ok((next, record));
    }

    let mut seeded = w.region.clone();
    let mut intermediate = None;
    if w.region.in_coord(sys, w.j0).is_empty() {
        for &r in &osc.members {
            seeded.insert(r);
        }
        let level = match osc.kind {
            StepKind::Neighbor => &ladder.c_star / int(2) + int(10) * kappa,
            _ => ladder.level(w.j0, w.j0),
        };
        let convex = is_convex(&sp, &seeded, &Levels::Scalar(level.clone()), kappa)?.convex;
        if !convex {
            return Err(Error::Invariant(format!("intermediate windmill is not {level}-convex")));
        }
        let full = (1..=m).all(|i| !seeded.in_coord(sys, i).is_empty());
        intermediate = Some(Intermediate { size: seeded.len(), level, convex, full });
    }

    let slice = seeded.in_coord(sys, w.j0);
    let t = principal_tree(model, &slice, &osc.members, tree)?;
    if !t.estimates.passes() {
        return Err(Error::Invariant(format!("principal tree estimates fail: {:?}", t.estimates)));
    }

    let mut representatives = w.representatives.clone();
    representatives.extend(osc.transversal.iter().copied().filter(|p| !w.representatives.contains(p)));
    let (region, partial) = orbit_closure(model, &generators(model, &representatives), &seeded);
    if !w.region.is_subset(&region) {
        return Err(Error::Invariant("unfolding lost members of the windmill".into()));
    }
    let level = match osc.kind {
        StepKind::Neighbor => Levels::Scalar(ladder.c_star.clone()),
        _ => Levels::PerCoord(ladder.levels(next_j0)),
    };
    let post = is_convex(&sp, &region, &level, kappa)?;
    if !post.convex {
        return Err(Error::Invariant(format!("unfolded windmill is not convex: {:?}", post.witnesses)));
    }
    let next = Windmill { region, j0: next_j0, representatives, steps: step };
    let check = verify_windmill(model, &next)?;
    if !check.passes() {
        return Err(Error::Invariant(format!("unfolded windmill breaks the windmill invariants: {check:?}")));
    }
    let record = StepRecord {
        step,
        j0: w.j0,
        kind: osc.kind,
        osculators: osc.members.len(),
        transversal: osc.transversal.iter().map(|&p| label(p)).collect(),
        region_sizes: next.region_sizes(model),
        convexity_level: level.min(),
        convexity_verified: true,
        intermediate,
        tree: Some(t.estimates),
        partial,
        invariance: check.invariance,
        connected: check.connected,
        absorbed: next.absorbed(),
    };
    Ok((next, record))
}

/// A complete run of the process.
#[derive(Clone, Debug)]
pub struct WindmillRun {
    pub windmill: Windmill,
    pub trace: Vec<StepRecord>,
}

impl WindmillRun {
    /// The trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.trace.iter().map(|r| serde_json::to_string(r).expect("serialisable") + "\n").collect()
    }
}

/// Unfolds until the truncation is absorbed, failing after `budget` steps.
pub fn run_windmill(fam: &RotatingFamily, budget: usize, tree: &TreeOptions) -> Result<WindmillRun> {
    let model = fam.model();
    let m = model.system().m();
    let mut w = windmill_init(fam)?;
    let mut trace = Vec::new();
    let mut stalled = 0;
    while !w.absorbed() {
        if w.steps >= budget {
            return Err(Error::Budget(format!("windmill not absorbed after {budget} steps")));
        }
        let osc = find_osculators(fam, &w)?;
        let before = w.region.len();
        let (next, record) = unfold_step(fam, &w, &osc, tree)?;
        log::info!("step {} at j0 = {}: {:?}, sizes {:?}", record.step, record.j0, record.kind, record.region_sizes);
        trace.push(record);
        stalled = if next.region.len() == before { stalled + 1 } else { 0 };
        if stalled > m {
            return Err(Error::Invariant(format!("no growth for {stalled} consecutive steps")));
        }
        w = next;
    }
    Ok(WindmillRun { windmill: w, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::graph_product::GraphProductParams;

    #[test]
    fn free_product_run() {
        let model = GraphProductModel::new(GraphProductParams::free_product(4)).unwrap();
        let fam = RotatingFamily::new(&model);
        let w0 = windmill_init(&fam).unwrap();
        assert_eq!(w0.representatives, vec![model.position(&model.base(1)).unwrap()]);
        let run = run_windmill(&fam, 8, &TreeOptions::default()).unwrap();
        let kinds: Vec<StepKind> = run.trace.iter().map(|r| r.kind).collect();
        assert_eq!(kinds, vec![StepKind::Trivial, StepKind::Neighbor]);
        assert_eq!(run.trace[1].transversal, vec![model.label(&model.base(2))]);
        assert_eq!(run.trace[1].osculators, 9);
        assert!(run.windmill.absorbed() && run.trace[1].absorbed);
        assert!(run.trace.iter().all(|r| r.connected.iter().all(|c| c.unwrap_or(true))));
        let reps: Vec<_> = run.windmill.representatives.iter().map(|&p| model.coset(p).clone()).collect();
        assert_eq!(reps, vec![model.base(1), model.base(2)]);
        assert!(matches!(find_osculators(&fam, &run.windmill), Err(Error::Complete)));
        assert_eq!(run.trace_jsonl().lines().count(), 2);
    }

    #[test]
    fn commuting_pair_run() {
        let model = GraphProductModel::new(GraphProductParams::one_edge_three(5)).unwrap();
        let fam = RotatingFamily::new(&model);
        let run = run_windmill(&fam, 8, &TreeOptions::default()).unwrap();
        let kinds: Vec<(usize, StepKind)> = run.trace.iter().map(|r| (r.j0, r.kind)).collect();
        assert_eq!(kinds, vec![(1, StepKind::Trivial), (2, StepKind::Trivial), (3, StepKind::Neighbor)]);
        assert_eq!(run.trace[2].transversal, vec![model.label(&model.base(3))]);
        assert_eq!(run.trace[2].region_sizes, vec![987, 987, 1597]);
        assert!(run.trace[2].intermediate.as_ref().is_some_and(|i| i.convex && i.full));
    }

    #[test]
    fn single_generator_is_absorbed_at_start() {
        let params = GraphProductParams { m: 1, ..GraphProductParams::free_product(0) };
        let model = GraphProductModel::new(params).unwrap();
        let run = run_windmill(&RotatingFamily::new(&model), 4, &TreeOptions::default()).unwrap();
        assert!(run.trace.is_empty() && run.windmill.absorbed());
    }
}
