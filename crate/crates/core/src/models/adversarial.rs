//! Systems that break exactly one requirement.
//!
//! The table kinds start from a seeded tree-segment system with `θ = 1` and append a gadget
//! coordinate of three mutually active elements `P, Q, R`, inactive with everything else,
//! whose off-diagonal distances all equal `θ`. One entry of the gadget is then altered.
//! The rotation kind is the free product with rotation exponent `1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::graph_product::GraphProductParams;
use crate::models::tree::{gen_tree_segments, TreeParams};
use crate::rational::{int, Rational};
use crate::system::{CompositeSystem, ElementId, SystemBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversarialKind {
    AsymmetricDpi,
    BehrstockBreak,
    RotationTooSmall,
    SeparationBreak,
}

impl AdversarialKind {
    pub const ALL: [AdversarialKind; 4] = [
        AdversarialKind::AsymmetricDpi,
        AdversarialKind::BehrstockBreak,
        AdversarialKind::RotationTooSmall,
        AdversarialKind::SeparationBreak,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdversarialKind::AsymmetricDpi => "asymmetric-dpi",
            AdversarialKind::BehrstockBreak => "behrstock-break",
            AdversarialKind::RotationTooSmall => "rotation-too-small",
            AdversarialKind::SeparationBreak => "separation-break",
        }
    }
}

impl fmt::Display for AdversarialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversarialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown adversarial kind {s:?}")))
    }
}

/// A broken instance together with the entry that was altered.
#[derive(Clone, Debug)]
pub struct AdversarialInstance {
    pub kind: AdversarialKind,
    pub seed: u64,
    pub system: CompositeSystem,
    /// Element ids of the altered entry, in the witness order of the targeted check.
    pub target: Vec<ElementId>,
    /// Parameters of the graph-product model for the rotation kind.
    pub rotation_params: Option<GraphProductParams>,
}

fn with_gadget(seed: u64, edit: impl FnOnce(&mut SystemBuilder, [ElementId; 3], &Rational)) -> Result<CompositeSystem> {
    let params = TreeParams { overlap: 1, ..TreeParams::default() };
    let base = gen_tree_segments(&params, seed)?.system()?;
    let theta = base.theta().clone();
    let m = base.m() + 1;
    let mut b = SystemBuilder::new(m, theta.clone());
    for p in 0..base.len() {
        b.labelled(base.id(p), base.label(p));
    }
    for a in 0..base.len() {
        for c in a + 1..base.len() {
            if base.is_active(a, c) && base.coord(a) != base.coord(c) {
                b.active(base.id(a), base.id(c));
            }
        }
    }
    for (y, x, z, v) in base.table_entries() {
        b.dpi(base.id(y), base.id(x), base.id(z), v);
    }
    let g = [0, 1, 2].map(|k| ElementId::new(m, k));
    for (k, &id) in g.iter().enumerate() {
        b.labelled(id, ["P", "Q", "R"][k]);
    }
    for y in 0..3 {
        for x in 0..3 {
            for z in 0..3 {
                if x != y && z != y {
                    let v = if x == z { int(0) } else { theta.clone() };
                    b.dpi(g[y], g[x], g[z], v);
                }
            }
        }
    }
    edit(&mut b, g, &theta);
    b.build()
}

/// Builds the instance of the given kind.
pub fn gen_adversarial(kind: AdversarialKind, seed: u64) -> Result<AdversarialInstance> {
    let (system, target, rotation_params) = match kind {
        AdversarialKind::BehrstockBreak => {
            let mut t = vec![];
            let sys = with_gadget(seed, |b, [y, z, x], th| {
                let v = th * int(3);
                b.dpi(y, x, z, v.clone()).dpi(y, z, x, v.clone());
                b.dpi(z, x, y, v.clone()).dpi(z, y, x, v);
                t = vec![y, z, x];
            })?;
            (sys, t, None)
        }
        AdversarialKind::SeparationBreak => {
            let mut t = vec![];
            let sys = with_gadget(seed, |b, [y, z, _], th| {
                b.dpi(y, z, z, th * int(2));
                t = vec![y, z];
            })?;
            (sys, t, None)
        }
        AdversarialKind::AsymmetricDpi => {
            let mut t = vec![];
            let sys = with_gadget(seed, |b, [y, x, z], th| {
                b.dpi(y, z, x, th * int(2));
                t = vec![y, x, z];
            })?;
            (sys, t, None)
        }
        AdversarialKind::RotationTooSmall => {
            let params = GraphProductParams { q: Some(1), radius: 3, ..GraphProductParams::free_product(3) };
            let model = crate::models::graph_product::GraphProductModel::new_unrestricted(params.clone())?;
            (model.system().clone(), vec![], Some(params))
        }
    };
    Ok(AdversarialInstance { kind, seed, system, target, rotation_params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{check_axioms, Axiom};

    #[test]
    fn table_kinds_fail_only_their_axiom() {
        for (kind, axiom) in [
            (AdversarialKind::BehrstockBreak, Axiom::Behrstock),
            (AdversarialKind::SeparationBreak, Axiom::Separation),
            (AdversarialKind::AsymmetricDpi, Axiom::Symmetry),
        ] {
            let inst = gen_adversarial(kind, 11).unwrap();
            let rep = check_axioms(&inst.system, inst.system.theta());
            assert_eq!(rep.failing(), vec![axiom], "{kind}");
            assert!(rep.outcome(axiom).witnesses.contains(&inst.target), "{kind}");
        }
    }

    #[test]
    fn kinds_parse() {
        for k in AdversarialKind::ALL {
            assert_eq!(k.name().parse::<AdversarialKind>().unwrap(), k);
        }
        assert!("nope".parse::<AdversarialKind>().is_err());
    }
}
