//! JSON instance format for table-backed systems.
//!
//! ```json
//! { "m": 1, "theta": "0",
//!   "elements": [ {"coord": 1, "index": 0} ],
//!   "act": [ [ {"coord": 1, "index": 0}, {"coord": 2, "index": 0} ] ],
//!   "dpi": [ {"y": {...}, "x": {...}, "z": {...}, "value": "2"} ],
//!   "boundary": [] }
//! ```

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::system::{CompositeSystem, ElementId, SystemBuilder};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ElementRecord {
    pub coord: usize,
    pub index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DpiRecord {
    pub y: ElementId,
    pub x: ElementId,
    pub z: ElementId,
    #[serde(with = "rational")]
    pub value: Rational,
}

/// On-disk representation of a system.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub m: usize,
    #[serde(with = "rational")]
    pub theta: Rational,
    pub elements: Vec<ElementRecord>,
    #[serde(default)]
    pub act: Vec<(ElementId, ElementId)>,
    #[serde(default)]
    pub dpi: Vec<DpiRecord>,
    #[serde(default)]
    pub boundary: Vec<ElementId>,
}

/// Options for [`load_system`].
#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    /// Reject act lists that are not symmetric instead of closing them.
    pub strict: bool,
}

/// A loaded system together with any warnings produced while loading.
#[derive(Debug)]
pub struct Loaded {
    pub system: CompositeSystem,
    pub warnings: Vec<String>,
}

pub fn load_system(path: &Path, opts: LoadOptions) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)?;
    load_system_str(&text, opts)
}

pub fn load_system_str(text: &str, opts: LoadOptions) -> Result<Loaded> {
    let inst: Instance = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    from_instance(&inst, opts)
}

pub fn from_instance(inst: &Instance, opts: LoadOptions) -> Result<Loaded> {
    let mut warnings = Vec::new();
    let mut b = SystemBuilder::new(inst.m, inst.theta.clone());
    for e in &inst.elements {
        let id = ElementId::new(e.coord, e.index);
        match &e.label {
            Some(l) => b.labelled(id, l.clone()),
            None => b.element(id),
        };
    }
    let listed: HashSet<(ElementId, ElementId)> = inst.act.iter().copied().collect();
    for &(a, c) in &inst.act {
        if a.coord != c.coord && !listed.contains(&(c, a)) {
            if opts.strict {
                return Err(Error::AsymmetricAct(a.to_string(), c.to_string()));
            }
            let w = format!("act lists ({a}, {c}) without ({c}, {a}); using the symmetric closure");
            log::warn!("{w}");
            warnings.push(w);
        }
        b.active(a, c);
    }
    for d in &inst.dpi {
        b.dpi(d.y, d.x, d.z, d.value.clone());
    }
    for &id in &inst.boundary {
        b.boundary(id);
    }
    Ok(Loaded { system: b.build()?, warnings })
}

/// Converts a system into its on-disk form. Fails when the system has more than `max_entries`
/// defined distances.
pub fn to_instance(sys: &CompositeSystem, max_entries: usize) -> Result<Instance> {
    let n = sys.len();
    let elements = (0..n)
        .map(|p| {
            let id = sys.id(p);
            let label = sys.label(p);
            ElementRecord {
                coord: id.coord,
                index: id.index,
                label: (label != id.to_string()).then_some(label),
            }
        })
        .collect();
    let mut act = Vec::new();
    for a in 0..n {
        for c in 0..n {
            if a != c && sys.coord(a) != sys.coord(c) && sys.is_active(a, c) {
                act.push((sys.id(a), sys.id(c)));
            }
        }
    }
    let mut dpi = Vec::new();
    for y in 0..n {
        for x in 0..n {
            for z in x..n {
                let Some(v) = sys.dpi(y, x, z) else { continue };
                let mirrored = sys.dpi(y, z, x);
                dpi.push(DpiRecord { y: sys.id(y), x: sys.id(x), z: sys.id(z), value: v.clone() });
                if x != z {
                    if let Some(w) = mirrored.filter(|w| *w != v) {
                        dpi.push(DpiRecord { y: sys.id(y), x: sys.id(z), z: sys.id(x), value: w });
                    }
                }
                if dpi.len() > max_entries {
                    return Err(Error::Budget(format!(
                        "system has more than {max_entries} dpi entries; refusing to serialize"
                    )));
                }
            }
        }
    }
    let boundary = (0..n).filter(|&p| sys.is_boundary(p)).map(|p| sys.id(p)).collect();
    Ok(Instance { m: sys.m(), theta: sys.theta().clone(), elements, act, dpi, boundary })
}

/// Serializes a system as pretty JSON.
pub fn serialize_system(sys: &CompositeSystem) -> Result<String> {
    Ok(serde_json::to_string_pretty(&to_instance(sys, 5_000_000)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ASYM: &str = r#"{"m":2,"theta":"0",
        "elements":[{"coord":1,"index":0},{"coord":2,"index":0}],
        "act":[[{"coord":1,"index":0},{"coord":2,"index":0}]]}"#;

    #[test]
    fn strict_load_rejects_asymmetric_act() {
        let err = load_system_str(ASYM, LoadOptions { strict: true }).unwrap_err();
        assert!(err.to_string().contains("asymmetric act"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn lenient_load_closes_act_with_warning() {
        let loaded = load_system_str(ASYM, LoadOptions::default()).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert!(loaded.system.is_active(0, 1) && loaded.system.is_active(1, 0));
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = load_system_str("{", LoadOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
