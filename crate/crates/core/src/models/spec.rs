//! Model specification files: `{"kind": …, "params": {…}, "seed": …}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::models::adversarial::{gen_adversarial, AdversarialInstance, AdversarialKind};
use crate::models::graph_product::{GraphProductModel, GraphProductParams};
use crate::models::tree::{gen_tree_segments, TreeParams, TreeSegments};
use crate::system::CompositeSystem;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    TreeSegments {
        #[serde(default)]
        params: TreeParams,
        #[serde(default)]
        seed: u64,
    },
    GraphProduct {
        params: GraphProductParams,
        #[serde(default)]
        seed: u64,
    },
    Adversarial {
        params: AdversarialParams,
        #[serde(default)]
        seed: u64,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct AdversarialParams {
    pub adversarial: AdversarialKind,
}

/// A generated model.
#[derive(Debug)]
pub enum Model {
    Tree { segments: TreeSegments, system: CompositeSystem, seed: u64 },
    GraphProduct(Box<GraphProductModel>),
    Adversarial(Box<AdversarialInstance>),
}

impl Model {
    pub fn system(&self) -> &CompositeSystem {
        match self {
            Model::Tree { system, .. } => system,
            Model::GraphProduct(m) => m.system(),
            Model::Adversarial(a) => &a.system,
        }
    }

    pub fn graph_product(&self) -> Option<&GraphProductModel> {
        match self {
            Model::GraphProduct(m) => Some(m),
            _ => None,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Model::Tree { seed, .. } => *seed,
            Model::GraphProduct(_) => 0,
            Model::Adversarial(a) => a.seed,
        }
    }
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn seed(&self) -> u64 {
        match self {
            ModelSpec::TreeSegments { seed, .. }
            | ModelSpec::GraphProduct { seed, .. }
            | ModelSpec::Adversarial { seed, .. } => *seed,
        }
    }
}

/// Builds the model described by `spec`. Graph products are deterministic and ignore the seed.
pub fn gen_model(spec: &ModelSpec) -> Result<Model> {
    Ok(match spec {
        ModelSpec::TreeSegments { params, seed } => {
            let segments = gen_tree_segments(params, *seed)?;
            let system = segments.system()?;
            Model::Tree { segments, system, seed: *seed }
        }
        ModelSpec::GraphProduct { params, .. } => Model::GraphProduct(Box::new(GraphProductModel::new(params.clone())?)),
        ModelSpec::Adversarial { params, seed } => {
            Model::Adversarial(Box::new(gen_adversarial(params.adversarial, *seed)?))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_files_parse() {
        let s = ModelSpec::from_json(r#"{"kind":"graph-product","params":{"m":2,"radius":2}}"#).unwrap();
        let ModelSpec::GraphProduct { params, seed } = &s else { panic!("{s:?}") };
        assert_eq!((params.m, params.radius, params.verify_radius, *seed), (2, 2, 3, 0));
        let s = ModelSpec::from_json(r#"{"kind":"adversarial","params":{"adversarial":"separation-break"},"seed":4}"#)
            .unwrap();
        assert_eq!(s.seed(), 4);
        assert!(ModelSpec::from_json(r#"{"kind":"sphere"}"#).is_err());
        let s = ModelSpec::from_json(r#"{"kind":"tree-segments","seed":9}"#).unwrap();
        let back = ModelSpec::from_json(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
        assert_eq!(gen_model(&s).unwrap().seed(), 9);
    }
}
