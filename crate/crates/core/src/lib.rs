//! Composite projection systems, composite rotating families and the windmill process that
//! unfolds a rotating family into a free-product-like presentation.
//!
//! The crate is organised bottom-up:
//!
//! * [`system`], [`instance`], [`axioms`], [`metrics`], [`order`], [`ladder`], [`complex`]:
//!   finite composite projection systems and their verified constants.
//! * [`hull`]: convexity, osculation sets and terminal osculators.
//! * [`group`] and [`models`]: graph products, coset geometries and other generators.
//! * [`rotors`]: rotating families, windmills, principal trees, shortening and presentations.
//! * [`cli`]: the command layer used by the `windmill` binary.

pub mod axioms;
pub mod cli;
pub mod complex;
pub mod error;
pub mod group;
pub mod hull;
pub mod instance;
pub mod ladder;
pub mod metrics;
pub mod models;
pub mod order;
pub mod properties;
pub mod rational;
pub mod rotors;
pub mod system;

pub use error::{Error, Result};
pub use rational::Rational;
pub use system::{CompositeSystem, ElementId};
