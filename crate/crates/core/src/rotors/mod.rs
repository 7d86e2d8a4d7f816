//! Rotating families on graph-product models, the windmill process, principal trees,
//! shortening of kernel words and presentations of the rotation subgroup.

pub mod family;
pub mod greendlinger;
pub mod presentation;
pub mod tree;
pub mod windmill;

pub use family::{apply_group, Check, FamilyOptions, FamilyReport, Image, RotatingFamily};
