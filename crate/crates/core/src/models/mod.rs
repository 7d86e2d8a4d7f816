//! Generators of composite projection systems.

pub mod tree;
pub mod graph_product;
pub mod adversarial;
pub mod oracle;
pub mod spec;
