//! Builds the principal tree between the base element of the first coordinate and the
//! neighbours of the second, prints its estimates and writes it as DOT.
//!
//! Usage: `cargo run --release --example principal_tree -- [depth] > tree.dot`

use windmill::models::graph_product::{GraphProductModel, GraphProductParams};
use windmill::rotors::tree::{principal_tree, TreeOptions};

fn main() -> windmill::Result<()> {
    let depth = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let model = GraphProductModel::new(GraphProductParams::free_product(3))?;
    let a1 = model.position(&model.base(1)).expect("base is in the truncation");
    let a2 = model.position(&model.base(2)).expect("base is in the truncation");
    let tree = principal_tree(&model, &[a1], &[a2], &TreeOptions { depth, ..TreeOptions::default() })?;
    let e = &tree.estimates;
    eprintln!("{} white and {} black vertices, injective: {}", e.whites, e.blacks, e.injective);
    eprintln!("lower estimate {} (min {:?}), upper estimate {} (max {:?})",
        e.lower.passes(), e.min_lower.as_ref().map(|v| v.to_string()),
        e.upper.passes(), e.max_upper.as_ref().map(|v| v.to_string()));
    print!("{}", tree.to_dot(&model));
    Ok(())
}
