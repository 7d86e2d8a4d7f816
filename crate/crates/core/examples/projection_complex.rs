//! Writes the projection complex of one coordinate of the free-product model as DOT.
//!
//! Usage: `cargo run --example projection_complex -- [coord] [K] > complex.dot`

use windmill::complex::{build_projection_complex, induced_connected};
use windmill::models::graph_product::{GraphProductModel, GraphProductParams};
use windmill::rational;

fn main() -> windmill::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let coord: usize = args.first().and_then(|s| s.parse().ok()).unwrap_or(1);
    let model = GraphProductModel::new(GraphProductParams::free_product(3))?;
    let k = match args.get(1) {
        Some(s) => rational::parse(s)?,
        None => model.ladder().k.clone(),
    };
    let sp = model.space();
    let complex = build_projection_complex(&sp, coord, &k);
    let members: Vec<usize> = model.system().coord_range(coord).collect();
    eprintln!("{} vertices, connected: {}", members.len(), induced_connected(&sp, &members, coord, &k));
    print!("{}", complex.to_dot(|p| model.label(model.coset(p))));
    Ok(())
}
