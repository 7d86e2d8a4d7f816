//! Reads presentations off finished windmills: the free product gives a free group, one
//! commuting pair of generators gives commutation relators.
//!
//! Usage: `cargo run --release --example presentation -- [word budget]`

use windmill::models::graph_product::{GraphProductModel, GraphProductParams};
use windmill::rotors::presentation::{presentation, PresentationForm};
use windmill::rotors::tree::TreeOptions;
use windmill::rotors::windmill::run_windmill;
use windmill::rotors::RotatingFamily;

fn main() -> windmill::Result<()> {
    let budget = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    for params in [GraphProductParams::free_product(4), GraphProductParams::one_edge_three(5)] {
        let model = GraphProductModel::new(params)?;
        let run = run_windmill(&RotatingFamily::new(&model), 16, &TreeOptions::default())?;
        let doc = presentation(&model, &run.windmill, PresentationForm::Transversal, budget)?;
        let gens: Vec<String> = doc.generators.iter().map(|g| format!("{} = {}", g.symbol, g.image)).collect();
        println!("generators: {}", gens.join(", "));
        println!("{} relators, verified {}, complete {}", doc.relators.len(), doc.verified, doc.complete_within_radius);
        for r in doc.relators.iter().take(5) {
            println!("  {}", r.text);
        }
    }
    Ok(())
}
