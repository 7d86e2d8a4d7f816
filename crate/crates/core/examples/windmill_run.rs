//! Runs the windmill process on a graph-product model and prints the trace.
//!
//! Usage: `cargo run --release --example windmill_run -- [m] [radius] [edge a-b ...]`
//! With no arguments this runs three generators with `a1` and `a2` commuting.

use windmill::models::graph_product::{GraphProductModel, GraphProductParams};
use windmill::rotors::tree::TreeOptions;
use windmill::rotors::windmill::run_windmill;
use windmill::rotors::RotatingFamily;

fn main() -> windmill::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let params = if args.is_empty() {
        GraphProductParams::one_edge_three(5)
    } else {
        let m = args[0].parse().unwrap_or(2);
        let radius = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);
        let edges = args
            .iter()
            .skip(2)
            .filter_map(|e| e.split_once('-'))
            .filter_map(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .collect();
        GraphProductParams { m, edges, ..GraphProductParams::free_product(radius) }
    };
    let model = GraphProductModel::new(params)?;
    let run = run_windmill(&RotatingFamily::new(&model), 16, &TreeOptions::default())?;
    for rec in &run.trace {
        println!(
            "step {}: coordinate {} {:?}, {} osculators, transversal {:?}, sizes {:?}, absorbed {}",
            rec.step, rec.j0, rec.kind, rec.osculators, rec.transversal, rec.region_sizes, rec.absorbed
        );
    }
    let reps: Vec<String> = run.windmill.representatives.iter().map(|&p| model.label(model.coset(p))).collect();
    println!("representatives: {}", reps.join(", "));
    Ok(())
}
