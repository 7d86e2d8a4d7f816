//! Generates a random tree-of-segments instance, checks the axioms and the properties of the
//! modified distances, and confirms that on trees the modified distance equals the raw one.
//!
//! Usage: `cargo run --example check_instance -- [seed] [vertices] [segments]`

use windmill::axioms::check_axioms;
use windmill::ladder::calibrate_constants;
use windmill::metrics::{DerivedMetrics, Space};
use windmill::models::tree::{gen_tree_segments, TreeParams};
use windmill::properties::{check_exact_equality, check_properties};

fn main() -> windmill::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    let seed = args.first().copied().unwrap_or(7);
    let params = TreeParams {
        vertices: args.get(1).map_or(40, |&v| v as usize),
        segments: args.get(2).map_or(20, |&v| v as usize),
        ..TreeParams::default()
    };
    let sys = gen_tree_segments(&params, seed)?.system()?;
    println!("{} elements over {} coordinates", sys.len(), sys.m());

    let report = check_axioms(&sys, sys.theta());
    for a in &report.axioms {
        println!("  {:<12} checked {:>8}  failures {}", format!("{:?}", a.axiom), a.checked, a.failures);
    }
    println!("verdict {:?}, smallest workable theta {:?}", report.verdict, report.minimal_theta.map(|t| t.to_string()));

    let metrics = DerivedMetrics::exact(&sys);
    let sp = Space::new(&sys, &metrics);
    let ladder = calibrate_constants(&sp)?;
    let props = check_properties(&sp, &ladder);
    for o in &props.outcomes {
        println!("  {:<12} checked {:>8}  failures {}", o.name, o.checked, o.failures);
    }
    let exact = check_exact_equality(&sp);
    println!("modified distance equals raw distance on {} triples: {}", exact.checked, exact.passes());
    Ok(())
}
