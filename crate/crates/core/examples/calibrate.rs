//! Prints the constant ladder of the eleven-vertex path fixture and of a random tree instance.

use windmill::ladder::calibrate_constants;
use windmill::metrics::{DerivedMetrics, Space};
use windmill::models::tree::{gen_tree_segments, p11, TreeParams};

fn main() -> windmill::Result<()> {
    let random = gen_tree_segments(&TreeParams { vertices: 60, segments: 30, colors: 3, overlap: 1 }, 11)?.system()?;
    for (name, sys) in [("path fixture", p11()), ("random tree", random)] {
        let metrics = DerivedMetrics::exact(&sys);
        let ladder = calibrate_constants(&Space::new(&sys, &metrics))?;
        println!("{name}: kappa {} Theta {} c* {} Theta_P {} Theta_Rot {} K {}",
            ladder.kappa, ladder.big_theta, ladder.c_star, ladder.theta_p, ladder.theta_rot, ladder.k);
        for i in 1..=sys.m() {
            let levels: Vec<String> = ladder.levels(i).iter().map(|l| l.to_string()).collect();
            println!("  levels after coordinate {i}: [{}]", levels.join(", "));
        }
    }
    Ok(())
}
