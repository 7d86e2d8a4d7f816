//! Convex hulls, osculation sets and the hull lemmas on a random tree instance.
//!
//! Usage: `cargo run --example hull_lemmas -- [seed]`

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use windmill::hull::{check_hull_lemmas, convex_closure, osculation_set, InvarianceStatus, LemmaInputs, Levels, Region};
use windmill::ladder::calibrate_constants;
use windmill::metrics::{DerivedMetrics, Space};
use windmill::models::tree::{gen_tree_segments, TreeParams};
use windmill::rational::int;

fn main() -> windmill::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let sys = gen_tree_segments(&TreeParams { vertices: 30, segments: 18, colors: 2, overlap: 0 }, seed)?.system()?;
    let metrics = DerivedMetrics::exact(&sys);
    let sp = Space::new(&sys, &metrics);
    let ladder = calibrate_constants(&sp)?;
    let level = &ladder.big_theta + int(2 * sys.m() as i64 + 12) * &ladder.kappa + int(1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<usize> = (0..sys.len()).collect();
    all.shuffle(&mut rng);
    let seeds = Region::from_positions(sys.len(), all[..2].iter().copied());
    let hull = convex_closure(&sp, &seeds, &Levels::Scalar(level.clone()), &ladder.kappa)?;
    let names = |r: &Region| r.ids(&sys).iter().map(|id| id.to_string()).collect::<Vec<_>>().join(" ");
    println!("hull of [{}] at level {level}: [{}]", names(&seeds), names(&hull));

    let Some(&r) = all.iter().find(|&&p| !hull.contains(p)) else {
        println!("hull is everything");
        return Ok(());
    };
    let osc = osculation_set(&sp, &hull, r, &level, &ladder.kappa)?;
    let osc: Vec<String> = osc.iter().map(|&p| sys.id(p).to_string()).collect();
    println!("osculators towards {}: [{}]", sys.id(r), osc.join(" "));
    let inputs = LemmaInputs {
        region: hull,
        r,
        s: None,
        level: level.clone(),
        level2: level,
        invariance: InvarianceStatus::Unchecked,
    };
    for o in check_hull_lemmas(&sp, &ladder, &inputs)?.outcomes {
        println!("  {:<22} {:?} ({} cases)", o.lemma, o.status, o.checked);
    }
    Ok(())
}
