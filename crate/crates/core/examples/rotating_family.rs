//! Verifies the rotating family of a graph-product model on its truncation and evaluates the
//! isotropy and transfer statements at the base elements.
//!
//! Usage: `cargo run --release --example rotating_family -- [radius]`

use windmill::models::graph_product::{GraphProductModel, GraphProductParams};
use windmill::rational::int;
use windmill::rotors::{FamilyOptions, RotatingFamily};

fn main() -> windmill::Result<()> {
    let radius = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let model = GraphProductModel::new(GraphProductParams::free_product(radius))?;
    let fam = RotatingFamily::new(&model);
    let report = fam.verify(&FamilyOptions::default());
    for (name, c) in [
        ("conjugation", &report.conjugation),
        ("commutation", &report.commutation),
        ("shift", &report.shift),
        ("rotation bound", &report.rotation_bound),
        ("fixes inactive", &report.fixes_inactive),
        ("equivariance", &report.equivariance),
    ] {
        println!("{name:<15} checked {:>7} failures {} outside truncation {}", c.checked, c.failures, c.outside_truncation);
    }
    println!("family passes: {}", report.passes());

    let (a1, a2) = (model.base(1), model.base(2));
    let q = model.q();
    for n in [0, 2 * q, 3 * q] {
        let iso = fam.isotropy(&a1, &int(n));
        println!("isotropy window at N = {n}: |k| <= {} ({} exponents)", iso.window, iso.exponents.len());
    }
    let far = model.act(&model.rotation(&a1), &a2);
    let t = fam.transfer(&a1, &a2, &far, 4)?;
    println!("transfer from {} picks {} with exponent {}", model.label(&far), model.label(&t.chosen), t.exponent);
    Ok(())
}
