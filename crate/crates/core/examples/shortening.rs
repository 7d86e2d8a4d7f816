//! Shortens words of the rotation subgroup step by step.

use windmill::group::GroupWord;
use windmill::models::graph_product::{GraphProductModel, GraphProductParams};
use windmill::rotors::greendlinger::{greendlinger, ShorteningOptions};
use windmill::rotors::RotatingFamily;

fn main() -> windmill::Result<()> {
    let model = GraphProductModel::new(GraphProductParams::free_product(3))?;
    let fam = RotatingFamily::new(&model);
    for text in ["a2 a1^q a2^-1", "a1^q a2^q a1^-q a2^-q", "a1 a2^-q a1^-1 a2^2q a1^-2q"] {
        let raw = GroupWord::parse(text, model.q())?;
        let w = model.group().word(raw.syllables())?;
        let report = greendlinger(&fam, &w, &ShorteningOptions::default())?;
        println!("{}", report.input);
        for s in &report.steps {
            println!("  around {} by power {}: distance {} -> {}, left {}",
                model.label(&s.around), s.exponent, s.before, s.after, s.word);
        }
    }
    Ok(())
}
