//! Decides membership in the rotation subgroup for a few words of the free product of two
//! copies of the integers.

use windmill::group::GroupWord;
use windmill::models::graph_product::{GraphProductModel, GraphProductParams};
use windmill::models::oracle::membership_oracle;

fn main() -> windmill::Result<()> {
    let model = GraphProductModel::new(GraphProductParams::free_product(0))?;
    let q = model.q();
    for text in ["a1^q", "a1 a2", "a2 a1^q a2^-1", "a1^q a2^q a1^-q a2^-q", "a1^2q a2^-q a1^-2q a2^q", "a1^3"] {
        let w = GroupWord::parse(text, q)?;
        let v = membership_oracle(model.group(), q, w.syllables());
        println!("{text:<28} in rotation subgroup: {:<5}  trivial: {}", v.in_kernel, v.trivial_in_group);
    }
    Ok(())
}
