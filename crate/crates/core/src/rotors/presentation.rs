//! Presentations of the group generated by the rotation groups, read off a finished windmill.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupWord;
use crate::models::graph_product::{Coset, GraphProductModel};
use crate::rotors::windmill::Windmill;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PresentationForm {
    /// One generator per representative, commutation relators along translates.
    Transversal,
    /// One generator per truncation element, commutation and conjugation relators.
    Closure,
}

#[derive(Clone, Debug, Serialize)]
pub struct Generator {
    pub symbol: String,
    pub element: String,
    pub coset: Coset,
    /// The rotation the symbol stands for.
    pub image: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Relator {
    pub kind: String,
    /// Freely reduced syllables `(generator index, exponent)`, generator indices from 1.
    pub syllables: Vec<(usize, i64)>,
    pub text: String,
    /// The relator rewritten in the letters of the graph product.
    pub expansion: String,
    /// Elements whose rotations the relator relates: `[Y, wY']` for a commutator, `[gY, g, Y]`
    /// for a conjugation.
    pub elements: Vec<Coset>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PresentationDoc {
    pub form: PresentationForm,
    pub generators: Vec<Generator>,
    pub relators: Vec<Relator>,
    /// Longest conjugating word enumerated.
    pub word_budget: usize,
    /// Every pair of translates whose rotations commute received a relator.
    pub complete_within_radius: bool,
    /// Every relator maps to the identity.
    pub verified: bool,
}

fn reduce(word: &mut Vec<(usize, i64)>, s: (usize, i64)) {
    match word.last_mut() {
        Some(last) if last.0 == s.0 => {
            last.1 += s.1;
            if last.1 == 0 {
                word.pop();
            }
        }
        _ => word.push(s),
    }
}

fn concat(parts: &[&[(usize, i64)]]) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for p in parts {
        for &s in *p {
            reduce(&mut out, s);
        }
    }
    out
}

fn invert(w: &[(usize, i64)]) -> Vec<(usize, i64)> {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

fn render_symbols(w: &[(usize, i64)]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter()
        .map(|&(g, e)| if e == 1 { format!("s{g}") } else { format!("s{g}^{e}") })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Freely reduced words of length at most `len` over the symbols `1..=k` and their inverses.
pub fn reduced_words(k: usize, len: usize) -> Vec<Vec<(usize, i64)>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<(usize, i64)>> = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for g in 1..=k {
                for e in [1i64, -1] {
                    if w.last() == Some(&(g, -e)) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.push((g, e));
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

struct Builder<'a> {
    model: &'a GraphProductModel,
    images: Vec<GroupWord>,
}

impl Builder<'_> {
    fn evaluate(&self, w: &[(usize, i64)]) -> GroupWord {
        let grp = self.model.group();
        w.iter().fold(GroupWord::identity(), |acc, &(g, e)| grp.mul(&acc, &grp.pow(&self.images[g - 1], e)))
    }

    fn relator(&self, kind: &str, syllables: Vec<(usize, i64)>, elements: Vec<Coset>) -> (Relator, bool) {
        let value = self.evaluate(&syllables);
        let expansion = syllables
            .iter()
            .map(|&(g, e)| self.model.group().pow(&self.images[g - 1], e).render(self.model.q()))
            .collect::<Vec<_>>()
            .join(" · ");
        let text = render_symbols(&syllables);
        (Relator { kind: kind.into(), syllables, text, expansion, elements }, value.is_empty())
    }
}

/// Reads a presentation off a finished windmill, enumerating conjugating words up to `budget`.
pub fn presentation(model: &GraphProductModel, w: &Windmill, form: PresentationForm, budget: usize) -> Result<PresentationDoc> {
    if !w.absorbed() {
        return Err(Error::Precondition("presentation needs an absorbed windmill".into()));
    }
    match form {
        PresentationForm::Transversal => transversal(model, &w.representatives, budget),
        PresentationForm::Closure => closure(model, &w.representatives, budget),
    }
}

fn generator(model: &GraphProductModel, k: usize, p: usize) -> Generator {
    let c = model.coset(p).clone();
    Generator {
        symbol: format!("s{k}"),
        element: model.label(&c),
        image: model.rotation(&c).render(model.q()),
        coset: c,
    }
}

fn transversal(model: &GraphProductModel, reps: &[usize], budget: usize) -> Result<PresentationDoc> {
    let grp = model.group();
    let generators: Vec<Generator> = reps.iter().enumerate().map(|(k, &p)| generator(model, k + 1, p)).collect();
    let b = Builder { model, images: reps.iter().map(|&p| model.rotation(model.coset(p))).collect() };
    let mut relators = Vec::new();
    let mut verified = true;
    let mut complete = true;
    for w in reduced_words(reps.len(), budget) {
        let g = b.evaluate(&w);
        for (a, &x) in reps.iter().enumerate() {
            let cx = model.coset(x);
            for (c, &xp) in reps.iter().enumerate() {
                let moved = model.act(&g, model.coset(xp));
                if moved == *cx {
                    continue;
                }
                let conj = concat(&[&w, &[(c + 1, 1)], &invert(&w)]);
                let syll = concat(&[&[(a + 1, 1)], &conj, &[(a + 1, -1)], &invert(&conj)]);
                if model.active(&moved, cx) {
                    if grp.commutes(&b.images[a], &b.evaluate(&conj)) {
                        complete = false;
                    }
                    continue;
                }
                let (r, ok) = b.relator("commutator", syll, vec![cx.clone(), moved]);
                verified &= ok;
                relators.push(r);
            }
        }
    }
    Ok(PresentationDoc {
        form: PresentationForm::Transversal,
        generators,
        relators,
        word_budget: budget,
        complete_within_radius: complete,
        verified,
    })
}

fn closure(model: &GraphProductModel, reps: &[usize], budget: usize) -> Result<PresentationDoc> {
    let sys = model.system();
    let n = sys.len();
    let generators: Vec<Generator> = (0..n).map(|p| generator(model, p + 1, p)).collect();
    let b = Builder { model, images: (0..n).map(|p| model.rotation(model.coset(p))).collect() };
    let mut relators = Vec::new();
    let mut verified = true;
    for a in 0..n {
        for c in a + 1..n {
            if sys.coord(a) != sys.coord(c) && !sys.is_active(a, c) {
                let pair = vec![model.coset(a).clone(), model.coset(c).clone()];
                let (r, ok) = b.relator("commutator", vec![(a + 1, 1), (c + 1, 1), (a + 1, -1), (c + 1, -1)], pair);
                verified &= ok;
                relators.push(r);
            }
        }
    }
    for &g in reps {
        for y in 0..n {
            if let Some(gy) = model.act_pos(&b.images[g], y) {
                let syll = concat(&[&[(gy + 1, -1), (g + 1, 1), (y + 1, 1), (g + 1, -1)]]);
                let triple = vec![model.coset(gy).clone(), model.coset(g).clone(), model.coset(y).clone()];
                let (r, ok) = b.relator("conjugation", syll, triple);
                verified &= ok;
                relators.push(r);
            }
        }
    }
    Ok(PresentationDoc {
        form: PresentationForm::Closure,
        generators,
        relators,
        word_budget: budget,
        complete_within_radius: true,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::graph_product::GraphProductParams;
    use crate::rotors::family::RotatingFamily;
    use crate::rotors::tree::TreeOptions;
    use crate::rotors::windmill::run_windmill;

    #[test]
    fn word_counts() {
        assert_eq!(reduced_words(2, 8).len(), 13121);
        assert_eq!(reduced_words(3, 2).len(), 1 + 6 + 30);
        assert_eq!(concat(&[&[(1, 1), (2, 1)], &invert(&[(1, 1), (2, 1)])]), vec![]);
    }

    #[test]
    fn free_product_is_free() {
        let model = GraphProductModel::new(GraphProductParams::free_product(3)).unwrap();
        let run = run_windmill(&RotatingFamily::new(&model), 6, &TreeOptions::default()).unwrap();
        let doc = presentation(&model, &run.windmill, PresentationForm::Transversal, 4).unwrap();
        assert_eq!(doc.generators.len(), 2);
        assert!(doc.relators.is_empty() && doc.verified && doc.complete_within_radius);
        let doc = presentation(&model, &run.windmill, PresentationForm::Closure, 4).unwrap();
        assert_eq!(doc.generators.len(), model.system().len());
        assert!(doc.verified && doc.relators.iter().all(|r| r.kind == "conjugation"));
    }
}
