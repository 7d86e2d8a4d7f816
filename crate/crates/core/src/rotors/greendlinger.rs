//! Shortening of nontrivial words in the rotation subgroup.
//!
//! A word `γ` in the normal closure of the rotations moves some base element `X = A_i` far
//! around an element `R` read off the syllables of `γ`. Multiplying by a suitable power of the
//! rotation at `R` then pulls `γX` back towards `X`. Iterating reduces `γ` to the identity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupWord;
use crate::models::graph_product::{Coset, GraphProductModel};
use crate::models::oracle::membership_oracle;
use crate::rational::{self, int, Rational};
use crate::rotors::family::RotatingFamily;

#[derive(Clone, Debug)]
pub struct ShorteningOptions {
    /// Coordinate tried first when looking for a principal coordinate.
    pub start_coord: usize,
    /// Step limit; the syllable length of the input when absent.
    pub max_steps: Option<usize>,
}

impl Default for ShorteningOptions {
    fn default() -> Self {
        ShorteningOptions { start_coord: 1, max_steps: None }
    }
}

/// How the principal coordinate was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrincipalForm {
    /// Every sampled element of the coordinate is moved far around some element.
    Uniform,
    /// As above, except for sampled elements whose rotation group contains `γ`.
    Relative,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShorteningStep {
    pub coord: usize,
    pub form: PrincipalForm,
    /// Element around which `γX` is pulled back; `X` itself when `γ ∈ Γ_X`.
    pub around: Coset,
    pub exponent: i64,
    pub factor: String,
    /// `d_R(X, γX)` before the step.
    #[serde(with = "rational")]
    pub before: Rational,
    /// `d_R(X, γ_s γ X)` after the step.
    #[serde(with = "rational")]
    pub after: Rational,
    pub word: String,
    pub syllables: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShorteningReport {
    pub input: String,
    /// The input is already the identity of the graph product.
    pub trivial: bool,
    pub steps: Vec<ShorteningStep>,
    pub reduced: bool,
}

struct Candidate {
    r: Coset,
    d: Rational,
}

/// Elements `x·s_1⋯s_{t−1}·A_{k_t}` over the syllables `s_t` of `x⁻¹γx`, excluding `X`, with
/// `d_R(X, γX)` for each.
fn candidates(model: &GraphProductModel, x: &Coset, gamma: &GroupWord) -> Vec<Candidate> {
    let grp = model.group();
    let inner = grp.mul_all(&[&grp.inv(&x.rep), gamma, &x.rep]);
    let gx = model.act(gamma, x);
    let mut prefix = x.rep.clone();
    let mut out = Vec::new();
    for &(l, e) in inner.syllables() {
        let r = model.coset_of(&prefix, l);
        if r != *x {
            if let Some(d) = model.dist(&r, x, &gx) {
                out.push(Candidate { r, d });
            }
        }
        prefix = grp.mul(&prefix, &GroupWord::letter(l, e));
    }
    out
}

fn principal(fam: &RotatingFamily, gamma: &GroupWord, start: usize) -> Result<(usize, PrincipalForm)> {
    let model = fam.model();
    let ladder = model.ladder();
    let m = model.system().m();
    let threshold = &ladder.theta_rot - int(2) * &ladder.theta_p - &ladder.kappa;
    let witnesses: Vec<Coset> = model.sample(1).into_iter().map(|p| model.coset(p).clone()).collect();
    let mut fallback = None;
    for off in 0..m {
        let i = (start - 1 + off) % m + 1;
        let mut uniform = true;
        let mut relative = true;
        for x in witnesses.iter().filter(|c| c.coord == i) {
            let far = candidates(model, x, gamma).iter().any(|c| c.d > threshold);
            if !far {
                uniform = false;
                relative &= fam.exponent_in(x, gamma).is_some();
            }
        }
        if uniform {
            return Ok((i, PrincipalForm::Uniform));
        }
        if relative && fallback.is_none() {
            fallback = Some((i, PrincipalForm::Relative));
        }
    }
    fallback.ok_or_else(|| Error::Invariant(format!("no principal coordinate for {}", gamma.render(model.q()))))
}

/// One shortening pair `(R, ρ_R^t)` at the base element of coordinate `i`.
fn shortening_pair(fam: &RotatingFamily, gamma: &GroupWord, i: usize) -> Option<(Coset, i64, GroupWord, Rational, Rational)> {
    let model = fam.model();
    let ladder = model.ladder();
    let q = model.q();
    let x = model.base(i);
    if let Some(k) = fam.exponent_in(&x, gamma) {
        return Some((x.clone(), -k, model.group().inv(gamma), rational::zero(), rational::zero()));
    }
    let bound = int(2) * &ladder.theta_p + int(3) * &ladder.kappa;
    let gx = model.act(gamma, &x);
    let mut cands = candidates(model, &x, gamma);
    cands.sort_by(|a, b| {
        b.d.cmp(&a.d).then_with(|| (a.r.coord, model.cost(&a.r), &a.r.rep).cmp(&(b.r.coord, model.cost(&b.r), &b.r.rep)))
    });
    for c in cands {
        let (Some(px), Some(pg)) = (model.proj(&c.r, &x), model.proj(&c.r, &gx)) else { continue };
        let t0 = ((px - pg) as f64 / q as f64).round() as i64;
        for t in [t0, t0 - 1, t0 + 1] {
            if t == 0 {
                continue;
            }
            let factor = model.rotation_power(&c.r, t);
            let moved = model.act(&model.group().mul(&factor, gamma), &x);
            if let Some(after) = model.dist(&c.r, &x, &moved) {
                if after <= bound {
                    return Some((c.r, t, factor, c.d, after));
                }
            }
        }
    }
    None
}

/// Shortens a word of the rotation subgroup to the identity.
pub fn greendlinger(fam: &RotatingFamily, gamma: &GroupWord, opts: &ShorteningOptions) -> Result<ShorteningReport> {
    let model = fam.model();
    let grp = model.group();
    let m = model.system().m();
    if opts.start_coord == 0 || opts.start_coord > m {
        return Err(Error::Precondition(format!("start coordinate {} outside 1..={m}", opts.start_coord)));
    }
    grp.validate(gamma.syllables()).map_err(|e| Error::MalformedWord(e.to_string()))?;
    let verdict = membership_oracle(grp, model.q(), gamma.syllables());
    if !verdict.in_kernel {
        return Err(Error::Precondition(format!("{} is not in the rotation subgroup", gamma.render(model.q()))));
    }
    let mut cur = grp.normal_form(gamma.syllables());
    let input = cur.render(model.q());
    if verdict.trivial_in_group {
        return Ok(ShorteningReport { input, trivial: true, steps: vec![], reduced: true });
    }
    let limit = opts.max_steps.unwrap_or(cur.syllables().len());
    let mut steps = Vec::new();
    while !cur.is_empty() {
        if steps.len() >= limit {
            return Err(Error::Budget(format!("{input} not reduced within {limit} steps")));
        }
        let (i, form) = principal(fam, &cur, opts.start_coord)?;
        let (around, exponent, factor, before, after) = shortening_pair(fam, &cur, i)
            .ok_or_else(|| Error::Invariant(format!("no shortening pair for {} at A{i}", cur.render(model.q()))))?;
        cur = grp.mul(&factor, &cur);
        steps.push(ShorteningStep {
            coord: i,
            form,
            around,
            exponent,
            factor: factor.render(model.q()),
            before,
            after,
            word: cur.render(model.q()),
            syllables: cur.syllables().len(),
        });
    }
    Ok(ShorteningReport { input, trivial: false, steps, reduced: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::graph_product::GraphProductParams;

    #[test]
    fn conjugate_rotation_shortens_in_one_step() {
        let model = GraphProductModel::new(GraphProductParams::free_product(2)).unwrap();
        let fam = RotatingFamily::new(&model);
        let q = model.q();
        let g = model.group().normal_form(&[(2, q), (1, q), (2, -q)]);
        let r = greendlinger(&fam, &g, &ShorteningOptions::default()).unwrap();
        assert_eq!(r.steps.len(), 1);
        assert_eq!(r.steps[0].word, "1");
        assert!(r.steps[0].before >= int(q));
        let not_kernel = model.group().normal_form(&[(1, 1)]);
        assert!(matches!(greendlinger(&fam, &not_kernel, &ShorteningOptions::default()), Err(Error::Precondition(_))));
        let trivial = greendlinger(&fam, &GroupWord::identity(), &ShorteningOptions::default()).unwrap();
        assert!(trivial.trivial && trivial.steps.is_empty());
        let single = greendlinger(&fam, &model.rotation(&model.base(2)), &ShorteningOptions::default()).unwrap();
        assert_eq!(single.steps[0].around, model.base(2));
        assert_eq!(single.steps[0].after, rational::zero());
    }

    #[test]
    fn commutators() {
        let model = GraphProductModel::new(GraphProductParams::free_product(3)).unwrap();
        let fam = RotatingFamily::new(&model);
        let q = model.q();
        let g = model.group().normal_form(&[(1, q), (2, q), (1, -q), (2, -q)]);
        let r = greendlinger(&fam, &g, &ShorteningOptions::default()).unwrap();
        assert!(!r.trivial && r.reduced && r.steps.len() <= 4);
        let bound = int(2) * &model.ladder().theta_p + int(3) * &model.ladder().kappa;
        assert!(r.steps.iter().all(|s| s.after <= bound));

        let model = GraphProductModel::new(GraphProductParams::one_edge_three(3)).unwrap();
        let q = model.q();
        let g = model.group().word(&[(1, q), (2, q), (1, -q), (2, -q)]).unwrap();
        let r = greendlinger(&RotatingFamily::new(&model), &g, &ShorteningOptions::default()).unwrap();
        assert!(r.trivial);
    }
}
