//! Graph products of cyclic groups: reduced words, canonical normal forms, and the coset
//! calculus for star subgroups `A_{st(i)} = ⟨a_j : j = i or j ~ i⟩`.
//!
//! Letters are 1-based. A [`GroupWord`] is always kept in canonical form: reduced (no two
//! syllables of one letter can be brought together) and, among all shuffles by commutation,
//! the one choosing the smallest available letter first. Two words represent the same
//! element exactly when their canonical forms coincide.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sequence of syllables `(letter, exponent)` with non-zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupWord(pub Vec<(usize, i64)>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn letter(l: usize, e: i64) -> Self {
        GroupWord(if e == 0 { vec![] } else { vec![(l, e)] })
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.0
    }

    /// Renders exponents as multiples of `q` where possible, e.g. `a1^q a2^-2q`.
    pub fn render(&self, q: i64) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.0
            .iter()
            .map(|&(l, e)| {
                if q > 1 && e % q == 0 {
                    match e / q {
                        1 => format!("a{l}^q"),
                        -1 => format!("a{l}^-q"),
                        k => format!("a{l}^{k}q"),
                    }
                } else if e == 1 {
                    format!("a{l}")
                } else {
                    format!("a{l}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl GroupWord {
    /// Parses the rendered form: whitespace-separated letters `a3`, `a1^-2`, `a2^q`, `a1^-3q`;
    /// `1` is the identity. Adjacent letters are kept as written, not reduced.
    pub fn parse(text: &str, q: i64) -> Result<Self> {
        let bad = |t: &str| Error::MalformedWord(format!("cannot read letter '{t}'"));
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let body = tok.strip_prefix('a').ok_or_else(|| bad(tok))?;
            let (gen, exp) = body.split_once('^').unwrap_or((body, "1"));
            let l: usize = gen.parse().map_err(|_| bad(tok))?;
            let e: i64 = match exp.strip_suffix('q') {
                Some("") => q,
                Some("-") => -q,
                Some(k) => k.parse::<i64>().map_err(|_| bad(tok))?.checked_mul(q).ok_or_else(|| bad(tok))?,
                None => exp.parse().map_err(|_| bad(tok))?,
            };
            out.push((l, e));
        }
        Ok(GroupWord(out))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(0))
    }
}

/// Graph product of copies of `ℤ` (or of `ℤ/q` when a modulus is set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphProduct {
    m: usize,
    adj: Vec<Vec<bool>>,
    modulus: Option<i64>,
}

fn add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("exponent overflow")
}

impl GraphProduct {
    /// Graph product on letters `1..=m` where each listed edge makes two letters commute.
    pub fn new(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![vec![false; m + 1]; m + 1];
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > m || b > m || a == b {
                return Err(Error::InvalidInstance(format!("bad edge ({a}, {b}) for {m} generators")));
            }
            adj[a][b] = true;
            adj[b][a] = true;
        }
        Ok(GraphProduct { m, adj, modulus: None })
    }

    /// The same graph product with every generator of order `q`.
    pub fn quotient(&self, q: i64) -> Self {
        GraphProduct { modulus: Some(q), ..self.clone() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> Option<i64> {
        self.modulus
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for a in 1..=self.m {
            for b in a + 1..=self.m {
                if self.adj[a][b] {
                    v.push((a, b));
                }
            }
        }
        v
    }

    /// Whether distinct letters `a` and `b` commute. A letter is never said to commute with itself.
    pub fn commute(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[a][b]
    }

    /// Membership of letter `l` in the star of `i`.
    pub fn in_star(&self, i: usize, l: usize) -> bool {
        l == i || self.adj[i][l]
    }

    fn norm(&self, e: i64) -> i64 {
        match self.modulus {
            Some(q) => e.rem_euclid(q),
            None => e,
        }
    }

    pub fn validate(&self, raw: &[(usize, i64)]) -> Result<()> {
        for &(l, e) in raw {
            if l == 0 || l > self.m {
                return Err(Error::MalformedWord(format!("letter {l} outside 1..={}", self.m)));
            }
            if e == 0 {
                return Err(Error::MalformedWord(format!("zero exponent on letter {l}")));
            }
        }
        Ok(())
    }

    fn reduce_pass(&self, seq: &[(usize, i64)]) -> (Vec<(usize, i64)>, bool) {
        let mut out: Vec<(usize, i64)> = Vec::with_capacity(seq.len());
        let mut cancelled = false;
        for &(l, e) in seq {
            let e = self.norm(e);
            if e == 0 {
                cancelled = true;
                continue;
            }
            let mut merged = false;
            let mut j = out.len();
            while j > 0 {
                j -= 1;
                let (l2, e2) = out[j];
                if l2 == l {
                    let ne = self.norm(add(e2, e));
                    if ne == 0 {
                        out.remove(j);
                        cancelled = true;
                    } else {
                        out[j].1 = ne;
                    }
                    merged = true;
                    break;
                }
                if !self.commute(l, l2) {
                    break;
                }
            }
            if !merged {
                out.push((l, e));
            }
        }
        (out, cancelled)
    }

    fn canonical_order(&self, mut rest: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for k in 0..rest.len() {
                let free = (0..k).all(|p| self.commute(rest[p].0, rest[k].0));
                if free && best.is_none_or(|b| rest[k].0 < rest[b].0) {
                    best = Some(k);
                }
            }
            out.push(rest.remove(best.expect("a minimal syllable exists")));
        }
        out
    }

    /// Canonical form of an arbitrary syllable sequence (zero exponents allowed and dropped).
    pub fn normal_form(&self, raw: &[(usize, i64)]) -> GroupWord {
        let mut seq = raw.to_vec();
        loop {
            let (out, cancelled) = self.reduce_pass(&seq);
            seq = out;
            if !cancelled {
                break;
            }
        }
        GroupWord(self.canonical_order(seq))
    }

    /// Validated canonical form.
    pub fn word(&self, raw: &[(usize, i64)]) -> Result<GroupWord> {
        self.validate(raw)?;
        Ok(self.normal_form(raw))
    }

    pub fn mul(&self, a: &GroupWord, b: &GroupWord) -> GroupWord {
        let mut v = a.0.clone();
        v.extend_from_slice(&b.0);
        self.normal_form(&v)
    }

    pub fn mul_all(&self, ws: &[&GroupWord]) -> GroupWord {
        let v: Vec<(usize, i64)> = ws.iter().flat_map(|w| w.0.iter().copied()).collect();
        self.normal_form(&v)
    }

    pub fn inv(&self, a: &GroupWord) -> GroupWord {
        let v: Vec<(usize, i64)> = a.0.iter().rev().map(|&(l, e)| (l, -e)).collect();
        self.normal_form(&v)
    }

    pub fn pow(&self, a: &GroupWord, k: i64) -> GroupWord {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut v = Vec::new();
        for _ in 0..k.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        self.normal_form(&v)
    }

    /// `g x g⁻¹`.
    pub fn conj(&self, g: &GroupWord, x: &GroupWord) -> GroupWord {
        self.mul_all(&[g, x, &self.inv(g)])
    }

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn commutator(&self, a: &GroupWord, b: &GroupWord) -> GroupWord {
        self.mul_all(&[a, b, &self.inv(a), &self.inv(b)])
    }

    pub fn commutes(&self, a: &GroupWord, b: &GroupWord) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// Shortest representative of the coset `g · A_{st(i)}`.
    pub fn coset_rep(&self, g: &GroupWord, i: usize) -> GroupWord {
        let mut v = g.0.clone();
        loop {
            let pos = (0..v.len()).rev().find(|&k| {
                self.in_star(i, v[k].0) && (k + 1..v.len()).all(|p| self.commute(v[k].0, v[p].0))
            });
            match pos {
                Some(k) => {
                    v.remove(k);
                }
                None => break,
            }
        }
        GroupWord(self.canonical_order(v))
    }

    /// Splits `u` as `s · rest` with `s` the largest prefix in `A_{st(i)}` obtainable by
    /// commuting syllables to the front. Returns `(s, rest)`.
    pub fn star_prefix(&self, u: &GroupWord, i: usize) -> (Vec<(usize, i64)>, Vec<(usize, i64)>) {
        let mut rest = u.0.clone();
        let mut prefix = Vec::new();
        loop {
            let pos = (0..rest.len()).find(|&k| {
                self.in_star(i, rest[k].0) && (0..k).all(|p| self.commute(rest[k].0, rest[p].0))
            });
            match pos {
                Some(k) => prefix.push(rest.remove(k)),
                None => break,
            }
        }
        (prefix, rest)
    }

    /// Exponent of `a_i` in the `A_{st(i)}`-prefix of `u`.
    pub fn star_prefix_exponent(&self, u: &GroupWord, i: usize) -> i64 {
        self.star_prefix(u, i).0.iter().filter(|s| s.0 == i).map(|s| s.1).sum()
    }

    /// Whether `u ∈ A_{st(i)} · A_{st(j)}`.
    pub fn in_double_coset(&self, u: &GroupWord, i: usize, j: usize) -> bool {
        let (_, rest) = self.star_prefix(u, i);
        let rest = GroupWord(rest);
        self.coset_rep(&rest, j).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn free2() -> GraphProduct {
        GraphProduct::new(2, &[]).unwrap()
    }

    #[test]
    fn free_reduction_and_inverse() {
        let g = free2();
        let w = g.word(&[(1, 2), (2, 1), (2, -1), (1, -2)]).unwrap();
        assert!(w.is_empty());
        let a = g.word(&[(1, 1), (2, 3)]).unwrap();
        assert!(g.mul(&a, &g.inv(&a)).is_empty());
    }

    #[test]
    fn parse_inverts_render() {
        let w = GroupWord(vec![(1, 14), (2, -7), (1, 3), (3, 1), (2, -1)]);
        assert_eq!(w.render(7), "a1^2q a2^-q a1^3 a3 a2^-1");
        assert_eq!(GroupWord::parse(&w.render(7), 7).unwrap(), w);
        assert_eq!(GroupWord::parse("1", 7).unwrap(), GroupWord::identity());
        assert!(GroupWord::parse("b1", 7).is_err());
        assert!(GroupWord::parse("a1^x", 7).is_err());
    }

    #[test]
    fn commuting_letters_shuffle_to_canonical_form() {
        let g = GraphProduct::new(3, &[(1, 2)]).unwrap();
        assert_eq!(g.word(&[(2, 1), (1, 1)]).unwrap(), g.word(&[(1, 1), (2, 1)]).unwrap());
        assert!(g.commutator(&GroupWord::letter(1, 5), &GroupWord::letter(2, 7)).is_empty());
        let w = g.word(&[(1, 1), (3, 1), (2, 1), (3, -1), (1, -1)]).unwrap();
        assert_eq!(w.0.len(), 5);
    }

    #[test]
    fn cancellation_exposes_further_merges() {
        let g = GraphProduct::new(3, &[(1, 3)]).unwrap();
        let w = g.word(&[(1, 1), (2, 1), (2, -1), (1, 1)]).unwrap();
        assert_eq!(w, GroupWord(vec![(1, 2)]));
        // Once a2 a2^-1 cancels, the two a1 syllables merge across the commuting a3.
        let w = g.word(&[(1, 1), (3, 1), (2, 1), (2, -1), (1, 1)]).unwrap();
        assert_eq!(w, GroupWord(vec![(1, 2), (3, 1)]));
    }

    #[test]
    fn malformed_words_are_rejected() {
        let g = free2();
        assert!(matches!(g.word(&[(0, 1)]), Err(Error::MalformedWord(_))));
        assert!(matches!(g.word(&[(1, 0)]), Err(Error::MalformedWord(_))));
    }

    #[test]
    fn quotient_reduces_exponents() {
        let g = free2().quotient(5);
        assert!(g.word(&[(1, 5), (2, -10)]).unwrap().is_empty());
        assert_eq!(g.word(&[(1, 7)]).unwrap(), GroupWord(vec![(1, 2)]));
    }

    #[test]
    fn coset_reps_and_prefixes() {
        let g = GraphProduct::new(3, &[(1, 2)]).unwrap();
        let w = g.word(&[(3, 1), (1, 4), (2, 2)]).unwrap();
        assert_eq!(g.coset_rep(&w, 1), GroupWord(vec![(3, 1)]));
        assert_eq!(g.coset_rep(&w, 3), w);
        let u = g.word(&[(2, 2), (1, 4), (3, 1)]).unwrap();
        assert_eq!(g.star_prefix_exponent(&u, 1), 4);
        assert_eq!(g.star_prefix_exponent(&u, 3), 0);
    }

    fn word_strategy(m: usize, len: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
        prop::collection::vec((1..=m, prop_oneof![-3i64..=-1, 1i64..=3]), 0..len)
    }

    proptest! {
        #[test]
        fn group_laws(a in word_strategy(3, 6), b in word_strategy(3, 6), c in word_strategy(3, 6)) {
            let g = GraphProduct::new(3, &[(1, 2)]).unwrap();
            let (a, b, c) = (g.normal_form(&a), g.normal_form(&b), g.normal_form(&c));
            prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
            prop_assert!(g.mul(&a, &g.inv(&a)).is_empty());
            prop_assert_eq!(g.normal_form(&a.0), a.clone());
        }

        #[test]
        fn double_coset_test_matches_commutation(u in word_strategy(3, 6), i in 1usize..=3, j in 1usize..=3) {
            let g = GraphProduct::new(3, &[(1, 2), (2, 3)]).unwrap();
            prop_assume!(i != j && g.commute(i, j));
            let u = g.normal_form(&u);
            let conj = g.conj(&u, &GroupWord::letter(j, 1));
            let direct = g.commutes(&GroupWord::letter(i, 1), &conj);
            prop_assert_eq!(g.in_double_coset(&u, i, j), direct);
        }

        #[test]
        fn coset_rep_is_invariant(g0 in word_strategy(3, 5), s in word_strategy(3, 4), i in 1usize..=3) {
            let g = GraphProduct::new(3, &[(1, 2)]).unwrap();
            let s: Vec<(usize, i64)> = s.into_iter().filter(|&(l, _)| g.in_star(i, l)).collect();
            let x = g.normal_form(&g0);
            let y = g.mul(&x, &g.normal_form(&s));
            prop_assert_eq!(g.coset_rep(&x, i), g.coset_rep(&y, i));
        }
    }
}
