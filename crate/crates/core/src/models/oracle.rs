//! Membership in the normal closure of the `q`-th powers, decided in the quotient graph
//! product of `ℤ/q` independently of any windmill computation.

use serde::Serialize;

use crate::group::{GraphProduct, GroupWord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    /// The image in the quotient is trivial, so the word lies in the rotation subgroup.
    pub in_kernel: bool,
    /// Normal form of the image in the graph product of `ℤ/q`.
    pub quotient_normal_form: GroupWord,
    /// The word is already trivial in the infinite graph product.
    pub trivial_in_group: bool,
}

pub fn membership_oracle(group: &GraphProduct, q: i64, w: &[(usize, i64)]) -> OracleVerdict {
    let image = group.quotient(q).normal_form(w);
    OracleVerdict {
        in_kernel: image.is_empty(),
        quotient_normal_form: image,
        trivial_in_group: group.normal_form(w).is_empty(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        let q = 7;
        let g = GraphProduct::new(2, &[(1, 2)]).unwrap();
        let v = membership_oracle(&g, q, &[(1, q)]);
        assert!(v.in_kernel && !v.trivial_in_group);
        let v = membership_oracle(&g, q, &[(1, 1)]);
        assert!(!v.in_kernel);
        assert_eq!(v.quotient_normal_form, GroupWord(vec![(1, 1)]));
        let v = membership_oracle(&g, q, &[(1, q), (2, q), (1, -q), (2, -q)]);
        assert!(v.in_kernel && v.trivial_in_group);
        let free = GraphProduct::new(2, &[]).unwrap();
        let v = membership_oracle(&free, q, &[(1, q), (2, q), (1, -q), (2, -q)]);
        assert!(v.in_kernel && !v.trivial_in_group);
    }
}
