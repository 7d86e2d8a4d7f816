//! The standard order on the elements lying between two elements of one coordinate.
//!
//! For `Y, Y'` strictly between `X` and `Z`, `Y` precedes `Y'` exactly when `d_Y(X, Y') > κ`.
//! The comparator is checked to be a strict total order and the resulting chain is checked
//! against the betweenness inequalities before it is returned.

use std::fmt;

use crate::rational::Exact;

/// Why a standard order could not be produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderError<E> {
    /// Neither or both of `a < b` and `b < a` hold.
    NotTotal(E, E),
    NotTransitive(E, E, E),
    /// A distance needed by the comparator or the inequalities is undefined.
    Undefined(Vec<E>),
    /// One of the betweenness inequalities fails on the listed chain `[Y0, Y1, Y2]`.
    Inequality { rule: &'static str, witness: Vec<E> },
}

impl<E: fmt::Debug> fmt::Display for OrderError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderError::NotTotal(a, b) => write!(f, "comparator is not total on {a:?}, {b:?}"),
            OrderError::NotTransitive(a, b, c) => {
                write!(f, "comparator is not transitive on {a:?} < {b:?} < {c:?}")
            }
            OrderError::Undefined(w) => write!(f, "distance undefined at {w:?}"),
            OrderError::Inequality { rule, witness } => {
                write!(f, "inequality '{rule}' fails on chain {witness:?}")
            }
        }
    }
}

impl<E: fmt::Debug> std::error::Error for OrderError<E> {}

/// Orders `set` between `x` and `z`. The returned chain starts with `x` and ends with `z`.
///
/// `d(y, a, b)` must return the modified distance `d_y(a, b)`.
pub fn standard_order<E, T, F>(
    x: E,
    z: E,
    set: &[E],
    kappa: &T,
    d: F,
) -> Result<Vec<E>, OrderError<E>>
where
    E: Clone + PartialEq,
    T: Exact,
    F: Fn(&E, &E, &E) -> Option<T>,
{
    let mut inner: Vec<E> = Vec::new();
    for s in set {
        if *s != x && *s != z && !inner.contains(s) {
            inner.push(s.clone());
        }
    }
    let k = inner.len();
    let mut less = vec![vec![false; k]; k];
    for a in 0..k {
        for b in 0..k {
            if a == b {
                continue;
            }
            let v = d(&inner[a], &x, &inner[b]).ok_or_else(|| {
                OrderError::Undefined(vec![inner[a].clone(), x.clone(), inner[b].clone()])
            })?;
            less[a][b] = v > *kappa;
        }
    }
    for a in 0..k {
        for b in a + 1..k {
            if less[a][b] == less[b][a] {
                return Err(OrderError::NotTotal(inner[a].clone(), inner[b].clone()));
            }
        }
    }
    for a in 0..k {
        for b in 0..k {
            if !less[a][b] {
                continue;
            }
            for c in 0..k {
                if less[b][c] && !less[a][c] {
                    return Err(OrderError::NotTransitive(
                        inner[a].clone(),
                        inner[b].clone(),
                        inner[c].clone(),
                    ));
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by_key(|&b| (0..k).filter(|&a| less[a][b]).count());
    let mut chain = Vec::with_capacity(k + 2);
    chain.push(x.clone());
    chain.extend(idx.into_iter().map(|i| inner[i].clone()));
    chain.push(z.clone());
    check_chain(&chain, kappa, &d)?;
    Ok(chain)
}

/// Checks the betweenness inequalities on every increasing triple of a chain from `X` to `Z`.
pub fn check_chain<E, T, F>(chain: &[E], kappa: &T, d: &F) -> Result<(), OrderError<E>>
where
    E: Clone + PartialEq,
    T: Exact,
    F: Fn(&E, &E, &E) -> Option<T>,
{
    let n = chain.len();
    if n < 3 {
        return Ok(());
    }
    let (x, z) = (&chain[0], &chain[n - 1]);
    let get = |y: &E, a: &E, b: &E| {
        d(y, a, b).ok_or_else(|| OrderError::Undefined(vec![y.clone(), a.clone(), b.clone()]))
    };
    for j in 1..n - 1 {
        let y1 = &chain[j];
        let through = get(y1, x, z)?;
        for i in 0..j {
            for l in j + 1..n {
                let (y0, y2) = (&chain[i], &chain[l]);
                let w = || vec![y0.clone(), y1.clone(), y2.clone()];
                let mid = get(y1, y0, y2)?;
                if mid > through || mid < through.clone() - kappa.clone() {
                    return Err(OrderError::Inequality { rule: "middle", witness: w() });
                }
                if get(y0, y1, y2)? > *kappa {
                    return Err(OrderError::Inequality { rule: "lower end", witness: w() });
                }
                if get(y2, y1, y0)? > *kappa {
                    return Err(OrderError::Inequality { rule: "upper end", witness: w() });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, Rational};

    /// Points on a line; `d_y(a, b)` is 1 when `y` lies strictly between `a` and `b`, else 0.
    fn line(y: &i32, a: &i32, b: &i32) -> Option<Rational> {
        if y == a || y == b {
            return None;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        Some(int(i64::from(lo < y && y < hi)))
    }

    #[test]
    fn orders_points_on_a_line() {
        let chain = standard_order(0, 10, &[7, 3, 5], &int(0), line).unwrap();
        assert_eq!(chain, vec![0, 3, 5, 7, 10]);
        let chain = standard_order(10, 0, &[7, 3, 5], &int(0), line).unwrap();
        assert_eq!(chain, vec![10, 7, 5, 3, 0]);
    }

    #[test]
    fn empty_set_gives_endpoints() {
        assert_eq!(standard_order(0, 1, &[], &int(0), line).unwrap(), vec![0, 1]);
    }

    #[test]
    fn large_kappa_breaks_totality() {
        assert!(matches!(
            standard_order(0, 10, &[3, 5], &int(1), line),
            Err(OrderError::NotTotal(3, 5))
        ));
    }
}
