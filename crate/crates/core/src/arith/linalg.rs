//! Exact dense linear algebra over ℚ.

use num_traits::{One, Zero};

use super::rational::Q;

pub type Matrix = Vec<Vec<Q>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix, ncols: usize) -> usize {
    let mut a = m.clone();
    rref(&mut a, ncols).len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &Matrix, ncols: usize) -> Vec<Vec<Q>> {
    let mut a = m.clone();
    let pivots = rref(&mut a, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

/// One solution of `m x = b`, if any.
pub fn solve(m: &Matrix, b: &[Q], ncols: usize) -> Option<Vec<Q>> {
    let mut a: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut a, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = a[r][ncols].clone();
    }
    Some(x)
}

/// Determinant by fraction-free elimination over ℚ.
pub fn det(m: &Matrix) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    d
}

/// Incremental echelon basis that also tracks, for each stored row, a "tag" vector:
/// the row is congruent to its tag modulo previously inserted untagged rows.
/// Used for computing normal forms in quotient spaces.
#[derive(Clone, Debug)]
pub struct Reducer {
    ncols: usize,
    ntags: usize,
    rows: Vec<(usize, Vec<Q>, Vec<Q>)>,
}

impl Reducer {
    pub fn new(ncols: usize, ntags: usize) -> Self {
        Reducer { ncols, ntags, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Eliminate known pivots from `v`, updating `tag` accordingly.
    pub fn reduce(&self, v: &mut [Q], tag: &mut [Q]) {
        for (p, row, rtag) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let c = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &c * y;
                }
            }
            for (x, y) in tag.iter_mut().zip(rtag) {
                if !y.is_zero() {
                    *x -= &c * y;
                }
            }
        }
    }

    /// Insert a row with its tag; returns whether it was independent.
    pub fn insert(&mut self, mut v: Vec<Q>, mut tag: Vec<Q>) -> bool {
        debug_assert_eq!(v.len(), self.ncols);
        debug_assert_eq!(tag.len(), self.ntags);
        self.reduce(&mut v, &mut tag);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for x in tag.iter_mut() {
            *x *= &inv;
        }
        self.rows.push((p, v, tag));
        true
    }

    /// Express `v` as a tag combination: returns `None` if `v` is not in the span.
    pub fn express(&self, v: &[Q]) -> Option<Vec<Q>> {
        let mut w = v.to_vec();
        let mut tag = vec![Q::zero(); self.ntags];
        self.reduce(&mut w, &mut tag);
        if w.iter().any(|x| !x.is_zero()) {
            return None;
        }
        // v = Σ c_r row_r and row_r ≡ tag_r; reduce subtracted c_r tag_r from zero.
        Some(tag.into_iter().map(|x| -x).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::q;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn nullspace_and_rank() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(rank(&a, 3), 1);
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let s: Q = a[0].iter().zip(&v).map(|(x, y)| x * y).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn solve_and_det() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[q(3), q(5)], 2).unwrap();
        assert_eq!(x, vec![crate::arith::rational::qr(4, 5), crate::arith::rational::qr(7, 5)]);
        assert_eq!(det(&a), q(5));
        assert!(solve(&m(&[&[1, 1], &[1, 1]]), &[q(1), q(2)], 2).is_none());
    }

    #[test]
    fn reducer_quotient_coordinates() {
        // Quotient of Q^3 by span{(1,1,0)}: basis tags e1 -> (1,0,0), e2 -> (0,0,1).
        let mut r = Reducer::new(3, 2);
        assert!(r.insert(vec![q(1), q(1), q(0)], vec![q(0), q(0)]));
        assert!(r.insert(vec![q(1), q(0), q(0)], vec![q(1), q(0)]));
        assert!(r.insert(vec![q(0), q(0), q(1)], vec![q(0), q(1)]));
        // (0,1,0) ≡ -(1,0,0) mod W
        assert_eq!(r.express(&[q(0), q(1), q(0)]).unwrap(), vec![q(-1), q(0)]);
        assert_eq!(r.express(&[q(2), q(0), q(5)]).unwrap(), vec![q(2), q(5)]);
    }
}
