//! Exact integer linear algebra: dense matrices over `i128` and the Smith
//! normal form with transformation matrices. Sized for coboundary matrices
//! of small finite groups, not for sparse or huge systems.

use crate::error::SptError;

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i128>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = IntMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Horizontal concatenation [self | other].
    pub fn hstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows);
        let mut m = IntMat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)];
            }
        }
        m
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut m = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] = m[(i, j)].checked_add(a.checked_mul(other[(k, j)]).expect("overflow")).expect("overflow");
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let t = self[(a, j)];
            self[(a, j)] = self[(b, j)];
            self[(b, j)] = t;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let t = self[(i, a)];
            self[(i, a)] = self[(i, b)];
            self[(i, b)] = t;
        }
    }

    /// row[a] += c * row[b]
    fn add_row(&mut self, a: usize, b: usize, c: i128) {
        for j in 0..self.cols {
            let v = self[(a, j)].checked_add(c.checked_mul(self[(b, j)]).expect("overflow")).expect("overflow");
            self[(a, j)] = v;
        }
    }

    /// col[a] += c * col[b]
    fn add_col(&mut self, a: usize, b: usize, c: i128) {
        for i in 0..self.rows {
            let v = self[(i, a)].checked_add(c.checked_mul(self[(i, b)]).expect("overflow")).expect("overflow");
            self[(i, a)] = v;
        }
    }

    fn neg_row(&mut self, a: usize) {
        for j in 0..self.cols {
            self[(a, j)] = -self[(a, j)];
        }
    }

    fn neg_col(&mut self, a: usize) {
        for i in 0..self.rows {
            self[(i, a)] = -self[(i, a)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form `u * a * v = d` with `u`, `v` unimodular and `d`
/// diagonal with each diagonal entry dividing the next.
#[derive(Debug, Clone)]
pub struct Snf {
    pub d: IntMat,
    pub u: IntMat,
    /// Inverse of `u`, maintained during reduction.
    pub u_inv: IntMat,
    pub v: IntMat,
    pub rank: usize,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)]).collect()
    }
}

pub fn smith_normal_form(a: &IntMat) -> Snf {
    let mut d = a.clone();
    let (rows, cols) = (d.rows, d.cols);
    let mut u = IntMat::identity(rows);
    let mut u_inv = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);

    let n = rows.min(cols);
    let mut t = 0;
    while t < n {
        // pivot: smallest nonzero |entry| in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        let mut best = i128::MAX;
        for i in t..rows {
            for j in t..cols {
                let x = d[(i, j)].abs();
                if x != 0 && x < best {
                    best = x;
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            // clear column t below the pivot
            let mut dirty = false;
            for i in (t + 1)..rows {
                if d[(i, t)] != 0 {
                    let q = d[(i, t)].div_euclid(d[(t, t)]);
                    d.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                    u_inv.add_col(t, i, q);
                    if d[(i, t)] != 0 {
                        // remainder smaller than pivot: swap up and restart
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                        u_inv.swap_cols(t, i);
                        dirty = true;
                    }
                }
            }
            for j in (t + 1)..cols {
                if d[(t, j)] != 0 {
                    let q = d[(t, j)].div_euclid(d[(t, t)]);
                    d.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                    if d[(t, j)] != 0 {
                        d.swap_cols(t, j);
                        v.swap_cols(t, j);
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }

        if d[(t, t)] < 0 {
            d.neg_row(t);
            u.neg_row(t);
            u_inv.neg_col(t);
        }
        t += 1;
    }

    // enforce the divisibility chain d[i] | d[i+1]
    let mut again = true;
    while again {
        again = false;
        for i in 0..n.saturating_sub(1) {
            let (a_i, a_j) = (d[(i, i)], d[(i + 1, i + 1)]);
            if a_i != 0 && a_j % a_i != 0 {
                // fold entry i+1 into column i, then re-reduce the 2x2 corner
                d.add_col(i, i + 1, 1);
                v.add_col(i, i + 1, 1);
                reduce_two(&mut d, &mut u, &mut u_inv, &mut v, i);
                again = true;
            }
        }
    }

    let rank = (0..n).take_while(|&i| d[(i, i)] != 0).count();
    Snf { d, u, u_inv, v, rank }
}

/// Re-reduce rows/columns i and i+1 after a divisibility fix; the block is
/// diagonal again afterwards with the gcd in position i.
fn reduce_two(d: &mut IntMat, u: &mut IntMat, u_inv: &mut IntMat, v: &mut IntMat, i: usize) {
    loop {
        // after the column fold, (i+1, i) holds a copy of d[i+1]
        if d[(i + 1, i)] == 0 && d[(i, i + 1)] == 0 {
            break;
        }
        if d[(i + 1, i)] != 0 {
            let q = d[(i + 1, i)].div_euclid(d[(i, i)]);
            d.add_row(i + 1, i, -q);
            u.add_row(i + 1, i, -q);
            u_inv.add_col(i, i + 1, q);
            if d[(i + 1, i)] != 0 {
                d.swap_rows(i, i + 1);
                u.swap_rows(i, i + 1);
                u_inv.swap_cols(i, i + 1);
                continue;
            }
        }
        if d[(i, i + 1)] != 0 {
            let q = d[(i, i + 1)].div_euclid(d[(i, i)]);
            d.add_col(i + 1, i, -q);
            v.add_col(i + 1, i, -q);
            if d[(i, i + 1)] != 0 {
                d.swap_cols(i, i + 1);
                v.swap_cols(i, i + 1);
                continue;
            }
        }
    }
    if d[(i, i)] < 0 {
        d.neg_row(i);
        u.neg_row(i);
        u_inv.neg_col(i);
    }
    if d[(i + 1, i + 1)] < 0 {
        d.neg_row(i + 1);
        u.neg_row(i + 1);
        u_inv.neg_col(i + 1);
    }
}

/// Basis (as matrix columns) of the integer kernel of `a`.
pub fn kernel_basis(a: &IntMat) -> IntMat {
    let snf = smith_normal_form(a);
    let r = snf.rank;
    let mut k = IntMat::zeros(a.cols, a.cols - r);
    for (out, j) in (r..a.cols).enumerate() {
        for i in 0..a.cols {
            k[(i, out)] = snf.v[(i, j)];
        }
    }
    k
}

/// Solve `a x = b` over the integers. Errors when no integral solution exists.
pub fn solve(snf: &Snf, b: &[i128]) -> Result<Vec<i128>, SptError> {
    let w = snf.u.mul_vec(b);
    let mut y = vec![0i128; snf.d.cols];
    for (i, &wi) in w.iter().enumerate() {
        if i < snf.rank {
            let di = snf.d[(i, i)];
            if wi % di != 0 {
                return Err(SptError::LinearSolve("no integral solution".into()));
            }
            y[i] = wi / di;
        } else if wi != 0 {
            return Err(SptError::LinearSolve("inconsistent system".into()));
        }
    }
    Ok(snf.v.mul_vec(&y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn snf_diag_chain() {
        let a = IntMat::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), vec![2, 2, 156]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntMat::identity(3));
    }

    #[test]
    fn kernel_of_singular() {
        let a = IntMat::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols, 2);
        for j in 0..k.cols {
            assert_eq!(a.mul_vec(&k.column(j)), vec![0, 0]);
        }
    }

    #[test]
    fn solve_roundtrip() {
        let a = IntMat::from_rows(&[vec![2, 0], vec![1, 3]]);
        let s = smith_normal_form(&a);
        let x = solve(&s, &[4, 8]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![4, 8]);
        assert!(solve(&s, &[1, 0]).is_err());
    }

    proptest! {
        #[test]
        fn snf_factorization_holds(entries in proptest::collection::vec(-9i128..10, 12)) {
            let a = IntMat::from_rows(&[
                entries[0..4].to_vec(),
                entries[4..8].to_vec(),
                entries[8..12].to_vec(),
            ]);
            let s = smith_normal_form(&a);
            prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
            prop_assert_eq!(s.u.mul(&s.u_inv), IntMat::identity(3));
            // divisibility chain
            let diag = s.diagonal();
            for i in 0..diag.len() - 1 {
                if diag[i] != 0 && diag[i + 1] != 0 {
                    prop_assert_eq!(diag[i + 1] % diag[i], 0);
                }
            }
        }
    }
}
