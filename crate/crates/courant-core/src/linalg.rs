//! Dense exact matrices over the rationals.
//!
//! Rank goes through fraction-free (Bareiss) elimination on a
//! denominator-cleared integer copy; kernel and solve go through rational
//! reduced row echelon form. Pivot selection is deterministic in both:
//! columns left to right, first nonzero row. Bases coming out of
//! [`Mat::kernel_basis`] are therefore reproducible byte for byte.

use crate::rat::{qone, qzero, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![qzero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = qone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|q| q.is_zero())
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &other[(i, j)])
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &other[(i, j)])
    }

    pub fn scale(&self, s: &Q) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * s)
    }

    pub fn neg(&self) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = qzero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Rank via Bareiss fraction-free elimination on an integer copy
    /// (each row is scaled by the lcm of its denominators first; row
    /// scaling does not change rank).
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..self.cols {
                    let d = self[(i, j)].denom();
                    lcm = num_integer_lcm(&lcm, d);
                }
                (0..self.cols)
                    .map(|j| {
                        let q = &self[(i, j)];
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect();
        let rows = self.rows;
        let cols = self.cols;
        let mut rank = 0;
        let mut prev = BigInt::one();
        let mut pivot_row = 0;
        for col in 0..cols {
            if pivot_row >= rows {
                break;
            }
            let found = (pivot_row..rows).find(|&r| !m[r][col].is_zero());
            let Some(found) = found else { continue };
            m.swap(pivot_row, found);
            for r in pivot_row + 1..rows {
                for c in col + 1..cols {
                    let v = (&m[pivot_row][col] * &m[r][c] - &m[r][col] * &m[pivot_row][c]) / &prev;
                    m[r][c] = v;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[pivot_row][col].clone();
            pivot_row += 1;
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form. Returns the RREF and the pivot columns in
    /// increasing order. Pivoting: columns left to right, first nonzero row.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for col in 0..m.cols {
            if pr >= m.rows {
                break;
            }
            let found = (pr..m.rows).find(|&r| !m[(r, col)].is_zero());
            let Some(found) = found else { continue };
            m.swap_rows(pr, found);
            let inv = m[(pr, col)].recip();
            for c in col..m.cols {
                let v = &m[(pr, c)] * &inv;
                m[(pr, c)] = v;
            }
            for r in 0..m.rows {
                if r != pr && !m[(r, col)].is_zero() {
                    let f = m[(r, col)].clone();
                    for c in col..m.cols {
                        let v = &m[(r, c)] - &(&f * &m[(pr, c)]);
                        m[(r, c)] = v;
                    }
                }
            }
            pivots.push(col);
            pr += 1;
        }
        (m, pivots)
    }

    /// Basis of the right kernel { v : Av = 0 }, one vector per free column,
    /// ordered by free column index.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let piv_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if piv_set[free].is_some() {
                continue;
            }
            let mut vec = vec![qzero(); self.cols];
            vec[free] = qone();
            for (&pcol, row) in pivots.iter().zip(0..) {
                vec[pcol] = -r[(row, free)].clone();
            }
            basis.push(vec);
        }
        basis
    }

    /// One solution of Ax = b, if consistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(self.rows, b.len());
        let aug = Mat::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // row [0 ... 0 | 1]
        }
        let mut x = vec![qzero(); self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Determinant by Bareiss on a denominator-cleared copy.
    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return qone();
        }
        let mut scale = qone();
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let mut lcm = BigInt::one();
                for j in 0..n {
                    lcm = num_integer_lcm(&lcm, self[(i, j)].denom());
                }
                scale *= Q::new(BigInt::one(), lcm.clone());
                (0..n)
                    .map(|j| {
                        let q = &self[(i, j)];
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return qzero();
                };
                m.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = v;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let d = Q::from_integer(m[n - 1][n - 1].clone()) * scale;
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                qone()
            } else {
                qzero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

fn num_integer_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.lcm(b)
}

/// Nondegenerate symmetric bilinear form with its inverse cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    pub mat: Mat,
    pub inv: Mat,
}

impl Metric {
    /// Fails if `mat` is not symmetric or is degenerate.
    pub fn new(mat: Mat) -> Result<Self, MetricError> {
        if mat.rows != mat.cols {
            return Err(MetricError::NotSquare { rows: mat.rows, cols: mat.cols });
        }
        if !mat.is_symmetric() {
            return Err(MetricError::NotSymmetric);
        }
        let inv = mat.inverse().ok_or(MetricError::Degenerate)?;
        Ok(Metric { mat, inv })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn eval(&self, x: &[Q], y: &[Q]) -> Q {
        let gy = self.mat.mul_vec(y);
        x.iter().zip(gy.iter()).map(|(a, b)| a * b).sum()
    }

    /// Lower an index: x ↦ g·x.
    pub fn lower(&self, x: &[Q]) -> Vec<Q> {
        self.mat.mul_vec(x)
    }

    /// Raise an index: α ↦ g⁻¹·α.
    pub fn raise(&self, a: &[Q]) -> Vec<Q> {
        self.inv.mul_vec(a)
    }

    /// Sylvester criterion over the rationals: all leading principal minors
    /// positive. Exact; no tolerance involved.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.dim();
        for k in 1..=n {
            let minor = Mat::from_fn(k, k, |i, j| self.mat[(i, j)].clone());
            if !minor.det().is_positive() {
                return false;
            }
        }
        true
    }

    /// Definite of either sign (g or -g positive definite).
    pub fn is_definite(&self) -> bool {
        if self.is_positive_definite() {
            return true;
        }
        Metric::new(self.mat.neg()).map(|m| m.is_positive_definite()).unwrap_or(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("metric matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("metric matrix is not symmetric")]
    NotSymmetric,
    #[error("metric matrix is degenerate")]
    Degenerate,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{qi, qr};

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect())
    }

    #[test]
    fn rank_and_det_agree_with_hand_values() {
        let a = m(&[&[1, 2], &[3, 4]]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.det(), qi(-2));

        let b = m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(b.rank(), 2);
        assert_eq!(b.det(), qi(0));
    }

    #[test]
    fn det_with_zero_leading_pivot() {
        let a = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.det(), qi(-1));
    }

    #[test]
    fn rational_entries() {
        let a = Mat::from_rows(vec![
            vec![qr(1, 2), qr(1, 3)],
            vec![qr(1, 4), qr(1, 5)],
        ]);
        // det = 1/10 - 1/12 = 1/60
        assert_eq!(a.det(), qr(1, 60));
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn kernel_dimension_and_membership() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(|q| num_traits::Zero::is_zero(q)));
        }
    }

    #[test]
    fn kernel_basis_is_deterministic_rref_style() {
        let a = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let k = a.kernel_basis();
        assert_eq!(k, vec![vec![qi(-1), qi(1), qi(0)]]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = a.solve(&[qi(3), qi(1)]).unwrap();
        assert_eq!(x, vec![qi(2), qi(1)]);

        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(b.solve(&[qi(0), qi(1)]).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn sylvester_detects_signature() {
        let id = Metric::new(Mat::identity(3)).unwrap();
        assert!(id.is_positive_definite());

        let lorentz = Metric::new(m(&[&[-1, 0], &[0, 1]])).unwrap();
        assert!(!lorentz.is_positive_definite());
        assert!(!lorentz.is_definite());

        let neg = Metric::new(m(&[&[-2, 0], &[0, -3]])).unwrap();
        assert!(!neg.is_positive_definite());
        assert!(neg.is_definite());
    }

    #[test]
    fn metric_rejects_bad_input() {
        assert_eq!(Metric::new(m(&[&[1, 2], &[3, 4]])).unwrap_err(), MetricError::NotSymmetric);
        assert_eq!(Metric::new(m(&[&[1, 1], &[1, 1]])).unwrap_err(), MetricError::Degenerate);
    }
}
