//! Dense exact linear algebra over arbitrary-precision rationals.

use num::{BigInt, One, Zero};

use crate::ratio::{canonical_integer_vector, Q};

/// Row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatQ {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl MatQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatQ {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatQ::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        MatQ {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut m = MatQ::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> MatQ {
        MatQ::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &MatQ) -> MatQ {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        MatQ::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Q::zero();
            for k in 0..self.cols {
                if !self[(i, k)].is_zero() && !other[(k, j)].is_zero() {
                    acc += &self[(i, k)] * &other[(k, j)];
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for k in 0..self.cols {
                    if !self[(i, k)].is_zero() && !v[k].is_zero() {
                        acc += &self[(i, k)] * &v[k];
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (MatQ, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].clone().recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(i, j)] - &f * &m[(r, j)];
                        m[(i, j)] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Null-space basis in free-variable form, scaled to coprime integers with
    /// positive leading entry, ordered by free column.
    pub fn null_space(&self) -> Vec<Vec<BigInt>> {
        let (r, pivots) = self.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for f in 0..self.cols {
            if pivot_of_col[f].is_some() {
                continue;
            }
            let mut v = vec![Q::zero(); self.cols];
            v[f] = Q::one();
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = -r[(row, f)].clone();
            }
            basis.push(canonical_integer_vector(&v).expect("free column vector is nonzero"));
        }
        basis
    }

    /// A particular solution of `self * x = b` with free variables set to zero,
    /// or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(self.rows, b.len(), "dimension mismatch");
        let mut aug = MatQ::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        aug = aug.rref().0;
        let mut x = vec![Q::zero(); self.cols];
        for i in 0..self.rows {
            let Some(lead) = (0..=self.cols).find(|&j| !aug[(i, j)].is_zero()) else {
                continue;
            };
            if lead == self.cols {
                return None;
            }
            x[lead] = aug[(i, self.cols)].clone();
        }
        Some(x)
    }

    pub fn det(&self) -> Q {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                m.swap_rows(c, p);
                det = -det;
            }
            det *= &m[(c, c)];
            let inv = m[(c, c)].clone().recip();
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = &m[(i, c)] * &inv;
                    for j in c..n {
                        let v = &m[(i, j)] - &f * &m[(c, j)];
                        m[(i, j)] = v;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<MatQ> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let aug = MatQ::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Q::one()
            } else {
                Q::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(MatQ::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| crate::ratio::q_to_f64(&self[(i, j)]))
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

impl std::ops::Index<(usize, usize)> for MatQ {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatQ {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{q, q_int};

    #[test]
    fn rref_and_rank() {
        let m = MatQ::from_rows(vec![
            vec![q_int(1), q_int(1), q_int(-1)],
            vec![q_int(2), q_int(2), q_int(-2)],
        ]);
        assert_eq!(m.rank(), 1);
        let basis = m.null_space();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let qv: Vec<Q> = v.iter().map(|n| Q::from_integer(n.clone())).collect();
            assert!(m.mul_vec(&qv).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let z = MatQ::from_rows(vec![vec![q_int(1), q_int(2)], vec![q(1, 2), q_int(1)]]);
        assert!(z.solve(&[q_int(1), q_int(1)]).is_none());
        let id = MatQ::identity(3);
        let ones = vec![q_int(1), q_int(1), q_int(1)];
        assert_eq!(id.solve(&ones).unwrap(), ones);
        let sing = MatQ::from_rows(vec![vec![q_int(1), q_int(1)], vec![q_int(1), q_int(1)]]);
        let x = sing.solve(&[q_int(1), q_int(1)]).unwrap();
        assert_eq!(x, vec![q_int(1), q_int(0)]);
    }

    #[test]
    fn det_and_inverse() {
        let m = MatQ::from_rows(vec![vec![q_int(2), q_int(1)], vec![q_int(3), q_int(4)]]);
        assert_eq!(m.det(), q_int(5));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), MatQ::identity(2));
        let sing = MatQ::from_rows(vec![vec![q_int(1), q_int(2)], vec![q_int(2), q_int(4)]]);
        assert_eq!(sing.det(), q_int(0));
        assert!(sing.inverse().is_none());
    }
}
