//! Dense matrices in the column-vector convention: an `r × c` matrix maps
//! coordinate columns of length `c` to columns of length `r`.

use std::fmt;

use crate::field::{Field, Scalar};
use crate::LinalgError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Outcome of `solve`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Consistent {
        particular: Vec<Scalar>,
        kernel: Vec<Vec<Scalar>>,
    },
    Inconsistent,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    /// Build from row-major entries, checking that every entry belongs to `field`.
    pub fn from_vec(
        field: Field,
        rows: usize,
        cols: usize,
        data: Vec<Scalar>,
    ) -> Result<Matrix, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape {
                expected: (rows, cols),
                found: data.len(),
            });
        }
        for s in &data {
            field.check(s)?;
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn from_i64(field: Field, rows: usize, cols: usize, entries: &[i64]) -> Matrix {
        assert_eq!(entries.len(), rows * cols, "entry count");
        Matrix {
            field,
            rows,
            cols,
            data: entries.iter().map(|&v| field.from_i64(v)).collect(),
        }
    }

    pub fn from_rows(field: Field, rows: &[Vec<Scalar>]) -> Result<Matrix, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::Ragged);
            }
            data.extend(r.iter().cloned());
        }
        Matrix::from_vec(field, rows.len(), cols, data)
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<Scalar>]) -> Matrix {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, v) in c.iter().enumerate() {
                m.data[i * m.cols + j] = v.clone();
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    fn same_field(&self, other: &Matrix) {
        assert_eq!(self.field, other.field, "scalar backend mismatch");
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::MixedBackend);
        }
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul(other))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.same_field(other);
        assert_eq!(self.cols, other.rows, "product shape");
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "vector length");
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !x.is_zero() {
                        acc = f.add(&acc, &f.mul(a, x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.same_field(other);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sum shape");
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.neg(a)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let f = self.field;
        Matrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| f.mul(a, s)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Copy `block` into `self` with its top-left corner at `(r, c)`.
    pub fn put(&mut self, r: usize, c: usize, block: &Matrix) {
        assert!(r + block.rows <= self.rows && c + block.cols <= self.cols, "block fits");
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.data[(r + i) * self.cols + c + j] = block.get(i, j).clone();
            }
        }
    }

    pub fn block(&self, r: usize, c: usize, rows: usize, cols: usize) -> Matrix {
        assert!(r + rows <= self.rows && c + cols <= self.cols, "block inside");
        let mut out = Matrix::zeros(self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.data[i * cols + j] = self.get(r + i, c + j).clone();
            }
        }
        out
    }

    pub fn hstack(field: Field, rows: usize, parts: &[&Matrix]) -> Matrix {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut c = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack rows");
            out.put(0, c, m);
            c += m.cols;
        }
        out
    }

    pub fn vstack(field: Field, cols: usize, parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut r = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack cols");
            out.put(r, 0, m);
            r += m.rows;
        }
        out
    }

    pub fn block_diag(field: Field, parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let (mut r, mut c) = (0, 0);
        for m in parts {
            out.put(r, c, m);
            r += m.rows;
            c += m.cols;
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let cols: Vec<Vec<Scalar>> = idx.iter().map(|&j| self.column(j)).collect();
        Matrix::from_columns(self.field, self.rows, &cols)
    }

    pub fn trace(&self) -> Scalar {
        assert!(self.is_square(), "trace of a square matrix");
        let f = self.field;
        (0..self.rows).fold(f.zero(), |acc, i| f.add(&acc, self.get(i, i)))
    }

    /// Reduced row echelon form. Deterministic: pivots are chosen as the
    /// first nonzero entry scanning rows top to bottom.
    pub fn rref(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("nonzero pivot");
            for j in c..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = f.mul(&m.data[idx], &inv);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let pv = m.data[r * m.cols + j].clone();
                    if pv.is_zero() {
                        continue;
                    }
                    let idx = i * m.cols + j;
                    m.data[idx] = f.sub(&m.data[idx], &f.mul(&factor, &pv));
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the null space, one vector per free column, in column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let f = self.field;
        let e = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (r, &c) in e.pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (r, &c) in e.pivots.iter().enumerate() {
                v[c] = f.neg(e.matrix.get(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Kernel as the columns of a matrix.
    pub fn kernel_matrix(&self) -> Matrix {
        Matrix::from_columns(self.field, self.cols, &self.kernel_basis())
    }

    /// Solve `self · x = b`.
    pub fn solve(&self, b: &[Scalar]) -> Result<Solution, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::Dimension(format!(
                "right-hand side has length {} for {} rows",
                b.len(),
                self.rows
            )));
        }
        for s in b {
            self.field.check(s)?;
        }
        let f = self.field;
        let bcol = Matrix::from_columns(f, self.rows, &[b.to_vec()]);
        let aug = Matrix::hstack(f, self.rows, &[self, &bcol]);
        let e = aug.rref();
        if e.pivots.last() == Some(&self.cols) {
            return Ok(Solution::Inconsistent);
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &c) in e.pivots.iter().enumerate() {
            x[c] = e.matrix.get(r, self.cols).clone();
        }
        Ok(Solution::Consistent {
            particular: x,
            kernel: self.kernel_basis(),
        })
    }

    /// Some `x` with `self · x = b`, if one exists.
    pub fn solve_one(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        match self.solve(b).expect("well-formed system") {
            Solution::Consistent { particular, .. } => Some(particular),
            Solution::Inconsistent => None,
        }
    }

    /// Some `X` with `self · X = b`, column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, b.rows, "solve_matrix rows");
        let f = self.field;
        let aug = Matrix::hstack(f, self.rows, &[self, b]);
        let e = aug.rref();
        if e.pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(f, self.cols, b.cols);
        for (r, &c) in e.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(c, j, e.matrix.get(r, self.cols + j).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let id = Matrix::identity(self.field, self.rows);
        let x = self.solve_matrix(&id)?;
        if self.rank() == self.rows {
            Some(x)
        } else {
            None
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Indices of a maximal independent set of columns, chosen greedily from the left.
    pub fn independent_columns(&self) -> Vec<usize> {
        self.rref().pivots
    }

    /// Basis of the column space (a subset of the columns).
    pub fn column_space(&self) -> Matrix {
        let idx = self.rref().pivots;
        self.select_columns(&idx)
    }

    pub fn pow(&self, mut e: u32) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.field, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows as u32).is_zero()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)?;
        for s in &self.data {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Null-space basis of `a`.
pub fn kernel_basis(a: &Matrix) -> Vec<Vec<Scalar>> {
    a.kernel_basis()
}

/// Solve `a · x = b`.
pub fn solve(a: &Matrix, b: &[Scalar]) -> Result<Solution, LinalgError> {
    a.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let f = fp(101);
        let k = Matrix::zeros(f, 2, 2).kernel_basis();
        assert_eq!(k, vec![vec![f.one(), f.zero()], vec![f.zero(), f.one()]]);
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let f = fp(101);
        assert!(Matrix::identity(f, 3).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_over_f2() {
        let f = fp(2);
        let a = Matrix::from_i64(f, 1, 2, &[1, 1]);
        assert_eq!(a.kernel_basis(), vec![vec![f.one(), f.one()]]);
    }

    #[test]
    fn solve_identity() {
        let f = fp(7);
        let b = vec![f.from_i64(3), f.from_i64(5)];
        match Matrix::identity(f, 2).solve(&b).unwrap() {
            Solution::Consistent { particular, kernel } => {
                assert_eq!(particular, b);
                assert!(kernel.is_empty());
            }
            Solution::Inconsistent => panic!("identity system is consistent"),
        }
    }

    #[test]
    fn solve_zero_inconsistent() {
        let f = fp(7);
        let b = vec![f.one()];
        assert_eq!(
            Matrix::zeros(f, 1, 1).solve(&b).unwrap(),
            Solution::Inconsistent
        );
    }

    #[test]
    fn solve_mod_five() {
        let f = fp(5);
        let a = Matrix::from_i64(f, 1, 1, &[2]);
        match a.solve(&[f.from_i64(3)]).unwrap() {
            Solution::Consistent { particular, .. } => assert_eq!(particular, vec![f.from_i64(4)]),
            Solution::Inconsistent => panic!("2x = 3 is solvable mod 5"),
        }
    }

    #[test]
    fn solve_rejects_bad_lengths_and_backends() {
        let f = fp(5);
        let a = Matrix::identity(f, 2);
        assert!(a.solve(&[f.one()]).is_err());
        assert!(matches!(
            a.solve(&[Field::Rational.one(), Field::Rational.one()]),
            Err(LinalgError::MixedBackend)
        ));
    }

    #[test]
    fn from_vec_rejects_foreign_entries() {
        let f = fp(5);
        assert!(Matrix::from_vec(f, 1, 1, vec![Scalar::Mod(7)]).is_err());
        assert!(Matrix::from_vec(f, 1, 1, vec![Field::Rational.one()]).is_err());
    }

    #[test]
    fn zero_dimension_matrices() {
        let f = fp(3);
        let a = Matrix::zeros(f, 0, 2);
        assert_eq!(a.kernel_basis().len(), 2);
        let b = Matrix::zeros(f, 2, 0);
        assert!(b.kernel_basis().is_empty());
        assert_eq!(a.mul(&Matrix::zeros(f, 2, 4)).cols(), 4);
        assert_eq!(b.mul(&a), Matrix::zeros(f, 2, 2));
    }

    #[test]
    fn inverse_round_trip_rational() {
        let f = Field::Rational;
        let a = Matrix::from_i64(f, 2, 2, &[2, 1, 1, 1]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(Matrix::from_i64(f, 2, 2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn independent_columns_greedy() {
        let f = fp(101);
        let a = Matrix::from_i64(f, 2, 3, &[1, 2, 0, 0, 0, 1]);
        assert_eq!(a.independent_columns(), vec![0, 2]);
    }
}
