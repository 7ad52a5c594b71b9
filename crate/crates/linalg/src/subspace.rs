//! Subspaces of `k^n` kept in canonical echelon form.

use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::LinalgError;

/// A subspace stored as the nonzero rows of its reduced row echelon form.
/// Two subspaces are equal iff their stored forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    echelon: Matrix,
    pivots: Vec<usize>,
}

/// Sum, intersection and a membership oracle for a pair of subspaces.
#[derive(Clone, Debug)]
pub struct SubspaceOps {
    pub sum: Subspace,
    pub intersection: Subspace,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Subspace {
        Subspace {
            ambient,
            echelon: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Field, ambient: usize) -> Subspace {
        Subspace {
            ambient,
            echelon: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of `vectors` in `field^ambient`.
    pub fn span(
        field: Field,
        ambient: usize,
        vectors: &[Vec<Scalar>],
    ) -> Result<Subspace, LinalgError> {
        for v in vectors {
            if v.len() != ambient {
                return Err(LinalgError::Ambient {
                    expected: ambient,
                    found: v.len(),
                });
            }
        }
        let m = Matrix::from_rows(field, vectors)?;
        let m = if vectors.is_empty() {
            Matrix::zeros(field, 0, ambient)
        } else {
            m
        };
        Ok(Subspace::from_row_matrix(&m))
    }

    /// Row space of `m`.
    pub fn from_row_matrix(m: &Matrix) -> Subspace {
        let e = m.rref();
        let r = e.pivots.len();
        Subspace {
            ambient: m.cols(),
            echelon: e.matrix.block(0, 0, r, m.cols()),
            pivots: e.pivots,
        }
    }

    /// Column space of `m`.
    pub fn from_columns(m: &Matrix) -> Subspace {
        Subspace::from_row_matrix(&m.transpose())
    }

    pub fn field(&self) -> Field {
        self.echelon.field()
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    /// Canonical basis: the echelon rows.
    pub fn basis(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim()).map(|r| self.echelon.row(r)).collect()
    }

    /// Basis vectors as matrix columns (`ambient × dim`).
    pub fn basis_matrix(&self) -> Matrix {
        self.echelon.transpose()
    }

    /// `v` minus its components along the pivots; zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let f = self.field();
        let mut out = v.to_vec();
        for (r, &c) in self.pivots.iter().enumerate() {
            let coef = out[c].clone();
            if coef.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let e = self.echelon.get(r, j);
                if !e.is_zero() {
                    *o = f.sub(o, &f.mul(&coef, e));
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[Scalar]) -> Result<bool, LinalgError> {
        if v.len() != self.ambient {
            return Err(LinalgError::Ambient {
                expected: self.ambient,
                found: v.len(),
            });
        }
        for s in v {
            self.field().check(s)?;
        }
        Ok(self.reduce(v).iter().all(Scalar::is_zero))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other
            .basis()
            .iter()
            .all(|v| self.reduce(v).iter().all(Scalar::is_zero))
    }

    /// Coordinates of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if !self.reduce(v).iter().all(Scalar::is_zero) {
            return None;
        }
        Some(self.pivots.iter().map(|&c| v[c].clone()).collect())
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::Ambient {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        if self.field() != other.field() {
            return Err(LinalgError::MixedBackend);
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let m = Matrix::vstack(self.field(), self.ambient, &[&self.echelon, &other.echelon]);
        Ok(Subspace::from_row_matrix(&m))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let f = self.field();
        let a = self.dim();
        // Columns u_1..u_a, -v_1..-v_b; kernel vectors give Σ x_i u_i = Σ y_j v_j.
        let stacked = Matrix::vstack(f, self.ambient, &[&self.echelon, &other.echelon.neg()]);
        let sys = stacked.transpose();
        let vectors: Vec<Vec<Scalar>> = sys
            .kernel_basis()
            .into_iter()
            .map(|x| {
                let coeffs = Matrix::from_columns(f, a, &[x[..a].to_vec()]);
                self.echelon.transpose().mul(&coeffs).column(0)
            })
            .collect();
        Subspace::span(f, self.ambient, &vectors)
    }

    /// Standard basis indices spanning a complement: the non-pivot coordinates.
    pub fn complement_indices(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ambient).filter(|&i| !is_pivot[i]).collect()
    }

    /// Linear map `k^ambient → k^(ambient - dim)` with kernel exactly this
    /// subspace, sending each complement basis vector to a unit vector.
    pub fn quotient_map(&self) -> Matrix {
        let f = self.field();
        let comp = self.complement_indices();
        let mut pos = vec![None; self.ambient];
        for (k, &i) in comp.iter().enumerate() {
            pos[i] = Some(k);
        }
        let mut q = Matrix::zeros(f, comp.len(), self.ambient);
        for j in 0..self.ambient {
            let mut e = vec![f.zero(); self.ambient];
            e[j] = f.one();
            let r = self.reduce(&e);
            for (i, v) in r.iter().enumerate() {
                if let Some(k) = pos[i] {
                    q.set(k, j, v.clone());
                }
            }
        }
        q
    }

    /// Section of `quotient_map`: unit vectors on the complement indices.
    pub fn complement_section(&self) -> Matrix {
        let f = self.field();
        let comp = self.complement_indices();
        let mut s = Matrix::zeros(f, self.ambient, comp.len());
        for (k, &i) in comp.iter().enumerate() {
            s.set(i, k, f.one());
        }
        s
    }
}

/// Sum and intersection of two subspaces of the same ambient space.
pub fn subspace_ops(u: &Subspace, v: &Subspace) -> Result<SubspaceOps, LinalgError> {
    Ok(SubspaceOps {
        sum: u.sum(v)?,
        intersection: u.intersection(v)?,
    })
}
