//! Dense square matrices over [`ExactScalar`].
//!
//! Everything downstream (idempotents, lowering/raising products, equation
//! residuals) is checked as a full matrix identity, so the only operations
//! needed are exact ring arithmetic, the entrywise product, and traces.
//! Multiplication skips zero entries of the left factor, which makes products
//! with 0/1 matrices (adjacency, lowering, raising, dual idempotents) cheap.

use std::ops::{Index, IndexMut};

use rayon::prelude::*;

use crate::exact::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<ExactScalar>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![ExactScalar::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ExactScalar::one();
        }
        m
    }

    /// The all-ones matrix J.
    pub fn ones(n: usize) -> Self {
        Matrix {
            n,
            data: vec![ExactScalar::one(); n * n],
        }
    }

    pub fn diagonal(values: &[ExactScalar]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> ExactScalar) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[ExactScalar] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ExactScalar::is_zero)
    }

    /// First nonzero entry, as a witness for failed identities.
    pub fn first_nonzero(&self) -> Option<(usize, usize, ExactScalar)> {
        self.data
            .iter()
            .position(|v| !v.is_zero())
            .map(|p| (p / self.n, p % self.n, self.data[p].clone()))
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return Self::zeros(self.n);
        }
        Matrix {
            n: self.n,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(x, y)| {
                    if x.is_zero() || y.is_zero() {
                        ExactScalar::zero()
                    } else {
                        x * y
                    }
                })
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let rows: Vec<Vec<ExactScalar>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![ExactScalar::zero(); n];
                for k in 0..n {
                    let a = &self[(i, k)];
                    if a.is_zero() {
                        continue;
                    }
                    let rrow = rhs.row(k);
                    if a.is_one() {
                        for (j, r) in rrow.iter().enumerate() {
                            if !r.is_zero() {
                                acc[j] = &acc[j] + r;
                            }
                        }
                    } else {
                        for (j, r) in rrow.iter().enumerate() {
                            if !r.is_zero() {
                                acc[j] = &acc[j] + &(a * r);
                            }
                        }
                    }
                }
                acc
            })
            .collect();
        Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Sum of `coeff * matrix` terms.
    pub fn linear_combination(terms: &[(ExactScalar, &Matrix)]) -> Self {
        let n = terms.first().expect("at least one term").1.n;
        let mut out = Self::zeros(n);
        for (c, m) in terms {
            assert_eq!(m.n, n);
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.data.iter_mut().zip(&m.data) {
                if !v.is_zero() {
                    *o = &*o + &(c * v);
                }
            }
        }
        out
    }

    /// `self * diag(d)`: scales column `j` by `d[j]`.
    pub fn mul_diag_right(&self, d: &[ExactScalar]) -> Self {
        assert_eq!(d.len(), self.n);
        Matrix::from_fn(self.n, |i, j| {
            let v = &self[(i, j)];
            if v.is_zero() || d[j].is_zero() {
                ExactScalar::zero()
            } else {
                v * &d[j]
            }
        })
    }

    /// `diag(d) * self`: scales row `i` by `d[i]`.
    pub fn mul_diag_left(&self, d: &[ExactScalar]) -> Self {
        assert_eq!(d.len(), self.n);
        Matrix::from_fn(self.n, |i, j| {
            let v = &self[(i, j)];
            if v.is_zero() || d[i].is_zero() {
                ExactScalar::zero()
            } else {
                &d[i] * v
            }
        })
    }

    pub fn trace(&self) -> ExactScalar {
        let mut t = ExactScalar::zero();
        for i in 0..self.n {
            t = &t + &self[(i, i)];
        }
        t
    }

    /// trace(self * rhs) without forming the product.
    pub fn trace_of_product(&self, rhs: &Self) -> ExactScalar {
        assert_eq!(self.n, rhs.n);
        let mut t = ExactScalar::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let x = &self[(i, j)];
                let y = &rhs[(j, i)];
                if !x.is_zero() && !y.is_zero() {
                    t = &t + &(x * y);
                }
            }
        }
        t
    }

    pub fn entries(&self) -> &[ExactScalar] {
        &self.data
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = ExactScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ExactScalar {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ExactScalar {
        &mut self.data[i * self.n + j]
    }
}

/// Exact basis of the linear dependency space of the given matrices, viewed
/// as vectors: all coefficient tuples `c` with `sum_i c_i M_i = 0`.
///
/// Gaussian elimination on the k x n^2 coefficient layout; k is tiny (four
/// for the raising/lowering dependencies), so this is O(k^2 n^2).
pub fn dependency_space(mats: &[&Matrix]) -> Vec<Vec<ExactScalar>> {
    let k = mats.len();
    if k == 0 {
        return Vec::new();
    }
    let len = mats[0].data.len();
    // Row-reduce the vectors; track the coefficient combination of each row.
    let mut rows: Vec<(Vec<ExactScalar>, Vec<ExactScalar>)> = (0..k)
        .map(|i| {
            let mut coeff = vec![ExactScalar::zero(); k];
            coeff[i] = ExactScalar::one();
            (mats[i].data.clone(), coeff)
        })
        .collect();
    let mut pivots: Vec<(usize, Vec<ExactScalar>, Vec<ExactScalar>)> = Vec::new();
    let mut nullspace = Vec::new();
    for (mut vec, mut coeff) in rows.drain(..) {
        for (pcol, pvec, pcoeff) in &pivots {
            let factor = vec[*pcol].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, p) in vec.iter_mut().zip(pvec.iter()) {
                if !p.is_zero() {
                    *v = &*v - &(&factor * p);
                }
            }
            for (c, p) in coeff.iter_mut().zip(pcoeff.iter()) {
                if !p.is_zero() {
                    *c = &*c - &(&factor * p);
                }
            }
        }
        match vec.iter().position(|v| !v.is_zero()) {
            Some(col) => {
                let inv = vec[col].inv().expect("pivot is nonzero");
                for v in vec.iter_mut() {
                    if !v.is_zero() {
                        *v = &*v * &inv;
                    }
                }
                for c in coeff.iter_mut() {
                    if !c.is_zero() {
                        *c = &*c * &inv;
                    }
                }
                pivots.push((col, vec, coeff));
            }
            None => nullspace.push(coeff),
        }
    }
    let _ = len;
    nullspace
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactScalar as S;
    use proptest::prelude::*;

    fn small(vals: &[i64]) -> Matrix {
        let n = (vals.len() as f64).sqrt() as usize;
        assert_eq!(n * n, vals.len());
        let mut i = 0;
        Matrix::from_fn(n, |_, _| {
            let v = S::from_int(vals[i]);
            i += 1;
            v
        })
    }

    #[test]
    fn mul_matches_hand_computation() {
        let a = small(&[1, 2, 3, 4]);
        let b = small(&[0, 1, 1, 0]);
        assert_eq!(a.mul(&b), small(&[2, 1, 4, 3]));
    }

    #[test]
    fn identity_is_neutral() {
        let a = small(&[3, -1, 0, 2, 5, 7, 1, 1, 1]);
        let id = Matrix::identity(3);
        assert_eq!(a.mul(&id), a);
        assert_eq!(id.mul(&a), a);
    }

    #[test]
    fn trace_of_product_agrees_with_product() {
        let a = small(&[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let b = small(&[2, 0, 1, -1, 3, 0, 4, 4, -2]);
        assert_eq!(a.trace_of_product(&b), a.mul(&b).trace());
    }

    #[test]
    fn diag_products() {
        let a = small(&[1, 2, 3, 4]);
        let d = vec![S::from_int(2), S::from_int(0)];
        assert_eq!(a.mul_diag_right(&d), small(&[2, 0, 6, 0]));
        assert_eq!(a.mul_diag_left(&d), small(&[2, 4, 0, 0]));
        assert_eq!(a.mul_diag_right(&d), a.mul(&Matrix::diagonal(&d)));
    }

    #[test]
    fn dependency_space_finds_known_relation() {
        let a = small(&[1, 0, 0, 1]);
        let b = small(&[2, 0, 0, 2]);
        let c = small(&[0, 1, 1, 0]);
        let deps = dependency_space(&[&a, &b, &c]);
        assert_eq!(deps.len(), 1);
        let d = &deps[0];
        // dependency must be a multiple of (2, -1, 0)
        assert!(d[2].is_zero());
        assert_eq!(&d[0] * &S::from_int(-1), &d[1] * &S::from_int(2));
    }

    #[test]
    fn dependency_space_empty_for_independent() {
        let a = small(&[1, 0, 0, 0]);
        let b = small(&[0, 1, 0, 0]);
        assert!(dependency_space(&[&a, &b]).is_empty());
    }

    proptest! {
        #[test]
        fn mul_associative_and_transpose_antihomomorphic(
            xs in proptest::collection::vec(-4i64..=4, 9),
            ys in proptest::collection::vec(-4i64..=4, 9),
        ) {
            let a = small(&xs);
            let b = small(&ys);
            prop_assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
        }
    }
}
