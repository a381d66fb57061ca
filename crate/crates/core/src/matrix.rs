//! Dense symmetric matrices of sequence-length size (T up to a few hundred)
//! with a cyclic Jacobi eigensolver.
//!
//! Jacobi is the right tool here: the matrices are tiny, the method is
//! unconditionally stable, it delivers near machine-precision orthogonal
//! eigenvectors, and it is bitwise deterministic.

use crate::error::CoreError;
use crate::scalar::{ksum, Scalar};
use crate::Result;

/// Row-major dense square matrix assumed (and validated where it matters)
/// symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> SymMatrix<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![S::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    /// Builds from a row-major slice of length `n*n`.
    pub fn from_row_major(n: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != n * n {
            return Err(CoreError::invalid(format!(
                "matrix data length {} does not match dimension {n}x{n}",
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.n + j] = v;
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: S) {
        self.set(i, j, v);
        self.set(j, i, v);
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    /// Largest absolute asymmetry `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> S {
        let mut worst = S::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = (self.get(i, j) - self.get(j, i)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .fold(S::zero(), |a, &x| if x.abs() > a { x.abs() } else { a })
    }

    pub fn matvec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| ksum(self.row(i).iter().zip(x).map(|(&a, &b)| a * b)))
            .collect()
    }

    /// Quadratic form `x^T A x`.
    pub fn quad_form(&self, x: &[S]) -> S {
        let ax = self.matvec(x);
        ksum(ax.iter().zip(x).map(|(&a, &b)| a * b))
    }

    /// Full symmetric eigendecomposition by cyclic Jacobi sweeps.
    ///
    /// Returns eigenvalues in descending order with matching orthonormal
    /// eigenvectors (columns of the returned basis). Ties are left in sweep
    /// order, which makes the output deterministic.
    pub fn eigen(&self) -> Eigen<S> {
        let n = self.n;
        let mut a = self.clone();
        // symmetrize once so round-tripped inputs behave
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (a.get(i, j) + a.get(j, i)) * S::of(0.5);
                a.set_sym(i, j, v);
            }
        }
        let mut v = Self::identity(n);
        let scale = if a.max_abs() > S::zero() {
            a.max_abs()
        } else {
            S::one()
        };
        let stop = scale * S::epsilon() * S::of_usize(n.max(1));
        for _sweep in 0..64 {
            let mut off = S::zero();
            for i in 0..n {
                for j in (i + 1)..n {
                    let x = a.get(i, j).abs();
                    if x > off {
                        off = x;
                    }
                }
            }
            if off <= stop {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() <= stop {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    let theta = (aqq - app) / (S::of(2.0) * apq);
                    let t = {
                        let s = if theta < S::zero() {
                            -S::one()
                        } else {
                            S::one()
                        };
                        s / (theta.abs() + (S::one() + theta * theta).sqrt())
                    };
                    let c = S::one() / (S::one() + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            a.get(j, j)
                .partial_cmp(&a.get(i, i))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values: Vec<S> = order.iter().map(|&i| a.get(i, i)).collect();
        let mut vectors = Vec::with_capacity(n);
        for &col in &order {
            vectors.push((0..n).map(|r| v.get(r, col)).collect::<Vec<S>>());
        }
        Eigen { values, vectors }
    }

    /// Eigenvalues only, descending.
    pub fn eigenvalues(&self) -> Vec<S> {
        self.eigen().values
    }
}

/// Eigendecomposition result: `values[k]` belongs to `vectors[k]`.
#[derive(Clone, Debug)]
pub struct Eigen<S> {
    pub values: Vec<S>,
    pub vectors: Vec<Vec<S>>,
}
