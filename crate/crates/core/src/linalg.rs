//! Small direct solvers: tridiagonal (Thomas) and banded LU with partial
//! pivoting.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solves a tridiagonal system. `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    let mut c = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut denom = diag[0];
    if denom == T::zero() {
        return Err(Error::SingularSystem { row: 0 });
    }
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom == T::zero() || !denom.is_finite() {
            return Err(Error::SingularSystem { row: i });
        }
        c[i] = if i + 1 < n { sup[i] / denom } else { T::zero() };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    Ok(d)
}

/// Square banded matrix with `kl` sub- and `ku` super-diagonals, stored
/// with `kl` extra columns of headroom for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandedMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![T::zero(); n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if j + self.kl < i || j > i + self.ku {
            return T::zero();
        }
        self.data[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// Factorizes in place and solves `A x = b`.
    pub fn solve(mut self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + ku + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = self.data[self.idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() {
                return Err(Error::SingularSystem { row: k });
            }
            piv[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.idx(k, k)];
            for i in k + 1..=last_row {
                let ik = self.idx(i, k);
                let l = self.data[ik] / pivot;
                self.data[ik] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..=last_col {
                    let ij = self.idx(i, j);
                    let kj = self.idx(k, j);
                    self.data[ij] = self.data[ij] - l * self.data[kj];
                }
            }
        }
        let mut b = rhs.to_vec();
        for k in 0..n {
            b.swap(k, piv[k]);
            let last_row = (k + kl).min(n - 1);
            for i in k + 1..=last_row {
                b[i] = b[i] - self.data[self.idx(i, k)] * b[k];
            }
        }
        for i in (0..n).rev() {
            let last_col = (i + ku + kl).min(n - 1);
            let mut s = b[i];
            for j in i + 1..=last_col {
                s = s - self.data[self.idx(i, j)] * b[j];
            }
            b[i] = s / self.data[self.idx(i, i)];
        }
        Ok(b)
    }
}
