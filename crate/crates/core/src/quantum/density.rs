use std::ops::AddAssign;

use num_complex::Complex64;

use super::Amplitude;
use crate::{Error, Result};

/// Square complex matrix, row-major. Produced by partial traces.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        DensityMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity / 2^n over `n_qubits` qubits.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut m = DensityMatrix::zeros(dim);
        let p = 1.0 / dim as f64;
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(p, 0.0);
        }
        m
    }

    pub fn from_entries(dim: usize, entries: Vec<Amplitude>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "{} entries supplied for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(DensityMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    pub fn trace(&self) -> Amplitude {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Adds |v⟩⟨v|.
    pub(crate) fn add_outer(&mut self, v: &[Amplitude]) {
        debug_assert_eq!(v.len(), self.dim);
        for (i, vi) in v.iter().enumerate() {
            if *vi == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                self.entries[i * self.dim + j] += vi * vj.conj();
            }
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        (0..self.dim).all(|i| {
            (i..self.dim).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tolerance)
        })
    }

    /// True when every eigenvalue is at least `-tolerance`.
    ///
    /// Checked by attempting a Cholesky factorization of `self + tolerance·I`,
    /// which succeeds exactly when that shifted matrix is positive definite.
    pub fn is_positive_semidefinite(&self, tolerance: f64) -> bool {
        if !self.is_hermitian(tolerance) {
            return false;
        }
        let n = self.dim;
        let mut shifted = self.entries.clone();
        for i in 0..n {
            shifted[i * n + i] += tolerance;
        }
        // Lower-triangular factor, row-major.
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = shifted[j * n + j].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d <= 0.0 {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut s = shifted[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }
}

impl AddAssign<&DensityMatrix> for DensityMatrix {
    fn add_assign(&mut self, rhs: &DensityMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a += b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn maximally_mixed_has_unit_trace() {
        let m = DensityMatrix::maximally_mixed(2);
        assert_eq!(m.dim(), 4);
        assert!((m.trace().re - 1.0).abs() < 1e-15);
        assert!(m.is_positive_semidefinite(1e-12));
    }

    #[test]
    fn psd_detection() {
        // |+><+| is PSD with a zero eigenvalue.
        let plus = DensityMatrix::from_entries(2, vec![c(0.5, 0.0); 4]).unwrap();
        assert!(plus.is_positive_semidefinite(1e-12));
        // diag(1, -0.1) is not.
        let neg = DensityMatrix::from_entries(
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.1, 0.0)],
        )
        .unwrap();
        assert!(!neg.is_positive_semidefinite(1e-12));
        // [[1, 2], [2, 1]] has eigenvalues 3 and -1.
        let indef = DensityMatrix::from_entries(
            2,
            vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        assert!(!indef.is_positive_semidefinite(1e-12));
    }

    #[test]
    fn hermiticity() {
        let h = DensityMatrix::from_entries(
            2,
            vec![c(0.5, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(h.is_hermitian(1e-12));
        let not_h = DensityMatrix::from_entries(
            2,
            vec![c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5), c(0.5, 0.0)],
        )
        .unwrap();
        assert!(!not_h.is_hermitian(1e-12));
    }

    #[test]
    fn diff_rejects_dimension_mismatch() {
        let a = DensityMatrix::zeros(2);
        let b = DensityMatrix::zeros(4);
        assert!(a.max_abs_diff(&b).is_err());
        assert!(DensityMatrix::from_entries(2, vec![c(0.0, 0.0); 3]).is_err());
    }
}
