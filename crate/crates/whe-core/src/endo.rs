//! Matrix-valued profiles over the momentum interval.
//!
//! An invariant endomorphism of a split bundle reduces to one complex matrix
//! per grid node, expressed in the orthonormal frame of the reference metric.
//! Entries are gated by the coupling mask; the entry in slot `(a, b)` is a
//! smooth coefficient times the reference norm profile of the invariant
//! homomorphism between the summands, which lets spectral differentiation act
//! on smooth coefficients only.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

/// A matrix-valued profile: one `r × r` complex matrix per grid node.
#[derive(Debug, Clone)]
pub struct EndoProfile {
    pub mats: Vec<CMat>,
}

impl EndoProfile {
    pub fn zeros(nodes: usize, rank: usize) -> Self {
        Self { mats: vec![CMat::zeros(rank, rank); nodes] }
    }

    pub fn identity(nodes: usize, rank: usize) -> Self {
        Self { mats: vec![CMat::identity(rank, rank); nodes] }
    }

    pub fn nodes(&self) -> usize {
        self.mats.len()
    }

    pub fn rank(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        Self { mats: self.mats.iter().map(f).collect() }
    }

    pub fn zip(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat) -> Self {
        Self {
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|m| m * Complex64::new(s, 0.0))
    }

    /// Scale each node's matrix by a scalar profile value.
    pub fn scale_profile(&self, p: &[f64]) -> Self {
        Self {
            mats: self
                .mats
                .iter()
                .zip(p)
                .map(|(m, &s)| m * Complex64::new(s, 0.0))
                .collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        self.map(|m| m.adjoint())
    }

    /// Hermitian part `(A + A†)/2` at every node.
    pub fn hermitian_part(&self) -> Self {
        self.map(|m| (m + m.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Pointwise inverse. Panics if a node matrix is singular.
    pub fn inverse(&self) -> Self {
        self.map(|m| {
            m.clone()
                .try_inverse()
                .expect("endomorphism profile not invertible at a node")
        })
    }

    /// Add `s · Id` at every node.
    pub fn shift(&self, s: f64) -> Self {
        let r = self.rank();
        let id = CMat::identity(r, r) * Complex64::new(s, 0.0);
        self.map(|m| m + &id)
    }

    /// Subtract a diagonal real profile set: `A − diag(p_i(μ))`.
    pub fn sub_real_diag(&self, diag: &[Vec<f64>]) -> Self {
        let mut out = self.clone();
        for (k, m) in out.mats.iter_mut().enumerate() {
            for (i, p) in diag.iter().enumerate() {
                m[(i, i)] -= Complex64::new(p[k], 0.0);
            }
        }
        out
    }

    /// Trace profile.
    pub fn trace(&self) -> Vec<f64> {
        self.mats.iter().map(|m| m.trace().re).collect()
    }

    /// Trace of the product, as a real profile (valid for pairs whose product
    /// has real trace, e.g. Hermitian times Hermitian-conjugated objects).
    pub fn trace_mul(&self, other: &Self) -> Vec<f64> {
        self.mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| (a * b).trace().re)
            .collect()
    }

    /// Frobenius norm profile.
    pub fn frobenius(&self) -> Vec<f64> {
        self.mats.iter().map(|m| m.norm()).collect()
    }

    /// Sup over nodes of the Frobenius norm.
    pub fn sup_frobenius(&self) -> f64 {
        self.frobenius().into_iter().fold(0.0, f64::max)
    }

    /// Eigenvalues at each node, ascending (Hermitian part is used).
    pub fn eigenvalues(&self) -> Vec<Vec<f64>> {
        self.mats
            .iter()
            .map(|m| {
                let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
                let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().cloned().collect();
                ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
                ev
            })
            .collect()
    }

    /// Minimum eigenvalue over the whole grid.
    pub fn min_eigenvalue(&self) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (k, evs) in self.eigenvalues().into_iter().enumerate() {
            if evs[0] < best.1 {
                best = (k, evs[0]);
            }
        }
        best
    }

    /// Apply a real function to the Hermitian spectrum at every node.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.map(|m| {
            let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(h);
            let r = m.nrows();
            let mut d = CMat::zeros(r, r);
            for i in 0..r {
                d[(i, i)] = Complex64::new(f(eig.eigenvalues[i]), 0.0);
            }
            &eig.eigenvectors * d * eig.eigenvectors.adjoint()
        })
    }

    /// Matrix exponential of a Hermitian profile.
    pub fn exp_hermitian(&self) -> Self {
        self.spectral_map(f64::exp)
    }

    /// Matrix logarithm of a positive Hermitian profile.
    pub fn log_hermitian(&self) -> Self {
        self.spectral_map(f64::ln)
    }

    /// `log det` profile of a positive Hermitian profile.
    pub fn log_det(&self) -> Vec<f64> {
        self.mats
            .iter()
            .map(|m| {
                let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
                SymmetricEigen::new(h).eigenvalues.iter().map(|l| l.ln()).sum()
            })
            .collect()
    }

    /// Off-diagonal entries set to zero outside the allowed slot set.
    pub fn masked(&self, mask: &DMatrix<bool>) -> Self {
        self.map(|m| {
            let mut out = m.clone();
            for a in 0..m.nrows() {
                for b in 0..m.ncols() {
                    if !mask[(a, b)] {
                        out[(a, b)] = Complex64::new(0.0, 0.0);
                    }
                }
            }
            out
        })
    }

    /// Largest magnitude of any entry outside the allowed slot set.
    pub fn mask_violation(&self, mask: &DMatrix<bool>) -> f64 {
        let mut worst: f64 = 0.0;
        for m in &self.mats {
            for a in 0..m.nrows() {
                for b in 0..m.ncols() {
                    if !mask[(a, b)] {
                        worst = worst.max(m[(a, b)].norm());
                    }
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_hermitian() -> EndoProfile {
        let mut e = EndoProfile::zeros(5, 2);
        for (k, m) in e.mats.iter_mut().enumerate() {
            let t = k as f64 * 0.3;
            m[(0, 0)] = Complex64::new(1.0 + t, 0.0);
            m[(1, 1)] = Complex64::new(2.0 - 0.2 * t, 0.0);
            m[(0, 1)] = Complex64::new(0.3, 0.1 * t);
            m[(1, 0)] = m[(0, 1)].conj();
        }
        e
    }

    #[test]
    fn exp_log_round_trip() {
        let e = sample_hermitian();
        let back = e.exp_hermitian().log_hermitian();
        let gap = e.sub(&back).sup_frobenius();
        assert!(gap < 1e-12, "gap {gap}");
    }

    #[test]
    fn log_det_is_trace_of_log() {
        let e = sample_hermitian().exp_hermitian();
        let ld = e.log_det();
        let tr = e.log_hermitian().trace();
        for (a, b) in ld.iter().zip(&tr) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_map_respects_identity() {
        let e = EndoProfile::identity(3, 2);
        let sq = e.spectral_map(|x| x * x);
        assert!(sq.sub(&e).sup_frobenius() < 1e-14);
    }
}
