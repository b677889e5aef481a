//! Reference-frame data tying a bundle to a grid.
//!
//! All matrix profiles are expressed in the orthonormal frame of the
//! reference metric. In that frame the reference moment map is the diagonal
//! profile `φ⁰_i(μ) = w_i⁰ + d_i μ`, and the invariant homomorphism for a
//! coupling `(i → j, k)` has norm profile `|s|(μ) = μ^{k/2} (1−μ)^{(D−k)/2}`
//! with `D = d_j − d_i`. Dividing the entry of slot `(a, b)` by the pairing
//! factor `ŝ_{ab}` gives the cylinder coefficient, on which the plain
//! derivative acts as `c ↦ σ c'` and the reference Chern derivative as
//! `c ↦ σ c' + (φ⁰_b − φ⁰_a) c`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bundle::EquivariantBundle;
use crate::endo::{CMat, EndoProfile};
use crate::grid::MomentumGeometry;

/// Precomputed frame data for one bundle on one grid.
#[derive(Debug, Clone)]
pub struct ModelFrame {
    pub geom: MomentumGeometry,
    pub bundle: EquivariantBundle,
    /// Reference moment profiles `φ⁰_i = w_i⁰ + d_i μ`.
    pub phi0: Vec<Vec<f64>>,
    /// Reference mean-curvature constants `ρ⁰_i = d_i`.
    pub rho0: Vec<f64>,
    /// Per node, the reference pairing factor in every slot:
    /// `Ŝ[(a,b)] = μ^{(w_b⁰−w_a⁰)/2} (1−μ)^{(w_a¹−w_b¹)/2}`.
    pub shat: Vec<DMatrix<f64>>,
    /// Slots where invariant metric entries may live (coupling-gated).
    pub metric_mask: DMatrix<bool>,
    /// Closure of the metric mask under composition; endomorphism profiles
    /// produced by the calculus stay inside this slot set.
    pub endo_mask: DMatrix<bool>,
}

impl ModelFrame {
    pub fn new(bundle: EquivariantBundle, geom: MomentumGeometry) -> Self {
        let r = bundle.rank();
        let n = geom.len();

        let phi0: Vec<Vec<f64>> = bundle
            .summands
            .iter()
            .map(|l| geom.sample(|m| l.w0() as f64 + l.degree as f64 * m))
            .collect();
        let rho0: Vec<f64> = bundle.summands.iter().map(|l| l.degree as f64).collect();

        let mut shat = Vec::with_capacity(n);
        for k in 0..n {
            let mu = geom.mu[k];
            let mut s = DMatrix::zeros(r, r);
            for a in 0..r {
                for b in 0..r {
                    let p = (bundle.summands[b].w0() - bundle.summands[a].w0()) as f64 / 2.0;
                    let q = (bundle.summands[a].w1() - bundle.summands[b].w1()) as f64 / 2.0;
                    s[(a, b)] = mu.powf(p) * (1.0 - mu).powf(q);
                }
            }
            shat.push(s);
        }

        let mut metric_mask = DMatrix::from_element(r, r, false);
        for i in 0..r {
            metric_mask[(i, i)] = true;
        }
        for c in &bundle.couplings {
            metric_mask[(c.to, c.from)] = true;
            metric_mask[(c.from, c.to)] = true;
        }
        let endo_mask = transitive_closure(&metric_mask);

        Self { geom, bundle, phi0, rho0, shat, metric_mask, endo_mask }
    }

    pub fn rank(&self) -> usize {
        self.bundle.rank()
    }

    pub fn nodes(&self) -> usize {
        self.geom.len()
    }

    /// Reference moment map as a diagonal matrix profile.
    pub fn phi0_endo(&self) -> EndoProfile {
        let mut e = EndoProfile::zeros(self.nodes(), self.rank());
        for (k, m) in e.mats.iter_mut().enumerate() {
            for i in 0..self.rank() {
                m[(i, i)] = Complex64::new(self.phi0[i][k], 0.0);
            }
        }
        e
    }

    /// Reference mean curvature as a diagonal matrix profile.
    pub fn rho0_endo(&self) -> EndoProfile {
        let mut e = EndoProfile::zeros(self.nodes(), self.rank());
        for m in e.mats.iter_mut() {
            for i in 0..self.rank() {
                m[(i, i)] = Complex64::new(self.rho0[i], 0.0);
            }
        }
        e
    }

    /// Spectral derivative of the cylinder coefficients (the value entries
    /// divided by the reference pairing factor): `c ↦ σ c'` per slot. This
    /// is the derivative entering the `∂̄`-part of curvature changes; the
    /// frame conjugation cancels every commutator term, so no linear term
    /// appears and the `1/σ` in the mean curvature cancels structurally.
    fn coefficient_derivative(&self, e: &EndoProfile) -> Vec<CMat> {
        let n = self.nodes();
        let r = self.rank();
        let geom = &self.geom;
        let mut coef = vec![CMat::zeros(r, r); n];
        for k in 0..n {
            for a in 0..r {
                for b in 0..r {
                    coef[k][(a, b)] = e.mats[k][(a, b)] / self.shat[k][(a, b)];
                }
            }
        }
        let mut dcoef = vec![CMat::zeros(r, r); n];
        for i in 0..n {
            for j in 0..n {
                let d = geom.diff[(i, j)];
                if d != 0.0 {
                    let cj = &coef[j];
                    let di = &mut dcoef[i];
                    for a in 0..r {
                        for b in 0..r {
                            di[(a, b)] += cj[(a, b)] * d;
                        }
                    }
                }
            }
        }
        dcoef
    }

    /// Plain cylinder derivative `∂_t` in the value view:
    /// `(∂_t e)_{ab} = σ c'_{ab} ŝ_{ab}`.
    pub fn dt(&self, e: &EndoProfile) -> EndoProfile {
        let dcoef = self.coefficient_derivative(e);
        let mut out = EndoProfile::zeros(self.nodes(), self.rank());
        for k in 0..self.nodes() {
            let sig = self.geom.sigma[k];
            for a in 0..self.rank() {
                for b in 0..self.rank() {
                    out.mats[k][(a, b)] = dcoef[k][(a, b)] * sig * self.shat[k][(a, b)];
                }
            }
        }
        out
    }

    /// The `(1,0)`-part of the reference Chern connection on endomorphisms:
    /// `∂₀ e = ∂_t e − [φ⁰, e]`, i.e.
    /// `(∂₀ e)_{ab} = [σ c' + (φ⁰_b − φ⁰_a) c] ŝ_{ab}`.
    pub fn dcov0(&self, e: &EndoProfile) -> EndoProfile {
        let dcoef = self.coefficient_derivative(e);
        let mut out = EndoProfile::zeros(self.nodes(), self.rank());
        for k in 0..self.nodes() {
            let sig = self.geom.sigma[k];
            for a in 0..self.rank() {
                for b in 0..self.rank() {
                    let coef = e.mats[k][(a, b)] / self.shat[k][(a, b)];
                    let lin = self.phi0[b][k] - self.phi0[a][k];
                    out.mats[k][(a, b)] =
                        (dcoef[k][(a, b)] * sig + coef * lin) * self.shat[k][(a, b)];
                }
            }
        }
        out
    }

    /// Zero out entries outside the endomorphism slot set.
    pub fn project(&self, e: &EndoProfile) -> EndoProfile {
        e.masked(&self.endo_mask)
    }
}

fn transitive_closure(mask: &DMatrix<bool>) -> DMatrix<bool> {
    let r = mask.nrows();
    let mut m = mask.clone();
    loop {
        let mut changed = false;
        for a in 0..r {
            for b in 0..r {
                if !m[(a, b)] {
                    for c in 0..r {
                        if m[(a, c)] && m[(c, b)] {
                            m[(a, b)] = true;
                            changed = true;
                            break;
                        }
                    }
                }
            }
        }
        if !changed {
            return m;
        }
    }
}
