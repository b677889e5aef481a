//! Inequality and identity reports evaluated on metrics: the weighted
//! Kobayashi–Lübke inequality, the exponentially weighted Yang–Mills
//! identity and its topological bound, the weighted vortex residual, and the
//! explicit extension metric on the Fano model.

use num_complex::Complex64;
use serde::Serialize;

use crate::endo::EndoProfile;
use crate::error::{CoreError, Result};
use crate::frame::ModelFrame;
use crate::intersect::{char_square_profiles, fano_exp_degree, FanoLineData};
use crate::metric::{curvature_of, weighted_contraction};
use crate::weight::{hessian_condition_check, WeightFunction};

/// Report of the weighted Kobayashi–Lübke inequality
/// `(r−1)(c₁²·v) ≤ 2r(c₂·v)` under the Hessian weight condition.
#[derive(Debug, Clone, Serialize)]
pub struct LubkeReport {
    pub c1sq_v: f64,
    pub ch2_v: f64,
    pub c2_v: f64,
    /// `Δ(v) = (c₁²·v) − 2r(ch₂·v)`; the inequality is `Δ(v) ≥ 0`.
    pub delta_v: f64,
    pub inequality_holds: bool,
    /// Sup of the trace-free parts of `(ρ, φ)`: the projective flatness
    /// surrogate.
    pub tracefree_sup: f64,
    pub equality: bool,
    pub projectively_flat: bool,
}

pub fn lubke_report(
    frame: &ModelFrame,
    v: &WeightFunction,
    n_dim: usize,
    f: &EndoProfile,
) -> Result<LubkeReport> {
    let hess = hessian_condition_check(v, n_dim, &frame.geom);
    if !hess.holds {
        return Err(CoreError::PreconditionWeight { margin: hess.max_margin });
    }
    let r = frame.rank() as f64;
    let wp = v.profiles(&frame.geom);
    let pkg = curvature_of(frame, f);
    let (c1sq, ch2) = char_square_profiles(&frame.geom, &pkg, &wp.dv, &wp.d2v);
    let c2 = (c1sq - 2.0 * ch2) / 2.0;
    let delta = c1sq - 2.0 * r * ch2;

    let tracefree = |e: &EndoProfile| {
        let tr = e.trace();
        let mut sup = 0.0f64;
        for (k, m) in e.mats.iter().enumerate() {
            let mut c = m.clone();
            for i in 0..frame.rank() {
                c[(i, i)] -= Complex64::new(tr[k] / r, 0.0);
            }
            sup = sup.max(c.norm());
        }
        sup
    };
    let tracefree_sup = tracefree(&pkg.mean_curvature).max(tracefree(&pkg.moment_map));
    let scale = c1sq.abs().max(ch2.abs()).max(1.0);
    let tol = 1e-9 * scale;
    Ok(LubkeReport {
        c1sq_v: c1sq,
        ch2_v: ch2,
        c2_v: c2,
        delta_v: delta,
        inequality_holds: delta >= -tol,
        tracefree_sup,
        equality: delta.abs() <= tol.max(1e-10),
        projectively_flat: tracefree_sup < 1e-7,
    })
}

/// Report of the exponentially weighted Yang–Mills identity
/// `∫|K_v°|²/v + Δ(v)/r = (1/4π²) YM_v` and the bound
/// `YM_v ≥ (4π²/r) Δ(v)`.
#[derive(Debug, Clone, Serialize)]
pub struct YangMillsReport {
    /// `∫ |K_v(h)°|² dμ / v`.
    pub kcirc_energy: f64,
    /// `Δ(v)/r`.
    pub delta_over_r: f64,
    /// `(1/4π²) YM_v(h) = ∫ v tr((ρ°)²) dμ`.
    pub ym_normalized: f64,
    pub ym: f64,
    pub identity_residual: f64,
    /// `YM/4π² − Δ/r ≥ 0`, zero exactly at a solved metric.
    pub bound_gap: f64,
}

pub fn yang_mills_report(
    frame: &ModelFrame,
    v: &WeightFunction,
    f: &EndoProfile,
) -> Result<YangMillsReport> {
    if v.exponential_xi().is_none() {
        return Err(CoreError::WrongFamily { family: v.family_tag().into() });
    }
    let r = frame.rank() as f64;
    let g = &frame.geom;
    let wp = v.profiles(g);
    let pkg = curvature_of(frame, f);
    let kv = weighted_contraction(&pkg, &wp.v, &wp.dv);

    let tracefree = |e: &EndoProfile| {
        let tr = e.trace();
        let mut out = e.clone();
        for (k, m) in out.mats.iter_mut().enumerate() {
            for i in 0..frame.rank() {
                m[(i, i)] -= Complex64::new(tr[k] / r, 0.0);
            }
        }
        out
    };
    let k0 = tracefree(&kv);
    let rho0 = tracefree(&pkg.mean_curvature);

    let k0_sq = k0.trace_mul(&k0);
    let rho0_sq = rho0.trace_mul(&rho0);
    let mut kcirc_energy = 0.0;
    let mut ym_normalized = 0.0;
    for k in 0..g.len() {
        kcirc_energy += g.w[k] * k0_sq[k] / wp.v[k];
        ym_normalized += g.w[k] * wp.v[k] * rho0_sq[k];
    }
    let (c1sq, ch2) = char_square_profiles(g, &pkg, &wp.dv, &wp.d2v);
    let delta_over_r = (c1sq - 2.0 * r * ch2) / r;
    let identity_residual = (kcirc_energy + delta_over_r - ym_normalized).abs();
    Ok(YangMillsReport {
        kcirc_energy,
        delta_over_r,
        ym_normalized,
        ym: 4.0 * std::f64::consts::PI * std::f64::consts::PI * ym_normalized,
        identity_residual,
        bound_gap: ym_normalized - delta_over_r,
    })
}

/// An invariant section of the bundle, stored as per-summand coefficient
/// profiles against the weight-zero monomial section of each summand (which
/// exists iff `w⁰ ≤ 0 ≤ w¹`).
#[derive(Debug, Clone)]
pub struct VortexInput {
    pub coefficients: Vec<Vec<Complex64>>,
}

impl VortexInput {
    pub fn constant(frame: &ModelFrame, coeffs: &[Complex64]) -> Result<Self> {
        let n = frame.nodes();
        let mut c = Vec::new();
        for (i, &z) in coeffs.iter().enumerate() {
            if z.norm() > 0.0 {
                let l = frame.bundle.summands[i];
                if !(l.w0() <= 0 && l.w1() >= 0) {
                    return Err(CoreError::InvalidBundle(format!(
                        "summand {i} has no invariant holomorphic section (weights {:?})",
                        l.weights
                    )));
                }
            }
            c.push(vec![z; n]);
        }
        Ok(Self { coefficients: c })
    }

    pub fn zero(frame: &ModelFrame) -> Self {
        Self { coefficients: vec![vec![Complex64::new(0.0, 0.0); frame.nodes()]; frame.rank()] }
    }

    /// Component profiles in the orthonormal frame: the weight-zero monomial
    /// of summand `i` has reference norm `μ^{−w⁰/2} (1−μ)^{w¹/2}`.
    fn orthonormal_components(&self, frame: &ModelFrame) -> Vec<Vec<Complex64>> {
        let n = frame.nodes();
        (0..frame.rank())
            .map(|i| {
                let l = frame.bundle.summands[i];
                (0..n)
                    .map(|k| {
                        let mu = frame.geom.mu[k];
                        let norm = mu.powf(-(l.w0() as f64) / 2.0)
                            * (1.0 - mu).powf(l.w1() as f64 / 2.0);
                        self.coefficients[i][k] * norm
                    })
                    .collect()
            })
            .collect()
    }

    /// Sup of `σ dc/dμ` over the coefficient profiles: the holomorphicity
    /// defect of the section.
    pub fn dbar_residual(&self, frame: &ModelFrame) -> f64 {
        let mut sup = 0.0f64;
        for c in &self.coefficients {
            let re: Vec<f64> = c.iter().map(|z| z.re).collect();
            let im: Vec<f64> = c.iter().map(|z| z.im).collect();
            let dre = frame.geom.derivative(&re);
            let dim = frame.geom.derivative(&im);
            for k in 0..frame.nodes() {
                let d = Complex64::new(dre[k], dim[k]) * frame.geom.sigma[k];
                sup = sup.max(d.norm());
            }
        }
        sup
    }
}

/// Vortex residual report.
#[derive(Debug, Clone)]
pub struct VortexReport {
    pub residual: EndoProfile,
    pub sup_residual: f64,
    pub dbar_residual: f64,
    /// The coupling term profile alone.
    pub coupling: EndoProfile,
}

/// Residual of the second vortex equation in `i/2π` units:
/// `K_v(h)/v − (1/2π) Hess(log w) · (φ*⊗φ) − τ Id`.
pub fn vortex_residual(
    frame: &ModelFrame,
    v: &WeightFunction,
    w: &WeightFunction,
    f: &EndoProfile,
    phi: &VortexInput,
    tau: f64,
) -> Result<VortexReport> {
    let g = &frame.geom;
    let r = frame.rank();
    let wp = v.profiles(g);
    let pkg = curvature_of(frame, f);
    let kv = weighted_contraction(&pkg, &wp.v, &wp.dv);

    let comps = phi.orthonormal_components(frame);
    let mut coupling = EndoProfile::zeros(g.len(), r);
    for k in 0..g.len() {
        let mu = g.mu[k];
        let wv = w.value(mu);
        let dw = w.grad(mu);
        let d2w = w.hess(mu);
        let hess_log_w = d2w / wv - (dw / wv) * (dw / wv);
        // (φ*⊗φ)(s) = h(s, φ) φ  →  matrix φ̂ (φ̂† f̂)
        let fhat = &f.mats[k];
        let mut fphi = vec![Complex64::new(0.0, 0.0); r];
        for b in 0..r {
            for c in 0..r {
                fphi[b] += fhat[(b, c)] * comps[c][k];
            }
        }
        for a in 0..r {
            for b in 0..r {
                coupling.mats[k][(a, b)] = comps[a][k] * fphi[b].conj()
                    * Complex64::new(hess_log_w / (2.0 * std::f64::consts::PI), 0.0);
            }
        }
    }

    let mut residual = EndoProfile::zeros(g.len(), r);
    for k in 0..g.len() {
        let scale = Complex64::new(1.0 / wp.v[k], 0.0);
        residual.mats[k] = &kv.mats[k] * scale - &coupling.mats[k];
        for i in 0..r {
            residual.mats[k][(i, i)] -= Complex64::new(tau, 0.0);
        }
    }
    let sup_residual = residual.sup_frobenius();
    Ok(VortexReport {
        residual,
        sup_residual,
        dbar_residual: phi.dbar_residual(frame),
        coupling,
    })
}

/// Residual report of the explicit rank-2 extension metric on the round
/// Fano model (`ξ = 0`): the connection couples the tangent bundle to the
/// trivial line through `γ Ψ^ω`, and the contraction must equal
/// `diag(1 − γ²/2π, γ²/2π)` with vanishing off-diagonal block.
#[derive(Debug, Clone, Serialize)]
pub struct ExtensionSolitonReport {
    pub gamma: f64,
    pub diag_residual: f64,
    pub offdiag_residual: f64,
    /// `∫ tr (i/2π)(Λ F) dμ_F` over `[−1, 1]`; equals `deg TX = 2`.
    pub trace_integral: f64,
    /// `e^{μ_ξ}`-slope of the extension at `ξ = 0`; equals
    /// `(n/(n+1)) (e^{c₁(X)})(0) = 1`.
    pub slope: f64,
    pub sup_residual: f64,
}

pub fn extension_soliton_check(gamma: f64, nodes: usize) -> ExtensionSolitonReport {
    let geom = crate::grid::MomentumGeometry::new(nodes);
    let n_dim = 1.0;

    // Fano polytope [−1, 1]: μ_F = 2μ − 1, σ_F = (1 − μ_F²)/2 = 2σ,
    // d/dμ_F = (1/2) d/dμ.
    let mu_f: Vec<f64> = geom.mu.iter().map(|m| 2.0 * m - 1.0).collect();
    let sigma_f: Vec<f64> = mu_f.iter().map(|x| 0.5 * (1.0 - x * x)).collect();

    // Round data: ρ_TX ≡ 1, φ_TX = μ_F, trivial line flat.
    let rho_tx = vec![1.0; geom.len()];
    let phi_tx = mu_f.clone();
    let phi_o = vec![0.0; geom.len()];

    // Profile pieces of the extension class Ψ^ω in invariant frames:
    // |Ψ| = σ_F/2π against the coupling slot, |TX|² reference norm
    // a₁ = σ_F/2π, trivial-line norm a₂ = 1.
    let two_pi = 2.0 * std::f64::consts::PI;
    let p: Vec<f64> = sigma_f.iter().map(|s| s / two_pi).collect();
    let a1: Vec<f64> = sigma_f.iter().map(|s| s / two_pi).collect();

    // contraction density of Ψ†∧Ψ per unit γ²
    let q: Vec<f64> = (0..geom.len())
        .map(|k| (1.0 / a1[k]) * p[k] * p[k] / sigma_f[k])
        .collect();

    // diagonal blocks of (i/2π)(Λ_ω F): targets w₁, w₂
    let w1_target: Vec<f64> = geom.mu.iter().map(|_| 1.0 - gamma * gamma / two_pi).collect();
    let w2_target: Vec<f64> = geom.mu.iter().map(|_| n_dim * gamma * gamma / two_pi).collect();
    let block11: Vec<f64> = (0..geom.len()).map(|k| rho_tx[k] - gamma * gamma * q[k]).collect();
    let block22: Vec<f64> = (0..geom.len()).map(|k| n_dim * gamma * gamma * q[k]).collect();

    let mut diag_residual = 0.0f64;
    for k in 0..geom.len() {
        diag_residual = diag_residual
            .max((block11[k] - w1_target[k]).abs())
            .max((block22[k] - w2_target[k]).abs());
    }

    // off-diagonal residual: [dx/dμ_F − (φ_O − φ_TX) x / σ_F] for the
    // coupling profile x = γ σ_F / 2π
    let x: Vec<f64> = p.iter().map(|p| gamma * p).collect();
    let dx_dmu = geom.derivative(&x);
    let mut offdiag_residual = 0.0f64;
    for k in 0..geom.len() {
        let dxf = 0.5 * dx_dmu[k];
        let res = dxf + (phi_tx[k] - phi_o[k]) * x[k] / sigma_f[k];
        offdiag_residual = offdiag_residual.max(res.abs());
    }

    // trace integral over the Fano polytope: ∫_{−1}^{1} = 2 ∫_0^1
    let tr: Vec<f64> = (0..geom.len()).map(|k| block11[k] + block22[k]).collect();
    let trace_integral = 2.0 * geom.integrate(&tr);

    // slope of the extension = (c₁(TX) + c₁(O)) / 2 at ξ = 0
    let tangent = FanoLineData { w_minus: -1, w_plus: 1 };
    let trivial = FanoLineData { w_minus: 0, w_plus: 0 };
    let slope = (fano_exp_degree(tangent, 0.0) + fano_exp_degree(trivial, 0.0)) / 2.0;

    let sup_residual = diag_residual.max(offdiag_residual);
    ExtensionSolitonReport {
        gamma,
        diag_residual,
        offdiag_residual,
        trace_integral,
        slope,
        sup_residual,
    }
}
