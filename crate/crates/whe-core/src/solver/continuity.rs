//! The perturbed continuity method `L_ε(f) = 0`, `ε: 1 → 0`.
//!
//! The run reference `h₀` is the chosen initial metric normalized by an
//! iterated scalar elliptic correction so that `tr(K⁰) = 0` pointwise to
//! rounding level; the trace sector of `L_ε` then decouples and forces
//! `det f = 1` along the path. The unknown is
//! `u = log(f₀^{-1/2} f_tot f₀^{-1/2})`, a Hermitian masked profile, so the
//! perturbation term `ε log f` is linear in the unknown; the `ε = 1` start
//! is obtained by damped Newton, which the dominant `ε log f` term keeps
//! well conditioned.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::Serialize;

use crate::endo::EndoProfile;
use crate::error::{CoreError, Result};
use crate::frame::ModelFrame;
use crate::grid::MomentumGeometry;
use crate::intersect::closed_degree;
use crate::metric::{curvature_of, weighted_contraction};
use crate::weight::{WeightFunction, WeightProfiles};

use super::laplace::weighted_laplace_solve;
use super::newton::{newton_solve, DofMap, ResidualEval};
use super::SolverConfig;

/// Initial metric of a continuity run, relative to the split reference.
#[derive(Debug, Clone)]
pub enum InitialMetric {
    Reference,
    /// `e^{s(μ)} · Id` with a seeded random smooth scalar.
    RandomScalar { seed: u64, amplitude: f64 },
    /// Random Hermitian masked endomorphism exponent.
    RandomEndo { seed: u64, amplitude: f64 },
    /// Explicit exponent `u'` with `h' = h_ref e^{u'}`.
    Endo(EndoProfile),
}

/// Random smooth profile with mode-damped coefficients. High modes are
/// suppressed so the curvature of the perturbed metric - which scales like
/// amplitude times frequency squared - stays moderate, keeping the twisted
/// run reference well conditioned on practical grids.
fn random_smooth(geom: &MomentumGeometry, rng: &mut impl Rng, amplitude: f64) -> Vec<f64> {
    let mut coef = [0.0; 4];
    for c in coef.iter_mut() {
        *c = rng.gen_range(-1.0..1.0);
    }
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    geom.sample(|m| {
        amplitude
            * coef
                .iter()
                .enumerate()
                .map(|(p, c)| {
                    let q = p as f64 + 1.0;
                    c / (q * q) * (q * std::f64::consts::PI * m + phase).sin()
                })
                .sum::<f64>()
    })
}

impl InitialMetric {
    pub(crate) fn exponent(&self, frame: &ModelFrame) -> EndoProfile {
        let n = frame.nodes();
        let r = frame.rank();
        match self {
            InitialMetric::Reference => EndoProfile::zeros(n, r),
            InitialMetric::RandomScalar { seed, amplitude } => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                let s = random_smooth(&frame.geom, &mut rng, *amplitude);
                let mut e = EndoProfile::zeros(n, r);
                for (k, m) in e.mats.iter_mut().enumerate() {
                    for i in 0..r {
                        m[(i, i)] = Complex64::new(s[k], 0.0);
                    }
                }
                e
            }
            InitialMetric::RandomEndo { seed, amplitude } => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                let mut e = EndoProfile::zeros(n, r);
                for i in 0..r {
                    let s = random_smooth(&frame.geom, &mut rng, *amplitude);
                    for k in 0..n {
                        e.mats[k][(i, i)] = Complex64::new(s[k], 0.0);
                    }
                }
                for i in 0..r {
                    for j in i + 1..r {
                        if !frame.endo_mask[(i, j)] {
                            continue;
                        }
                        let re = random_smooth(&frame.geom, &mut rng, *amplitude);
                        let im = random_smooth(&frame.geom, &mut rng, *amplitude);
                        for k in 0..n {
                            // damp by the reference pairing factor so the
                            // entry is an honest invariant profile
                            let v = Complex64::new(re[k], im[k]) * frame.shat[k][(j, i)];
                            e.mats[k][(j, i)] = v;
                            e.mats[k][(i, j)] = v.conj();
                        }
                    }
                }
                e
            }
            InitialMetric::Endo(e) => e.clone(),
        }
    }
}

/// The solver state at one accepted epsilon.
#[derive(Debug, Clone)]
pub struct ContinuityState {
    pub epsilon: f64,
    /// `f = h₀⁻¹ h` as the Hermitian profile `exp(u)`.
    pub f: EndoProfile,
    /// Sup Frobenius norm of `L_ε(f)`.
    pub residual: f64,
    /// `det f` per node.
    pub det_profile: Vec<f64>,
    /// `max_μ |log f|` (Frobenius).
    pub m_eps: f64,
    /// `max_μ |K⁰|` of the run reference.
    pub k0_max: f64,
}

/// Light per-step record for the diagnostics trail.
#[derive(Debug, Clone, Serialize)]
pub struct StateRecord {
    pub epsilon: f64,
    pub residual: f64,
    pub m_eps: f64,
    pub det_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Converged,
    Destabilized,
    BudgetExhausted,
}

/// Extracted destabilizer data.
#[derive(Debug, Clone, Serialize)]
pub struct DestabilizerWitness {
    pub rank: usize,
    pub summands: Vec<usize>,
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub final_state: ContinuityState,
    /// Total metric `h` relative to the split reference.
    pub total_metric: EndoProfile,
    pub witness: Option<DestabilizerWitness>,
    pub trail: Vec<StateRecord>,
    /// Number of accepted states violating the det-one or a-priori bounds.
    pub invariant_violations: usize,
    pub c_v: f64,
    pub bundle_slope: f64,
}

/// The perturbed operator relative to the split reference:
/// `L_ε(f) = K_v(h₀ f) − c_v Id + ε log f` as a matrix profile.
pub fn perturbed_operator(
    frame: &ModelFrame,
    v: &WeightFunction,
    f: &EndoProfile,
    epsilon: f64,
) -> Result<EndoProfile> {
    let (node, eigmin) = f.min_eigenvalue();
    if eigmin <= 0.0 {
        return Err(CoreError::NonPositiveEndomorphism { node, eigmin });
    }
    let wp = v.profiles(&frame.geom);
    let c_v = closed_degree(&frame.bundle, v) / frame.rank() as f64;
    let pkg = curvature_of(frame, f);
    let k = weighted_contraction(&pkg, &wp.v, &wp.dv).shift(-c_v);
    Ok(k.add(&f.log_hermitian().scale(epsilon)))
}

/// Engine state of one continuity run.
pub struct ContinuityEngine<'a> {
    pub frame: &'a ModelFrame,
    pub wprof: WeightProfiles,
    pub c_v: f64,
    /// Run reference relative to the split reference.
    pub f0: EndoProfile,
    f0_half: EndoProfile,
    f0_half_inv: EndoProfile,
    /// Hermitian representative of `K⁰_{h₀}`.
    pub k0: EndoProfile,
    pub k0_max: f64,
    /// Exact start `u₁` with `L₁(exp u₁) = 0`.
    pub u_start: EndoProfile,
}

impl<'a> ContinuityEngine<'a> {
    /// Build the normalized run reference from an initial metric.
    pub fn new(
        frame: &'a ModelFrame,
        weight: &WeightFunction,
        initial: &InitialMetric,
    ) -> Result<Self> {
        let r = frame.rank() as f64;
        let wprof = weight.profiles(&frame.geom);
        let c_v = closed_degree(&frame.bundle, weight) / r;

        // h₀ = e^{s} h_ref e^{u'}: the scalar correction killing tr K⁰
        // pointwise is affine in s, so iterating the weak-form solve against
        // the curvature pipeline contracts to rounding level.
        let mut u0 = initial.exponent(frame);
        let mut f0 = frame.project(&u0.exp_hermitian());
        for _ in 0..4 {
            let pkg = curvature_of(frame, &f0);
            let k = weighted_contraction(&pkg, &wprof.v, &wprof.dv);
            let tr0: Vec<f64> = k.trace().iter().map(|t| t - r * c_v).collect();
            let sup = tr0.iter().fold(0.0f64, |a, t| a.max(t.abs()));
            if sup < 1e-12 {
                break;
            }
            let mut rhs: Vec<f64> = tr0
                .iter()
                .map(|t| -2.0 * std::f64::consts::PI * t / r)
                .collect();
            let mean = frame.geom.integrate(&rhs);
            for x in rhs.iter_mut() {
                *x -= mean;
            }
            let s = weighted_laplace_solve(frame, &wprof.v, &rhs)?;
            for (k, m) in u0.mats.iter_mut().enumerate() {
                for i in 0..frame.rank() {
                    m[(i, i)] += Complex64::new(s[k], 0.0);
                }
            }
            f0 = frame.project(&u0.exp_hermitian());
        }

        let f0_half = f0.spectral_map(f64::sqrt);
        let f0_half_inv = f0.spectral_map(|x| 1.0 / x.sqrt());

        // monitors of the run reference
        let pkg0 = curvature_of(frame, &f0);
        let k0_op = weighted_contraction(&pkg0, &wprof.v, &wprof.dv).shift(-c_v);
        let k0 = f0_half.mul(&k0_op).mul(&f0_half_inv).hermitian_part();
        let k0_max = k0.sup_frobenius();

        // Newton start for ε = 1: the exact solution of the linearized
        // equation (Δ_v/2π + 1) u = −K⁰ is well approximated by −K⁰ itself
        // scaled into the dominant ε-term; plain zero works as well since
        // the ε = 1 solve is globally damped.
        let u_start = k0.scale(-0.5);

        Ok(Self { frame, wprof, c_v, f0, f0_half, f0_half_inv, k0, k0_max, u_start })
    }

    /// Total metric relative to the split reference.
    pub fn total(&self, u: &EndoProfile) -> EndoProfile {
        self.frame
            .project(&self.f0_half.mul(&u.exp_hermitian()).mul(&self.f0_half))
    }

    /// The operator `L_ε` at `f = exp(u)` (relative to `h₀`): `ε log f` is
    /// the similarity transport of `u`.
    fn operator(&self, u: &EndoProfile, epsilon: f64) -> EndoProfile {
        let ftot = self.total(u);
        let pkg = curvature_of(self.frame, &ftot);
        let k = weighted_contraction(&pkg, &self.wprof.v, &self.wprof.dv).shift(-self.c_v);
        let log_f = self.f0_half_inv.mul(u).mul(&self.f0_half);
        k.add(&log_f.scale(epsilon))
    }

    /// Hermitian residual evaluation used by Newton.
    pub(crate) fn residual(&self, u: &EndoProfile, epsilon: f64) -> ResidualEval {
        let ftot = self.total(u);
        let l = self.operator(u, epsilon);
        let w = ftot.spectral_map(f64::sqrt);
        let w_inv = ftot.spectral_map(|x| 1.0 / x.sqrt());
        let conj = w.mul(&l).mul(&w_inv);
        let true_norm = conj.sup_frobenius();
        let herm = self.frame.project(&conj.hermitian_part());
        // remove the mean-trace component (locked by the Newton slice)
        let tr = herm.trace();
        let mean = self.frame.geom.integrate(&tr) / self.frame.rank() as f64;
        ResidualEval { projected: herm.shift(-mean), true_norm }
    }

    /// Monitors of an accepted state.
    pub fn state(&self, u: &EndoProfile, epsilon: f64, residual: f64) -> ContinuityState {
        let det_profile: Vec<f64> = u.trace().iter().map(|t| t.exp()).collect();
        let m_eps = u
            .frobenius()
            .into_iter()
            .fold(0.0f64, f64::max);
        ContinuityState {
            epsilon,
            f: u.exp_hermitian(),
            residual,
            det_profile,
            m_eps,
            k0_max: self.k0_max,
        }
    }
}

fn det_error(state: &ContinuityState) -> f64 {
    state
        .det_profile
        .iter()
        .map(|d| (d - 1.0).abs())
        .fold(0.0, f64::max)
}

fn violates_invariants(state: &ContinuityState) -> bool {
    let det_bad = det_error(state) > 1e-9;
    let apriori_bad = state.m_eps > state.k0_max / state.epsilon + 1e-6;
    det_bad || apriori_bad
}

/// Extract the limit projector of a blowing-up family: normalize `f` by its
/// top eigenvalue, split the log-spectrum at half the largest gap, and map
/// the small-eigenvalue subspace to summand indices by overlap.
fn extract_destabilizer(
    frame: &ModelFrame,
    u: &EndoProfile,
    v: &WeightFunction,
) -> Option<DestabilizerWitness> {
    let r = frame.rank();
    let n = frame.nodes();
    if r < 2 {
        return None;
    }
    let mut overlap = vec![0.0f64; r];
    let mut ranks = vec![0usize; r + 1];
    for k in 0..n {
        let m = &u.mats[k];
        let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        // largest gap in the sorted log-spectrum
        let mut gap_at = 0;
        let mut gap = f64::NEG_INFINITY;
        for t in 0..r - 1 {
            let g = eig.eigenvalues[order[t + 1]] - eig.eigenvalues[order[t]];
            if g > gap {
                gap = g;
                gap_at = t;
            }
        }
        let rank_k = gap_at + 1;
        ranks[rank_k] += 1;
        for &idx in order.iter().take(rank_k) {
            let col = eig.eigenvectors.column(idx);
            for i in 0..r {
                overlap[i] += frame.geom.w[k] * col[i].norm_sqr();
            }
        }
    }
    let rank = ranks
        .iter()
        .enumerate()
        .max_by_key(|(_, c)| **c)
        .map(|(i, _)| i)?;
    if rank == 0 || rank >= r {
        return None;
    }
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| overlap[b].partial_cmp(&overlap[a]).unwrap());
    let mut summands: Vec<usize> = order.into_iter().take(rank).collect();
    summands.sort_unstable();
    let v1 = v.value(1.0);
    let v0 = v.value(0.0);
    let slope = summands
        .iter()
        .map(|&i| {
            let l = frame.bundle.summands[i];
            v1 * l.w1() as f64 - v0 * l.w0() as f64
        })
        .sum::<f64>()
        / rank as f64;
    Some(DestabilizerWitness { rank, summands, slope })
}

/// Run the continuity method.
pub fn continuity_run(
    bundle: &crate::bundle::EquivariantBundle,
    weight: &WeightFunction,
    config: &SolverConfig,
    initial: &InitialMetric,
) -> Result<SolveOutcome> {
    config.validate()?;
    let frame = ModelFrame::new(bundle.clone(), MomentumGeometry::new(config.grid));
    let engine = ContinuityEngine::new(&frame, weight, initial)?;
    let dof = DofMap::new(&frame);
    let mu_e = engine.c_v;

    let mut trail: Vec<StateRecord> = Vec::new();
    let mut violations = 0usize;

    let mut eps = 1.0;
    let mut u = engine.u_start.clone();
    let mut last_accepted: Option<(f64, EndoProfile)> = None;
    let mut halvings = 0usize;
    let mut steps = 0usize;

    let finish = |status: SolveStatus,
                  state: ContinuityState,
                  u: &EndoProfile,
                  witness: Option<DestabilizerWitness>,
                  trail: Vec<StateRecord>,
                  violations: usize| SolveOutcome {
        status,
        total_metric: engine.total(u),
        final_state: state,
        witness,
        trail,
        invariant_violations: violations,
        c_v: engine.c_v,
        bundle_slope: mu_e,
    };

    loop {
        steps += 1;
        if steps > config.max_steps {
            let eval = engine.residual(&u, eps);
            let state = engine.state(&u, eps, eval.true_norm);
            return Ok(finish(SolveStatus::BudgetExhausted, state, &u, None, trail, violations));
        }

        let attempt = newton_solve(
            &frame,
            &dof,
            |uu| engine.residual(uu, eps),
            &u,
            config.newton_tol,
            config.max_newton_iters,
        );
        match attempt {
            Ok(out) => {
                halvings = 0;
                let state = engine.state(&out.u, eps, out.residual_norm);
                if violates_invariants(&state) {
                    violations += 1;
                }
                trail.push(StateRecord {
                    epsilon: eps,
                    residual: state.residual,
                    m_eps: state.m_eps,
                    det_error: det_error(&state),
                });

                // blow-up: a genuine destabilizer shows up as unbounded m_ε
                if state.m_eps > config.blowup_m_max {
                    let witness = extract_destabilizer(&frame, &out.u, weight);
                    return Ok(finish(
                        SolveStatus::Destabilized,
                        state,
                        &out.u,
                        witness,
                        trail,
                        violations,
                    ));
                }

                // attempt the unperturbed polish once the schedule is deep
                if eps <= 1e-3 || eps <= config.eps_floor {
                    if let Ok(fin) = newton_solve(
                        &frame,
                        &dof,
                        |uu| engine.residual(uu, 0.0),
                        &out.u,
                        config.converge_tol,
                        config.max_newton_iters,
                    ) {
                        let state = engine.state(&fin.u, 0.0, fin.residual_norm);
                        if violates_invariants(&state) {
                            violations += 1;
                        }
                        trail.push(StateRecord {
                            epsilon: 0.0,
                            residual: state.residual,
                            m_eps: state.m_eps,
                            det_error: det_error(&state),
                        });
                        return Ok(finish(SolveStatus::Converged, state, &fin.u, None, trail, violations));
                    }
                }
                if eps <= config.eps_floor {
                    let eval = engine.residual(&out.u, eps);
                    let state = engine.state(&out.u, eps, eval.true_norm);
                    return Ok(finish(SolveStatus::BudgetExhausted, state, &out.u, None, trail, violations));
                }

                // secant predictor along the geometric schedule
                u = match last_accepted {
                    Some((eps_p, ref up)) if eps_p > eps => {
                        out.u.add(&out.u.sub(up).scale(0.8))
                    }
                    _ => out.u.clone(),
                };
                last_accepted = Some((eps, out.u));
                eps = (eps * config.eps_ratio).max(config.eps_floor);
            }
            Err(fail) => {
                halvings += 1;
                if halvings >= 2 {
                    let state = engine.state(&fail.u, eps, fail.residual_norm);
                    if state.m_eps > 0.5 * config.blowup_m_max {
                        let witness = extract_destabilizer(&frame, &fail.u, weight);
                        return Ok(finish(
                            SolveStatus::Destabilized,
                            state,
                            &fail.u,
                            witness,
                            trail,
                            violations,
                        ));
                    }
                    return Err(CoreError::NewtonDiverged {
                        epsilon: eps,
                        residual: fail.residual_norm,
                    });
                }
                // retry at the geometric midpoint towards the last accepted ε
                let eps_acc = last_accepted.as_ref().map(|(e, _)| *e).unwrap_or(1.0);
                if let Some((_, ref up)) = last_accepted {
                    u = up.clone();
                }
                eps = (eps * eps_acc).sqrt();
            }
        }
    }
}

/// One accepted step of a weight-deformation continuation.
#[derive(Debug, Clone)]
pub struct DeformationStep {
    pub t: f64,
    pub c_v: f64,
    pub residual: f64,
    /// Total metric relative to the split reference.
    pub metric: EndoProfile,
}

/// Continue a solved metric along a weight path `t ↦ v_t`.
///
/// `u0` is the exponent of the `v_0` solution relative to the split
/// reference (`h = h_ref e^{u₀}`). Each target time is solved by Newton with
/// warm start; the step is halved on failure.
pub fn weight_deformation_run(
    bundle: &crate::bundle::EquivariantBundle,
    v_path: &dyn Fn(f64) -> Result<WeightFunction>,
    t_targets: &[f64],
    u0: &EndoProfile,
    config: &SolverConfig,
) -> Result<Vec<DeformationStep>> {
    config.validate()?;
    let frame = ModelFrame::new(bundle.clone(), MomentumGeometry::new(config.grid));
    let dof = DofMap::new(&frame);
    assert_eq!(u0.nodes(), frame.nodes(), "u0 must live on the solver grid");

    let mut out = Vec::new();
    let mut u = u0.clone();
    let mut t_done = t_targets.first().copied().unwrap_or(0.0);

    // the starting entry is the input solution, re-verified
    {
        let v = v_path(t_done)?;
        let mut step = deformation_residual(&frame, &v, &u)?;
        step.t = t_done;
        out.push(step);
    }

    for &t_goal in t_targets.iter().skip(1) {
        let mut t = t_goal;
        let mut lo = t_done;
        let mut halved = 0;
        loop {
            let v = v_path(t)?;
            let wprof = v.profiles(&frame.geom);
            let c_v = closed_degree(&frame.bundle, &v) / frame.rank() as f64;
            let attempt = newton_solve(
                &frame,
                &dof,
                |uu| stationary_residual(&frame, &wprof, c_v, uu),
                &u,
                config.converge_tol,
                config.max_newton_iters,
            );
            match attempt {
                Ok(res) => {
                    u = res.u;
                    if (t - t_goal).abs() < 1e-14 {
                        let mut step = deformation_residual(&frame, &v, &u)?;
                        step.t = t_goal;
                        out.push(step);
                        t_done = t_goal;
                        break;
                    }
                    lo = t;
                    t = t_goal;
                }
                Err(_) => {
                    halved += 1;
                    if halved > 12 {
                        return Err(CoreError::DeformationStuck { t: lo });
                    }
                    t = 0.5 * (lo + t);
                }
            }
        }
    }
    Ok(out)
}

fn stationary_residual(
    frame: &ModelFrame,
    wprof: &WeightProfiles,
    c_v: f64,
    u: &EndoProfile,
) -> ResidualEval {
    let ftot = frame.project(&u.exp_hermitian());
    let pkg = curvature_of(frame, &ftot);
    let l = weighted_contraction(&pkg, &wprof.v, &wprof.dv).shift(-c_v);
    let w = ftot.spectral_map(f64::sqrt);
    let w_inv = ftot.spectral_map(|x| 1.0 / x.sqrt());
    let conj = w.mul(&l).mul(&w_inv);
    let true_norm = conj.sup_frobenius();
    let herm = frame.project(&conj.hermitian_part());
    let tr = herm.trace();
    let mean = frame.geom.integrate(&tr) / frame.rank() as f64;
    ResidualEval { projected: herm.shift(-mean), true_norm }
}

fn deformation_residual(
    frame: &ModelFrame,
    v: &WeightFunction,
    u: &EndoProfile,
) -> Result<DeformationStep> {
    let wprof = v.profiles(&frame.geom);
    let c_v = closed_degree(&frame.bundle, v) / frame.rank() as f64;
    let eval = stationary_residual(frame, &wprof, c_v, u);
    Ok(DeformationStep {
        t: 0.0,
        c_v,
        residual: eval.true_norm,
        metric: frame.project(&u.exp_hermitian()),
    })
}
