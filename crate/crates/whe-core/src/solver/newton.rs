//! Damped Newton iteration on Hermitian masked endomorphism profiles.
//!
//! The unknown is packed into real degrees of freedom (diagonal entries and
//! one complex scalar per masked off-diagonal pair, per node). The Jacobian
//! is assembled column-by-column by forward differences of the full discrete
//! residual; a bordered row locks the quadrature mean of the trace, which
//! both removes the constant-scaling kernel at `ε = 0` and keeps
//! `det f = 1` from drifting at small `ε`. Tikhonov escalation covers the
//! gauge directions of non-simple polystable bundles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::endo::EndoProfile;
use crate::frame::ModelFrame;

/// Packing of Hermitian masked profiles into real vectors.
pub(crate) struct DofMap {
    pub nodes: usize,
    pub rank: usize,
    /// Off-diagonal pairs `(i, j)` with `i < j` inside the endomorphism mask.
    pub pairs: Vec<(usize, usize)>,
}

impl DofMap {
    pub fn new(frame: &ModelFrame) -> Self {
        let r = frame.rank();
        let mut pairs = Vec::new();
        for i in 0..r {
            for j in i + 1..r {
                if frame.endo_mask[(i, j)] {
                    pairs.push((i, j));
                }
            }
        }
        Self { nodes: frame.nodes(), rank: r, pairs }
    }

    pub fn stride(&self) -> usize {
        self.rank + 2 * self.pairs.len()
    }

    pub fn len(&self) -> usize {
        self.nodes * self.stride()
    }

    pub fn pack(&self, e: &EndoProfile) -> DVector<f64> {
        let mut x = DVector::zeros(self.len());
        let s = self.stride();
        for k in 0..self.nodes {
            let m = &e.mats[k];
            for i in 0..self.rank {
                x[k * s + i] = m[(i, i)].re;
            }
            for (p, &(i, j)) in self.pairs.iter().enumerate() {
                x[k * s + self.rank + 2 * p] = m[(i, j)].re;
                x[k * s + self.rank + 2 * p + 1] = m[(i, j)].im;
            }
        }
        x
    }

    pub fn unpack(&self, x: &DVector<f64>) -> EndoProfile {
        let mut e = EndoProfile::zeros(self.nodes, self.rank);
        let s = self.stride();
        for k in 0..self.nodes {
            let m = &mut e.mats[k];
            for i in 0..self.rank {
                m[(i, i)] = Complex64::new(x[k * s + i], 0.0);
            }
            for (p, &(i, j)) in self.pairs.iter().enumerate() {
                let v = Complex64::new(x[k * s + self.rank + 2 * p], x[k * s + self.rank + 2 * p + 1]);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        e
    }

    /// Gradient of `∫ tr u dμ` in dof coordinates.
    pub fn trace_gradient(&self, frame: &ModelFrame) -> DVector<f64> {
        let mut a = DVector::zeros(self.len());
        let s = self.stride();
        for k in 0..self.nodes {
            for i in 0..self.rank {
                a[k * s + i] = frame.geom.w[k];
            }
        }
        a
    }
}

/// One residual evaluation.
pub(crate) struct ResidualEval {
    /// Hermitian masked representative, mean-trace component removed.
    pub projected: EndoProfile,
    /// Sup Frobenius norm of the unprojected residual.
    pub true_norm: f64,
}

pub(crate) struct NewtonOutcome {
    pub u: EndoProfile,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Solve `R(u) = 0` on the mean-trace-zero slice.
pub(crate) fn newton_solve<F>(
    frame: &ModelFrame,
    dof: &DofMap,
    mut residual: F,
    u0: &EndoProfile,
    tol: f64,
    max_iters: usize,
) -> Result<NewtonOutcome, NewtonOutcome>
where
    F: FnMut(&EndoProfile) -> ResidualEval,
{
    let a = dof.trace_gradient(frame);
    let mut x = dof.pack(u0);
    let mut u = dof.unpack(&x);
    let mut eval = residual(&u);
    let mut jac: Option<DMatrix<f64>> = None;
    let mut jac_fresh = false;

    for it in 0..max_iters {
        if eval.true_norm < tol {
            return Ok(NewtonOutcome { u, residual_norm: eval.true_norm, iterations: it });
        }
        if jac.is_none() {
            jac = Some(fd_jacobian(dof, &mut residual, &x, &eval));
            jac_fresh = true;
        }
        let r_vec = dof.pack(&eval.projected);
        let g = a.dot(&x);

        let mut accepted: Option<ResidualEval> = None;
        'attempt: for attempt in 0..3 {
            let j = jac.as_ref().unwrap();
            // Tikhonov escalation handles the gauge directions of
            // non-simple polystable bundles.
            let tik = match attempt {
                0 => 0.0,
                1 => 1e-10 * j.diagonal().amax().max(1.0),
                _ => 1e-6 * j.diagonal().amax().max(1.0),
            };
            if let Some(delta) = bordered_solve(j, &a, &r_vec, g, tik) {
                for step in [1.0, 0.5, 0.25, 0.125, 0.0625] {
                    let x_try = &x + &delta * step;
                    let u_try = dof.unpack(&x_try);
                    let eval_try = residual(&u_try);
                    let ok = eval_try.true_norm < eval.true_norm * (1.0 - 0.2 * step)
                        || eval_try.true_norm < tol;
                    if ok {
                        x = x_try;
                        u = u_try;
                        accepted = Some(eval_try);
                        break 'attempt;
                    }
                }
            }
        }
        match accepted {
            Some(eval_new) => {
                // drop a chord Jacobian that no longer contracts well
                if eval_new.true_norm > 0.25 * eval.true_norm {
                    jac = None;
                }
                jac_fresh = false;
                eval = eval_new;
            }
            None if !jac_fresh => {
                // the chord Jacobian went stale; rebuild and retry this
                // iterate
                jac = None;
            }
            None => {
                return Err(NewtonOutcome { u, residual_norm: eval.true_norm, iterations: it });
            }
        }
    }
    if eval.true_norm < tol {
        Ok(NewtonOutcome { u, residual_norm: eval.true_norm, iterations: max_iters })
    } else {
        Err(NewtonOutcome { u, residual_norm: eval.true_norm, iterations: max_iters })
    }
}

fn fd_jacobian<F>(
    dof: &DofMap,
    residual: &mut F,
    x: &DVector<f64>,
    base: &ResidualEval,
) -> DMatrix<f64>
where
    F: FnMut(&EndoProfile) -> ResidualEval,
{
    let m = dof.len();
    let r0 = dof.pack(&base.projected);
    let mut jac = DMatrix::zeros(m, m);
    for col in 0..m {
        let h = 1e-7 * (1.0 + x[col].abs());
        let mut xp = x.clone();
        xp[col] += h;
        let up = dof.unpack(&xp);
        let rp = dof.pack(&residual(&up).projected);
        for row in 0..m {
            jac[(row, col)] = (rp[row] - r0[row]) / h;
        }
    }
    jac
}

/// Solve the bordered system
/// `[J + tik·I, a; aᵀ, 0] [δ; λ] = [−r; −g]`.
fn bordered_solve(
    jac: &DMatrix<f64>,
    a: &DVector<f64>,
    r: &DVector<f64>,
    g: f64,
    tik: f64,
) -> Option<DVector<f64>> {
    let m = jac.nrows();
    let mut sys = DMatrix::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            sys[(i, j)] = jac[(i, j)];
        }
        sys[(i, i)] += tik;
        sys[(i, m)] = a[i];
        sys[(m, i)] = a[i];
    }
    let mut rhs = DVector::zeros(m + 1);
    for i in 0..m {
        rhs[i] = -r[i];
    }
    rhs[m] = -g;
    let sol = sys.lu().solve(&rhs)?;
    if !sol.iter().all(|v| v.is_finite()) {
        return None;
    }
    Some(sol.rows(0, m).into_owned())
}
