//! Scalar solves of the degenerate weighted Laplacian.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::frame::ModelFrame;
use crate::metric::{weighted_laplacian, weighted_laplacian_weak};

/// Solve `Δ_v f = g` with `∫ f dμ = 0`.
///
/// The weak-form matrix is symmetric positive semidefinite with kernel the
/// constants; the mean-zero constraint is enforced by a bordered system.
/// Solvability requires `∫ g dμ = 0`.
pub fn weighted_laplace_solve(frame: &ModelFrame, v: &[f64], g: &[f64]) -> Result<Vec<f64>> {
    let geom = &frame.geom;
    let n = geom.len();
    let mean = geom.integrate(g);
    let scale = g.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    if mean.abs() > 1e-8 * scale {
        return Err(CoreError::NotSolvable { mean });
    }

    let s = weighted_laplacian_weak(frame, v);
    let mut a = DMatrix::zeros(n + 1, n + 1);
    let mut rhs = DVector::zeros(n + 1);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = s[(i, j)];
        }
        a[(i, n)] = geom.w[i];
        a[(n, i)] = geom.w[i];
        rhs[i] = geom.w[i] * g[i];
    }
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or(CoreError::NotSolvable { mean })?;
    Ok((0..n).map(|i| sol[i]).collect())
}

/// Residual of a candidate solution against the strong form.
pub fn laplace_residual(frame: &ModelFrame, v: &[f64], f: &[f64], g: &[f64]) -> f64 {
    let lf = weighted_laplacian(frame, v, f);
    let diff: Vec<f64> = lf.iter().zip(g).map(|(a, b)| a - b).collect();
    frame.geom.inner(&diff, &diff).sqrt()
}
