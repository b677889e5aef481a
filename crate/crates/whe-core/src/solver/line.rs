//! Line bundles admit a weighted Hermite–Einstein metric for every weight:
//! the moment profile solves the first-order linear equation
//! `v φ*' + v' φ* = c_v` with the equivariant endpoint value, giving
//! `φ*(μ) = (c_v μ + w⁰ v(0)) / v(μ)`.

use crate::endo::EndoProfile;
use crate::error::Result;
use crate::frame::ModelFrame;
use crate::intersect::closed_degree;
use crate::metric::scalar_exp_metric;
use crate::weight::WeightFunction;

/// Solution of the line-bundle equation.
#[derive(Debug, Clone)]
pub struct LineSolution {
    /// Closed-form moment profile `φ*` at the nodes.
    pub phi_star: Vec<f64>,
    /// The Einstein constant `c_v = v(1) w¹ − v(0) w⁰`.
    pub c_v: f64,
    /// Conformal potential `u` with `h = e^u h₀`, normalized to mean zero.
    pub potential: Vec<f64>,
    /// Relative endomorphism of the solved metric.
    pub f: EndoProfile,
    /// Sup-norm residual of the equation `v φ' + v' φ = c_v` for the
    /// numerically reconstructed metric.
    pub residual: f64,
}

/// Solve the weighted Hermite–Einstein equation on a line bundle.
///
/// The potential is recovered from `σ u' = φ⁰ − φ*` (the conformal change of
/// the moment profile), whose right side vanishes at both endpoints since the
/// fixed-point values of the moment map are metric independent.
pub fn line_bundle_whe(frame: &ModelFrame, v: &WeightFunction) -> Result<LineSolution> {
    assert_eq!(frame.rank(), 1, "line bundle solver needs rank 1");
    let geom = &frame.geom;
    let l = frame.bundle.summands[0];
    let c_v = closed_degree(&frame.bundle, v);
    let w0 = l.w0() as f64;

    let phi_star: Vec<f64> = geom
        .mu
        .iter()
        .map(|&m| (c_v * m + w0 * v.value(0.0)) / v.value(m))
        .collect();

    // σ u' = φ⁰ − φ*; the quotient is smooth because the numerator vanishes
    // at μ = 0 and μ = 1.
    let du: Vec<f64> = (0..geom.len())
        .map(|k| (frame.phi0[0][k] - phi_star[k]) / geom.sigma[k])
        .collect();
    let mut u = geom.antiderivative(&du);
    let mean = geom.integrate(&u);
    for x in u.iter_mut() {
        *x -= mean;
    }

    let f = scalar_exp_metric(frame, &u);
    let pkg = crate::metric::curvature_of(frame, &f);
    let wp = v.profiles(geom);
    let kv = crate::metric::weighted_contraction(&pkg, &wp.v, &wp.dv);
    let residual = (0..geom.len())
        .map(|k| (kv.mats[k][(0, 0)].re - c_v).abs())
        .fold(0.0, f64::max);

    Ok(LineSolution { phi_star, c_v, potential: u, f, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::EquivariantBundle;
    use crate::grid::MomentumGeometry;
    use crate::metric::curvature_of;

    fn frame(d: i64, w0: i64, w1: i64, n: usize) -> ModelFrame {
        ModelFrame::new(EquivariantBundle::line(d, w0, w1).unwrap(), MomentumGeometry::new(n))
    }

    #[test]
    fn constant_weight_recovers_reference() {
        // O(1),(0,1), v ≡ 1 → φ* = μ.
        let fr = frame(1, 0, 1, 48);
        let v = WeightFunction::constant(1.0).unwrap();
        let sol = line_bundle_whe(&fr, &v).unwrap();
        for (k, &m) in fr.geom.mu.iter().enumerate() {
            assert!((sol.phi_star[k] - m).abs() < 1e-13);
        }
        assert!(sol.residual < 1e-9);
    }

    #[test]
    fn exponential_weight_closed_form() {
        // O(1),(0,1), v = e^μ → φ* = e μ e^{−μ}, c_v = e.
        let fr = frame(1, 0, 1, 48);
        let v = WeightFunction::exponential(1.0).unwrap();
        let sol = line_bundle_whe(&fr, &v).unwrap();
        let e = 1.0f64.exp();
        assert!((sol.c_v - e).abs() < 1e-13);
        for (k, &m) in fr.geom.mu.iter().enumerate() {
            assert!((sol.phi_star[k] - e * m * (-m).exp()).abs() < 1e-12);
        }
        assert!(sol.residual < 1e-8, "residual {:.3e}", sol.residual);

        // the reconstructed metric's moment profile matches φ*
        let pkg = curvature_of(&fr, &sol.f);
        for k in 0..fr.nodes() {
            assert!((pkg.moment_map.mats[k][(0, 0)].re - sol.phi_star[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn flat_bundle_with_lift() {
        // O(0),(1,1), v = e^μ → φ* = ((e−1)μ + 1) e^{−μ}, c_v = e − 1.
        let fr = frame(0, 1, 1, 48);
        let v = WeightFunction::exponential(1.0).unwrap();
        let sol = line_bundle_whe(&fr, &v).unwrap();
        let e = 1.0f64.exp();
        assert!((sol.c_v - (e - 1.0)).abs() < 1e-13);
        for (k, &m) in fr.geom.mu.iter().enumerate() {
            let expect = ((e - 1.0) * m + 1.0) * (-m).exp();
            assert!((sol.phi_star[k] - expect).abs() < 1e-12);
        }
        assert!(sol.residual < 1e-8);
    }

    #[test]
    fn grid_convergence_order_at_least_two() {
        // sup-error of the reconstructed equation residual on refining grids.
        let v = WeightFunction::exponential(1.0).unwrap();
        let err = |n: usize| {
            let fr = frame(1, 0, 1, n);
            line_bundle_whe(&fr, &v).unwrap().residual.max(1e-300)
        };
        let (e1, e2) = (err(6), err(10));
        let order = (e1 / e2).ln() / (10.0f64 / 6.0).ln();
        assert!(order >= 2.0, "order {order} (errors {e1:.3e} -> {e2:.3e})");
    }
}
