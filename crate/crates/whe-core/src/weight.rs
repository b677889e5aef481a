//! Weight functions on the moment polytope: the named families, their
//! differential data, and the Hessian admissibility conditions.
//!
//! The model torus is one-dimensional; multi-variable weights are evaluated
//! along the embedding `μ ↦ μ·ξ₀` for a declared direction, so every family
//! reduces to a function of one variable on (a neighbourhood of) `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::grid::MomentumGeometry;

/// Supported families.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    /// `v ≡ c`.
    Constant(f64),
    /// `v(μ) = e^{ξμ}`.
    Exponential { xi: f64 },
    /// `v(μ) = (ξ₀ μ + a)^{−m}`.
    Sasaki { a: f64, m: f64, xi0: f64 },
    /// `v(μ) = ∏_α (c_α + p_α μ)^{n_α}`.
    Polynomial { factors: Vec<(f64, f64, f64)> },
    /// Tabulated data, interpolated by a not-a-knot cubic spline.
    Tabulated(CubicSpline),
}

/// A positive smooth weight function with gradient and Hessian access.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    pub family: WeightFamily,
}

impl WeightFunction {
    pub fn constant(c: f64) -> Result<Self> {
        Self::validated(WeightFamily::Constant(c))
    }

    pub fn exponential(xi: f64) -> Result<Self> {
        Self::validated(WeightFamily::Exponential { xi })
    }

    pub fn sasaki(a: f64, m: f64, xi0: f64) -> Result<Self> {
        Self::validated(WeightFamily::Sasaki { a, m, xi0 })
    }

    pub fn polynomial(factors: Vec<(f64, f64, f64)>) -> Result<Self> {
        Self::validated(WeightFamily::Polynomial { factors })
    }

    pub fn tabulated(mu: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let spline = CubicSpline::not_a_knot(mu, values)?;
        Self::validated(WeightFamily::Tabulated(spline))
    }

    /// Positivity sweep over a slightly enlarged interval, so Fourier
    /// extensions and lattice weight sums just outside `[0, 1]` stay valid.
    fn validated(family: WeightFamily) -> Result<Self> {
        let w = Self { family };
        for k in 0..=400 {
            let mu = -0.05 + 1.1 * k as f64 / 400.0;
            let v = w.value(mu);
            if !(v.is_finite() && v > 0.0) {
                return Err(CoreError::NonPositiveWeight { mu, value: v });
            }
        }
        Ok(w)
    }

    pub fn value(&self, mu: f64) -> f64 {
        match &self.family {
            WeightFamily::Constant(c) => *c,
            WeightFamily::Exponential { xi } => (xi * mu).exp(),
            WeightFamily::Sasaki { a, m, xi0 } => (xi0 * mu + a).powf(-m),
            WeightFamily::Polynomial { factors } => factors
                .iter()
                .map(|&(c, p, n)| (c + p * mu).powf(n))
                .product(),
            WeightFamily::Tabulated(s) => s.value(mu),
        }
    }

    pub fn grad(&self, mu: f64) -> f64 {
        match &self.family {
            WeightFamily::Constant(_) => 0.0,
            WeightFamily::Exponential { xi } => xi * (xi * mu).exp(),
            WeightFamily::Sasaki { a, m, xi0 } => -m * xi0 * (xi0 * mu + a).powf(-m - 1.0),
            WeightFamily::Polynomial { factors } => {
                let v = self.value(mu);
                let logd: f64 = factors.iter().map(|&(c, p, n)| n * p / (c + p * mu)).sum();
                v * logd
            }
            WeightFamily::Tabulated(s) => s.derivative(mu),
        }
    }

    pub fn hess(&self, mu: f64) -> f64 {
        match &self.family {
            WeightFamily::Constant(_) => 0.0,
            WeightFamily::Exponential { xi } => xi * xi * (xi * mu).exp(),
            WeightFamily::Sasaki { a, m, xi0 } => {
                m * (m + 1.0) * xi0 * xi0 * (xi0 * mu + a).powf(-m - 2.0)
            }
            WeightFamily::Polynomial { factors } => {
                let v = self.value(mu);
                let logd: f64 = factors.iter().map(|&(c, p, n)| n * p / (c + p * mu)).sum();
                let logdd: f64 = factors
                    .iter()
                    .map(|&(c, p, n)| -n * p * p / ((c + p * mu) * (c + p * mu)))
                    .sum();
                v * (logd * logd + logdd)
            }
            WeightFamily::Tabulated(s) => s.second_derivative(mu),
        }
    }

    pub fn family_tag(&self) -> &'static str {
        match &self.family {
            WeightFamily::Constant(_) => "constant",
            WeightFamily::Exponential { .. } => "exp",
            WeightFamily::Sasaki { .. } => "sasaki",
            WeightFamily::Polynomial { .. } => "poly",
            WeightFamily::Tabulated(_) => "table",
        }
    }

    /// Exponential parameter, when the family admits one.
    pub fn exponential_xi(&self) -> Option<f64> {
        match &self.family {
            WeightFamily::Exponential { xi } => Some(*xi),
            WeightFamily::Constant(c) if (*c - 1.0).abs() < 1e-14 => Some(0.0),
            _ => None,
        }
    }

    /// Sample value/grad/hess on a grid.
    pub fn profiles(&self, geom: &MomentumGeometry) -> WeightProfiles {
        WeightProfiles {
            v: geom.sample(|m| self.value(m)),
            dv: geom.sample(|m| self.grad(m)),
            d2v: geom.sample(|m| self.hess(m)),
        }
    }
}

/// Value, gradient, Hessian profiles on a grid.
#[derive(Debug, Clone)]
pub struct WeightProfiles {
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    pub d2v: Vec<f64>,
}

/// Verdict of the Hessian weight conditions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HessianConditionReport {
    /// `Hess(v) − ((n+1)/n) dv⊗dv / v ≤ 0` on the grid.
    pub holds: bool,
    /// Margin profile of the inequality (≤ 0 everywhere when it holds).
    pub margin: Vec<f64>,
    pub max_margin: f64,
    /// The log-concavity variant `Hess(log v) ≤ 0`.
    pub log_concave: bool,
    pub max_log_margin: f64,
}

/// Evaluate `v'' − ((n+1)/n)(v')²/v` on the grid and report both verdicts.
pub fn hessian_condition_check(
    w: &WeightFunction,
    n_dim: usize,
    geom: &MomentumGeometry,
) -> HessianConditionReport {
    let tol = 1e-11;
    let ratio = (n_dim as f64 + 1.0) / n_dim as f64;
    let mut margin = Vec::with_capacity(geom.len());
    let mut log_margin = Vec::with_capacity(geom.len());
    for &mu in &geom.mu {
        let v = w.value(mu);
        let dv = w.grad(mu);
        let d2v = w.hess(mu);
        margin.push(d2v - ratio * dv * dv / v);
        log_margin.push(d2v / v - (dv / v) * (dv / v));
    }
    let max_margin = margin.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_log_margin = log_margin.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    HessianConditionReport {
        holds: max_margin <= tol,
        margin,
        max_margin,
        log_concave: max_log_margin <= tol,
        max_log_margin,
    }
}

/// JSON form of a weight specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightSpec {
    Constant { value: f64 },
    Exp { xi: f64 },
    Sasaki {
        a: f64,
        m: f64,
        #[serde(default = "default_xi0")]
        xi0: f64,
    },
    Poly { factors: Vec<PolyFactor> },
    Table { mu: Vec<f64>, values: Vec<f64> },
}

fn default_xi0() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyFactor {
    pub c: f64,
    pub p: f64,
    pub n: f64,
}

impl WeightSpec {
    pub fn build(&self) -> Result<WeightFunction> {
        match self {
            WeightSpec::Constant { value } => WeightFunction::constant(*value),
            WeightSpec::Exp { xi } => WeightFunction::exponential(*xi),
            WeightSpec::Sasaki { a, m, xi0 } => WeightFunction::sasaki(*a, *m, *xi0),
            WeightSpec::Poly { factors } => {
                WeightFunction::polynomial(factors.iter().map(|f| (f.c, f.p, f.n)).collect())
            }
            WeightSpec::Table { mu, values } => WeightFunction::tabulated(mu.clone(), values.clone()),
        }
    }
}

/// Not-a-knot cubic spline with cubic extrapolation beyond the data range.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    // per-interval coefficients of a + b t + c t² + d t³, t = x − x_i
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl CubicSpline {
    pub fn not_a_knot(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 4 || y.len() != n {
            return Err(CoreError::InvalidWeight(
                "tabulated weight needs at least 4 samples".into(),
            ));
        }
        for i in 1..n {
            if x[i] <= x[i - 1] {
                return Err(CoreError::InvalidWeight("sample points must increase".into()));
            }
        }
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
        // Solve for second derivatives m_i with not-a-knot end conditions.
        let mut a = nalgebra::DMatrix::zeros(n, n);
        let mut rhs = nalgebra::DVector::zeros(n);
        for i in 1..n - 1 {
            a[(i, i - 1)] = h[i - 1];
            a[(i, i)] = 2.0 * (h[i - 1] + h[i]);
            a[(i, i + 1)] = h[i];
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        // not-a-knot: third derivative continuous across x₁ and x_{n−2}
        a[(0, 0)] = h[1];
        a[(0, 1)] = -(h[0] + h[1]);
        a[(0, 2)] = h[0];
        a[(n - 1, n - 3)] = h[n - 2];
        a[(n - 1, n - 2)] = -(h[n - 3] + h[n - 2]);
        a[(n - 1, n - 1)] = h[n - 3];
        let m = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| CoreError::InvalidWeight("singular spline system".into()))?;
        let mut ca = Vec::with_capacity(n - 1);
        let mut cb = Vec::with_capacity(n - 1);
        let mut cc = Vec::with_capacity(n - 1);
        let mut cd = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            ca.push(y[i]);
            cb.push((y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0);
            cc.push(m[i] / 2.0);
            cd.push((m[i + 1] - m[i]) / (6.0 * h[i]));
        }
        Ok(Self { x, a: ca, b: cb, c: cc, d: cd })
    }

    fn interval(&self, xq: f64) -> usize {
        let n = self.x.len();
        if xq <= self.x[0] {
            return 0;
        }
        if xq >= self.x[n - 1] {
            return n - 2;
        }
        match self.x.binary_search_by(|p| p.partial_cmp(&xq).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        }
    }

    pub fn value(&self, xq: f64) -> f64 {
        let i = self.interval(xq);
        let t = xq - self.x[i];
        self.a[i] + t * (self.b[i] + t * (self.c[i] + t * self.d[i]))
    }

    pub fn derivative(&self, xq: f64) -> f64 {
        let i = self.interval(xq);
        let t = xq - self.x[i];
        self.b[i] + t * (2.0 * self.c[i] + 3.0 * t * self.d[i])
    }

    pub fn second_derivative(&self, xq: f64) -> f64 {
        let i = self.interval(xq);
        let t = xq - self.x[i];
        2.0 * self.c[i] + 6.0 * t * self.d[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_derivatives(w: &WeightFunction, tol: f64) {
        // grad and hess agree with central finite differences of value; the
        // second-difference step balances truncation against roundoff.
        let h1 = 1e-5;
        let h2 = 1e-4;
        for k in 1..20 {
            let mu = k as f64 / 20.0;
            let fd1 = (w.value(mu + h1) - w.value(mu - h1)) / (2.0 * h1);
            let fd2 = (w.value(mu + h2) - 2.0 * w.value(mu) + w.value(mu - h2)) / (h2 * h2);
            let scale1 = w.grad(mu).abs().max(1.0);
            let scale2 = w.hess(mu).abs().max(1.0);
            assert!((w.grad(mu) - fd1).abs() / scale1 < tol, "grad at {mu}");
            assert!((w.hess(mu) - fd2).abs() / scale2 < tol, "hess at {mu}");
        }
    }

    #[test]
    fn families_match_finite_differences() {
        check_derivatives(&WeightFunction::constant(1.0).unwrap(), 1e-6);
        check_derivatives(&WeightFunction::exponential(1.7).unwrap(), 1e-6);
        check_derivatives(&WeightFunction::sasaki(0.5, 2.0, 1.0).unwrap(), 1e-6);
        check_derivatives(
            &WeightFunction::polynomial(vec![(1.0, 1.0, 2.0), (2.0, -0.5, 1.0)]).unwrap(),
            1e-6,
        );
    }

    #[test]
    fn make_weight_examples() {
        let one = WeightFunction::constant(1.0).unwrap();
        assert_eq!(one.value(0.3), 1.0);
        assert_eq!(one.grad(0.3), 0.0);
        assert_eq!(one.hess(0.3), 0.0);

        let e = WeightFunction::exponential(2.0).unwrap();
        assert!((e.grad(0.4) - 2.0 * e.value(0.4)).abs() < 1e-12);
        assert!((e.hess(0.4) - 4.0 * e.value(0.4)).abs() < 1e-12);

        // polynomial (c=1, p=1, n=2): v = (1+μ)², v'(1/2) = 3.
        let p = WeightFunction::polynomial(vec![(1.0, 1.0, 2.0)]).unwrap();
        assert!((p.value(0.5) - 2.25).abs() < 1e-14);
        assert!((p.grad(0.5) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn positivity_is_enforced() {
        assert!(WeightFunction::constant(0.0).is_err());
        assert!(WeightFunction::sasaki(0.01, 1.0, -1.0).is_err());
        assert!(WeightFunction::polynomial(vec![(0.2, -1.0, 1.0)]).is_err());
    }

    #[test]
    fn hessian_condition_named_cases() {
        let geom = MomentumGeometry::new(32);

        // v ≡ 1: holds with margin ≡ 0.
        let r = hessian_condition_check(&WeightFunction::constant(1.0).unwrap(), 1, &geom);
        assert!(r.holds && r.margin.iter().all(|m| m.abs() < 1e-12));

        // v = e^μ, n = 1: 1 ≤ (n+1)/n = 2.
        let r = hessian_condition_check(&WeightFunction::exponential(1.0).unwrap(), 1, &geom);
        assert!(r.holds);
        assert!(r.log_concave);

        // Sasaki with m = n: exact equality margin.
        let r = hessian_condition_check(&WeightFunction::sasaki(0.5, 1.0, 1.0).unwrap(), 1, &geom);
        assert!(r.holds);
        assert!(r.margin.iter().all(|m| m.abs() < 1e-12), "max {:.3e}", r.max_margin);

        let r = hessian_condition_check(&WeightFunction::sasaki(0.25, 2.0, 1.0).unwrap(), 2, &geom);
        assert!(r.holds);
        assert!(r.margin.iter().all(|m| m.abs() < 1e-11));
    }

    #[test]
    fn spline_reproduces_cubic_exactly() {
        let xs: Vec<f64> = (0..9).map(|k| k as f64 / 8.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 + x + 0.5 * x * x - 0.25 * x * x * x).collect();
        let s = CubicSpline::not_a_knot(xs, ys).unwrap();
        for k in 0..=40 {
            let x = k as f64 / 40.0;
            let exact = 1.0 + x + 0.5 * x * x - 0.25 * x * x * x;
            assert!((s.value(x) - exact).abs() < 1e-12);
        }
        // cubic extrapolation stays exact for a cubic
        assert!((s.value(1.1) - (1.0 + 1.1 + 0.5 * 1.21 - 0.25 * 1.331)).abs() < 1e-10);
    }

    #[test]
    fn tabulated_weight_round_trip() {
        let xs: Vec<f64> = (0..17).map(|k| k as f64 / 16.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (0.8 * x).exp()).collect();
        let w = WeightFunction::tabulated(xs, ys).unwrap();
        for k in 0..=32 {
            let mu = k as f64 / 32.0;
            assert!((w.value(mu) - (0.8 * mu).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn weight_spec_json() {
        let w: WeightSpec = serde_json::from_str(r#"{"family":"exp","xi":0.5}"#).unwrap();
        let w = w.build().unwrap();
        assert!((w.value(1.0) - 0.5f64.exp()).abs() < 1e-14);

        let w: WeightSpec =
            serde_json::from_str(r#"{"family":"poly","factors":[{"c":1.0,"p":1.0,"n":2.0}]}"#)
                .unwrap();
        assert!((w.build().unwrap().value(1.0) - 4.0).abs() < 1e-14);

        let w: WeightSpec = serde_json::from_str(r#"{"family":"sasaki","a":0.5,"m":1.0}"#).unwrap();
        assert!((w.build().unwrap().value(0.5) - 1.0).abs() < 1e-14);
    }
}
