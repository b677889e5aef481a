//! The model geometry: the sphere with unit-area invariant Kähler form,
//! reduced to the momentum interval `[0, 1]`.
//!
//! All profile computation lives on a Gauss–Legendre grid mapped to `[0, 1]`.
//! The pushforward of the volume form is Lebesgue measure `dμ`, so quadrature
//! against the grid weights is integration over the model. The structural
//! density `σ(μ) = μ(1−μ)` converts between the momentum coordinate and the
//! cylinder coordinate `t = log(μ/(1−μ))` via `dμ/dt = σ`.

use nalgebra::DMatrix;

/// Gauss–Legendre collocation data on `[0, 1]`.
///
/// Nodes are strictly interior, so the degenerate endpoint factor `σ` never
/// vanishes at a sample point and no boundary condition is imposed;
/// boundedness at the endpoints is natural for the operators built here.
#[derive(Debug, Clone)]
pub struct MomentumGeometry {
    /// Quadrature nodes in `(0, 1)`, increasing.
    pub mu: Vec<f64>,
    /// Quadrature weights, summing to 1.
    pub w: Vec<f64>,
    /// Structural density `σ(μ) = μ(1−μ)` at the nodes.
    pub sigma: Vec<f64>,
    /// Barycentric differentiation matrix `d/dμ` on the node set.
    pub diff: DMatrix<f64>,
    /// Antidifferentiation matrix: values ↦ values of `∫_0^μ`.
    pub anti: DMatrix<f64>,
}

/// Legendre polynomial value and derivative at `x ∈ [−1, 1]`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration.
pub fn gauss_legendre_raw(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "need at least two quadrature nodes");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Barycentric weights for arbitrary distinct nodes, computed in log space
/// so large `n` does not underflow. Only ratios enter the differentiation
/// matrix, so the overall normalisation is irrelevant.
fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut logs = vec![0.0f64; n];
    let mut signs = vec![1.0f64; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                let d = x[j] - x[k];
                logs[j] += d.abs().ln();
                if d < 0.0 {
                    signs[j] = -signs[j];
                }
            }
        }
    }
    let m = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    (0..n).map(|j| signs[j] * (m - logs[j]).exp()).collect()
}

/// Shifted Legendre values `P̃_p(μ) = P_p(2μ−1)` for `p = 0..n`.
fn shifted_legendre_row(n: usize, mu: f64) -> Vec<f64> {
    let x = 2.0 * mu - 1.0;
    let mut row = vec![0.0; n];
    if n > 0 {
        row[0] = 1.0;
    }
    if n > 1 {
        row[1] = x;
    }
    for p in 2..n {
        let pf = p as f64;
        row[p] = ((2.0 * pf - 1.0) * x * row[p - 1] - (pf - 1.0) * row[p - 2]) / pf;
    }
    row
}

impl MomentumGeometry {
    /// Build the collocation data for `n` Gauss–Legendre nodes on `[0, 1]`.
    pub fn new(n: usize) -> Self {
        let (xs, ws) = gauss_legendre_raw(n);
        let mu: Vec<f64> = xs.iter().map(|x| 0.5 * (x + 1.0)).collect();
        let w: Vec<f64> = ws.iter().map(|w| 0.5 * w).collect();
        let sigma: Vec<f64> = mu.iter().map(|m| m * (1.0 - m)).collect();

        let lam = barycentric_weights(&mu);
        let mut diff = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                if i != j {
                    let d = lam[j] / lam[i] / (mu[i] - mu[j]);
                    diff[(i, j)] = d;
                    s += d;
                }
            }
            diff[(i, i)] = -s;
        }

        // Modal antiderivative: synthesize shifted-Legendre coefficients by
        // quadrature, integrate them term by term, evaluate back at the nodes,
        // and subtract the value at μ = 0.
        let mut vander = DMatrix::zeros(n, n); // vander[(k, p)] = P̃_p(μ_k)
        for k in 0..n {
            let row = shifted_legendre_row(n, mu[k]);
            for p in 0..n {
                vander[(k, p)] = row[p];
            }
        }
        // analysis[(p, k)] = (2p+1) w_k P̃_p(μ_k)
        let mut analysis = DMatrix::zeros(n, n);
        for p in 0..n {
            for k in 0..n {
                analysis[(p, k)] = (2.0 * p as f64 + 1.0) * w[k] * vander[(k, p)];
            }
        }
        // Integration in coefficient space:
        //   ∫ P̃_0 = (P̃_1 + P̃_0)/2,   ∫ P̃_p = (P̃_{p+1} − P̃_{p−1}) / (2(2p+1)).
        // The top coefficient's P̃_n term is dropped (one order of accuracy at
        // the spectral tail, irrelevant for smooth profiles).
        let mut integ = DMatrix::zeros(n, n);
        integ[(0, 0)] = 0.5;
        if n > 1 {
            integ[(1, 0)] = 0.5;
        }
        for p in 1..n {
            let c = 1.0 / (2.0 * (2.0 * p as f64 + 1.0));
            if p + 1 < n {
                integ[(p + 1, p)] = c;
            }
            integ[(p - 1, p)] -= c;
        }
        let at_zero = {
            // P̃_p(0) = P_p(−1) = (−1)^p
            let mut row = DMatrix::zeros(1, n);
            for p in 0..n {
                row[(0, p)] = if p % 2 == 0 { 1.0 } else { -1.0 };
            }
            row
        };
        let modal = &vander * &integ * &analysis;
        let offset = &at_zero * &integ * &analysis;
        let mut anti = modal;
        for i in 0..n {
            for j in 0..n {
                anti[(i, j)] -= offset[(0, j)];
            }
        }

        Self { mu, w, sigma, diff, anti }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// Quadrature of a profile over `[0, 1]`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.w.iter().zip(f).map(|(w, f)| w * f).sum()
    }

    /// Spectral derivative `df/dμ` of a profile.
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        self.apply(&self.diff, f)
    }

    /// Antiderivative `∫_0^μ f` of a profile.
    pub fn antiderivative(&self, f: &[f64]) -> Vec<f64> {
        self.apply(&self.anti, f)
    }

    fn apply(&self, m: &DMatrix<f64>, f: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(f.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += m[(i, j)] * f[j];
            }
            out[i] = s;
        }
        out
    }

    /// Weighted quadrature inner product `⟨f, g⟩ = ∫ f g dμ`.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.w.iter().zip(f.iter().zip(g)).map(|(w, (f, g))| w * f * g).sum()
    }

    /// Sample a scalar function at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.mu.iter().map(|&m| f(m)).collect()
    }
}
