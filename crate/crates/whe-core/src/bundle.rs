//! Equivariant bundles on the model sphere: ordered direct sums of
//! equivariant line bundles with a coupling table of invariant homomorphisms.
//!
//! A line bundle is `(degree d, lift weights (w⁰, w¹))` where the lift
//! weights are the values of the `i/2π`-normalized bundle moment map at the
//! fixed points `μ = 0` and `μ = 1`; compatibility forces `w¹ − w⁰ = d`.
//! An invariant homomorphism `L_i → L_j` is a monomial of index `k` with
//! `k + w_j⁰ − w_i⁰ = 0` and `0 ≤ k ≤ d_j − d_i`; its reference pointwise
//! norm squared is `|s|²(μ) = μ^k (1−μ)^{d_j−d_i−k}`.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// An equivariant line bundle on the model sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivariantLineBundle {
    pub degree: i64,
    /// Moment-map values at the fixed points μ = 0 and μ = 1.
    pub weights: [i64; 2],
}

impl EquivariantLineBundle {
    pub fn new(degree: i64, w0: i64, w1: i64) -> Result<Self> {
        if w1 - w0 != degree {
            return Err(CoreError::InvalidBundle(format!(
                "lift weights ({w0}, {w1}) incompatible with degree {degree}: w1 - w0 must equal the degree"
            )));
        }
        Ok(Self { degree, weights: [w0, w1] })
    }

    pub fn w0(&self) -> i64 {
        self.weights[0]
    }

    pub fn w1(&self) -> i64 {
        self.weights[1]
    }
}

/// An admissible invariant homomorphism `L_from → L_to`, recorded as its
/// monomial index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coupling {
    pub from: usize,
    pub to: usize,
    pub k: i64,
}

/// An ordered direct sum of equivariant line bundles together with its
/// coupling table.
#[derive(Debug, Clone)]
pub struct EquivariantBundle {
    pub summands: Vec<EquivariantLineBundle>,
    pub couplings: Vec<Coupling>,
}

impl EquivariantBundle {
    /// Build a bundle, enumerating all admissible couplings.
    pub fn new(summands: Vec<EquivariantLineBundle>) -> Result<Self> {
        if summands.is_empty() {
            return Err(CoreError::InvalidBundle("rank must be at least 1".into()));
        }
        let couplings = enumerate_couplings(&summands);
        Ok(Self { summands, couplings })
    }

    /// Build a bundle with an explicit coupling list; each entry is validated.
    pub fn with_couplings(
        summands: Vec<EquivariantLineBundle>,
        couplings: Vec<Coupling>,
    ) -> Result<Self> {
        if summands.is_empty() {
            return Err(CoreError::InvalidBundle("rank must be at least 1".into()));
        }
        for c in &couplings {
            if c.from >= summands.len() || c.to >= summands.len() {
                return Err(CoreError::InvalidBundle(format!(
                    "coupling ({}, {}, {}) references a missing summand",
                    c.from, c.to, c.k
                )));
            }
            if !coupling_admissible(&summands, c) {
                return Err(CoreError::InvalidBundle(format!(
                    "coupling ({}, {}, {}) violates circle invariance",
                    c.from, c.to, c.k
                )));
            }
        }
        Ok(Self { summands, couplings })
    }

    /// Convenience: a single line bundle.
    pub fn line(degree: i64, w0: i64, w1: i64) -> Result<Self> {
        Self::new(vec![EquivariantLineBundle::new(degree, w0, w1)?])
    }

    pub fn rank(&self) -> usize {
        self.summands.len()
    }

    pub fn degree(&self) -> i64 {
        self.summands.iter().map(|l| l.degree).sum()
    }

    /// Restriction to a subset of summands (with its induced couplings).
    pub fn sub_bundle(&self, indices: &[usize]) -> Result<Self> {
        let summands: Vec<_> = indices.iter().map(|&i| self.summands[i]).collect();
        EquivariantBundle::new(summands)
    }

    /// True when off-diagonal couplings exist.
    pub fn has_couplings(&self) -> bool {
        !self.couplings.is_empty()
    }
}

/// Admissibility of `(from, to, k)`: circle invariance requires
/// `k + w_to⁰ − w_from⁰ = 0`, and the monomial must exist:
/// `0 ≤ k ≤ d_to − d_from`.
pub fn coupling_admissible(summands: &[EquivariantLineBundle], c: &Coupling) -> bool {
    if c.from == c.to {
        return false;
    }
    let li = summands[c.from];
    let lj = summands[c.to];
    c.k + lj.w0() - li.w0() == 0 && c.k >= 0 && c.k <= lj.degree - li.degree
}

/// All admissible couplings between distinct summands.
pub fn enumerate_couplings(summands: &[EquivariantLineBundle]) -> Vec<Coupling> {
    let mut out = Vec::new();
    for from in 0..summands.len() {
        for to in 0..summands.len() {
            if from == to {
                continue;
            }
            let k = summands[from].w0() - summands[to].w0();
            let c = Coupling { from, to, k };
            if coupling_admissible(summands, &c) {
                out.push(c);
            }
        }
    }
    out
}

/// JSON form of a bundle specification.
///
/// `{"summands":[{"degree":1,"weights":[0,1]}],"couplings":"auto"}` or an
/// explicit list `[[from,to,k], ...]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleSpec {
    pub summands: Vec<SummandSpec>,
    #[serde(default)]
    pub couplings: CouplingSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummandSpec {
    pub degree: i64,
    pub weights: [i64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CouplingSpec {
    Auto(String),
    Explicit(Vec<[i64; 3]>),
}

impl Default for CouplingSpec {
    fn default() -> Self {
        CouplingSpec::Auto("auto".into())
    }
}

impl BundleSpec {
    pub fn build(&self) -> Result<EquivariantBundle> {
        let summands = self
            .summands
            .iter()
            .map(|s| EquivariantLineBundle::new(s.degree, s.weights[0], s.weights[1]))
            .collect::<Result<Vec<_>>>()?;
        match &self.couplings {
            CouplingSpec::Auto(tag) => {
                if tag != "auto" {
                    return Err(CoreError::InvalidBundle(format!(
                        "unknown coupling mode {tag:?}; expected \"auto\" or an explicit list"
                    )));
                }
                EquivariantBundle::new(summands)
            }
            CouplingSpec::Explicit(list) => {
                let couplings = list
                    .iter()
                    .map(|&[f, t, k]| Coupling { from: f as usize, to: t as usize, k })
                    .collect();
                EquivariantBundle::with_couplings(summands, couplings)
            }
        }
    }
}
