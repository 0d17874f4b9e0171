//! Spectral moment estimation.
//!
//! Moments of the spectral density of a [`SpectralOperator`] are estimated
//! stochastically: n·E[φ_k(λ)] ≈ (1/d) Σ_j v_jᵀ φ_k(X) v_j over d random
//! probe vectors, with all orders 0..m accumulated from a single pass of
//! iterated matvecs per probe. Exact counterparts via dense
//! eigendecomposition are provided as oracles for small n, together with
//! the analytic moments of the semi-circle law.

mod convert;

pub use convert::convert_basis;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::SpectralOperator;

/// Polynomial family the moments are taken against, on the domain [0, 1].
///
/// `Power` means φ_k(λ) = λ^k; `Chebyshev` means φ_k(λ) = T_k(2λ − 1),
/// the Chebyshev polynomials affinely mapped to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Power,
    Chebyshev,
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Basis::Power => write!(f, "power"),
            Basis::Chebyshev => write!(f, "chebyshev"),
        }
    }
}

/// Basis-tagged spectral moments μ₀..μ_m. μ₀ is always exactly 1.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MomentVector {
    pub basis: Basis,
    /// Matrix dimension the moments refer to.
    pub n: usize,
    /// Probe count used by the estimator; 0 marks exact or analytic values.
    pub d: usize,
    /// Highest order.
    pub m: usize,
    /// μ₀..μ_m.
    pub values: Vec<f64>,
}

impl MomentVector {
    pub fn new(basis: Basis, n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::arg("moment vector needs at least µ0"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::arg("moment values must be finite"));
        }
        Ok(MomentVector {
            basis,
            n,
            d,
            m: values.len() - 1,
            values,
        })
    }

    /// Truncate to a lower order, keeping provenance fields.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m > self.m {
            return Err(Error::arg(format!(
                "cannot truncate order-{} moments to m = {m}",
                self.m
            )));
        }
        MomentVector::new(self.basis, self.n, self.d, self.values[..=m].to_vec())
    }
}

/// Probe distribution for stochastic trace estimation. Both have zero mean
/// and unit covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeDistribution {
    Gaussian,
    Rademacher,
}

/// Configuration of the probe ensemble.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProbeConfig {
    /// Number of probe vectors.
    pub d: usize,
    pub distribution: ProbeDistribution,
    pub seed: u64,
}

impl ProbeConfig {
    pub fn gaussian(d: usize, seed: u64) -> Self {
        ProbeConfig {
            d,
            distribution: ProbeDistribution::Gaussian,
            seed,
        }
    }
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig::gaussian(100, 0)
    }
}

/// The `index`-th probe vector of the ensemble, reproducible in isolation.
/// Probes are independent ChaCha streams of the configured seed.
pub fn probe_vector(cfg: &ProbeConfig, n: usize, index: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    match cfg.distribution {
        ProbeDistribution::Gaussian => (0..n).map(|_| StandardNormal.sample(&mut rng)).collect(),
        ProbeDistribution::Rademacher => (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect(),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Estimate moments of all orders 0..=m of the spectral density of `op`.
///
/// Each probe performs m matvecs; power moments accumulate vᵀX^k v, the
/// Chebyshev path runs the three-term recurrence T_{k+1} = 2X̂T_k − T_{k−1}
/// on the affinely mapped operator X̂ = 2X − I. Every probe's quadratic
/// form is normalized by vᵀv, which makes the estimator exactly unbiased
/// for (1/n) tr φ_k(X) (v/‖v‖ is uniform on the sphere) and pins an
/// identity-spectrum operator at μ_k = 1. Cost O(d·m·nnz). μ₀ is forced
/// to exactly 1.
pub fn estimate_moments(
    op: &impl SpectralOperator,
    m: usize,
    cfg: &ProbeConfig,
    basis: Basis,
) -> Result<MomentVector> {
    if m < 1 {
        return Err(Error::arg("moment order must be at least 1"));
    }
    if cfg.d < 1 {
        return Err(Error::arg("need at least one probe vector"));
    }
    let n = op.dim();
    let mut sums = vec![0.0f64; m + 1];
    let mut cur = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut prev = vec![0.0; n];

    for j in 0..cfg.d {
        let v = probe_vector(cfg, n, j);
        let inv_vv = 1.0 / dot(&v, &v);
        match basis {
            Basis::Power => {
                cur.copy_from_slice(&v);
                sums[0] += 1.0;
                for s in sums.iter_mut().skip(1) {
                    op.apply(&cur, &mut next);
                    std::mem::swap(&mut cur, &mut next);
                    *s += dot(&v, &cur) * inv_vv;
                }
            }
            Basis::Chebyshev => {
                // X̂ y computed as 2(X y) − y.
                prev.copy_from_slice(&v);
                sums[0] += 1.0;
                if m >= 1 {
                    op.apply(&v, &mut cur);
                    for (c, &vi) in cur.iter_mut().zip(&v) {
                        *c = 2.0 * *c - vi;
                    }
                    sums[1] += dot(&v, &cur) * inv_vv;
                }
                for s in sums.iter_mut().skip(2) {
                    op.apply(&cur, &mut next);
                    for ((nx, &c), p) in next.iter_mut().zip(&cur).zip(&prev) {
                        *nx = 2.0 * (2.0 * *nx - c) - *p;
                    }
                    std::mem::swap(&mut prev, &mut cur);
                    std::mem::swap(&mut cur, &mut next);
                    *s += dot(&v, &cur) * inv_vv;
                }
            }
        }
    }

    let scale = 1.0 / cfg.d as f64;
    let mut values: Vec<f64> = sums.iter().map(|s| s * scale).collect();
    values[0] = 1.0;
    MomentVector::new(basis, n, cfg.d, values)
}

/// Size guard for dense oracle computations.
pub const DENSE_LIMIT: usize = 2000;

/// Full spectrum of `op` by dense symmetric eigendecomposition, ascending.
///
/// Refuses dimensions above [`DENSE_LIMIT`]; this is the oracle behind
/// [`exact_moments`] and the test suites, not a production path.
pub fn exact_spectrum(op: &impl SpectralOperator) -> Result<Vec<f64>> {
    let n = op.dim();
    if n > DENSE_LIMIT {
        return Err(Error::TooLargeForDense {
            n,
            limit: DENSE_LIMIT,
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let dense = DMatrix::from_row_slice(n, n, &op.materialize());
    let mut eigs: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| a.total_cmp(b));
    Ok(eigs)
}

/// Moments of a discrete spectrum: (1/n) Σ_i φ_k(λ_i) for k = 0..=m.
pub fn moments_of_spectrum(eigenvalues: &[f64], m: usize, basis: Basis) -> Vec<f64> {
    let n = eigenvalues.len() as f64;
    let mut values = vec![0.0f64; m + 1];
    for &lambda in eigenvalues {
        match basis {
            Basis::Power => {
                let mut p = 1.0;
                values[0] += 1.0;
                for v in values.iter_mut().skip(1) {
                    p *= lambda;
                    *v += p;
                }
            }
            Basis::Chebyshev => {
                let u = 2.0 * lambda - 1.0;
                let (mut prev, mut cur) = (1.0, u);
                values[0] += 1.0;
                if m >= 1 {
                    values[1] += cur;
                }
                for v in values.iter_mut().skip(2) {
                    let next = 2.0 * u * cur - prev;
                    prev = cur;
                    cur = next;
                    *v += cur;
                }
            }
        }
    }
    for v in values.iter_mut() {
        *v /= n;
    }
    values
}

/// Exact power moments μ_k = (1/n) Σ_i λ_i^k via dense eigendecomposition.
pub fn exact_moments(op: &impl SpectralOperator, m: usize) -> Result<MomentVector> {
    if m < 1 {
        return Err(Error::arg("moment order must be at least 1"));
    }
    let eigs = exact_spectrum(op)?;
    let mut values = moments_of_spectrum(&eigs, m, Basis::Power);
    values[0] = 1.0;
    MomentVector::new(Basis::Power, eigs.len(), 0, values)
}

/// Analytic power moments of the semi-circle law supported on
/// [x₀ − R, x₀ + R] ⊆ [0, 1].
///
/// Central even moments are (R/2)^{2k} C_k with C_k the Catalan numbers;
/// the shift to x₀ is a binomial expansion.
pub fn semicircle_moments(center: f64, radius: f64, m: usize) -> Result<MomentVector> {
    if !(radius > 0.0) {
        return Err(Error::arg("semi-circle radius must be positive"));
    }
    if center - radius < -1e-12 || center + radius > 1.0 + 1e-12 {
        return Err(Error::arg(format!(
            "support [{}, {}] not contained in [0, 1]",
            center - radius,
            center + radius
        )));
    }
    // central[k] = E[(x - x0)^k]; odd entries stay 0.
    let mut central = vec![0.0f64; m + 1];
    central[0] = 1.0;
    let q = (radius / 2.0) * (radius / 2.0);
    let mut even = 1.0; // (R/2)^{2k} C_k at k = 0
    let mut k = 0usize;
    while 2 * (k + 1) <= m {
        even *= q * 2.0 * (2.0 * k as f64 + 1.0) / (k as f64 + 2.0);
        central[2 * (k + 1)] = even;
        k += 1;
    }
    let mut values = vec![0.0f64; m + 1];
    for (j, out) in values.iter_mut().enumerate() {
        // Σ_i C(j, i) x0^{j-i} central[i], even i only.
        let mut acc = 0.0;
        let mut binom = 1.0f64; // C(j, 0)
        let mut i = 0usize;
        loop {
            acc += binom * center.powi((j - i) as i32) * central[i];
            if i + 2 > j {
                break;
            }
            binom *= ((j - i) as f64) * ((j - i - 1) as f64)
                / ((i + 1) as f64 * (i + 2) as f64);
            i += 2;
        }
        *out = acc;
    }
    values[0] = 1.0;
    MomentVector::new(Basis::Power, 0, 0, values)
}
