//! Weighted-Dirac spectral approximation via the Lanczos process, Gaussian
//! kernel smoothing, and the smoothed-moment bias identity.
//!
//! m Lanczos steps from a normalized random start vector tridiagonalize the
//! operator into T; the eigenvalues of T (Ritz values) weighted by the
//! squared first components of T's eigenvectors form a Dirac mixture whose
//! first m moments match the start-vector moment estimates vᵀX^k v. Runs
//! use full reorthogonalization and average over the probe ensemble by
//! pooling atoms. Smoothing a Dirac mixture with a bandwidth-σ kernel
//! biases its even moments upward; [`smoothed_moment_bias`] verifies the
//! closed-form bias term against quadrature.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpectralOperator;
use crate::grid;
use crate::moments::{probe_vector, ProbeConfig};

/// Weighted Dirac approximation of a spectral density on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracSpectrum {
    /// Ritz values, ascending.
    pub ritz_values: Vec<f64>,
    /// Non-negative weights summing to one.
    pub weights: Vec<f64>,
    /// Steps requested per probe.
    pub requested_steps: usize,
    /// Probes that terminated early on a zero β.
    pub breakdowns: usize,
}

impl DiracSpectrum {
    /// Assemble from unsorted atoms; weights must be non-negative and are
    /// expected to sum to ~1.
    pub fn from_atoms(
        mut atoms: Vec<(f64, f64)>,
        requested_steps: usize,
        breakdowns: usize,
    ) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        DiracSpectrum {
            ritz_values: atoms.iter().map(|a| a.0).collect(),
            weights: atoms.iter().map(|a| a.1).collect(),
            requested_steps,
            breakdowns,
        }
    }

    /// Raw moment Σ_i w_i λ_i^k.
    pub fn raw_moment(&self, k: usize) -> f64 {
        self.ritz_values
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * l.powi(k as i32))
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

const BREAKDOWN_TOL: f64 = 1e-12;

/// One Lanczos run with full reorthogonalization; returns (diag, offdiag,
/// broke-down-early).
fn lanczos_tridiag(
    op: &impl SpectralOperator,
    start: &[f64],
    steps: usize,
) -> (Vec<f64>, Vec<f64>, bool) {
    let n = op.dim();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut v = start.to_vec();
    let s = norm(&v);
    for x in v.iter_mut() {
        *x /= s;
    }
    basis.push(v);

    let mut alphas = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps.saturating_sub(1));
    let mut w = vec![0.0f64; n];
    let mut broke = false;

    for step in 0..steps {
        let v_cur = &basis[step];
        op.apply(v_cur, &mut w);
        let a = dot(v_cur, &w);
        alphas.push(a);
        for (wi, vi) in w.iter_mut().zip(v_cur) {
            *wi -= a * vi;
        }
        if step > 0 {
            let b_prev = betas[step - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[step - 1]) {
                *wi -= b_prev * vi;
            }
        }
        // Full reorthogonalization, applied twice.
        for _ in 0..2 {
            for u in &basis {
                let c = dot(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        if step + 1 == steps {
            break;
        }
        let b = norm(&w);
        if b <= BREAKDOWN_TOL {
            broke = true;
            break;
        }
        betas.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    (alphas, betas, broke)
}

/// Dirac atoms of one tridiagonal matrix: Ritz values with squared first
/// eigenvector components as weights.
fn ritz_atoms(alphas: &[f64], betas: &[f64]) -> Vec<(f64, f64)> {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for (i, &a) in alphas.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in betas.iter().enumerate() {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let eig = t.symmetric_eigen();
    (0..k)
        .map(|j| {
            let first = eig.eigenvectors[(0, j)];
            // Clamp roundoff excursions outside the spectral domain.
            (eig.eigenvalues[j].clamp(0.0, 1.0), first * first)
        })
        .collect()
}

/// Weighted-Dirac spectrum of `op` from `m` Lanczos steps per probe.
///
/// Atoms from the probe ensemble are pooled with weights divided by the
/// probe count. A breakdown (β ≈ 0, invariant Krylov subspace) terminates
/// that probe early with fewer atoms and is counted, not fatal.
pub fn lanczos_spectrum(
    op: &impl SpectralOperator,
    m: usize,
    probe: &ProbeConfig,
) -> Result<DiracSpectrum> {
    let n = op.dim();
    if m < 1 {
        return Err(Error::arg("need at least one Lanczos step"));
    }
    if m > n {
        return Err(Error::arg(format!("m = {m} steps exceed dimension n = {n}")));
    }
    if probe.d < 1 {
        return Err(Error::arg("need at least one probe vector"));
    }
    let mut atoms = Vec::with_capacity(m * probe.d);
    let mut breakdowns = 0;
    let share = 1.0 / probe.d as f64;
    for j in 0..probe.d {
        let start = probe_vector(probe, n, j);
        let (alphas, betas, broke) = lanczos_tridiag(op, &start, m);
        if broke {
            breakdowns += 1;
        }
        for (value, weight) in ritz_atoms(&alphas, &betas) {
            atoms.push((value, weight * share));
        }
    }
    Ok(DiracSpectrum::from_atoms(atoms, m, breakdowns))
}

/// A Dirac spectrum convolved with a Gaussian kernel on the grid,
/// renormalized over [0, 1] to absorb edge truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedDensity {
    pub base: DiracSpectrum,
    pub kernel: String,
    pub sigma: f64,
    pub grid_step: f64,
    /// Mass of the raw mixture inside [0, 1] before renormalization.
    pub renormalization: f64,
    /// Renormalized density on the inclusive grid.
    pub values: Vec<f64>,
}

pub(crate) fn gaussian_mixture_on_grid(
    ds: &DiracSpectrum,
    sigma: f64,
    step: f64,
) -> Result<Vec<f64>> {
    let points = grid::grid_points(step)?;
    let n = points.len();
    let h = 1.0 / (n - 1) as f64;
    let mut values = vec![0.0f64; n];
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let window = (12.0 * sigma / h).ceil() as usize + 1;
    for (&center, &w) in ds.ritz_values.iter().zip(&ds.weights) {
        let mid = (center / h).round() as usize;
        let lo = mid.saturating_sub(window);
        let hi = (mid + window).min(n - 1);
        for i in lo..=hi {
            let z = (points[i] - center) / sigma;
            values[i] += w * norm * (-0.5 * z * z).exp();
        }
    }
    Ok(values)
}

/// Convolve with a Gaussian of bandwidth `sigma` and renormalize on [0, 1].
pub fn kernel_smooth(ds: &DiracSpectrum, sigma: f64, grid_step: f64) -> Result<SmoothedDensity> {
    if !(sigma > 0.0) {
        return Err(Error::arg("kernel bandwidth must be positive"));
    }
    let mut values = gaussian_mixture_on_grid(ds, sigma, grid_step)?;
    let mass = grid::trapezoid(&values, grid_step);
    if mass > 0.0 {
        for v in values.iter_mut() {
            *v /= mass;
        }
    }
    Ok(SmoothedDensity {
        base: ds.clone(),
        kernel: "gaussian".to_string(),
        sigma,
        grid_step,
        renormalization: mass,
        values,
    })
}

impl SmoothedDensity {
    /// Density value by linear interpolation on the stored grid.
    pub fn evaluate(&self, lambda: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::arg(format!("λ = {lambda} outside [0, 1]")));
        }
        let n = self.values.len() - 1;
        let pos = lambda * n as f64;
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        Ok(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }
}

/// Raw, smoothed, and closed-form bias of one moment order under Gaussian
/// smoothing of a Dirac spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentBias {
    pub raw_moment: f64,
    pub smoothed_moment: f64,
    pub analytic_bias: f64,
}

/// Verify the kernel-smoothing moment bias at one order.
///
/// `raw_moment` is Σ w_i λ_i^k; `smoothed_moment` is the k-th moment of the
/// untruncated analytic Gaussian mixture, by per-atom quadrature;
/// `analytic_bias` is the binomial expansion Σ_j C(k, 2j) E[ζ^{2j}]
/// Σ_i w_i λ_i^{k−2j} with Gaussian central moments E[ζ^{2j}] =
/// σ^{2j} (2j−1)!!. The identity smoothed = raw + bias is exact; odd kernel
/// moments vanish, so order 1 has zero bias and order 2 has bias exactly
/// σ²·Σw.
pub fn smoothed_moment_bias(ds: &DiracSpectrum, sigma: f64, order: usize) -> Result<MomentBias> {
    if order < 1 {
        return Err(Error::arg("moment order must be at least 1"));
    }
    if !(sigma > 0.0) {
        return Err(Error::arg("kernel bandwidth must be positive"));
    }
    let raw_moment = ds.raw_moment(order);

    // Factored form: per surviving kernel order, binomial × kernel central
    // moment × raw moment of the complementary order. Keeping the raw
    // moment factored out makes the order-2 term exactly σ²·Σw.
    let mut analytic_bias = 0.0;
    let mut binom = 1.0f64; // C(order, 2j) at j = 0
    let mut kernel_moment = 1.0f64; // σ^{2j} (2j−1)!! at j = 0
    let mut j = 0usize;
    while 2 * (j + 1) <= order {
        let two_j = 2 * j;
        binom *=
            ((order - two_j) * (order - two_j - 1)) as f64 / ((two_j + 1) * (two_j + 2)) as f64;
        kernel_moment *= sigma * sigma * (2 * j + 1) as f64;
        j += 1;
        analytic_bias += binom * kernel_moment * ds.raw_moment(order - 2 * j);
    }

    // Quadrature moment of the untruncated smoothed density, atom by atom.
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let half_width = 20.0 * sigma;
    let steps = 640usize;
    let h = 2.0 * half_width / steps as f64;
    let smoothed_moment: f64 = ds
        .ritz_values
        .iter()
        .zip(&ds.weights)
        .map(|(&center, &w)| {
            let mut acc = 0.0;
            for i in 0..=steps {
                let x = center - half_width + i as f64 * h;
                let z = (x - center) / sigma;
                let wq = if i == 0 || i == steps { 0.5 } else { 1.0 };
                acc += wq * x.powi(order as i32) * norm * (-0.5 * z * z).exp();
            }
            w * acc * h
        })
        .sum();

    Ok(MomentBias {
        raw_moment,
        smoothed_moment,
        analytic_bias,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{normalized_laplacian, SparseGraph};
    use crate::moments::exact_spectrum;

    fn disjoint_cliques(count: usize, size: usize) -> SparseGraph {
        let mut edges = Vec::new();
        for c in 0..count {
            let base = c * size;
            for a in 0..size {
                for b in (a + 1)..size {
                    edges.push((base + a, base + b));
                }
            }
        }
        SparseGraph::from_unweighted_edges(count * size, edges).unwrap()
    }

    #[test]
    fn full_order_on_k2_is_exact() {
        let g = SparseGraph::from_unweighted_edges(2, [(0, 1)]).unwrap();
        let op = normalized_laplacian(&g);
        let ds = lanczos_spectrum(&op, 2, &ProbeConfig::gaussian(1, 3)).unwrap();
        assert_eq!(ds.ritz_values.len(), 2);
        assert!(ds.ritz_values[0].abs() < 1e-12);
        assert!((ds.ritz_values[1] - 1.0).abs() < 1e-12);
        assert!((ds.total_weight() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn full_order_recovers_oracle_spectrum() {
        let g = disjoint_cliques(3, 4);
        let op = normalized_laplacian(&g);
        let oracle = exact_spectrum(&op).unwrap();
        let ds = lanczos_spectrum(&op, 12, &ProbeConfig::gaussian(1, 5)).unwrap();
        for ritz in &ds.ritz_values {
            let nearest = oracle
                .iter()
                .map(|l| (l - ritz).abs())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-8, "ritz {ritz} not near any eigenvalue");
        }
        assert!((ds.total_weight() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_probe_moments_match_start_vector() {
        let g = crate::graph::erdos_renyi(40, 0.2, 11).unwrap();
        let op = normalized_laplacian(&g);
        let m = 12;
        let cfg = ProbeConfig::gaussian(1, 21);
        let ds = lanczos_spectrum(&op, m, &cfg).unwrap();

        let mut v = probe_vector(&cfg, 40, 0);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        let mut cur = v.clone();
        let mut next = vec![0.0; 40];
        for k in 1..=m {
            op.apply(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
            let want: f64 = v.iter().zip(&cur).map(|(a, b)| a * b).sum();
            let got = ds.raw_moment(k);
            assert!((got - want).abs() < 1e-8, "k = {k}: {got} vs {want}");
        }
    }

    #[test]
    fn breakdown_terminates_early() {
        // On a regular graph the constant vector is an exact eigenvector,
        // so β₁ = 0 and the run stops after one step.
        let n = 8;
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = SparseGraph::from_unweighted_edges(n, edges).unwrap();
        let op = normalized_laplacian(&g);

        let start = vec![1.0; n];
        let (alphas, betas, broke) = lanczos_tridiag(&op, &start, 4);
        assert!(broke);
        assert_eq!(alphas.len(), 1);
        assert!(betas.is_empty());
        let ds = DiracSpectrum::from_atoms(ritz_atoms(&alphas, &betas), 4, 1);
        assert_eq!(ds.ritz_values.len(), 1);
        assert!(ds.ritz_values[0].abs() < 1e-12);
        assert_eq!(ds.breakdowns, 1);
    }

    #[test]
    fn smoothing_is_symmetric_and_normalized() {
        let ds = DiracSpectrum::from_atoms(vec![(0.5, 1.0)], 1, 0);
        let sm = kernel_smooth(&ds, 1e-3, 1e-4).unwrap();
        let n = sm.values.len();
        let peak_idx = (0..n)
            .max_by(|&a, &b| sm.values[a].total_cmp(&sm.values[b]))
            .unwrap();
        assert_eq!(peak_idx, n / 2);
        for off in 1..200 {
            let lo = sm.values[n / 2 - off];
            let hi = sm.values[n / 2 + off];
            assert!((lo - hi).abs() < 1e-9 * lo.max(1.0), "{lo} vs {hi}");
        }
        let mass = grid::trapezoid(&sm.values, 1e-4);
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_atoms_split_mass_evenly() {
        let ds = DiracSpectrum::from_atoms(vec![(0.2, 0.5), (0.8, 0.5)], 2, 0);
        let sm = kernel_smooth(&ds, 1e-3, 1e-4).unwrap();
        let half = sm.values.len() / 2;
        let left = grid::trapezoid(&sm.values[..=half], 1e-4);
        assert!((left - 0.5).abs() < 1e-6, "{left}");
    }

    #[test]
    fn bias_order1_zero_and_order2_exact_sigma_squared() {
        let ds = DiracSpectrum::from_atoms(vec![(0.25, 0.5), (0.75, 0.5)], 2, 0);
        let sigma = 1e-2;
        let b1 = smoothed_moment_bias(&ds, sigma, 1).unwrap();
        assert_eq!(b1.analytic_bias, 0.0);
        assert!((b1.smoothed_moment - b1.raw_moment).abs() < 1e-12);

        let b2 = smoothed_moment_bias(&ds, sigma, 2).unwrap();
        // Weights sum to exactly 1, so the surviving term is exactly σ².
        assert_eq!(b2.analytic_bias, sigma * sigma);
    }

    #[test]
    fn bias_order4_single_atom_closed_form() {
        let lambda = 0.6;
        let sigma = 5e-3;
        let ds = DiracSpectrum::from_atoms(vec![(lambda, 1.0)], 1, 0);
        let b = smoothed_moment_bias(&ds, sigma, 4).unwrap();
        let expected = 6.0 * sigma * sigma * lambda * lambda + 3.0 * sigma.powi(4);
        assert!(
            (b.analytic_bias - expected).abs() < 1e-15,
            "{}",
            b.analytic_bias
        );
        assert!(
            (b.smoothed_moment - b.raw_moment - expected).abs() < 1e-12,
            "quadrature disagrees: {}",
            b.smoothed_moment - b.raw_moment
        );
    }

    #[test]
    fn bias_positive_and_growing_with_order() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        // Atoms spread over the whole of [0, 1]: concentration near the
        // origin would make the bias decay instead (it is σ^k (k−1)!! for
        // an atom at zero).
        for _ in 0..10 {
            let k = 30;
            let mut atoms: Vec<(f64, f64)> = (0..k)
                .map(|i| {
                    let stratified = (i as f64 + rng.random::<f64>()) / k as f64;
                    (stratified, rng.random::<f64>() + 0.1)
                })
                .collect();
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            for a in atoms.iter_mut() {
                a.1 /= total;
            }
            let ds = DiracSpectrum::from_atoms(atoms, k, 0);
            for sigma in [0.01, 0.05, 0.1] {
                let mut prev = 0.0;
                for order in (2..=10).step_by(2) {
                    let b = smoothed_moment_bias(&ds, sigma, order).unwrap();
                    assert!(b.analytic_bias > 0.0);
                    assert!(
                        b.smoothed_moment > b.raw_moment,
                        "even-order smoothing must inflate the moment"
                    );
                    assert!(b.analytic_bias >= prev - 1e-15, "bias shrank at {order}");
                    prev = b.analytic_bias;
                }
            }
        }
    }
}
