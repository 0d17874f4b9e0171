//! Maximum-entropy spectral densities.
//!
//! Given moments μ₀..μ_m of a density on [0, 1], the maximum-entropy fit is
//! p(λ) = exp[−(1 + Σ_i α_i φ_i(λ))] with φ_i the basis polynomials
//! (powers or shifted Chebyshev). The multipliers α minimize the convex
//! dual S(α) = ∫₀¹ p_α dλ + Σ_i α_i μ_i, whose gradient is the moment
//! mismatch g_j = μ_j − ∫ p_α φ_j and whose Hessian H_jk = ∫ p_α φ_j φ_k
//! is a Gram matrix, hence positive semidefinite. The solver runs damped
//! Newton steps with conjugate-gradient inner solves and a backtracking
//! line search, so the dual objective is non-increasing across accepted
//! steps. Normalization is an explicit constraint: i runs from 0 with
//! μ₀ = 1.
//!
//! Converged fits admit closed forms for the differential entropy,
//! S(p) = 1 + Σ α_i μ_i, and for KL divergences between two fits,
//! D(p‖q) = −Σ (α_i − β_i) μ_i^p.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, DEFAULT_GRID_STEP};
use crate::moments::{Basis, MomentVector};

/// Exponents are clamped to this magnitude before exponentiation so early
/// iterates cannot overflow; a clamp is recorded in the fit report.
pub const EXPONENT_CLAMP: f64 = 700.0;

/// Solver knobs for [`fit_maxent`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Per-component gradient bound: converged iff |g_j| < ε for all j.
    pub tolerance: f64,
    /// Diagonal noise η added to the symmetrized Hessian.
    pub hessian_noise: f64,
    pub max_outer_iterations: usize,
    /// Quadrature spacing of the uniform grid on [0, 1].
    pub grid_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-6,
            hessian_noise: 1e-8,
            max_outer_iterations: 500,
            grid_step: DEFAULT_GRID_STEP,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::arg("tolerance must be positive"));
        }
        if !(self.hessian_noise >= 0.0) {
            return Err(Error::arg("hessian noise must be non-negative"));
        }
        grid::intervals_for_step(self.grid_step)?;
        Ok(())
    }
}

/// Outcome metadata of a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub converged: bool,
    pub iterations: usize,
    /// Sup norm of the final moment-mismatch gradient.
    pub final_grad_norm: f64,
    /// True if any exponent hit [`EXPONENT_CLAMP`] during the fit.
    pub clamped: bool,
}

/// A fitted maximum-entropy density on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntDensity {
    pub basis: Basis,
    pub m: usize,
    /// Multipliers α₀..α_m of the exponent 1 + Σ α_i φ_i(λ).
    pub alpha: Vec<f64>,
    pub grid_step: f64,
    pub fit_report: FitReport,
}

/// Evaluate φ_0..φ_max at `x` into `buf`.
fn basis_values(basis: Basis, x: f64, buf: &mut [f64]) {
    match basis {
        Basis::Power => {
            let mut p = 1.0;
            for b in buf.iter_mut() {
                *b = p;
                p *= x;
            }
        }
        Basis::Chebyshev => {
            let u = 2.0 * x - 1.0;
            let len = buf.len();
            buf[0] = 1.0;
            if len > 1 {
                buf[1] = u;
            }
            for k in 2..len {
                buf[k] = 2.0 * u * buf[k - 1] - buf[k - 2];
            }
        }
    }
}

/// Evaluate φ, φ' and φ'' at `x` (three buffers of equal length).
fn basis_values_d2(basis: Basis, x: f64, f: &mut [f64], df: &mut [f64], ddf: &mut [f64]) {
    let len = f.len();
    match basis {
        Basis::Power => {
            f[0] = 1.0;
            df[0] = 0.0;
            ddf[0] = 0.0;
            if len > 1 {
                f[1] = x;
                df[1] = 1.0;
                ddf[1] = 0.0;
            }
            for j in 2..len {
                f[j] = f[j - 1] * x;
                df[j] = j as f64 * f[j - 1];
                ddf[j] = (j * (j - 1)) as f64 * f[j - 2];
            }
        }
        Basis::Chebyshev => {
            // Differentiate the recurrence T_{k+1} = 2u T_k − T_{k−1} twice
            // in u, then chain-rule through u = 2x − 1.
            let u = 2.0 * x - 1.0;
            f[0] = 1.0;
            df[0] = 0.0;
            ddf[0] = 0.0;
            if len > 1 {
                f[1] = u;
                df[1] = 1.0;
                ddf[1] = 0.0;
            }
            for k in 2..len {
                f[k] = 2.0 * u * f[k - 1] - f[k - 2];
                df[k] = 2.0 * f[k - 1] + 2.0 * u * df[k - 1] - df[k - 2];
                ddf[k] = 4.0 * df[k - 1] + 2.0 * u * ddf[k - 1] - ddf[k - 2];
            }
            for j in 0..len {
                df[j] *= 2.0;
                ddf[j] *= 4.0;
            }
        }
    }
}

/// p(x) for exponent coefficients `alpha`; `phis` holds φ_0..φ_m at x.
fn density_from_features(alpha: &[f64], phis: &[f64], clamped: &mut bool) -> f64 {
    let mut e = 1.0;
    for (a, phi) in alpha.iter().zip(phis) {
        e += a * phi;
    }
    let neg = -e;
    if neg.abs() > EXPONENT_CLAMP {
        *clamped = true;
        neg.clamp(-EXPONENT_CLAMP, EXPONENT_CLAMP).exp()
    } else {
        neg.exp()
    }
}

/// One quadrature pass: feature integrals c_q = ∫ p_α φ_q for q = 0..=qmax.
fn feature_sweep(
    basis: Basis,
    alpha: &[f64],
    points: &[f64],
    step: f64,
    qmax: usize,
    clamped: &mut bool,
) -> Vec<f64> {
    let m = alpha.len() - 1;
    debug_assert!(qmax >= m);
    let mut c = vec![0.0f64; qmax + 1];
    let mut phis = vec![0.0f64; qmax + 1];
    let last = points.len() - 1;
    for (i, &x) in points.iter().enumerate() {
        basis_values(basis, x, &mut phis);
        let p = density_from_features(alpha, &phis[..=m], clamped);
        let w = if i == 0 || i == last { 0.5 * step } else { step };
        let wp = w * p;
        for (cq, phi) in c.iter_mut().zip(&phis) {
            *cq += wp * phi;
        }
    }
    c
}

/// ∫ p_α alone, for line-search trials.
fn normalization_sweep(
    basis: Basis,
    alpha: &[f64],
    points: &[f64],
    step: f64,
    clamped: &mut bool,
) -> f64 {
    let mut phis = vec![0.0f64; alpha.len()];
    let last = points.len() - 1;
    let mut acc = 0.0;
    for (i, &x) in points.iter().enumerate() {
        basis_values(basis, x, &mut phis);
        let p = density_from_features(alpha, &phis, clamped);
        let w = if i == 0 || i == last { 0.5 * step } else { step };
        acc += w * p;
    }
    acc
}

fn assemble_hessian(basis: Basis, c: &[f64], m: usize, eta: f64) -> Vec<f64> {
    let dim = m + 1;
    let mut h = vec![0.0f64; dim * dim];
    for j in 0..dim {
        for k in 0..dim {
            h[j * dim + k] = match basis {
                Basis::Power => c[j + k],
                // T_j T_k = (T_{j+k} + T_{|j−k|}) / 2
                Basis::Chebyshev => 0.5 * (c[j + k] + c[j.abs_diff(k)]),
            };
        }
    }
    for j in 0..dim {
        h[j * dim + j] += eta;
    }
    h
}

/// Conjugate gradients for the SPD system H x = b.
fn cg_solve(h: &[f64], b: &[f64]) -> Vec<f64> {
    let dim = b.len();
    let matvec = |x: &[f64], y: &mut [f64]| {
        for i in 0..dim {
            y[i] = h[i * dim..(i + 1) * dim]
                .iter()
                .zip(x)
                .map(|(a, v)| a * v)
                .sum();
        }
    };

    let mut x = vec![0.0f64; dim];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0f64; dim];
    let b_norm2 = dot(b, b);
    if b_norm2 == 0.0 {
        return x;
    }
    let mut rs = b_norm2;
    let tol2 = b_norm2 * 1e-28;
    for _ in 0..(12 * dim) {
        matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rs / pap;
        for i in 0..dim {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_next = dot(&r, &r);
        if rs_next <= tol2 {
            break;
        }
        let beta = rs_next / rs;
        for i in 0..dim {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_next;
    }
    x
}

/// Per-iteration trace of accepted Newton steps, for invariant tests.
#[derive(Debug, Clone, Default)]
pub struct FitTrace {
    /// Dual objective after each accepted step (index 0 is the start).
    pub objectives: Vec<f64>,
    /// Row-major symmetrized Hessians (with noise) at each accepted step.
    pub hessians: Vec<Vec<f64>>,
}

/// Fit the maximum-entropy density matching `mv` (see module docs).
///
/// Non-convergence within the iteration budget is not an error: the last
/// iterate is returned with `fit_report.converged == false` and the caller
/// decides.
pub fn fit_maxent(mv: &MomentVector, cfg: &SolverConfig) -> Result<MaxEntDensity> {
    fit_impl(mv, cfg, None)
}

/// [`fit_maxent`] with a step-by-step trace attached.
pub fn fit_maxent_traced(
    mv: &MomentVector,
    cfg: &SolverConfig,
) -> Result<(MaxEntDensity, FitTrace)> {
    let mut trace = FitTrace::default();
    let density = fit_impl(mv, cfg, Some(&mut trace))?;
    Ok((density, trace))
}

fn fit_impl(
    mv: &MomentVector,
    cfg: &SolverConfig,
    mut trace: Option<&mut FitTrace>,
) -> Result<MaxEntDensity> {
    cfg.validate()?;
    if mv.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("moment values must be finite"));
    }
    if (mv.values[0] - 1.0).abs() > 1e-9 {
        return Err(Error::arg(format!("µ0 must be 1, got {}", mv.values[0])));
    }

    let m = mv.m;
    let mu = &mv.values;
    let points = grid::grid_points(cfg.grid_step)?;
    let step = 1.0 / (points.len() - 1) as f64;
    let qmax = 2 * m;

    let mut alpha = vec![0.0f64; m + 1];
    let mut clamped = false;
    let mut c = feature_sweep(mv.basis, &alpha, &points, step, qmax, &mut clamped);
    let mut objective = c[0] + dot(&alpha, mu);
    if let Some(t) = trace.as_deref_mut() {
        t.objectives.push(objective);
    }

    let mut converged = false;
    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;

    for iter in 1..=cfg.max_outer_iterations {
        let g: Vec<f64> = (0..=m).map(|j| mu[j] - c[j]).collect();
        grad_norm = g.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if grad_norm < cfg.tolerance {
            converged = true;
            break;
        }
        iterations = iter;

        let h = assemble_hessian(mv.basis, &c, m, cfg.hessian_noise);
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut delta = cg_solve(&h, &neg_g);
        let mut slope = dot(&g, &delta);
        if !(slope < 0.0) {
            // Numerically singular Hessian; fall back to steepest descent.
            delta = neg_g.clone();
            slope = -dot(&g, &g);
        }

        // Backtracking Armijo search on the dual objective.
        let mut t = 1.0f64;
        let mut accepted = false;
        while t >= 1e-14 {
            let trial: Vec<f64> = alpha.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
            let mut trial_clamped = false;
            let ip = normalization_sweep(mv.basis, &trial, &points, step, &mut trial_clamped);
            let trial_obj = ip + dot(&trial, mu);
            if trial_obj.is_finite() && trial_obj <= objective + 1e-4 * t * slope {
                alpha = trial;
                clamped |= trial_clamped;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }

        c = feature_sweep(mv.basis, &alpha, &points, step, qmax, &mut clamped);
        objective = c[0] + dot(&alpha, mu);
        if let Some(t) = trace.as_deref_mut() {
            t.objectives.push(objective);
            t.hessians
                .push(assemble_hessian(mv.basis, &c, m, cfg.hessian_noise));
        }
    }

    if converged {
        grad_norm = (0..=m)
            .map(|j| (mu[j] - c[j]).abs())
            .fold(0.0f64, f64::max);
    }

    Ok(MaxEntDensity {
        basis: mv.basis,
        m,
        alpha,
        grid_step: cfg.grid_step,
        fit_report: FitReport {
            converged,
            iterations,
            final_grad_norm: grad_norm,
            clamped,
        },
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl MaxEntDensity {
    /// Density value at a point of [0, 1].
    pub fn evaluate(&self, lambda: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::arg(format!("λ = {lambda} outside [0, 1]")));
        }
        let mut phis = vec![0.0f64; self.m + 1];
        basis_values(self.basis, lambda, &mut phis);
        let mut clamped = false;
        Ok(density_from_features(&self.alpha, &phis, &mut clamped))
    }

    /// Density values on the fit's own quadrature grid.
    pub fn evaluate_grid(&self) -> Result<Vec<f64>> {
        let points = grid::grid_points(self.grid_step)?;
        let mut phis = vec![0.0f64; self.m + 1];
        let mut clamped = false;
        Ok(points
            .iter()
            .map(|&x| {
                basis_values(self.basis, x, &mut phis);
                density_from_features(&self.alpha, &phis, &mut clamped)
            })
            .collect())
    }

    /// (p, p', p'') on the quadrature grid, from the analytic form:
    /// p' = −p·Σ α_i φ_i', p'' = p·((Σ α_i φ_i')² − Σ α_i φ_i'').
    pub fn derivatives_grid(&self) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        self.derivatives_at_step(self.grid_step)
    }

    /// As [`Self::derivatives_grid`], on an arbitrary uniform grid.
    pub fn derivatives_at_step(&self, step: f64) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let points = grid::grid_points(step)?;
        let len = self.m + 1;
        let (mut f, mut df, mut ddf) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
        let mut p = Vec::with_capacity(points.len());
        let mut dp = Vec::with_capacity(points.len());
        let mut ddp = Vec::with_capacity(points.len());
        let mut clamped = false;
        for &x in &points {
            basis_values_d2(self.basis, x, &mut f, &mut df, &mut ddf);
            let value = density_from_features(&self.alpha, &f, &mut clamped);
            let e1: f64 = dot(&self.alpha, &df);
            let e2: f64 = dot(&self.alpha, &ddf);
            p.push(value);
            dp.push(-e1 * value);
            ddp.push((e1 * e1 - e2) * value);
        }
        Ok((p, dp, ddp))
    }

    /// ∫₀¹ p dλ on the fit's grid (≈ 1 for converged fits).
    pub fn mass(&self) -> Result<f64> {
        let values = self.evaluate_grid()?;
        Ok(grid::trapezoid(&values, self.grid_step))
    }

    /// Moment integrals ∫ p φ_j for j = 0..=m on the fit's grid.
    pub fn reproduced_moments(&self) -> Result<Vec<f64>> {
        let points = grid::grid_points(self.grid_step)?;
        let step = 1.0 / (points.len() - 1) as f64;
        let mut clamped = false;
        Ok(feature_sweep(
            self.basis,
            &self.alpha,
            &points,
            step,
            self.m,
            &mut clamped,
        ))
    }

    fn check_compatible(&self, other_basis: Basis, other_m: usize, what: &str) -> Result<()> {
        if self.basis != other_basis || self.m != other_m {
            return Err(Error::mismatch(format!(
                "{what}: basis/order ({}, m={}) vs ({}, m={})",
                self.basis, self.m, other_basis, other_m
            )));
        }
        Ok(())
    }
}

/// Differential entropy of a fitted density: S = 1 + Σ α_i μ_i.
///
/// `mv` must be the constraint moments the density was fitted against.
pub fn entropy_analytic(density: &MaxEntDensity, mv: &MomentVector) -> Result<f64> {
    density.check_compatible(mv.basis, mv.m, "entropy")?;
    Ok(1.0 + dot(&density.alpha, &mv.values))
}

/// KL divergence D(p‖q) = −Σ (α_i − β_i) μ_i^p between two fits sharing a
/// basis and order; `mu_p` are p's constraint moments.
pub fn kl_analytic(p: &MaxEntDensity, q: &MaxEntDensity, mu_p: &MomentVector) -> Result<f64> {
    p.check_compatible(q.basis, q.m, "kl")?;
    p.check_compatible(mu_p.basis, mu_p.m, "kl moments")?;
    let acc: f64 = p
        .alpha
        .iter()
        .zip(&q.alpha)
        .zip(&mu_p.values)
        .map(|((a, b), mu)| (a - b) * mu)
        .sum();
    Ok(-acc)
}

/// Symmetric KL divergence, computed literally as the mean of the two
/// directed divergences so the algebraic symmetry holds bit for bit.
pub fn symmetric_kl(
    p: &MaxEntDensity,
    q: &MaxEntDensity,
    mu_p: &MomentVector,
    mu_q: &MomentVector,
) -> Result<f64> {
    Ok((kl_analytic(p, q, mu_p)? + kl_analytic(q, p, mu_q)?) / 2.0)
}
