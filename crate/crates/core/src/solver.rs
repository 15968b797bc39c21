//! Finite-dimensional best L^p approximation on the disk, `1 ≤ p < ∞`.
//!
//! The discrete objective `Σ w_i |ω_i − (Φc)_i|^p` is convex in the real and
//! imaginary parts of the coefficients, and that paired-real parametrization
//! is exactly how it is minimized: a damped Newton iteration on the real
//! vector `(Re c, Im c)` with an Armijo line search, reweighting the
//! linearization at every step.
//!
//! * `p = 2` — a single weighted least-squares solve (identical to
//!   [`crate::basis::project_l2`]).
//! * `p = 1` — the objective is smoothed to `Σ w √(|r|² + ε²)` and ε is
//!   driven down a geometric continuation schedule (plain reweighted least
//!   squares stalls at small ε near residual zero sets; the Newton step
//!   does not); the final subgradient residual is reported.
//! * `1 < p < 2` — the curvature weights `|r|^{p-2}` are clamped at
//!   `ε_min^{p-2}` to remove the zero-residual singularity.
//!
//! Flat optima are reported, never resolved: at `p = 1` the minimizer set
//! can be a segment, in which case the solver returns its converged point
//! with the `flat` flag raised.

use crate::basis::{self, BasisSpec, Coeffs};
use crate::grid::{DiskGrid, Field};
use crate::{Complex64, Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub p: f64,
    /// Initial smoothing width for the p = 1 continuation.
    pub eps0: f64,
    /// Geometric decay factor of the ε schedule, in (0, 1).
    pub eps_decay: f64,
    /// Final smoothing width (also the weight clamp for 1 < p < 2).
    pub eps_min: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Convergence threshold on the scaled gradient of the (smoothed)
    /// objective.
    pub grad_tol: f64,
    /// Number of random directions used by the automatic flatness probe.
    pub flatness_probes: usize,
    /// Seed for probe directions.
    pub seed: u64,
}

impl SolverOptions {
    pub fn new(p: f64) -> Self {
        SolverOptions {
            p,
            eps0: 1e-1,
            eps_decay: 0.3,
            eps_min: 1e-7,
            max_outer: 40,
            max_inner: 200,
            grad_tol: 1e-10,
            flatness_probes: 8,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || self.p < 1.0 {
            return Err(Error::InvalidParameter("p must be finite and >= 1".into()));
        }
        if !(self.eps0 > self.eps_min && self.eps_min > 0.0) {
            return Err(Error::InvalidParameter("need eps0 > eps_min > 0".into()));
        }
        if !(self.eps_decay > 0.0 && self.eps_decay < 1.0) {
            return Err(Error::InvalidParameter(
                "decay factor must be in (0,1)".into(),
            ));
        }
        Ok(())
    }
}

/// A converged (or explicitly non-converged) best-approximation result.
#[derive(Debug, Clone)]
pub struct ApproxSolution {
    pub coeffs: Coeffs,
    /// Discrete distance `‖ω − f*‖_p` of the stored residual.
    pub lambda: f64,
    /// `ω − f*` on the grid nodes.
    pub residual: Field,
    pub iterations: usize,
    pub final_eps: f64,
    /// Raised when the probe detects a direction along which the objective
    /// is constant to first and second order (p = 1 only).
    pub flat: bool,
    pub converged: bool,
    /// Norm of the gradient of the ε-smoothed objective at the last iterate;
    /// at p = 1 this is the reported subgradient residual.
    pub grad_residual: f64,
    /// Objective value at the end of every ε stage (a single entry for
    /// p ≥ 2); non-increasing by construction.
    pub objective_trace: Vec<f64>,
}

fn basis_matrix(spec: &BasisSpec, grid: &DiskGrid) -> DMatrix<Complex64> {
    let n = grid.len();
    let dim = spec.dim();
    DMatrix::from_fn(n, dim, |i, k| spec.element(k, grid.points()[i]))
}

fn residual_at(
    omega: &[Complex64],
    phi: &DMatrix<Complex64>,
    c: &DVector<Complex64>,
) -> Vec<Complex64> {
    let fit = phi * c;
    omega.iter().zip(fit.iter()).map(|(&o, &f)| o - f).collect()
}

fn objective(residual: &[Complex64], weights: &[f64], p: f64, eps: f64) -> f64 {
    residual
        .iter()
        .zip(weights)
        .map(|(r, &w)| {
            if p == 1.0 {
                w * (r.norm_sqr() + eps * eps).sqrt()
            } else {
                w * r.norm().powf(p)
            }
        })
        .sum()
}

/// Gradient of the (smoothed) objective with respect to the conjugate
/// coefficients; its norm doubles as the subgradient residual at p = 1.
fn gradient(
    residual: &[Complex64],
    weights: &[f64],
    phi: &DMatrix<Complex64>,
    p: f64,
    eps: f64,
) -> DVector<Complex64> {
    let dim = phi.ncols();
    let mut g = DVector::<Complex64>::zeros(dim);
    for (i, (r, &w)) in residual.iter().zip(weights).enumerate() {
        let factor = if p == 1.0 {
            (r.norm_sqr() + eps * eps).sqrt().recip()
        } else {
            r.norm().max(eps).powf(p - 2.0)
        };
        let s = -(p / 2.0) * w * factor;
        for k in 0..dim {
            g[k] += phi[(i, k)].conj() * r * s;
        }
    }
    g
}

/// Scalar profile `ψ(s)` with `s = |r|²`, so that the node contribution is
/// `w·ψ(|r|²)`: the smoothed absolute value at p = 1, the clamped power
/// elsewhere.
struct PowerProfile {
    p: f64,
    eps: f64,
    clamp_sq: f64,
}

impl PowerProfile {
    fn value(&self, s: f64) -> f64 {
        if self.p == 1.0 {
            (s + self.eps * self.eps).sqrt()
        } else {
            s.powf(self.p / 2.0)
        }
    }

    // first and second derivatives in s, with the zero-residual clamp for
    // the singular exponents below 2
    fn derivs(&self, s: f64) -> (f64, f64) {
        if self.p == 1.0 {
            let t = s + self.eps * self.eps;
            let rt = t.sqrt();
            (0.5 / rt, -0.25 / (t * rt))
        } else {
            let se = if self.p < 2.0 {
                s.max(self.clamp_sq)
            } else {
                s
            };
            let h = self.p / 2.0;
            (h * se.powf(h - 1.0), h * (h - 1.0) * se.powf(h - 2.0))
        }
    }
}

/// One damped-Newton stage on the paired-real coefficients, minimizing
/// `Σ w_i ψ(|r_i|²)` to the gradient tolerance.
///
/// Returns (converged, iterations, final objective).
fn newton_stage(
    omega: &[Complex64],
    phi: &DMatrix<Complex64>,
    w: &[f64],
    profile: &PowerProfile,
    c: &mut DVector<Complex64>,
    grad_tol: f64,
    max_iter: usize,
) -> (bool, usize, f64) {
    let dim = phi.ncols();
    let nd = 2 * dim;
    let eval_obj = |c: &DVector<Complex64>| -> f64 {
        let res = residual_at(omega, phi, c);
        res.iter()
            .zip(w)
            .map(|(r, &wi)| wi * profile.value(r.norm_sqr()))
            .sum()
    };
    let mut obj = eval_obj(c);
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let res = residual_at(omega, phi, c);
        // real gradient and Hessian in (Re c, Im c)
        let mut grad = DVector::<f64>::zeros(nd);
        let mut hess = DMatrix::<f64>::zeros(nd, nd);
        let mut q = vec![0.0f64; nd];
        for (i, (r, &wi)) in res.iter().zip(w).enumerate() {
            let s = r.norm_sqr();
            let (g1, g2) = profile.derivs(s);
            for k in 0..dim {
                let u = r.conj() * phi[(i, k)];
                q[k] = -2.0 * u.re;
                q[dim + k] = 2.0 * u.im;
            }
            for j in 0..nd {
                grad[j] += wi * g1 * q[j];
                for k in j..nd {
                    hess[(j, k)] += wi * g2 * q[j] * q[k];
                }
            }
            // curvature of s itself: ∂²s blocks are r-independent products;
            // the mixed (Re, Im) block is antisymmetric, so its diagonal
            // contribution is exactly zero
            for j in 0..dim {
                for k in j..dim {
                    let prod = phi[(i, j)].conj() * phi[(i, k)];
                    let re = 2.0 * wi * g1 * prod.re;
                    let im = -2.0 * wi * g1 * prod.im;
                    hess[(j, k)] += re;
                    hess[(dim + j, dim + k)] += re;
                    hess[(j, dim + k)] += im;
                    if k != j {
                        hess[(k, dim + j)] -= im;
                    }
                }
            }
        }
        for j in 0..nd {
            for k in 0..j {
                hess[(j, k)] = hess[(k, j)];
            }
        }

        let gnorm = grad.norm();
        if gnorm <= grad_tol {
            return (true, iterations, obj);
        }

        // Levenberg damping until the factorization goes through
        let trace_scale = (0..nd).map(|j| hess[(j, j)]).sum::<f64>() / nd as f64;
        let mut mu = 0.0;
        let step = loop {
            let mut damped = hess.clone();
            for j in 0..nd {
                damped[(j, j)] += mu;
            }
            if let Some(chol) = Cholesky::new(damped) {
                break chol.solve(&(-&grad));
            }
            mu = if mu == 0.0 {
                1e-12 * trace_scale.max(1e-300)
            } else {
                mu * 100.0
            };
            if mu > 1e6 * trace_scale.max(1e-300) {
                return (false, iterations, obj);
            }
        };

        // Armijo backtracking
        let slope: f64 = grad.dot(&step);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = DVector::<Complex64>::from_fn(dim, |k, _| {
                c[k] + Complex64::new(step[k], step[dim + k]) * t
            });
            let cand_obj = eval_obj(&cand);
            if cand_obj <= obj + 1e-4 * t * slope || cand_obj < obj * (1.0 - 1e-16) {
                *c = cand;
                obj = cand_obj;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no descent to machine precision: treat as converged-flat
            return (true, iterations, obj);
        }
        if step.norm() * t <= 1e-15 * (1.0 + c.norm()) {
            return (true, iterations, obj);
        }
    }
    (false, iterations, obj)
}

/// One weighted least-squares solve `min Σ u_i |ω_i − (Φc)_i|²`.
fn weighted_ls(
    omega: &[Complex64],
    phi: &DMatrix<Complex64>,
    u: &[f64],
    degree: usize,
) -> Result<DVector<Complex64>> {
    let dim = phi.ncols();
    let mut gram = DMatrix::<Complex64>::zeros(dim, dim);
    let mut rhs = DVector::<Complex64>::zeros(dim);
    for i in 0..phi.nrows() {
        let w = u[i];
        if w == 0.0 {
            continue;
        }
        for j in 0..dim {
            let pj = phi[(i, j)].conj() * w;
            for k in j..dim {
                gram[(j, k)] += pj * phi[(i, k)];
            }
            rhs[j] += pj * omega[i];
        }
    }
    for j in 0..dim {
        for k in 0..j {
            gram[(j, k)] = gram[(k, j)].conj();
        }
    }
    let chol = Cholesky::new(gram).ok_or(Error::SingularGram { degree })?;
    Ok(chol.solve(&rhs))
}

/// Best approximation of `ω` in the span of `spec` with respect to the
/// discrete `L^p(dA)` norm on `grid`.
///
/// Non-convergence within the iteration budget is never silent: the result
/// comes back with `converged = false` and the last iterate's diagnostics.
pub fn solve_best(
    omega: &Field,
    spec: &BasisSpec,
    opts: &SolverOptions,
    grid: &DiskGrid,
) -> Result<ApproxSolution> {
    opts.validate()?;
    grid.check_alignment(omega)?;
    let p = opts.p;
    let phi = basis_matrix(spec, grid);
    let w = grid.weights();
    let ov = &omega.values;

    // L² solve doubles as the initial iterate for every p.
    let mut c = weighted_ls(ov, &phi, w, spec.degree)?;
    let mut iterations = 1usize;
    let mut converged = p == 2.0;
    let mut trace = Vec::new();
    let mut eps = if p == 1.0 { opts.eps0 } else { opts.eps_min };

    if p != 2.0 {
        let scale = grid.norm_p(omega, p)?.max(1e-300);
        let gtol = opts.grad_tol * scale.powf(p - 1.0).max(1e-300);
        let stages: Vec<f64> = if p == 1.0 {
            let mut v = Vec::new();
            let mut e = opts.eps0;
            while e > opts.eps_min && v.len() < opts.max_outer {
                v.push(e);
                e *= opts.eps_decay;
            }
            v.push(opts.eps_min);
            v
        } else {
            vec![opts.eps_min]
        };

        for &stage_eps in &stages {
            eps = stage_eps;
            let profile = PowerProfile {
                p,
                eps,
                clamp_sq: opts.eps_min * opts.eps_min,
            };
            let (ok, iters, obj) =
                newton_stage(ov, &phi, w, &profile, &mut c, gtol, opts.max_inner);
            iterations += iters;
            converged = ok;
            trace.push(obj);
        }
    } else {
        let res = residual_at(ov, &phi, &c);
        trace.push(objective(&res, w, p, eps));
    }

    let res = residual_at(ov, &phi, &c);
    let residual = Field::new(res.clone());
    let lambda = grid.norm_p(&residual, p)?;
    let grad_residual = gradient(&res, w, &phi, p, opts.eps_min).norm();
    let coeffs: Coeffs = c.iter().copied().collect();

    let flat = if p == 1.0 && opts.flatness_probes > 0 {
        let sol = ApproxSolution {
            coeffs: coeffs.clone(),
            lambda,
            residual: Field::new(res.clone()),
            iterations,
            final_eps: eps,
            flat: false,
            converged,
            grad_residual,
            objective_trace: trace.clone(),
        };
        flatness_probe(omega, &sol, spec, grid, opts.flatness_probes, opts.seed)?.flat
    } else {
        false
    };

    Ok(ApproxSolution {
        coeffs,
        lambda,
        residual,
        iterations,
        final_eps: eps,
        flat,
        converged,
        grad_residual,
        objective_trace: trace,
    })
}

/// Sign-preserving reweighting of an approximation pair: for a positive
/// weight field `ρ`, the blend `ρ·ω + (1 − ρ)·f*` has the same residual sign
/// pattern as `ω` and therefore the same best approximant at p = 1.
pub fn residual_reweight(omega: &Field, f_star: &Field, rho: &Field) -> Result<Field> {
    if omega.len() != f_star.len() || omega.len() != rho.len() {
        return Err(Error::LengthMismatch {
            got: f_star.len().min(rho.len()),
            want: omega.len(),
        });
    }
    for v in &rho.values {
        let positive = v.re > 0.0;
        if !positive || v.im.abs() > 1e-14 * v.re.abs().max(1.0) {
            return Err(Error::InvalidParameter(
                "reweighting field must be strictly positive real".into(),
            ));
        }
    }
    let values = omega
        .values
        .iter()
        .zip(&f_star.values)
        .zip(&rho.values)
        .map(|((&o, &f), &r)| r.re * o + (1.0 - r.re) * f)
        .collect();
    Ok(Field::new(values))
}

#[derive(Debug, Clone)]
pub struct FlatnessReport {
    /// Largest relative objective deviation over all probed directions.
    pub max_rel_deviation: f64,
    /// Smallest per-direction deviation; a flat segment shows up here.
    pub min_rel_deviation: f64,
    pub step: f64,
    pub directions_probed: usize,
    pub flat: bool,
}

/// Probe the p = 1 objective around a solution for flat directions.
///
/// Probes the canonical coefficient directions (real and imaginary axes)
/// plus `n_dirs` random unit directions, stepping `±δ` along each; the
/// optimum is declared flat when some direction changes the objective by
/// less than `10·δ·√ε_machine` relative to λ. Random directions alone would
/// miss a flat segment (it is a measure-zero set of directions), hence the
/// canonical ones.
pub fn flatness_probe(
    omega: &Field,
    sol: &ApproxSolution,
    spec: &BasisSpec,
    grid: &DiskGrid,
    n_dirs: usize,
    seed: u64,
) -> Result<FlatnessReport> {
    grid.check_alignment(omega)?;
    spec.check_coeffs(&sol.coeffs)?;
    let delta = 1e-3;
    let dim = spec.dim();
    let mut dirs: Vec<Vec<Complex64>> = Vec::new();
    for k in 0..dim {
        let mut d = vec![Complex64::ZERO; dim];
        d[k] = Complex64::ONE;
        dirs.push(d.clone());
        d[k] = Complex64::I;
        dirs.push(d);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_dirs {
        let mut d: Vec<Complex64> = (0..dim)
            .map(|_| {
                Complex64::new(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        let n = d.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 {
            for v in &mut d {
                *v /= n;
            }
            dirs.push(d);
        }
    }

    let lambda = sol.lambda.max(1e-300);
    let mut max_dev: f64 = 0.0;
    let mut min_dev = f64::INFINITY;
    for d in &dirs {
        let mut dir_dev: f64 = 0.0;
        for sign in [-1.0, 1.0] {
            let c: Coeffs = sol
                .coeffs
                .iter()
                .zip(d)
                .map(|(&ck, &dk)| ck + dk * (sign * delta))
                .collect();
            let f = basis::eval_combo_field(&c, spec, grid)?;
            let diff = Field::new(
                omega
                    .values
                    .iter()
                    .zip(&f.values)
                    .map(|(&o, &v)| o - v)
                    .collect(),
            );
            let val = grid.norm_p(&diff, 1.0)?;
            dir_dev = dir_dev.max((val - lambda).abs() / lambda);
        }
        max_dev = max_dev.max(dir_dev);
        min_dev = min_dev.min(dir_dev);
    }

    let threshold = 10.0 * delta * f64::EPSILON.sqrt();
    Ok(FlatnessReport {
        max_rel_deviation: max_dev,
        min_rel_deviation: min_dev,
        step: delta,
        directions_probed: dirs.len(),
        flat: min_dev < threshold,
    })
}

/// Second rotational difference `‖f(e^{it}·) + f(e^{-it}·) − 2f‖_p`.
///
/// For basis combinations the rotation acts exactly on coefficients
/// (`z^k ↦ e^{ikt} z^k`, `z̄^k ↦ e^{-ikt} z̄^k`), so the modulus is computed
/// for any `t` without angular interpolation; the norm is the discrete
/// grid norm. Its decay as `t → 0` measures mean Hölder smoothness.
pub fn modulus_dt(c: &Coeffs, spec: &BasisSpec, t: f64, p: f64, grid: &DiskGrid) -> Result<f64> {
    spec.check_coeffs(c)?;
    let factor = |k: usize| 2.0 * ((k as f64 * t).cos() - 1.0);
    let transformed: Coeffs = match spec.kind {
        crate::basis::BasisKind::Constants => vec![Complex64::ZERO],
        crate::basis::BasisKind::Analytic => c
            .iter()
            .enumerate()
            .map(|(k, &ck)| ck * factor(k))
            .collect(),
        crate::basis::BasisKind::Harmonic2d => c
            .iter()
            .enumerate()
            .map(|(k, &ck)| {
                let order = if k == 0 {
                    0
                } else if k <= spec.degree {
                    k
                } else {
                    k - spec.degree
                };
                ck * factor(order)
            })
            .collect(),
    };
    let f = basis::eval_combo_field(&transformed, spec, grid)?;
    grid.norm_p(&f, p)
}

/// Solve per degree and return the boundary norm of each best approximant;
/// a bounded, stable column is the expected signature for smooth data.
pub fn boundary_norm_sweep(
    omega: &Field,
    p: f64,
    degrees: &[usize],
    grid: &DiskGrid,
    n_theta_boundary: usize,
) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::with_capacity(degrees.len());
    for &m in degrees {
        let spec = BasisSpec::analytic(m);
        let sol = solve_best(omega, &spec, &SolverOptions::new(p), grid)?;
        let bn = basis::boundary_norm(&sol.coeffs, &spec, p, n_theta_boundary)?;
        out.push((m, bn));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid_default() -> DiskGrid {
        DiskGrid::product(64, 128).unwrap()
    }

    #[test]
    fn p1_abs_z_squared_constant_half() {
        let grid = grid_default();
        let omega = Field::from_fn(&grid, |z| Complex64::new(z.norm_sqr(), 0.0));
        let sol = solve_best(
            &omega,
            &BasisSpec::analytic(3),
            &SolverOptions::new(1.0),
            &grid,
        )
        .unwrap();
        assert!(sol.converged);
        assert_abs_diff_eq!(sol.coeffs[0].re, 0.5, epsilon = 1e-2);
        for k in 1..4 {
            assert!(sol.coeffs[k].norm() < 1e-3);
        }
        // λ matches 2∫|r² − 1/2| r dr = 1/4
        assert_abs_diff_eq!(sol.lambda, 0.25, epsilon = 1e-2);
        // stored residual really has norm λ
        assert_abs_diff_eq!(
            grid.norm_p(&sol.residual, 1.0).unwrap(),
            sol.lambda,
            epsilon = 1e-12
        );
    }

    #[test]
    fn p1_zbar_is_badly_approximable() {
        let grid = grid_default();
        let omega = Field::from_fn(&grid, |z| z.conj());
        let sol = solve_best(
            &omega,
            &BasisSpec::analytic(4),
            &SolverOptions::new(1.0),
            &grid,
        )
        .unwrap();
        for c in &sol.coeffs {
            assert!(c.norm() < 1e-3, "expected vanishing approximant, got {c}");
        }
        assert_abs_diff_eq!(sol.lambda, 2.0 / 3.0, epsilon = 1e-3);
    }

    #[test]
    fn p2_matches_projection() {
        let grid = grid_default();
        let omega = Field::from_fn(&grid, |z| z * z * z.conj());
        let spec = BasisSpec::analytic(3);
        let sol = solve_best(&omega, &spec, &SolverOptions::new(2.0), &grid).unwrap();
        let proj = basis::project_l2(&omega, &spec, &grid).unwrap();
        for (a, b) in sol.coeffs.iter().zip(&proj) {
            assert!((a - b).norm() < 1e-8);
        }
        assert_abs_diff_eq!(sol.coeffs[1].re, 2.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn objective_trace_non_increasing() {
        let grid = grid_default();
        let omega = Field::from_fn(&grid, |z| z.conj() + Complex64::new(0.3, 0.0));
        let sol = solve_best(
            &omega,
            &BasisSpec::analytic(2),
            &SolverOptions::new(1.0),
            &grid,
        )
        .unwrap();
        for pair in sol.objective_trace.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn scaling_equivariance() {
        let grid = grid_default();
        let spec = BasisSpec::analytic(2);
        let base = Field::from_fn(&grid, |z| z.conj() * z + z * 0.2);
        for alpha in [0.5, 3.0] {
            let scaled = Field::new(base.values.iter().map(|&v| v * alpha).collect());
            let s1 = solve_best(&base, &spec, &SolverOptions::new(1.5), &grid).unwrap();
            let s2 = solve_best(&scaled, &spec, &SolverOptions::new(1.5), &grid).unwrap();
            assert_abs_diff_eq!(s2.lambda, alpha * s1.lambda, epsilon = 1e-6);
            for (a, b) in s1.coeffs.iter().zip(&s2.coeffs) {
                assert!((b - a * alpha).norm() < 1e-5);
            }
        }
    }

    #[test]
    fn reweight_identities() {
        let grid = grid_default();
        let omega = Field::from_fn(&grid, |z| Complex64::new(z.norm_sqr(), 0.0));
        let f_star = Field::new(vec![Complex64::new(0.5, 0.0); grid.len()]);
        let ones = Field::new(vec![Complex64::ONE; grid.len()]);
        let back = residual_reweight(&omega, &f_star, &ones).unwrap();
        for (a, b) in back.values.iter().zip(&omega.values) {
            assert_eq!(a, b);
        }
        // sign preservation under ρ ≡ 1/2
        let half = Field::new(vec![Complex64::new(0.5, 0.0); grid.len()]);
        let blended = residual_reweight(&omega, &f_star, &half).unwrap();
        for ((&n, &o), &f) in blended.values.iter().zip(&omega.values).zip(&f_star.values) {
            let s_new = (n - f).re;
            let s_old = (o - f).re;
            assert!(s_new * s_old >= 0.0);
        }
        // nonpositive weights are rejected
        let bad = Field::new(vec![Complex64::new(0.0, 0.0); grid.len()]);
        assert!(residual_reweight(&omega, &f_star, &bad).is_err());
    }

    #[test]
    fn reweighted_problem_keeps_best_approximant() {
        let grid = grid_default();
        let omega = Field::from_fn(&grid, |z| Complex64::new(z.norm_sqr(), 0.0));
        let f_star = Field::new(vec![Complex64::new(0.5, 0.0); grid.len()]);
        let rho = Field::new(
            grid.points()
                .iter()
                .map(|z| Complex64::new(0.1 + 0.9 * (1.0 - z.norm_sqr()), 0.0))
                .collect(),
        );
        let blended = residual_reweight(&omega, &f_star, &rho).unwrap();
        let sol = solve_best(
            &blended,
            &BasisSpec::analytic(2),
            &SolverOptions::new(1.0),
            &grid,
        )
        .unwrap();
        assert_abs_diff_eq!(sol.coeffs[0].re, 0.5, epsilon = 1e-2);
        for k in 1..3 {
            assert!(sol.coeffs[k].norm() < 1e-2);
        }
    }

    #[test]
    fn flatness_of_chi_disk_and_strictness_of_abs_z_squared() {
        let spec2 = crate::grid::BallSpec::new(2).unwrap();
        let rho = spec2.rho();
        let grid = DiskGrid::product_split(64, 128, &[rho]).unwrap();
        let chi = Field::from_fn(&grid, |z| {
            if z.norm() < rho {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        });
        let spec = BasisSpec::constants();
        let sol = solve_best(&chi, &spec, &SolverOptions::new(1.0), &grid).unwrap();
        assert!(sol.flat, "chi_D0 distance is constant along real constants");
        assert_abs_diff_eq!(sol.lambda, 0.5, epsilon = 1e-3);
        // distance 1/2 at several flat points
        for c in [0.0, 0.25, 0.5, 1.0] {
            let diff = Field::new(chi.values.iter().map(|&v| v - c).collect());
            assert_abs_diff_eq!(grid.norm_p(&diff, 1.0).unwrap(), 0.5, epsilon = 1e-3);
        }

        // |z|² has a strict optimum over constants
        let omega = Field::from_fn(&grid, |z| Complex64::new(z.norm_sqr(), 0.0));
        let sol = solve_best(&omega, &spec, &SolverOptions::new(1.0), &grid).unwrap();
        assert!(!sol.flat);
        let probe = flatness_probe(&omega, &sol, &spec, &grid, 8, 0).unwrap();
        // a δ step costs O(δ²) for a strictly convex objective
        assert!(probe.min_rel_deviation > 1e-7);
    }

    #[test]
    fn zero_step_probe_has_zero_deviation() {
        let grid = DiskGrid::product(16, 32).unwrap();
        let spec = BasisSpec::constants();
        let omega = Field::from_fn(&grid, |z| Complex64::new(z.norm_sqr(), 0.0));
        let sol = solve_best(&omega, &spec, &SolverOptions::new(1.0), &grid).unwrap();
        // evaluating the objective at the solution itself reproduces λ
        let f = basis::eval_combo_field(&sol.coeffs, &spec, &grid).unwrap();
        let diff = Field::new(
            omega
                .values
                .iter()
                .zip(&f.values)
                .map(|(&o, &v)| o - v)
                .collect(),
        );
        assert_abs_diff_eq!(
            grid.norm_p(&diff, 1.0).unwrap(),
            sol.lambda,
            epsilon = 1e-14
        );
    }

    #[test]
    fn modulus_dt_closed_forms() {
        let grid = DiskGrid::product(32, 64).unwrap();
        // constants are rotation invariant
        let d = modulus_dt(
            &vec![Complex64::new(2.0, -1.0)],
            &BasisSpec::constants(),
            0.7,
            2.0,
            &grid,
        )
        .unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-15);
        // f = z: D_t = 2(1 − cos t) ‖z‖_p
        let spec = BasisSpec::analytic(1);
        let c = vec![Complex64::ZERO, Complex64::ONE];
        let z_field = Field::from_fn(&grid, |z| z);
        for p in [1.0, 2.0] {
            let znorm = grid.norm_p(&z_field, p).unwrap();
            for t in [0.05f64, 0.3, 1.2] {
                let want = 2.0 * (1.0 - t.cos()) * znorm;
                let got = modulus_dt(&c, &spec, t, p, &grid).unwrap();
                assert_abs_diff_eq!(got, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn modulus_dt_slope_for_smooth_best_approximant() {
        let grid = grid_default();
        let omega = Field::from_fn(&grid, |z| z * z * z.conj());
        let spec = BasisSpec::analytic(3);
        let sol = solve_best(&omega, &spec, &SolverOptions::new(2.0), &grid).unwrap();
        let ts: Vec<f64> = (0..10).map(|i| 1e-2 * 10f64.powf(i as f64 / 9.0)).collect();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &t in &ts {
            let d = modulus_dt(&sol.coeffs, &spec, t, 2.0, &grid).unwrap();
            xs.push(t.ln());
            ys.push(d.ln());
        }
        let slope = fit_slope(&xs, &ys);
        assert!(slope >= 0.9, "log-log slope {slope} below smoothness bound");
    }

    pub(super) fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    }

    #[test]
    fn boundary_norm_sweep_profiles() {
        let grid = grid_default();
        // z̄ at p = 1: approximants vanish, boundary norms near zero
        let omega = Field::from_fn(&grid, |z| z.conj());
        let sweep = boundary_norm_sweep(&omega, 1.0, &[1, 2, 3, 4, 5, 6], &grid, 256).unwrap();
        for &(_, bn) in &sweep {
            assert!(bn < 1e-3, "boundary norm {bn} should vanish");
        }
        // z²z̄ at p = 2: constant 2/3 across degrees
        let omega = Field::from_fn(&grid, |z| z * z * z.conj());
        let sweep = boundary_norm_sweep(&omega, 2.0, &[1, 2, 3, 4, 5, 6], &grid, 256).unwrap();
        for &(_, bn) in &sweep {
            assert_abs_diff_eq!(bn, 2.0 / 3.0, epsilon = 1e-6);
        }
        // mixed smooth data: bounded, stable norms
        let omega = Field::from_fn(&grid, |z| Complex64::new(z.re + z.norm_sqr(), 0.0));
        let sweep =
            boundary_norm_sweep(&omega, 2.0, &[2, 3, 4, 5, 6, 7, 8, 9, 10], &grid, 256).unwrap();
        let max = sweep.iter().map(|&(_, b)| b).fold(0.0, f64::max);
        let min = sweep.iter().map(|&(_, b)| b).fold(f64::INFINITY, f64::min);
        assert!(max / min < 1.5, "boundary norms drift: {min}..{max}");
    }

    #[test]
    fn invalid_options_rejected() {
        let grid = DiskGrid::product(4, 8).unwrap();
        let omega = Field::from_fn(&grid, |z| z);
        let spec = BasisSpec::analytic(1);
        assert!(solve_best(&omega, &spec, &SolverOptions::new(0.5), &grid).is_err());
        let mut o = SolverOptions::new(1.0);
        o.eps0 = 1e-9;
        assert!(solve_best(&omega, &spec, &o, &grid).is_err());
    }
}
