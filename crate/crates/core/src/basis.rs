//! Approximating subspaces: analytic monomials and planar harmonic
//! polynomials, with evaluation and the exact discrete L² projection.
//!
//! The harmonic basis is realized in complex form as `{1, z^k, z̄^k}` rather
//! than `{r^k cos kθ, r^k sin kθ}`, so annihilation checks against it are
//! plain moment tests.

use crate::grid::{DiskGrid, Field};
use crate::{Complex64, Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector};

/// Complex coefficients aligned with a [`BasisSpec`].
pub type Coeffs = Vec<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `z^0 .. z^m`
    Analytic,
    /// `1, z^1 .. z^m, z̄^1 .. z̄^m` (in that order)
    Harmonic2d,
    /// the constant function only
    Constants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub degree: usize,
}

impl BasisSpec {
    pub fn analytic(degree: usize) -> Self {
        BasisSpec {
            kind: BasisKind::Analytic,
            degree,
        }
    }

    pub fn harmonic2d(degree: usize) -> Self {
        BasisSpec {
            kind: BasisKind::Harmonic2d,
            degree,
        }
    }

    pub fn constants() -> Self {
        BasisSpec {
            kind: BasisKind::Constants,
            degree: 0,
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            BasisKind::Analytic => self.degree + 1,
            BasisKind::Harmonic2d => 2 * self.degree + 1,
            BasisKind::Constants => 1,
        }
    }

    /// Value of the `k`-th basis element at `z`.
    pub fn element(&self, k: usize, z: Complex64) -> Complex64 {
        debug_assert!(k < self.dim());
        match self.kind {
            BasisKind::Constants => Complex64::ONE,
            BasisKind::Analytic => z.powu(k as u32),
            BasisKind::Harmonic2d => {
                if k == 0 {
                    Complex64::ONE
                } else if k <= self.degree {
                    z.powu(k as u32)
                } else {
                    z.conj().powu((k - self.degree) as u32)
                }
            }
        }
    }

    pub fn check_coeffs(&self, c: &Coeffs) -> Result<()> {
        if c.len() != self.dim() {
            return Err(Error::LengthMismatch {
                got: c.len(),
                want: self.dim(),
            });
        }
        Ok(())
    }

    /// Coefficient vector representing the constant `value` in this basis.
    pub fn constant(&self, value: Complex64) -> Coeffs {
        let mut c = vec![Complex64::ZERO; self.dim()];
        c[0] = value;
        c
    }
}

/// Pointwise `Σ c_k φ_k` at the given points.
pub fn eval_combo(c: &Coeffs, spec: &BasisSpec, points: &[Complex64]) -> Result<Vec<Complex64>> {
    spec.check_coeffs(c)?;
    Ok(points
        .iter()
        .map(|&z| {
            (0..spec.dim())
                .map(|k| c[k] * spec.element(k, z))
                .sum::<Complex64>()
        })
        .collect())
}

/// `eval_combo` sampled on a disk grid, returned as a [`Field`].
pub fn eval_combo_field(c: &Coeffs, spec: &BasisSpec, grid: &DiskGrid) -> Result<Field> {
    Ok(Field::new(eval_combo(c, spec, grid.points())?))
}

/// Discrete L² projection of `omega` onto the span of `spec`.
///
/// On the standard product grid the basis is orthogonal (angular sums kill
/// every cross moment), so the Gram matrix is diagonal and the projection is
/// a moment quotient per element. For other node layouts the dense Hermitian
/// normal equations are solved by Cholesky; a non-positive pivot reports the
/// grid as too coarse for the requested degree.
pub fn project_l2(omega: &Field, spec: &BasisSpec, grid: &DiskGrid) -> Result<Coeffs> {
    grid.check_alignment(omega)?;
    if grid.n_theta() > 2 * spec.degree {
        let mut coeffs = Vec::with_capacity(spec.dim());
        for k in 0..spec.dim() {
            let mut num = Complex64::ZERO;
            let mut den = 0.0;
            for ((&z, &w), &v) in grid.points().iter().zip(grid.weights()).zip(&omega.values) {
                let phi = spec.element(k, z);
                num += phi.conj() * v * w;
                den += phi.norm_sqr() * w;
            }
            if den <= 0.0 {
                return Err(Error::SingularGram {
                    degree: spec.degree,
                });
            }
            coeffs.push(num / den);
        }
        Ok(coeffs)
    } else {
        project_l2_dense(
            omega.values.iter().copied(),
            grid.points(),
            grid.weights(),
            spec,
        )
    }
}

/// Discrete least-squares projection on an arbitrary weighted point set
/// (the path taken by ingested free samples).
pub fn project_l2_free(
    values: &[Complex64],
    points: &[Complex64],
    weights: &[f64],
    spec: &BasisSpec,
) -> Result<Coeffs> {
    if values.len() != points.len() || values.len() != weights.len() {
        return Err(Error::LengthMismatch {
            got: values.len(),
            want: points.len(),
        });
    }
    project_l2_dense(values.iter().copied(), points, weights, spec)
}

/// Dense weighted least-squares projection used for free node layouts.
pub(crate) fn project_l2_dense(
    values: impl Iterator<Item = Complex64>,
    points: &[Complex64],
    weights: &[f64],
    spec: &BasisSpec,
) -> Result<Coeffs> {
    let dim = spec.dim();
    let mut gram = DMatrix::<Complex64>::zeros(dim, dim);
    let mut rhs = DVector::<Complex64>::zeros(dim);
    for ((&z, &w), v) in points.iter().zip(weights).zip(values) {
        let phis: Vec<Complex64> = (0..dim).map(|k| spec.element(k, z)).collect();
        for j in 0..dim {
            let pj = phis[j].conj() * w;
            for k in 0..dim {
                gram[(j, k)] += pj * phis[k];
            }
            rhs[j] += pj * v;
        }
    }
    let chol = Cholesky::new(gram.clone()).ok_or(Error::SingularGram {
        degree: spec.degree,
    })?;
    // A rank-deficient Gram can still factor with a tiny positive pivot and
    // the system stays consistent, so test each pivot against its column
    // mass: L_kk² / G_kk is the fraction of φ_k independent of the previous
    // columns and collapses to roundoff when the grid cannot carry the basis.
    for k in 0..dim {
        let pivot = chol.l_dirty()[(k, k)].re;
        let mass = gram[(k, k)].re;
        let independent = pivot * pivot > 1e-10 * mass;
        if !independent {
            return Err(Error::SingularGram {
                degree: spec.degree,
            });
        }
    }
    let sol = chol.solve(&rhs);
    Ok(sol.iter().copied().collect())
}

/// Boundary `H^p`-type norm of an analytic combination:
/// `(∫_T |f(e^{iθ})|^p dθ/2π)^{1/p}` by the trapezoid rule on `n_theta`
/// equispaced boundary points.
pub fn boundary_norm(c: &Coeffs, spec: &BasisSpec, p: f64, n_theta: usize) -> Result<f64> {
    if !matches!(spec.kind, BasisKind::Analytic | BasisKind::Constants) {
        return Err(Error::NotApplicable(
            "boundary norm is defined for analytic combinations".into(),
        ));
    }
    if p < 1.0 {
        return Err(Error::InvalidParameter("p must be >= 1".into()));
    }
    spec.check_coeffs(c)?;
    let mut acc = 0.0;
    for j in 0..n_theta {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
        let z = Complex64::from_polar(1.0, theta);
        let f: Complex64 = (0..spec.dim()).map(|k| c[k] * spec.element(k, z)).sum();
        acc += f.norm().powf(p);
    }
    Ok((acc / n_theta as f64).powf(1.0 / p))
}
