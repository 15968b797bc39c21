//! Quadrature grids on the unit disk, radial intervals and n-balls.
//!
//! Measure conventions, fixed once here and documented per operation
//! elsewhere: [`DiskGrid`] integrates against the *normalized* area measure
//! `dA = dx dy / π` (total mass 1); [`RadialGrid`] integrates against
//! `r^(n-1) dr` on `(0, 1)`; [`BallSampler`] integrates against ordinary
//! Lebesgue measure on the unit ball of `R^n`.
//!
//! All grids are immutable after construction and safe to share across
//! threads.

use crate::quad::{gauss_jacobi_01, gauss_legendre_on};
use crate::{Complex64, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Complex sample values aligned with a grid, plus an optional label naming
/// the catalog entry or ingestion source the values came from.
#[derive(Debug, Clone)]
pub struct Field {
    pub values: Vec<Complex64>,
    pub label: Option<String>,
}

impl Field {
    pub fn new(values: Vec<Complex64>) -> Self {
        Field {
            values,
            label: None,
        }
    }

    pub fn labeled(values: Vec<Complex64>, label: impl Into<String>) -> Self {
        Field {
            values,
            label: Some(label.into()),
        }
    }

    /// Sample a function on the nodes of a disk grid.
    pub fn from_fn(grid: &DiskGrid, f: impl Fn(Complex64) -> Complex64) -> Self {
        Field::new(grid.points().iter().map(|&z| f(z)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn all_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Product quadrature grid on the open unit disk.
///
/// Radial direction: Gauss–Legendre panels on `(0, 1)` with the polar
/// Jacobian `2r` folded into the weights (so the weights realize normalized
/// area, `Σ w = 1`). Angular direction: `n_theta` equispaced angles with the
/// trapezoid rule, which annihilates `e^{ikθ}` exactly for `0 < |k| < n_theta`.
///
/// Optional split radii place a panel boundary at each given radius so that
/// radially discontinuous integrands (indicator functions, sign patterns) are
/// integrated panel-by-panel without crossing the jump.
#[derive(Debug, Clone)]
pub struct DiskGrid {
    radial: Vec<(f64, f64)>, // (r_i, weight including the 2r Jacobian)
    n_theta: usize,
    n_r: usize,
    splits: Vec<f64>,
    points: Vec<Complex64>,
    weights: Vec<f64>,
}

impl DiskGrid {
    /// Plain product grid with `n_r` radial and `n_theta` angular nodes.
    pub fn product(n_r: usize, n_theta: usize) -> Result<Self> {
        Self::product_split(n_r, n_theta, &[])
    }

    /// Product grid with radial panel boundaries at the given radii.
    pub fn product_split(n_r: usize, n_theta: usize, splits: &[f64]) -> Result<Self> {
        if n_r < 1 {
            return Err(Error::InvalidParameter("n_r must be at least 1".into()));
        }
        if n_theta < 4 {
            return Err(Error::InvalidParameter(
                "n_theta must be at least 4 for usable angular symmetry".into(),
            ));
        }
        let mut cuts: Vec<f64> = splits
            .iter()
            .copied()
            .filter(|&s| s > 0.0 && s < 1.0)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();

        let mut radial = Vec::new();
        let mut lo = 0.0;
        for &hi in cuts.iter().chain(std::iter::once(&1.0)) {
            for (r, w) in gauss_legendre_on(lo, hi, n_r) {
                radial.push((r, w * 2.0 * r));
            }
            lo = hi;
        }

        let mut points = Vec::with_capacity(radial.len() * n_theta);
        let mut weights = Vec::with_capacity(radial.len() * n_theta);
        let ang_w = 1.0 / n_theta as f64;
        for &(r, wr) in &radial {
            for j in 0..n_theta {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
                points.push(Complex64::from_polar(r, theta));
                weights.push(wr * ang_w);
            }
        }
        Ok(DiskGrid {
            radial,
            n_theta,
            n_r,
            splits: cuts,
            points,
            weights,
        })
    }

    /// Same panel structure with both directions refined 2x.
    pub fn refine(&self) -> Self {
        DiskGrid::product_split(2 * self.n_r, 2 * self.n_theta, &self.splits)
            .expect("refining a valid grid cannot fail")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_radial(&self) -> usize {
        self.radial.len()
    }

    pub fn radial_nodes(&self) -> &[(f64, f64)] {
        &self.radial
    }

    /// Largest node-to-node cell extent, used to size singular-integral
    /// exclusion neighborhoods.
    pub fn cell_scale(&self) -> f64 {
        let mut dr_max: f64 = 0.0;
        let mut prev = 0.0;
        for &(r, _) in &self.radial {
            dr_max = dr_max.max(r - prev);
            prev = r;
        }
        dr_max = dr_max.max(1.0 - prev);
        let dtheta = 2.0 * std::f64::consts::PI / self.n_theta as f64;
        dr_max.max(dtheta)
    }

    pub fn check_alignment(&self, f: &Field) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::LengthMismatch {
                got: f.len(),
                want: self.len(),
            });
        }
        Ok(())
    }

    /// `∫ f dA` with normalized area measure; deterministic left-to-right sum.
    pub fn integrate(&self, f: &Field) -> Result<Complex64> {
        self.check_alignment(f)?;
        Ok(self
            .weights
            .iter()
            .zip(&f.values)
            .map(|(&w, &v)| v * w)
            .sum())
    }

    pub fn integrate_fn(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.points)
            .map(|(&w, &z)| f(z) * w)
            .sum()
    }

    /// Integral together with an error estimate from one 2x refinement:
    /// the estimate is `2 |I_fine - I_coarse|` floored at a few ulps of the
    /// value, and reliably bounds the change under further refinement for
    /// smooth integrands.
    pub fn integrate_with_error(&self, f: impl Fn(Complex64) -> Complex64) -> (Complex64, f64) {
        let coarse = self.integrate_fn(&f);
        let fine = self.refine().integrate_fn(&f);
        let est = 2.0 * (fine - coarse).norm() + 64.0 * f64::EPSILON * fine.norm().max(1.0);
        (fine, est)
    }

    /// Discrete `‖f‖_p` with normalized area measure.
    pub fn norm_p(&self, f: &Field, p: f64) -> Result<f64> {
        self.check_alignment(f)?;
        let s: f64 = self
            .weights
            .iter()
            .zip(&f.values)
            .map(|(&w, &v)| w * v.norm().powf(p))
            .sum();
        Ok(s.powf(1.0 / p))
    }
}

/// Quadrature for `∫₀¹ · r^(n-1) dr`: Gauss–Jacobi in the weight `r^(n-1)`,
/// exact for polynomial integrands up to degree `2 n_pts - 1`.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    dim: u32,
}

impl RadialGrid {
    pub fn new(n_pts: usize, dim: u32) -> Result<Self> {
        Self::with_splits(n_pts, dim, &[])
    }

    /// Panel boundaries at the given radii. The panel touching `r = 0` keeps
    /// the Gauss–Jacobi rule (rescaled, so the `r^(n-1)` weight stays exact);
    /// interior panels use Gauss–Legendre with the weight folded in, which is
    /// spectrally accurate there since `r^(n-1)` is analytic away from 0.
    pub fn with_splits(n_pts: usize, dim: u32, splits: &[f64]) -> Result<Self> {
        if n_pts < 2 {
            return Err(Error::InvalidParameter("n_pts must be at least 2".into()));
        }
        if dim < 2 {
            return Err(Error::InvalidParameter(
                "radial measure r^(n-1) dr needs dimension n >= 2".into(),
            ));
        }
        let mut cuts: Vec<f64> = splits
            .iter()
            .copied()
            .filter(|&s| s > 0.0 && s < 1.0)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let first_hi = cuts.first().copied().unwrap_or(1.0);
        // [0, first_hi]: substitute r = first_hi * x so the weight is x^(n-1).
        let scale = first_hi.powi(dim as i32);
        for (x, w) in gauss_jacobi_01(n_pts, dim - 1) {
            nodes.push(first_hi * x);
            weights.push(scale * w);
        }
        let mut lo = first_hi;
        for &hi in cuts.iter().skip(1).chain(std::iter::once(&1.0)) {
            if hi <= lo {
                continue;
            }
            for (r, w) in gauss_legendre_on(lo, hi, n_pts) {
                nodes.push(r);
                weights.push(w * r.powi(dim as i32 - 1));
            }
            lo = hi;
        }
        Ok(RadialGrid {
            nodes,
            weights,
            dim,
        })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total mass `∫₀¹ r^(n-1) dr = 1/n`.
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&r, &w)| w * f(r))
            .sum()
    }

    pub fn integrate_values(&self, values: &[Complex64]) -> Result<Complex64> {
        if values.len() != self.nodes.len() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                want: self.nodes.len(),
            });
        }
        Ok(values.iter().zip(&self.weights).map(|(&v, &w)| v * w).sum())
    }
}

/// Geometry of the unit ball `B` in `R^n` and of the concentric half-volume
/// ball `B₀` of radius `ρ_n = 2^(-1/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSpec {
    dim: u32,
}

impl BallSpec {
    pub fn new(dim: u32) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(
                "ball dimension must be >= 2".into(),
            ));
        }
        Ok(BallSpec { dim })
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Radius `ρ_n = 2^(-1/n)` of the half-volume ball.
    pub fn rho(&self) -> f64 {
        0.5f64.powf(1.0 / f64::from(self.dim))
    }

    /// `ρ_n²`, the validity radius for the Kelvin-reflected Newton kernel.
    pub fn rho_sq(&self) -> f64 {
        0.5f64.powf(2.0 / f64::from(self.dim))
    }

    /// Volume `c_n` of the unit ball.
    pub fn unit_ball_volume(&self) -> f64 {
        // c_1 = 2, c_2 = π, c_n = 2π/n · c_{n-2}
        let (mut v, mut n) = if self.dim.is_multiple_of(2) {
            (std::f64::consts::PI, 2)
        } else {
            (2.0, 1)
        };
        while n < self.dim {
            n += 2;
            v *= 2.0 * std::f64::consts::PI / f64::from(n);
        }
        v
    }

    /// Surface area of the unit sphere, `n c_n`.
    pub fn sphere_area(&self) -> f64 {
        f64::from(self.dim) * self.unit_ball_volume()
    }

    /// The canonical annihilator `σ`: -1 on `B₀`, +1 on `B \ B₀`, 0 off `B`.
    pub fn sigma(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        if r >= 1.0 {
            0.0
        } else if r < self.rho() {
            -1.0
        } else {
            1.0
        }
    }
}

/// Euclidean norm of a coordinate slice.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Seeded quadrature point set on the unit ball of `R^n`: a deterministic
/// Gauss–Jacobi rule in the radius crossed with pseudo-random directions on
/// the sphere. Integrates against Lebesgue measure; the direction average is
/// Monte-Carlo, so estimates come with a standard error.
#[derive(Debug, Clone)]
pub struct BallSampler {
    spec: BallSpec,
    radial: RadialGrid,
    directions: Vec<Vec<f64>>,
    seed: u64,
}

impl BallSampler {
    pub fn new(spec: BallSpec, n_radial: usize, n_directions: usize, seed: u64) -> Result<Self> {
        Self::with_radial_splits(spec, n_radial, n_directions, seed, &[])
    }

    /// Sampler whose radial rule has panel boundaries at the given radii
    /// (pass `[ρ_n]` when integrating `σ`-like discontinuous data).
    pub fn with_radial_splits(
        spec: BallSpec,
        n_radial: usize,
        n_directions: usize,
        seed: u64,
        splits: &[f64],
    ) -> Result<Self> {
        if n_directions == 0 {
            return Err(Error::InvalidParameter(
                "sampler needs at least one direction".into(),
            ));
        }
        let radial = RadialGrid::with_splits(n_radial, spec.dim(), splits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = spec.dim() as usize;
        let mut directions = Vec::with_capacity(n_directions);
        while directions.len() < n_directions {
            let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = norm(&v);
            if n > 1e-12 {
                directions.push(v.iter().map(|c| c / n).collect());
            }
        }
        Ok(BallSampler {
            spec,
            radial,
            directions,
            seed,
        })
    }

    pub fn spec(&self) -> &BallSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_points(&self) -> usize {
        self.radial.len() * self.directions.len()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn radial(&self) -> &RadialGrid {
        &self.radial
    }

    /// All sample points with their Lebesgue weights.
    pub fn points(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        let ang = self.spec.sphere_area() / self.directions.len() as f64;
        self.radial
            .nodes()
            .iter()
            .zip(self.radial.weights())
            .flat_map(move |(&r, &w)| {
                self.directions.iter().map(move |d| {
                    let p: Vec<f64> = d.iter().map(|c| c * r).collect();
                    (p, w * ang)
                })
            })
    }

    /// Monte-Carlo estimate of `∫_B f dx` (Lebesgue) with its standard error.
    ///
    /// Each direction yields an independent unbiased estimate (the radial
    /// integral along that ray times the sphere area); value and error are
    /// the mean and standard error over directions.
    pub fn integrate_fn(&self, f: impl Fn(&[f64]) -> f64) -> (f64, f64) {
        let area = self.spec.sphere_area();
        let mut per_dir = Vec::with_capacity(self.directions.len());
        let mut x = vec![0.0; self.spec.dim() as usize];
        for d in &self.directions {
            let mut acc = 0.0;
            for (&r, &w) in self.radial.nodes().iter().zip(self.radial.weights()) {
                for (xi, di) in x.iter_mut().zip(d) {
                    *xi = di * r;
                }
                acc += w * f(&x);
            }
            per_dir.push(acc * area);
        }
        let n = per_dir.len() as f64;
        let mean = per_dir.iter().sum::<f64>() / n;
        let var = per_dir.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        (mean, (var / n).sqrt())
    }

    /// The direction set scaled to a sphere of the given radius.
    pub fn sphere_points(&self, radius: f64) -> Vec<Vec<f64>> {
        self.directions
            .iter()
            .map(|d| d.iter().map(|c| c * radius).collect())
            .collect()
    }
}
