//! Closed-form best approximants used as independent oracles.
//!
//! Monomials `z^n z̄^m` have best analytic approximant `c·z^{n-m}` (zero when
//! `m > n`) where the constant is the root of a one-dimensional sign
//! equation; radial data has a unique constant best harmonic approximant at
//! p = 1; and the Newton kernel with pole `y`, `|y| ≤ ρ_n²`, has the Kelvin
//! reflection of itself as best harmonic approximant. Each oracle carries a
//! pointwise certificate that can be re-verified by sampling.

use crate::basis::{BasisSpec, Coeffs};
use crate::certificates::{Verdict, Witness};
use crate::grid::{norm, BallSampler, BallSpec, RadialGrid};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Analytic,
    Harmonic,
}

/// Best approximation of the monomial `z^n z̄^m` in `L^p`.
#[derive(Debug, Clone, Copy)]
pub struct MonomialProblem {
    pub n: u32,
    pub m: u32,
    pub p: f64,
    pub space: Space,
}

/// Value of `Ψ(c) = ∫₀¹ r^{p(n-m)} |r^{2m} − c|^{p-1} sgn(r^{2m} − c) r dr`,
/// computed with a panel boundary at the sign change `r = c^{1/2m}`.
pub fn monomial_sign_equation(n: u32, m: u32, p: f64, c: f64) -> f64 {
    let split = c.powf(1.0 / (2.0 * f64::from(m)));
    let rule = RadialGrid::with_splits(200, 2, &[split]).expect("static rule parameters");
    rule.integrate_fn(|r| {
        let t = r.powi(2 * m as i32) - c;
        r.powf(p * f64::from(n - m)) * t.abs().powf(p - 1.0) * t.signum()
    })
}

/// The constant `c = c(n, m, p) ∈ (0, 1)` making
/// `(z^n z̄^m − c z^{n-m}) / (z^{n-m}(|z|^{2m} − c))`-type densities
/// annihilate: the root of [`monomial_sign_equation`], found by bisection.
///
/// Applicable for `n ≥ m ≥ 1`; for `m > n` the best approximant is zero and
/// for `m = 0` the monomial is already analytic.
pub fn monomial_constant(n: u32, m: u32, p: f64) -> Result<f64> {
    if p < 1.0 {
        return Err(Error::InvalidParameter("p must be >= 1".into()));
    }
    if m > n {
        return Err(Error::NotApplicable(
            "m > n: the best analytic approximant is 0, no constant involved".into(),
        ));
    }
    if m == 0 {
        return Err(Error::NotApplicable(
            "m = 0: the monomial is analytic, approximant equals the data".into(),
        ));
    }
    // Ψ is strictly decreasing with Ψ(0⁺) > 0 > Ψ(1⁻).
    let mut lo = 1e-9;
    let mut hi = 1.0 - 1e-9;
    if monomial_sign_equation(n, m, p, lo) <= 0.0 {
        return Err(Error::InvalidParameter(
            "sign equation not positive at c = 0+".into(),
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = monomial_sign_equation(n, m, p, mid);
        if f_mid.abs() < 1e-14 {
            return Ok(mid);
        }
        if f_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form best approximant to `z^n z̄^m`, as basis coefficients.
///
/// Analytic: 0 for `m > n`, `c z^{n-m}` otherwise. Harmonic: `c z^{n-m}`
/// for `n ≥ m` and `c z̄^{m-n}` for `m ≥ n`, with the roles of the
/// exponents swapped in the constant.
pub fn monomial_best(prob: &MonomialProblem) -> Result<(BasisSpec, Coeffs)> {
    let MonomialProblem { n, m, p, space } = *prob;
    match space {
        Space::Analytic => {
            if m > n {
                let spec = BasisSpec::analytic(0);
                return Ok((spec, vec![Complex64::ZERO]));
            }
            let spec = BasisSpec::analytic((n - m) as usize);
            let mut coeffs = vec![Complex64::ZERO; spec.dim()];
            let c = if m == 0 {
                1.0 // ω itself is the approximant
            } else {
                monomial_constant(n, m, p)?
            };
            coeffs[(n - m) as usize] = Complex64::new(c, 0.0);
            Ok((spec, coeffs))
        }
        Space::Harmonic => {
            let (hi, lo) = (n.max(m), n.min(m));
            let degree = (hi - lo) as usize;
            let spec = BasisSpec::harmonic2d(degree);
            let mut coeffs = vec![Complex64::ZERO; spec.dim()];
            let c = if lo == 0 {
                1.0
            } else {
                monomial_constant(hi, lo, p)?
            };
            let idx = if degree == 0 {
                0
            } else if n >= m {
                degree // z^{n-m}
            } else {
                2 * degree // z̄^{m-n}
            };
            coeffs[idx] = Complex64::new(c, 0.0);
            Ok((spec, coeffs))
        }
    }
}

/// Result of the radial constant search.
#[derive(Debug, Clone)]
pub struct RadialBest {
    pub constant: Complex64,
    /// `Σ v_i |a_i − c|`, the discrete weighted L¹ objective.
    pub objective: f64,
    /// Set when the minimizer is a segment (collinear values with an exact
    /// weight split), in which case `constant` is one point of it.
    pub flat: bool,
    pub converged: bool,
}

/// Best constant approximant to radial data at p = 1: the minimizer of
/// `∫₀¹ |a(r) − c| r^{n-1} dr` over complex `c`.
///
/// Real data reduces to a weighted median; the crossing of the cumulative
/// weight through half mass is interpolated between adjacent sample values,
/// which recovers the continuum median to `O(spacing²)` instead of stalling
/// on the nearest node. Genuinely complex data uses Weiszfeld iteration with
/// an anchor-point safeguard; collinear complex data is rotated onto a line
/// and handled by the median path, reporting a flat segment when the weights
/// split exactly.
pub fn radial_best_constant(values: &[Complex64], grid: &RadialGrid) -> Result<RadialBest> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            got: values.len(),
            want: grid.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::InvalidParameter("empty radial data".into()));
    }
    let w = grid.weights();

    // Collinearity via the smallest principal second moment.
    let total: f64 = w.iter().sum();
    let mean: Complex64 = values
        .iter()
        .zip(w)
        .map(|(&v, &wi)| v * wi)
        .sum::<Complex64>()
        / total;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&v, &wi) in values.iter().zip(w) {
        let d = v - mean;
        sxx += wi * d.re * d.re;
        sxy += wi * d.re * d.im;
        syy += wi * d.im * d.im;
    }
    let tr = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let small_eig = if tr > 0.0 {
        0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt())
    } else {
        0.0
    };
    let scale = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);

    if small_eig <= 1e-12 * tr.max(1e-300) {
        // Values lie on a line through `mean` with direction `u`.
        let dir = if sxx >= syy {
            Complex64::new(sxx - small_eig, sxy)
        } else {
            Complex64::new(sxy, syy - small_eig)
        };
        let u = if dir.norm() > 0.0 {
            dir / dir.norm()
        } else {
            Complex64::ONE
        };
        let ts: Vec<f64> = values.iter().map(|&v| ((v - mean) * u.conj()).re).collect();
        let med = weighted_median_interpolated(&ts, w);
        let c = mean + u * med.value;
        let objective = objective_at(values, w, c);
        return Ok(RadialBest {
            constant: c,
            objective,
            flat: med.flat,
            converged: true,
        });
    }

    // Weiszfeld iteration for the weighted geometric median.
    let mut c = mean;
    let mut converged = false;
    for _ in 0..500 {
        let mut num = Complex64::ZERO;
        let mut den = 0.0;
        let mut at_anchor = None;
        for (&v, &wi) in values.iter().zip(w) {
            let d = (v - c).norm();
            if d < 1e-14 * scale.max(1.0) {
                at_anchor = Some(v);
                continue;
            }
            num += v * (wi / d);
            den += wi / d;
        }
        if let Some(anchor) = at_anchor {
            // Test the anchor's optimality; if not optimal, nudge along the
            // descent direction by an ulp-scale step and continue.
            let mut subgrad = Complex64::ZERO;
            let mut wa = 0.0;
            for (&v, &wi) in values.iter().zip(w) {
                let d = (v - c).norm();
                if d < 1e-14 * scale.max(1.0) {
                    wa += wi;
                } else {
                    subgrad -= (v - c) / d * wi;
                }
            }
            if subgrad.norm() <= wa {
                converged = true;
                break;
            }
            c = anchor - subgrad / subgrad.norm() * (1e-9 * scale.max(1e-9));
            continue;
        }
        let next = num / den;
        let step = (next - c).norm();
        c = next;
        if step < 1e-12 * scale.max(1.0) {
            converged = true;
            break;
        }
    }
    let objective = objective_at(values, w, c);
    Ok(RadialBest {
        constant: c,
        objective,
        flat: false,
        converged,
    })
}

fn objective_at(values: &[Complex64], w: &[f64], c: Complex64) -> f64 {
    values
        .iter()
        .zip(w)
        .map(|(&v, &wi)| wi * (v - c).norm())
        .sum()
}

struct MedianResult {
    value: f64,
    flat: bool,
}

fn weighted_median_interpolated(ts: &[f64], w: &[f64]) -> MedianResult {
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&a, &b| ts[a].partial_cmp(&ts[b]).unwrap());
    let total: f64 = w.iter().sum();
    let half = 0.5 * total;

    // Group equal values, accumulating weight per distinct value.
    let mut vals: Vec<f64> = Vec::new();
    let mut mass: Vec<f64> = Vec::new();
    for &i in &order {
        match vals.last() {
            Some(&last) if (ts[i] - last).abs() <= 1e-14 * (1.0 + last.abs()) => {
                *mass.last_mut().unwrap() += w[i];
            }
            _ => {
                vals.push(ts[i]);
                mass.push(w[i]);
            }
        }
    }

    // Flat segment: the objective's slope on the gap after value k is
    // (mass at or below k) − (mass above k); zero slope means every point of
    // the gap minimizes.
    let mut below = 0.0;
    for k in 0..vals.len() - 1 {
        below += mass[k];
        if (below - half).abs() <= 1e-12 * total {
            return MedianResult {
                value: 0.5 * (vals[k] + vals[k + 1]),
                flat: true,
            };
        }
    }

    // Otherwise interpolate the crossing of the midpoint-convention CDF:
    // each quadrature node represents mass spread around it, so the CDF is
    // taken as (mass before) + (own mass)/2 at the node, which restores
    // O(spacing²) accuracy for smooth densities.
    let mut prev_t = vals[0];
    let mut prev_g = 0.5 * mass[0];
    if prev_g >= half {
        return MedianResult {
            value: vals[0],
            flat: false,
        };
    }
    let mut below = 0.0;
    for k in 1..vals.len() {
        below += mass[k - 1];
        let g = below + 0.5 * mass[k];
        if g >= half {
            let frac = (half - prev_g) / (g - prev_g);
            return MedianResult {
                value: prev_t + (vals[k] - prev_t) * frac.clamp(0.0, 1.0),
                flat: false,
            };
        }
        prev_t = vals[k];
        prev_g = g;
    }
    MedianResult {
        value: *vals.last().unwrap(),
        flat: false,
    }
}

/// A point and its Kelvin reflection in the sphere of radius `ρ_n`.
#[derive(Debug, Clone)]
pub struct KelvinPoint {
    pub y: Vec<f64>,
    pub y_prime: Vec<f64>,
    pub rho: f64,
}

/// Reflect `y ≠ 0` in the sphere `|x| = ρ_n`: the image lies on the same ray
/// with `|y||y'| = ρ_n²`.
pub fn kelvin_reflect(y: &[f64], spec: &BallSpec) -> Result<KelvinPoint> {
    if y.len() != spec.dim() as usize {
        return Err(Error::InvalidParameter(format!(
            "point has {} coordinates for dimension {}",
            y.len(),
            spec.dim()
        )));
    }
    let r = norm(y);
    if r == 0.0 {
        return Err(Error::ExcludedPoint(
            "the origin reflects to infinity; use the constant-approximant branch".into(),
        ));
    }
    let factor = spec.rho_sq() / (r * r);
    Ok(KelvinPoint {
        y: y.to_vec(),
        y_prime: y.iter().map(|c| c * factor).collect(),
        rho: spec.rho(),
    })
}

/// The Newton kernel with pole `y` and its closed-form best harmonic
/// approximant on the unit ball.
///
/// For `n ≥ 3`, `f(x) = |x − y|^{2-n}` and
/// `h(x) = (ρ/|y|)^{n-2} |x − y'|^{2-n}`; for `n = 2`, `f(x) = log|x − y|`
/// and `h(x) = log(√2 |y| |x − y'|)`. At `y = 0` the approximant is the
/// constant `ρ^{2-n}` (n ≥ 3) or `log(1/√2)` (n = 2), the `y → 0` limit of
/// the reflected kernel. The pair is a certified best approximation when
/// `|y| ≤ ρ_n²` (the reflected pole then stays outside the closed ball).
#[derive(Debug, Clone)]
pub struct NewtonPair {
    pub spec: BallSpec,
    pub pole: Vec<f64>,
    reflected: Option<Vec<f64>>,
}

pub fn newton_best_harmonic(y: &[f64], spec: &BallSpec) -> Result<NewtonPair> {
    if y.len() != spec.dim() as usize {
        return Err(Error::InvalidParameter(format!(
            "point has {} coordinates for dimension {}",
            y.len(),
            spec.dim()
        )));
    }
    let reflected = if norm(y) == 0.0 {
        None
    } else {
        Some(kelvin_reflect(y, spec)?.y_prime)
    };
    Ok(NewtonPair {
        spec: *spec,
        pole: y.to_vec(),
        reflected,
    })
}

impl NewtonPair {
    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    /// The kernel `f` itself.
    pub fn f(&self, x: &[f64]) -> f64 {
        let d = Self::dist(x, &self.pole);
        if self.spec.dim() == 2 {
            d.ln()
        } else {
            d.powi(2 - self.spec.dim() as i32)
        }
    }

    /// The best harmonic approximant `h`.
    pub fn h(&self, x: &[f64]) -> f64 {
        let n = self.spec.dim();
        match &self.reflected {
            None => {
                if n == 2 {
                    (0.5f64.sqrt()).ln()
                } else {
                    self.spec.rho().powi(2 - n as i32)
                }
            }
            Some(yp) => {
                let r = norm(&self.pole);
                let d = Self::dist(x, yp);
                if n == 2 {
                    (2.0f64.sqrt() * r * d).ln()
                } else {
                    (self.spec.rho() / r).powi(n as i32 - 2) * d.powi(2 - n as i32)
                }
            }
        }
    }

    /// Whether the closed-form pair is a certified best approximation
    /// (`|y| ≤ ρ_n²`, reflected pole outside the closed ball).
    pub fn valid(&self) -> bool {
        norm(&self.pole) <= self.spec.rho_sq() + 1e-12
    }

    /// Sign of `f − h` relative to σ: `f − h = expected_sign · |f − h| · σ`.
    /// The power kernel (n ≥ 3) decreases in distance, the log kernel
    /// increases, so the constant flips between the two.
    pub fn expected_sign(&self) -> f64 {
        if self.spec.dim() == 2 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Pointwise verification that `sgn(ω − h) = s·σ` over a sampled ball,
/// excluding a band around the sign interface `|x| = ρ_n`.
pub fn sign_certificate(
    omega: impl Fn(&[f64]) -> f64,
    h: impl Fn(&[f64]) -> f64,
    expected_sign: f64,
    spec: &BallSpec,
    sampler: &BallSampler,
    exclusion_band: f64,
) -> Verdict {
    let rho = spec.rho();
    let mut checked = 0usize;
    let mut worst_margin = f64::INFINITY;
    let mut worst_point = Vec::new();
    for (x, _) in sampler.points() {
        let r = norm(&x);
        if (r - rho).abs() <= exclusion_band || r >= 1.0 {
            continue;
        }
        checked += 1;
        let value = expected_sign * (omega(&x) - h(&x)) * spec.sigma(&x);
        if value < worst_margin {
            worst_margin = value;
            worst_point = x;
        }
        if value <= 0.0 {
            return Verdict::Refuted(Witness::point(
                worst_point,
                value,
                "sign pattern violation of (ω − h)·σ",
            ));
        }
    }
    if checked == 0 {
        return Verdict::Inconclusive {
            blocking_tolerance: exclusion_band,
            detail: "exclusion band swallowed every sample".into(),
        };
    }
    Verdict::Certified(Witness::point(
        worst_point,
        worst_margin,
        "smallest sign margin over samples",
    ))
}

/// Certificate for the Newton-kernel best approximation at pole `y`.
pub fn newton_sign_certificate(
    y: &[f64],
    spec: &BallSpec,
    sampler: &BallSampler,
    exclusion_band: f64,
) -> Result<Verdict> {
    let pair = newton_best_harmonic(y, spec)?;
    let expected = pair.expected_sign();
    let fp = pair.clone();
    let hp = pair;
    Ok(sign_certificate(
        move |x| fp.f(x),
        move |x| hp.h(x),
        expected,
        spec,
        sampler,
        exclusion_band,
    ))
}

/// The characterization of best harmonic L¹ approximants to functions
/// subharmonic on the ball: `h` is best iff it matches `ω` on the
/// half-volume sphere and sits below `ω` outside it. Harmonicity of `h` and
/// subharmonicity of `ω` are the caller's assertion and are recorded, not
/// re-proved.
pub fn aghr_verify(
    omega: impl Fn(&[f64]) -> f64,
    h: impl Fn(&[f64]) -> f64,
    spec: &BallSpec,
    sampler: &BallSampler,
    tol: f64,
) -> Verdict {
    let rho = spec.rho();
    // (i) equality on the half-volume sphere
    let mut worst_eq: f64 = 0.0;
    let mut worst_eq_pt = Vec::new();
    for x in sampler.sphere_points(rho) {
        let d = (h(&x) - omega(&x)).abs();
        if d > worst_eq {
            worst_eq = d;
            worst_eq_pt = x;
        }
    }
    if worst_eq > tol {
        return Verdict::Refuted(Witness::point(
            worst_eq_pt,
            worst_eq,
            "equality failure |h − ω| on the half-volume sphere",
        ));
    }
    // (ii) h ≤ ω outside the half-volume ball
    let mut worst_ineq = f64::INFINITY;
    let mut worst_ineq_pt = Vec::new();
    for (x, _) in sampler.points() {
        if norm(&x) < rho {
            continue;
        }
        let d = omega(&x) - h(&x);
        if d < worst_ineq {
            worst_ineq = d;
            worst_ineq_pt = x;
        }
    }
    if worst_ineq < -tol {
        return Verdict::Refuted(Witness::point(
            worst_ineq_pt,
            worst_ineq,
            "domination failure ω − h outside the half-volume ball",
        ));
    }
    Verdict::Certified(Witness::point(
        worst_eq_pt,
        worst_eq.max(-worst_ineq.min(0.0)),
        "worst equality/domination slack (harmonicity of h asserted by caller)",
    ))
}

/// Bounded modification of the Newton kernel that keeps the certificate.
///
/// `min(f, M)` for `n ≥ 3` (the kernel blows up to +∞), `max(f, −M)` for
/// the planar log kernel (which dives to −∞). The cutoff level must clear
/// the kernel's range on the sign interface `|x| = ρ_n`, otherwise the sign
/// pattern across the half-volume sphere would be destroyed.
#[derive(Debug, Clone)]
pub struct CutoffKernel {
    pair: NewtonPair,
    level: f64,
}

pub fn newton_cutoff(y: &[f64], spec: &BallSpec, level: f64) -> Result<CutoffKernel> {
    let pair = newton_best_harmonic(y, spec)?;
    let r = norm(y);
    let rho = spec.rho();
    // The extreme of |f| on the sphere |x| = ρ is attained at the nearest
    // sphere point, distance ρ − |y| (poles with |y| ≤ ρ² are inside B₀).
    let nearest = (rho - r).abs().max(1e-300);
    let sphere_extreme = if spec.dim() == 2 {
        -(nearest.ln()) // f → −∞, compare against −f
    } else {
        nearest.powi(2 - spec.dim() as i32)
    };
    if level <= sphere_extreme {
        return Err(Error::InvalidParameter(format!(
            "cutoff level {level} does not clear the sphere extreme {sphere_extreme:.6}"
        )));
    }
    Ok(CutoffKernel { pair, level })
}

impl CutoffKernel {
    /// The bounded data `ω`.
    pub fn omega(&self, x: &[f64]) -> f64 {
        let f = self.pair.f(x);
        if self.pair.spec.dim() == 2 {
            f.max(-self.level)
        } else {
            f.min(self.level)
        }
    }

    pub fn pair(&self) -> &NewtonPair {
        &self.pair
    }

    /// Sign certificate of the cutoff data against the uncut approximant.
    pub fn certify(&self, sampler: &BallSampler, exclusion_band: f64) -> Verdict {
        let spec = self.pair.spec;
        let expected = self.pair.expected_sign();
        let this = self.clone();
        let pair = self.pair.clone();
        sign_certificate(
            move |x| this.omega(x),
            move |x| pair.h(x),
            expected,
            &spec,
            sampler,
            exclusion_band,
        )
    }
}
