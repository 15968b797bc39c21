//! One-dimensional Gaussian quadrature rules.
//!
//! Two rules are provided: Gauss–Legendre on an arbitrary interval, and a
//! Gauss–Jacobi rule for the weight `x^beta` on `[0, 1]`, which is the radial
//! weight `r^(n-1) dr` appearing in polar and spherical volume integrals.

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Nodes are computed by Newton iteration on the Legendre recurrence with the
/// usual Chebyshev initial guess; accurate to near machine precision for the
/// sizes used here (n up to a few thousand).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "quadrature rule needs at least one node");
    let mut rule = Vec::with_capacity(n);
    for i in 1..=n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    // Mirror to the full symmetric rule, keeping nodes increasing.
    let mut full: Vec<(f64, f64)> = rule.iter().map(|&(x, w)| (-x, w)).collect();
    if n % 2 == 1 {
        full.truncate(n / 2 + 1);
    }
    for &(x, w) in rule.iter().rev() {
        if x > 0.0 {
            full.push((x, w));
        }
    }
    debug_assert_eq!(full.len(), n);
    full
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n`-point Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(n)
        .into_iter()
        .map(|(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Gauss rule for `∫₀¹ f(x) x^beta dx` with integer `beta ≥ 0`.
///
/// Exact for polynomials `f` of degree `≤ 2n - 1`. Built by Golub–Welsch from
/// the Jacobi (α = 0, β = beta) three-term recurrence on `[-1, 1]`, then
/// mapped to `[0, 1]`.
pub fn gauss_jacobi_01(n: usize, beta: u32) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    if beta == 0 {
        return gauss_legendre_on(0.0, 1.0, n);
    }
    let b = f64::from(beta);
    // Recurrence coefficients for the monic Jacobi polynomials with weight
    // (1 + t)^b on [-1, 1]: p_{k+1} = (t - alpha_k) p_k - beta_k p_{k-1}.
    let mut alpha = vec![0.0f64; n];
    let mut betac = vec![0.0f64; n];
    alpha[0] = b / (b + 2.0);
    betac[0] = 2f64.powf(b + 1.0) / (b + 1.0); // zeroth moment on [-1, 1]
    for k in 1..n {
        let kf = k as f64;
        alpha[k] = b * b / ((2.0 * kf + b) * (2.0 * kf + b + 2.0));
        betac[k] = if k == 1 {
            4.0 * (1.0 + b) / ((b + 2.0) * (b + 2.0) * (b + 3.0))
        } else {
            4.0 * kf * kf * (kf + b) * (kf + b)
                / ((2.0 * kf + b).powi(2) * (2.0 * kf + b + 1.0) * (2.0 * kf + b - 1.0))
        };
    }

    let mut d = alpha;
    let mut e: Vec<f64> = (1..n).map(|k| betac[k].sqrt()).collect();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiag_ql_first_row(&mut d, &mut e, &mut z);

    let mu0 = betac[0];
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let w = mu0 * z[i] * z[i];
            // Map t in [-1, 1] to x in [0, 1]; the weight picks up 2^{-(b+1)}.
            ((1.0 + d[i]) / 2.0, w * 2f64.powf(-(b + 1.0)))
        })
        .collect();
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

/// Implicit-shift QL iteration for a symmetric tridiagonal matrix,
/// accumulating only the first row of the eigenvector matrix — which is all
/// Golub–Welsch weights need. `d` holds the diagonal (eigenvalues on exit),
/// `e` the subdiagonal in `e[0..n-1]` with `e[n-1]` scratch, `z` the first
/// row accumulator (pass the first unit vector).
fn tridiag_ql_first_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.abs().copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
