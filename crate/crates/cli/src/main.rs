//! Command-line driver for best-mean-approximation experiments.
//!
//! Subcommands: `solve`, `certify`, `oracle`, `potential`, `peakset`,
//! `sweep`. Reports are JSON (sweeps default to CSV tables); every piece of
//! randomness sits behind `--seed`, and rerunning a command reproduces its
//! report byte for byte. Exit codes: 0 success/certified, 1 error,
//! 2 refuted, 3 inconclusive.

use clap::{Args, Parser, Subcommand};
use meanapprox::basis;
use meanapprox::catalog::{self, CatalogFn};
use meanapprox::certificates::{
    badly_approximable_test, check_alignment, construct_dual, prop_witness, Problem, Verdict,
    Witness,
};
use meanapprox::grid::{BallSampler, BallSpec, DiskGrid, Field};
use meanapprox::oracles::{
    self, kelvin_reflect, monomial_best, monomial_constant, newton_best_harmonic, newton_cutoff,
    newton_sign_certificate, radial_best_constant, MonomialProblem, Space,
};
use meanapprox::potentials::{
    ahlfors_beurling_check, cauchy_transform, cor74_compare, l_apply_potential,
    min_norm_extension_sup, newton_potential, peak_lower_bounds, schwarz_potential,
    sigma_potential_closed, thinness_check, BallQuad, PlaneDensity, PoleFamily, RandomAnnihilator,
    ThinnessVerdict,
};
use meanapprox::solver::{boundary_norm_sweep, modulus_dt, solve_best, SolverOptions};
use meanapprox::{Complex64, Error};
use meanapprox_cli::{fieldio, report};
use report::{coeffs_json, complex_json, verdict_exit_code, verdict_json, Report};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "meanapprox",
    about = "Best L^p approximation by analytic and harmonic functions, with certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Disk grid as NR,NT (radial x angular nodes)
    #[arg(long, global = true, default_value = "128,256")]
    grid: String,
    /// Additional radial panel boundaries, comma separated
    #[arg(long, global = true)]
    splits: Option<String>,
    /// Seed for all pseudo-randomness
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Certificate / verdict tolerance
    #[arg(long, global = true, default_value_t = 1e-3)]
    tol: f64,
    /// Output path (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for sweeps: json or csv
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a best-approximation problem and report its certificate
    Solve {
        #[command(flatten)]
        common: CommonOpts,
        /// Catalog function or samples:PATH
        #[arg(long)]
        omega: String,
        /// Basis: analytic:M, harmonic2d:M, constants
        #[arg(long)]
        basis: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Moment order for the dual certificate (default 2·degree + 4)
        #[arg(long)]
        k: Option<usize>,
        /// Optional CSV dump of the residual field
        #[arg(long)]
        residual_csv: Option<PathBuf>,
        /// Re-solve the sign-preserving blend ρ·ω + (1−ρ)·f* with the named
        /// positive weight (one, half, bump) and report coefficient drift
        #[arg(long)]
        reweight_rho: Option<String>,
    },
    /// Verify optimality / badly-approximability of a pair
    Certify {
        #[command(flatten)]
        common: CommonOpts,
        /// Catalog function, or newton:Y@DIM when --fstar oracle
        #[arg(long)]
        omega: String,
        /// zero (badly-approximable test), solve, or oracle
        #[arg(long, default_value = "zero")]
        fstar: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Basis for --fstar solve
        #[arg(long, default_value = "analytic:4")]
        basis: String,
    },
    /// Closed-form oracles
    Oracle {
        #[command(flatten)]
        common: CommonOpts,
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// Potential-theory transforms and comparisons
    Potential {
        #[command(flatten)]
        common: CommonOpts,
        #[command(subcommand)]
        which: PotentialCmd,
    },
    /// Harmonic peak-set machinery
    Peakset {
        #[command(flatten)]
        common: CommonOpts,
        #[command(subcommand)]
        which: PeaksetCmd,
    },
    /// Degree and smoothness sweeps (CSV tables)
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[command(subcommand)]
        which: SweepCmd,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Best approximant to z^n z̄^m
    Monomial {
        n: u32,
        m: u32,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// analytic or harmonic
        #[arg(long, default_value = "analytic")]
        space: String,
    },
    /// Best constant for radial data at p = 1
    Radial {
        /// radial profile id (r, r2, sign_split, two_phase)
        #[arg(long)]
        profile: String,
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, default_value_t = 2000)]
        n_pts: usize,
    },
    /// Kelvin reflection of a point
    Kelvin {
        #[arg(long)]
        y: String,
        #[arg(long)]
        dim: u32,
    },
    /// Newton-kernel best harmonic approximant and its sign certificate
    Newton {
        #[arg(long)]
        y: String,
        #[arg(long)]
        dim: u32,
        /// bounded cutoff level (min(f,M), or max(f,−M) in the plane)
        #[arg(long)]
        cutoff: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        band: f64,
    },
    /// Best-harmonic characterization check for ω = |x|² against a constant
    Aghr {
        #[arg(long)]
        dim: u32,
        /// perturbation added to the exact constant ρ²
        #[arg(long, default_value_t = 0.0)]
        h_shift: f64,
    },
}

#[derive(Subcommand)]
enum PotentialCmd {
    /// Cauchy transform of a region indicator at a point
    Cauchy {
        #[arg(long)]
        region: String,
        /// evaluation point X,Y
        #[arg(long)]
        at: String,
    },
    /// Extremal bound scan for a half-area region
    Ahlfors {
        #[arg(long)]
        region: String,
        #[arg(long, default_value_t = 64)]
        probes: usize,
    },
    /// Newtonian potential of a named density
    Newton {
        /// sigma, chi_ball, chi_b0, annihilator:SEED
        #[arg(long)]
        density: String,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 3)]
        dim: u32,
        #[arg(long, default_value_t = 4096)]
        directions: usize,
    },
    /// Radial operator applied to the potential of a density
    LOp {
        #[arg(long)]
        density: String,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 3)]
        dim: u32,
        #[arg(long, default_value_t = 4096)]
        directions: usize,
    },
    /// Potential-domination comparison |E∗g| ≤ |E∗σ| inside the critical radius
    Cor74 {
        #[arg(long)]
        density: String,
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 3)]
        dim: u32,
        #[arg(long, default_value_t = 4096)]
        directions: usize,
    },
    /// Modified Schwarz potential of the unit sphere
    Schwarz {
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 2)]
        dim: u32,
    },
    /// Boundary-vanishing witness of the rational annihilator
    Witness {
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long)]
        at: String,
    },
}

#[derive(Subcommand)]
enum PeaksetCmd {
    /// Boundary-thinness criterion
    Thinness {
        #[arg(long)]
        region: String,
        #[arg(long, default_value_t = 14)]
        levels: usize,
    },
    /// Lower bounds for the mass ratios A(F), B(F)
    Bounds {
        #[arg(long)]
        region: String,
        /// approach direction X,Y for the pole family
        #[arg(long, default_value = "1,0")]
        direction: String,
        #[arg(long, default_value_t = 20)]
        levels: usize,
        /// include the constant 1 in the family
        #[arg(long)]
        with_constant: bool,
    },
    /// Sup norms of minimum-norm annihilating extensions of 1 on F
    Extension {
        #[arg(long)]
        region: String,
        /// moment orders, comma separated
        #[arg(long, default_value = "2,4,8")]
        orders: String,
    },
}

#[derive(Subcommand)]
enum SweepCmd {
    /// Boundary norms of best approximants per degree
    BoundaryNorm {
        #[arg(long)]
        omega: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// inclusive range A..B
        #[arg(long)]
        degrees: String,
    },
    /// Rotational second-difference modulus over a t range
    Modulus {
        #[arg(long)]
        omega: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value = "analytic:3")]
        basis: String,
        #[arg(long, default_value = "0.01,0.1")]
        t_range: String,
        #[arg(long, default_value_t = 10)]
        t_count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), Error> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::InvalidParameter(format!("--grid expects NR,NT, got '{s}'")))?;
    Ok((
        a.trim()
            .parse()
            .map_err(|_| Error::InvalidParameter("bad NR".into()))?,
        b.trim()
            .parse()
            .map_err(|_| Error::InvalidParameter("bad NT".into()))?,
    ))
}

fn build_grid(common: &CommonOpts, extra_splits: &[f64]) -> Result<DiskGrid, Error> {
    let (n_r, n_t) = parse_grid(&common.grid)?;
    let mut splits: Vec<f64> = extra_splits.to_vec();
    if let Some(s) = &common.splits {
        for part in s.split(',') {
            splits.push(
                part.trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad split '{part}'")))?,
            );
        }
    }
    DiskGrid::product_split(n_r, n_t, &splits)
}

fn parse_degree_range(s: &str) -> Result<Vec<usize>, Error> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::InvalidParameter(format!("--degrees expects A..B, got '{s}'")))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter("bad degree".into()))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter("bad degree".into()))?;
    if b < a {
        return Err(Error::InvalidParameter("empty degree range".into()));
    }
    Ok((a..=b).collect())
}

type DensityFn = Box<dyn Fn(&[f64]) -> f64>;

/// Named ball densities for the potential commands, together with the
/// radial splits their quadrature needs.
fn parse_density(s: &str, spec: &BallSpec) -> Result<(DensityFn, Vec<f64>), Error> {
    let spec = *spec;
    match s.split_once(':') {
        None => match s {
            "sigma" => Ok((Box::new(move |x: &[f64]| spec.sigma(x)), vec![spec.rho()])),
            "neg_sigma" => Ok((Box::new(move |x: &[f64]| -spec.sigma(x)), vec![spec.rho()])),
            "chi_ball" => Ok((
                Box::new(move |x: &[f64]| {
                    if meanapprox::grid::norm(x) < 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                }),
                vec![],
            )),
            "chi_b0" => Ok((
                Box::new(move |x: &[f64]| {
                    if meanapprox::grid::norm(x) < spec.rho() {
                        1.0
                    } else {
                        0.0
                    }
                }),
                vec![spec.rho()],
            )),
            other => Err(Error::InvalidParameter(format!(
                "unknown density '{other}'"
            ))),
        },
        Some(("annihilator", seed)) => {
            let seed: u64 = seed
                .parse()
                .map_err(|_| Error::InvalidParameter("bad annihilator seed".into()))?;
            let ann = RandomAnnihilator::new(&spec, seed);
            Ok((Box::new(move |x: &[f64]| ann.eval(x)), vec![spec.rho()]))
        }
        Some((other, _)) => Err(Error::InvalidParameter(format!(
            "unknown density '{other}'"
        ))),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Solve {
            common,
            omega,
            basis,
            p,
            k,
            residual_csv,
            reweight_rho,
        } => cmd_solve(common, omega, basis, p, k, residual_csv, reweight_rho),
        Command::Certify {
            common,
            omega,
            fstar,
            p,
            k,
            basis,
        } => cmd_certify(common, omega, fstar, p, k, basis),
        Command::Oracle { common, which } => cmd_oracle(common, which),
        Command::Potential { common, which } => cmd_potential(common, which),
        Command::Peakset { common, which } => cmd_peakset(common, which),
        Command::Sweep { common, which } => cmd_sweep(common, which),
    }
}

fn resolve_omega(
    omega: &str,
    common: &CommonOpts,
) -> Result<(DiskGrid, Field, Option<CatalogFn>, Value), Error> {
    if let Some(path) = omega.strip_prefix("samples:") {
        let ingested = fieldio::import_field(std::path::Path::new(path))?;
        return match ingested {
            fieldio::IngestedField::OnGrid { grid, field } => {
                let cfg = json!({"omega": omega, "layout": "product"});
                Ok((grid, field, None, cfg))
            }
            fieldio::IngestedField::FreePoints { .. } => Err(Error::NotApplicable(
                "free-point samples support only the dense p=2 projection; \
                 use solve --p 2 with a product-grid file or project offline"
                    .into(),
            )),
        };
    }
    let f = CatalogFn::parse(omega)?;
    let grid = build_grid(common, &f.discontinuities())?;
    let field = Field::labeled(
        grid.points().iter().map(|&z| f.eval(z)).collect(),
        f.label(),
    );
    let cfg = json!({"omega": f.label(), "layout": "catalog"});
    Ok((grid, field, Some(f), cfg))
}

fn common_config(common: &CommonOpts, grid: &DiskGrid) -> Value {
    json!({
        "grid": {"n_radial": grid.n_radial(), "n_theta": grid.n_theta()},
        "requested_grid": common.grid,
        "splits": common.splits,
        "seed": common.seed,
        "tol": common.tol,
    })
}

fn cmd_solve(
    common: CommonOpts,
    omega: String,
    basis_str: String,
    p: f64,
    k: Option<usize>,
    residual_csv: Option<PathBuf>,
    reweight_rho: Option<String>,
) -> Result<u8, Error> {
    // Free-point ingestion: dense projection path.
    if let Some(path) = omega.strip_prefix("samples:") {
        if let fieldio::IngestedField::FreePoints { points, values } =
            fieldio::import_field(std::path::Path::new(path))?
        {
            if p != 2.0 {
                return Err(Error::NotApplicable(
                    "free-point samples support only p = 2 (dense projection)".into(),
                ));
            }
            let spec = catalog::parse_basis(&basis_str)?;
            let weights = vec![1.0 / points.len() as f64; points.len()];
            let coeffs = basis::project_l2_free(&values, &points, &weights, &spec)?;
            let report = Report {
                command: "solve",
                config: json!({
                    "omega": omega, "basis": basis_str, "p": p,
                    "layout": "free_points", "n_points": points.len(),
                    "seed": common.seed, "tol": common.tol,
                }),
                results: json!({
                    "coefficients": coeffs_json(&coeffs),
                    "note": "dense least-squares projection on free points",
                }),
                claims: vec!["best L2 approximation is the orthogonal projection"],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            return Ok(0);
        }
    }

    let (grid, field, _, omega_cfg) = resolve_omega(&omega, &common)?;
    let spec = catalog::parse_basis(&basis_str)?;
    let mut opts = SolverOptions::new(p);
    opts.seed = common.seed;
    let sol = solve_best(&field, &spec, &opts, &grid)?;
    let k_max = k.unwrap_or(2 * spec.degree + 4);

    let problem = match spec.kind {
        basis::BasisKind::Harmonic2d => Problem::Harmonic,
        _ => Problem::Analytic,
    };
    let certificate = if sol.lambda > common.tol * 1e-3 {
        let f_star = basis::eval_combo_field(&sol.coeffs, &spec, &grid)?;
        let cert = construct_dual(&field, &f_star, p, sol.lambda, problem, k_max, &grid)?;
        let worst = cert.moment_residuals.iter().cloned().fold(0.0f64, f64::max);
        json!({
            "moment_residuals": cert.moment_residuals,
            "worst_moment_residual": worst,
            "alignment_deviation": cert.alignment_deviation,
            "sup_norm": cert.sup_norm,
            "alpha": cert.alpha,
            "k_max": cert.k_max,
        })
    } else {
        json!({"note": "residual below tolerance; omega lies in the subspace"})
    };

    if let Some(path) = &residual_csv {
        fieldio::export_field(path, &grid, &sol.residual)?;
    }

    // The reweighting demonstration: blending toward f* with any positive
    // weight preserves the residual sign pattern and hence the p = 1
    // optimum; the report carries the re-solved coefficients and the drift.
    let reweight = match &reweight_rho {
        None => Value::Null,
        Some(id) => {
            let weight: Box<dyn Fn(Complex64) -> f64> = match id.as_str() {
                "one" => Box::new(|_| 1.0),
                "half" => Box::new(|_| 0.5),
                "bump" => Box::new(|z: Complex64| 0.1 + 0.9 * (1.0 - z.norm_sqr())),
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown reweight id '{other}' (expected one, half, bump)"
                    )))
                }
            };
            let rho_field = Field::new(
                grid.points()
                    .iter()
                    .map(|&z| Complex64::new(weight(z), 0.0))
                    .collect(),
            );
            let f_star = basis::eval_combo_field(&sol.coeffs, &spec, &grid)?;
            let blended = meanapprox::solver::residual_reweight(&field, &f_star, &rho_field)?;
            let re_sol = solve_best(&blended, &spec, &opts, &grid)?;
            let drift = sol
                .coeffs
                .iter()
                .zip(&re_sol.coeffs)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            json!({
                "rho": id,
                "coefficients": coeffs_json(&re_sol.coeffs),
                "lambda": re_sol.lambda,
                "coefficient_drift": drift,
            })
        }
    };

    let mut config = common_config(&common, &grid);
    merge(&mut config, omega_cfg);
    merge(
        &mut config,
        json!({"basis": basis_str, "p": p, "k_max": k_max,
               "eps0": opts.eps0, "eps_decay": opts.eps_decay, "eps_min": opts.eps_min}),
    );
    let report = Report {
        command: "solve",
        config,
        results: json!({
            "coefficients": coeffs_json(&sol.coeffs),
            "lambda": sol.lambda,
            "iterations": sol.iterations,
            "final_eps": sol.final_eps,
            "converged": sol.converged,
            "flat": sol.flat,
            "grad_residual": sol.grad_residual,
            "objective_trace": sol.objective_trace,
            "certificate": certificate,
            "reweight": reweight,
        }),
        claims: vec![
            "a best approximant pairs with a unit-norm annihilator aligned with its residual",
        ],
        verdict: None,
    };
    report.write(&common.out).map_err(io_err)?;
    if sol.converged {
        Ok(0)
    } else {
        Ok(3)
    }
}

fn cmd_certify(
    common: CommonOpts,
    omega: String,
    fstar: String,
    p: f64,
    k: usize,
    basis_str: String,
) -> Result<u8, Error> {
    // Newton-kernel references are ball-side certificates.
    if let Some(rest) = omega.strip_prefix("newton:") {
        let (pt, dim) = rest
            .split_once('@')
            .ok_or_else(|| Error::InvalidParameter("expected newton:Y@DIM".into()))?;
        let dim: u32 = dim
            .parse()
            .map_err(|_| Error::InvalidParameter("bad dimension".into()))?;
        let spec = BallSpec::new(dim)?;
        let y = catalog::parse_point(pt, dim)?;
        if fstar != "oracle" {
            return Err(Error::NotApplicable(
                "newton references certify against --fstar oracle".into(),
            ));
        }
        let sampler = BallSampler::new(spec, 32, 4096, common.seed)?;
        let verdict = newton_sign_certificate(&y, &spec, &sampler, common.tol.min(1e-2))?;
        let pair = newton_best_harmonic(&y, &spec)?;
        let report = Report {
            command: "certify",
            config: json!({
                "omega": omega, "fstar": "oracle", "dim": dim,
                "seed": common.seed, "tol": common.tol,
                "samples": sampler.n_points(),
            }),
            results: json!({
                "valid_pole": pair.valid(),
                "rho": spec.rho(),
                "rho_sq": spec.rho_sq(),
                "verdict": verdict_json(&verdict),
            }),
            claims: vec![
                "the Kelvin-reflected kernel is the best harmonic approximant for poles within the critical radius",
            ],
            verdict: Some(verdict.label().into()),
        };
        report.write(&common.out).map_err(io_err)?;
        return Ok(verdict_exit_code(&verdict) as u8);
    }

    let (grid, field, cat, omega_cfg) = resolve_omega(&omega, &common)?;
    let verdict;
    let mut extra = json!({});
    match fstar.as_str() {
        "zero" => {
            let f = cat.ok_or_else(|| {
                Error::NotApplicable(
                    "the badly-approximable test refines the grid and needs a catalog function"
                        .into(),
                )
            })?;
            verdict = badly_approximable_test(|z| f.eval(z), p, k, &grid, common.tol)?;
        }
        "solve" => {
            let spec = catalog::parse_basis(&basis_str)?;
            let mut opts = SolverOptions::new(p);
            opts.seed = common.seed;
            let sol = solve_best(&field, &spec, &opts, &grid)?;
            let problem = match spec.kind {
                basis::BasisKind::Harmonic2d => Problem::Harmonic,
                _ => Problem::Analytic,
            };
            let f_star = basis::eval_combo_field(&sol.coeffs, &spec, &grid)?;
            let cert = construct_dual(&field, &f_star, p, sol.lambda, problem, k, &grid)?;
            let worst = cert
                .moment_residuals
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, &v)| (i, v))
                .unwrap_or((0, 0.0));
            let alignment = check_alignment(&cert.g_star, &field, &f_star)?;
            extra = json!({
                "lambda": sol.lambda,
                "alignment_deviation": alignment,
                "moment_residuals": cert.moment_residuals,
            });
            verdict = if worst.1 < common.tol && alignment < common.tol {
                Verdict::Certified(Witness::moment(worst.0.min(k), worst.1, worst.0 > k))
            } else if worst.1 > 10.0 * common.tol {
                Verdict::Refuted(Witness::moment(worst.0.min(k), worst.1, worst.0 > k))
            } else {
                Verdict::Inconclusive {
                    blocking_tolerance: common.tol,
                    detail: format!("worst residual {:.3e}", worst.1),
                }
            };
        }
        "oracle" => {
            // monomial oracle certificate: residual against the closed form
            let f = match &cat {
                Some(CatalogFn::Monomial { n, m }) => MonomialProblem {
                    n: *n,
                    m: *m,
                    p,
                    space: Space::Analytic,
                },
                _ => {
                    return Err(Error::NotApplicable(
                        "--fstar oracle supports monomial:n,m and newton:Y@DIM references".into(),
                    ))
                }
            };
            let (ospec, ocoeffs) = monomial_best(&f)?;
            let f_star = basis::eval_combo_field(&ocoeffs, &ospec, &grid)?;
            let lambda = {
                let diff = Field::new(
                    field
                        .values
                        .iter()
                        .zip(&f_star.values)
                        .map(|(&a, &b)| a - b)
                        .collect(),
                );
                grid.norm_p(&diff, p)?
            };
            let cert = construct_dual(&field, &f_star, p, lambda, Problem::Analytic, k, &grid)?;
            let worst = cert.moment_residuals.iter().cloned().fold(0.0f64, f64::max);
            extra = json!({"lambda": lambda, "moment_residuals": cert.moment_residuals});
            verdict = if worst < common.tol {
                Verdict::Certified(Witness::moment(0, worst, false))
            } else {
                Verdict::Refuted(Witness::moment(0, worst, false))
            };
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "--fstar must be zero, solve or oracle, got '{other}'"
            )))
        }
    }

    let mut config = common_config(&common, &grid);
    merge(&mut config, omega_cfg);
    merge(&mut config, json!({"fstar": fstar, "p": p, "k": k}));
    let report = Report {
        command: "certify",
        config,
        results: json!({"verdict": verdict_json(&verdict), "details": extra}),
        claims: vec![
            "badly approximable data is exactly the data whose normalized sign density annihilates the subspace",
        ],
        verdict: Some(verdict.label().into()),
    };
    report.write(&common.out).map_err(io_err)?;
    Ok(verdict_exit_code(&verdict) as u8)
}

fn cmd_oracle(common: CommonOpts, which: OracleCmd) -> Result<u8, Error> {
    match which {
        OracleCmd::Monomial { n, m, p, space } => {
            let space = match space.as_str() {
                "analytic" => Space::Analytic,
                "harmonic" => Space::Harmonic,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "space must be analytic or harmonic, got '{other}'"
                    )))
                }
            };
            let (spec, coeffs) = monomial_best(&MonomialProblem { n, m, p, space })?;
            let constant = if n.min(m) >= 1 {
                Some(monomial_constant(n.max(m), n.min(m), p)?)
            } else {
                None
            };
            let report = Report {
                command: "oracle",
                config: json!({"oracle": "monomial", "n": n, "m": m, "p": p,
                               "space": format!("{space:?}").to_lowercase()}),
                results: json!({
                    "constant": constant,
                    "basis_dim": spec.dim(),
                    "coefficients": coeffs_json(&coeffs),
                }),
                claims: vec![
                    "the best approximant to a monomial is a single scaled monomial with a sign-equation constant",
                ],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(0)
        }
        OracleCmd::Radial {
            profile,
            dim,
            n_pts,
        } => {
            let prof = CatalogFn::parse(&format!("radial:{profile}"))?;
            let splits = prof.discontinuities();
            let grid = meanapprox::grid::RadialGrid::with_splits(n_pts, dim, &splits)?;
            let values: Vec<Complex64> = grid
                .nodes()
                .iter()
                .map(|&r| prof.eval(Complex64::new(r, 0.0)))
                .collect();
            let best = radial_best_constant(&values, &grid)?;
            let report = Report {
                command: "oracle",
                config: json!({"oracle": "radial", "profile": profile, "dim": dim, "n_pts": n_pts}),
                results: json!({
                    "constant": complex_json(best.constant),
                    "objective": best.objective,
                    "flat": best.flat,
                    "converged": best.converged,
                }),
                claims: vec![
                    "radial data has a unique constant best harmonic approximant at p = 1",
                ],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(if best.converged { 0 } else { 3 })
        }
        OracleCmd::Kelvin { y, dim } => {
            let spec = BallSpec::new(dim)?;
            let y = catalog::parse_point(&y, dim)?;
            let k = kelvin_reflect(&y, &spec)?;
            let report = Report {
                command: "oracle",
                config: json!({"oracle": "kelvin", "y": k.y, "dim": dim}),
                results: json!({
                    "y_prime": k.y_prime,
                    "rho": k.rho,
                    "product_of_norms": meanapprox::grid::norm(&k.y) * meanapprox::grid::norm(&k.y_prime),
                }),
                claims: vec!["reflection in the half-volume sphere fixes |y||y'| = rho^2"],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(0)
        }
        OracleCmd::Newton {
            y,
            dim,
            cutoff,
            samples,
            band,
        } => {
            let spec = BallSpec::new(dim)?;
            let y = catalog::parse_point(&y, dim)?;
            let n_dirs = (samples / 32).max(64);
            let sampler = BallSampler::new(spec, 32, n_dirs, common.seed)?;
            let (verdict, cut_cfg) = match cutoff {
                Some(level) => {
                    let cut = newton_cutoff(&y, &spec, level)?;
                    (cut.certify(&sampler, band), json!({"cutoff": level}))
                }
                None => (
                    newton_sign_certificate(&y, &spec, &sampler, band)?,
                    json!({"cutoff": null}),
                ),
            };
            let pair = newton_best_harmonic(&y, &spec)?;
            let mut config = json!({
                "oracle": "newton", "y": y, "dim": dim,
                "samples": sampler.n_points(), "band": band, "seed": common.seed,
            });
            merge(&mut config, cut_cfg);
            let report = Report {
                command: "oracle",
                config,
                results: json!({
                    "valid_pole": pair.valid(),
                    "expected_sign": pair.expected_sign(),
                    "verdict": verdict_json(&verdict),
                }),
                claims: vec![
                    "the Kelvin-reflected kernel is the best harmonic approximant for poles within the critical radius",
                ],
                verdict: Some(verdict.label().into()),
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(verdict_exit_code(&verdict) as u8)
        }
        OracleCmd::Aghr { dim, h_shift } => {
            let spec = BallSpec::new(dim)?;
            let sampler = BallSampler::new(spec, 32, 2048, common.seed)?;
            let h_val = spec.rho_sq() + h_shift;
            let verdict = oracles::aghr_verify(
                |x| {
                    let r = meanapprox::grid::norm(x);
                    r * r
                },
                move |_| h_val,
                &spec,
                &sampler,
                common.tol,
            );
            let report = Report {
                command: "oracle",
                config: json!({"oracle": "aghr", "dim": dim, "h_shift": h_shift,
                               "seed": common.seed, "tol": common.tol}),
                results: json!({
                    "h_constant": h_val,
                    "exact_constant": spec.rho_sq(),
                    "verdict": verdict_json(&verdict),
                }),
                claims: vec![
                    "a harmonic h best-approximates subharmonic data iff it matches on the half-volume sphere and sits below outside",
                ],
                verdict: Some(verdict.label().into()),
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(verdict_exit_code(&verdict) as u8)
        }
    }
}

fn cmd_potential(common: CommonOpts, which: PotentialCmd) -> Result<u8, Error> {
    let spec2 = BallSpec::new(2)?;
    match which {
        PotentialCmd::Cauchy { region, at } => {
            let reg = catalog::parse_region(&region)?;
            let z = catalog::parse_point(&at, 2)?;
            let z = Complex64::new(z[0], z[1]);
            let grid = build_grid(&common, &[spec2.rho()])?;
            let v = cauchy_transform(&PlaneDensity::Region(&reg), z, &grid, &spec2)?;
            let report = Report {
                command: "potential",
                config: json!({"transform": "cauchy", "region": region, "at": [z.re, z.im],
                               "grid": common.grid}),
                results: json!({
                    "value": complex_json(v.value),
                    "modulus": v.value.norm(),
                    "desingularized": v.desingularized,
                    "excluded_mass": v.excluded_mass,
                }),
                claims: vec![
                    "the Cauchy transform of a half-area set is bounded by the disk extremum",
                ],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(0)
        }
        PotentialCmd::Ahlfors { region, probes } => {
            let reg = catalog::parse_region(&region)?;
            let grid = build_grid(&common, &[spec2.rho()])?;
            let rho = spec2.rho();
            let probe_pts: Vec<Complex64> = (0..probes)
                .map(|j| {
                    Complex64::from_polar(
                        rho,
                        2.0 * std::f64::consts::PI * j as f64 / probes as f64,
                    )
                })
                .chain((0..probes).map(|j| {
                    Complex64::from_polar(
                        1.0 + 1e-3,
                        2.0 * std::f64::consts::PI * j as f64 / probes as f64,
                    )
                }))
                .collect();
            let (max_mod, verdict) =
                ahlfors_beurling_check(&reg, &probe_pts, &grid, &spec2, common.tol)?;
            let report = Report {
                command: "potential",
                config: json!({"transform": "ahlfors", "region": region, "probes": probes,
                               "grid": common.grid, "tol": common.tol}),
                results: json!({
                    "max_modulus": max_mod,
                    "bound": 0.5f64.sqrt(),
                    "verdict": verdict_json(&verdict),
                }),
                claims: vec![
                    "the Cauchy transform of a half-area set is maximized by the concentric disk",
                ],
                verdict: Some(verdict.label().into()),
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(verdict_exit_code(&verdict) as u8)
        }
        PotentialCmd::Newton {
            density,
            at,
            dim,
            directions,
        } => {
            let spec = BallSpec::new(dim)?;
            let y = catalog::parse_point(&at, dim)?;
            let (g, splits) = parse_density(&density, &spec)?;
            let sampler =
                BallSampler::with_radial_splits(spec, 48, directions, common.seed, &splits)?;
            let quad = BallQuad::Sampler(&sampler);
            let v = newton_potential(&*g, &y, &quad, &spec)?;
            let closed = match density.as_str() {
                "sigma" => Some(sigma_potential_closed(meanapprox::grid::norm(&y), &spec)),
                _ => None,
            };
            let report = Report {
                command: "potential",
                config: json!({"transform": "newton", "density": density, "at": y, "dim": dim,
                               "directions": directions, "seed": common.seed}),
                results: json!({
                    "value": v.value.re,
                    "closed_form": closed,
                    "desingularized": v.desingularized,
                }),
                claims: vec![
                    "Newtonian potentials of radial densities reduce to shell closed forms",
                ],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(0)
        }
        PotentialCmd::LOp {
            density,
            at,
            dim,
            directions,
        } => {
            let spec = BallSpec::new(dim)?;
            let y = catalog::parse_point(&at, dim)?;
            let (g, splits) = parse_density(&density, &spec)?;
            let sampler =
                BallSampler::with_radial_splits(spec, 48, directions, common.seed, &splits)?;
            let quad = BallQuad::Sampler(&sampler);
            let value = l_apply_potential(&*g, &y, &quad, &spec)?;
            let sigma_bound = l_apply_potential(|x| spec.sigma(x), &y, &quad, &spec)?;
            let report = Report {
                command: "potential",
                config: json!({"transform": "l_op", "density": density, "at": y, "dim": dim,
                               "directions": directions, "seed": common.seed}),
                results: json!({
                    "value": value,
                    "sigma_value": sigma_bound,
                    "dominated_by_sigma": value.abs() <= sigma_bound.abs() + common.tol,
                }),
                claims: vec![
                    "sigma extremizes the radial derivative of the potential among unit-norm densities at the half-volume sphere",
                ],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(0)
        }
        PotentialCmd::Cor74 {
            density,
            at,
            dim,
            directions,
        } => {
            let spec = BallSpec::new(dim)?;
            let y = catalog::parse_point(&at, dim)?;
            let (g, splits) = parse_density(&density, &spec)?;
            let sampler =
                BallSampler::with_radial_splits(spec, 48, directions, common.seed, &splits)?;
            let quad = BallQuad::Sampler(&sampler);
            let verdict = cor74_compare(&*g, &y, &quad, &spec, common.tol)?;
            let report = Report {
                command: "potential",
                config: json!({"transform": "cor74", "density": density, "at": y, "dim": dim,
                               "directions": directions, "seed": common.seed, "tol": common.tol}),
                results: json!({"verdict": verdict_json(&verdict), "rho_sq": spec.rho_sq()}),
                claims: vec![
                    "sigma extremizes the Newtonian potential among unit-norm annihilators within the critical radius",
                ],
                verdict: Some(verdict.label().into()),
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(verdict_exit_code(&verdict) as u8)
        }
        PotentialCmd::Schwarz { at, dim } => {
            let spec = BallSpec::new(dim)?;
            let x = catalog::parse_point(&at, dim)?;
            let v = schwarz_potential(&x, &spec)?;
            let report = Report {
                command: "potential",
                config: json!({"transform": "schwarz", "at": x, "dim": dim}),
                results: json!({"value": v}),
                claims: vec![
                    "the modified Schwarz potential solves the overdetermined boundary problem and is singular at the center",
                ],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(0)
        }
        PotentialCmd::Witness { a, at } => {
            let z = catalog::parse_point(&at, 2)?;
            let z = Complex64::new(z[0], z[1]);
            let v = prop_witness(a, z)?;
            let report = Report {
                command: "potential",
                config: json!({"transform": "witness", "a": a, "at": [z.re, z.im]}),
                results: json!({"value": complex_json(v), "modulus": v.norm()}),
                claims: vec![
                    "the boundary-vanishing witness certifies the rational annihilator via its conjugate derivative",
                ],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(0)
        }
    }
}

fn cmd_peakset(common: CommonOpts, which: PeaksetCmd) -> Result<u8, Error> {
    let spec2 = BallSpec::new(2)?;
    match which {
        PeaksetCmd::Thinness { region, levels } => {
            let reg = catalog::parse_region(&region)?;
            let report_data = thinness_check(&reg, &spec2, levels)?;
            let (verdict_label, verdict_detail, code) = match &report_data.verdict {
                ThinnessVerdict::NotWeakPeak { tail_radius } => {
                    ("not-weak-peak", json!({"tail_radius": tail_radius}), 0u8)
                }
                ThinnessVerdict::CriterionInapplicable { detail } => {
                    ("criterion-inapplicable", json!({"detail": detail}), 3u8)
                }
            };
            let report = Report {
                command: "peakset",
                config: json!({"check": "thinness", "region": region, "levels": levels}),
                results: json!({
                    "integral": report_data.integral,
                    "level_values": report_data.level_values,
                    "converged": report_data.converged,
                    "verdict": verdict_label,
                    "verdict_detail": verdict_detail,
                }),
                claims: vec!["boundary-thin sets are not weak peak sets"],
                verdict: Some(verdict_label.into()),
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(code)
        }
        PeaksetCmd::Bounds {
            region,
            direction,
            levels,
            with_constant,
        } => {
            let reg = catalog::parse_region(&region)?;
            let dir = catalog::parse_point(&direction, 2)?;
            let mut family = PoleFamily::radial_approach(&dir, levels, &spec2)?;
            if with_constant {
                family.push_constant(1.0);
            }
            let bounds = peak_lower_bounds(&reg, &family, &spec2)?;
            let report = Report {
                command: "peakset",
                config: json!({"check": "bounds", "region": region, "direction": dir,
                               "levels": levels, "with_constant": with_constant}),
                results: json!({
                    "a_lower": bounds.a_lower,
                    "b_lower": bounds.b_lower,
                    "per_member": bounds.per_member,
                }),
                claims: vec![
                    "peak-set mass ratios blow up along pole families approaching a boundary point of the set",
                ],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(0)
        }
        PeaksetCmd::Extension { region, orders } => {
            let reg = catalog::parse_region(&region)?;
            let grid = build_grid(&common, &[spec2.rho()])?;
            let mut rows = Vec::new();
            for part in orders.split(',') {
                let k: usize = part
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad order '{part}'")))?;
                let sup = min_norm_extension_sup(&reg, k, &grid, &spec2)?;
                rows.push(json!({"k": k, "sup_norm": sup}));
            }
            let report = Report {
                command: "peakset",
                config: json!({"check": "extension", "region": region, "orders": orders,
                               "grid": common.grid}),
                results: json!({"extensions": rows}),
                claims: vec![
                    "strong peak sets admit no bounded annihilating extension of their indicator",
                ],
                verdict: None,
            };
            report.write(&common.out).map_err(io_err)?;
            Ok(0)
        }
    }
}

fn cmd_sweep(common: CommonOpts, which: SweepCmd) -> Result<u8, Error> {
    match which {
        SweepCmd::BoundaryNorm { omega, p, degrees } => {
            let (grid, field, _, omega_cfg) = resolve_omega(&omega, &common)?;
            let degs = parse_degree_range(&degrees)?;
            let rows = boundary_norm_sweep(&field, p, &degs, &grid, 512)?;
            if common.format == "csv" {
                let mut text = String::from("degree,boundary_norm\n");
                for (m, bn) in &rows {
                    text += &format!("{m},{bn:.16e}\n");
                }
                write_text(&common.out, &text)?;
            } else {
                let mut config = common_config(&common, &grid);
                merge(&mut config, omega_cfg);
                merge(&mut config, json!({"p": p, "degrees": degrees}));
                let report = Report {
                    command: "sweep",
                    config,
                    results: json!({
                        "rows": rows.iter().map(|(m, b)| json!({"degree": m, "boundary_norm": b})).collect::<Vec<_>>(),
                    }),
                    claims: vec![
                        "boundary norms of best approximants stay uniformly bounded for Sobolev data",
                    ],
                    verdict: None,
                };
                report.write(&common.out).map_err(io_err)?;
            }
            Ok(0)
        }
        SweepCmd::Modulus {
            omega,
            p,
            basis: basis_str,
            t_range,
            t_count,
        } => {
            let (grid, field, _, omega_cfg) = resolve_omega(&omega, &common)?;
            let spec = catalog::parse_basis(&basis_str)?;
            let mut opts = SolverOptions::new(p);
            opts.seed = common.seed;
            let sol = solve_best(&field, &spec, &opts, &grid)?;
            let (t0, t1) = t_range
                .split_once(',')
                .ok_or_else(|| Error::InvalidParameter("t-range expects A,B".into()))?;
            let t0: f64 = t0
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter("bad t".into()))?;
            let t1: f64 = t1
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter("bad t".into()))?;
            let mut rows = Vec::with_capacity(t_count);
            for i in 0..t_count {
                let t = t0 * (t1 / t0).powf(i as f64 / (t_count - 1).max(1) as f64);
                let d = modulus_dt(&sol.coeffs, &spec, t, p, &grid)?;
                rows.push((t, d));
            }
            let slope = {
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|&&(_, d)| d > 0.0)
                    .map(|&(t, d)| (t.ln(), d.ln()))
                    .collect();
                fit_slope(&pts)
            };
            if common.format == "csv" {
                let mut text = String::from("t,modulus\n");
                for (t, d) in &rows {
                    text += &format!("{t:.16e},{d:.16e}\n");
                }
                write_text(&common.out, &text)?;
            } else {
                let mut config = common_config(&common, &grid);
                merge(&mut config, omega_cfg);
                merge(
                    &mut config,
                    json!({"p": p, "basis": basis_str, "t_range": t_range, "t_count": t_count}),
                );
                let report = Report {
                    command: "sweep",
                    config,
                    results: json!({
                        "rows": rows.iter().map(|(t, d)| json!({"t": t, "modulus": d})).collect::<Vec<_>>(),
                        "loglog_slope": slope,
                    }),
                    claims: vec![
                        "mean smoothness of the data passes to the best approximant with exponent sigma/q",
                    ],
                    verdict: None,
                };
                report.write(&common.out).map_err(io_err)?;
            }
            Ok(0)
        }
    }
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(io_err),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidParameter(format!("io: {e}"))
}

fn merge(base: &mut Value, add: Value) {
    if let (Value::Object(b), Value::Object(a)) = (base, add) {
        for (k, v) in a {
            b.insert(k, v);
        }
    }
}
