//! Named test functions and regions shared by the CLI and the test suites.
//!
//! A catalog entry resolves to an exact evaluator; parsing is from compact
//! `name:args` strings (`monomial:2,1`, `chi_disk:0.7071`, `radial:r`,
//! `zbar_shift_pow:0.5,4`, ...). Entries know their radial discontinuities
//! so callers can build matching split grids.

use crate::basis::BasisSpec;
use crate::grid::BallSpec;
use crate::potentials::Region;
use crate::{Complex64, Error, Result};

/// Radial profiles `a(r)` usable alone or under a rotational phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    /// `a(r) = r`
    R,
    /// `a(r) = r²`
    RSquared,
    /// `a(r) = sgn(r² − 1/2)`
    SignSplit,
    /// `1` inside the half-area radius, `i` outside (flat-median fixture)
    TwoPhase,
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> Complex64 {
        match self {
            RadialProfile::R => Complex64::new(r, 0.0),
            RadialProfile::RSquared => Complex64::new(r * r, 0.0),
            RadialProfile::SignSplit => Complex64::new((r * r - 0.5).signum(), 0.0),
            RadialProfile::TwoPhase => {
                if r * r < 0.5 {
                    Complex64::ONE
                } else {
                    Complex64::I
                }
            }
        }
    }

    pub fn discontinuities(&self) -> Vec<f64> {
        match self {
            RadialProfile::R | RadialProfile::RSquared => vec![],
            RadialProfile::SignSplit | RadialProfile::TwoPhase => vec![0.5f64.sqrt()],
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "r" => Ok(RadialProfile::R),
            "r2" => Ok(RadialProfile::RSquared),
            "sign_split" => Ok(RadialProfile::SignSplit),
            "two_phase" => Ok(RadialProfile::TwoPhase),
            other => Err(Error::InvalidParameter(format!(
                "unknown radial profile '{other}' (expected r, r2, sign_split, two_phase)"
            ))),
        }
    }
}

/// A named planar test function.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogFn {
    /// `z^n z̄^m`
    Monomial {
        n: u32,
        m: u32,
    },
    /// indicator of the centered disk of the given radius
    ChiDisk {
        radius: f64,
    },
    /// `z̄ + a`
    ConjShift {
        a: f64,
    },
    /// `(z̄ − a)^k`
    ZbarShiftPow {
        a: f64,
        k: u32,
    },
    /// `a(|z|)`
    Radial {
        profile: RadialProfile,
    },
    /// `a(|z|) e^{ikθ}`
    RadialPhase {
        profile: RadialProfile,
        k: i32,
    },
    /// `Re z + |z|²` (a smooth mixed-type sample)
    ReZPlusAbs2,
    Zero,
}

impl CatalogFn {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            CatalogFn::Monomial { n, m } => z.powu(n) * z.conj().powu(m),
            CatalogFn::ChiDisk { radius } => {
                if z.norm() < radius {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                }
            }
            CatalogFn::ConjShift { a } => z.conj() + a,
            CatalogFn::ZbarShiftPow { a, k } => (z.conj() - a).powu(k),
            CatalogFn::Radial { profile } => profile.eval(z.norm()),
            CatalogFn::RadialPhase { profile, k } => {
                profile.eval(z.norm()) * Complex64::from_polar(1.0, f64::from(k) * z.arg())
            }
            CatalogFn::ReZPlusAbs2 => Complex64::new(z.re + z.norm_sqr(), 0.0),
            CatalogFn::Zero => Complex64::ZERO,
        }
    }

    /// Radii where the function jumps; grids should place panel boundaries
    /// there.
    pub fn discontinuities(&self) -> Vec<f64> {
        match self {
            CatalogFn::ChiDisk { radius } => vec![*radius],
            CatalogFn::Radial { profile } | CatalogFn::RadialPhase { profile, .. } => {
                profile.discontinuities()
            }
            _ => vec![],
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, a),
            None => (s, ""),
        };
        let parts: Vec<&str> = if args.is_empty() {
            vec![]
        } else {
            args.split(',').collect()
        };
        let bad = |what: &str| Error::InvalidParameter(format!("catalog '{s}': {what}"));
        match name {
            "monomial" => {
                if parts.len() != 2 {
                    return Err(bad("expected monomial:n,m"));
                }
                Ok(CatalogFn::Monomial {
                    n: parts[0].parse().map_err(|_| bad("bad n"))?,
                    m: parts[1].parse().map_err(|_| bad("bad m"))?,
                })
            }
            "chi_disk" => {
                if parts.len() != 1 {
                    return Err(bad("expected chi_disk:radius"));
                }
                let radius: f64 = parts[0].parse().map_err(|_| bad("bad radius"))?;
                if !(0.0 < radius && radius < 1.0) {
                    return Err(bad("radius must be in (0,1)"));
                }
                Ok(CatalogFn::ChiDisk { radius })
            }
            "conj_shift" => {
                if parts.len() != 1 {
                    return Err(bad("expected conj_shift:a"));
                }
                Ok(CatalogFn::ConjShift {
                    a: parts[0].parse().map_err(|_| bad("bad shift"))?,
                })
            }
            "zbar_shift_pow" => {
                if parts.len() != 2 {
                    return Err(bad("expected zbar_shift_pow:a,k"));
                }
                Ok(CatalogFn::ZbarShiftPow {
                    a: parts[0].parse().map_err(|_| bad("bad a"))?,
                    k: parts[1].parse().map_err(|_| bad("bad k"))?,
                })
            }
            "radial" => {
                if parts.len() != 1 {
                    return Err(bad("expected radial:profile"));
                }
                Ok(CatalogFn::Radial {
                    profile: RadialProfile::parse(parts[0])?,
                })
            }
            "radial_phase" => {
                if parts.len() != 2 {
                    return Err(bad("expected radial_phase:profile,k"));
                }
                Ok(CatalogFn::RadialPhase {
                    profile: RadialProfile::parse(parts[0])?,
                    k: parts[1].parse().map_err(|_| bad("bad phase order"))?,
                })
            }
            "smooth" => match parts.as_slice() {
                ["re_z_plus_abs2"] => Ok(CatalogFn::ReZPlusAbs2),
                _ => Err(bad("expected smooth:re_z_plus_abs2")),
            },
            "zero" => Ok(CatalogFn::Zero),
            other => Err(Error::InvalidParameter(format!(
                "unknown catalog function '{other}'"
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            CatalogFn::Monomial { n, m } => format!("monomial:{n},{m}"),
            CatalogFn::ChiDisk { radius } => format!("chi_disk:{radius}"),
            CatalogFn::ConjShift { a } => format!("conj_shift:{a}"),
            CatalogFn::ZbarShiftPow { a, k } => format!("zbar_shift_pow:{a},{k}"),
            CatalogFn::Radial { profile } => format!("radial:{profile:?}").to_lowercase(),
            CatalogFn::RadialPhase { profile, k } => {
                format!("radial_phase:{profile:?},{k}").to_lowercase()
            }
            CatalogFn::ReZPlusAbs2 => "smooth:re_z_plus_abs2".into(),
            CatalogFn::Zero => "zero".into(),
        }
    }
}

/// Parse a basis description: `analytic:M`, `harmonic2d:M`, or `constants`.
pub fn parse_basis(s: &str) -> Result<BasisSpec> {
    let (name, args) = match s.split_once(':') {
        Some((n, a)) => (n, a),
        None => (s, ""),
    };
    match name {
        "constants" => Ok(BasisSpec::constants()),
        "analytic" => Ok(BasisSpec::analytic(args.parse().map_err(|_| {
            Error::InvalidParameter(format!("bad basis degree in '{s}'"))
        })?)),
        "harmonic2d" => Ok(BasisSpec::harmonic2d(args.parse().map_err(|_| {
            Error::InvalidParameter(format!("bad basis degree in '{s}'"))
        })?)),
        other => Err(Error::InvalidParameter(format!(
            "unknown basis kind '{other}'"
        ))),
    }
}

/// Parse a named region: `b0`, `outer_half`, `disk:R`, `annulus:A,B`,
/// `half_disk:ANGLE`, `sector:START,SPAN,IN,OUT`, `cusp:EXP,LEN` (or the
/// shorthand `cusp3`), `cap:ANGLE,R`, `empty`.
pub fn parse_region(s: &str) -> Result<Region> {
    let (name, args) = match s.split_once(':') {
        Some((n, a)) => (n, a),
        None => (s, ""),
    };
    let nums: Vec<f64> = if args.is_empty() {
        vec![]
    } else {
        args.split(',')
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad number in region '{s}'")))
            })
            .collect::<Result<_>>()?
    };
    let want = |k: usize| -> Result<()> {
        if nums.len() != k {
            Err(Error::InvalidParameter(format!(
                "region '{s}' expects {k} parameters"
            )))
        } else {
            Ok(())
        }
    };
    match name {
        "b0" => Ok(Region::HalfVolumeBall),
        "outer_half" => Ok(Region::OuterHalf),
        "empty" => Ok(Region::Empty),
        "disk" => {
            want(1)?;
            Ok(Region::Disk { radius: nums[0] })
        }
        "annulus" => {
            want(2)?;
            Ok(Region::Annulus {
                inner: nums[0],
                outer: nums[1],
            })
        }
        "half_disk" => {
            want(1)?;
            Ok(Region::HalfDisk { angle: nums[0] })
        }
        "sector" => {
            want(4)?;
            Ok(Region::Sector {
                start: nums[0],
                span: nums[1],
                inner: nums[2],
                outer: nums[3],
            })
        }
        "cusp3" => Ok(Region::Cusp {
            exponent: 3,
            length: 0.5,
        }),
        "cusp" => {
            want(2)?;
            Ok(Region::Cusp {
                exponent: nums[0] as i32,
                length: nums[1],
            })
        }
        "cap" => {
            want(2)?;
            Ok(Region::CapNeighborhood {
                angle: nums[0],
                radius: nums[1],
            })
        }
        other => Err(Error::InvalidParameter(format!("unknown region '{other}'"))),
    }
}

/// Parse a point of the given dimension from `x,y[,z,...]`.
pub fn parse_point(s: &str, dim: u32) -> Result<Vec<f64>> {
    let coords: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad coordinate in '{s}'")))
        })
        .collect::<Result<_>>()?;
    if coords.len() != dim as usize {
        return Err(Error::InvalidParameter(format!(
            "point '{s}' has {} coordinates, expected {dim}",
            coords.len()
        )));
    }
    Ok(coords)
}

/// The half-volume radius in the plane, used by many fixtures.
pub fn rho2() -> f64 {
    BallSpec::new(2).expect("dimension 2 is valid").rho()
}
