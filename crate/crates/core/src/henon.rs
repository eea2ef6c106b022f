//! The Henon map over Q_p^2, its inverse, the parameter involution, the
//! partition of parameter space into regions, and the escape filtration.
//!
//! The map is `(x, y) -> (a + b*y - x^2, x)` with `b != 0`; its inverse is
//! `(x, y) -> (y, (-a + x + y^2)/b)`.  Parameters are carried both as exact
//! rationals (region tests, involution, and every derived discriminant stay
//! exact) and as tracked-precision p-adic numbers (orbit arithmetic).

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::localfield::{HalfLogNorm, NormBound, PadicNumber};

/// Henon map coefficients `(a, b)`, `b != 0`, over a fixed odd prime.
#[derive(Debug, Clone)]
pub struct HenonParams {
    p: u64,
    precision: u32,
    a: PadicNumber,
    b: PadicNumber,
    a_rat: BigRational,
    b_rat: BigRational,
}

/// A point of Q_p^2; norm is `max(|x|, |y|)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanePoint {
    pub x: PadicNumber,
    pub y: PadicNumber,
}

/// The four regions partitioning the parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionTag {
    I,
    IIplus,
    IIminus,
    III,
}

impl std::fmt::Display for RegionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegionTag::I => write!(f, "I"),
            RegionTag::IIplus => write!(f, "II+"),
            RegionTag::IIminus => write!(f, "II-"),
            RegionTag::III => write!(f, "III"),
        }
    }
}

/// Membership flags for the filtration sets at radius R.  `in_sr` excludes the
/// other two; the outer sectors overlap where `|x| = |y| > R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SectorFlags {
    pub in_sr: bool,
    pub in_sr_plus: bool,
    pub in_sr_minus: bool,
}

impl HenonParams {
    pub fn from_rationals(
        p: u64,
        a_rat: BigRational,
        b_rat: BigRational,
        precision: u32,
    ) -> Result<Self> {
        PadicNumber::check_prime(p)?;
        if b_rat.is_zero() {
            return Err(Error::Parse("Henon parameter b must be nonzero".into()));
        }
        let a = PadicNumber::from_rational(&a_rat, p, precision)?;
        let b = PadicNumber::from_rational(&b_rat, p, precision)?;
        Ok(HenonParams { p, precision, a, b, a_rat, b_rat })
    }

    pub fn from_integers(p: u64, a: i64, b: i64, precision: u32) -> Result<Self> {
        Self::from_rationals(
            p,
            BigRational::from_integer(a.into()),
            BigRational::from_integer(b.into()),
            precision,
        )
    }

    /// Same parameters viewed at a different working precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        Self::from_rationals(self.p, self.a_rat.clone(), self.b_rat.clone(), precision)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn a(&self) -> &PadicNumber {
        &self.a
    }

    pub fn b(&self) -> &PadicNumber {
        &self.b
    }

    pub fn a_rational(&self) -> &BigRational {
        &self.a_rat
    }

    pub fn b_rational(&self) -> &BigRational {
        &self.b_rat
    }

    /// One forward step: `(a + b*y - x^2, x)`.
    pub fn forward(&self, pt: &PlanePoint) -> Result<PlanePoint> {
        let by = self.b.mul(&pt.y)?;
        let x2 = pt.x.mul(&pt.x)?;
        let new_x = self.a.add(&by)?.sub(&x2)?;
        Ok(PlanePoint { x: new_x, y: pt.x.clone() })
    }

    /// One backward step: `(y, (-a + x + y^2)/b)`.
    pub fn inverse(&self, pt: &PlanePoint) -> Result<PlanePoint> {
        let y2 = pt.y.mul(&pt.y)?;
        let num = pt.x.sub(&self.a)?.add(&y2)?;
        let new_y = num.div(&self.b)?;
        Ok(PlanePoint { x: pt.y.clone(), y: new_y })
    }

    /// The parameter involution `(a, b) -> (a/b^2, 1/b)`; exact on rationals,
    /// hence an exact involution.
    pub fn involution(&self) -> HenonParams {
        let b2 = &self.b_rat * &self.b_rat;
        let a_star = &self.a_rat / &b2;
        let b_star = BigRational::from_integer(1.into()) / &self.b_rat;
        HenonParams::from_rationals(self.p, a_star, b_star, self.precision)
            .expect("involution preserves validity")
    }

    /// The conjugating automorphism `lambda(x, y) = (-b*y, -b*x)`.
    pub fn lambda_conjugate(&self, pt: &PlanePoint) -> Result<PlanePoint> {
        let nb = self.b.neg();
        Ok(PlanePoint { x: nb.mul(&pt.y)?, y: nb.mul(&pt.x)? })
    }

    /// Inverse of `lambda`: `(x, y) -> (-y/b, -x/b)`.
    pub fn lambda_inverse(&self, pt: &PlanePoint) -> Result<PlanePoint> {
        let nb = self.b.neg();
        Ok(PlanePoint { x: pt.y.div(&nb)?, y: pt.x.div(&nb)? })
    }

    /// The region containing `(a, b)`; the four clauses partition the space.
    pub fn classify_region(&self) -> RegionTag {
        let na = self.a.norm();
        let nb = self.b.norm();
        let one = HalfLogNorm::ONE;
        if nb == one {
            if na <= one {
                RegionTag::I
            } else {
                RegionTag::III
            }
        } else if nb < one {
            if na <= one {
                RegionTag::IIplus
            } else {
                RegionTag::III
            }
        } else {
            // |b| > 1
            if na <= nb * nb {
                RegionTag::IIminus
            } else {
                RegionTag::III
            }
        }
    }

    /// `max(|a|, |b|)`, the norm of the coefficient pair.
    pub fn coefficient_norm(&self) -> HalfLogNorm {
        self.a.norm().max(self.b.norm())
    }

    /// The escape radius `R = max(1, |a|^(1/2), |b|)`.
    pub fn filtration_radius(&self) -> HalfLogNorm {
        HalfLogNorm::ONE
            .max(self.a.norm().sqrt())
            .max(self.b.norm())
    }

    /// Which filtration sets contain `pt`.
    pub fn sector_of(&self, pt: &PlanePoint) -> SectorFlags {
        let r = self.filtration_radius();
        let nx = pt.x.norm();
        let ny = pt.y.norm();
        if nx.max(ny) <= r {
            SectorFlags { in_sr: true, in_sr_plus: false, in_sr_minus: false }
        } else {
            SectorFlags { in_sr: false, in_sr_plus: nx >= ny, in_sr_minus: nx <= ny }
        }
    }

    /// Iterate `steps` times (forward if positive, backward if negative),
    /// recording points and norms.  Stops early when a filtration certificate
    /// fires (entering the absorbing outer sector for the direction of
    /// travel), or when `bound` is exceeded.
    pub fn iterate(
        &self,
        start: &PlanePoint,
        steps: i64,
        bound: Option<HalfLogNorm>,
    ) -> Result<OrbitTrace> {
        let forward = steps >= 0;
        let n = steps.unsigned_abs();
        let mut points = vec![start.clone()];
        let mut norms = vec![start.norm()];
        let mut certificate = None;
        let mut truncated_at_bound = None;
        let mut current = start.clone();
        for i in 1..=n {
            current = if forward { self.forward(&current)? } else { self.inverse(&current)? };
            points.push(current.clone());
            norms.push(current.norm());
            let flags = self.sector_of(&current);
            if forward && flags.in_sr_plus {
                certificate = Some(EscapeCertificate {
                    direction: Direction::Forward,
                    step: i,
                    sector: flags,
                });
                break;
            }
            if !forward && flags.in_sr_minus {
                certificate = Some(EscapeCertificate {
                    direction: Direction::Backward,
                    step: i,
                    sector: flags,
                });
                break;
            }
            if let Some(b) = bound {
                if current.norm() > b {
                    truncated_at_bound = Some(i);
                    break;
                }
            }
        }
        Ok(OrbitTrace { points, norms, certificate, truncated_at_bound })
    }

    /// Decide the fate of an orbit, with auditable certificates.
    ///
    /// * forward escape is certified as soon as a forward iterate enters the
    ///   plus sector (norms square from then on);
    /// * in regions I and II+ the closed region `S_R` is forward invariant, so
    ///   landing there certifies a bounded forward orbit;
    /// * backward escape is certified by a backward iterate entering the minus
    ///   sector;
    /// * otherwise the fate is undetermined after `max_iter` steps each way;
    ///   boundedness in region III is only ever semi-decidable.
    pub fn orbit_fate(&self, pt: &PlanePoint, max_iter: u32) -> Result<OrbitFate> {
        let region = self.classify_region();
        let bounded_by_sr = matches!(region, RegionTag::I | RegionTag::IIplus);

        // interleave the two sweeps so the smallest certified step wins
        // (forward checked first on ties)
        let mut fwd: std::result::Result<PlanePoint, Error> = Ok(pt.clone());
        let mut bwd: std::result::Result<PlanePoint, Error> = Ok(pt.clone());
        for step in 0..=max_iter {
            if let Ok(cur) = &fwd {
                let flags = self.sector_of(cur);
                if flags.in_sr_plus {
                    return Ok(OrbitFate::EscapesForward { step });
                }
                if bounded_by_sr && flags.in_sr {
                    return Ok(OrbitFate::BoundedForward { step });
                }
            }
            if let Ok(cur) = &bwd {
                let flags = self.sector_of(cur);
                if flags.in_sr_minus {
                    return Ok(OrbitFate::EscapesBackward { step });
                }
            }
            if step == max_iter {
                break;
            }
            if let Ok(cur) = &fwd {
                fwd = self.forward(cur);
            }
            if let Ok(cur) = &bwd {
                bwd = self.inverse(cur);
            }
            if let (Err(e), Err(_)) = (&fwd, &bwd) {
                return Err(e.clone());
            }
        }
        match (fwd, bwd) {
            (Ok(_), Ok(_)) => Ok(OrbitFate::UndeterminedAfter { max_iter }),
            // a sweep died without the other producing a certificate: the
            // fate cannot honestly be called undetermined-after-max_iter
            (Err(e), _) | (_, Err(e)) => Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// A filtration certificate: at `step`, the orbit entered the absorbing outer
/// sector for its direction of travel, so its norm provably diverges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EscapeCertificate {
    pub direction: Direction,
    pub step: u64,
    pub sector: SectorFlags,
}

#[derive(Debug, Clone)]
pub struct OrbitTrace {
    pub points: Vec<PlanePoint>,
    pub norms: Vec<HalfLogNorm>,
    pub certificate: Option<EscapeCertificate>,
    pub truncated_at_bound: Option<u64>,
}

/// Fate of an orbit under `orbit_fate`, with the step at which the deciding
/// filtration fact fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrbitFate {
    EscapesForward { step: u32 },
    EscapesBackward { step: u32 },
    BoundedForward { step: u32 },
    UndeterminedAfter { max_iter: u32 },
}

impl PlanePoint {
    pub fn new(x: PadicNumber, y: PadicNumber) -> Self {
        PlanePoint { x, y }
    }

    pub fn from_rationals(
        x: &BigRational,
        y: &BigRational,
        p: u64,
        precision: u32,
    ) -> Result<Self> {
        Ok(PlanePoint {
            x: PadicNumber::from_rational(x, p, precision)?,
            y: PadicNumber::from_rational(y, p, precision)?,
        })
    }

    pub fn from_integers(x: i64, y: i64, p: u64, precision: u32) -> Result<Self> {
        Ok(PlanePoint {
            x: PadicNumber::parse_rational(x, 1, p, precision)?,
            y: PadicNumber::parse_rational(y, 1, p, precision)?,
        })
    }

    pub fn norm(&self) -> HalfLogNorm {
        self.x.norm().max(self.y.norm())
    }

    /// `max(|x - x'|, |y - y'|)` as a bound (subtraction can cancel below the
    /// tracked resolution).
    pub fn distance(&self, other: &Self) -> Result<NormBound> {
        let dx = self.x.difference_norm(&other.x)?;
        let dy = self.y.difference_norm(&other.y)?;
        Ok(dx.max(dy))
    }

    /// Componentwise agreement at the tracked precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.x.agrees_with(&other.x) && self.y.agrees_with(&other.y)
    }
}

impl std::fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}
