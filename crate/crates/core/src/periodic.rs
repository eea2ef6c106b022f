//! Fixed points and 2-cycles of the Henon map by quadratic solving over Q_p.
//!
//! Fixed points are `(t, t)` for roots `t` of `x^2 - (b-1)x - a`; the 2-cycle,
//! when it exists, is `{(t1, t2), (t2, t1)}` for the roots of
//! `x^2 + (b-1)x + (b-1)^2 - a`.  Existence is decided by the square class of
//! the discriminants `(b-1)^2 + 4a` and `4a - 3(b-1)^2`.
//!
//! Coefficients and discriminants are computed in exact rational arithmetic:
//! the square/zero classification of a discriminant is not decidable from
//! tracked-precision digits alone (total cancellation, e.g. `b = 1`, destroys
//! them), while on rationals it is exact.  Only the square roots themselves
//! are produced at tracked precision.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::henon::{HenonParams, PlanePoint, RegionTag};
use crate::localfield::PadicNumber;

/// Root set of a monic quadratic over Q_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadraticRoots {
    /// Two distinct roots, ordered with the canonical-branch root first.
    TwoRoots(PadicNumber, PadicNumber),
    DoubleRoot(PadicNumber),
    NoRoots,
}

impl QuadraticRoots {
    pub fn roots(&self) -> Vec<&PadicNumber> {
        match self {
            QuadraticRoots::TwoRoots(r1, r2) => vec![r1, r2],
            QuadraticRoots::DoubleRoot(r) => vec![r],
            QuadraticRoots::NoRoots => vec![],
        }
    }
}

/// Exact p-adic valuation of a nonzero rational at `p`.
pub fn rational_valuation(r: &BigRational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let p_big = num_bigint::BigInt::from(p);
    let mut v = 0i64;
    let mut n = r.numer().abs();
    while (&n % &p_big).is_zero() {
        n /= &p_big;
        v += 1;
    }
    let mut d = r.denom().abs();
    while (&d % &p_big).is_zero() {
        d /= &p_big;
        v -= 1;
    }
    Some(v)
}

/// Exact square test for a rational in Q_p (odd p): even valuation and the
/// unit part a quadratic residue mod p.
pub fn rational_is_square(r: &BigRational, p: u64) -> bool {
    if r.is_zero() {
        return true;
    }
    if r.is_negative() {
        // sign folds into the unit; delegate to the digit test
    }
    let x = PadicNumber::from_rational(r, p, 1).expect("valid rational");
    x.is_square().expect("nonzero")
}

/// Solve the monic quadratic `x^2 + c1*x + c0 = 0` over Q_p.
///
/// Roots are `(-c1 +/- sqrt(disc))/2` with `disc = c1^2 - 4*c0`, taking the
/// canonical square-root branch; `NoRoots` exactly when the discriminant is a
/// non-square.  The `+` root is listed first.  When the direct formula
/// cancels below the tracked precision, the small root is recovered from the
/// product of the roots instead.
pub fn solve_monic_quadratic(
    c1: &BigRational,
    c0: &BigRational,
    p: u64,
    precision: u32,
) -> Result<QuadraticRoots> {
    let four = BigRational::from_integer(4.into());
    let disc = c1 * c1 - four * c0;
    if disc.is_zero() {
        let half = BigRational::new((-1).into(), 2.into());
        let root = PadicNumber::from_rational(&(c1 * half), p, precision)?;
        return Ok(QuadraticRoots::DoubleRoot(root));
    }
    if !rational_is_square(&disc, p) {
        return Ok(QuadraticRoots::NoRoots);
    }
    // extra digits so that a one-sided cancellation still leaves `precision`
    // digits in the surviving root
    let pad = 2 * precision.max(2);
    let r = PadicNumber::from_rational(&disc, p, pad)?.sqrt()?;
    let neg_c1 = PadicNumber::from_rational(&(-c1), p, pad)?;
    let two = PadicNumber::from_integer(2, p, pad);
    let c0_padic = PadicNumber::from_rational(c0, p, pad)?;

    let plus = half_sum(&neg_c1, &r, &two);
    let minus = half_sum(&neg_c1, &r.neg(), &two);
    let (root_plus, root_minus) = match (plus, minus) {
        (Ok(a), Ok(b)) => (a, b),
        // one branch cancelled completely: recover it via the root product
        (Ok(a), Err(Error::PrecisionExhausted(_))) => {
            let b = c0_padic.div(&a)?;
            (a, b)
        }
        (Err(Error::PrecisionExhausted(_)), Ok(b)) => {
            let a = c0_padic.div(&b)?;
            (a, b)
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    Ok(QuadraticRoots::TwoRoots(
        root_plus.truncate_precision(precision),
        root_minus.truncate_precision(precision),
    ))
}

fn half_sum(a: &PadicNumber, b: &PadicNumber, two: &PadicNumber) -> Result<PadicNumber> {
    a.add(b)?.div(two)
}

/// Fixed points `(t, t)` of the map; 0, 1 or 2, ordered canonically.
pub fn fixed_points(params: &HenonParams) -> Result<Vec<PlanePoint>> {
    let one = BigRational::one();
    let c1 = -(params.b_rational() - &one); // x^2 - (b-1)x - a
    let c0 = -params.a_rational().clone();
    let roots = solve_monic_quadratic(&c1, &c0, params.prime(), params.precision())?;
    Ok(roots
        .roots()
        .into_iter()
        .map(|t| PlanePoint::new(t.clone(), t.clone()))
        .collect())
}

/// The 2-cycle `{(t1, t2), (t2, t1)}` when it exists.
///
/// Absent exactly when `4a - 3(b-1)^2` is a non-square, and also in the
/// degenerate case where that discriminant vanishes (the double root is a
/// fixed point, not a 2-cycle).
pub fn two_cycle(params: &HenonParams) -> Result<Option<(PlanePoint, PlanePoint)>> {
    let one = BigRational::one();
    let b1 = params.b_rational() - &one;
    let c1 = b1.clone(); // x^2 + (b-1)x + ((b-1)^2 - a)
    let c0 = &b1 * &b1 - params.a_rational();
    match solve_monic_quadratic(&c1, &c0, params.prime(), params.precision())? {
        QuadraticRoots::TwoRoots(t1, t2) => Ok(Some((
            PlanePoint::new(t1.clone(), t2.clone()),
            PlanePoint::new(t2, t1),
        ))),
        QuadraticRoots::DoubleRoot(_) | QuadraticRoots::NoRoots => Ok(None),
    }
}

/// Which existence clause the parameters satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExistenceClause {
    /// `|a| < 1`, `|b| <= 1`, residue of b distinct from 1.
    SmallAUnitB,
    /// Region II- with `|a| < |b|^2`.
    RegionIIMinusStrict,
    /// Region III with `a` a square.
    RegionIIISquare,
}

/// Evaluation of the periodic-point existence criteria against the solver.
#[derive(Debug, Clone, Serialize)]
pub struct ExistenceReport {
    pub clause: Option<ExistenceClause>,
    /// Guaranteed by the applying clause (if any).
    pub fixed_points_predicted: bool,
    /// `Some(true)` when a 2-cycle is guaranteed; `None` when the clause makes
    /// no claim (its side hypotheses fail).
    pub two_cycle_predicted: Option<bool>,
    pub fixed_points_found: usize,
    pub two_cycle_found: bool,
    /// Solver output is consistent with every prediction made.
    pub consistent: bool,
}

/// Evaluate the existence clauses literally and cross-check the conclusions
/// against the quadratic solver.
pub fn existence_report(params: &HenonParams) -> Result<ExistenceReport> {
    let p = params.prime();
    let na = params.a().norm();
    let nb = params.b().norm();
    let one = crate::localfield::HalfLogNorm::ONE;
    let region = params.classify_region();

    let b_residue_is_one = {
        // |b| <= 1 required before reduction makes sense
        if nb <= one {
            params.b().reduce_mod(1).map(|r| r == 1).unwrap_or(false)
        } else {
            false
        }
    };

    let clause = if na < one && nb <= one && !b_residue_is_one {
        Some(ExistenceClause::SmallAUnitB)
    } else if region == RegionTag::IIminus && na < nb * nb {
        Some(ExistenceClause::RegionIIMinusStrict)
    } else if region == RegionTag::III
        && rational_is_square(params.a_rational(), p)
        && !params.a_rational().is_zero()
    {
        Some(ExistenceClause::RegionIIISquare)
    } else {
        None
    };

    // the 2-cycle side hypotheses of the first two clauses: residue
    // characteristic not 3, and -3 a square in Q_p
    let minus_three_square =
        p != 3 && rational_is_square(&BigRational::from_integer((-3).into()), p);

    let (fixed_predicted, cycle_predicted) = match clause {
        Some(ExistenceClause::SmallAUnitB) | Some(ExistenceClause::RegionIIMinusStrict) => {
            (true, if minus_three_square { Some(true) } else { None })
        }
        Some(ExistenceClause::RegionIIISquare) => (true, Some(true)),
        None => (false, None),
    };

    let fixed_found = fixed_points(params)?.len();
    let cycle_found = two_cycle(params)?.is_some();

    let mut consistent = true;
    if fixed_predicted && fixed_found != 2 {
        consistent = false;
    }
    if cycle_predicted == Some(true) && !cycle_found {
        consistent = false;
    }

    Ok(ExistenceReport {
        clause,
        fixed_points_predicted: fixed_predicted,
        two_cycle_predicted: cycle_predicted,
        fixed_points_found: fixed_found,
        two_cycle_found: cycle_found,
        consistent,
    })
}
