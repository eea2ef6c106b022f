//! Exact arithmetic in Q_p for odd p, with explicit precision semantics.
//!
//! A nonzero value is stored in floating style as `p^v * u + O(p^(v+N))`:
//! an exact valuation `v`, a unit `u` coprime to `p` with `1 <= u < p^N`, and
//! a tracked relative precision `N >= 1`.  The representation is a coset, not
//! a number: arithmetic propagates the largest relative precision that the
//! result is provably correct to.  Addition of nearly-cancelling terms loses
//! digits; when every tracked digit cancels the operation fails with
//! `PrecisionExhausted` rather than fabricating a zero.
//!
//! Zero is the exact zero (valuation +infinity); it arises only from exact
//! inputs (e.g. parsing the rational 0), never from cancellation.

mod norm;

pub use norm::{HalfLogNorm, NormBound};

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// small modular helpers over u64 (residue-field arithmetic)
// ---------------------------------------------------------------------------

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` (coprime inputs), by extended Euclid.
pub(crate) fn inv_mod_u64(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inputs not coprime");
    (t.rem_euclid(m as i128)) as u64
}

/// Deterministic primality check by trial division; primes here are small.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).map(|s| s <= n).unwrap_or(false) {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler criterion: is `u` (a unit) a quadratic residue mod the odd prime `p`?
pub(crate) fn is_qr_mod_p(u: u64, p: u64) -> bool {
    pow_mod(u, (p - 1) / 2, p) == 1
}

/// Tonelli-Shanks square root of a quadratic residue modulo an odd prime.
pub(crate) fn sqrt_mod_p(u: u64, p: u64) -> u64 {
    let u = u % p;
    debug_assert!(is_qr_mod_p(u, p));
    if p % 4 == 3 {
        return pow_mod(u, (p + 1) / 4, p);
    }
    // write p - 1 = q * 2^s with q odd
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    // find a quadratic non-residue z
    let mut z = 2;
    while is_qr_mod_p(z, p) {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(u, q, p);
    let mut r = pow_mod(u, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = mul_mod(b, b, p);
        }
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

// ---------------------------------------------------------------------------
// BigUint helpers modulo p^k
// ---------------------------------------------------------------------------

fn pk_big(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// Inverse of a unit modulo `p^k` by Newton doubling from the mod-p inverse.
fn inv_mod_pk(u: &BigUint, p: u64, k: u32) -> BigUint {
    let u0 = (u % BigUint::from(p)).to_u64().unwrap();
    let mut inv = BigUint::from(inv_mod_u64(u0, p));
    let mut prec = 1u32;
    let two = BigUint::from(2u32);
    while prec < k {
        prec = (prec * 2).min(k);
        let modulus = pk_big(p, prec);
        // inv <- inv * (2 - u * inv) mod p^prec
        let t = (u % &modulus) * &inv % &modulus;
        let correction = (&two + &modulus - t) % &modulus;
        inv = inv * correction % &modulus;
    }
    inv
}

/// Number of factors of `p` in a nonzero BigUint, plus the cofactor.
fn split_valuation(p: u64, n: &BigUint) -> (i64, BigUint) {
    debug_assert!(!n.is_zero());
    let p_big = BigUint::from(p);
    let mut v = 0i64;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&p_big);
        if r.is_zero() {
            v += 1;
            rest = q;
        } else {
            return (v, rest);
        }
    }
}

// ---------------------------------------------------------------------------
// PadicNumber
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Val {
    /// The exact zero (valuation +infinity).
    Zero,
    /// `p^v * unit + O(p^(v + prec))` with `1 <= unit < p^prec`, `p` not
    /// dividing `unit`.
    Approx { v: i64, unit: BigUint, prec: u32 },
}

/// A p-adic number at tracked relative precision.  Immutable after
/// construction; safe to share across threads.
///
/// Values born from rationals additionally remember the exact rational they
/// denote (until it grows past a size valve).  Ring operations on two exact
/// values stay exact, so identities like `x - x = 0` resolve to the exact
/// zero instead of dying of cancellation; everything downstream of a square
/// root is a plain tracked coset.
#[derive(Debug, Clone, Eq)]
pub struct PadicNumber {
    p: u64,
    val: Val,
    exact: Option<Box<BigRational>>,
}

impl PartialEq for PadicNumber {
    /// Representation equality: prime, valuation, digits, and tracked
    /// precision.  Exactness is a refinement, not part of the denotation.
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.val == other.val
    }
}

/// Exactness is dropped once a rational outgrows this many bits across
/// numerator and denominator (squaring orbits double it every step).
const EXACT_SIZE_VALVE_BITS: u64 = 4096;

fn small_enough(r: &BigRational) -> bool {
    r.numer().bits() + r.denom().bits() <= EXACT_SIZE_VALVE_BITS
}

impl PadicNumber {
    // ----- constructors ----------------------------------------------------

    /// Validate a prime for this field: odd prime, at least 3.
    pub fn check_prime(p: u64) -> Result<()> {
        if p < 3 || p.is_multiple_of(2) || !is_prime_u64(p) {
            return Err(Error::Parse(format!("{p} is not an odd prime >= 3")));
        }
        Ok(())
    }

    pub fn zero(p: u64) -> Self {
        PadicNumber { p, val: Val::Zero, exact: None }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        PadicNumber::from_integer(1, p, prec)
    }

    pub fn from_integer(n: i64, p: u64, prec: u32) -> Self {
        PadicNumber::from_rational(&BigRational::from_integer(n.into()), p, prec)
            .expect("integer parse cannot fail")
    }

    /// The p-adic expansion of `num/den`, correct to relative precision
    /// `prec`; the valuation is `v_p(num) - v_p(den)`.
    pub fn parse_rational(num: i64, den: i64, p: u64, prec: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let r = BigRational::new(num.into(), den.into());
        PadicNumber::from_rational(&r, p, prec)
    }

    /// Exact reduction of a rational with `p` not dividing the reduced
    /// denominator beyond its valuation.
    pub fn from_rational(r: &BigRational, p: u64, prec: u32) -> Result<Self> {
        Self::check_prime(p)?;
        if !(1..=1 << 16).contains(&prec) {
            return Err(Error::Parse(format!(
                "precision {prec} out of range 1..=65536"
            )));
        }
        if r.is_zero() {
            return Ok(PadicNumber::zero(p));
        }
        let num = r.numer();
        let den = r.denom();
        let sign_negative = num.is_negative();
        let num_abs = num.abs().to_biguint().unwrap();
        let den_abs = den.abs().to_biguint().unwrap();
        let (vn, nu) = split_valuation(p, &num_abs);
        let (vd, du) = split_valuation(p, &den_abs);
        let v = vn - vd;
        let modulus = pk_big(p, prec);
        let mut unit = (nu % &modulus) * inv_mod_pk(&(du % &modulus), p, prec) % &modulus;
        if sign_negative {
            unit = (&modulus - unit) % &modulus;
        }
        debug_assert!(!(&unit % BigUint::from(p)).is_zero());
        let exact = small_enough(r).then(|| Box::new(r.clone()));
        Ok(PadicNumber { p, val: Val::Approx { v, unit, prec }, exact })
    }

    /// Build from `digits * p^v_base` where `digits` is known modulo
    /// `p^digits_prec`.  Strips trailing factors of `p`; fails with
    /// `PrecisionExhausted` when every tracked digit is zero.
    fn from_parts(p: u64, v_base: i64, digits: BigUint, digits_prec: u32) -> Result<Self> {
        let modulus = pk_big(p, digits_prec);
        let digits = digits % &modulus;
        if digits.is_zero() {
            return Err(Error::PrecisionExhausted(
                "all tracked digits cancelled".into(),
            ));
        }
        let (t, unit_full) = split_valuation(p, &digits);
        let prec = digits_prec - t as u32;
        if prec < 1 {
            return Err(Error::PrecisionExhausted(
                "fewer than one significant digit remains".into(),
            ));
        }
        let unit = unit_full % pk_big(p, prec);
        debug_assert!(!unit.is_zero());
        Ok(PadicNumber { p, val: Val::Approx { v: v_base + t, unit, prec }, exact: None })
    }

    // ----- accessors -------------------------------------------------------

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.val, Val::Zero)
    }

    /// Valuation of a nonzero element; `None` for zero (v = +infinity).
    pub fn valuation(&self) -> Option<i64> {
        match &self.val {
            Val::Zero => None,
            Val::Approx { v, .. } => Some(*v),
        }
    }

    /// Tracked relative precision; `None` for the exact zero.
    pub fn precision(&self) -> Option<u32> {
        match &self.val {
            Val::Zero => None,
            Val::Approx { prec, .. } => Some(*prec),
        }
    }

    /// Unit digits modulo `p^k`, for `k` at most the tracked precision.
    pub fn unit_mod(&self, k: u32) -> Option<u64> {
        match &self.val {
            Val::Zero => None,
            Val::Approx { unit, prec, .. } => {
                debug_assert!(k <= *prec);
                (unit % pk_big(self.p, k.min(*prec))).to_u64()
            }
        }
    }

    /// Absolute precision exponent: the value is known modulo `p^(v+prec)`.
    /// `None` for exact zero (known to all orders).
    pub fn absolute_precision(&self) -> Option<i64> {
        match &self.val {
            Val::Zero => None,
            Val::Approx { v, prec, .. } => Some(v + *prec as i64),
        }
    }

    /// The exact rational this value denotes, when known.
    pub fn exact_rational(&self) -> Option<BigRational> {
        match &self.val {
            Val::Zero => Some(BigRational::zero()),
            Val::Approx { .. } => self.exact.as_deref().cloned(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.val, Val::Zero) || self.exact.is_some()
    }

    /// Absolute precision for bookkeeping, where "exact" counts as infinite.
    fn arith_absolute_precision(&self) -> i64 {
        if self.exact.is_some() {
            i64::MAX
        } else {
            match &self.val {
                Val::Zero => i64::MAX,
                Val::Approx { v, prec, .. } => v + *prec as i64,
            }
        }
    }

    /// Unit digits to `rel` relative digits, re-deriving from the exact
    /// rational when more digits than stored are needed.
    fn unit_at(&self, rel: u32) -> BigUint {
        match &self.val {
            Val::Zero => unreachable!("zero has no unit"),
            Val::Approx { unit, prec, .. } => {
                if rel <= *prec {
                    unit % pk_big(self.p, rel)
                } else {
                    let r = self.exact.as_deref().expect("inexact digits are capped at prec");
                    match PadicNumber::from_rational(r, self.p, rel)
                        .expect("valid rational")
                        .val
                    {
                        Val::Approx { unit, .. } => unit,
                        Val::Zero => unreachable!("nonzero value"),
                    }
                }
            }
        }
    }

    pub fn norm(&self) -> HalfLogNorm {
        match &self.val {
            Val::Zero => HalfLogNorm::Bottom,
            Val::Approx { v, .. } => HalfLogNorm::from_valuation(*v),
        }
    }

    /// Drop the exact-rational refinement, leaving the bare tracked coset.
    pub fn forget_exactness(&self) -> Self {
        PadicNumber { p: self.p, val: self.val.clone(), exact: None }
    }

    /// Lower the tracked precision to `k` digits (no-op if already coarser).
    pub fn truncate_precision(&self, k: u32) -> Self {
        match &self.val {
            Val::Zero => self.clone(),
            Val::Approx { v, unit, prec } => {
                let k = k.max(1);
                if k >= *prec {
                    self.clone()
                } else {
                    PadicNumber {
                        p: self.p,
                        val: Val::Approx { v: *v, unit: unit % pk_big(self.p, k), prec: k },
                        exact: self.exact.clone(),
                    }
                }
            }
        }
    }

    fn require_same_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Parse(format!(
                "mixed primes {} and {}",
                self.p, other.p
            )));
        }
        Ok(())
    }

    // ----- ring operations ---------------------------------------------------

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.require_same_prime(other)?;
        match (&self.val, &other.val) {
            (Val::Zero, _) => Ok(other.clone()),
            (_, Val::Zero) => Ok(self.clone()),
            (Val::Approx { v: vx, prec: nx, .. }, Val::Approx { v: vy, prec: ny, .. }) => {
                // two exact operands: the sum is exact (possibly exactly zero)
                if let (Some(rx), Some(ry)) = (self.exact.as_deref(), other.exact.as_deref())
                {
                    let r = rx + ry;
                    if small_enough(&r) {
                        return PadicNumber::from_rational(&r, self.p, (*nx).min(*ny));
                    }
                }
                // result digits are trustworthy up to the coarser absolute
                // precision of the two operands; when the size valve dropped
                // us here with both operands exact, the stored windows govern
                let abs = if self.exact.is_some() && other.exact.is_some() {
                    (vx + *nx as i64).min(vy + *ny as i64)
                } else {
                    self.arith_absolute_precision()
                        .min(other.arith_absolute_precision())
                };
                let v_base = (*vx).min(*vy);
                let m = (abs - v_base) as u32;
                let modulus = pk_big(self.p, m);
                let shifted = |v: i64, x: &PadicNumber| -> BigUint {
                    let s = (v - v_base) as u32;
                    if s >= m {
                        BigUint::zero()
                    } else {
                        (x.unit_at(m - s) * pk_big(self.p, s)) % &modulus
                    }
                };
                let digits = (shifted(*vx, self) + shifted(*vy, other)) % &modulus;
                PadicNumber::from_parts(self.p, v_base, digits, m)
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.val {
            Val::Zero => self.clone(),
            Val::Approx { v, unit, prec } => {
                let modulus = pk_big(self.p, *prec);
                PadicNumber {
                    p: self.p,
                    val: Val::Approx { v: *v, unit: (&modulus - unit) % &modulus, prec: *prec },
                    exact: self.exact.as_deref().map(|r| Box::new(-r.clone())),
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.require_same_prime(other)?;
        match (&self.val, &other.val) {
            (Val::Zero, _) | (_, Val::Zero) => Ok(PadicNumber::zero(self.p)),
            (
                Val::Approx { v: vx, prec: nx, .. },
                Val::Approx { v: vy, prec: ny, .. },
            ) => {
                if let (Some(rx), Some(ry)) = (self.exact.as_deref(), other.exact.as_deref())
                {
                    let r = rx * ry;
                    if small_enough(&r) {
                        return PadicNumber::from_rational(&r, self.p, (*nx).min(*ny));
                    }
                }
                let v = vx.checked_add(*vy).ok_or(Error::ValuationOverflow)?;
                // an exact factor does not cap the result's precision
                let prec = match (self.exact.is_some(), other.exact.is_some()) {
                    (true, false) => *ny,
                    (false, true) => *nx,
                    _ => (*nx).min(*ny),
                };
                let modulus = pk_big(self.p, prec);
                let unit = self.unit_at(prec) * other.unit_at(prec) % &modulus;
                Ok(PadicNumber { p: self.p, val: Val::Approx { v, unit, prec }, exact: None })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.require_same_prime(other)?;
        match (&self.val, &other.val) {
            (_, Val::Zero) => Err(Error::DivisionByZero),
            (Val::Zero, _) => Ok(PadicNumber::zero(self.p)),
            (
                Val::Approx { v: vx, prec: nx, .. },
                Val::Approx { v: vy, prec: ny, .. },
            ) => {
                if let (Some(rx), Some(ry)) = (self.exact.as_deref(), other.exact.as_deref())
                {
                    let r = rx / ry;
                    if small_enough(&r) {
                        return PadicNumber::from_rational(&r, self.p, (*nx).min(*ny));
                    }
                }
                let v = vx.checked_sub(*vy).ok_or(Error::ValuationOverflow)?;
                let prec = match (self.exact.is_some(), other.exact.is_some()) {
                    (true, false) => *ny,
                    (false, true) => *nx,
                    _ => (*nx).min(*ny),
                };
                let modulus = pk_big(self.p, prec);
                let unit =
                    self.unit_at(prec) * inv_mod_pk(&other.unit_at(prec), self.p, prec)
                        % &modulus;
                Ok(PadicNumber { p: self.p, val: Val::Approx { v, unit, prec }, exact: None })
            }
        }
    }

    /// `self * p^e`: exact shift of the valuation.
    pub fn shift(&self, e: i64) -> Result<Self> {
        match &self.val {
            Val::Zero => Ok(self.clone()),
            Val::Approx { v, unit, prec } => Ok(PadicNumber {
                p: self.p,
                val: Val::Approx {
                    v: v.checked_add(e).ok_or(Error::ValuationOverflow)?,
                    unit: unit.clone(),
                    prec: *prec,
                },
                exact: self.exact.as_deref().map(|r| {
                    let p_big = num_bigint::BigInt::from(self.p);
                    let scale = if e >= 0 {
                        BigRational::from_integer(p_big.pow(e as u32))
                    } else {
                        BigRational::new(1.into(), p_big.pow((-e) as u32))
                    };
                    Box::new(r * scale)
                }),
            }),
        }
    }

    // ----- squares -----------------------------------------------------------

    /// True iff a nonzero element is a square in Q_p: even valuation and the
    /// unit residue a quadratic residue mod p (odd p).
    pub fn is_square(&self) -> Result<bool> {
        match &self.val {
            Val::Zero => Err(Error::NotSquare("zero has no unit part".into())),
            Val::Approx { v, unit, .. } => {
                if v % 2 != 0 {
                    return Ok(false);
                }
                let u0 = (unit % BigUint::from(self.p)).to_u64().unwrap();
                Ok(is_qr_mod_p(u0, self.p))
            }
        }
    }

    /// Square root of a nonzero square, by a quadratic-residue test at the
    /// residue field followed by Hensel-Newton lifting (odd p, so the lift is
    /// unramified and keeps full relative precision).
    ///
    /// Canonical branch: the returned root's unit residue mod p lies in
    /// `{1, ..., (p-1)/2}`.
    pub fn sqrt(&self) -> Result<Self> {
        match &self.val {
            Val::Zero => Err(Error::NotSquare("zero has no canonical root".into())),
            Val::Approx { v, unit, prec } => {
                if v % 2 != 0 {
                    return Err(Error::NotSquare(format!("odd valuation {v}")));
                }
                let p = self.p;
                let u0 = (unit % BigUint::from(p)).to_u64().unwrap();
                if !is_qr_mod_p(u0, p) {
                    return Err(Error::NotSquare(format!(
                        "unit residue {u0} is not a quadratic residue mod {p}"
                    )));
                }
                let root_unit = sqrt_unit_mod_pk(unit, p, *prec);
                // canonical branch: first digit in {1, ..., (p-1)/2}
                let c = (&root_unit % BigUint::from(p)).to_u64().unwrap();
                let modulus = pk_big(p, *prec);
                let root_unit = if c <= (p - 1) / 2 {
                    root_unit
                } else {
                    (&modulus - root_unit) % &modulus
                };
                Ok(PadicNumber {
                    p,
                    val: Val::Approx { v: v / 2, unit: root_unit, prec: *prec },
                    exact: None,
                })
            }
        }
    }

    // ----- reduction -----------------------------------------------------------

    /// The residue of an integral element modulo `p^k`, in `[0, p^k)`.
    ///
    /// Requires `v >= 0` and enough digits: `v + prec >= k`.
    pub fn reduce_mod(&self, k: u32) -> Result<u64> {
        match &self.val {
            Val::Zero => Ok(0),
            Val::Approx { v, prec, .. } => {
                if *v < 0 {
                    return Err(Error::NotIntegral { valuation: *v });
                }
                if self.exact.is_none() && v + i64::from(*prec) < i64::from(k) {
                    return Err(Error::PrecisionExhausted(format!(
                        "residue mod {}^{} needs {} digits, have {}",
                        self.p,
                        k,
                        i64::from(k) - v,
                        prec
                    )));
                }
                if *v >= k as i64 {
                    return Ok(0);
                }
                let modulus = pk_big(self.p, k);
                let rel = k - *v as u32;
                let r = (self.unit_at(rel) * pk_big(self.p, *v as u32)) % &modulus;
                Ok(r.to_u64().expect("p^k fits u64 when asked for u64 residue"))
            }
        }
    }

    // ----- comparisons -----------------------------------------------------------

    /// Could the two cosets denote the same number?  Compares valuations
    /// exactly and units to the coarser tracked precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.p != other.p {
            return false;
        }
        match (&self.val, &other.val) {
            (Val::Zero, Val::Zero) => true,
            (Val::Zero, Val::Approx { .. }) | (Val::Approx { .. }, Val::Zero) => false,
            (
                Val::Approx { v: vx, unit: ux, prec: nx },
                Val::Approx { v: vy, unit: uy, prec: ny },
            ) => {
                if vx != vy {
                    return false;
                }
                let m = pk_big(self.p, (*nx).min(*ny));
                ux % &m == uy % &m
            }
        }
    }

    /// Norm of `self - other`: exactly known, or, when every tracked digit
    /// cancels, bounded by the resolution of the subtraction.
    pub fn difference_norm(&self, other: &Self) -> Result<NormBound> {
        match self.sub(other) {
            Ok(d) => Ok(NormBound::Exactly(d.norm())),
            Err(Error::PrecisionExhausted(_)) => {
                let ax = self.absolute_precision();
                let ay = other.absolute_precision();
                let abs = match (ax, ay) {
                    (Some(a), Some(b)) => a.min(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    // both exact zero: difference is exactly zero
                    (None, None) => return Ok(NormBound::Exactly(HalfLogNorm::Bottom)),
                };
                Ok(NormBound::AtMost(HalfLogNorm::from_valuation(abs)))
            }
            Err(e) => Err(e),
        }
    }

    // ----- formatting -----------------------------------------------------------

    /// Digit expansion string: nonzero terms `d*p^e` in increasing exponent
    /// order, closed by the `O(p^(v+N))` precision marker.  Bit-exact.
    pub fn digit_expansion(&self) -> String {
        match &self.val {
            Val::Zero => "0".to_string(),
            Val::Approx { v, unit, prec } => {
                let p_big = BigUint::from(self.p);
                let mut terms = Vec::new();
                let mut rest = unit.clone();
                for i in 0..*prec {
                    let (q, r) = rest.div_rem(&p_big);
                    if !r.is_zero() {
                        terms.push(format!("{}*{}^{}", r, self.p, v + i as i64));
                    }
                    rest = q;
                }
                terms.push(format!("O({}^{})", self.p, v + *prec as i64));
                terms.join(" + ")
            }
        }
    }
}

/// Hensel-Newton lift of the square root of a unit `u` (a QR mod p) to
/// `p^prec`: quadratic doubling from the Tonelli-Shanks root mod p.
fn sqrt_unit_mod_pk(u: &BigUint, p: u64, prec: u32) -> BigUint {
    let u0 = (u % BigUint::from(p)).to_u64().unwrap();
    let mut r = BigUint::from(sqrt_mod_p(u0, p));
    let mut cur = 1u32;
    let inv2_seed = inv_mod_u64(2, p);
    let _ = inv2_seed;
    while cur < prec {
        cur = (cur * 2).min(prec);
        let modulus = pk_big(p, cur);
        // r <- (r + u / r) / 2  mod p^cur
        let r_inv = inv_mod_pk(&(&r % &modulus), p, cur);
        let t = (u % &modulus) * r_inv % &modulus;
        let inv2 = inv_mod_pk(&BigUint::from(2u32), p, cur);
        r = (r + t) % &modulus * inv2 % &modulus;
    }
    debug_assert_eq!(
        (&r * &r) % pk_big(p, prec),
        u % pk_big(p, prec),
        "lifted root must square back exactly at tracked precision"
    );
    r
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.val {
            Val::Zero => write!(f, "0"),
            Val::Approx { v, unit, prec } => {
                write!(f, "{}^{} * ({} mod {}^{})", self.p, v, unit, self.p, prec)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// textual literals
// ---------------------------------------------------------------------------

/// Parse a textual p-adic literal into an exact rational.
///
/// Two forms are accepted:
/// * rational: `num/den` or a plain integer, optionally signed;
/// * digit form: `d0+d1*p+d2*p^2+...` with every digit in `[0, p)`.
pub fn parse_literal(s: &str, p: u64) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty literal".into()));
    }
    let digit_form = s.contains('*') || s[1..].contains('+');
    if digit_form {
        parse_digit_literal(s, p)
    } else if let Some((n, d)) = s.split_once('/') {
        let num: num_bigint::BigInt =
            n.trim().parse().map_err(|_| Error::Parse(format!("bad numerator {n:?}")))?;
        let den: num_bigint::BigInt =
            d.trim().parse().map_err(|_| Error::Parse(format!("bad denominator {d:?}")))?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BigRational::new(num, den))
    } else {
        let num: num_bigint::BigInt =
            s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))?;
        Ok(BigRational::from_integer(num))
    }
}

fn parse_digit_literal(s: &str, p: u64) -> Result<BigRational> {
    let mut total = num_bigint::BigInt::zero();
    for term in s.split('+') {
        let term = term.trim();
        let (digit_str, power) = match term.split_once('*') {
            None => (term, 0u32),
            Some((d, rest)) => {
                let rest = rest.trim();
                let power = if let Some((base, exp)) = rest.split_once('^') {
                    if base.trim() != p.to_string() {
                        return Err(Error::Parse(format!(
                            "digit literal base {base:?} does not match prime {p}"
                        )));
                    }
                    exp.trim().parse::<u32>().map_err(|_| {
                        Error::Parse(format!("bad exponent {exp:?} in digit literal"))
                    })?
                } else {
                    if rest != p.to_string() {
                        return Err(Error::Parse(format!(
                            "digit literal base {rest:?} does not match prime {p}"
                        )));
                    }
                    1
                };
                (d.trim(), power)
            }
        };
        let digit: u64 = digit_str
            .parse()
            .map_err(|_| Error::Parse(format!("bad digit {digit_str:?}")))?;
        if digit >= p {
            return Err(Error::Parse(format!("digit {digit} not in [0, {p})")));
        }
        total += num_bigint::BigInt::from(digit) * num_bigint::BigInt::from(p).pow(power);
    }
    Ok(BigRational::from_integer(total))
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn arb_prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![3u64, 5, 7])
    }

    fn arb_rational() -> impl Strategy<Value = (i64, i64)> {
        (-200i64..=200, 1i64..=200).prop_map(|(n, d)| (n, d))
    }

    proptest! {
        // ultrametric: |x+y| <= max(|x|, |y|), equality whenever |x| != |y|
        #[test]
        fn ultrametric(p in arb_prime(), (nx, dx) in arb_rational(), (ny, dy) in arb_rational()) {
            let x = PadicNumber::parse_rational(nx, dx, p, 12).unwrap();
            let y = PadicNumber::parse_rational(ny, dy, p, 12).unwrap();
            match x.add(&y) {
                Ok(s) => {
                    prop_assert!(s.norm() <= x.norm().max(y.norm()));
                    if x.norm() != y.norm() {
                        prop_assert_eq!(s.norm(), x.norm().max(y.norm()));
                    }
                }
                // total cancellation is consistent with the inequality and can
                // only happen when the two norms coincide
                Err(Error::PrecisionExhausted(_)) => prop_assert_eq!(x.norm(), y.norm()),
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }
        }

        // div(mul(x, y), y) = x at tracked precision
        #[test]
        fn mul_div_roundtrip(p in arb_prime(), (nx, dx) in arb_rational(), (ny, dy) in arb_rational()) {
            prop_assume!(nx != 0 && ny != 0);
            let x = PadicNumber::parse_rational(nx, dx, p, 10).unwrap();
            let y = PadicNumber::parse_rational(ny, dy, p, 10).unwrap();
            let back = x.mul(&y).unwrap().div(&y).unwrap();
            prop_assert!(back.agrees_with(&x));
        }

        // parsed arithmetic agrees with exact rational arithmetic
        #[test]
        fn matches_rational_arithmetic(p in arb_prime(), (nx, dx) in arb_rational(), (ny, dy) in arb_rational()) {
            let rx = BigRational::new(nx.into(), dx.into());
            let ry = BigRational::new(ny.into(), dy.into());
            let x = PadicNumber::from_rational(&rx, p, 14).unwrap();
            let y = PadicNumber::from_rational(&ry, p, 14).unwrap();

            let exact_sum = PadicNumber::from_rational(&(&rx + &ry), p, 14).unwrap();
            match x.add(&y) {
                Ok(s) => prop_assert!(s.agrees_with(&exact_sum)),
                Err(Error::PrecisionExhausted(_)) => {
                    // cancellation past the tracked digits: the exact sum must
                    // indeed be at least that deep
                    let deep = exact_sum.is_zero()
                        || exact_sum.valuation().unwrap()
                            >= x.absolute_precision()
                                .unwrap()
                                .min(y.absolute_precision().unwrap());
                    prop_assert!(deep);
                }
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            }

            let exact_prod = PadicNumber::from_rational(&(&rx * &ry), p, 14).unwrap();
            prop_assert!(x.mul(&y).unwrap().agrees_with(&exact_prod));

            if ny != 0 {
                let exact_quot = PadicNumber::from_rational(&(&rx / &ry), p, 14).unwrap();
                prop_assert!(x.div(&y).unwrap().agrees_with(&exact_quot));
            }
        }

        // chains of coset operations stay consistent with exact rationals
        #[test]
        fn op_chains_match_rationals(
            p in arb_prime(),
            (n0, d0) in arb_rational(),
            ops in prop::collection::vec((0u8..3, arb_rational()), 1..6),
        ) {
            let r0 = BigRational::new(n0.into(), d0.into());
            let mut acc = PadicNumber::from_rational(&r0, p, 16).unwrap().forget_exactness();
            let mut exact = r0;
            for (op, (n, d)) in ops {
                let r = BigRational::new(n.into(), d.into());
                let x = PadicNumber::from_rational(&r, p, 16).unwrap().forget_exactness();
                let stepped = match op {
                    0 => acc.add(&x),
                    1 => acc.mul(&x),
                    _ => acc.sub(&x),
                };
                match stepped {
                    Ok(next) => {
                        acc = next;
                        exact = match op {
                            0 => exact + r,
                            1 => exact * r,
                            _ => exact - r,
                        };
                        let reference = PadicNumber::from_rational(&exact, p, 24).unwrap();
                        prop_assert!(acc.agrees_with(&reference), "chain diverged from rationals");
                    }
                    // cancellation stops the chain; nothing left to compare
                    Err(Error::PrecisionExhausted(_)) => break,
                    Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
                }
            }
        }

        // sqrt contract on random squares
        #[test]
        fn sqrt_squares_back(p in arb_prime(), (nx, dx) in arb_rational()) {
            prop_assume!(nx != 0);
            let x = PadicNumber::parse_rational(nx, dx, p, 12).unwrap();
            let sq = x.mul(&x).unwrap();
            let r = sq.sqrt().unwrap();
            prop_assert!(r.mul(&r).unwrap().agrees_with(&sq));
            let c = r.unit_mod(1).unwrap();
            prop_assert!(c >= 1 && c <= (p - 1) / 2);
        }
    }
}
