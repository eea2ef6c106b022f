//! Norm values with half-integer exponents.
//!
//! The escape radius of a Henon map is `max(1, |a|^(1/2), |b|)`, so norm
//! comparisons must resolve exponents in (1/2)Z exactly.  A norm is stored as
//! the integer numerator of its base-p exponent over a fixed denominator of 2,
//! and every comparison is an integer comparison.

use serde::{Deserialize, Serialize};

/// The norm value `p^(numerator/2)`, or the bottom element (the norm of 0).
///
/// The prime is not stored; comparing norms taken over different primes is
/// meaningless and up to the caller to avoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HalfLogNorm {
    /// Norm of the zero element; smaller than every finite norm.
    Bottom,
    /// `p^(numerator/2)`.
    Finite { numerator: i64 },
}

impl HalfLogNorm {
    pub const ONE: HalfLogNorm = HalfLogNorm::Finite { numerator: 0 };

    /// Norm of a nonzero element of valuation `v`, i.e. `p^-v`.
    pub fn from_valuation(v: i64) -> Self {
        HalfLogNorm::Finite { numerator: -2 * v }
    }

    /// `p^e` for an integer exponent `e`.
    pub fn integer_power(e: i64) -> Self {
        HalfLogNorm::Finite { numerator: 2 * e }
    }

    /// `p^(n/2)` for an arbitrary numerator `n`.
    pub fn half_power(numerator: i64) -> Self {
        HalfLogNorm::Finite { numerator }
    }

    /// Square root of a norm of even numerator; this is where half-integer
    /// exponents enter (`|a|^(1/2)` has numerator `-v_p(a)`).
    pub fn sqrt(self) -> Self {
        match self {
            HalfLogNorm::Bottom => HalfLogNorm::Bottom,
            HalfLogNorm::Finite { numerator } => {
                debug_assert!(numerator % 2 == 0, "sqrt of a half-integer exponent");
                HalfLogNorm::Finite { numerator: numerator / 2 }
            }
        }
    }

    /// `self^n` for `n >= 0`; Bottom stays Bottom.
    pub fn pow(self, n: u32) -> Self {
        match self {
            HalfLogNorm::Bottom => HalfLogNorm::Bottom,
            HalfLogNorm::Finite { numerator } => {
                HalfLogNorm::Finite { numerator: numerator * n as i64 }
            }
        }
    }

    /// Reciprocal of a finite norm; `None` for Bottom.
    pub fn recip(self) -> Option<Self> {
        match self {
            HalfLogNorm::Bottom => None,
            HalfLogNorm::Finite { numerator } => Some(HalfLogNorm::Finite { numerator: -numerator }),
        }
    }

    pub fn is_bottom(self) -> bool {
        self == HalfLogNorm::Bottom
    }

    /// Render against a concrete prime, e.g. `3^-2` or `3^(5/2)`.
    pub fn display_with(self, p: u64) -> String {
        match self {
            HalfLogNorm::Bottom => "0".to_string(),
            HalfLogNorm::Finite { numerator } => {
                if numerator % 2 == 0 {
                    format!("{}^{}", p, numerator / 2)
                } else {
                    format!("{}^({}/2)", p, numerator)
                }
            }
        }
    }
}

/// Multiplication of norms adds numerators; Bottom is absorbing.
impl std::ops::Mul for HalfLogNorm {
    type Output = HalfLogNorm;

    // log-scale representation: a product of norms is a sum of exponents
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, other: Self) -> Self {
        match (self, other) {
            (HalfLogNorm::Finite { numerator: a }, HalfLogNorm::Finite { numerator: b }) => {
                HalfLogNorm::Finite { numerator: a + b }
            }
            _ => HalfLogNorm::Bottom,
        }
    }
}

/// An ultrametric bound on a quantity, used where subtraction may cancel all
/// tracked digits: either the norm is known exactly, or it is only known to be
/// at most the resolution of the computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormBound {
    Exactly(HalfLogNorm),
    AtMost(HalfLogNorm),
}

impl NormBound {
    /// Upper bound (valid in either case).
    pub fn upper(self) -> HalfLogNorm {
        match self {
            NormBound::Exactly(n) | NormBound::AtMost(n) => n,
        }
    }

    pub fn exact(self) -> Option<HalfLogNorm> {
        match self {
            NormBound::Exactly(n) => Some(n),
            NormBound::AtMost(_) => None,
        }
    }

    /// The bound on `max(x, y)` given bounds on `x` and `y`.
    pub fn max(self, other: Self) -> Self {
        use NormBound::*;
        match (self, other) {
            (Exactly(a), Exactly(b)) => Exactly(a.max(b)),
            (Exactly(a), AtMost(m)) | (AtMost(m), Exactly(a)) => {
                if a >= m {
                    Exactly(a)
                } else {
                    AtMost(m)
                }
            }
            (AtMost(a), AtMost(b)) => AtMost(a.max(b)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_arithmetic() {
        let one = HalfLogNorm::ONE;
        let three = HalfLogNorm::integer_power(1);
        let third = HalfLogNorm::integer_power(-1);
        let sqrt3 = HalfLogNorm::half_power(1);
        assert!(HalfLogNorm::Bottom < third);
        assert!(third < one);
        assert!(one < sqrt3);
        assert!(sqrt3 < three);
        assert_eq!(three * third, one);
        assert_eq!(HalfLogNorm::integer_power(2).sqrt(), three);
        assert_eq!(three.pow(3), HalfLogNorm::integer_power(3));
        assert_eq!(HalfLogNorm::Bottom * three, HalfLogNorm::Bottom);
    }

    #[test]
    fn display() {
        assert_eq!(HalfLogNorm::integer_power(-2).display_with(3), "3^-2");
        assert_eq!(HalfLogNorm::half_power(1).display_with(3), "3^(1/2)");
        assert_eq!(HalfLogNorm::Bottom.display_with(3), "0");
    }

    #[test]
    fn norm_bound_max() {
        use NormBound::*;
        let a = HalfLogNorm::integer_power(-1);
        let b = HalfLogNorm::integer_power(-3);
        assert_eq!(Exactly(a).max(AtMost(b)), Exactly(a));
        assert_eq!(Exactly(b).max(AtMost(a)), AtMost(a));
    }
}
