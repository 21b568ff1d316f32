//! Exact circular-angle arithmetic.
//!
//! Angles are stored as rational numbers of half-turns, normalized into
//! `[0, 2)` (so a value `v` means `v·π` radians). All arithmetic is exact:
//! the propagation engine relies on the fact that no operation ever
//! manufactures an angle value through rounding. Floating point appears only
//! at the very edge, in [`Angle::to_radians`].

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

/// Reduce a rational number of half-turns into `[0, 2)`.
fn normalize(r: BigRational) -> BigRational {
    let t = two();
    let m = &r - &t * (&r / &t).floor();
    debug_assert!(!m.is_negative() && m < t);
    m
}

/// An exact direction on the circle: a rational count of half-turns in `[0, 2)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(BigRational);

impl Angle {
    /// Builds an angle from a rational number of half-turns, normalizing mod 2.
    pub fn from_half_turns(r: BigRational) -> Self {
        Angle(normalize(r))
    }

    /// Convenience constructor: `num/den` half-turns.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "angle denominator must be nonzero");
        Angle::from_half_turns(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact conversion from degrees: `deg/180` half-turns.
    pub fn from_degrees(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero());
        Angle::from_half_turns(BigRational::new(num, den * BigInt::from(180)))
    }

    pub fn zero() -> Self {
        Angle(BigRational::zero())
    }

    pub fn pi() -> Self {
        Angle(BigRational::one())
    }

    /// The normalized value in half-turns, guaranteed in `[0, 2)`.
    pub fn half_turns(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `self ⊕ other`: addition mod 2π.
    pub fn circ_add(&self, other: &Angle) -> Angle {
        Angle::from_half_turns(&self.0 + &other.0)
    }

    /// `self ⊖ other`: the anticlockwise angular distance of `self` from `other`.
    pub fn circ_sub(&self, other: &Angle) -> AngleSpan {
        AngleSpan(normalize(&self.0 - &other.0))
    }

    /// Diametrically opposite direction. An exact involution.
    pub fn add_pi(&self) -> Angle {
        Angle::from_half_turns(&self.0 + BigRational::one())
    }

    /// Advance by a span (anticlockwise).
    pub fn add_span(&self, span: &AngleSpan) -> Angle {
        Angle::from_half_turns(&self.0 + &span.0)
    }

    /// True when the angle lies in `[0, π)`, the axis range of the half-plane calculi.
    pub fn in_axis_range(&self) -> bool {
        self.0 < BigRational::one()
    }

    /// Reduce into `[0, π)` by subtracting π if needed; returns the reduced
    /// angle and whether a shift happened.
    pub fn reduce_axis(&self) -> (Angle, bool) {
        if self.in_axis_range() {
            (self.clone(), false)
        } else {
            (Angle(&self.0 - BigRational::one()), true)
        }
    }

    /// Best double-precision approximation of the angle in radians.
    pub fn to_radians(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI
    }

    /// Double-precision value in half-turns.
    pub fn to_f64_half_turns(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            return write!(f, "0");
        }
        if self.0.is_one() {
            return write!(f, "pi");
        }
        if self.0.denom().is_one() {
            return write!(f, "{}pi", self.0.numer());
        }
        write!(f, "{}/{}pi", self.0.numer(), self.0.denom())
    }
}

/// The result of `β ⊖ α`: an exact span in `[0, 2)` half-turns.
///
/// A span qualifies as a *basic-constraint* span iff it is `< 1` (strictly
/// under π radians).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AngleSpan(BigRational);

impl AngleSpan {
    pub fn zero() -> Self {
        AngleSpan(BigRational::zero())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Spans under π radians are the ones a single basic constraint may carry.
    pub fn is_basic(&self) -> bool {
        self.0 < BigRational::one()
    }

    /// Exact half span (used when splitting wide arcs).
    pub fn half(&self) -> AngleSpan {
        AngleSpan(&self.0 / two())
    }

    /// Plain (non-modular) rational sum of two spans. The anticlockwise-inside
    /// predicate needs the ordinary sum, which may reach up to 4.
    pub fn plain_add(&self, other: &AngleSpan) -> BigRational {
        &self.0 + &other.0
    }

    pub fn to_f64_half_turns(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for AngleSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}·pi", self.0.numer(), self.0.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AngleParseError {
    #[error("empty angle literal")]
    Empty,
    #[error("malformed angle literal `{0}`: expected forms like `3/4pi`, `2pi`, `pi`, `45deg`, `22.5deg`, or `0`")]
    Malformed(String),
    #[error("zero denominator in angle literal `{0}`")]
    ZeroDenominator(String),
}

fn parse_bigint(s: &str) -> Option<BigInt> {
    if s.is_empty() {
        return None;
    }
    BigInt::from_str(s).ok()
}

/// Parse a decimal literal (`12`, `-3.25`) into an exact rational.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    let numer = parse_bigint(if digits.is_empty() { "0" } else { &digits })?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(BigRational::new(BigInt::from(sign) * numer, denom))
}

impl FromStr for Angle {
    type Err = AngleParseError;

    /// Angle literal syntax: `<p>/<q>pi`, `<p>pi`, `pi`, `<n>deg` (integer or
    /// decimal degrees, converted exactly), or `0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(AngleParseError::Empty);
        }
        if s == "0" {
            return Ok(Angle::zero());
        }
        if let Some(body) = s.strip_suffix("deg") {
            let r = parse_decimal(body.trim())
                .ok_or_else(|| AngleParseError::Malformed(s.to_string()))?;
            return Ok(Angle::from_half_turns(
                r / BigRational::from_integer(BigInt::from(180)),
            ));
        }
        if let Some(body) = s.strip_suffix("pi") {
            let body = body.trim();
            if body.is_empty() {
                return Ok(Angle::pi());
            }
            if let Some((num, den)) = body.split_once('/') {
                let n = parse_bigint(num.trim())
                    .ok_or_else(|| AngleParseError::Malformed(s.to_string()))?;
                let d = parse_bigint(den.trim())
                    .ok_or_else(|| AngleParseError::Malformed(s.to_string()))?;
                if d.is_zero() {
                    return Err(AngleParseError::ZeroDenominator(s.to_string()));
                }
                return Ok(Angle::from_half_turns(BigRational::new(n, d)));
            }
            let n = parse_bigint(body).ok_or_else(|| AngleParseError::Malformed(s.to_string()))?;
            return Ok(Angle::from_half_turns(BigRational::from_integer(n)));
        }
        Err(AngleParseError::Malformed(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(n: i64, d: i64) -> Angle {
        Angle::ratio(n, d)
    }

    #[test]
    fn circ_sub_basics() {
        // π/2 ⊖ 0 = π/2
        assert_eq!(
            a(1, 2).circ_sub(&Angle::zero()),
            a(1, 2).circ_sub(&Angle::zero())
        );
        assert_eq!(
            *a(1, 2).circ_sub(&Angle::zero()).value(),
            BigRational::new(1.into(), 2.into())
        );
        // π/4 ⊖ 7π/4 = π/2 (wrap forced by the mod-2π definition)
        assert_eq!(
            *a(1, 4).circ_sub(&a(7, 4)).value(),
            BigRational::new(1.into(), 2.into())
        );
        // identity
        assert!(a(5, 3).circ_sub(&a(5, 3)).is_zero());
    }

    #[test]
    fn circ_add_basics() {
        // 3π/2 ⊕ 3π/4 = π/4
        assert_eq!(a(3, 2).circ_add(&a(3, 4)), a(1, 4));
        assert_eq!(a(5, 7).circ_add(&Angle::zero()), a(5, 7));
        // π ⊕ π = 0
        assert_eq!(Angle::pi().circ_add(&Angle::pi()), Angle::zero());
    }

    #[test]
    fn add_pi_basics() {
        assert_eq!(Angle::zero().add_pi(), Angle::pi());
        assert_eq!(a(3, 2).add_pi(), a(1, 2));
        assert_eq!(a(7, 5).add_pi().add_pi(), a(7, 5));
    }

    #[test]
    fn to_radians_known_constants() {
        assert_eq!(Angle::zero().to_radians(), 0.0);
        assert_eq!(Angle::pi().to_radians(), 3.141592653589793);
        assert_eq!(a(1, 2).to_radians(), 1.5707963267948966);
    }

    #[test]
    fn normalization_is_total() {
        assert_eq!(a(-1, 2), a(3, 2));
        assert_eq!(a(9, 2), a(1, 2));
        assert_eq!(a(4, 1), Angle::zero());
    }

    #[test]
    fn parse_literals() {
        assert_eq!("3/4pi".parse::<Angle>().unwrap(), a(3, 4));
        assert_eq!("2pi".parse::<Angle>().unwrap(), Angle::zero());
        assert_eq!("pi".parse::<Angle>().unwrap(), Angle::pi());
        assert_eq!("0".parse::<Angle>().unwrap(), Angle::zero());
        assert_eq!("45deg".parse::<Angle>().unwrap(), a(1, 4));
        assert_eq!("22.5deg".parse::<Angle>().unwrap(), a(1, 8));
        assert_eq!("-90deg".parse::<Angle>().unwrap(), a(3, 2));
        assert!("1.5pi".parse::<Angle>().is_err());
        assert!("3/0pi".parse::<Angle>().is_err());
        assert!("".parse::<Angle>().is_err());
        assert!("deg".parse::<Angle>().is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0", "pi", "3/4pi", "7/5pi"] {
            let x: Angle = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
            assert_eq!(x.to_string().parse::<Angle>().unwrap(), x);
        }
    }

    fn arb_angle() -> impl Strategy<Value = Angle> {
        (-400i64..400, 1i64..48).prop_map(|(n, d)| Angle::ratio(n, d))
    }

    proptest! {
        #[test]
        fn sub_inverts_add(x in arb_angle(), y in arb_angle()) {
            let sum = x.circ_add(&y);
            let back = sum.circ_sub(&y);
            prop_assert_eq!(back.value(), x.half_turns());
        }

        #[test]
        fn add_pi_involution(x in arb_angle()) {
            prop_assert_eq!(x.add_pi().add_pi(), x);
        }

        #[test]
        fn normalized_range(x in arb_angle()) {
            prop_assert!(!x.half_turns().is_negative());
            prop_assert!(*x.half_turns() < BigRational::from_integer(2.into()));
        }
    }
}
