//! Exact rational probabilities.

use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, Mul, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact rational number, used for probabilities and refinement degrees.
///
/// Displays as the shortest exact decimal (`0.93`) when the reduced
/// denominator has no prime factors other than 2 and 5, and as a fraction
/// (`1/3`) otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prob(BigRational);

impl Prob {
    pub fn new(numer: i64, denom: i64) -> Self {
        Prob(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn zero() -> Self {
        Prob(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// True iff the value lies in `[0, 1]`.
    pub fn is_probability(&self) -> bool {
        !self.0.is_negative() && self.0 <= BigRational::one()
    }

    pub fn complement(&self) -> Self {
        Prob(BigRational::one() - &self.0)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// The decimal rendering, if the value has a finite decimal expansion.
    pub fn to_decimal(&self) -> Option<String> {
        let denom = self.0.denom().clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let (mut rest, mut twos, mut fives) = (denom.clone(), 0u32, 0u32);
        while rest.is_even() {
            rest /= &two;
            twos += 1;
        }
        while (&rest % &five).is_zero() {
            rest /= &five;
            fives += 1;
        }
        if !rest.is_one() {
            return None;
        }
        let places = twos.max(fives);
        let scaled = self.0.numer() * num_traits::pow(BigInt::from(10), places as usize) / denom;
        let negative = scaled.is_negative();
        let digits = scaled.abs().to_string();
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if places == 0 {
            out.push_str(&digits);
            return Some(out);
        }
        let places = places as usize;
        let padded = if digits.len() <= places {
            let mut s = "0".repeat(places + 1 - digits.len());
            s.push_str(&digits);
            s
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - places);
        out.push_str(int);
        out.push('.');
        out.push_str(frac);
        Some(out)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_decimal() {
            Some(d) => f.write_str(&d),
            None => write!(f, "{}/{}", self.0.numer(), self.0.denom()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid probability literal {0:?}")]
pub struct ParseProbError(pub String);

impl FromStr for Prob {
    type Err = ParseProbError;

    /// Accepts `3`, `0.93`, `.5` and `93/100`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseProbError(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if let Some((n, d)) = s.split_once('/') {
            if !digits(n) || !digits(d) {
                return Err(err());
            }
            let n: BigInt = n.parse().map_err(|_| err())?;
            let d: BigInt = d.parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Prob(BigRational::new(n, d)));
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if (int.is_empty() && frac.is_empty())
            || !(int.is_empty() || digits(int))
            || !(frac.is_empty() || digits(frac))
            || (s.contains('.') && frac.is_empty())
        {
            return Err(err());
        }
        let mut all = String::from(int);
        all.push_str(frac);
        let n: BigInt = all.parse().map_err(|_| err())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        Ok(Prob(BigRational::new(n, d)))
    }
}

impl Add for Prob {
    type Output = Prob;
    fn add(self, rhs: Prob) -> Prob {
        Prob(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Prob> for &'a Prob {
    type Output = Prob;
    fn add(self, rhs: &'a Prob) -> Prob {
        Prob(&self.0 + &rhs.0)
    }
}

impl Sub for Prob {
    type Output = Prob;
    fn sub(self, rhs: Prob) -> Prob {
        Prob(self.0 - rhs.0)
    }
}

impl Mul for Prob {
    type Output = Prob;
    fn mul(self, rhs: Prob) -> Prob {
        Prob(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Prob> for &'a Prob {
    type Output = Prob;
    fn mul(self, rhs: &'a Prob) -> Prob {
        Prob(&self.0 * &rhs.0)
    }
}

impl core::iter::Sum for Prob {
    fn sum<I: Iterator<Item = Prob>>(iter: I) -> Prob {
        iter.fold(Prob::zero(), |a, b| a + b)
    }
}

impl<'a> core::iter::Sum<&'a Prob> for Prob {
    fn sum<I: Iterator<Item = &'a Prob>>(iter: I) -> Prob {
        iter.fold(Prob::zero(), |a, b| &a + b)
    }
}
