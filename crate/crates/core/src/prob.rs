//! Exact chance probabilities.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational probability weight attached to a chance branch.
///
/// Parsed from either `p/q` or decimal text (`0.85`, `1e-2`). Normalization
/// checks are done on the exact values; evaluation uses [`Prob::to_f64`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prob(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number `{0}`")]
pub struct ParseProbError(pub String);

impl Prob {
    pub fn new(numer: i64, denom: i64) -> Self {
        Prob(BigRational::new(numer.into(), denom.into()))
    }

    pub fn zero() -> Self {
        Prob(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob(BigRational::one())
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Prob(r)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// `1 - self`.
    pub fn complement(&self) -> Self {
        Prob(BigRational::one() - &self.0)
    }

    /// True when the reduced denominator is a power of two, i.e. the value has
    /// a finite decimal expansion that is also exact in binary.
    pub fn is_dyadic(&self) -> bool {
        let d = self.0.denom();
        let two = BigInt::from(2);
        let mut d = d.clone();
        while (&d % &two).is_zero() {
            d /= &two;
        }
        d.is_one()
    }

    /// Exact conversion of a finite `f64` through its shortest decimal form,
    /// so `0.85` becomes `17/20` rather than the binary expansion.
    pub fn from_f64_decimal(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        format!("{x}").parse().ok()
    }

    pub fn sum<'a>(it: impl IntoIterator<Item = &'a Prob>) -> Prob {
        Prob(it.into_iter().fold(BigRational::zero(), |acc, p| acc + &p.0))
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all.parse().ok()?;
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(r)
}

impl FromStr for Prob {
    type Err = ParseProbError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ParseProbError(s.to_string());
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Prob(BigRational::new(n, d)))
        } else {
            parse_decimal(t).map(Prob).ok_or_else(err)
        }
    }
}

impl fmt::Display for Prob {
    /// Dyadic values print as exact decimals, everything else as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.0;
        if r.is_integer() {
            return write!(f, "{}", r.numer());
        }
        if !self.is_dyadic() {
            return write!(f, "{}/{}", r.numer(), r.denom());
        }
        // p / 2^k == p * 5^k / 10^k
        let mut k = 0usize;
        let mut d = r.denom().clone();
        let two = BigInt::from(2);
        while d > BigInt::one() {
            d /= &two;
            k += 1;
        }
        let scaled = r.numer() * num_traits::pow(BigInt::from(5), k);
        let neg = scaled.is_negative();
        let mut digits = scaled.abs().to_string();
        if digits.len() <= k {
            digits = format!("{}{}", "0".repeat(k + 1 - digits.len()), digits);
        }
        let (ip, fp) = digits.split_at(digits.len() - k);
        let fp = fp.trim_end_matches('0');
        write!(f, "{}{}.{}", if neg { "-" } else { "" }, ip, fp)
    }
}
