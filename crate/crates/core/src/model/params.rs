use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ModelError;

/// A non-negative edge/vertex weight parameter `lambda = exp(-beta)`.
///
/// The exact rational is authoritative for oracles; the `f64` copy drives the
/// chains. A value parsed from decimal text (`"0.4"`) is held as the exact
/// decimal fraction, a value converted from `f64` as the exact dyadic
/// rational of that float.
#[derive(Debug, Clone, PartialEq)]
pub struct Fugacity {
    exact: BigRational,
    value: f64,
}

impl Fugacity {
    pub fn zero() -> Self {
        Fugacity {
            exact: BigRational::zero(),
            value: 0.0,
        }
    }

    pub fn one() -> Self {
        Fugacity {
            exact: BigRational::one(),
            value: 1.0,
        }
    }

    pub fn from_ratio(num: u64, den: u64) -> Result<Self, ModelError> {
        if den == 0 {
            return Err(ModelError::BadNumber(format!("{num}/0")));
        }
        Ok(Self::from_exact(BigRational::new(num.into(), den.into())))
    }

    pub fn from_exact(exact: BigRational) -> Self {
        assert!(!exact.is_negative(), "negative fugacity");
        let value = exact.to_f64().unwrap_or(f64::INFINITY);
        Fugacity { exact, value }
    }

    pub fn from_f64(x: f64) -> Result<Self, ModelError> {
        if !x.is_finite() || x < 0.0 {
            return Err(ModelError::NegativeFugacity(x));
        }
        let exact = BigRational::from_float(x).expect("finite float");
        Ok(Fugacity { exact, value: x })
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    /// `beta = -ln(lambda)`; infinite at zero.
    pub fn beta(&self) -> Temperature {
        if self.is_zero() {
            Temperature::Infinite
        } else {
            Temperature::Finite(-self.value.ln())
        }
    }
}

impl fmt::Display for Fugacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact.is_integer() || self.exact.denom() <= &BigInt::from(1000) {
            write!(f, "{}", self.exact)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl FromStr for Fugacity {
    type Err = ModelError;

    /// Accepts decimals (`0.4`, `2`, `1e-3` via float fallback) and fractions (`1/3`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || ModelError::BadNumber(s.to_string());
        if let Some((a, b)) = s.split_once('/') {
            let num: BigInt = a.trim().parse().map_err(|_| bad())?;
            let den: BigInt = b.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            let r = BigRational::new(num, den);
            if r.is_negative() {
                return Err(ModelError::NegativeFugacity(r.to_f64().unwrap_or(-1.0)));
            }
            return Ok(Self::from_exact(r));
        }
        if let Some(r) = parse_decimal(s) {
            if r.is_negative() {
                return Err(ModelError::NegativeFugacity(r.to_f64().unwrap_or(-1.0)));
            }
            return Ok(Self::from_exact(r));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        Self::from_f64(x)
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, den);
    Some(if neg { -r } else { r })
}

/// Inverse temperature `beta >= 0`, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Temperature {
    Finite(f64),
    Infinite,
}

impl Temperature {
    pub fn beta(self) -> f64 {
        match self {
            Temperature::Finite(b) => b,
            Temperature::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Temperature::Infinite)
    }

    /// `lambda = exp(-beta)`, with `beta = inf` mapped to exactly 0.
    pub fn fugacity(self) -> Result<Fugacity, ModelError> {
        match self {
            Temperature::Infinite => Ok(Fugacity::zero()),
            Temperature::Finite(b) if b.is_nan() || b < 0.0 => Err(ModelError::NegativeBeta(b)),
            Temperature::Finite(b) if b == 0.0 => Ok(Fugacity::one()),
            Temperature::Finite(b) => Fugacity::from_f64((-b).exp()),
        }
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Temperature::Finite(b) => write!(f, "{b}"),
            Temperature::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Temperature {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "INF" => Ok(Temperature::Infinite),
            t => {
                let b: f64 = t.parse().map_err(|_| ModelError::BadNumber(t.to_string()))?;
                if b.is_infinite() && b > 0.0 {
                    Ok(Temperature::Infinite)
                } else if b.is_nan() || b < 0.0 {
                    Err(ModelError::NegativeBeta(b))
                } else {
                    Ok(Temperature::Finite(b))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_text_is_exact() {
        let l: Fugacity = "0.4".parse().unwrap();
        assert_eq!(l.exact(), &BigRational::new(2.into(), 5.into()));
        let l: Fugacity = "1/3".parse().unwrap();
        assert_eq!(l.exact(), &BigRational::new(1.into(), 3.into()));
        assert!("-0.5".parse::<Fugacity>().is_err());
        assert!("abc".parse::<Fugacity>().is_err());
        assert!("1/0".parse::<Fugacity>().is_err());
        let l: Fugacity = "2.5e-1".parse().unwrap();
        assert_eq!(l.value(), 0.25);
    }

    #[test]
    fn infinite_beta_is_zero_fugacity() {
        assert!(Temperature::Infinite.fugacity().unwrap().is_zero());
        assert_eq!(Temperature::Finite(0.0).fugacity().unwrap(), Fugacity::one());
        assert_eq!("inf".parse::<Temperature>().unwrap(), Temperature::Infinite);
        assert!("-1".parse::<Temperature>().is_err());
        let l = Temperature::Finite(2.0).fugacity().unwrap();
        assert_eq!(l.value(), (-2.0f64).exp());
        assert!(matches!(l.beta(), Temperature::Finite(b) if (b - 2.0).abs() < 1e-12));
    }
}
