//! Signed log-magnitude scalars.
//!
//! Multi-copy quantities such as `Π^n` or `d^{2n}` leave the range of `f64`
//! long before `n` reaches the millions, while their ratios stay of order
//! one. A [`LogScalar`] carries `sign · exp(ln_mag)` so sums and differences
//! can be formed by factoring out the larger exponent.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// `ln(1 - e^x)` for `x <= 0`, accurate on both sides of `-ln 2`.
pub fn ln_one_minus_exp(x: f64) -> f64 {
    debug_assert!(x <= 0.0 || x.is_nan());
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(e^y - 1)` for `y >= 0`, without overflowing for large `y`.
pub fn ln_expm1(y: f64) -> f64 {
    if y <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if y > 30.0 {
        y + ln_one_minus_exp(-y)
    } else {
        y.exp_m1().ln()
    }
}

/// Real number stored as a sign and the natural log of its magnitude.
#[derive(Clone, Copy, PartialEq)]
pub struct LogScalar {
    sign: i8,
    ln_mag: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        sign: 0,
        ln_mag: f64::NEG_INFINITY,
    };
    pub const ONE: LogScalar = LogScalar { sign: 1, ln_mag: 0.0 };

    /// Builds `sign · e^{ln_mag}`; a magnitude of `-inf` collapses to zero.
    pub fn from_parts(sign: i8, ln_mag: f64) -> Self {
        if sign == 0 || ln_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogScalar {
                sign: sign.signum(),
                ln_mag,
            }
        }
    }

    /// Positive number `e^{ln_mag}`.
    pub fn from_ln(ln_mag: f64) -> Self {
        Self::from_parts(1, ln_mag)
    }

    pub fn from_f64(x: f64) -> Self {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => Self::from_parts(1, x.ln()),
            Some(Ordering::Less) => Self::from_parts(-1, (-x).ln()),
            _ => Self::ZERO,
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of `|x|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.ln_mag
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_mag / std::f64::consts::LN_10
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Lossy conversion; underflows to `±0` and overflows to `±inf`.
    pub fn to_f64(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.ln_mag.exp(),
        }
    }

    pub fn abs(&self) -> Self {
        Self::from_parts(self.sign.abs(), self.ln_mag)
    }

    /// `x^n` for a non-negative integer exponent.
    pub fn powu(&self, n: u64) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let sign = if self.sign < 0 && n % 2 == 1 {
            -1
        } else {
            self.sign.abs()
        };
        Self::from_parts(sign, self.ln_mag * n as f64)
    }
}

impl Neg for LogScalar {
    type Output = LogScalar;

    fn neg(self) -> LogScalar {
        LogScalar {
            sign: -self.sign,
            ln_mag: self.ln_mag,
        }
    }
}

impl Add for LogScalar {
    type Output = LogScalar;

    fn add(self, rhs: LogScalar) -> LogScalar {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_mag >= rhs.ln_mag {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = small.ln_mag - big.ln_mag;
        if big.sign == small.sign {
            LogScalar::from_parts(big.sign, big.ln_mag + gap.exp().ln_1p())
        } else if gap == 0.0 {
            LogScalar::ZERO
        } else {
            LogScalar::from_parts(big.sign, big.ln_mag + ln_one_minus_exp(gap))
        }
    }
}

impl Sub for LogScalar {
    type Output = LogScalar;

    fn sub(self, rhs: LogScalar) -> LogScalar {
        self + (-rhs)
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;

    fn mul(self, rhs: LogScalar) -> LogScalar {
        LogScalar::from_parts(self.sign * rhs.sign, self.ln_mag + rhs.ln_mag)
    }
}

impl Div for LogScalar {
    type Output = LogScalar;

    /// Division by zero yields a signed infinite magnitude.
    fn div(self, rhs: LogScalar) -> LogScalar {
        if self.sign == 0 {
            return LogScalar::ZERO;
        }
        let sign = if rhs.sign == 0 { self.sign } else { self.sign * rhs.sign };
        LogScalar::from_parts(sign, self.ln_mag - rhs.ln_mag)
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.ln_mag.partial_cmp(&other.ln_mag),
                _ => other.ln_mag.partial_cmp(&self.ln_mag),
            },
            ord => Some(ord),
        }
    }
}

impl fmt::Debug for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "LogScalar(0)"),
            s => write!(f, "LogScalar({}exp({}))", if s < 0 { "-" } else { "" }, self.ln_mag),
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return write!(f, "0");
        }
        let log10 = self.log10_abs();
        let exponent = log10.floor();
        let mantissa = 10f64.powf(log10 - exponent);
        let sign = if self.sign < 0 { "-" } else { "" };
        write!(f, "{sign}{mantissa:.6}e{exponent}")
    }
}

/// Wire form: `{"sign": -1|0|1, "ln_mag": <f64 or null>}`.
#[derive(Serialize, Deserialize)]
struct LogScalarRepr {
    sign: i8,
    ln_mag: Option<f64>,
}

impl Serialize for LogScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LogScalarRepr {
            sign: self.sign,
            ln_mag: (self.sign != 0).then_some(self.ln_mag),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LogScalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = LogScalarRepr::deserialize(deserializer)?;
        Ok(LogScalar::from_parts(
            repr.sign,
            repr.ln_mag.unwrap_or(f64::NEG_INFINITY),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn round_trips_ordinary_reals() {
        for x in [1e-300, -3.5, 0.25, 7.0, 1e300, -1e-300] {
            assert!(rel(LogScalar::from_f64(x).to_f64(), x) < 1e-13, "{x}");
        }
        assert!(LogScalar::from_f64(0.0).is_zero());
    }

    #[test]
    fn subtraction_of_equal_values_is_zero() {
        let a = LogScalar::from_ln(-1e6);
        assert!((a - a).is_zero());
    }

    #[test]
    fn power_survives_extreme_exponents() {
        let p = LogScalar::from_f64(0.68).powu(1_000_000);
        assert_eq!(p.sign(), 1);
        assert!(rel(p.ln_abs(), 1e6 * 0.68f64.ln()) < 1e-14);
        assert_eq!(LogScalar::from_f64(-2.0).powu(3).sign(), -1);
        assert_eq!(LogScalar::from_f64(-2.0).powu(4).sign(), 1);
    }

    #[test]
    fn ordering_respects_sign() {
        let neg = LogScalar::from_f64(-5.0);
        let small = LogScalar::from_f64(1e-9);
        assert!(neg < LogScalar::ZERO);
        assert!(LogScalar::ZERO < small);
        assert!(LogScalar::from_f64(-1.0) > neg);
    }

    #[test]
    fn helpers_match_direct_forms() {
        for y in [1e-8f64, 0.3, 2.0, 29.0, 31.0, 700.0] {
            let direct = y.exp_m1().ln();
            assert!(rel(ln_expm1(y), direct) < 1e-14, "{y}");
        }
        for x in [-1e-10f64, -0.2, -0.7, -3.0, -50.0] {
            let direct = (1.0 - x.exp()).ln();
            // direct form loses ~|1/x| ulps near zero
            assert!(
                (ln_one_minus_exp(x) - direct).abs() < 1e-6 * direct.abs() + 1e-15,
                "{x}"
            );
        }
    }

    #[test]
    fn serializes_zero_with_null_magnitude() {
        let json = serde_json::to_string(&LogScalar::ZERO).unwrap();
        assert_eq!(json, r#"{"sign":0,"ln_mag":null}"#);
        let back: LogScalar = serde_json::from_str(&json).unwrap();
        assert!(back.is_zero());
    }

    proptest! {
        #[test]
        fn add_then_subtract_recovers(
            la in -1e7f64..1e7, lb in -1e7f64..1e7,
            sa in prop::bool::ANY, sb in prop::bool::ANY,
        ) {
            let a = LogScalar::from_parts(if sa { 1 } else { -1 }, la);
            let b = LogScalar::from_parts(if sb { 1 } else { -1 }, lb);
            let back = (a - b) + b;
            // When b dwarfs a, (a - b) + b loses digits for plain floats too.
            prop_assume!(la - lb > -5.0);
            prop_assert_eq!(back.sign(), a.sign());
            let err = (back.ln_abs() - a.ln_abs()).abs();
            prop_assert!(err <= 1e-12 * a.ln_abs().abs().max(1.0), "err {}", err);
        }

        #[test]
        fn same_sign_addition_is_accurate(x in 1e-6f64..1e6, y in 1e-6f64..1e6) {
            let s = (LogScalar::from_f64(x) + LogScalar::from_f64(y)).to_f64();
            prop_assert!(rel(s, x + y) <= 1e-13);
        }
    }
}
