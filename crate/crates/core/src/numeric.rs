//! Exact arithmetic helpers: the multiplicative factor, rationals, and
//! bound values that are exact when their logarithms are.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rational(numer: u64, denom: u64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `p/q` or a bare integer into a non-negative rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("expected p/q or an integer, got {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: u64 = p.parse().map_err(|_| bad())?;
    let q: u64 = q.parse().map_err(|_| bad())?;
    if q == 0 {
        return Err(bad());
    }
    Ok(rational(p, q))
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    // Ratio::to_f64 handles huge numerators/denominators without overflowing.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Smallest integer `k >= 0` with `2^k >= x`.
pub fn ceil_log2(x: &Rational) -> u32 {
    let mut k = 0u32;
    let mut pow = Rational::one();
    while &pow < x {
        pow *= int(2);
        k += 1;
    }
    k
}

/// The multiplicative estimation factor Δ = p/q, kept reduced with p > q ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Delta {
    p: u64,
    q: u64,
}

impl Delta {
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p <= q {
            return Err(Error::InvalidParameter(format!(
                "delta must be a rational p/q > 1, got {p}/{q}"
            )));
        }
        let g = p.gcd(&q);
        Ok(Self { p: p / g, q: q / g })
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn q(self) -> u64 {
        self.q
    }

    pub fn to_rational(self) -> Rational {
        rational(self.p, self.q)
    }

    pub fn squared(self) -> Rational {
        let d = self.to_rational();
        &d * &d
    }

    pub fn pow(self, e: u32) -> Rational {
        Rational::new(
            BigInt::from(self.p).pow(e),
            BigInt::from(self.q).pow(e),
        )
    }

    pub fn to_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Delta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = parse_rational(s)?;
        let p = r.numer().to_u64().ok_or_else(|| Error::InvalidParameter(s.into()))?;
        let q = r.denom().to_u64().ok_or_else(|| Error::InvalidParameter(s.into()))?;
        Delta::new(p, q)
    }
}

/// A bound value: exact when every logarithm in its formula was taken of a
/// power of two, otherwise a double-precision approximation.
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Exact(Rational),
    Approx(f64),
}

impl Real {
    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => to_f64(r),
            Real::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Real::Exact(r) => Some(r),
            Real::Approx(_) => None,
        }
    }

    /// `true` when `v <= self`; exact comparison when possible.
    pub fn admits(&self, v: u64) -> bool {
        match self {
            Real::Exact(r) => int(v) <= *r,
            Real::Approx(x) => (v as f64) <= *x,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Real::Exact(r) => r.is_positive(),
            Real::Approx(x) => *x > 0.0,
        }
    }
}

impl From<Rational> for Real {
    fn from(r: Rational) -> Self {
        Real::Exact(r)
    }
}

impl From<u64> for Real {
    fn from(v: u64) -> Self {
        Real::Exact(int(v))
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                match (self, rhs) {
                    (Real::Exact(a), Real::Exact(b)) => Real::Exact(a $op b),
                    (a, b) => Real::Approx(a.to_f64() $op b.to_f64()),
                }
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.to_f64())
    }
}

fn power_of_two_exponent(v: &BigInt) -> Option<i64> {
    if !v.is_positive() {
        return None;
    }
    let bits = v.bits();
    // a power of two has exactly one set bit
    if v.trailing_zeros() == Some(bits - 1) {
        Some(bits as i64 - 1)
    } else {
        None
    }
}

/// log₂ of a positive rational, exact when the argument is 2^k for integer k.
pub fn log2(x: &Rational) -> Real {
    let (n, d) = (x.numer(), x.denom());
    if let (Some(a), Some(b)) = (power_of_two_exponent(n), power_of_two_exponent(d)) {
        let e = a - b;
        let v = if e >= 0 {
            Rational::from_integer(BigInt::from(e))
        } else {
            -Rational::from_integer(BigInt::from(-e))
        };
        return Real::Exact(v);
    }
    Real::Approx(to_f64(x).log2())
}

/// e⁻¹·2^bits, truncated, from the alternating factorial series evaluated in
/// integer fixed point with 64 guard bits.
pub fn inv_e_fixed(bits: u32) -> BigUint {
    let guard = 64;
    let scale = BigUint::one() << (bits + guard);
    let mut term = scale.clone();
    let mut plus = BigUint::zero();
    let mut minus = BigUint::zero();
    let mut k = 0u32;
    while !term.is_zero() {
        if k.is_multiple_of(2) {
            plus += &term;
        } else {
            minus += &term;
        }
        k += 1;
        term /= k;
    }
    (plus - minus) >> guard
}
