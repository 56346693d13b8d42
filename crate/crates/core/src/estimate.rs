//! Problem statement and the report every estimator returns.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, int, to_f64, Delta, Rational, Real};

/// Estimate d for `n` items given an upper bound `D >= d` and factor Δ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimationProblem {
    n: usize,
    upper_d: u64,
    delta: Delta,
}

impl EstimationProblem {
    pub fn new(n: usize, upper_d: u64, delta: Delta) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if upper_d == 0 || upper_d > n as u64 {
            return Err(Error::InvalidParameter(format!(
                "upper bound D={upper_d} must satisfy 1 <= D <= n={n}"
            )));
        }
        Ok(Self { n, upper_d, delta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn upper_d(&self) -> u64 {
        self.upper_d
    }

    pub fn delta(&self) -> Delta {
        self.delta
    }

    /// D/Δ², exact.
    pub fn scaled_bound(&self) -> Rational {
        int(self.upper_d) / self.delta.squared()
    }

    /// D < Δ²: any algorithm may answer D/Δ without testing.
    pub fn below_delta_squared(&self) -> bool {
        let (p, q) = (self.delta.p() as u128, self.delta.q() as u128);
        (self.upper_d as u128) * q * q < p * p
    }

    /// D/Δ, the answer when D < Δ².
    pub fn trivial_estimate(&self) -> Rational {
        int(self.upper_d) / self.delta.to_rational()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Adaptive,
    BernoulliLadder,
    ExpanderLadder,
    CondenserLadder,
    /// Ladder over exact-count testers built from individual testing.
    ReferenceLadder,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Adaptive => "adaptive",
            Method::BernoulliLadder => "bernoulli-ladder",
            Method::ExpanderLadder => "expander-ladder",
            Method::CondenserLadder => "condenser-ladder",
            Method::ReferenceLadder => "reference-ladder",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(Method::Adaptive),
            "bernoulli" | "bernoulli-ladder" => Ok(Method::BernoulliLadder),
            "expander" | "expander-ladder" => Ok(Method::ExpanderLadder),
            "condenser" | "condenser-ladder" => Ok(Method::CondenserLadder),
            "reference" | "reference-ladder" => Ok(Method::ReferenceLadder),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// An estimate d̂. Rational in every case except the ladder's
/// geometric-midpoint fallback, which is the square root of a rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Estimate {
    Rational(Rational),
    SqrtOf(Rational),
}

impl Estimate {
    pub fn count(v: u64) -> Self {
        Estimate::Rational(int(v))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Estimate::Rational(r) | Estimate::SqrtOf(r) => r.is_zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Estimate::Rational(r) => to_f64(r),
            Estimate::SqrtOf(r) => to_f64(r).sqrt(),
        }
    }

    /// d/Δ ≤ d̂ ≤ dΔ, with d = 0 accepted only for d̂ = 0. Exact.
    pub fn within_factor(&self, d: u64, delta: Delta) -> bool {
        if d == 0 {
            return self.is_zero();
        }
        let lo = int(d) / delta.to_rational();
        let hi = int(d) * delta.to_rational();
        match self {
            Estimate::Rational(r) => *r >= lo && *r <= hi,
            Estimate::SqrtOf(r) => {
                !r.is_negative() && *r >= &lo * &lo && *r <= &hi * &hi
            }
        }
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Estimate::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Estimate::Rational(r) => f.write_str(&format_rational(r)),
            Estimate::SqrtOf(r) => write!(f, "sqrt({})", format_rational(r)),
        }
    }
}

/// Conditions worth surfacing next to an estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReportFlags {
    /// D < Δ²: answered by the trivial rule instead of running the estimator.
    pub short_circuit: bool,
    /// No ladder level fired but the global pool did; the bottom-rung policy chose d̂.
    pub bottom_rung: bool,
    /// The bottom-rung value is not certified for every count in the residual range.
    pub bottom_gap: bool,
}

#[derive(Clone, Debug)]
pub struct EstimateReport {
    pub estimate: Estimate,
    /// Oracle ledger delta over the run.
    pub tests_used: u64,
    pub method: Method,
    /// Normalized lower bound (D/Δ²)·log₂(n/D) for the instance.
    pub bound_reference: Real,
    pub flags: ReportFlags,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;

    fn delta(p: u64, q: u64) -> Delta {
        Delta::new(p, q).unwrap()
    }

    #[test]
    fn problem_validation() {
        assert!(EstimationProblem::new(8, 0, delta(2, 1)).is_err());
        assert!(EstimationProblem::new(8, 9, delta(2, 1)).is_err());
        let p = EstimationProblem::new(8, 4, delta(2, 1)).unwrap();
        assert_eq!(p.scaled_bound(), int(1));
        assert!(!p.below_delta_squared());
        assert!(EstimationProblem::new(8, 3, delta(2, 1)).unwrap().below_delta_squared());
        assert!(EstimationProblem::new(8, 2, delta(3, 2)).unwrap().below_delta_squared());
        assert!(!EstimationProblem::new(8, 3, delta(3, 2)).unwrap().below_delta_squared());
    }

    #[test]
    fn within_factor_is_exact() {
        let d = delta(3, 2);
        assert!(Estimate::Rational(rational(2, 1)).within_factor(3, d));
        assert!(Estimate::Rational(rational(9, 2)).within_factor(3, d));
        assert!(!Estimate::Rational(rational(9, 2) + rational(1, 1000)).within_factor(3, d));
        assert!(Estimate::count(0).within_factor(0, d));
        assert!(!Estimate::count(1).within_factor(0, d));
        assert!(!Estimate::count(0).within_factor(1, d));
        // sqrt(15/4) ≈ 1.936 > 1.5 = 1·Δ
        assert!(!Estimate::SqrtOf(rational(15, 4)).within_factor(1, d));
        assert!(Estimate::SqrtOf(rational(15, 4)).within_factor(2, d));
    }

    #[test]
    fn display() {
        assert_eq!(Estimate::count(4).to_string(), "4");
        assert_eq!(Estimate::Rational(rational(8, 3)).to_string(), "8/3");
        assert_eq!(Estimate::SqrtOf(rational(64, 9)).to_string(), "sqrt(64/9)");
        assert_eq!("bernoulli".parse::<Method>().unwrap(), Method::BernoulliLadder);
    }
}
