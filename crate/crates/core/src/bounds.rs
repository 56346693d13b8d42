//! Closed-form test-count bounds, reported with unit leading constants and
//! base-2 logarithms ("normalized"). None of these values are asymptotic
//! claims; they exist for reporting and for budget assertions.

use std::f64::consts::LN_2;

use crate::bernoulli::{c_double_prime, c_prime};
use crate::error::{Error, Result};
use crate::ladder::level_ells;
use crate::numeric::{int, log2, Delta, Rational, Real};

fn check_d(n: usize, upper_d: u64) -> Result<()> {
    if upper_d == 0 || upper_d > n as u64 {
        return Err(Error::Precondition(format!(
            "need 1 <= D <= n, got D={upper_d}, n={n}"
        )));
    }
    Ok(())
}

/// (D/Δ²)·log₂(n/D).
pub fn lower_bound_value(n: usize, upper_d: u64, delta: Delta) -> Result<Real> {
    check_d(n, upper_d)?;
    let scaled = Real::Exact(int(upper_d) / delta.squared());
    Ok(scaled * log2(&(int(n as u64) / int(upper_d))))
}

/// 2(D/Δ²)(log₂ n − log₂(D/Δ²)) + 2(D/Δ²); requires D ≥ Δ².
pub fn adaptive_budget(n: usize, upper_d: u64, delta: Delta) -> Result<Real> {
    check_d(n, upper_d)?;
    let scaled = int(upper_d) / delta.squared();
    if scaled < int(1) {
        return Err(Error::Precondition(format!(
            "adaptive budget needs D >= Δ², got D={upper_d}, Δ={delta}"
        )));
    }
    Ok(adaptive_expression(n, &scaled))
}

fn adaptive_expression(n: usize, scaled: &Rational) -> Real {
    let two_x = Real::Exact(int(2) * scaled);
    two_x.clone() * (log2(&int(n as u64)) - log2(scaled)) + two_x
}

/// The adaptive estimator's asserted ceiling: [`adaptive_budget`] plus 2 to
/// absorb rounding. Defined for every 1 ≤ D ≤ n.
pub fn adaptive_budget_with_slack(n: usize, upper_d: u64, delta: Delta) -> Result<Real> {
    check_d(n, upper_d)?;
    let scaled = int(upper_d) / delta.squared();
    Ok(adaptive_expression(n, &scaled) + Real::from(2))
}

/// (D/Δ²)(log₂(n/D) + log₂Δ), the non-adaptive upper bound shape.
pub fn upper_nonadaptive(n: usize, upper_d: u64, delta: Delta) -> Result<Real> {
    check_d(n, upper_d)?;
    let scaled = Real::Exact(int(upper_d) / delta.squared());
    Ok(scaled * (log2(&(int(n as u64) / int(upper_d))) + log2(&delta.to_rational())))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LadderBudget {
    /// Σᵢ t(D/Δⁱ) over the planned (truncated) levels.
    pub sum: Real,
    /// (cD/Δ²)[(Δ/(Δ−1))·log₂(n/D) + (Δ/(Δ−1))²·log₂Δ].
    pub majorant: f64,
    pub levels: usize,
}

/// Sums a tester family's per-level test count over the planned ladder and
/// evaluates the geometric-series majorant for family constant `c`.
pub fn ladder_budget<F>(
    n: usize,
    upper_d: u64,
    delta: Delta,
    min_ell: &Rational,
    t_formula: F,
    c: f64,
) -> Result<LadderBudget>
where
    F: Fn(&Rational) -> Real,
{
    check_d(n, upper_d)?;
    let levels = level_ells(upper_d, delta, min_ell);
    let sum = levels
        .iter()
        .fold(Real::from(0), |acc, (_, ell)| acc + t_formula(ell));
    Ok(LadderBudget {
        sum,
        majorant: ladder_majorant(n, upper_d, delta, c),
        levels: levels.len(),
    })
}

pub fn ladder_majorant(n: usize, upper_d: u64, delta: Delta, c: f64) -> f64 {
    let dl = delta.to_f64();
    let ratio = dl / (dl - 1.0);
    let scaled = upper_d as f64 / (dl * dl);
    c * scaled * (ratio * (n as f64 / upper_d as f64).log2() + ratio * ratio * dl.log2())
}

/// A constant c with m(ℓ,Δ) ≤ (cℓ/Δ²)·log₂(Δn/ℓ) for the Bernoulli tester's
/// row count m(ℓ,Δ) = ⌈c′ℓ/(Δ−1)²·ln(c″Δ²n/ℓ)⌉ whenever 2Δ² ≤ ℓ ≤ n.
///
/// Uses ln(c″Δ²n/ℓ) = ln2·(log₂(c″Δ) + log₂(Δn/ℓ)) with log₂(Δn/ℓ) ≥ log₂Δ,
/// and charges the ceiling's +1 to ℓ/Δ² ≥ 2.
pub fn bernoulli_family_constant(delta: Delta) -> f64 {
    let dl = delta.to_f64();
    let l2d = dl.log2();
    c_prime() * dl * dl * LN_2 / ((dl - 1.0) * (dl - 1.0)) * (1.0 + (c_double_prime() * dl).log2() / l2d)
        + 1.0 / (2.0 * l2d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub lower_adaptive: Real,
    pub upper_adaptive: Option<Real>,
    pub upper_nonadaptive: Real,
    /// Σᵢ (ℓᵢ/Δ²)·log₂(Δn/ℓᵢ) over the levels truncated at ℓ ≥ 2Δ².
    pub ladder_sum: Real,
}

pub fn bound_report(n: usize, upper_d: u64, delta: Delta) -> Result<BoundReport> {
    let lower_adaptive = lower_bound_value(n, upper_d, delta)?;
    let upper_adaptive = adaptive_budget(n, upper_d, delta).ok();
    let upper_nonadaptive = upper_nonadaptive(n, upper_d, delta)?;
    let min_ell = int(2) * delta.squared();
    let nd = int(n as u64) * delta.to_rational();
    let ladder = ladder_budget(
        n,
        upper_d,
        delta,
        &min_ell,
        |ell| Real::Exact(ell / delta.squared()) * log2(&(&nd / ell)),
        1.0,
    )?;
    Ok(BoundReport {
        lower_adaptive,
        upper_adaptive,
        upper_nonadaptive,
        ladder_sum: ladder.sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::t_formula_value;
    use crate::numeric::rational;

    fn delta(p: u64, q: u64) -> Delta {
        Delta::new(p, q).unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_value(1024, 16, delta(2, 1)).unwrap(), Real::Exact(int(24)));
        assert_eq!(lower_bound_value(64, 64, delta(2, 1)).unwrap(), Real::Exact(int(0)));
        // Δ → ∞: the value shrinks like 1/Δ²
        let big = lower_bound_value(1024, 16, delta(1_000_000, 1)).unwrap().to_f64();
        assert!(big < 1e-9);
        assert!(lower_bound_value(8, 9, delta(2, 1)).is_err());
    }

    #[test]
    fn adaptive_budget_examples() {
        assert_eq!(adaptive_budget(8, 4, delta(2, 1)).unwrap(), Real::Exact(int(8)));
        // D = Δ²: 2·log₂ n + 2
        assert_eq!(adaptive_budget(64, 9, delta(3, 1)).unwrap().to_f64(), 2.0 * 6.0 + 2.0);
        // n = D·Δ²: log₂(nΔ²/D) = log₂Δ⁴
        let (n, d, dl) = (64usize, 16u64, delta(2, 1));
        let x = 4.0;
        let expect = 2.0 * x * (4.0 * 1.0) + 2.0 * x;
        assert_eq!(adaptive_budget(n, d, dl).unwrap(), Real::Exact(int(expect as u64)));
        assert!(adaptive_budget(8, 3, delta(2, 1)).is_err());
    }

    #[test]
    fn slack_version_has_no_precondition() {
        let v = adaptive_budget_with_slack(8, 1, delta(3, 1)).unwrap();
        assert!(v.to_f64() > 2.0);
        assert_eq!(
            adaptive_budget_with_slack(8, 4, delta(2, 1)).unwrap(),
            Real::Exact(int(10))
        );
    }

    #[test]
    fn geometric_series_facts() {
        for dl in [delta(3, 2), delta(2, 1), delta(3, 1), delta(5, 4)] {
            let x = 1.0 / dl.to_f64();
            let r = dl.to_f64() / (dl.to_f64() - 1.0);
            let s1: f64 = (0..2000).map(|i| x.powi(i)).sum();
            let s2: f64 = (0..2000).map(|i| (i + 1) as f64 * x.powi(i)).sum();
            assert!(s1 <= r + 1e-9);
            assert!(s2 <= r * r + 1e-9);
            assert!((s2 - r * r).abs() < 1e-6);
        }
    }

    #[test]
    fn ladder_budget_mock_formula() {
        let dl = delta(2, 1);
        let b = ladder_budget(64, 16, dl, &(int(2) * dl.squared()), |ell| Real::Exact(ell.clone()), 1.0)
            .unwrap();
        assert_eq!(b.levels, 2);
        assert_eq!(b.sum, Real::Exact(int(24)));
    }

    #[test]
    fn bernoulli_levels_sit_under_the_majorant() {
        for (n, d, dl) in [
            (1024usize, 64u64, delta(2, 1)),
            (4096, 512, delta(3, 2)),
            (100_000, 1000, delta(3, 1)),
            (256, 256, delta(2, 1)),
        ] {
            let min_ell = int(2) * dl.squared();
            let b = ladder_budget(
                n,
                d,
                dl,
                &min_ell,
                |ell| Real::from(t_formula_value(n, ell, dl).ceil() as u64),
                bernoulli_family_constant(dl),
            )
            .unwrap();
            assert!(b.levels > 0);
            assert!(b.sum.to_f64() <= b.majorant, "{n} {d} {dl}: {} > {}", b.sum, b.majorant);
        }
    }

    #[test]
    fn lower_is_below_adaptive_when_n_over_d_at_least_4() {
        for n in [16usize, 64, 1000] {
            for d in 1..=(n as u64 / 4) {
                for dl in [delta(3, 2), delta(2, 1), delta(3, 1)] {
                    if let Ok(up) = adaptive_budget(n, d, dl) {
                        let lo = lower_bound_value(n, d, dl).unwrap();
                        assert!(lo.to_f64() <= up.to_f64());
                    }
                }
            }
        }
    }

    #[test]
    fn report_is_positive() {
        let r = bound_report(1024, 64, delta(2, 1)).unwrap();
        assert!(r.lower_adaptive.is_positive());
        assert!(r.upper_adaptive.unwrap().is_positive());
        assert!(r.upper_nonadaptive.is_positive());
        assert!(r.ladder_sum.is_positive());
        let _ = rational(1, 2);
    }
}
