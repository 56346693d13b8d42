use gtcount::adaptive::{budget_for, estimate_adaptive};
use gtcount::numeric::int;
use gtcount::{Delta, Estimate, EstimationProblem, TestOracle};
use proptest::prelude::*;

fn run(n: usize, upper_d: u64, delta: (u64, u64), hidden: &[usize]) -> gtcount::EstimateReport {
    let problem = EstimationProblem::new(n, upper_d, Delta::new(delta.0, delta.1).unwrap()).unwrap();
    estimate_adaptive(&TestOracle::with_defectives(n, hidden.iter().copied()).unwrap(), &problem).unwrap()
}

#[test]
fn single_defective_among_eight() {
    let r = run(8, 8, (2, 1), &[3]);
    assert_eq!(r.estimate, Estimate::count(1));
    assert_eq!(r.tests_used, 6);
}

#[test]
fn empty_set_stops_after_the_first_round() {
    let r = run(8, 8, (2, 1), &[]);
    assert!(r.estimate.is_zero());
    assert_eq!(r.tests_used, 2);
}

#[test]
fn large_frontier_scales_by_delta() {
    // Both halves answer 1, |Q| = 2 > D/Δ² = 1, so d̂ = 2Δ.
    let r = run(8, 4, (2, 1), &[1, 2, 3, 4, 5]);
    assert_eq!(r.estimate, Estimate::count(4));
    assert_eq!(r.tests_used, 2);
}

#[test]
fn small_bound_short_circuits() {
    // D < Δ²: the global pool alone decides.
    let r = run(50, 3, (2, 1), &[7, 9]);
    assert!(r.flags.short_circuit);
    assert_eq!(r.estimate, Estimate::Rational(int(3) / int(2)));
    assert_eq!(r.tests_used, 1);
}

#[test]
fn all_defective() {
    let all: Vec<usize> = (1..=64).collect();
    let r = run(64, 64, (2, 1), &all);
    assert!(r.estimate.within_factor(64, Delta::new(2, 1).unwrap()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn guarantee_and_budget(
        n in 1usize..=96,
        d_frac in 0.0f64..=1.0,
        slack in 0.0f64..=1.0,
        which in 0usize..4,
        seed in any::<u64>(),
    ) {
        let (p, q) = [(3u64, 2u64), (2, 1), (3, 1), (5, 4)][which];
        let d = (n as f64 * d_frac) as usize;
        let upper_d = (d.max(1) + ((n - d.max(1)) as f64 * slack) as usize) as u64;
        let hidden: Vec<usize> = gtcount::rng::SeededRng::new(seed).sample_distinct(n, d).into_iter().map(|i| i + 1).collect();
        let r = run(n, upper_d, (p, q), &hidden);
        let delta = Delta::new(p, q).unwrap();
        prop_assert!(r.estimate.within_factor(d as u64, delta));
        prop_assert_eq!(r.estimate.is_zero(), d == 0);
        if (d as u64) * p * p <= upper_d * q * q {
            prop_assert_eq!(&r.estimate, &Estimate::count(d as u64));
        }
        let problem = EstimationProblem::new(n, upper_d, delta).unwrap();
        prop_assert!(r.tests_used as f64 <= budget_for(&problem).unwrap().to_f64() + 1e-9);
    }
}
