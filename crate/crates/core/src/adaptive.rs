//! Adaptive binary splitting estimator.
//!
//! The frontier `Q` holds disjoint pools known to contain a defective. Each
//! round splits every frontier pool in two, tests the halves in one batch and
//! keeps the positive ones. The run stops with the exact count once every
//! surviving pool is a singleton, or with `|Q|·Δ` once the frontier outgrows
//! `D/Δ²`.

use num_traits::Zero;

use crate::bounds::lower_bound_value;
use crate::error::{Error, Result};
use crate::estimate::{Estimate, EstimateReport, EstimationProblem, Method, ReportFlags};
use crate::numeric::{int, Real};
use crate::oracle::TestOracle;
use crate::pool::Pool;

/// Splits a pool into its first ⌊|X|/2⌋ items and the rest; a singleton is
/// returned unchanged.
pub fn split(pool: &Pool) -> Result<Vec<Pool>> {
    let items: Vec<usize> = pool.items().collect();
    match items.len() {
        0 => Err(Error::EmptyPool),
        1 => Ok(vec![pool.clone()]),
        len => {
            let (a, b) = items.split_at(len / 2);
            let w = pool.width();
            Ok(vec![
                Pool::from_items(w, a.iter().copied())?,
                Pool::from_items(w, b.iter().copied())?,
            ])
        }
    }
}

/// What to do when D < Δ², where D/Δ is already a valid answer for every d ≥ 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ShortCircuit {
    /// Spend one test on the whole universe and answer 0 when it is negative.
    #[default]
    ZeroCheck,
    /// Answer D/Δ without testing.
    NoTest,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AdaptiveConfig {
    pub short_circuit: ShortCircuit,
}

#[derive(Clone, Debug, Default)]
pub struct RoundTrace {
    pub queried: Vec<Pool>,
    /// Frontier after the round (positive pools plus carried singletons).
    pub frontier: Vec<Pool>,
}

#[derive(Clone, Debug, Default)]
pub struct AdaptiveTrace {
    pub rounds: Vec<RoundTrace>,
}

pub fn estimate_adaptive(oracle: &TestOracle, problem: &EstimationProblem) -> Result<EstimateReport> {
    estimate_adaptive_traced(oracle, problem, AdaptiveConfig::default()).map(|(r, _)| r)
}

pub fn estimate_adaptive_traced(
    oracle: &TestOracle,
    problem: &EstimationProblem,
    config: AdaptiveConfig,
) -> Result<(EstimateReport, AdaptiveTrace)> {
    if oracle.n() != problem.n() {
        return Err(Error::Dimension {
            expected: oracle.n(),
            got: problem.n(),
        });
    }
    let start = oracle.queries_made();
    let mut trace = AdaptiveTrace::default();
    let mut flags = ReportFlags::default();
    let bound_reference = lower_bound_value(problem.n(), problem.upper_d(), problem.delta())?;

    let estimate = if problem.below_delta_squared() {
        flags.short_circuit = true;
        match config.short_circuit {
            ShortCircuit::NoTest => Estimate::Rational(problem.trivial_estimate()),
            ShortCircuit::ZeroCheck => {
                let all = oracle.universe().all();
                let positive = oracle.answer_pool(&all)?;
                trace.rounds.push(RoundTrace {
                    queried: vec![all.clone()],
                    frontier: if positive { vec![all] } else { vec![] },
                });
                if positive {
                    Estimate::Rational(problem.trivial_estimate())
                } else {
                    Estimate::count(0)
                }
            }
        }
    } else {
        run_rounds(oracle, problem, &mut trace)?
    };

    Ok((
        EstimateReport {
            estimate,
            tests_used: oracle.queries_made() - start,
            method: Method::Adaptive,
            bound_reference,
            flags,
        },
        trace,
    ))
}

fn run_rounds(
    oracle: &TestOracle,
    problem: &EstimationProblem,
    trace: &mut AdaptiveTrace,
) -> Result<Estimate> {
    let delta = problem.delta();
    let (p, q) = (delta.p() as u128, delta.q() as u128);
    let within_guard = |len: usize| (len as u128) * p * p <= (problem.upper_d() as u128) * q * q;

    // (pool, known to contain a defective)
    let mut frontier: Vec<(Pool, bool)> = vec![(oracle.universe().all(), false)];
    while within_guard(frontier.len()) {
        let mut carried = Vec::new();
        let mut to_test = Vec::new();
        for (pool, known) in &frontier {
            if *known && pool.len() == 1 {
                carried.push(pool.clone());
            } else {
                to_test.extend(split(pool)?);
            }
        }
        let answers = oracle.answer_pools(&to_test)?;
        let mut next: Vec<Pool> = carried;
        next.extend(
            to_test
                .iter()
                .zip(&answers)
                .filter(|(_, &a)| a)
                .map(|(p, _)| p.clone()),
        );
        // keep the frontier in ascending item order for a stable trace
        next.sort_by_key(|p| p.items().next());
        trace.rounds.push(RoundTrace {
            queried: to_test,
            frontier: next.clone(),
        });
        if next.iter().all(|p| p.len() == 1) {
            return Ok(Estimate::count(next.len() as u64));
        }
        frontier = next.into_iter().map(|p| (p, true)).collect();
    }
    let est = int(frontier.len() as u64) * delta.to_rational();
    debug_assert!(!est.is_zero());
    Ok(Estimate::Rational(est))
}

/// Reference budget value for one instance: the slack-adjusted test ceiling.
pub fn budget_for(problem: &EstimationProblem) -> Result<Real> {
    crate::bounds::adaptive_budget_with_slack(problem.n(), problem.upper_d(), problem.delta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Delta;

    fn items(p: &Pool) -> Vec<usize> {
        p.items().collect()
    }

    #[test]
    fn split_examples() {
        let p = Pool::from_items(8, 1..=5).unwrap();
        let parts = split(&p).unwrap();
        assert_eq!(items(&parts[0]), vec![1, 2]);
        assert_eq!(items(&parts[1]), vec![3, 4, 5]);
        let p = Pool::from_items(8, [7]).unwrap();
        assert_eq!(split(&p).unwrap(), vec![p.clone()]);
        let p = Pool::from_items(8, [1, 2]).unwrap();
        let parts = split(&p).unwrap();
        assert_eq!((items(&parts[0]), items(&parts[1])), (vec![1], vec![2]));
        assert!(matches!(split(&Pool::empty(4)), Err(Error::EmptyPool)));
    }

    fn problem(n: usize, d: u64, p: u64, q: u64) -> EstimationProblem {
        EstimationProblem::new(n, d, Delta::new(p, q).unwrap()).unwrap()
    }

    #[test]
    fn single_defective_trace() {
        let o = TestOracle::with_defectives(8, [3]).unwrap();
        let (r, trace) =
            estimate_adaptive_traced(&o, &problem(8, 8, 2, 1), AdaptiveConfig::default()).unwrap();
        assert_eq!(r.estimate, Estimate::count(1));
        assert_eq!(r.tests_used, 6);
        let shapes: Vec<Vec<Vec<usize>>> = trace
            .rounds
            .iter()
            .map(|rt| rt.queried.iter().map(items).collect())
            .collect();
        assert_eq!(
            shapes,
            vec![
                vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8]],
                vec![vec![1, 2], vec![3, 4]],
                vec![vec![3], vec![4]],
            ]
        );
        assert_eq!(o.batches(), 3);
    }

    #[test]
    fn empty_set_gives_zero() {
        let o = TestOracle::with_defectives(8, []).unwrap();
        let r = estimate_adaptive(&o, &problem(8, 8, 2, 1)).unwrap();
        assert_eq!(r.estimate, Estimate::count(0));
        assert_eq!(r.tests_used, 2);
    }

    #[test]
    fn large_frontier_exit() {
        let o = TestOracle::with_defectives(8, 1..=5).unwrap();
        let r = estimate_adaptive(&o, &problem(8, 4, 2, 1)).unwrap();
        assert_eq!(r.estimate, Estimate::count(4));
        assert_eq!(r.tests_used, 2);
        assert!(r.estimate.within_factor(5, Delta::new(2, 1).unwrap()));
    }

    #[test]
    fn short_circuit_modes() {
        let o = TestOracle::with_defectives(8, []).unwrap();
        let pb = problem(8, 3, 2, 1);
        let r = estimate_adaptive(&o, &pb).unwrap();
        assert_eq!((r.estimate.clone(), r.tests_used), (Estimate::count(0), 1));
        assert!(r.flags.short_circuit);
        let cfg = AdaptiveConfig {
            short_circuit: ShortCircuit::NoTest,
        };
        let (r, _) = estimate_adaptive_traced(&o, &pb, cfg).unwrap();
        assert_eq!(r.tests_used, 0);
        assert_eq!(r.estimate, Estimate::Rational(crate::numeric::rational(3, 2)));
    }

    #[test]
    fn single_item_universe_is_tested() {
        let o = TestOracle::with_defectives(1, []).unwrap();
        let r = estimate_adaptive(&o, &problem(1, 1, 3, 2)).unwrap();
        // D=1 < 9/4 short-circuits; the zero-check sees nothing
        assert_eq!(r.estimate, Estimate::count(0));
        let o = TestOracle::with_defectives(4, [2]).unwrap();
        let r = estimate_adaptive(&o, &problem(4, 4, 2, 1)).unwrap();
        assert_eq!(r.estimate, Estimate::count(1));
    }

    #[test]
    fn later_rounds_only_query_inside_positive_pools() {
        let o = TestOracle::with_defectives(16, [2, 9, 10, 15]).unwrap();
        let (_, trace) =
            estimate_adaptive_traced(&o, &problem(16, 16, 3, 2), AdaptiveConfig::default()).unwrap();
        for w in trace.rounds.windows(2) {
            for q in &w[1].queried {
                assert!(w[0].frontier.iter().any(|f| q.is_subset(f)));
            }
        }
    }
}
