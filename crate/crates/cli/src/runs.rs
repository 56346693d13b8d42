use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::process::ExitCode;

use anyhow::{Context, Result};
use gtcount::adaptive::estimate_adaptive;
use gtcount::bernoulli::{BernoulliFactory, BuildConfig};
use gtcount::condenser::CondenserFactory;
use gtcount::expander::{ExpanderFactory, RandomRegularSource};
use gtcount::ladder::{estimate_ladder, plan, IdealTesterFactory, LadderPlan, TesterFactory};
use gtcount::rng::{derive_seed, SeededRng};
use gtcount::validate::EnumConfig;
use gtcount::{Delta, EstimateReport, EstimationProblem, Method, TestOracle};
use rayon::prelude::*;

use crate::{Counts, EstimateArgs, SweepArgs, Usage};

pub const CSV_HEADER: &str = "n,d,D,delta,method,tests,estimate,ok,bound_ref,seed";

/// One estimator run, as written to CSV.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub n: usize,
    pub d: u64,
    pub upper_d: u64,
    pub delta: Delta,
    pub method: Method,
    pub tests: u64,
    pub estimate: f64,
    pub ok: bool,
    pub bound_ref: f64,
    pub seed: u64,
}

impl RunRecord {
    fn new(problem: &EstimationProblem, d: u64, report: &EstimateReport, seed: u64) -> Self {
        Self {
            n: problem.n(),
            d,
            upper_d: problem.upper_d(),
            delta: problem.delta(),
            method: report.method,
            tests: report.tests_used,
            estimate: report.estimate.to_f64(),
            ok: report.estimate.within_factor(d, problem.delta()),
            bound_ref: report.bound_reference.to_f64(),
            seed,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{},{:.6},{}",
            self.n,
            self.d,
            self.upper_d,
            self.delta,
            self.method,
            self.tests,
            self.estimate,
            u8::from(self.ok),
            self.bound_ref,
            self.seed
        )
    }
}

/// Tester factory for a non-adaptive method, with the enumeration budget from the environment.
pub fn factory(method: Method, seed: u64) -> Result<Box<dyn TesterFactory>> {
    let enumeration = EnumConfig::from_env();
    Ok(match method {
        Method::Adaptive => return Err(Usage("the adaptive method does not use a plan".into()).into()),
        Method::BernoulliLadder => Box::new(BernoulliFactory {
            build: BuildConfig {
                seed,
                enumeration,
                ..BuildConfig::default()
            },
        }),
        Method::ExpanderLadder => Box::new(ExpanderFactory {
            source: Box::new(RandomRegularSource {
                seed,
                ..RandomRegularSource::default()
            }),
            enumeration,
        }),
        Method::CondenserLadder => Box::new(CondenserFactory {
            seed,
            enumeration,
            ..CondenserFactory::default()
        }),
        Method::ReferenceLadder => Box::new(IdealTesterFactory),
    })
}

fn build_plan_for(problem: &EstimationProblem, method: Method, seed: u64) -> Result<Option<LadderPlan>> {
    if method == Method::Adaptive {
        return Ok(None);
    }
    let f = factory(method, seed)?;
    let p = plan(problem, f.as_ref())
        .with_context(|| format!("building the {method} plan for n={} D={} Δ={}", problem.n(), problem.upper_d(), problem.delta()))?;
    Ok(Some(p))
}

fn run_one(problem: &EstimationProblem, plan: Option<&LadderPlan>, hidden: &[usize]) -> Result<EstimateReport> {
    let oracle = TestOracle::with_defectives(problem.n(), hidden.iter().copied())?;
    Ok(match plan {
        None => estimate_adaptive(&oracle, problem)?,
        Some(p) => estimate_ladder(&oracle, p)?,
    })
}

/// `count` distinct 1-based items out of `n`.
fn random_set(n: usize, count: usize, seed: u64) -> Vec<usize> {
    SeededRng::new(seed)
        .sample_distinct(n, count)
        .into_iter()
        .map(|i| i + 1)
        .collect()
}

pub fn estimate(args: &EstimateArgs) -> Result<ExitCode> {
    let problem = EstimationProblem::new(args.n, args.upper_d, args.delta)?;
    let plan = match (&args.design, args.method) {
        (Some(_), Method::Adaptive) => {
            return Err(Usage("--design applies to non-adaptive methods only".into()).into());
        }
        (Some(path), method) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let p = LadderPlan::read_from(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
            if *p.problem() != problem || p.method() != method {
                return Err(Usage(format!(
                    "{} is a {} plan for n={} D={} Δ={}, which does not match the flags",
                    path.display(),
                    p.method(),
                    p.problem().n(),
                    p.problem().upper_d(),
                    p.problem().delta()
                ))
                .into());
            }
            Some(p)
        }
        (None, method) => build_plan_for(&problem, method, args.seed)?,
    };

    // (hidden set, seed column)
    let sets: Vec<(Vec<usize>, u64)> = match (&args.defectives, args.defectives_count) {
        (Some(items), _) => vec![(items.0.clone(), args.seed)],
        (None, Some(k)) => {
            if k > args.n {
                return Err(Usage(format!("--defectives-count {k} exceeds n={}", args.n)).into());
            }
            (0..args.runs)
                .map(|r| {
                    let s = if r == 0 { args.set_seed } else { derive_seed(args.set_seed, r as u64) };
                    (random_set(args.n, k, s), s)
                })
                .collect()
        }
        (None, None) => unreachable!("clap requires one of the two"),
    };

    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{CSV_HEADER}")?;
    let mut all_ok = true;
    for (hidden, seed) in &sets {
        let report = run_one(&problem, plan.as_ref(), hidden)?;
        let record = RunRecord::new(&problem, hidden.len() as u64, &report, *seed);
        all_ok &= record.ok;
        writeln!(out, "{}", record.csv_row())?;
    }
    out.flush()?;
    if all_ok || args.no_check {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("some estimate fell outside [d/Δ, dΔ]");
        Ok(ExitCode::FAILURE)
    }
}

struct Job {
    config: usize,
    d: u64,
    set_seed: u64,
}

pub fn sweep(args: &SweepArgs) -> Result<ExitCode> {
    // Fail on an unwritable path before doing any work.
    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };

    let mut configs = Vec::new();
    for &n in &args.n {
        for &upper_d in &args.upper_d {
            if upper_d == 0 || upper_d > n as u64 {
                continue;
            }
            for &delta in &args.delta {
                for &method in &args.method {
                    configs.push((EstimationProblem::new(n, upper_d, delta)?, method));
                }
            }
        }
    }
    let plans = configs
        .par_iter()
        .map(|(problem, method)| build_plan_for(problem, *method, args.seed))
        .collect::<Result<Vec<_>>>()?;

    let mut jobs = Vec::new();
    for (ci, (problem, _)) in configs.iter().enumerate() {
        let ds: Vec<u64> = match &args.d {
            Counts::All => (0..=problem.upper_d()).collect(),
            Counts::List(v) => v.iter().copied().filter(|&d| d <= problem.upper_d()).collect(),
        };
        for d in ds {
            for rep in 0..args.reps {
                // Same hidden set for every method, D and Δ at this (n, d, rep).
                let set_seed = derive_seed(derive_seed(args.seed, problem.n() as u64), d * args.reps as u64 + rep as u64);
                jobs.push(Job { config: ci, d, set_seed });
            }
        }
    }

    let records = jobs
        .par_iter()
        .map(|job| {
            let (problem, _) = &configs[job.config];
            let hidden = random_set(problem.n(), job.d as usize, job.set_seed);
            let report = run_one(problem, plans[job.config].as_ref(), &hidden)?;
            Ok(RunRecord::new(problem, job.d, &report, job.set_seed))
        })
        .collect::<Result<Vec<_>>>()?;

    writeln!(sink, "{CSV_HEADER}")?;
    for r in &records {
        writeln!(sink, "{}", r.csv_row())?;
    }
    sink.flush()?;
    let misses = records.iter().filter(|r| !r.ok).count();
    eprintln!("{} runs, {} outside the factor", records.len(), misses);
    Ok(ExitCode::SUCCESS)
}
