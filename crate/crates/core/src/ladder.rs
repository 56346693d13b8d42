//! Turns a family of threshold testers into a non-adaptive estimator.
//!
//! Level i runs a tester at ℓᵢ = D/Δⁱ. A tester must answer 0 when d < ℓ/Δ²
//! and 1 when d > ℓ/Δ; the closed interval between is free. With r the first
//! level that answers 1, the estimate is D/Δ^(r+1). A single all-items pool rides along to recognise d = 0, and a
//! bottom-rung policy covers the case where that pool fires but no level does.
//!
//! Plan files start with
//! `GTPLAN v1 D=<D> delta=<p>/<q> levels=<k> policy=<name> n=<n> method=<method>`
//! followed by the k level designs as GTDESIGN blocks, largest ℓ first. The
//! global pool is implied and not stored.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::bounds::lower_bound_value;
use crate::design::{numbered_lines, parse_header, parse_num, DesignKind, PoolingDesign};
use crate::error::{parse_err, Error, Result};
use crate::estimate::{Estimate, EstimateReport, EstimationProblem, Method, ReportFlags};
use crate::numeric::{format_rational, int, parse_rational, Delta, Rational};
use crate::oracle::TestOracle;
use crate::pool::Pool;

/// A non-adaptive tester for one threshold scale ℓ.
pub trait ThresholdTester: Send + Sync {
    fn ell(&self) -> &Rational;
    fn delta(&self) -> Delta;
    fn design(&self) -> &PoolingDesign;
    /// m(ℓ, Δ).
    fn tests(&self) -> usize {
        self.design().t()
    }
    /// Verdict from the design's answers, in row order.
    fn run(&self, answers: &[bool]) -> Result<bool>;
}

pub trait TesterFactory: Sync {
    fn method(&self) -> Method;
    /// Smallest ℓ this family accepts.
    fn min_ell(&self, delta: Delta) -> Rational {
        int(2) * delta.squared()
    }
    fn build(&self, n: usize, ell: &Rational, delta: Delta, level: u32) -> Result<Box<dyn ThresholdTester>>;
}

pub(crate) fn check_answers(expected: usize, answers: &[bool]) -> Result<()> {
    if answers.len() != expected {
        return Err(Error::Dimension {
            expected,
            got: answers.len(),
        });
    }
    Ok(())
}

/// Levels (i, D/Δⁱ) for i = 0..=⌈log D / log Δ⌉, keeping those with ℓ ≥ `min_ell`.
pub fn level_ells(upper_d: u64, delta: Delta, min_ell: &Rational) -> Vec<(u32, Rational)> {
    let d = int(upper_d);
    let mut top = 0u32;
    while delta.pow(top) < d {
        top += 1;
    }
    (0..=top)
        .map(|i| (i, &d / delta.pow(i)))
        .take_while(|(_, ell)| ell >= min_ell)
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BottomRungPolicy {
    /// d̂ = sqrt(hi), where hi is ℓ_last/Δ (or D without levels).
    #[default]
    GeometricMidpoint,
}

impl BottomRungPolicy {
    pub fn name(self) -> &'static str {
        match self {
            BottomRungPolicy::GeometricMidpoint => "geometric-midpoint",
        }
    }
}

impl fmt::Display for BottomRungPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BottomRungPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric-midpoint" => Ok(BottomRungPolicy::GeometricMidpoint),
            other => Err(Error::InvalidParameter(format!("unknown bottom-rung policy {other:?}"))),
        }
    }
}

pub struct Level {
    pub index: u32,
    pub ell: Rational,
    pub tester: Box<dyn ThresholdTester>,
}

pub struct LadderPlan {
    problem: EstimationProblem,
    method: Method,
    levels: Vec<Level>,
    policy: BottomRungPolicy,
}

pub fn plan(problem: &EstimationProblem, factory: &dyn TesterFactory) -> Result<LadderPlan> {
    let delta = problem.delta();
    let ells = if problem.below_delta_squared() {
        Vec::new()
    } else {
        level_ells(problem.upper_d(), delta, &factory.min_ell(delta))
    };
    let levels = ells
        .into_iter()
        .map(|(index, ell)| {
            let tester = factory.build(problem.n(), &ell, delta, index)?;
            Ok(Level { index, ell, tester })
        })
        .collect::<Result<Vec<_>>>()?;
    LadderPlan::from_levels(*problem, factory.method(), levels, BottomRungPolicy::default())
}

impl LadderPlan {
    pub fn from_levels(
        problem: EstimationProblem,
        method: Method,
        levels: Vec<Level>,
        policy: BottomRungPolicy,
    ) -> Result<Self> {
        for w in levels.windows(2) {
            if w[1].ell >= w[0].ell {
                return Err(Error::InvalidParameter("ladder levels must strictly decrease in ℓ".into()));
            }
        }
        if let Some(l) = levels.iter().find(|l| l.tester.design().n() != problem.n()) {
            return Err(Error::Dimension {
                expected: problem.n(),
                got: l.tester.design().n(),
            });
        }
        Ok(Self {
            problem,
            method,
            levels,
            policy,
        })
    }

    pub fn problem(&self) -> &EstimationProblem {
        &self.problem
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn policy(&self) -> BottomRungPolicy {
        self.policy
    }

    /// Σ m(ℓᵢ, Δ) plus the global pool.
    pub fn planned_tests(&self) -> usize {
        self.levels.iter().map(|l| l.tester.tests()).sum::<usize>() + 1
    }

    /// Every pool of the plan, level rows first, global pool last.
    pub fn pools(&self) -> Vec<Pool> {
        let mut rows: Vec<Pool> = self
            .levels
            .iter()
            .flat_map(|l| l.tester.design().rows().iter().cloned())
            .collect();
        rows.push(Pool::full(self.problem.n()));
        rows
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "GTPLAN v1 D={} delta={} levels={} policy={} n={} method={}",
            self.problem.upper_d(),
            self.problem.delta(),
            self.levels.len(),
            self.policy,
            self.problem.n(),
            self.method
        )?;
        for l in &self.levels {
            l.tester.design().write_to(out)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("plan text is ASCII")
    }

    /// Reads a plan, rebuilding each tester from its design's metadata.
    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let lines = numbered_lines(input)?;
        let mut it = lines.into_iter();
        let (lineno, header) = it.next().ok_or_else(|| parse_err(0, "empty plan file"))?;
        let fields = parse_header(lineno, &header, "GTPLAN")?;
        let get = |key: &str| {
            fields
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| parse_err(lineno, format!("missing {key}=")))
        };
        let upper_d: u64 = parse_num(lineno, "D", get("D")?)?;
        let delta: Delta = get("delta")?
            .parse()
            .map_err(|e: Error| parse_err(lineno, e.to_string()))?;
        let count: usize = parse_num(lineno, "levels", get("levels")?)?;
        let policy: BottomRungPolicy = get("policy")?
            .parse()
            .map_err(|e: Error| parse_err(lineno, e.to_string()))?;
        let n: usize = parse_num(lineno, "n", get("n")?)?;
        let method: Method = get("method")?
            .parse()
            .map_err(|e: Error| parse_err(lineno, e.to_string()))?;
        let problem = EstimationProblem::new(n, upper_d, delta)?;
        let mut levels = Vec::with_capacity(count);
        for _ in 0..count {
            let design = PoolingDesign::read_block(&mut it)?;
            let index: u32 = design
                .require_meta("level")?
                .parse()
                .map_err(|_| Error::InvalidParameter("bad level index in design meta".into()))?;
            let tester = tester_from_design(design)?;
            levels.push(Level {
                index,
                ell: tester.ell().clone(),
                tester,
            });
        }
        if let Some((ln, _)) = it.next() {
            return Err(parse_err(ln, "trailing content after plan"));
        }
        Self::from_levels(problem, method, levels, policy)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

/// Rebuilds a tester from a design carrying its parameters in `meta`.
pub fn tester_from_design(design: PoolingDesign) -> Result<Box<dyn ThresholdTester>> {
    Ok(match design.kind() {
        DesignKind::Bernoulli => Box::new(crate::bernoulli::BernoulliTester::from_design(design)?),
        DesignKind::Expander => Box::new(crate::expander::ExpanderTester::from_design(design)?),
        DesignKind::Condenser => Box::new(crate::condenser::CondenserTester::from_design(design)?),
        DesignKind::Identity => Box::new(IdealTester::from_design(design)?),
    })
}

/// Outcome of folding the answers of a plan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderOutcome {
    pub estimate: Estimate,
    /// Index of the first level that fired.
    pub fired: Option<u32>,
    pub flags: ReportFlags,
}

/// Computes the estimate from per-level verdicts and the global-pool answer.
pub fn fold_verdicts(plan: &LadderPlan, verdicts: &[bool], global: bool) -> LadderOutcome {
    let problem = plan.problem();
    let delta = problem.delta();
    let d = int(problem.upper_d());
    let mut flags = ReportFlags {
        short_circuit: problem.below_delta_squared(),
        ..ReportFlags::default()
    };
    if let Some(pos) = verdicts.iter().position(|&v| v) {
        let r = plan.levels[pos].index;
        return LadderOutcome {
            estimate: Estimate::Rational(&d / delta.pow(r + 1)),
            fired: Some(r),
            flags,
        };
    }
    if !global {
        return LadderOutcome {
            estimate: Estimate::count(0),
            fired: None,
            flags,
        };
    }
    if flags.short_circuit {
        return LadderOutcome {
            estimate: Estimate::Rational(problem.trivial_estimate()),
            fired: None,
            flags,
        };
    }
    // Every level stayed silent, so d ≤ ℓ_last/Δ; the global pool gives d ≥ 1.
    let (hi, d_max) = match plan.levels.last() {
        Some(last) => {
            let hi = &last.ell / delta.to_rational();
            let d_max = hi.floor();
            (hi, d_max)
        }
        None => (d.clone(), d.clone()),
    };
    let delta_sq = delta.squared();
    let certified = hi <= delta_sq && &d_max * &d_max <= &hi * &delta_sq;
    flags.bottom_rung = true;
    flags.bottom_gap = !certified;
    LadderOutcome {
        estimate: match plan.policy {
            BottomRungPolicy::GeometricMidpoint => Estimate::SqrtOf(hi),
        },
        fired: None,
        flags,
    }
}

/// Answers the whole plan in one batch, then folds the verdicts.
pub fn estimate_ladder(oracle: &TestOracle, plan: &LadderPlan) -> Result<EstimateReport> {
    let problem = plan.problem();
    if oracle.n() != problem.n() {
        return Err(Error::Dimension {
            expected: problem.n(),
            got: oracle.n(),
        });
    }
    let start = oracle.queries_made();
    let answers = oracle.answer_pools(&plan.pools())?;
    let mut verdicts = Vec::with_capacity(plan.levels.len());
    let mut offset = 0;
    for l in &plan.levels {
        let t = l.tester.tests();
        verdicts.push(l.tester.run(&answers[offset..offset + t])?);
        offset += t;
    }
    let global = answers[offset];
    let outcome = fold_verdicts(plan, &verdicts, global);
    Ok(EstimateReport {
        estimate: outcome.estimate,
        tests_used: oracle.queries_made() - start,
        method: plan.method,
        bound_reference: lower_bound_value(problem.n(), problem.upper_d(), problem.delta())?,
        flags: outcome.flags,
    })
}

/// Exact-count tester over individual testing: fires iff d ≥ ℓ/Δ.
pub struct IdealTester {
    ell: Rational,
    delta: Delta,
    design: PoolingDesign,
}

impl IdealTester {
    pub fn new(n: usize, ell: &Rational, delta: Delta) -> Self {
        let design = PoolingDesign::identity(n)
            .with_meta("ell", format_rational(ell))
            .with_meta("delta", delta.to_string());
        Self {
            ell: ell.clone(),
            delta,
            design,
        }
    }

    pub fn from_design(design: PoolingDesign) -> Result<Self> {
        let ell = parse_rational(design.require_meta("ell")?)?;
        let delta: Delta = design.require_meta("delta")?.parse()?;
        if design.rows() != PoolingDesign::identity(design.n()).rows() {
            return Err(Error::InvalidParameter("identity design rows are not the identity".into()));
        }
        Ok(Self { ell, delta, design })
    }
}

impl ThresholdTester for IdealTester {
    fn ell(&self) -> &Rational {
        &self.ell
    }

    fn delta(&self) -> Delta {
        self.delta
    }

    fn design(&self) -> &PoolingDesign {
        &self.design
    }

    fn run(&self, answers: &[bool]) -> Result<bool> {
        check_answers(self.design.t(), answers)?;
        let count = answers.iter().filter(|&&a| a).count() as u64;
        Ok(int(count) * self.delta.to_rational() >= self.ell)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IdealTesterFactory;

impl TesterFactory for IdealTesterFactory {
    fn method(&self) -> Method {
        Method::ReferenceLadder
    }

    fn build(&self, n: usize, ell: &Rational, delta: Delta, level: u32) -> Result<Box<dyn ThresholdTester>> {
        let mut t = IdealTester::new(n, ell, delta);
        t.design = t.design.with_meta("level", level.to_string());
        Ok(Box::new(t))
    }
}
