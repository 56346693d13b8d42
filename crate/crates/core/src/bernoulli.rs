//! Random Bernoulli threshold tester, built by sampling a design and
//! validating it at the two boundary sizes.
//!
//! Each cell is included independently with p = Δ²/(cℓ), where c solves
//! (1 − Δ²/(cℓ))^(ℓ/Δ²) = e⁻¹. The tester outputs 0 iff at least ηt of its t
//! tests answer 0, with η = e⁻¹(1/2 + 1/(2Δ)).

use std::f64::consts::E;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use crate::design::{DesignKind, PoolingDesign};
use crate::error::{Error, Result};
use crate::ladder::{check_answers, TesterFactory, ThresholdTester};
use crate::estimate::Method;
use crate::numeric::{format_rational, int, inv_e_fixed, parse_rational, to_f64, Delta, Rational};
use crate::pool::Pool;
use crate::rng::{derive_seed, probability_threshold, SeededRng, ALGORITHM};
use crate::validate::{check_size, BoundaryCheck, EnumConfig};

/// 54e².
pub fn c_prime() -> f64 {
    54.0 * E * E
}

/// 4e.
pub fn c_double_prime() -> f64 {
    4.0 * E
}

const C_TOLERANCE: f64 = 1e-12;

/// Solves (1 − x/c)^(1/x) = e⁻¹ for c ∈ [1/2, 2], x = Δ²/ℓ, by bisection.
pub fn solve_c(ell: &Rational, delta: Delta) -> Result<f64> {
    if *ell < int(2) * delta.squared() {
        return Err(Error::Precondition(format!(
            "ℓ = {} is below 2Δ² for Δ = {delta}",
            format_rational(ell)
        )));
    }
    let x = to_f64(&(delta.squared() / ell));
    solve_c_scaled(x)
}

/// Root in c of (1 − x/c)^(1/x) = e⁻¹.
pub fn solve_c_scaled(x: f64) -> Result<f64> {
    let value = |c: f64| ((-x / c).ln_1p() / x).exp();
    let target = (-1f64).exp();
    let (mut lo, mut hi) = (0.5f64, 2.0f64);
    let (vlo, vhi) = (value(lo), value(hi));
    if !(vlo.is_finite() && vlo <= target && vhi >= target) {
        return Err(Error::Precondition(format!(
            "no root in [1/2, 2] for ℓ/Δ² = {}",
            1.0 / x
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if value(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = if (value(lo) - target).abs() <= (value(hi) - target).abs() {
        lo
    } else {
        hi
    };
    let residual = (value(c) - target).abs();
    if residual > C_TOLERANCE {
        return Err(Error::Precondition(format!(
            "bisection residual {residual:e} exceeds {C_TOLERANCE:e}"
        )));
    }
    Ok(c)
}

/// η as a 128-bit fixed-point fraction: η ≈ `numer` / 2^128, truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Eta {
    pub numer: u128,
}

impl Eta {
    pub fn for_delta(delta: Delta) -> Self {
        // e⁻¹(1/2 + q/(2p)) = e⁻¹(p + q)/(2p)
        let scaled = inv_e_fixed(128) * BigUint::from(delta.p() + delta.q()) / BigUint::from(2 * delta.p());
        Self {
            numer: scaled.to_u128().expect("η < 1"),
        }
    }

    pub fn to_f64(self) -> f64 {
        self.numer as f64 / 2f64.powi(128)
    }

    pub fn to_rational(self) -> Rational {
        Rational::new(BigInt::from(self.numer), BigInt::from(1u8) << 128)
    }

    /// ⌈ηt⌉: the smallest zero count that yields verdict 0.
    pub fn min_zero_count(self, t: usize) -> usize {
        let prod = BigUint::from(self.numer) * BigUint::from(t);
        let q: BigUint = (prod + ((BigUint::from(1u8) << 128) - 1u8)) >> 128;
        q.to_usize().expect("bounded by t")
    }
}

/// The explicit row count before ceiling: c′ℓ/(Δ−1)²·ln(c″Δ²n/ℓ).
pub fn t_formula_value(n: usize, ell: &Rational, delta: Delta) -> f64 {
    let l = to_f64(ell);
    let dm1 = delta.to_f64() - 1.0;
    let ratio = to_f64(&(delta.squared() * int(n as u64) / ell));
    c_prime() * l / (dm1 * dm1) * (c_double_prime() * ratio).ln()
}

pub fn t_formula(n: usize, ell: &Rational, delta: Delta) -> usize {
    t_formula_value(n, ell, delta).ceil() as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct BernoulliSpec {
    pub n: usize,
    pub ell: Rational,
    pub delta: Delta,
    pub c: f64,
    /// Inclusion probability Δ²/(cℓ).
    pub p: f64,
    /// Threshold for [`SeededRng::bernoulli`] realising `p`.
    pub p_threshold: u128,
    pub t: usize,
    pub eta: Eta,
}

pub fn make_spec(n: usize, ell: &Rational, delta: Delta) -> Result<BernoulliSpec> {
    if *ell > int(n as u64) * delta.squared() {
        return Err(Error::Precondition(format!(
            "ℓ = {} exceeds nΔ² = {}",
            format_rational(ell),
            format_rational(&(int(n as u64) * delta.squared()))
        )));
    }
    let c = solve_c(ell, delta)?;
    let p = (delta.to_f64() * delta.to_f64() / (c * to_f64(ell))).min(1.0);
    Ok(BernoulliSpec {
        n,
        ell: ell.clone(),
        delta,
        c,
        p,
        p_threshold: probability_threshold(p),
        t: t_formula(n, ell, delta),
        eta: Eta::for_delta(delta),
    })
}

impl BernoulliSpec {
    pub fn with_t(mut self, t: usize) -> Self {
        self.t = t;
        self
    }

    /// d₁ = ⌊ℓ/Δ²⌋: sets this small must get verdict 0.
    pub fn low_size(&self) -> usize {
        floor_usize(&(&self.ell / self.delta.squared()))
    }

    /// d₂ = ⌊ℓ/Δ⌋ + 1: sets this large must get verdict 1.
    pub fn high_size(&self) -> usize {
        floor_usize(&(&self.ell / self.delta.to_rational())) + 1
    }
}

fn floor_usize(r: &Rational) -> usize {
    r.floor().to_integer().to_usize().expect("size fits usize")
}

/// Samples the t×n design row by row, item by item within a row.
pub fn sample_design(spec: &BernoulliSpec, seed: u64) -> PoolingDesign {
    let mut rng = SeededRng::new(seed);
    let rows = (0..spec.t)
        .map(|_| {
            let mut row = Pool::empty(spec.n);
            for i in 0..spec.n {
                if rng.bernoulli(spec.p_threshold) {
                    row.set_bit(i);
                }
            }
            row
        })
        .collect();
    let formula_t = t_formula(spec.n, &spec.ell, spec.delta);
    PoolingDesign::new(DesignKind::Bernoulli, spec.n, seed, rows, Vec::new())
        .expect("rows have width n")
        .with_meta("ell", format_rational(&spec.ell))
        .with_meta("delta", spec.delta.to_string())
        .with_meta("c", format!("{:e}", spec.c))
        .with_meta("p_threshold", spec.p_threshold.to_string())
        .with_meta("eta_numer", spec.eta.numer.to_string())
        .with_meta("eta_denom", "2^128")
        .with_meta("t_formula", formula_t.to_string())
        .with_meta("rng", ALGORITHM)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdVerdict {
    pub output: bool,
    pub zero_count: usize,
    /// ηt with η at its stored precision.
    pub threshold: Rational,
}

pub fn decide(eta: Eta, t: usize, answers: &[bool]) -> Result<ThresholdVerdict> {
    check_answers(t, answers)?;
    let zero_count = answers.iter().filter(|&&a| !a).count();
    let threshold = eta.to_rational() * int(t as u64);
    Ok(ThresholdVerdict {
        output: int(zero_count as u64) < threshold,
        zero_count,
        threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub low: BoundaryCheck,
    pub high: BoundaryCheck,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.low.passed() && self.high.passed()
    }

    pub fn exhaustive(&self) -> bool {
        self.low.exhaustive() && self.high.exhaustive()
    }

    pub fn failures(&self) -> u128 {
        self.low.failures + self.high.failures
    }
}

/// Checks verdict 0 on every set of size d₁ and verdict 1 on every set of
/// size d₂. Zero counts only shrink as sets grow, so this covers all sizes
/// at most d₁ and at least d₂.
pub fn validate_design(tester: &BernoulliTester, cfg: &EnumConfig) -> ValidationReport {
    let cols = tester.design.columns();
    let min_zero = tester.eta.min_zero_count(tester.design.t());
    let n = tester.design.n();
    let verdict = |members: &[usize]| {
        let mut scratch = Vec::new();
        cols.zero_count(members, &mut scratch) < min_zero
    };
    ValidationReport {
        low: check_size(n, tester.low_size(), false, cfg, verdict),
        high: check_size(n, tester.high_size(), true, cfg, verdict),
    }
}

#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub seed: u64,
    /// Extra samples per row count after the first.
    pub max_resamples: usize,
    pub max_t_doublings: u32,
    /// Row count to start from instead of the formula value.
    pub initial_t: Option<usize>,
    pub enumeration: EnumConfig,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_resamples: 20,
            max_t_doublings: 3,
            initial_t: None,
            enumeration: EnumConfig::default(),
        }
    }
}

#[derive(Debug)]
pub struct BuiltTester {
    pub tester: BernoulliTester,
    pub report: ValidationReport,
    pub formula_t: usize,
    /// Samples drawn at the final row count, minus one.
    pub resamples: usize,
    pub doublings: u32,
}

/// Samples designs until one validates, doubling t after `max_resamples`
/// failed resamples. Sample k uses seed `derive_seed(seed, k)` (k = 0 uses
/// `seed` itself).
pub fn build_valid_tester(n: usize, ell: &Rational, delta: Delta, cfg: &BuildConfig) -> Result<BuiltTester> {
    let spec = make_spec(n, ell, delta)?;
    let formula_t = spec.t;
    let base_t = cfg.initial_t.unwrap_or(formula_t).max(1);
    let mut sample_index = 0u64;
    let mut best: Option<(u128, usize, u64)> = None;
    for doubling in 0..=cfg.max_t_doublings {
        let t = base_t << doubling;
        let spec_t = spec.clone().with_t(t);
        for resample in 0..=cfg.max_resamples {
            let seed = if sample_index == 0 {
                cfg.seed
            } else {
                derive_seed(cfg.seed, sample_index)
            };
            sample_index += 1;
            let design = sample_design(&spec_t, seed).with_meta("attempt", resample.to_string());
            let tester = BernoulliTester::from_design(design)?;
            let report = validate_design(&tester, &cfg.enumeration);
            if report.passed() {
                return Ok(BuiltTester {
                    tester,
                    report,
                    formula_t,
                    resamples: resample,
                    doublings: doubling,
                });
            }
            let f = report.failures();
            if best.is_none_or(|(bf, _, _)| f < bf) {
                best = Some((f, t, seed));
            }
        }
    }
    let (f, t, seed) = best.expect("at least one sample is drawn");
    Err(Error::Construction {
        attempts: sample_index as usize,
        detail: format!(
            "no Bernoulli design validated for n={n}, ℓ={}, Δ={delta}; best had {f} failing boundary sets (t={t}, seed={seed})",
            format_rational(ell)
        ),
    })
}

#[derive(Debug)]
pub struct BernoulliTester {
    ell: Rational,
    delta: Delta,
    eta: Eta,
    min_zero: usize,
    design: PoolingDesign,
}

impl BernoulliTester {
    /// Rebuilds the tester from a design's `ell`, `delta` and `eta_numer` meta.
    pub fn from_design(design: PoolingDesign) -> Result<Self> {
        if design.kind() != DesignKind::Bernoulli {
            return Err(Error::InvalidParameter(format!("expected a bernoulli design, got {}", design.kind())));
        }
        let ell = parse_rational(design.require_meta("ell")?)?;
        let delta: Delta = design.require_meta("delta")?.parse()?;
        let numer: u128 = design
            .require_meta("eta_numer")?
            .parse()
            .map_err(|_| Error::InvalidParameter("bad eta_numer".into()))?;
        let eta = Eta { numer };
        Ok(Self {
            min_zero: eta.min_zero_count(design.t()),
            ell,
            delta,
            eta,
            design,
        })
    }

    pub fn eta(&self) -> Eta {
        self.eta
    }

    pub fn low_size(&self) -> usize {
        floor_usize(&(&self.ell / self.delta.squared()))
    }

    pub fn high_size(&self) -> usize {
        floor_usize(&(&self.ell / self.delta.to_rational())) + 1
    }

    pub fn verdict(&self, answers: &[bool]) -> Result<ThresholdVerdict> {
        decide(self.eta, self.design.t(), answers)
    }

    /// ⌈ηt⌉.
    pub fn min_zero_count(&self) -> usize {
        self.min_zero
    }

    pub fn into_design(self) -> PoolingDesign {
        self.design
    }
}

impl ThresholdTester for BernoulliTester {
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
        let zeros = answers.iter().filter(|&&a| !a).count();
        Ok(zeros < self.min_zero)
    }
}

/// Builds validated Bernoulli testers per ladder level, seeding level i with
/// `derive_seed(seed, 1000 + i)`.
#[derive(Clone, Debug, Default)]
pub struct BernoulliFactory {
    pub build: BuildConfig,
}

impl TesterFactory for BernoulliFactory {
    fn method(&self) -> Method {
        Method::BernoulliLadder
    }

    fn build(&self, n: usize, ell: &Rational, delta: Delta, level: u32) -> Result<Box<dyn ThresholdTester>> {
        let mut cfg = self.build.clone();
        cfg.seed = derive_seed(self.build.seed, 1000 + level as u64);
        let built = build_valid_tester(n, ell, delta, &cfg)?;
        let design = built.tester.into_design().with_meta("level", level.to_string());
        Ok(Box::new(BernoulliTester::from_design(design)?))
    }
}
