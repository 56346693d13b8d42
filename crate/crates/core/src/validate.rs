//! Boundary-size checks shared by every design validator: "every defective
//! set of size s gets verdict v", decided exhaustively when the number of
//! sets fits the enumeration budget and by seeded sampling otherwise.

use crate::subsets::{binomial, par_fold, sample};

pub const DEFAULT_ENUM_BUDGET: u128 = 10_000_000;
pub const BUDGET_ENV: &str = "GT_ENUM_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationMode {
    /// Exhaustive within budget, sampled beyond it.
    Auto,
    Sampled,
    Off,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumConfig {
    pub budget: u128,
    pub mode: ValidationMode,
    pub samples: usize,
    pub sample_seed: u64,
}

impl Default for EnumConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_ENUM_BUDGET,
            mode: ValidationMode::Auto,
            samples: 20_000,
            sample_seed: 0,
        }
    }
}

impl EnumConfig {
    /// Default configuration with the budget taken from `GT_ENUM_BUDGET` when set.
    pub fn from_env() -> Self {
        let budget = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_ENUM_BUDGET);
        Self {
            budget,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled,
    /// Nothing to check (size out of range).
    Vacuous,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryCheck {
    pub size: usize,
    pub expect: bool,
    pub mode: CheckMode,
    pub checked: u128,
    /// Total sets of this size.
    pub population: u128,
    pub failures: u128,
    /// Lexicographically first failing set (0-based) among those checked.
    pub witness: Option<Vec<usize>>,
}

impl BoundaryCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn exhaustive(&self) -> bool {
        matches!(self.mode, CheckMode::Exhaustive | CheckMode::Vacuous)
    }
}

/// Checks that `verdict(members)` equals `expect` for every `size`-subset of
/// `0..n` (or a sample of them).
pub fn check_size<F>(n: usize, size: usize, expect: bool, cfg: &EnumConfig, verdict: F) -> BoundaryCheck
where
    F: Fn(&[usize]) -> bool + Sync + Send,
{
    let population = binomial(n, size);
    let mut out = BoundaryCheck {
        size,
        expect,
        mode: CheckMode::Exhaustive,
        checked: 0,
        population,
        failures: 0,
        witness: None,
    };
    if size > n {
        out.mode = CheckMode::Vacuous;
        return out;
    }
    if cfg.mode == ValidationMode::Off {
        out.mode = CheckMode::Skipped;
        return out;
    }
    if cfg.mode == ValidationMode::Auto && population <= cfg.budget {
        let (failures, witness) = par_fold(
            n,
            size,
            || (0u128, None::<(u128, Vec<usize>)>),
            |(f, w), rank, comb| {
                if verdict(comb) == expect {
                    (f, w)
                } else {
                    let w = match w {
                        Some(prev) => Some(prev),
                        None => Some((rank, comb.to_vec())),
                    };
                    (f + 1, w)
                }
            },
            |(fa, wa), (fb, wb)| (fa + fb, earliest(wa, wb)),
        );
        out.checked = population;
        out.failures = failures;
        out.witness = witness.map(|(_, w)| w);
        return out;
    }
    out.mode = CheckMode::Sampled;
    let draws = sample(n, size, cfg.samples, cfg.sample_seed);
    let mut failing: Vec<Vec<usize>> = Vec::new();
    for d in &draws {
        if verdict(d) != expect {
            failing.push(d.clone());
        }
    }
    out.checked = draws.len() as u128;
    out.failures = failing.len() as u128;
    out.witness = failing.into_iter().min();
    out
}

fn earliest(
    a: Option<(u128, Vec<usize>)>,
    b: Option<(u128, Vec<usize>)>,
) -> Option<(u128, Vec<usize>)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
        (x, None) => x,
        (None, y) => y,
    }
}
