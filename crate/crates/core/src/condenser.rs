//! Threshold testers induced by condenser function tables.
//!
//! A table F: {0,1}^n̂ × {0,1}^t̂ → {0,1}^m̂ induces one test per pair (r, j),
//! pooling the items s with F(s, r) = j. From the answers, S_r collects the
//! values j whose test (r, j) is positive. A column s is fully covered when
//! F(s, r) ∈ S_r for every r; the tester answers 1 iff more than 2^k columns
//! are fully covered. Defective columns are always covered, so d ≥ 2^k + 1
//! always gives 1. The operational check asks in addition that every set of
//! size ⌈(1−ε)2^k′⌉ − 1 gives 0.
//!
//! When n < 2^n̂ the remaining columns are phantom items: they never enter a
//! pool and the decoder counts only the n real columns.
//!
//! Table files:
//!
//! ```text
//! GTCOND v1 nhat=<n̂> that=<t̂> mhat=<m̂> k=<k> kprime=<k′> eps=<p>/<q>
//! <s> <y> <F(s,y)>      (lowercase hex, s-major, 2^(n̂+t̂) lines)
//! ```

use std::io::{BufRead, Write};

use num_traits::{One, ToPrimitive};

use crate::design::{numbered_lines, parse_header, parse_num, DesignKind, PoolingDesign};
use crate::error::{parse_err, Error, Result};
use crate::estimate::Method;
use crate::ladder::{check_answers, TesterFactory, ThresholdTester};
use crate::numeric::{ceil_log2, format_rational, int, parse_rational, rational, Delta, Rational};
use crate::pool::Pool;
use crate::rng::{derive_seed, SeededRng};
use crate::validate::{check_size, BoundaryCheck, EnumConfig, ValidationMode};

/// Largest supported n̂ + t̂ and t̂ + m̂.
const MAX_TABLE_BITS: u32 = 22;
const MAX_ROW_BITS: u32 = 20;

pub trait CondenserFunction {
    fn n_hat(&self) -> u32;
    fn t_hat(&self) -> u32;
    fn m_hat(&self) -> u32;
    fn k(&self) -> u32;
    fn k_prime(&self) -> u32;
    fn epsilon(&self) -> &Rational;
    fn eval(&self, x: u32, y: u32) -> u32;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondenserParams {
    pub n_hat: u32,
    pub t_hat: u32,
    pub m_hat: u32,
    pub k: u32,
    pub k_prime: u32,
    pub epsilon: Rational,
}

impl CondenserParams {
    fn check(&self) -> Result<()> {
        if self.n_hat + self.t_hat > MAX_TABLE_BITS || self.t_hat + self.m_hat > MAX_ROW_BITS {
            return Err(Error::Budget(format!(
                "condenser table n̂={} t̂={} m̂={} is too large",
                self.n_hat, self.t_hat, self.m_hat
            )));
        }
        if self.epsilon <= int(0) || self.epsilon >= Rational::one() {
            return Err(Error::InvalidParameter("ε must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// ⌈(1−ε)2^k′⌉ − 1: the largest set size that must give 0.
    pub fn low_size(&self) -> usize {
        let v = (Rational::one() - &self.epsilon) * int(1u64 << self.k_prime);
        v.ceil().to_integer().to_usize().expect("fits usize") - 1
    }

    /// 2^k + 1: the smallest set size that must give 1.
    pub fn high_size(&self) -> usize {
        (1usize << self.k) + 1
    }
}

/// A condenser given by its full value table, indexed `s · 2^t̂ + y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondenserTable {
    params: CondenserParams,
    values: Vec<u32>,
}

impl CondenserTable {
    pub fn new(params: CondenserParams, values: Vec<u32>) -> Result<Self> {
        params.check()?;
        let expect = 1usize << (params.n_hat + params.t_hat);
        if values.len() != expect {
            return Err(Error::Dimension {
                expected: expect,
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|&&v| v >> params.m_hat != 0) {
            return Err(Error::InvalidParameter(format!("table value {bad:x} exceeds m̂ = {} bits", params.m_hat)));
        }
        Ok(Self { params, values })
    }

    /// F(s, y) = s; needs m̂ ≥ n̂.
    pub fn injective(params: CondenserParams) -> Result<Self> {
        if params.m_hat < params.n_hat {
            return Err(Error::InvalidParameter("injective table needs m̂ >= n̂".into()));
        }
        params.check()?;
        let t = 1u32 << params.t_hat;
        let values = (0..1u32 << params.n_hat).flat_map(|s| (0..t).map(move |_| s)).collect();
        Self::new(params, values)
    }

    pub fn constant(params: CondenserParams, value: u32) -> Result<Self> {
        params.check()?;
        Self::new(params.clone(), vec![value; 1 << (params.n_hat + params.t_hat)])
    }

    /// Uniform table from the seeded generator, filled s-major.
    pub fn random(params: CondenserParams, seed: u64) -> Result<Self> {
        params.check()?;
        let mut rng = SeededRng::new(seed);
        let len = 1usize << (params.n_hat + params.t_hat);
        let bound = 1u64 << params.m_hat;
        let values = (0..len).map(|_| rng.below(bound) as u32).collect();
        Self::new(params, values)
    }

    pub fn params(&self) -> &CondenserParams {
        &self.params
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let p = &self.params;
        writeln!(
            out,
            "GTCOND v1 nhat={} that={} mhat={} k={} kprime={} eps={}",
            p.n_hat,
            p.t_hat,
            p.m_hat,
            p.k,
            p.k_prime,
            format_rational(&p.epsilon)
        )?;
        let t = 1usize << p.t_hat;
        for (idx, v) in self.values.iter().enumerate() {
            writeln!(out, "{:x} {:x} {:x}", idx / t, idx % t, v)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("table text is ASCII")
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let lines = numbered_lines(input)?;
        let mut it = lines.into_iter();
        let (lineno, header) = it.next().ok_or_else(|| parse_err(0, "empty condenser file"))?;
        let fields = parse_header(lineno, &header, "GTCOND")?;
        let get = |key: &str| {
            fields
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| parse_err(lineno, format!("missing {key}=")))
        };
        let params = CondenserParams {
            n_hat: parse_num(lineno, "nhat", get("nhat")?)?,
            t_hat: parse_num(lineno, "that", get("that")?)?,
            m_hat: parse_num(lineno, "mhat", get("mhat")?)?,
            k: parse_num(lineno, "k", get("k")?)?,
            k_prime: parse_num(lineno, "kprime", get("kprime")?)?,
            epsilon: parse_rational(get("eps")?).map_err(|e| parse_err(lineno, e.to_string()))?,
        };
        params.check()?;
        let t = 1usize << params.t_hat;
        let len = 1usize << (params.n_hat + params.t_hat);
        let mut values = Vec::with_capacity(len);
        for idx in 0..len {
            let (ln, text) = it
                .next()
                .ok_or_else(|| parse_err(lineno, format!("expected {len} table lines")))?;
            let fields: Vec<u32> = text
                .split_whitespace()
                .map(|tok| u32::from_str_radix(tok, 16).map_err(|_| parse_err(ln, format!("bad hex {tok:?}"))))
                .collect::<Result<_>>()?;
            if fields.len() != 3 || fields[0] as usize != idx / t || fields[1] as usize != idx % t {
                return Err(parse_err(ln, format!("expected entry for s={:x} y={:x}", idx / t, idx % t)));
            }
            values.push(fields[2]);
        }
        if let Some((ln, _)) = it.next() {
            return Err(parse_err(ln, "trailing content after table"));
        }
        Self::new(params, values)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

impl CondenserFunction for CondenserTable {
    fn n_hat(&self) -> u32 {
        self.params.n_hat
    }

    fn t_hat(&self) -> u32 {
        self.params.t_hat
    }

    fn m_hat(&self) -> u32 {
        self.params.m_hat
    }

    fn k(&self) -> u32 {
        self.params.k
    }

    fn k_prime(&self) -> u32 {
        self.params.k_prime
    }

    fn epsilon(&self) -> &Rational {
        &self.params.epsilon
    }

    fn eval(&self, x: u32, y: u32) -> u32 {
        self.values[((x as usize) << self.params.t_hat) + y as usize]
    }
}

/// The value matrix M[r][s] = F(s, r) restricted to the first n columns,
/// stored column-major (`s · 2^t̂ + r`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedMatrix {
    pub n: usize,
    pub t_hat: u32,
    pub m_hat: u32,
    values: Vec<u32>,
}

impl InducedMatrix {
    pub fn from_function<F: CondenserFunction + ?Sized>(f: &F, n: usize) -> Result<Self> {
        if n == 0 || n > 1usize << f.n_hat() {
            return Err(Error::InvalidParameter(format!(
                "condenser with n̂={} cannot index {n} items",
                f.n_hat()
            )));
        }
        let t = 1u32 << f.t_hat();
        let values = (0..n as u32).flat_map(|s| (0..t).map(move |r| (s, r))).map(|(s, r)| f.eval(s, r)).collect();
        Ok(Self {
            n,
            t_hat: f.t_hat(),
            m_hat: f.m_hat(),
            values,
        })
    }

    pub fn entry(&self, r: usize, s: usize) -> u32 {
        self.values[(s << self.t_hat) + r]
    }

    fn column(&self, s: usize) -> &[u32] {
        let t = 1usize << self.t_hat;
        &self.values[s * t..(s + 1) * t]
    }

    /// S_r for a 0-based defective set, computed without a design.
    pub fn mixture_of(&self, members: &[usize]) -> MixtureSets {
        let mut sets = MixtureSets::empty(self.t_hat, self.m_hat);
        for &s in members {
            for (r, &v) in self.column(s).iter().enumerate() {
                sets.insert(r, v);
            }
        }
        sets
    }

    /// Number of real columns with coverage 1.
    pub fn full_coverage_count(&self, sets: &MixtureSets) -> usize {
        (0..self.n)
            .filter(|&s| self.column(s).iter().enumerate().all(|(r, &v)| sets.contains(r, v)))
            .count()
    }
}

/// Rows (r, j), r-major; row (r, j) pools the items s with F(s, r) = j.
pub fn induce_design<F: CondenserFunction + ?Sized>(f: &F, n: usize) -> Result<PoolingDesign> {
    let matrix = InducedMatrix::from_function(f, n)?;
    let (t, m) = (1usize << f.t_hat(), 1usize << f.m_hat());
    let mut rows = vec![Pool::empty(n); t * m];
    for s in 0..n {
        for r in 0..t {
            rows[r * m + matrix.entry(r, s) as usize].set_bit(s);
        }
    }
    Ok(PoolingDesign::new(DesignKind::Condenser, n, 0, rows, Vec::new())
        .expect("rows have width n")
        .with_meta("nhat", f.n_hat().to_string())
        .with_meta("that", f.t_hat().to_string())
        .with_meta("mhat", f.m_hat().to_string())
        .with_meta("k", f.k().to_string())
        .with_meta("kprime", f.k_prime().to_string())
        .with_meta("eps", format_rational(f.epsilon())))
}

/// S_r as one bitset over {0,1}^m̂ per r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixtureSets {
    m_hat: u32,
    words: usize,
    bits: Vec<u64>,
}

impl MixtureSets {
    fn empty(t_hat: u32, m_hat: u32) -> Self {
        let words = (1usize << m_hat).div_ceil(64);
        Self {
            m_hat,
            words,
            bits: vec![0; words << t_hat],
        }
    }

    fn insert(&mut self, r: usize, v: u32) {
        let v = v as usize;
        self.bits[r * self.words + v / 64] |= 1 << (v % 64);
    }

    pub fn contains(&self, r: usize, v: u32) -> bool {
        let v = v as usize;
        self.bits[r * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn rounds(&self) -> usize {
        self.bits.len() / self.words
    }

    /// |S_r|.
    pub fn len(&self, r: usize) -> usize {
        self.bits[r * self.words..(r + 1) * self.words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn values(&self, r: usize) -> Vec<u32> {
        (0..1u32 << self.m_hat).filter(|&v| self.contains(r, v)).collect()
    }
}

pub fn mixture_from_answers(t_hat: u32, m_hat: u32, answers: &[bool]) -> Result<MixtureSets> {
    let m = 1usize << m_hat;
    check_answers(m << t_hat, answers)?;
    let mut sets = MixtureSets::empty(t_hat, m_hat);
    for (idx, _) in answers.iter().enumerate().filter(|(_, &a)| a) {
        sets.insert(idx / m, (idx % m) as u32);
    }
    Ok(sets)
}

/// Fraction of r with F(s, r) ∈ S_r.
pub fn coverage_fraction<F: CondenserFunction + ?Sized>(f: &F, s: u32, sets: &MixtureSets) -> Rational {
    let t = 1u32 << f.t_hat();
    let hit = (0..t).filter(|&r| sets.contains(r as usize, f.eval(s, r))).count();
    rational(hit as u64, t as u64)
}

/// 1 iff at least 2^k + 1 of the first n columns are fully covered.
pub fn condenser_verdict<F: CondenserFunction + ?Sized>(f: &F, n: usize, answers: &[bool]) -> Result<bool> {
    let matrix = InducedMatrix::from_function(f, n)?;
    let sets = mixture_from_answers(f.t_hat(), f.m_hat(), answers)?;
    Ok(matrix.full_coverage_count(&sets) > 1usize << f.k())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondenserReport {
    pub low: BoundaryCheck,
    pub high: BoundaryCheck,
}

impl CondenserReport {
    pub fn passed(&self) -> bool {
        self.low.passed() && self.high.passed()
    }

    pub fn exhaustive(&self) -> bool {
        self.low.exhaustive() && self.high.exhaustive()
    }
}

/// Verdict 0 on every set of size ⌈(1−ε)2^k′⌉ − 1 and verdict 1 on every set
/// of size 2^k + 1, over n real items. Coverage only grows with the set, so
/// this covers all smaller and all larger sizes respectively.
pub fn validate_condenser_operational(table: &CondenserTable, n: usize, cfg: &EnumConfig) -> Result<CondenserReport> {
    validate_at_sizes(table, n, table.params.low_size(), cfg)
}

/// Like [`validate_condenser_operational`] with an explicit low size.
pub fn validate_at_sizes(table: &CondenserTable, n: usize, low: usize, cfg: &EnumConfig) -> Result<CondenserReport> {
    let matrix = InducedMatrix::from_function(table, n)?;
    let threshold = 1usize << table.params.k;
    let verdict = |members: &[usize]| matrix.full_coverage_count(&matrix.mixture_of(members)) > threshold;
    Ok(CondenserReport {
        low: check_size(n, low, false, cfg, verdict),
        high: check_size(n, table.params.high_size(), true, cfg, verdict),
    })
}

/// Tries `max_tables` seeded random tables and returns the first that validates.
pub fn search_condenser(
    params: &CondenserParams,
    n: usize,
    seed: u64,
    max_tables: usize,
    cfg: &EnumConfig,
) -> Result<(CondenserTable, CondenserReport, usize)> {
    search_at_sizes(params, n, params.low_size(), seed, max_tables, cfg)
}

const SCREEN_SAMPLES: usize = 256;

fn search_at_sizes(
    params: &CondenserParams,
    n: usize,
    low: usize,
    seed: u64,
    max_tables: usize,
    cfg: &EnumConfig,
) -> Result<(CondenserTable, CondenserReport, usize)> {
    // A small sample rejects most bad tables before the full check.
    let screen = EnumConfig {
        mode: ValidationMode::Sampled,
        samples: SCREEN_SAMPLES,
        ..*cfg
    };
    let mut best: Option<u128> = None;
    for attempt in 0..max_tables {
        let table = CondenserTable::random(params.clone(), derive_seed(seed, attempt as u64))?;
        if cfg.mode != ValidationMode::Off && !validate_at_sizes(&table, n, low, &screen)?.passed() {
            continue;
        }
        let report = validate_at_sizes(&table, n, low, cfg)?;
        if report.passed() {
            return Ok((table, report, attempt));
        }
        let f = report.low.failures + report.high.failures;
        best = Some(best.map_or(f, |b| b.min(f)));
    }
    Err(Error::Construction {
        attempts: max_tables,
        detail: format!(
            "no table validated for n̂={} t̂={} m̂={} k={} k′={}; fewest failing sets after screening {}",
            params.n_hat,
            params.t_hat,
            params.m_hat,
            params.k,
            params.k_prime,
            best.map_or("n/a".into(), |b| b.to_string())
        ),
    })
}

#[derive(Debug)]
pub struct CondenserTester {
    ell: Rational,
    delta: Delta,
    matrix: InducedMatrix,
    k: u32,
    design: PoolingDesign,
}

impl CondenserTester {
    pub fn new(table: &CondenserTable, n: usize, ell: &Rational, delta: Delta) -> Result<Self> {
        let design = induce_design(table, n)?
            .with_meta("ell", format_rational(ell))
            .with_meta("delta", delta.to_string());
        Ok(Self {
            ell: ell.clone(),
            delta,
            matrix: InducedMatrix::from_function(table, n)?,
            k: table.params.k,
            design,
        })
    }

    /// Rebuilds the tester, recovering F on the real columns from the rows.
    pub fn from_design(design: PoolingDesign) -> Result<Self> {
        if design.kind() != DesignKind::Condenser {
            return Err(Error::InvalidParameter(format!("expected a condenser design, got {}", design.kind())));
        }
        let num = |key: &str| -> Result<u32> {
            design
                .require_meta(key)?
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad {key} in condenser meta")))
        };
        let (t_hat, m_hat, k) = (num("that")?, num("mhat")?, num("k")?);
        let ell = parse_rational(design.require_meta("ell")?)?;
        let delta: Delta = design.require_meta("delta")?.parse()?;
        let (t, m, n) = (1usize << t_hat, 1usize << m_hat, design.n());
        if design.t() != t * m {
            return Err(Error::Dimension {
                expected: t * m,
                got: design.t(),
            });
        }
        let mut values = vec![u32::MAX; n * t];
        for (idx, row) in design.rows().iter().enumerate() {
            let (r, j) = (idx / m, idx % m);
            for item in row.items() {
                let slot = &mut values[(item - 1) * t + r];
                if *slot != u32::MAX {
                    return Err(Error::InvalidParameter(format!("item {item} appears twice in block {r}")));
                }
                *slot = j as u32;
            }
        }
        if values.contains(&u32::MAX) {
            return Err(Error::InvalidParameter("some item is missing from a row block".into()));
        }
        Ok(Self {
            ell,
            delta,
            matrix: InducedMatrix {
                n,
                t_hat,
                m_hat,
                values,
            },
            k,
            design,
        })
    }

    pub fn matrix(&self) -> &InducedMatrix {
        &self.matrix
    }
}

impl ThresholdTester for CondenserTester {
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
        let sets = mixture_from_answers(self.matrix.t_hat, self.matrix.m_hat, answers)?;
        Ok(self.matrix.full_coverage_count(&sets) > 1usize << self.k)
    }
}

/// Parameters for threshold scale ℓ: ε = 2/3, k′ = ⌈log₂(3ℓ/Δ²)⌉ and the
/// largest k with 2^k < ℓ/Δ.
pub fn condenser_thresholds(ell: &Rational, delta: Delta) -> Result<(u32, u32, Rational)> {
    let upper = ell / delta.to_rational();
    if upper <= Rational::one() {
        return Err(Error::Precondition(format!(
            "condenser tester needs ℓ/Δ > 1, got {}",
            format_rational(&upper)
        )));
    }
    let k = ceil_log2(&upper) - 1;
    let k_prime = ceil_log2(&(int(3) * ell / delta.squared()));
    Ok((k, k_prime, rational(2, 3)))
}

/// ⌈ℓ/Δ²⌉ − 1: the largest set size a tester at scale ℓ must send to 0.
pub fn contract_low_size(ell: &Rational, delta: Delta) -> usize {
    (ell / delta.squared()).ceil().to_integer().to_usize().expect("fits usize") - 1
}

#[derive(Clone, Debug)]
pub struct CondenserFactory {
    pub seed: u64,
    /// Random tables tried per (t̂, m̂) shape.
    pub tables_per_shape: usize,
    /// Optional gate: reject Δ at or below this value.
    pub min_delta: Option<Rational>,
    pub enumeration: EnumConfig,
}

impl Default for CondenserFactory {
    fn default() -> Self {
        Self {
            seed: 0,
            tables_per_shape: 16,
            min_delta: None,
            enumeration: EnumConfig::default(),
        }
    }
}

impl CondenserFactory {
    /// Searched small tables first (n̂ ≤ 5, t̂ ≤ 3, m̂ ≤ 4, fewer tests than
    /// items), then the injective table with t̂ = 0, m̂ = n̂. Tables are
    /// validated against the tester contract: verdict 0 on every set of size
    /// ⌈ℓ/Δ²⌉ − 1 and 1 on every set of size 2^k + 1.
    pub fn build_tester(&self, n: usize, ell: &Rational, delta: Delta, level: u32) -> Result<(CondenserTester, CondenserReport)> {
        if let Some(c) = &self.min_delta {
            if delta.to_rational() <= *c {
                return Err(Error::Precondition(format!(
                    "Δ = {delta} is not above the configured gate {}",
                    format_rational(c)
                )));
            }
        }
        let (k, k_prime, epsilon) = condenser_thresholds(ell, delta)?;
        let low = contract_low_size(ell, delta);
        if low > (1usize << k) {
            return Err(Error::Precondition(format!(
                "thresholds collapse at ℓ={}, Δ={delta}: sets of size {low} must give 0 but 2^k + 1 = {} must give 1",
                format_rational(ell),
                (1usize << k) + 1
            )));
        }
        let n_hat = ceil_log2(&int(n as u64));
        let base = |t_hat: u32, m_hat: u32| CondenserParams {
            n_hat,
            t_hat,
            m_hat,
            k,
            k_prime,
            epsilon: epsilon.clone(),
        };
        if n_hat <= 5 {
            let mut shapes: Vec<(u32, u32)> = (0..=3u32)
                .flat_map(|t| (1..=4u32).map(move |m| (t, m)))
                .filter(|&(t, m)| (1usize << (t + m)) < n)
                .collect();
            shapes.sort_by_key(|&(t, m)| (t + m, t));
            for (i, (t_hat, m_hat)) in shapes.into_iter().enumerate() {
                let seed = derive_seed(self.seed, ((level as u64) << 16) | i as u64);
                if let Ok((table, report, _)) =
                    search_at_sizes(&base(t_hat, m_hat), n, low, seed, self.tables_per_shape, &self.enumeration)
                {
                    return Ok((CondenserTester::new(&table, n, ell, delta)?, report));
                }
            }
        }
        let table = CondenserTable::injective(base(0, n_hat))?;
        let report = validate_at_sizes(&table, n, low, &self.enumeration)?;
        if !report.passed() {
            return Err(Error::Construction {
                attempts: 1,
                detail: "injective fallback failed validation".into(),
            });
        }
        Ok((CondenserTester::new(&table, n, ell, delta)?, report))
    }
}

impl TesterFactory for CondenserFactory {
    fn method(&self) -> Method {
        Method::CondenserLadder
    }

    fn build(&self, n: usize, ell: &Rational, delta: Delta, level: u32) -> Result<Box<dyn ThresholdTester>> {
        let (mut tester, _) = self.build_tester(n, ell, delta, level)?;
        tester.design = tester.design.with_meta("level", level.to_string());
        Ok(Box::new(tester))
    }
}
