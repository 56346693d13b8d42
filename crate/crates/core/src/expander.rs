//! Threshold testers from regular bipartite expanders.
//!
//! Left vertices are items, right vertices are tests: test j pools every item
//! adjacent to j, so the number of positive tests is |Γ(I)|. If every set of
//! at most k items has |Γ(S)| ≥ a|S|, then "positives ≥ ak" answers 0 below
//! ak/δ defectives and 1 from k defectives on.
//!
//! Graph files:
//!
//! ```text
//! GTGRAPH v1 n=<n> m=<m> delta=<degree> seed=<u64>
//! <0-based right neighbours of left vertex 0, space separated>
//! ...
//! ```

use std::io::{BufRead, Write};

use num_traits::{ToPrimitive, Zero};

use crate::design::{numbered_lines, parse_header, parse_num, DesignKind, PoolingDesign};
use crate::error::{parse_err, Error, Result};
use crate::estimate::Method;
use crate::ladder::{check_answers, TesterFactory, ThresholdTester};
use crate::numeric::{format_rational, int, parse_rational, rational, Delta, Rational};
use crate::pool::Pool;
use crate::rng::{derive_seed, SeededRng};
use crate::subsets::{par_fold, sample, subsets_up_to};
use crate::validate::{CheckMode, EnumConfig, ValidationMode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    n: usize,
    m: usize,
    degree: usize,
    seed: u64,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Checks regularity and neighbour ranges; neighbour lists are sorted.
    pub fn new(m: usize, seed: u64, mut adj: Vec<Vec<usize>>) -> Result<Self> {
        let n = adj.len();
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one left vertex".into()));
        }
        let degree = adj[0].len();
        for (i, nb) in adj.iter_mut().enumerate() {
            nb.sort_unstable();
            nb.dedup();
            if nb.len() != degree {
                return Err(Error::InvalidParameter(format!(
                    "irregular graph: left vertex {i} has {} distinct neighbours, expected {degree}",
                    nb.len()
                )));
            }
            if let Some(&bad) = nb.iter().find(|&&j| j >= m) {
                return Err(Error::InvalidParameter(format!(
                    "neighbour {bad} of left vertex {i} is outside 0..{m}"
                )));
            }
        }
        Ok(Self {
            n,
            m,
            degree,
            seed,
            adj,
        })
    }

    /// Γ(i) = {i}.
    pub fn identity(n: usize) -> Self {
        Self::new(n, 0, (0..n).map(|i| vec![i]).collect()).expect("identity is regular")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn neighbours(&self, left: usize) -> &[usize] {
        &self.adj[left]
    }

    /// |Γ(S)| for 0-based left vertices.
    pub fn neighbourhood_size(&self, set: &[usize]) -> usize {
        let mut seen = vec![false; self.m];
        let mut count = 0;
        for &i in set {
            for &j in &self.adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                }
            }
        }
        count
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "GTGRAPH v1 n={} m={} delta={} seed={}",
            self.n, self.m, self.degree, self.seed
        )?;
        for nb in &self.adj {
            let line: Vec<String> = nb.iter().map(|j| j.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("graph text is ASCII")
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let lines = numbered_lines(input)?;
        let mut it = lines.into_iter();
        let (lineno, header) = it.next().ok_or_else(|| parse_err(0, "empty graph file"))?;
        let fields = parse_header(lineno, &header, "GTGRAPH")?;
        let get = |key: &str| {
            fields
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| parse_err(lineno, format!("missing {key}=")))
        };
        let n: usize = parse_num(lineno, "n", get("n")?)?;
        let m: usize = parse_num(lineno, "m", get("m")?)?;
        let degree: usize = parse_num(lineno, "delta", get("delta")?)?;
        let seed: u64 = parse_num(lineno, "seed", get("seed")?)?;
        let mut adj = Vec::with_capacity(n);
        for _ in 0..n {
            let (ln, text) = it
                .next()
                .ok_or_else(|| parse_err(lineno, format!("expected {n} adjacency lines")))?;
            let nb = text
                .split_whitespace()
                .map(|tok| parse_num::<usize>(ln, "neighbour", tok))
                .collect::<Result<Vec<_>>>()?;
            if nb.len() != degree {
                return Err(parse_err(ln, format!("expected {degree} neighbours, got {}", nb.len())));
            }
            adj.push(nb);
        }
        if let Some((ln, _)) = it.next() {
            return Err(parse_err(ln, "trailing content after graph"));
        }
        Self::new(m, seed, adj)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

/// Each left vertex draws `degree` distinct neighbours from `0..m`.
pub fn random_regular_graph(n: usize, m: usize, degree: usize, seed: u64) -> Result<BipartiteGraph> {
    if degree == 0 || degree > m {
        return Err(Error::Precondition(format!("need 1 <= degree <= m, got degree={degree}, m={m}")));
    }
    let mut rng = SeededRng::new(seed);
    let adj = (0..n).map(|_| rng.sample_distinct(m, degree)).collect();
    BipartiteGraph::new(m, seed, adj)
}

/// Row j holds the (1-based) items adjacent to right vertex j.
pub fn design_from_graph(graph: &BipartiteGraph) -> PoolingDesign {
    let mut rows = vec![Pool::empty(graph.n); graph.m];
    for (i, nb) in graph.adj.iter().enumerate() {
        for &j in nb {
            rows[j].set_bit(i);
        }
    }
    PoolingDesign::new(DesignKind::Expander, graph.n, graph.seed, rows, Vec::new())
        .expect("rows have width n")
        .with_meta("degree", graph.degree.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionCertificate {
    pub k: usize,
    pub a: Rational,
    pub checked: CheckMode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionOutcome {
    pub certificate: Option<ExpansionCertificate>,
    /// Smallest |Γ(S)|/|S| seen over the checked sets.
    pub min_ratio: Rational,
    /// The set attaining `min_ratio` (0-based): smallest ratio, then smallest
    /// size, then lexicographically first.
    pub witness: Vec<usize>,
    pub checked: CheckMode,
    pub sets_checked: u128,
}

type Worst = Option<(usize, usize, u128, Vec<usize>)>;

fn better(a: Worst, b: Worst) -> Worst {
    match (a, b) {
        (Some(x), Some(y)) => {
            // compare x.0/x.1 against y.0/y.1, then size, then rank
            let lhs = x.0 * y.1;
            let rhs = y.0 * x.1;
            if lhs < rhs || (lhs == rhs && (x.1, x.2) <= (y.1, y.2)) {
                Some(x)
            } else {
                Some(y)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// Decides whether every left set of size at most k has |Γ(S)| ≥ a|S|.
pub fn validate_expansion(graph: &BipartiteGraph, k: usize, a: &Rational, cfg: &EnumConfig) -> ExpansionOutcome {
    let k = k.min(graph.n);
    let design = design_from_graph(graph);
    let cols = design.columns();
    let total = subsets_up_to(graph.n, k);
    let exhaustive = cfg.mode == ValidationMode::Auto && total <= cfg.budget;
    let mut worst: Worst = None;
    let mut checked = 0u128;
    for size in 1..=k {
        let w = if exhaustive {
            checked += crate::subsets::binomial(graph.n, size);
            par_fold(
                graph.n,
                size,
                || None,
                |acc: Worst, rank, comb| {
                    let mut scratch = Vec::new();
                    let g = cols.positives(comb, &mut scratch);
                    better(acc, Some((g, size, rank, comb.to_vec())))
                },
                better,
            )
        } else {
            let draws = sample(graph.n, size, cfg.samples / k.max(1) + 1, derive_seed(cfg.sample_seed, size as u64));
            checked += draws.len() as u128;
            let mut scratch = Vec::new();
            draws.into_iter().enumerate().fold(None, |acc, (idx, comb)| {
                let g = cols.positives(&comb, &mut scratch);
                better(acc, Some((g, size, idx as u128, comb)))
            })
        };
        worst = better(worst, w);
    }
    let mode = if exhaustive { CheckMode::Exhaustive } else { CheckMode::Sampled };
    let (min_ratio, witness) = match worst {
        Some((g, s, _, set)) => (rational(g as u64, s as u64), set),
        None => (Rational::zero(), Vec::new()),
    };
    let certificate = (k == 0 || min_ratio >= *a).then(|| ExpansionCertificate {
        k,
        a: a.clone(),
        checked: mode,
    });
    ExpansionOutcome {
        certificate,
        min_ratio,
        witness,
        checked: mode,
        sets_checked: checked,
    }
}

/// positives ≥ ak, compared exactly.
pub fn expander_verdict(graph: &BipartiteGraph, certificate: &ExpansionCertificate, answers: &[bool]) -> Result<bool> {
    check_answers(graph.m, answers)?;
    Ok(verdict_from_count(answers, certificate.k, &certificate.a))
}

fn verdict_from_count(answers: &[bool], k: usize, a: &Rational) -> bool {
    let positives = answers.iter().filter(|&&x| x).count() as u64;
    int(positives) >= a * int(k as u64)
}

/// Where the factory gets candidate graphs from.
pub trait GraphSource: Sync {
    fn name(&self) -> &'static str;
    /// Number of candidates available.
    fn attempts(&self) -> usize;
    /// Candidate `attempt` for `n` left vertices and expansion target size `k`.
    fn graph(&self, n: usize, k: usize, attempt: usize) -> Result<BipartiteGraph>;
}

/// Seeded random left-regular graphs with m = max(degree, ⌈right_factor·n⌉).
#[derive(Clone, Debug)]
pub struct RandomRegularSource {
    pub degree: usize,
    pub right_factor: Rational,
    pub seed: u64,
    pub max_graphs: usize,
}

impl Default for RandomRegularSource {
    fn default() -> Self {
        Self {
            degree: 3,
            right_factor: int(2),
            seed: 0,
            max_graphs: 50,
        }
    }
}

impl GraphSource for RandomRegularSource {
    fn name(&self) -> &'static str {
        "random-regular"
    }

    fn attempts(&self) -> usize {
        self.max_graphs
    }

    fn graph(&self, n: usize, _k: usize, attempt: usize) -> Result<BipartiteGraph> {
        let m = (&self.right_factor * int(n as u64))
            .ceil()
            .to_integer()
            .to_usize()
            .unwrap_or(usize::MAX)
            .max(self.degree);
        let seed = if attempt == 0 {
            self.seed
        } else {
            derive_seed(self.seed, attempt as u64)
        };
        random_regular_graph(n, m, self.degree, seed)
    }
}

/// The identity matching; a (k, 1)-expander for every k.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentitySource;

impl GraphSource for IdentitySource {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn attempts(&self) -> usize {
        1
    }

    fn graph(&self, n: usize, _k: usize, _attempt: usize) -> Result<BipartiteGraph> {
        Ok(BipartiteGraph::identity(n))
    }
}

#[derive(Debug)]
pub struct ExpanderTester {
    ell: Rational,
    delta: Delta,
    k: usize,
    a: Rational,
    design: PoolingDesign,
}

impl ExpanderTester {
    pub fn new(graph: &BipartiteGraph, certificate: &ExpansionCertificate, ell: &Rational, delta: Delta) -> Self {
        let design = design_from_graph(graph)
            .with_meta("ell", format_rational(ell))
            .with_meta("delta", delta.to_string())
            .with_meta("k", certificate.k.to_string())
            .with_meta("a", format_rational(&certificate.a))
            .with_meta(
                "certified",
                match certificate.checked {
                    CheckMode::Exhaustive => "exhaustive",
                    _ => "sampled",
                },
            );
        Self {
            ell: ell.clone(),
            delta,
            k: certificate.k,
            a: certificate.a.clone(),
            design,
        }
    }

    pub fn from_design(design: PoolingDesign) -> Result<Self> {
        if design.kind() != DesignKind::Expander {
            return Err(Error::InvalidParameter(format!("expected an expander design, got {}", design.kind())));
        }
        let ell = parse_rational(design.require_meta("ell")?)?;
        let delta: Delta = design.require_meta("delta")?.parse()?;
        let k: usize = design
            .require_meta("k")?
            .parse()
            .map_err(|_| Error::InvalidParameter("bad k in expander meta".into()))?;
        let a = parse_rational(design.require_meta("a")?)?;
        Ok(Self {
            ell,
            delta,
            k,
            a,
            design,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }
}

impl ThresholdTester for ExpanderTester {
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
        Ok(verdict_from_count(answers, self.k, &self.a))
    }
}

/// Factory parameters r = min(Δ, 2), k = ⌈rℓ/Δ²⌉, a = degree/r.
pub fn expander_parameters(ell: &Rational, delta: Delta, degree: usize) -> (Rational, usize, Rational) {
    let r = delta.to_rational().min(int(2));
    let k = (&r * ell / delta.squared())
        .ceil()
        .to_integer()
        .to_usize()
        .expect("k fits usize");
    let a = int(degree as u64) / &r;
    (r, k, a)
}

pub struct ExpanderFactory {
    pub source: Box<dyn GraphSource>,
    pub enumeration: EnumConfig,
}

impl Default for ExpanderFactory {
    fn default() -> Self {
        Self {
            source: Box::new(RandomRegularSource::default()),
            enumeration: EnumConfig::default(),
        }
    }
}

impl ExpanderFactory {
    /// Searches the source for a certified expander and wraps it as a tester.
    pub fn build_tester(&self, n: usize, ell: &Rational, delta: Delta) -> Result<(ExpanderTester, BipartiteGraph, ExpansionOutcome)> {
        if *ell < delta.squared() {
            return Err(Error::Precondition(format!(
                "expander tester needs ℓ >= Δ², got ℓ={}",
                format_rational(ell)
            )));
        }
        let mut best: Option<Rational> = None;
        for attempt in 0..self.source.attempts() {
            let graph = self.source.graph(n, 0, attempt)?;
            let (_, k, a) = expander_parameters(ell, delta, graph.degree());
            let outcome = validate_expansion(&graph, k, &a, &self.enumeration);
            if let Some(cert) = &outcome.certificate {
                let tester = ExpanderTester::new(&graph, cert, ell, delta);
                return Ok((tester, graph, outcome));
            }
            if best.as_ref().is_none_or(|b| outcome.min_ratio > *b) {
                best = Some(outcome.min_ratio.clone());
            }
        }
        let best = best.map(|b| format_rational(&b)).unwrap_or_else(|| "none".into());
        Err(Error::Construction {
            attempts: self.source.attempts(),
            detail: format!(
                "no {} graph certified for n={n}, ℓ={}, Δ={delta}; best expansion ratio {best}",
                self.source.name(),
                format_rational(ell)
            ),
        })
    }
}

impl TesterFactory for ExpanderFactory {
    fn method(&self) -> Method {
        Method::ExpanderLadder
    }

    fn min_ell(&self, delta: Delta) -> Rational {
        delta.squared()
    }

    fn build(&self, n: usize, ell: &Rational, delta: Delta, level: u32) -> Result<Box<dyn ThresholdTester>> {
        let (mut tester, _, _) = self.build_tester(n, ell, delta)?;
        tester.design = tester.design.with_meta("level", level.to_string());
        Ok(Box::new(tester))
    }
}
