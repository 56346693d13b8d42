//! Pooling designs (t×n test matrices) and the `GTDESIGN v1` file format.
//!
//! ```text
//! GTDESIGN v1 kind=<bernoulli|expander|condenser|identity> n=<n> t=<t> seed=<u64> meta=<k=v&k=v>
//! <row 1 as lowercase hex, bit j = item j+1, padded to ceil(n/4) digits>
//! ...
//! ```

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{parse_err, Error, Result};
use crate::pool::Pool;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DesignKind {
    Bernoulli,
    Expander,
    Condenser,
    Identity,
}

impl DesignKind {
    pub fn name(self) -> &'static str {
        match self {
            DesignKind::Bernoulli => "bernoulli",
            DesignKind::Expander => "expander",
            DesignKind::Condenser => "condenser",
            DesignKind::Identity => "identity",
        }
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DesignKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(DesignKind::Bernoulli),
            "expander" => Ok(DesignKind::Expander),
            "condenser" => Ok(DesignKind::Condenser),
            "identity" => Ok(DesignKind::Identity),
            other => Err(Error::InvalidParameter(format!("unknown design kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolingDesign {
    kind: DesignKind,
    n: usize,
    seed: u64,
    rows: Vec<Pool>,
    meta: Vec<(String, String)>,
}

impl PoolingDesign {
    pub fn new(
        kind: DesignKind,
        n: usize,
        seed: u64,
        rows: Vec<Pool>,
        meta: Vec<(String, String)>,
    ) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.width() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: bad.width(),
            });
        }
        Ok(Self {
            kind,
            n,
            seed,
            rows,
            meta,
        })
    }

    /// Individual testing: row i is `{i}`.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| Pool::from_bits(n, &[i])).collect();
        Self {
            kind: DesignKind::Identity,
            n,
            seed: 0,
            rows,
            meta: Vec::new(),
        }
    }

    pub fn kind(&self) -> DesignKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.rows.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rows(&self) -> &[Pool] {
        &self.rows
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn meta_pairs(&self) -> &[(String, String)] {
        &self.meta
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        let value = value.into();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
        self
    }

    pub(crate) fn require_meta(&self, key: &str) -> Result<&str> {
        self.meta(key).ok_or_else(|| {
            Error::InvalidParameter(format!("{} design is missing meta key {key:?}", self.kind))
        })
    }

    /// Number of rows containing each item, indexed by item - 1.
    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n];
        for row in &self.rows {
            for item in row.items() {
                w[item - 1] += 1;
            }
        }
        w
    }

    pub fn columns(&self) -> ColumnIndex {
        ColumnIndex::new(self)
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        let meta: String = form_urlencoded::Serializer::new(String::new())
            .extend_pairs(self.meta.iter())
            .finish();
        writeln!(
            out,
            "GTDESIGN v1 kind={} n={} t={} seed={} meta={}",
            self.kind,
            self.n,
            self.rows.len(),
            self.seed,
            meta
        )?;
        for row in &self.rows {
            writeln!(out, "{}", row.to_hex())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("design text is ASCII")
    }

    /// Reads one design block from `lines`, which yields `(line_number, text)`.
    pub fn read_block<I>(lines: &mut I) -> Result<Self>
    where
        I: Iterator<Item = (usize, String)>,
    {
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "missing GTDESIGN header"))?;
        let fields = parse_header(lineno, &header, "GTDESIGN")?;
        let get = |key: &str| {
            fields
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| parse_err(lineno, format!("missing {key}=")))
        };
        let kind: DesignKind = get("kind")?
            .parse()
            .map_err(|e: Error| parse_err(lineno, e.to_string()))?;
        let n: usize = parse_num(lineno, "n", get("n")?)?;
        let t: usize = parse_num(lineno, "t", get("t")?)?;
        let seed: u64 = parse_num(lineno, "seed", get("seed")?)?;
        let meta = form_urlencoded::parse(get("meta")?.as_bytes())
            .map(|(k, v)| (k.into_owned(), v.into_owned()))
            .collect();
        let mut rows = Vec::with_capacity(t);
        for _ in 0..t {
            let (ln, text) = lines
                .next()
                .ok_or_else(|| parse_err(lineno, format!("expected {t} rows")))?;
            rows.push(Pool::from_hex(n, &text).map_err(|e| parse_err(ln, e.to_string()))?);
        }
        PoolingDesign::new(kind, n, seed, rows, meta)
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let lines = numbered_lines(input)?;
        let mut it = lines.into_iter();
        let design = Self::read_block(&mut it)?;
        if let Some((ln, _)) = it.next() {
            return Err(parse_err(ln, "trailing content after design"));
        }
        Ok(design)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }
}

pub(crate) fn numbered_lines<R: BufRead>(input: R) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

/// Splits `MAGIC v1 key=value ...` into its key/value pairs.
pub(crate) fn parse_header(
    lineno: usize,
    line: &str,
    magic: &str,
) -> Result<Vec<(String, String)>> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some(magic) {
        return Err(parse_err(lineno, format!("expected {magic} header")));
    }
    if tokens.next() != Some("v1") {
        return Err(parse_err(lineno, "unsupported version (expected v1)"));
    }
    tokens
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| parse_err(lineno, format!("malformed field {tok:?}")))
        })
        .collect()
}

pub(crate) fn parse_num<T: FromStr>(lineno: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| parse_err(lineno, format!("bad value for {key}: {v:?}")))
}

/// Column-major view of a design: for each item, the set of rows containing it.
/// Evaluating a defective set costs one OR per member instead of one AND per row.
pub struct ColumnIndex {
    t: usize,
    stride: usize,
    cols: Vec<u64>,
}

impl ColumnIndex {
    fn new(design: &PoolingDesign) -> Self {
        let t = design.t();
        let stride = t.div_ceil(64).max(1);
        let mut cols = vec![0u64; stride * design.n()];
        for (r, row) in design.rows().iter().enumerate() {
            for item in row.items() {
                cols[(item - 1) * stride + r / 64] |= 1 << (r % 64);
            }
        }
        Self { t, stride, cols }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Number of rows hit by the 0-based item set `members`.
    pub fn positives(&self, members: &[usize], scratch: &mut Vec<u64>) -> usize {
        scratch.clear();
        scratch.resize(self.stride, 0);
        for &m in members {
            let col = &self.cols[m * self.stride..(m + 1) * self.stride];
            for (s, c) in scratch.iter_mut().zip(col) {
                *s |= c;
            }
        }
        scratch.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn zero_count(&self, members: &[usize], scratch: &mut Vec<u64>) -> usize {
        self.t - self.positives(members, scratch)
    }

    /// Per-row answers for the 0-based item set `members`.
    pub fn answers(&self, members: &[usize]) -> Vec<bool> {
        let mut scratch = Vec::new();
        self.positives(members, &mut scratch);
        (0..self.t)
            .map(|r| scratch[r / 64] >> (r % 64) & 1 == 1)
            .collect()
    }
}
