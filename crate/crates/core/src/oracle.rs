//! The simulated test oracle and its query ledger.
//!
//! Concurrency contract: answering takes `&self` and the ledger counters are
//! atomics, so one oracle may be shared across threads answering concurrently.
//! Every answered pool adds exactly one to `queries_made` regardless of which
//! thread asked. A batch (one [`TestOracle::answer_pools`] or
//! [`TestOracle::answer_design`] call, or a single pool) adds one to `batches`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::design::PoolingDesign;
use crate::error::{Error, Result};
use crate::pool::Pool;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ItemUniverse {
    n: usize,
}

impl ItemUniverse {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("universe needs n >= 1 items".into()));
        }
        Ok(Self { n })
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn all(self) -> Pool {
        Pool::full(self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectiveSet {
    members: Pool,
}

impl DefectiveSet {
    pub fn new<I: IntoIterator<Item = usize>>(universe: ItemUniverse, items: I) -> Result<Self> {
        Ok(Self {
            members: Pool::from_items(universe.n(), items)?,
        })
    }

    pub fn from_pool(members: Pool) -> Self {
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &Pool {
        &self.members
    }
}

/// Hidden defective set plus a monotone ledger of answered tests.
///
/// The hidden set has no accessor: estimators learn about it through tests only.
#[derive(Debug)]
pub struct TestOracle {
    universe: ItemUniverse,
    hidden: Pool,
    queries: AtomicU64,
    batches: AtomicU64,
}

impl TestOracle {
    pub fn new(universe: ItemUniverse, hidden: DefectiveSet) -> Result<Self> {
        if hidden.members.width() != universe.n() {
            return Err(Error::Dimension {
                expected: universe.n(),
                got: hidden.members.width(),
            });
        }
        Ok(Self {
            universe,
            hidden: hidden.members,
            queries: AtomicU64::new(0),
            batches: AtomicU64::new(0),
        })
    }

    /// Shorthand: universe `1..=n` with the given 1-based defectives.
    pub fn with_defectives<I: IntoIterator<Item = usize>>(n: usize, items: I) -> Result<Self> {
        let universe = ItemUniverse::new(n)?;
        let hidden = DefectiveSet::new(universe, items)?;
        Self::new(universe, hidden)
    }

    pub fn universe(&self) -> ItemUniverse {
        self.universe
    }

    pub fn n(&self) -> usize {
        self.universe.n()
    }

    pub fn queries_made(&self) -> u64 {
        self.queries.load(Ordering::SeqCst)
    }

    pub fn batches(&self) -> u64 {
        self.batches.load(Ordering::SeqCst)
    }

    fn check(&self, pool: &Pool) -> Result<()> {
        if pool.width() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                got: pool.width(),
            });
        }
        Ok(())
    }

    /// Q(I): 1 iff the pool meets the hidden set.
    pub fn answer_pool(&self, pool: &Pool) -> Result<bool> {
        self.check(pool)?;
        self.queries.fetch_add(1, Ordering::SeqCst);
        self.batches.fetch_add(1, Ordering::SeqCst);
        Ok(pool.intersects(&self.hidden))
    }

    /// Answers a set of pools fixed before any of their answers is read.
    pub fn answer_pools(&self, pools: &[Pool]) -> Result<Vec<bool>> {
        pools.iter().try_for_each(|p| self.check(p))?;
        let answers = pools
            .par_iter()
            .map(|p| p.intersects(&self.hidden))
            .collect();
        self.queries.fetch_add(pools.len() as u64, Ordering::SeqCst);
        self.batches.fetch_add(1, Ordering::SeqCst);
        Ok(answers)
    }

    pub fn answer_design(&self, design: &PoolingDesign) -> Result<Vec<bool>> {
        if design.n() != self.n() {
            return Err(Error::Dimension {
                expected: self.n(),
                got: design.n(),
            });
        }
        self.answer_pools(design.rows())
    }
}
