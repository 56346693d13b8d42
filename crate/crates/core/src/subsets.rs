//! Enumeration of fixed-size subsets of `0..n`, in lexicographic order, split
//! into contiguous rank shards that are folded in parallel.

use rayon::prelude::*;

use crate::rng::SeededRng;

const SHARD: u128 = 4096;

/// C(n, k), saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of subsets of size `1..=k` (the empty set excluded).
pub fn subsets_up_to(n: usize, k: usize) -> u128 {
    (1..=k.min(n)).fold(0u128, |acc, s| acc.saturating_add(binomial(n, s)))
}

/// The `rank`-th k-subset of `0..n` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        let mut x = next;
        loop {
            let count = binomial(n - x - 1, remaining);
            if rank < count {
                break;
            }
            rank -= count;
            x += 1;
        }
        out.push(x);
        next = x + 1;
    }
    out
}

/// Advances `comb` to the next k-subset of `0..n`; `false` when exhausted.
pub fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Folds every k-subset of `0..n`. Shards are independent; `reduce` must be
/// associative and should break ties on the rank passed to `fold` so the
/// result does not depend on scheduling.
pub fn par_fold<A, Id, F, R>(n: usize, k: usize, identity: Id, fold: F, reduce: R) -> A
where
    A: Send,
    Id: Fn() -> A + Sync + Send,
    F: Fn(A, u128, &[usize]) -> A + Sync + Send,
    R: Fn(A, A) -> A + Sync + Send,
{
    let total = binomial(n, k);
    if total == 0 {
        return identity();
    }
    let shards = total.div_ceil(SHARD);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let start = s * SHARD;
            let end = (start + SHARD).min(total);
            let mut comb = unrank(n, k, start);
            let mut acc = identity();
            let mut rank = start;
            loop {
                acc = fold(acc, rank, &comb);
                rank += 1;
                if rank == end || !next_combination(&mut comb, n) {
                    break;
                }
            }
            acc
        })
        .reduce(&identity, &reduce)
}

/// `count` seeded uniform k-subsets of `0..n` (with repetition across draws).
pub fn sample(n: usize, k: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = SeededRng::new(seed);
    (0..count).map(|_| rng.sample_distinct(n, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(24, 2), 276);
        assert_eq!(binomial(24, 7), 346_104);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(subsets_up_to(20, 4), 6195);
        assert_eq!(binomial(200, 100), u128::MAX);
    }

    #[test]
    fn unrank_agrees_with_iteration() {
        let (n, k) = (9, 4);
        let mut comb: Vec<usize> = (0..k).collect();
        let mut rank = 0u128;
        loop {
            assert_eq!(unrank(n, k, rank), comb);
            rank += 1;
            if !next_combination(&mut comb, n) {
                break;
            }
        }
        assert_eq!(rank, binomial(n, k));
    }

    #[test]
    fn par_fold_visits_each_subset_once() {
        let (count, xor) = par_fold(
            18,
            5,
            || (0u128, 0u64),
            |(c, x), _, comb| {
                let mask: u64 = comb.iter().map(|&i| 1u64 << i).sum();
                (c + 1, x ^ mask.wrapping_mul(0x9e37_79b9_7f4a_7c15))
            },
            |a, b| (a.0 + b.0, a.1 ^ b.1),
        );
        assert_eq!(count, binomial(18, 5));
        let mut expect = 0u64;
        let mut comb: Vec<usize> = (0..5).collect();
        loop {
            let mask: u64 = comb.iter().map(|&i| 1u64 << i).sum();
            expect ^= mask.wrapping_mul(0x9e37_79b9_7f4a_7c15);
            if !next_combination(&mut comb, 18) {
                break;
            }
        }
        assert_eq!(xor, expect);
    }

    #[test]
    fn empty_subset_is_visited_once() {
        let c = par_fold(4, 0, || 0, |c, _, comb| {
            assert!(comb.is_empty());
            c + 1
        }, |a, b| a + b);
        assert_eq!(c, 1);
    }
}
