//! The seeded generator behind every random corpus.
//!
//! A 64-bit linear congruential generator, fixed so that other
//! implementations can regenerate the same instances:
//!
//! ```text
//! state <- state * 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! output = state >> 32
//! below(n) = output mod n
//! ```
//!
//! The state is initialized to the seed itself. Distinct subsets are drawn by
//! rejection: indices already taken are redrawn.

use std::collections::HashSet;

use crate::ffield::{Field, Point};

pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Lcg {
        Lcg { state: seed }
    }

    /// Seed for trial `trial` of a corpus at order `q`.
    pub fn for_instance(seed: u64, q: u32, trial: u64) -> Lcg {
        let s = seed
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(((q as u64) << 32) | trial);
        Lcg::new(s)
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self
            .state
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform-ish in `[0, n)`; `n > 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u32() as u64 % n
    }

    /// In `[lo, hi]`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    /// `k` distinct indices of `[0, n)` in draw order.
    pub fn distinct(&mut self, n: u64, k: u64) -> Vec<u64> {
        assert!(k <= n, "cannot draw {k} distinct values from {n}");
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(k as usize);
        while (out.len() as u64) < k {
            let i = self.below(n);
            if seen.insert(i) {
                out.push(i);
            }
        }
        out
    }

    /// `k` distinct elements of `items`, sorted by position in `items`.
    pub fn subset<T: Clone>(&mut self, items: &[T], k: usize) -> Vec<T> {
        let mut idx = self.distinct(items.len() as u64, k as u64);
        idx.sort_unstable();
        idx.into_iter().map(|i| items[i as usize].clone()).collect()
    }

    /// `k` distinct points of `F_q^d`, sorted.
    pub fn points(&mut self, f: &Field, d: usize, k: usize) -> Vec<Point> {
        let mut out: Vec<Point> = self
            .distinct(f.space_size(d), k as u64)
            .into_iter()
            .map(|n| f.point_at(d, n))
            .collect();
        out.sort();
        out
    }
}
