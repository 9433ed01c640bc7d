use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{check_sizes, shadows_of};
use crate::systems::FiniteSystem;
use crate::uniform::{Entourage, UniformityBase};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusOptions {
    /// Number of states per chain; `None` means [`default_chain_length`].
    pub chain_length: Option<usize>,
    /// Largest chain count tested exhaustively, and the sample size above it.
    pub budget: u64,
    pub seed: u64,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        ModulusOptions { chain_length: None, budget: 20_000, seed: 0 }
    }
}

/// `max(2, ⌊log₂ N⌋)`.
pub fn default_chain_length(carrier_size: usize) -> usize {
    let log2 = (usize::BITS - 1 - carrier_size.max(1).leading_zeros()) as usize;
    log2.max(2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedScale {
    pub index: usize,
    pub scale: String,
    /// A `D`-chain with no `E`-shadow.
    pub chain: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowingModulus {
    /// Index of `D` in the base.
    pub index: usize,
    pub scale: String,
    pub chain_length: usize,
    /// Every chain of the accepted scale was tested.
    pub exact: bool,
    pub chains_tested: u64,
    /// Larger candidates, each with the chain that defeated it.
    pub rejected: Vec<RejectedScale>,
}

/// The largest base member `D ⊆ E` whose tested `D`-chains all have an
/// `E`-shadow.
///
/// Candidates are tried from the largest down. A candidate is tested on
/// every chain when there are at most `budget` of them and on `budget`
/// chains drawn from one ChaCha8 stream seeded with `seed` otherwise.
pub fn shadowing_modulus(
    sys: &FiniteSystem,
    base: &UniformityBase,
    e: &Entourage,
    opts: &ModulusOptions,
) -> Result<ShadowingModulus> {
    check_sizes(sys, e)?;
    if base.carrier().size() != sys.size() {
        return Err(Error::DomainMismatch("base and system live on different carriers".into()));
    }
    if !base.is_nested() {
        return Err(Error::Precondition("shadowing modulus needs a nested base".into()));
    }
    let len = opts.chain_length.unwrap_or_else(|| default_chain_length(sys.size()));
    if len == 0 {
        return Err(Error::OutOfRange("chain length must be at least 1".into()));
    }
    let tables = ShadowTables::new(sys, e, len);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rejected = Vec::new();
    for (index, d) in base.members().iter().enumerate() {
        if !d.is_subset(e) {
            continue;
        }
        let count = chain_count(sys, d, len);
        let (exact, outcome) = if count <= opts.budget as u128 {
            (true, tables.exhaustive(sys, d))
        } else {
            (false, tables.sampled(sys, d, opts.budget, &mut rng))
        };
        match outcome {
            Some(chain) => rejected.push(RejectedScale { index, scale: d.tag().to_string(), chain }),
            None => {
                return Ok(ShadowingModulus {
                    index,
                    scale: d.tag().to_string(),
                    chain_length: len,
                    exact,
                    chains_tested: if exact { count as u64 } else { opts.budget },
                    rejected,
                })
            }
        }
    }
    Err(Error::NotFound(match rejected.last() {
        Some(r) => format!(
            "no base member inside `{}` passes; the smallest, `{}`, fails on chain {:?}",
            e.tag(),
            r.scale,
            r.chain
        ),
        None => format!("no base member lies inside `{}`", e.tag()),
    }))
}

/// Number of `D`-chains with `len` states, saturating.
fn chain_count(sys: &FiniteSystem, d: &Entourage, len: usize) -> u128 {
    let n = sys.size();
    let mut ending = vec![1u128; n];
    for _ in 1..len {
        ending =
            (0..n).map(|p| d.row(sys.apply(p)).ones().fold(0u128, |acc, q| acc.saturating_add(ending[q]))).collect();
    }
    ending.iter().fold(0u128, |acc, &c| acc.saturating_add(c))
}

/// `allowed[i][x] = {w : (f^i(w), x) ∈ E}`.
struct ShadowTables {
    allowed: Vec<Vec<FixedBitSet>>,
    e: Entourage,
}

impl ShadowTables {
    fn new(sys: &FiniteSystem, e: &Entourage, len: usize) -> Self {
        let n = sys.size();
        let mut image: Vec<usize> = (0..n).collect();
        let mut allowed = Vec::with_capacity(len);
        for _ in 0..len {
            let mut rows = vec![FixedBitSet::with_capacity(n); n];
            for (w, &p) in image.iter().enumerate() {
                for x in e.row(p).ones() {
                    rows[x].insert(w);
                }
            }
            allowed.push(rows);
            for p in image.iter_mut() {
                *p = sys.apply(*p);
            }
        }
        ShadowTables { allowed, e: e.clone() }
    }

    /// Depth-first over all chains; a state already explored without a
    /// counterexample is not revisited.
    fn exhaustive(&self, sys: &FiniteSystem, d: &Entourage) -> Option<Vec<usize>> {
        let mut cleared: HashSet<(usize, usize, FixedBitSet)> = HashSet::new();
        let mut chain = Vec::with_capacity(self.allowed.len());
        for x in 0..sys.size() {
            chain.push(x);
            let alive = self.allowed[0][x].clone();
            if self.descend(sys, d, &mut chain, alive, &mut cleared) {
                return Some(chain);
            }
            chain.pop();
        }
        None
    }

    fn descend(
        &self,
        sys: &FiniteSystem,
        d: &Entourage,
        chain: &mut Vec<usize>,
        alive: FixedBitSet,
        cleared: &mut HashSet<(usize, usize, FixedBitSet)>,
    ) -> bool {
        if alive.is_clear() {
            return true;
        }
        let depth = chain.len();
        if depth == self.allowed.len() {
            return false;
        }
        let last = *chain.last().unwrap();
        let key = (depth, last, alive.clone());
        if cleared.contains(&key) {
            return false;
        }
        for q in d.row(sys.apply(last)).ones() {
            let mut next = alive.clone();
            next.intersect_with(&self.allowed[depth][q]);
            chain.push(q);
            if self.descend(sys, d, chain, next, cleared) {
                return true;
            }
            chain.pop();
        }
        cleared.insert(key);
        false
    }

    fn sampled(&self, sys: &FiniteSystem, d: &Entourage, samples: u64, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
        let n = sys.size();
        let steps: Vec<Vec<usize>> = (0..n).map(|p| d.row(sys.apply(p)).ones().collect()).collect();
        let len = self.allowed.len();
        for _ in 0..samples {
            let mut chain = Vec::with_capacity(len);
            let mut x = rng.random_range(0..n);
            chain.push(x);
            for _ in 1..len {
                let options = &steps[x];
                x = options[rng.random_range(0..options.len())];
                chain.push(x);
            }
            if shadows_of(sys, &chain, &self.e).is_clear() {
                return Some(chain);
            }
        }
        None
    }
}
