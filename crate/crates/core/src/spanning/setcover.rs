//! Minimum set cover.
//!
//! Used for minimum spanning sets (the sets are Bowen balls) and for minimal
//! subcovers of open covers. The exact search branches on the uncovered
//! element with the fewest covering sets and prunes with the larger of a
//! volume bound and a packing bound (elements no single set can cover
//! together each need their own set).

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use fixedbitset::FixedBitSet;

use crate::{Error, Result};

pub(crate) struct CoverOutcome {
    pub chosen: Vec<usize>,
    pub lower: usize,
    pub exact: bool,
    pub nodes: u64,
}

fn gain(set: &FixedBitSet, uncovered: &FixedBitSet) -> usize {
    set.intersection_count(uncovered)
}

/// Largest-uncovered-first greedy cover, ties broken by lowest set index.
///
/// Gains only shrink as elements get covered, so stale heap entries are
/// upper bounds; an entry whose refreshed key still beats the heap top is
/// exactly the set the plain greedy rule would pick.
pub(crate) fn greedy(sets: &[FixedBitSet], universe: &FixedBitSet) -> Result<Vec<usize>> {
    let mut uncovered = universe.clone();
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        sets.iter().enumerate().map(|(i, s)| (gain(s, &uncovered), Reverse(i))).filter(|&(g, _)| g > 0).collect();
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let Some((_, Reverse(i))) = heap.pop() else {
            let e = uncovered.minimum().unwrap();
            return Err(Error::Precondition(format!("element {e} lies in no set")));
        };
        let g = gain(&sets[i], &uncovered);
        if g == 0 {
            continue;
        }
        if heap.peek().is_some_and(|&top| (g, Reverse(i)) < top) {
            heap.push((g, Reverse(i)));
            continue;
        }
        chosen.push(i);
        uncovered.difference_with(&sets[i]);
    }
    Ok(chosen)
}

/// `⌈|uncovered| / max gain⌉`.
fn volume_bound(sets: &[FixedBitSet], uncovered: &FixedBitSet) -> usize {
    let left = uncovered.count_ones(..);
    let best = sets.iter().map(|s| gain(s, uncovered)).max().unwrap_or(0);
    if left == 0 {
        0
    } else if best == 0 {
        usize::MAX
    } else {
        left.div_ceil(best)
    }
}

struct Search<'a> {
    sets: &'a [FixedBitSet],
    containing: &'a [FixedBitSet],
    /// Union of all sets containing `e`: the elements co-coverable with `e`.
    reach: &'a [FixedBitSet],
    /// Elements by increasing number of covering sets.
    order: &'a [usize],
    best: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
    aborted: bool,
}

impl Search<'_> {
    fn packing_bound(&self, uncovered: &FixedBitSet) -> usize {
        let mut blocked = FixedBitSet::with_capacity(uncovered.len());
        let mut count = 0;
        for &e in self.order {
            if uncovered.contains(e) && !blocked.contains(e) {
                count += 1;
                blocked.union_with(&self.reach[e]);
            }
        }
        count
    }

    fn lower_bound(&self, uncovered: &FixedBitSet) -> usize {
        volume_bound(self.sets, uncovered).max(self.packing_bound(uncovered))
    }

    fn solve(&mut self, uncovered: FixedBitSet, chosen: &mut Vec<usize>) {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            self.aborted = true;
            return;
        }
        if uncovered.is_clear() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + self.lower_bound(&uncovered) >= self.best.len() {
            return;
        }
        let e = self.order.iter().copied().find(|&e| uncovered.contains(e)).expect("uncovered element");
        let mut options: Vec<(usize, usize)> =
            self.containing[e].ones().map(|s| (gain(&self.sets[s], &uncovered), s)).collect();
        options.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, s) in options {
            chosen.push(s);
            let mut next = uncovered.clone();
            next.difference_with(&self.sets[s]);
            self.solve(next, chosen);
            chosen.pop();
            if self.aborted {
                return;
            }
        }
    }
}

/// Minimum number of `sets` covering `universe`.
///
/// `exact = false` returns the greedy cover with the volume lower bound.
/// Otherwise duplicate and dominated sets are dropped and the branch and
/// bound runs until closed or until `budget` nodes have been expanded, in
/// which case the best cover found so far is returned.
pub(crate) fn min_cover(
    sets: &[FixedBitSet],
    universe: &FixedBitSet,
    exact: bool,
    budget: Option<u64>,
) -> Result<CoverOutcome> {
    let greedy_cover = greedy(sets, universe)?;
    if !exact {
        let lower = volume_bound(sets, universe);
        return Ok(CoverOutcome { exact: lower == greedy_cover.len(), chosen: sorted(greedy_cover), lower, nodes: 0 });
    }

    let n = universe.len();
    let restricted: Vec<FixedBitSet> = sets
        .iter()
        .map(|s| {
            let mut r = s.clone();
            r.intersect_with(universe);
            r
        })
        .collect();
    let kept: Vec<usize> = (0..sets.len())
        .filter(|&s| {
            !restricted[s].is_clear()
                && !(0..sets.len()).any(|t| {
                    t != s && restricted[s].is_subset(&restricted[t]) && (restricted[s] != restricted[t] || t < s)
                })
        })
        .collect();
    let reduced: Vec<FixedBitSet> = kept.iter().map(|&s| restricted[s].clone()).collect();

    let mut containing = vec![FixedBitSet::with_capacity(reduced.len()); n];
    for (i, s) in reduced.iter().enumerate() {
        for e in s.ones() {
            containing[e].insert(i);
        }
    }
    let mut reach = vec![FixedBitSet::with_capacity(n); n];
    for e in universe.ones() {
        for s in containing[e].ones() {
            reach[e].union_with(&reduced[s]);
        }
    }
    let mut order: Vec<usize> = universe.ones().collect();
    order.sort_by_key(|&e| (containing[e].count_ones(..), e));

    let mut search = Search {
        sets: &reduced,
        containing: &containing,
        reach: &reach,
        order: &order,
        best: Vec::new(),
        nodes: 0,
        budget,
        aborted: false,
    };
    let root_lower = search.lower_bound(universe);
    // Placeholder of the greedy length: only strictly smaller covers replace it.
    let incumbent_len = greedy_cover.len();
    search.best = vec![usize::MAX; incumbent_len];
    if root_lower < incumbent_len {
        search.solve(universe.clone(), &mut Vec::new());
    }
    let improved = search.best.len() < incumbent_len;
    let chosen = if improved { sorted(search.best.iter().map(|&i| kept[i]).collect()) } else { sorted(greedy_cover) };
    let exact = !search.aborted;
    Ok(CoverOutcome { lower: if exact { chosen.len() } else { root_lower }, exact, chosen, nodes: search.nodes })
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, pts: &[usize]) -> FixedBitSet {
        crate::uniform::bitset_from(n, pts.iter().copied())
    }

    fn full(n: usize) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        s.insert_range(..);
        s
    }

    fn brute_force(sets: &[FixedBitSet], universe: &FixedBitSet) -> usize {
        let m = sets.len();
        (0u32..1 << m)
            .filter(|mask| {
                let mut u = FixedBitSet::with_capacity(universe.len());
                for (i, s) in sets.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        u.union_with(s);
                    }
                }
                universe.is_subset(&u)
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn greedy_is_suboptimal_where_expected() {
        // classic instance: greedy takes the big middle set first
        let n = 6;
        let sets = vec![set(n, &[0, 1, 2]), set(n, &[3, 4, 5]), set(n, &[1, 2, 3, 4])];
        let g = greedy(&sets, &full(n)).unwrap();
        assert_eq!(g, vec![2, 0, 1]);
        let out = min_cover(&sets, &full(n), true, None).unwrap();
        assert!(out.exact);
        assert_eq!(out.chosen, vec![0, 1]);
    }

    #[test]
    fn pseudo_random_covers_match_brute_force() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..60 {
            let n = 10;
            let m = 9;
            let mut sets: Vec<FixedBitSet> = (0..m)
                .map(|_| {
                    let pts: Vec<usize> = (0..n).filter(|_| next() % 4 == 0).collect();
                    set(n, &pts)
                })
                .collect();
            for e in 0..n {
                let s = (next() % m as u64) as usize;
                sets[s].insert(e);
            }
            let out = min_cover(&sets, &full(n), true, None).unwrap();
            assert!(out.exact);
            assert_eq!(out.chosen.len(), brute_force(&sets, &full(n)));
            let mut u = FixedBitSet::with_capacity(n);
            for &s in &out.chosen {
                u.union_with(&sets[s]);
            }
            assert!(full(n).is_subset(&u));
            assert!(greedy(&sets, &full(n)).unwrap().len() >= out.chosen.len());
        }
    }

    #[test]
    fn uncoverable_element_is_an_error() {
        let sets = vec![set(3, &[0, 1])];
        assert!(min_cover(&sets, &full(3), true, None).is_err());
    }

    #[test]
    fn partial_universe() {
        let sets = vec![set(4, &[0, 1]), set(4, &[2, 3]), set(4, &[1, 2])];
        let out = min_cover(&sets, &set(4, &[1, 2]), true, None).unwrap();
        assert_eq!(out.chosen, vec![2]);
    }
}
