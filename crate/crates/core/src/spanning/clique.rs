//! Maximum sets of pairwise unrelated points.
//!
//! A set is separated for a relation `B` when no two distinct members are
//! `B`-related, i.e. it is a clique of the complement graph. Exact search is
//! a colouring-bounded branch and bound in the style of Tomita's MCQ; the
//! colour classes are `B`-cliques, so the colouring doubles as the clique
//! cover upper bound.

use fixedbitset::FixedBitSet;

pub(crate) struct CliqueOutcome {
    pub set: Vec<usize>,
    pub upper: usize,
    pub exact: bool,
    pub nodes: u64,
}

/// Lowest-index-first maximal separated subset of `candidates`.
pub(crate) fn greedy(rows: &[FixedBitSet], candidates: &FixedBitSet) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut blocked = FixedBitSet::with_capacity(rows.len());
    for x in candidates.ones() {
        if !blocked.contains(x) {
            chosen.push(x);
            blocked.union_with(&rows[x]);
        }
    }
    chosen
}

/// Number of classes in a greedy partition of `candidates` into `B`-cliques.
/// No separated set can hold two points of one class.
pub(crate) fn clique_cover_bound(rows: &[FixedBitSet], candidates: &FixedBitSet) -> usize {
    let mut uncovered = candidates.clone();
    let mut classes = 0;
    while let Some(v) = uncovered.minimum() {
        classes += 1;
        let mut pool = uncovered.clone();
        pool.intersect_with(&rows[v]);
        pool.set(v, false);
        uncovered.set(v, false);
        while let Some(w) = pool.minimum() {
            uncovered.set(w, false);
            pool.intersect_with(&rows[w]);
            pool.set(w, false);
        }
    }
    classes
}

struct Search<'a> {
    /// `B` restricted to the candidates, in search order.
    rows: &'a [FixedBitSet],
    best: Vec<usize>,
    nodes: u64,
    budget: Option<u64>,
    aborted: bool,
}

impl Search<'_> {
    /// Colour classes of `p`: vertices in colouring order with their colour.
    fn colour(&self, p: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.count_ones(..));
        let mut colours = Vec::with_capacity(order.capacity());
        let mut uncoloured = p.clone();
        let mut colour = 0;
        while !uncoloured.is_clear() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.minimum() {
                q.set(v, false);
                q.intersect_with(&self.rows[v]);
                uncoloured.set(v, false);
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn expand(&mut self, current: &mut Vec<usize>, mut p: FixedBitSet) {
        self.nodes += 1;
        if let Some(b) = self.budget {
            if self.nodes > b {
                self.aborted = true;
                return;
            }
        }
        let (order, colours) = self.colour(&p);
        for i in (0..order.len()).rev() {
            if current.len() + colours[i] <= self.best.len() || self.aborted {
                return;
            }
            let v = order[i];
            current.push(v);
            let mut next = p.clone();
            next.difference_with(&self.rows[v]);
            if next.is_clear() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            p.set(v, false);
        }
    }
}

/// Maximum separated subset of `candidates` under the relation `rows`.
///
/// With `exact = false` only the greedy set and the clique cover bound are
/// computed. An exhausted `budget` returns the best set found so far.
pub(crate) fn max_separated(
    rows: &[FixedBitSet],
    candidates: &FixedBitSet,
    exact: bool,
    budget: Option<u64>,
) -> CliqueOutcome {
    let lower = greedy(rows, candidates);
    let upper = clique_cover_bound(rows, candidates);
    if !exact || lower.len() == upper {
        return CliqueOutcome { exact: lower.len() == upper, set: lower, upper, nodes: 0 };
    }

    // Search order: most separated-graph neighbours first, ties by index.
    let verts: Vec<usize> = candidates.ones().collect();
    let m = verts.len();
    let mut degree: Vec<(usize, usize)> = verts
        .iter()
        .map(|&v| {
            let mut related = rows[v].clone();
            related.intersect_with(candidates);
            (m - related.count_ones(..), v)
        })
        .collect();
    degree.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let order: Vec<usize> = degree.into_iter().map(|(_, v)| v).collect();
    let mut pos = vec![usize::MAX; rows.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let local: Vec<FixedBitSet> = order
        .iter()
        .map(|&v| {
            let mut row = FixedBitSet::with_capacity(m);
            for y in rows[v].ones() {
                if pos[y] != usize::MAX {
                    row.insert(pos[y]);
                }
            }
            row
        })
        .collect();

    let mut search =
        Search { rows: &local, best: lower.iter().map(|&v| pos[v]).collect(), nodes: 0, budget, aborted: false };
    let mut all = FixedBitSet::with_capacity(m);
    all.insert_range(..);
    search.expand(&mut Vec::new(), all);

    let mut set: Vec<usize> = search.best.iter().map(|&i| order[i]).collect();
    set.sort_unstable();
    let exact = !search.aborted;
    CliqueOutcome { upper: if exact { set.len() } else { upper }, exact, set, nodes: search.nodes }
}
