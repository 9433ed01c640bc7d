use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::Carrier;
use crate::{par, Error, Result};

/// A dense boolean relation on a finite carrier, stored row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    carrier: Arc<Carrier>,
    rows: Vec<FixedBitSet>,
}

fn same_carrier(a: &Arc<Carrier>, b: &Arc<Carrier>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Relation {
    pub fn empty(carrier: Arc<Carrier>) -> Self {
        let n = carrier.size();
        Relation { carrier, rows: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn identity(carrier: Arc<Carrier>) -> Self {
        let mut rel = Relation::empty(carrier);
        for (x, row) in rel.rows.iter_mut().enumerate() {
            row.insert(x);
        }
        rel
    }

    pub fn full(carrier: Arc<Carrier>) -> Self {
        let n = carrier.size();
        let mut row = FixedBitSet::with_capacity(n);
        row.insert_range(..);
        Relation { carrier, rows: vec![row; n] }
    }

    /// Builds the relation `{(x, y) : member(x, y)}`, one row per task.
    pub fn from_fn<F>(carrier: Arc<Carrier>, member: F) -> Self
    where
        F: Fn(usize, usize) -> bool + Sync + Send,
    {
        let n = carrier.size();
        let rows = par::map_range(n, |x| {
            let mut row = FixedBitSet::with_capacity(n);
            for y in 0..n {
                if member(x, y) {
                    row.insert(y);
                }
            }
            row
        });
        Relation { carrier, rows }
    }

    pub fn from_rows(carrier: Arc<Carrier>, rows: Vec<FixedBitSet>) -> Result<Self> {
        let n = carrier.size();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidRelation(format!("relation rows do not match a carrier of {n} points")));
        }
        Ok(Relation { carrier, rows })
    }

    pub fn from_pairs(carrier: Arc<Carrier>, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut rel = Relation::empty(carrier);
        for (x, y) in pairs {
            rel.carrier.check_point(x)?;
            rel.carrier.check_point(y)?;
            rel.rows[x].insert(y);
        }
        Ok(rel)
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, x: usize) -> &FixedBitSet {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[FixedBitSet] {
        &self.rows
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    pub(crate) fn check_same_carrier(&self, other: &Relation) -> Result<()> {
        if same_carrier(&self.carrier, &other.carrier) {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!(
                "relations live on carriers of {} and {} points",
                self.size(),
                other.size()
            )))
        }
    }

    pub fn transpose(&self) -> Relation {
        let mut out = Relation::empty(self.carrier.clone());
        for (x, row) in self.rows.iter().enumerate() {
            for y in row.ones() {
                out.rows[y].insert(x);
            }
        }
        out
    }

    /// `self ∘ other = {(x, y) : ∃z (x, z) ∈ self, (z, y) ∈ other}`.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        self.check_same_carrier(other)?;
        let n = self.size();
        let rows = par::map_range(n, |x| {
            let mut row = FixedBitSet::with_capacity(n);
            for z in self.rows[x].ones() {
                row.union_with(&other.rows[z]);
            }
            row
        });
        Ok(Relation { carrier: self.carrier.clone(), rows })
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation> {
        self.check_same_carrier(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.intersect_with(b);
                r
            })
            .collect();
        Ok(Relation { carrier: self.carrier.clone(), rows })
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.check_same_carrier(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.union_with(b);
                r
            })
            .collect();
        Ok(Relation { carrier: self.carrier.clone(), rows })
    }

    /// Inclusion; relations on different carriers are never included.
    pub fn is_subset(&self, other: &Relation) -> bool {
        self.check_same_carrier(other).is_ok() && self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    /// First point `x` with `(x, x)` missing.
    pub fn missing_diagonal(&self) -> Option<usize> {
        (0..self.size()).find(|&x| !self.rows[x].contains(x))
    }

    /// First pair `(x, y)` in the relation whose transpose is not.
    pub fn asymmetric_pair(&self) -> Option<(usize, usize)> {
        for (x, row) in self.rows.iter().enumerate() {
            for y in row.ones() {
                if !self.rows[y].contains(x) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    pub fn is_reflexive(&self) -> bool {
        self.missing_diagonal().is_none()
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetric_pair().is_none()
    }

    /// One-step pullback `{(x, y) : (g(x), g(y)) ∈ self}` along the map table `g`.
    pub fn pullback(&self, g: &[usize]) -> Relation {
        let n = self.size();
        let pre = preimages(g);
        let rows = par::map_range(n, |x| {
            let mut row = FixedBitSet::with_capacity(n);
            for t in self.rows[g[x]].ones() {
                for &y in &pre[t] {
                    row.insert(y as usize);
                }
            }
            row
        });
        Relation { carrier: self.carrier.clone(), rows }
    }
}

/// Preimage lists of a map table.
pub(crate) fn preimages(g: &[usize]) -> Vec<Vec<u32>> {
    let mut pre = vec![Vec::new(); g.len()];
    for (x, &gx) in g.iter().enumerate() {
        pre[gx].push(x as u32);
    }
    pre
}

/// The map table of `f^i`.
pub fn iterate_map(f: &[usize], i: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..f.len()).collect();
    for _ in 0..i {
        for v in out.iter_mut() {
            *v = f[*v];
        }
    }
    out
}

/// A reflexive, symmetric relation: the finite stand-in for a member of a
/// uniformity. Both properties are enforced at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entourage {
    rel: Relation,
    name: Option<String>,
}

impl Entourage {
    /// Wraps a relation that is already reflexive and symmetric.
    pub fn new(rel: Relation) -> Result<Self> {
        if let Some(x) = rel.missing_diagonal() {
            return Err(Error::InvalidRelation(format!("entourage misses the diagonal pair ({x}, {x})")));
        }
        if let Some((x, y)) = rel.asymmetric_pair() {
            return Err(Error::InvalidRelation(format!("entourage contains ({x}, {y}) but not ({y}, {x})")));
        }
        Ok(Entourage { rel, name: None })
    }

    /// `rel ∪ relᵀ ∪ Δ`.
    pub fn symmetrize(rel: &Relation) -> Self {
        let mut sym = rel.union(&rel.transpose()).expect("same carrier");
        for (x, row) in sym.rows.iter_mut().enumerate() {
            row.insert(x);
        }
        Entourage::trusted(sym)
    }

    pub(crate) fn trusted(rel: Relation) -> Self {
        debug_assert!(rel.is_reflexive() && rel.is_symmetric());
        Entourage { rel, name: None }
    }

    pub fn delta(carrier: Arc<Carrier>) -> Self {
        Entourage::trusted(Relation::identity(carrier)).with_name("delta")
    }

    pub fn full(carrier: Arc<Carrier>) -> Self {
        Entourage::trusted(Relation::full(carrier)).with_name("full")
    }

    /// Symmetrized, diagonal-augmented relation `{(x, y) : member(x, y)}`.
    pub fn from_fn<F>(carrier: Arc<Carrier>, member: F) -> Self
    where
        F: Fn(usize, usize) -> bool + Sync + Send,
    {
        Entourage::symmetrize(&Relation::from_fn(carrier, member))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        self.name = if name.is_empty() { None } else { Some(name) };
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// The name, or `"unnamed"`.
    pub fn tag(&self) -> &str {
        self.name.as_deref().unwrap_or("unnamed")
    }

    pub fn relation(&self) -> &Relation {
        &self.rel
    }

    pub fn into_relation(self) -> Relation {
        self.rel
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        self.rel.carrier()
    }

    pub fn size(&self) -> usize {
        self.rel.size()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rel.contains(x, y)
    }

    pub fn row(&self, x: usize) -> &FixedBitSet {
        self.rel.row(x)
    }

    pub fn pair_count(&self) -> usize {
        self.rel.pair_count()
    }

    /// The cross section `E[x] = {y : (x, y) ∈ E}`.
    pub fn cross_section(&self, x: usize) -> Result<Vec<usize>> {
        self.carrier().check_point(x)?;
        Ok(self.rel.row(x).ones().collect())
    }

    pub fn is_delta(&self) -> bool {
        self.rel.rows.iter().all(|r| r.count_ones(..) == 1)
    }

    pub fn is_full(&self) -> bool {
        let n = self.size();
        self.rel.rows.iter().all(|r| r.count_ones(..) == n)
    }

    pub fn is_subset(&self, other: &Entourage) -> bool {
        self.rel.is_subset(&other.rel)
    }

    pub fn intersection(&self, other: &Entourage) -> Result<Entourage> {
        Ok(Entourage::trusted(self.rel.intersection(&other.rel)?))
    }

    /// `self ∘ other`. The result need not be symmetric unless `other == self`.
    pub fn compose(&self, other: &Entourage) -> Result<Relation> {
        self.rel.compose(&other.rel)
    }

    /// `E^k = E ∘ ⋯ ∘ E` (`k ≥ 1`), again an entourage.
    pub fn power(&self, k: usize) -> Entourage {
        assert!(k >= 1, "power needs k >= 1");
        let mut acc = self.rel.clone();
        for _ in 1..k {
            acc = acc.compose(&self.rel).expect("same carrier");
        }
        Entourage::trusted(acc)
    }

    pub fn transpose(&self) -> Entourage {
        self.clone()
    }
}

/// `F^{-i}(E) = {(x, y) : (f^i(x), f^i(y)) ∈ E}` for the map table `f`.
pub fn dynamic_pullback(e: &Entourage, f: &[usize], i: usize) -> Entourage {
    if i == 0 {
        return e.clone();
    }
    let fi = iterate_map(f, i);
    let name = e.name().map(|s| format!("{s}@-{i}")).unwrap_or_default();
    Entourage::trusted(e.rel.pullback(&fi)).with_name(name)
}

/// The Bowen relation `⋂_{i<n} F^{-i}(E)`; `n ≥ 1`.
pub fn bowen_relation(e: &Entourage, f: &[usize], n: usize) -> Entourage {
    assert!(n >= 1, "bowen relation needs n >= 1");
    let size = e.size();
    let mut tables: Vec<Vec<usize>> = Vec::with_capacity(n);
    tables.push((0..size).collect());
    for i in 1..n {
        let next = tables[i - 1].iter().map(|&v| f[v]).collect();
        tables.push(next);
    }
    let rows = par::map_range(size, |x| {
        let mut row = e.row(x).clone();
        for fi in &tables[1..] {
            let target = e.row(fi[x]);
            let drop: Vec<usize> = row.ones().filter(|&y| !target.contains(fi[y])).collect();
            for y in drop {
                row.set(y, false);
            }
        }
        row
    });
    let name = e.name().map(|s| format!("{s}#n{n}")).unwrap_or_default();
    Entourage::trusted(Relation { carrier: e.carrier().clone(), rows }).with_name(name)
}

/// The Bowen relations of `E` for `n = 1, 2, …`, each refined from the last.
pub struct BowenSequence<'a> {
    e: &'a Entourage,
    f: &'a [usize],
    iterate: Vec<usize>,
    current: Option<Entourage>,
}

impl<'a> BowenSequence<'a> {
    pub fn new(e: &'a Entourage, f: &'a [usize]) -> Self {
        BowenSequence { e, f, iterate: (0..e.size()).collect(), current: None }
    }
}

impl Iterator for BowenSequence<'_> {
    type Item = Entourage;

    fn next(&mut self) -> Option<Entourage> {
        let next = match self.current.take() {
            None => self.e.clone(),
            Some(prev) => {
                let fi = &self.iterate;
                let e = self.e;
                let rows = par::map_range(prev.size(), |x| {
                    let mut row = prev.row(x).clone();
                    let target = e.row(fi[x]);
                    let drop: Vec<usize> = row.ones().filter(|&y| !target.contains(fi[y])).collect();
                    for y in drop {
                        row.set(y, false);
                    }
                    row
                });
                Entourage::trusted(Relation { carrier: prev.carrier().clone(), rows })
            }
        };
        for v in self.iterate.iter_mut() {
            *v = self.f[*v];
        }
        self.current = Some(next.clone());
        Some(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize, r: usize) -> Entourage {
        let c = Arc::new(Carrier::new(n).unwrap());
        Entourage::from_fn(c, move |x, y| x.abs_diff(y) <= r)
    }

    #[test]
    fn compose_of_unit_band_is_band_two() {
        // Witness enumeration over all 25 pairs: |x-y| <= 2 iff some z is within 1 of both.
        let e = path(5, 1);
        let sq = e.compose(&e).unwrap();
        for x in 0..5usize {
            for y in 0..5 {
                let witness = (0..5).any(|z: usize| x.abs_diff(z) <= 1 && z.abs_diff(y) <= 1);
                assert_eq!(sq.contains(x, y), witness);
                assert_eq!(sq.contains(x, y), x.abs_diff(y) <= 2);
            }
        }
    }

    #[test]
    fn delta_is_identity_for_composition() {
        let e = path(5, 1);
        let d = Entourage::delta(e.carrier().clone());
        assert_eq!(d.compose(&e).unwrap(), *e.relation());
        assert_eq!(e.compose(&d).unwrap(), *e.relation());
        assert!(e.relation().is_subset(&e.compose(&e).unwrap()));
    }

    #[test]
    fn transpose_swaps_and_distributes() {
        let c = Arc::new(Carrier::new(4).unwrap());
        let mut pairs: Vec<_> = (0..4).map(|x| (x, x)).collect();
        pairs.push((0, 1));
        let rel = Relation::from_pairs(c.clone(), pairs.clone()).unwrap();
        let mut expected: Vec<_> = (0..4).map(|x| (x, x)).collect();
        expected.push((1, 0));
        assert_eq!(rel.transpose(), Relation::from_pairs(c.clone(), expected).unwrap());
        assert_eq!(rel.transpose().transpose(), rel);
        let other = Relation::from_pairs(c, vec![(0, 1), (2, 3), (1, 0)]).unwrap();
        assert_eq!(
            rel.intersection(&other).unwrap().transpose(),
            rel.transpose().intersection(&other.transpose()).unwrap()
        );
        assert!(Entourage::new(rel).is_err());
    }

    #[test]
    fn cross_sections() {
        let e = path(5, 1);
        assert_eq!(e.cross_section(0).unwrap(), vec![0, 1]);
        assert!(e.cross_section(9).is_err());
        let d = Entourage::delta(e.carrier().clone());
        assert_eq!(d.cross_section(3).unwrap(), vec![3]);
    }

    #[test]
    fn pullback_trivial_cases() {
        let e = path(6, 1);
        let f = vec![1, 2, 3, 4, 5, 0];
        assert_eq!(dynamic_pullback(&e, &f, 0), e);
        let id: Vec<usize> = (0..6).collect();
        assert_eq!(dynamic_pullback(&e, &id, 3).relation(), e.relation());
        assert_eq!(bowen_relation(&e, &id, 4).relation(), e.relation());
        assert_eq!(bowen_relation(&e, &f, 1).relation(), e.relation());
    }

    #[test]
    fn bowen_sequence_matches_direct_computation() {
        let f: Vec<usize> = (0..9).map(|x| (x * 4 + 1) % 9).collect();
        let e = path(9, 2);
        for (k, b) in BowenSequence::new(&e, &f).take(5).enumerate() {
            assert_eq!(b.relation(), bowen_relation(&e, &f, k + 1).relation());
        }
    }

    #[test]
    fn carrier_mismatch_is_reported() {
        let a = path(4, 1);
        let b = path(5, 1);
        assert!(matches!(a.compose(&b), Err(Error::DomainMismatch(_))));
        assert!(!a.is_subset(&b));
    }
}
