//! Open covers on finite carriers: joins, preimages, refinement, minimal
//! subcovers, cover entropy `h(f, α)` and uniform covering entropy `h_uc`.
//!
//! Every subset of a finite carrier is open and closed, so closures are the
//! identity throughout.

use std::fmt::Write as _;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::spanning::{setcover, EntropyEstimate, EstimateOptions, ExtremalSetResult, Mode, SetKind, SolverConfig};
use crate::systems::FiniteSystem;
use crate::uniform::text::{bit_row, header_field, parse_bit_row};
use crate::uniform::{cmp_bitmask, Carrier, Entourage, UniformityBase};
use crate::{par, Error, Result};

/// A finite family of nonempty subsets whose union is the carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    carrier: Arc<Carrier>,
    members: Vec<FixedBitSet>,
    name: Option<String>,
}

impl Cover {
    pub fn new(carrier: Arc<Carrier>, members: Vec<FixedBitSet>) -> Result<Self> {
        let n = carrier.size();
        let mut union = FixedBitSet::with_capacity(n);
        for (i, m) in members.iter().enumerate() {
            if m.len() != n {
                return Err(Error::DomainMismatch(format!(
                    "member {i} has length {}, carrier has {n} points",
                    m.len()
                )));
            }
            if m.is_clear() {
                return Err(Error::Precondition(format!("member {i} is empty")));
            }
            union.union_with(m);
        }
        if let Some(x) = (0..n).find(|&x| !union.contains(x)) {
            return Err(Error::Precondition(format!("point {x} is not covered")));
        }
        Ok(Cover { carrier, members, name: None })
    }

    /// Builds a cover from point lists.
    pub fn from_sets(carrier: Arc<Carrier>, sets: &[Vec<usize>]) -> Result<Self> {
        let n = carrier.size();
        let mut members = Vec::with_capacity(sets.len());
        for s in sets {
            for &x in s {
                carrier.check_point(x)?;
            }
            members.push(crate::uniform::bitset_from(n, s.iter().copied()));
        }
        Cover::new(carrier, members)
    }

    /// `{X}`.
    pub fn trivial(carrier: Arc<Carrier>) -> Self {
        let mut all = FixedBitSet::with_capacity(carrier.size());
        all.insert_range(..);
        Cover { carrier, members: vec![all], name: Some("X".into()) }
    }

    /// All singletons.
    pub fn singletons(carrier: Arc<Carrier>) -> Self {
        let n = carrier.size();
        let members = (0..n).map(|x| crate::uniform::bitset_from(n, [x])).collect();
        Cover { carrier, members, name: Some("points".into()) }
    }

    /// The partition into classes of equal `key`, ordered by first point.
    pub fn partition_by<K: PartialEq>(carrier: Arc<Carrier>, key: impl Fn(usize) -> K) -> Self {
        let n = carrier.size();
        let mut keys: Vec<K> = Vec::new();
        let mut members: Vec<FixedBitSet> = Vec::new();
        for x in 0..n {
            let k = key(x);
            match keys.iter().position(|q| *q == k) {
                Some(i) => members[i].insert(x),
                None => {
                    keys.push(k);
                    members.push(crate::uniform::bitset_from(n, [x]));
                }
            }
        }
        Cover { carrier, members, name: None }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn tag(&self) -> &str {
        self.name().unwrap_or("cover")
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.size()
    }

    pub fn members(&self) -> &[FixedBitSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of members that repeat an earlier member.
    pub fn duplicates(&self) -> usize {
        let mut sorted = self.members.clone();
        sorted.sort_by(cmp_bitmask);
        sorted.windows(2).filter(|w| w[0] == w[1]).count()
    }

    /// Distinct members in bitmask order, each with its multiplicity.
    pub fn dedup_with_counts(&self) -> (Cover, Vec<usize>) {
        let mut sorted = self.members.clone();
        sorted.sort_by(cmp_bitmask);
        let mut members: Vec<FixedBitSet> = Vec::with_capacity(sorted.len());
        let mut counts = Vec::with_capacity(sorted.len());
        for m in sorted {
            if members.last() == Some(&m) {
                *counts.last_mut().unwrap() += 1;
            } else {
                members.push(m);
                counts.push(1);
            }
        }
        let cover = Cover { carrier: self.carrier.clone(), members, name: self.name.clone() };
        (cover, counts)
    }

    pub fn dedup(&self) -> Cover {
        self.dedup_with_counts().0
    }

    /// Every member is disjoint from the others.
    pub fn is_partition(&self) -> bool {
        let total: usize = self.members.iter().map(|m| m.count_ones(..)).sum();
        total == self.size()
    }

    fn check_same_carrier(&self, other: &Cover) -> Result<()> {
        if Arc::ptr_eq(&self.carrier, &other.carrier) || self.carrier == other.carrier {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!("covers on {} and {} points", self.size(), other.size())))
        }
    }

    /// `α ∨ β`: the distinct nonempty pairwise intersections, in bitmask order.
    pub fn join(&self, other: &Cover) -> Result<Cover> {
        self.check_same_carrier(other)?;
        let mut members: Vec<FixedBitSet> = par::map_slice(&self.members, |a| {
            other
                .members
                .iter()
                .filter_map(|b| {
                    let mut c = a.clone();
                    c.intersect_with(b);
                    (!c.is_clear()).then_some(c)
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .flatten()
        .collect();
        members.sort_by(cmp_bitmask);
        members.dedup();
        let name = format!("{}v{}", self.tag(), other.tag());
        Ok(Cover { carrier: self.carrier.clone(), members, name: Some(name) })
    }

    /// `f^{-1}(α)`, member by member, with empty preimages dropped.
    pub fn preimage(&self, sys: &FiniteSystem) -> Result<Cover> {
        if sys.size() != self.size() {
            return Err(Error::DomainMismatch(format!("cover on {} points, system on {}", self.size(), sys.size())));
        }
        Ok(self.preimage_under(sys.map()))
    }

    fn preimage_under(&self, f: &[usize]) -> Cover {
        let n = self.size();
        let members = self
            .members
            .iter()
            .filter_map(|m| {
                let pre = crate::uniform::bitset_from(n, (0..n).filter(|&x| m.contains(f[x])));
                (!pre.is_clear()).then_some(pre)
            })
            .collect();
        Cover { carrier: self.carrier.clone(), members, name: Some(format!("f^-1({})", self.tag())) }
    }

    /// `self ≽ a`: every member of `self` lies inside some member of `a`.
    pub fn refines(&self, a: &Cover) -> bool {
        self.members.iter().all(|b| a.members.iter().any(|m| b.is_subset(m)))
    }

    /// Members not strictly contained in another member, deduplicated.
    /// `N` depends only on these.
    fn maximal(&self) -> Cover {
        let d = self.dedup();
        let keep: Vec<bool> = par::map_range(d.members.len(), |i| {
            !d.members.iter().enumerate().any(|(j, m)| j != i && d.members[i].is_subset(m))
        });
        let members = d.members.iter().zip(keep).filter(|&(_, k)| k).map(|(m, _)| m.clone()).collect();
        Cover { members, ..d }
    }

    pub fn to_text(&self) -> String {
        let n = self.size();
        let mut out = String::new();
        writeln!(out, "cover N={n} members={}", self.members.len()).unwrap();
        for m in &self.members {
            out.push_str(&bit_row(m, n));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str, carrier: Option<Arc<Carrier>>) -> Result<Cover> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.first() != Some(&"cover") {
            return Err(Error::Parse { line: 1, msg: "expected `cover` header".into() });
        }
        let int = |key: &str| -> Result<usize> {
            header_field(&fields, key, 1)?
                .parse()
                .map_err(|_| Error::Parse { line: 1, msg: format!("{key} is not an integer") })
        };
        let (n, m) = (int("N")?, int("members")?);
        let carrier = match carrier {
            Some(c) if c.size() == n => c,
            Some(c) => return Err(Error::DomainMismatch(format!("text has N={n}, carrier has {}", c.size()))),
            None => Arc::new(Carrier::new(n)?),
        };
        let members = lines.by_ref().take(m).map(|(i, l)| parse_bit_row(l, n, i + 1)).collect::<Result<Vec<_>>>()?;
        if members.len() != m {
            return Err(Error::Parse {
                line: members.len() + 2,
                msg: format!("expected {m} members, found {}", members.len()),
            });
        }
        Cover::new(carrier, members)
    }
}

/// `C(E) = {E[x] : x ∈ X}`, deduplicated, with how many points share each
/// cross section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformCover {
    pub cover: Cover,
    pub multiplicity: Vec<usize>,
}

pub fn uniform_cover(e: &Entourage) -> UniformCover {
    let raw = Cover { carrier: e.carrier().clone(), members: e.relation().rows().to_vec(), name: None };
    let (cover, multiplicity) = raw.dedup_with_counts();
    UniformCover { cover: cover.with_name(format!("C({})", e.tag())), multiplicity }
}

/// `N(α)` restricted to `within` (default: the carrier), with a witness
/// subfamily given as member indices of `a`.
pub fn min_subcover_within(
    a: &Cover,
    within: Option<&FixedBitSet>,
    mode: Mode,
    cfg: &SolverConfig,
) -> ExtremalSetResult {
    let mut all = FixedBitSet::with_capacity(a.size());
    all.insert_range(..);
    let universe = within.unwrap_or(&all);
    let mode = mode.resolve(a.size(), cfg);
    let budget = (universe.count_ones(..) > cfg.unbudgeted_cover_limit).then_some(cfg.node_budget);
    let out =
        setcover::min_cover(&a.members, universe, mode == Mode::Exact, budget).expect("a cover covers every point");
    ExtremalSetResult {
        kind: SetKind::Cover,
        n: 1,
        scale: a.tag().to_string(),
        cardinality: out.chosen.len(),
        bound_gap: out.chosen.len() - out.lower,
        witness: out.chosen,
        exact: out.exact,
        mode,
        nodes: out.nodes,
    }
}

/// `N(α)`: the minimal cardinality of a subcover.
pub fn min_subcover(a: &Cover, mode: Mode, cfg: &SolverConfig) -> ExtremalSetResult {
    min_subcover_within(a, None, mode, cfg)
}

/// `⋁_{i<n} f^{-i}(α)`, deduplicated; `n ≥ 1`.
pub fn dynamic_join(sys: &FiniteSystem, a: &Cover, n: usize) -> Result<Cover> {
    if n == 0 {
        return Err(Error::OutOfRange("join length n must be at least 1".into()));
    }
    let mut pulled = a.preimage(sys)?;
    let mut joined = a.dedup();
    for _ in 1..n {
        joined = joined.join(&pulled)?;
        pulled = pulled.preimage_under(sys.map());
    }
    Ok(joined.with_name(format!("{}#n{n}", a.tag())))
}

/// Cover entropy with its subadditivity audit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverEntropy {
    pub estimate: EntropyEstimate,
    /// First certified failure of `N_{n+m} ≤ N_n · N_m`.
    pub subadditivity_violation: Option<String>,
}

/// Cells `N(⋁_{i<n} f^{-i}(α))` restricted to `within`, for `n = 1..=n_max`.
///
/// Joins are pruned to their maximal members after every step; this leaves
/// every `N` unchanged because joins and preimages preserve inclusion.
fn join_cells(
    sys: &FiniteSystem,
    a: &Cover,
    within: Option<&FixedBitSet>,
    opts: &EstimateOptions,
) -> Result<Vec<ExtremalSetResult>> {
    if sys.size() != a.size() {
        return Err(Error::DomainMismatch(format!("cover on {} points, system on {}", a.size(), sys.size())));
    }
    let mut cells = Vec::with_capacity(opts.n_max);
    let mut pulled = a.preimage_under(sys.map());
    let mut joined = a.maximal();
    for n in 1..=opts.n_max {
        if n > 1 {
            joined = joined.join(&pulled)?.maximal();
            pulled = pulled.preimage_under(sys.map());
        }
        let mut cell = min_subcover_within(&joined, within, opts.mode, &opts.solver);
        cell.n = n;
        cell.scale = a.tag().to_string();
        cells.push(cell);
    }
    Ok(cells)
}

fn subadditivity(cells: &[ExtremalSetResult]) -> Option<String> {
    let k = cells.len();
    for n in 1..k {
        for m in 1..=k - n {
            let lhs = cells[n + m - 1].lower() as u128;
            let rhs = cells[n - 1].upper() as u128 * cells[m - 1].upper() as u128;
            if lhs > rhs {
                return Some(format!("N_{} = {lhs} > N_{n} * N_{m} = {rhs}", n + m));
            }
        }
    }
    None
}

/// `h(f, α)` fitted over the join sequence.
pub fn cover_entropy(sys: &FiniteSystem, a: &Cover, opts: &EstimateOptions) -> Result<CoverEntropy> {
    cover_entropy_within(sys, a, None, opts)
}

pub fn cover_entropy_within(
    sys: &FiniteSystem,
    a: &Cover,
    within: Option<&FixedBitSet>,
    opts: &EstimateOptions,
) -> Result<CoverEntropy> {
    let cells = join_cells(sys, a, within, opts)?;
    let subadditivity_violation = subadditivity(&cells);
    let estimate = EntropyEstimate::from_cells(SetKind::Cover, vec![cells], opts.window_for(sys.size()))?;
    Ok(CoverEntropy { estimate, subadditivity_violation })
}

/// `h_uc` over a base: `cov(n, E, f)` for each member `E`, supremum over scales.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformCoverEntropy {
    pub estimate: EntropyEstimate,
    /// The compact set the counts are taken on: `X` or a named subset.
    pub compact_set: String,
    pub subadditivity_violation: Option<String>,
}

pub fn uniform_cover_entropy(
    sys: &FiniteSystem,
    base: &UniformityBase,
    opts: &EstimateOptions,
) -> Result<UniformCoverEntropy> {
    uniform_cover_entropy_within(sys, base.members(), None, opts)
}

/// `h_uc` restricted to `within` (counts of `C(E)`-joins covering only
/// `within`), over the given scales.
pub fn uniform_cover_entropy_within(
    sys: &FiniteSystem,
    scales: &[Entourage],
    within: Option<&FixedBitSet>,
    opts: &EstimateOptions,
) -> Result<UniformCoverEntropy> {
    if scales.is_empty() {
        return Err(Error::Precondition("no scales to estimate over".into()));
    }
    let per_scale = par::map_slice(scales, |e| {
        let c = uniform_cover(e).cover;
        join_cells(sys, &c, within, opts).map(|mut cells| {
            for cell in &mut cells {
                cell.scale = e.tag().to_string();
            }
            cells
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let subadditivity_violation = per_scale.iter().find_map(|c| subadditivity(c));
    let estimate = EntropyEstimate::from_cells(SetKind::Cover, per_scale, opts.window_for(sys.size()))?;
    Ok(UniformCoverEntropy {
        estimate,
        compact_set: if within.is_some() { "K".into() } else { "X".into() },
        subadditivity_violation,
    })
}

/// Index in `base` of the largest member `D` whose uniform cover refines `a`.
pub fn lebesgue_entourage(a: &Cover, base: &UniformityBase) -> Result<usize> {
    if a.size() != base.carrier().size() {
        return Err(Error::DomainMismatch("cover and base live on different carriers".into()));
    }
    base.largest_where(|d| (0..d.size()).all(|x| a.members.iter().any(|m| d.row(x).is_subset(m)))).ok_or_else(|| {
        Error::NotFound(format!(
            "no base member has cross sections inside the cover; smallest tested scale `{}`",
            base.get(base.len() - 1).tag()
        ))
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::LN_2;

    use super::*;
    use crate::systems::ZooSpec;

    fn zoo(spec: &str) -> FiniteSystem {
        spec.parse::<ZooSpec>().unwrap().build().unwrap()
    }

    fn carrier(n: usize) -> Arc<Carrier> {
        Arc::new(Carrier::new(n).unwrap())
    }

    /// First-symbol partition of the binary words of length `l`.
    fn first_symbol(sys: &FiniteSystem, l: usize) -> Cover {
        Cover::partition_by(sys.carrier().clone(), |w| w >> (l - 1))
    }

    fn brute_force_n(a: &Cover) -> usize {
        let m = a.len();
        let n = a.size();
        (1u32..1 << m)
            .filter(|mask| (0..n).all(|x| (0..m).any(|i| mask >> i & 1 == 1 && a.members()[i].contains(x))))
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn join_of_crossing_partitions_is_singletons() {
        let c = carrier(4);
        let a = Cover::from_sets(c.clone(), &[vec![0, 1], vec![2, 3]]).unwrap();
        let b = Cover::from_sets(c.clone(), &[vec![0, 2], vec![1, 3]]).unwrap();
        let j = a.join(&b).unwrap();
        assert_eq!(j.len(), 4);
        assert!(j.members().iter().all(|m| m.count_ones(..) == 1));
        assert!(j.refines(&a) && j.refines(&b));
        assert_eq!(a.join(&Cover::trivial(c.clone())).unwrap().members(), a.dedup().members());
        let aa = a.join(&a).unwrap();
        assert!(aa.refines(&a));
        let cfg = SolverConfig::default();
        assert_eq!(min_subcover(&aa, Mode::Exact, &cfg).cardinality, 2);
    }

    #[test]
    fn refinement_basics() {
        let c = carrier(5);
        let a = Cover::from_sets(c.clone(), &[vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        assert!(Cover::singletons(c.clone()).refines(&a));
        assert!(!Cover::trivial(c.clone()).refines(&a));
        let with_x = Cover::from_sets(c.clone(), &[vec![0, 1, 2, 3, 4], vec![0]]).unwrap();
        assert!(Cover::trivial(c.clone()).refines(&with_x));
    }

    #[test]
    fn invalid_covers_rejected() {
        let c = carrier(3);
        assert!(Cover::from_sets(c.clone(), &[vec![0, 1]]).is_err());
        assert!(Cover::from_sets(c.clone(), &[vec![0, 1, 2], vec![]]).is_err());
        assert!(Cover::from_sets(c.clone(), &[vec![0, 1, 7]]).is_err());
    }

    #[test]
    fn preimages() {
        let sys = zoo("full_shift 2 4");
        let a = first_symbol(&sys, 4);
        let pre = a.preimage(&sys).unwrap();
        // f^{-1} of the coordinate-0 cylinders are the coordinate-1 cylinders
        for m in pre.members() {
            let bits: Vec<usize> = m.ones().map(|w| (w >> 2) & 1).collect();
            assert!(bits.iter().all(|&b| b == bits[0]));
            assert_eq!(m.count_ones(..), 8);
        }
        let id = FiniteSystem::identity(4).unwrap();
        let b = Cover::from_sets(id.carrier().clone(), &[vec![0, 1], vec![1, 2, 3]]).unwrap();
        assert_eq!(b.preimage(&id).unwrap().members(), b.members());
        let constant = FiniteSystem::new("c", id.carrier().clone(), vec![2; 4], None).unwrap();
        let p = b.preimage(&constant).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.members()[0].count_ones(..), 4);
    }

    #[test]
    fn subcover_against_brute_force() {
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let cfg = SolverConfig::default();
        for _ in 0..30 {
            let n = 16;
            let c = carrier(n);
            let mut sets: Vec<Vec<usize>> = (0..10)
                .map(|_| (0..n).filter(|_| next() % 3 == 0).collect::<Vec<_>>())
                .filter(|s| !s.is_empty())
                .collect();
            sets.push((0..n).filter(|x| x % 2 == 0).collect());
            sets.push((0..n).filter(|x| x % 2 == 1).collect());
            let a = Cover::from_sets(c, &sets).unwrap();
            let r = min_subcover(&a, Mode::Exact, &cfg);
            assert!(r.exact);
            assert_eq!(r.cardinality, brute_force_n(&a));
            let mut u = FixedBitSet::with_capacity(n);
            for &i in &r.witness {
                u.union_with(&a.members()[i]);
            }
            assert_eq!(u.count_ones(..), n);
            assert!(
                a.preimage(&zoo("doubling 16")).map(|p| min_subcover(&p, Mode::Exact, &cfg).cardinality).unwrap()
                    <= r.cardinality
            );
        }
    }

    #[test]
    fn trivial_and_partition_counts() {
        let cfg = SolverConfig::default();
        let c = carrier(6);
        let with_x = Cover::from_sets(c.clone(), &[vec![0, 1], (0..6).collect(), vec![4]]).unwrap();
        assert_eq!(min_subcover(&with_x, Mode::Exact, &cfg).cardinality, 1);
        let part = Cover::partition_by(c, |x| x % 3);
        assert!(part.is_partition());
        assert_eq!(min_subcover(&part, Mode::Exact, &cfg).cardinality, 3);
    }

    #[test]
    fn full_shift_cover_entropy() {
        let sys = zoo("full_shift 2 8");
        let a = first_symbol(&sys, 8);
        let h = cover_entropy(&sys, &a, &EstimateOptions::new(8)).unwrap();
        let counts: Vec<usize> = h.estimate.counts.iter().map(|c| c.cardinality).collect();
        assert_eq!(counts, (1..=8).map(|n| 1usize << n).collect::<Vec<_>>());
        assert!((h.estimate.fitted_rate - LN_2).abs() < 1e-9);
        assert!(h.subadditivity_violation.is_none());
    }

    #[test]
    fn zero_rate_cases() {
        let sys = zoo("doubling 16");
        let h = cover_entropy(&sys, &Cover::trivial(sys.carrier().clone()), &EstimateOptions::new(4)).unwrap();
        assert_eq!(h.estimate.fitted_rate, 0.0);
        let id = FiniteSystem::identity(6).unwrap();
        let a = Cover::from_sets(id.carrier().clone(), &[vec![0, 1, 2], vec![2, 3], vec![3, 4, 5]]).unwrap();
        let h = cover_entropy(&id, &a, &EstimateOptions::new(5)).unwrap();
        assert_eq!(h.estimate.fitted_rate, 0.0);
    }

    #[test]
    fn dynamic_join_matches_pruned_counts() {
        let sys = zoo("tent 9");
        let e = sys.metric_entourage(num_rational::Rational64::new(1, 3)).unwrap();
        let a = uniform_cover(&e).cover;
        let cfg = SolverConfig::default();
        let h = cover_entropy(&sys, &a, &EstimateOptions::new(4).with_mode(Mode::Exact)).unwrap();
        for n in 1..=4 {
            let j = dynamic_join(&sys, &a, n).unwrap();
            assert_eq!(min_subcover(&j, Mode::Exact, &cfg).cardinality, h.estimate.counts[n - 1].cardinality);
            if j.len() <= 16 {
                assert_eq!(min_subcover(&j, Mode::Exact, &cfg).cardinality, brute_force_n(&j));
            }
        }
    }

    #[test]
    fn uniform_covers() {
        let sys = zoo("full_shift 2 4");
        let c = sys.carrier().clone();
        assert_eq!(uniform_cover(&Entourage::delta(c.clone())).cover.len(), 16);
        let full = uniform_cover(&Entourage::full(c.clone()));
        assert_eq!((full.cover.len(), full.multiplicity.clone()), (1, vec![16]));
        let e0 = sys.metric_entourage(1.into()).unwrap();
        let u = uniform_cover(&e0);
        assert_eq!(u.cover.len(), 2);
        assert!(u.cover.members().iter().all(|m| m.count_ones(..) == 8));
        let id = FiniteSystem::identity(4).unwrap();
        let h = uniform_cover_entropy(
            &id,
            &UniformityBase::new(vec![Entourage::delta(id.carrier().clone())]).unwrap(),
            &EstimateOptions::new(4),
        )
        .unwrap();
        assert!(h.estimate.counts.iter().all(|c| c.cardinality == 4));
        assert_eq!(h.estimate.fitted_rate, 0.0);
        assert_eq!(h.compact_set, "X");
    }

    #[test]
    fn lebesgue_scales() {
        let sys = zoo("full_shift 2 4");
        let base = sys.default_base().unwrap();
        assert_eq!(lebesgue_entourage(&Cover::trivial(sys.carrier().clone()), &base).unwrap(), 0);
        let pts = lebesgue_entourage(&Cover::singletons(sys.carrier().clone()), &base).unwrap();
        assert!(base.get(pts).is_delta());
        let i = lebesgue_entourage(&first_symbol(&sys, 4), &base).unwrap();
        // the largest qualifying scale is d < 1, i.e. agreement at coordinate 0
        assert_eq!(base.get(i).relation(), sys.metric_entourage(1.into()).unwrap().relation());
        for j in i..base.len() {
            assert!(uniform_cover(base.get(j)).cover.refines(&first_symbol(&sys, 4)));
        }
        for j in 0..i {
            assert!(!uniform_cover(base.get(j)).cover.refines(&first_symbol(&sys, 4)));
        }
    }

    #[test]
    fn text_round_trip() {
        let c = carrier(5);
        let a = Cover::from_sets(c.clone(), &[vec![0, 1], vec![1, 2, 3, 4]]).unwrap();
        let back = Cover::from_text(&a.to_text(), Some(c)).unwrap();
        assert_eq!(back.members(), a.members());
        assert!(Cover::from_text("cover N=3 members=1\n110\n", None).is_err());
    }
}
