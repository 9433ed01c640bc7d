//! Local entropy and entropy points.
//!
//! `x` is an entropy point when the entropy restricted to `U[x]` is
//! positive for every nontrivial base member `U` (or for some, under
//! [`Quantifier::Some`]). On a finite model "positive" means above a floor:
//! one for rates fitted to exact counts and a coarser one for rates that
//! rest on heuristic counts.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::spanning::{self, EntropyEstimate, EstimateOptions, SetKind};
use crate::systems::FiniteSystem;
use crate::uniform::{bitset_from, Entourage, UniformityBase};
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    #[default]
    Every,
    Some,
}

/// Floors a rate must exceed to count as positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Threshold {
    /// For rates fitted to exact counts.
    pub exact: f64,
    /// For rates fitted to greedy or budget-limited counts.
    pub approximate: f64,
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold { exact: 1e-9, approximate: 0.05 }
    }
}

impl Threshold {
    pub fn uniform(floor: f64) -> Self {
        Threshold { exact: floor, approximate: floor }
    }

    pub fn floor(&self, exact: bool) -> f64 {
        if exact {
            self.exact
        } else {
            self.approximate
        }
    }

    pub fn exceeded_by(&self, est: &EntropyEstimate) -> bool {
        est.fitted_rate > self.floor(est.exact)
    }
}

/// `h_u(f, E[x])` from separated subsets of `E[x]`, over every scale of
/// `base`.
pub fn local_entropy(
    sys: &FiniteSystem,
    x: usize,
    e: &Entourage,
    base: &UniformityBase,
    opts: &EstimateOptions,
) -> Result<EntropyEstimate> {
    sys.carrier().check_point(x)?;
    if e.size() != sys.size() || base.carrier().size() != sys.size() {
        return Err(Error::DomainMismatch("scales and system live on different carriers".into()));
    }
    restricted_rate(sys, base, e.row(x), opts)
}

fn restricted_rate(
    sys: &FiniteSystem,
    base: &UniformityBase,
    k: &FixedBitSet,
    opts: &EstimateOptions,
) -> Result<EntropyEstimate> {
    spanning::entropy_estimate(sys, base.members(), SetKind::Separated, Some(k), opts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRate {
    pub scale: String,
    pub rate: f64,
    pub exact: bool,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalEntropyProfile {
    pub point: usize,
    pub per_scale: Vec<ScaleRate>,
    pub is_entropy_point: bool,
    pub threshold: Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyPoints {
    pub points: Vec<usize>,
    pub profiles: Vec<LocalEntropyProfile>,
    pub quantifier: Quantifier,
    /// Every subset of a finite discrete carrier is closed, so this is
    /// always true and says nothing beyond that.
    pub closed: bool,
}

impl EntropyPoints {
    pub fn contains(&self, x: usize) -> bool {
        self.points.binary_search(&x).is_ok()
    }
}

fn profile(
    sys: &FiniteSystem,
    x: usize,
    base: &UniformityBase,
    scales: &[usize],
    opts: &EstimateOptions,
    threshold: Threshold,
    quantifier: Quantifier,
) -> Result<LocalEntropyProfile> {
    let per_scale = scales
        .iter()
        .map(|&i| {
            let u = base.get(i);
            let est = restricted_rate(sys, base, u.row(x), opts)?;
            Ok(ScaleRate {
                scale: u.tag().to_string(),
                rate: est.fitted_rate,
                exact: est.exact,
                positive: threshold.exceeded_by(&est),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let is_entropy_point = !per_scale.is_empty()
        && match quantifier {
            Quantifier::Every => per_scale.iter().all(|s| s.positive),
            Quantifier::Some => per_scale.iter().any(|s| s.positive),
        };
    Ok(LocalEntropyProfile { point: x, per_scale, is_entropy_point, threshold })
}

/// `Ent(X, f)` with a profile per point. The neighbourhood scales are the
/// nontrivial base members; with none, no point qualifies.
pub fn entropy_point_set(
    sys: &FiniteSystem,
    base: &UniformityBase,
    opts: &EstimateOptions,
    threshold: Threshold,
    quantifier: Quantifier,
) -> Result<EntropyPoints> {
    if base.carrier().size() != sys.size() {
        return Err(Error::DomainMismatch("base and system live on different carriers".into()));
    }
    let scales = base.nontrivial();
    let profiles = par::map_range(sys.size(), |x| profile(sys, x, base, &scales, opts, threshold, quantifier))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let points = profiles.iter().filter(|p| p.is_entropy_point).map(|p| p.point).collect();
    Ok(EntropyPoints { points, profiles, quantifier, closed: true })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub invariant: bool,
    /// A point of the set whose image leaves it.
    pub counterexample: Option<usize>,
}

/// `f(ent) ⊆ ent`.
pub fn check_forward_invariant(sys: &FiniteSystem, ent: &[usize]) -> Result<InvarianceReport> {
    for &x in ent {
        sys.carrier().check_point(x)?;
    }
    let set = bitset_from(sys.size(), ent.iter().copied());
    let counterexample = ent.iter().copied().find(|&x| !set.contains(sys.apply(x)));
    Ok(InvarianceReport { invariant: counterexample.is_none(), counterexample })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyReport {
    pub matches: bool,
    /// `φ(Ent(X, f))`, sorted.
    pub image: Vec<usize>,
    pub ent_y: Vec<usize>,
}

/// Checks `φ ∘ f = g ∘ φ` pointwise, then compares `φ(Ent(X, f))` with
/// `Ent(Y, g)` computed on the base transported through `φ`.
pub fn check_conjugacy_image(
    sys_x: &FiniteSystem,
    sys_y: &FiniteSystem,
    phi: &[usize],
    base_x: &UniformityBase,
    opts: &EstimateOptions,
    threshold: Threshold,
) -> Result<ConjugacyReport> {
    let n = sys_x.size();
    if phi.len() != n || sys_y.size() != n {
        return Err(Error::Precondition(format!(
            "φ has {} entries for carriers of {} and {} points",
            phi.len(),
            n,
            sys_y.size()
        )));
    }
    let mut inv = vec![usize::MAX; n];
    for (x, &y) in phi.iter().enumerate() {
        if y >= n || inv[y] != usize::MAX {
            return Err(Error::Precondition(format!("φ is not a bijection at point {x}")));
        }
        inv[y] = x;
    }
    if let Some(x) = (0..n).find(|&x| phi[sys_x.apply(x)] != sys_y.apply(phi[x])) {
        return Err(Error::Precondition(format!("φ(f(x)) ≠ g(φ(x)) at x = {x}")));
    }
    let transported = base_x
        .members()
        .iter()
        .map(|e| Entourage::from_fn(sys_y.carrier().clone(), |a, b| e.contains(inv[a], inv[b])).with_name(e.tag()))
        .collect();
    let base_y = UniformityBase::new(transported)?;
    let ent_x = entropy_point_set(sys_x, base_x, opts, threshold, Quantifier::Every)?;
    let ent_y = entropy_point_set(sys_y, &base_y, opts, threshold, Quantifier::Every)?.points;
    let mut image: Vec<usize> = ent_x.points.iter().map(|&x| phi[x]).collect();
    image.sort_unstable();
    Ok(ConjugacyReport { matches: image == ent_y, image, ent_y })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullEntropyReport {
    /// `h_u(f|Ent)`; zero for an empty set.
    pub restricted: f64,
    pub global: f64,
    pub gap: f64,
    pub exact: bool,
}

/// Uniform entropy restricted to `ent` next to the global value.
pub fn check_full_entropy_on_ent(
    sys: &FiniteSystem,
    ent: &[usize],
    base: &UniformityBase,
    opts: &EstimateOptions,
) -> Result<FullEntropyReport> {
    let inv = check_forward_invariant(sys, ent)?;
    if let Some(x) = inv.counterexample {
        return Err(Error::Precondition(format!("the set is not forward invariant: f({x}) leaves it")));
    }
    let global = spanning::uniform_entropy(sys, base, opts)?;
    let (restricted, restricted_exact) = if ent.is_empty() {
        (0.0, true)
    } else {
        let k = bitset_from(sys.size(), ent.iter().copied());
        let est = restricted_rate(sys, base, &k, opts)?;
        (est.fitted_rate, est.exact)
    };
    Ok(FullEntropyReport {
        restricted,
        global: global.rate(),
        gap: (global.rate() - restricted).abs(),
        exact: restricted_exact && global.separated.exact,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum IntersectionOutcome {
    /// The lowest point of `K ∩ Ent`.
    Witness { point: usize, restricted_rate: f64 },
    /// `h_u(f, K)` does not exceed the floor; nothing is claimed.
    PreconditionNotMet { restricted_rate: f64 },
    /// Positive entropy on `K` but no entropy point in it.
    Violation { restricted_rate: f64 },
}

/// Looks for a point of `K ∩ Ent(X, f)` when `h_u(f, K)` is positive.
pub fn intersection_witness(
    sys: &FiniteSystem,
    k: &[usize],
    base: &UniformityBase,
    opts: &EstimateOptions,
    threshold: Threshold,
) -> Result<IntersectionOutcome> {
    for &x in k {
        sys.carrier().check_point(x)?;
    }
    if k.is_empty() {
        return Ok(IntersectionOutcome::PreconditionNotMet { restricted_rate: 0.0 });
    }
    let set = bitset_from(sys.size(), k.iter().copied());
    let est = restricted_rate(sys, base, &set, opts)?;
    let restricted_rate = est.fitted_rate;
    if !threshold.exceeded_by(&est) {
        return Ok(IntersectionOutcome::PreconditionNotMet { restricted_rate });
    }
    let scales = base.nontrivial();
    for x in set.ones() {
        if profile(sys, x, base, &scales, opts, threshold, Quantifier::Every)?.is_entropy_point {
            return Ok(IntersectionOutcome::Witness { point: x, restricted_rate });
        }
    }
    Ok(IntersectionOutcome::Violation { restricted_rate })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::LN_2;
    use std::sync::Arc;

    use num_rational::Rational64;

    use super::*;
    use crate::shadowing::{entropy_certificate, CertificateOptions};
    use crate::systems::{Metric, ZooSpec};
    use crate::uniform::Carrier;

    fn zoo(spec: &str) -> FiniteSystem {
        spec.parse::<ZooSpec>().unwrap().build().unwrap()
    }

    fn ent(sys: &FiniteSystem, n_max: usize) -> EntropyPoints {
        let base = sys.default_base().unwrap();
        entropy_point_set(sys, &base, &EstimateOptions::new(n_max), Threshold::default(), Quantifier::Every).unwrap()
    }

    #[test]
    fn local_entropy_examples() {
        let sys = zoo("full_shift 2 8");
        let base = sys.default_base().unwrap();
        let top = base.get(0);
        assert!(top.is_full());
        let opts = EstimateOptions::new(8);
        for x in [0, 37, 255] {
            let est = local_entropy(&sys, x, top, &base, &opts).unwrap();
            assert!((est.fitted_rate - LN_2).abs() < 1e-9);
        }
        let c = zoo("contraction 8");
        let cb = c.default_base().unwrap();
        for x in 0..c.size() {
            for e in cb.members() {
                assert_eq!(local_entropy(&c, x, e, &cb, &EstimateOptions::new(6)).unwrap().fitted_rate, 0.0);
            }
        }
    }

    #[test]
    fn local_entropy_monotone_in_scale() {
        let sys = zoo("full_shift 2 6");
        let base = sys.default_base().unwrap();
        let opts = EstimateOptions::new(6);
        for x in [0, 21, 63] {
            let rates: Vec<f64> =
                base.members().iter().map(|e| local_entropy(&sys, x, e, &base, &opts).unwrap().fitted_rate).collect();
            assert!(rates.windows(2).all(|w| w[0] >= w[1] - 1e-12), "{rates:?}");
        }
    }

    #[test]
    fn shift_and_contraction_sets() {
        let s = ent(&zoo("full_shift 2 6"), 6);
        assert_eq!(s.points, (0..64).collect::<Vec<_>>());
        for p in &s.profiles {
            assert!(p.per_scale.iter().all(|r| r.rate > p.threshold.floor(r.exact)));
        }
        let c = ent(&zoo("contraction 8"), 6);
        assert!(c.points.is_empty());
        let some = entropy_point_set(
            &zoo("contraction 8"),
            &zoo("contraction 8").default_base().unwrap(),
            &EstimateOptions::new(6),
            Threshold::default(),
            Quantifier::Some,
        )
        .unwrap();
        assert!(some.points.is_empty());
    }

    #[test]
    fn threshold_monotonicity() {
        let sys = zoo("tent 17");
        let base = sys.default_base().unwrap();
        let opts = EstimateOptions::new(4);
        let mut last: Option<Vec<usize>> = None;
        for floor in [0.0, 0.05, 0.2, 0.5, 1.0] {
            let e = entropy_point_set(&sys, &base, &opts, Threshold::uniform(floor), Quantifier::Every).unwrap();
            if let Some(prev) = &last {
                assert!(e.points.iter().all(|p| prev.contains(p)));
            }
            last = Some(e.points);
        }
    }

    #[test]
    fn forward_invariance() {
        let sys = zoo("doubling 32");
        let e = ent(&sys, 5);
        assert!(check_forward_invariant(&sys, &e.points).unwrap().invariant);
        let shift = zoo("full_shift 2 6");
        assert!(check_forward_invariant(&shift, &(0..64).collect::<Vec<_>>()).unwrap().invariant);
        assert!(check_forward_invariant(&shift, &[]).unwrap().invariant);
        let r = check_forward_invariant(&shift, &[1]).unwrap();
        assert_eq!(r.counterexample, Some(1));
    }

    #[test]
    fn conjugacy_by_relabeling_and_identity() {
        let sys = zoo("full_shift 2 6");
        let base = sys.default_base().unwrap();
        let opts = EstimateOptions::new(6);
        let flip: Vec<usize> = (0..64).map(|w| w ^ 63).collect();
        let r = check_conjugacy_image(&sys, &sys, &flip, &base, &opts, Threshold::default()).unwrap();
        assert!(r.matches);
        let id: Vec<usize> = (0..64).collect();
        assert!(check_conjugacy_image(&sys, &sys, &id, &base, &opts, Threshold::default()).unwrap().matches);
        let mut bad = id.clone();
        bad.swap(1, 2);
        assert!(matches!(
            check_conjugacy_image(&sys, &sys, &bad, &base, &opts, Threshold::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn conjugacy_with_carry_doubling() {
        // k ↦ 2k mod 2^L with the overflow bit carried into bit 0
        let l = 5;
        let n = 1usize << l;
        let shift = zoo("full_shift 2 5");
        let map: Vec<usize> = (0..n).map(|k| (2 * k) % n + (2 * k) / n).collect();
        let doubling =
            FiniteSystem::new("carry_doubling", Arc::new(Carrier::new(n).unwrap()), map, Some(Metric::Circle { n }))
                .unwrap();
        let phi: Vec<usize> = (0..n).collect();
        let r = check_conjugacy_image(
            &shift,
            &doubling,
            &phi,
            &shift.default_base().unwrap(),
            &EstimateOptions::new(5),
            Threshold::default(),
        )
        .unwrap();
        assert!(r.matches);
        assert_eq!(r.ent_y.len(), n);
    }

    #[test]
    fn full_entropy_on_ent() {
        let sys = zoo("full_shift 2 8");
        let all: Vec<usize> = (0..256).collect();
        let r = check_full_entropy_on_ent(&sys, &all, &sys.default_base().unwrap(), &EstimateOptions::new(8)).unwrap();
        assert_eq!(r.gap, 0.0);
        let c = zoo("contraction 8");
        let e = ent(&c, 6);
        let r = check_full_entropy_on_ent(&c, &e.points, &c.default_base().unwrap(), &EstimateOptions::new(6)).unwrap();
        assert_eq!((r.restricted, r.global), (0.0, 0.0));
        assert!(check_full_entropy_on_ent(&sys, &[3], &sys.default_base().unwrap(), &EstimateOptions::new(4)).is_err());
    }

    #[test]
    fn intersection_witnesses() {
        let sys = zoo("full_shift 2 6");
        let base = sys.default_base().unwrap();
        let opts = EstimateOptions::new(6);
        let th = Threshold::default();
        let all: Vec<usize> = (0..64).collect();
        assert!(matches!(
            intersection_witness(&sys, &all, &base, &opts, th).unwrap(),
            IntersectionOutcome::Witness { point: 0, .. }
        ));
        assert!(matches!(
            intersection_witness(&sys, &[0], &base, &opts, th).unwrap(),
            IntersectionOutcome::PreconditionNotMet { .. }
        ));
        let leading_zero: Vec<usize> = (0..32).collect();
        match intersection_witness(&sys, &leading_zero, &base, &opts, th).unwrap() {
            IntersectionOutcome::Witness { point, restricted_rate } => {
                assert!(point < 32);
                assert!((restricted_rate - LN_2).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn certificate_anchor_is_entropy_point() {
        let sys = zoo("full_shift 2 6");
        let base = sys.default_base().unwrap();
        let cert = entropy_certificate(&sys, &base, &CertificateOptions::new(3)).unwrap();
        assert!(ent(&sys, 6).contains(cert.anchor));
    }

    /// shift(2,6) joined to rotation(16,3) whose circle has step 1/32, so
    /// the whole rotation sits within the first-symbol scale of the shift's
    /// fixed point.
    pub(crate) fn shift_and_small_rotation() -> (FiniteSystem, UniformityBase) {
        let shift = zoo("full_shift 2 6");
        let rot = zoo("rotation 16 3");
        let values = (0..16 * 16usize)
            .map(|k| {
                let d = (k / 16).abs_diff(k % 16);
                Rational64::new(d.min(16 - d) as i64, 32)
            })
            .collect();
        let small = FiniteSystem::new(
            "rotation",
            rot.carrier().clone(),
            rot.map().to_vec(),
            Some(Metric::Table { n: 16, values }),
        )
        .unwrap();
        let sys = FiniteSystem::wedge_union(&shift, &small, 0, 0, Rational64::new(1, 8)).unwrap();
        let base = sys.metric_entourage_family(&shift.default_grid().unwrap()).unwrap();
        (sys, base)
    }

    #[test]
    fn union_restricts_to_shift_component() {
        let (sys, base) = shift_and_small_rotation();
        let opts = EstimateOptions::new(6);
        let e = entropy_point_set(&sys, &base, &opts, Threshold::default(), Quantifier::Every).unwrap();
        assert_eq!(e.points, (0..64).collect::<Vec<_>>());
        let r = check_full_entropy_on_ent(&sys, &e.points, &base, &opts).unwrap();
        assert!((r.global - LN_2).abs() < 1e-9, "{r:?}");
        assert!(r.gap < 1e-6);
    }
}
