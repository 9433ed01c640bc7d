use std::sync::Arc;

use num_rational::Rational64;
use proptest::prelude::*;
use uentropy::cover::{min_subcover, uniform_cover, Cover};
use uentropy::entropy_points::{entropy_point_set, Quantifier, Threshold};
use uentropy::expansivity::{contraction_check, saturate, sensitivity, Sided};
use uentropy::shadowing::chain_recurrent_pairs;
use uentropy::spanning::{check_monotonicity, max_separated, min_spanning, EstimateOptions};
use uentropy::uniform::{bowen_relation, dynamic_pullback, iterate_map};
use uentropy::{Carrier, FiniteSystem, Metric, Mode, SolverConfig, UniformityBase};

/// A random self-map of `n` points placed on a line at increasing integer
/// positions, so `|p_x - p_y|` is a metric.
fn system(max_n: usize) -> impl Strategy<Value = FiniteSystem> {
    (2..=max_n).prop_flat_map(|n| (prop::collection::vec(0..n, n), prop::collection::vec(1..4i64, n))).prop_map(
        |(map, gaps)| {
            let n = map.len();
            let pos: Vec<i64> = gaps
                .iter()
                .scan(0, |acc, g| {
                    *acc += g;
                    Some(*acc)
                })
                .collect();
            let values = (0..n * n).map(|k| Rational64::new((pos[k / n] - pos[k % n]).abs(), 4)).collect();
            let carrier = Arc::new(Carrier::new(n).unwrap());
            FiniteSystem::new("random", carrier, map, Some(Metric::Table { n, values })).unwrap()
        },
    )
}

fn base(sys: &FiniteSystem) -> UniformityBase {
    sys.default_base().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn members_stay_entourages_under_operations(sys in system(10)) {
        let b = base(&sys);
        for u in b.members() {
            for v in b.members() {
                let w = u.intersection(v).unwrap();
                prop_assert!(w.relation().is_reflexive() && w.relation().is_symmetric());
                let p = u.power(2);
                prop_assert!(p.relation().is_reflexive() && p.relation().is_symmetric());
            }
        }
    }

    #[test]
    fn composition_is_associative(sys in system(8)) {
        let b = base(&sys);
        let m = b.members();
        for a in m {
            for c in m {
                for e in m {
                    let left = a.relation().compose(c.relation()).unwrap().compose(e.relation()).unwrap();
                    let right = a.relation().compose(&c.relation().compose(e.relation()).unwrap()).unwrap();
                    prop_assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn bowen_relations_shrink_and_pullbacks_compose(sys in system(12), i in 0usize..5, j in 0usize..5) {
        for e in base(&sys).members() {
            for n in 1..6 {
                let next = bowen_relation(e, sys.map(), n + 1);
                prop_assert!(next.is_subset(&bowen_relation(e, sys.map(), n)));
            }
            let direct = dynamic_pullback(e, sys.map(), i + j);
            let nested = dynamic_pullback(&dynamic_pullback(e, sys.map(), j), sys.map(), i);
            prop_assert_eq!(direct.relation(), nested.relation());
            let by_hand = e.relation().pullback(&iterate_map(sys.map(), i + j));
            prop_assert_eq!(direct.relation(), &by_hand);
        }
    }

    #[test]
    fn metric_families_are_nested_uniformities(sys in system(12)) {
        let b = base(&sys);
        prop_assert!(b.validate().all_pass());
        for w in b.members().windows(2) {
            prop_assert!(w[1].is_subset(&w[0]));
        }
    }

    #[test]
    fn bowen_distance_is_a_metric_matching_bowen_relations(sys in system(9), n in 1usize..5) {
        let size = sys.size();
        let d = |x, y| sys.bowen_distance(x, y, n).unwrap();
        for x in 0..size {
            prop_assert_eq!(d(x, x), Rational64::from_integer(0));
            for y in 0..size {
                prop_assert_eq!(d(x, y), d(y, x));
                if x != y {
                    prop_assert!(d(x, y) > Rational64::from_integer(0));
                }
                for z in 0..size {
                    prop_assert!(d(x, z) <= d(x, y) + d(y, z));
                }
            }
        }
        let grid = sys.default_grid().unwrap();
        for &eps in grid.values() {
            let bowen = bowen_relation(&sys.metric_entourage(eps).unwrap(), sys.map(), n);
            for x in 0..size {
                for y in 0..size {
                    prop_assert_eq!(bowen.contains(x, y), d(x, y) < eps);
                }
            }
        }
    }

    #[test]
    fn exact_counts_bracket_greedy_and_grow_in_n(sys in system(12)) {
        let cfg = SolverConfig::default();
        for e in base(&sys).members() {
            let mut prev = (0, 0);
            for n in 1..=5 {
                let sep = max_separated(&sys, e, n, Mode::Exact, &cfg).unwrap();
                let span = min_spanning(&sys, e, n, Mode::Exact, &cfg).unwrap();
                let gsep = max_separated(&sys, e, n, Mode::Greedy, &cfg).unwrap();
                let gspan = min_spanning(&sys, e, n, Mode::Greedy, &cfg).unwrap();
                prop_assert!(sep.exact && span.exact);
                prop_assert!(span.cardinality <= sep.cardinality);
                prop_assert!(gsep.cardinality <= sep.cardinality);
                prop_assert!(gspan.cardinality >= span.cardinality);
                prop_assert!(sep.cardinality >= prev.0 && span.cardinality >= prev.1);
                prev = (sep.cardinality, span.cardinality);
            }
        }
    }

    #[test]
    fn nested_scales_are_monotone(sys in system(12)) {
        let b = base(&sys);
        let m = b.members();
        for k in 1..m.len() {
            let report = check_monotonicity(&sys, &m[k], &m[k - 1], 4, &SolverConfig::default()).unwrap();
            prop_assert!(report.holds(), "{:?}", report.violation);
        }
    }

    #[test]
    fn pulled_back_covers_need_no_more_members(sys in system(10)) {
        let cfg = SolverConfig::default();
        for e in base(&sys).members() {
            let a = uniform_cover(e).cover;
            let pulled = a.preimage(&sys).unwrap();
            let n_a = min_subcover(&a, Mode::Exact, &cfg).cardinality;
            let n_p = min_subcover(&pulled, Mode::Exact, &cfg).cardinality;
            prop_assert!(n_p <= n_a);
        }
    }

    #[test]
    fn joins_commute_and_refine_both(sys in system(10)) {
        let b = base(&sys);
        let covers: Vec<Cover> = b.members().iter().map(|e| uniform_cover(e).cover).collect();
        for a in &covers {
            for c in &covers {
                let ac = a.join(c).unwrap().dedup();
                let ca = c.join(a).unwrap().dedup();
                let mut x: Vec<_> = ac.members().iter().map(|s| s.ones().collect::<Vec<_>>()).collect();
                let mut y: Vec<_> = ca.members().iter().map(|s| s.ones().collect::<Vec<_>>()).collect();
                x.sort();
                y.sort();
                prop_assert_eq!(x, y);
                prop_assert!(ac.refines(a) && ac.refines(c));
            }
        }
    }

    #[test]
    fn cover_counts_are_subadditive(sys in system(10)) {
        let opts = EstimateOptions::new(5).with_mode(Mode::Exact);
        let uc = uentropy::cover::uniform_cover_entropy(&sys, &base(&sys), &opts).unwrap();
        prop_assert!(uc.subadditivity_violation.is_none());
    }

    #[test]
    fn chain_recurrence_grows_with_the_scale(sys in system(12)) {
        let b = base(&sys);
        let m = b.members();
        for k in 1..m.len() {
            let small = chain_recurrent_pairs(&sys, &m[k]).unwrap();
            let large = chain_recurrent_pairs(&sys, &m[k - 1]).unwrap();
            prop_assert!(small.is_subset(&large));
        }
    }

    #[test]
    fn gamma_saturation_stops_within_n_squared(sys in system(12)) {
        let sided = Sided::natural(&sys);
        for d in base(&sys).members() {
            let sat = saturate(&sys, d, sided).unwrap();
            prop_assert!(sat.horizon <= sys.size() * sys.size());
            prop_assert!(sat.relation.is_subset(d));
        }
        let sen = sensitivity(&sys, &base(&sys)).unwrap();
        prop_assert!(sen.union.iter().all(|&x| x < sys.size()));
    }

    #[test]
    fn contractions_have_bounded_counts(sys in system(10)) {
        let b = base(&sys);
        let cfg = SolverConfig::default();
        let report = contraction_check(&sys, &b, &EstimateOptions::new(5).with_mode(Mode::Exact)).unwrap();
        if report.is_contraction {
            for (d, w) in b.members().iter().zip(&report.witnesses) {
                let Some(w) = *w else { continue };
                let u = b.get(w);
                let first = max_separated(&sys, u, 1, Mode::Exact, &cfg).unwrap().cardinality;
                for n in 1..=6 {
                    prop_assert_eq!(max_separated(&sys, u, n, Mode::Exact, &cfg).unwrap().cardinality, first);
                    prop_assert!(max_separated(&sys, d, n, Mode::Exact, &cfg).unwrap().cardinality <= first);
                }
            }
        }
    }

    #[test]
    fn raising_the_threshold_never_adds_entropy_points(sys in system(10), lo in 0.0f64..0.5, step in 0.0f64..0.5) {
        let b = base(&sys);
        let opts = EstimateOptions::new(5).with_mode(Mode::Exact);
        let low = entropy_point_set(&sys, &b, &opts, Threshold::uniform(lo), Quantifier::Every).unwrap();
        let high = entropy_point_set(&sys, &b, &opts, Threshold::uniform(lo + step), Quantifier::Every).unwrap();
        prop_assert!(high.points.iter().all(|x| low.points.contains(x)));
        let again = entropy_point_set(&sys, &b, &opts, Threshold::uniform(lo), Quantifier::Every).unwrap();
        prop_assert_eq!(&low, &again);
        for p in low.profiles.iter().filter(|p| p.is_entropy_point) {
            prop_assert!(p.per_scale.iter().all(|s| s.rate > lo));
        }
    }
}

#[test]
fn identity_has_no_sensitive_points() {
    let sys = FiniteSystem::identity(9).unwrap();
    assert!(sensitivity(&sys, &base(&sys)).unwrap().union.is_empty());
}
