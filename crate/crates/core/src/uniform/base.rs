use std::sync::Arc;

use serde::Serialize;

use super::{Carrier, Entourage, Relation};
use crate::{par, Error, Result};

/// A finite base of entourages over one carrier, largest first.
///
/// Members are ordered by decreasing pair count, which is consistent with
/// inclusion wherever two members are comparable.
#[derive(Clone, Debug)]
pub struct UniformityBase {
    carrier: Arc<Carrier>,
    members: Vec<Entourage>,
}

impl UniformityBase {
    pub fn new(members: Vec<Entourage>) -> Result<Self> {
        let first =
            members.first().ok_or_else(|| Error::Precondition("uniformity base needs at least one member".into()))?;
        let carrier = first.carrier().clone();
        for m in &members[1..] {
            m.relation().check_same_carrier(first.relation())?;
        }
        let mut members = members;
        let counts: Vec<usize> = members.iter().map(Entourage::pair_count).collect();
        let mut order: Vec<usize> = (0..members.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(counts[i]));
        let mut slots: Vec<Option<Entourage>> = members.drain(..).map(Some).collect();
        let members = order.into_iter().map(|i| slots[i].take().unwrap()).collect();
        Ok(UniformityBase { carrier, members })
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn members(&self) -> &[Entourage] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn get(&self, i: usize) -> &Entourage {
        &self.members[i]
    }

    /// Members form a chain under inclusion.
    pub fn is_nested(&self) -> bool {
        self.members.windows(2).all(|w| w[1].is_subset(&w[0]))
    }

    /// Indices of members other than the diagonal.
    pub fn nontrivial(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| !self.members[i].is_delta()).collect()
    }

    /// Index of the largest member satisfying `pred`.
    pub fn largest_where(&self, mut pred: impl FnMut(&Entourage) -> bool) -> Option<usize> {
        (0..self.members.len()).find(|&i| pred(&self.members[i]))
    }

    pub fn position(&self, e: &Entourage) -> Option<usize> {
        self.members.iter().position(|m| m.relation() == e.relation())
    }

    pub fn validate(&self) -> AxiomReport {
        let rels: Vec<Relation> = self.members.iter().map(|m| m.relation().clone()).collect();
        validate_family(&rels).expect("base members share a carrier")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// A pair of `member` that violates the axiom.
    Pair { member: usize, x: usize, y: usize },
    /// No member lies inside the intersection of members `a` and `b`.
    MissingIntersection { a: usize, b: usize },
    /// No member `W` satisfies `W ∘ W ⊆ member`.
    MissingWitness { member: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub pass: bool,
    pub counterexample: Option<Counterexample>,
}

impl AxiomCheck {
    fn from(counterexample: Option<Counterexample>) -> Self {
        AxiomCheck { pass: counterexample.is_none(), counterexample }
    }
}

/// Per-axiom outcome of [`validate_family`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    /// Every pairwise intersection contains a member.
    pub u1_intersection: AxiomCheck,
    /// Every member contains the diagonal.
    pub u2_diagonal: AxiomCheck,
    /// Every member's transpose contains a member.
    pub u3_transpose: AxiomCheck,
    /// Every member has a member whose square lies inside it.
    pub u4_square_root: AxiomCheck,
    /// Adding the diagonal to the family would supply every missing U4 witness.
    pub delta_would_repair_u4: bool,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.u1_intersection.pass && self.u2_diagonal.pass && self.u3_transpose.pass && self.u4_square_root.pass
    }

    pub fn checks(&self) -> [(&'static str, &AxiomCheck); 4] {
        [
            ("U1", &self.u1_intersection),
            ("U2", &self.u2_diagonal),
            ("U3", &self.u3_transpose),
            ("U4", &self.u4_square_root),
        ]
    }
}

/// Checks the uniformity axioms for a finite family treated as a base.
pub fn validate_family(family: &[Relation]) -> Result<AxiomReport> {
    let Some(first) = family.first() else {
        return Err(Error::Precondition("empty family".into()));
    };
    for r in &family[1..] {
        r.check_same_carrier(first)?;
    }
    let m = family.len();
    let contains_member = |target: &Relation| family.iter().any(|c| c.is_subset(target));

    let mut u1 = None;
    'outer: for a in 0..m {
        for b in a + 1..m {
            let meet = family[a].intersection(&family[b])?;
            if !contains_member(&meet) {
                u1 = Some(Counterexample::MissingIntersection { a, b });
                break 'outer;
            }
        }
    }

    let u2 = family
        .iter()
        .enumerate()
        .find_map(|(i, r)| r.missing_diagonal().map(|x| Counterexample::Pair { member: i, x, y: x }));

    let u3 = family.iter().enumerate().find_map(|(i, r)| {
        let (x, y) = r.asymmetric_pair()?;
        if contains_member(&r.transpose()) {
            None
        } else {
            Some(Counterexample::Pair { member: i, x, y })
        }
    });

    let squares: Vec<Relation> = par::map_slice(family, |r| r.compose(r).expect("same carrier"));
    let u4 = (0..m).find_map(|i| {
        if squares.iter().any(|sq| sq.is_subset(&family[i])) {
            None
        } else {
            Some(Counterexample::MissingWitness { member: i })
        }
    });
    let delta_would_repair_u4 = u4.is_some() && family.iter().all(Relation::is_reflexive);

    Ok(AxiomReport {
        u1_intersection: AxiomCheck::from(u1),
        u2_diagonal: AxiomCheck::from(u2),
        u3_transpose: AxiomCheck::from(u3),
        u4_square_root: AxiomCheck::from(u4),
        delta_would_repair_u4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band(c: &Arc<Carrier>, r: usize) -> Relation {
        Relation::from_fn(c.clone(), move |x, y| x.abs_diff(y) <= r)
    }

    #[test]
    fn band_without_square_root_fails_u4() {
        // E∘E = {|x-y| <= 2} on five points is not inside E, and E is the only member.
        let c = Arc::new(Carrier::new(5).unwrap());
        let e = band(&c, 1);
        let sq = e.compose(&e).unwrap();
        assert!(!sq.is_subset(&e));
        let report = validate_family(&[e]).unwrap();
        assert!(report.u1_intersection.pass && report.u2_diagonal.pass && report.u3_transpose.pass);
        assert_eq!(report.u4_square_root.counterexample, Some(Counterexample::MissingWitness { member: 0 }));
        assert!(report.delta_would_repair_u4);
    }

    #[test]
    fn asymmetric_member_fails_u3() {
        let c = Arc::new(Carrier::new(4).unwrap());
        let mut pairs: Vec<_> = (0..4).map(|x| (x, x)).collect();
        pairs.push((0, 1));
        let skew = Relation::from_pairs(c.clone(), pairs).unwrap();
        let report = validate_family(&[Relation::full(c), skew]).unwrap();
        assert!(!report.u3_transpose.pass);
        assert_eq!(report.u3_transpose.counterexample, Some(Counterexample::Pair { member: 1, x: 0, y: 1 }));
    }

    #[test]
    fn mixed_carriers_rejected() {
        let a = Arc::new(Carrier::new(4).unwrap());
        let b = Arc::new(Carrier::new(5).unwrap());
        let err = validate_family(&[Relation::full(a), Relation::full(b)]).unwrap_err();
        assert!(matches!(err, Error::DomainMismatch(_)));
    }

    #[test]
    fn base_sorted_largest_first() {
        let c = Arc::new(Carrier::new(5).unwrap());
        let base = UniformityBase::new(vec![
            Entourage::delta(c.clone()),
            Entourage::new(band(&c, 2)).unwrap(),
            Entourage::new(band(&c, 1)).unwrap(),
        ])
        .unwrap();
        assert!(base.is_nested());
        assert!(base.get(2).is_delta());
        assert_eq!(base.nontrivial(), vec![0, 1]);
        assert!(base.validate().all_pass());
    }
}
