//! Finite entourage algebra.
//!
//! A [`Relation`] is a dense boolean relation on a [`Carrier`]; an
//! [`Entourage`] is a relation that contains the diagonal and equals its
//! transpose. A [`UniformityBase`] is a finite family of entourages over one
//! carrier whose uniformity axioms can be checked exactly.

mod base;
mod carrier;
mod relation;
pub(crate) mod text;

pub use base::{validate_family, AxiomCheck, AxiomReport, Counterexample, UniformityBase};
pub use carrier::{Carrier, MAX_CARRIER};
pub use relation::{bowen_relation, dynamic_pullback, iterate_map, BowenSequence, Entourage, Relation};

use fixedbitset::FixedBitSet;

/// Collects the set bits of `set` in increasing order.
pub fn members(set: &FixedBitSet) -> Vec<usize> {
    set.ones().collect()
}

/// Builds a bitset of length `len` from point indices.
pub fn bitset_from(len: usize, points: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut set = FixedBitSet::with_capacity(len);
    for p in points {
        set.insert(p);
    }
    set
}

/// Orders bitsets as the `0`/`1` strings they print as (point 0 first).
pub fn cmp_bitmask(a: &FixedBitSet, b: &FixedBitSet) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let (sa, sb) = (a.as_slice(), b.as_slice());
    for (wa, wb) in sa.iter().zip(sb) {
        let diff = wa ^ wb;
        if diff != 0 {
            let bit = diff.trailing_zeros();
            return if (wa >> bit) & 1 == 0 { Ordering::Less } else { Ordering::Greater };
        }
    }
    sa.len().cmp(&sb.len())
}
