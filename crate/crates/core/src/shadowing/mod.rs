//! Pseudo-orbits, shadowing, chain recurrence and the positive-entropy
//! certificate.

mod certificate;
mod modulus;
mod recurrence;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::systems::FiniteSystem;
use crate::uniform::Entourage;
use crate::{Error, Result};

pub use certificate::{
    entropy_certificate, CertificateError, CertificateOptions, CertificateScales, EntropyCertificate, ShadowEntry,
};
pub use modulus::{default_chain_length, shadowing_modulus, ModulusOptions, RejectedScale, ShadowingModulus};
pub use recurrence::{chain_recurrent_pairs, chain_recurrent_points};

/// One step where the chain jumps: `f(x_index) ≠ x_{index+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Jump {
    pub index: usize,
    /// `(f(x_index), x_{index+1})`.
    pub pair: (usize, usize),
}

/// A validated `D`-pseudo-orbit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PseudoOrbit {
    pub states: Vec<usize>,
    /// Tag of the entourage the chain was checked against.
    pub validity: String,
    pub jumps: Vec<Jump>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ChainCheck {
    Valid(PseudoOrbit),
    /// `(f(x_index), x_{index+1}) ∉ D`.
    Violation {
        index: usize,
        pair: (usize, usize),
    },
}

impl ChainCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, ChainCheck::Valid(_))
    }

    pub fn into_orbit(self) -> Option<PseudoOrbit> {
        match self {
            ChainCheck::Valid(p) => Some(p),
            ChainCheck::Violation { .. } => None,
        }
    }
}

fn check_sizes(sys: &FiniteSystem, e: &Entourage) -> Result<()> {
    if sys.size() == e.size() {
        Ok(())
    } else {
        Err(Error::DomainMismatch(format!(
            "entourage on {} points, system `{}` on {}",
            e.size(),
            sys.name(),
            sys.size()
        )))
    }
}

/// Checks `(f(x_i), x_{i+1}) ∈ D` for every step. A violation is a normal
/// answer; only an empty sequence or an unknown point is an error.
pub fn verify_pseudo_orbit(sys: &FiniteSystem, states: &[usize], d: &Entourage) -> Result<ChainCheck> {
    check_sizes(sys, d)?;
    if states.is_empty() {
        return Err(Error::Precondition("a pseudo-orbit needs at least one state".into()));
    }
    for &s in states {
        sys.carrier().check_point(s)?;
    }
    let mut jumps = Vec::new();
    for (i, w) in states.windows(2).enumerate() {
        let image = sys.apply(w[0]);
        if !d.contains(image, w[1]) {
            return Ok(ChainCheck::Violation { index: i, pair: (image, w[1]) });
        }
        if image != w[1] {
            jumps.push(Jump { index: i, pair: (image, w[1]) });
        }
    }
    Ok(ChainCheck::Valid(PseudoOrbit { states: states.to_vec(), validity: d.tag().to_string(), jumps }))
}

/// All `w` with `(f^i(w), x_i) ∈ E` for every `i`, by exhaustive search.
pub fn find_shadowing_points(sys: &FiniteSystem, po: &PseudoOrbit, e: &Entourage) -> Result<Vec<usize>> {
    check_sizes(sys, e)?;
    Ok(shadows_of(sys, &po.states, e).ones().collect())
}

pub(crate) fn shadows_of(sys: &FiniteSystem, states: &[usize], e: &Entourage) -> FixedBitSet {
    let n = sys.size();
    let mut alive = FixedBitSet::with_capacity(n);
    alive.insert_range(..);
    let mut image: Vec<usize> = (0..n).collect();
    for &s in states {
        let ball = e.row(s);
        for (w, &p) in image.iter().enumerate() {
            if alive.contains(w) && !ball.contains(p) {
                alive.set(w, false);
            }
        }
        if alive.is_clear() {
            break;
        }
        for p in image.iter_mut() {
            *p = sys.apply(*p);
        }
    }
    alive
}

/// `σ_0 σ_1 … σ_{n-1}` with each `σ_j` one of the blocks, chosen by the
/// bits of `word` (most significant first, `0` = `xi`, `1` = `eta`).
pub fn block_word(xi: &[usize], eta: &[usize], word: u64, n: usize) -> Vec<usize> {
    (0..n).flat_map(|j| if word >> (n - 1 - j) & 1 == 0 { xi } else { eta }).copied().collect()
}
