//! Uniform-space entropy on finite dynamical systems.
//!
//! The crate models a compact uniform space by a finite carrier with a
//! finite base of entourages (reflexive, symmetric boolean relations) and
//! computes, exactly where the carrier size allows it:
//!
//! * entourage algebra and the uniformity axioms ([`uniform`]),
//! * finite systems, Bowen metrics and metric entourage families ([`systems`]),
//! * separated/spanning counts and uniform entropy ([`spanning`]),
//! * open-cover entropy and uniform covering entropy ([`cover`]),
//! * expansivity, sensitivity and uniform generators ([`expansivity`]),
//! * pseudo-orbits, shadowing and the positive-entropy certificate ([`shadowing`]),
//! * entropy points ([`entropy_points`]),
//! * the experiment runner behind the `uent` binary ([`report`]).
//!
//! Entropy is always reported in nats. Relation membership is decided with
//! exact rational arithmetic; only growth rates use floating point.

pub mod cover;
pub mod entropy_points;
mod error;
pub mod expansivity;
pub mod par;
pub mod report;
pub mod shadowing;
pub mod spanning;
pub mod systems;
pub mod uniform;

pub use error::{Error, Result};
pub use spanning::{EntropyEstimate, ExtremalSetResult, Mode, SetKind, SolverConfig};
pub use systems::{FiniteSystem, Metric, ScaleGrid};
pub use uniform::{Carrier, Entourage, Relation, UniformityBase};
