use std::collections::HashSet;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::modulus::{shadowing_modulus, ModulusOptions, ShadowingModulus};
use super::recurrence::chain_recurrent_pairs;
use super::{block_word, shadows_of, verify_pseudo_orbit};
use crate::expansivity::sensitivity_set;
use crate::systems::FiniteSystem;
use crate::uniform::{Entourage, UniformityBase};
use crate::{par, Error};

/// Settings for [`entropy_certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateOptions {
    /// Number of blocks per word; `2^n` shadows are produced.
    pub n: usize,
    pub modulus: ModulusOptions,
}

impl CertificateOptions {
    pub fn new(n: usize) -> Self {
        CertificateOptions { n, modulus: ModulusOptions::default() }
    }
}

/// The stage at which the construction stopped. Each variant names the
/// hypothesis of the positive-entropy theorem the system failed to supply.
#[derive(Debug, thiserror::Error)]
pub enum CertificateError {
    #[error("no sensitive point at any nontrivial scale")]
    NoSensitivePoint,
    #[error("no shadowing modulus: {0}")]
    NoShadowingModulus(String),
    #[error("no chain recurrent pair near the anchor separates at scale `{scale}`")]
    NoRecurrentSeparatedPair { scale: String },
    #[error("no separating recurrent pair returns within `{scale}`")]
    NoReturnTime { scale: String },
    #[error("pair ({y}, {z}) with l = {l}: word {word} has no shadow; {candidates} candidate pairs tried")]
    MissingShadow { y: usize, z: usize, l: usize, word: String, candidates: usize },
    #[error("shadows of words {a} and {b} are not ({steps}, {scale})-separated")]
    SeparationFailed { a: String, b: String, steps: usize, scale: String },
    #[error(transparent)]
    Input(#[from] Error),
}

impl CertificateError {
    /// Short name of the missing hypothesis.
    pub fn stage(&self) -> &'static str {
        match self {
            CertificateError::NoSensitivePoint => "sensitivity",
            CertificateError::NoShadowingModulus(_) => "shadowing",
            CertificateError::NoRecurrentSeparatedPair { .. } => "chain-recurrence",
            CertificateError::NoReturnTime { .. } => "return-time",
            CertificateError::MissingShadow { .. } => "shadow",
            CertificateError::SeparationFailed { .. } => "separation",
            CertificateError::Input(_) => "input",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateScales {
    /// Sensitivity scale.
    pub v: String,
    /// Neighbourhood of the anchor that holds every shadow.
    pub c: String,
    /// Shadowing and separation scale, `E³ ⊆ V ∩ C`.
    pub e: String,
    /// Shadowing modulus of `E`.
    pub d: String,
    /// `W² ⊆ D`; also serves as the return tolerance.
    pub w: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowEntry {
    /// Block choices, `0` for `ξ` and `1` for `η`.
    pub word: String,
    pub point: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyCertificate {
    pub anchor: usize,
    pub anchor_label: String,
    pub scales: CertificateScales,
    pub y: usize,
    pub z: usize,
    /// `(f^k(y), f^k(z)) ∉ E³`.
    pub k: usize,
    /// Block length.
    pub l: usize,
    pub n: usize,
    pub xi: Vec<usize>,
    pub eta: Vec<usize>,
    pub shadows: Vec<ShadowEntry>,
    /// Pairs checked for `(nl, E)`-separation.
    pub separated_pairs: usize,
    /// SHA-256 of the separation matrix, row-major upper triangle.
    pub matrix_digest: String,
    /// Every shadow lies in `C[anchor]`.
    pub shadows_in_neighbourhood: bool,
    /// `ln 2 / l`, nats.
    pub bound: f64,
    pub verified: bool,
    pub modulus: ShadowingModulus,
    pub seed: u64,
    pub rng: &'static str,
}

impl EntropyCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("certificate serializes")
    }

    pub fn shadow_points(&self) -> Vec<usize> {
        self.shadows.iter().map(|s| s.point).collect()
    }
}

struct Candidate {
    y: usize,
    z: usize,
    k: usize,
    l: usize,
}

fn word_string(word: u64, n: usize) -> String {
    (0..n).map(|j| if word >> (n - 1 - j) & 1 == 0 { '0' } else { '1' }).collect()
}

/// First `k ≥ 0` with `(f^k(y), f^k(z)) ∉ rel`, following the pair orbit
/// until it repeats.
fn separation_time(sys: &FiniteSystem, y: usize, z: usize, rel: &Entourage) -> Option<usize> {
    let mut seen = HashSet::new();
    let (mut a, mut b) = (y, z);
    let mut k = 0;
    while seen.insert((a, b)) {
        if !rel.contains(a, b) {
            return Some(k);
        }
        a = sys.apply(a);
        b = sys.apply(b);
        k += 1;
    }
    None
}

/// First `l > k` with `(f^l(y), y), (f^l(z), z) ∈ tol`.
fn return_time(sys: &FiniteSystem, y: usize, z: usize, k: usize, tol: &Entourage) -> Option<usize> {
    let (mut a, mut b) = (y, z);
    for _ in 0..=k {
        a = sys.apply(a);
        b = sys.apply(b);
    }
    let mut seen = HashSet::new();
    let mut l = k + 1;
    while seen.insert((a, b)) {
        if tol.contains(a, y) && tol.contains(b, z) {
            return Some(l);
        }
        a = sys.apply(a);
        b = sys.apply(b);
        l += 1;
    }
    None
}

/// Builds the `2^n` shadows of the block construction and checks that they
/// are pairwise `(nl, E)`-separated.
///
/// Stages run in a fixed order: the lowest sensitive point at the largest
/// scale that has one, `C = V`, the largest `E` with `E³ ⊆ V`, the
/// shadowing modulus `D ⊆ E`, the largest `W` with `W² ⊆ D`, and then
/// candidate pairs `y < z` in `W[x]` that are chain recurrent for `W`,
/// ordered by return time and then lexicographically. The first candidate
/// whose words all have shadows is kept.
pub fn entropy_certificate(
    sys: &FiniteSystem,
    base: &UniformityBase,
    opts: &CertificateOptions,
) -> Result<EntropyCertificate, CertificateError> {
    if base.carrier().size() != sys.size() {
        return Err(Error::DomainMismatch("base and system live on different carriers".into()).into());
    }
    if opts.n == 0 || opts.n > 20 {
        return Err(Error::OutOfRange(format!("word length {} outside 1..=20", opts.n)).into());
    }

    let (x, v) = base
        .nontrivial()
        .into_iter()
        .find_map(|i| {
            let v = base.get(i);
            match sensitivity_set(sys, v, base) {
                Ok(pts) => pts.first().map(|&x| Ok((x, v))),
                Err(e) => Some(Err(e)),
            }
        })
        .ok_or(CertificateError::NoSensitivePoint)??;
    let c = v;

    let e_idx = base.largest_where(|e| e.power(3).is_subset(v)).expect("the diagonal qualifies");
    let e = base.get(e_idx);
    let e3 = e.power(3);

    let modulus = shadowing_modulus(sys, base, e, &opts.modulus).map_err(|err| match err {
        Error::NotFound(msg) => CertificateError::NoShadowingModulus(msg),
        other => other.into(),
    })?;
    let d = base.get(modulus.index);
    let w = base.get(base.largest_where(|w| w.power(2).is_subset(d)).expect("the diagonal qualifies"));
    let recurrent = chain_recurrent_pairs(sys, w)?;

    let near: Vec<usize> = w.row(x).ones().collect();
    let mut separating = 0usize;
    let mut candidates = Vec::new();
    for (i, &y) in near.iter().enumerate() {
        for &z in &near[i + 1..] {
            if !w.contains(y, z) || !recurrent.contains(y, z) {
                continue;
            }
            let Some(k) = separation_time(sys, y, z, &e3) else { continue };
            separating += 1;
            if let Some(l) = return_time(sys, y, z, k, w) {
                candidates.push(Candidate { y, z, k, l });
            }
        }
    }
    if separating == 0 {
        return Err(CertificateError::NoRecurrentSeparatedPair { scale: e3_name(e) });
    }
    if candidates.is_empty() {
        return Err(CertificateError::NoReturnTime { scale: w.tag().to_string() });
    }
    candidates.sort_by_key(|c| (c.l, c.y, c.z));

    let n = opts.n;
    let words = 1u64 << n;
    let mut first_failure = None;
    for cand in &candidates {
        let xi = sys.orbit(cand.y, cand.l)?;
        let eta = sys.orbit(cand.z, cand.l)?;
        let shadows = par::map_range(words as usize, |word| {
            let states = block_word(&xi, &eta, word as u64, n);
            match verify_pseudo_orbit(sys, &states, d) {
                Ok(check) if check.is_valid() => Ok(shadows_of(sys, &states, e).minimum()),
                Ok(_) => Err(Error::PropertyViolation(format!(
                    "block word {} is not a `{}`-pseudo-orbit",
                    word_string(word as u64, n),
                    d.tag()
                ))),
                Err(err) => Err(err),
            }
        })
        .into_iter()
        .collect::<Result<Vec<_>, Error>>()?;
        if let Some(missing) = shadows.iter().position(|s| s.is_none()) {
            first_failure.get_or_insert((cand.y, cand.z, cand.l, word_string(missing as u64, n)));
            continue;
        }
        let points: Vec<usize> = shadows.into_iter().map(|s| s.unwrap()).collect();
        return finish(sys, x, [v, c, e, d, w], cand, xi, eta, points, modulus, opts);
    }
    let (y, z, l, word) = first_failure.expect("at least one candidate was tried");
    Err(CertificateError::MissingShadow { y, z, l, word, candidates: candidates.len() })
}

fn e3_name(e: &Entourage) -> String {
    format!("{}^3", e.tag())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    sys: &FiniteSystem,
    x: usize,
    [v, c, e, d, w]: [&Entourage; 5],
    cand: &Candidate,
    xi: Vec<usize>,
    eta: Vec<usize>,
    points: Vec<usize>,
    modulus: ShadowingModulus,
    opts: &CertificateOptions,
) -> Result<EntropyCertificate, CertificateError> {
    let n = opts.n;
    let steps = n * cand.l;
    let orbits: Vec<Vec<usize>> = points.iter().map(|&p| sys.orbit(p, steps)).collect::<crate::Result<_>>()?;
    let mut hasher = Sha256::new();
    let mut pairs = 0;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let separated = (0..steps).any(|i| !e.contains(orbits[a][i], orbits[b][i]));
            hasher.update([separated as u8]);
            pairs += 1;
            if !separated {
                return Err(CertificateError::SeparationFailed {
                    a: word_string(a as u64, n),
                    b: word_string(b as u64, n),
                    steps,
                    scale: e.tag().to_string(),
                });
            }
        }
    }
    let digest: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let shadows = points
        .iter()
        .enumerate()
        .map(|(i, &p)| ShadowEntry { word: word_string(i as u64, n), point: p, label: sys.label(p) })
        .collect();
    Ok(EntropyCertificate {
        anchor: x,
        anchor_label: sys.label(x),
        scales: CertificateScales {
            v: v.tag().to_string(),
            c: c.tag().to_string(),
            e: e.tag().to_string(),
            d: d.tag().to_string(),
            w: w.tag().to_string(),
        },
        y: cand.y,
        z: cand.z,
        k: cand.k,
        l: cand.l,
        n,
        xi,
        eta,
        shadows_in_neighbourhood: points.iter().all(|&p| c.contains(x, p)),
        shadows,
        separated_pairs: pairs,
        matrix_digest: digest,
        bound: std::f64::consts::LN_2 / cand.l as f64,
        verified: true,
        modulus,
        seed: opts.modulus.seed,
        rng: "ChaCha8Rng",
    })
}
