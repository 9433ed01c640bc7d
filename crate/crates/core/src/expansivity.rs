//! Γ sets, expansivity neighbourhoods, sensitivity, uniform generators and
//! contractions.
//!
//! On a finite carrier the intersections `⋂_{i∈ℕ} F^{-i}(D)` and
//! `⋂_{i∈ℤ} F^{-i}(D)` are reached after finitely many pullbacks; the step
//! at which the relation stops shrinking is reported as the horizon.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::cover::{self, uniform_cover, Cover};
use crate::spanning::{self, EstimateOptions, SetKind};
use crate::systems::FiniteSystem;
use crate::uniform::{Entourage, Relation, UniformityBase};
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sided {
    /// `i ∈ ℕ`: the set `Γ⁺`.
    Forward,
    /// `i ∈ ℤ`: the set `Γ`; needs an invertible map.
    TwoSided,
}

impl Sided {
    /// Two-sided for invertible systems, forward otherwise.
    pub fn natural(sys: &FiniteSystem) -> Sided {
        if sys.is_invertible() {
            Sided::TwoSided
        } else {
            Sided::Forward
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

/// The saturated intersection of the pullbacks of `D` and the number of
/// refinement steps it took.
#[derive(Clone, Debug)]
pub struct SaturatedRelation {
    pub relation: Entourage,
    pub horizon: usize,
}

/// `⋂_{i≥0} F^{-i}(D)` or `⋂_{i∈ℤ} F^{-i}(D)`, computed as
/// `R_{k+1} = D ∩ F^{-1}(R_k) [∩ F(R_k)]` until `R_{k+1} = R_k`.
pub fn saturate(sys: &FiniteSystem, d: &Entourage, sided: Sided) -> Result<SaturatedRelation> {
    check_sizes(sys, d)?;
    let inverse = match sided {
        Sided::Forward => None,
        Sided::TwoSided => Some(sys.inverse().ok_or_else(|| {
            Error::Precondition(format!("two-sided Γ needs an invertible map; `{}` is not", sys.name()))
        })?),
    };
    let mut current: Relation = d.relation().clone();
    let mut horizon = 0;
    let cap = sys.size() * sys.size();
    loop {
        let mut next = d.relation().intersection(&current.pullback(sys.map()))?;
        if let Some(inv) = inverse {
            next = next.intersection(&current.pullback(inv))?;
        }
        if next == current {
            break;
        }
        current = next;
        horizon += 1;
        assert!(horizon <= cap, "pullback intersection failed to saturate");
    }
    Ok(SaturatedRelation { relation: Entourage::new(current)?.with_name(format!("gamma({})", d.tag())), horizon })
}

/// `Γ(x, D, f)` or `Γ⁺(x, D, f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GammaSet {
    pub center: usize,
    pub scale: String,
    /// Pullback steps until the intersection stabilised.
    pub horizon: usize,
    pub members: Vec<usize>,
    pub sided: Sided,
}

pub fn gamma_set(sys: &FiniteSystem, x: usize, d: &Entourage, sided: Sided) -> Result<GammaSet> {
    sys.carrier().check_point(x)?;
    let sat = saturate(sys, d, sided)?;
    Ok(GammaSet {
        center: x,
        scale: d.tag().to_string(),
        horizon: sat.horizon,
        members: sat.relation.row(x).ones().collect(),
        sided,
    })
}

/// One scale of an expansivity profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScaleProfile {
    pub scale: String,
    /// Every `Γ(x, D)` is `{x}`.
    pub all_gamma_singleton: bool,
    /// `D[x] = {x}` for all `x`: passing here says nothing.
    pub trivial: bool,
    /// `C(D)` passes the generator check (invertible systems only).
    pub generator_pass: Option<bool>,
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansivityProfile {
    pub sided: Sided,
    /// One row per base member, largest first.
    pub scales: Vec<ScaleProfile>,
    /// Largest passing member (the diagonal always passes).
    pub largest: Option<usize>,
    /// Largest passing member that is not the diagonal.
    pub largest_nontrivial: Option<usize>,
}

impl ExpansivityProfile {
    pub fn is_expansive(&self) -> bool {
        self.largest_nontrivial.is_some()
    }
}

/// Scans the base for expansivity neighbourhoods.
pub fn expansivity_search(sys: &FiniteSystem, base: &UniformityBase, sided: Sided) -> Result<ExpansivityProfile> {
    if base.carrier().size() != sys.size() {
        return Err(Error::DomainMismatch("base and system live on different carriers".into()));
    }
    let rows = par::map_slice(base.members(), |d| -> Result<ScaleProfile> {
        let sat = saturate(sys, d, sided)?;
        let generator_pass = if sys.is_invertible() { Some(generator_check(sys, d, None)?.pass) } else { None };
        Ok(ScaleProfile {
            scale: d.tag().to_string(),
            all_gamma_singleton: sat.relation.is_delta(),
            trivial: d.is_delta(),
            generator_pass,
            horizon: sat.horizon,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let largest = rows.iter().position(|r| r.all_gamma_singleton);
    let largest_nontrivial = rows.iter().position(|r| r.all_gamma_singleton && !r.trivial);
    Ok(ExpansivityProfile { sided, scales: rows, largest, largest_nontrivial })
}

/// `sen_V(f)` for each nontrivial `V` of a base and their union `sen(f)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sensitivity {
    pub sided: Sided,
    /// `(scale, sen_V)` per nontrivial base member.
    pub per_scale: Vec<(String, Vec<usize>)>,
    pub union: Vec<usize>,
}

/// `sen_V(f)`: points `x` such that every nontrivial neighbourhood `U[x]`
/// from `neighbourhoods` leaves `Γ(x, V, f)`.
///
/// The diagonal is left out of the quantifier because `Δ[x] = {x}` never
/// leaves `Γ`; with no nontrivial neighbourhoods nothing is sensitive. `Γ`
/// is two-sided for invertible maps and forward otherwise.
pub fn sensitivity_set(sys: &FiniteSystem, v: &Entourage, neighbourhoods: &UniformityBase) -> Result<Vec<usize>> {
    let sided = Sided::natural(sys);
    let gamma = saturate(sys, v, sided)?.relation;
    let nbhd: Vec<&Entourage> = neighbourhoods.members().iter().filter(|u| !u.is_delta()).collect();
    for u in &nbhd {
        check_sizes(sys, u)?;
    }
    if nbhd.is_empty() {
        return Ok(Vec::new());
    }
    Ok((0..sys.size()).filter(|&x| nbhd.iter().all(|u| !u.row(x).is_subset(gamma.row(x)))).collect())
}

/// `sen_V` over every nontrivial member `V` of `base`, with `base` also
/// supplying the neighbourhoods.
pub fn sensitivity(sys: &FiniteSystem, base: &UniformityBase) -> Result<Sensitivity> {
    let per_scale = base
        .members()
        .iter()
        .filter(|v| !v.is_delta())
        .map(|v| Ok((v.tag().to_string(), sensitivity_set(sys, v, base)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut union = FixedBitSet::with_capacity(sys.size());
    for (_, pts) in &per_scale {
        union.extend(pts.iter().copied());
    }
    Ok(Sensitivity { sided: Sided::natural(sys), per_scale, union: union.ones().collect() })
}

/// Outcome of a uniform generator test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorCheck {
    pub pass: bool,
    /// The window `[-W, W]` that was checked.
    pub window: usize,
    /// Window at which the shared-member relation saturates.
    pub saturation: usize,
    /// Two distinct points and, for `n = -W..=W`, a member of `C(U)`
    /// (index into the deduplicated cover) holding both `f^n` images.
    pub witness: Option<GeneratorWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorWitness {
    pub x: usize,
    pub y: usize,
    pub itinerary: Vec<usize>,
}

/// Tests whether `C(U)` is a uniform generator over the window `[-W, W]`.
///
/// Two points lie in a common `⋂_{|n|≤W} f^{-n}(A_n)` exactly when
/// `f^n(x)` and `f^n(y)` share a member of `C(U)` for every `|n| ≤ W`, that
/// is when `(f^n x, f^n y) ∈ U∘U`. The check is therefore that the
/// two-sided intersection of the pullbacks of `U∘U` is the diagonal. The
/// default window is the saturation step, beyond which nothing changes.
pub fn generator_check(sys: &FiniteSystem, u: &Entourage, window: Option<usize>) -> Result<GeneratorCheck> {
    check_sizes(sys, u)?;
    let inv = sys.inverse().ok_or_else(|| {
        Error::Precondition(format!("generator check needs an invertible map; `{}` is not", sys.name()))
    })?;
    let share = Entourage::new(u.compose(u)?)?;
    let sat = saturate(sys, &share, Sided::TwoSided)?;
    let w = window.unwrap_or(sat.horizon);
    let rel = if w >= sat.horizon {
        sat.relation.relation().clone()
    } else {
        let mut r = share.relation().clone();
        for _ in 0..w {
            r = share.relation().intersection(&r.pullback(sys.map()))?.intersection(&r.pullback(inv))?;
        }
        r
    };
    let pair = (0..sys.size()).find_map(|x| rel.row(x).ones().find(|&y| y != x).map(|y| (x, y)));
    let witness = pair.map(|(x, y)| {
        let cover = uniform_cover(u).cover;
        let itinerary = (-(w as i64)..=w as i64)
            .map(|n| {
                let (a, b) = (iterate_signed(sys, x, n), iterate_signed(sys, y, n));
                cover.members().iter().position(|m| m.contains(a) && m.contains(b)).expect("shared member")
            })
            .collect();
        GeneratorWitness { x, y, itinerary }
    });
    Ok(GeneratorCheck { pass: witness.is_none(), window: w, saturation: sat.horizon, witness })
}

/// `f^n(x)` for `n ∈ ℤ`; negative `n` needs the inverse.
fn iterate_signed(sys: &FiniteSystem, mut x: usize, n: i64) -> usize {
    if n >= 0 {
        for _ in 0..n {
            x = sys.apply(x);
        }
    } else {
        let inv = sys.inverse().expect("invertible");
        for _ in 0..-n {
            x = inv[x];
        }
    }
    x
}

/// Smallest `n` at which every member of `⋁_{|i|≤n} f^{-i}(α)` sits in one
/// of its own points' `E`-balls.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorHorizon {
    pub n: usize,
    /// For each join member, the point whose ball contains it.
    pub centres: Vec<usize>,
}

pub fn generator_horizon(sys: &FiniteSystem, alpha: &Cover, e: &Entourage) -> Result<GeneratorHorizon> {
    check_sizes(sys, e)?;
    let inv = sys.inverse().ok_or_else(|| {
        Error::Precondition(format!("generator horizon needs an invertible map; `{}` is not", sys.name()))
    })?;
    let inverse_sys = FiniteSystem::new("inverse", sys.carrier().clone(), inv.to_vec(), None)?;
    let centres_of = |j: &Cover| -> Option<Vec<usize>> {
        j.members().iter().map(|a| a.ones().find(|&x| a.is_subset(e.row(x)))).collect()
    };
    let mut joined = alpha.dedup();
    let mut back = alpha.clone();
    let mut forward = alpha.clone();
    // Joins of a partition stop changing once they stop changing for one
    // step; for other covers the search runs to the carrier size.
    let cap = sys.size().max(1);
    for n in 0..=cap {
        if n > 0 {
            back = back.preimage(sys)?;
            forward = forward.preimage(&inverse_sys)?;
            let next = joined.join(&back)?.join(&forward)?;
            if next.members() == joined.members() && alpha.is_partition() {
                break;
            }
            joined = next;
        }
        if let Some(centres) = centres_of(&joined) {
            return Ok(GeneratorHorizon { n, centres });
        }
    }
    Err(Error::NotFound(format!(
        "joins saturate without every member fitting a `{}` ball; the cover is not a generator at this scale",
        e.tag()
    )))
}

/// Separated rate at an expansivity scale next to the full uniform entropy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansivityEntropyReport {
    pub scale: String,
    pub trivial: bool,
    pub sep_rate: f64,
    pub h_u: f64,
    /// `h_u − sep_rate`.
    pub gap: f64,
    /// `cov(f, D)`: the rate of `C(D)`-joins.
    pub cov_rate: f64,
    pub h_uc: f64,
    pub exact: bool,
}

/// Compares `sep(f, D)` with `h_u(f)` and `cov(f, D)` with `h_uc(f)`.
pub fn expansivity_entropy_check(
    sys: &FiniteSystem,
    base: &UniformityBase,
    d: &Entourage,
    opts: &EstimateOptions,
) -> Result<ExpansivityEntropyReport> {
    let sided = Sided::natural(sys);
    if !saturate(sys, d, sided)?.relation.is_delta() {
        return Err(Error::Precondition(format!("`{}` is not an expansivity entourage", d.tag())));
    }
    let at_d = spanning::entropy_estimate(sys, std::slice::from_ref(d), SetKind::Separated, None, opts)?;
    let h_u = spanning::uniform_entropy(sys, base, opts)?;
    let cov = cover::cover_entropy(sys, &uniform_cover(d).cover, opts)?;
    let h_uc = cover::uniform_cover_entropy(sys, base, opts)?;
    Ok(ExpansivityEntropyReport {
        scale: d.tag().to_string(),
        trivial: d.is_delta(),
        sep_rate: at_d.fitted_rate,
        h_u: h_u.rate(),
        gap: h_u.rate() - at_d.fitted_rate,
        cov_rate: cov.estimate.fitted_rate,
        h_uc: h_uc.estimate.fitted_rate,
        exact: at_d.exact && h_u.separated.exact && cov.estimate.exact && h_uc.estimate.exact,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    pub is_contraction: bool,
    /// For each base member `D`, the index of a witness `U ⊆ D` with
    /// `f(U[x]) ⊆ U[f(x)]`; `None` where none exists. The diagonal is
    /// neither tested nor used as a witness.
    pub witnesses: Vec<Option<usize>>,
    /// Uniform entropy, computed when the map is a contraction.
    pub entropy: Option<f64>,
    /// Whether that entropy is exactly zero.
    pub entropy_is_zero: Option<bool>,
}

fn image_condition(sys: &FiniteSystem, u: &Entourage) -> bool {
    (0..sys.size()).all(|x| {
        let target = u.row(sys.apply(x));
        u.row(x).ones().all(|y| target.contains(sys.apply(y)))
    })
}

/// Whether `f` is a contraction with respect to the base, and if so the
/// uniform entropy it forces to vanish.
pub fn contraction_check(
    sys: &FiniteSystem,
    base: &UniformityBase,
    opts: &EstimateOptions,
) -> Result<ContractionReport> {
    if base.carrier().size() != sys.size() {
        return Err(Error::DomainMismatch("base and system live on different carriers".into()));
    }
    let good: Vec<bool> = par::map_slice(base.members(), |u| !u.is_delta() && image_condition(sys, u));
    let witnesses: Vec<Option<usize>> = base
        .members()
        .iter()
        .map(|d| {
            if d.is_delta() {
                return None;
            }
            (0..base.len()).find(|&i| good[i] && base.get(i).is_subset(d))
        })
        .collect();
    let is_contraction = base.members().iter().zip(&witnesses).all(|(d, w)| d.is_delta() || w.is_some());
    let (entropy, entropy_is_zero) = if is_contraction {
        let u = spanning::uniform_entropy(sys, base, opts)?;
        let h = u.rate().max(u.spanning.fitted_rate);
        (Some(h), Some(h == 0.0))
    } else {
        (None, None)
    };
    Ok(ContractionReport { is_contraction, witnesses, entropy, entropy_is_zero })
}
