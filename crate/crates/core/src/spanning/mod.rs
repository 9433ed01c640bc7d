//! Separated and spanning sets, their growth rates and uniform entropy.
//!
//! For an entourage `E` and a window `n`, the Bowen relation
//! `B = ⋂_{i<n} F^{-i}(E)` decides everything: a set is `(n, E)`-separated
//! when no two of its points are `B`-related, and `(n, E)`-spanning when the
//! `B`-balls around its points cover the carrier. Maximum separated sets are
//! found by a clique search on the complement of `B`, minimum spanning sets by
//! set cover over the `B`-balls.

mod clique;
mod rate;
pub(crate) mod setcover;

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

pub use rate::{default_window, growth_rate, GrowthRate};

use crate::systems::FiniteSystem;
use crate::uniform::{BowenSequence, Entourage};
use crate::{par, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Separated,
    Spanning,
    /// Minimal subcover of an open cover.
    Cover,
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SetKind::Separated => "separated",
            SetKind::Spanning => "spanning",
            SetKind::Cover => "cover",
        })
    }
}

impl FromStr for SetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separated" => Ok(SetKind::Separated),
            "spanning" => Ok(SetKind::Spanning),
            "cover" => Ok(SetKind::Cover),
            _ => Err(Error::Config(format!("unknown set kind `{s}`"))),
        }
    }
}

/// Solver mode. `Auto` means exact up to [`SolverConfig::auto_exact_limit`]
/// points and greedy above.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Greedy,
    #[default]
    Auto,
}

impl Mode {
    /// `Exact` or `Greedy` for a problem on `size` points.
    pub fn resolve(self, size: usize, cfg: &SolverConfig) -> Mode {
        match self {
            Mode::Auto if size <= cfg.auto_exact_limit => Mode::Exact,
            Mode::Auto => Mode::Greedy,
            m => m,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Greedy => "greedy",
            Mode::Auto => "auto",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "greedy" => Ok(Mode::Greedy),
            "auto" => Ok(Mode::Auto),
            _ => Err(Error::Config(format!("unknown mode `{s}` (expected exact|greedy|auto)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Search nodes an exact solve may expand before settling for bounds.
    pub node_budget: u64,
    /// Largest carrier `Mode::Auto` solves exactly.
    pub auto_exact_limit: usize,
    /// Set-cover instances up to this many elements run without a budget.
    pub unbudgeted_cover_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { node_budget: 10_000_000, auto_exact_limit: 1024, unbudgeted_cover_limit: 24 }
    }
}

/// An extremal separated set, spanning set or subcover for one `(n, scale)` cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalSetResult {
    pub kind: SetKind,
    pub n: usize,
    pub scale: String,
    pub cardinality: usize,
    /// Points (or cover member indices) realising `cardinality`.
    pub witness: Vec<usize>,
    pub exact: bool,
    /// Distance from `cardinality` to the best certified bound on the optimum.
    pub bound_gap: usize,
    /// The mode actually run (`exact` or `greedy`).
    pub mode: Mode,
    pub nodes: u64,
}

impl ExtremalSetResult {
    /// Certified lower bound on the optimum.
    pub fn lower(&self) -> usize {
        match self.kind {
            SetKind::Separated => self.cardinality,
            _ => self.cardinality - self.bound_gap,
        }
    }

    /// Certified upper bound on the optimum.
    pub fn upper(&self) -> usize {
        match self.kind {
            SetKind::Separated => self.cardinality + self.bound_gap,
            _ => self.cardinality,
        }
    }
}

fn check_window(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::OutOfRange("window length n must be at least 1".into()))
    } else {
        Ok(())
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

fn everything(n: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.insert_range(..);
    s
}

/// Maximum subset of `within` (default: the carrier) with no two distinct
/// points related by `bowen`. `n` and the scale tag are recorded only.
pub fn separated_set(
    bowen: &Entourage,
    within: Option<&FixedBitSet>,
    n: usize,
    scale: &str,
    mode: Mode,
    cfg: &SolverConfig,
) -> ExtremalSetResult {
    let all;
    let candidates = match within {
        Some(k) => k,
        None => {
            all = everything(bowen.size());
            &all
        }
    };
    let mode = mode.resolve(bowen.size(), cfg);
    let budget = (candidates.count_ones(..) > cfg.unbudgeted_cover_limit).then_some(cfg.node_budget);
    let out = clique::max_separated(bowen.relation().rows(), candidates, mode == Mode::Exact, budget);
    ExtremalSetResult {
        kind: SetKind::Separated,
        n,
        scale: scale.to_string(),
        cardinality: out.set.len(),
        bound_gap: out.upper - out.set.len(),
        witness: out.set,
        exact: out.exact,
        mode,
        nodes: out.nodes,
    }
}

/// Minimum set of centres whose `bowen`-balls cover `within` (default: the
/// carrier). Centres range over the whole carrier.
pub fn spanning_set(
    bowen: &Entourage,
    within: Option<&FixedBitSet>,
    n: usize,
    scale: &str,
    mode: Mode,
    cfg: &SolverConfig,
) -> ExtremalSetResult {
    let all;
    let universe = match within {
        Some(k) => k,
        None => {
            all = everything(bowen.size());
            &all
        }
    };
    let mode = mode.resolve(bowen.size(), cfg);
    let budget = (universe.count_ones(..) > cfg.unbudgeted_cover_limit).then_some(cfg.node_budget);
    let out = setcover::min_cover(bowen.relation().rows(), universe, mode == Mode::Exact, budget)
        .expect("bowen balls contain their centres");
    ExtremalSetResult {
        kind: SetKind::Spanning,
        n,
        scale: scale.to_string(),
        cardinality: out.chosen.len(),
        bound_gap: out.chosen.len() - out.lower,
        witness: out.chosen,
        exact: out.exact,
        mode,
        nodes: out.nodes,
    }
}

/// `sep(n, E, f)` with a witness.
pub fn max_separated(
    sys: &FiniteSystem,
    e: &Entourage,
    n: usize,
    mode: Mode,
    cfg: &SolverConfig,
) -> Result<ExtremalSetResult> {
    check_sizes(sys, e)?;
    check_window(n)?;
    let bowen = crate::uniform::bowen_relation(e, sys.map(), n);
    Ok(separated_set(&bowen, None, n, e.tag(), mode, cfg))
}

/// `span(n, E, f)` with a witness.
pub fn min_spanning(
    sys: &FiniteSystem,
    e: &Entourage,
    n: usize,
    mode: Mode,
    cfg: &SolverConfig,
) -> Result<ExtremalSetResult> {
    check_sizes(sys, e)?;
    check_window(n)?;
    let bowen = crate::uniform::bowen_relation(e, sys.map(), n);
    Ok(spanning_set(&bowen, None, n, e.tag(), mode, cfg))
}

/// Knobs shared by all entropy estimators.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateOptions {
    /// Counts are computed for `n = 1..=n_max`.
    pub n_max: usize,
    /// Fit window; `None` uses [`default_window`].
    pub window: Option<(usize, usize)>,
    pub mode: Mode,
    pub solver: SolverConfig,
    /// Allowed gap between estimates that should agree.
    pub tolerance: f64,
}

impl EstimateOptions {
    pub fn new(n_max: usize) -> Self {
        EstimateOptions { n_max, window: None, mode: Mode::Auto, solver: SolverConfig::default(), tolerance: 1e-6 }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_window(mut self, window: (usize, usize)) -> Self {
        self.window = Some(window);
        self
    }

    pub fn window_for(&self, carrier_size: usize) -> (usize, usize) {
        self.window.unwrap_or_else(|| default_window(carrier_size, self.n_max))
    }

    fn check(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::OutOfRange("n_max must be at least 1".into()));
        }
        if let Some((lo, hi)) = self.window {
            if lo == 0 || lo > hi || hi > self.n_max {
                return Err(Error::OutOfRange(format!("fit window [{lo}, {hi}] is not inside [1, {}]", self.n_max)));
            }
        }
        Ok(())
    }
}

/// Growth rate at one scale.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRate {
    pub scale: String,
    pub rate: f64,
    pub limsup_proxy: f64,
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

/// Per-`(scale, n)` counts with fitted rates and their supremum over scales.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub method: SetKind,
    /// Cells ordered by scale, then by `n`.
    pub counts: Vec<ExtremalSetResult>,
    pub per_scale: Vec<ScaleRate>,
    /// Supremum of the per-scale rates, in nats.
    pub fitted_rate: f64,
    pub fit_window: (usize, usize),
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Every cell closed exactly.
    pub exact: bool,
}

impl EntropyEstimate {
    /// Assembles an estimate from per-scale runs of cells `n = 1..`.
    ///
    /// Each scale's rate is fitted to the cardinalities found. Its bounds
    /// are the fits to the certified lower and upper count sequences, so
    /// an exact scale has `lower = rate = upper`.
    pub fn from_cells(
        method: SetKind,
        scales: Vec<Vec<ExtremalSetResult>>,
        window: (usize, usize),
    ) -> Result<EntropyEstimate> {
        if scales.is_empty() {
            return Err(Error::Precondition("no scales to estimate over".into()));
        }
        let mut per_scale = Vec::with_capacity(scales.len());
        for cells in &scales {
            let found: Vec<u64> = cells.iter().map(|c| c.cardinality as u64).collect();
            let low: Vec<u64> = cells.iter().map(|c| c.lower().max(1) as u64).collect();
            let high: Vec<u64> = cells.iter().map(|c| c.upper() as u64).collect();
            let fit = growth_rate(&found, window)?;
            let a = growth_rate(&low, window)?.slope;
            let b = growth_rate(&high, window)?.slope;
            per_scale.push(ScaleRate {
                scale: cells.first().map(|c| c.scale.clone()).unwrap_or_default(),
                rate: fit.slope,
                limsup_proxy: fit.limsup_proxy,
                lower: a.min(b).min(fit.slope),
                upper: a.max(b).max(fit.slope),
                exact: cells.iter().all(|c| c.exact),
            });
        }
        let sup = |get: fn(&ScaleRate) -> f64| per_scale.iter().map(get).fold(f64::NEG_INFINITY, f64::max);
        Ok(EntropyEstimate {
            method,
            fitted_rate: sup(|s| s.rate),
            lower_bound: sup(|s| s.lower),
            upper_bound: sup(|s| s.upper),
            exact: per_scale.iter().all(|s| s.exact),
            per_scale,
            counts: scales.into_iter().flatten().collect(),
            fit_window: window,
        })
    }

    /// Index of the scale attaining the fitted rate (first on ties).
    pub fn best_scale(&self) -> usize {
        self.per_scale.iter().position(|s| s.rate == self.fitted_rate).unwrap_or(0)
    }

    /// Counts of one scale, in order of `n`.
    pub fn scale_counts(&self, scale: usize) -> &[ExtremalSetResult] {
        let per = self.counts.len() / self.per_scale.len();
        &self.counts[scale * per..(scale + 1) * per]
    }
}

/// Separated and/or spanning cells `n = 1..=n_max` for one scale, sharing
/// one pass over the Bowen relations.
fn cells_for_scale(
    sys: &FiniteSystem,
    e: &Entourage,
    within: Option<&FixedBitSet>,
    opts: &EstimateOptions,
    kinds: &[SetKind],
) -> Vec<Vec<ExtremalSetResult>> {
    let mut out = vec![Vec::with_capacity(opts.n_max); kinds.len()];
    for (k, bowen) in BowenSequence::new(e, sys.map()).take(opts.n_max).enumerate() {
        for (slot, kind) in kinds.iter().enumerate() {
            let cell = match kind {
                SetKind::Separated => separated_set(&bowen, within, k + 1, e.tag(), opts.mode, &opts.solver),
                _ => spanning_set(&bowen, within, k + 1, e.tag(), opts.mode, &opts.solver),
            };
            out[slot].push(cell);
        }
    }
    out
}

fn estimates(
    sys: &FiniteSystem,
    scales: &[Entourage],
    within: Option<&FixedBitSet>,
    opts: &EstimateOptions,
    kinds: &[SetKind],
) -> Result<Vec<EntropyEstimate>> {
    opts.check()?;
    for e in scales {
        check_sizes(sys, e)?;
    }
    if let Some(k) = within {
        if k.len() != sys.size() || k.is_clear() {
            return Err(Error::Precondition("subset must be a nonempty subset of the carrier".into()));
        }
    }
    let per_scale = par::map_slice(scales, |e| cells_for_scale(sys, e, within, opts, kinds));
    let window = opts.window_for(sys.size());
    (0..kinds.len())
        .map(|slot| {
            let cells = per_scale.iter().map(|s| s[slot].clone()).collect();
            EntropyEstimate::from_cells(kinds[slot], cells, window)
        })
        .collect()
}

/// Separated- or spanning-based entropy estimate over `scales`, optionally
/// restricted to a subset `within` of the carrier.
pub fn entropy_estimate(
    sys: &FiniteSystem,
    scales: &[Entourage],
    kind: SetKind,
    within: Option<&FixedBitSet>,
    opts: &EstimateOptions,
) -> Result<EntropyEstimate> {
    if kind == SetKind::Cover {
        return Err(Error::Precondition("cover estimates live in the cover module".into()));
    }
    Ok(estimates(sys, scales, within, opts, &[kind])?.remove(0))
}

/// `h_sep` and `h_span` over a base and how far apart they are.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformEntropy {
    pub separated: EntropyEstimate,
    pub spanning: EntropyEstimate,
    /// `|h_sep − h_span|`.
    pub discrepancy: f64,
    /// Largest per-scale gap between the separated and spanning rates.
    pub max_scale_discrepancy: f64,
    pub within_tolerance: bool,
}

impl UniformEntropy {
    /// The headline estimate `h_u`, taken from the separated counts.
    pub fn rate(&self) -> f64 {
        self.separated.fitted_rate
    }
}

/// Uniform entropy of `sys` over `scales` (usually a base's members),
/// optionally restricted to `within`.
pub fn uniform_entropy_within(
    sys: &FiniteSystem,
    scales: &[Entourage],
    within: Option<&FixedBitSet>,
    opts: &EstimateOptions,
) -> Result<UniformEntropy> {
    let mut both = estimates(sys, scales, within, opts, &[SetKind::Separated, SetKind::Spanning])?;
    let spanning = both.pop().unwrap();
    let separated = both.pop().unwrap();
    let discrepancy = (separated.fitted_rate - spanning.fitted_rate).abs();
    let max_scale_discrepancy =
        separated.per_scale.iter().zip(&spanning.per_scale).map(|(a, b)| (a.rate - b.rate).abs()).fold(0.0, f64::max);
    Ok(UniformEntropy {
        within_tolerance: discrepancy <= opts.tolerance,
        separated,
        spanning,
        discrepancy,
        max_scale_discrepancy,
    })
}

/// `h_u(f)` over the members of `base`.
pub fn uniform_entropy(
    sys: &FiniteSystem,
    base: &crate::uniform::UniformityBase,
    opts: &EstimateOptions,
) -> Result<UniformEntropy> {
    uniform_entropy_within(sys, base.members(), None, opts)
}

/// One window of the monotonicity comparison between `U ⊆ V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityRow {
    pub n: usize,
    pub sep_u: usize,
    pub sep_v: usize,
    pub span_u: usize,
    pub span_v: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    pub rows: Vec<MonotonicityRow>,
    /// First certified violation, described.
    pub violation: Option<String>,
}

impl MonotonicityReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `sep(n,V) ≤ sep(n,U)`, `span(n,V) ≤ span(n,U)` and
/// `span(n,V) ≤ sep(n,U)` for `n ≤ n_max` with exact counts.
///
/// A cell that did not close within the budget is compared through its
/// certified bounds, so a reported violation is always genuine.
pub fn check_monotonicity(
    sys: &FiniteSystem,
    u: &Entourage,
    v: &Entourage,
    n_max: usize,
    cfg: &SolverConfig,
) -> Result<MonotonicityReport> {
    check_sizes(sys, u)?;
    check_sizes(sys, v)?;
    if !u.is_subset(v) {
        return Err(Error::Precondition(format!("`{}` is not contained in `{}`", u.tag(), v.tag())));
    }
    let opts = EstimateOptions { n_max, window: None, mode: Mode::Exact, solver: *cfg, tolerance: 0.0 };
    opts.check()?;
    let kinds = [SetKind::Separated, SetKind::Spanning];
    let cu = cells_for_scale(sys, u, None, &opts, &kinds);
    let cv = cells_for_scale(sys, v, None, &opts, &kinds);
    let mut rows = Vec::with_capacity(n_max);
    let mut violation = None;
    for k in 0..n_max {
        let (sep_u, span_u) = (&cu[0][k], &cu[1][k]);
        let (sep_v, span_v) = (&cv[0][k], &cv[1][k]);
        let n = k + 1;
        let checks = [
            ("sep(n,V) <= sep(n,U)", sep_v.lower(), sep_u.upper()),
            ("span(n,V) <= span(n,U)", span_v.lower(), span_u.upper()),
            ("span(n,V) <= sep(n,U)", span_v.lower(), sep_u.upper()),
        ];
        if violation.is_none() {
            if let Some((what, l, r)) = checks.iter().find(|c| c.1 > c.2) {
                violation = Some(format!("n = {n}: {what} fails ({l} > {r})"));
            }
        }
        rows.push(MonotonicityRow {
            n,
            sep_u: sep_u.cardinality,
            sep_v: sep_v.cardinality,
            span_u: span_u.cardinality,
            span_v: span_v.cardinality,
            exact: [sep_u, sep_v, span_u, span_v].iter().all(|c| c.exact),
        });
    }
    Ok(MonotonicityReport { rows, violation })
}
