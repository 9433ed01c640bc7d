//! Experiment runner: one config in, CSV tables and a JSON report out.

mod config;
mod csv_out;

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub use config::{ExperimentConfig, ExperimentKind};
pub use csv_out::{emit_csv, fmt_num, Table};
use csv_out::{ENTPOINTS_HEADER, ENTROPY_HEADER, EXPANSIVITY_HEADER, SHADOW_HEADER, VALIDATE_HEADER};

use crate::cover::uniform_cover_entropy;
use crate::entropy_points::{check_forward_invariant, check_full_entropy_on_ent, entropy_point_set};
use crate::expansivity::{contraction_check, expansivity_entropy_check, expansivity_search, sensitivity, Sided};
use crate::shadowing::{entropy_certificate, CertificateError, CertificateOptions, ModulusOptions};
use crate::spanning::{uniform_entropy, Mode};
use crate::systems::FiniteSystem;
use crate::uniform::UniformityBase;
use crate::{Error, ExtremalSetResult, Result};

/// Name of the generator behind every sampled procedure.
pub const RNG: &str = "ChaCha8Rng";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Config,
    HypothesisMissing,
    PropertyViolation,
    BudgetDegraded,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Config => 2,
            ExitStatus::HypothesisMissing => 3,
            ExitStatus::PropertyViolation => 4,
            ExitStatus::BudgetDegraded => 5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ExitStatus::Success => "success",
            ExitStatus::Config => "config-error",
            ExitStatus::HypothesisMissing => "hypothesis-missing",
            ExitStatus::PropertyViolation => "property-violation",
            ExitStatus::BudgetDegraded => "budget-degraded",
        }
    }

    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::Precondition(_) => ExitStatus::HypothesisMissing,
            Error::PropertyViolation(_) => ExitStatus::PropertyViolation,
            _ => ExitStatus::Config,
        }
    }

    /// The more severe of two statuses.
    fn max(self, other: ExitStatus) -> ExitStatus {
        let rank = |s: ExitStatus| match s {
            ExitStatus::Success => 0,
            ExitStatus::BudgetDegraded => 1,
            ExitStatus::HypothesisMissing => 2,
            ExitStatus::PropertyViolation => 3,
            ExitStatus::Config => 4,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: ExitStatus,
    /// One-line summary for the terminal.
    pub message: String,
    pub report: Value,
    /// Files written, in order; the JSON report comes last.
    pub files: Vec<PathBuf>,
}

/// What a pipeline hands back before the report is assembled.
struct Outcome {
    status: ExitStatus,
    message: String,
    result: Value,
    tables: Vec<(&'static str, Table)>,
}

impl Outcome {
    fn new(message: impl Into<String>, result: Value) -> Self {
        Outcome { status: ExitStatus::Success, message: message.into(), result, tables: Vec::new() }
    }

    fn flag(&mut self, status: ExitStatus, note: impl Into<String>) {
        self.status = self.status.max(status);
        self.message = format!("{}; {}", self.message, note.into());
    }
}

/// Validates `cfg`, runs its pipeline and writes `<out>/<kind>.csv` and
/// `<out>/report.json`.
///
/// Configuration problems return status 2 and write nothing. Any later
/// failure still writes the report, naming the failure.
pub fn run_experiment(cfg: &ExperimentConfig) -> RunOutcome {
    let prepared = cfg.validate().and_then(|_| {
        let sys = cfg.build_system()?;
        let base = cfg.build_base(&sys)?;
        Ok((sys, base))
    });
    let (sys, base) = match prepared {
        Ok(v) => v,
        Err(e) => {
            return RunOutcome {
                status: ExitStatus::Config,
                message: e.to_string(),
                report: json!({ "status": ExitStatus::Config.label(), "exit_code": 2, "error": e.to_string() }),
                files: Vec::new(),
            }
        }
    };
    let kind = cfg.kind.expect("validated");
    let outcome = match kind {
        ExperimentKind::Validate => run_validate(&sys, &base),
        ExperimentKind::Entropy => run_entropy(cfg, &sys, &base),
        ExperimentKind::Cover => run_cover(cfg, &sys, &base),
        ExperimentKind::Shadow => Ok(run_shadow(cfg, &sys, &base)),
        ExperimentKind::Expansivity => run_expansivity(cfg, &sys, &base),
        ExperimentKind::Entpoints => run_entpoints(cfg, &sys, &base),
    };
    let outcome = outcome.unwrap_or_else(|e| {
        let status = ExitStatus::of_error(&e);
        Outcome { status, message: e.to_string(), result: json!({ "error": e.to_string() }), tables: Vec::new() }
    });
    finish(cfg, kind, &sys, &base, outcome)
}

fn finish(
    cfg: &ExperimentConfig,
    kind: ExperimentKind,
    sys: &FiniteSystem,
    base: &UniformityBase,
    mut o: Outcome,
) -> RunOutcome {
    let mut files = Vec::new();
    let written = fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e)).and_then(|_| {
        for (name, table) in &o.tables {
            let path = cfg.out.join(name);
            emit_csv(table, &path)?;
            files.push(path);
        }
        Ok(())
    });
    if let Err(e) = written {
        o.flag(ExitStatus::Config, e.to_string());
    }
    let report = json!({
        "kind": kind.to_string(),
        "system": sys.name(),
        "carrier_size": sys.size(),
        "scales": base.members().iter().map(|e| e.tag()).collect::<Vec<_>>(),
        "config": serde_json::to_value(cfg).expect("config serializes"),
        "rng": RNG,
        "seed": cfg.seed,
        "status": o.status.label(),
        "exit_code": o.status.code(),
        "message": o.message,
        "files": files.iter().map(|p| file_name(p)).collect::<Vec<_>>(),
        "result": o.result,
    });
    let path = cfg.out.join("report.json");
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match fs::write(&path, text) {
        Ok(()) => files.push(path),
        Err(e) => o.flag(ExitStatus::Config, Error::io(&path, e).to_string()),
    }
    RunOutcome { status: o.status, message: o.message, report, files }
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Zoo names, parameter ranges and expected rates.
pub fn list_systems() -> String {
    crate::systems::catalog()
}

fn run_validate(_sys: &FiniteSystem, base: &UniformityBase) -> Result<Outcome> {
    let axioms = base.validate();
    let mut table = Table::new(&VALIDATE_HEADER);
    for (name, check) in axioms.checks() {
        let witness = check
            .counterexample
            .as_ref()
            .map(|c| serde_json::to_string(c).expect("counterexample serializes"))
            .unwrap_or_default();
        table.push(vec![name.into(), check.pass.to_string(), witness]);
    }
    let mut o = Outcome::new(
        format!("{} scales, axioms {}", base.len(), if axioms.all_pass() { "pass" } else { "fail" }),
        serde_json::to_value(&axioms).expect("axioms serialize"),
    );
    if !axioms.all_pass() {
        o.flag(ExitStatus::PropertyViolation, "uniformity axioms fail");
    }
    o.tables.push(("validate.csv", table));
    Ok(o)
}

fn count_row(system: &str, cell: &ExtremalSetResult) -> Vec<String> {
    vec![
        system.to_string(),
        cell.scale.clone(),
        cell.n.to_string(),
        cell.kind.to_string(),
        cell.cardinality.to_string(),
        cell.exact.to_string(),
        cell.bound_gap.to_string(),
    ]
}

/// Cells whose exact solve ran out of budget.
fn degraded(cells: &[ExtremalSetResult]) -> usize {
    cells.iter().filter(|c| c.mode == Mode::Exact && !c.exact).count()
}

fn run_entropy(cfg: &ExperimentConfig, sys: &FiniteSystem, base: &UniformityBase) -> Result<Outcome> {
    let ue = uniform_entropy(sys, base, &cfg.estimate_options())?;
    let mut table = Table::new(&ENTROPY_HEADER);
    for cell in ue.separated.counts.iter().chain(&ue.spanning.counts) {
        table.push(count_row(sys.name(), cell));
    }
    let violation = entropy_violation(&ue.separated.counts, &ue.spanning.counts);
    let result = json!({
        "rate": ue.rate(),
        "separated_rate": ue.separated.fitted_rate,
        "spanning_rate": ue.spanning.fitted_rate,
        "discrepancy": ue.discrepancy,
        "within_tolerance": ue.within_tolerance,
        "fit_window": ue.separated.fit_window,
        "lower_bound": ue.separated.lower_bound.min(ue.spanning.lower_bound),
        "upper_bound": ue.separated.upper_bound.max(ue.spanning.upper_bound),
        "exact": ue.separated.exact && ue.spanning.exact,
        "per_scale": { "separated": ue.separated.per_scale, "spanning": ue.spanning.per_scale },
        "violation": violation,
    });
    let mut o = Outcome::new(format!("h_u = {} nats", fmt_num(ue.rate())), result);
    if let Some(v) = violation {
        o.flag(ExitStatus::PropertyViolation, v);
    }
    let lost = degraded(&ue.separated.counts) + degraded(&ue.spanning.counts);
    if lost > 0 {
        o.flag(ExitStatus::BudgetDegraded, format!("{lost} cells hit the node budget"));
    }
    o.tables.push(("entropy.csv", table));
    Ok(o)
}

/// `span ≤ sep` per cell and `sep` nondecreasing in `n`, on certified bounds.
fn entropy_violation(sep: &[ExtremalSetResult], span: &[ExtremalSetResult]) -> Option<String> {
    for (s, p) in sep.iter().zip(span) {
        if p.lower() > s.upper() {
            return Some(format!("span({}, {}) = {} > sep = {}", p.n, p.scale, p.lower(), s.upper()));
        }
    }
    for w in sep.windows(2) {
        if w[0].scale == w[1].scale && w[1].n == w[0].n + 1 && w[1].upper() < w[0].lower() {
            return Some(format!("sep({}, {}) decreases in n", w[1].n, w[1].scale));
        }
    }
    None
}

fn run_cover(cfg: &ExperimentConfig, sys: &FiniteSystem, base: &UniformityBase) -> Result<Outcome> {
    let uc = uniform_cover_entropy(sys, base, &cfg.estimate_options())?;
    let mut table = Table::new(&ENTROPY_HEADER);
    for cell in &uc.estimate.counts {
        table.push(count_row(sys.name(), cell));
    }
    let result = json!({
        "rate": uc.estimate.fitted_rate,
        "compact_set": uc.compact_set,
        "fit_window": uc.estimate.fit_window,
        "lower_bound": uc.estimate.lower_bound,
        "upper_bound": uc.estimate.upper_bound,
        "exact": uc.estimate.exact,
        "per_scale": uc.estimate.per_scale,
        "subadditivity_violation": uc.subadditivity_violation,
    });
    let mut o = Outcome::new(format!("h_uc = {} nats", fmt_num(uc.estimate.fitted_rate)), result);
    if let Some(v) = &uc.subadditivity_violation {
        o.flag(ExitStatus::PropertyViolation, v.clone());
    }
    let lost = degraded(&uc.estimate.counts);
    if lost > 0 {
        o.flag(ExitStatus::BudgetDegraded, format!("{lost} cells hit the node budget"));
    }
    o.tables.push(("cover.csv", table));
    Ok(o)
}

fn run_shadow(cfg: &ExperimentConfig, sys: &FiniteSystem, base: &UniformityBase) -> Outcome {
    let opts = CertificateOptions {
        n: cfg.word_length,
        modulus: ModulusOptions {
            chain_length: cfg.chain_length,
            budget: cfg.chain_budget,
            seed: cfg.seed.expect("validated"),
        },
    };
    match entropy_certificate(sys, base, &opts) {
        Ok(cert) => {
            let mut table = Table::new(&SHADOW_HEADER);
            for s in &cert.shadows {
                table.push(vec![s.word.clone(), s.point.to_string(), s.label.clone()]);
            }
            let mut o = Outcome::new(
                format!("{} shadows, bound {} nats", cert.shadows.len(), fmt_num(cert.bound)),
                cert.to_json(),
            );
            o.tables.push(("shadows.csv", table));
            o
        }
        Err(CertificateError::Input(e)) => {
            let mut o = Outcome::new(e.to_string(), json!({ "error": e.to_string() }));
            o.status = ExitStatus::of_error(&e);
            o
        }
        Err(e) => {
            let status = match e {
                CertificateError::SeparationFailed { .. } => ExitStatus::PropertyViolation,
                _ => ExitStatus::HypothesisMissing,
            };
            let mut o =
                Outcome::new(format!("{} ({e})", e.stage()), json!({ "stage": e.stage(), "error": e.to_string() }));
            o.status = status;
            o
        }
    }
}

fn run_expansivity(cfg: &ExperimentConfig, sys: &FiniteSystem, base: &UniformityBase) -> Result<Outcome> {
    let profile = expansivity_search(sys, base, Sided::natural(sys))?;
    let sen = sensitivity(sys, base)?;
    let opts = cfg.estimate_options();
    let mut table = Table::new(&EXPANSIVITY_HEADER);
    for row in &profile.scales {
        table.push(vec![
            row.scale.clone(),
            row.all_gamma_singleton.to_string(),
            row.trivial.to_string(),
            row.generator_pass.map(|b| b.to_string()).unwrap_or_default(),
            row.horizon.to_string(),
        ]);
    }
    let entropy = match profile.largest_nontrivial {
        Some(i) => Some(expansivity_entropy_check(sys, base, base.get(i), &opts)?),
        None => None,
    };
    let contraction = contraction_check(sys, base, &opts)?;
    let message = match profile.largest_nontrivial {
        Some(i) => format!("expansive at `{}`", base.get(i).tag()),
        None => "not expansive at any nontrivial scale".to_string(),
    };
    let result = json!({
        "expansive": profile.is_expansive(),
        "profile": profile,
        "sensitivity": sen,
        "entropy": entropy,
        "contraction": contraction,
    });
    let mut o = Outcome::new(message, result);
    o.tables.push(("expansivity.csv", table));
    Ok(o)
}

fn run_entpoints(cfg: &ExperimentConfig, sys: &FiniteSystem, base: &UniformityBase) -> Result<Outcome> {
    let opts = cfg.estimate_options();
    let ent = entropy_point_set(sys, base, &opts, cfg.threshold, cfg.quantifier)?;
    let mut table = Table::new(&ENTPOINTS_HEADER);
    for p in &ent.profiles {
        for s in &p.per_scale {
            table.push(vec![
                p.point.to_string(),
                s.scale.clone(),
                fmt_num(s.rate),
                s.exact.to_string(),
                p.is_entropy_point.to_string(),
            ]);
        }
    }
    let invariance = check_forward_invariant(sys, &ent.points)?;
    let full =
        if invariance.invariant { Some(check_full_entropy_on_ent(sys, &ent.points, base, &opts)?) } else { None };
    let result = json!({
        "points": ent.points,
        "labels": ent.points.iter().map(|&x| sys.label(x)).collect::<Vec<_>>(),
        "quantifier": ent.quantifier,
        "threshold": cfg.threshold,
        "invariance": invariance,
        "full_entropy": full,
    });
    let mut o = Outcome::new(format!("{} of {} points are entropy points", ent.points.len(), sys.size()), result);
    if let Some(x) = invariance.counterexample {
        o.flag(ExitStatus::PropertyViolation, format!("entropy point {x} maps outside the set"));
    }
    if !table.is_empty() {
        o.tables.push(("entpoints.csv", table));
    }
    Ok(o)
}
