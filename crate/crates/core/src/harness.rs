//! Experiment orchestration behind the command-line tool: certificate
//! checks, audited runs, parameter sweeps, refinement studies and the
//! randomized verification suites.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certificates::{self, CertificateReport};
use crate::config::{self, ConfigError, GateName, RunConfig};
use crate::diagnostics::{
    self, format_number, DecayFit, DiagnosticsConfig, DiagnosticsError, DiagnosticsSeries,
    Dissipation, EnergyAudit, EnvelopeAudit, Functional, SobolevAudit,
};
use crate::model::Model;
use crate::state::SimState;
use crate::timestepper::{self, StepError, StepperConfig};
use crate::verify::{self, VerifyOptions, VerifyReport};

/// Version of the report document layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Largest admissible `|û(0)|` of either component at any sample.
pub const MASS_TOLERANCE: f64 = 1e-13;

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Failed = 1,
    ConfigError = 2,
    NumericalFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            ExitStatus::Success
        } else {
            ExitStatus::Failed
        }
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("required gates failed: {0} (use --force to run anyway)")]
    GateFailed(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] StepError),
    #[error("diagnostics: {0}")]
    Diagnostics(#[from] DiagnosticsError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot serialize report: {0}")]
    Serialize(#[from] toml::ser::Error),
}

impl HarnessError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            HarnessError::Config(_) => ExitStatus::ConfigError,
            HarnessError::GateFailed(_) => ExitStatus::Failed,
            HarnessError::Numerical(StepError::InvalidConfig(_))
            | HarnessError::Numerical(StepError::BandwidthMismatch { .. }) => {
                ExitStatus::ConfigError
            }
            HarnessError::Numerical(_) | HarnessError::Diagnostics(_) => {
                ExitStatus::NumericalFailure
            }
            HarnessError::Io { .. } | HarnessError::Serialize(_) => ExitStatus::ConfigError,
        }
    }
}

/// Options shared by every command.
#[derive(Clone, Debug, Default)]
pub struct CommandOptions {
    pub seed: Option<u64>,
    pub force: bool,
}

/// Names of the required gates that failed.
pub fn failed_gates(report: &CertificateReport, required: &[GateName]) -> Vec<GateName> {
    required
        .iter()
        .copied()
        .filter(|g| {
            !match g {
                GateName::Smallness => report.gates.smallness,
                GateName::WienerDecay => report.gates.wiener_decay,
                GateName::SobolevPropagation => report.gates.sobolev_propagation,
            }
        })
        .collect()
}

fn gate_list(gates: &[GateName]) -> String {
    gates
        .iter()
        .map(|g| match g {
            GateName::Smallness => "smallness",
            GateName::WienerDecay => "wiener_decay",
            GateName::SobolevPropagation => "sobolev_propagation",
        })
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    pub required: Vec<GateName>,
    pub report: CertificateReport,
}

impl CheckOutcome {
    pub fn exit_status(&self) -> ExitStatus {
        ExitStatus::from_pass(self.passed)
    }
}

/// Evaluates the certificates of the configured initial datum.
pub fn check(cfg: &RunConfig, opts: &CommandOptions) -> Result<CheckOutcome, HarnessError> {
    let exp = cfg.build(opts.seed)?;
    let report = certificates::evaluate(&exp.initial, &exp.model);
    let passed = failed_gates(&report, &cfg.check.require).is_empty();
    Ok(CheckOutcome {
        passed,
        required: cfg.check.require.clone(),
        report,
    })
}

/// Weighted dissipation of the Wiener energy inequality for `report`.
pub fn dissipation_for(model: &Model, report: &CertificateReport) -> Dissipation {
    let terms = match (&report.muskat, &report.stokes) {
        (Some(m), _) => match m.delta_a {
            Some(delta_a) => vec![(delta_a, 4), (m.delta_b, 2)],
            None => vec![(m.delta_b, 2)],
        },
        (_, Some(s)) => vec![(s.epsilon, model.dissipation_order())],
        _ => Vec::new(),
    };
    Dissipation { terms }
}

/// Orders `(low, high)` of the Sobolev propagation estimate: `(ζ+1)/2` and
/// `ζ+1` where `ζ+1` is the dissipation order.
pub fn sobolev_orders(model: &Model) -> (u32, u32) {
    let high = model.dissipation_order();
    (high / 2, high)
}

/// Diagnostics configuration extended with every functional the audits use.
pub fn audit_diagnostics(model: &Model, base: &DiagnosticsConfig) -> DiagnosticsConfig {
    let (low, high) = sobolev_orders(model);
    let mut cfg = base
        .clone()
        .with_sobolev_order(1.0)
        .with_sobolev_order(low as f64)
        .with_sobolev_order(((low + high) / 2) as f64)
        .with_sobolev_order(high as f64);
    for order in [0.0, 2.0, high as f64] {
        cfg = cfg.with_wiener_order(order);
    }
    cfg
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MassAudit {
    pub pass: bool,
    pub max_abs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PositivityAudit {
    pub pass: bool,
    pub min_f: f64,
    pub min_g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunAudits {
    pub passed: bool,
    pub mass: MassAudit,
    pub positivity: PositivityAudit,
    pub envelope: EnvelopeAudit,
    pub energy: EnergyAudit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sobolev: Option<SobolevAudit>,
    /// Fitted decay of `𝓔₀`, absent when the series has a zero sample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_rate: Option<DecayFit>,
}

/// Runs every audit on a finished series.
pub fn audit_series(
    series: &DiagnosticsSeries,
    model: &Model,
    report: &CertificateReport,
    audit: &config::AuditSection,
) -> Result<RunAudits, HarnessError> {
    let max_abs = series
        .samples
        .iter()
        .map(|s| s.mass_f.abs().max(s.mass_g.abs()))
        .fold(0.0, f64::max);
    let mass = MassAudit {
        pass: max_abs <= MASS_TOLERANCE,
        max_abs,
    };
    let min_f = series.samples.iter().map(|s| s.min_f).fold(f64::INFINITY, f64::min);
    let min_g = series.samples.iter().map(|s| s.min_g).fold(f64::INFINITY, f64::min);
    let positivity = PositivityAudit {
        pass: min_f > 0.0 && min_g > 0.0,
        min_f,
        min_g,
    };
    let envelope = diagnostics::audit_decay_envelope(series, report.predicted_rate, audit.envelope_tol)?;
    let energy =
        diagnostics::audit_energy_inequality(series, &dissipation_for(model, report), audit.energy_tol)?;
    let sobolev = if audit.sobolev {
        let (low, high) = sobolev_orders(model);
        let initial = series
            .samples
            .first()
            .and_then(|s| s.sobolev(low as f64))
            .ok_or(DiagnosticsError::EmptySeries)?;
        Some(diagnostics::audit_sobolev_propagation(
            series,
            low,
            high,
            audit.sobolev_growth_factor * initial,
        )?)
    } else {
        None
    };
    let fitted_rate = diagnostics::fit_decay_rate(series, Functional::Wiener(0), audit.skip_fraction).ok();
    let passed = mass.pass
        && positivity.pass
        && envelope.pass
        && energy.pass
        && sobolev.as_ref().is_none_or(|s| s.pass);
    Ok(RunAudits {
        passed,
        mass,
        positivity,
        envelope,
        energy,
        sobolev,
        fitted_rate,
    })
}

/// Observed stand-ins for the non-explicit constants of the Sobolev
/// estimate `d/dt E_low + δ₁ E_high + δ₂ E_mid ≤ c (E_low + 1) 𝓔_high`:
/// `δ₁` and `δ₂` are the largest weights for which `d/dt E_low + δ E ≤ 0`
/// holds at every interior sample, and `c` is the fitted decay rate of `E₁`.
pub fn empirical_fits(
    series: &DiagnosticsSeries,
    model: &Model,
    skip_fraction: f64,
) -> certificates::EmpiricalFits {
    let (low, high) = sobolev_orders(model);
    let mid = (low + high) / 2;
    let t = series.times();
    let largest_weight = |order: u32| -> Option<f64> {
        let e_low = series.values(Functional::Sobolev(low)).ok()?;
        let e = series.values(Functional::Sobolev(order)).ok()?;
        let mut best = f64::INFINITY;
        for i in 1..t.len().saturating_sub(1) {
            if e[i] <= 0.0 {
                return None;
            }
            let derivative = (e_low[i + 1] - e_low[i - 1]) / (t[i + 1] - t[i - 1]);
            best = best.min(-derivative / e[i]);
        }
        best.is_finite().then_some(best)
    };
    certificates::EmpiricalFits {
        fitted_delta1: largest_weight(high),
        fitted_delta2: largest_weight(mid),
        fitted_c: diagnostics::fit_decay_rate(series, Functional::Sobolev(1), skip_fraction)
            .ok()
            .map(|f| f.rate),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub model: String,
    pub scheme: String,
    pub dt: f64,
    pub bandwidth: usize,
    pub t_end: f64,
    pub steps: u64,
    pub sample_every: u64,
    pub samples: usize,
    /// Physical time per unit of solver time is `1 / time_scale`.
    pub time_scale: f64,
    pub forced: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub check: CheckOutcome,
    pub summary: RunSummary,
    pub series: DiagnosticsSeries,
    pub final_state: SimState,
    pub audits: RunAudits,
}

impl RunOutcome {
    pub fn exit_status(&self) -> ExitStatus {
        ExitStatus::from_pass(self.audits.passed)
    }
}

/// Integrates the configured datum to `t_end` and audits the trajectory.
/// Refuses to start when a required gate fails, unless forced.
pub fn run(cfg: &RunConfig, opts: &CommandOptions) -> Result<RunOutcome, HarnessError> {
    let stepper = cfg.stepper()?.clone();
    let exp = cfg.build(opts.seed)?;
    let mut check = check(cfg, opts)?;
    let failed = failed_gates(&check.report, &cfg.check.require);
    if !failed.is_empty() && !opts.force {
        return Err(HarnessError::GateFailed(gate_list(&failed)));
    }
    let diag = audit_diagnostics(&exp.model, &cfg.diagnostics);
    let (final_state, series) = timestepper::integrate(&exp.initial, &stepper, &exp.model, &diag)?;
    let audits = audit_series(&series, &exp.model, &check.report, &cfg.audit)?;
    check.report.empirical = empirical_fits(&series, &exp.model, cfg.audit.skip_fraction);
    let summary = RunSummary {
        model: exp.model.kind().name().into(),
        scheme: stepper.scheme.name().into(),
        dt: stepper.dt,
        bandwidth: stepper.bandwidth,
        t_end: stepper.t_end,
        steps: stepper.steps_for(stepper.t_end),
        sample_every: stepper.sample_every,
        samples: series.samples.len(),
        time_scale: exp.time_scale,
        forced: opts.force && !failed.is_empty(),
    };
    Ok(RunOutcome {
        check,
        summary,
        series,
        final_state,
        audits,
    })
}

/// One grid point of a sweep. Failures are recorded, not propagated.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub coordinates: Vec<f64>,
    pub report: Option<CertificateReport>,
    pub fitted_rate: Option<f64>,
    pub audits_passed: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub keys: Vec<String>,
    pub rows: Vec<SweepRow>,
}

/// Grid points in lexicographic index order, first axis slowest.
pub fn grid_points(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for values in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

/// Evaluates certificates (and optionally short audited runs) over the
/// cartesian grid of the `[sweep]` axes. Without a `[sweep]` section the
/// grid is the single configured point.
pub fn sweep(cfg: &RunConfig, table: &toml::Table, opts: &CommandOptions) -> Result<SweepOutcome, HarnessError> {
    let (keys, axes, with_runs) = match &cfg.sweep {
        Some(s) => (
            s.axis.iter().map(|a| a.key.clone()).collect::<Vec<_>>(),
            s.axis.iter().map(|a| a.values.clone()).collect::<Vec<_>>(),
            s.run,
        ),
        None => (Vec::new(), Vec::new(), false),
    };
    if with_runs {
        cfg.stepper()?;
    }
    let points = grid_points(&axes);
    // Malformed keys are configuration errors, not per-point failures.
    let tables = points
        .iter()
        .map(|p| {
            let mut t = table.clone();
            for (key, &v) in keys.iter().zip(p) {
                config::set_dotted(&mut t, key, v)?;
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    let rows = points
        .into_par_iter()
        .zip(tables)
        .map(|(coordinates, t)| sweep_point(coordinates, t, with_runs, opts))
        .collect();
    Ok(SweepOutcome { keys, rows })
}

fn sweep_point(coordinates: Vec<f64>, table: toml::Table, with_runs: bool, opts: &CommandOptions) -> SweepRow {
    let mut row = SweepRow {
        coordinates,
        report: None,
        fitted_rate: None,
        audits_passed: None,
        error: None,
    };
    let cfg = match RunConfig::from_table(table) {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let opts = CommandOptions {
        force: true,
        ..opts.clone()
    };
    if with_runs {
        match run(&cfg, &opts) {
            Ok(out) => {
                row.fitted_rate = out.audits.fitted_rate.map(|f| f.rate);
                row.audits_passed = Some(out.audits.passed);
                row.report = Some(out.check.report);
            }
            Err(e) => {
                row.error = Some(e.to_string());
                row.report = check(&cfg, &opts).ok().map(|c| c.report);
            }
        }
    } else {
        match check(&cfg, &opts) {
            Ok(c) => row.report = Some(c.report),
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    row
}

const SWEEP_COLUMNS: [&str; 23] = [
    "e0",
    "smallness_ok",
    "sigma_1a",
    "sigma_2a",
    "sigma_1b",
    "sigma_2b",
    "delta_a",
    "delta_b",
    "sigma_1",
    "sigma_2",
    "epsilon",
    "sobolev_margin_1",
    "sobolev_margin_2",
    "sobolev_proof_margin_1",
    "sobolev_proof_margin_2",
    "c_zeta",
    "gate_smallness",
    "gate_wiener_decay",
    "gate_sobolev_propagation",
    "predicted_rate",
    "fitted_rate",
    "audits_passed",
    "error",
];

fn sweep_cells(row: &SweepRow) -> Vec<String> {
    let num = |x: Option<f64>| x.map(format_number).unwrap_or_default();
    let flag = |x: Option<bool>| x.map(|b| b.to_string()).unwrap_or_default();
    let r = row.report.as_ref();
    let mk = r.and_then(|r| r.muskat.as_ref());
    let st = r.and_then(|r| r.stokes.as_ref());
    let margins: Option<[f64; 2]> = mk
        .and_then(|m| m.capillary_margins.map(|c| c.statement).or(m.gravity_margins))
        .or(st.map(|s| s.sobolev.margins));
    let proof = mk.and_then(|m| m.capillary_margins.map(|c| c.proof));
    let mut error = row.error.clone().unwrap_or_default();
    error.retain(|c| c != ',' && c != '\n');
    vec![
        num(r.map(|r| r.e0)),
        flag(r.map(|r| r.smallness_ok)),
        num(mk.and_then(|m| m.sigma_1a)),
        num(mk.and_then(|m| m.sigma_2a)),
        num(mk.map(|m| m.sigma_1b)),
        num(mk.map(|m| m.sigma_2b)),
        num(mk.and_then(|m| m.delta_a)),
        num(mk.map(|m| m.delta_b)),
        num(st.map(|s| s.sigma_1)),
        num(st.map(|s| s.sigma_2)),
        num(st.map(|s| s.epsilon)),
        num(margins.map(|m| m[0])),
        num(margins.map(|m| m[1])),
        num(proof.map(|m| m[0])),
        num(proof.map(|m| m[1])),
        num(st.map(|s| s.sobolev.c_zeta)),
        flag(r.map(|r| r.gates.smallness)),
        flag(r.map(|r| r.gates.wiener_decay)),
        flag(r.map(|r| r.gates.sobolev_propagation)),
        num(r.map(|r| r.predicted_rate)),
        num(row.fitted_rate),
        flag(row.audits_passed),
        error,
    ]
}

impl SweepOutcome {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self
            .keys
            .iter()
            .map(String::as_str)
            .chain(SWEEP_COLUMNS)
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .coordinates
                .iter()
                .map(|&v| format_number(v))
                .chain(sweep_cells(row))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceLevel {
    pub dt: f64,
    pub steps: u64,
    /// `𝓔₀` of the difference to the next finer level; absent on the finest.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceOutcome {
    pub scheme: String,
    pub bandwidth: usize,
    pub t_end: f64,
    pub levels: Vec<ConvergenceLevel>,
    /// `log₂` ratios of successive differences.
    pub observed_orders: Vec<f64>,
    /// `𝓔₀` distance between the runs at `K` and `2K` with the base step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_difference: Option<f64>,
}

/// `𝓔₀(a − b)` with both states compared at the larger bandwidth.
pub fn state_distance(a: &SimState, b: &SimState) -> f64 {
    let df = a.fbar.axpy(-1.0, &b.fbar);
    let dg = a.gbar.axpy(-1.0, &b.gbar);
    df.wiener_norm(0).unwrap_or(f64::NAN) + dg.wiener_norm(0).unwrap_or(f64::NAN)
}

/// Observed order `log₂(d_i / d_{i+1})`; `NaN` when either difference is 0.
pub fn observed_orders(differences: &[f64]) -> Vec<f64> {
    differences
        .windows(2)
        .map(|w| {
            if w[0] > 0.0 && w[1] > 0.0 {
                (w[0] / w[1]).log2()
            } else {
                f64::NAN
            }
        })
        .collect()
}

/// Self-convergence in `dt` (halving `levels − 1` times) and, optionally,
/// a `K` versus `2K` comparison at the base step.
pub fn convergence(cfg: &RunConfig, opts: &CommandOptions) -> Result<ConvergenceOutcome, HarnessError> {
    let base = cfg.stepper()?.clone();
    let exp = cfg.build(opts.seed)?;
    let levels = cfg.convergence.levels;
    let configs: Vec<StepperConfig> = (0..levels)
        .map(|i| StepperConfig {
            dt: base.dt / f64::from(1u32 << i),
            ..base.clone()
        })
        .collect();
    let finals = configs
        .par_iter()
        .map(|c| timestepper::run_to_end(&exp.initial, c, &exp.model))
        .collect::<Result<Vec<_>, StepError>>()?;
    let differences: Vec<f64> = finals.windows(2).map(|w| state_distance(&w[0], &w[1])).collect();
    let level_rows = configs
        .iter()
        .enumerate()
        .map(|(i, c)| ConvergenceLevel {
            dt: c.dt,
            steps: c.steps_for(c.t_end),
            difference: differences.get(i).copied(),
        })
        .collect();
    let bandwidth_difference = if cfg.convergence.refine_bandwidth {
        let fine_k = 2 * base.bandwidth;
        let fine_initial = exp.initial.with_bandwidth(fine_k);
        let fine_cfg = StepperConfig {
            bandwidth: fine_k,
            ..base.clone()
        };
        let fine = timestepper::run_to_end(&fine_initial, &fine_cfg, &exp.model)?;
        Some(state_distance(&finals[0], &fine))
    } else {
        None
    };
    Ok(ConvergenceOutcome {
        scheme: base.scheme.name().into(),
        bandwidth: base.bandwidth,
        t_end: base.t_end,
        levels: level_rows,
        observed_orders: observed_orders(&differences),
        bandwidth_difference,
    })
}

impl ConvergenceOutcome {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dt,steps,difference,observed_order\n");
        for (i, l) in self.levels.iter().enumerate() {
            let diff = l.difference.map(format_number).unwrap_or_default();
            let order = self
                .observed_orders
                .get(i)
                .map(|&o| format_number(o))
                .unwrap_or_default();
            let _ = writeln!(out, "{},{},{diff},{order}", format_number(l.dt), l.steps);
        }
        out
    }
}

/// Runs the randomized inequality and oracle suites.
pub fn verify(opts: &CommandOptions) -> VerifyReport {
    verify::run_all(&VerifyOptions {
        seed: opts.seed.unwrap_or(verify::DEFAULT_SEED),
        ..VerifyOptions::default()
    })
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    passed: bool,
    #[serde(flatten)]
    body: &'a T,
}

/// TOML report document carrying the schema version.
pub fn report_document<T: Serialize>(command: &str, passed: bool, body: &T) -> Result<String, HarnessError> {
    Ok(toml::to_string(&Document {
        schema_version: SCHEMA_VERSION,
        command,
        passed,
        body,
    })?)
}

#[derive(Serialize)]
struct RunBody<'a> {
    run: &'a RunSummary,
    certificates: &'a CertificateReport,
    audits: &'a RunAudits,
}

impl RunOutcome {
    pub fn report_document(&self) -> Result<String, HarnessError> {
        report_document(
            "run",
            self.audits.passed,
            &RunBody {
                run: &self.summary,
                certificates: &self.check.report,
                audits: &self.audits,
            },
        )
    }
}

#[derive(Serialize)]
struct CheckBody<'a> {
    required: &'a [GateName],
    certificates: &'a CertificateReport,
}

impl CheckOutcome {
    pub fn report_document(&self) -> Result<String, HarnessError> {
        report_document(
            "check",
            self.passed,
            &CheckBody {
                required: &self.required,
                certificates: &self.report,
            },
        )
    }
}

/// Python script plotting `𝓔₀` on a log scale with the predicted envelope.
pub fn plot_script(csv_name: &str, e0: f64, rate: f64) -> String {
    format!(
        r#"import csv
import math

import matplotlib.pyplot as plt

CSV = "{csv_name}"
E0 = {e0:.17e}
RATE = {rate:.17e}

with open(CSV, newline="") as fh:
    rows = list(csv.DictReader(fh))
t = [float(r["t"]) for r in rows]
energy = [float(r["E_wiener_0"]) for r in rows]

fig, ax = plt.subplots()
ax.semilogy(t, energy, label="E_0(t)")
ax.semilogy(t, [E0 * math.exp(-RATE * s) for s in t], "--", label=f"envelope, rate {{RATE:.4g}}")
ax.set_xlabel("t")
ax.set_ylabel("Wiener energy")
ax.legend()
fig.savefig(CSV.rsplit(".", 1)[0] + ".png", dpi=150)
"#
    )
}

/// Writes `contents` to `dir/name`, creating `dir` if needed.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, HarnessError> {
    let io = |path: &Path, source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| io(&path, e))?;
    Ok(path)
}
