//! Energy functionals along trajectories and audits of the decay estimates.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelKind;
use crate::state::SimState;
use crate::timestepper::Scheme;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("series does not record {0}")]
    MissingFunctional(String),
    #[error("fit window holds {0} samples, at least 3 are needed")]
    DegenerateWindow(usize),
    #[error("functional is not positive at t = {0}")]
    NonPositive(f64),
    #[error("series is empty")]
    EmptySeries,
}

/// Which functionals to record at each sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    /// Orders `s` of `𝓔_s = ‖f̄‖_{Ȧ^s} + ‖ḡ‖_{Ȧ^s}`.
    pub wiener_orders: Vec<f64>,
    /// Orders `s` of `E_s = ‖f̄‖²_{Ḣ^s} + ‖ḡ‖²_{Ḣ^s}`.
    pub sobolev_orders: Vec<f64>,
    /// Derivative orders `n` of `‖∂ₓⁿf̄‖_{L∞} + ‖∂ₓⁿḡ‖_{L∞}`.
    pub sup_orders: Vec<u32>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            wiener_orders: vec![0.0, 2.0, 4.0],
            sobolev_orders: vec![1.0, 2.0],
            sup_orders: vec![0],
        }
    }
}

impl DiagnosticsConfig {
    /// Adds a Wiener order if absent, keeping the list sorted.
    pub fn with_wiener_order(mut self, order: f64) -> Self {
        if !self.wiener_orders.contains(&order) {
            self.wiener_orders.push(order);
            self.wiener_orders.sort_by(f64::total_cmp);
        }
        self
    }

    pub fn with_sobolev_order(mut self, order: f64) -> Self {
        if !self.sobolev_orders.contains(&order) {
            self.sobolev_orders.push(order);
            self.sobolev_orders.sort_by(f64::total_cmp);
        }
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        for &s in self.wiener_orders.iter().chain(&self.sobolev_orders) {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(format!("norm order must be finite and non-negative, got {s}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Functional {
    Wiener(u32),
    Sobolev(u32),
    Sup(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSample {
    pub t: f64,
    pub mass_f: f64,
    pub mass_g: f64,
    pub e_wiener: Vec<(f64, f64)>,
    pub e_sobolev: Vec<(f64, f64)>,
    pub e_sup: Vec<(u32, f64)>,
    pub min_f: f64,
    pub min_g: f64,
}

fn lookup(pairs: &[(f64, f64)], order: f64) -> Option<f64> {
    pairs.iter().find(|(s, _)| *s == order).map(|(_, v)| *v)
}

impl DiagnosticsSample {
    pub fn wiener(&self, order: f64) -> Option<f64> {
        lookup(&self.e_wiener, order)
    }

    pub fn sobolev(&self, order: f64) -> Option<f64> {
        lookup(&self.e_sobolev, order)
    }

    pub fn sup(&self, n: u32) -> Option<f64> {
        self.e_sup.iter().find(|(k, _)| *k == n).map(|(_, v)| *v)
    }

    pub fn get(&self, functional: Functional) -> Option<f64> {
        match functional {
            Functional::Wiener(s) => self.wiener(s as f64),
            Functional::Sobolev(s) => self.sobolev(s as f64),
            Functional::Sup(n) => self.sup(n),
        }
    }
}

pub fn sample(s: &SimState, cfg: &DiagnosticsConfig) -> DiagnosticsSample {
    let positivity = check_positivity(s);
    DiagnosticsSample {
        t: s.t,
        mass_f: s.fbar.coeff(0).norm(),
        mass_g: s.gbar.coeff(0).norm(),
        e_wiener: cfg
            .wiener_orders
            .iter()
            .map(|&o| (o, s.wiener_energy(crate::NormOrder::new(o).expect("validated order"))))
            .collect(),
        e_sobolev: cfg
            .sobolev_orders
            .iter()
            .map(|&o| (o, s.sobolev_energy(crate::NormOrder::new(o).expect("validated order"))))
            .collect(),
        e_sup: cfg.sup_orders.iter().map(|&n| (n, s.sup_energy(n))).collect(),
        min_f: positivity.min_f,
        min_g: positivity.min_g,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub model: ModelKind,
    pub scheme: Scheme,
    pub dt: f64,
    pub bandwidth: usize,
    pub sample_every: u64,
    pub mean_f: f64,
    pub mean_g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub metadata: RunMetadata,
    pub samples: Vec<DiagnosticsSample>,
}

/// Formats a double with 17 significant digits.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

impl DiagnosticsSeries {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn values(&self, functional: Functional) -> Result<Vec<f64>, DiagnosticsError> {
        self.samples
            .iter()
            .map(|s| {
                s.get(functional)
                    .ok_or_else(|| DiagnosticsError::MissingFunctional(format!("{functional:?}")))
            })
            .collect()
    }

    /// One row per sample; the column set is taken from the first sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let Some(first) = self.samples.first() else {
            return "t,mass_f,mass_g,min_f,min_g\n".to_string();
        };
        let mut header = vec!["t".to_string(), "mass_f".into(), "mass_g".into()];
        header.extend(first.e_wiener.iter().map(|(s, _)| format!("E_wiener_{s}")));
        header.extend(first.e_sobolev.iter().map(|(s, _)| format!("E_sob_{s}")));
        header.extend(first.e_sup.iter().map(|(n, _)| format!("E_sup_{n}")));
        header.extend(["min_f".to_string(), "min_g".into()]);
        out.push_str(&header.join(","));
        out.push('\n');
        for s in &self.samples {
            let mut row = vec![s.t, s.mass_f, s.mass_g];
            row.extend(s.e_wiener.iter().map(|p| p.1));
            row.extend(s.e_sobolev.iter().map(|p| p.1));
            row.extend(s.e_sup.iter().map(|p| p.1));
            row.extend([s.min_f, s.min_g]);
            let cells: Vec<String> = row.into_iter().map(format_number).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeAudit {
    pub pass: bool,
    /// Smallest relative slack `1 − 𝓔₀(t) / (𝓔₀(0) e^{−rt} (1 + tol))`;
    /// infinite when the series is identically zero.
    pub worst_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure_t: Option<f64>,
}

/// Checks `𝓔₀(t) ≤ 𝓔₀(0) e^{−rate·t} (1 + tol)` at every sample.
pub fn audit_decay_envelope(
    series: &DiagnosticsSeries,
    rate: f64,
    tol: f64,
) -> Result<EnvelopeAudit, DiagnosticsError> {
    let e0 = series.values(Functional::Wiener(0))?;
    let t = series.times();
    let first = *e0.first().ok_or(DiagnosticsError::EmptySeries)?;
    let t0 = t[0];
    let mut worst = f64::INFINITY;
    let mut first_failure_t = None;
    for (&ti, &v) in t.iter().zip(&e0) {
        let bound = first * (-rate * (ti - t0)).exp() * (1.0 + tol);
        let margin = if bound > 0.0 {
            1.0 - v / bound
        } else if v == 0.0 {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        if margin < 0.0 && first_failure_t.is_none() {
            first_failure_t = Some(ti);
        }
        worst = worst.min(margin);
    }
    Ok(EnvelopeAudit {
        pass: first_failure_t.is_none(),
        worst_margin: worst,
        first_failure_t,
    })
}

/// Weighted dissipation `Σ wᵢ 𝓔_{sᵢ}` in an energy inequality
/// `d/dt 𝓔₀ + Σ wᵢ 𝓔_{sᵢ} ≤ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dissipation {
    pub terms: Vec<(f64, u32)>,
}

impl Dissipation {
    fn top_order(&self) -> u32 {
        self.terms.iter().map(|t| t.1).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyAudit {
    pub pass: bool,
    /// Smallest `tol (1 + 𝓔_top) − (d/dt 𝓔₀ + Σ wᵢ 𝓔_{sᵢ})` over interior
    /// samples; infinite when there are none.
    pub worst_margin: f64,
    pub violations: Vec<f64>,
}

/// Central-difference audit of the energy inequality at interior samples,
/// with additive tolerance `tol (1 + 𝓔_top)` where `top` is the highest
/// dissipation order.
pub fn audit_energy_inequality(
    series: &DiagnosticsSeries,
    dissipation: &Dissipation,
    tol: f64,
) -> Result<EnergyAudit, DiagnosticsError> {
    let t = series.times();
    let e0 = series.values(Functional::Wiener(0))?;
    let top = series.values(Functional::Wiener(dissipation.top_order()))?;
    let terms = dissipation
        .terms
        .iter()
        .map(|&(w, s)| Ok((w, series.values(Functional::Wiener(s))?)))
        .collect::<Result<Vec<_>, DiagnosticsError>>()?;
    let mut worst = f64::INFINITY;
    let mut violations = Vec::new();
    for i in 1..t.len().saturating_sub(1) {
        let derivative = (e0[i + 1] - e0[i - 1]) / (t[i + 1] - t[i - 1]);
        let lhs = derivative + terms.iter().map(|(w, v)| w * v[i]).sum::<f64>();
        let margin = tol * (1.0 + top[i]) - lhs;
        if margin < 0.0 {
            violations.push(t[i]);
        }
        worst = worst.min(margin);
    }
    Ok(EnergyAudit {
        pass: violations.is_empty(),
        worst_margin: worst,
        violations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    /// Fitted `log` of the functional at the window start.
    pub intercept: f64,
    /// Root-mean-square residual of the log-linear fit.
    pub residual: f64,
    pub samples: usize,
}

/// Default share of the horizon excluded from rate fits.
pub const DEFAULT_SKIP_FRACTION: f64 = 0.05;

/// Least-squares fit of `log v(t) ≈ a − rate·t` on raw data.
pub fn fit_exponential(t: &[f64], v: &[f64]) -> Result<DecayFit, DiagnosticsError> {
    let n = t.len();
    if n < 3 {
        return Err(DiagnosticsError::DegenerateWindow(n));
    }
    if let Some(i) = v.iter().position(|&x| x.is_nan() || x <= 0.0) {
        return Err(DiagnosticsError::NonPositive(t[i]));
    }
    let logs: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    let nf = n as f64;
    let t_mean = t.iter().sum::<f64>() / nf;
    let y_mean = logs.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    // Offsets from the first value keep constant data exactly flat.
    for (&ti, &yi) in t.iter().zip(&logs) {
        sxy += (ti - t_mean) * (yi - logs[0]);
        sxx += (ti - t_mean) * (ti - t_mean);
    }
    if sxx == 0.0 {
        return Err(DiagnosticsError::DegenerateWindow(1));
    }
    let slope = sxy / sxx;
    let intercept_at_mean = y_mean;
    let ss: f64 = t
        .iter()
        .zip(&logs)
        .map(|(&ti, &yi)| {
            let r = yi - (intercept_at_mean + slope * (ti - t_mean));
            r * r
        })
        .sum();
    // `+ 0.0` turns a negative zero into zero for constant data.
    Ok(DecayFit {
        rate: -slope + 0.0,
        intercept: intercept_at_mean + slope * (t[0] - t_mean),
        residual: (ss / nf).sqrt(),
        samples: n,
    })
}

/// Fits a decay rate to `functional`, skipping the first `skip_fraction` of
/// the time horizon.
pub fn fit_decay_rate(
    series: &DiagnosticsSeries,
    functional: Functional,
    skip_fraction: f64,
) -> Result<DecayFit, DiagnosticsError> {
    let t = series.times();
    let v = series.values(functional)?;
    let (Some(&t0), Some(&t1)) = (t.first(), t.last()) else {
        return Err(DiagnosticsError::EmptySeries);
    };
    let start = t0 + skip_fraction * (t1 - t0);
    let (tw, vw): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(&v)
        .filter(|(&ti, _)| ti >= start)
        .map(|(a, b)| (*a, *b))
        .unzip();
    fit_exponential(&tw, &vw)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevAudit {
    pub pass: bool,
    pub sup_low: f64,
    pub bound: f64,
    /// Trapezoidal integral of the high-order functional over the run.
    pub integral_high: f64,
    /// Mean of the high-order functional over the last quarter of the run
    /// divided by its mean over the first quarter.
    pub tail_ratio: f64,
}

/// Checks `sup_t E_low(t) ≤ bound` and that the running integral of
/// `E_high` levels off (its late increments do not exceed its early ones).
pub fn audit_sobolev_propagation(
    series: &DiagnosticsSeries,
    low_order: u32,
    high_order: u32,
    bound: f64,
) -> Result<SobolevAudit, DiagnosticsError> {
    let t = series.times();
    let low = series.values(Functional::Sobolev(low_order))?;
    let high = series.values(Functional::Sobolev(high_order))?;
    if t.is_empty() {
        return Err(DiagnosticsError::EmptySeries);
    }
    let sup_low = low.iter().copied().fold(0.0, f64::max);
    let integral_high: f64 = t
        .windows(2)
        .zip(high.windows(2))
        .map(|(tw, hw)| 0.5 * (tw[1] - tw[0]) * (hw[0] + hw[1]))
        .sum();
    let quarter = (t.len() / 4).max(1);
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let early = mean(&high[..quarter]);
    let late = mean(&high[high.len() - quarter..]);
    let tail_ratio = if early > 0.0 {
        late / early
    } else if late == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(SobolevAudit {
        pass: sup_low <= bound && tail_ratio <= 1.0 && integral_high.is_finite(),
        sup_low,
        bound,
        integral_high,
        tail_ratio,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Positivity {
    pub min_f: f64,
    pub min_g: f64,
    pub ok: bool,
}

/// Minima of the reconstructed heights `f̄ + ⟨f₀⟩` and `ḡ + ⟨g₀⟩`.
pub fn check_positivity(s: &SimState) -> Positivity {
    let min_f = s.fbar.min_value() + s.mean_f;
    let min_g = s.gbar.min_value() + s.mean_g;
    Positivity {
        min_f,
        min_g,
        ok: min_f > 0.0 && min_g > 0.0,
    }
}
