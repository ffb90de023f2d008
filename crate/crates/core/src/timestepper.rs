//! Fixed-step time integration: IMEX schemes with per-mode 2×2 implicit
//! solves for the linear part, and classical RK4 as an explicit reference.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{self, DiagnosticsConfig, DiagnosticsSeries, RunMetadata};
use crate::mat2::Mat2;
use crate::model::{apply_symbols, Model};
use crate::spectral::TrigPoly;
use crate::state::SimState;

/// Condition number above which the precomputed inverse is replaced by a
/// pivoted solve at every step.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Ratio `dt‖N‖_Ȧ / ‖state‖_Ȧ` above which a step is flagged as
/// under-resolved.
pub const RESOLUTION_WARNING: f64 = 0.1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Crank–Nicolson on the linear part, Adams–Bashforth 2 on the
    /// nonlinearity (explicit Euler on the first step).
    #[default]
    ImexCnAb2,
    /// Backward Euler on the linear part, explicit Euler on the nonlinearity.
    ImexBe,
    Rk4Explicit,
}

impl Scheme {
    pub fn is_implicit(self) -> bool {
        !matches!(self, Scheme::Rk4Explicit)
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ImexCnAb2 => "imex_cn_ab2",
            Scheme::ImexBe => "imex_be",
            Scheme::Rk4Explicit => "rk4_explicit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub dt: f64,
    #[serde(default)]
    pub scheme: Scheme,
    pub bandwidth: usize,
    pub t_end: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: u64,
    /// Drops the nonlinearity, leaving the constant-coefficient linear flow.
    #[serde(default)]
    pub linear_only: bool,
}

fn default_sample_every() -> u64 {
    1
}

impl StepperConfig {
    pub fn validate(&self) -> Result<(), StepError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(StepError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(StepError::InvalidConfig(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if self.bandwidth < 1 {
            return Err(StepError::InvalidConfig("bandwidth must be at least 1".into()));
        }
        if self.sample_every < 1 {
            return Err(StepError::InvalidConfig("sample_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps needed to cover `duration`.
    pub fn steps_for(&self, duration: f64) -> u64 {
        (duration / self.dt).round().max(0.0) as u64
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("invalid stepper configuration: {0}")]
    InvalidConfig(String),
    #[error("implicit operator is singular at wavenumber {k} (det = {det})")]
    SingularMode { k: usize, det: f64 },
    #[error("non-finite coefficients after the step ending at t = {t}")]
    NonFinite { t: f64 },
    #[error("state bandwidth {state} does not match configured bandwidth {config}")]
    BandwidthMismatch { state: usize, config: usize },
}

/// Implicit solve for one wavenumber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModeSolve {
    Inverse(Mat2),
    /// Ill-conditioned: keep the matrix and solve with pivoting each step.
    Pivoted(Mat2),
}

impl ModeSolve {
    fn apply(&self, x: [Complex64; 2]) -> [Complex64; 2] {
        match self {
            ModeSolve::Inverse(m) => m.apply(x),
            ModeSolve::Pivoted(m) => m.solve(x).expect("checked non-singular at precompute"),
        }
    }
}

/// Per-mode factors of an IMEX linear update
/// `u⁺ = implicit⁻¹ (explicit · u + dt · N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagators {
    pub implicit: Vec<ModeSolve>,
    pub explicit: Vec<Mat2>,
}

impl Propagators {
    /// Linear propagator of mode `k`: `(I − θdtL)⁻¹(I + (1−θ)dtL)`.
    pub fn linear_propagator(&self, k: usize) -> Mat2 {
        let e = self.explicit[k];
        let col = |j: usize| {
            let x = [
                Complex64::new(e.0[0][j], 0.0),
                Complex64::new(e.0[1][j], 0.0),
            ];
            self.implicit[k].apply(x)
        };
        let (c0, c1) = (col(0), col(1));
        Mat2::new(c0[0].re, c1[0].re, c0[1].re, c1[1].re)
    }
}

/// Builds the per-mode implicit factors for the symbols `L(0..=K)`.
pub fn precompute_propagators(
    symbols: &[Mat2],
    dt: f64,
    scheme: Scheme,
) -> Result<Propagators, StepError> {
    let theta = match scheme {
        Scheme::ImexCnAb2 => 0.5,
        Scheme::ImexBe => 1.0,
        Scheme::Rk4Explicit => {
            return Err(StepError::InvalidConfig(
                "explicit scheme has no implicit propagators".into(),
            ))
        }
    };
    let mut implicit = Vec::with_capacity(symbols.len());
    let mut explicit = Vec::with_capacity(symbols.len());
    for (k, l) in symbols.iter().enumerate() {
        let lhs = Mat2::IDENTITY + l.scale(-theta * dt);
        let det = lhs.det();
        let solve = match lhs.inverse() {
            Some(inv) if lhs.condition() <= CONDITION_LIMIT => ModeSolve::Inverse(inv),
            _ => {
                let probe = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
                if det == 0.0 || !det.is_finite() || lhs.solve(probe).is_none() {
                    return Err(StepError::SingularMode { k, det });
                }
                ModeSolve::Pivoted(lhs)
            }
        };
        implicit.push(solve);
        explicit.push(Mat2::IDENTITY + l.scale((1.0 - theta) * dt));
    }
    Ok(Propagators { implicit, explicit })
}

/// Stateful integrator. Holds the previous nonlinearity for AB2, so calling
/// [`Stepper::advance`] repeatedly reproduces a single long run exactly.
#[derive(Clone, Debug)]
pub struct Stepper {
    model: Model,
    cfg: StepperConfig,
    symbols: Vec<Mat2>,
    propagators: Option<Propagators>,
    previous_nonlinear: Option<(TrigPoly, TrigPoly)>,
    steps_taken: u64,
    warned: bool,
}

impl Stepper {
    /// Prepares the integrator for states with the means of `initial`.
    pub fn new(model: Model, cfg: StepperConfig, initial: &SimState) -> Result<Self, StepError> {
        cfg.validate()?;
        if initial.bandwidth() != cfg.bandwidth {
            return Err(StepError::BandwidthMismatch {
                state: initial.bandwidth(),
                config: cfg.bandwidth,
            });
        }
        let symbols: Vec<Mat2> = (0..=cfg.bandwidth)
            .map(|k| model.linear_symbol(k as i64, initial.mean_f, initial.mean_g))
            .collect();
        let propagators = if cfg.scheme.is_implicit() {
            Some(precompute_propagators(&symbols, cfg.dt, cfg.scheme)?)
        } else {
            None
        };
        Ok(Self {
            model,
            cfg,
            symbols,
            propagators,
            previous_nonlinear: None,
            steps_taken: 0,
            warned: false,
        })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn propagators(&self) -> Option<&Propagators> {
        self.propagators.as_ref()
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    fn nonlinear(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        if self.cfg.linear_only {
            let k = s.bandwidth();
            (TrigPoly::zeros(k), TrigPoly::zeros(k))
        } else {
            self.model.nonlinear_rhs(s)
        }
    }

    fn rhs(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        let (lf, lg) = apply_symbols(&s.fbar, &s.gbar, |k| self.symbols[k]);
        if self.cfg.linear_only {
            return (lf, lg);
        }
        let (nf, ng) = self.model.nonlinear_rhs(s);
        (&lf + &nf, &lg + &ng)
    }

    fn check_resolution(&mut self, s: &SimState, n: &(TrigPoly, TrigPoly)) {
        if self.warned {
            return;
        }
        let size = s.e0();
        if size == 0.0 {
            return;
        }
        let n_size = n.0.wiener_norm(0).unwrap_or(0.0) + n.1.wiener_norm(0).unwrap_or(0.0);
        let ratio = self.cfg.dt * n_size / size;
        if ratio > RESOLUTION_WARNING {
            log::warn!(
                "dt·|N|/|u| = {ratio:.3e} at t = {:.6e}: time step may be too large for the nonlinearity",
                s.t
            );
            self.warned = true;
        }
    }

    /// One step of the configured scheme.
    pub fn step(&mut self, s: &SimState) -> Result<SimState, StepError> {
        let dt = self.cfg.dt;
        let (fbar, gbar) = match self.cfg.scheme {
            Scheme::Rk4Explicit => self.rk4(s),
            scheme => {
                let n = self.nonlinear(s);
                self.check_resolution(s, &n);
                let forcing = match (scheme, &self.previous_nonlinear) {
                    (Scheme::ImexCnAb2, Some(prev)) => {
                        (n.0.scale(1.5).axpy(-0.5, &prev.0), n.1.scale(1.5).axpy(-0.5, &prev.1))
                    }
                    _ => n.clone(),
                };
                if scheme == Scheme::ImexCnAb2 {
                    self.previous_nonlinear = Some(n);
                }
                let props = self.propagators.as_ref().expect("implicit scheme");
                self.imex_update(props, s, &forcing, dt)
            }
        };
        let t = s.t + dt;
        self.steps_taken += 1;
        if !(fbar.is_finite() && gbar.is_finite()) {
            return Err(StepError::NonFinite { t });
        }
        Ok(SimState {
            fbar,
            gbar,
            mean_f: s.mean_f,
            mean_g: s.mean_g,
            t,
        })
    }

    fn imex_update(
        &self,
        props: &Propagators,
        s: &SimState,
        forcing: &(TrigPoly, TrigPoly),
        dt: f64,
    ) -> (TrigPoly, TrigPoly) {
        let k_max = s.bandwidth();
        let mut hf = Vec::with_capacity(k_max + 1);
        let mut hg = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let ki = k as i64;
            let [ef, eg] = props.explicit[k].apply([s.fbar.coeff(ki), s.gbar.coeff(ki)]);
            let rhs = [
                ef + forcing.0.coeff(ki) * dt,
                eg + forcing.1.coeff(ki) * dt,
            ];
            let [a, b] = props.implicit[k].apply(rhs);
            hf.push(a);
            hg.push(b);
        }
        hf[0].im = 0.0;
        hg[0].im = 0.0;
        (
            TrigPoly::from_half_spectrum(hf).expect("non-empty spectrum"),
            TrigPoly::from_half_spectrum(hg).expect("non-empty spectrum"),
        )
    }

    fn rk4(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        let dt = self.cfg.dt;
        let shifted = |d: &(TrigPoly, TrigPoly), h: f64| SimState {
            fbar: s.fbar.axpy(h, &d.0),
            gbar: s.gbar.axpy(h, &d.1),
            ..s.clone()
        };
        let k1 = self.rhs(s);
        let k2 = self.rhs(&shifted(&k1, 0.5 * dt));
        let k3 = self.rhs(&shifted(&k2, 0.5 * dt));
        let k4 = self.rhs(&shifted(&k3, dt));
        let combine = |a: &TrigPoly, b: &TrigPoly, c: &TrigPoly, d: &TrigPoly| {
            a.axpy(2.0, b).axpy(2.0, c).axpy(1.0, d)
        };
        let df = combine(&k1.0, &k2.0, &k3.0, &k4.0);
        let dg = combine(&k1.1, &k2.1, &k3.1, &k4.1);
        (s.fbar.axpy(dt / 6.0, &df), s.gbar.axpy(dt / 6.0, &dg))
    }

    /// Takes `n_steps` steps, calling `observer` with the running step count
    /// (counted from this stepper's creation) before the first step and
    /// after each step.
    pub fn advance(
        &mut self,
        s0: &SimState,
        n_steps: u64,
        mut observer: impl FnMut(u64, &SimState),
    ) -> Result<SimState, StepError> {
        let mut s = s0.clone();
        observer(self.steps_taken, &s);
        for _ in 0..n_steps {
            s = self.step(&s)?;
            observer(self.steps_taken, &s);
        }
        Ok(s)
    }

    /// Integrates from `s0` to `t_end` (absolute time), sampling diagnostics
    /// whenever the global step count is a multiple of `sample_every`.
    pub fn integrate_to(
        &mut self,
        s0: &SimState,
        t_end: f64,
        diagnostics: &DiagnosticsConfig,
    ) -> Result<(SimState, DiagnosticsSeries), StepError> {
        let n_steps = self.cfg.steps_for(t_end - s0.t);
        let every = self.cfg.sample_every;
        let mut samples = Vec::new();
        let last = self.advance(s0, n_steps, |step, s| {
            if step % every == 0 {
                samples.push(diagnostics::sample(s, diagnostics));
            }
        })?;
        let series = DiagnosticsSeries {
            metadata: RunMetadata {
                model: self.model.kind(),
                scheme: self.cfg.scheme,
                dt: self.cfg.dt,
                bandwidth: self.cfg.bandwidth,
                sample_every: every,
                mean_f: s0.mean_f,
                mean_g: s0.mean_g,
            },
            samples,
        };
        Ok((last, series))
    }
}

/// Runs `s0` to `cfg.t_end` and records diagnostics.
pub fn integrate(
    s0: &SimState,
    cfg: &StepperConfig,
    model: &Model,
    diagnostics: &DiagnosticsConfig,
) -> Result<(SimState, DiagnosticsSeries), StepError> {
    let mut stepper = Stepper::new(*model, cfg.clone(), s0)?;
    stepper.integrate_to(s0, s0.t + cfg.t_end, diagnostics)
}

/// Final state only, without diagnostics.
pub fn run_to_end(s0: &SimState, cfg: &StepperConfig, model: &Model) -> Result<SimState, StepError> {
    let mut stepper = Stepper::new(*model, cfg.clone(), s0)?;
    let n = cfg.steps_for(cfg.t_end);
    stepper.advance(s0, n, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::muskat::{MuskatConstants, MuskatModel, MuskatVariant};

    fn model() -> Model {
        Model::Muskat(MuskatModel::new(MuskatConstants {
            b: 1.0,
            b_mu: 1.0,
            b_rho: 2.0,
            a: 1.0,
            a_mu: 1.0,
            a_gamma: 2.0,
            variant: MuskatVariant::Capillary,
        }))
    }

    fn cfg(scheme: Scheme, dt: f64, t_end: f64) -> StepperConfig {
        StepperConfig {
            dt,
            scheme,
            bandwidth: 8,
            t_end,
            sample_every: 1,
            linear_only: false,
        }
    }

    #[test]
    fn backward_euler_example_propagator() {
        let l = Mat2::new(-4.0, -2.0, -3.0, -3.0);
        let p = precompute_propagators(&[Mat2::ZERO, l], 0.1, Scheme::ImexBe).unwrap();
        assert_eq!(p.linear_propagator(0), Mat2::IDENTITY);
        let expected = Mat2::new(1.3, -0.2, -0.3, 1.4).scale(1.0 / 1.76);
        let got = p.linear_propagator(1);
        for i in 0..2 {
            for j in 0..2 {
                assert!((got.0[i][j] - expected.0[i][j]).abs() < 1e-15);
            }
        }
        let tiny = precompute_propagators(&[l], 1e-14, Scheme::ImexCnAb2).unwrap();
        let p = tiny.linear_propagator(0);
        assert!((p.0[0][0] - 1.0).abs() < 1e-12 && p.0[0][1].abs() < 1e-12);
    }

    #[test]
    fn singular_mode_reported() {
        // I − dt·L singular when L has eigenvalue 1/dt.
        let l = Mat2::new(10.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            precompute_propagators(&[l], 0.1, Scheme::ImexBe),
            Err(StepError::SingularMode { k: 0, .. })
        ));
    }

    #[test]
    fn zero_state_is_fixed() {
        for scheme in [Scheme::ImexCnAb2, Scheme::ImexBe, Scheme::Rk4Explicit] {
            let s = SimState::flat(8, 1.0, 1.5).unwrap();
            let out = run_to_end(&s, &cfg(scheme, 1e-3, 0.01), &model()).unwrap();
            assert!(out.fbar.is_zero() && out.gbar.is_zero());
        }
    }

    #[test]
    fn zero_horizon_gives_one_sample() {
        let s = SimState::flat(8, 1.0, 1.5).unwrap();
        let (end, series) =
            integrate(&s, &cfg(Scheme::ImexCnAb2, 1e-3, 0.0), &model(), &DiagnosticsConfig::default())
                .unwrap();
        assert_eq!(end, s);
        assert_eq!(series.samples.len(), 1);
    }

    #[test]
    fn blow_up_reports_time() {
        let fbar = TrigPoly::cosine(8, 1, 0.5).unwrap();
        let s = SimState::new(fbar, TrigPoly::zeros(8), 1.0, 1.5).unwrap();
        let err = run_to_end(&s, &cfg(Scheme::Rk4Explicit, 1.0, 50.0), &model()).unwrap_err();
        assert!(matches!(err, StepError::NonFinite { t } if t > 0.0));
    }
}
