//! Zero-mean simulation state `(f̄, ḡ)` together with the conserved means.

use thiserror::Error;

use crate::spectral::{NormOrder, SpectralError, TrigPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("component {0} is not zero-mean")]
    NonZeroMean(&'static str),
    #[error("mean of {name} must be positive, got {value}")]
    NonPositiveMean { name: &'static str, value: f64 },
    #[error("components have different bandwidths ({0} vs {1})")]
    BandwidthMismatch(usize, usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `f = f̄ + ⟨f₀⟩`, `g = ḡ + ⟨g₀⟩` at rescaled time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub fbar: TrigPoly,
    pub gbar: TrigPoly,
    pub mean_f: f64,
    pub mean_g: f64,
    pub t: f64,
}

impl SimState {
    pub fn new(fbar: TrigPoly, gbar: TrigPoly, mean_f: f64, mean_g: f64) -> Result<Self, StateError> {
        if fbar.bandwidth() != gbar.bandwidth() {
            return Err(StateError::BandwidthMismatch(fbar.bandwidth(), gbar.bandwidth()));
        }
        if !fbar.is_zero_mean() {
            return Err(StateError::NonZeroMean("fbar"));
        }
        if !gbar.is_zero_mean() {
            return Err(StateError::NonZeroMean("gbar"));
        }
        for (name, value) in [("f", mean_f), ("g", mean_g)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(StateError::NonPositiveMean { name, value });
            }
        }
        Ok(Self {
            fbar,
            gbar,
            mean_f,
            mean_g,
            t: 0.0,
        })
    }

    /// Splits full film heights into means and zero-mean fluctuations.
    pub fn from_heights(f: &TrigPoly, g: &TrigPoly) -> Result<Self, StateError> {
        Self::new(f.without_mean(), g.without_mean(), f.mean(), g.mean())
    }

    /// Flat equilibrium at the given means.
    pub fn flat(bandwidth: usize, mean_f: f64, mean_g: f64) -> Result<Self, StateError> {
        Self::new(
            TrigPoly::zeros(bandwidth),
            TrigPoly::zeros(bandwidth),
            mean_f,
            mean_g,
        )
    }

    pub fn bandwidth(&self) -> usize {
        self.fbar.bandwidth()
    }

    /// Reconstructed film heights `(f, g)`.
    pub fn heights(&self) -> (TrigPoly, TrigPoly) {
        let k = self.bandwidth();
        (
            &self.fbar + &TrigPoly::constant(k, self.mean_f),
            &self.gbar + &TrigPoly::constant(k, self.mean_g),
        )
    }

    /// `𝓔_s(f̄, ḡ) = ‖f̄‖_{Ȧ^s} + ‖ḡ‖_{Ȧ^s}`.
    pub fn wiener_energy(&self, order: impl Into<NormOrder>) -> f64 {
        let order = order.into();
        // Components are zero-mean by construction.
        self.fbar.wiener_norm(order).unwrap_or(f64::NAN)
            + self.gbar.wiener_norm(order).unwrap_or(f64::NAN)
    }

    /// `E_s(f̄, ḡ) = ‖f̄‖²_{Ḣ^s} + ‖ḡ‖²_{Ḣ^s}`.
    pub fn sobolev_energy(&self, order: impl Into<NormOrder>) -> f64 {
        let order = order.into();
        self.fbar.sobolev_norm(order).unwrap_or(f64::NAN).powi(2)
            + self.gbar.sobolev_norm(order).unwrap_or(f64::NAN).powi(2)
    }

    /// `𝓔ₙ(f̄, ḡ) = ‖∂ₓⁿf̄‖_{L∞} + ‖∂ₓⁿḡ‖_{L∞}`.
    pub fn sup_energy(&self, n: u32) -> f64 {
        self.fbar.sup_norm_deriv(n) + self.gbar.sup_norm_deriv(n)
    }

    /// `𝓔₀` of the current state.
    pub fn e0(&self) -> f64 {
        self.wiener_energy(0)
    }

    /// Same state at a different bandwidth (projection or zero padding).
    pub fn with_bandwidth(&self, bandwidth: usize) -> Self {
        Self {
            fbar: self.fbar.project(bandwidth),
            gbar: self.gbar.project(bandwidth),
            ..self.clone()
        }
    }

    pub fn is_finite(&self) -> bool {
        self.fbar.is_finite() && self.gbar.is_finite()
    }
}
