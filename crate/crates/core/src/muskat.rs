//! Thin-film Muskat system in zero-mean cross-diffusion form.
//!
//! After the time rescaling `t ↦ G t / μ₋` the unknowns `f̄ = f − ⟨f₀⟩` and
//! `ḡ = g − ⟨g₀⟩` satisfy
//!
//! ```text
//! ∂t f̄ = −⟨f₀⟩[A_γ ∂⁴f̄ + A ∂⁴ḡ − b_ρ ∂²f̄ − b ∂²ḡ] + N₁
//! ∂t ḡ = −⟨g₀⟩[A_μ ∂⁴f̄ + A_μ ∂⁴ḡ − b_μ ∂²f̄ − b_μ ∂²ḡ] + N₂
//! ```
//!
//! with `N₁ = ∂ₓ P_K[f̄ (−A_γ∂³f̄ − A∂³ḡ + b_ρ∂f̄ + b∂ḡ)]` and
//! `N₂ = ∂ₓ P_K[ḡ (−A_μ∂³f̄ − A_μ∂³ḡ + b_μ∂f̄ + b_μ∂ḡ)]`.

use serde::{Deserialize, Serialize};

use crate::mat2::Mat2;
use crate::model::ParamError;
use crate::spectral::TrigPoly;
use crate::state::SimState;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuskatPhysicalParams {
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub gamma_f: f64,
    pub gamma_h: f64,
    pub gravity: f64,
}

impl MuskatPhysicalParams {
    /// Factor converting physical time into the rescaled time used by the
    /// solver, `t̃ = (G/μ₋) t`.
    pub fn time_scale(&self) -> f64 {
        self.gravity / self.mu_minus
    }

    fn validate(&self) -> Result<(), ParamError> {
        for (name, value) in [
            ("mu_minus", self.mu_minus),
            ("mu_plus", self.mu_plus),
            ("rho_minus", self.rho_minus),
            ("rho_plus", self.rho_plus),
            ("gravity", self.gravity),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ParamError::NonPositive { name, value });
            }
        }
        for (name, value) in [("gamma_f", self.gamma_f), ("gamma_h", self.gamma_h)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(ParamError::Negative { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuskatVariant {
    Capillary,
    Gravity,
}

/// Reduced coefficients of the rescaled system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuskatConstants {
    pub b: f64,
    pub b_mu: f64,
    pub b_rho: f64,
    pub a: f64,
    pub a_mu: f64,
    pub a_gamma: f64,
    pub variant: MuskatVariant,
}

/// `b = ρ₊`, `b_μ = (μ₋/μ₊) b`, `b_ρ = (ρ₋/ρ₊) b`, and for the capillary
/// variant `A = γ_h/G`, `A_μ = (μ₋/μ₊) A`, `A_γ = ((γ_f+γ_h)/γ_h) A`.
pub fn reduce_params(
    p: &MuskatPhysicalParams,
    variant: MuskatVariant,
) -> Result<MuskatConstants, ParamError> {
    p.validate()?;
    let b = p.rho_plus;
    let b_mu = p.mu_minus / p.mu_plus * b;
    let b_rho = p.rho_minus / p.rho_plus * b;
    let (a, a_mu, a_gamma) = match variant {
        MuskatVariant::Capillary => {
            if p.gamma_h <= 0.0 {
                return Err(ParamError::CapillaryNeedsGammaH);
            }
            let a = p.gamma_h / p.gravity;
            (a, p.mu_minus / p.mu_plus * a, (p.gamma_f + p.gamma_h) / p.gamma_h * a)
        }
        MuskatVariant::Gravity => {
            if p.gamma_f != 0.0 || p.gamma_h != 0.0 {
                return Err(ParamError::GravityWithSurfaceTension);
            }
            (0.0, 0.0, 0.0)
        }
    };
    Ok(MuskatConstants {
        b,
        b_mu,
        b_rho,
        a,
        a_mu,
        a_gamma,
        variant,
    })
}

impl MuskatConstants {
    /// Fourier symbol of the linear part at wavenumber `k`.
    pub fn linear_symbol(&self, k: i64, mean_f: f64, mean_g: f64) -> Mat2 {
        let k2 = (k * k) as f64;
        let k4 = k2 * k2;
        Mat2::new(
            -mean_f * (self.a_gamma * k4 + self.b_rho * k2),
            -mean_f * (self.a * k4 + self.b * k2),
            -mean_g * (self.a_mu * k4 + self.b_mu * k2),
            -mean_g * (self.a_mu * k4 + self.b_mu * k2),
        )
    }
}

/// Leading factor of the gravity part of the ḡ-nonlinearity.
///
/// The cross-diffusion form derived from the unsplit system uses `ḡ`; the
/// Galerkin display of the same system writes `f̄`. `G` is the default and
/// the only choice consistent with the unsplit system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum N2bFactor {
    #[default]
    #[serde(rename = "g")]
    G,
    #[serde(rename = "f")]
    F,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MuskatModel {
    pub constants: MuskatConstants,
    pub n2b_factor: N2bFactor,
}

impl MuskatModel {
    pub fn new(constants: MuskatConstants) -> Self {
        Self {
            constants,
            n2b_factor: N2bFactor::G,
        }
    }

    /// `(N_{1,A}+N_{1,b}, N_{2,A}+N_{2,b})` with the Galerkin projection applied
    /// to each bracket before the outer derivative.
    pub fn nonlinear_rhs(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        let c = &self.constants;
        let k = s.bandwidth();
        let f1 = s.fbar.derivative(1);
        let g1 = s.gbar.derivative(1);
        let f3 = s.fbar.derivative(3);
        let g3 = s.gbar.derivative(3);

        let w1 = f3
            .scale(-c.a_gamma)
            .axpy(-c.a, &g3)
            .axpy(c.b_rho, &f1)
            .axpy(c.b, &g1);
        let bracket1 = s.fbar.product(&w1, k);

        let w2a = (&f3 + &g3).scale(-c.a_mu);
        let w2b = (&f1 + &g1).scale(c.b_mu);
        let bracket2 = match self.n2b_factor {
            N2bFactor::G => s.gbar.product(&(&w2a + &w2b), k),
            N2bFactor::F => &s.gbar.product(&w2a, k) + &s.fbar.product(&w2b, k),
        };
        (bracket1.derivative(1), bracket2.derivative(1))
    }

    /// Right-hand side assembled directly from the unsplit system on the full
    /// heights `f = f̄ + ⟨f₀⟩`, `g = ḡ + ⟨g₀⟩`: products at bandwidth `2K`,
    /// then projection to `K`.
    pub fn unsplit_rhs(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        let c = &self.constants;
        let k = s.bandwidth();
        let (f, g) = s.heights();
        let f1 = f.derivative(1);
        let g1 = g.derivative(1);
        let f3 = f.derivative(3);
        let g3 = g.derivative(3);
        let inner_f = f3
            .scale(c.a_gamma)
            .axpy(c.a, &g3)
            .axpy(-c.b_rho, &f1)
            .axpy(-c.b, &g1);
        let inner_g = (&f3 + &g3)
            .scale(c.a_mu)
            .axpy(-c.b_mu, &f1)
            .axpy(-c.b_mu, &g1);
        let flux_f = f.product(&inner_f, 2 * k).project(k);
        let flux_g = g.product(&inner_g, 2 * k).project(k);
        (
            flux_f.derivative(1).scale(-1.0),
            flux_g.derivative(1).scale(-1.0),
        )
    }
}
