//! Explicit smallness hypotheses and predicted decay rates.
//!
//! Every quantity here is a polynomial in the means, the reduced constants
//! and `𝓔₀ = ‖f̄₀‖_Ȧ + ‖ḡ₀‖_Ȧ`. Gates require strict positivity with no
//! tolerance.

use serde::{Deserialize, Serialize};

use crate::model::{Model, ModelKind};
use crate::muskat::{MuskatConstants, MuskatVariant};
use crate::state::SimState;
use crate::stokes::StokesConstants;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuskatSigmas {
    pub sigma_1a: f64,
    pub sigma_2a: f64,
    pub sigma_1b: f64,
    pub sigma_2b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
}

pub fn muskat_sigmas(c: &MuskatConstants, mean_f: f64, mean_g: f64, e0: f64) -> MuskatSigmas {
    let (f, g) = (mean_f, mean_g);
    let a_loss = (c.a_mu + 2.0 * c.a_gamma + 2.0 * c.a) * e0;
    let b_loss = e0 * (2.0 * c.b_rho + 2.0 * c.b + 4.0 * c.b_mu);
    let sigma_1a = f * c.a_gamma - g * c.a_mu - a_loss;
    let sigma_2a = g * c.a_mu - f * c.a - a_loss;
    let sigma_1b = f * c.b_rho - g * c.b_mu - b_loss;
    let sigma_2b = g * c.b_mu - f * c.b - b_loss;
    MuskatSigmas {
        sigma_1a,
        sigma_2a,
        sigma_1b,
        sigma_2b,
        delta_a: sigma_1a.min(sigma_2a),
        delta_b: sigma_1b.min(sigma_2b),
    }
}

/// Sobolev-propagation margins of the capillary Muskat system.
///
/// `statement` uses the coefficient `A_γ + 13/4 A + 17/4 A_μ`, `proof` the
/// coefficient `√2 A_γ + 9/4 A + (√2 + 9/4) A_μ` that the estimates
/// actually produce. The first entry of each pair leads with `⟨g₀⟩A_μ`, the
/// second with `⟨f₀⟩A_γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapillaryMargins {
    pub statement: [f64; 2],
    pub proof: [f64; 2],
}

pub fn muskat_capillary_sobolev_margins(
    c: &MuskatConstants,
    mean_f: f64,
    mean_g: f64,
    e0: f64,
) -> CapillaryMargins {
    let (f, g) = (mean_f, mean_g);
    let half = (f * c.a + g * c.a_mu) / 2.0;
    let statement_coeff = c.a_gamma + 13.0 / 4.0 * c.a + 17.0 / 4.0 * c.a_mu;
    let sqrt2 = std::f64::consts::SQRT_2;
    let proof_coeff = sqrt2 * c.a_gamma + 9.0 / 4.0 * c.a + (sqrt2 + 9.0 / 4.0) * c.a_mu;
    let pair = |coeff: f64| {
        [
            g * c.a_mu - half - coeff * e0,
            f * c.a_gamma - half - coeff * e0,
        ]
    };
    CapillaryMargins {
        statement: pair(statement_coeff),
        proof: pair(proof_coeff),
    }
}

/// Sobolev-propagation margins of the gravity Muskat system; the first
/// entry leads with `⟨f₀⟩b_ρ`, the second with `⟨g₀⟩b_μ`.
pub fn muskat_gravity_sobolev_margins(
    c: &MuskatConstants,
    mean_f: f64,
    mean_g: f64,
    e0: f64,
) -> [f64; 2] {
    let (f, g) = (mean_f, mean_g);
    let half = (g * c.b_mu + f * c.b) / 2.0;
    let loss = (c.b_rho + c.b_mu + 2.5 * c.b_mu + 2.5 * c.b) * e0;
    [f * c.b_rho - half - loss, g * c.b_mu - half - loss]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesSigmas {
    pub sigma_1: f64,
    pub sigma_2: f64,
    /// `min(Σ₁, Σ₂)`, used as the Wiener decay rate. Only existence of a rate
    /// is guaranteed; this choice follows from the energy
    /// inequality together with `𝓔_{ζ+1} ≥ 𝓔₀` for zero-mean functions.
    pub epsilon: f64,
}

pub fn stokes_sigmas(c: &StokesConstants, mean_f: f64, mean_g: f64, e0: f64) -> StokesSigmas {
    let (f, g, e) = (mean_f, mean_g, e0);
    let (rho, mu) = (c.rho, c.mu);
    let sigma_1 = 2.0 * rho * f.powi(3) + 3.0 * f * f * g * (1.0 - rho)
        - (2.0 * mu * g.powi(3) + 6.0 * f * g * g)
        - e * ((78.0 + 20.0 * rho + 14.0 * mu) * e * e
            + (f * (36.0 * rho + 84.0) + (81.0 + 30.0 * mu + 9.0 * rho) * g) * e)
        - e * ((18.0 * mu + 18.0) * g * g
            + (18.0 * rho + 18.0) * f * f
            + (12.0 * rho + 60.0) * g * f);
    let sigma_2 = 2.0 * mu * g.powi(3) + 6.0 * f * g * g - 2.0 * f.powi(3)
        - e * ((14.0 * mu + 15.0 * rho + 83.0) * e * e
            + ((30.0 * mu + 6.0 * rho + 84.0) * g + (96.0 + 24.0 * rho) * f) * e)
        - e * ((18.0 * mu + 18.0) * g * g + (27.0 + 9.0 * rho) * f * f + (6.0 * rho + 66.0) * f * g);
    StokesSigmas {
        sigma_1,
        sigma_2,
        epsilon: sigma_1.min(sigma_2),
    }
}

/// Sobolev-propagation data of the Stokes system: `𝒞_ζ` and the two margins
/// (`η₁, η₂` for ζ = 3, `κ₁, κ₂` for ζ = 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesMargins {
    pub zeta: u32,
    pub c_zeta: f64,
    pub margins: [f64; 2],
}

pub fn stokes_c_zeta(c: &StokesConstants, mean_f: f64, mean_g: f64, e0: f64) -> f64 {
    let (f, g, e) = (mean_f, mean_g, e0);
    let (rho, mu) = (c.rho, c.mu);
    match c.zeta() {
        1 => {
            0.5 * e * e * (23.0 + 5.0 * rho + 4.0 * mu)
                + 0.5 * e * (f * (36.0 + 12.0 * rho) + g * (33.0 + 3.0 * rho + 4.0 * mu))
                + 0.5 * (f * f * (15.0 + 9.0 * rho) + g * g * (12.0 + 12.0 * mu) + f * g * (42.0 + 6.0 * rho))
        }
        _ => {
            e * e * (32.0 + 55.0 / 8.0 * rho + 7.5 * mu)
                + e * (f * (66.0 + 18.0 * rho) + g * (36.0 + 10.5 * rho + 18.0 * mu))
                + (f * f * (57.0 / 4.0 + 39.0 / 4.0 * rho)
                    + g * g * (13.5 + 7.5 * mu)
                    + f * g * (40.5 + 7.5 * rho))
        }
    }
}

pub fn stokes_sobolev_margins(
    c: &StokesConstants,
    mean_f: f64,
    mean_g: f64,
    e0: f64,
) -> StokesMargins {
    let (f, g) = (mean_f, mean_g);
    let (rho, mu) = (c.rho, c.mu);
    let c_zeta = stokes_c_zeta(c, f, g, e0);
    let cross = 1.5 * (rho - 1.0) * f * f * g;
    let m1 = (2.0 * rho - 1.0) * f.powi(3) - cross - 3.0 * f * g * g - mu * g.powi(3) - e0 * c_zeta;
    let m2 = mu * g.powi(3) + 3.0 * f * g * g - cross - f.powi(3) - e0 * c_zeta;
    StokesMargins {
        zeta: c.zeta(),
        c_zeta,
        margins: [m1, m2],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuskatCertificates {
    /// Capillary block; absent for the gravity variant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_1a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_2a: Option<f64>,
    pub sigma_1b: f64,
    pub sigma_2b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_a: Option<f64>,
    pub delta_b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capillary_margins: Option<CapillaryMargins>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gravity_margins: Option<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesCertificates {
    pub sigma_1: f64,
    pub sigma_2: f64,
    pub epsilon: f64,
    /// Always true: `epsilon` is a derived rate, not one stated explicitly.
    pub epsilon_is_derived: bool,
    pub sobolev: StokesMargins,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gates {
    /// `𝓔₀ < min(⟨f₀⟩, ⟨g₀⟩)`.
    pub smallness: bool,
    /// Hypotheses of global existence with exponential Wiener decay.
    pub wiener_decay: bool,
    /// Additional hypotheses for Sobolev propagation.
    pub sobolev_propagation: bool,
}

/// Fitted stand-ins for constants the estimates leave non-explicit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalFits {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_delta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_delta2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_c: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub model: ModelKind,
    pub mean_f: f64,
    pub mean_g: f64,
    pub e0: f64,
    pub smallness_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub muskat: Option<MuskatCertificates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stokes: Option<StokesCertificates>,
    pub gates: Gates,
    /// Rate `r` of the envelope `𝓔₀(t) ≤ 𝓔₀(0) e^{−rt}`.
    pub predicted_rate: f64,
    pub empirical: EmpiricalFits,
}

/// Necessary condition for positive gravity σ's: the heavier fluid is below.
pub fn heavier_fluid_below(c: &MuskatConstants) -> bool {
    c.b_rho > c.b
}

pub fn evaluate(initial: &SimState, model: &Model) -> CertificateReport {
    let e0 = initial.e0();
    let (mf, mg) = (initial.mean_f, initial.mean_g);
    let smallness_ok = e0 < mf.min(mg);
    let mut gates = Gates {
        smallness: smallness_ok,
        ..Gates::default()
    };
    let (muskat, stokes, predicted_rate) = match model {
        Model::Muskat(m) => {
            let c = &m.constants;
            let s = muskat_sigmas(c, mf, mg, e0);
            let b_ok = s.delta_b > 0.0;
            match c.variant {
                MuskatVariant::Capillary => {
                    let margins = muskat_capillary_sobolev_margins(c, mf, mg, e0);
                    gates.wiener_decay = smallness_ok && b_ok && s.delta_a > 0.0;
                    gates.sobolev_propagation =
                        gates.wiener_decay && margins.statement.iter().all(|&v| v > 0.0);
                    let cert = MuskatCertificates {
                        sigma_1a: Some(s.sigma_1a),
                        sigma_2a: Some(s.sigma_2a),
                        sigma_1b: s.sigma_1b,
                        sigma_2b: s.sigma_2b,
                        delta_a: Some(s.delta_a),
                        delta_b: s.delta_b,
                        capillary_margins: Some(margins),
                        gravity_margins: None,
                    };
                    (Some(cert), None, s.delta_a + s.delta_b)
                }
                MuskatVariant::Gravity => {
                    let margins = muskat_gravity_sobolev_margins(c, mf, mg, e0);
                    gates.wiener_decay = smallness_ok && b_ok;
                    gates.sobolev_propagation =
                        gates.wiener_decay && margins.iter().all(|&v| v > 0.0);
                    let cert = MuskatCertificates {
                        sigma_1a: None,
                        sigma_2a: None,
                        sigma_1b: s.sigma_1b,
                        sigma_2b: s.sigma_2b,
                        delta_a: None,
                        delta_b: s.delta_b,
                        capillary_margins: None,
                        gravity_margins: Some(margins),
                    };
                    (Some(cert), None, s.delta_b)
                }
            }
        }
        Model::Stokes(m) => {
            let c = &m.constants;
            let s = stokes_sigmas(c, mf, mg, e0);
            let sobolev = stokes_sobolev_margins(c, mf, mg, e0);
            gates.wiener_decay = smallness_ok && s.epsilon > 0.0;
            gates.sobolev_propagation =
                gates.wiener_decay && sobolev.margins.iter().all(|&v| v > 0.0);
            let cert = StokesCertificates {
                sigma_1: s.sigma_1,
                sigma_2: s.sigma_2,
                epsilon: s.epsilon,
                epsilon_is_derived: true,
                sobolev,
            };
            (None, Some(cert), s.epsilon)
        }
    };
    CertificateReport {
        model: model.kind(),
        mean_f: mf,
        mean_g: mg,
        e0,
        smallness_ok,
        muskat,
        stokes,
        gates,
        predicted_rate,
        empirical: EmpiricalFits::default(),
    }
}
