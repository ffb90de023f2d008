//! Common interface over the Muskat and Stokes right-hand sides.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mat2::Mat2;
use crate::muskat::{MuskatModel, MuskatVariant};
use crate::spectral::TrigPoly;
use crate::state::SimState;
use crate::stokes::{StokesDrive, StokesModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative and finite, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("capillary variant requires gamma_h > 0")]
    CapillaryNeedsGammaH,
    #[error("gravity variant requires gamma_f = gamma_h = 0")]
    GravityWithSurfaceTension,
    #[error("gravity-driven Stokes flow requires rho_minus > rho_plus (got {rho_minus} <= {rho_plus})")]
    UnstableStratification { rho_minus: f64, rho_plus: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    MuskatCapillary,
    MuskatGravity,
    StokesCapillary,
    StokesGravity,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::MuskatCapillary,
        ModelKind::MuskatGravity,
        ModelKind::StokesCapillary,
        ModelKind::StokesGravity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::MuskatCapillary => "muskat_capillary",
            ModelKind::MuskatGravity => "muskat_gravity",
            ModelKind::StokesCapillary => "stokes_capillary",
            ModelKind::StokesGravity => "stokes_gravity",
        }
    }

    pub fn is_muskat(self) -> bool {
        matches!(self, ModelKind::MuskatCapillary | ModelKind::MuskatGravity)
    }

    pub fn muskat_variant(self) -> Option<MuskatVariant> {
        match self {
            ModelKind::MuskatCapillary => Some(MuskatVariant::Capillary),
            ModelKind::MuskatGravity => Some(MuskatVariant::Gravity),
            _ => None,
        }
    }

    pub fn stokes_drive(self) -> Option<StokesDrive> {
        match self {
            ModelKind::StokesCapillary => Some(StokesDrive::Capillary),
            ModelKind::StokesGravity => Some(StokesDrive::Gravity),
            _ => None,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    Muskat(MuskatModel),
    Stokes(StokesModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Muskat(m) => match m.constants.variant {
                MuskatVariant::Capillary => ModelKind::MuskatCapillary,
                MuskatVariant::Gravity => ModelKind::MuskatGravity,
            },
            Model::Stokes(m) => match m.constants.drive {
                StokesDrive::Capillary => ModelKind::StokesCapillary,
                StokesDrive::Gravity => ModelKind::StokesGravity,
            },
        }
    }

    /// Order of the dissipation: 4 for capillary Muskat, 2 for gravity
    /// Muskat, `ζ + 1` for Stokes.
    pub fn dissipation_order(&self) -> u32 {
        match self {
            Model::Muskat(m) => match m.constants.variant {
                MuskatVariant::Capillary => 4,
                MuskatVariant::Gravity => 2,
            },
            Model::Stokes(m) => m.constants.zeta() + 1,
        }
    }

    pub fn linear_symbol(&self, k: i64, mean_f: f64, mean_g: f64) -> Mat2 {
        match self {
            Model::Muskat(m) => m.constants.linear_symbol(k, mean_f, mean_g),
            Model::Stokes(m) => m.constants.linear_symbol(k, mean_f, mean_g),
        }
    }

    pub fn nonlinear_rhs(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        match self {
            Model::Muskat(m) => m.nonlinear_rhs(s),
            Model::Stokes(m) => m.nonlinear_rhs(s),
        }
    }

    /// Linear part applied mode by mode.
    pub fn linear_rhs(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        apply_symbols(&s.fbar, &s.gbar, |k| {
            self.linear_symbol(k as i64, s.mean_f, s.mean_g)
        })
    }

    /// Linear plus nonlinear right-hand side of the split system.
    pub fn full_rhs(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        let (lf, lg) = self.linear_rhs(s);
        let (nf, ng) = self.nonlinear_rhs(s);
        (&lf + &nf, &lg + &ng)
    }

    /// Right-hand side assembled from the unsplit system on the full heights.
    pub fn unsplit_rhs(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        match self {
            Model::Muskat(m) => m.unsplit_rhs(s),
            Model::Stokes(m) => m.unsplit_rhs(s),
        }
    }
}

/// Applies a per-mode 2×2 matrix to the coefficient pair `(û_f(k), û_g(k))`.
pub fn apply_symbols(
    f: &TrigPoly,
    g: &TrigPoly,
    mut symbol: impl FnMut(usize) -> Mat2,
) -> (TrigPoly, TrigPoly) {
    let (mut hf, mut hg): (Vec<_>, Vec<_>) = (0..=f.bandwidth())
        .map(|k| {
            let [a, b] = symbol(k).apply([f.coeff(k as i64), g.coeff(k as i64)]);
            (a, b)
        })
        .unzip();
    hf[0].im = 0.0;
    hg[0].im = 0.0;
    (
        TrigPoly::from_half_spectrum(hf).expect("non-empty spectrum"),
        TrigPoly::from_half_spectrum(hg).expect("non-empty spectrum"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::muskat::{reduce_params, MuskatPhysicalParams};

    fn muskat() -> Model {
        let p = MuskatPhysicalParams {
            mu_minus: 1.0,
            mu_plus: 1.0,
            rho_minus: 2.0,
            rho_plus: 1.0,
            gamma_f: 1.0,
            gamma_h: 1.0,
            gravity: 1.0,
        };
        Model::Muskat(MuskatModel::new(
            reduce_params(&p, MuskatVariant::Capillary).unwrap(),
        ))
    }

    #[test]
    fn full_rhs_single_mode() {
        let eps = 1e-3;
        let fbar = TrigPoly::cosine(4, 1, eps).unwrap();
        let s = SimState::new(fbar, TrigPoly::zeros(4), 1.0, 1.5).unwrap();
        let (f, g) = muskat().full_rhs(&s);
        // Linear: L(1) = [[-4,-2],[-3,-3]] on (ε/2, 0) per mode ±1.
        assert!((f.coeff(1).re + 4.0 * eps / 2.0).abs() < 1e-15);
        assert!((g.coeff(1).re + 3.0 * eps / 2.0).abs() < 1e-15);
        // Nonlinear: −4ε² cos 2x.
        assert!((f.coeff(2).re + 2.0 * eps * eps).abs() < 1e-15);
        assert_eq!(f.coeff(0).re, 0.0);
        assert_eq!(g.coeff(0).re, 0.0);
    }

    #[test]
    fn flat_state_is_steady() {
        let s = SimState::flat(6, 1.0, 1.5).unwrap();
        let (f, g) = muskat().full_rhs(&s);
        assert!(f.is_zero() && g.is_zero());
    }
}
