//! Two-phase thin-film Stokes system.
//!
//! In rescaled time (`t ↦ t/Q`) the heights satisfy
//!
//! ```text
//! ∂t f = ∂ₓ[(2ρf³ + 3f²g) 𝒟f + (2f³ + 3f²g) 𝒟g]
//! ∂t g = ∂ₓ[(2μg³ + 3ρf²g + 6fg²) 𝒟f + (2μg³ + 3f²g + 6fg²) 𝒟g]
//! ```
//!
//! with `𝒟 = ∂ₓ` (gravity, ζ = 1) or `𝒟 = −∂ₓ³` (capillarity, ζ = 3).
//! Freezing the prefactors at the means gives the linear part; the
//! remainder is the cubic nonlinearity `N₁ + N₂`, `N₃ + N₄`.

use serde::{Deserialize, Serialize};

use crate::mat2::Mat2;
use crate::model::ParamError;
use crate::spectral::TrigPoly;
use crate::state::SimState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StokesDrive {
    Capillary,
    Gravity,
}

impl StokesDrive {
    /// ζ = 1 for `𝒟 = ∂ₓ`, ζ = 3 for `𝒟 = −∂ₓ³`.
    pub fn zeta(self) -> u32 {
        match self {
            StokesDrive::Gravity => 1,
            StokesDrive::Capillary => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesPhysicalParams {
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub gamma_f: f64,
    pub gamma_h: f64,
    pub gravity: f64,
    pub drive: StokesDrive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesConstants {
    /// `(P + Q)/Q`.
    pub rho: f64,
    /// `μ₋/μ₊`.
    pub mu: f64,
    pub drive: StokesDrive,
    pub p: f64,
    pub q: f64,
}

pub fn reduce_params(p: &StokesPhysicalParams) -> Result<StokesConstants, ParamError> {
    for (name, value) in [("mu_minus", p.mu_minus), ("mu_plus", p.mu_plus)] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(ParamError::NonPositive { name, value });
        }
    }
    let (pp, q) = match p.drive {
        StokesDrive::Capillary => {
            if p.gamma_h.is_nan() || p.gamma_h <= 0.0 {
                return Err(ParamError::CapillaryNeedsGammaH);
            }
            if p.gamma_f.is_nan() || p.gamma_f <= 0.0 {
                return Err(ParamError::NonPositive {
                    name: "gamma_f",
                    value: p.gamma_f,
                });
            }
            (p.gamma_f / (6.0 * p.mu_minus), p.gamma_h / (6.0 * p.mu_minus))
        }
        StokesDrive::Gravity => {
            if p.gamma_f != 0.0 || p.gamma_h != 0.0 {
                return Err(ParamError::GravityWithSurfaceTension);
            }
            for (name, value) in [
                ("gravity", p.gravity),
                ("rho_minus", p.rho_minus),
                ("rho_plus", p.rho_plus),
            ] {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(ParamError::NonPositive { name, value });
                }
            }
            if p.rho_minus <= p.rho_plus {
                return Err(ParamError::UnstableStratification {
                    rho_minus: p.rho_minus,
                    rho_plus: p.rho_plus,
                });
            }
            let scale = p.gravity / (6.0 * p.mu_minus);
            (scale * (p.rho_minus - p.rho_plus), scale * p.rho_plus)
        }
    };
    Ok(StokesConstants {
        rho: (pp + q) / q,
        mu: p.mu_minus / p.mu_plus,
        drive: p.drive,
        p: pp,
        q,
    })
}

impl StokesPhysicalParams {
    /// Factor converting physical time into rescaled time, `t̃ = Q t`.
    ///
    /// The rescaling removes `Q` from the equations, so rescaled time runs
    /// `Q` times faster than physical time.
    pub fn time_scale(&self) -> Result<f64, ParamError> {
        Ok(reduce_params(self)?.q)
    }
}

/// Prefactors of the linearised system at the means.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesCoeffMatrix {
    pub c11: f64,
    pub c12: f64,
    pub c21: f64,
    pub c22: f64,
}

impl StokesCoeffMatrix {
    pub fn new(c: &StokesConstants, mean_f: f64, mean_g: f64) -> Self {
        let (f, g) = (mean_f, mean_g);
        let f2g = f * f * g;
        let fg2 = f * g * g;
        let f3 = f * f * f;
        let g3 = g * g * g;
        Self {
            c11: 2.0 * c.rho * f3 + 3.0 * f2g,
            c12: 2.0 * f3 + 3.0 * f2g,
            c21: 2.0 * c.mu * g3 + 3.0 * c.rho * f2g + 6.0 * fg2,
            c22: 2.0 * c.mu * g3 + 3.0 * f2g + 6.0 * fg2,
        }
    }

    pub fn as_mat2(&self) -> Mat2 {
        Mat2::new(self.c11, self.c12, self.c21, self.c22)
    }
}

impl StokesConstants {
    pub fn zeta(&self) -> u32 {
        self.drive.zeta()
    }

    /// `L(k) = −k^{ζ+1} C`.
    pub fn linear_symbol(&self, k: i64, mean_f: f64, mean_g: f64) -> Mat2 {
        let weight = (k.unsigned_abs() as f64).powi(self.zeta() as i32 + 1);
        StokesCoeffMatrix::new(self, mean_f, mean_g)
            .as_mat2()
            .scale(-weight)
    }

    /// Applies `𝒟`.
    pub fn apply_operator(&self, u: &TrigPoly) -> TrigPoly {
        match self.drive {
            StokesDrive::Gravity => u.derivative(1),
            StokesDrive::Capillary => u.derivative(3).scale(-1.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesModel {
    pub constants: StokesConstants,
}

/// Monomials of `(f̄, ḡ)` up to degree three, each exact on `|k| ≤ 2K`,
/// which is all the final projection to `K` can see.
struct Monomials {
    f: TrigPoly,
    g: TrigPoly,
    ff: TrigPoly,
    fg: TrigPoly,
    gg: TrigPoly,
    fff: TrigPoly,
    ffg: TrigPoly,
    fgg: TrigPoly,
    ggg: TrigPoly,
}

impl Monomials {
    fn new(f: &TrigPoly, g: &TrigPoly) -> Self {
        let pad = 2 * f.bandwidth();
        let ff = f.product(f, pad);
        let fg = f.product(g, pad);
        let gg = g.product(g, pad);
        Self {
            fff: ff.product(f, pad),
            ffg: ff.product(g, pad),
            fgg: gg.product(f, pad),
            ggg: gg.product(g, pad),
            f: f.project(pad),
            g: g.project(pad),
            ff,
            fg,
            gg,
        }
    }
}

impl StokesModel {
    pub fn new(constants: StokesConstants) -> Self {
        Self { constants }
    }

    /// `(N₁ + N₂, N₃ + N₄)`.
    pub fn nonlinear_rhs(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        let c = &self.constants;
        let k = s.bandwidth();
        let (mf, mg) = (s.mean_f, s.mean_g);
        let m = Monomials::new(&s.fbar, &s.gbar);

        // f²g − ⟨f₀⟩²⟨g₀⟩
        let s_ffg = m
            .ffg
            .axpy(2.0 * mf, &m.fg)
            .axpy(mg, &m.ff)
            .axpy(mf * mf, &m.g)
            .axpy(2.0 * mf * mg, &m.f);
        // fg² − ⟨f₀⟩⟨g₀⟩²
        let s_fgg = m
            .fgg
            .axpy(2.0 * mg, &m.fg)
            .axpy(mf, &m.gg)
            .axpy(mg * mg, &m.f)
            .axpy(2.0 * mf * mg, &m.g);
        // f³ − ⟨f₀⟩³
        let s_fff = m.fff.axpy(3.0 * mf, &m.ff).axpy(3.0 * mf * mf, &m.f);
        // g³ − ⟨g₀⟩³
        let s_ggg = m.ggg.axpy(3.0 * mg, &m.gg).axpy(3.0 * mg * mg, &m.g);

        let p11 = s_fff.scale(2.0 * c.rho).axpy(3.0, &s_ffg);
        let p12 = s_fff.scale(2.0).axpy(3.0, &s_ffg);
        let p21 = s_ggg
            .scale(2.0 * c.mu)
            .axpy(3.0 * c.rho, &s_ffg)
            .axpy(6.0, &s_fgg);
        let p22 = s_ggg.scale(2.0 * c.mu).axpy(3.0, &s_ffg).axpy(6.0, &s_fgg);

        let df = c.apply_operator(&s.fbar);
        let dg = c.apply_operator(&s.gbar);
        let bracket1 = &p11.product(&df, k) + &p12.product(&dg, k);
        let bracket2 = &p21.product(&df, k) + &p22.product(&dg, k);
        (bracket1.derivative(1), bracket2.derivative(1))
    }

    /// Right-hand side assembled from the unsplit system on the full heights,
    /// with the cubic prefactors formed exactly at bandwidth `3K`.
    pub fn unsplit_rhs(&self, s: &SimState) -> (TrigPoly, TrigPoly) {
        let c = &self.constants;
        let k = s.bandwidth();
        let pad = 3 * k;
        let (f, g) = s.heights();
        let ff = f.product(&f, pad);
        let gg = g.product(&g, pad);
        let f3 = ff.product(&f, pad);
        let f2g = ff.product(&g, pad);
        let fg2 = gg.product(&f, pad);
        let g3 = gg.product(&g, pad);

        let a11 = f3.scale(2.0 * c.rho).axpy(3.0, &f2g);
        let a12 = f3.scale(2.0).axpy(3.0, &f2g);
        let a21 = g3.scale(2.0 * c.mu).axpy(3.0 * c.rho, &f2g).axpy(6.0, &fg2);
        let a22 = g3.scale(2.0 * c.mu).axpy(3.0, &f2g).axpy(6.0, &fg2);

        let df = c.apply_operator(&f);
        let dg = c.apply_operator(&g);
        let flux_f = &a11.product(&df, k) + &a12.product(&dg, k);
        let flux_g = &a21.product(&df, k) + &a22.product(&dg, k);
        (flux_f.derivative(1), flux_g.derivative(1))
    }
}
