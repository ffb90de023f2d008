//! Randomized property suites: functional inequalities on trigonometric
//! polynomials and oracle equivalences of the model right-hand sides.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Model, ModelKind};
use crate::muskat::{self, MuskatModel, MuskatPhysicalParams};
use crate::spectral::{grid_point, TrigPoly};
use crate::state::SimState;
use crate::stokes::{self, StokesDrive, StokesModel, StokesPhysicalParams};

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Relative slack granted to inequality checks for floating-point rounding.
pub const ROUNDING_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random draws per inequality suite.
    pub inequality_trials: usize,
    /// Random states per model for the oracle suites.
    pub oracle_trials: usize,
    /// Multiplies every inequality constant; values below 1 tighten the
    /// bounds and exist to demonstrate that the suites can fail.
    pub constant_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            inequality_trials: 1000,
            oracle_trials: 100,
            constant_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    /// Largest observed `lhs / rhs` for inequalities, or largest relative
    /// discrepancy for equivalence suites.
    pub worst: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl SuiteResult {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            trials: 0,
            violations: 0,
            worst: 0.0,
            tolerance,
            counterexample: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Records an inequality `lhs ≤ rhs`.
    fn inequality(&mut self, lhs: f64, rhs: f64, describe: impl FnOnce() -> String) {
        self.trials += 1;
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs <= 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        self.worst = self.worst.max(ratio);
        if lhs > rhs * (1.0 + ROUNDING_SLACK) + f64::MIN_POSITIVE {
            self.fail(describe);
        }
    }

    /// Records an equivalence with relative discrepancy `err`.
    fn discrepancy(&mut self, err: f64, describe: impl FnOnce() -> String) {
        self.trials += 1;
        self.worst = self.worst.max(err);
        if err.is_nan() || err > self.tolerance {
            self.fail(describe);
        }
    }

    fn fail(&mut self, describe: impl FnOnce() -> String) {
        self.violations += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(describe());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn total_violations(&self) -> usize {
        self.suites.iter().map(|s| s.violations).sum()
    }
}

/// Random zero-mean polynomial: bandwidth in `1..=max_bandwidth`, spectrum
/// decaying like `k^{−p}` with random `p ∈ [0, 3]`, some modes switched off.
pub fn random_poly(rng: &mut impl Rng, max_bandwidth: usize) -> TrigPoly {
    let k_max = rng.gen_range(1..=max_bandwidth);
    let p = rng.gen_range(0.0..3.0);
    let density = rng.gen_range(0.3..=1.0);
    let scale = 10f64.powf(rng.gen_range(-3.0..1.0));
    let mut half = vec![Complex64::new(0.0, 0.0); k_max + 1];
    for (k, c) in half.iter_mut().enumerate().skip(1) {
        if k < k_max && !rng.gen_bool(density) {
            continue;
        }
        let r = scale * rng.gen_range(0.0..1.0) * (k as f64).powf(-p);
        *c = Complex64::from_polar(r, rng.gen_range(0.0..TAU));
    }
    TrigPoly::from_half_spectrum(half).expect("real mean")
}

fn describe(u: &TrigPoly) -> String {
    let modes: Vec<String> = u
        .half_spectrum()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| format!("({k}, {:e}, {:e})", c.re, c.im))
        .collect();
    format!("modes = [{}]", modes.join(", "))
}

/// `‖u‖_{L⁴}` on the dx measure, exact on a grid finer than `4K`.
pub fn l4_norm(u: &TrigPoly) -> f64 {
    let m = 4 * u.bandwidth() + 2;
    let values = u.grid_values(m).expect("grid resolves 4K");
    let sum: f64 = values.iter().map(|v| v.powi(4)).sum();
    (TAU / m as f64 * sum).powf(0.25)
}

/// `‖u‖_{L²}` on the dx measure by quadrature.
pub fn l2_quadrature(u: &TrigPoly) -> f64 {
    let m = 2 * u.bandwidth() + 2;
    let values = u.grid_values(m).expect("grid resolves 2K");
    (TAU / m as f64 * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

pub fn banach_algebra_suite(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut r = SuiteResult::new("banach_algebra", 0.0);
    for _ in 0..opts.inequality_trials {
        let u = random_poly(&mut rng, 16);
        let v = random_poly(&mut rng, 16);
        let w = u.product(&v, u.bandwidth() + v.bandwidth()).without_mean();
        for alpha in [0u32, 1, 2, 4] {
            let lhs = w.wiener_norm(alpha).unwrap();
            let c = opts.constant_scale * 2f64.powi(alpha as i32 + 1);
            let rhs = c * u.wiener_norm(alpha).unwrap() * v.wiener_norm(alpha).unwrap();
            r.inequality(lhs, rhs, || format!("alpha = {alpha}; u: {}; v: {}", describe(&u), describe(&v)));
        }
    }
    r
}

pub fn interpolation_suite(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(1));
    let mut r = SuiteResult::new("interpolation", 0.0);
    for _ in 0..opts.inequality_trials {
        let u = random_poly(&mut rng, 16);
        let alpha = [0.5, 1.0, 2.0, 3.0][rng.gen_range(0..4)];
        for theta in [0.25, 0.5, 0.75] {
            let lhs = u.wiener_norm(crate::NormOrder::new(alpha).unwrap()).unwrap();
            let a0 = u.wiener_norm(0).unwrap();
            let top = u.wiener_norm(crate::NormOrder::new(alpha / theta).unwrap()).unwrap();
            let rhs = opts.constant_scale * a0.powf(1.0 - theta) * top.powf(theta);
            r.inequality(lhs, rhs, || format!("alpha = {alpha}, theta = {theta}; u: {}", describe(&u)));
        }
    }
    r
}

pub fn kolmogorov_landau_suite(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(2));
    let mut r = SuiteResult::new("kolmogorov_landau", 0.0);
    for _ in 0..opts.inequality_trials {
        let u = random_poly(&mut rng, 16);
        let s0 = u.sup_norm();
        let s1 = u.sup_norm_deriv(1);
        let s2 = u.sup_norm_deriv(2);
        let s4 = u.sup_norm_deriv(4);
        let c = opts.constant_scale;
        r.inequality(s1 * s1, c * 2.0 * s0 * s2, || format!("first-derivative form; u: {}", describe(&u)));
        r.inequality(s2, c * 4.0 * (s0 * s4).sqrt(), || format!("second-derivative form; u: {}", describe(&u)));
    }
    r
}

pub fn l4_suite(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(3));
    let mut r = SuiteResult::new("l4_bounds", 0.0);
    let root = TAU.sqrt();
    for _ in 0..opts.inequality_trials {
        let u = random_poly(&mut rng, 16);
        let c = opts.constant_scale * 3.0;
        let d1 = l4_norm(&u.derivative(1));
        let h2 = root * u.sobolev_norm(2).unwrap();
        r.inequality(d1 * d1, c * u.sup_norm() * h2, || format!("first-derivative form; u: {}", describe(&u)));
        let d3 = l4_norm(&u.derivative(3));
        let h4 = root * u.sobolev_norm(4).unwrap();
        r.inequality(d3 * d3, c * u.sup_norm_deriv(2) * h4, || format!("third-derivative form; u: {}", describe(&u)));
    }
    r
}

pub fn embedding_suite(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(4));
    let mut r = SuiteResult::new("sobolev_wiener_embedding", 0.0);
    for _ in 0..opts.inequality_trials {
        let u = random_poly(&mut rng, 16);
        let lhs = u.sobolev_norm(4).unwrap();
        let rhs = opts.constant_scale * TAU.sqrt() * u.wiener_norm(4).unwrap();
        r.inequality(lhs, rhs, || describe(&u));
    }
    r
}

pub fn parseval_suite(opts: &VerifyOptions) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(5));
    let mut r = SuiteResult::new("parseval", 1e-10);
    for _ in 0..opts.inequality_trials {
        let u = random_poly(&mut rng, 16);
        let spectral = TAU.sqrt() * u.sobolev_norm(0).unwrap();
        let quad = l2_quadrature(&u);
        let err = (spectral - quad).abs() / quad.max(f64::MIN_POSITIVE);
        r.discrepancy(err, || describe(&u));
    }
    r
}

/// Random admissible physical parameters and means for a model kind.
pub fn random_model(rng: &mut impl Rng, kind: ModelKind) -> Model {
    let mut draw = |lo: f64, hi: f64| rng.gen_range(lo..hi);
    let mu_minus = draw(0.5, 3.0);
    let mu_plus = draw(0.5, 3.0);
    let rho_plus = draw(0.5, 2.0);
    let rho_minus = rho_plus * draw(1.1, 3.0);
    let gravity = draw(0.5, 2.0);
    let (gamma_f, gamma_h) = (draw(0.2, 2.0), draw(0.2, 2.0));
    match kind {
        ModelKind::MuskatCapillary | ModelKind::MuskatGravity => {
            let capillary = kind == ModelKind::MuskatCapillary;
            let p = MuskatPhysicalParams {
                mu_minus,
                mu_plus,
                rho_minus,
                rho_plus,
                gamma_f: if capillary { gamma_f } else { 0.0 },
                gamma_h: if capillary { gamma_h } else { 0.0 },
                gravity,
            };
            let c = muskat::reduce_params(&p, kind.muskat_variant().unwrap()).expect("admissible");
            Model::Muskat(MuskatModel::new(c))
        }
        ModelKind::StokesCapillary | ModelKind::StokesGravity => {
            let drive = kind.stokes_drive().unwrap();
            let capillary = drive == StokesDrive::Capillary;
            let p = StokesPhysicalParams {
                mu_minus,
                mu_plus,
                rho_minus,
                rho_plus,
                gamma_f: if capillary { gamma_f } else { 0.0 },
                gamma_h: if capillary { gamma_h } else { 0.0 },
                gravity,
                drive,
            };
            Model::Stokes(StokesModel::new(stokes::reduce_params(&p).expect("admissible")))
        }
    }
}

/// Random state with positive means and perturbations of moderate size.
pub fn random_state(rng: &mut impl Rng, max_bandwidth: usize) -> SimState {
    let k = rng.gen_range(1..=max_bandwidth);
    let mean_f = rng.gen_range(0.5..2.0);
    let mean_g = rng.gen_range(0.5..2.0);
    let component = |rng: &mut ChaCha8Rng| {
        let u = random_poly(rng, k).project(k);
        let size = rng.gen_range(0.01..0.4);
        let n = u.wiener_norm(0).unwrap();
        if n > 0.0 {
            u.scale(size / n)
        } else {
            u
        }
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let fbar = component(&mut local);
    let gbar = component(&mut local);
    SimState::new(fbar, gbar, mean_f, mean_g).expect("valid random state")
}

/// Coefficients `û(0..=k_max)` of grid samples on `x_j = −π + 2πj/M`.
pub fn dft_extract(values: &[f64], k_max: usize) -> TrigPoly {
    let m = values.len();
    let mut half = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let x = grid_point(j, m);
            acc += Complex64::from_polar(*v, -(k as f64) * x);
        }
        half.push(acc / m as f64);
    }
    half[0].im = 0.0;
    TrigPoly::from_half_spectrum(half).expect("real mean")
}

fn samples(u: &TrigPoly, m: usize) -> Vec<f64> {
    u.grid_values(m).expect("oversampled grid")
}

/// Brackets of the nonlinearity (the fluxes under the outer `∂ₓ`) assembled
/// pointwise on a `16K` grid from the physical-space formulas and extracted
/// up to wavenumber `4K`, beyond which they vanish.
pub fn quadrature_brackets(model: &Model, s: &SimState) -> (TrigPoly, TrigPoly) {
    let k = s.bandwidth();
    let m = 16 * k.max(1);
    let fb = samples(&s.fbar, m);
    let gb = samples(&s.gbar, m);
    let (brackets_f, brackets_g): (Vec<f64>, Vec<f64>) = match model {
        Model::Muskat(mm) => {
            let c = &mm.constants;
            let d1f = samples(&s.fbar.derivative(1), m);
            let d1g = samples(&s.gbar.derivative(1), m);
            let d3f = samples(&s.fbar.derivative(3), m);
            let d3g = samples(&s.gbar.derivative(3), m);
            (0..m)
                .map(|j| {
                    let bf = -fb[j] * (c.a_gamma * d3f[j] + c.a * d3g[j])
                        + fb[j] * (c.b_rho * d1f[j] + c.b * d1g[j]);
                    let lead = match mm.n2b_factor {
                        muskat::N2bFactor::G => gb[j],
                        muskat::N2bFactor::F => fb[j],
                    };
                    let bg = -gb[j] * c.a_mu * (d3f[j] + d3g[j])
                        + lead * c.b_mu * (d1f[j] + d1g[j]);
                    (bf, bg)
                })
                .unzip()
        }
        Model::Stokes(sm) => {
            let c = &sm.constants;
            let df = samples(&c.apply_operator(&s.fbar), m);
            let dg = samples(&c.apply_operator(&s.gbar), m);
            let (mf, mg) = (s.mean_f, s.mean_g);
            let a = |f: f64, g: f64| {
                [
                    2.0 * c.rho * f.powi(3) + 3.0 * f * f * g,
                    2.0 * f.powi(3) + 3.0 * f * f * g,
                    2.0 * c.mu * g.powi(3) + 3.0 * c.rho * f * f * g + 6.0 * f * g * g,
                    2.0 * c.mu * g.powi(3) + 3.0 * f * f * g + 6.0 * f * g * g,
                ]
            };
            let frozen = a(mf, mg);
            (0..m)
                .map(|j| {
                    let full = a(fb[j] + mf, gb[j] + mg);
                    let p: Vec<f64> = full.iter().zip(&frozen).map(|(x, y)| x - y).collect();
                    (p[0] * df[j] + p[1] * dg[j], p[2] * df[j] + p[3] * dg[j])
                })
                .unzip()
        }
    };
    (dft_extract(&brackets_f, 4 * k), dft_extract(&brackets_g, 4 * k))
}

/// Galerkin nonlinearity from [`quadrature_brackets`]: projection to `K`,
/// then the outer derivative.
pub fn quadrature_nonlinear_rhs(model: &Model, s: &SimState) -> (TrigPoly, TrigPoly) {
    let k = s.bandwidth();
    let (bf, bg) = quadrature_brackets(model, s);
    (bf.project(k).derivative(1), bg.project(k).derivative(1))
}

/// `max_k |a(k) − b(k)|` relative to the largest coefficient of either pair
/// or `floor`, whichever is larger.
pub fn relative_discrepancy(a: &(TrigPoly, TrigPoly), b: &(TrigPoly, TrigPoly), floor: f64) -> f64 {
    let scale = [&a.0, &a.1, &b.0, &b.1]
        .iter()
        .map(|u| u.max_abs_coeff())
        .fold(floor, f64::max);
    let diff = (&a.0 - &b.0).max_abs_coeff().max((&a.1 - &b.1).max_abs_coeff());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn quadrature_oracle_suite(opts: &VerifyOptions, kind: ModelKind) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(10 + kind as u64));
    let mut r = SuiteResult::new(&format!("quadrature_oracle_{kind}"), 1e-10);
    for _ in 0..opts.oracle_trials {
        let model = random_model(&mut rng, kind);
        let s = random_state(&mut rng, 16);
        let (bf, bg) = quadrature_brackets(&model, &s);
        // Projection can cancel the whole output; measure against the size
        // of the differentiated bracket instead.
        let floor = s.bandwidth() as f64 * bf.max_abs_coeff().max(bg.max_abs_coeff());
        let oracle = (
            bf.project(s.bandwidth()).derivative(1),
            bg.project(s.bandwidth()).derivative(1),
        );
        let err = relative_discrepancy(&model.nonlinear_rhs(&s), &oracle, floor);
        r.discrepancy(err, || format!("{model:?}; f: {}; g: {}", describe(&s.fbar), describe(&s.gbar)));
    }
    r
}

pub fn split_form_suite(opts: &VerifyOptions, kind: ModelKind) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(20 + kind as u64));
    let mut r = SuiteResult::new(&format!("split_form_{kind}"), 1e-12);
    for _ in 0..opts.oracle_trials {
        let model = random_model(&mut rng, kind);
        let s = random_state(&mut rng, 8);
        let err = relative_discrepancy(&model.full_rhs(&s), &model.unsplit_rhs(&s), 0.0);
        r.discrepancy(err, || format!("{model:?}; f: {}; g: {}", describe(&s.fbar), describe(&s.gbar)));
    }
    r
}

pub fn run_all(opts: &VerifyOptions) -> VerifyReport {
    let mut suites = vec![
        banach_algebra_suite(opts),
        interpolation_suite(opts),
        kolmogorov_landau_suite(opts),
        l4_suite(opts),
        embedding_suite(opts),
        parseval_suite(opts),
    ];
    for kind in ModelKind::ALL {
        suites.push(quadrature_oracle_suite(opts, kind));
        suites.push(split_form_suite(opts, kind));
    }
    VerifyReport {
        seed: opts.seed,
        suites,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyOptions {
        VerifyOptions {
            inequality_trials: 60,
            oracle_trials: 10,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn suites_pass_on_small_draws() {
        let report = run_all(&small());
        for s in &report.suites {
            assert!(s.passed(), "{}: {:?}", s.name, s.counterexample);
        }
    }

    #[test]
    fn tightened_constants_fail() {
        let opts = VerifyOptions {
            constant_scale: 0.05,
            ..small()
        };
        assert!(!banach_algebra_suite(&opts).passed());
        assert!(!kolmogorov_landau_suite(&opts).passed());
        assert!(!l4_suite(&opts).passed());
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = banach_algebra_suite(&small());
        let b = banach_algebra_suite(&small());
        assert_eq!(a, b);
    }
}
