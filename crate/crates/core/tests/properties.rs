use num_complex::Complex64;
use proptest::prelude::*;

use thinfilm::certificates::{self, heavier_fluid_below};
use thinfilm::diagnostics::DiagnosticsConfig;
use thinfilm::muskat::{MuskatConstants, MuskatModel, MuskatVariant};
use thinfilm::stokes::{StokesConstants, StokesDrive, StokesModel};
use thinfilm::timestepper::{self, precompute_propagators, Scheme, StepperConfig, Stepper};
use thinfilm::{Model, SimState, TrigPoly};

fn poly(max_k: usize, amp: f64) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec((-amp..amp, -amp..amp), 1..=max_k).prop_map(|modes| {
        let mut half = vec![Complex64::new(0.0, 0.0)];
        half.extend(modes.into_iter().map(|(re, im)| Complex64::new(re, im)));
        TrigPoly::from_half_spectrum(half).unwrap()
    })
}

fn even_poly(k: usize, amp: f64) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec(-amp..amp, k).prop_map(|re| {
        let mut half = vec![Complex64::new(0.0, 0.0)];
        half.extend(re.into_iter().map(|r| Complex64::new(r, 0.0)));
        TrigPoly::from_half_spectrum(half).unwrap()
    })
}

fn muskat_constants(capillary: bool) -> impl Strategy<Value = MuskatConstants> {
    (0.1..3.0, 0.1..3.0, 0.1..3.0, 0.1..3.0, 0.1..3.0, 0.1..3.0).prop_map(
        move |(b, b_mu, b_rho, a, a_mu, a_gamma)| {
            let s = if capillary { 1.0 } else { 0.0 };
            MuskatConstants {
                b,
                b_mu,
                b_rho,
                a: s * a,
                a_mu: s * a_mu,
                a_gamma: s * a_gamma,
                variant: if capillary {
                    MuskatVariant::Capillary
                } else {
                    MuskatVariant::Gravity
                },
            }
        },
    )
}

fn stokes_constants() -> impl Strategy<Value = StokesConstants> {
    (1.05..10.0, 0.1..30.0, any::<bool>()).prop_map(|(rho, mu, capillary)| StokesConstants {
        rho,
        mu,
        drive: if capillary {
            StokesDrive::Capillary
        } else {
            StokesDrive::Gravity
        },
        p: rho - 1.0,
        q: 1.0,
    })
}

fn any_model() -> impl Strategy<Value = Model> {
    prop_oneof![
        muskat_constants(true).prop_map(|c| Model::Muskat(MuskatModel::new(c))),
        muskat_constants(false).prop_map(|c| Model::Muskat(MuskatModel::new(c))),
        stokes_constants().prop_map(|c| Model::Stokes(StokesModel::new(c))),
    ]
}

fn close(a: &TrigPoly, b: &TrigPoly, tol: f64) -> bool {
    let k = a.bandwidth().max(b.bandwidth()) as i64;
    let scale = a.max_abs_coeff().max(b.max_abs_coeff()).max(1.0);
    (-k..=k).all(|j| (a.coeff(j) - b.coeff(j)).norm() <= tol * scale)
}

fn is_real(u: &TrigPoly) -> bool {
    u.half_spectrum().iter().all(|c| c.im == 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_commutes(u in poly(8, 1.0), v in poly(8, 1.0), k in 0usize..20) {
        prop_assert!(close(&u.product(&v, k), &v.product(&u, k), 1e-14));
    }

    #[test]
    fn product_is_bilinear(u in poly(6, 1.0), v in poly(6, 1.0), w in poly(6, 1.0), a in -2.0..2.0f64) {
        let k = 12;
        let lhs = u.axpy(a, &v).product(&w, k);
        let rhs = u.product(&w, k).axpy(a, &v.product(&w, k));
        prop_assert!(close(&lhs, &rhs, 1e-13));
    }

    #[test]
    fn projection_is_idempotent(u in poly(10, 1.0), k in 0usize..12) {
        let once = u.project(k);
        prop_assert_eq!(once.project(k), once.clone());
        prop_assert!(once.bandwidth() == k);
    }

    #[test]
    fn wiener_norms_form_a_banach_scale(u in poly(8, 1.0), v in poly(8, 1.0), alpha in 0u32..5) {
        let w = u.product(&v, 16).without_mean();
        let lhs = w.wiener_norm(alpha).unwrap();
        let rhs = 2f64.powi(alpha as i32 + 1) * u.wiener_norm(alpha).unwrap() * v.wiener_norm(alpha).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn muskat_certificates_decrease_in_e0(
        c in muskat_constants(true),
        f in 0.2..3.0f64,
        g in 0.2..3.0f64,
        e in 0.0..1.0f64,
        de in 0.0..1.0f64,
    ) {
        let lo = certificates::muskat_sigmas(&c, f, g, e);
        let hi = certificates::muskat_sigmas(&c, f, g, e + de);
        prop_assert!(hi.sigma_1a <= lo.sigma_1a && hi.sigma_2a <= lo.sigma_2a);
        prop_assert!(hi.sigma_1b <= lo.sigma_1b && hi.sigma_2b <= lo.sigma_2b);
        prop_assert_eq!(lo.delta_a, lo.sigma_1a.min(lo.sigma_2a));
        prop_assert_eq!(lo.delta_b, lo.sigma_1b.min(lo.sigma_2b));
        let ml = certificates::muskat_capillary_sobolev_margins(&c, f, g, e);
        let mh = certificates::muskat_capillary_sobolev_margins(&c, f, g, e + de);
        for i in 0..2 {
            prop_assert!(mh.statement[i] <= ml.statement[i] && mh.proof[i] <= ml.proof[i]);
        }
        let gl = certificates::muskat_gravity_sobolev_margins(&c, f, g, e);
        let gh = certificates::muskat_gravity_sobolev_margins(&c, f, g, e + de);
        prop_assert!(gh[0] <= gl[0] && gh[1] <= gl[1]);
    }

    #[test]
    fn stokes_certificates_decrease_in_e0(
        c in stokes_constants(),
        f in 0.2..3.0f64,
        g in 0.2..3.0f64,
        e in 0.0..1.0f64,
        de in 0.0..1.0f64,
    ) {
        let lo = certificates::stokes_sigmas(&c, f, g, e);
        let hi = certificates::stokes_sigmas(&c, f, g, e + de);
        prop_assert!(hi.sigma_1 <= lo.sigma_1 && hi.sigma_2 <= lo.sigma_2);
        prop_assert_eq!(lo.epsilon, lo.sigma_1.min(lo.sigma_2));
        let ml = certificates::stokes_sobolev_margins(&c, f, g, e);
        let mh = certificates::stokes_sobolev_margins(&c, f, g, e + de);
        prop_assert!(mh.margins[0] <= ml.margins[0] && mh.margins[1] <= ml.margins[1]);
    }

    #[test]
    fn gates_are_nested(model in any_model(), f in poly(4, 0.2), g in poly(4, 0.2), mf in 0.2..3.0f64, mg in 0.2..3.0f64) {
        let k = f.bandwidth().max(g.bandwidth());
        let s = SimState::new(f.project(k), g.project(k), mf, mg).unwrap();
        let r = certificates::evaluate(&s, &model);
        prop_assert!(!r.gates.sobolev_propagation || r.gates.wiener_decay);
        prop_assert!(!r.gates.wiener_decay || r.gates.smallness);
        if let (Model::Muskat(m), Some(cert)) = (&model, &r.muskat) {
            if cert.sigma_1b > 0.0 && cert.sigma_2b > 0.0 {
                prop_assert!(heavier_fluid_below(&m.constants));
            }
        }
    }

    #[test]
    fn backward_euler_damps_dissipative_modes(model in any_model(), mf in 0.2..3.0f64, mg in 0.2..3.0f64, dt in 1e-6..1.0f64) {
        let symbols: Vec<_> = (0..=16).map(|k| model.linear_symbol(k, mf, mg)).collect();
        let props = precompute_propagators(&symbols, dt, Scheme::ImexBe).unwrap();
        for (k, l) in symbols.iter().enumerate() {
            // Real parts of both eigenvalues are non-positive iff tr ≤ 0 and det ≥ 0.
            if l.trace() > 0.0 || l.det() < 0.0 {
                continue;
            }
            let p = props.linear_propagator(k);
            let (tr, det) = (p.trace(), p.det());
            let disc = tr * tr - 4.0 * det;
            let radius = if disc >= 0.0 {
                (tr.abs() + disc.sqrt()) / 2.0
            } else {
                det.abs().sqrt()
            };
            prop_assert!(radius <= 1.0 + 1e-12, "k = {}, radius = {}", k, radius);
        }
    }

    #[test]
    fn rhs_conserves_mass(model in any_model(), f in poly(8, 0.3), g in poly(8, 0.3), mf in 0.5..2.0f64, mg in 0.5..2.0f64) {
        let k = f.bandwidth().max(g.bandwidth());
        let s = SimState::new(f.project(k), g.project(k), mf, mg).unwrap();
        let (rf, rg) = model.full_rhs(&s);
        prop_assert_eq!(rf.coeff(0), Complex64::new(0.0, 0.0));
        prop_assert_eq!(rg.coeff(0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn even_data_stay_even(model in any_model(), f in even_poly(6, 0.01), g in even_poly(6, 0.01)) {
        let s = SimState::new(f, g, 1.0, 1.5).unwrap();
        let (rf, rg) = model.full_rhs(&s);
        prop_assert!(is_real(&rf) && is_real(&rg));
        let cfg = StepperConfig {
            dt: 1e-5,
            scheme: Scheme::ImexCnAb2,
            bandwidth: 6,
            t_end: 5e-5,
            sample_every: 1,
            linear_only: false,
        };
        let end = timestepper::run_to_end(&s, &cfg, &model).unwrap();
        prop_assert!(is_real(&end.fbar) && is_real(&end.gbar));
        prop_assert_eq!(end.fbar.coeff(0), Complex64::new(0.0, 0.0));
    }
}

fn example_model() -> Model {
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

#[test]
fn restart_matches_single_run() {
    let fbar = TrigPoly::from_modes(8, &[(1, 0.004, 0.001), (3, 0.0, 0.002)]).unwrap();
    let gbar = TrigPoly::from_modes(8, &[(2, 0.001, -0.003)]).unwrap();
    let s0 = SimState::new(fbar, gbar, 1.0, 1.5).unwrap();
    let cfg = StepperConfig {
        dt: 1e-4,
        scheme: Scheme::ImexCnAb2,
        bandwidth: 8,
        t_end: 0.05,
        sample_every: 1,
        linear_only: false,
    };
    let mut whole = Stepper::new(example_model(), cfg.clone(), &s0).unwrap();
    let end = whole.advance(&s0, 500, |_, _| {}).unwrap();
    let mut split = Stepper::new(example_model(), cfg, &s0).unwrap();
    let mid = split.advance(&s0, 200, |_, _| {}).unwrap();
    let end2 = split.advance(&mid, 300, |_, _| {}).unwrap();
    assert_eq!(end, end2);
}

#[test]
fn identical_inputs_give_identical_series() {
    let fbar = TrigPoly::cosine(8, 2, 0.01).unwrap();
    let s0 = SimState::new(fbar, TrigPoly::zeros(8), 1.0, 1.5).unwrap();
    let cfg = StepperConfig {
        dt: 1e-4,
        scheme: Scheme::ImexCnAb2,
        bandwidth: 8,
        t_end: 0.02,
        sample_every: 10,
        linear_only: false,
    };
    let diag = DiagnosticsConfig::default();
    let (_, a) = timestepper::integrate(&s0, &cfg, &example_model(), &diag).unwrap();
    let (_, b) = timestepper::integrate(&s0, &cfg, &example_model(), &diag).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}
