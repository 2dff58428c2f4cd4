use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use ncps::sweep::{parse_csv, render_csv};
use ncps::{
    build_darboux, build_omega, closed_form_invariants_family1, covariance_for,
    nc_williamson_spectrum, ppt_reflection, run_sweep, standard_symplectic, transform_covariance,
    transform_omega_ppt, wigner_value, Axis, DarbouxMap, GammaFamily, ModeLayout, NcParams,
    RowClass, StateParams, SweepSpec,
};

const LAYOUT: ModeLayout = ModeLayout::TWO_BY_TWO;

fn params() -> impl Strategy<Value = NcParams> {
    (0.0..2.0f64, 0.0..2.0f64)
        .prop_filter("theta*eta < 1", |(t, e)| t * e < 1.0)
        .prop_map(|(t, e)| NcParams::new(t, e).unwrap())
}

fn state(max_angle: f64) -> impl Strategy<Value = StateParams> {
    (0.0..0.99f64, 0.0..max_angle)
        .prop_map(|(r, phi)| StateParams::new(r * phi.cos(), r * phi.sin()).unwrap())
}

fn family() -> impl Strategy<Value = GammaFamily> {
    prop_oneof![Just(GammaFamily::First), Just(GammaFamily::Second)]
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.amax()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn darboux_map_reproduces_omega(p in params()) {
        let s = build_darboux(p, LAYOUT).unwrap().entries();
        let j = standard_symplectic(LAYOUT);
        let omega = build_omega(p, LAYOUT).unwrap();
        prop_assert!(max_abs(&(&s * j.entries() * s.transpose() - omega.entries())) <= 1e-12);
    }

    #[test]
    fn reflection_is_an_involution(p in params()) {
        let d = ppt_reflection(&build_darboux(p, LAYOUT).unwrap()).unwrap();
        prop_assert!(max_abs(&(&d * &d - DMatrix::identity(8, 8))) <= 1e-12);
    }

    #[test]
    fn reflection_maps_omega_to_omega_prime(p in params()) {
        let omega = build_omega(p, LAYOUT).unwrap();
        let d = ppt_reflection(&build_darboux(p, LAYOUT).unwrap()).unwrap();
        let d_inv = d.try_inverse().unwrap();
        let mapped = &d_inv * omega.entries() * d_inv.transpose();
        let prime = transform_omega_ppt(&omega).unwrap();
        prop_assert!(max_abs(&(mapped - prime.entries())) <= 1e-12);
    }

    #[test]
    fn structure_matrices_are_exactly_skew(p in params()) {
        let omega = build_omega(p, LAYOUT).unwrap();
        let prime = transform_omega_ppt(&omega).unwrap();
        for m in [omega.entries(), prime.entries()] {
            prop_assert_eq!(m.transpose(), -m);
        }
    }

    #[test]
    fn gauge_choice_does_not_leak(
        p in params(),
        c in 0.5..2.0f64,
        fam in family(),
        st in state(std::f64::consts::TAU),
    ) {
        let reference = build_darboux(p, LAYOUT).unwrap();
        let gauged = DarbouxMap::with_lambda(p, LAYOUT, c * reference.lambda()).unwrap();
        prop_assert!((gauged.mu() - reference.mu() / c).abs() <= 1e-12 * reference.mu());

        let omega = build_omega(p, LAYOUT).unwrap();
        let prime = transform_omega_ppt(&omega).unwrap();
        let j = standard_symplectic(LAYOUT);
        let s = gauged.entries();
        prop_assert!(max_abs(&(&s * j.entries() * s.transpose() - omega.entries())) <= 1e-11);

        let d = ppt_reflection(&gauged).unwrap();
        let d_inv = d.clone().try_inverse().unwrap();
        let mapped = &d_inv * omega.entries() * d_inv.transpose();
        prop_assert!(max_abs(&(mapped - prime.entries())) <= 1e-10);

        let sigma = covariance_for(fam, st).unwrap();
        let reflected = transform_covariance(&sigma, &d).unwrap();
        let via_gauge = nc_williamson_spectrum(&reflected, &omega).unwrap().nu_minus();
        let via_prime = nc_williamson_spectrum(&sigma, &prime).unwrap().nu_minus();
        prop_assert!((via_gauge - via_prime).abs() <= 1e-9 * via_prime);
    }

    #[test]
    fn closed_form_is_symmetric_in_theta_eta(p in params(), st in state(std::f64::consts::FRAC_PI_2)) {
        let a = closed_form_invariants_family1(p, st.m(), st.n_corr()).unwrap();
        let b = closed_form_invariants_family1(p.swapped(), st.m(), st.n_corr()).unwrap();
        prop_assert!((a.nu_minus - b.nu_minus).abs() <= 1e-12 * a.nu_minus.max(1.0));
        prop_assert!((a.nu_minus_prime - b.nu_minus_prime).abs() <= 1e-12 * a.nu_minus_prime.max(1.0));
    }

    #[test]
    fn closed_form_tracks_spectrum(p in params(), st in state(std::f64::consts::FRAC_PI_2)) {
        let cf = closed_form_invariants_family1(p, st.m(), st.n_corr()).unwrap();
        let sigma = covariance_for(GammaFamily::First, st).unwrap();
        let omega = build_omega(p, LAYOUT).unwrap();
        let prime = transform_omega_ppt(&omega).unwrap();
        let nu = nc_williamson_spectrum(&sigma, &omega).unwrap().nu_minus();
        let nu_p = nc_williamson_spectrum(&sigma, &prime).unwrap().nu_minus();
        prop_assert!((nu - cf.nu_minus).abs() <= 1e-9 * cf.nu_minus);
        prop_assert!((nu_p - cf.nu_minus_prime).abs() <= 1e-9 * cf.nu_minus_prime);
    }

    #[test]
    fn spectrum_is_sorted_positive_and_paired(p in params(), fam in family(), st in state(std::f64::consts::TAU)) {
        let sigma = covariance_for(fam, st).unwrap();
        let omega = build_omega(p, LAYOUT).unwrap();
        let spec = nc_williamson_spectrum(&sigma, &omega).unwrap();
        prop_assert_eq!(spec.values().len(), 4);
        prop_assert!(spec.values().windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(spec.nu_minus() > 0.0);
        prop_assert!(spec.residual() <= 1e-8 * spec.values()[3]);
    }

    #[test]
    fn scaling_multiplies_spectrum(p in params(), fam in family(), st in state(std::f64::consts::TAU), c in 1.01..10.0f64) {
        let sigma = covariance_for(fam, st).unwrap();
        let omega = build_omega(p, LAYOUT).unwrap();
        let base = nc_williamson_spectrum(&sigma, &omega).unwrap();
        let scaled = nc_williamson_spectrum(&sigma.scaled(c).unwrap(), &omega).unwrap();
        for (a, b) in base.values().iter().zip(scaled.values()) {
            prop_assert!((b - c * a).abs() <= 1e-10 * b);
        }
    }

    #[test]
    fn commutative_spectrum_equals_standard_williamson(fam in family(), st in state(std::f64::consts::TAU)) {
        let sigma = covariance_for(fam, st).unwrap();
        let omega = build_omega(NcParams::COMMUTATIVE, LAYOUT).unwrap();
        let j = standard_symplectic(LAYOUT);
        prop_assert_eq!(
            nc_williamson_spectrum(&sigma, &omega).unwrap(),
            nc_williamson_spectrum(&sigma, &j).unwrap()
        );
    }

    #[test]
    fn wigner_is_log_concave_along_rays(fam in family(), st in state(std::f64::consts::TAU), raw in prop::collection::vec(-1.0..1.0f64, 8), t in 0.1..2.0f64) {
        let sigma = covariance_for(fam, st).unwrap();
        let z = DVector::from_vec(raw);
        let f = |s: f64| wigner_value(&sigma, &(&z * s)).unwrap().ln();
        let h = 0.05;
        prop_assert!(f(t + h) - 2.0 * f(t) + f(t - h) <= 1e-9);
        prop_assert!(f(0.0) >= f(t));
    }

    #[test]
    fn csv_round_trip(fam in family(), st in state(std::f64::consts::TAU), steps in 2usize..6, max in 0.1..2.5f64) {
        let axis = Axis::new(0.0, max, steps).unwrap();
        let spec = SweepSpec { family: fam, state: st, theta: axis, eta: axis };
        let rows = run_sweep(&spec, 1).unwrap();
        let text = render_csv(&rows);
        let back = parse_csv(&text).unwrap();
        prop_assert_eq!(render_csv(&back), text);
        prop_assert!(back.iter().all(|r| r.is_consistent()));
    }
}

#[test]
fn m_n_swap_is_not_a_class_symmetry() {
    // Exchanging m and n keeps R but changes the class map.
    let axis = Axis::new(0.0, 0.6, 61).unwrap();
    let entangled = |state: StateParams| {
        let spec = SweepSpec {
            family: GammaFamily::First,
            state,
            theta: axis,
            eta: axis,
        };
        let rows = run_sweep(&spec, 1).unwrap();
        rows.iter()
            .filter(|r| r.class == RowClass::Entangled)
            .count()
    };
    for r in [0.1, 0.2, 0.5] {
        let a = entangled(StateParams::weak_m(r).unwrap());
        let b = entangled(StateParams::weak_n(r).unwrap());
        println!("R={r}: ENTANGLED cells m=R/10 {a}, swapped {b}");
    }
    let a = entangled(StateParams::weak_m(0.5).unwrap());
    let b = entangled(StateParams::weak_n(0.5).unwrap());
    assert_ne!(a, b);
}
