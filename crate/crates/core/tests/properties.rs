use gratingsim::dynamics::transient_kernel;
use gratingsim::io::fmt_f64;
use gratingsim::model::{coherence_steady_closed, steady_state_write, AtomParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = Complex64> {
    (1e-3f64..5.0, 0.0..std::f64::consts::TAU).prop_map(|(r, phi)| Complex64::from_polar(r, phi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn steady_state_is_a_physical_density_matrix(
        w in field(), wp in field(), ratio in 1e-4f64..0.5,
    ) {
        let atom = AtomParams::default().with_gamma_ratio(ratio);
        let rho = steady_state_write(&atom, w, wp).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!(rho.population_excursion() < 1e-12);
        prop_assert!(rho.positivity_violation() < 1e-12);
    }

    #[test]
    fn linear_solve_matches_closed_coherence(
        w in field(), wp in field(), ratio in 1e-4f64..0.5,
    ) {
        let atom = AtomParams::default().with_gamma_ratio(ratio);
        let rho = steady_state_write(&atom, w, wp).unwrap();
        let closed = coherence_steady_closed(&atom, w, wp).unwrap();
        prop_assert!((rho.rho_ab - closed).norm() <= 1e-10 * closed.norm().max(1e-12));
    }

    #[test]
    fn conjugating_the_fields_conjugates_the_state(w in field(), wp in field()) {
        let atom = AtomParams::default();
        let a = steady_state_write(&atom, w, wp).unwrap();
        let b = steady_state_write(&atom, w.conj(), wp.conj()).unwrap();
        prop_assert!(a.conj().max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn kernel_is_bounded_by_its_free_limit(z in -4.0f64..4.0, t in 0.0f64..20.0) {
        // g is increasing in z, and z = 0 gives g = t
        let g = transient_kernel(z, t);
        prop_assert!(g.is_finite());
        if z <= 0.0 { prop_assert!(g <= t * (1.0 + 1e-12)); } else { prop_assert!(g >= t * (1.0 - 1e-12)); }
    }

    #[test]
    fn formatted_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back: f64 = fmt_f64(x).parse().unwrap();
        prop_assert_eq!(back, if x == 0.0 { 0.0 } else { x });
    }
}
