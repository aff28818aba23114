use polygon_gpt::composite::product_state;
use polygon_gpt::library::{phi_h, phi_j};
use polygon_gpt::nonlocality::{behaviour, chsh_max, chsh_value, hardy_scan, measurement_set, quantum_reference_constants};
use polygon_gpt::polygon::build_model;
use polygon_gpt::symmetry::group_elements;
use proptest::prelude::*;

#[test]
fn hardy_no_go_for_odd_maximally_entangled() {
    for n in [5, 7, 9] {
        let m = build_model(n).unwrap();
        let scan = hardy_scan(&phi_j(&m), &m, 1e-9);
        assert!(scan.best.is_none(), "n={n}");
        assert!(scan.max_constrained_success <= 1e-9, "n={n}");
    }
}

#[test]
fn hardy_even_maximally_entangled() {
    for n in [4, 6, 8, 10] {
        let m = build_model(n).unwrap();
        let s = hardy_scan(&phi_j(&m), &m, 1e-9).success().unwrap();
        assert!((s - (std::f64::consts::PI / n as f64).sin().powi(2)).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn chsh_bounds() {
    let q = quantum_reference_constants();
    for n in [5, 7] {
        let m = build_model(n).unwrap();
        assert!(chsh_max(&phi_j(&m), &m).value <= q.tsirelson + 1e-9);
    }
    let m = build_model(6).unwrap();
    assert!(chsh_max(&phi_j(&m), &m).value < 4.0);
}

#[test]
fn scans_are_invariant_under_local_symmetries() {
    let m = build_model(5).unwrap();
    let base_h = hardy_scan(&phi_h(), &m, 1e-9).success().unwrap();
    let base_c = chsh_max(&phi_h(), &m).value;
    for g in group_elements(&m).unwrap().iter().step_by(7) {
        let s = g.apply_state(&phi_h());
        assert!((hardy_scan(&s, &m, 1e-9).success().unwrap() - base_h).abs() < 1e-9);
        assert!((chsh_max(&s, &m).value - base_c).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn behaviours_are_no_signaling(n in 4usize..=8, idx in proptest::array::uniform4(0usize..16)) {
        let m = build_model(n).unwrap();
        let ms = measurement_set(&m);
        let k = ms.len();
        let b = behaviour(&phi_j(&m), &ms[idx[0] % k], &ms[idx[1] % k], &ms[idx[2] % k], &ms[idx[3] % k]);
        prop_assert!(b.signaling() <= 1e-12);
        prop_assert!(b.normalization_error() <= 1e-12);
        prop_assert!(b.min_entry() >= -1e-12);
    }

    #[test]
    fn product_states_respect_local_bound(n in 4usize..=8, i in 0usize..8, j in 0usize..8, idx in proptest::array::uniform4(0usize..16)) {
        let m = build_model(n).unwrap();
        let ms = measurement_set(&m);
        let k = ms.len();
        let s = product_state(&m.states[i % n], &m.states[j % n]);
        let b = behaviour(&s, &ms[idx[0] % k], &ms[idx[1] % k], &ms[idx[2] % k], &ms[idx[3] % k]);
        prop_assert!(chsh_value(&b).abs() <= 2.0 + 1e-9);
    }
}
