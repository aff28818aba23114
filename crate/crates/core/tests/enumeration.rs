use polygon_gpt::composite::{is_valid_state, product_state};
use polygon_gpt::enumerate::{classify_entangled, enumerate_extreme_states, Enumeration};
use polygon_gpt::library::{phi_h, phi_j};
use polygon_gpt::polygon::{build_model, PolygonModel};
use polygon_gpt::symmetry::{group_elements, Representative};
use polygon_gpt::Tolerances;

fn enumerate(n: usize) -> (PolygonModel, Enumeration) {
    let m = build_model(n).unwrap();
    let e = enumerate_extreme_states(&m, Representative::Min, &Tolerances::default()).unwrap();
    (m, e)
}

fn assert_closed(m: &PolygonModel, e: &Enumeration) {
    let els = group_elements(m).unwrap();
    for v in &e.vertices {
        assert!(e.contains(&v.state.swap()));
        for g in &els {
            assert!(e.contains(&g.apply_state(&v.state)));
        }
    }
}

#[test]
fn square_vertices() {
    let (m, e) = enumerate(4);
    assert_eq!((e.total(), e.product_count(), e.entangled_count()), (24, 16, 8));
    for w1 in &m.states {
        for w2 in &m.states {
            assert!(e.contains(&product_state(w1, w2)));
        }
    }
    let classes = classify_entangled(&m, &e).unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0].size, 8);
    assert_closed(&m, &e);
}

#[test]
fn pentagon_vertices() {
    let (m, e) = enumerate(5);
    assert_eq!((e.total(), e.product_count(), e.entangled_count()), (135, 25, 110));
    let classes = classify_entangled(&m, &e).unwrap();
    let sizes: Vec<usize> = classes.iter().map(|c| c.size).collect();
    assert_eq!(sizes, vec![10, 100]);
    assert_eq!(classes[0].matched_name.as_deref(), Some("J"));
    assert_eq!(classes[1].matched_name.as_deref(), Some("H"));
    assert!(e.contains(&phi_j(&m)) && e.contains(&phi_h()));
    assert_closed(&m, &e);
    for v in &e.vertices {
        assert!(is_valid_state(&v.state, &m));
        assert_eq!(v.state.facet_rank(&m, 1e-7), 8);
    }
}

#[test]
fn representative_choice_does_not_matter() {
    let m = build_model(5).unwrap();
    let tol = Tolerances::default();
    let a = enumerate_extreme_states(&m, Representative::Min, &tol).unwrap();
    let b = enumerate_extreme_states(&m, Representative::Max, &tol).unwrap();
    assert_eq!(a.total(), b.total());
    assert!(a.vertices.iter().all(|v| b.contains(&v.state)));
}

#[test]
fn output_is_deterministic() {
    let (_, a) = enumerate(4);
    let (_, b) = enumerate(4);
    assert_eq!(a, b);
}
