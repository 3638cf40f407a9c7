use std::sync::OnceLock;

use quantum_bouncer::eigenstates::EigenstateTable;

fn table() -> &'static EigenstateTable {
    static T: OnceLock<EigenstateTable> = OnceLock::new();
    T.get_or_init(|| EigenstateTable::with_defaults().unwrap())
}

#[test]
fn gram_matrix_is_identity() {
    let t = table();
    let mut worst = 0f64;
    for m in 1..=30 {
        for n in m..=30 {
            let expected = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((t.overlap(m, n).unwrap() - expected).abs());
        }
    }
    assert!(worst < 1e-8, "{worst:e}");
}

#[test]
fn off_diagonal_position_elements_match_closed_form() {
    let t = table();
    let z0 = t.scales().z0;
    for m in 1..=30 {
        for n in (m + 1)..=30 {
            let gap = t.lambda(n).unwrap() - t.lambda(m).unwrap();
            let oracle = 2.0 * z0 / (gap * gap);
            let q = t.matrix_element_z(m, n).unwrap().abs();
            assert!(
                (q - oracle).abs() / oracle < 1e-6,
                "({m},{n}): {q} vs {oracle}"
            );
        }
    }
}

#[test]
fn diagonal_moments_match_closed_form() {
    let t = table();
    let z0 = t.scales().z0;
    for n in [1, 2, 7, 30] {
        let l = t.lambda(n).unwrap();
        let mean = t.matrix_element_z(n, n).unwrap();
        assert!((mean - 2.0 / 3.0 * l * z0).abs() / mean < 1e-10);
        let var = t.position_variance(n).unwrap();
        let oracle = 4.0 / 45.0 * l * l * z0 * z0;
        assert!((var - oracle).abs() / oracle < 1e-8);
    }
}

#[test]
fn phase_operator_is_complete_over_bound_states() {
    let t = table();
    let z0 = t.scales().z0;
    for n in [1, 3, 10] {
        for qz in [0.1, 0.3, 0.5] {
            let q = qz / z0;
            let total: f64 = (1..=100)
                .map(|m| t.phase_matrix_element(m, n, q).unwrap().norm_sqr())
                .sum();
            assert!((total - 1.0).abs() < 1e-3, "n = {n}, qz0 = {qz}: {total}");
        }
    }
}

#[test]
fn energies_follow_semiclassical_law() {
    let t = table();
    for n in 1..=30 {
        let e = t.energy_of(n).unwrap().pev;
        let approx = 1.7 * (n as f64 - 0.25).powf(2.0 / 3.0);
        assert!((e - approx).abs() / e <= 0.01, "{n}: {e} vs {approx}");
    }
}
