mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};

use num_complex::Complex64;

use kimf::exact::{self, EvolveOptions, Pauli, StateVector};
use kimf::qubit_state::DriveParams;
use kimf::report;
use kimf::sweep::{self, SweepMode, SweepSpec, ThetaGrid, TopologySource};
use kimf::topology::{self, ConnectivityGraph};

use common::{dense_evolve, floquet, matvec};

fn small_graphs() -> Vec<(&'static str, ConnectivityGraph)> {
    vec![
        ("single", topology::edgeless(1).unwrap()),
        ("pair", topology::chain(2).unwrap()),
        ("chain3", topology::chain(3).unwrap()),
        ("ring4", topology::ring(4).unwrap()),
        ("complete4", topology::complete(4).unwrap()),
        (
            "star5",
            ConnectivityGraph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap(),
        ),
        (
            "heavy-hex-like6",
            ConnectivityGraph::new(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)])
                .unwrap(),
        ),
        ("ring6", topology::ring(6).unwrap()),
    ]
}

#[test]
fn gatewise_matches_dense_matrix() {
    for (name, g) in small_graphs() {
        for theta_j in [FRAC_PI_2, 0.7] {
            for theta_h in [0.0, 0.3, 1.0, FRAC_PI_2, 2.5] {
                let p = DriveParams::from_angles(theta_j, theta_h, 6).unwrap();
                let fast = exact::evolve(&g, &p, EvolveOptions::default()).unwrap();
                let slow = dense_evolve(&g, p.j, p.h, 6);
                for (rec, want) in fast.iter().zip(&slow) {
                    for (a, b) in rec.site_z.iter().zip(want) {
                        assert!(
                            (a - b).abs() < 1e-10,
                            "{name} θ_h={theta_h} t={}: {a} vs {b}",
                            rec.step
                        );
                    }
                }
            }
        }
    }
}

fn pauli_matrix(p: Pauli) -> [[Complex64; 2]; 2] {
    let (o, l, i) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    match p {
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    }
}

/// `⟨ψ|P|ψ⟩` with `P` applied one factor at a time by explicit 2×2 action.
fn dense_pauli_expectation(psi: &[Complex64], ops: &[(usize, Pauli)]) -> f64 {
    let mut phi = psi.to_vec();
    for &(q, p) in ops {
        let m = pauli_matrix(p);
        let mut next = vec![Complex64::new(0.0, 0.0); phi.len()];
        for (i, a) in phi.iter().enumerate() {
            let b = (i >> q) & 1;
            for (r, row) in m.iter().enumerate() {
                let k = (i & !(1 << q)) | (r << q);
                next[k] += row[b] * a;
            }
        }
        phi = next;
    }
    psi.iter().zip(&phi).map(|(a, b)| (a.conj() * b).re).sum()
}

#[test]
fn pauli_strings_match_dense_operator() {
    let g = ConnectivityGraph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 3)]).unwrap();
    let p = DriveParams::from_angles(FRAC_PI_2, 0.8, 3).unwrap();
    let psi = exact::evolve_state(&g, &p, 10).unwrap();
    let strings: Vec<Vec<(usize, Pauli)>> = vec![
        vec![(2, Pauli::Z)],
        vec![(0, Pauli::X), (1, Pauli::Y)],
        vec![(4, Pauli::Y), (3, Pauli::Y), (0, Pauli::Z)],
        vec![
            (0, Pauli::X),
            (1, Pauli::X),
            (2, Pauli::X),
            (3, Pauli::X),
            (4, Pauli::X),
        ],
        vec![(1, Pauli::Y), (2, Pauli::Z), (3, Pauli::X)],
        vec![],
    ];
    for s in strings {
        let got = psi.expectation_pauli_string(&s).unwrap();
        let want = dense_pauli_expectation(psi.amplitudes(), &s);
        assert!((got - want).abs() < 1e-12, "{s:?}: {got} vs {want}");
    }
}

#[test]
fn edgeless_graphs_precess_rigidly() {
    for n in 1..=6 {
        let g = topology::edgeless(n).unwrap();
        for theta_h in [0.1, 0.5, 1.3] {
            let p = DriveParams::from_angles(FRAC_PI_2, theta_h, 10).unwrap();
            for rec in exact::evolve(&g, &p, EvolveOptions::default()).unwrap() {
                let want = (theta_h * rec.step as f64).cos();
                assert!(rec.site_z.iter().all(|z| (z - want).abs() < 1e-10));
            }
        }
    }
}

#[test]
fn floquet_matrix_is_unitary_and_kernels_agree_on_random_state() {
    let g = topology::complete(4).unwrap();
    let (j, h) = (0.37, 0.91);
    let u = floquet(&g, j, h);
    let amps: Vec<Complex64> = (0..16)
        .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
    let want = matvec(&u, &amps);
    let mut psi = StateVector::from_amplitudes(4, amps).unwrap();
    psi.apply_ux(h);
    psi.apply_uzz(j, &g).unwrap();
    for (a, b) in psi.amplitudes().iter().zip(&want) {
        assert!((a - b).norm() < 1e-12);
    }
    assert!((want.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn ring10_golden_curve() {
    let mut spec = SweepSpec::new(SweepMode::Exact, ThetaGrid::single(1.0).unwrap(), 20);
    spec.topology = TopologySource::Builtin("ring:10".into());
    let result = sweep::run_sweep(&spec).unwrap();

    let golden_path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/data/exact_ring10_theta1_t20.csv"
    );
    let mut buf = Vec::new();
    report::write_csv(&result, &mut buf).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        std::fs::read_to_string(golden_path).unwrap()
    );

    // The golden values themselves agree with the dense-matrix path.
    let golden = report::load_csv(golden_path.as_ref()).unwrap();
    let g = topology::ring(10).unwrap();
    let dense = dense_evolve(&g, PI / 4.0, 0.5, 20);
    assert_eq!(golden.rows.len(), 21);
    for r in &golden.rows {
        assert!(
            (r.value - common::mean(&dense[r.step])).abs() < 1e-10,
            "step {}",
            r.step
        );
    }
}

#[test]
fn ring12_reference_against_full_dense_matrix() {
    let g = topology::ring(12).unwrap();
    let p = DriveParams::from_angles(FRAC_PI_2, FRAC_PI_8, 5).unwrap();
    let fast = exact::evolve(&g, &p, EvolveOptions::default()).unwrap();
    let slow = common::dense_evolve_streamed(&g, p.j, p.h, 5);
    for (rec, want) in fast.iter().zip(&slow) {
        for (a, b) in rec.site_z.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }
    }
    assert!((fast[5].mean_z - RING12_PI8_T5).abs() < 1e-12);
}

/// Mean ⟨Z⟩ on ring(12) at θ_h = π/8 after five periods; matches the dense path above.
const RING12_PI8_T5: f64 = 0.917_315_609_264_215_1;

#[test]
fn streamed_elements_match_kronecker_product() {
    let ux = common::dense_ux(4, 0.61);
    for (i, row) in ux.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert!((common::ux_element(4, 0.61, i, j) - v).norm() < 1e-15);
        }
    }
}
