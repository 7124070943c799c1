//! Dense-matrix reference for the Floquet map, built from Kronecker products.
//! Shares nothing with the gate-wise kernels beyond the graph type.

#![allow(dead_code)]

use num_complex::Complex64;

use kimf::topology::ConnectivityGraph;

pub type Matrix = Vec<Vec<Complex64>>;

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `exp(−ih Σ X_j)` as `⊗_q (cos h 𝟙 − i sin h X)`, qubit 0 least significant.
pub fn dense_ux(n: usize, h: f64) -> Matrix {
    let c = Complex64::new(h.cos(), 0.0);
    let s = Complex64::new(0.0, -h.sin());
    let single = vec![vec![c, s], vec![s, c]];
    let mut m = vec![vec![Complex64::new(1.0, 0.0)]];
    for _ in 0..n {
        m = kron(&single, &m);
    }
    m
}

/// Diagonal of `exp(iJ Σ_edges Z_a Z_b)`.
pub fn dense_uzz(g: &ConnectivityGraph, j: f64) -> Vec<Complex64> {
    (0..1usize << g.n_qubits())
        .map(|i| {
            let z = |q: usize| if i & (1 << q) == 0 { 1.0 } else { -1.0 };
            let e: f64 = g.edges().iter().map(|&(a, b)| z(a) * z(b)).sum();
            Complex64::from_polar(1.0, j * e)
        })
        .collect()
}

/// One Floquet period `U_zz U_x` as a dense matrix.
pub fn floquet(g: &ConnectivityGraph, j: f64, h: f64) -> Matrix {
    let ux = dense_ux(g.n_qubits(), h);
    let d = dense_uzz(g, j);
    ux.into_iter()
        .zip(&d)
        .map(|(row, &di)| row.into_iter().map(|v| di * v).collect())
        .collect()
}

pub fn matvec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn site_z(psi: &[Complex64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|q| {
            psi.iter()
                .enumerate()
                .map(|(i, a)| {
                    if i & (1 << q) == 0 {
                        a.norm_sqr()
                    } else {
                        -a.norm_sqr()
                    }
                })
                .sum()
        })
        .collect()
}

/// Per-step site magnetisations, steps `0..=steps`, from `|0…0⟩`.
pub fn dense_evolve(g: &ConnectivityGraph, j: f64, h: f64, steps: usize) -> Vec<Vec<f64>> {
    let n = g.n_qubits();
    let u = floquet(g, j, h);
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    psi[0] = Complex64::new(1.0, 0.0);
    let mut out = vec![site_z(&psi, n)];
    for _ in 0..steps {
        psi = matvec(&u, &psi);
        out.push(site_z(&psi, n));
    }
    out
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `⟨i|U_x|j⟩ = cos(h)^{n−d} (−i sin h)^d` with `d` the Hamming distance,
/// so the full matrix never needs to be stored.
pub fn ux_element(n: usize, h: f64, i: usize, j: usize) -> Complex64 {
    let d = (i ^ j).count_ones() as i32;
    Complex64::new(h.cos().powi(n as i32 - d), 0.0) * Complex64::new(0.0, -h.sin()).powi(d)
}

/// Like [`dense_evolve`], but streams matrix rows instead of storing them.
pub fn dense_evolve_streamed(g: &ConnectivityGraph, j: f64, h: f64, steps: usize) -> Vec<Vec<f64>> {
    let n = g.n_qubits();
    let dim = 1usize << n;
    let d = dense_uzz(g, j);
    // Elements depend on the Hamming distance only.
    let by_distance: Vec<Complex64> = (0..=n).map(|k| ux_element(n, h, 0, (1 << k) - 1)).collect();
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[0] = Complex64::new(1.0, 0.0);
    let mut out = vec![site_z(&psi, n)];
    for _ in 0..steps {
        psi = (0..dim)
            .map(|row| {
                let acc: Complex64 = (0..dim)
                    .map(|col| by_distance[(row ^ col).count_ones() as usize] * psi[col])
                    .sum();
                d[row] * acc
            })
            .collect();
        out.push(site_z(&psi, n));
    }
    out
}
