//! Dense statevector simulation of the kicked Ising Floquet map `U = U_zz U_x`.
//!
//! Qubit `q` is bit `q` of the basis index (little-endian: qubit 0 is the
//! least significant bit). All bit lookups go through [`bit`] and [`spin`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;
use crate::qubit_state::DriveParams;
use crate::topology::ConnectivityGraph;

/// Default largest register the oracle will allocate (2^22 amplitudes, 64 MiB).
pub const DEFAULT_QUBIT_CAP: usize = 22;

/// Amplitudes handled per parallel work item.
const BLOCK: usize = 1 << 12;

#[inline]
pub fn bit(index: usize, qubit: usize) -> bool {
    (index >> qubit) & 1 == 1
}

/// Z eigenvalue of `qubit` in basis state `index`: +1 for `|0⟩`, −1 for `|1⟩`.
#[inline]
pub fn spin(index: usize, qubit: usize) -> f64 {
    if bit(index, qubit) {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Bytes needed for an `n`-qubit register.
pub fn register_bytes(n: usize) -> u128 {
    1u128
        .checked_shl(n as u32)
        .unwrap_or(u128::MAX)
        .saturating_mul(std::mem::size_of::<Complex64>() as u128)
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        let mib = register_bytes(n) as f64 / (1u64 << 20) as f64;
        let size = if mib < 1e6 {
            format!("{mib:.0}")
        } else {
            format!("{mib:.2e}")
        };
        return Err(Error::Resource(format!(
            "{n} qubits need {size} MiB of amplitudes; the qubit cap is {cap}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits, refusing registers larger than `cap`.
    pub fn zero(n: usize, cap: usize) -> Result<Self> {
        check_cap(n, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::validation(format!(
                "{} amplitudes for {n} qubits",
                amps.len()
            )));
        }
        Ok(StateVector { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        par::blocked_sum(self.amps.len(), BLOCK, |r| {
            self.amps[r].iter().map(|a| a.norm_sqr()).sum::<f64>()
        })
    }

    /// `exp(−ihX)` on every qubit.
    pub fn apply_ux(&mut self, h: f64) {
        let (s, c) = h.sin_cos();
        let kernel = move |lo: &mut [Complex64], hi: &mut [Complex64]| {
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                // c·x − i·s·y and −i·s·x + c·y
                *a0 = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
                *a1 = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
            }
        };
        for q in 0..self.n {
            let stride = 1usize << q;
            let pair = stride << 1;
            if pair <= BLOCK {
                par::for_each_chunk_mut(&mut self.amps, BLOCK.max(pair), |_, chunk| {
                    for block in chunk.chunks_mut(pair) {
                        let (lo, hi) = block.split_at_mut(stride);
                        kernel(lo, hi);
                    }
                });
            } else {
                for block in self.amps.chunks_mut(pair) {
                    let (lo, hi) = block.split_at_mut(stride);
                    par::for_each_zip_chunks_mut(lo, hi, BLOCK, kernel);
                }
            }
        }
    }

    /// `exp(iJ Σ_edges Z_j Z_k)` for coupling graph `g`.
    pub fn apply_uzz(&mut self, j: f64, g: &ConnectivityGraph) -> Result<()> {
        let diag = IsingDiagonal::new(g, j);
        self.apply_diagonal(&diag)
    }

    pub fn apply_diagonal(&mut self, diag: &IsingDiagonal) -> Result<()> {
        if diag.n != self.n {
            return Err(Error::validation(format!(
                "graph has {} qubits, state has {}",
                diag.n, self.n
            )));
        }
        par::for_each_chunk_mut(&mut self.amps, BLOCK, |ci, chunk| {
            let base = ci * BLOCK;
            for (off, a) in chunk.iter_mut().enumerate() {
                *a *= diag.phases[diag.level[base + off] as usize];
            }
        });
        Ok(())
    }

    pub fn expectation_z(&self, q: usize) -> f64 {
        par::blocked_sum(self.amps.len(), BLOCK, |r| {
            r.map(|i| self.amps[i].norm_sqr() * spin(i, q)).sum::<f64>()
        })
    }

    /// `Σ_{i: bit q = 0} conj(a_i) a_{i|q}`; ⟨X⟩ is twice its real part, ⟨Y⟩ twice its imaginary part.
    fn flip_overlap(&self, q: usize) -> Complex64 {
        let m = 1usize << q;
        par::blocked_sum(self.amps.len(), BLOCK, |r| {
            r.filter(|&i| !bit(i, q))
                .map(|i| self.amps[i].conj() * self.amps[i | m])
                .sum::<Complex64>()
        })
    }

    pub fn expectation_x(&self, q: usize) -> f64 {
        2.0 * self.flip_overlap(q).re
    }

    pub fn expectation_y(&self, q: usize) -> f64 {
        2.0 * self.flip_overlap(q).im
    }

    /// Single-qubit Bloch vector `(⟨X_q⟩, ⟨Y_q⟩, ⟨Z_q⟩)`.
    pub fn bloch(&self, q: usize) -> [f64; 3] {
        let w = self.flip_overlap(q);
        [2.0 * w.re, 2.0 * w.im, self.expectation_z(q)]
    }

    /// Purity `Tr ρ_q²` of the reduced state of qubit `q`.
    pub fn reduced_purity(&self, q: usize) -> f64 {
        let [x, y, z] = self.bloch(q);
        0.5 * (1.0 + x * x + y * y + z * z)
    }

    /// ⟨ψ|P|ψ⟩ for the tensor-product Pauli string `P` (identity elsewhere).
    pub fn expectation_pauli_string(&self, ops: &[(usize, Pauli)]) -> Result<f64> {
        let mut x_mask = 0usize;
        let mut z_mask = 0usize;
        let mut y_count = 0u32;
        let mut used = 0usize;
        for &(q, p) in ops {
            if q >= self.n {
                return Err(Error::validation(format!(
                    "qubit {q} out of range for {} qubits",
                    self.n
                )));
            }
            if used & (1 << q) != 0 {
                return Err(Error::validation(format!("qubit {q} appears twice")));
            }
            used |= 1 << q;
            match p {
                Pauli::X => x_mask |= 1 << q,
                Pauli::Z => z_mask |= 1 << q,
                Pauli::Y => {
                    x_mask |= 1 << q;
                    z_mask |= 1 << q;
                    y_count += 1;
                }
            }
        }
        // P|i⟩ = i^{#Y} (−1)^{popcount(i & z_mask)} |i ^ x_mask⟩
        let total = par::blocked_sum(self.amps.len(), BLOCK, |r| {
            r.map(|i| {
                let v = self.amps[i ^ x_mask].conj() * self.amps[i];
                if (i & z_mask).count_ones() % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .sum::<Complex64>()
        });
        let phase = match y_count % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Ok((phase * total).re)
    }
}

/// Diagonal of `U_zz` as a level index per basis state plus a phase table.
///
/// Basis state `i` with `k` anti-aligned edges has Ising energy `M − 2k`, so
/// only `M + 1` distinct phases `exp(iJ(M − 2k))` are ever evaluated.
#[derive(Debug, Clone)]
pub struct IsingDiagonal {
    n: usize,
    level: Vec<u32>,
    phases: Vec<Complex64>,
}

impl IsingDiagonal {
    pub fn new(g: &ConnectivityGraph, j: f64) -> Self {
        let n = g.n_qubits();
        let edges = g.edges();
        let level = par::map_range(1 << n, |i| {
            edges
                .iter()
                .filter(|&&(a, b)| bit(i, a) != bit(i, b))
                .count() as u32
        });
        let m = edges.len() as f64;
        let phases = (0..=edges.len())
            .map(|k| Complex64::from_polar(1.0, j * (m - 2.0 * k as f64)))
            .collect();
        IsingDiagonal { n, level, phases }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub site_z: Vec<f64>,
    pub mean_z: f64,
    /// Present when [`EvolveOptions::transverse`] is set.
    pub site_x: Option<Vec<f64>>,
    pub site_y: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub qubit_cap: usize,
    /// Also record ⟨X_j⟩ and ⟨Y_j⟩.
    pub transverse: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            qubit_cap: DEFAULT_QUBIT_CAP,
            transverse: false,
        }
    }
}

fn record(psi: &StateVector, step: usize, transverse: bool) -> StepRecord {
    let n = psi.n_qubits();
    if transverse {
        let blochs: Vec<[f64; 3]> = (0..n).map(|q| psi.bloch(q)).collect();
        let site_z: Vec<f64> = blochs.iter().map(|b| b[2]).collect();
        StepRecord {
            step,
            mean_z: site_z.iter().sum::<f64>() / n as f64,
            site_z,
            site_x: Some(blochs.iter().map(|b| b[0]).collect()),
            site_y: Some(blochs.iter().map(|b| b[1]).collect()),
        }
    } else {
        let site_z: Vec<f64> = (0..n).map(|q| psi.expectation_z(q)).collect();
        StepRecord {
            step,
            mean_z: site_z.iter().sum::<f64>() / n as f64,
            site_z,
            site_x: None,
            site_y: None,
        }
    }
}

/// Evolves `|0…0⟩` for `params.steps` Floquet periods, recording steps `0..=t`.
pub fn evolve(
    g: &ConnectivityGraph,
    params: &DriveParams,
    opts: EvolveOptions,
) -> Result<Vec<StepRecord>> {
    let mut psi = StateVector::zero(g.n_qubits(), opts.qubit_cap)?;
    let diag = IsingDiagonal::new(g, params.j);
    let mut out = Vec::with_capacity(params.steps + 1);
    out.push(record(&psi, 0, opts.transverse));
    for t in 1..=params.steps {
        psi.apply_ux(params.h);
        psi.apply_diagonal(&diag)?;
        out.push(record(&psi, t, opts.transverse));
    }
    Ok(out)
}

/// Final state after `params.steps` periods, for observables beyond magnetisation.
pub fn evolve_state(
    g: &ConnectivityGraph,
    params: &DriveParams,
    qubit_cap: usize,
) -> Result<StateVector> {
    let mut psi = StateVector::zero(g.n_qubits(), qubit_cap)?;
    let diag = IsingDiagonal::new(g, params.j);
    for _ in 0..params.steps {
        psi.apply_ux(params.h);
        psi.apply_diagonal(&diag)?;
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn register_size_saturates() {
        assert_eq!(register_bytes(3), 128);
        assert_eq!(register_bytes(127), u128::MAX);
        assert_eq!(register_bytes(200), u128::MAX);
        assert!(matches!(
            StateVector::zero(127, 22),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn bit_order_is_little_endian() {
        assert!(bit(0b10, 1));
        assert!(!bit(0b10, 0));
        assert_eq!(spin(0b100, 2), -1.0);
    }

    #[test]
    fn ux_identity_and_pulses() {
        let mut psi = StateVector::zero(3, 22).unwrap();
        let before = psi.clone();
        psi.apply_ux(0.0);
        assert_eq!(psi, before);

        let mut one = StateVector::zero(1, 22).unwrap();
        one.apply_ux(FRAC_PI_4);
        assert_abs_diff_eq!(one.amps[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(one.amps[1].im, -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(one.expectation_z(0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(one.expectation_y(0), -1.0, epsilon = 1e-15);

        let mut two = StateVector::zero(2, 22).unwrap();
        two.apply_ux(FRAC_PI_2);
        assert_abs_diff_eq!(two.amps[3].re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two.expectation_z(0), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two.expectation_z(1), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn ux_matches_per_qubit_rotation_on_large_register() {
        // Exercises the split-halves path (pair > BLOCK).
        let n = 14;
        let mut psi = StateVector::zero(n, 22).unwrap();
        psi.apply_ux(0.3);
        for q in 0..n {
            assert_abs_diff_eq!(psi.expectation_z(q), 0.6f64.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(psi.expectation_y(q), -0.6f64.sin(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn uzz_identity_and_basis_states() {
        let g = topology::ring(4).unwrap();
        let mut psi = StateVector::zero(4, 22).unwrap();
        psi.apply_ux(0.4);
        let before = psi.clone();
        psi.apply_uzz(0.0, &g).unwrap();
        for (a, b) in psi.amps.iter().zip(&before.amps) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
        let mut basis = StateVector::from_amplitudes(4, {
            let mut v = vec![c(0.0, 0.0); 16];
            v[0b0110] = c(1.0, 0.0);
            v
        })
        .unwrap();
        basis.apply_uzz(0.77, &g).unwrap();
        assert_abs_diff_eq!(basis.amps[0b0110].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn uzz_dimension_mismatch() {
        let mut psi = StateVector::zero(3, 22).unwrap();
        assert!(matches!(
            psi.apply_uzz(0.1, &topology::ring(4).unwrap()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn zz_pulse_entangles_plus_plus() {
        let g = topology::chain(2).unwrap();
        let mut psi = StateVector::from_amplitudes(2, vec![c(0.5, 0.0); 4]).unwrap();
        psi.apply_uzz(FRAC_PI_4, &g).unwrap();
        for q in 0..2 {
            assert_abs_diff_eq!(psi.expectation_z(q), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(psi.reduced_purity(q), 0.5, epsilon = 1e-15);
        }
        // e^{iπ/4 ZZ} X₀ e^{−iπ/4 ZZ} = −Y₀Z₁, and |++⟩ is a +1 eigenstate of X₀.
        let e = |ops: &[(usize, Pauli)]| psi.expectation_pauli_string(ops).unwrap();
        assert_abs_diff_eq!(e(&[(0, Pauli::Z), (1, Pauli::Z)]), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e(&[(0, Pauli::X), (1, Pauli::X)]), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e(&[(0, Pauli::Y), (1, Pauli::Z)]), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e(&[(0, Pauli::Z), (1, Pauli::Y)]), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e(&[(0, Pauli::Y), (1, Pauli::Y)]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pauli_string_basics() {
        let psi = StateVector::zero(1, 22).unwrap();
        assert_eq!(psi.expectation_pauli_string(&[(0, Pauli::Z)]).unwrap(), 1.0);
        assert_eq!(psi.expectation_pauli_string(&[(0, Pauli::X)]).unwrap(), 0.0);
        assert_eq!(psi.expectation_pauli_string(&[]).unwrap(), 1.0);
        assert!(psi.expectation_pauli_string(&[(1, Pauli::Z)]).is_err());
        assert!(psi
            .expectation_pauli_string(&[(0, Pauli::Z), (0, Pauli::X)])
            .is_err());
    }

    #[test]
    fn single_paulis_agree_with_dedicated_paths() {
        let g = topology::ring(5).unwrap();
        let p = DriveParams::from_angles(FRAC_PI_2, 0.9, 3).unwrap();
        let psi = evolve_state(&g, &p, 22).unwrap();
        for q in 0..5 {
            let [x, y, z] = psi.bloch(q);
            assert_abs_diff_eq!(
                psi.expectation_pauli_string(&[(q, Pauli::X)]).unwrap(),
                x,
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(
                psi.expectation_pauli_string(&[(q, Pauli::Y)]).unwrap(),
                y,
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(
                psi.expectation_pauli_string(&[(q, Pauli::Z)]).unwrap(),
                z,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn evolve_trivial_limits() {
        let g = topology::ring(6).unwrap();
        let recs = evolve(
            &g,
            &DriveParams::from_angles(FRAC_PI_2, 0.0, 8).unwrap(),
            EvolveOptions::default(),
        )
        .unwrap();
        assert_eq!(recs.len(), 9);
        for r in &recs {
            assert_abs_diff_eq!(r.mean_z, 1.0, epsilon = 1e-12);
        }
        let lone = topology::edgeless(1).unwrap();
        let th = 0.7;
        let recs = evolve(
            &lone,
            &DriveParams::from_angles(FRAC_PI_2, th, 10).unwrap(),
            EvolveOptions::default(),
        )
        .unwrap();
        for r in &recs {
            assert_abs_diff_eq!(r.mean_z, (th * r.step as f64).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn cap_enforced_with_memory_message() {
        let g = topology::chain(5).unwrap();
        let opts = EvolveOptions {
            qubit_cap: 4,
            transverse: false,
        };
        match evolve(&g, &DriveParams::new(0.1, 0.1, 1).unwrap(), opts) {
            Err(Error::Resource(msg)) => assert!(msg.contains("MiB"), "{msg}"),
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn transverse_records() {
        let g = topology::chain(3).unwrap();
        let p = DriveParams::from_angles(FRAC_PI_2, 0.5, 2).unwrap();
        let opts = EvolveOptions {
            transverse: true,
            ..Default::default()
        };
        let recs = evolve(&g, &p, opts).unwrap();
        let x = recs[2].site_x.as_ref().unwrap();
        let y = recs[2].site_y.as_ref().unwrap();
        for q in 0..3 {
            let r2 = x[q] * x[q] + y[q] * y[q] + recs[2].site_z[q].powi(2);
            assert!(r2 <= 1.0 + 1e-12);
        }
    }
}
