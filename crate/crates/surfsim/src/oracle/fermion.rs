//! Dense statevector simulator for small fermionic systems (≤ 4 modes),
//! used as an independent reference for the covariance-matrix evolution.
//!
//! Modes map to qubits through the Jordan–Wigner convention
//! γ_{2k} = â_k + â†_k = (∏_{j<k} Z_j) X_k and
//! γ_{2k+1} = i(â_k − â†_k) = −(∏_{j<k} Z_j) Y_k,
//! under which the vacuum |0…0⟩ satisfies ⟨i γ_{2k} γ_{2k+1}⟩ = +1.
//! Everything here works on the full 2^modes-dimensional vector, so it
//! shares no code path with the covariance representation it checks.

use num_complex::Complex64;

pub struct DenseFermion {
    n_modes: usize,
    dim: usize,
}

#[derive(Clone)]
pub struct FermionState {
    pub amps: Vec<Complex64>,
}

impl DenseFermion {
    pub fn new(n_modes: usize) -> Self {
        assert!((1..=12).contains(&n_modes), "dense oracle sized for small systems");
        DenseFermion { n_modes, dim: 1 << n_modes }
    }

    pub fn n_majorana(&self) -> usize {
        2 * self.n_modes
    }

    /// |0…0⟩, stabilized as i γ_{2k} γ_{2k+1} = +1 for every mode k.
    pub fn vacuum(&self) -> FermionState {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim];
        amps[0] = Complex64::new(1.0, 0.0);
        FermionState { amps }
    }

    /// Apply the Majorana operator γ_g to `state`.
    pub fn apply_gamma(&self, state: &mut FermionState, g: usize) {
        let mode = g / 2;
        let odd = g % 2 == 1;
        let string_mask: usize = (1 << mode) - 1; // Z string on modes below
        let flip = 1usize << mode;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (idx, &a) in state.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let z_sign = if ((idx & string_mask).count_ones() & 1) == 1 { -1.0 } else { 1.0 };
            let target = idx ^ flip;
            let factor = if odd {
                // −Y_k: |0⟩ → −i|1⟩, |1⟩ → +i|0⟩.
                if idx & flip == 0 {
                    Complex64::new(0.0, -1.0)
                } else {
                    Complex64::new(0.0, 1.0)
                }
            } else {
                // X_k.
                Complex64::new(1.0, 0.0)
            };
            out[target] += a * factor * z_sign;
        }
        state.amps = out;
    }

    /// exp(θ γ_p γ_q) |ψ⟩ = cos θ |ψ⟩ + sin θ γ_p γ_q |ψ⟩ (p ≠ q).
    pub fn apply_rotation(&self, state: &mut FermionState, theta: f64, p: usize, q: usize) {
        assert_ne!(p, q);
        let mut rotated = state.clone();
        self.apply_gamma(&mut rotated, q);
        self.apply_gamma(&mut rotated, p);
        let (c, s) = (theta.cos(), theta.sin());
        for i in 0..self.dim {
            state.amps[i] = c * state.amps[i] + s * rotated.amps[i];
        }
    }

    /// Project onto the +1 eigenspace of i γ_p γ_q, renormalize, and return
    /// the outcome probability. Swap p and q for the −1 outcome.
    pub fn project_plus(&self, state: &mut FermionState, p: usize, q: usize) -> f64 {
        let mut op = state.clone();
        self.apply_gamma(&mut op, q);
        self.apply_gamma(&mut op, p);
        // (1 + i γ_p γ_q)/2 |ψ⟩
        for i in 0..self.dim {
            state.amps[i] = (state.amps[i] + Complex64::new(0.0, 1.0) * op.amps[i]) / 2.0;
        }
        let norm2: f64 = state.amps.iter().map(|a| a.norm_sqr()).sum();
        if norm2 > 0.0 {
            let inv = 1.0 / norm2.sqrt();
            for a in state.amps.iter_mut() {
                *a *= inv;
            }
        }
        norm2
    }

    /// ⟨i γ_j γ_k⟩ on `state` (real for j ≠ k since the operator is
    /// Hermitian; the imaginary part is rounding noise).
    pub fn pair_expectation(&self, state: &FermionState, j: usize, k: usize) -> f64 {
        let mut op = state.clone();
        self.apply_gamma(&mut op, k);
        self.apply_gamma(&mut op, j);
        let val: Complex64 = state
            .amps
            .iter()
            .zip(op.amps.iter())
            .map(|(a, b)| a.conj() * b * Complex64::new(0.0, 1.0))
            .sum();
        val.re
    }

    /// Full covariance matrix M_jk = ⟨i γ_j γ_k⟩ − i δ_jk of `state`.
    pub fn covariance(&self, state: &FermionState) -> Vec<f64> {
        let n = self.n_majorana();
        let mut m = vec![0.0; n * n];
        for j in 0..n {
            for k in (j + 1)..n {
                let v = self.pair_expectation(state, j, k);
                m[j * n + k] = v;
                m[k * n + j] = -v;
            }
        }
        m
    }

    /// ⟨ψ| γ_{j1} ⋯ γ_{j2p} |ψ⟩ as a complex number (for monomial checks).
    pub fn monomial_expectation(&self, state: &FermionState, indices: &[usize]) -> Complex64 {
        let mut op = state.clone();
        for &g in indices.iter().rev() {
            self.apply_gamma(&mut op, g);
        }
        state
            .amps
            .iter()
            .zip(op.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gammas_anticommute_and_square_to_one() {
        let sim = DenseFermion::new(3);
        let dim = 1 << 3;
        // Check on a spread of basis states: {γ_a, γ_b} |e_i⟩ = 2 δ_ab |e_i⟩.
        for a in 0..6 {
            for b in 0..6 {
                for basis in [0usize, 3, 5, 7] {
                    let mut e = FermionState {
                        amps: vec![Complex64::new(0.0, 0.0); dim],
                    };
                    e.amps[basis] = Complex64::new(1.0, 0.0);
                    let mut ab = e.clone();
                    sim.apply_gamma(&mut ab, b);
                    sim.apply_gamma(&mut ab, a);
                    let mut ba = e.clone();
                    sim.apply_gamma(&mut ba, a);
                    sim.apply_gamma(&mut ba, b);
                    for i in 0..dim {
                        let anti = ab.amps[i] + ba.amps[i];
                        let expect = if a == b && i == basis {
                            Complex64::new(2.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        assert_abs_diff_eq!((anti - expect).norm(), 0.0, epsilon = 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn vacuum_covariance_is_mode_paired() {
        let sim = DenseFermion::new(3);
        let vac = sim.vacuum();
        let n = sim.n_majorana();
        let m = sim.covariance(&vac);
        for j in 0..n {
            for k in 0..n {
                let expect = if k == j + 1 && j % 2 == 0 {
                    1.0
                } else if j == k + 1 && k % 2 == 0 {
                    -1.0
                } else {
                    0.0
                };
                assert_abs_diff_eq!(m[j * n + k], expect, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn rotation_preserves_norm_and_rotates_pair() {
        let sim = DenseFermion::new(2);
        let mut st = sim.vacuum();
        let theta = 0.43;
        sim.apply_rotation(&mut st, theta, 2, 1);
        let norm2: f64 = st.amps.iter().map(|a| a.norm_sqr()).sum();
        assert_abs_diff_eq!(norm2, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            sim.pair_expectation(&st, 0, 1),
            (2.0 * theta).cos(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            sim.pair_expectation(&st, 0, 2),
            (2.0 * theta).sin(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn random_sequences_match_covariance_evolution() {
        // Dense referee for the Gaussian-state engine: drive both through
        // identical random rotation/measurement scripts and compare the full
        // covariance matrix after every operation.
        use crate::flo::CovarianceMatrix;
        use crate::tolerances::DENSE_EQUIV_TOL;
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(271828);
        let sim = DenseFermion::new(3);
        let nm = sim.n_majorana();
        for trial in 0..50 {
            let dense = sim.vacuum();
            let pairs: Vec<(usize, usize)> = (0..3).map(|k| (2 * k, 2 * k + 1)).collect();
            for track in [false, true] {
                let mut rng2 = rng.clone();
                let mut cov = CovarianceMatrix::from_stabilized_pairs(nm, &pairs, track).unwrap();
                let mut dense2 = dense.clone();
                for step in 0..12 {
                    let p = rng2.gen_range(0..nm);
                    let mut q = rng2.gen_range(0..nm);
                    while q == p {
                        q = rng2.gen_range(0..nm);
                    }
                    if rng2.gen_bool(0.7) {
                        let theta = rng2.gen_range(-1.5..1.5);
                        sim.apply_rotation(&mut dense2, theta, p, q);
                        cov.apply_rotation(theta, p, q);
                    } else {
                        // Choose the likelier outcome so both sides stay on
                        // the same branch and never hit a zero probability.
                        let prob_plus = (1.0 + sim.pair_expectation(&dense2, p, q)) / 2.0;
                        let plus = prob_plus >= 0.5;
                        let dense_prob = if plus {
                            sim.project_plus(&mut dense2, p, q)
                        } else {
                            sim.project_plus(&mut dense2, q, p)
                        };
                        let cov_prob = cov.measure_forced(p, q, plus).unwrap();
                        assert!(
                            (dense_prob - cov_prob).abs() < DENSE_EQUIV_TOL,
                            "trial {trial} step {step}: prob {dense_prob} vs {cov_prob}"
                        );
                    }
                    let reference = sim.covariance(&dense2);
                    for j in 0..nm {
                        for k in 0..nm {
                            let got = cov.entry(j, k);
                            let want = reference[j * nm + k];
                            assert!(
                                (got - want).abs() < DENSE_EQUIV_TOL,
                                "trial {trial} step {step} track={track}: M[{j},{k}] {got} vs {want}"
                            );
                        }
                    }
                }
            }
            // Advance the outer rng so the next trial gets a fresh script.
            for _ in 0..40 {
                let _: u64 = rng.gen();
            }
        }
    }

    #[test]
    fn projector_splits_outcomes_correctly() {
        let sim = DenseFermion::new(2);
        let mut st = sim.vacuum();
        sim.apply_rotation(&mut st, 0.43, 2, 1);
        let mut plus = st.clone();
        let p_plus = sim.project_plus(&mut plus, 0, 1);
        let mut minus = st;
        let p_minus = sim.project_plus(&mut minus, 1, 0);
        assert_abs_diff_eq!(p_plus + p_minus, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p_plus, (1.0 + (0.86f64).cos()) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sim.pair_expectation(&plus, 0, 1), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(sim.pair_expectation(&minus, 0, 1), -1.0, epsilon = 1e-13);
    }
}
