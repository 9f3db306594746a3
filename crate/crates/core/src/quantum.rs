//! Quantum baseline for the adaptive game.
//!
//! Alice–Bob and Bob–Charlie each share a singlet. Bob performs a Bell
//! measurement on his two qubits (entanglement swapping), announces nothing,
//! and outputs the two-bit variant label determined by his outcome; Alice and
//! Charlie measure fixed equatorial angles. With the right angle choice and
//! Bell-outcome-to-variant assignment this wins with probability
//! `½(1 + 1/√2)`, matching the Tsirelson value of each CHSH variant.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::game::{win_bit, Bit};
use crate::{Error, Result, TAU_FEAS};

/// A density matrix of dimension `dim`, stored row-major.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl DensityMatrix {
    pub fn from_pure(state: &[C64]) -> Result<Self> {
        let dim = state.len();
        let norm2: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > TAU_FEAS {
            return Err(Error::Domain(format!(
                "state vector has squared norm {norm2}, expected 1"
            )));
        }
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = state[i] * state[j].conj();
            }
        }
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Hermiticity, unit trace, and positive semidefiniteness (by pivoted
    /// Cholesky: a Hermitian matrix is PSD iff the factorization never meets
    /// a negative pivot and columns under a vanishing pivot vanish).
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if self.data.len() != d * d {
            return Err(Error::Domain("density matrix shape mismatch".into()));
        }
        for i in 0..d {
            for j in 0..d {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > TAU_FEAS {
                    return Err(Error::Domain("density matrix is not Hermitian".into()));
                }
            }
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TAU_FEAS || tr.im.abs() > TAU_FEAS {
            return Err(Error::Domain(format!("density matrix trace is {tr}")));
        }
        if !hermitian_is_psd(d, &self.data) {
            return Err(Error::Domain(
                "density matrix is not positive semidefinite".into(),
            ));
        }
        Ok(())
    }

    /// `Tr(ρ E)` for a Hermitian effect operator `E` (same dimension).
    pub fn born_probability(&self, effect: &[C64]) -> Result<f64> {
        let d = self.dim;
        if effect.len() != d * d {
            return Err(Error::Domain("effect dimension mismatch".into()));
        }
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                tr += self.get(i, j) * effect[j * d + i];
            }
        }
        if tr.im.abs() > TAU_FEAS {
            return Err(Error::Domain(format!(
                "Born probability has imaginary part {}",
                tr.im
            )));
        }
        Ok(tr.re)
    }
}

/// Pivoted Cholesky PSD test on a Hermitian matrix (destructive on a copy).
fn hermitian_is_psd(d: usize, data: &[C64]) -> bool {
    let tol = 1e-9 * (1.0 + data.iter().map(|z| z.norm()).fold(0.0, f64::max));
    let mut m = data.to_vec();
    let mut perm: Vec<usize> = (0..d).collect();
    let at = |m: &[C64], p: &[usize], i: usize, j: usize| m[p[i] * d + p[j]];
    for k in 0..d {
        // Pivot: bring the largest remaining diagonal entry to position k.
        let (pk, _) = (k..d)
            .map(|i| (i, at(&m, &perm, i, i).re))
            .fold((k, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        perm.swap(k, pk);
        let pivot = at(&m, &perm, k, k).re;
        if pivot < -tol {
            return false;
        }
        if pivot <= tol {
            // Remaining diagonal is ≤ pivot; PSD iff the trailing block is ~0.
            for i in k..d {
                for j in k..d {
                    if at(&m, &perm, i, j).norm() > tol {
                        return false;
                    }
                }
            }
            return true;
        }
        for i in (k + 1)..d {
            for j in (k + 1)..d {
                let update = at(&m, &perm, i, k) * at(&m, &perm, k, j) / pivot;
                m[perm[i] * d + perm[j]] -= update;
            }
        }
    }
    true
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The singlet `(|01⟩ − |10⟩)/√2`.
pub fn singlet() -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [c(0.0), c(s), c(-s), c(0.0)]
}

/// The four Bell states, indexed Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
pub fn bell_states() -> [[C64; 4]; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        [c(s), c(0.0), c(0.0), c(s)],   // Φ⁺
        [c(s), c(0.0), c(0.0), c(-s)],  // Φ⁻
        [c(0.0), c(s), c(s), c(0.0)],   // Ψ⁺
        [c(0.0), c(s), c(-s), c(0.0)],  // Ψ⁻
    ]
}

/// Bob's assignment of Bell outcome to game variant `(b1, b2)`.
pub fn bell_to_variant(outcome: usize) -> (Bit, Bit) {
    match outcome {
        0 => (0, 0), // Φ⁺
        1 => (0, 1), // Φ⁻
        2 => (1, 0), // Ψ⁺
        3 => (1, 1), // Ψ⁻
        _ => panic!("Bell outcome out of range"),
    }
}

/// The four-qubit initial state `|ψ⁻⟩_{AB} ⊗ |ψ⁻⟩_{B′C}` with qubit order
/// `A, B, B′, C` (index `((a·2+b)·2+b′)·2+c`).
pub fn two_singlets() -> [C64; 16] {
    let sab = singlet();
    let sbc = singlet();
    let mut out = [c(0.0); 16];
    for a in 0..2 {
        for b in 0..2 {
            for bp in 0..2 {
                for ch in 0..2 {
                    out[((a * 2 + b) * 2 + bp) * 2 + ch] = sab[a * 2 + b] * sbc[bp * 2 + ch];
                }
            }
        }
    }
    out
}

/// Outcome of a Bell measurement on qubits `B, B′` of a four-qubit state:
/// probability and normalized conditional state of `A, C` (or `None` when
/// the probability vanishes).
pub fn bell_measurement_outcomes(state: &[C64; 16]) -> Vec<(f64, Option<[C64; 4]>)> {
    let bells = bell_states();
    let mut outcomes = Vec::with_capacity(4);
    for bell in &bells {
        // ⟨bell|_{BB′} ⊗ 1_{AC} |state⟩.
        let mut cond = [c(0.0); 4];
        for a in 0..2 {
            for ch in 0..2 {
                let mut amp = c(0.0);
                for b in 0..2 {
                    for bp in 0..2 {
                        amp += bell[b * 2 + bp].conj() * state[((a * 2 + b) * 2 + bp) * 2 + ch];
                    }
                }
                cond[a * 2 + ch] = amp;
            }
        }
        let p: f64 = cond.iter().map(|z| z.norm_sqr()).sum();
        if p <= TAU_FEAS {
            outcomes.push((p, None));
        } else {
            let scale = c(1.0 / p.sqrt());
            for z in &mut cond {
                *z *= scale;
            }
            outcomes.push((p, Some(cond)));
        }
    }
    outcomes
}

/// Basis vector for outcome `o` of an equatorial (x–z plane) qubit
/// measurement at angle `θ`: outcome 0 projects onto
/// `cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
fn equatorial_vector(theta: f64, o: Bit) -> [C64; 2] {
    let (s, co) = (theta / 2.0).sin_cos();
    if o == 0 {
        [c(co), c(s)]
    } else {
        [c(-s), c(co)]
    }
}

/// Measurement angles for the strategy: Alice's for `r_A ∈ {0,1}` and
/// Charlie's for `r_C ∈ {0,1}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StrategyAngles {
    pub alice: [f64; 2],
    pub charlie: [f64; 2],
}

impl StrategyAngles {
    /// The CHSH-optimal angles `(0, π/2)` for Alice and `(π/4, 3π/4)` for
    /// Charlie.
    pub fn optimal() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        Self {
            alice: [0.0, FRAC_PI_2],
            charlie: [FRAC_PI_4, 3.0 * FRAC_PI_4],
        }
    }

    /// All four angles equal (the degenerate strategy).
    pub fn all_equal(theta: f64) -> Self {
        Self {
            alice: [theta, theta],
            charlie: [theta, theta],
        }
    }
}

/// Result of evaluating the quantum strategy.
#[derive(Debug, Clone, Serialize)]
pub struct QuantumGameResult {
    pub value: f64,
    /// Per Bell outcome: its probability, the assigned variant, and the
    /// conditional winning probability of that variant's CHSH game.
    pub per_outcome: Vec<(f64, (Bit, Bit), f64)>,
}

/// Evaluate the entanglement-swapping strategy with the given measurement
/// angles, exactly (no sampling): Bell-measure `B, B′` of two singlets, map
/// each outcome to a variant, then score Alice's and Charlie's equatorial
/// measurements on the conditional `A, C` state against that variant's
/// winning condition, averaging over uniform questions.
pub fn quantum_game_strategy(angles: StrategyAngles) -> Result<QuantumGameResult> {
    let state = two_singlets();
    let outcomes = bell_measurement_outcomes(&state);
    let mut value = 0.0;
    let mut per_outcome = Vec::with_capacity(4);
    for (k, (p, cond)) in outcomes.into_iter().enumerate() {
        let b = bell_to_variant(k);
        let Some(phi) = cond else {
            per_outcome.push((p, b, 0.0));
            continue;
        };
        let rho = DensityMatrix::from_pure(&phi)?;
        let mut p_win = 0.0;
        for r_a in 0..2u8 {
            for r_c in 0..2u8 {
                for a in 0..2u8 {
                    for ch in 0..2u8 {
                        if win_bit(b.0, b.1, a, ch, r_a, r_c) == 0 {
                            continue;
                        }
                        let va = equatorial_vector(angles.alice[r_a as usize], a);
                        let vc = equatorial_vector(angles.charlie[r_c as usize], ch);
                        // Projector |v_a ⊗ v_c⟩⟨v_a ⊗ v_c| on A, C.
                        let mut proj = vec![c(0.0); 16];
                        for i in 0..2 {
                            for j in 0..2 {
                                for ip in 0..2 {
                                    for jp in 0..2 {
                                        proj[(i * 2 + j) * 4 + (ip * 2 + jp)] = va[i]
                                            * vc[j]
                                            * (va[ip] * vc[jp]).conj();
                                    }
                                }
                            }
                        }
                        p_win += 0.25 * rho.born_probability(&proj)?;
                    }
                }
            }
        }
        value += p * p_win;
        per_outcome.push((p, b, p_win));
    }
    Ok(QuantumGameResult { value, per_outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_value;

    #[test]
    fn singlet_density_matrix_valid() {
        let rho = DensityMatrix::from_pure(&singlet()).unwrap();
        rho.validate().unwrap();
        let rho4 = DensityMatrix::from_pure(&two_singlets()).unwrap();
        rho4.validate().unwrap();
    }

    #[test]
    fn psd_check_catches_negative_directions() {
        // Hermitian, trace 1, but with a negative eigenvalue.
        let mut data = vec![c(0.0); 4];
        data[0] = c(1.5);
        data[3] = c(-0.5);
        let rho = DensityMatrix { dim: 2, data };
        assert!(rho.validate().is_err());
        // Rank-deficient PSD passes.
        let pure = DensityMatrix::from_pure(&[c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        pure.validate().unwrap();
    }

    #[test]
    fn bell_measurement_on_two_singlets_is_uniform() {
        let outcomes = bell_measurement_outcomes(&two_singlets());
        assert_eq!(outcomes.len(), 4);
        for (p, cond) in &outcomes {
            assert!((p - 0.25).abs() < 1e-12, "outcome probability {p}");
            assert!(cond.is_some());
        }
        // The Ψ⁻ outcome leaves A, C in a singlet (up to global phase).
        let phi = outcomes[3].1.unwrap();
        let s = singlet();
        let overlap: C64 = phi
            .iter()
            .zip(s.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn optimal_strategy_hits_quantum_value() {
        let r = quantum_game_strategy(StrategyAngles::optimal()).unwrap();
        assert!(
            (r.value - quantum_value()).abs() < 1e-9,
            "value {} vs {}",
            r.value,
            quantum_value()
        );
        // Every Bell outcome contributes its variant at the Tsirelson value.
        for (p, _, p_win) in &r.per_outcome {
            assert!((p - 0.25).abs() < 1e-12);
            assert!((p_win - quantum_value()).abs() < 1e-9);
        }
    }

    #[test]
    fn equal_angles_win_half_at_zero() {
        let r = quantum_game_strategy(StrategyAngles::all_equal(0.0)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12, "value {}", r.value);
        // At other equal angles the value is ½ + (1 − cos 2θ)/8 ≥ ½.
        let theta = 0.7;
        let r = quantum_game_strategy(StrategyAngles::all_equal(theta)).unwrap();
        let expected = 0.5 + (1.0 - (2.0 * theta).cos()) / 8.0;
        assert!((r.value - expected).abs() < 1e-9, "value {}", r.value);
    }

    #[test]
    fn variant_assignment_matters() {
        // Swapping the roles of two variants drops the value strictly below
        // the quantum value: pin by misassigning via swapped Charlie angles.
        let r = quantum_game_strategy(StrategyAngles {
            alice: [0.0, std::f64::consts::FRAC_PI_2],
            charlie: [3.0 * std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4],
        })
        .unwrap();
        assert!(r.value < quantum_value() - 1e-3, "value {}", r.value);
    }

    #[test]
    fn born_rule_on_singlet_anticorrelation() {
        // Measuring both singlet qubits at the same angle never agrees.
        let rho = DensityMatrix::from_pure(&singlet()).unwrap();
        for &theta in &[0.0, 0.3, 1.1] {
            let v0 = equatorial_vector(theta, 0);
            let mut proj = vec![c(0.0); 16];
            for i in 0..2 {
                for j in 0..2 {
                    for ip in 0..2 {
                        for jp in 0..2 {
                            proj[(i * 2 + j) * 4 + (ip * 2 + jp)] =
                                v0[i] * v0[j] * (v0[ip] * v0[jp]).conj();
                        }
                    }
                }
            }
            let p = rho.born_probability(&proj).unwrap();
            assert!(p.abs() < 1e-12, "agreement probability {p} at θ={theta}");
        }
    }
}
