//! Exact complex-amplitude simulation of small qubit registers.
//!
//! Basis index convention: qubit 0 is the most significant bit, so for two
//! qubits the amplitude order is |00⟩, |01⟩, |10⟩, |11⟩ with the left digit
//! belonging to qubit 0.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register the simulator will allocate (2^20 amplitudes, 16 MiB).
pub const MAX_QUBITS: usize = 20;

/// Tolerance used when validating normalisation of externally supplied states.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2×2 complex matrix in row-major order.
pub type Matrix2 = [[Complex64; 2]; 2];

/// Pure state of an n-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// The all-zeros state |0…0⟩.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps an explicit amplitude vector. The length must be a power of two
    /// and the vector must be normalised within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "squared norm {norm} differs from 1"
            )));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Σ|a_i|².
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `gate` in place.
    ///
    /// Single-qubit gates update each amplitude pair that differs only in the
    /// target bit (RZ is diagonal and only rescales); CNOT swaps pairs inside
    /// the control-set subspace. No dense 2^n × 2^n matrix is formed.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match *gate {
            Gate::Cnot { control, target } => {
                let cstride = self.mask(control);
                let tstride = self.mask(target);
                if tstride < cstride {
                    for block in self.amplitudes.chunks_exact_mut(2 * cstride) {
                        let control_set = &mut block[cstride..];
                        for pair in control_set.chunks_exact_mut(2 * tstride) {
                            let (lo, hi) = pair.split_at_mut(tstride);
                            lo.swap_with_slice(hi);
                        }
                    }
                } else {
                    for i in 0..self.amplitudes.len() {
                        if i & cstride != 0 && i & tstride == 0 {
                            self.amplitudes.swap(i, i | tstride);
                        }
                    }
                }
            }
            Gate::Rz { .. } => {
                let u = gate.matrix2().expect("single-qubit gate");
                let stride = self.mask(gate.target());
                for block in self.amplitudes.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    lo.iter_mut().for_each(|a| *a *= u[0][0]);
                    hi.iter_mut().for_each(|b| *b *= u[1][1]);
                }
            }
            _ => {
                let u = gate.matrix2().expect("single-qubit gate");
                let stride = self.mask(gate.target());
                for block in self.amplitudes.chunks_exact_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a, *b);
                        *a = u[0][0] * x + u[0][1] * y;
                        *b = u[1][0] * x + u[1][1] * y;
                    }
                }
            }
        }
        Ok(())
    }

    /// Value-semantic variant of [`apply`](Self::apply): returns U|ψ⟩.
    pub fn applied(&self, gate: &Gate) -> Result<Self> {
        let mut next = self.clone();
        next.apply(gate)?;
        Ok(next)
    }

    /// Applies a gate sequence in order.
    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    /// ⟨Z⟩ on `qubit`: P(bit = 0) − P(bit = 1).
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_index(qubit)?;
        let mask = self.mask(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if i & mask == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }

    /// Measurement probabilities |a_i|² over the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_index(&self, qubit: usize) -> Result<()> {
        if qubit < self.num_qubits {
            Ok(())
        } else {
            Err(Error::QubitIndex {
                index: qubit,
                num_qubits: self.num_qubits,
            })
        }
    }
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&num_qubits) {
        Ok(())
    } else {
        Err(Error::QubitCount(num_qubits))
    }
}

/// Convenience wrapper for [`QuantumState::zero`].
pub fn zero_state(num_qubits: usize) -> Result<QuantumState> {
    QuantumState::zero(num_qubits)
}

/// Gate set of the simulator. Rotation angles are in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Rx { target: usize, theta: f64 },
    Ry { target: usize, theta: f64 },
    Rz { target: usize, theta: f64 },
    H { target: usize },
    X { target: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn target(&self) -> usize {
        match *self {
            Gate::Rx { target, .. }
            | Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::H { target }
            | Gate::X { target }
            | Gate::Cnot { target, .. } => target,
        }
    }

    /// Checks index validity against a register of `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let check = |index: usize| {
            if index < num_qubits {
                Ok(())
            } else {
                Err(Error::QubitIndex { index, num_qubits })
            }
        };
        check(self.target())?;
        if let Gate::Cnot { control, target } = *self {
            check(control)?;
            if control == target {
                return Err(Error::ControlIsTarget(control));
            }
        }
        Ok(())
    }

    /// The 2×2 unitary of a single-qubit gate; `None` for CNOT.
    pub fn matrix2(&self) -> Option<Matrix2> {
        let m = match *self {
            Gate::Rx { theta, .. } => {
                let (s, c) = (theta / 2.0).sin_cos();
                let mis = Complex64::new(0.0, -s);
                [[c.into(), mis], [mis, c.into()]]
            }
            Gate::Ry { theta, .. } => {
                let (s, c) = (theta / 2.0).sin_cos();
                [[c.into(), (-s).into()], [s.into(), c.into()]]
            }
            Gate::Rz { theta, .. } => {
                let phase = Complex64::from_polar(1.0, theta / 2.0);
                [[phase.conj(), ZERO], [ZERO, phase]]
            }
            Gate::H { .. } => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::X { .. } => [[ZERO, ONE], [ONE, ZERO]],
            Gate::Cnot { .. } => return None,
        };
        Some(m)
    }

    /// Full 2^n × 2^n matrix of the gate embedded in an n-qubit register,
    /// built element-wise from the local matrix. Reference path for tests;
    /// simulation never uses it.
    pub fn dense_matrix(&self, num_qubits: usize) -> Result<Vec<Vec<Complex64>>> {
        check_qubit_count(num_qubits)?;
        self.validate(num_qubits)?;
        let dim = 1usize << num_qubits;
        let bit = |index: usize, qubit: usize| (index >> (num_qubits - 1 - qubit)) & 1;
        let mut dense = vec![vec![ZERO; dim]; dim];
        match *self {
            Gate::Cnot { control, target } => {
                for (col, _) in (0..dim).enumerate() {
                    let row = if bit(col, control) == 1 {
                        col ^ (1 << (num_qubits - 1 - target))
                    } else {
                        col
                    };
                    dense[row][col] = ONE;
                }
            }
            _ => {
                let u = self.matrix2().expect("single-qubit gate");
                let t = self.target();
                let rest = !(1usize << (num_qubits - 1 - t));
                for (row, dense_row) in dense.iter_mut().enumerate() {
                    for (col, entry) in dense_row.iter_mut().enumerate() {
                        if row & rest == col & rest {
                            *entry = u[bit(row, t)][bit(col, t)];
                        }
                    }
                }
            }
        }
        Ok(dense)
    }
}

/// The four maximally entangled two-qubit states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    /// Gate sequence preparing this state from |00⟩: X corrections select the
    /// input basis state, then H on qubit 0 and CNOT(0 → 1).
    pub fn circuit(self) -> Vec<Gate> {
        let mut gates = Vec::with_capacity(4);
        match self {
            BellState::PhiPlus => {}
            BellState::PhiMinus => gates.push(Gate::X { target: 0 }),
            BellState::PsiPlus => gates.push(Gate::X { target: 1 }),
            BellState::PsiMinus => {
                gates.push(Gate::X { target: 0 });
                gates.push(Gate::X { target: 1 });
            }
        }
        gates.push(Gate::H { target: 0 });
        gates.push(Gate::Cnot {
            control: 0,
            target: 1,
        });
        gates
    }
}

/// Prepares a Bell state by running its circuit on |00⟩.
pub fn bell_state(which: BellState) -> QuantumState {
    let mut state = QuantumState::zero(2).expect("two qubits is in range");
    state
        .apply_all(&which.circuit())
        .expect("bell circuit indices are valid");
    state
}
