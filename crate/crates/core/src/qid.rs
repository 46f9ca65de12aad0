//! The quantum information distributor (QID).
//!
//! One data qubit, two program qubits. For a program
//! `|Ξ> = Σ_k α_k |Ξ_k>` with `|Ξ_k> = (σ_k ⊗ I)|Ξ₀>` the processor acts as
//!
//! ```text
//! G (|ψ> ⊗ |Ξ>) = Σ_k σ_k A(Ξ) σ_k |ψ> ⊗ |k>,   A(Ξ) = ½ Σ_j α_j σ_j
//! ```
//!
//! so the induced POVM is `F_k = σ_k A^dag A σ_k = ¼(I + r_k·σ)` where `r_0`
//! is the anchor vector `α₀ᾱ + ᾱ₀α + i ᾱ×α` and the other `r_k` are its
//! reflections. Program outcomes are indexed `0..3` in the order of
//! `σ_0..σ_3`.
//!
//! The elements are always computed as `σ_k F_0 σ_k`, which gives four
//! distinct tetrahedron vertices for the SIC program. Index 2 is the
//! `σ_y`-conjugate, `¼(I + (−σx + σy − σz)/√3)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::processor::{OutcomePartition, Processor};
use crate::qcore::{
    bell_state, bloch_expand, operator_rank, pauli, tensor, Operator, PureState, TOL,
};

/// Amplitudes of a program over the Bell-like basis `|Ξ_k>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QidProgram {
    alpha: [C64; 4],
}

impl QidProgram {
    pub fn new(alpha: [C64; 4]) -> Result<Self> {
        if alpha.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = alpha.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(QidProgram { alpha })
    }

    pub fn from_real(alpha: [f64; 4]) -> Result<Self> {
        Self::new(alpha.map(|x| C64::new(x, 0.0)))
    }

    /// Reads the amplitudes `<Ξ_k|Ξ>` off a two-qubit program state.
    pub fn from_state(state: &PureState) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::DimensionMismatch {
                context: "QID program state",
                expected: 4,
                found: state.dim(),
            });
        }
        let mut alpha = [C64::new(0.0, 0.0); 4];
        for (k, a) in alpha.iter_mut().enumerate() {
            *a = bell_state(k)?.inner(state);
        }
        Self::new(alpha)
    }

    pub fn alpha(&self) -> &[C64; 4] {
        &self.alpha
    }

    /// `Σ_k α_k |Ξ_k>` on the two program qubits.
    pub fn state(&self) -> PureState {
        let mut amp = vec![C64::new(0.0, 0.0); 4];
        for (k, a) in self.alpha.iter().enumerate() {
            let xi = bell_state(k).expect("k < 4");
            for (dst, x) in amp.iter_mut().zip(xi.amplitudes()) {
                *dst += a * x;
            }
        }
        PureState::new(amp).expect("orthonormal expansion")
    }

    /// `A(Ξ) = ½ Σ_j α_j σ_j`
    pub fn operator(&self) -> Operator {
        let mut a = Operator::zeros(2, 2);
        for (j, &coef) in self.alpha.iter().enumerate() {
            a += &pauli(j).expect("j < 4").scale(coef * 0.5);
        }
        a
    }

    /// `α₀ᾱ + ᾱ₀α + i ᾱ × α`, real for every program.
    pub fn anchor_vector(&self) -> [f64; 3] {
        let a0 = self.alpha[0];
        let a = [self.alpha[1], self.alpha[2], self.alpha[3]];
        let ac = a.map(|z| z.conj());
        let cross = [
            ac[1] * a[2] - ac[2] * a[1],
            ac[2] * a[0] - ac[0] * a[2],
            ac[0] * a[1] - ac[1] * a[0],
        ];
        let i = C64::new(0.0, 1.0);
        [0, 1, 2].map(|m| (a0 * ac[m] + a0.conj() * a[m] + i * cross[m]).re)
    }
}

/// The QID processor with program outcomes in the computational basis of
/// the program register.
pub fn qid_unitary() -> Processor {
    let mut g = Operator::zeros(8, 8);
    let bells: Vec<PureState> = (0..4).map(|j| bell_state(j).expect("j < 4")).collect();
    for k in 0..4 {
        let sk = pauli(k).expect("k < 4");
        let ket_k = PureState::basis(4, k).expect("k < 4");
        for (j, xi) in bells.iter().enumerate() {
            let conj = &(&sk * &pauli(j).expect("j < 4")) * &sk;
            let program_map = Operator::outer(ket_k.amplitudes(), xi.amplitudes());
            g += &tensor(&conj, &program_map).scale_real(0.5);
        }
    }
    Processor::new(2, 4, g, None).expect("QID gate is unitary")
}

/// POVM realized by a QID program.
#[derive(Clone, Debug, PartialEq)]
pub struct QidPovmReport {
    pub program_operator: Operator,
    pub elements: Vec<Operator>,
    pub r_anchor: [f64; 3],
    pub informationally_complete: bool,
}

impl QidPovmReport {
    /// Bloch vectors of the states `2F_k` (the Bloch-sphere picture of the
    /// POVM).
    pub fn bloch_points(&self) -> [[f64; 3]; 4] {
        let mut out = [[0.0; 3]; 4];
        for (k, f) in self.elements.iter().enumerate() {
            let e = bloch_expand(f).expect("POVM elements are Hermitian");
            out[k] = e.vector.map(|x| 4.0 * x);
        }
        out
    }
}

pub fn qid_povm(prog: &QidProgram) -> QidPovmReport {
    let a = prog.operator();
    let f0 = &a.adjoint() * &a;
    let elements: Vec<Operator> = (0..4)
        .map(|k| {
            let s = pauli(k).expect("k < 4");
            &(&s * &f0) * &s
        })
        .collect();
    let r_anchor = prog.anchor_vector();
    let informationally_complete = r_anchor.iter().all(|x| x.abs() > TOL)
        && operator_rank(&elements).expect("nonempty") == 4;
    QidPovmReport {
        program_operator: a,
        elements,
        r_anchor,
        informationally_complete,
    }
}

/// `|Ξ₀>/√2 + (|Ξ₁> + |Ξ₂> + |Ξ₃>)/√6`, which realizes the tetrahedral
/// SIC-POVM.
pub fn sic_program() -> QidProgram {
    let a = 1.0 / 2f64.sqrt();
    let b = 1.0 / 6f64.sqrt();
    QidProgram::from_real([a, b, b, b]).expect("normalized")
}

/// Program applying `exp(i μ·σ)` (conjugated by `σ_k` on outcome `k`).
pub fn unitary_program(mu: [f64; 3]) -> QidProgram {
    let norm = mu.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut alpha = [C64::new(norm.cos(), 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    if norm > 0.0 {
        let s = norm.sin() / norm;
        for m in 0..3 {
            alpha[m + 1] = C64::new(0.0, s * mu[m]);
        }
    }
    QidProgram::new(alpha).expect("normalized")
}

/// Program `(|Ξ₀> + |Ξ_axis>)/√2` and the pairing of outcomes that turns the
/// four-outcome measurement into the von Neumann measurement of `σ_axis`:
/// block 0 (`{0, axis}`) is the `+1` eigenvalue, block 1 the `−1`.
pub fn pauli_measurement_program(axis: usize) -> Result<(QidProgram, OutcomePartition)> {
    if !(1..=3).contains(&axis) {
        return Err(Error::InvalidAxis(axis));
    }
    let s = 1.0 / 2f64.sqrt();
    let mut alpha = [0.0; 4];
    alpha[0] = s;
    alpha[axis] = s;
    let minus: Vec<usize> = (1..4).filter(|&k| k != axis).collect();
    let part = OutcomePartition::new(vec![vec![0, axis], minus], 4)?;
    Ok((QidProgram::from_real(alpha)?, part))
}

/// Local basis a program qubit is prepared or measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalBasis {
    /// `{|0>, |1>}`
    Computational,
    /// `{|+>, |->}`
    Hadamard,
}

impl LocalBasis {
    const ALL: [LocalBasis; 2] = [LocalBasis::Computational, LocalBasis::Hadamard];

    fn matrix(self) -> Operator {
        match self {
            LocalBasis::Computational => Operator::identity(2),
            LocalBasis::Hadamard => {
                let s = 1.0 / 2f64.sqrt();
                Operator::from_real(2, &[s, s, s, -s]).expect("finite")
            }
        }
    }

    fn symbol(self, bit: usize) -> char {
        match (self, bit) {
            (LocalBasis::Computational, 0) => '0',
            (LocalBasis::Computational, _) => '1',
            (LocalBasis::Hadamard, 0) => '+',
            (LocalBasis::Hadamard, _) => '-',
        }
    }
}

/// Controlled-NOT between qubits of the `data ⊗ program0 ⊗ program1` register
/// (qubit 0 is the data qubit).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cnot {
    pub control: usize,
    pub target: usize,
}

impl Cnot {
    fn matrix(self) -> Operator {
        Operator::from_fn(8, 8, |row, col| {
            let mut bits = [(col >> 2) & 1, (col >> 1) & 1, col & 1];
            if bits[self.control] == 1 {
                bits[self.target] ^= 1;
            }
            let image = (bits[0] << 2) | (bits[1] << 1) | bits[2];
            C64::new(if image == row { 1.0 } else { 0.0 }, 0.0)
        })
    }
}

/// A four-CNOT circuit reproducing the QID unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct QidCircuit {
    /// Applied left to right.
    pub gates: [Cnot; 4],
    /// Basis change applied to each program qubit before the CNOTs.
    pub program_preparation: [LocalBasis; 2],
    /// Basis each program qubit is read out in.
    pub measurement: [LocalBasis; 2],
    /// Product-basis label (program qubit 0 then 1) read out for each QID
    /// outcome index.
    pub labels: [String; 4],
    /// Product-basis index read out for each QID outcome index.
    pub relabeling: [usize; 4],
    /// Max-norm distance between the circuit and the relabeled QID unitary.
    pub distance: f64,
    pub unitary: Operator,
}

const CNOT_CANDIDATES: [Cnot; 4] = [
    Cnot { control: 0, target: 1 },
    Cnot { control: 0, target: 2 },
    Cnot { control: 1, target: 0 },
    Cnot { control: 2, target: 0 },
];

/// Searches all length-4 sequences over the four data/program CNOTs, with
/// computational or Hadamard preparation and readout on each program qubit,
/// for a circuit equal to the QID unitary up to a per-outcome phase and a
/// relabeling of the readout basis. The enumeration order is fixed, so the
/// result is deterministic.
pub fn qid_circuit_search() -> Option<QidCircuit> {
    let g = qid_unitary().gate().clone();
    let g_dag = g.adjoint();
    let cnots: Vec<Operator> = CNOT_CANDIDATES.iter().map(|c| c.matrix()).collect();
    let pairs: Vec<[LocalBasis; 2]> = LocalBasis::ALL
        .iter()
        .flat_map(|&a| LocalBasis::ALL.iter().map(move |&b| [a, b]))
        .collect();
    for code in 0..256usize {
        let seq = [code >> 6, (code >> 4) & 3, (code >> 2) & 3, code & 3];
        for prep in &pairs {
            let mut c = tensor(
                &Operator::identity(2),
                &tensor(&prep[0].matrix(), &prep[1].matrix()),
            );
            for &g_idx in &seq {
                c = &cnots[g_idx] * &c;
            }
            // C G^dag must act trivially on the data qubit
            let t = &c * &g_dag;
            let b = Operator::from_fn(4, 4, |i, j| (t[(i, j)] + t[(i + 4, j + 4)]) * 0.5);
            if !t.approx_eq(&tensor(&Operator::identity(2), &b), 1e-9) {
                continue;
            }
            for meas in &pairs {
                let local = tensor(&meas[0].matrix(), &meas[1].matrix());
                let m = &local.adjoint() * &b;
                if let Some((perm, phases)) = monomial(&m) {
                    let relabel = Operator::from_fn(4, 4, |i, j| {
                        if perm[j] == i {
                            phases[j]
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    });
                    let target = &tensor(&Operator::identity(2), &(&local * &relabel)) * &g;
                    let labels = perm.map(|r| {
                        format!(
                            "{}{}",
                            meas[0].symbol((r >> 1) & 1),
                            meas[1].symbol(r & 1)
                        )
                    });
                    return Some(QidCircuit {
                        gates: seq.map(|i| CNOT_CANDIDATES[i]),
                        program_preparation: *prep,
                        measurement: *meas,
                        labels,
                        relabeling: perm,
                        distance: c.dist(&target),
                        unitary: c,
                    });
                }
            }
        }
    }
    None
}

/// If every column holds exactly one unit-modulus entry, returns the row of
/// that entry per column and its phase.
fn monomial(m: &Operator) -> Option<([usize; 4], [C64; 4])> {
    let mut perm = [0usize; 4];
    let mut phases = [C64::new(0.0, 0.0); 4];
    let mut used = [false; 4];
    for j in 0..4 {
        let mut hit = None;
        for i in 0..4 {
            let z = m[(i, j)];
            if (z.norm() - 1.0).abs() < 1e-9 {
                if hit.is_some() {
                    return None;
                }
                hit = Some(i);
            } else if z.norm() > 1e-9 {
                return None;
            }
        }
        let i = hit?;
        if used[i] {
            return None;
        }
        used[i] = true;
        perm[j] = i;
        phases[j] = m[(i, j)] / m[(i, j)].norm();
    }
    Some((perm, phases))
}
