use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64 as C64;

use super::decomp::{eigh, eigvalsh};
use super::operator::{tensor, Operator};
use super::TOL;
use crate::error::{Error, Result};

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amp: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized within `1e-10`.
    pub fn new(amp: Vec<C64>) -> Result<Self> {
        if amp.is_empty() {
            return Err(Error::Empty("state amplitudes"));
        }
        if amp.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { amp })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amp: Vec<C64>) -> Result<Self> {
        let norm = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        amp.iter_mut().for_each(|z| *z /= norm);
        Self::new(amp)
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, bound: dim });
        }
        let mut amp = vec![C64::new(0.0, 0.0); dim];
        amp[k] = C64::new(1.0, 0.0);
        Ok(PureState { amp })
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amp
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amp.iter().zip(&other.amp).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn projector(&self) -> Operator {
        Operator::outer(&self.amp, &self.amp)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let amp = self
            .amp
            .iter()
            .flat_map(|a| other.amp.iter().map(move |b| a * b))
            .collect();
        PureState { amp }
    }

    /// `m |self>`, renormalized.
    pub fn evolve(&self, m: &Operator) -> Result<PureState> {
        if m.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "state evolution",
                expected: m.cols(),
                found: self.dim(),
            });
        }
        Self::normalized(m.apply(&self.amp))
    }
}

/// Checks that a list of states is orthonormal within `tol`; returns the
/// largest deviation of the Gram matrix from the identity.
pub fn orthonormality_residual(states: &[PureState]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((a.inner(b) - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: Operator,
}

impl DensityOperator {
    /// Validates with the default tolerance `1e-10`.
    pub fn new(matrix: Operator) -> Result<Self> {
        Self::with_tolerance(matrix, TOL)
    }

    pub fn with_tolerance(matrix: Operator, tol: f64) -> Result<Self> {
        matrix.require_square()?;
        let dev = matrix.hermiticity_deviation();
        if dev > tol {
            return Err(Error::InvalidDensity {
                reason: "not Hermitian",
                value: dev,
            });
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidDensity {
                reason: "trace is not 1",
                value: tr.re,
            });
        }
        let min = eigvalsh(&matrix)?[0];
        if min < -tol {
            return Err(Error::InvalidDensity {
                reason: "negative eigenvalue",
                value: min,
            });
        }
        Ok(DensityOperator { matrix })
    }

    pub fn from_pure(state: &PureState) -> Self {
        DensityOperator {
            matrix: state.projector(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            matrix: Operator::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn into_matrix(self) -> Operator {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.matrix).expect("density operators are square")
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            matrix: tensor(&self.matrix, &other.matrix),
        }
    }

    pub fn trace_distance(&self, other: &DensityOperator) -> f64 {
        trace_distance(&self.matrix, &other.matrix)
    }
}

/// `½‖a − b‖₁` for Hermitian operators of equal size.
pub fn trace_distance(a: &Operator, b: &Operator) -> f64 {
    let diff = a - b;
    0.5 * eigvalsh(&diff)
        .expect("square operands")
        .iter()
        .map(|x| x.abs())
        .sum::<f64>()
}

/// Projects a Hermitian unit-trace estimate onto the density operators by
/// clipping negative eigenvalues and renormalizing. Returns the state and the
/// eigenvalues seen before clipping.
pub fn clip_to_state(estimate: &Operator) -> Result<(DensityOperator, Vec<f64>)> {
    let (w, v) = eigh(estimate)?;
    let clipped: Vec<f64> = w.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::NotPhysical {
            min_eigenvalue: w[0],
        });
    }
    let d = Operator::diag(&clipped.iter().map(|&x| C64::new(x / total, 0.0)).collect::<Vec<_>>());
    let rho = (&(&v * &d) * &v.adjoint()).hermitian_part();
    Ok((DensityOperator { matrix: rho }, w))
}

/// `scalar·I + vector·σ` for a Hermitian qubit operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochExpansion {
    pub scalar: f64,
    pub vector: [f64; 3],
}

impl BlochExpansion {
    pub fn reassemble(&self) -> Operator {
        let mut out = Operator::identity(2).scale_real(self.scalar);
        for (k, &c) in self.vector.iter().enumerate() {
            out += &super::pauli(k + 1).expect("valid index").scale_real(c);
        }
        out
    }
}
