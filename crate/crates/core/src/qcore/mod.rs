//! Dense complex linear algebra shared by every other module.
//!
//! Subsystem ordering is data-first everywhere: a basis label `|ab>` means
//! `a` belongs to the first tensor factor.

mod decomp;
mod operator;
pub mod random;
mod state;

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64 as C64;

pub use decomp::{
    complete_basis, complete_unitary, eigh, eigvalsh, numerical_rank, singular_values, RANK_RTOL,
};
pub use operator::{
    is_projector, is_unitary, partial_trace, tensor, unitarity_residual, Operator, Subsystem,
};
pub use state::{
    clip_to_state, orthonormality_residual, trace_distance, BlochExpansion, DensityOperator,
    PureState,
};

use crate::error::{Error, Result};

/// Default absolute tolerance for structural checks (max-norm).
pub const TOL: f64 = 1e-10;

/// `I, σx, σy, σz` for `k = 0..3`.
pub fn pauli(k: usize) -> Result<Operator> {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let data = match k {
        0 => [one, z, z, one],
        1 => [z, one, one, z],
        2 => [z, -i, i, z],
        3 => [one, z, z, -one],
        _ => return Err(Error::IndexOutOfRange { index: k, bound: 4 }),
    };
    Operator::new(2, 2, data.to_vec())
}

/// Product table of the Pauli group: `σ_a σ_b = phase · σ_c`.
pub fn pauli_product(a: usize, b: usize) -> (C64, usize) {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match (a, b) {
        (0, k) | (k, 0) => (one, k),
        (a, b) if a == b => (one, 0),
        (a, b) => {
            let c = 6 - a - b;
            // cyclic (1,2,3) gives +i
            if (a % 3) + 1 == b {
                (i, c)
            } else {
                (-i, c)
            }
        }
    }
}

/// `(|00> + |11>)/√2`
pub fn bell_anchor() -> PureState {
    let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
    let z = C64::new(0.0, 0.0);
    PureState::new(alloc::vec![s, z, z, s]).expect("normalized")
}

/// `(σ_k ⊗ I)|Ξ₀>`
pub fn bell_state(k: usize) -> Result<PureState> {
    let op = tensor(&pauli(k)?, &Operator::identity(2));
    Ok(PureState::new(op.apply(bell_anchor().amplitudes())).expect("unitary image"))
}

/// Coefficients of a Hermitian 2x2 operator on `{I, σx, σy, σz}`.
pub fn bloch_expand(h: &Operator) -> Result<BlochExpansion> {
    if h.rows() != 2 || h.cols() != 2 {
        return Err(Error::DimensionMismatch {
            context: "Bloch expansion",
            expected: 2,
            found: h.rows().max(h.cols()),
        });
    }
    let dev = h.hermiticity_deviation();
    if dev > TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let coeff = |k: usize| 0.5 * pauli(k).expect("valid").hs_inner(h).re;
    Ok(BlochExpansion {
        scalar: coeff(0),
        vector: [coeff(1), coeff(2), coeff(3)],
    })
}

/// Numerical rank of a set of equally sized operators under vectorization.
pub fn operator_rank(ops: &[Operator]) -> Result<usize> {
    let first = ops.first().ok_or(Error::Empty("operator list"))?;
    let (r, c) = (first.rows(), first.cols());
    if let Some(bad) = ops.iter().find(|o| (o.rows(), o.cols()) != (r, c)) {
        return Err(Error::DimensionMismatch {
            context: "operator rank",
            expected: r * c,
            found: bad.rows() * bad.cols(),
        });
    }
    let columns: Vec<Vec<C64>> = ops.iter().map(|o| o.data().to_vec()).collect();
    Ok(numerical_rank(&Operator::from_columns(r * c, &columns)))
}
