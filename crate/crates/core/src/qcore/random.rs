//! Seeded random states and unitaries for property checks and searches.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{DensityOperator, Operator, PureState};

/// The generator used everywhere a seed is accepted.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unitary (Gram-Schmidt on the columns of a Ginibre matrix).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    'draw: loop {
        let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
            for _ in 0..2 {
                for b in &columns {
                    let proj: C64 = b.iter().zip(&v).map(|(a, x)| a.conj() * x).sum();
                    for (x, y) in v.iter_mut().zip(b) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue 'draw;
            }
            v.iter_mut().for_each(|z| *z /= norm);
            columns.push(v);
        }
        return Operator::from_columns(n, &columns);
    }
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PureState {
    let amp: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    PureState::normalized(amp).expect("gaussian vector is nonzero")
}

/// Full-rank density operator `A A^dag / Tr(A A^dag)` with `A` Ginibre.
pub fn density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityOperator {
    let a = Operator::from_fn(n, n, |_, _| gaussian(rng));
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(m.scale_real(1.0 / tr).hermitian_part()).expect("Ginibre state is valid")
}

/// Orthonormal basis drawn from a Haar unitary's columns.
pub fn basis<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<PureState> {
    let u = unitary(rng, n);
    (0..n)
        .map(|j| PureState::normalized(u.column(j)).expect("unit column"))
        .collect()
}
