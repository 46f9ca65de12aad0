//! Jacobi-type decompositions for the small dense matrices used here.
//!
//! Dimensions never exceed a few dozen, so cyclic Jacobi sweeps are both
//! accurate (singular values to high relative precision) and fast enough.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64 as C64;

use super::operator::Operator;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Relative singular-value cutoff used for numerical rank.
pub const RANK_RTOL: f64 = 1e-9;

/// Rotation `J` with `J_pp = J_qq = c`, `J_pq = s e^{iφ}`, `J_qp = -s e^{-iφ}`
/// that zeroes the `(p, q)` entry of the Hermitian 2x2 block `[[a, g], [g*, b]]`.
fn jacobi_rotation(a: f64, b: f64, g: C64) -> (f64, C64, C64) {
    let mag = g.norm();
    let phase = g / mag;
    let theta = (b - a) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    (c, phase * s, -phase.conj() * s)
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the second value. Only the Hermitian part
/// of the input is used.
pub fn eigh(m: &Operator) -> Result<(Vec<f64>, Operator)> {
    let n = m.require_square()?;
    let mut a = m.hermitian_part();
    let mut v = Operator::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Ok((alloc::vec![0.0; n], v));
    }
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                if g.norm() <= 1e-300 {
                    continue;
                }
                let (c, jpq, jqp) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, g);
                let c = C64::new(c, 0.0);
                // A <- A J
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c + akq * jqp;
                    a[(k, q)] = akp * jpq + akq * c;
                }
                // A <- J^dag A
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk + jqp.conj() * aqk;
                    a[(q, k)] = jpq.conj() * apk + c * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * c + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Operator::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(m: &Operator) -> Result<Vec<f64>> {
    eigh(m).map(|(w, _)| w)
}

/// Singular values (descending) by one-sided Jacobi on the columns.
pub fn singular_values(m: &Operator) -> Vec<f64> {
    let cols = m.cols();
    let mut columns: Vec<Vec<C64>> = (0..cols).map(|j| m.column(j)).collect();
    let dot = |x: &[C64], y: &[C64]| -> C64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha = dot(&columns[i], &columns[i]).re;
                let beta = dot(&columns[j], &columns[j]).re;
                let gamma = dot(&columns[i], &columns[j]);
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let (c, jpq, jqp) = jacobi_rotation(alpha, beta, gamma);
                let c = C64::new(c, 0.0);
                let (lo, hi) = columns.split_at_mut(j);
                for (a, b) in lo[i].iter_mut().zip(hi[0].iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = x * c + y * jqp;
                    *b = x * jpq + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = columns
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `RANK_RTOL` times the largest.
pub fn numerical_rank(m: &Operator) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_RTOL * top).count()
}

fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Removes the components of `v` along the orthonormal `basis` (twice, for
/// stability) and returns the remaining norm.
fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let proj = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
    }
    norm(v)
}

/// Extends an orthonormal set to an orthonormal basis of `C^dim` by
/// orthogonalizing computational basis vectors in index order.
pub fn complete_basis(mut basis: Vec<Vec<C64>>, dim: usize) -> Vec<Vec<C64>> {
    let mut k = 0;
    while basis.len() < dim && k < dim {
        let mut e = alloc::vec![C64::new(0.0, 0.0); dim];
        e[k] = C64::new(1.0, 0.0);
        let r = orthogonalize(&mut e, &basis);
        if r > 1e-6 {
            for x in e.iter_mut() {
                *x /= r;
            }
            basis.push(e);
        }
        k += 1;
    }
    basis
}

/// Unitary `G` on `C^dim` with `G x_i = y_i` for the given pairs.
///
/// The inputs must be linearly independent and the pairs must preserve inner
/// products (`<x_i|x_j> = <y_i|y_j>`); the caller checks the latter. Inputs
/// are orthonormalized by modified Gram-Schmidt with the same linear
/// combinations applied to the outputs, then both sides are completed in a
/// fixed pivot order, so the result is deterministic.
pub fn complete_unitary(inputs: &[Vec<C64>], outputs: &[Vec<C64>], dim: usize) -> Result<Operator> {
    if inputs.len() != outputs.len() {
        return Err(Error::DimensionMismatch {
            context: "isometry completion pairs",
            expected: inputs.len(),
            found: outputs.len(),
        });
    }
    let mut q_in: Vec<Vec<C64>> = Vec::with_capacity(inputs.len());
    let mut q_out: Vec<Vec<C64>> = Vec::with_capacity(inputs.len());
    for (x, y) in inputs.iter().zip(outputs) {
        if x.len() != dim || y.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "isometry completion vector",
                expected: dim,
                found: if x.len() != dim { x.len() } else { y.len() },
            });
        }
        let mut x = x.clone();
        let mut y = y.clone();
        for _ in 0..2 {
            for (qx, qy) in q_in.iter().zip(&q_out) {
                let proj = inner(qx, &x);
                for (a, b) in x.iter_mut().zip(qx) {
                    *a -= proj * b;
                }
                for (a, b) in y.iter_mut().zip(qy) {
                    *a -= proj * b;
                }
            }
        }
        let r = norm(&x);
        if r <= 1e-9 {
            return Err(Error::DependentPrograms);
        }
        x.iter_mut().for_each(|a| *a /= r);
        y.iter_mut().for_each(|a| *a /= r);
        q_in.push(x);
        q_out.push(y);
    }
    let full_in = complete_basis(q_in, dim);
    let full_out = complete_basis(q_out, dim);
    let mut g = Operator::zeros(dim, dim);
    for (x, y) in full_in.iter().zip(&full_out) {
        g += &Operator::outer(y, x);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::pauli;

    #[test]
    fn eigh_of_pauli_y() {
        let (w, v) = eigh(&pauli(2).unwrap()).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14 && (w[1] - 1.0).abs() < 1e-14);
        let recon = &(&v * &Operator::diag(&[C64::new(w[0], 0.0), C64::new(w[1], 0.0)])) * &v.adjoint();
        assert!(recon.approx_eq(&pauli(2).unwrap(), 1e-14));
    }

    #[test]
    fn eigh_reconstructs_complex_hermitian() {
        let m = Operator::from_fn(5, 5, |i, j| {
            let (i, j) = (i as f64, j as f64);
            if i == j {
                C64::new(i * 0.3 - 0.5, 0.0)
            } else if i < j {
                C64::new((i + 2.0 * j).sin(), (i * j + 1.0).cos())
            } else {
                C64::new((j + 2.0 * i).sin(), -(i * j + 1.0).cos())
            }
        });
        let (w, v) = eigh(&m).unwrap();
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        let d = Operator::diag(&w.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>());
        assert!((&(&v * &d) * &v.adjoint()).approx_eq(&m, 1e-12));
        assert!((&v.adjoint() * &v).approx_eq(&Operator::identity(5), 1e-12));
    }

    #[test]
    fn singular_values_of_rank_deficient() {
        // columns: x, 2x, y
        let m = Operator::from_fn(3, 3, |i, j| match j {
            0 => C64::new(1.0 + i as f64, 0.5),
            1 => C64::new(2.0 + 2.0 * i as f64, 1.0),
            _ => C64::new(0.0, (i as f64) - 1.0),
        });
        assert_eq!(numerical_rank(&m), 2);
        assert_eq!(numerical_rank(&Operator::zeros(2, 2)), 0);
    }

    #[test]
    fn completion_maps_pairs_and_is_unitary() {
        let s = 1.0 / 2f64.sqrt();
        let x = alloc::vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let y = alloc::vec![C64::new(0.0, 0.0), C64::new(s, 0.0), C64::new(0.0, s)];
        let g = complete_unitary(core::slice::from_ref(&x), core::slice::from_ref(&y), 3).unwrap();
        assert!(crate::qcore::is_unitary(&g, 1e-14));
        let gx = g.apply(&x);
        assert!(gx.iter().zip(&y).all(|(a, b)| (a - b).norm() < 1e-14));
        assert_eq!(
            complete_unitary(&[x.clone(), x.clone()], &[y.clone(), y], 3),
            Err(Error::DependentPrograms)
        );
    }
}
