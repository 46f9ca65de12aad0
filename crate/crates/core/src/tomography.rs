//! Linear-inversion state reconstruction from POVM statistics.
//!
//! With `L_jk = Tr(F_j F_k)` and the expansion `ρ = Σ_k x_k F_k`, the
//! probabilities satisfy `p = L x`. The estimate is `x = L⁺ p`, or
//! equivalently `ρ = Σ_k p_k D_k` with the dual frame `D_k = Σ_j L⁺_jk F_j`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::processor::validate_povm;
use crate::qcore::{clip_to_state, eigh, eigvalsh, operator_rank, DensityOperator, Operator, TOL};

/// Relative eigenvalue cutoff of the Gram pseudo-inverse.
pub const PINV_RTOL: f64 = 1e-9;

/// Tolerance on the probability sum and on the consistency residual.
pub const PROBABILITY_TOL: f64 = 1e-6;

/// `L_jk = Tr(F_j F_k)` for Hermitian operators.
pub fn gram_matrix(frame: &[Operator]) -> Result<Vec<Vec<f64>>> {
    let first = frame.first().ok_or(Error::Empty("operator list"))?;
    let n = first.require_square()?;
    for f in frame {
        if f.rows() != n || f.cols() != n {
            return Err(Error::DimensionMismatch {
                context: "frame element",
                expected: n,
                found: f.rows().max(f.cols()),
            });
        }
        let dev = f.hermiticity_deviation();
        if dev > TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
    }
    Ok(frame
        .iter()
        .map(|a| frame.iter().map(|b| a.hs_inner(b).re).collect())
        .collect())
}

/// True iff the elements span the full operator space.
pub fn is_informationally_complete(povm: &[Operator]) -> bool {
    match povm.first() {
        Some(f) => operator_rank(povm).is_ok_and(|r| r == f.rows() * f.rows()),
        None => false,
    }
}

/// Pseudo-inverse of a real symmetric matrix with the relative cutoff
/// [`PINV_RTOL`].
fn symmetric_pinv(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let op = Operator::from_fn(n, n, |i, j| C64::new(m[i][j], 0.0));
    let (w, v) = eigh(&op).expect("square");
    let top = w.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut out = vec![vec![0.0; n]; n];
    for (k, &lambda) in w.iter().enumerate() {
        if lambda.abs() <= PINV_RTOL * top || top == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out[i][j] += (v[(i, k)] * v[(j, k)].conj()).re / lambda;
            }
        }
    }
    out
}

fn mat_vec(m: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Coefficients `y` of `Σ_k y_k T_k` reproducing the given values of
/// `Tr(ρ T_j)` for a Hermitian frame `T` (least squares when the frame is
/// overcomplete).
pub fn dual_coefficients(frame: &[Operator], traces: &[f64]) -> Result<Vec<f64>> {
    if frame.len() != traces.len() {
        return Err(Error::DimensionMismatch {
            context: "frame values",
            expected: frame.len(),
            found: traces.len(),
        });
    }
    let gram = gram_matrix(frame)?;
    Ok(mat_vec(&symmetric_pinv(&gram), traces))
}

/// Diagnostics of a reconstruction from counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    /// Max deviation between the input frequencies and those predicted by
    /// the linear estimate.
    pub residual: f64,
    /// Eigenvalues of the linear estimate (before any projection), ascending.
    pub eigenvalues: Vec<f64>,
    pub projected: bool,
}

/// Precomputed reconstruction data for one POVM.
#[derive(Clone, Debug, PartialEq)]
pub struct Tomographer {
    povm: Vec<Operator>,
    gram: Vec<Vec<f64>>,
    pinv: Vec<Vec<f64>>,
    rank: usize,
    dual_frame: Option<Vec<Operator>>,
}

impl Tomographer {
    pub fn new(povm: Vec<Operator>) -> Result<Self> {
        Self::with_tolerance(povm, TOL)
    }

    /// As [`Tomographer::new`], validating the POVM within `tol`.
    pub fn with_tolerance(povm: Vec<Operator>, tol: f64) -> Result<Self> {
        let d = validate_povm(&povm, tol)?;
        let gram = gram_matrix(&povm)?;
        let pinv = symmetric_pinv(&gram);
        let rank = operator_rank(&povm)?;
        let dual_frame = (rank == d * d).then(|| {
            (0..povm.len())
                .map(|k| {
                    let mut dk = Operator::zeros(d, d);
                    for (j, f) in povm.iter().enumerate() {
                        dk += &f.scale_real(pinv[j][k]);
                    }
                    dk
                })
                .collect()
        });
        Ok(Tomographer {
            povm,
            gram,
            pinv,
            rank,
            dual_frame,
        })
    }

    pub fn dim(&self) -> usize {
        self.povm[0].rows()
    }

    pub fn povm(&self) -> &[Operator] {
        &self.povm
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_informationally_complete(&self) -> bool {
        self.dual_frame.is_some()
    }

    pub fn dual_frame(&self) -> Option<&[Operator]> {
        self.dual_frame.as_deref()
    }

    fn require_complete(&self) -> Result<()> {
        if self.dual_frame.is_none() {
            return Err(Error::UnderDetermined {
                rank: self.rank,
                required: self.dim() * self.dim(),
            });
        }
        Ok(())
    }

    fn check_length(&self, len: usize) -> Result<()> {
        if len != self.povm.len() {
            return Err(Error::DimensionMismatch {
                context: "probability vector",
                expected: self.povm.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// `x = L⁺ p`, the expansion of the estimate over the POVM elements.
    pub fn coefficients(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_length(p.len())?;
        Ok(mat_vec(&self.pinv, p))
    }

    /// `Tr(X F_k)` for every element.
    pub fn predict(&self, x: &Operator) -> Vec<f64> {
        self.povm.iter().map(|f| f.hs_inner(x).re).collect()
    }

    /// `Σ_k x_k F_k`, Hermitized.
    pub fn assemble(&self, x: &[f64]) -> Operator {
        let d = self.dim();
        let mut rho = Operator::zeros(d, d);
        for (f, &c) in self.povm.iter().zip(x) {
            rho += &f.scale_real(c);
        }
        rho.hermitian_part()
    }

    fn linear_estimate(&self, p: &[f64]) -> Result<(Operator, f64)> {
        let rho = self.assemble(&self.coefficients(p)?);
        let residual = self
            .predict(&rho)
            .iter()
            .zip(p)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        Ok((rho, residual))
    }

    /// The unique state with `Tr(ρ F_k) = p_k`.
    pub fn reconstruct(&self, p: &[f64]) -> Result<DensityOperator> {
        self.check_length(p.len())?;
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(&bad) = p.iter().find(|&&x| x < -PROBABILITY_TOL) {
            return Err(Error::InvalidProbabilities {
                reason: "negative entry",
                value: bad,
            });
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::InvalidProbabilities {
                reason: "entries do not sum to 1",
                value: total,
            });
        }
        self.require_complete()?;
        let (rho, residual) = self.linear_estimate(p)?;
        if residual > PROBABILITY_TOL {
            return Err(Error::Inconsistent { residual });
        }
        let min = eigvalsh(&rho)?[0];
        DensityOperator::with_tolerance(rho, PROBABILITY_TOL)
            .map_err(|_| Error::NotPhysical { min_eigenvalue: min })
    }

    /// Linear estimate from (possibly inconsistent) frequencies. The
    /// estimate is returned as is unless `project` is set, in which case
    /// negative eigenvalues are clipped and the result renormalized.
    pub fn estimate(&self, freq: &[f64], project: bool) -> Result<(Operator, Diagnostics)> {
        self.check_length(freq.len())?;
        if freq.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        self.require_complete()?;
        let (rho, residual) = self.linear_estimate(freq)?;
        let eigenvalues = eigvalsh(&rho)?;
        let estimate = if project {
            clip_to_state(&rho)?.0.into_matrix()
        } else {
            rho
        };
        Ok((
            estimate,
            Diagnostics {
                residual,
                eigenvalues,
                projected: project,
            },
        ))
    }

    /// [`Tomographer::estimate`] on the relative frequencies of `counts`.
    pub fn reconstruct_from_counts(&self, counts: &[u64], project: bool) -> Result<(Operator, Diagnostics)> {
        self.check_length(counts.len())?;
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::InvalidProbabilities {
                reason: "no counts",
                value: 0.0,
            });
        }
        let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        self.estimate(&freq, project)
    }
}

pub fn reconstruct(p: &[f64], povm: &[Operator]) -> Result<DensityOperator> {
    Tomographer::new(povm.to_vec())?.reconstruct(p)
}

pub fn reconstruct_from_counts(
    counts: &[u64],
    povm: &[Operator],
    project: bool,
) -> Result<(Operator, Diagnostics)> {
    Tomographer::new(povm.to_vec())?.reconstruct_from_counts(counts, project)
}
