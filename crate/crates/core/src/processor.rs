//! The general measurement-assisted programmable processor.
//!
//! A [`Processor`] couples a data register of dimension `d` to a program
//! register of dimension `d_p` through a fixed unitary `G`, after which the
//! program register is measured in a fixed orthonormal basis `{|k>}`. For a
//! program state `Σ_n π_n |Ξ_n><Ξ_n|` the data register experiences the Kraus
//! operators `A_kn = <k|G|Ξ_n>`; grouping program outcomes into blocks `J_a`
//! gives the POVM `F_a = Σ_{n, k∈J_a} π_n A_kn^dag A_kn`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::qcore::{
    eigh, eigvalsh, orthonormality_residual, partial_trace, random, tensor, unitarity_residual,
    DensityOperator, Operator, PureState, Subsystem, TOL,
};

/// Fixed unitary on `data ⊗ program` plus the program measurement basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Processor {
    data_dim: usize,
    program_dim: usize,
    gate: Operator,
    program_basis: Vec<PureState>,
}

impl Processor {
    /// Validates unitarity of `gate` and orthonormality of `program_basis`
    /// (both within `1e-10`). `None` selects the computational basis.
    pub fn new(
        data_dim: usize,
        program_dim: usize,
        gate: Operator,
        program_basis: Option<Vec<PureState>>,
    ) -> Result<Self> {
        let n = gate.require_square()?;
        if data_dim == 0 || program_dim == 0 || n != data_dim * program_dim {
            return Err(Error::DimensionMismatch {
                context: "processor gate",
                expected: data_dim * program_dim,
                found: n,
            });
        }
        let residual = unitarity_residual(&gate);
        if residual > TOL {
            return Err(Error::NotUnitary { residual });
        }
        let program_basis = match program_basis {
            Some(basis) => {
                if basis.len() != program_dim {
                    return Err(Error::DimensionMismatch {
                        context: "program basis size",
                        expected: program_dim,
                        found: basis.len(),
                    });
                }
                if let Some(bad) = basis.iter().find(|b| b.dim() != program_dim) {
                    return Err(Error::DimensionMismatch {
                        context: "program basis vector",
                        expected: program_dim,
                        found: bad.dim(),
                    });
                }
                let residual = orthonormality_residual(&basis);
                if residual > TOL {
                    return Err(Error::NotOrthonormal { residual });
                }
                basis
            }
            None => (0..program_dim)
                .map(|k| PureState::basis(program_dim, k).expect("k < program_dim"))
                .collect(),
        };
        Ok(Processor {
            data_dim,
            program_dim,
            gate,
            program_basis,
        })
    }

    pub fn data_dim(&self) -> usize {
        self.data_dim
    }

    pub fn program_dim(&self) -> usize {
        self.program_dim
    }

    pub fn gate(&self) -> &Operator {
        &self.gate
    }

    pub fn program_basis(&self) -> &[PureState] {
        &self.program_basis
    }

    /// `<k|G|Ξ>` as an operator on the data register.
    pub fn kraus_for(&self, k: usize, program: &PureState) -> Result<Operator> {
        if k >= self.program_dim {
            return Err(Error::IndexOutOfRange {
                index: k,
                bound: self.program_dim,
            });
        }
        if program.dim() != self.program_dim {
            return Err(Error::DimensionMismatch {
                context: "program state",
                expected: self.program_dim,
                found: program.dim(),
            });
        }
        let (d, dp) = (self.data_dim, self.program_dim);
        let bra = self.program_basis[k].amplitudes();
        let ket = program.amplitudes();
        Ok(Operator::from_fn(d, d, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for (p, b) in bra.iter().enumerate() {
                if *b == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = (i * dp + p) * d * dp;
                let inner: C64 = ket
                    .iter()
                    .enumerate()
                    .map(|(q, x)| self.gate.data()[row + j * dp + q] * x)
                    .sum();
                acc += b.conj() * inner;
            }
            acc
        }))
    }

    /// Projector `Q_a = Σ_{k∈J_a} |k><k|` on the program register.
    pub fn outcome_projector(&self, block: &[usize]) -> Operator {
        let mut q = Operator::zeros(self.program_dim, self.program_dim);
        for &k in block {
            q += &self.program_basis[k].projector();
        }
        q
    }
}

/// Pure or mixed program-register state `Σ_n π_n |Ξ_n><Ξ_n|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramState {
    components: Vec<(f64, PureState)>,
}

impl ProgramState {
    pub fn pure(state: PureState) -> Self {
        ProgramState {
            components: vec![(1.0, state)],
        }
    }

    /// Weights must lie in `[0, 1]` and sum to 1 within `1e-10`; all states
    /// share one dimension.
    pub fn mixture(components: Vec<(f64, PureState)>) -> Result<Self> {
        let dim = components
            .first()
            .ok_or(Error::Empty("program components"))?
            .1
            .dim();
        if let Some((_, s)) = components.iter().find(|(_, s)| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                context: "program component",
                expected: dim,
                found: s.dim(),
            });
        }
        if components.iter().any(|(w, _)| !(-TOL..=1.0 + TOL).contains(w)) {
            return Err(Error::InvalidProgram("weight outside [0, 1]"));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > TOL {
            return Err(Error::InvalidProgram("weights do not sum to 1"));
        }
        Ok(ProgramState { components })
    }

    /// Spectral decomposition of a program density operator.
    pub fn from_density(xi: &DensityOperator) -> Result<Self> {
        let (w, v) = eigh(xi.matrix())?;
        let components = w
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 1e-15)
            .map(|(j, &x)| Ok((x, PureState::normalized(v.column(j))?)))
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = components.iter().map(|(x, _)| x).sum();
        Self::mixture(components.into_iter().map(|(x, s)| (x / total, s)).collect())
    }

    pub fn components(&self) -> &[(f64, PureState)] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].1.dim()
    }

    pub fn density(&self) -> Operator {
        let n = self.dim();
        let mut m = Operator::zeros(n, n);
        for (w, s) in &self.components {
            m += &s.projector().scale_real(*w);
        }
        m
    }
}

/// Disjoint blocks `J_a` covering the program outcomes `0..d_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomePartition {
    blocks: Vec<Vec<usize>>,
}

impl OutcomePartition {
    pub fn new(blocks: Vec<Vec<usize>>, outcomes: usize) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::MalformedPartition("no blocks"));
        }
        let mut seen = vec![false; outcomes];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::MalformedPartition("empty block"));
            }
            for &k in block {
                if k >= outcomes {
                    return Err(Error::MalformedPartition("index out of range"));
                }
                if seen[k] {
                    return Err(Error::MalformedPartition("blocks overlap"));
                }
                seen[k] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::MalformedPartition("blocks do not cover all outcomes"));
        }
        Ok(OutcomePartition { blocks })
    }

    /// One block per program outcome.
    pub fn finest(outcomes: usize) -> Self {
        OutcomePartition {
            blocks: (0..outcomes).map(|k| vec![k]).collect(),
        }
    }

    /// A single block holding every outcome.
    pub fn single(outcomes: usize) -> Self {
        OutcomePartition {
            blocks: vec![(0..outcomes).collect()],
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn outcome_count(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausTerm {
    /// Mixture weight `π_n`.
    pub weight: f64,
    /// Program outcome `k`.
    pub outcome: usize,
    /// Mixture component `n`.
    pub component: usize,
    pub op: Operator,
}

/// Per-outcome Kraus families and the POVM they induce.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedInstrument {
    pub branches: Vec<Vec<KrausTerm>>,
    pub povm: Vec<Operator>,
}

impl InducedInstrument {
    /// Unnormalized branch `Σ π_n A ρ A^dag` for outcome `a`.
    pub fn branch(&self, a: usize, rho: &Operator) -> Operator {
        let d = rho.rows();
        let mut out = Operator::zeros(d, d);
        for term in &self.branches[a] {
            out += &term.op.sandwich(rho).scale_real(term.weight);
        }
        out
    }
}

fn check_program(p: &Processor, xi: &ProgramState) -> Result<()> {
    if xi.dim() != p.program_dim {
        return Err(Error::DimensionMismatch {
            context: "program state",
            expected: p.program_dim,
            found: xi.dim(),
        });
    }
    Ok(())
}

/// All `(π_n, k, A_kn)` for the given program state.
pub fn kraus_operators(p: &Processor, xi: &ProgramState) -> Result<Vec<KrausTerm>> {
    check_program(p, xi)?;
    let mut out = Vec::with_capacity(xi.components.len() * p.program_dim);
    for (n, (w, state)) in xi.components.iter().enumerate() {
        for k in 0..p.program_dim {
            out.push(KrausTerm {
                weight: *w,
                outcome: k,
                component: n,
                op: p.kraus_for(k, state)?,
            });
        }
    }
    Ok(out)
}

pub fn induced_instrument(
    p: &Processor,
    xi: &ProgramState,
    part: &OutcomePartition,
) -> Result<InducedInstrument> {
    if part.outcome_count() != p.program_dim {
        return Err(Error::MalformedPartition("partition does not match program dimension"));
    }
    let terms = kraus_operators(p, xi)?;
    let d = p.data_dim;
    let mut branches = Vec::with_capacity(part.len());
    let mut povm = Vec::with_capacity(part.len());
    for block in part.blocks() {
        let members: Vec<KrausTerm> = terms
            .iter()
            .filter(|t| block.contains(&t.outcome))
            .cloned()
            .collect();
        let mut f = Operator::zeros(d, d);
        for t in &members {
            f += &(&t.op.adjoint() * &t.op).scale_real(t.weight);
        }
        povm.push(f);
        branches.push(members);
    }
    Ok(InducedInstrument { branches, povm })
}

/// `F_a = Σ_{n, k∈J_a} π_n A_kn^dag A_kn`
pub fn induced_povm(
    p: &Processor,
    xi: &ProgramState,
    part: &OutcomePartition,
) -> Result<Vec<Operator>> {
    induced_instrument(p, xi, part).map(|i| i.povm)
}

/// Checks that `povm` is a list of PSD operators on one space summing to the
/// identity, all within `tol`. Eigenvalue dust down to `-tol` is accepted.
pub fn validate_povm(povm: &[Operator], tol: f64) -> Result<usize> {
    let first = povm.first().ok_or(Error::Empty("POVM"))?;
    let d = first.require_square()?;
    let mut sum = Operator::zeros(d, d);
    for (i, f) in povm.iter().enumerate() {
        if f.rows() != d || f.cols() != d {
            return Err(Error::DimensionMismatch {
                context: "POVM element",
                expected: d,
                found: f.rows(),
            });
        }
        let dev = f.hermiticity_deviation();
        if dev > tol {
            return Err(Error::InvalidPovm {
                reason: "element not Hermitian",
                element: i,
                value: dev,
            });
        }
        let min = eigvalsh(f)?[0];
        if min < -tol {
            return Err(Error::InvalidPovm {
                reason: "element not positive semidefinite",
                element: i,
                value: min,
            });
        }
        sum += f;
    }
    let dev = sum.dist(&Operator::identity(d));
    if dev > tol {
        return Err(Error::InvalidPovm {
            reason: "elements do not sum to identity",
            element: povm.len(),
            value: dev,
        });
    }
    Ok(d)
}

/// `p_a = Tr(ρ F_a)` after validating the POVM.
pub fn outcome_probabilities(rho: &DensityOperator, povm: &[Operator]) -> Result<Vec<f64>> {
    let d = validate_povm(povm, TOL)?;
    if rho.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "state vs POVM",
            expected: d,
            found: rho.dim(),
        });
    }
    // ρ is Hermitian, so Tr(ρF) = <ρ, F>_HS
    Ok(povm.iter().map(|f| rho.matrix().hs_inner(f).re).collect())
}

/// `ρ'_a = (1/p_a) Σ_{n, k∈J_a} π_n A_kn ρ A_kn^dag`
pub fn post_measurement_state(
    p: &Processor,
    xi: &ProgramState,
    rho: &DensityOperator,
    a: usize,
    part: &OutcomePartition,
) -> Result<DensityOperator> {
    if rho.dim() != p.data_dim {
        return Err(Error::DimensionMismatch {
            context: "data state",
            expected: p.data_dim,
            found: rho.dim(),
        });
    }
    if a >= part.len() {
        return Err(Error::IndexOutOfRange {
            index: a,
            bound: part.len(),
        });
    }
    let instrument = induced_instrument(p, xi, part)?;
    let branch = instrument.branch(a, rho.matrix());
    let prob = branch.trace().re;
    if prob <= 1e-12 {
        return Err(Error::OutcomeImpossible {
            outcome: a,
            probability: prob,
        });
    }
    DensityOperator::new(branch.scale_real(1.0 / prob).hermitian_part())
}

/// `Tr[(I ⊗ Q_a) G (ρ ⊗ ξ) G^dag]`, computed on the full dilation.
pub fn probability_via_dilation(
    p: &Processor,
    xi: &ProgramState,
    rho: &DensityOperator,
    part: &OutcomePartition,
    a: usize,
) -> Result<f64> {
    check_program(p, xi)?;
    let block = part.blocks().get(a).ok_or(Error::IndexOutOfRange {
        index: a,
        bound: part.len(),
    })?;
    let joint = tensor(rho.matrix(), &xi.density());
    let evolved = p.gate.sandwich(&joint);
    let q = tensor(&Operator::identity(p.data_dim), &p.outcome_projector(block));
    Ok((&q * &evolved).trace().re)
}

/// Data-register output of the whole instrument, `Tr_p[G (ρ ⊗ ξ) G^dag]`.
pub fn channel_output(p: &Processor, xi: &ProgramState, rho: &DensityOperator) -> Result<Operator> {
    check_program(p, xi)?;
    let joint = tensor(rho.matrix(), &xi.density());
    partial_trace(&p.gate.sandwich(&joint), (p.data_dim, p.program_dim), Subsystem::First)
}

/// Multinomial outcome counts for `n` independent measurements.
pub fn sample_outcomes(rho: &DensityOperator, povm: &[Operator], n: u64, seed: u64) -> Result<Vec<u64>> {
    sample_outcomes_with(&mut random::seeded(seed), rho, povm, n)
}

/// As [`sample_outcomes`] with a caller-provided generator.
///
/// Drawn as a chain of conditional binomials. Outcomes with zero
/// probability are never emitted.
pub fn sample_outcomes_with<R: Rng + ?Sized>(
    rng: &mut R,
    rho: &DensityOperator,
    povm: &[Operator],
    n: u64,
) -> Result<Vec<u64>> {
    let probs: Vec<f64> = outcome_probabilities(rho, povm)?
        .into_iter()
        .map(|x| x.clamp(0.0, 1.0))
        .collect();
    let mut counts = vec![0u64; probs.len()];
    let last = match probs.iter().rposition(|&x| x > 0.0) {
        Some(i) => i,
        None => return Ok(counts),
    };
    let mut remaining = n;
    let mut mass: f64 = probs.iter().sum();
    for (k, &pk) in probs.iter().enumerate().take(last) {
        if remaining == 0 {
            break;
        }
        if pk <= 0.0 {
            continue;
        }
        let q = (pk / mass).clamp(0.0, 1.0);
        let draw = Binomial::new(remaining, q)
            .expect("probability in [0, 1]")
            .sample(rng);
        counts[k] = draw;
        remaining -= draw;
        mass -= pk;
    }
    counts[last] += remaining;
    Ok(counts)
}

/// `Some(c_k)` when every element is `c_k I` with `c_k ≥ 0` (within `1e-10`).
pub fn is_trivial_povm(povm: &[Operator]) -> Option<Vec<f64>> {
    let mut coeffs = Vec::with_capacity(povm.len());
    for f in povm {
        if !f.is_square() {
            return None;
        }
        let d = f.rows();
        let c = f.trace().re / d as f64;
        if c < -TOL || !f.approx_eq(&Operator::identity(d).scale_real(c), TOL) {
            return None;
        }
        coeffs.push(c.max(0.0));
    }
    if coeffs.is_empty() {
        None
    } else {
        Some(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{bell_state, pauli};

    fn swap_processor() -> Processor {
        // SWAP on qubit ⊗ qubit
        let g = Operator::from_real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        )
        .unwrap();
        Processor::new(2, 2, g, None).unwrap()
    }

    #[test]
    fn rejects_non_unitary_gate_and_bad_basis() {
        let g = Operator::identity(4).scale_real(2.0);
        assert!(matches!(Processor::new(2, 2, g, None), Err(Error::NotUnitary { .. })));
        let basis = vec![PureState::basis(2, 0).unwrap(), PureState::basis(2, 0).unwrap()];
        assert!(matches!(
            Processor::new(2, 2, Operator::identity(4), Some(basis)),
            Err(Error::NotOrthonormal { .. })
        ));
        assert!(matches!(
            Processor::new(2, 3, Operator::identity(4), None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn swap_measures_program_into_data() {
        // SWAP then measuring the program measures the data's old state.
        let p = swap_processor();
        let xi = ProgramState::pure(PureState::basis(2, 0).unwrap());
        let povm = induced_povm(&p, &xi, &OutcomePartition::finest(2)).unwrap();
        assert!(povm[0].approx_eq(&PureState::basis(2, 0).unwrap().projector(), 1e-15));
        assert!(povm[1].approx_eq(&PureState::basis(2, 1).unwrap().projector(), 1e-15));
    }

    #[test]
    fn partition_validation() {
        assert!(OutcomePartition::new(vec![vec![0, 1], vec![2, 3]], 4).is_ok());
        assert!(matches!(
            OutcomePartition::new(vec![vec![0, 1], vec![1, 2, 3]], 4),
            Err(Error::MalformedPartition("blocks overlap"))
        ));
        assert!(matches!(
            OutcomePartition::new(vec![vec![0, 1], vec![2]], 4),
            Err(Error::MalformedPartition("blocks do not cover all outcomes"))
        ));
        assert!(matches!(
            OutcomePartition::new(vec![vec![0, 4]], 4),
            Err(Error::MalformedPartition("index out of range"))
        ));
    }

    #[test]
    fn single_block_gives_identity() {
        let p = swap_processor();
        let xi = ProgramState::pure(PureState::normalized(vec![C64::new(1.0, 0.0), C64::new(0.3, 0.4)]).unwrap());
        let povm = induced_povm(&p, &xi, &OutcomePartition::single(2)).unwrap();
        assert_eq!(povm.len(), 1);
        assert!(povm[0].approx_eq(&Operator::identity(2), 1e-14));
    }

    #[test]
    fn impossible_outcome_is_an_error() {
        let p = swap_processor();
        let xi = ProgramState::pure(PureState::basis(2, 0).unwrap());
        let rho = DensityOperator::from_pure(&PureState::basis(2, 0).unwrap());
        let err = post_measurement_state(&p, &xi, &rho, 1, &OutcomePartition::finest(2)).unwrap_err();
        assert!(matches!(err, Error::OutcomeImpossible { outcome: 1, .. }));
    }

    #[test]
    fn probabilities_reject_invalid_povm() {
        let rho = DensityOperator::maximally_mixed(2);
        let half = Operator::identity(2).scale_real(0.5);
        assert!(matches!(
            outcome_probabilities(&rho, core::slice::from_ref(&half)),
            Err(Error::InvalidPovm { reason: "elements do not sum to identity", .. })
        ));
        let z = pauli(3).unwrap().scale_real(0.6);
        let neg = vec![&z + &half, &half - &z];
        assert!(matches!(
            outcome_probabilities(&rho, &neg),
            Err(Error::InvalidPovm { reason: "element not positive semidefinite", .. })
        ));
    }

    #[test]
    fn trivial_povm_detection() {
        let quarter = Operator::identity(2).scale_real(0.25);
        assert_eq!(is_trivial_povm(&vec![quarter; 4]), Some(vec![0.25; 4]));
        let p0 = PureState::basis(2, 0).unwrap().projector();
        let p1 = PureState::basis(2, 1).unwrap().projector();
        assert_eq!(is_trivial_povm(&[p0, p1]), None);
    }

    #[test]
    fn sampling_edge_cases() {
        let rho = DensityOperator::from_pure(&PureState::basis(2, 0).unwrap());
        let p0 = PureState::basis(2, 0).unwrap().projector();
        let p1 = PureState::basis(2, 1).unwrap().projector();
        let povm = [p1, p0];
        assert_eq!(sample_outcomes(&rho, &povm, 0, 1).unwrap(), vec![0, 0]);
        assert_eq!(sample_outcomes(&rho, &povm, 1000, 1).unwrap(), vec![0, 1000]);
        let mixed = DensityOperator::maximally_mixed(2);
        assert_eq!(
            sample_outcomes(&mixed, &povm, 5000, 42).unwrap(),
            sample_outcomes(&mixed, &povm, 5000, 42).unwrap()
        );
    }

    #[test]
    fn mixed_program_from_density() {
        let xi = DensityOperator::new(
            (&bell_state(0).unwrap().projector() + &bell_state(3).unwrap().projector()).scale_real(0.5),
        )
        .unwrap();
        let prog = ProgramState::from_density(&xi).unwrap();
        assert_eq!(prog.components().len(), 2);
        assert!(prog.density().approx_eq(xi.matrix(), 1e-14));
    }
}
