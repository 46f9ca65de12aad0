//! Programmable von Neumann measurements.
//!
//! A processor realizes measurement `α` from program `|α>` when the Kraus
//! operator attached to program slot `s` is `Ẽ^α_s`, a (weighted) projector
//! of the measurement or zero. Such a family exists for a set of programs
//! iff `Σ_s Ẽ^α_s^dag Ẽ^β_s = <α|β> I` for all pairs, in which case the
//! partial map `|ψ>|α> ↦ Σ_s Ẽ^α_s|ψ>|s>` is an isometry and is completed
//! to a unitary.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::processor::{
    induced_instrument, post_measurement_state, OutcomePartition, Processor, ProgramState,
};
use crate::qcore::{
    complete_unitary, is_projector, orthonormality_residual, random, unitarity_residual,
    DensityOperator, Operator, PureState, TOL,
};

/// Rank-one projective measurement `E_k = |e_k><e_k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct VonNeumannMeasurement {
    basis: Vec<PureState>,
    projectors: Vec<Operator>,
}

impl VonNeumannMeasurement {
    /// From an orthonormal basis; outcome `k` is `|e_k>`.
    pub fn from_basis(basis: Vec<PureState>) -> Result<Self> {
        let d = basis.first().ok_or(Error::Empty("measurement basis"))?.dim();
        if let Some(bad) = basis.iter().find(|b| b.dim() != d) {
            return Err(Error::DimensionMismatch {
                context: "measurement basis vector",
                expected: d,
                found: bad.dim(),
            });
        }
        if basis.len() != d {
            return Err(Error::InvalidMeasurement {
                reason: "basis size differs from dimension",
                outcome: basis.len(),
            });
        }
        let residual = orthonormality_residual(&basis);
        if residual > TOL {
            return Err(Error::NotOrthonormal { residual });
        }
        let projectors = basis.iter().map(|b| b.projector()).collect();
        Ok(VonNeumannMeasurement { basis, projectors })
    }

    /// From rank-one projectors that are mutually orthogonal and sum to `I`.
    pub fn from_projectors(projectors: Vec<Operator>) -> Result<Self> {
        let d = projectors.first().ok_or(Error::Empty("measurement projectors"))?.rows();
        let mut basis = Vec::with_capacity(projectors.len());
        for (k, e) in projectors.iter().enumerate() {
            if e.rows() != d || e.cols() != d {
                return Err(Error::DimensionMismatch {
                    context: "measurement projector",
                    expected: d,
                    found: e.rows().max(e.cols()),
                });
            }
            if !is_projector(e, TOL) || (e.trace().re - 1.0).abs() > TOL {
                return Err(Error::InvalidMeasurement {
                    reason: "not a rank-one projector",
                    outcome: k,
                });
            }
            let j = (0..d)
                .max_by(|&a, &b| e[(a, a)].re.total_cmp(&e[(b, b)].re))
                .expect("nonempty");
            basis.push(PureState::normalized(e.column(j))?);
        }
        let m = Self::from_basis(basis)?;
        for (k, (given, rebuilt)) in projectors.iter().zip(&m.projectors).enumerate() {
            if !given.approx_eq(rebuilt, TOL) {
                return Err(Error::InvalidMeasurement {
                    reason: "not a rank-one projector",
                    outcome: k,
                });
            }
        }
        Ok(m)
    }

    pub fn computational(dim: usize) -> Self {
        Self::from_basis((0..dim).map(|k| PureState::basis(dim, k).expect("k < dim")).collect())
            .expect("orthonormal")
    }

    /// Eigenbasis of `σ_axis`, `+1` eigenvector first.
    pub fn pauli(axis: usize) -> Result<Self> {
        let s = 1.0 / 2f64.sqrt();
        let (a, b) = match axis {
            1 => (C64::new(s, 0.0), C64::new(s, 0.0)),
            2 => (C64::new(s, 0.0), C64::new(0.0, s)),
            3 => return Ok(Self::computational(2)),
            _ => return Err(Error::InvalidAxis(axis)),
        };
        Self::from_basis(vec![PureState::new(vec![a, b])?, PureState::new(vec![a, -b])?])
    }

    /// Haar-random basis.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        Self::from_basis(random::basis(rng, dim)).expect("orthonormal")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    /// Outcome `k` of the result is outcome `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.dim()];
        if perm.len() != self.dim() || perm.iter().any(|&p| p >= self.dim() || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidMeasurement {
                reason: "not a permutation of the outcomes",
                outcome: perm.len(),
            });
        }
        Self::from_basis(perm.iter().map(|&p| self.basis[p].clone()).collect())
    }

    /// `W E_k W^dag`
    pub fn conjugated(&self, w: &Operator) -> Result<Self> {
        let basis = self
            .basis
            .iter()
            .map(|b| b.evolve(w))
            .collect::<Result<Vec<_>>>()?;
        Self::from_basis(basis)
    }

    fn same_dim(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// `S` and the scalar `k` with `S = k I`, when it exists.
#[derive(Clone, Debug, PartialEq)]
pub struct CoprogramCondition {
    pub operator: Operator,
    pub scalar: Option<C64>,
}

impl CoprogramCondition {
    fn from_operator(operator: Operator) -> Self {
        let d = operator.rows();
        let k = operator.trace() / d as f64;
        let scalar = operator
            .approx_eq(&Operator::identity(d).scale(k), TOL)
            .then_some(k);
        CoprogramCondition { operator, scalar }
    }
}

/// `S = Σ_j E_j G_j = Σ_j <e_j|g_j> |e_j><g_j|`, outcomes paired by index.
///
/// Two measurements can share a processor with programs of overlap `k` only
/// if `S = k I`; without a scalar the programs must be orthogonal.
pub fn coprogram_condition(m1: &VonNeumannMeasurement, m2: &VonNeumannMeasurement) -> Result<CoprogramCondition> {
    m1.same_dim(m2, "coprogram condition")?;
    let d = m1.dim();
    let mut s = Operator::zeros(d, d);
    for (e, g) in m1.projectors.iter().zip(&m2.projectors) {
        s += &(e * g);
    }
    Ok(CoprogramCondition::from_operator(s))
}

/// `S = Σ_s A_s^dag B_s` for two slot-indexed Kraus families.
pub fn coprogram_condition_kraus(a: &[Operator], b: &[Operator]) -> Result<CoprogramCondition> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "Kraus family length",
            expected: a.len(),
            found: b.len(),
        });
    }
    let first = a.first().ok_or(Error::Empty("Kraus family"))?;
    let mut s = Operator::zeros(first.cols(), first.cols());
    for (x, y) in a.iter().zip(b) {
        s += &x.adjoint().try_mul(y)?;
    }
    Ok(CoprogramCondition::from_operator(s))
}

/// Assignment of measurement outcomes to program slots. Slot `s` carries
/// `amplitude · E_outcome` or the zero operator.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotMap {
    entries: Vec<Option<(usize, f64)>>,
}

impl SlotMap {
    /// Outcome `k` goes to slot `slots[k]` with unit amplitude.
    pub fn injective(slots: &[usize], program_dim: usize) -> Result<Self> {
        let mut entries = vec![None; program_dim];
        for (k, &s) in slots.iter().enumerate() {
            if s >= program_dim {
                return Err(Error::IndexOutOfRange {
                    index: s,
                    bound: program_dim,
                });
            }
            if entries[s].is_some() {
                return Err(Error::InvalidSlotMap("two outcomes share a slot"));
            }
            entries[s] = Some((k, 1.0));
        }
        Ok(SlotMap { entries })
    }

    /// General map; the squared amplitudes of each outcome's slots must sum
    /// to one.
    pub fn weighted(entries: Vec<Option<(usize, f64)>>, outcomes: usize) -> Result<Self> {
        let mut weight = vec![0.0; outcomes];
        for &(k, a) in entries.iter().flatten() {
            if !a.is_finite() {
                return Err(Error::NonFinite);
            }
            *weight.get_mut(k).ok_or(Error::IndexOutOfRange {
                index: k,
                bound: outcomes,
            })? += a * a;
        }
        if weight.iter().any(|w| (w - 1.0).abs() > TOL) {
            return Err(Error::InvalidSlotMap("outcome weights do not sum to one"));
        }
        Ok(SlotMap { entries })
    }

    pub fn program_dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Option<(usize, f64)>] {
        &self.entries
    }

    /// Highest outcome index referenced, plus one.
    pub fn outcome_bound(&self) -> usize {
        self.entries.iter().flatten().map(|&(k, _)| k + 1).max().unwrap_or(0)
    }

    fn outcome_of_slot(&self) -> Vec<Option<usize>> {
        self.entries.iter().map(|e| e.map(|(k, _)| k)).collect()
    }

    /// `Ẽ_s` for every slot.
    pub fn kraus(&self, m: &VonNeumannMeasurement) -> Result<Vec<Operator>> {
        if self.outcome_bound() > m.dim() {
            return Err(Error::IndexOutOfRange {
                index: self.outcome_bound() - 1,
                bound: m.dim(),
            });
        }
        Ok(self
            .entries
            .iter()
            .map(|e| match e {
                Some((k, a)) => m.projectors[*k].scale_real(*a),
                None => Operator::zeros(m.dim(), m.dim()),
            })
            .collect())
    }
}

/// Coprogram condition for two measurements embedded by slot maps.
pub fn coprogram_condition_slots(
    m1: &VonNeumannMeasurement,
    map1: &SlotMap,
    m2: &VonNeumannMeasurement,
    map2: &SlotMap,
) -> Result<CoprogramCondition> {
    m1.same_dim(m2, "coprogram condition")?;
    coprogram_condition_kraus(&map1.kraus(m1)?, &map2.kraus(m2)?)
}

/// Program states and slot maps for a list of measurements.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotAssignment {
    program_dim: usize,
    programs: Vec<PureState>,
    maps: Vec<SlotMap>,
}

impl SlotAssignment {
    pub fn new(program_dim: usize, programs: Vec<PureState>, maps: Vec<SlotMap>) -> Result<Self> {
        if programs.len() != maps.len() {
            return Err(Error::DimensionMismatch {
                context: "slot maps per program",
                expected: programs.len(),
                found: maps.len(),
            });
        }
        if programs.is_empty() {
            return Err(Error::Empty("slot assignment"));
        }
        for p in &programs {
            if p.dim() != program_dim {
                return Err(Error::DimensionMismatch {
                    context: "program state",
                    expected: program_dim,
                    found: p.dim(),
                });
            }
        }
        for m in &maps {
            if m.program_dim() != program_dim {
                return Err(Error::DimensionMismatch {
                    context: "slot map",
                    expected: program_dim,
                    found: m.program_dim(),
                });
            }
        }
        Ok(SlotAssignment {
            program_dim,
            programs,
            maps,
        })
    }

    pub fn program_dim(&self) -> usize {
        self.program_dim
    }

    pub fn programs(&self) -> &[PureState] {
        &self.programs
    }

    pub fn maps(&self) -> &[SlotMap] {
        &self.maps
    }
}

/// Disjoint slots: measurement `α` occupies `[αd, (α+1)d)` of an `N·d`
/// dimensional program space and is selected by `|α>`.
pub fn pad_with_zero_slots(measurements: &[VonNeumannMeasurement]) -> Result<SlotAssignment> {
    let d = measurements.first().ok_or(Error::Empty("measurement list"))?.dim();
    for m in measurements {
        if m.dim() != d {
            return Err(Error::DimensionMismatch {
                context: "measurement",
                expected: d,
                found: m.dim(),
            });
        }
    }
    let dp = measurements.len() * d;
    let programs = (0..measurements.len())
        .map(|a| PureState::basis(dp, a).expect("a < dp"))
        .collect();
    let maps = (0..measurements.len())
        .map(|a| SlotMap::injective(&(a * d..(a + 1) * d).collect::<Vec<_>>(), dp))
        .collect::<Result<Vec<_>>>()?;
    SlotAssignment::new(dp, programs, maps)
}

/// How well program `α` realizes its measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementVerification {
    /// Realized POVM on the outcome blocks (outcome order, without the
    /// zero-slot block).
    pub povm: Vec<Operator>,
    /// Max-norm distance between the realized POVM and the projectors.
    pub povm_error: f64,
    /// Norm of the POVM element of the unused slots.
    pub leakage: f64,
    /// Outcome `k` leaves every input in `E_k`.
    pub projection_postulate: bool,
}

/// Result of a synthesis.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisReport {
    pub processor: Processor,
    pub measurements: Vec<VonNeumannMeasurement>,
    pub programs: Vec<PureState>,
    /// For each program, the blocks of slots of each outcome and, when some
    /// slots are unused, a final block of those.
    pub partitions: Vec<OutcomePartition>,
    pub verifications: Vec<MeasurementVerification>,
    pub unitary: bool,
    pub completion_used: bool,
    pub unitarity_residual: f64,
}

impl SynthesisReport {
    pub fn gate(&self) -> &Operator {
        self.processor.gate()
    }
}

fn partition_for(slot_outcomes: &[Option<usize>], outcomes: usize) -> Result<OutcomePartition> {
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); outcomes];
    let mut unused = Vec::new();
    for (s, o) in slot_outcomes.iter().enumerate() {
        match o {
            Some(k) => blocks[*k].push(s),
            None => unused.push(s),
        }
    }
    if !unused.is_empty() {
        blocks.push(unused);
    }
    OutcomePartition::new(blocks, slot_outcomes.len())
}

/// Projection postulate on all inputs: `Σ_{s∈J_k} A_s X A_s^dag = E_k X E_k`
/// for every matrix unit `X`.
fn complies_with_projection_postulate(
    processor: &Processor,
    program: &PureState,
    partition: &OutcomePartition,
    m: &VonNeumannMeasurement,
) -> Result<bool> {
    let inst = induced_instrument(processor, &ProgramState::pure(program.clone()), partition)?;
    let d = m.dim();
    for (k, e) in m.projectors.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                let mut x = Operator::zeros(d, d);
                x[(i, j)] = C64::new(1.0, 0.0);
                if !inst.branch(k, &x).approx_eq(&e.sandwich(&x), 1e-8) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Builds a processor from explicit slot Kraus families.
///
/// `families[α][s]` is the data operator attached to slot `s` for program
/// `α` and `slot_outcomes[α][s]` the measurement outcome it reports (`None`
/// for slots that must stay empty). Programs must be linearly independent
/// and satisfy `Σ_s A^α_s^dag A^β_s = <α|β> I`.
pub fn synthesize_from_kraus(
    measurements: &[VonNeumannMeasurement],
    programs: &[PureState],
    families: &[Vec<Operator>],
    slot_outcomes: &[Vec<Option<usize>>],
) -> Result<SynthesisReport> {
    let n = measurements.len();
    if n == 0 {
        return Err(Error::Empty("measurement list"));
    }
    for (context, len) in [("programs", programs.len()), ("Kraus families", families.len()), ("slot outcomes", slot_outcomes.len())] {
        if len != n {
            return Err(Error::DimensionMismatch {
                context,
                expected: n,
                found: len,
            });
        }
    }
    let d = measurements[0].dim();
    let dp = programs[0].dim();
    for (a, m) in measurements.iter().enumerate() {
        measurements[0].same_dim(m, "measurement")?;
        if programs[a].dim() != dp || families[a].len() != dp || slot_outcomes[a].len() != dp {
            return Err(Error::DimensionMismatch {
                context: "program slots",
                expected: dp,
                found: families[a].len().min(slot_outcomes[a].len()).min(programs[a].dim()),
            });
        }
        if let Some(bad) = families[a].iter().find(|op| op.rows() != d || op.cols() != d) {
            return Err(Error::DimensionMismatch {
                context: "slot Kraus operator",
                expected: d,
                found: bad.rows().max(bad.cols()),
            });
        }
        if let Some(&k) = slot_outcomes[a].iter().flatten().find(|&&k| k >= d) {
            return Err(Error::IndexOutOfRange { index: k, bound: d });
        }
    }

    for a in 0..n {
        for b in a..n {
            let overlap = programs[a].inner(&programs[b]);
            let mut s = Operator::zeros(d, d);
            let mut worst = (0.0, 0usize);
            for (slot, (x, y)) in families[a].iter().zip(&families[b]).enumerate() {
                let term = &x.adjoint() * y;
                let size = term.max_abs();
                if size > worst.0 {
                    worst = (size, slot);
                }
                s += &term;
            }
            let residual = s.dist(&Operator::identity(d).scale(overlap));
            if residual > TOL {
                return Err(Error::IsometryViolated {
                    alpha: a,
                    beta: b,
                    slot: (a != b && worst.0 > TOL).then_some(worst.1),
                    residual,
                });
            }
        }
    }

    let mut inputs = Vec::with_capacity(n * d);
    let mut outputs = Vec::with_capacity(n * d);
    for a in 0..n {
        for i in 0..d {
            let psi = PureState::basis(d, i).expect("i < d");
            inputs.push(psi.tensor(&programs[a]).amplitudes().to_vec());
            let mut out = vec![C64::new(0.0, 0.0); d * dp];
            for (s, op) in families[a].iter().enumerate() {
                for r in 0..d {
                    out[r * dp + s] += op[(r, i)];
                }
            }
            outputs.push(out);
        }
    }
    let gate = complete_unitary(&inputs, &outputs, d * dp)?;
    let residual = unitarity_residual(&gate);
    let processor = Processor::new(d, dp, gate, None)?;

    let mut partitions = Vec::with_capacity(n);
    let mut verifications = Vec::with_capacity(n);
    for a in 0..n {
        let part = partition_for(&slot_outcomes[a], d)?;
        let inst = induced_instrument(&processor, &ProgramState::pure(programs[a].clone()), &part)?;
        let povm_error = inst
            .povm
            .iter()
            .zip(measurements[a].projectors())
            .map(|(f, e)| f.dist(e))
            .fold(0.0, f64::max);
        let leakage = if inst.povm.len() > d { inst.povm[d].max_abs() } else { 0.0 };
        let projection_postulate =
            complies_with_projection_postulate(&processor, &programs[a], &part, &measurements[a])?;
        verifications.push(MeasurementVerification {
            povm: inst.povm[..d].to_vec(),
            povm_error,
            leakage,
            projection_postulate,
        });
        partitions.push(part);
    }

    Ok(SynthesisReport {
        processor,
        measurements: measurements.to_vec(),
        programs: programs.to_vec(),
        partitions,
        verifications,
        unitary: residual <= TOL,
        completion_used: dp > n,
        unitarity_residual: residual,
    })
}

/// Processor realizing each measurement from its program with the
/// projectors themselves (scaled by the slot amplitudes) as Kraus
/// operators.
pub fn build_orthogonal_processor(
    assign: &SlotAssignment,
    measurements: &[VonNeumannMeasurement],
) -> Result<SynthesisReport> {
    if assign.maps.len() != measurements.len() {
        return Err(Error::DimensionMismatch {
            context: "measurements per assignment",
            expected: assign.maps.len(),
            found: measurements.len(),
        });
    }
    let families = assign
        .maps
        .iter()
        .zip(measurements)
        .map(|(map, m)| map.kraus(m))
        .collect::<Result<Vec<_>>>()?;
    let slot_outcomes: Vec<Vec<Option<usize>>> = assign.maps.iter().map(|m| m.outcome_of_slot()).collect();
    synthesize_from_kraus(measurements, &assign.programs, &families, &slot_outcomes)
}

/// Post-states check on explicit samples: for program `alpha` of the report,
/// every outcome with probability above `1e-10` must leave each sample in
/// the outcome's projector (within `1e-8`).
pub fn verify_projection_postulate(
    report: &SynthesisReport,
    alpha: usize,
    samples: &[DensityOperator],
) -> Result<bool> {
    let m = report.measurements.get(alpha).ok_or(Error::IndexOutOfRange {
        index: alpha,
        bound: report.measurements.len(),
    })?;
    let program = ProgramState::pure(report.programs[alpha].clone());
    let part = &report.partitions[alpha];
    for rho in samples {
        for (k, e) in m.projectors().iter().enumerate() {
            let p = rho.matrix().hs_inner(e).re;
            if p <= 1e-10 {
                continue;
            }
            let post = post_measurement_state(&report.processor, &program, rho, k, part)?;
            if !post.matrix().approx_eq(e, 1e-8) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Relaxed construction with output permutations: outcome `k` of PVM `α`
/// sits in slot `k` with Kraus operator `|φ^0_{perms[α][k]}><φ^α_k|`.
///
/// The isometry condition holds for arbitrary PVMs iff the permutations
/// pairwise disagree on every outcome.
pub fn relaxed_with_permutations(
    pvms: &[VonNeumannMeasurement],
    perms: &[Vec<usize>],
) -> Result<SynthesisReport> {
    let first = pvms.first().ok_or(Error::Empty("measurement list"))?;
    let d = first.dim();
    if pvms.len() > d {
        return Err(Error::TooManyMeasurements {
            count: pvms.len(),
            dim: d,
        });
    }
    if perms.len() != pvms.len() {
        return Err(Error::DimensionMismatch {
            context: "permutations per measurement",
            expected: pvms.len(),
            found: perms.len(),
        });
    }
    let mut families = Vec::with_capacity(pvms.len());
    for (m, perm) in pvms.iter().zip(perms) {
        first.same_dim(m, "measurement")?;
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&p| p >= d || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidSlotMap("output map is not a permutation"));
        }
        families.push(
            (0..d)
                .map(|k| Operator::outer(first.basis[perm[k]].amplitudes(), m.basis[k].amplitudes()))
                .collect(),
        );
    }
    let programs: Vec<PureState> = (0..pvms.len()).map(|a| PureState::basis(d, a).expect("a < d")).collect();
    let slot_outcomes = vec![(0..d).map(Some).collect::<Vec<_>>(); pvms.len()];
    synthesize_from_kraus(pvms, &programs, &families, &slot_outcomes)
}

/// Cyclic shift construction `Ẽ^α_k = |φ^0_{(k+α) mod d}><φ^α_k|` on a
/// `d`-dimensional program register. Outcome statistics of every PVM are
/// reproduced; post-states are rotated whenever `α ≥ 1`.
pub fn relaxed_pvm_processor(pvms: &[VonNeumannMeasurement]) -> Result<SynthesisReport> {
    let d = pvms.first().ok_or(Error::Empty("measurement list"))?.dim();
    let perms: Vec<Vec<usize>> = (0..pvms.len()).map(|a| (0..d).map(|k| (k + a) % d).collect()).collect();
    relaxed_with_permutations(pvms, &perms)
}

/// A necessary condition for measurements sharing a `d`-dimensional program
/// register that fails.
#[derive(Clone, Debug, PartialEq)]
pub enum TableViolation {
    /// `|<column_α k|column_β k>|² > 1e-10`.
    RowOverlap {
        alpha: usize,
        beta: usize,
        outcome: usize,
        overlap: f64,
    },
    /// Outcome `k` of column `β` is outcome `permutation[k]` of column `α`.
    PermutationRelated {
        alpha: usize,
        beta: usize,
        permutation: Vec<usize>,
    },
}

/// Row orthogonality and no-permutation constraints on columns that share
/// an outcome-indexed program register.
pub fn feasibility_table_check(columns: &[VonNeumannMeasurement]) -> Result<Vec<TableViolation>> {
    let d = columns.first().ok_or(Error::Empty("measurement list"))?.dim();
    for c in columns {
        columns[0].same_dim(c, "table column")?;
    }
    if columns.len() > d {
        return Err(Error::TooManyMeasurements {
            count: columns.len(),
            dim: d,
        });
    }
    let mut out = Vec::new();
    for a in 0..columns.len() {
        for b in a + 1..columns.len() {
            let (ca, cb) = (&columns[a], &columns[b]);
            for k in 0..d {
                let overlap = ca.projectors[k].hs_inner(&cb.projectors[k]).re;
                if overlap > TOL {
                    out.push(TableViolation::RowOverlap {
                        alpha: a,
                        beta: b,
                        outcome: k,
                        overlap,
                    });
                }
            }
            if let Some(permutation) = permutation_between(ca, cb) {
                out.push(TableViolation::PermutationRelated {
                    alpha: a,
                    beta: b,
                    permutation,
                });
            }
        }
    }
    Ok(out)
}

fn permutation_between(a: &VonNeumannMeasurement, b: &VonNeumannMeasurement) -> Option<Vec<usize>> {
    b.projectors
        .iter()
        .map(|eb| a.projectors.iter().position(|ea| ea.approx_eq(eb, TOL)))
        .collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

/// Outcome of [`random_coprogram_search`].
#[derive(Clone, Debug, PartialEq)]
pub struct CoprogramSearch {
    pub trials: usize,
    pub pairings_checked: usize,
    /// Pairings with `S = k I` and `|k| < 1`, i.e. distinct measurements
    /// sharing a `d`-dimensional program register.
    pub found: usize,
}

/// Draws pairs of random PVMs on `C^d` and checks every outcome-to-slot
/// pairing of a `d`-dimensional program register for the coprogram
/// condition with a usable overlap.
pub fn random_coprogram_search(dim: usize, trials: usize, seed: u64) -> CoprogramSearch {
    let mut rng = random::seeded(seed);
    let perms = permutations(dim);
    let mut found = 0;
    for _ in 0..trials {
        let m1 = VonNeumannMeasurement::random(&mut rng, dim);
        let m2 = VonNeumannMeasurement::random(&mut rng, dim);
        for perm in &perms {
            let cond = coprogram_condition(&m1, &m2.permuted(perm).expect("permutation"))
                .expect("equal dimensions");
            if cond.scalar.is_some_and(|k| k.norm() < 1.0 - 1e-9) {
                found += 1;
            }
        }
    }
    CoprogramSearch {
        trials,
        pairings_checked: trials * perms.len(),
        found,
    }
}

/// Exhaustive search for `n` permutations of `0..d` that pairwise disagree
/// everywhere, the requirement for `n` arbitrary PVMs in the relaxed
/// permutation family. The first permutation is the identity.
pub fn disagreeing_permutations(dim: usize, n: usize) -> Option<Vec<Vec<usize>>> {
    if n == 0 {
        return Some(Vec::new());
    }
    let all = permutations(dim);
    let mut chosen = vec![all[0].clone()];
    fn extend(all: &[Vec<usize>], chosen: &mut Vec<Vec<usize>>, n: usize, start: usize) -> bool {
        if chosen.len() == n {
            return true;
        }
        for i in start..all.len() {
            let p = &all[i];
            if chosen.iter().all(|q| q.iter().zip(p).all(|(a, b)| a != b)) {
                chosen.push(p.clone());
                if extend(all, chosen, n, i + 1) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    extend(&all, &mut chosen, n, 1).then_some(chosen)
}

/// Largest number of arbitrary PVMs on `C^d` that the relaxed permutation
/// family fits into a `d`-dimensional program register.
pub fn relaxed_permutation_capacity(dim: usize) -> usize {
    (1..=dim + 1)
        .take_while(|&n| disagreeing_permutations(dim, n).is_some())
        .last()
        .unwrap_or(0)
}
