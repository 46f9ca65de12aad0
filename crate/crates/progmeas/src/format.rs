//! JSON encodings.
//!
//! Complex numbers are `[re, im]`, operators `{"rows", "cols", "data"}` in
//! row-major order and pure states `{"dim", "amp"}`. Floats are written with
//! 17 significant digits so every value round-trips exactly.

use std::io;

use progmeas_core::qcore::{DensityOperator, Operator, PureState};
use progmeas_core::vnmeas::{SlotMap, VonNeumannMeasurement};
use progmeas_core::{Error, C64};
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

/// Compact JSON with floats printed as `{:.16e}`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactFloats;

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", exact(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// 17 significant digits in scientific notation.
pub fn exact(value: f64) -> String {
    format!("{value:.16e}")
}

/// Serializes with [`ExactFloats`] and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats);
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub type ComplexJson = [f64; 2];

fn to_complex(z: &C64) -> ComplexJson {
    [z.re, z.im]
}

fn from_complex(z: &ComplexJson) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<ComplexJson>,
}

impl From<&Operator> for OperatorJson {
    fn from(m: &Operator) -> Self {
        OperatorJson {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(to_complex).collect(),
        }
    }
}

impl TryFrom<&OperatorJson> for Operator {
    type Error = Error;

    fn try_from(j: &OperatorJson) -> Result<Self, Error> {
        Operator::new(j.rows, j.cols, j.data.iter().map(from_complex).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureStateJson {
    pub dim: usize,
    pub amp: Vec<ComplexJson>,
}

impl From<&PureState> for PureStateJson {
    fn from(s: &PureState) -> Self {
        PureStateJson {
            dim: s.dim(),
            amp: s.amplitudes().iter().map(to_complex).collect(),
        }
    }
}

impl PureStateJson {
    /// Accepts amplitudes whose norm is within `tol` of one and renormalizes
    /// them.
    pub fn to_state(&self, tol: f64) -> Result<PureState, Error> {
        if self.amp.len() != self.dim {
            return Err(Error::EntryCount {
                expected: self.dim,
                found: self.amp.len(),
            });
        }
        let amp: Vec<C64> = self.amp.iter().map(from_complex).collect();
        let norm = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        PureState::normalized(amp)
    }
}

/// A data state, either pure or a density matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Pure(PureStateJson),
    Density(OperatorJson),
}

impl StateJson {
    pub fn to_density(&self, tol: f64) -> Result<DensityOperator, Error> {
        match self {
            StateJson::Pure(p) => Ok(DensityOperator::from_pure(&p.to_state(tol)?)),
            StateJson::Density(m) => DensityOperator::with_tolerance(Operator::try_from(m)?, tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    pub elements: Vec<OperatorJson>,
}

impl PovmJson {
    pub fn to_operators(&self) -> Result<Vec<Operator>, Error> {
        self.elements.iter().map(Operator::try_from).collect()
    }
}

/// QID program amplitudes over the four Bell-like states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgramJson {
    pub alpha: Vec<ComplexJson>,
}

impl ProgramJson {
    pub fn amplitudes(&self) -> Result<[C64; 4], Error> {
        if self.alpha.len() != 4 {
            return Err(Error::EntryCount {
                expected: 4,
                found: self.alpha.len(),
            });
        }
        Ok([0, 1, 2, 3].map(|k| from_complex(&self.alpha[k])))
    }

    pub fn from_amplitudes(alpha: &[C64; 4]) -> Self {
        ProgramJson {
            alpha: alpha.iter().map(to_complex).collect(),
        }
    }
}

/// A rank-one projective measurement given by projectors or by a basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasurementJson {
    Projectors { dim: usize, projectors: Vec<OperatorJson> },
    Basis { basis: Vec<PureStateJson> },
}

impl MeasurementJson {
    pub fn to_measurement(&self, tol: f64) -> Result<VonNeumannMeasurement, Error> {
        match self {
            MeasurementJson::Projectors { dim, projectors } => {
                let ops = projectors.iter().map(Operator::try_from).collect::<Result<Vec<_>, _>>()?;
                if let Some(bad) = ops.iter().find(|o| o.rows() != *dim) {
                    return Err(Error::DimensionMismatch {
                        context: "measurement projector",
                        expected: *dim,
                        found: bad.rows(),
                    });
                }
                VonNeumannMeasurement::from_projectors(ops)
            }
            MeasurementJson::Basis { basis } => {
                VonNeumannMeasurement::from_basis(basis.iter().map(|b| b.to_state(tol)).collect::<Result<_, _>>()?)
            }
        }
    }
}

impl From<&VonNeumannMeasurement> for MeasurementJson {
    fn from(m: &VonNeumannMeasurement) -> Self {
        MeasurementJson::Projectors {
            dim: m.dim(),
            projectors: m.projectors().iter().map(OperatorJson::from).collect(),
        }
    }
}

/// Slot `s` holds `[outcome, amplitude]` or `null`.
pub type SlotMapJson = Vec<Option<(usize, f64)>>;

pub fn slot_map(entries: &SlotMapJson, outcomes: usize) -> Result<SlotMap, Error> {
    SlotMap::weighted(entries.clone(), outcomes)
}

/// Measurement list with an optional explicit program assignment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetJson {
    pub measurements: Vec<MeasurementJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<Vec<SlotMapJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub programs: Option<Vec<PureStateJson>>,
}

/// Reconstruction input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataJson {
    #[serde(default)]
    pub counts: Option<Vec<u64>>,
    #[serde(default)]
    pub probabilities: Option<Vec<f64>>,
}

/// Provenance embedded in every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub tolerance: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, -0.0, f64::MIN_POSITIVE] {
            let text = exact(x);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{text}");
        }
        let s = to_json(&OperatorJson::from(&Operator::identity(1)));
        assert_eq!(s, "{\"rows\":1,\"cols\":1,\"data\":[[1.0000000000000000e0,0.0000000000000000e0]]}\n");
    }

    #[test]
    fn operator_round_trip() {
        let m = Operator::from_fn(2, 3, |i, j| C64::new(i as f64 / 3.0, -(j as f64) / 7.0));
        let text = to_json(&OperatorJson::from(&m));
        let back: OperatorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Operator::try_from(&back).unwrap(), m);
    }

    #[test]
    fn state_json_variants() {
        let pure: StateJson = serde_json::from_str(r#"{"dim":2,"amp":[[1,0],[0,0]]}"#).unwrap();
        assert!(matches!(pure, StateJson::Pure(_)));
        let rho = pure.to_density(1e-10).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], C64::new(1.0, 0.0));
        let dense: StateJson =
            serde_json::from_str(r#"{"rows":2,"cols":2,"data":[[0.5,0],[0,0],[0,0],[0.5,0]]}"#).unwrap();
        assert!(matches!(dense, StateJson::Density(_)));
        let bad: StateJson = serde_json::from_str(r#"{"dim":2,"amp":[[1,0],[1,0]]}"#).unwrap();
        assert!(matches!(bad.to_density(1e-10), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn measurement_variants() {
        let m: MeasurementJson =
            serde_json::from_str(r#"{"basis":[{"dim":2,"amp":[[0,0],[1,0]]},{"dim":2,"amp":[[1,0],[0,0]]}]}"#).unwrap();
        let vn = m.to_measurement(1e-10).unwrap();
        let again = MeasurementJson::from(&vn).to_measurement(1e-10).unwrap();
        assert!(again.projectors()[0].approx_eq(&vn.projectors()[0], 1e-15));
    }
}
