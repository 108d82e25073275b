//! Thin ristretto255 bindings over curve25519-dalek.
//!
//! Scalars cross the boundary as 32-byte little-endian canonical encodings;
//! all scalar arithmetic happens on the Python side.

use curve25519_dalek::constants::RISTRETTO_BASEPOINT_POINT;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::{Identity, IsIdentity, VartimeMultiscalarMul};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;

fn scalar_from(bytes: &[u8]) -> PyResult<Scalar> {
    let arr: [u8; 32] = bytes
        .try_into()
        .map_err(|_| PyValueError::new_err("scalar must be 32 bytes"))?;
    Option::from(Scalar::from_canonical_bytes(arr))
        .ok_or_else(|| PyValueError::new_err("non-canonical scalar"))
}

#[pyclass(frozen, module = "zksvm._ristretto")]
#[derive(Clone, Copy)]
pub struct RawPoint(RistrettoPoint);

#[pymethods]
impl RawPoint {
    #[staticmethod]
    fn identity() -> Self {
        RawPoint(RistrettoPoint::identity())
    }

    #[staticmethod]
    fn basepoint() -> Self {
        RawPoint(RISTRETTO_BASEPOINT_POINT)
    }

    /// Canonical decoding; rejects anything that is not the unique encoding of a point.
    #[staticmethod]
    fn decode(data: &[u8]) -> PyResult<Self> {
        if data.len() != 32 {
            return Err(PyValueError::new_err("point encoding must be 32 bytes"));
        }
        CompressedRistretto::from_slice(data)
            .ok()
            .and_then(|c| c.decompress())
            .map(RawPoint)
            .ok_or_else(|| PyValueError::new_err("invalid ristretto255 encoding"))
    }

    /// The ristretto255 one-way map applied to 64 uniform bytes.
    #[staticmethod]
    fn from_uniform_bytes(data: &[u8]) -> PyResult<Self> {
        let arr: [u8; 64] = data
            .try_into()
            .map_err(|_| PyValueError::new_err("uniform input must be 64 bytes"))?;
        Ok(RawPoint(RistrettoPoint::from_uniform_bytes(&arr)))
    }

    fn encode<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new_bound(py, self.0.compress().as_bytes())
    }

    fn add(&self, other: &RawPoint) -> RawPoint {
        RawPoint(self.0 + other.0)
    }

    fn sub(&self, other: &RawPoint) -> RawPoint {
        RawPoint(self.0 - other.0)
    }

    fn neg(&self) -> RawPoint {
        RawPoint(-self.0)
    }

    fn mul(&self, scalar: &[u8]) -> PyResult<RawPoint> {
        Ok(RawPoint(self.0 * scalar_from(scalar)?))
    }

    fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    fn equals(&self, other: &RawPoint) -> bool {
        self.0 == other.0
    }
}

/// Variable-time multiscalar multiplication: sum of scalars[i] * points[i].
#[pyfunction]
fn multiscalar_mul(py: Python<'_>, scalars: Vec<Vec<u8>>, points: Vec<RawPoint>) -> PyResult<RawPoint> {
    if scalars.len() != points.len() {
        return Err(PyValueError::new_err("length mismatch"));
    }
    let ss = scalars
        .iter()
        .map(|s| scalar_from(s))
        .collect::<PyResult<Vec<Scalar>>>()?;
    let ps: Vec<RistrettoPoint> = points.iter().map(|p| p.0).collect();
    let out = py.allow_threads(|| RistrettoPoint::vartime_multiscalar_mul(ss.iter(), ps.iter()));
    Ok(RawPoint(out))
}

#[pymodule]
fn _ristretto(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RawPoint>()?;
    m.add_function(wrap_pyfunction!(multiscalar_mul, m)?)?;
    Ok(())
}
