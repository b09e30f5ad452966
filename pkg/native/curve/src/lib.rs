//! Minimal BLS12-381 bindings: group elements in multiplicative notation,
//! pairings, multi-exponentiation and hash-to-curve. Scalars cross the FFI
//! boundary as Python ints; group elements as opaque handles.

use ark_bls12_381::{Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::hashing::curve_maps::wb::WBMap;
use ark_ec::hashing::map_to_curve_hasher::MapToCurveBasedHasher;
use ark_ec::hashing::HashToCurve;
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{CurveGroup, PrimeGroup, VariableBaseMSM};
use ark_ff::field_hashers::DefaultFieldHasher;
use ark_ff::{BigInteger, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use std::sync::OnceLock;

type Gt = PairingOutput<Bls12_381>;

fn group_order() -> &'static BigInt {
    static ORDER: OnceLock<BigInt> = OnceLock::new();
    ORDER.get_or_init(|| {
        let bytes = Fr::MODULUS.to_bytes_le();
        BigInt::from_bytes_le(Sign::Plus, &bytes)
    })
}

/// Reduce an arbitrary (possibly negative) integer into Fr.
fn fr_from_int(e: &BigInt) -> Fr {
    let m = e.mod_floor(group_order());
    let (_, bytes) = m.to_bytes_le();
    Fr::from_le_bytes_mod_order(&bytes)
}

fn no_modulo(modulo: Option<&Bound<'_, PyAny>>) -> PyResult<()> {
    if modulo.is_some() {
        return Err(PyValueError::new_err("pow() modulo argument not supported"));
    }
    Ok(())
}

fn ser_err(e: ark_serialize::SerializationError) -> PyErr {
    PyValueError::new_err(format!("invalid group element encoding: {e}"))
}

macro_rules! point_class {
    ($pyname:literal, $name:ident, $proj:ty, $affine:ty, $nbytes:expr) => {
        #[pyclass(frozen, eq, from_py_object, name = $pyname, module = "bltc._curve")]
        #[derive(Clone, Copy, PartialEq)]
        struct $name($proj);

        #[pymethods]
        impl $name {
            #[staticmethod]
            fn generator() -> Self {
                Self(<$proj>::generator())
            }

            #[staticmethod]
            fn identity() -> Self {
                Self(<$proj>::zero())
            }

            fn is_identity(&self) -> bool {
                self.0.is_zero()
            }

            /// Group operation (multiplicative notation).
            fn __mul__(&self, other: &Self) -> Self {
                Self(self.0 + other.0)
            }

            fn __truediv__(&self, other: &Self) -> Self {
                Self(self.0 - other.0)
            }

            /// Exponentiation by an arbitrary integer, reduced mod the group order.
            fn __pow__(&self, exponent: BigInt, modulo: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
                no_modulo(modulo)?;
                Ok(Self(self.0 * fr_from_int(&exponent)))
            }

            fn inv(&self) -> Self {
                Self(-self.0)
            }

            fn __hash__(&self) -> u64 {
                let mut buf = Vec::with_capacity($nbytes);
                self.0.into_affine().serialize_compressed(&mut buf).unwrap();
                let mut h: u64 = 0xcbf29ce484222325;
                for b in buf {
                    h = (h ^ b as u64).wrapping_mul(0x100000001b3);
                }
                h
            }

            /// Compressed encoding.
            fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
                let mut buf = Vec::with_capacity($nbytes);
                self.0.into_affine().serialize_compressed(&mut buf).unwrap();
                PyBytes::new(py, &buf)
            }

            /// Decode a compressed point; validates curve and subgroup membership.
            #[staticmethod]
            fn from_bytes(data: &[u8]) -> PyResult<Self> {
                if data.len() != $nbytes {
                    return Err(PyValueError::new_err(format!(
                        "expected {} bytes, got {}",
                        $nbytes,
                        data.len()
                    )));
                }
                let affine = <$affine>::deserialize_compressed(data).map_err(ser_err)?;
                Ok(Self(affine.into()))
            }

            /// Product of bases[i] ** scalars[i] (Pippenger).
            #[staticmethod]
            fn msm(points: Vec<Self>, scalars: Vec<BigInt>) -> PyResult<Self> {
                if points.len() != scalars.len() {
                    return Err(PyValueError::new_err("msm: length mismatch"));
                }
                let affine = <$proj>::normalize_batch(&points.iter().map(|p| p.0).collect::<Vec<_>>());
                let exps: Vec<Fr> = scalars.iter().map(fr_from_int).collect();
                Ok(Self(<$proj>::msm(&affine, &exps).expect("equal lengths")))
            }

            fn __repr__(&self) -> String {
                let mut buf = Vec::with_capacity($nbytes);
                self.0.into_affine().serialize_compressed(&mut buf).unwrap();
                format!("{}(0x{}..)", $pyname, hex_prefix(&buf))
            }
        }
    };
}

fn hex_prefix(buf: &[u8]) -> String {
    buf.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

point_class!("G1", PyG1, G1Projective, G1Affine, 48);
point_class!("G2", PyG2, G2Projective, G2Affine, 96);

/// Deterministic hash to a G1 subgroup point (WB map, SHA-256 expander).
#[pyfunction]
fn hash_to_g1_point(dst: &[u8], msg: &[u8]) -> PyResult<PyG1> {
    type Hasher = MapToCurveBasedHasher<
        G1Projective,
        DefaultFieldHasher<sha2::Sha256, 128>,
        WBMap<ark_bls12_381::g1::Config>,
    >;
    let hasher =
        Hasher::new(dst).map_err(|e| PyValueError::new_err(format!("hash_to_g1_point: {e}")))?;
    let point: G1Affine = hasher
        .hash(msg)
        .map_err(|e| PyValueError::new_err(format!("hash_to_g1_point: {e}")))?;
    Ok(PyG1(point.into()))
}

#[pyclass(frozen, eq, from_py_object, name = "GT", module = "bltc._curve")]
#[derive(Clone, Copy, PartialEq)]
struct PyGt(Gt);

#[pymethods]
impl PyGt {
    #[staticmethod]
    fn identity() -> Self {
        PyGt(Gt::zero())
    }

    #[staticmethod]
    fn generator() -> Self {
        PyGt(Gt::generator())
    }

    fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    fn __mul__(&self, other: &Self) -> Self {
        PyGt(self.0 + other.0)
    }

    fn __truediv__(&self, other: &Self) -> Self {
        PyGt(self.0 - other.0)
    }

    fn __pow__(&self, exponent: BigInt, modulo: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        no_modulo(modulo)?;
        Ok(PyGt(self.0 * fr_from_int(&exponent)))
    }

    fn inv(&self) -> Self {
        PyGt(-self.0)
    }

    fn __hash__(&self) -> u64 {
        let mut buf = Vec::with_capacity(576);
        self.0.serialize_compressed(&mut buf).unwrap();
        let mut h: u64 = 0xcbf29ce484222325;
        for b in buf {
            h = (h ^ b as u64).wrapping_mul(0x100000001b3);
        }
        h
    }

    fn to_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        let mut buf = Vec::with_capacity(576);
        self.0.serialize_compressed(&mut buf).unwrap();
        PyBytes::new(py, &buf)
    }

    /// Decode a target-group element; validates subgroup membership.
    #[staticmethod]
    fn from_bytes(data: &[u8]) -> PyResult<Self> {
        if data.len() != 576 {
            return Err(PyValueError::new_err(format!(
                "expected 576 bytes, got {}",
                data.len()
            )));
        }
        let gt = Gt::deserialize_compressed(data).map_err(ser_err)?;
        Ok(PyGt(gt))
    }

    fn __repr__(&self) -> String {
        let mut buf = Vec::with_capacity(576);
        self.0.serialize_compressed(&mut buf).unwrap();
        format!("GT(0x{}..)", hex_prefix(&buf))
    }
}

/// Bilinear pairing e: G1 x G2 -> GT.
#[pyfunction]
fn pair(a: &PyG1, b: &PyG2) -> PyGt {
    PyGt(Bls12_381::pairing(a.0.into_affine(), b.0.into_affine()))
}

/// Product of pairings e(a_i, b_i); one shared final exponentiation.
/// Pairs with an identity on either side contribute the GT identity and are skipped.
#[pyfunction]
fn multi_pair(g1s: Vec<PyG1>, g2s: Vec<PyG2>) -> PyResult<PyGt> {
    if g1s.len() != g2s.len() {
        return Err(PyValueError::new_err("multi_pair: length mismatch"));
    }
    let mut lhs: Vec<G1Affine> = Vec::with_capacity(g1s.len());
    let mut rhs: Vec<G2Affine> = Vec::with_capacity(g2s.len());
    for (a, b) in g1s.iter().zip(g2s.iter()) {
        if a.0.is_zero() || b.0.is_zero() {
            continue;
        }
        lhs.push(a.0.into_affine());
        rhs.push(b.0.into_affine());
    }
    if lhs.is_empty() {
        return Ok(PyGt(Gt::zero()));
    }
    Ok(PyGt(Bls12_381::multi_pairing(lhs, rhs)))
}

/// Order of G1, G2, GT and of the scalar field.
#[pyfunction]
fn curve_order() -> BigInt {
    group_order().clone()
}

#[pymodule]
fn _curve(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyG1>()?;
    m.add_class::<PyG2>()?;
    m.add_class::<PyGt>()?;
    m.add_function(wrap_pyfunction!(pair, m)?)?;
    m.add_function(wrap_pyfunction!(multi_pair, m)?)?;
    m.add_function(wrap_pyfunction!(hash_to_g1_point, m)?)?;
    m.add_function(wrap_pyfunction!(curve_order, m)?)?;
    Ok(())
}
