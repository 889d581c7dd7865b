//! Group and scalar arithmetic behind the verifiable-computation schemes.
//!
//! Two backends share one interface. `Production` is the Ristretto group over
//! Curve25519: prime order about 2^252, 32-byte encodings for both scalars
//! and elements. `Toy` is the order-101 subgroup of Z_607^*, small enough to
//! enumerate exhaustively, used for statistical soundness experiments and
//! exhaustive tests. Backend choice fixes the security level; no other
//! parameter does.
//!
//! Operations that the cost model charges for (`sample_*`, `scalar_add`,
//! `scalar_mul`, `exp`, `mul`, `multi_exp`) tally into the active
//! [`counter_scope`]. Sampling counts one logical `rng` draw per sampled
//! value, however many raw bytes the backend consumes; it performs no counted
//! group operation, since both backends produce elements directly from
//! randomness rather than by exponentiating a generator.

pub mod counters;
pub mod toy;

use counters::tally;
pub use counters::{counter_scope, OpCounters};

use curve25519_dalek::constants::RISTRETTO_BASEPOINT_POINT;
use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar as RistrettoScalar;
use curve25519_dalek::traits::{Identity, VartimeMultiscalarMul};
use rand::{CryptoRng, Rng, RngCore};
use thiserror::Error;

/// Decimal value of the Ristretto group order, 2^252 + 27742317777372353535851937790883648493.
pub const RISTRETTO_ORDER_DECIMAL: &str =
    "7237005577332262213973186563042994240857116359379907606001950938285454250989";

/// Errors from algebra-level validation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("empty product has no defined base")]
    EmptyProduct,
    #[error("encoding is {got} bytes, expected {expected}")]
    EncodingLength { expected: usize, got: usize },
    #[error("scalar encoding is not a canonical residue")]
    InvalidScalar,
    #[error("element encoding is not a member of the prime-order group")]
    InvalidElement,
}

/// Which concrete group instantiates the scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Ristretto over Curve25519; the deployable parameter set.
    Production,
    /// Order-101 subgroup of Z_607^*; exhaustively testable.
    Toy,
}

impl Backend {
    /// Stable one-byte identifier used in serialized objects.
    pub fn id(self) -> u8 {
        match self {
            Backend::Production => 1,
            Backend::Toy => 2,
        }
    }

    /// Inverse of [`Backend::id`].
    pub fn from_id(id: u8) -> Option<Backend> {
        match id {
            1 => Some(Backend::Production),
            2 => Some(Backend::Toy),
            _ => None,
        }
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Production => "production",
            Backend::Toy => "toy",
        })
    }
}

/// Element of the scalar field Z_p for the backend's group order p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalar {
    Production(RistrettoScalar),
    Toy(u64),
}

/// Element of the prime-order group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupElement {
    Production(RistrettoPoint),
    Toy(u16),
}

fn backend_mismatch() -> ! {
    panic!("mixed group backends in one operation")
}

/// Handle to one backend's arithmetic. Copyable; all state is the backend tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Group {
    backend: Backend,
}

impl Group {
    pub fn new(backend: Backend) -> Self {
        Group { backend }
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// Bit length of the group order p.
    pub fn order_bits(&self) -> u32 {
        match self.backend {
            Backend::Production => 253,
            Backend::Toy => 7,
        }
    }

    /// Group order as a decimal string (the toy order fits in a u64, the
    /// production order does not).
    pub fn order_decimal(&self) -> String {
        match self.backend {
            Backend::Production => RISTRETTO_ORDER_DECIMAL.to_string(),
            Backend::Toy => toy::ORDER.to_string(),
        }
    }

    /// Serialized scalar width in bytes.
    pub fn scalar_len(&self) -> usize {
        match self.backend {
            Backend::Production => 32,
            Backend::Toy => toy::SCALAR_LEN,
        }
    }

    /// Serialized element width in bytes.
    pub fn element_len(&self) -> usize {
        match self.backend {
            Backend::Production => 32,
            Backend::Toy => toy::ELEMENT_LEN,
        }
    }

    /// Serialized scalar width in bits (the cost model's l_p).
    pub fn scalar_bits(&self) -> u64 {
        self.scalar_len() as u64 * 8
    }

    /// Serialized element width in bits (the cost model's l_G).
    pub fn element_bits(&self) -> u64 {
        self.element_len() as u64 * 8
    }

    /// Canonical generator. Fixed per backend so that runs with equal seeds
    /// are reproducible and setup costs no group operation.
    pub fn generator(&self) -> GroupElement {
        match self.backend {
            Backend::Production => GroupElement::Production(RISTRETTO_BASEPOINT_POINT),
            Backend::Toy => GroupElement::Toy(toy::GENERATOR),
        }
    }

    /// Multiplicative identity.
    pub fn identity(&self) -> GroupElement {
        match self.backend {
            Backend::Production => GroupElement::Production(RistrettoPoint::identity()),
            Backend::Toy => GroupElement::Toy(1),
        }
    }

    /// Uniform scalar. Counts one rng draw.
    pub fn sample_scalar<R: RngCore + CryptoRng>(&self, rng: &mut R) -> Scalar {
        tally(|c| c.rng += 1);
        match self.backend {
            Backend::Production => Scalar::Production(RistrettoScalar::random(rng)),
            Backend::Toy => Scalar::Toy(rng.gen_range(0..toy::ORDER)),
        }
    }

    /// Uniform group element. Counts one rng draw and no group operation:
    /// Ristretto hashes raw randomness to a point, and the toy backend
    /// indexes its enumerated subgroup.
    pub fn sample_element<R: RngCore + CryptoRng>(&self, rng: &mut R) -> GroupElement {
        tally(|c| c.rng += 1);
        match self.backend {
            Backend::Production => GroupElement::Production(RistrettoPoint::random(rng)),
            Backend::Toy => {
                let idx = rng.gen_range(0..toy::ORDER) as usize;
                GroupElement::Toy(toy::SUBGROUP[idx])
            }
        }
    }

    /// Scalar from a small integer, reduced mod p. Uncounted: used for
    /// constants and parsed inputs, not for scheme arithmetic.
    pub fn scalar_from_u64(&self, v: u64) -> Scalar {
        match self.backend {
            Backend::Production => Scalar::Production(RistrettoScalar::from(v)),
            Backend::Toy => Scalar::Toy(v % toy::ORDER),
        }
    }

    pub fn scalar_zero(&self) -> Scalar {
        self.scalar_from_u64(0)
    }

    pub fn scalar_is_zero(&self, s: &Scalar) -> bool {
        *s == self.scalar_zero()
    }

    /// a + b in Z_p. Counts one add_p.
    pub fn scalar_add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        tally(|c| c.add_p += 1);
        match (a, b) {
            (Scalar::Production(a), Scalar::Production(b)) => Scalar::Production(a + b),
            (Scalar::Toy(a), Scalar::Toy(b)) => Scalar::Toy((a + b) % toy::ORDER),
            _ => backend_mismatch(),
        }
    }

    /// a - b in Z_p. Counts one add_p; the cost model does not distinguish
    /// addition from subtraction.
    pub fn scalar_sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        tally(|c| c.add_p += 1);
        match (a, b) {
            (Scalar::Production(a), Scalar::Production(b)) => Scalar::Production(a - b),
            (Scalar::Toy(a), Scalar::Toy(b)) => Scalar::Toy((a + toy::ORDER - b) % toy::ORDER),
            _ => backend_mismatch(),
        }
    }

    /// a * b in Z_p. Counts one mul_p.
    pub fn scalar_mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        tally(|c| c.mul_p += 1);
        match (a, b) {
            (Scalar::Production(a), Scalar::Production(b)) => Scalar::Production(a * b),
            (Scalar::Toy(a), Scalar::Toy(b)) => Scalar::Toy(a * b % toy::ORDER),
            _ => backend_mismatch(),
        }
    }

    /// base^e. Counts one exp_G.
    pub fn exp(&self, base: &GroupElement, e: &Scalar) -> GroupElement {
        tally(|c| c.exp_g += 1);
        match (base, e) {
            (GroupElement::Production(p), Scalar::Production(s)) => {
                GroupElement::Production(p * s)
            }
            (GroupElement::Toy(x), Scalar::Toy(e)) => GroupElement::Toy(toy::modpow(*x, *e)),
            _ => backend_mismatch(),
        }
    }

    /// a * b in the group. Counts one mul_G.
    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        tally(|c| c.mul_g += 1);
        match (a, b) {
            (GroupElement::Production(a), GroupElement::Production(b)) => {
                GroupElement::Production(a + b)
            }
            (GroupElement::Toy(a), GroupElement::Toy(b)) => GroupElement::Toy(toy::mul(*a, *b)),
            _ => backend_mismatch(),
        }
    }

    /// Group inverse. Uncounted: the cost model has no inversion class and no
    /// scheme algorithm inverts; only proof-side checks do.
    pub fn invert_element(&self, a: &GroupElement) -> GroupElement {
        match a {
            GroupElement::Production(p) => GroupElement::Production(-p),
            GroupElement::Toy(x) => GroupElement::Toy(toy::invert(*x)),
        }
    }

    /// Product of `bases[i]^exps[i]`. Counts n exp_G and n-1 mul_G, the cost
    /// of the textbook evaluation, regardless of the internal algorithm.
    pub fn multi_exp(
        &self,
        bases: &[GroupElement],
        exps: &[Scalar],
    ) -> Result<GroupElement, AlgebraError> {
        if bases.len() != exps.len() {
            return Err(AlgebraError::DimensionMismatch {
                left: bases.len(),
                right: exps.len(),
            });
        }
        if bases.is_empty() {
            return Err(AlgebraError::EmptyProduct);
        }
        let n = bases.len() as u64;
        tally(|c| {
            c.exp_g += n;
            c.mul_g += n - 1;
        });
        match self.backend {
            Backend::Production => {
                let points = bases.iter().map(|b| match b {
                    GroupElement::Production(p) => *p,
                    GroupElement::Toy(_) => backend_mismatch(),
                });
                let scalars = exps.iter().map(|e| match e {
                    Scalar::Production(s) => *s,
                    Scalar::Toy(_) => backend_mismatch(),
                });
                Ok(GroupElement::Production(
                    RistrettoPoint::vartime_multiscalar_mul(scalars, points),
                ))
            }
            Backend::Toy => {
                let mut acc: u16 = 1;
                for (b, e) in bases.iter().zip(exps) {
                    match (b, e) {
                        (GroupElement::Toy(x), Scalar::Toy(k)) => {
                            acc = toy::mul(acc, toy::modpow(*x, *k));
                        }
                        _ => backend_mismatch(),
                    }
                }
                Ok(GroupElement::Toy(acc))
            }
        }
    }

    /// Fixed-width big-endian scalar encoding.
    pub fn serialize_scalar(&self, s: &Scalar) -> Vec<u8> {
        match s {
            Scalar::Production(s) => {
                let mut bytes = s.to_bytes();
                bytes.reverse();
                bytes.to_vec()
            }
            Scalar::Toy(v) => vec![*v as u8],
        }
    }

    /// Rejects wrong widths and non-canonical residues.
    pub fn deserialize_scalar(&self, bytes: &[u8]) -> Result<Scalar, AlgebraError> {
        let expected = self.scalar_len();
        if bytes.len() != expected {
            return Err(AlgebraError::EncodingLength {
                expected,
                got: bytes.len(),
            });
        }
        match self.backend {
            Backend::Production => {
                let mut le = [0u8; 32];
                le.copy_from_slice(bytes);
                le.reverse();
                let maybe: Option<RistrettoScalar> =
                    RistrettoScalar::from_canonical_bytes(le).into();
                maybe.map(Scalar::Production).ok_or(AlgebraError::InvalidScalar)
            }
            Backend::Toy => {
                let v = u64::from(bytes[0]);
                if v < toy::ORDER {
                    Ok(Scalar::Toy(v))
                } else {
                    Err(AlgebraError::InvalidScalar)
                }
            }
        }
    }

    /// Fixed-width element encoding: compressed Ristretto, or the big-endian
    /// canonical representative for the toy backend.
    pub fn serialize_element(&self, e: &GroupElement) -> Vec<u8> {
        match e {
            GroupElement::Production(p) => p.compress().to_bytes().to_vec(),
            GroupElement::Toy(x) => x.to_be_bytes().to_vec(),
        }
    }

    /// Rejects wrong widths and encodings outside the prime-order group.
    pub fn deserialize_element(&self, bytes: &[u8]) -> Result<GroupElement, AlgebraError> {
        let expected = self.element_len();
        if bytes.len() != expected {
            return Err(AlgebraError::EncodingLength {
                expected,
                got: bytes.len(),
            });
        }
        match self.backend {
            Backend::Production => {
                let compressed = CompressedRistretto::from_slice(bytes)
                    .map_err(|_| AlgebraError::InvalidElement)?;
                compressed
                    .decompress()
                    .map(GroupElement::Production)
                    .ok_or(AlgebraError::InvalidElement)
            }
            Backend::Toy => {
                let x = u16::from_be_bytes([bytes[0], bytes[1]]);
                if toy::is_member(x) {
                    Ok(GroupElement::Toy(x))
                } else {
                    Err(AlgebraError::InvalidElement)
                }
            }
        }
    }

    /// Human-readable scalar: decimal for the toy backend, big-endian hex
    /// otherwise.
    pub fn scalar_to_string(&self, s: &Scalar) -> String {
        match s {
            Scalar::Toy(v) => v.to_string(),
            Scalar::Production(_) => {
                let bytes = self.serialize_scalar(s);
                let mut out = String::with_capacity(2 * bytes.len());
                for b in bytes {
                    out.push_str(&format!("{b:02x}"));
                }
                out
            }
        }
    }
}
