//! Canonical serialization, framing, and byte-exact size accounting.
//!
//! Every protocol object has one deterministic encoding: a one-byte backend
//! tag, dimensions as 32-bit big-endian integers, then scalars and group
//! elements at their backend's fixed widths. Decoding validates everything;
//! a group element that is not a member of the prime-order group never gets
//! past this layer.
//!
//! Encoders report how many payload bytes went to scalars and elements,
//! separate from the self-description header. The content bytes are the
//! quantities the communication/storage formulas predict; headers and frames
//! are transport overhead outside that model. [`size_report`] evaluates the
//! closed-form totals for both schemes with any (l_p, l_G), so large
//! parameter sets can be priced without instantiating a backend.

pub mod client;
pub mod server;

use crate::algebra::{AlgebraError, Backend, Group, GroupElement, Scalar};
use crate::fg12::{Fg12EvaluationKey, Fg12FunctionKey};
use crate::scheme::{
    EvaluationKey, FunctionVerificationKey, MatrixF, PublicParams, SchemeError, ServerResponse,
};
use sha2::{Digest, Sha256};
use std::fmt;
use std::io::{self, Read, Write};
use std::path::Path;
use thiserror::Error;

/// Frame and file magic.
pub const MAGIC: [u8; 4] = *b"MMVC";

/// Protocol version.
pub const VERSION: u8 = 1;

/// Upper bound on a frame payload; a length field beyond this is treated as
/// a protocol violation rather than an allocation request.
pub const MAX_PAYLOAD: u32 = 1 << 26;

/// Errors at the serialization and transport layer.
#[derive(Debug, Error)]
pub enum WireError {
    #[error("short read")]
    ShortRead,
    #[error("protocol mismatch: {0}")]
    ProtocolMismatch(String),
    #[error("unknown message type {0}")]
    UnknownMsgType(u8),
    #[error("invalid scalar")]
    InvalidScalar,
    #[error("invalid element")]
    InvalidElement,
    #[error("trailing bytes after payload")]
    TrailingBytes,
    #[error("unknown function")]
    UnknownFunction,
    #[error("server error: {0}")]
    Server(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<AlgebraError> for WireError {
    fn from(err: AlgebraError) -> Self {
        match err {
            AlgebraError::InvalidScalar => WireError::InvalidScalar,
            AlgebraError::InvalidElement => WireError::InvalidElement,
            AlgebraError::EncodingLength { .. } => WireError::ShortRead,
            other => WireError::Shape(other.to_string()),
        }
    }
}

impl From<SchemeError> for WireError {
    fn from(err: SchemeError) -> Self {
        WireError::Shape(err.to_string())
    }
}

/// Frame message types.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsgType {
    Pk = 1,
    Ekf = 2,
    Enc = 3,
    Resp = 4,
    Err = 5,
}

impl MsgType {
    pub fn from_byte(b: u8) -> Result<MsgType, WireError> {
        match b {
            1 => Ok(MsgType::Pk),
            2 => Ok(MsgType::Ekf),
            3 => Ok(MsgType::Enc),
            4 => Ok(MsgType::Resp),
            5 => Ok(MsgType::Err),
            other => Err(WireError::UnknownMsgType(other)),
        }
    }
}

/// One protocol message: type plus raw payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub msg_type: MsgType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(msg_type: MsgType, payload: Vec<u8>) -> Frame {
        Frame { msg_type, payload }
    }

    /// Error frame with a UTF-8 message payload.
    pub fn error(msg: &str) -> Frame {
        Frame::new(MsgType::Err, msg.as_bytes().to_vec())
    }
}

/// Writes magic, version, type, length, payload.
pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> io::Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&[VERSION, frame.msg_type as u8])?;
    w.write_all(&(frame.payload.len() as u32).to_be_bytes())?;
    w.write_all(&frame.payload)?;
    w.flush()
}

fn read_exact_or_short<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), WireError> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            WireError::ShortRead
        } else {
            WireError::Io(e)
        }
    })
}

/// Reads and validates one frame.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Frame, WireError> {
    let mut head = [0u8; 10];
    read_exact_or_short(r, &mut head)?;
    if head[0..4] != MAGIC {
        return Err(WireError::ProtocolMismatch("bad magic".into()));
    }
    if head[4] != VERSION {
        return Err(WireError::ProtocolMismatch(format!(
            "version {} not supported",
            head[4]
        )));
    }
    let msg_type = MsgType::from_byte(head[5])?;
    let len = u32::from_be_bytes([head[6], head[7], head[8], head[9]]);
    if len > MAX_PAYLOAD {
        return Err(WireError::ProtocolMismatch(format!(
            "payload length {len} exceeds limit"
        )));
    }
    let mut payload = vec![0u8; len as usize];
    read_exact_or_short(r, &mut payload)?;
    Ok(Frame { msg_type, payload })
}

/// Object kinds for file persistence. The first four coincide with frame
/// message types; verification keys exist only as files, never on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    PublicParams = 1,
    EvaluationKey = 2,
    InputEncoding = 3,
    Response = 4,
    FunctionVk = 6,
    InputVk = 7,
    Fg12EvaluationKey = 8,
    Fg12FunctionKey = 9,
}

impl FileKind {
    pub fn from_byte(b: u8) -> Result<FileKind, WireError> {
        match b {
            1 => Ok(FileKind::PublicParams),
            2 => Ok(FileKind::EvaluationKey),
            3 => Ok(FileKind::InputEncoding),
            4 => Ok(FileKind::Response),
            6 => Ok(FileKind::FunctionVk),
            7 => Ok(FileKind::InputVk),
            8 => Ok(FileKind::Fg12EvaluationKey),
            9 => Ok(FileKind::Fg12FunctionKey),
            other => Err(WireError::UnknownMsgType(other)),
        }
    }
}

impl fmt::Display for FileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FileKind::PublicParams => "public parameters",
            FileKind::EvaluationKey => "evaluation key",
            FileKind::InputEncoding => "input encoding",
            FileKind::Response => "server response",
            FileKind::FunctionVk => "function verification key",
            FileKind::InputVk => "input verification key",
            FileKind::Fg12EvaluationKey => "baseline evaluation key",
            FileKind::Fg12FunctionKey => "baseline function key",
        };
        f.write_str(name)
    }
}

/// Persists a payload with the 8-byte header: magic, version, kind, reserved.
pub fn write_object_file(path: &Path, kind: FileKind, payload: &[u8]) -> Result<(), WireError> {
    let mut bytes = Vec::with_capacity(8 + payload.len());
    bytes.extend_from_slice(&MAGIC);
    bytes.push(VERSION);
    bytes.push(kind as u8);
    bytes.extend_from_slice(&[0, 0]);
    bytes.extend_from_slice(payload);
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Reads a persisted object back as (kind, payload).
pub fn read_object_file(path: &Path) -> Result<(FileKind, Vec<u8>), WireError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 {
        return Err(WireError::ShortRead);
    }
    if bytes[0..4] != MAGIC {
        return Err(WireError::ProtocolMismatch("bad magic".into()));
    }
    if bytes[4] != VERSION {
        return Err(WireError::ProtocolMismatch(format!(
            "version {} not supported",
            bytes[4]
        )));
    }
    let kind = FileKind::from_byte(bytes[5])?;
    Ok((kind, bytes[8..].to_vec()))
}

/// Reads a persisted object and insists on its kind.
pub fn read_object_file_expecting(path: &Path, kind: FileKind) -> Result<Vec<u8>, WireError> {
    let (found, payload) = read_object_file(path)?;
    if found != kind {
        return Err(WireError::ProtocolMismatch(format!(
            "file holds {found}, expected {kind}"
        )));
    }
    Ok(payload)
}

/// Content-addressed function identifier: digest of the encoded key.
pub fn function_id(ek_payload: &[u8]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(ek_payload);
    hasher.finalize().into()
}

/// Canonical bytes of one object plus a breakdown of where they went.
/// `header_bytes` covers the backend tag and dimension fields; scalar and
/// element bytes are the content the size formulas account for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoded {
    pub bytes: Vec<u8>,
    pub header_bytes: usize,
    pub scalar_bytes: usize,
    pub element_bytes: usize,
}

impl Encoded {
    /// Scalar plus element bytes; excludes self-description.
    pub fn content_bytes(&self) -> usize {
        self.scalar_bytes + self.element_bytes
    }
}

struct PayloadWriter {
    group: Group,
    buf: Vec<u8>,
    header_bytes: usize,
    scalar_bytes: usize,
    element_bytes: usize,
}

impl PayloadWriter {
    fn new(group: Group) -> PayloadWriter {
        let mut w = PayloadWriter {
            group,
            buf: Vec::new(),
            header_bytes: 0,
            scalar_bytes: 0,
            element_bytes: 0,
        };
        w.buf.push(group.backend().id());
        w.header_bytes += 1;
        w
    }

    fn dim(&mut self, n: usize) {
        self.buf.extend_from_slice(&(n as u32).to_be_bytes());
        self.header_bytes += 4;
    }

    fn scalar(&mut self, s: &Scalar) {
        let bytes = self.group.serialize_scalar(s);
        self.scalar_bytes += bytes.len();
        self.buf.extend_from_slice(&bytes);
    }

    fn scalars(&mut self, list: &[Scalar]) {
        for s in list {
            self.scalar(s);
        }
    }

    fn element(&mut self, e: &GroupElement) {
        let bytes = self.group.serialize_element(e);
        self.element_bytes += bytes.len();
        self.buf.extend_from_slice(&bytes);
    }

    fn elements(&mut self, list: &[GroupElement]) {
        for e in list {
            self.element(e);
        }
    }

    fn finish(self) -> Encoded {
        Encoded {
            bytes: self.buf,
            header_bytes: self.header_bytes,
            scalar_bytes: self.scalar_bytes,
            element_bytes: self.element_bytes,
        }
    }
}

struct PayloadReader<'a> {
    group: Group,
    rest: &'a [u8],
}

impl<'a> PayloadReader<'a> {
    fn new(bytes: &'a [u8]) -> Result<PayloadReader<'a>, WireError> {
        let (&id, rest) = bytes.split_first().ok_or(WireError::ShortRead)?;
        let backend = Backend::from_id(id)
            .ok_or_else(|| WireError::ProtocolMismatch(format!("unknown backend id {id}")))?;
        Ok(PayloadReader {
            group: Group::new(backend),
            rest,
        })
    }

    fn group(&self) -> Group {
        self.group
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.rest.len() < n {
            return Err(WireError::ShortRead);
        }
        let (head, tail) = self.rest.split_at(n);
        self.rest = tail;
        Ok(head)
    }

    fn dim(&mut self) -> Result<usize, WireError> {
        let raw = self.take(4)?;
        let n = u32::from_be_bytes([raw[0], raw[1], raw[2], raw[3]]);
        if n == 0 {
            return Err(WireError::ProtocolMismatch("zero dimension".into()));
        }
        Ok(n as usize)
    }

    fn scalar(&mut self) -> Result<Scalar, WireError> {
        let raw = self.take(self.group.scalar_len())?;
        Ok(self.group.deserialize_scalar(raw)?)
    }

    fn scalars(&mut self, n: usize) -> Result<Vec<Scalar>, WireError> {
        (0..n).map(|_| self.scalar()).collect()
    }

    fn element(&mut self) -> Result<GroupElement, WireError> {
        let raw = self.take(self.group.element_len())?;
        Ok(self.group.deserialize_element(raw)?)
    }

    fn elements(&mut self, n: usize) -> Result<Vec<GroupElement>, WireError> {
        (0..n).map(|_| self.element()).collect()
    }

    fn finish(self) -> Result<(), WireError> {
        if self.rest.is_empty() {
            Ok(())
        } else {
            Err(WireError::TrailingBytes)
        }
    }
}

/// Public parameters: generator then the d bases.
pub fn encode_public_params(pk: &PublicParams) -> Encoded {
    let mut w = PayloadWriter::new(*pk.group());
    w.dim(pk.dimension());
    w.element(pk.generator());
    w.elements(pk.bases());
    w.finish()
}

pub fn decode_public_params(bytes: &[u8]) -> Result<PublicParams, WireError> {
    let mut r = PayloadReader::new(bytes)?;
    let group = r.group();
    let d = r.dim()?;
    let generator = r.element()?;
    let bases = r.elements(d)?;
    r.finish()?;
    Ok(PublicParams::new(group, generator, bases)?)
}

/// Evaluation key: m, d, the matrix row-major, then the d tags.
pub fn encode_evaluation_key(group: &Group, ek: &EvaluationKey) -> Encoded {
    let mut w = PayloadWriter::new(*group);
    w.dim(ek.matrix().rows());
    w.dim(ek.matrix().cols());
    w.scalars(ek.matrix().entries());
    w.elements(ek.tags());
    w.finish()
}

pub fn decode_evaluation_key(bytes: &[u8]) -> Result<(Group, EvaluationKey), WireError> {
    let mut r = PayloadReader::new(bytes)?;
    let group = r.group();
    let m = r.dim()?;
    let d = r.dim()?;
    let entries = r.scalars(m.checked_mul(d).ok_or(WireError::ShortRead)?)?;
    let tags = r.elements(d)?;
    r.finish()?;
    let matrix = MatrixF::from_row_major(m, d, entries)?;
    Ok((group, EvaluationKey::new(matrix, tags)?))
}

/// Encoded input: just the vector x; its verification key stays client-side.
pub fn encode_input(group: &Group, x: &[Scalar]) -> Encoded {
    let mut w = PayloadWriter::new(*group);
    w.dim(x.len());
    w.scalars(x);
    w.finish()
}

pub fn decode_input(bytes: &[u8]) -> Result<(Group, Vec<Scalar>), WireError> {
    let mut r = PayloadReader::new(bytes)?;
    let group = r.group();
    let d = r.dim()?;
    let x = r.scalars(d)?;
    r.finish()?;
    Ok((group, x))
}

/// Server response: m result scalars and one proof element.
pub fn encode_response(group: &Group, resp: &ServerResponse) -> Encoded {
    let mut w = PayloadWriter::new(*group);
    w.dim(resp.y().len());
    w.scalars(resp.y());
    w.element(resp.v());
    w.finish()
}

pub fn decode_response(bytes: &[u8]) -> Result<(Group, ServerResponse), WireError> {
    let mut r = PayloadReader::new(bytes)?;
    let group = r.group();
    let m = r.dim()?;
    let y = r.scalars(m)?;
    let v = r.element()?;
    r.finish()?;
    Ok((group, ServerResponse::new(y, v)?))
}

/// Function verification key: k then the m combination scalars. Decoding
/// restores the backend's canonical generator, the only one setup produces.
pub fn encode_function_vk(vk: &FunctionVerificationKey) -> Encoded {
    let mut w = PayloadWriter::new(*vk.group());
    w.dim(vk.r().len());
    w.scalar(vk.k());
    w.scalars(vk.r());
    w.finish()
}

pub fn decode_function_vk(bytes: &[u8]) -> Result<FunctionVerificationKey, WireError> {
    let mut r = PayloadReader::new(bytes)?;
    let group = r.group();
    let m = r.dim()?;
    let k = r.scalar()?;
    let r_vec = r.scalars(m)?;
    r.finish()?;
    Ok(FunctionVerificationKey::new(
        group,
        group.generator(),
        k,
        r_vec,
    )?)
}

/// Input verification key: a single element.
pub fn encode_input_vk(group: &Group, vk_x: &GroupElement) -> Encoded {
    let mut w = PayloadWriter::new(*group);
    w.element(vk_x);
    w.finish()
}

pub fn decode_input_vk(bytes: &[u8]) -> Result<(Group, GroupElement), WireError> {
    let mut r = PayloadReader::new(bytes)?;
    let group = r.group();
    let vk_x = r.element()?;
    r.finish()?;
    Ok((group, vk_x))
}

/// Baseline evaluation key: coefficient vector then tags.
pub fn encode_fg12_evaluation_key(group: &Group, ek: &Fg12EvaluationKey) -> Encoded {
    let mut w = PayloadWriter::new(*group);
    w.dim(ek.f().len());
    w.scalars(ek.f());
    w.elements(ek.tags());
    w.finish()
}

pub fn decode_fg12_evaluation_key(bytes: &[u8]) -> Result<(Group, Fg12EvaluationKey), WireError> {
    let mut r = PayloadReader::new(bytes)?;
    let group = r.group();
    let d = r.dim()?;
    let f = r.scalars(d)?;
    let tags = r.elements(d)?;
    r.finish()?;
    Ok((group, Fg12EvaluationKey::new(f, tags)?))
}

/// Baseline function key: the pair (k, alpha).
pub fn encode_fg12_function_key(key: &Fg12FunctionKey) -> Encoded {
    let mut w = PayloadWriter::new(*key.group());
    w.scalar(key.k());
    w.scalar(key.alpha());
    w.finish()
}

pub fn decode_fg12_function_key(bytes: &[u8]) -> Result<Fg12FunctionKey, WireError> {
    let mut r = PayloadReader::new(bytes)?;
    let group = r.group();
    let k = r.scalar()?;
    let alpha = r.scalar()?;
    r.finish()?;
    Ok(Fg12FunctionKey::new(group, group.generator(), k, alpha))
}

/// Per-object serialized content bytes (scalars and elements only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObjectBytes {
    pub ek_bytes: u64,
    pub enc_bytes: u64,
    pub resp_bytes: u64,
    pub vkf_bytes: u64,
    pub vkx_bytes: u64,
}

/// Closed-form content bytes of one multi-matrix object set: an m-by-d
/// evaluation key, a d-vector input, an m-row response, and the two keys.
pub fn mmvc_object_bytes(m: u64, d: u64, scalar_bits: u64, element_bits: u64) -> ObjectBytes {
    ObjectBytes {
        ek_bytes: (m * d * scalar_bits + d * element_bits) / 8,
        enc_bytes: d * scalar_bits / 8,
        resp_bytes: (m * scalar_bits + element_bits) / 8,
        vkf_bytes: (m + 1) * scalar_bits / 8,
        vkx_bytes: element_bits / 8,
    }
}

/// Closed-form content bytes of one baseline row's object set.
pub fn fg12_object_bytes(d: u64, scalar_bits: u64, element_bits: u64) -> ObjectBytes {
    ObjectBytes {
        ek_bytes: (d * scalar_bits + d * element_bits) / 8,
        enc_bytes: d * scalar_bits / 8,
        resp_bytes: (scalar_bits + element_bits) / 8,
        vkf_bytes: 2 * scalar_bits / 8,
        vkx_bytes: element_bits / 8,
    }
}

/// Measures real multi-matrix encodings for one random instance.
pub fn measure_mmvc_objects(
    backend: Backend,
    m: usize,
    d: usize,
    seed: u64,
) -> Result<ObjectBytes, WireError> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let pk = crate::scheme::setup(&mut rng, backend, d)?;
    let group = *pk.group();
    let f = MatrixF::random(&group, m, d, &mut rng)?;
    let (ek, vk) = crate::scheme::keygen(&mut rng, &pk, f)?;
    let x: Vec<Scalar> = (0..d).map(|_| group.sample_scalar(&mut rng)).collect();
    let enc = crate::scheme::probgen(&pk, &x)?;
    let resp = crate::scheme::compute(&group, &ek, &enc)?;
    Ok(ObjectBytes {
        ek_bytes: encode_evaluation_key(&group, &ek).content_bytes() as u64,
        enc_bytes: encode_input(&group, enc.x()).content_bytes() as u64,
        resp_bytes: encode_response(&group, &resp).content_bytes() as u64,
        vkf_bytes: encode_function_vk(&vk).content_bytes() as u64,
        vkx_bytes: encode_input_vk(&group, enc.vk_x()).content_bytes() as u64,
    })
}

/// Measures real baseline encodings for one random row.
pub fn measure_fg12_objects(backend: Backend, d: usize, seed: u64) -> Result<ObjectBytes, WireError> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let pk = crate::scheme::setup(&mut rng, backend, d)?;
    let group = *pk.group();
    let f: Vec<Scalar> = (0..d).map(|_| group.sample_scalar(&mut rng)).collect();
    let (ek, key) = crate::fg12::fg12_keygen(&mut rng, &pk, &f)?;
    let x: Vec<Scalar> = (0..d).map(|_| group.sample_scalar(&mut rng)).collect();
    let enc = crate::scheme::probgen(&pk, &x)?;
    let (y, v) = crate::fg12::fg12_compute(&group, &ek, &enc)?;
    let resp = ServerResponse::new(vec![y], v)?;
    Ok(ObjectBytes {
        ek_bytes: encode_fg12_evaluation_key(&group, &ek).content_bytes() as u64,
        enc_bytes: encode_input(&group, enc.x()).content_bytes() as u64,
        resp_bytes: encode_response(&group, &resp).content_bytes() as u64,
        vkf_bytes: encode_fg12_function_key(&key).content_bytes() as u64,
        vkx_bytes: encode_input_vk(&group, enc.vk_x()).content_bytes() as u64,
    })
}

/// Closed-form communication and storage totals for a workload of a
/// functions and b inputs, both schemes, at configurable encoding widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeReport {
    pub a: u64,
    pub b: u64,
    pub m: u64,
    pub d: u64,
    pub scalar_bits: u64,
    pub element_bits: u64,
    /// Per-object content bytes for the multi-matrix scheme.
    pub mmvc_object: ObjectBytes,
    /// Per-row content bytes for the baseline.
    pub fg12_object: ObjectBytes,
    /// c1: evaluation keys, encoded inputs, and responses on the wire.
    pub c1_bits: u64,
    /// c2: the baseline's wire total.
    pub c2_bits: u64,
    /// s1: verification keys the client stores.
    pub s1_bits: u64,
    /// s2: the baseline's storage total.
    pub s2_bits: u64,
}

/// Bits to binary megabytes (2^20 bytes).
pub fn bits_to_mib(bits: u64) -> f64 {
    bits as f64 / 8.0 / (1 << 20) as f64
}

/// Bits to binary kilobytes (2^10 bytes).
pub fn bits_to_kib(bits: u64) -> f64 {
    bits as f64 / 8.0 / (1 << 10) as f64
}

/// Rounds to the two decimals used in reports.
pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

impl SizeReport {
    pub fn c1_mib(&self) -> f64 {
        round2(bits_to_mib(self.c1_bits))
    }

    pub fn c2_mib(&self) -> f64 {
        round2(bits_to_mib(self.c2_bits))
    }

    pub fn s1_kib(&self) -> f64 {
        round2(bits_to_kib(self.s1_bits))
    }

    pub fn s2_kib(&self) -> f64 {
        round2(bits_to_kib(self.s2_bits))
    }
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "sizes at a={} b={} m={} d={} (l_p={} bits, l_G={} bits)",
            self.a, self.b, self.m, self.d, self.scalar_bits, self.element_bits
        )?;
        writeln!(
            f,
            "  communication: ours {:.2} MB, baseline {:.2} MB",
            bits_to_mib(self.c1_bits),
            bits_to_mib(self.c2_bits)
        )?;
        write!(
            f,
            "  storage:       ours {:.2} KB, baseline {:.2} KB",
            bits_to_kib(self.s1_bits),
            bits_to_kib(self.s2_bits)
        )
    }
}

/// Evaluates the closed-form size model. MB and KB are binary units
/// (2^20 and 2^10 bytes); the published reference figures only reconcile
/// with the formulas under binary units.
pub fn size_report(a: u64, b: u64, m: u64, d: u64, scalar_bits: u64, element_bits: u64) -> SizeReport {
    let lp = scalar_bits;
    let lg = element_bits;
    SizeReport {
        a,
        b,
        m,
        d,
        scalar_bits,
        element_bits,
        mmvc_object: mmvc_object_bytes(m, d, lp, lg),
        fg12_object: fg12_object_bytes(d, lp, lg),
        c1_bits: (a * m * d + b * d + a * b * m) * lp + (a * d + a * b) * lg,
        c2_bits: (a * m * d + b * d + a * b * m) * lp + (a * m * d + a * m * b) * lg,
        s1_bits: a * (m + 1) * lp + b * lg,
        s2_bits: 2 * a * m * lp + b * lg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fg12::fg12_keygen;
    use crate::scheme::{compute, keygen, probgen, setup};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    const BOTH: [Backend; 2] = [Backend::Production, Backend::Toy];

    #[test]
    fn every_object_round_trips_on_both_backends() {
        // 125 seeds x 8 objects = 1000 round-trips.
        for seed in 0..125u64 {
            let backend = BOTH[(seed % 2) as usize];
            let mut r = rng(seed);
            let m = 1 + (seed as usize % 3);
            let d = 1 + (seed as usize % 4);
            let pk = setup(&mut r, backend, d).unwrap();
            let group = *pk.group();
            let f = MatrixF::random(&group, m, d, &mut r).unwrap();
            let (ek, vk) = keygen(&mut r, &pk, f).unwrap();
            let x: Vec<Scalar> = (0..d).map(|_| group.sample_scalar(&mut r)).collect();
            let enc = probgen(&pk, &x).unwrap();
            let resp = compute(&group, &ek, &enc).unwrap();
            let fvec: Vec<Scalar> = (0..d).map(|_| group.sample_scalar(&mut r)).collect();
            let (fg_ek, fg_key) = fg12_keygen(&mut r, &pk, &fvec).unwrap();

            assert_eq!(
                decode_public_params(&encode_public_params(&pk).bytes).unwrap(),
                pk
            );
            let (g2, ek2) = decode_evaluation_key(&encode_evaluation_key(&group, &ek).bytes).unwrap();
            assert_eq!((g2, &ek2), (group, &ek));
            let (_, x2) = decode_input(&encode_input(&group, &x).bytes).unwrap();
            assert_eq!(x2, x);
            let (_, resp2) = decode_response(&encode_response(&group, &resp).bytes).unwrap();
            assert_eq!(resp2, resp);
            assert_eq!(
                decode_function_vk(&encode_function_vk(&vk).bytes).unwrap(),
                vk
            );
            let (_, vkx2) = decode_input_vk(&encode_input_vk(&group, enc.vk_x()).bytes).unwrap();
            assert_eq!(&vkx2, enc.vk_x());
            let (_, fg_ek2) =
                decode_fg12_evaluation_key(&encode_fg12_evaluation_key(&group, &fg_ek).bytes)
                    .unwrap();
            assert_eq!(fg_ek2, fg_ek);
            assert_eq!(
                decode_fg12_function_key(&encode_fg12_function_key(&fg_key).bytes).unwrap(),
                fg_key
            );
        }
    }

    #[test]
    fn payload_composition_matches_the_element_counts() {
        let mut r = rng(60);
        let pk = setup(&mut r, Backend::Toy, 3).unwrap();
        let group = *pk.group();
        let f = MatrixF::random(&group, 2, 3, &mut r).unwrap();
        let (ek, _) = keygen(&mut r, &pk, f).unwrap();
        let enc = encode_evaluation_key(&group, &ek);
        // m=2, d=3: six scalars and three elements of content.
        assert_eq!(enc.scalar_bytes / group.scalar_len(), 6);
        assert_eq!(enc.element_bytes / group.element_len(), 3);
        assert_eq!(enc.header_bytes, 1 + 4 + 4);
        assert_eq!(
            enc.bytes.len(),
            enc.header_bytes + enc.scalar_bytes + enc.element_bytes
        );

        let f4 = MatrixF::random(&group, 4, 3, &mut r).unwrap();
        let (ek4, _) = keygen(&mut r, &pk, f4).unwrap();
        let x: Vec<Scalar> = (0..3).map(|_| group.sample_scalar(&mut r)).collect();
        let resp = crate::scheme::compute_on_input(&group, &ek4, &x).unwrap();
        let enc_resp = encode_response(&group, &resp);
        // m=4 response: four scalars, one element.
        assert_eq!(enc_resp.scalar_bytes / group.scalar_len(), 4);
        assert_eq!(enc_resp.element_bytes / group.element_len(), 1);
    }

    #[test]
    fn decoding_rejects_truncation_corruption_and_trailing_bytes() {
        let mut r = rng(61);
        let pk = setup(&mut r, Backend::Toy, 2).unwrap();
        let group = *pk.group();
        let f = MatrixF::random(&group, 2, 2, &mut r).unwrap();
        let (ek, _) = keygen(&mut r, &pk, f).unwrap();
        let good = encode_evaluation_key(&group, &ek).bytes;

        assert!(matches!(
            decode_evaluation_key(&[]),
            Err(WireError::ShortRead)
        ));
        assert!(matches!(
            decode_evaluation_key(&good[..good.len() - 1]),
            Err(WireError::ShortRead)
        ));
        let mut trailing = good.clone();
        trailing.push(0);
        assert!(matches!(
            decode_evaluation_key(&trailing),
            Err(WireError::TrailingBytes)
        ));
        // Corrupt the last element to 3, a non-member of the subgroup.
        let mut corrupt = good.clone();
        let n = corrupt.len();
        corrupt[n - 2] = 0;
        corrupt[n - 1] = 3;
        assert!(matches!(
            decode_evaluation_key(&corrupt),
            Err(WireError::InvalidElement)
        ));
        // Unknown backend id.
        let mut bad_backend = good;
        bad_backend[0] = 9;
        assert!(matches!(
            decode_evaluation_key(&bad_backend),
            Err(WireError::ProtocolMismatch(_))
        ));
    }

    #[test]
    fn frames_round_trip_and_validate() {
        let frame = Frame::new(MsgType::Ekf, vec![1, 2, 3]);
        let mut buf = Vec::new();
        write_frame(&mut buf, &frame).unwrap();
        assert_eq!(read_frame(&mut buf.as_slice()).unwrap(), frame);

        // Bad magic.
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_frame(&mut bad.as_slice()),
            Err(WireError::ProtocolMismatch(_))
        ));
        // Bad version.
        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(matches!(
            read_frame(&mut bad.as_slice()),
            Err(WireError::ProtocolMismatch(_))
        ));
        // Unknown type.
        let mut bad = buf.clone();
        bad[5] = 77;
        assert!(matches!(
            read_frame(&mut bad.as_slice()),
            Err(WireError::UnknownMsgType(77))
        ));
        // Truncated payload.
        let short = &buf[..buf.len() - 1];
        assert!(matches!(
            read_frame(&mut &short[..]),
            Err(WireError::ShortRead)
        ));
        // Empty stream.
        assert!(matches!(
            read_frame(&mut &[][..]),
            Err(WireError::ShortRead)
        ));
        // Oversized declared length.
        let mut oversized = Vec::new();
        oversized.extend_from_slice(&MAGIC);
        oversized.push(VERSION);
        oversized.push(MsgType::Pk as u8);
        oversized.extend_from_slice(&u32::MAX.to_be_bytes());
        assert!(matches!(
            read_frame(&mut oversized.as_slice()),
            Err(WireError::ProtocolMismatch(_))
        ));
    }

    #[test]
    fn object_files_round_trip_and_check_kind() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vk.bin");
        write_object_file(&path, FileKind::FunctionVk, &[9, 9, 9]).unwrap();
        let (kind, payload) = read_object_file(&path).unwrap();
        assert_eq!(kind, FileKind::FunctionVk);
        assert_eq!(payload, vec![9, 9, 9]);
        assert!(matches!(
            read_object_file_expecting(&path, FileKind::PublicParams),
            Err(WireError::ProtocolMismatch(_))
        ));
        std::fs::write(&path, b"short").unwrap();
        assert!(matches!(read_object_file(&path), Err(WireError::ShortRead)));
    }

    #[test]
    fn function_ids_are_stable_and_content_sensitive() {
        let id1 = function_id(&[1, 2, 3]);
        let id2 = function_id(&[1, 2, 3]);
        let id3 = function_id(&[1, 2, 4]);
        assert_eq!(id1, id2);
        assert_ne!(id1, id3);
    }

    #[test]
    fn measured_sizes_equal_the_formulas_for_backend_widths() {
        for backend in BOTH {
            let group = Group::new(backend);
            let (lp, lg) = (group.scalar_bits(), group.element_bits());
            for (m, d) in [(1, 1), (2, 3), (5, 4)] {
                let measured = measure_mmvc_objects(backend, m, d, 70).unwrap();
                let formula = mmvc_object_bytes(m as u64, d as u64, lp, lg);
                assert_eq!(measured, formula, "{backend} mmvc m={m} d={d}");
                let measured = measure_fg12_objects(backend, d, 71).unwrap();
                let formula = fg12_object_bytes(d as u64, lp, lg);
                assert_eq!(measured, formula, "{backend} fg12 d={d}");
            }
        }
    }

    #[test]
    fn aggregate_totals_decompose_into_object_multiples() {
        let (a, b, m, d) = (3u64, 2, 5, 4);
        let report = size_report(a, b, m, d, 8, 16);
        let ours = report.mmvc_object;
        let base = report.fg12_object;
        assert_eq!(
            report.c1_bits,
            8 * (a * ours.ek_bytes + b * ours.enc_bytes + a * b * ours.resp_bytes)
        );
        assert_eq!(
            report.s1_bits,
            8 * (a * ours.vkf_bytes + b * ours.vkx_bytes)
        );
        assert_eq!(
            report.c2_bits,
            8 * (a * m * base.ek_bytes + b * base.enc_bytes + a * b * m * base.resp_bytes)
        );
        assert_eq!(
            report.s2_bits,
            8 * (a * m * base.vkf_bytes + b * base.vkx_bytes)
        );
    }

    #[test]
    fn schemes_coincide_in_size_at_one_row() {
        let report = size_report(4, 7, 1, 9, 2304, 832);
        assert_eq!(report.c1_bits, report.c2_bits);
        assert_eq!(report.s1_bits, report.s2_bits);
        // s2 - s1 = a(m-1) lp for any m
        for m in [2, 5, 200] {
            let r = size_report(4, 7, m, 9, 2304, 832);
            assert_eq!(r.s2_bits - r.s1_bits, 4 * (m - 1) * 2304);
        }
    }

    #[test]
    fn size_report_matches_published_reference_values() {
        let report = size_report(20, 20, 200, 20, 2304, 832);
        assert!((report.c1_mib() - 44.13).abs() <= 0.01 + 1e-9);
        assert!((report.c2_mib() - 59.92).abs() <= 0.01 + 1e-9);
        assert!((report.s1_kib() - 1132.67).abs() <= 0.01 + 1e-9);
        assert!((report.s2_kib() - 2252.03).abs() <= 0.01 + 1e-9);
    }

    proptest! {
        #[test]
        fn arbitrary_frames_round_trip(payload in proptest::collection::vec(any::<u8>(), 0..512)) {
            let frame = Frame::new(MsgType::Resp, payload);
            let mut buf = Vec::new();
            write_frame(&mut buf, &frame).unwrap();
            prop_assert_eq!(read_frame(&mut buf.as_slice()).unwrap(), frame);
        }
    }
}
