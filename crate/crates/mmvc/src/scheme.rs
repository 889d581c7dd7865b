//! Verifiable outsourcing of matrix-vector products.
//!
//! The client delegates y = F x for an m-by-d matrix F over Z_p. KeyGen folds
//! the m rows of F into one combined row s = rF under a secret random r and
//! publishes tags W_j = g^{s_j} * R_j^k alongside F. The server returns
//! y = Fx with a proof V = prod_j W_j^{x_j}; the client accepts iff
//! V = g^{r.y} * (VK_x)^k, which costs O(m + d) instead of the O(md) direct
//! evaluation. Acceptance of an honest response is an identity:
//! r.(Fx) = (rF).x by associativity.
//!
//! KeyGen is the only algorithm that sees r, and s never leaves it:
//! publishing s would reveal a linear relation on the rows of F under r.
//! [`CombinedRow`] exists so tests can exercise the fold directly.

use crate::algebra::{AlgebraError, Backend, Group, GroupElement, Scalar};
use rand::{CryptoRng, RngCore};
use thiserror::Error;

/// Errors raised by scheme algorithms before any arithmetic happens.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("empty dimension")]
    EmptyDimension,
    #[error("d mismatch: {left} vs {right}")]
    DMismatch { left: usize, right: usize },
    #[error("m mismatch: {left} vs {right}")]
    MMismatch { left: usize, right: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix needs at least one row and rectangular rows")]
    MalformedMatrix,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Dense m-by-d matrix over Z_p, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixF {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl MatrixF {
    /// Builds from explicit rows; every row must have the same positive width.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, SchemeError> {
        let m = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if m == 0 || d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(SchemeError::MalformedMatrix);
        }
        Ok(MatrixF {
            rows: m,
            cols: d,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds from a row-major entry buffer of exactly `rows * cols` scalars.
    pub fn from_row_major(
        rows: usize,
        cols: usize,
        entries: Vec<Scalar>,
    ) -> Result<Self, SchemeError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(SchemeError::MalformedMatrix);
        }
        Ok(MatrixF {
            rows,
            cols,
            entries,
        })
    }

    /// Uniform random matrix; draws `rows * cols` scalars from `rng`.
    pub fn random<R: RngCore + CryptoRng>(
        group: &Group,
        rows: usize,
        cols: usize,
        rng: &mut R,
    ) -> Result<Self, SchemeError> {
        if rows == 0 || cols == 0 {
            return Err(SchemeError::MalformedMatrix);
        }
        let entries = (0..rows * cols).map(|_| group.sample_scalar(rng)).collect();
        Ok(MatrixF {
            rows,
            cols,
            entries,
        })
    }

    /// Number of rows m.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns d.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// y = F x. Counts d mul_p and d-1 add_p per row.
    pub fn mul_vec(&self, group: &Group, x: &[Scalar]) -> Result<Vec<Scalar>, SchemeError> {
        if x.len() != self.cols {
            return Err(SchemeError::DMismatch {
                left: self.cols,
                right: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let mut acc = group.scalar_mul(&row[0], &x[0]);
                for j in 1..self.cols {
                    acc = group.scalar_add(&acc, &group.scalar_mul(&row[j], &x[j]));
                }
                acc
            })
            .collect())
    }
}

/// Public parameters: the group, a generator, and d public bases.
///
/// Setup keeps no secret: anyone holding these can run KeyGen and ProbGen,
/// so delegation is public while verification stays private to (k, r).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicParams {
    group: Group,
    generator: GroupElement,
    bases: Vec<GroupElement>,
}

impl PublicParams {
    /// Assembles parameters, enforcing a nonempty base list and a
    /// non-identity generator.
    pub fn new(
        group: Group,
        generator: GroupElement,
        bases: Vec<GroupElement>,
    ) -> Result<Self, SchemeError> {
        if bases.is_empty() {
            return Err(SchemeError::EmptyDimension);
        }
        if generator == group.identity() {
            return Err(SchemeError::Shape("generator is the identity".into()));
        }
        Ok(PublicParams {
            group,
            generator,
            bases,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn generator(&self) -> &GroupElement {
        &self.generator
    }

    pub fn bases(&self) -> &[GroupElement] {
        &self.bases
    }

    /// The dimension d.
    pub fn dimension(&self) -> usize {
        self.bases.len()
    }
}

/// Public evaluation key handed to the server: the matrix and its tag vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationKey {
    matrix: MatrixF,
    tags: Vec<GroupElement>,
}

impl EvaluationKey {
    pub fn new(matrix: MatrixF, tags: Vec<GroupElement>) -> Result<Self, SchemeError> {
        if tags.len() != matrix.cols() {
            return Err(SchemeError::DMismatch {
                left: matrix.cols(),
                right: tags.len(),
            });
        }
        Ok(EvaluationKey { matrix, tags })
    }

    pub fn matrix(&self) -> &MatrixF {
        &self.matrix
    }

    pub fn tags(&self) -> &[GroupElement] {
        &self.tags
    }
}

/// Private verification key (k, r); never sent to the server.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionVerificationKey {
    group: Group,
    generator: GroupElement,
    k: Scalar,
    r: Vec<Scalar>,
}

impl FunctionVerificationKey {
    pub fn new(
        group: Group,
        generator: GroupElement,
        k: Scalar,
        r: Vec<Scalar>,
    ) -> Result<Self, SchemeError> {
        if r.is_empty() {
            return Err(SchemeError::EmptyDimension);
        }
        Ok(FunctionVerificationKey {
            group,
            generator,
            k,
            r,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn generator(&self) -> &GroupElement {
        &self.generator
    }

    pub fn k(&self) -> &Scalar {
        &self.k
    }

    pub fn r(&self) -> &[Scalar] {
        &self.r
    }
}

/// The combined row s = rF. Transient: consumed by KeyGen and test oracles,
/// never serialized, because s leaks a linear relation on F under r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedRow {
    s: Vec<Scalar>,
}

impl CombinedRow {
    pub fn s(&self) -> &[Scalar] {
        &self.s
    }
}

/// Encoded input: the vector x itself plus the input verification key
/// VK_x = prod_j R_j^{x_j}. Only x travels to the server.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputEncoding {
    x: Vec<Scalar>,
    vk_x: GroupElement,
}

impl InputEncoding {
    pub fn new(x: Vec<Scalar>, vk_x: GroupElement) -> Result<Self, SchemeError> {
        if x.is_empty() {
            return Err(SchemeError::EmptyDimension);
        }
        Ok(InputEncoding { x, vk_x })
    }

    pub fn x(&self) -> &[Scalar] {
        &self.x
    }

    pub fn vk_x(&self) -> &GroupElement {
        &self.vk_x
    }
}

/// Server's claimed result y = Fx with proof V = prod_j W_j^{x_j}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerResponse {
    y: Vec<Scalar>,
    v: GroupElement,
}

impl ServerResponse {
    pub fn new(y: Vec<Scalar>, v: GroupElement) -> Result<Self, SchemeError> {
        if y.is_empty() {
            return Err(SchemeError::EmptyDimension);
        }
        Ok(ServerResponse { y, v })
    }

    pub fn y(&self) -> &[Scalar] {
        &self.y
    }

    pub fn v(&self) -> &GroupElement {
        &self.v
    }
}

/// Draws the d public bases. The backend fixes the security level; the
/// generator is the backend's canonical one, so setup costs exactly d
/// random draws and no group operation.
pub fn setup<R: RngCore + CryptoRng>(
    rng: &mut R,
    backend: Backend,
    d: usize,
) -> Result<PublicParams, SchemeError> {
    if d == 0 {
        return Err(SchemeError::EmptyDimension);
    }
    let group = Group::new(backend);
    let bases = (0..d).map(|_| group.sample_element(rng)).collect();
    PublicParams::new(group, group.generator(), bases)
}

/// s = rF: s_j = sum_i r_i F_{i,j}. Counts md mul_p and (m-1)d add_p.
pub fn combine_rows(
    group: &Group,
    r: &[Scalar],
    f: &MatrixF,
) -> Result<CombinedRow, SchemeError> {
    if r.len() != f.rows() {
        return Err(SchemeError::MMismatch {
            left: f.rows(),
            right: r.len(),
        });
    }
    let s = (0..f.cols())
        .map(|j| {
            let mut acc = group.scalar_mul(&r[0], f.entry(0, j));
            for (i, ri) in r.iter().enumerate().skip(1) {
                acc = group.scalar_add(&acc, &group.scalar_mul(ri, f.entry(i, j)));
            }
            acc
        })
        .collect();
    Ok(CombinedRow { s })
}

/// Draws (k, r), folds the rows, and tags every column:
/// W_j = g^{s_j} * R_j^k. Per call: m+1 rng, (m-1)d add_p, md mul_p,
/// d mul_G, 2d exp_G.
pub fn keygen<R: RngCore + CryptoRng>(
    rng: &mut R,
    pk: &PublicParams,
    f: MatrixF,
) -> Result<(EvaluationKey, FunctionVerificationKey), SchemeError> {
    if f.cols() != pk.dimension() {
        return Err(SchemeError::DMismatch {
            left: pk.dimension(),
            right: f.cols(),
        });
    }
    let group = pk.group();
    let k = group.sample_scalar(rng);
    let r: Vec<Scalar> = (0..f.rows()).map(|_| group.sample_scalar(rng)).collect();
    keygen_from_parts(pk, f, k, r)
}

/// Deterministic tail of [`keygen`] for callers that fix (k, r) themselves,
/// e.g. cross-scheme equality tests.
pub fn keygen_from_parts(
    pk: &PublicParams,
    f: MatrixF,
    k: Scalar,
    r: Vec<Scalar>,
) -> Result<(EvaluationKey, FunctionVerificationKey), SchemeError> {
    if f.cols() != pk.dimension() {
        return Err(SchemeError::DMismatch {
            left: pk.dimension(),
            right: f.cols(),
        });
    }
    if r.len() != f.rows() {
        return Err(SchemeError::MMismatch {
            left: f.rows(),
            right: r.len(),
        });
    }
    let group = pk.group();
    let s = combine_rows(group, &r, &f)?;
    let tags = s
        .s()
        .iter()
        .zip(pk.bases())
        .map(|(sj, rj)| group.mul(&group.exp(pk.generator(), sj), &group.exp(rj, &k)))
        .collect();
    let ek = EvaluationKey::new(f, tags)?;
    let vk = FunctionVerificationKey::new(*group, *pk.generator(), k, r)?;
    Ok((ek, vk))
}

/// Encodes an input for any function of matching width:
/// VK_x = prod_j R_j^{x_j}. Counts d exp_G and d-1 mul_G. Function-independent
/// by construction, which is what lets one encoding serve many functions.
pub fn probgen(pk: &PublicParams, x: &[Scalar]) -> Result<InputEncoding, SchemeError> {
    if x.len() != pk.dimension() {
        return Err(SchemeError::DMismatch {
            left: pk.dimension(),
            right: x.len(),
        });
    }
    let vk_x = pk.group().multi_exp(pk.bases(), x)?;
    InputEncoding::new(x.to_vec(), vk_x)
}

/// Server side on the raw input vector: y = Fx and V = prod_j W_j^{x_j}.
/// Counts m(d-1) add_p, md mul_p, d-1 mul_G, d exp_G. Public data only.
pub fn compute_on_input(
    group: &Group,
    ek: &EvaluationKey,
    x: &[Scalar],
) -> Result<ServerResponse, SchemeError> {
    if x.len() != ek.matrix().cols() {
        return Err(SchemeError::DMismatch {
            left: ek.matrix().cols(),
            right: x.len(),
        });
    }
    let y = ek.matrix().mul_vec(group, x)?;
    let v = group.multi_exp(ek.tags(), x)?;
    ServerResponse::new(y, v)
}

/// Server side on an encoded input; reads only the x component.
pub fn compute(
    group: &Group,
    ek: &EvaluationKey,
    enc: &InputEncoding,
) -> Result<ServerResponse, SchemeError> {
    compute_on_input(group, ek, enc.x())
}

/// Accepts iff V = g^{r.y} * (VK_x)^k, returning y on acceptance and None
/// on rejection. Reduces r.y in the field first, so the cost is m mul_p,
/// m-1 add_p, 2 exp_G, 1 mul_G however large m grows.
pub fn verify(
    vk_f: &FunctionVerificationKey,
    vk_x: &GroupElement,
    resp: &ServerResponse,
) -> Result<Option<Vec<Scalar>>, SchemeError> {
    let r = vk_f.r();
    if resp.y().len() != r.len() {
        return Err(SchemeError::Shape(format!(
            "response has {} rows, key expects {}",
            resp.y().len(),
            r.len()
        )));
    }
    let group = vk_f.group();
    let y = resp.y();
    let mut ry = group.scalar_mul(&r[0], &y[0]);
    for i in 1..r.len() {
        ry = group.scalar_add(&ry, &group.scalar_mul(&r[i], &y[i]));
    }
    let expected = group.mul(
        &group.exp(vk_f.generator(), &ry),
        &group.exp(vk_x, vk_f.k()),
    );
    if expected == *resp.v() {
        Ok(Some(resp.y().to_vec()))
    } else {
        Ok(None)
    }
}
