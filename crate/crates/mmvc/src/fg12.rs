//! Single-row baseline: verifiable inner products, applied row by row.
//!
//! One key pair (k, alpha) covers a single linear function f in Z_p^d, with
//! tags W_j = g^{alpha f_j} * R_j^k and check V = g^{alpha y} * (VK_x)^k.
//! Delegating an m-row matrix means m independent runs, so every per-row
//! cost scales by m; that multiplication is exactly what the multi-matrix
//! scheme removes. Input encodings are shared with the multi-matrix scheme,
//! since ProbGen is identical in both.
//!
//! With m = 1 the two schemes coincide under alpha = r_1: same tag vector,
//! same proof, same verdicts.

use crate::algebra::{counter_scope, Group, GroupElement, OpCounters, Scalar};
use crate::scheme::{InputEncoding, MatrixF, PublicParams, SchemeError};
use rand::{CryptoRng, RngCore};

/// Private per-row key (k, alpha).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fg12FunctionKey {
    group: Group,
    generator: GroupElement,
    k: Scalar,
    alpha: Scalar,
}

impl Fg12FunctionKey {
    pub fn new(group: Group, generator: GroupElement, k: Scalar, alpha: Scalar) -> Self {
        Fg12FunctionKey {
            group,
            generator,
            k,
            alpha,
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn k(&self) -> &Scalar {
        &self.k
    }

    pub fn alpha(&self) -> &Scalar {
        &self.alpha
    }
}

/// Public per-row evaluation key: the coefficient vector and its tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fg12EvaluationKey {
    f: Vec<Scalar>,
    tags: Vec<GroupElement>,
}

impl Fg12EvaluationKey {
    pub fn new(f: Vec<Scalar>, tags: Vec<GroupElement>) -> Result<Self, SchemeError> {
        if f.is_empty() {
            return Err(SchemeError::EmptyDimension);
        }
        if tags.len() != f.len() {
            return Err(SchemeError::DMismatch {
                left: f.len(),
                right: tags.len(),
            });
        }
        Ok(Fg12EvaluationKey { f, tags })
    }

    pub fn f(&self) -> &[Scalar] {
        &self.f
    }

    pub fn tags(&self) -> &[GroupElement] {
        &self.tags
    }
}

/// Draws (k, alpha) and tags one coefficient vector: W_j = g^{alpha f_j} * R_j^k.
/// Per call: 2 rng, d mul_p, d mul_G, 2d exp_G, no field additions.
///
/// k is drawn before alpha, mirroring the multi-matrix KeyGen's k-then-r
/// order, so equal seeds give equal k and alpha = r_1.
pub fn fg12_keygen<R: RngCore + CryptoRng>(
    rng: &mut R,
    pk: &PublicParams,
    f: &[Scalar],
) -> Result<(Fg12EvaluationKey, Fg12FunctionKey), SchemeError> {
    if f.len() != pk.dimension() {
        return Err(SchemeError::DMismatch {
            left: pk.dimension(),
            right: f.len(),
        });
    }
    let group = pk.group();
    let k = group.sample_scalar(rng);
    let alpha = group.sample_scalar(rng);
    fg12_keygen_from_parts(pk, f, k, alpha)
}

/// Deterministic tail of [`fg12_keygen`] with (k, alpha) fixed by the caller.
pub fn fg12_keygen_from_parts(
    pk: &PublicParams,
    f: &[Scalar],
    k: Scalar,
    alpha: Scalar,
) -> Result<(Fg12EvaluationKey, Fg12FunctionKey), SchemeError> {
    if f.len() != pk.dimension() {
        return Err(SchemeError::DMismatch {
            left: pk.dimension(),
            right: f.len(),
        });
    }
    let group = pk.group();
    let tags = f
        .iter()
        .zip(pk.bases())
        .map(|(fj, rj)| {
            let exponent = group.scalar_mul(&alpha, fj);
            group.mul(&group.exp(pk.generator(), &exponent), &group.exp(rj, &k))
        })
        .collect();
    let ek = Fg12EvaluationKey::new(f.to_vec(), tags)?;
    let key = Fg12FunctionKey::new(*group, *pk.generator(), k, alpha);
    Ok((ek, key))
}

/// Server side on the raw input: y = sum_j f_j x_j and V = prod_j W_j^{x_j}.
/// Counts d mul_p, d-1 add_p, d exp_G, d-1 mul_G.
pub fn fg12_compute_on_input(
    group: &Group,
    ek: &Fg12EvaluationKey,
    x: &[Scalar],
) -> Result<(Scalar, GroupElement), SchemeError> {
    if x.len() != ek.f().len() {
        return Err(SchemeError::DMismatch {
            left: ek.f().len(),
            right: x.len(),
        });
    }
    let f = ek.f();
    let mut y = group.scalar_mul(&f[0], &x[0]);
    for j in 1..f.len() {
        y = group.scalar_add(&y, &group.scalar_mul(&f[j], &x[j]));
    }
    let v = group.multi_exp(ek.tags(), x)?;
    Ok((y, v))
}

/// Server side on an encoded input; reads only the x component.
pub fn fg12_compute(
    group: &Group,
    ek: &Fg12EvaluationKey,
    enc: &InputEncoding,
) -> Result<(Scalar, GroupElement), SchemeError> {
    fg12_compute_on_input(group, ek, enc.x())
}

/// Accepts iff V = g^{alpha y} * (VK_x)^k, returning y on acceptance.
/// Counts 1 mul_p, 1 mul_G, 2 exp_G.
pub fn fg12_verify(
    vk: &Fg12FunctionKey,
    vk_x: &GroupElement,
    y: &Scalar,
    v: &GroupElement,
) -> Option<Scalar> {
    let group = vk.group();
    let exponent = group.scalar_mul(vk.alpha(), y);
    let expected = group.mul(
        &group.exp(&vk.generator, &exponent),
        &group.exp(vk_x, vk.k()),
    );
    if expected == *v {
        Some(*y)
    } else {
        None
    }
}

/// One delegated row: result, proof, and the client's verdict on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fg12RowResult {
    pub y: Scalar,
    pub v: GroupElement,
    pub verdict: Option<Scalar>,
}

/// Full baseline run over a matrix with per-phase operation counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fg12MatrixOutcome {
    pub rows: Vec<Fg12RowResult>,
    pub keygen_counts: OpCounters,
    pub probgen_counts: OpCounters,
    pub compute_counts: OpCounters,
    pub verify_counts: OpCounters,
}

impl Fg12MatrixOutcome {
    /// True when every row verified.
    pub fn all_accepted(&self) -> bool {
        self.rows.iter().all(|row| row.verdict.is_some())
    }
}

/// Delegates an m-row matrix the baseline way: one input encoding, then an
/// independent keygen/compute/verify per row. The per-phase counters are the
/// baseline's whole cost story: keygen and compute repeat per row, so their
/// totals carry the factor m that the multi-matrix scheme folds away.
pub fn fg12_matrix_compute<R: RngCore + CryptoRng>(
    rng: &mut R,
    pk: &PublicParams,
    f: &MatrixF,
    x: &[Scalar],
) -> Result<Fg12MatrixOutcome, SchemeError> {
    if f.cols() != pk.dimension() {
        return Err(SchemeError::DMismatch {
            left: pk.dimension(),
            right: f.cols(),
        });
    }
    let group = *pk.group();

    let (keys, keygen_counts) = counter_scope("fg12 keygen", || {
        (0..f.rows())
            .map(|i| fg12_keygen(rng, pk, f.row(i)))
            .collect::<Result<Vec<_>, _>>()
    });
    let keys = keys?;

    let (enc, probgen_counts) = counter_scope("fg12 probgen", || crate::scheme::probgen(pk, x));
    let enc = enc?;

    let (results, compute_counts) = counter_scope("fg12 compute", || {
        keys.iter()
            .map(|(ek, _)| fg12_compute(&group, ek, &enc))
            .collect::<Result<Vec<_>, _>>()
    });
    let results = results?;

    let (rows, verify_counts) = counter_scope("fg12 verify", || {
        keys.iter()
            .zip(results)
            .map(|((_, key), (y, v))| Fg12RowResult {
                y,
                v,
                verdict: fg12_verify(key, enc.vk_x(), &y, &v),
            })
            .collect::<Vec<_>>()
    });

    Ok(Fg12MatrixOutcome {
        rows,
        keygen_counts,
        probgen_counts,
        compute_counts,
        verify_counts,
    })
}
