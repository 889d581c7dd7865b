//! Verifiable computation of matrix-vector products over prime-order groups.
//!
//! A client outsources products y = F x to an untrusted server and checks
//! each answer against a short algebraic proof in time O(m + d), sublinear
//! in the md cost of recomputing. The library provides:
//!
//! - [`algebra`]: two group backends (Ristretto, and an order-101 toy group
//!   for exhaustive tests) behind one interface, with an operation-counting
//!   layer that implements the abstract cost model used by the benchmarks.
//! - [`scheme`]: the multi-matrix scheme, which batches all m rows of a
//!   matrix into one verification equation via a secret row combination.
//! - [`fg12`]: the single-row baseline it generalizes, run per row; every
//!   benchmark compares against it.
//! - [`security`]: an executable forgery experiment with pluggable adversary
//!   strategies and Monte Carlo success-rate measurement, including the
//!   random-tag variant whose forgery probability is exactly information
//!   theoretic.
//! - [`wire`]: canonical serialization, a framed TCP protocol separating the
//!   client and server roles, and byte-exact size accounting.
//! - [`bench`]: workload driver asserting measured operation counts against
//!   the closed-form cost model and producing timing/size CSV series.

pub mod algebra;
pub mod bench;
pub mod cli;
pub mod fg12;
pub mod scheme;
pub mod security;
pub mod wire;
