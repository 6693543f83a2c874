//! Simulation, maximum pseudo-likelihood (MPL) estimation and estimability
//! thresholds for p-tensor Ising models.
//!
//! The model on `{-1,+1}^N` has density proportional to `exp(beta * H_N(x))`
//! where `H_N(x) = sum J_{i1..ip} x_{i1}..x_{ip}` over all ordered index
//! tuples. Tensors are stored as canonical hyperedges (strictly increasing
//! index tuples) with the `p!` multiplicity applied during evaluation, plus an
//! analytic Curie-Weiss path that keeps the diagonal tuples.
//!
//! Module map:
//!
//! * [`tensor`], [`spin`], [`linalg`]: tensors, configurations, Hamiltonian,
//!   local fields, local interaction and co-degree matrices.
//! * [`models`]: seeded generators for Curie-Weiss, p-spin SK, Erdős–Rényi,
//!   p-partite and block hypergraph models.
//! * [`sampler`]: Glauber dynamics, exact Curie-Weiss and enumeration samplers.
//! * [`mple`]: the MPL estimator, its score, and Curie-Weiss intervals.
//! * [`landscape`]: mean-field free energy, thresholds, mixture weights.
//! * [`oracle`]: exact enumeration references.
//! * [`experiments`]: manifest-driven Monte Carlo studies.
//! * [`io`]: text formats for tensors, samples and manifests.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combinatorics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod landscape;
pub mod linalg;
pub mod models;
pub mod mple;
pub mod oracle;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod spin;
pub mod stats;
pub mod tensor;

pub use error::{Error, Result};
pub use models::{BlockStructure, Family, ModelSpec};
pub use mple::{mple, MplResult};
pub use spin::SpinConfig;
pub use tensor::InteractionTensor;
