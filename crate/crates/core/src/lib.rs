//! Exact factorization of linear endomorphisms of `M_n(K)` into compositions
//! of Jordan multiplication operators `L_A : X -> (AX + XA) / 2`.
//!
//! `K` is either the rationals or a prime field of odd characteristic.

#![no_std]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod factor;
pub mod field;
pub mod jordan;
pub mod linalg;
mod qeval;
pub mod rational;
pub mod transvect;
pub mod words;

pub use error::{Error, Result};
pub use field::{make_field, Field, FieldKind, FieldSpec, PrimeField, Rationals};
pub use jordan::{BasisMap, OperatorMatrix, Side};
pub use linalg::{Matrix, RankNormalForm};
pub use rational::Rational;

pub use words::{FactorizationReport, Word};
