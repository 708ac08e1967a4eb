//! Hecke eigenvalues of genus-2 paramodular cusp forms of prime level
//! `p` in {2, 3, 5, 7, 11}, computed from algebraic modular forms on
//! `GU_2(D)` for the definite quaternion algebra `D` ramified at `p`.

#![allow(clippy::needless_range_loop)]

pub mod characters;
pub mod config;
pub mod context;
pub mod eigenform;
pub mod error;
pub mod genus;
pub mod harder;
pub mod hecke;
pub mod lattice;
pub mod matrix;
pub mod order;
pub mod quaternion;
pub mod rational;
pub mod surd;
pub mod trace;

pub use error::{Error, Result};
pub use matrix::{embed_gsp4_power_sums, gu2_mul, GU2Matrix, QuatMatrix2};
pub use order::{Coords, IntMatrix, MaximalOrder};
pub use quaternion::{QuaternionAlgebra, QuaternionElement};
pub use rational::Rational;
pub use surd::QuadraticSurd;
