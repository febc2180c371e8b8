//! Spectral solution of polynomial ODEs through a Galerkin projection of the
//! Koopman generator onto an orthonormal multivariate Legendre basis.
//!
//! The pipeline is: build a [`basis::BasisSet`], assemble the Koopman
//! matrix for a [`dynamics::VectorField`], project observables, eigendecompose
//! and evaluate `g(t) = Re[H V exp(Λt) V⁻¹ L(x0)]` at any time.

#![allow(clippy::needless_range_loop)]

pub mod basis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod koopman;
pub mod polyalg;
pub mod refinteg;

pub use basis::{BasisSet, MultiIndexSet, UnivariateTables};
pub use dynamics::{duffing_vector_field, parse_system_config, SystemSpec, VectorField};
pub use error::{KoopmanError, Result};
pub use koopman::{KoopmanModel, NamedObservable, ObservableSet, Trajectory};
pub use polyalg::{Monomial, Polynomial};
