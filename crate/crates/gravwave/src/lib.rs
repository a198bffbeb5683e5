//! Pseudo-spectral simulation of 2-D gravity water waves on a large
//! periodic domain: Dirichlet–Neumann series, the quadratic normal form,
//! and modified-scattering diagnostics of the profile.

pub mod cli;
pub mod config;
pub mod cubic;
pub mod diagnostics;
pub mod dno;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod lp;
pub mod nonlinearity;
pub mod normal_form;
pub mod norms;
pub mod scattering;
pub mod snapshot;
pub mod spectrum;

pub use error::{Error, Result};
pub use grid::{make_grid, FourierGrid};
pub use spectrum::{apply_multiplier, Field, Multiplier, Spectrum};
