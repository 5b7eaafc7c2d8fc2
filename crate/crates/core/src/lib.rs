//! Eigenvalues of `-d²/dx² + x^{2M} ± α x^{M-1}` from coupled nonlinear
//! integral equations, naive WKB and direct ODE shooting, together with
//! numerical checks of the Stokes-multiplier functional relations that tie
//! the `±α` spectra together.

pub mod benchmark;
pub mod cli;
pub mod error;
pub mod kernels;
pub mod model;
pub mod nlie;
pub mod oracle;
pub mod relations;
pub mod spectrum;
pub mod wkb;

pub use error::{Error, Result};
