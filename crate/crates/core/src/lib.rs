//! Modulation-space norms computed three ways: the classical STFT integral, an
//! average over symplectic rotations, and an average over the torus of partial
//! fractional Fourier transforms. Includes the metaplectic machinery needed to
//! apply those rotations to sampled signals and a small lab for the averaged
//! indicator Ψ_ε that produces the equivalence constants.

pub mod cli;
pub mod error;
pub mod fft;
pub mod grid;
pub mod measure;
pub mod metaplectic;
pub mod norms;
pub mod sampling;
pub mod signal;
pub mod stft;
pub mod symplectic;
pub mod transforms;

pub use error::{Error, Result};
pub use grid::Grid;
pub use signal::{gaussian_window, make_test_signal, Signal, SignalSpec};
