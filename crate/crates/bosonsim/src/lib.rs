//! Boson-sampling simulation and statistical validation.
//!
//! The crate computes exact output distributions of n photons in m-mode
//! interferometers via matrix permanents, generates event data from three
//! sources (indistinguishable bosons, distinguishable photons, a uniform
//! sampler), and implements two validation tests from the multiphoton
//! interference literature — the row-norm test against the uniform sampler
//! and a thresholded likelihood-ratio test against distinguishable photons —
//! together with a Monte-Carlo harness that measures how quickly those
//! tests discriminate the sources as a function of data-set size.
//!
//! Modules, bottom up:
//!
//! * [`matrix`] — dense complex matrices, naive and Ryser permanents;
//! * [`modes`] — no-collision mode configurations and their enumeration;
//! * [`unitary`] — validated interferometers, Haar draws, submatrices;
//! * [`circuit`] — coupler/phase networks, composition, triangular
//!   decomposition;
//! * [`distributions`] — exact output distributions, sampling, event logs;
//! * [`validators`] — the row-norm and likelihood-ratio tests;
//! * [`experiments`] — seeded, parallel success-rate and N_min studies;
//! * [`io`] — the text file formats shared by the library and the CLI.
//!
//! Everything downstream of a seed is deterministic: per-trial RNG streams
//! are derived from (master seed, unitary index, set-size index, trial
//! index), so results do not depend on thread count or scheduling.

#![forbid(unsafe_code)]

pub mod circuit;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod io;
pub mod matrix;
pub mod modes;
pub mod unitary;
pub mod validators;

pub use error::{Error, Result};
