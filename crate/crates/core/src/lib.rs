//! Frequency-aware photometric loss for self-supervised depth estimation.
//!
//! This crate holds the numerical core and has no IO: image containers and
//! bilinear warping, spatial-frequency maps, ambiguity masking of
//! anti-aliased boundaries, frequency-adaptive Gaussian blur, the L1+SSIM
//! photometric loss, pinhole and disparity samplers, loss-landscape fairness
//! analysis, and synthetic scene generators with known ground truth.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command
//! line live in the `freqloss` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod ambiguity;
pub mod autoblur;
pub mod fairness;
pub mod frequency;
pub mod geometry;
pub mod image;
pub mod photometric;
pub mod synth;

pub use error::{Error, Result};
pub use image::{bilinear_sample, bilinear_sample_map, Border, Image, Sampler, ScalarMap};
