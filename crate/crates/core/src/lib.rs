//! Core algorithms for improving single underwater images.
//!
//! Underwater shots suffer from wavelength-dependent attenuation and
//! scattering: red light dies first, contrast washes out, and everything
//! drifts towards blue-green. This crate implements the two classic families
//! of counter-measures plus the plumbing needed to evaluate them:
//!
//! * **Restoration** ([`restore`]): invert the simplified image formation
//!   model `I = J·t + B·(1 − t)` by estimating the background light `B`
//!   ([`background`]) and per-channel transmission maps `t`
//!   ([`transmission`]) from priors such as the dark channel, the maximum
//!   intensity prior, image blurriness and light absorption ([`priors`]).
//! * **Enhancement** ([`enhance`]): model-free contrast and color operators
//!   (histogram equalization, CLAHE, ICM, UCM, Rayleigh stretching, RGHS and
//!   multi-scale fusion).
//! * **No-reference metrics** ([`metrics`]): entropy, UCIQE and UIQM, plus
//!   PSNR against a reference.
//! * **A forward simulator** ([`simulate`]): degrade a clean image with a
//!   known `(B, t)` pair so estimators can be scored against ground truth.
//!
//! Everything operates on `f64` planar images in `[0, 1]` ([`image`]) and is
//! deterministic. The crate is `no_std`-compatible (requires `alloc`); build
//! with `--no-default-features --features libm` to drop `std`.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("uwimg-core needs either the `std` or the `libm` feature");

extern crate alloc;

pub mod background;
pub mod color;
pub mod enhance;
mod error;
pub mod image;
pub mod kernel;
mod math;
pub mod metrics;
pub mod priors;
pub mod pyramid;
pub mod restore;
pub mod simulate;
pub mod transmission;

pub use error::{Error, Result};
pub use image::{ImageGray, ImageRgb, WindowSpec};
