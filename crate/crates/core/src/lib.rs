//! Saliency-guided progressive wavelet image codec plus a user-satisfaction
//! model and constrained bandwidth allocator.
//!
//! The crate is organized around one end-to-end story: a service provider
//! compresses customers' annotated images with a progressive codec that
//! transmits salient regions first ([`codec`], built on [`imaging`],
//! [`wavelet`] and [`saliency`]), estimates per-object importance from a
//! per-customer image repository ([`ranking`]), models user satisfaction as a
//! function of image quality and delivery delay ([`satisfaction`]), and splits
//! a fixed gateway bandwidth across customers to minimize dissatisfaction
//! ([`allocator`]).
//!
//! Data-parallel inner loops (transforms, population evaluation, grid
//! enumeration) run on rayon when the default `parallel` feature is enabled
//! and fall back to sequential loops without it. Results are identical either
//! way: every parallel reduction is order-fixed.

pub mod allocator;
pub mod codec;
pub mod error;
pub mod grid;
pub mod imaging;
mod parallel;
pub mod ranking;
pub mod saliency;
pub mod satisfaction;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
