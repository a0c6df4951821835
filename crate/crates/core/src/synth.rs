//! Deterministic synthetic image generation.
//!
//! Used by tests, benches, and the sample-asset generator: smooth photo-like
//! backgrounds (gradients plus a few low-frequency waves and mild noise) and
//! a high-frequency texture stamp for carving out salient regions. Everything
//! is seeded, so identical calls produce identical pixels.

use crate::imaging::{ColorSpace, RasterImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Photo-like image with `channels` of 1 (gray) or 3 (RGB).
pub fn photo(width: usize, height: usize, channels: usize, seed: u64) -> RasterImage {
    assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: f64 = rng.random_range(60.0..180.0);
    let gx: f64 = rng.random_range(-40.0..40.0);
    let gy: f64 = rng.random_range(-40.0..40.0);
    let waves: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(8.0..28.0),              // amplitude
                rng.random_range(0.5..3.0),               // x cycles over the width
                rng.random_range(0.5..3.0),               // y cycles over the height
                rng.random_range(0.0..std::f64::consts::TAU), // phase
            )
        })
        .collect();
    let channel_offsets: Vec<f64> =
        (0..channels).map(|_| rng.random_range(-25.0..25.0)).collect();

    let mut planes = vec![Vec::with_capacity(width * height); channels];
    for y in 0..height {
        for x in 0..width {
            let fx = x as f64 / width as f64;
            let fy = y as f64 / height as f64;
            let mut v = base + gx * fx + gy * fy;
            for &(amp, cx, cy, phase) in &waves {
                v += amp
                    * (std::f64::consts::TAU * (cx * fx + cy * fy) + phase).sin();
            }
            let noise: f64 = rng.random_range(-2.0..2.0);
            for (c, plane) in planes.iter_mut().enumerate() {
                plane.push((v + channel_offsets[c] + noise).clamp(0.0, 255.0));
            }
        }
    }
    let space = if channels == 1 { ColorSpace::Gray } else { ColorSpace::Rgb };
    RasterImage::new(width, height, space, planes).expect("generated planes are well-formed")
}

/// Overwrites a rectangle with a busy high-contrast texture whose fine-scale
/// structure is lost first under coarse-to-fine transmission.
pub fn stamp_texture(image: &mut RasterImage, x: usize, y: usize, w: usize, h: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = image.width();
    let height = image.height();
    let channels = image.channels();
    let check = 2 + (seed % 3) as usize;
    for yy in y..(y + h).min(height) {
        for xx in x..(x + w).min(width) {
            let cell = ((xx / check) + (yy / check)) % 2;
            let tone = if cell == 0 { 230.0 } else { 25.0 };
            let jitter: f64 = rng.random_range(-20.0..20.0);
            for c in 0..channels {
                image.plane_mut(c)[yy * width + xx] = (tone + jitter).clamp(0.0, 255.0);
            }
        }
    }
}
