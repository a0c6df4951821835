//! Reconstruction quality: MSE and PSNR, optionally over a pixel mask.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::imaging::RasterImage;
use crate::saliency::SaliencyBox;

/// PSNR reported for a zero-MSE (identical) pair.
pub const PSNR_IDENTICAL: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr_db: f64,
}

/// MSE/PSNR between two images of identical shape.
///
/// The error is averaged over every channel of every (masked) pixel.
/// Identical inputs report `mse = 0` and the [`PSNR_IDENTICAL`] sentinel.
pub fn quality_metrics(
    original: &RasterImage,
    reconstructed: &RasterImage,
    mask: Option<&Grid<bool>>,
) -> Result<QualityReport> {
    if original.width() != reconstructed.width()
        || original.height() != reconstructed.height()
        || original.channels() != reconstructed.channels()
    {
        return Err(Error::DimensionMismatch(
            original.width(),
            original.height(),
            reconstructed.width(),
            reconstructed.height(),
        ));
    }
    if let Some(m) = mask {
        if m.width() != original.width() || m.height() != original.height() {
            return Err(Error::DimensionMismatch(
                m.width(),
                m.height(),
                original.width(),
                original.height(),
            ));
        }
    }

    let mut sum_sq = 0.0;
    let mut samples = 0usize;
    for c in 0..original.channels() {
        let (a, b) = (original.plane(c), reconstructed.plane(c));
        match mask {
            None => {
                for i in 0..a.len() {
                    let d = a[i] - b[i];
                    sum_sq += d * d;
                }
                samples += a.len();
            }
            Some(m) => {
                for (i, &keep) in m.data().iter().enumerate() {
                    if keep {
                        let d = a[i] - b[i];
                        sum_sq += d * d;
                        samples += 1;
                    }
                }
            }
        }
    }
    if samples == 0 {
        return Err(Error::EmptyMask);
    }
    let mse = sum_sq / samples as f64;
    let psnr_db =
        if mse == 0.0 { PSNR_IDENTICAL } else { 10.0 * (255.0 * 255.0 / mse).log10() };
    Ok(QualityReport { mse, psnr_db })
}

/// Mask selecting the pixels covered by any of the given boxes.
pub fn mask_from_boxes(dims: (usize, usize), boxes: &[SaliencyBox]) -> Grid<bool> {
    let (width, height) = dims;
    let mut mask = Grid::new(width, height);
    for b in boxes {
        let x1 = ((b.x + b.w) as usize).min(width);
        let y1 = ((b.y + b.h) as usize).min(height);
        for y in (b.y as usize).min(height)..y1 {
            for x in (b.x as usize).min(width)..x1 {
                mask.set(x, y, true);
            }
        }
    }
    mask
}
