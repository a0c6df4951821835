//! Per-sub-band scalar quantization to 8-bit codes.
//!
//! Each band is mean-subtracted and mapped symmetrically onto `[0, 255]`:
//! with `m = max(|min|, |max|)` of the centered values, `scale = 2m/255` and
//!
//! ```text
//! code       = round(centered/scale + 127.5)
//! dequant(c) = mean + scale * (c - 127.5)
//! ```
//!
//! so the band extremes land exactly on code 0 or 255, every coefficient
//! reconstructs within `scale/2`, and a decoder that only knows `(mean,
//! scale)` can both dequantize kept codes and fill missing top-LL
//! coefficients with the band mean. `scale = 0` is the constant-band
//! sentinel: all codes are 0 and dequantization returns the mean exactly.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::saliency::CoeffAddr;
use crate::wavelet::{Band, Details, Pyramid, WaveletPyramid};

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedBand {
    width: usize,
    height: usize,
    pub codes: Vec<u8>,
    pub mean: f64,
    pub scale: f64,
}

pub type QuantizedPyramid = Pyramid<QuantizedBand>;

const CODE_CENTER: f64 = 127.5;

impl QuantizedBand {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Reconstructs the coefficient stored at flat index `i`.
    pub fn dequantize_at(&self, i: usize) -> f64 {
        if self.scale == 0.0 {
            self.mean
        } else {
            self.mean + self.scale * (self.codes[i] as f64 - CODE_CENTER)
        }
    }

    /// Rebuilds a band from decoded parameters with all-zero codes.
    pub fn from_params(width: usize, height: usize, mean: f64, scale: f64) -> Self {
        Self { width, height, codes: vec![0; width * height], mean, scale }
    }
}

fn quantize_band(grid: &Grid<f64>) -> QuantizedBand {
    let n = grid.data().len();
    let mean = grid.data().iter().sum::<f64>() / n as f64;
    let mut extent: f64 = 0.0;
    for &v in grid.data() {
        extent = extent.max((v - mean).abs());
    }
    if extent == 0.0 {
        return QuantizedBand { width: grid.width(), height: grid.height(), codes: vec![0; n], mean, scale: 0.0 };
    }
    let scale = 2.0 * extent / 255.0;
    let codes = grid
        .data()
        .iter()
        .map(|&v| {
            let c = ((v - mean) / scale + CODE_CENTER).round();
            c.clamp(0.0, 255.0) as u8
        })
        .collect();
    QuantizedBand { width: grid.width(), height: grid.height(), codes, mean, scale }
}

/// Quantizes every sub-band of a pyramid independently.
pub fn quantize_subbands(pyramid: &WaveletPyramid) -> QuantizedPyramid {
    Pyramid {
        source_width: pyramid.source_width,
        source_height: pyramid.source_height,
        top_ll: quantize_band(&pyramid.top_ll),
        levels: pyramid
            .levels
            .iter()
            .map(|d| Details {
                lh: quantize_band(&d.lh),
                hl: quantize_band(&d.hl),
                hh: quantize_band(&d.hh),
            })
            .collect(),
    }
}

/// Marks which coefficients of each band were transmitted.
pub(crate) struct KeptMasks {
    pub top_ll: Grid<bool>,
    pub levels: Vec<Details<Grid<bool>>>,
}

pub(crate) fn build_kept_masks(q: &QuantizedPyramid, kept: &[CoeffAddr]) -> Result<KeptMasks> {
    let mut masks = KeptMasks {
        top_ll: Grid::new(q.top_ll.width, q.top_ll.height),
        levels: q
            .levels
            .iter()
            .map(|d| Details {
                lh: Grid::new(d.lh.width, d.lh.height),
                hl: Grid::new(d.hl.width, d.hl.height),
                hh: Grid::new(d.hh.width, d.hh.height),
            })
            .collect(),
    };
    let k = q.k();
    for addr in kept {
        let out_of_range = Error::AddressOutOfRange {
            level: addr.level,
            band: addr.band.name(),
            row: addr.row,
            col: addr.col,
        };
        let level = addr.level as usize;
        let grid = match addr.band {
            Band::Ll if level == k => &mut masks.top_ll,
            Band::Ll => return Err(out_of_range),
            band => {
                if level < 1 || level > k {
                    return Err(out_of_range);
                }
                let d = &mut masks.levels[level - 1];
                match band {
                    Band::Lh => &mut d.lh,
                    Band::Hl => &mut d.hl,
                    Band::Hh => &mut d.hh,
                    Band::Ll => unreachable!(),
                }
            }
        };
        if (addr.col as usize) >= grid.width() || (addr.row as usize) >= grid.height() {
            return Err(out_of_range);
        }
        grid.set(addr.col as usize, addr.row as usize, true);
    }
    Ok(masks)
}

fn dequantize_band(band: &QuantizedBand, mask: &Grid<bool>, fill: f64) -> Grid<f64> {
    let data = band
        .codes
        .iter()
        .enumerate()
        .map(|(i, _)| if mask.data()[i] { band.dequantize_at(i) } else { fill })
        .collect();
    Grid::from_vec(band.width, band.height, data).expect("band dims are consistent")
}

/// Reconstructs a coefficient pyramid from quantized bands.
///
/// Coefficients listed in `kept` dequantize normally; everything else falls
/// back to 0 in detail bands and to the band mean in the top LL, so an
/// extreme low-budget decode degrades to the image's average tone.
pub fn dequantize_subbands(q: &QuantizedPyramid, kept: &[CoeffAddr]) -> Result<WaveletPyramid> {
    let masks = build_kept_masks(q, kept)?;
    Ok(Pyramid {
        source_width: q.source_width,
        source_height: q.source_height,
        top_ll: dequantize_band(&q.top_ll, &masks.top_ll, q.top_ll.mean),
        levels: q
            .levels
            .iter()
            .zip(&masks.levels)
            .map(|(d, m)| Details {
                lh: dequantize_band(&d.lh, &m.lh, 0.0),
                hl: dequantize_band(&d.hl, &m.hl, 0.0),
                hh: dequantize_band(&d.hh, &m.hh, 0.0),
            })
            .collect(),
    })
}
