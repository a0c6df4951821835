//! Progressive saliency-ordered codec: quantize, select, entropy-code, and
//! the inverse path.
//!
//! The encoder converts to YCbCr, pads, runs the K-level Haar transform per
//! channel, zeroes the finest-level chroma detail bands, quantizes each
//! sub-band, and transmits the first `ceil(budget * total)` coefficient codes
//! in saliency order through the LZ77 + range-coder entropy stack. Only the
//! bounding boxes travel in the header: the decoder rebuilds the identical
//! saliency pyramid and coefficient order from them, places codes back into
//! the decomposition, dequantizes, and inverts.

mod bitstream;
mod lz77;
mod metrics;
mod quant;
mod range;

pub use bitstream::{Bitstream, Header, HeaderBox, MAGIC, VERSION};
pub use metrics::{mask_from_boxes, quality_metrics, QualityReport, PSNR_IDENTICAL};
pub use quant::{dequantize_subbands, quantize_subbands, QuantizedBand, QuantizedPyramid};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::imaging::{
    color_convert, pad_to_dyadic, ColorDirection, ColorSpace, RasterImage,
};
use crate::parallel;
use crate::saliency::{self, CoeffAddr, SaliencyAnnotation, SaliencyBox};
use crate::wavelet::{haar_forward, haar_inverse, Band, WaveletPyramid};
use std::collections::HashSet;

/// Encoder settings.
#[derive(Debug, Clone)]
pub struct EncodeConfig {
    /// Decomposition levels K.
    pub levels: usize,
    /// Fraction of coefficients to transmit, in (0, 1].
    pub budget_fraction: f64,
    /// When set, boxes whose label is absent are demoted to background and
    /// omitted from the bitstream header.
    pub selected_labels: Option<HashSet<String>>,
}

impl EncodeConfig {
    pub fn new(levels: usize, budget_fraction: f64) -> Self {
        Self { levels, budget_fraction, selected_labels: None }
    }
}

// ---------------------------------------------------------------------------
// Entropy layer
// ---------------------------------------------------------------------------

/// Losslessly compresses arbitrary bytes: LZ77 tokenization followed by
/// order-1 adaptive range coding. The stream is prefixed with the original
/// and tokenized lengths (u32 LE each) so decoding is self-delimiting.
pub fn entropy_encode(data: &[u8]) -> Vec<u8> {
    let tokens = lz77::compress(data);
    let mut out = Vec::with_capacity(16 + tokens.len() / 2);
    out.extend_from_slice(&(data.len() as u32).to_le_bytes());
    out.extend_from_slice(&(tokens.len() as u32).to_le_bytes());
    if !tokens.is_empty() {
        out.extend_from_slice(&range::encode(&tokens));
    }
    out
}

/// Inverse of [`entropy_encode`]; any detected inconsistency (truncation,
/// invalid tokens, or a length-prefix mismatch) is a checked error.
pub fn entropy_decode(data: &[u8]) -> Result<Vec<u8>> {
    if data.len() < 8 {
        return Err(Error::CorruptEntropyStream("missing length prefix".into()));
    }
    let orig_len = u32::from_le_bytes(data[..4].try_into().expect("length checked")) as usize;
    let token_len = u32::from_le_bytes(data[4..8].try_into().expect("length checked")) as usize;
    if token_len == 0 {
        if orig_len != 0 {
            return Err(Error::CorruptEntropyStream("length prefix mismatch".into()));
        }
        return Ok(Vec::new());
    }
    let tokens = range::decode(&data[8..], token_len)?;
    let decoded = lz77::decompress(&tokens)?;
    if decoded.len() != orig_len {
        return Err(Error::CorruptEntropyStream(format!(
            "length prefix mismatch: expected {orig_len}, decoded {}",
            decoded.len()
        )));
    }
    Ok(decoded)
}

// ---------------------------------------------------------------------------
// Coefficient selection
// ---------------------------------------------------------------------------

/// First `ceil(budget_fraction * total)` addresses of the transmission order.
pub fn select_coefficients(order: &[CoeffAddr], budget_fraction: f64) -> Result<&[CoeffAddr]> {
    if !budget_fraction.is_finite() || budget_fraction <= 0.0 || budget_fraction > 1.0 {
        return Err(Error::InvalidBudget(budget_fraction));
    }
    let count = ((budget_fraction * order.len() as f64).ceil() as usize).min(order.len());
    Ok(&order[..count])
}

// ---------------------------------------------------------------------------
// Encode
// ---------------------------------------------------------------------------

fn filtered_boxes(
    annotation: &SaliencyAnnotation,
    selected_labels: Option<&HashSet<String>>,
) -> Vec<SaliencyBox> {
    annotation
        .boxes
        .iter()
        .filter(|b| selected_labels.is_none_or(|s| s.contains(&b.label)))
        .cloned()
        .collect()
}

fn header_boxes(boxes: &[SaliencyBox]) -> Vec<HeaderBox> {
    boxes
        .iter()
        .map(|b| HeaderBox { x: b.x as u16, y: b.y as u16, w: b.w as u16, h: b.h as u16, level: b.level as u8 })
        .collect()
}

/// Full encode pipeline producing a self-contained bitstream.
pub fn encode_image(
    image: &RasterImage,
    annotation: &SaliencyAnnotation,
    config: &EncodeConfig,
) -> Result<Bitstream> {
    if image.color_space() == ColorSpace::YCbCr {
        return Err(Error::WrongColorSpace { expected: "RGB or Gray", actual: "YCbCr" });
    }
    let working = if image.color_space() == ColorSpace::Rgb {
        color_convert(image, ColorDirection::RgbToYCbCr)?
    } else {
        image.clone()
    };
    let padded = pad_to_dyadic(&working, config.levels)?;
    if padded.width() > u16::MAX as usize || padded.height() > u16::MAX as usize {
        return Err(Error::DimsExceedBoxRange);
    }

    let used = SaliencyAnnotation {
        boxes: filtered_boxes(annotation, config.selected_labels.as_ref()),
    };
    let spatial =
        saliency::rasterize_saliency(&used, (padded.width(), padded.height()), config.levels, None)?;
    let chain = saliency::wavelet_saliency(&spatial, config.levels)?;
    let order = saliency::order_coefficients(&saliency::replicate_bands(&chain)?);
    let selected = select_coefficients(&order, config.budget_fraction)?;

    let channels = padded.channels();
    let pyramids: Vec<Result<WaveletPyramid>> = parallel::map_range(channels, |c| {
        let mut pyr = haar_forward(&padded.plane_grid(c), config.levels)?;
        if channels == 3 && c > 0 {
            // chroma sub-sampling surrogate: drop the finest detail bands
            let finest = &mut pyr.levels[0];
            for g in [&mut finest.lh, &mut finest.hl, &mut finest.hh] {
                g.data_mut().fill(0.0);
            }
        }
        Ok(pyr)
    });
    let quantized: Vec<QuantizedPyramid> = pyramids
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .iter()
        .map(quantize_subbands)
        .collect();

    let mut plain = Vec::with_capacity(selected.len() * channels);
    for addr in selected {
        for q in &quantized {
            let band = q.band(addr.level as usize, addr.band);
            plain.push(band.codes[addr.row as usize * band.width() + addr.col as usize]);
        }
    }

    let band_params = quantized
        .iter()
        .flat_map(|q| q.bands_canonical().map(|(_, _, b)| (b.mean as f32, b.scale as f32)))
        .collect();

    let header = Header {
        width: padded.width() as u32,
        height: padded.height() as u32,
        original_width: image.original_width() as u32,
        original_height: image.original_height() as u32,
        levels: config.levels as u8,
        channel_count: channels as u8,
        boxes: header_boxes(&used.boxes),
        band_params,
        selected_count: selected.len() as u32,
    };
    Ok(Bitstream { header, payload: entropy_encode(&plain) })
}

/// Binary-searches the budget fraction so the encoded size lands within 5%
/// of `target_bytes` (or as close as the coefficient granularity allows).
/// Returns the bitstream and the fraction used.
pub fn encode_image_target_bytes(
    image: &RasterImage,
    annotation: &SaliencyAnnotation,
    levels: usize,
    selected_labels: Option<HashSet<String>>,
    target_bytes: usize,
) -> Result<(Bitstream, f64)> {
    let mut config =
        EncodeConfig { levels, budget_fraction: 1.0, selected_labels };
    let full = encode_image(image, annotation, &config)?;
    if full.to_bytes().len() <= target_bytes {
        return Ok((full, 1.0));
    }
    let total = (full.header.width as usize) * (full.header.height as usize);
    let mut lo = 1.0 / total as f64;
    let mut hi = 1.0;
    let mut best = (full, 1.0);
    let mut best_gap = usize::MAX;
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        config.budget_fraction = mid;
        let bs = encode_image(image, annotation, &config)?;
        let size = bs.to_bytes().len();
        let gap = size.abs_diff(target_bytes);
        if gap < best_gap {
            best = (bs, mid);
            best_gap = gap;
        }
        if size > target_bytes {
            hi = mid;
        } else {
            lo = mid;
        }
        if gap * 20 <= target_bytes {
            break; // within 5%
        }
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Decode
// ---------------------------------------------------------------------------

fn annotation_from_header(header: &Header) -> SaliencyAnnotation {
    SaliencyAnnotation {
        boxes: header
            .boxes
            .iter()
            .enumerate()
            .map(|(i, b)| SaliencyBox {
                label: format!("b{i}"),
                x: b.x as u32,
                y: b.y as u32,
                w: b.w as u32,
                h: b.h as u32,
                level: b.level as u32,
            })
            .collect(),
    }
}

/// The coefficient order a decoder derives from a parsed header. Matches the
/// encoder's order exactly: both are computed from the same boxes with
/// integer arithmetic.
pub fn decoder_order(header: &Header) -> Result<Vec<CoeffAddr>> {
    saliency::transmission_order(
        &annotation_from_header(header),
        (header.width as usize, header.height as usize),
        header.levels as usize,
        None,
    )
}

fn rebuild_quantized(header: &Header, channel: usize) -> Result<QuantizedPyramid> {
    let (w, h, k) = (header.width as usize, header.height as usize, header.levels as usize);
    let params = &header.band_params;
    let per_channel = header.bands_per_channel();
    let base = channel * per_channel;
    if params.len() < base + per_channel {
        return Err(Error::TruncatedHeader);
    }
    // canonical order: index 0 is the top LL, then levels K..1 as LH, HL, HH
    let mut idx = base;
    let mut next = |width: usize, height: usize| {
        let (mean, scale) = params[idx];
        idx += 1;
        QuantizedBand::from_params(width, height, mean as f64, scale as f64)
    };
    let top_ll = next(w >> k, h >> k);
    let mut levels_rev = Vec::with_capacity(k);
    for level in (1..=k).rev() {
        let (bw, bh) = (w >> level, h >> level);
        let lh = next(bw, bh);
        let hl = next(bw, bh);
        let hh = next(bw, bh);
        levels_rev.push(crate::wavelet::Details { lh, hl, hh });
    }
    levels_rev.reverse();
    Ok(QuantizedPyramid { source_width: w, source_height: h, top_ll, levels: levels_rev })
}

/// Full decode pipeline: recompute the order, place codes, dequantize,
/// invert, convert, crop, clamp.
pub fn decode_image(bitstream: &Bitstream) -> Result<RasterImage> {
    let header = &bitstream.header;
    let channels = header.channel_count as usize;
    if channels != 1 && channels != 3 {
        return Err(Error::MalformedHeader(format!("channel count {channels}")));
    }
    let (w, h, k) = (header.width as usize, header.height as usize, header.levels as usize);
    if k == 0 || k > 15 || w == 0 || h == 0 || !w.is_multiple_of(1 << k) || !h.is_multiple_of(1 << k) {
        return Err(Error::NonDyadic { width: w, height: h, levels: k });
    }
    if header.original_width as usize > w
        || header.original_height as usize > h
        || header.original_width == 0
        || header.original_height == 0
    {
        return Err(Error::MalformedHeader("original dims exceed padded dims".into()));
    }

    let order = decoder_order(header)?;
    let selected_count = header.selected_count as usize;
    if selected_count > order.len() {
        return Err(Error::PayloadLengthMismatch { expected: selected_count, found: order.len() });
    }
    let selected = &order[..selected_count];

    let plain = entropy_decode(&bitstream.payload)?;
    if plain.len() != selected_count * channels {
        return Err(Error::PayloadLengthMismatch {
            expected: selected_count * channels,
            found: plain.len() / channels.max(1),
        });
    }

    let planes: Vec<Result<Grid<f64>>> = parallel::map_range(channels, |c| {
        let mut q = rebuild_quantized(header, c)?;
        for (i, addr) in selected.iter().enumerate() {
            let band: &mut QuantizedBand = match addr.band {
                Band::Ll => &mut q.top_ll,
                Band::Lh => &mut q.levels[addr.level as usize - 1].lh,
                Band::Hl => &mut q.levels[addr.level as usize - 1].hl,
                Band::Hh => &mut q.levels[addr.level as usize - 1].hh,
            };
            let width = band.width();
            band.codes[addr.row as usize * width + addr.col as usize] = plain[i * channels + c];
        }
        haar_inverse(&dequantize_subbands(&q, selected)?)
    });
    let planes = planes.into_iter().collect::<Result<Vec<_>>>()?;

    let space = if channels == 1 { ColorSpace::Gray } else { ColorSpace::YCbCr };
    let assembled =
        RasterImage::new(w, h, space, planes.into_iter().map(|g| g.data().to_vec()).collect())?;
    let restored = if channels == 3 {
        color_convert(&assembled, ColorDirection::YCbCrToRgb)?
    } else {
        assembled
    };
    let mut cropped =
        restored.crop(header.original_width as usize, header.original_height as usize)?;
    for c in 0..cropped.channels() {
        for v in cropped.plane_mut(c) {
            *v = v.clamp(0.0, 255.0);
        }
    }
    Ok(cropped)
}

/// Convenience: parse and decode in one step.
pub fn decode_bytes(bytes: &[u8]) -> Result<RasterImage> {
    decode_image(&Bitstream::from_bytes(bytes)?)
}

// ---------------------------------------------------------------------------
// Quantizer-bypassed reference path
// ---------------------------------------------------------------------------

/// Reconstruction carrying raw (unquantized) coefficients for the selected
/// prefix: kept coefficients are exact, missing detail coefficients are 0,
/// missing top-LL ones take the band mean. No rounding or clamping, so the
/// orthonormality argument applies literally: growing the budget can only
/// shrink the dropped set and therefore the pixel-domain MSE.
///
/// Gray images only — the color conversion is not an isometry, which would
/// muddy the energy bookkeeping this path exists to expose.
pub fn reconstruct_exact_prefix(
    image: &RasterImage,
    annotation: &SaliencyAnnotation,
    levels: usize,
    budget_fraction: f64,
) -> Result<RasterImage> {
    if image.color_space() != ColorSpace::Gray {
        return Err(Error::WrongColorSpace { expected: "Gray", actual: "RGB/YCbCr" });
    }
    let padded = pad_to_dyadic(image, levels)?;
    let order = saliency::transmission_order(
        annotation,
        (padded.width(), padded.height()),
        levels,
        None,
    )?;
    let selected = select_coefficients(&order, budget_fraction)?;
    let pyr = haar_forward(&padded.plane_grid(0), levels)?;

    let mut kept = pyr.clone();
    let ll_mean =
        pyr.top_ll.data().iter().sum::<f64>() / pyr.top_ll.data().len() as f64;
    kept.top_ll.data_mut().fill(ll_mean);
    for d in &mut kept.levels {
        for g in [&mut d.lh, &mut d.hl, &mut d.hh] {
            g.data_mut().fill(0.0);
        }
    }
    for addr in selected {
        let src = pyr.band(addr.level as usize, addr.band);
        let value = src.get(addr.col as usize, addr.row as usize);
        let dst = match addr.band {
            Band::Ll => &mut kept.top_ll,
            Band::Lh => &mut kept.levels[addr.level as usize - 1].lh,
            Band::Hl => &mut kept.levels[addr.level as usize - 1].hl,
            Band::Hh => &mut kept.levels[addr.level as usize - 1].hh,
        };
        dst.set(addr.col as usize, addr.row as usize, value);
    }
    let plane = haar_inverse(&kept)?;
    let full = RasterImage::new(padded.width(), padded.height(), ColorSpace::Gray, vec![plane
        .data()
        .to_vec()])?
    .with_original_dims(image.original_width(), image.original_height());
    full.crop(image.original_width(), image.original_height())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::load_image;
    use crate::synth;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gray_image(w: usize, h: usize, seed: u64) -> RasterImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = (0..w * h).map(|_| rng.random_range(0.0f64..256.0).floor()).collect();
        RasterImage::new(w, h, ColorSpace::Gray, vec![pixels]).unwrap()
    }

    #[test]
    fn entropy_empty_roundtrip() {
        let encoded = entropy_encode(&[]);
        assert_eq!(entropy_decode(&encoded).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn entropy_zeros_compress_below_200_bytes() {
        let data = vec![0u8; 10_000];
        let encoded = entropy_encode(&data);
        assert!(encoded.len() < 200, "encoded {} bytes", encoded.len());
        assert_eq!(entropy_decode(&encoded).unwrap(), data);
    }

    #[test]
    fn entropy_random_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..30 {
            let len = rng.random_range(0..16384);
            let data: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            assert_eq!(entropy_decode(&entropy_encode(&data)).unwrap(), data);
        }
    }

    #[test]
    fn entropy_detects_corruption() {
        let encoded = entropy_encode(&vec![3u8; 5000]);
        let cut = &encoded[..encoded.len() - 3];
        assert!(entropy_decode(cut).is_err());
        assert!(entropy_decode(&encoded[..6]).is_err());
    }

    #[test]
    fn budget_validation() {
        let order =
            saliency::transmission_order(&SaliencyAnnotation::default(), (8, 8), 1, None).unwrap();
        assert!(matches!(select_coefficients(&order, 0.0), Err(Error::InvalidBudget(_))));
        assert!(matches!(select_coefficients(&order, 1.5), Err(Error::InvalidBudget(_))));
        assert_eq!(select_coefficients(&order, 1.0).unwrap().len(), 64);
    }

    #[test]
    fn budget_prefix_arithmetic() {
        let ann = SaliencyAnnotation::default();
        let order = saliency::transmission_order(&ann, (64, 64), 2, None).unwrap();
        assert_eq!(select_coefficients(&order, 0.25).unwrap().len(), 1024);
    }

    #[test]
    fn smaller_budget_selects_prefix_of_larger() {
        let ann = SaliencyAnnotation {
            boxes: vec![SaliencyBox { label: "a".into(), x: 2, y: 2, w: 6, h: 6, level: 1 }],
        };
        let order = saliency::transmission_order(&ann, (16, 16), 2, None).unwrap();
        let small = select_coefficients(&order, 0.2).unwrap();
        let large = select_coefficients(&order, 0.6).unwrap();
        assert_eq!(&large[..small.len()], small);
    }

    #[test]
    fn constant_gray_full_budget_is_exact() {
        let img =
            RasterImage::new(32, 32, ColorSpace::Gray, vec![vec![77.0; 1024]]).unwrap();
        let bs = encode_image(&img, &SaliencyAnnotation::default(), &EncodeConfig::new(3, 1.0))
            .unwrap();
        let decoded = decode_image(&bs).unwrap();
        assert_eq!(decoded.plane(0), img.plane(0));
    }

    #[test]
    fn encode_is_deterministic() {
        let img = synth::photo(48, 40, 3, 5);
        let ann = SaliencyAnnotation {
            boxes: vec![SaliencyBox { label: "roi".into(), x: 4, y: 4, w: 16, h: 12, level: 1 }],
        };
        let cfg = EncodeConfig::new(3, 0.35);
        let a = encode_image(&img, &ann, &cfg).unwrap().to_bytes();
        let b = encode_image(&img, &ann, &cfg).unwrap().to_bytes();
        assert_eq!(a, b);
    }

    #[test]
    fn lower_budget_is_smaller() {
        let img = synth::photo(96, 96, 1, 11);
        let ann = SaliencyAnnotation::default();
        let small = encode_image(&img, &ann, &EncodeConfig::new(3, 0.1)).unwrap().to_bytes();
        let large = encode_image(&img, &ann, &EncodeConfig::new(3, 0.5)).unwrap().to_bytes();
        assert!(small.len() < large.len(), "{} !< {}", small.len(), large.len());
    }

    #[test]
    fn full_budget_gray_psnr_exceeds_40db() {
        let img = gray_image(64, 64, 17);
        let bs = encode_image(&img, &SaliencyAnnotation::default(), &EncodeConfig::new(3, 1.0))
            .unwrap();
        let decoded = decode_image(&bs).unwrap();
        let report = quality_metrics(&img, &decoded, None).unwrap();
        assert!(report.psnr_db >= 40.0, "psnr {}", report.psnr_db);
    }

    #[test]
    fn decoder_rejects_corrupt_magic() {
        let img = gray_image(16, 16, 3);
        let mut bytes = encode_image(&img, &SaliencyAnnotation::default(), &EncodeConfig::new(2, 1.0))
            .unwrap()
            .to_bytes();
        bytes[0] = b'Z';
        assert!(matches!(decode_bytes(&bytes), Err(Error::BadMagic)));
    }

    #[test]
    fn decoder_rejects_short_payload() {
        let img = gray_image(16, 16, 4);
        let bs = encode_image(&img, &SaliencyAnnotation::default(), &EncodeConfig::new(2, 1.0))
            .unwrap();
        let mut bytes = bs.header.emit();
        bytes.extend_from_slice(&bs.payload[..bs.payload.len() / 2]);
        assert!(decode_bytes(&bytes).is_err());
    }

    #[test]
    fn decoder_order_matches_encoder_order() {
        let ann = SaliencyAnnotation {
            boxes: vec![
                SaliencyBox { label: "a".into(), x: 0, y: 0, w: 8, h: 8, level: 2 },
                SaliencyBox { label: "b".into(), x: 16, y: 8, w: 10, h: 10, level: 1 },
            ],
        };
        let img = synth::photo(32, 32, 1, 9);
        let bs = encode_image(&img, &ann, &EncodeConfig::new(2, 0.4)).unwrap();
        let encoder_order =
            saliency::transmission_order(&ann, (32, 32), 2, None).unwrap();
        let decoder_order = decoder_order(&bs.header).unwrap();
        assert_eq!(encoder_order, decoder_order);
    }

    #[test]
    fn unselected_labels_are_dropped_from_header() {
        let ann = SaliencyAnnotation {
            boxes: vec![
                SaliencyBox { label: "keep".into(), x: 0, y: 0, w: 4, h: 4, level: 1 },
                SaliencyBox { label: "drop".into(), x: 8, y: 8, w: 4, h: 4, level: 1 },
            ],
        };
        let img = gray_image(16, 16, 6);
        let mut cfg = EncodeConfig::new(2, 1.0);
        cfg.selected_labels = Some(["keep".to_string()].into());
        let bs = encode_image(&img, &ann, &cfg).unwrap();
        assert_eq!(bs.header.boxes.len(), 1);
        assert_eq!((bs.header.boxes[0].x, bs.header.boxes[0].y), (0, 0));
    }

    #[test]
    fn non_dyadic_input_is_padded_and_cropped_back() {
        let img = gray_image(20, 14, 8);
        let bs = encode_image(&img, &SaliencyAnnotation::default(), &EncodeConfig::new(3, 1.0))
            .unwrap();
        assert_eq!((bs.header.width, bs.header.height), (24, 16));
        let decoded = decode_image(&bs).unwrap();
        assert_eq!((decoded.width(), decoded.height()), (20, 14));
        let report = quality_metrics(&img, &decoded, None).unwrap();
        assert!(report.psnr_db >= 40.0);
    }

    #[test]
    fn rgb_roundtrip_reasonable_quality() {
        let img = synth::photo(32, 32, 3, 19);
        let bs = encode_image(&img, &SaliencyAnnotation::default(), &EncodeConfig::new(2, 1.0))
            .unwrap();
        let decoded = decode_image(&bs).unwrap();
        assert_eq!(decoded.color_space(), ColorSpace::Rgb);
        let report = quality_metrics(&img, &decoded, None).unwrap();
        // chroma finest bands are zeroed by design, so this is lossier than gray
        assert!(report.psnr_db >= 25.0, "psnr {}", report.psnr_db);
    }

    #[test]
    fn ycbcr_input_is_rejected() {
        let img = RasterImage::new(4, 4, ColorSpace::YCbCr, vec![vec![0.0; 16]; 3]).unwrap();
        assert!(matches!(
            encode_image(&img, &SaliencyAnnotation::default(), &EncodeConfig::new(1, 1.0)),
            Err(Error::WrongColorSpace { .. })
        ));
    }

    #[test]
    fn exact_prefix_mse_never_increases_with_budget() {
        let img = synth::photo(64, 64, 1, 23);
        let ann = SaliencyAnnotation {
            boxes: vec![SaliencyBox { label: "r".into(), x: 8, y: 8, w: 16, h: 16, level: 2 }],
        };
        let mut prev = f64::INFINITY;
        for i in 0..11 {
            let budget = 0.05 + (1.0 - 0.05) * i as f64 / 10.0;
            let recon = reconstruct_exact_prefix(&img, &ann, 3, budget).unwrap();
            let mse = quality_metrics(&img, &recon, None).unwrap().mse;
            assert!(mse <= prev, "budget {budget}: {mse} > {prev}");
            prev = mse;
        }
    }

    #[test]
    fn target_bytes_mode_hits_window() {
        let img = synth::photo(64, 64, 1, 31);
        let (bs, fraction) = encode_image_target_bytes(
            &img,
            &SaliencyAnnotation::default(),
            3,
            None,
            900,
        )
        .unwrap();
        let size = bs.to_bytes().len();
        assert!(fraction > 0.0 && fraction <= 1.0);
        assert!(
            size.abs_diff(900) * 20 <= 900 || fraction == 1.0,
            "size {size} not within 5% of 900"
        );
    }

    #[test]
    fn pnm_file_through_codec() {
        let mut data = b"P5 8 8 255 ".to_vec();
        data.extend((0..64u32).map(|i| (i * 4) as u8));
        let img = load_image(&data).unwrap();
        let bs = encode_image(&img, &SaliencyAnnotation::default(), &EncodeConfig::new(2, 1.0))
            .unwrap();
        let decoded = decode_image(&bs).unwrap();
        let report = quality_metrics(&img, &decoded, None).unwrap();
        assert!(report.psnr_db >= 40.0);
    }
}
