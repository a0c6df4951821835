//! Image ingestion, egress, color conversion, and dyadic padding.
//!
//! PNM (PGM `P2`/`P5`, PPM `P3`/`P6`, maxval 255) is the only raster wire
//! format. Pixels are kept as real values so later transforms lose nothing
//! between stages; rounding happens once, on write.

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorSpace {
    Rgb,
    YCbCr,
    Gray,
}

impl ColorSpace {
    fn name(self) -> &'static str {
        match self {
            ColorSpace::Rgb => "RGB",
            ColorSpace::YCbCr => "YCbCr",
            ColorSpace::Gray => "Gray",
        }
    }
}

/// Direction for [`color_convert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorDirection {
    RgbToYCbCr,
    YCbCrToRgb,
}

// Full-range BT.601 luma weights and chroma scale factors.
const KR: f64 = 0.299;
const KG: f64 = 0.587;
const KB: f64 = 0.114;
const CB_SCALE: f64 = 0.564;
const CR_SCALE: f64 = 0.713;

/// A width x height raster with one or three real-valued planes.
///
/// `original_width`/`original_height` remember the pre-padding dimensions so
/// a decoded image can be cropped back; they equal `width`/`height` for
/// images that were never padded.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    color_space: ColorSpace,
    planes: Vec<Vec<f64>>,
    original_width: usize,
    original_height: usize,
}

impl RasterImage {
    pub fn new(
        width: usize,
        height: usize,
        color_space: ColorSpace,
        planes: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let channels = planes.len();
        let expected = match color_space {
            ColorSpace::Gray => 1,
            ColorSpace::Rgb | ColorSpace::YCbCr => 3,
        };
        if channels != expected {
            return Err(Error::MalformedHeader(format!(
                "{} image requires {} planes, got {}",
                color_space.name(),
                expected,
                channels
            )));
        }
        for plane in &planes {
            if plane.len() != width * height {
                return Err(Error::TruncatedPayload {
                    expected: width * height,
                    found: plane.len(),
                });
            }
        }
        Ok(Self { width, height, color_space, planes, original_width: width, original_height: height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn original_width(&self) -> usize {
        self.original_width
    }

    pub fn original_height(&self) -> usize {
        self.original_height
    }

    pub fn color_space(&self) -> ColorSpace {
        self.color_space
    }

    pub fn channels(&self) -> usize {
        self.planes.len()
    }

    pub fn plane(&self, channel: usize) -> &[f64] {
        &self.planes[channel]
    }

    pub fn plane_mut(&mut self, channel: usize) -> &mut [f64] {
        &mut self.planes[channel]
    }

    pub fn sample(&self, channel: usize, x: usize, y: usize) -> f64 {
        self.planes[channel][y * self.width + x]
    }

    /// Plane as a [`Grid`], cloning the samples.
    pub fn plane_grid(&self, channel: usize) -> Grid<f64> {
        Grid::from_vec(self.width, self.height, self.planes[channel].clone())
            .expect("plane length is enforced by construction")
    }

    pub(crate) fn with_original_dims(mut self, width: usize, height: usize) -> Self {
        self.original_width = width;
        self.original_height = height;
        self
    }

    /// Crops to the top-left `width` x `height` window.
    pub fn crop(&self, width: usize, height: usize) -> Result<Self> {
        if width > self.width || height > self.height || width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(width, height, self.width, self.height));
        }
        let planes = self
            .planes
            .iter()
            .map(|p| {
                let mut out = Vec::with_capacity(width * height);
                for y in 0..height {
                    out.extend_from_slice(&p[y * self.width..y * self.width + width]);
                }
                out
            })
            .collect();
        let mut img = Self::new(width, height, self.color_space, planes)?;
        img.original_width = width;
        img.original_height = height;
        Ok(img)
    }
}

fn clamp_round(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

// ---------------------------------------------------------------------------
// PNM parsing
// ---------------------------------------------------------------------------

struct PnmScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PnmScanner<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        self.skip_separators();
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        Some(&self.bytes[start..self.pos])
    }

    fn next_number(&mut self, what: &str) -> Result<u32> {
        let token = self
            .next_token()
            .ok_or_else(|| Error::MalformedHeader(format!("missing {what}")))?;
        let text = std::str::from_utf8(token)
            .map_err(|_| Error::MalformedHeader(format!("non-ASCII {what}")))?;
        text.parse::<u32>()
            .map_err(|_| Error::MalformedHeader(format!("invalid {what}: {text:?}")))
    }
}

/// Parses a PGM (`P2`/`P5`) or PPM (`P3`/`P6`) file with maxval 255.
///
/// Gray files load with [`ColorSpace::Gray`], color files with
/// [`ColorSpace::Rgb`]; samples are stored exactly as written.
pub fn load_image(bytes: &[u8]) -> Result<RasterImage> {
    let mut scanner = PnmScanner::new(bytes);
    let magic = scanner
        .next_token()
        .ok_or_else(|| Error::MalformedHeader("empty file".into()))?;
    let (channels, ascii) = match magic {
        b"P2" => (1, true),
        b"P5" => (1, false),
        b"P3" => (3, true),
        b"P6" => (3, false),
        other => {
            return Err(Error::MalformedHeader(format!(
                "unknown magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = scanner.next_number("width")? as usize;
    let height = scanner.next_number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!("degenerate dimensions {width}x{height}")));
    }
    let maxval = scanner.next_number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }

    let samples = width * height * channels;
    let mut interleaved = Vec::with_capacity(samples);
    if ascii {
        for _ in 0..samples {
            match scanner.next_token() {
                Some(token) => {
                    let text = std::str::from_utf8(token)
                        .map_err(|_| Error::MalformedHeader("non-ASCII sample".into()))?;
                    let v = text.parse::<u32>().map_err(|_| {
                        Error::MalformedHeader(format!("invalid sample {text:?}"))
                    })?;
                    if v > maxval {
                        return Err(Error::MalformedHeader(format!(
                            "sample {v} exceeds maxval {maxval}"
                        )));
                    }
                    interleaved.push(v as f64);
                }
                None => {
                    return Err(Error::TruncatedPayload { expected: samples, found: interleaved.len() })
                }
            }
        }
    } else {
        // Binary rasters start after exactly one whitespace byte past maxval.
        let start = scanner.pos + 1;
        if start > bytes.len() || !bytes[scanner.pos].is_ascii_whitespace() {
            return Err(Error::MalformedHeader("missing raster separator".into()));
        }
        let raster = &bytes[start..];
        if raster.len() < samples {
            return Err(Error::TruncatedPayload { expected: samples, found: raster.len() });
        }
        interleaved.extend(raster[..samples].iter().map(|&b| b as f64));
    }

    let mut planes = vec![Vec::with_capacity(width * height); channels];
    for chunk in interleaved.chunks(channels) {
        for (c, &v) in chunk.iter().enumerate() {
            planes[c].push(v);
        }
    }
    let space = if channels == 1 { ColorSpace::Gray } else { ColorSpace::Rgb };
    RasterImage::new(width, height, space, planes)
}

/// Serializes to binary PNM (`P5` for gray, `P6` for RGB), clamp-rounding
/// every sample to `[0, 255]`. YCbCr images must be converted back first.
pub fn save_image(image: &RasterImage) -> Result<Vec<u8>> {
    let magic = match image.color_space {
        ColorSpace::Gray => "P5",
        ColorSpace::Rgb => "P6",
        ColorSpace::YCbCr => {
            return Err(Error::WrongColorSpace { expected: "RGB or Gray", actual: "YCbCr" })
        }
    };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width, image.height).into_bytes();
    for i in 0..image.width * image.height {
        for plane in &image.planes {
            out.push(clamp_round(plane[i]));
        }
    }
    Ok(out)
}

/// Full-range BT.601 conversion between RGB and YCbCr.
///
/// Values stay real between conversions, so a convert/invert pair is exact to
/// floating-point precision.
pub fn color_convert(image: &RasterImage, direction: ColorDirection) -> Result<RasterImage> {
    let expected = match direction {
        ColorDirection::RgbToYCbCr => ColorSpace::Rgb,
        ColorDirection::YCbCrToRgb => ColorSpace::YCbCr,
    };
    if image.color_space != expected {
        return Err(Error::WrongColorSpace {
            expected: expected.name(),
            actual: image.color_space.name(),
        });
    }
    let n = image.width * image.height;
    let mut out = vec![vec![0.0; n]; 3];
    match direction {
        ColorDirection::RgbToYCbCr => {
            let (r, g, b) = (&image.planes[0], &image.planes[1], &image.planes[2]);
            for i in 0..n {
                let y = KR * r[i] + KG * g[i] + KB * b[i];
                out[0][i] = y;
                out[1][i] = 128.0 + (b[i] - y) * CB_SCALE;
                out[2][i] = 128.0 + (r[i] - y) * CR_SCALE;
            }
        }
        ColorDirection::YCbCrToRgb => {
            let (y, cb, cr) = (&image.planes[0], &image.planes[1], &image.planes[2]);
            for i in 0..n {
                let b = y[i] + (cb[i] - 128.0) / CB_SCALE;
                let r = y[i] + (cr[i] - 128.0) / CR_SCALE;
                let g = (y[i] - KR * r - KB * b) / KG;
                out[0][i] = r;
                out[1][i] = g;
                out[2][i] = b;
            }
        }
    }
    let space = match direction {
        ColorDirection::RgbToYCbCr => ColorSpace::YCbCr,
        ColorDirection::YCbCrToRgb => ColorSpace::Rgb,
    };
    let mut converted = RasterImage::new(image.width, image.height, space, out)?;
    converted.original_width = image.original_width;
    converted.original_height = image.original_height;
    Ok(converted)
}

/// Rounds dimensions up to the next multiple of `2^levels` by edge
/// replication, recording the pre-padding dimensions. Identity (and
/// idempotent) when the image is already dyadic for `levels`.
pub fn pad_to_dyadic(image: &RasterImage, levels: usize) -> Result<RasterImage> {
    if levels == 0 {
        return Err(Error::ZeroLevels);
    }
    let unit = 1usize << levels;
    let new_w = image.width.div_ceil(unit) * unit;
    let new_h = image.height.div_ceil(unit) * unit;
    if new_w == image.width && new_h == image.height {
        return Ok(image.clone());
    }
    let planes = image
        .planes
        .iter()
        .map(|p| {
            let mut out = Vec::with_capacity(new_w * new_h);
            for y in 0..new_h {
                let sy = y.min(image.height - 1);
                let row = &p[sy * image.width..(sy + 1) * image.width];
                out.extend_from_slice(row);
                out.extend(std::iter::repeat_n(row[image.width - 1], new_w - image.width));
            }
            out
        })
        .collect();
    let mut padded = RasterImage::new(new_w, new_h, image.color_space, planes)?;
    // Keep the earliest recorded original dims so repeated padding stays
    // idempotent in what it reports.
    padded.original_width = image.original_width;
    padded.original_height = image.original_height;
    Ok(padded)
}
