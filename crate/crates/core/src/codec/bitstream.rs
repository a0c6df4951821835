//! Bit-exact SGWC bitstream layout.
//!
//! All multi-byte integers are little-endian. The header carries everything
//! the decoder needs to rebuild the transmission order — bounding boxes, not
//! saliency values — followed by per-band `(mean, scale)` pairs as `f32` and
//! the selected coefficient count:
//!
//! ```text
//! magic "SGWC" | version u8 | width u32 | height u32
//! original_width u32 | original_height u32 | K u8 | channel_count u8
//! box_count u16 | boxes: (x u16, y u16, w u16, h u16, level u8)*
//! bands: (mean f32, scale f32) per channel per band, channel-major,
//!        canonical band order (top LL, then K..1 each LH, HL, HH)
//! selected_count u32 | entropy-coded payload...
//! ```

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"SGWC";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeaderBox {
    pub x: u16,
    pub y: u16,
    pub w: u16,
    pub h: u16,
    pub level: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub width: u32,
    pub height: u32,
    pub original_width: u32,
    pub original_height: u32,
    pub levels: u8,
    pub channel_count: u8,
    pub boxes: Vec<HeaderBox>,
    /// `(mean, scale)` per band: channel-major, canonical band order.
    pub band_params: Vec<(f32, f32)>,
    pub selected_count: u32,
}

impl Header {
    /// Bands per channel for a K-level decomposition.
    pub fn bands_per_channel(&self) -> usize {
        3 * self.levels as usize + 1
    }

    pub fn emit(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(64 + 9 * self.boxes.len() + 8 * self.band_params.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        out.extend_from_slice(&self.original_width.to_le_bytes());
        out.extend_from_slice(&self.original_height.to_le_bytes());
        out.push(self.levels);
        out.push(self.channel_count);
        out.extend_from_slice(&(self.boxes.len() as u16).to_le_bytes());
        for b in &self.boxes {
            out.extend_from_slice(&b.x.to_le_bytes());
            out.extend_from_slice(&b.y.to_le_bytes());
            out.extend_from_slice(&b.w.to_le_bytes());
            out.extend_from_slice(&b.h.to_le_bytes());
            out.push(b.level);
        }
        for &(mean, scale) in &self.band_params {
            out.extend_from_slice(&mean.to_le_bytes());
            out.extend_from_slice(&scale.to_le_bytes());
        }
        out.extend_from_slice(&self.selected_count.to_le_bytes());
        out
    }

    /// Parses a header, returning it and the remaining payload bytes.
    pub fn parse(bytes: &[u8]) -> Result<(Header, &[u8])> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::BadVersion(version));
        }
        let width = r.u32()?;
        let height = r.u32()?;
        let original_width = r.u32()?;
        let original_height = r.u32()?;
        let levels = r.u8()?;
        let channel_count = r.u8()?;
        let box_count = r.u16()?;
        let mut boxes = Vec::with_capacity(box_count as usize);
        for _ in 0..box_count {
            boxes.push(HeaderBox {
                x: r.u16()?,
                y: r.u16()?,
                w: r.u16()?,
                h: r.u16()?,
                level: r.u8()?,
            });
        }
        let band_count = channel_count as usize * (3 * levels as usize + 1);
        let mut band_params = Vec::with_capacity(band_count);
        for _ in 0..band_count {
            band_params.push((r.f32()?, r.f32()?));
        }
        let selected_count = r.u32()?;
        let header = Header {
            width,
            height,
            original_width,
            original_height,
            levels,
            channel_count,
            boxes,
            band_params,
            selected_count,
        };
        Ok((header, &bytes[r.pos..]))
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::TruncatedHeader);
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("length checked")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("length checked")))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().expect("length checked")))
    }
}

/// A parsed or freshly encoded bitstream: header plus entropy-coded payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Bitstream {
    pub header: Header,
    pub payload: Vec<u8>,
}

impl Bitstream {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header.emit();
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, payload) = Header::parse(bytes)?;
        Ok(Self { header, payload: payload.to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_header() -> Header {
        Header {
            width: 64,
            height: 48,
            original_width: 60,
            original_height: 45,
            levels: 3,
            channel_count: 3,
            boxes: vec![
                HeaderBox { x: 1, y: 2, w: 10, h: 12, level: 2 },
                HeaderBox { x: 30, y: 8, w: 6, h: 6, level: 1 },
            ],
            band_params: (0..30).map(|i| (i as f32 * 0.5, i as f32 * 0.25)).collect(),
            selected_count: 1234,
        }
    }

    #[test]
    fn header_roundtrip_is_field_exact() {
        let header = sample_header();
        let mut bytes = header.emit();
        bytes.extend_from_slice(&[9, 9, 9]);
        let (parsed, payload) = Header::parse(&bytes).unwrap();
        assert_eq!(parsed, header);
        assert_eq!(payload, &[9, 9, 9]);
    }

    #[test]
    fn bad_magic_is_rejected() {
        let mut bytes = sample_header().emit();
        bytes[0] = b'X';
        assert!(matches!(Header::parse(&bytes), Err(Error::BadMagic)));
    }

    #[test]
    fn bad_version_is_rejected() {
        let mut bytes = sample_header().emit();
        bytes[4] = 99;
        assert!(matches!(Header::parse(&bytes), Err(Error::BadVersion(99))));
    }

    #[test]
    fn truncation_is_rejected() {
        let bytes = sample_header().emit();
        for cut in [3, 10, bytes.len() - 1] {
            assert!(matches!(Header::parse(&bytes[..cut]), Err(Error::TruncatedHeader)));
        }
    }
}
