//! Multi-level 2D orthonormal Haar transform.
//!
//! One level maps each 2x2 block `[[a, b], [c, d]]` to
//!
//! ```text
//! LL = (a+b+c+d)/2    HL = (a-b+c-d)/2
//! LH = (a+b-c-d)/2    HH = (a-b-c+d)/2
//! ```
//!
//! and recurses on the LL output. The /2 normalization makes the basis
//! orthonormal, so coefficient-domain energy equals pixel-domain energy and
//! dropping a coefficient costs exactly its squared magnitude in pixel MSE.
//! HL is the horizontal-difference band, LH the vertical-difference band.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Band {
    Ll,
    Lh,
    Hl,
    Hh,
}

impl Band {
    pub fn name(self) -> &'static str {
        match self {
            Band::Ll => "LL",
            Band::Lh => "LH",
            Band::Hl => "HL",
            Band::Hh => "HH",
        }
    }
}

/// The three detail bands produced at one decomposition level.
#[derive(Debug, Clone, PartialEq)]
pub struct Details<B> {
    pub lh: B,
    pub hl: B,
    pub hh: B,
}

impl<B> Details<B> {
    pub fn band(&self, band: Band) -> &B {
        match band {
            Band::Lh => &self.lh,
            Band::Hl => &self.hl,
            Band::Hh => &self.hh,
            Band::Ll => panic!("LL is not a detail band"),
        }
    }
}

/// A K-level decomposition: one top LL plane plus LH/HL/HH per level.
///
/// `levels[k-1]` holds level `k`, with level 1 the finest. The plane at level
/// `k` has dimensions `(W/2^k, H/2^k)`; the top LL lives at level K. The
/// element type is generic so the same shape carries transform coefficients
/// (`Grid<f64>`), saliency values (`Grid<u64>`), and quantized bands.
#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid<B> {
    pub source_width: usize,
    pub source_height: usize,
    pub top_ll: B,
    pub levels: Vec<Details<B>>,
}

pub type WaveletPyramid = Pyramid<Grid<f64>>;

impl<B> Pyramid<B> {
    /// Number of decomposition levels K.
    pub fn k(&self) -> usize {
        self.levels.len()
    }

    /// Bands in canonical transmission order: top LL first, then detail
    /// levels from coarsest (K) to finest (1), LH before HL before HH.
    pub fn bands_canonical(&self) -> impl Iterator<Item = (usize, Band, &B)> {
        let k = self.k();
        std::iter::once((k, Band::Ll, &self.top_ll)).chain(
            self.levels
                .iter()
                .enumerate()
                .rev()
                .flat_map(|(i, d)| {
                    [(i + 1, Band::Lh, &d.lh), (i + 1, Band::Hl, &d.hl), (i + 1, Band::Hh, &d.hh)]
                }),
        )
    }

    pub fn band(&self, level: usize, band: Band) -> &B {
        match band {
            Band::Ll => {
                assert_eq!(level, self.k(), "LL exists only at the top level");
                &self.top_ll
            }
            other => self.levels[level - 1].band(other),
        }
    }
}

impl WaveletPyramid {
    /// Total coefficient count across all bands (equals `W*H`).
    pub fn coefficient_count(&self) -> usize {
        self.source_width * self.source_height
    }

    /// Sum of squared coefficients over every band.
    pub fn energy(&self) -> f64 {
        let mut e = self.top_ll.data().iter().map(|v| v * v).sum::<f64>();
        for d in &self.levels {
            for g in [&d.lh, &d.hl, &d.hh] {
                e += g.data().iter().map(|v| v * v).sum::<f64>();
            }
        }
        e
    }
}

fn check_dyadic(width: usize, height: usize, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::ZeroLevels);
    }
    let unit = 1usize << levels;
    if width == 0 || height == 0 || !width.is_multiple_of(unit) || !height.is_multiple_of(unit) {
        return Err(Error::NonDyadic { width, height, levels });
    }
    Ok(())
}

/// One analysis level: splits `input` into its four half-resolution bands.
fn split_level(input: &Grid<f64>) -> (Grid<f64>, Grid<f64>, Grid<f64>, Grid<f64>) {
    let (w2, h2) = (input.width() / 2, input.height() / 2);
    let mut ll = Grid::new(w2, h2);
    let mut lh = Grid::new(w2, h2);
    let mut hl = Grid::new(w2, h2);
    let mut hh = Grid::new(w2, h2);
    parallel::for_each_quad_rows(
        w2,
        ll.data_mut(),
        lh.data_mut(),
        hl.data_mut(),
        hh.data_mut(),
        |y, ll_row, lh_row, hl_row, hh_row| {
            let top = input.row(2 * y);
            let bottom = input.row(2 * y + 1);
            for x in 0..w2 {
                let (a, b) = (top[2 * x], top[2 * x + 1]);
                let (c, d) = (bottom[2 * x], bottom[2 * x + 1]);
                ll_row[x] = (a + b + c + d) / 2.0;
                hl_row[x] = (a - b + c - d) / 2.0;
                lh_row[x] = (a + b - c - d) / 2.0;
                hh_row[x] = (a - b - c + d) / 2.0;
            }
        },
    );
    (ll, lh, hl, hh)
}

/// One synthesis level: merges four bands back into the double-resolution plane.
fn merge_level(ll: &Grid<f64>, lh: &Grid<f64>, hl: &Grid<f64>, hh: &Grid<f64>) -> Grid<f64> {
    let (w2, h2) = (ll.width(), ll.height());
    let mut out = Grid::new(w2 * 2, h2 * 2);
    let width = out.width();
    for y in 0..h2 {
        for x in 0..w2 {
            let (s, v) = (ll.get(x, y), lh.get(x, y));
            let (h, d) = (hl.get(x, y), hh.get(x, y));
            let a = (s + h + v + d) / 2.0;
            let b = (s - h + v - d) / 2.0;
            let c = (s + h - v - d) / 2.0;
            let e = (s - h - v + d) / 2.0;
            out.data_mut()[2 * y * width + 2 * x] = a;
            out.data_mut()[2 * y * width + 2 * x + 1] = b;
            out.data_mut()[(2 * y + 1) * width + 2 * x] = c;
            out.data_mut()[(2 * y + 1) * width + 2 * x + 1] = e;
        }
    }
    out
}

/// K-level forward transform of a single plane.
pub fn haar_forward(plane: &Grid<f64>, levels: usize) -> Result<WaveletPyramid> {
    check_dyadic(plane.width(), plane.height(), levels)?;
    let mut detail_levels = Vec::with_capacity(levels);
    let (mut current, lh, hl, hh) = {
        let (ll, lh, hl, hh) = split_level(plane);
        (ll, lh, hl, hh)
    };
    detail_levels.push(Details { lh, hl, hh });
    for _ in 1..levels {
        let (ll, lh, hl, hh) = split_level(&current);
        detail_levels.push(Details { lh, hl, hh });
        current = ll;
    }
    Ok(Pyramid {
        source_width: plane.width(),
        source_height: plane.height(),
        top_ll: current,
        levels: detail_levels,
    })
}

/// Exact algebraic inverse of [`haar_forward`].
pub fn haar_inverse(pyramid: &WaveletPyramid) -> Result<Grid<f64>> {
    let k = pyramid.k();
    if k == 0 {
        return Err(Error::ZeroLevels);
    }
    check_dyadic(pyramid.source_width, pyramid.source_height, k)?;
    let mut current = pyramid.top_ll.clone();
    for (i, d) in pyramid.levels.iter().enumerate().rev() {
        let expect_w = pyramid.source_width >> (i + 1);
        let expect_h = pyramid.source_height >> (i + 1);
        for g in [&current, &d.lh, &d.hl, &d.hh] {
            if g.width() != expect_w || g.height() != expect_h {
                return Err(Error::MalformedPyramid(format!(
                    "level {} plane is {}x{}, expected {}x{}",
                    i + 1,
                    g.width(),
                    g.height(),
                    expect_w,
                    expect_h
                )));
            }
        }
        current = merge_level(&current, &d.lh, &d.hl, &d.hh);
    }
    Ok(current)
}
