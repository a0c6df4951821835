//! Spatial saliency maps, their wavelet-domain counterpart, and the
//! transmission order they induce.
//!
//! Saliency starts as a per-pixel grid: background pixels get 1, pixels
//! inside an annotated box of level `k'` get `4^k' + 1`. The map is folded
//! into the wavelet domain by summing 2x2 blocks per level (so a uniform
//! background scales by exactly 4 each level), replicated from the LL chain
//! into the detail bands, and finally sorted into a deterministic
//! highest-saliency-first coefficient order. The `+1` gives salient regions a
//! head start of `k'` levels over the background.
//!
//! All saliency arithmetic is integer (`u64`), so equal inputs produce
//! byte-identical orders on every platform.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::parallel;
use crate::wavelet::{Band, Details, Pyramid};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Highest box level accepted; keeps `4^k'` sums comfortably inside `u64`
/// for any image up to 2^26 pixels.
pub const MAX_SALIENCY_LEVEL: u32 = 15;

/// One rectangular salient region in padded pixel coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaliencyBox {
    pub label: String,
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
    /// Head-start level `k'` (>= 1); the region's spatial saliency is `4^k' + 1`.
    pub level: u32,
}

impl SaliencyBox {
    pub fn spatial_value(&self) -> u64 {
        (1u64 << (2 * self.level)) + 1
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        (x as u64) >= self.x as u64
            && (x as u64) < self.x as u64 + self.w as u64
            && (y as u64) >= self.y as u64
            && (y as u64) < self.y as u64 + self.h as u64
    }
}

/// Bounding-box annotation sidecar: a JSON list of
/// `{label, x, y, w, h, level}` objects.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SaliencyAnnotation {
    pub boxes: Vec<SaliencyBox>,
}

impl SaliencyAnnotation {
    pub fn from_json(json: &str) -> Result<Self> {
        let ann: Self = serde_json::from_str(json)?;
        ann.validate_labels()?;
        Ok(ann)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.boxes).expect("annotation serializes")
    }

    pub fn labels(&self) -> Vec<&str> {
        self.boxes.iter().map(|b| b.label.as_str()).collect()
    }

    fn validate_labels(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for b in &self.boxes {
            if !seen.insert(b.label.as_str()) {
                return Err(Error::DuplicateLabel(b.label.clone()));
            }
        }
        Ok(())
    }
}

fn validate_box(b: &SaliencyBox, width: usize, height: usize) -> Result<()> {
    if b.level < 1 || b.level > MAX_SALIENCY_LEVEL {
        return Err(Error::SaliencyLevelOutOfRange(b.level));
    }
    let fits = b.w > 0
        && b.h > 0
        && (b.x as u64 + b.w as u64) <= width as u64
        && (b.y as u64 + b.h as u64) <= height as u64;
    if !fits {
        return Err(Error::BoxOutOfBounds {
            label: b.label.clone(),
            x: b.x,
            y: b.y,
            w: b.w,
            h: b.h,
            width,
            height,
        });
    }
    Ok(())
}

/// Builds the spatial saliency map for padded dimensions `(width, height)`.
///
/// Background pixels are 1. Pixels covered by a box get `4^k' + 1`;
/// overlapping boxes take the maximum. When `selected_labels` is given, boxes
/// whose label is absent are demoted to background rather than erased.
pub fn rasterize_saliency(
    annotation: &SaliencyAnnotation,
    dims: (usize, usize),
    levels: usize,
    selected_labels: Option<&HashSet<String>>,
) -> Result<Grid<u64>> {
    let (width, height) = dims;
    if levels == 0 {
        return Err(Error::ZeroLevels);
    }
    let unit = 1usize << levels;
    if width == 0 || height == 0 || !width.is_multiple_of(unit) || !height.is_multiple_of(unit) {
        return Err(Error::NonDyadic { width, height, levels });
    }
    annotation.validate_labels()?;
    let mut map = Grid::filled(width, height, 1u64);
    for b in &annotation.boxes {
        validate_box(b, width, height)?;
        if let Some(selected) = selected_labels {
            if !selected.contains(&b.label) {
                continue;
            }
        }
        let value = b.spatial_value();
        for y in b.y as usize..(b.y + b.h) as usize {
            for x in b.x as usize..(b.x + b.w) as usize {
                if map.get(x, y) < value {
                    map.set(x, y, value);
                }
            }
        }
    }
    Ok(map)
}

/// Recursively folds the spatial map into the wavelet domain.
///
/// Returns the LL chain `[s_w^0, s_w^1, ..., s_w^K]` where `s_w^0` is the
/// spatial map and each next level sums disjoint 2x2 blocks of the previous.
/// Integer arithmetic throughout, so the total mass is conserved exactly:
/// `sum(s_w^K) == sum(s_w^0)`.
pub fn wavelet_saliency(spatial: &Grid<u64>, levels: usize) -> Result<Vec<Grid<u64>>> {
    if levels == 0 {
        return Err(Error::ZeroLevels);
    }
    let unit = 1usize << levels;
    if !spatial.width().is_multiple_of(unit) || !spatial.height().is_multiple_of(unit) {
        return Err(Error::NonDyadic { width: spatial.width(), height: spatial.height(), levels });
    }
    let mut chain = Vec::with_capacity(levels + 1);
    chain.push(spatial.clone());
    for _ in 0..levels {
        let prev = chain.last().expect("chain is non-empty");
        let (w2, h2) = (prev.width() / 2, prev.height() / 2);
        let mut next = Grid::new(w2, h2);
        for y in 0..h2 {
            for x in 0..w2 {
                let sum = prev.get(2 * x, 2 * y)
                    + prev.get(2 * x + 1, 2 * y)
                    + prev.get(2 * x, 2 * y + 1)
                    + prev.get(2 * x + 1, 2 * y + 1);
                next.set(x, y, sum);
            }
        }
        chain.push(next);
    }
    Ok(chain)
}

/// Saliency values arranged in the same shape as a coefficient pyramid.
pub type SaliencyPyramid = Pyramid<Grid<u64>>;

/// Copies the LL-chain saliency of each level into that level's LH/HL/HH
/// slots; the top LL keeps its own values.
pub fn replicate_bands(ll_chain: &[Grid<u64>]) -> Result<SaliencyPyramid> {
    if ll_chain.len() < 2 {
        return Err(Error::ZeroLevels);
    }
    let spatial = &ll_chain[0];
    for (k, g) in ll_chain.iter().enumerate() {
        if g.width() != spatial.width() >> k || g.height() != spatial.height() >> k {
            return Err(Error::MalformedPyramid(format!(
                "chain level {} is {}x{}, expected {}x{}",
                k,
                g.width(),
                g.height(),
                spatial.width() >> k,
                spatial.height() >> k
            )));
        }
    }
    let levels = ll_chain[1..]
        .iter()
        .map(|g| Details { lh: g.clone(), hl: g.clone(), hh: g.clone() })
        .collect();
    Ok(Pyramid {
        source_width: spatial.width(),
        source_height: spatial.height(),
        top_ll: ll_chain.last().expect("chain is non-empty").clone(),
        levels,
    })
}

/// Address of one coefficient inside a pyramid.
///
/// `level` is the decomposition level (1 = finest); the LL band exists only
/// at the top level K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoeffAddr {
    pub level: u8,
    pub band: Band,
    pub row: u32,
    pub col: u32,
}

/// Deterministic transmission order: all coefficient addresses sorted by
/// saliency descending, ties broken by level descending (coarse first), band
/// `LL < LH < HL < HH`, then row-major position.
pub fn order_coefficients(saliency: &SaliencyPyramid) -> Vec<CoeffAddr> {
    let mut keyed: Vec<(u64, CoeffAddr)> =
        Vec::with_capacity(saliency.source_width * saliency.source_height);
    for (level, band, grid) in saliency.bands_canonical() {
        for row in 0..grid.height() {
            for col in 0..grid.width() {
                keyed.push((
                    grid.get(col, row),
                    CoeffAddr { level: level as u8, band, row: row as u32, col: col as u32 },
                ));
            }
        }
    }
    parallel::sort_by(&mut keyed, |(sa, a), (sb, b)| {
        sb.cmp(sa)
            .then_with(|| b.level.cmp(&a.level))
            .then_with(|| a.band.cmp(&b.band))
            .then_with(|| a.row.cmp(&b.row))
            .then_with(|| a.col.cmp(&b.col))
    });
    keyed.into_iter().map(|(_, addr)| addr).collect()
}

/// Convenience: spatial map -> chain -> replicated pyramid -> order.
pub fn transmission_order(
    annotation: &SaliencyAnnotation,
    dims: (usize, usize),
    levels: usize,
    selected_labels: Option<&HashSet<String>>,
) -> Result<Vec<CoeffAddr>> {
    let spatial = rasterize_saliency(annotation, dims, levels, selected_labels)?;
    let chain = wavelet_saliency(&spatial, levels)?;
    Ok(order_coefficients(&replicate_bands(&chain)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boxed(label: &str, x: u32, y: u32, w: u32, h: u32, level: u32) -> SaliencyBox {
        SaliencyBox { label: label.into(), x, y, w, h, level }
    }

    #[test]
    fn empty_annotation_gives_all_ones() {
        let ann = SaliencyAnnotation::default();
        let map = rasterize_saliency(&ann, (8, 8), 2, None).unwrap();
        assert!(map.data().iter().all(|&v| v == 1));
    }

    #[test]
    fn full_frame_box_level_one() {
        let ann = SaliencyAnnotation { boxes: vec![boxed("a", 0, 0, 8, 8, 1)] };
        let map = rasterize_saliency(&ann, (8, 8), 1, None).unwrap();
        assert!(map.data().iter().all(|&v| v == 5));
    }

    #[test]
    fn overlap_takes_maximum() {
        let ann = SaliencyAnnotation {
            boxes: vec![boxed("a", 0, 0, 4, 4, 1), boxed("b", 2, 2, 4, 4, 2)],
        };
        let map = rasterize_saliency(&ann, (8, 8), 1, None).unwrap();
        assert_eq!(map.get(3, 3), 17);
        assert_eq!(map.get(0, 0), 5);
        assert_eq!(map.get(7, 7), 1);
    }

    #[test]
    fn unselected_labels_revert_to_background() {
        let ann = SaliencyAnnotation {
            boxes: vec![boxed("keep", 0, 0, 2, 2, 1), boxed("drop", 4, 4, 2, 2, 1)],
        };
        let selected: HashSet<String> = ["keep".to_string()].into();
        let map = rasterize_saliency(&ann, (8, 8), 1, Some(&selected)).unwrap();
        assert_eq!(map.get(0, 0), 5);
        assert_eq!(map.get(4, 4), 1);
    }

    #[test]
    fn out_of_bounds_box_rejected() {
        let ann = SaliencyAnnotation { boxes: vec![boxed("a", 6, 6, 4, 4, 1)] };
        assert!(matches!(
            rasterize_saliency(&ann, (8, 8), 1, None),
            Err(Error::BoxOutOfBounds { .. })
        ));
    }

    #[test]
    fn chain_sums_2x2_blocks() {
        let spatial = Grid::from_vec(2, 2, vec![1, 2, 3, 4]).unwrap();
        let chain = wavelet_saliency(&spatial, 1).unwrap();
        assert_eq!(chain[1].data(), &[10]);
    }

    #[test]
    fn uniform_map_scales_by_four_per_level() {
        let spatial = Grid::filled(16, 16, 1u64);
        let chain = wavelet_saliency(&spatial, 3).unwrap();
        for (k, grid) in chain.iter().enumerate() {
            let expected = 4u64.pow(k as u32);
            assert!(grid.data().iter().all(|&v| v == expected), "level {k}");
        }
    }

    #[test]
    fn single_hot_pixel() {
        let mut spatial = Grid::filled(4, 4, 1u64);
        spatial.set(1, 1, 17);
        let chain = wavelet_saliency(&spatial, 1).unwrap();
        assert_eq!(chain[1].get(0, 0), 20);
        assert_eq!(chain[1].get(1, 0), 4);
        assert_eq!(chain[1].get(0, 1), 4);
        assert_eq!(chain[1].get(1, 1), 4);
    }

    #[test]
    fn mass_is_conserved_exactly() {
        for k in 1..=4 {
            let ann = SaliencyAnnotation {
                boxes: vec![boxed("a", 3, 5, 20, 9, 2), boxed("b", 40, 8, 11, 30, 1)],
            };
            let spatial = rasterize_saliency(&ann, (64, 64), k, None).unwrap();
            let chain = wavelet_saliency(&spatial, k).unwrap();
            let spatial_sum: u64 = spatial.data().iter().sum();
            let top_sum: u64 = chain[k].data().iter().sum();
            assert_eq!(spatial_sum, top_sum, "K={k}");
        }
    }

    #[test]
    fn replication_copies_ll_chain_into_details() {
        let mut spatial = Grid::filled(4, 4, 1u64);
        spatial.set(0, 0, 5);
        let chain = wavelet_saliency(&spatial, 2).unwrap();
        let pyr = replicate_bands(&chain).unwrap();
        assert_eq!(pyr.levels[0].lh, chain[1]);
        assert_eq!(pyr.levels[0].hl, chain[1]);
        assert_eq!(pyr.levels[0].hh, chain[1]);
        assert_eq!(pyr.top_ll, chain[2]);
    }

    #[test]
    fn two_by_two_pyramid_has_four_values() {
        let spatial = Grid::filled(2, 2, 3u64);
        let chain = wavelet_saliency(&spatial, 1).unwrap();
        let pyr = replicate_bands(&chain).unwrap();
        assert_eq!(pyr.top_ll.data(), &[12]);
        assert_eq!(pyr.levels[0].lh.data(), &[12]);
        assert_eq!(pyr.levels[0].hl.data(), &[12]);
        assert_eq!(pyr.levels[0].hh.data(), &[12]);
    }

    #[test]
    fn uniform_order_is_pure_tiebreak_order() {
        let spatial = Grid::filled(8, 8, 1u64);
        let chain = wavelet_saliency(&spatial, 2).unwrap();
        let order = order_coefficients(&replicate_bands(&chain).unwrap());
        // Uniform saliency still differs per level (4^k), so coarse levels lead;
        // inside a level the tie-break applies.
        assert_eq!(order.len(), 64);
        let level2: Vec<_> = order.iter().take(16).map(|a| (a.level, a.band)).collect();
        assert!(level2.iter().all(|&(l, _)| l == 2));
        assert_eq!(level2[0], (2, Band::Ll));
        assert_eq!(level2[4], (2, Band::Lh));
        assert_eq!(level2[8], (2, Band::Hl));
        assert_eq!(level2[12], (2, Band::Hh));
        assert!(order.iter().skip(16).all(|a| a.level == 1));
    }

    #[test]
    fn order_is_a_permutation() {
        let ann = SaliencyAnnotation { boxes: vec![boxed("a", 2, 2, 3, 3, 1)] };
        let order = transmission_order(&ann, (8, 8), 2, None).unwrap();
        assert_eq!(order.len(), 64);
        let unique: HashSet<_> = order.iter().copied().collect();
        assert_eq!(unique.len(), 64);
    }

    /// Brute-force head-start check: compute the full saliency pyramid and
    /// verify pairwise that in-box coefficients precede pure-background
    /// coefficients of the same level, and that the k'=1 head start carries
    /// box level-k coefficients past background level-(k+1) LL ones.
    #[test]
    fn head_start_order_brute_force() {
        let ann = SaliencyAnnotation { boxes: vec![boxed("a", 8, 8, 8, 8, 1)] };
        let dims = (32, 32);
        let spatial = rasterize_saliency(&ann, dims, 2, None).unwrap();
        let chain = wavelet_saliency(&spatial, 2).unwrap();
        let pyr = replicate_bands(&chain).unwrap();
        let order = order_coefficients(&pyr);
        let rank: std::collections::HashMap<CoeffAddr, usize> =
            order.iter().enumerate().map(|(i, &a)| (a, i)).collect();

        let saliency_of = |addr: &CoeffAddr| -> u64 {
            pyr.band(addr.level as usize, addr.band).get(addr.col as usize, addr.row as usize)
        };
        // A cell is "in box" when its spatial support intersects the box,
        // "pure background" when it does not.
        let in_box = |addr: &CoeffAddr| -> bool {
            let scale = 1usize << addr.level;
            let x0 = addr.col as usize * scale;
            let y0 = addr.row as usize * scale;
            let b = &ann.boxes[0];
            x0 < (b.x + b.w) as usize
                && x0 + scale > b.x as usize
                && y0 < (b.y + b.h) as usize
                && y0 + scale > b.y as usize
        };

        for a in &order {
            for b in &order {
                if a.level == b.level && in_box(a) && !in_box(b) {
                    assert!(
                        rank[a] < rank[b],
                        "in-box {a:?} (sal {}) should precede background {b:?} (sal {})",
                        saliency_of(a),
                        saliency_of(b)
                    );
                }
            }
        }
        // Box fully covers level-1 cells with saliency 4*5=20 > background
        // level-2 LL saliency 16: those detail coefficients arrive earlier.
        let box_l1 = CoeffAddr { level: 1, band: Band::Lh, row: 5, col: 5 };
        let bg_l2 = CoeffAddr { level: 2, band: Band::Ll, row: 0, col: 0 };
        assert_eq!(saliency_of(&box_l1), 20);
        assert_eq!(saliency_of(&bg_l2), 16);
        assert!(rank[&box_l1] < rank[&bg_l2]);
    }

    #[test]
    fn order_is_deterministic() {
        let ann = SaliencyAnnotation {
            boxes: vec![boxed("a", 0, 0, 4, 4, 2), boxed("b", 8, 8, 4, 4, 1)],
        };
        let a = transmission_order(&ann, (16, 16), 3, None).unwrap();
        let b = transmission_order(&ann, (16, 16), 3, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn annotation_json_roundtrip() {
        let ann = SaliencyAnnotation {
            boxes: vec![boxed("ball", 1, 2, 3, 4, 2), boxed("player", 5, 6, 7, 8, 1)],
        };
        let parsed = SaliencyAnnotation::from_json(&ann.to_json()).unwrap();
        assert_eq!(ann, parsed);
    }

    #[test]
    fn duplicate_labels_rejected() {
        let json = r#"[{"label":"x","x":0,"y":0,"w":1,"h":1,"level":1},
                       {"label":"x","x":2,"y":2,"w":1,"h":1,"level":1}]"#;
        assert!(matches!(SaliencyAnnotation::from_json(json), Err(Error::DuplicateLabel(_))));
    }
}
