//! Repository-driven object saliency ranking.
//!
//! Object importance is estimated from the customer's own transmission
//! history: for each annotated label, find the repository image containing
//! that label which is closest to the current image, then rank labels by that
//! closeness. Similarity is a spatial-pyramid match over dense
//! gradient-orientation histograms — the full visual-word pipeline would need
//! a training corpus, while orientation histograms keep the pyramid-match
//! structure self-contained.

use crate::error::{Error, Result};
use crate::imaging::{load_image, ColorSpace, RasterImage};
use crate::parallel;
use crate::saliency::SaliencyAnnotation;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::Path;

const ORIENTATION_BINS: usize = 8;

/// Default pyramid depth for similarity scoring.
pub const DEFAULT_PYRAMID_LEVELS: usize = 2;

/// One stored image with the object labels it contains.
#[derive(Debug, Clone)]
pub struct RepositoryEntry {
    pub image: RasterImage,
    pub labels: HashSet<String>,
}

/// A customer's image history.
#[derive(Debug, Clone, Default)]
pub struct Repository {
    pub owner: String,
    pub entries: Vec<RepositoryEntry>,
}

/// Manifest row: `{"image_path": ..., "labels": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_path: String,
    pub labels: Vec<String>,
}

impl Repository {
    /// Loads a JSON manifest; image paths resolve relative to the manifest's
    /// directory.
    pub fn load_manifest(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let rows: Vec<ManifestEntry> = serde_json::from_str(&text)?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        let mut entries = Vec::with_capacity(rows.len());
        for row in rows {
            let bytes = std::fs::read(dir.join(&row.image_path))?;
            entries.push(RepositoryEntry {
                image: load_image(&bytes)?,
                labels: row.labels.into_iter().collect(),
            });
        }
        Ok(Self { owner: String::new(), entries })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedObject {
    pub label: String,
    /// Similarity of the closest repository entry containing this label;
    /// 0 when the repository has no such entry.
    pub similarity: f64,
}

/// Labels ordered most-salient-first.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRanking {
    pub ranked: Vec<RankedObject>,
}

impl ObjectRanking {
    pub fn p(&self) -> usize {
        self.ranked.len()
    }

    /// The top-`q` labels, the set an encoder keeps at full priority.
    pub fn top_labels(&self, q: usize) -> HashSet<String> {
        self.ranked.iter().take(q).map(|o| o.label.clone()).collect()
    }
}

fn luma_plane(image: &RasterImage) -> Vec<f64> {
    match image.color_space() {
        ColorSpace::Gray => image.plane(0).to_vec(),
        ColorSpace::YCbCr => image.plane(0).to_vec(),
        ColorSpace::Rgb => {
            let (r, g, b) = (image.plane(0), image.plane(1), image.plane(2));
            (0..r.len()).map(|i| 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]).collect()
        }
    }
}

/// Per-level cell histograms of unsigned gradient orientation, magnitude
/// weighted and L1-normalized over the whole level. A level with zero
/// gradient mass keeps an all-zero histogram (flagged via the bool).
fn level_histogram(luma: &[f64], width: usize, height: usize, level: usize) -> (Vec<f64>, bool) {
    let cells = 1usize << level;
    let mut hist = vec![0.0; cells * cells * ORIENTATION_BINS];
    let clamp_x = |x: i64| -> usize { x.clamp(0, width as i64 - 1) as usize };
    let clamp_y = |y: i64| -> usize { y.clamp(0, height as i64 - 1) as usize };
    for y in 0..height {
        for x in 0..width {
            let gx = (luma[y * width + clamp_x(x as i64 + 1)]
                - luma[y * width + clamp_x(x as i64 - 1)])
                / 2.0;
            let gy = (luma[clamp_y(y as i64 + 1) * width + x]
                - luma[clamp_y(y as i64 - 1) * width + x])
                / 2.0;
            let magnitude = (gx * gx + gy * gy).sqrt();
            if magnitude == 0.0 {
                continue;
            }
            // unsigned orientation in [0, pi)
            let mut theta = gy.atan2(gx);
            if theta < 0.0 {
                theta += std::f64::consts::PI;
            }
            if theta >= std::f64::consts::PI {
                theta -= std::f64::consts::PI;
            }
            let bin = ((theta / std::f64::consts::PI * ORIENTATION_BINS as f64) as usize)
                .min(ORIENTATION_BINS - 1);
            let cx = (x * cells / width).min(cells - 1);
            let cy = (y * cells / height).min(cells - 1);
            hist[(cy * cells + cx) * ORIENTATION_BINS + bin] += magnitude;
        }
    }
    let mass: f64 = hist.iter().sum();
    if mass > 0.0 {
        for v in &mut hist {
            *v /= mass;
        }
        (hist, true)
    } else {
        (hist, false)
    }
}

fn intersection(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

/// Spatial-pyramid similarity in `[0, 1]`.
///
/// Level `l` partitions the image into `2^l x 2^l` cells with an 8-bin
/// orientation histogram per cell; level scores are histogram intersections
/// combined with the pyramid-match weights `w_0 = 1/2^L`,
/// `w_l = 1/2^(L-l+1)`. Symmetric, with self-similarity exactly 1, and
/// invariant to uniform brightness shifts (gradients are unchanged).
pub fn spm_similarity(a: &RasterImage, b: &RasterImage, levels: usize) -> f64 {
    let luma_a = luma_plane(a);
    let luma_b = luma_plane(b);
    let mut total = 0.0;
    for level in 0..=levels {
        let weight = if level == 0 {
            1.0 / (1u64 << levels) as f64
        } else {
            1.0 / (1u64 << (levels - level + 1)) as f64
        };
        let (ha, mass_a) = level_histogram(&luma_a, a.width(), a.height(), level);
        let (hb, mass_b) = level_histogram(&luma_b, b.width(), b.height(), level);
        let score = match (mass_a, mass_b) {
            (true, true) => intersection(&ha, &hb),
            // two gradient-free (flat) images are indistinguishable here
            (false, false) => 1.0,
            _ => 0.0,
        };
        total += weight * score;
    }
    total
}

/// Ranks the image's annotated objects by closest-repository-entry
/// similarity, most salient first.
///
/// Labels never seen in the repository rank last with similarity 0; ties
/// keep annotation order. Deterministic for fixed inputs.
pub fn rank_objects(
    image: &RasterImage,
    annotation: &SaliencyAnnotation,
    repository: &Repository,
    levels: usize,
) -> Result<ObjectRanking> {
    if annotation.boxes.is_empty() {
        return Err(Error::NoObjects);
    }
    // score each repository entry once
    let similarities: Vec<f64> =
        parallel::map_slice(&repository.entries, |e| spm_similarity(image, &e.image, levels));

    let mut ranked: Vec<(usize, RankedObject, bool)> = annotation
        .boxes
        .iter()
        .enumerate()
        .map(|(idx, b)| {
            let best = repository
                .entries
                .iter()
                .zip(&similarities)
                .filter(|(e, _)| e.labels.contains(&b.label))
                .map(|(_, &s)| s)
                .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))));
            let present = best.is_some();
            (
                idx,
                RankedObject { label: b.label.clone(), similarity: best.unwrap_or(0.0) },
                present,
            )
        })
        .collect();

    ranked.sort_by(|(ia, a, pa), (ib, b, pb)| {
        pb.cmp(pa)
            .then_with(|| b.similarity.total_cmp(&a.similarity))
            .then_with(|| ia.cmp(ib))
    });
    Ok(ObjectRanking { ranked: ranked.into_iter().map(|(_, o, _)| o).collect() })
}

/// Saliency concordance metric: the fraction `q/p` of objects transmitted.
pub fn scm(q: usize, p: usize) -> Result<f64> {
    if q < 1 || p < 1 || q > p {
        return Err(Error::InvalidObjectCounts { q, p });
    }
    Ok(q as f64 / p as f64)
}
