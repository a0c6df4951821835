//! The quantitative user model: transfer delay, image quality, and the
//! satisfaction function mapping `(quality, delay)` to a score in `[0, 1]`.
//!
//! Two satisfaction models ship. The parametric form
//! `US = IQ / (1 + (delay/delta_half)^gamma)` is monotone in both arguments
//! and doubles as the ground-truth generator for synthetic survey data. The
//! learned form is inverse-distance-weighted k-NN regression over
//! standardized survey rows — it reproduces its table exactly at `k = 1` and
//! needs no external learning stack.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Transfer delay in seconds for a file of `file_bits` at `bandwidth` bits/s.
pub fn delay(file_bits: f64, bandwidth: f64) -> Result<f64> {
    if !(bandwidth > 0.0) {
        return Err(Error::NonPositiveBandwidth(bandwidth));
    }
    if !(file_bits >= 0.0) {
        return Err(Error::InvalidQualityInputs(format!("negative file size {file_bits}")));
    }
    Ok(file_bits / bandwidth)
}

/// Inputs to the image-quality score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityInputs {
    /// Original physical size (square inches).
    pub s_orig: f64,
    /// Original resolution (dpi).
    pub r_orig: f64,
    /// Transmitted size.
    pub s_sent: f64,
    /// Transmitted resolution.
    pub r_sent: f64,
    /// Saliency concordance metric in (0, 1].
    pub scm: f64,
    /// Weights for (size ratio, resolution ratio, scm); must sum to 1.
    pub weights: [f64; 3],
}

impl QualityInputs {
    pub fn validate(&self) -> Result<()> {
        let sum: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|&w| !(w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidWeights(self.weights));
        }
        if !(self.s_orig > 0.0 && self.r_orig > 0.0) {
            return Err(Error::InvalidQualityInputs("original size/resolution must be positive".into()));
        }
        if !(self.s_sent > 0.0 && self.s_sent <= self.s_orig) {
            return Err(Error::InvalidQualityInputs(format!(
                "sent size {} outside (0, {}]",
                self.s_sent, self.s_orig
            )));
        }
        if !(self.r_sent > 0.0 && self.r_sent <= self.r_orig) {
            return Err(Error::InvalidQualityInputs(format!(
                "sent resolution {} outside (0, {}]",
                self.r_sent, self.r_orig
            )));
        }
        if !(self.scm > 0.0 && self.scm <= 1.0) {
            return Err(Error::InvalidQualityInputs(format!("scm {} outside (0, 1]", self.scm)));
        }
        Ok(())
    }
}

/// Weighted quality score in (0, 1]: transmitted/original ratios for size and
/// resolution plus the saliency concordance term.
pub fn image_quality(inputs: &QualityInputs) -> Result<f64> {
    inputs.validate()?;
    let [w1, w2, w3] = inputs.weights;
    Ok(w1 * (inputs.s_sent / inputs.s_orig) + w2 * (inputs.r_sent / inputs.r_orig) + w3 * inputs.scm)
}

// ---------------------------------------------------------------------------
// Survey data
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub iq: f64,
    pub delay_s: f64,
    pub us: f64,
}

/// Rows of `(image quality, delay, reported satisfaction)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SurveyTable {
    pub rows: Vec<SurveyRow>,
}

impl SurveyTable {
    /// CSV with header `iq,delay_s,us`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iq,delay_s,us\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.iq, r.delay_s, r.us));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for record in reader.deserialize::<SurveyRow>() {
            rows.push(record?);
        }
        Ok(Self { rows })
    }
}

/// Parameters of the parametric satisfaction form (also the survey
/// generator's ground truth).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParametricParams {
    /// Delay at which satisfaction halves (seconds).
    pub delta_half: f64,
    /// Steepness of the delay falloff.
    pub gamma: f64,
}

impl Default for ParametricParams {
    fn default() -> Self {
        Self { delta_half: 3.0, gamma: 2.0 }
    }
}

impl ParametricParams {
    pub fn evaluate(&self, iq: f64, delay_s: f64) -> f64 {
        (iq / (1.0 + pow_stable(delay_s / self.delta_half, self.gamma))).clamp(0.0, 1.0)
    }
}

// `powf` with a compile-time-constant exponent gets strength-reduced (x*x,
// sqrt, ...) which differs from the libm call by an ulp; routing the common
// exponents through explicit arithmetic keeps results bit-identical across
// call sites.
fn pow_stable(base: f64, exp: f64) -> f64 {
    if exp == 1.0 {
        base
    } else if exp == 2.0 {
        base * base
    } else {
        base.powf(exp)
    }
}

/// Default delay ceiling for survey sampling (seconds).
pub const DEFAULT_SURVEY_DELAY_MAX: f64 = 30.0;

/// Synthesizes survey rows on a seeded jittered grid over
/// `[0,1] x [0, delay_max]`, with `us` drawn from the parametric model plus
/// Gaussian noise, clamped to `[0, 1]`. Deterministic per seed.
pub fn synthesize_survey(
    generator: &ParametricParams,
    n_rows: usize,
    noise_sd: f64,
    delay_max: f64,
    seed: u64,
) -> SurveyTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = if noise_sd > 0.0 { Some(Normal::new(0.0, noise_sd).expect("sd >= 0")) } else { None };
    // jittered grid: ceil(sqrt(n)) cells per axis, one sample per visited cell
    let side = (n_rows as f64).sqrt().ceil() as usize;
    let mut rows = Vec::with_capacity(n_rows);
    'outer: for gy in 0..side {
        for gx in 0..side {
            if rows.len() == n_rows {
                break 'outer;
            }
            let iq = (gx as f64 + rng.random_range(0.0..1.0)) / side as f64;
            let delay_s = (gy as f64 + rng.random_range(0.0..1.0)) / side as f64 * delay_max;
            let iq = iq.clamp(0.0, 1.0);
            let mut us = generator.evaluate(iq, delay_s);
            if let Some(n) = &noise {
                us += n.sample(&mut rng);
            }
            rows.push(SurveyRow { iq, delay_s, us: us.clamp(0.0, 1.0) });
        }
    }
    SurveyTable { rows }
}

// ---------------------------------------------------------------------------
// Satisfaction models
// ---------------------------------------------------------------------------

/// k-NN regressor state: standardization parameters plus the training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub feature_means: [f64; 2],
    pub feature_sds: [f64; 2],
    pub rows: Vec<SurveyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SatisfactionModel {
    Parametric(ParametricParams),
    LearnedKnn(KnnModel),
}

impl SatisfactionModel {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SatisfactionModel::Parametric(_) => "parametric",
            SatisfactionModel::LearnedKnn(_) => "learned_knn",
        }
    }

    /// True when predictions are provably monotone non-increasing in delay.
    pub fn is_delay_monotone(&self) -> bool {
        matches!(self, SatisfactionModel::Parametric(_))
    }
}

/// Fits the k-NN model: records per-feature mean/sd for standardization and
/// keeps the table.
pub fn train_satisfaction(table: &SurveyTable, k: usize) -> Result<SatisfactionModel> {
    if table.rows.is_empty() {
        return Err(Error::EmptySurvey);
    }
    if k < 1 || k > table.rows.len() {
        return Err(Error::InvalidNeighborCount { k, rows: table.rows.len() });
    }
    let n = table.rows.len() as f64;
    let mean_iq = table.rows.iter().map(|r| r.iq).sum::<f64>() / n;
    let mean_delay = table.rows.iter().map(|r| r.delay_s).sum::<f64>() / n;
    let var_iq = table.rows.iter().map(|r| (r.iq - mean_iq).powi(2)).sum::<f64>() / n;
    let var_delay = table.rows.iter().map(|r| (r.delay_s - mean_delay).powi(2)).sum::<f64>() / n;
    // constant features standardize with sd 1 so distances stay finite
    let sd_iq = if var_iq > 0.0 { var_iq.sqrt() } else { 1.0 };
    let sd_delay = if var_delay > 0.0 { var_delay.sqrt() } else { 1.0 };
    Ok(SatisfactionModel::LearnedKnn(KnnModel {
        k,
        feature_means: [mean_iq, mean_delay],
        feature_sds: [sd_iq, sd_delay],
        rows: table.rows.clone(),
    }))
}

fn knn_predict(model: &KnnModel, iq: f64, delay_s: f64) -> f64 {
    let zq = (iq - model.feature_means[0]) / model.feature_sds[0];
    let zd = (delay_s - model.feature_means[1]) / model.feature_sds[1];
    let mut dists: Vec<(f64, usize)> = model
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let dq = (r.iq - model.feature_means[0]) / model.feature_sds[0] - zq;
            let dd = (r.delay_s - model.feature_means[1]) / model.feature_sds[1] - zd;
            ((dq * dq + dd * dd).sqrt(), i)
        })
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    // exact match short-circuits to the first zero-distance row
    if dists[0].0 == 0.0 {
        return model.rows[dists[0].1].us;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for &(d, i) in dists.iter().take(model.k) {
        let w = 1.0 / d;
        num += w * model.rows[i].us;
        den += w;
    }
    (num / den).clamp(0.0, 1.0)
}

/// Predicted satisfaction in `[0, 1]`.
pub fn predict_satisfaction(model: &SatisfactionModel, iq: f64, delay_s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&iq) {
        return Err(Error::PredictionInputOutOfRange(format!("iq {iq}")));
    }
    if !(delay_s >= 0.0) {
        return Err(Error::PredictionInputOutOfRange(format!("delay {delay_s}")));
    }
    Ok(predict_unchecked(model, iq, delay_s))
}

/// Range-check-free prediction for callers that validated inputs once and
/// evaluate in a hot loop.
pub(crate) fn predict_unchecked(model: &SatisfactionModel, iq: f64, delay_s: f64) -> f64 {
    match model {
        SatisfactionModel::Parametric(p) => p.evaluate(iq, delay_s),
        SatisfactionModel::LearnedKnn(m) => knn_predict(m, iq, delay_s),
    }
}

// ---------------------------------------------------------------------------
// Customers and required bandwidth
// ---------------------------------------------------------------------------

/// One customer: declared threshold, file size, and quality inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Customer {
    pub id: String,
    /// Acceptable satisfaction threshold in `[0, 1]`.
    pub tau: f64,
    /// Transmitted file size in bits.
    pub file_bits: f64,
    pub quality: QualityInputs,
    /// Objects transmitted / annotated.
    pub q: usize,
    pub p: usize,
}

impl Customer {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::InvalidScenario(format!("tau {} outside [0, 1]", self.tau)));
        }
        if !(self.file_bits > 0.0) {
            return Err(Error::InvalidScenario(format!("file_bits {} must be positive", self.file_bits)));
        }
        self.quality.validate()
    }
}

/// Result of the minimum-bandwidth search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRequirement {
    /// Smallest bandwidth meeting the threshold.
    Attainable(f64),
    /// Even `a_max` leaves satisfaction below the threshold.
    Unattainable,
}

/// Fraction of `a_max` used as the bisection's lower bracket (and the answer
/// for trivially satisfiable thresholds such as `tau = 0`).
pub const REQUIRED_BANDWIDTH_EPSILON: f64 = 1e-9;

const BISECTION_REL_TOL: f64 = 1e-6;

/// Smallest bandwidth `A` with `US(IQ, F/A) >= tau`, found by bisection on
/// `(0, a_max]` to relative tolerance 1e-6. Requires the parametric model
/// (the learned model carries no monotonicity guarantee).
pub fn required_bandwidth(
    customer: &Customer,
    model: &SatisfactionModel,
    a_max: f64,
) -> Result<BandwidthRequirement> {
    if !model.is_delay_monotone() {
        return Err(Error::NonMonotoneModel);
    }
    if !(a_max > 0.0) {
        return Err(Error::NonPositiveBandwidth(a_max));
    }
    customer.validate()?;
    let iq = image_quality(&customer.quality)?;
    let us_at = |a: f64| -> Result<f64> {
        predict_satisfaction(model, iq, delay(customer.file_bits, a)?)
    };
    if us_at(a_max)? < customer.tau {
        return Ok(BandwidthRequirement::Unattainable);
    }
    let mut lo = REQUIRED_BANDWIDTH_EPSILON * a_max;
    if us_at(lo)? >= customer.tau {
        return Ok(BandwidthRequirement::Attainable(lo));
    }
    let mut hi = a_max;
    // invariant: US(lo) < tau <= US(hi)
    while (hi - lo) / hi > BISECTION_REL_TOL {
        let mid = 0.5 * (lo + hi);
        if us_at(mid)? >= customer.tau {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(BandwidthRequirement::Attainable(hi))
}
