//! Scenario config parsing, validation, and the end-to-end simulation:
//! measure or take each customer's file size, derive SCM and image quality,
//! optimize the bandwidth split, and emit the per-customer report.

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::CliError;
use sgwc::allocator::{
    allocate_metaheuristic, dissatisfaction, satisfactions, Objective, Scenario, Strategy,
    StrategyParams,
};
use sgwc::codec::{encode_image, EncodeConfig};
use sgwc::imaging::load_image;
use sgwc::ranking::{rank_objects, scm, Repository};
use sgwc::saliency::SaliencyAnnotation;
use sgwc::satisfaction::{
    train_satisfaction, Customer, ParametricParams, QualityInputs, SatisfactionModel, SurveyTable,
};

// ---------------------------------------------------------------------------
// Config schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub bandwidth_bits_per_s: f64,
    pub objective: Objective,
    #[serde(default)]
    pub a_min: f64,
    pub optimizer: OptimizerConfig,
    pub model: ModelConfig,
    pub customers: Vec<CustomerConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub strategy: Strategy,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Strategy-specific overrides; missing fields take the defaults.
    #[serde(default)]
    pub params: Option<serde_json::Value>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Parametric {
        #[serde(default = "default_delta_half")]
        delta_half: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
    Knn {
        survey_csv: String,
        #[serde(default = "default_k")]
        k: usize,
    },
}

fn default_delta_half() -> f64 {
    3.0
}

fn default_gamma() -> f64 {
    2.0
}

fn default_k() -> usize {
    5
}

fn default_levels() -> usize {
    4
}

fn default_budget() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomerConfig {
    pub id: String,
    pub tau: f64,
    pub weights: [f64; 3],
    pub s_orig: f64,
    pub r_orig: f64,
    pub s_sent: f64,
    pub r_sent: f64,
    /// Measured-file route: run this image through the codec.
    #[serde(default)]
    pub image_path: Option<String>,
    #[serde(default)]
    pub annotations_path: Option<String>,
    #[serde(default)]
    pub repository_manifest: Option<String>,
    /// Codec settings for the measured route.
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_budget")]
    pub budget: f64,
    /// Analytic route: take the file size as given.
    #[serde(default)]
    pub file_bits: Option<f64>,
    /// Objects transmitted (defaults to all annotated objects).
    #[serde(default)]
    pub q: Option<usize>,
    /// Object count for the analytic route (defaults to 1).
    #[serde(default)]
    pub p: Option<usize>,
}

/// Static schema checks, reported with JSON paths.
fn validate(config: &ScenarioConfig) -> Vec<String> {
    let mut errors = Vec::new();
    if !(config.bandwidth_bits_per_s > 0.0) {
        errors.push(format!(
            "bandwidth_bits_per_s: must be positive, got {}",
            config.bandwidth_bits_per_s
        ));
    }
    if !(config.a_min >= 0.0) {
        errors.push(format!("a_min: must be non-negative, got {}", config.a_min));
    }
    if config.customers.is_empty() {
        errors.push("customers: must not be empty".into());
    }
    if config.customers.len() as f64 * config.a_min > config.bandwidth_bits_per_s {
        errors.push("a_min: n * a_min exceeds bandwidth_bits_per_s".into());
    }
    if let ModelConfig::Knn { k, survey_csv } = &config.model {
        if *k < 1 {
            errors.push(format!("model.k: must be at least 1, got {k}"));
        }
        if survey_csv.is_empty() {
            errors.push("model.survey_csv: must not be empty".into());
        }
    }
    for (i, c) in config.customers.iter().enumerate() {
        let path = |field: &str| format!("customers[{i}].{field}");
        if !(0.0..=1.0).contains(&c.tau) {
            errors.push(format!("{}: must be in [0, 1], got {}", path("tau"), c.tau));
        }
        let weight_sum: f64 = c.weights.iter().sum();
        if c.weights.iter().any(|&w| !(w >= 0.0)) || (weight_sum - 1.0).abs() > 1e-9 {
            errors.push(format!(
                "{}: must be non-negative and sum to 1, got {:?}",
                path("weights"),
                c.weights
            ));
        }
        if !(c.s_orig > 0.0 && c.s_sent > 0.0 && c.s_sent <= c.s_orig) {
            errors.push(format!("{}: need 0 < s_sent <= s_orig", path("s_sent")));
        }
        if !(c.r_orig > 0.0 && c.r_sent > 0.0 && c.r_sent <= c.r_orig) {
            errors.push(format!("{}: need 0 < r_sent <= r_orig", path("r_sent")));
        }
        match (&c.image_path, &c.file_bits) {
            (None, None) => errors.push(format!(
                "{}: either image_path or file_bits is required",
                path("image_path")
            )),
            (Some(_), Some(_)) => errors.push(format!(
                "{}: image_path and file_bits are mutually exclusive",
                path("file_bits")
            )),
            (Some(_), None) => {
                if c.levels == 0 {
                    errors.push(format!("{}: must be at least 1", path("levels")));
                }
                if !(c.budget > 0.0 && c.budget <= 1.0) {
                    errors.push(format!("{}: must be in (0, 1], got {}", path("budget"), c.budget));
                }
            }
            (None, Some(bits)) => {
                if !(*bits > 0.0) {
                    errors.push(format!("{}: must be positive, got {bits}", path("file_bits")));
                }
            }
        }
        if let Some(q) = c.q {
            if q < 1 {
                errors.push(format!("{}: must be at least 1", path("q")));
            }
        }
        if let (Some(q), Some(p)) = (c.q, c.p) {
            if q > p {
                errors.push(format!("{}: q {} exceeds p {}", path("q"), q, p));
            }
        }
    }
    errors
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

struct PreparedCustomer {
    customer: Customer,
    scm_value: f64,
}

fn resolve(base: &Path, relative: &str) -> PathBuf {
    let p = Path::new(relative);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn build_model(config: &ModelConfig, base: &Path) -> anyhow::Result<SatisfactionModel> {
    match config {
        ModelConfig::Parametric { delta_half, gamma } => {
            if !(*delta_half > 0.0 && *gamma > 0.0) {
                bail!("parametric model requires positive delta_half and gamma");
            }
            Ok(SatisfactionModel::Parametric(ParametricParams {
                delta_half: *delta_half,
                gamma: *gamma,
            }))
        }
        ModelConfig::Knn { survey_csv, k } => {
            let path = resolve(base, survey_csv);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading survey {}", path.display()))?;
            let table = SurveyTable::from_csv(&text)?;
            Ok(train_satisfaction(&table, *k)?)
        }
    }
}

fn prepare_customer(
    index: usize,
    config: &CustomerConfig,
    base: &Path,
    verbose: bool,
) -> anyhow::Result<PreparedCustomer> {
    let ctx = format!("customers[{index}] ({})", config.id);
    let (file_bits, q, p) = match &config.image_path {
        Some(image_rel) => {
            let image_path = resolve(base, image_rel);
            let bytes = std::fs::read(&image_path)
                .with_context(|| format!("{ctx}: reading image {}", image_path.display()))?;
            let image = load_image(&bytes).with_context(|| ctx.clone())?;
            let annotation = match &config.annotations_path {
                Some(rel) => {
                    let path = resolve(base, rel);
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("{ctx}: reading annotations {}", path.display()))?;
                    SaliencyAnnotation::from_json(&text).with_context(|| ctx.clone())?
                }
                None => SaliencyAnnotation::default(),
            };
            let p = if annotation.boxes.is_empty() {
                config.p.unwrap_or(1)
            } else {
                annotation.boxes.len()
            };
            let q = config.q.unwrap_or(p);
            if q < 1 || q > p {
                bail!("{ctx}: q {q} outside 1..={p}");
            }
            let selected: Option<HashSet<String>> = if q < p {
                let labels = match &config.repository_manifest {
                    Some(rel) => {
                        let manifest = resolve(base, rel);
                        let repository = Repository::load_manifest(&manifest)
                            .with_context(|| format!("{ctx}: loading repository"))?;
                        let ranking = rank_objects(
                            &image,
                            &annotation,
                            &repository,
                            sgwc::ranking::DEFAULT_PYRAMID_LEVELS,
                        )
                        .with_context(|| ctx.clone())?;
                        ranking.top_labels(q)
                    }
                    // no history to rank with: keep the first q annotated objects
                    None => annotation.labels().iter().take(q).map(|s| s.to_string()).collect(),
                };
                Some(labels)
            } else {
                None
            };
            let encode_config = EncodeConfig {
                levels: config.levels,
                budget_fraction: config.budget,
                selected_labels: selected,
            };
            let bitstream =
                encode_image(&image, &annotation, &encode_config).with_context(|| ctx.clone())?;
            let bits = (bitstream.to_bytes().len() * 8) as f64;
            if verbose {
                eprintln!("{ctx}: measured {} bits (budget {})", bits, config.budget);
            }
            (bits, q, p)
        }
        None => {
            let p = config.p.unwrap_or(1);
            let q = config.q.unwrap_or(p);
            if q < 1 || q > p {
                bail!("{ctx}: q {q} outside 1..={p}");
            }
            (config.file_bits.expect("validated"), q, p)
        }
    };
    let scm_value = scm(q, p).with_context(|| ctx.clone())?;
    let quality = QualityInputs {
        s_orig: config.s_orig,
        r_orig: config.r_orig,
        s_sent: config.s_sent,
        r_sent: config.r_sent,
        scm: scm_value,
        weights: config.weights,
    };
    Ok(PreparedCustomer {
        customer: Customer {
            id: config.id.clone(),
            tau: config.tau,
            file_bits,
            quality,
            q,
            p,
        },
        scm_value,
    })
}

fn strategy_params(optimizer: &OptimizerConfig) -> anyhow::Result<StrategyParams> {
    let defaults = StrategyParams::defaults(optimizer.strategy);
    let Some(value) = &optimizer.params else {
        return Ok(defaults);
    };
    let params = match optimizer.strategy {
        Strategy::Sa => StrategyParams::Sa(serde_json::from_value(value.clone())?),
        Strategy::Ga => StrategyParams::Ga(serde_json::from_value(value.clone())?),
        Strategy::Tabu => StrategyParams::Tabu(serde_json::from_value(value.clone())?),
    };
    Ok(params)
}

pub fn cmd_simulate(
    config_path: &Path,
    report_path: &Path,
    default_seed: u64,
    verbose: bool,
) -> Result<(), CliError> {
    let started = Instant::now();
    let text = std::fs::read_to_string(config_path)
        .with_context(|| format!("reading config {}", config_path.display()))?;
    let config: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Schema(e.to_string()))?;
    let schema_errors = validate(&config);
    if !schema_errors.is_empty() {
        return Err(CliError::Schema(schema_errors.join("\n")));
    }

    let base = config_path.parent().unwrap_or_else(|| Path::new("."));
    let model = build_model(&config.model, base)?;
    let prepared: Vec<PreparedCustomer> = config
        .customers
        .iter()
        .enumerate()
        .map(|(i, c)| prepare_customer(i, c, base, verbose))
        .collect::<anyhow::Result<_>>()?;

    let scenario = Scenario {
        customers: prepared.iter().map(|p| p.customer.clone()).collect(),
        total_bandwidth: config.bandwidth_bits_per_s,
        objective: config.objective,
        model,
        a_min: config.a_min,
    };
    let seed = config.optimizer.seed.unwrap_or(default_seed);
    let params = strategy_params(&config.optimizer)?;
    let allocation = allocate_metaheuristic(&scenario, &params, seed)?;

    // reassert the budget before anything is written
    let total_allocated: f64 = allocation.a.iter().sum();
    if total_allocated > scenario.total_bandwidth {
        return Err(CliError::Domain(anyhow!(
            "allocation exceeds budget: {total_allocated} > {}",
            scenario.total_bandwidth
        )));
    }

    let us = satisfactions(&allocation.a, &scenario)?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "customer_id",
            "F_bits",
            "A_bits_per_s",
            "delay_s",
            "iq",
            "scm",
            "us",
            "tau",
            "dissatisfaction",
        ])
        .map_err(|e| anyhow!(e))?;
    let mut aggregate: f64 = 0.0;
    for (i, p) in prepared.iter().enumerate() {
        let a_i = allocation.a[i];
        let delay_s = if a_i > 0.0 { p.customer.file_bits / a_i } else { f64::INFINITY };
        let iq = sgwc::satisfaction::image_quality(&p.customer.quality)?;
        let term = dissatisfaction(config.objective, us[i], p.customer.tau);
        aggregate = match config.objective {
            Objective::MaxAbs => aggregate.max(term),
            _ => aggregate + term,
        };
        writer
            .write_record([
                p.customer.id.as_str(),
                &p.customer.file_bits.to_string(),
                &a_i.to_string(),
                &delay_s.to_string(),
                &iq.to_string(),
                &p.scm_value.to_string(),
                &us[i].to_string(),
                &p.customer.tau.to_string(),
                &term.to_string(),
            ])
            .map_err(|e| anyhow!(e))?;
    }
    if (aggregate - allocation.objective_value).abs() > 1e-9 {
        return Err(CliError::Domain(anyhow!(
            "report aggregate {aggregate} disagrees with objective {}",
            allocation.objective_value
        )));
    }

    let csv_bytes = writer.into_inner().map_err(|e| anyhow!(e.to_string()))?;
    std::fs::write(report_path, &csv_bytes)
        .with_context(|| format!("writing report {}", report_path.display()))?;

    let footer = serde_json::json!({
        "objective_value": allocation.objective_value,
        "evaluations": allocation.evaluations,
        "wall_ms": started.elapsed().as_millis() as u64,
        "seed": allocation.seed,
    });
    let footer_path = report_path.with_extension("footer.json");
    std::fs::write(&footer_path, serde_json::to_string_pretty(&footer).map_err(|e| anyhow!(e))?)
        .with_context(|| format!("writing footer {}", footer_path.display()))?;
    println!("{footer}");
    Ok(())
}
