//! Subcommand implementations.

use crate::config::{
    self, ClassifyConfig, CscVerifyConfig, DatasetConfig, LayerConfig, ModelConfig, MuChoice,
    PoolConfig, SolverChoice,
};
use anyhow::{anyhow, bail, Context, Result};
use maxfun_core::classify::{
    extract_dataset, run_pooling_comparison, FeatureDataset, FeatureTensor, FilterBank,
    PoolMethod,
};
use maxfun_core::csc::{
    check_preconditions, verify_stability, ConvDictionary, DcppModel, LayerSpec, MuConvention,
    Pool1dSpec, SolverKind, StabilityReport, TrialConfig,
};
use maxfun_core::io::{
    decode_features, decode_image, filter_classes, load_image, preprocess, write_atomic,
    write_features, DatasetManifest,
};
use maxfun_core::mat::Matrix;
use maxfun_core::pooling::{make_grid, pool_maxfun, MaxfunConfig};
use maxfun_core::selftest;
use rayon::prelude::*;
use serde_json::Value;
use std::fmt::Write as _;
use std::path::Path;

/// Error carrying the process exit code (1 validation, 2 runtime).
pub struct CliError {
    pub code: i32,
    pub err: anyhow::Error,
}

pub type CmdResult = std::result::Result<i32, CliError>;

fn validation<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError {
        code: 1,
        err: e.into(),
    }
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> CliError {
    CliError {
        code: 2,
        err: e.into(),
    }
}

fn method_from(cfg: &PoolConfig) -> PoolMethod {
    match cfg.method.as_str() {
        "avg" => PoolMethod::Average,
        "max" => PoolMethod::Maximum,
        "stochastic" => PoolMethod::Stochastic,
        "mixed" => PoolMethod::Mixed {
            alpha: cfg.alpha.expect("validated"),
        },
        _ => PoolMethod::Maxfun {
            cfg: MaxfunConfig {
                r_min: cfg.r_min.unwrap_or(1),
                b: cfg.b.expect("validated"),
                centered: cfg.method == "maxfun",
            },
        },
    }
}

fn load_pool_input(path: &Path) -> Result<FeatureTensor> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.starts_with(b"MFPF") {
        Ok(decode_features(&bytes)?)
    } else {
        let img = decode_image(&bytes)?;
        Ok(FeatureTensor::new(
            1,
            img.rows(),
            img.cols(),
            img.data().to_vec(),
        )?)
    }
}

/// Apply one pooling operator to an image or feature file.
pub fn cmd_pool(value: Value) -> CmdResult {
    let cfg: PoolConfig = config::parse(value).map_err(validation)?;
    cfg.validate().map_err(validation)?;

    let tensor = load_pool_input(&cfg.input).map_err(runtime)?;
    let grid = make_grid(tensor.height(), tensor.width(), cfg.window, cfg.stride)
        .map_err(validation)?;
    let method = method_from(&cfg);
    let pooled =
        maxfun_core::classify::pool_tensor(&tensor, &grid, &method).map_err(runtime)?;
    let out = FeatureTensor::new(tensor.channels(), grid.out_rows, grid.out_cols, pooled)
        .map_err(runtime)?;
    write_features(&cfg.output, &out).map_err(runtime)?;

    if let Some(prov_path) = &cfg.provenance_output {
        let PoolMethod::Maxfun { cfg: mf } = method else {
            return Err(validation(anyhow!(
                "provenance output is only defined for maxfun methods"
            )));
        };
        let mut csv = String::from("channel,cell_row,cell_col,r,center_row,center_col\n");
        for c in 0..tensor.channels() {
            let out = pool_maxfun(&tensor.channel(c), &grid, &mf).map_err(runtime)?;
            let choices = out.provenance.expect("maxfun records provenance");
            for (cell, choice) in choices.iter().enumerate() {
                writeln!(
                    csv,
                    "{c},{},{},{},{},{}",
                    cell / grid.out_cols,
                    cell % grid.out_cols,
                    choice.r,
                    choice.center.0,
                    choice.center.1
                )
                .expect("string write");
            }
        }
        write_atomic(prov_path, csv.as_bytes()).map_err(runtime)?;
    }
    println!(
        "pooled {} -> {} ({} channels, {}x{} cells)",
        cfg.input.display(),
        cfg.output.display(),
        out.channels(),
        grid.out_rows,
        grid.out_cols
    );
    Ok(0)
}

fn build_layer(lc: &LayerConfig, signal_len: usize, index: usize) -> Result<LayerSpec> {
    if lc.filters.is_empty() {
        bail!("layer {index}: needs at least one filter");
    }
    let n0 = lc.filters[0].len();
    if n0 == 0 || lc.filters.iter().any(|f| f.len() != n0) {
        bail!("layer {index}: filters must share one positive length");
    }
    let local = Matrix::from_cols(n0, &lc.filters)?;
    let dict = ConvDictionary::build(&local, signal_len)
        .with_context(|| format!("layer {index}: dictionary"))?;
    Ok(LayerSpec {
        dict,
        pool: Pool1dSpec {
            window: lc.window,
            stride: lc.stride,
            cfg: MaxfunConfig::centered(lc.r_min, lc.b),
        },
        lambda: lc.lambda,
        eps: 0.0,
    })
}

pub fn build_model(mc: &ModelConfig) -> Result<DcppModel> {
    if mc.layers.is_empty() {
        bail!("model needs at least one layer");
    }
    let mut layers = Vec::with_capacity(mc.layers.len());
    let mut len = mc.signal_len;
    for (i, lc) in mc.layers.iter().enumerate() {
        let layer = build_layer(lc, len, i)?;
        len = layer
            .pooled_len()
            .with_context(|| format!("layer {i}: pooling geometry"))?;
        layers.push(layer);
    }
    Ok(DcppModel::new(layers)?)
}

/// Run seeded stability trials and write the per-layer CSV report.
pub fn cmd_csc_verify(value: Value) -> CmdResult {
    let cfg: CscVerifyConfig = config::parse(value).map_err(validation)?;
    if cfg.trials == 0 {
        return Err(validation(anyhow!("trials must be >= 1")));
    }
    if cfg.eps0 < 0.0 {
        return Err(validation(anyhow!("eps0 must be non-negative")));
    }
    let model = build_model(&cfg.model).map_err(validation)?;
    check_preconditions(&model).map_err(validation)?;

    let solver = match cfg.solver {
        SolverChoice::Oracle => SolverKind::Oracle,
        SolverChoice::Greedy => SolverKind::Greedy,
    };
    let mu_convention = match cfg.mu_convention {
        MuChoice::PerLayer => MuConvention::PerLayer,
        MuChoice::FirstLayer => MuConvention::FirstLayer,
    };

    let reports: Result<Vec<StabilityReport>, maxfun_core::Error> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            verify_stability(
                &model,
                &TrialConfig {
                    seed: cfg.seed.wrapping_add(i),
                    eps0: cfg.eps0,
                    solver,
                    mu_convention,
                    amp_range: cfg.amp_range,
                },
            )
        })
        .collect();
    let reports = reports.map_err(runtime)?;

    let mut csv = String::from(StabilityReport::csv_header());
    csv.push('\n');
    for r in &reports {
        csv.push_str(&r.csv_rows());
    }
    write_atomic(&cfg.report_output, csv.as_bytes()).map_err(runtime)?;

    let passed = reports.iter().filter(|r| r.all_pass()).count();
    let rate = passed as f64 / reports.len() as f64;
    println!(
        "stability: {passed}/{} trials passed (rate {rate:.4}); report at {}",
        reports.len(),
        cfg.report_output.display()
    );
    Ok(if passed == reports.len() { 0 } else { 3 })
}

fn dataset_from_config(cfg: &ClassifyConfig) -> Result<FeatureDataset> {
    match &cfg.dataset {
        DatasetConfig::Synthetic {
            classes,
            per_class,
            seed,
        } => {
            let (raw, labels) = maxfun_core::classify::synthetic_corpus(*classes, *per_class, *seed)?;
            let images = raw
                .par_iter()
                .map(|img| preprocess(img, cfg.image_size))
                .collect::<Result<Vec<_>, _>>()?;
            let bank = FilterBank::oriented_plus_random(cfg.bank_seed);
            Ok(FeatureDataset {
                tensors: extract_dataset(&images, &bank)?,
                labels,
                class_names: (0..*classes).map(|c| format!("class_{c}")).collect(),
            })
        }
        DatasetConfig::Manifest { path } => {
            let mut manifest = DatasetManifest::load(path)?;
            if let Some(f) = &cfg.class_filter {
                manifest = filter_classes(&manifest, f.min_count, f.max_count)?;
            }
            let class_names: Vec<String> = manifest.class_histogram().into_keys().collect();
            let labels: Vec<usize> = manifest
                .entries()
                .iter()
                .map(|e| class_names.iter().position(|c| c == &e.label).unwrap())
                .collect();
            let images = manifest
                .entries()
                .par_iter()
                .map(|e| preprocess(&load_image(&e.path)?, cfg.image_size))
                .collect::<Result<Vec<_>, _>>()?;
            let bank = FilterBank::oriented_plus_random(cfg.bank_seed);
            Ok(FeatureDataset {
                tensors: extract_dataset(&images, &bank)?,
                labels,
                class_names,
            })
        }
        DatasetConfig::Features { path } => {
            let mut manifest = DatasetManifest::load(path)?;
            if let Some(f) = &cfg.class_filter {
                manifest = filter_classes(&manifest, f.min_count, f.max_count)?;
            }
            let class_names: Vec<String> = manifest.class_histogram().into_keys().collect();
            let labels: Vec<usize> = manifest
                .entries()
                .iter()
                .map(|e| class_names.iter().position(|c| c == &e.label).unwrap())
                .collect();
            let tensors = manifest
                .entries()
                .par_iter()
                .map(|e| maxfun_core::io::read_features(&e.path))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(FeatureDataset {
                tensors,
                labels,
                class_names,
            })
        }
    }
}

/// Run the pooling-comparison experiment and emit the results table.
pub fn cmd_classify(value: Value) -> CmdResult {
    let cfg: ClassifyConfig = config::parse(value).map_err(validation)?;
    cfg.validate().map_err(validation)?;

    let ds = dataset_from_config(&cfg).map_err(runtime)?;
    let table = run_pooling_comparison(&ds, &cfg.experiment).map_err(runtime)?;

    write_atomic(&cfg.csv_output, table.to_csv().as_bytes()).map_err(runtime)?;
    let text = table.to_text();
    if let Some(path) = &cfg.table_output {
        write_atomic(path, text.as_bytes()).map_err(runtime)?;
    }
    print!("{text}");
    println!("results written to {}", cfg.csv_output.display());
    Ok(0)
}

/// Run every built-in verification suite.
pub fn cmd_selftest() -> CmdResult {
    let results = selftest::run_all();
    for r in &results {
        println!("{}", r.summary_line());
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    if failed == 0 {
        println!("all {} suites passed", results.len());
        Ok(0)
    } else {
        for r in results.iter().filter(|r| !r.passed()) {
            eprintln!("{}: {}", r.name, r.detail);
        }
        Ok(3)
    }
}
