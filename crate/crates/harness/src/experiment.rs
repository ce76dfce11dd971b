use std::time::Instant;

use rayon::prelude::*;

use dca_core::{
    generate_anchor, transform_collab, weight_vector, CollaborativeMaps, DimRule, GepSystem, Intermediate,
    IntermediateBundle, Matrix, MinPerturbSystem, QrSvdSystem, SvdVariant, Vector, ANCHOR_GENERATOR,
};

use crate::config::{DimRuleMode, ExperimentConfig, Method, SYNTHETIC};
use crate::data::{load_csv, make_synthetic, partition, Dataset};
use crate::institution::{centralized_accuracy, LocalInstitution, SharedRepresentation};
use crate::model::Classifier;
use crate::results::{aggregate, ExperimentResult, RunRecord, SCHEMA_VERSION};
use crate::seed::{derive_seed, TAG_ANCHOR, TAG_HOLDOUT, TAG_PARTITION, TAG_RSVD};
use crate::{HarnessError, Result};

pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    if cfg.dataset == SYNTHETIC {
        make_synthetic(&cfg.synthetic_spec()?)
    } else {
        load_csv(&cfg.dataset_path(), &cfg.label_column)
    }
}

fn check_fits(cfg: &ExperimentConfig, dataset: &Dataset) -> Result<()> {
    if dataset.num_classes() < 2 {
        return Err(HarnessError::Data(format!(
            "dataset has {} class(es); classification needs at least 2",
            dataset.num_classes()
        )));
    }
    for &n in &cfg.institutions {
        let needed = n * cfg.rows_per_institution;
        if needed > dataset.rows() {
            return Err(HarnessError::Config(format!(
                "{n} institutions x {} rows needs {needed} rows, dataset has {}",
                cfg.rows_per_institution,
                dataset.rows()
            )));
        }
    }
    Ok(())
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn millis(from: Instant, to: Instant) -> f64 {
    (to - from).as_secs_f64() * 1e3
}

/// Output of one collaborative-function estimation with its wall times.
pub struct Estimate {
    pub maps: CollaborativeMaps,
    pub weights: Option<Vector>,
    pub build_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

/// Builds and solves the collaborative maps `repeats` times and reports
/// the median build, solve, and total times.
pub fn estimate(
    method: Method,
    bundle: &IntermediateBundle,
    collab_dim: usize,
    cfg: &ExperimentConfig,
    rsvd_seed: u64,
    repeats: usize,
) -> dca_core::Result<Estimate> {
    let randomized = SvdVariant::Randomized {
        oversample: cfg.rsvd_oversample,
        power_iters: cfg.rsvd_power_iters,
        seed: rsvd_seed,
    };
    let (mut builds, mut solves, mut totals) = (Vec::new(), Vec::new(), Vec::new());
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let t0 = Instant::now();
        let (maps, t1) = match method {
            Method::DcaMinPerturb | Method::DcaMinPerturbRand => {
                let system = MinPerturbSystem::build(bundle);
                let t1 = Instant::now();
                let variant = if method == Method::DcaMinPerturb {
                    SvdVariant::Exact
                } else {
                    randomized
                };
                (system.solve(collab_dim, variant)?, t1)
            }
            Method::DcaGep | Method::DcaGepWeighted => {
                let system = GepSystem::build(bundle);
                let t1 = Instant::now();
                (system.solve(collab_dim, cfg.gep_ridge)?, t1)
            }
            Method::DcaQrSvd | Method::DcaQrRandsvd => {
                let system = QrSvdSystem::build(bundle)?;
                let t1 = Instant::now();
                let variant = if method == Method::DcaQrSvd {
                    SvdVariant::Exact
                } else {
                    randomized
                };
                (system.solve(collab_dim, variant)?, t1)
            }
            Method::Individual | Method::Centralized => unreachable!("not a collaborative method"),
        };
        let weights = (method == Method::DcaGepWeighted).then(|| weight_vector(&maps.eigenvalues));
        let t2 = Instant::now();
        builds.push(millis(t0, t1));
        solves.push(millis(t1, t2));
        totals.push(millis(t0, t2));
        last = Some((maps, weights));
    }
    let (maps, weights) = last.expect("at least one repeat");
    Ok(Estimate {
        maps,
        weights,
        build_ms: median(builds),
        solve_ms: median(solves),
        total_ms: median(totals),
    })
}

/// The analyst's side: sees only what institutions shared.
fn collaborative_bundle(shared: &[SharedRepresentation]) -> dca_core::Result<IntermediateBundle> {
    IntermediateBundle::new(
        shared
            .iter()
            .map(|s| Intermediate {
                data: s.train.clone(),
                anchor: s.anchor.clone(),
            })
            .collect(),
    )
}

fn default_collab_dim(cfg: &ExperimentConfig, shared: &[SharedRepresentation]) -> usize {
    cfg.collab_dim
        .unwrap_or_else(|| shared.iter().map(SharedRepresentation::dim).min().unwrap_or(0))
}

#[allow(clippy::too_many_arguments)]
fn dca_accuracy(
    shared: &[SharedRepresentation],
    method: Method,
    cfg: &ExperimentConfig,
    classifier: &Classifier,
    rsvd_seed: u64,
    record: &mut RunRecord,
) -> dca_core::Result<()> {
    record.reduced_dims = shared.iter().map(SharedRepresentation::dim).collect();
    let collab_dim = default_collab_dim(cfg, shared);
    record.collab_dim = Some(collab_dim);
    let bundle = collaborative_bundle(shared)?;
    let repeats = if cfg.record_timing { cfg.timing_repeats } else { 1 };
    let est = estimate(method, &bundle, collab_dim, cfg, rsvd_seed, repeats)?;
    if cfg.record_timing {
        record.build_ms = Some(est.build_ms);
        record.solve_ms = Some(est.solve_ms);
        record.total_ms = Some(est.total_ms);
    }
    if matches!(method, Method::DcaGep | Method::DcaGepWeighted) {
        record.gep_ridge = Some(est.maps.ridge);
    }

    let weights = est.weights.as_ref();
    let train = transform_collab(&bundle, &est.maps, weights)?;
    let total: usize = train.reps.iter().map(|x| x.nrows()).sum();
    let mut x = Matrix::zeros(total, collab_dim);
    let mut y = Vec::with_capacity(total);
    let mut off = 0;
    for (rep, s) in train.reps.iter().zip(shared) {
        x.rows_mut(off, rep.nrows()).copy_from(rep);
        y.extend_from_slice(&s.train_labels);
        off += rep.nrows();
    }
    let tests = shared
        .iter()
        .enumerate()
        .map(|(i, s)| est.maps.project(i, &s.test, weights))
        .collect::<dca_core::Result<Vec<_>>>()?;
    let test_sets: Vec<(&Matrix, &Vec<usize>)> = tests.iter().zip(shared).map(|(t, s)| (t, &s.test_labels)).collect();
    record.accuracy = Some(classifier.fit_evaluate(&x, &y, &test_sets)?);
    Ok(())
}

fn share_all(
    locals: &[LocalInstitution],
    anchor: &Matrix,
    cfg: &ExperimentConfig,
) -> dca_core::Result<Vec<SharedRepresentation>> {
    let rule = match cfg.dim_rule {
        DimRuleMode::PerInstitution => cfg.dim_rule(),
        DimRuleMode::InstitutionOne => DimRule::Fixed(locals[0].reduced_dim(cfg.dim_rule())?),
    };
    locals.iter().map(|l| l.share(anchor, rule)).collect()
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    institutions: usize,
    multiplier: usize,
    seed: u64,
    repetition: usize,
}

fn cells(cfg: &ExperimentConfig, repetitions: usize) -> Vec<Cell> {
    let mut out = Vec::new();
    for &institutions in &cfg.institutions {
        for &multiplier in &cfg.anchor_multipliers {
            for &seed in &cfg.distribution_seeds {
                for repetition in 0..repetitions {
                    out.push(Cell {
                        institutions,
                        multiplier,
                        seed,
                        repetition,
                    });
                }
            }
        }
    }
    out
}

fn partition_for(cfg: &ExperimentConfig, dataset: &Dataset, cell: &Cell) -> Result<Vec<Vec<usize>>> {
    partition(
        dataset.rows(),
        cell.institutions,
        cfg.rows_per_institution,
        derive_seed(cfg.seed, &[TAG_PARTITION, cell.institutions as u64, cell.seed]),
    )
}

fn anchor_for(cfg: &ExperimentConfig, rows: usize, dims: usize, cell: &Cell) -> dca_core::Result<Matrix> {
    let seed = derive_seed(cfg.seed, &[TAG_ANCHOR, cell.seed, cell.repetition as u64]);
    Ok(generate_anchor(rows, dims, seed)?.matrix)
}

fn rsvd_seed_for(cfg: &ExperimentConfig, cell: &Cell) -> u64 {
    derive_seed(
        cfg.seed,
        &[TAG_RSVD, cell.institutions as u64, cell.multiplier as u64, cell.seed, cell.repetition as u64],
    )
}

fn accuracy_cell(cfg: &ExperimentConfig, dataset: &Dataset, classifier: &Classifier, cell: &Cell) -> Result<Vec<RunRecord>> {
    let anchor_rows = cell.multiplier * dataset.dims();
    let parts = partition_for(cfg, dataset, cell)?;
    let locals: Vec<LocalInstitution> = parts
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            let seed = derive_seed(
                cfg.seed,
                &[TAG_HOLDOUT, cell.institutions as u64, cell.seed, cell.repetition as u64, i as u64],
            );
            LocalInstitution::with_holdout(dataset, rows, cfg.holdout_ratio, seed)
        })
        .collect();

    let shared = cfg.methods.iter().any(|m| m.is_collaborative()).then(|| {
        anchor_for(cfg, anchor_rows, dataset.dims(), cell).and_then(|anchor| share_all(&locals, &anchor, cfg))
    });

    let mut records = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let mut record = RunRecord::new(method.name(), cell.institutions, anchor_rows, cell.seed, cell.repetition);
        let outcome = match method {
            Method::Individual => locals
                .iter()
                .map(|l| l.individual_accuracy(classifier))
                .collect::<dca_core::Result<Vec<f64>>>()
                .map(|accs| record.accuracy = Some(accs.iter().sum::<f64>() / accs.len() as f64)),
            Method::Centralized => centralized_accuracy(&locals, classifier).map(|a| record.accuracy = Some(a)),
            _ => match shared.as_ref().expect("computed for collaborative methods") {
                Ok(shared) => dca_accuracy(shared, method, cfg, classifier, rsvd_seed_for(cfg, cell), &mut record),
                Err(e) => Err(e.clone()),
            },
        };
        if let Err(e) = outcome {
            record.fail(e);
        }
        records.push(record);
    }
    Ok(records)
}

fn metadata(cfg: &ExperimentConfig, dataset: &Dataset, mode: &str) -> Vec<(String, String)> {
    let timing = if mode == "timing" || cfg.record_timing {
        format!("median of {} monotonic wall-clock repeats", cfg.timing_repeats)
    } else {
        "off".to_string()
    };
    vec![
        ("schema_version".into(), SCHEMA_VERSION.to_string()),
        ("tool".into(), concat!("dca-harness ", env!("CARGO_PKG_VERSION")).into()),
        ("mode".into(), mode.into()),
        ("generator".into(), ANCHOR_GENERATOR.into()),
        (
            "dataset_shape".into(),
            format!("{} rows, {} features, {} classes", dataset.rows(), dataset.dims(), dataset.num_classes()),
        ),
        (
            "dim_rule".into(),
            match cfg.dim_rule {
                DimRuleMode::PerInstitution => "per_institution",
                DimRuleMode::InstitutionOne => "institution_one",
            }
            .into(),
        ),
        ("weighting".into(), "applied to training and test representations".into()),
        ("timing".into(), timing),
    ]
}

/// Reorders per-cell record lists into (method, N, r, seed, repetition) order.
fn by_method(per_cell: Vec<Vec<RunRecord>>, methods: usize) -> Vec<RunRecord> {
    let mut columns: Vec<Vec<RunRecord>> = (0..methods).map(|_| Vec::with_capacity(per_cell.len())).collect();
    for cell in per_cell {
        for (k, record) in cell.into_iter().enumerate() {
            columns[k].push(record);
        }
    }
    columns.into_iter().flatten().collect()
}

fn run_cells<F>(cells: &[Cell], threads: usize, f: F) -> Result<Vec<Vec<RunRecord>>>
where
    F: Fn(&Cell) -> Result<Vec<RunRecord>> + Sync,
{
    if threads <= 1 {
        return cells.iter().map(&f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| cells.par_iter().map(&f).collect())
}

pub fn run_accuracy_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let dataset = load_dataset(cfg)?;
    run_accuracy_on(cfg, &dataset, 1)
}

/// Holdout accuracy for every configured method. Cells run on `threads`
/// workers; record order does not depend on scheduling.
pub fn run_accuracy_on(cfg: &ExperimentConfig, dataset: &Dataset, threads: usize) -> Result<ExperimentResult> {
    cfg.validate()?;
    check_fits(cfg, dataset)?;
    let classifier = Classifier::new(cfg.classifier, cfg.ridge_penalty, dataset.num_classes());
    let cells = cells(cfg, cfg.holdout_repetitions);
    let per_cell = run_cells(&cells, threads, |cell| accuracy_cell(cfg, dataset, &classifier, cell))?;
    let records = by_method(per_cell, cfg.methods.len());
    Ok(ExperimentResult {
        metadata: metadata(cfg, dataset, "accuracy"),
        config: cfg.echo(),
        aggregates: aggregate(&records),
        records,
    })
}

fn timing_cell(cfg: &ExperimentConfig, dataset: &Dataset, cell: &Cell) -> Result<Vec<RunRecord>> {
    let anchor_rows = cell.multiplier * dataset.dims();
    let parts = partition_for(cfg, dataset, cell)?;
    let locals: Vec<LocalInstitution> = parts.iter().map(|rows| LocalInstitution::without_holdout(dataset, rows)).collect();
    let shared = anchor_for(cfg, anchor_rows, dataset.dims(), cell).and_then(|a| share_all(&locals, &a, cfg));

    let mut records = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let mut record = RunRecord::new(method.name(), cell.institutions, anchor_rows, cell.seed, 0);
        let outcome = shared.as_ref().map_err(Clone::clone).and_then(|shared| {
            record.reduced_dims = shared.iter().map(SharedRepresentation::dim).collect();
            let collab_dim = default_collab_dim(cfg, shared);
            record.collab_dim = Some(collab_dim);
            let bundle = collaborative_bundle(shared)?;
            let est = estimate(method, &bundle, collab_dim, cfg, rsvd_seed_for(cfg, cell), cfg.timing_repeats)?;
            record.build_ms = Some(est.build_ms);
            record.solve_ms = Some(est.solve_ms);
            record.total_ms = Some(est.total_ms);
            if matches!(method, Method::DcaGep | Method::DcaGepWeighted) {
                record.gep_ridge = Some(est.maps.ridge);
            }
            Ok(())
        });
        if let Err(e) = outcome {
            record.fail(e);
        }
        records.push(record);
    }
    Ok(records)
}

pub fn run_timing_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let dataset = load_dataset(cfg)?;
    run_timing_on(cfg, &dataset)
}

/// Times collaborative-function estimation once per (N, r, distribution
/// seed). Runs sequentially so timings are not distorted by contention.
pub fn run_timing_on(cfg: &ExperimentConfig, dataset: &Dataset) -> Result<ExperimentResult> {
    cfg.validate()?;
    cfg.validate_timing()?;
    check_fits(cfg, dataset)?;
    let cells = cells(cfg, 1);
    let per_cell = run_cells(&cells, 1, |cell| timing_cell(cfg, dataset, cell))?;
    let records = by_method(per_cell, cfg.methods.len());
    Ok(ExperimentResult {
        metadata: metadata(cfg, dataset, "timing"),
        config: cfg.echo(),
        aggregates: aggregate(&records),
        records,
    })
}
