//! Cross-validation, grid search, and the ablation table.
//!
//! Parallelism, when requested, stays at the job level (folds, grid
//! points, variants); each job is an independently seeded single-threaded
//! training run, so results are identical at any thread count.

use crate::data::{cv_splits, split_dataset, Dataset, PretrainedInit, Vocabulary};
use crate::error::{Error, Result};
use crate::model::VariantTag;
use crate::train::config::TrainConfig;
use crate::train::report::{
    mean_and_std, AblationReport, AblationRow, CvReport, GridEntry, GridReport,
};
use crate::train::train_model;

/// Candidate values per tunable axis.
#[derive(Clone, Debug)]
pub struct GridPool {
    pub learning_rates: Vec<f64>,
    pub l2_ratios: Vec<f64>,
    pub batch_sizes: Vec<usize>,
    pub measurement_counts: Vec<usize>,
}

impl Default for GridPool {
    /// The standard sweep: four learning rates and L2 strengths on decade
    /// steps, five batch sizes, six measurement counts.
    fn default() -> Self {
        Self {
            learning_rates: vec![1e-3, 1e-4, 1e-5, 1e-6],
            l2_ratios: vec![1e-5, 1e-6, 1e-7, 1e-8],
            batch_sizes: vec![8, 16, 32, 64, 128],
            measurement_counts: vec![5, 10, 20, 50, 100, 200],
        }
    }
}

impl GridPool {
    /// A single point taken from an existing configuration.
    pub fn singleton(config: &TrainConfig) -> Self {
        Self {
            learning_rates: vec![config.learning_rate],
            l2_ratios: vec![config.l2_ratio],
            batch_sizes: vec![config.batch_size],
            measurement_counts: vec![config.measurement_count],
        }
    }

    pub fn len(&self) -> usize {
        self.learning_rates.len()
            * self.l2_ratios.len()
            * self.batch_sizes.len()
            * self.measurement_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Run jobs serially or on a scoped thread pool, preserving job order.
fn run_jobs<J, O, F>(jobs: Vec<J>, threads: usize, f: F) -> Result<Vec<O>>
where
    J: Send,
    O: Send,
    F: Fn(J) -> Result<O> + Sync + Send,
{
    if threads <= 1 || jobs.len() <= 1 {
        return jobs.into_iter().map(f).collect();
    }
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.min(jobs.len()))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| jobs.into_par_iter().map(&f).collect())
}

/// k-fold cross-validation: each fold is held out once while the rest
/// trains (with a dev carve for model selection). Fold f trains with seed
/// `config.seed + f` so folds are decorrelated but reproducible.
pub fn cross_validate(
    config: &TrainConfig,
    dataset: &Dataset,
    vocab: &Vocabulary,
    pretrained: Option<&PretrainedInit>,
) -> Result<CvReport> {
    config.validate()?;
    let assignment = cv_splits(dataset, config.folds, config.seed)?;
    let folds: Vec<usize> = (0..config.folds).collect();
    let fold_accuracies = run_jobs(folds, config.threads, |fold| {
        let mut train_idx = Vec::new();
        let mut test_idx = Vec::new();
        for (i, &f) in assignment.iter().enumerate() {
            if f == fold {
                test_idx.push(i);
            } else {
                train_idx.push(i);
            }
        }
        let train_all = dataset.subset(&train_idx);
        let test = dataset.subset(&test_idx);
        let mut fold_config = config.clone();
        fold_config.seed = config.seed.wrapping_add(fold as u64);
        fold_config.threads = 1;
        let (train, dev) = split_dataset(&train_all, config.dev_fraction, fold_config.seed);
        let dev_ref = if dev.is_empty() { None } else { Some(&dev) };
        let (_, report) = train_model(
            &fold_config,
            &train,
            dev_ref,
            Some(&test),
            vocab,
            pretrained,
        )?;
        Ok(report.test_accuracy.expect("test split was provided"))
    })?;
    let (mean_accuracy, std_deviation) = mean_and_std(&fold_accuracies);
    Ok(CvReport {
        fold_accuracies,
        mean_accuracy,
        std_deviation,
    })
}

/// Exhaustive sweep over the pool's cartesian product. Every point trains
/// on the same split with the same seed and is ranked by dev accuracy;
/// ties prefer fewer parameters, then a lower learning rate, then pool
/// order, so the ranking is total and reproducible.
pub fn grid_search(
    config: &TrainConfig,
    pool: &GridPool,
    train: &Dataset,
    dev: &Dataset,
    vocab: &Vocabulary,
    pretrained: Option<&PretrainedInit>,
) -> Result<GridReport> {
    if pool.is_empty() {
        return Err(Error::Config("empty grid pool".into()));
    }
    let mut points = Vec::with_capacity(pool.len());
    for &lr in &pool.learning_rates {
        for &l2 in &pool.l2_ratios {
            for &batch in &pool.batch_sizes {
                for &k in &pool.measurement_counts {
                    points.push((lr, l2, batch, k));
                }
            }
        }
    }
    let entries = run_jobs(points, config.threads, |(lr, l2, batch, k)| {
        let mut point_config = config.clone();
        point_config.learning_rate = lr;
        point_config.l2_ratio = l2;
        point_config.batch_size = batch;
        point_config.measurement_count = k;
        point_config.threads = 1;
        let (params, report) =
            train_model(&point_config, train, Some(dev), None, vocab, pretrained)?;
        Ok(GridEntry {
            learning_rate: lr,
            l2_ratio: l2,
            batch_size: batch,
            measurement_count: k,
            dev_accuracy: report.best_dev_accuracy,
            parameter_count: params.total_len(),
        })
    })?;
    let mut indexed: Vec<(usize, GridEntry)> = entries.into_iter().enumerate().collect();
    indexed.sort_by(|(ia, a), (ib, b)| {
        b.dev_accuracy
            .partial_cmp(&a.dev_accuracy)
            .expect("accuracies are finite")
            .then(a.parameter_count.cmp(&b.parameter_count))
            .then(
                a.learning_rate
                    .partial_cmp(&b.learning_rate)
                    .expect("rates are finite"),
            )
            .then(ia.cmp(ib))
    });
    Ok(GridReport {
        entries: indexed.into_iter().map(|(_, e)| e).collect(),
    })
}

/// Train the requested variants under one budget and tabulate accuracy
/// against the full model. When the full variant is not among the
/// requests, a reference full model is trained anyway (but not emitted as
/// a row) so the deltas stay anchored.
pub fn run_ablation(
    config: &TrainConfig,
    variants: &[VariantTag],
    train: &Dataset,
    dev: Option<&Dataset>,
    test: Option<&Dataset>,
    vocab: &Vocabulary,
    pretrained: Option<&PretrainedInit>,
) -> Result<AblationReport> {
    if variants.is_empty() {
        return Err(Error::Config("no variants requested".into()));
    }
    let metric = if test.is_some() { "test" } else { "dev" };
    let mut jobs: Vec<VariantTag> = variants.to_vec();
    let full_requested = variants.contains(&VariantTag::Full);
    if !full_requested {
        jobs.push(VariantTag::Full);
    }
    let rows = run_jobs(jobs.clone(), config.threads, |variant| {
        let mut variant_config = config.clone();
        variant_config.variant = variant;
        variant_config.threads = 1;
        let (params, report) = train_model(&variant_config, train, dev, test, vocab, pretrained)?;
        let accuracy = report.test_accuracy.unwrap_or(report.best_dev_accuracy);
        Ok(AblationRow {
            variant: variant.as_str().to_string(),
            accuracy,
            delta_vs_full: f64::NAN,
            parameter_count: params.total_len(),
        })
    })?;
    let full_accuracy = rows
        .iter()
        .find(|r| r.variant == VariantTag::Full.as_str())
        .map(|r| r.accuracy)
        .expect("full variant always trained");
    let rows: Vec<AblationRow> = rows
        .into_iter()
        .take(variants.len())
        .map(|mut r| {
            r.delta_vs_full = r.accuracy - full_accuracy;
            r
        })
        .collect();
    // Keep the caller's requested order.
    debug_assert_eq!(rows.len(), variants.len());
    if rows.is_empty() {
        return Err(Error::Config("no variants requested".into()));
    }
    Ok(AblationReport {
        metric: metric.to_string(),
        full_accuracy,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic::{generated_corpus, separable_dataset};
    use crate::data::{build_vocab, encode_corpus};

    fn tiny_config() -> TrainConfig {
        TrainConfig {
            embedding_dim: 4,
            measurement_count: 3,
            epochs: 8,
            batch_size: 8,
            learning_rate: 0.03,
            l2_ratio: 0.0,
            patience: 8,
            seed: 5,
            folds: 4,
            dev_fraction: 0.1,
            ..TrainConfig::default()
        }
    }

    fn generated_dataset(count: usize) -> (Dataset, Vocabulary) {
        let corpus = generated_corpus(count, 11);
        let vocab = build_vocab(&corpus, 1).unwrap();
        (encode_corpus(&corpus, &vocab).unwrap(), vocab)
    }

    #[test]
    fn cross_validation_reports_every_fold() {
        let (ds, vocab) = generated_dataset(48);
        let report = cross_validate(&tiny_config(), &ds, &vocab, None).unwrap();
        assert_eq!(report.fold_accuracies.len(), 4);
        assert!(report.mean_accuracy > 0.6);
        assert!(report.std_deviation >= 0.0);
        let mean = report.fold_accuracies.iter().sum::<f64>() / 4.0;
        assert!((report.mean_accuracy - mean).abs() < 1e-12);
    }

    #[test]
    fn cross_validation_is_thread_count_invariant() {
        let (ds, vocab) = generated_dataset(32);
        let serial = cross_validate(&tiny_config(), &ds, &vocab, None).unwrap();
        let mut threaded_config = tiny_config();
        threaded_config.threads = 4;
        let threaded = cross_validate(&threaded_config, &ds, &vocab, None).unwrap();
        assert_eq!(serial.fold_accuracies, threaded.fold_accuracies);
    }

    #[test]
    fn grid_search_ranks_by_dev_accuracy_with_total_ties() {
        let (ds, vocab) = separable_dataset();
        let (train, dev) = split_dataset(&ds, 0.25, 3);
        let mut config = tiny_config();
        config.epochs = 6;
        let pool = GridPool {
            learning_rates: vec![0.03, 1e-9],
            l2_ratios: vec![0.0],
            batch_sizes: vec![4],
            measurement_counts: vec![2, 3],
        };
        let report = grid_search(&config, &pool, &train, &dev, &vocab, None).unwrap();
        assert_eq!(report.entries.len(), 4);
        let best = report.best();
        assert!(best.dev_accuracy >= report.entries[1].dev_accuracy);
        // A vanishing learning rate cannot win.
        assert!((best.learning_rate - 0.03).abs() < 1e-12);
        for pair in report.entries.windows(2) {
            assert!(pair[0].dev_accuracy >= pair[1].dev_accuracy);
        }
    }

    #[test]
    fn ablation_reports_one_row_per_variant_with_zero_full_delta() {
        let (ds, vocab) = separable_dataset();
        let mut config = tiny_config();
        config.epochs = 12;
        config.batch_size = 4;
        let variants = [VariantTag::Full, VariantTag::MeanWeights];
        let report = run_ablation(&config, &variants, &ds, None, Some(&ds), &vocab, None).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.metric, "test");
        assert_eq!(report.rows[0].variant, "full");
        assert_eq!(report.rows[0].delta_vs_full, 0.0);
        let reconstructed = report.rows[1].accuracy - report.full_accuracy;
        assert_eq!(report.rows[1].delta_vs_full, reconstructed);
    }

    #[test]
    fn ablation_anchors_delta_when_full_is_not_requested() {
        let (ds, vocab) = separable_dataset();
        let mut config = tiny_config();
        config.epochs = 6;
        config.batch_size = 4;
        let report = run_ablation(
            &config,
            &[VariantTag::MeanWeights],
            &ds,
            None,
            Some(&ds),
            &vocab,
            None,
        )
        .unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].variant, "mean-weights");
        assert!(
            (report.rows[0].delta_vs_full - (report.rows[0].accuracy - report.full_accuracy)).abs()
                < 1e-15
        );
    }
}
