//! Result records produced by training and the experiment drivers.

use serde::Serialize;

/// Loss and held-out accuracy at one epoch boundary.
#[derive(Clone, Debug, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub dev_accuracy: f64,
}

/// Everything a single training run reports.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub variant: String,
    pub seed: u64,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_dev_accuracy: f64,
    /// Accuracy of the selected parameters on the full training split.
    pub train_accuracy: f64,
    pub test_accuracy: Option<f64>,
    pub final_train_loss: f64,
    /// Total scalar parameters of the trained model.
    pub parameter_count: usize,
    /// Mean batch objective (cross-entropy plus L2 penalty) per step, in
    /// step order across all epochs.
    pub step_losses: Vec<f64>,
    pub epochs: Vec<EpochRecord>,
    pub train_seconds: f64,
}

/// Accuracy plus the confusion table (rows: true label, columns: predicted).
#[derive(Clone, Debug, Serialize)]
pub struct EvalResult {
    pub accuracy: f64,
    pub confusion: Vec<Vec<usize>>,
    pub total: usize,
}

/// Per-fold accuracies of one cross-validation run.
#[derive(Clone, Debug, Serialize)]
pub struct CvReport {
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Sample standard deviation over folds.
    pub std_deviation: f64,
}

/// One line of the ablation table.
#[derive(Clone, Debug, Serialize)]
pub struct AblationRow {
    pub variant: String,
    pub accuracy: f64,
    /// Accuracy minus the full variant's accuracy under the same budget.
    pub delta_vs_full: f64,
    pub parameter_count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AblationReport {
    /// Which split the accuracy column reads: "test" or "dev".
    pub metric: String,
    pub full_accuracy: f64,
    pub rows: Vec<AblationRow>,
}

/// One evaluated grid point.
#[derive(Clone, Debug, Serialize)]
pub struct GridEntry {
    pub learning_rate: f64,
    pub l2_ratio: f64,
    pub batch_size: usize,
    pub measurement_count: usize,
    pub dev_accuracy: f64,
    pub parameter_count: usize,
}

/// Grid results sorted best-first. Ties prefer fewer parameters, then a
/// lower learning rate, so the selection is total and reproducible.
#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub entries: Vec<GridEntry>,
}

impl GridReport {
    pub fn best(&self) -> &GridEntry {
        &self.entries[0]
    }
}

/// Mean and sample standard deviation of a slice.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}
