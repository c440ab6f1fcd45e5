//! Report serialization: a human-readable `key: value` text file and a
//! structured JSON-lines file per command. Every JSON line carries a
//! `record` field naming its kind, so the files stay self-describing when
//! concatenated or streamed.

use std::path::Path;

use qpdn::train::{AblationReport, CvReport, GridReport, RunReport};
use qpdn::Result;
use serde_json::{json, Value};

use crate::inspect::NeighborReport;

fn tagged(kind: &str, value: Value) -> Value {
    let mut object = match value {
        Value::Object(map) => map,
        other => {
            let mut map = serde_json::Map::new();
            map.insert("value".into(), other);
            map
        }
    };
    object.insert("record".into(), json!(kind));
    Value::Object(object)
}

pub fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    let mut text = lines.join("\n");
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn write_records(path: &Path, records: &[Value]) -> Result<()> {
    let mut text = String::new();
    for record in records {
        text.push_str(&record.to_string());
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn run_lines(report: &RunReport) -> Vec<String> {
    let mut lines = vec![
        format!("variant: {}", report.variant),
        format!("seed: {}", report.seed),
        format!("parameter_count: {}", report.parameter_count),
        format!("epochs_run: {}", report.epochs_run),
        format!("best_epoch: {}", report.best_epoch),
        format!("best_dev_accuracy: {:.4}", report.best_dev_accuracy),
        format!("train_accuracy: {:.4}", report.train_accuracy),
    ];
    if let Some(test) = report.test_accuracy {
        lines.push(format!("test_accuracy: {test:.4}"));
    }
    lines.push(format!("final_train_loss: {:.6}", report.final_train_loss));
    lines.push(format!("train_seconds: {:.3}", report.train_seconds));
    for epoch in &report.epochs {
        lines.push(format!(
            "epoch {}: loss {:.6} dev {:.4}",
            epoch.epoch, epoch.train_loss, epoch.dev_accuracy
        ));
    }
    lines
}

pub fn run_records(report: &RunReport) -> Vec<Value> {
    let mut summary = serde_json::to_value(report).expect("report serializes");
    summary
        .as_object_mut()
        .expect("report is an object")
        .remove("epochs");
    let mut records = vec![tagged("run", summary)];
    for epoch in &report.epochs {
        records.push(tagged(
            "epoch",
            serde_json::to_value(epoch).expect("epoch serializes"),
        ));
    }
    records
}

pub fn cv_lines(report: &CvReport) -> Vec<String> {
    let mut lines = vec![
        format!("folds: {}", report.fold_accuracies.len()),
        format!("mean_accuracy: {:.4}", report.mean_accuracy),
        format!("std_deviation: {:.4}", report.std_deviation),
    ];
    for (fold, accuracy) in report.fold_accuracies.iter().enumerate() {
        lines.push(format!("fold {fold}: {accuracy:.4}"));
    }
    lines
}

pub fn cv_records(report: &CvReport) -> Vec<Value> {
    let mut records = vec![tagged(
        "cv",
        json!({
            "folds": report.fold_accuracies.len(),
            "mean_accuracy": report.mean_accuracy,
            "std_deviation": report.std_deviation,
        }),
    )];
    for (fold, accuracy) in report.fold_accuracies.iter().enumerate() {
        records.push(tagged(
            "fold",
            json!({ "fold": fold, "accuracy": accuracy }),
        ));
    }
    records
}

/// The ablation table: one header line, then one line per variant.
pub fn ablation_table(report: &AblationReport) -> Vec<String> {
    let mut lines = vec![format!(
        "{:<28} {:>10} {:>10} {:>12}",
        "variant", "accuracy", "delta", "parameters"
    )];
    for row in &report.rows {
        lines.push(format!(
            "{:<28} {:>10.4} {:>+10.4} {:>12}",
            row.variant, row.accuracy, row.delta_vs_full, row.parameter_count
        ));
    }
    lines
}

pub fn ablation_records(report: &AblationReport) -> Vec<Value> {
    let mut records = vec![tagged(
        "ablation",
        json!({
            "metric": report.metric,
            "full_accuracy": report.full_accuracy,
            "variants": report.rows.len(),
        }),
    )];
    for row in &report.rows {
        records.push(tagged(
            "ablation_row",
            serde_json::to_value(row).expect("row serializes"),
        ));
    }
    records
}

pub fn grid_lines(report: &GridReport) -> Vec<String> {
    report
        .entries
        .iter()
        .enumerate()
        .map(|(rank, e)| {
            format!(
                "rank {:>3}: dev {:.4} lr {:.0e} l2 {:.0e} batch {} measurements {} parameters {}",
                rank + 1,
                e.dev_accuracy,
                e.learning_rate,
                e.l2_ratio,
                e.batch_size,
                e.measurement_count,
                e.parameter_count
            )
        })
        .collect()
}

pub fn grid_records(report: &GridReport) -> Vec<Value> {
    report
        .entries
        .iter()
        .enumerate()
        .map(|(rank, e)| {
            let mut value = serde_json::to_value(e).expect("entry serializes");
            value
                .as_object_mut()
                .expect("entry is an object")
                .insert("rank".into(), json!(rank + 1));
            tagged("grid_entry", value)
        })
        .collect()
}

pub fn neighbor_lines(report: &NeighborReport) -> Vec<String> {
    report
        .measurements
        .iter()
        .map(|m| {
            let entries: Vec<String> = m
                .neighbors
                .iter()
                .map(|n| format!("{} {:.4}", n.word, n.distance))
                .collect();
            format!("measurement {}: {}", m.measurement, entries.join(", "))
        })
        .collect()
}

pub fn neighbor_records(report: &NeighborReport) -> Vec<Value> {
    report
        .measurements
        .iter()
        .map(|m| tagged("measurement", serde_json::to_value(m).expect("serializes")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpdn::train::{AblationRow, EpochRecord};

    #[test]
    fn ablation_table_is_header_plus_one_line_per_variant() {
        let report = AblationReport {
            metric: "test".into(),
            full_accuracy: 0.9,
            rows: vec![
                AblationRow {
                    variant: "full".into(),
                    accuracy: 0.9,
                    delta_vs_full: 0.0,
                    parameter_count: 100,
                },
                AblationRow {
                    variant: "fixed-amplitude".into(),
                    accuracy: 0.85,
                    delta_vs_full: -0.05,
                    parameter_count: 100,
                },
            ],
        };
        let lines = ablation_table(&report);
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("variant"));
        assert!(lines[2].contains("-0.0500"));
    }

    #[test]
    fn every_record_is_tagged() {
        let run = RunReport {
            variant: "full".into(),
            seed: 1,
            epochs_run: 1,
            best_epoch: 1,
            best_dev_accuracy: 0.5,
            train_accuracy: 0.5,
            test_accuracy: None,
            final_train_loss: 0.7,
            parameter_count: 10,
            step_losses: vec![0.7],
            epochs: vec![EpochRecord {
                epoch: 1,
                train_loss: 0.7,
                dev_accuracy: 0.5,
            }],
            train_seconds: 0.0,
        };
        for record in run_records(&run) {
            assert!(record.get("record").is_some());
        }
        assert_eq!(run_records(&run).len(), 2);
    }
}
