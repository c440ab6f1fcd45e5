//! Pretrained word vectors, reshaped for amplitude initialization.
//!
//! A pretrained vector has signed real components; amplitudes cannot be
//! negative. The default convention takes absolute values and L2-normalizes;
//! the alternative additionally records each sign as a phase of 0 or π so
//! the complex embedding starts out congruent with the real vector. The raw
//! signed values are kept as well for the classical baseline's tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::vocab::Vocabulary;
use crate::error::{read_named, Error, Result};
use crate::mat::Mat;

/// How signed components map into the non-negative amplitude manifold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// Amplitudes |v| / ‖v‖, phases left to random initialization.
    #[default]
    AbsoluteValue,
    /// Amplitudes |v| / ‖v‖, phase 0 for positive components and π for
    /// negative ones.
    SignToPhase,
}

/// Initialization tables derived from a pretrained vector file, one row
/// per vocabulary id. Rows for words missing from the file hold the
/// uniform amplitude state (and zero signed values); `found` records which
/// rows were covered.
#[derive(Clone, Debug)]
pub struct PretrainedInit {
    pub amplitude: Mat<f64>,
    pub sign_phase: Mat<f64>,
    pub signed: Mat<f64>,
    pub found: Vec<bool>,
    pub dim: usize,
}

impl PretrainedInit {
    pub fn coverage(&self) -> usize {
        self.found.iter().filter(|&&f| f).count()
    }

    pub fn coverage_fraction(&self) -> f64 {
        self.coverage() as f64 / self.found.len().max(1) as f64
    }
}

/// Parse a `word v1 v2 ... vn` text file and build initialization tables
/// for the given vocabulary. Lines for words outside the vocabulary are
/// skipped; a line whose component count disagrees with `dim` is an error;
/// repeated words keep their first occurrence.
pub fn load_pretrained(path: &Path, vocab: &Vocabulary, dim: usize) -> Result<PretrainedInit> {
    let content = read_named(path)?;
    let mut amplitude = Mat::zeros(vocab.size(), dim);
    let mut sign_phase = Mat::zeros(vocab.size(), dim);
    let mut signed = Mat::zeros(vocab.size(), dim);
    let mut found = vec![false; vocab.size()];

    let mut values = vec![0f64; dim];
    for (idx, line) in content.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let word = fields.next().ok_or_else(|| Error::Parse {
            line: idx + 1,
            message: "empty vector line".into(),
        })?;
        let id = vocab.id_of(word);
        if id == 0 || found[id] {
            // Outside the vocabulary, or the word already has a vector.
            continue;
        }
        let mut count = 0;
        for field in fields {
            if count < dim {
                values[count] = field.parse::<f64>().map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("bad component {field:?}: {e}"),
                })?;
            }
            count += 1;
        }
        if count != dim {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected {dim} components, found {count}"),
            });
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("zero vector for word {word:?}"),
            });
        }
        found[id] = true;
        for (s, &v) in values.iter().enumerate() {
            amplitude.set(id, s, v.abs() / norm);
            sign_phase.set(id, s, if v < 0.0 { std::f64::consts::PI } else { 0.0 });
            signed.set(id, s, v);
        }
    }

    // Uncovered rows (including the OOV bucket) start at the uniform state.
    let uniform = (1.0 / dim as f64).sqrt();
    for (id, &hit) in found.iter().enumerate() {
        if !hit {
            amplitude.row_mut(id).fill(uniform);
        }
    }
    Ok(PretrainedInit {
        amplitude,
        sign_phase,
        signed,
        found,
        dim,
    })
}
