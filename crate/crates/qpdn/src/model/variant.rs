//! Ablation variants: which parameter blocks train, and what feeds the
//! dense head.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Model variant. `Full` is the complete architecture; the others each
/// remove or freeze one ingredient so its contribution can be measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantTag {
    /// Complete model: complex embeddings, softmax term weights, trainable
    /// measurements.
    Full,
    /// Real embeddings of dimension 2n, mean-pooled straight into the dense
    /// head. Parameter-matched classical baseline; no quantum structure.
    RealDoubleDim,
    /// Amplitudes frozen at initialization; only phases carry word-level
    /// learning.
    FixedAmplitude,
    /// Term weights frozen uniform (mean pooling over word projectors).
    MeanWeights,
    /// Term weights frozen at idf so the mixture is idf-proportional.
    IdfWeights,
    /// Measurement states frozen as a random orthonormal set.
    FixedOrthogonalProjectors,
    /// Dense head reads the flattened density matrix; no measurement layer.
    DenseOnRho,
}

pub const ALL_VARIANTS: [VariantTag; 7] = [
    VariantTag::Full,
    VariantTag::RealDoubleDim,
    VariantTag::FixedAmplitude,
    VariantTag::MeanWeights,
    VariantTag::IdfWeights,
    VariantTag::FixedOrthogonalProjectors,
    VariantTag::DenseOnRho,
];

impl VariantTag {
    pub fn all() -> &'static [VariantTag] {
        &ALL_VARIANTS
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VariantTag::Full => "full",
            VariantTag::RealDoubleDim => "real-double-dim",
            VariantTag::FixedAmplitude => "fixed-amplitude",
            VariantTag::MeanWeights => "mean-weights",
            VariantTag::IdfWeights => "idf-weights",
            VariantTag::FixedOrthogonalProjectors => "fixed-orthogonal-projectors",
            VariantTag::DenseOnRho => "dense-on-rho",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::all()
            .iter()
            .copied()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))
    }

    /// Whether the forward pass goes through states and density mixtures at
    /// all. False only for the classical baseline.
    pub fn is_quantum(self) -> bool {
        !matches!(self, VariantTag::RealDoubleDim)
    }

    /// Whether the dense head reads Born-rule measurement probabilities.
    pub fn uses_measurements(self) -> bool {
        !matches!(self, VariantTag::RealDoubleDim | VariantTag::DenseOnRho)
    }

    pub fn trains_amplitudes(self) -> bool {
        !matches!(self, VariantTag::FixedAmplitude)
    }

    pub fn trains_phases(self) -> bool {
        true
    }

    pub fn trains_term_weights(self) -> bool {
        !matches!(
            self,
            VariantTag::MeanWeights | VariantTag::IdfWeights | VariantTag::RealDoubleDim
        )
    }

    pub fn trains_measurements(self) -> bool {
        matches!(
            self,
            VariantTag::Full
                | VariantTag::FixedAmplitude
                | VariantTag::MeanWeights
                | VariantTag::IdfWeights
        )
    }

    /// Width of the vector feeding the dense head.
    pub fn feature_dim(self, embedding_dim: usize, measurement_count: usize) -> usize {
        match self {
            VariantTag::RealDoubleDim => 2 * embedding_dim,
            VariantTag::DenseOnRho => 2 * embedding_dim * embedding_dim,
            _ => measurement_count,
        }
    }
}

impl fmt::Display for VariantTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
