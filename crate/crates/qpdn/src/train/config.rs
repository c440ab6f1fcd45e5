//! Training configuration with validated hyperparameters.

use serde::{Deserialize, Serialize};

use crate::data::SignConvention;
use crate::error::{Error, Result};
use crate::model::VariantTag;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub variant: VariantTag,
    /// Embedding dimension n.
    pub embedding_dim: usize,
    /// Number of measurement states k.
    pub measurement_count: usize,
    pub learning_rate: f64,
    pub l2_ratio: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// Consecutive non-improving epochs tolerated before early stopping.
    pub patience: usize,
    pub seed: u64,
    /// Minimum corpus frequency for a vocabulary entry.
    pub min_count: usize,
    /// Fraction of the training split held out for model selection.
    pub dev_fraction: f64,
    /// Renormalize the parameter tables every this many batches.
    pub normalization_cadence: usize,
    /// How pretrained signs map onto the amplitude/phase parametrization.
    pub sign_convention: SignConvention,
    /// Fold count for cross-validation.
    pub folds: usize,
    /// Worker threads for fold-, grid-, and variant-level parallelism.
    /// Each individual model always trains single-threaded so results are
    /// bitwise reproducible.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            variant: VariantTag::Full,
            embedding_dim: 50,
            measurement_count: 10,
            learning_rate: 1e-3,
            l2_ratio: 1e-6,
            batch_size: 32,
            epochs: 30,
            patience: 5,
            seed: 42,
            min_count: 1,
            dev_fraction: 0.1,
            normalization_cadence: 1,
            sign_convention: SignConvention::AbsoluteValue,
            folds: 10,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.embedding_dim == 0 {
            return Err(Error::Config("embedding_dim must be at least 1".into()));
        }
        if self.measurement_count == 0 {
            return Err(Error::Config("measurement_count must be at least 1".into()));
        }
        if self.variant == VariantTag::FixedOrthogonalProjectors
            && self.measurement_count > self.embedding_dim
        {
            return Err(Error::Config(format!(
                "{} needs measurement_count <= embedding_dim ({} > {})",
                self.variant, self.measurement_count, self.embedding_dim
            )));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if !(self.l2_ratio.is_finite() && self.l2_ratio >= 0.0) {
            return Err(Error::Config("l2_ratio must be non-negative".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.dev_fraction) {
            return Err(Error::Config("dev_fraction must be in [0, 1)".into()));
        }
        if self.normalization_cadence == 0 {
            return Err(Error::Config(
                "normalization_cadence must be at least 1".into(),
            ));
        }
        if self.folds < 2 {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_zero_valued_knobs() {
        for patch in [
            |c: &mut TrainConfig| c.embedding_dim = 0,
            |c: &mut TrainConfig| c.measurement_count = 0,
            |c: &mut TrainConfig| c.batch_size = 0,
            |c: &mut TrainConfig| c.epochs = 0,
            |c: &mut TrainConfig| c.normalization_cadence = 0,
            |c: &mut TrainConfig| c.learning_rate = 0.0,
            |c: &mut TrainConfig| c.l2_ratio = -1e-6,
            |c: &mut TrainConfig| c.dev_fraction = 1.0,
            |c: &mut TrainConfig| c.folds = 1,
            |c: &mut TrainConfig| c.threads = 0,
        ] {
            let mut c = TrainConfig::default();
            patch(&mut c);
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn orthogonal_projectors_require_enough_dimensions() {
        let mut c = TrainConfig {
            variant: VariantTag::FixedOrthogonalProjectors,
            embedding_dim: 4,
            measurement_count: 5,
            ..TrainConfig::default()
        };
        assert!(c.validate().is_err());
        c.measurement_count = 4;
        c.validate().unwrap();
    }

    #[test]
    fn toml_round_trip_keeps_variant_names() {
        let c = TrainConfig {
            variant: VariantTag::FixedOrthogonalProjectors,
            ..TrainConfig::default()
        };
        let text = toml::to_string(&c).unwrap();
        assert!(text.contains("fixed-orthogonal-projectors"));
        let back: TrainConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.variant, c.variant);
    }
}
