use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::g2p::ToneInventory;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("silence_pad_s ({pad}) must be half of concat_pause_s ({pause})")]
    PadPauseMismatch { pad: f64, pause: f64 },
    #[error("2 x silence_pad_s ({pad}) exceeds silence_split_threshold_s ({threshold})")]
    PadExceedsThreshold { pad: f64, threshold: f64 },
    #[error("discount_d must lie in [0, 1), got {0}")]
    Discount(f64),
    #[error("lm_weight_lambda must be non-negative, got {0}")]
    Lambda(f64),
    #[error("lm_order must be at least 1")]
    Order,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
}

/// Numeric knobs shared across stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Silences strictly longer than this split a phrase.
    pub silence_split_threshold_s: f64,
    /// Silence kept on each side of a segment.
    pub silence_pad_s: f64,
    /// Junction pause when two segments are joined.
    pub concat_pause_s: f64,
    pub lm_order: usize,
    /// Biasing discount: 0 trusts the transcript fully, values near 1
    /// leave the decision to the acoustic scores.
    pub discount_d: f64,
    /// Discount used when training the background model.
    pub background_discount: f64,
    pub lm_weight_lambda: f64,
    pub tones: ToneInventory,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            silence_split_threshold_s: 0.05,
            silence_pad_s: 0.025,
            concat_pause_s: 0.05,
            lm_order: 3,
            discount_d: 0.5,
            background_discount: 0.5,
            lm_weight_lambda: 1.0,
            tones: ToneInventory::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [
            ("silence_split_threshold_s", self.silence_split_threshold_s),
            ("silence_pad_s", self.silence_pad_s),
            ("concat_pause_s", self.concat_pause_s),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(ConfigError::NonPositive(name));
            }
        }
        if (2.0 * self.silence_pad_s - self.concat_pause_s).abs() > 1e-12 {
            return Err(ConfigError::PadPauseMismatch {
                pad: self.silence_pad_s,
                pause: self.concat_pause_s,
            });
        }
        if 2.0 * self.silence_pad_s > self.silence_split_threshold_s + 1e-12 {
            return Err(ConfigError::PadExceedsThreshold {
                pad: self.silence_pad_s,
                threshold: self.silence_split_threshold_s,
            });
        }
        for d in [self.discount_d, self.background_discount] {
            if !(0.0..1.0).contains(&d) {
                return Err(ConfigError::Discount(d));
            }
        }
        if !self.lm_weight_lambda.is_finite() || self.lm_weight_lambda < 0.0 {
            return Err(ConfigError::Lambda(self.lm_weight_lambda));
        }
        if self.lm_order == 0 {
            return Err(ConfigError::Order);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = PipelineConfig::default();
        c.validate().unwrap();
        assert_eq!(c.silence_split_threshold_s, 0.05);
        assert_eq!(c.silence_pad_s, 0.025);
        assert_eq!(c.concat_pause_s, 0.05);
        assert_eq!(2.0 * c.silence_pad_s, c.concat_pause_s);
    }

    #[test]
    fn pad_must_be_half_pause() {
        let c = PipelineConfig { concat_pause_s: 0.06, ..Default::default() };
        assert!(matches!(c.validate(), Err(ConfigError::PadPauseMismatch { .. })));
    }

    #[test]
    fn discount_range() {
        for d in [-0.1, 1.0, 1.5] {
            let c = PipelineConfig { discount_d: d, ..Default::default() };
            assert_eq!(c.validate(), Err(ConfigError::Discount(d)));
        }
        let c = PipelineConfig { discount_d: 0.0, ..Default::default() };
        assert!(c.validate().is_ok());
    }

    #[test]
    fn parses_from_toml_with_tones() {
        let c: PipelineConfig = toml::from_str(
            "discount_d = 0.3\n[tones]\nSixian = [1, 2, 3, 5, 7, 8]\n",
        )
        .unwrap();
        assert_eq!(c.discount_d, 0.3);
        assert!(c.tones.allows(crate::corpus::Dialect::Sixian, 5));
        assert!(!c.tones.allows(crate::corpus::Dialect::Sixian, 4));
        assert!(c.tones.allows(crate::corpus::Dialect::Hailu, 4));
    }
}
