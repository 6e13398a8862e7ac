//! Run configuration: built-in defaults, then a JSON file, then flags.
//!
//! Every layer is a [`ConfigFile`] whose unset fields leave the layer below
//! untouched. Unknown keys in the file are rejected.

use std::path::Path;

use clap::{Args, ValueEnum};
use freqloss_core::ambiguity::{AmbiguityConfig, MaskMode};
use freqloss_core::autoblur::{AutoBlurConfig, BlurBorder, BlurWeighting};
use freqloss_core::frequency::ChannelReduction;
use freqloss_core::photometric::LossConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MaskModeName {
    Hard,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BorderName {
    Zero,
    Replicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReductionName {
    Mean,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WeightingName {
    Graded,
    Full,
}

impl From<MaskModeName> for MaskMode {
    fn from(m: MaskModeName) -> Self {
        match m {
            MaskModeName::Hard => MaskMode::Hard,
            MaskModeName::Exponential => MaskMode::Exponential,
        }
    }
}

impl From<MaskMode> for MaskModeName {
    fn from(m: MaskMode) -> Self {
        match m {
            MaskMode::Hard => MaskModeName::Hard,
            MaskMode::Exponential => MaskModeName::Exponential,
        }
    }
}

impl From<BorderName> for BlurBorder {
    fn from(b: BorderName) -> Self {
        match b {
            BorderName::Zero => BlurBorder::Zero,
            BorderName::Replicate => BlurBorder::Replicate,
        }
    }
}

impl From<BlurBorder> for BorderName {
    fn from(b: BlurBorder) -> Self {
        match b {
            BlurBorder::Zero => BorderName::Zero,
            BlurBorder::Replicate => BorderName::Replicate,
        }
    }
}

impl From<ReductionName> for ChannelReduction {
    fn from(r: ReductionName) -> Self {
        match r {
            ReductionName::Mean => ChannelReduction::Mean,
            ReductionName::Max => ChannelReduction::Max,
        }
    }
}

impl From<ChannelReduction> for ReductionName {
    fn from(r: ChannelReduction) -> Self {
        match r {
            ChannelReduction::Mean => ReductionName::Mean,
            ChannelReduction::Max => ReductionName::Max,
        }
    }
}

impl From<WeightingName> for BlurWeighting {
    fn from(w: WeightingName) -> Self {
        match w {
            WeightingName::Graded => BlurWeighting::Graded,
            WeightingName::Full => BlurWeighting::Full,
        }
    }
}

impl From<BlurWeighting> for WeightingName {
    fn from(w: BlurWeighting) -> Self {
        match w {
            BlurWeighting::Graded => WeightingName::Graded,
            BlurWeighting::Full => WeightingName::Full,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmbiguitySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<MaskModeName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AutoBlurSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_pct: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub border: Option<BorderName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionName>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighting: Option<WeightingName>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub patch: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

/// One configuration layer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub ambiguity: AmbiguitySection,
    pub autoblur: AutoBlurSection,
    pub loss: LossSection,
    pub sweep: SweepSection,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.into(),
            source,
        })
    }
}

/// Hypothesis grid and patch size of a loss sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSettings {
    pub patch: usize,
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            patch: 3,
            min: 0.0,
            max: 15.0,
            step: 1.0,
        }
    }
}

impl SweepSettings {
    pub fn hypotheses(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.max >= self.min) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(CliError::Usage(format!(
                "invalid hypothesis grid min={} max={} step={}",
                self.min, self.max, self.step
            )));
        }
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.min + i as f64 * self.step).collect())
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunConfig {
    pub ambiguity: AmbiguityConfig,
    pub autoblur: AutoBlurConfig,
    pub loss: LossConfig,
    pub sweep: SweepSettings,
}

fn set<T: Copy>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl RunConfig {
    /// Overrides every field the layer sets.
    pub fn apply(&mut self, layer: &ConfigFile) {
        let a = &layer.ambiguity;
        set(&mut self.ambiguity.delta, a.delta);
        set(&mut self.ambiguity.mode, a.mode.map(Into::into));
        set(&mut self.ambiguity.gamma, a.gamma);
        let b = &layer.autoblur;
        set(&mut self.autoblur.lambda, b.lambda);
        set(&mut self.autoblur.s, b.s);
        set(&mut self.autoblur.eta_pct, b.eta_pct);
        set(&mut self.autoblur.kernel_size, b.kernel_size);
        set(&mut self.autoblur.sigma, b.sigma);
        set(&mut self.autoblur.border, b.border.map(Into::into));
        set(&mut self.autoblur.reduction, b.reduction.map(Into::into));
        set(&mut self.autoblur.weighting, b.weighting.map(Into::into));
        let l = &layer.loss;
        set(&mut self.loss.alpha, l.alpha);
        set(&mut self.loss.c1, l.c1);
        set(&mut self.loss.c2, l.c2);
        let s = &layer.sweep;
        set(&mut self.sweep.patch, s.patch);
        set(&mut self.sweep.min, s.min);
        set(&mut self.sweep.max, s.max);
        set(&mut self.sweep.step, s.step);
    }

    pub fn validate(&self) -> Result<()> {
        self.ambiguity.validate()?;
        self.autoblur.validate()?;
        self.loss.validate()?;
        if self.sweep.patch.is_multiple_of(2) {
            return Err(CliError::Usage(format!("sweep patch must be odd, got {}", self.sweep.patch)));
        }
        self.sweep.hypotheses()?;
        Ok(())
    }

    /// The effective settings as a fully populated layer.
    pub fn to_layer(&self) -> ConfigFile {
        ConfigFile {
            ambiguity: AmbiguitySection {
                delta: Some(self.ambiguity.delta),
                mode: Some(self.ambiguity.mode.into()),
                gamma: Some(self.ambiguity.gamma),
            },
            autoblur: AutoBlurSection {
                lambda: Some(self.autoblur.lambda),
                s: Some(self.autoblur.s),
                eta_pct: Some(self.autoblur.eta_pct),
                kernel_size: Some(self.autoblur.kernel_size),
                sigma: Some(self.autoblur.sigma),
                border: Some(self.autoblur.border.into()),
                reduction: Some(self.autoblur.reduction.into()),
                weighting: Some(self.autoblur.weighting.into()),
            },
            loss: LossSection {
                alpha: Some(self.loss.alpha),
                c1: Some(self.loss.c1),
                c2: Some(self.loss.c2),
            },
            sweep: SweepSection {
                patch: Some(self.sweep.patch),
                min: Some(self.sweep.min),
                max: Some(self.sweep.max),
                step: Some(self.sweep.step),
            },
        }
    }
}

/// Configuration flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigFlags {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Fused-ambiguity threshold of the hard mask.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub mask_mode: Option<MaskModeName>,
    /// Rate of the exponential mask.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// High-frequency pixel threshold.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Pooling window side.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Area vote threshold in percent.
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub kernel_size: Option<usize>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub blur_border: Option<BorderName>,
    #[arg(long, global = true, value_enum)]
    pub reduction: Option<ReductionName>,
    #[arg(long, global = true, value_enum)]
    pub weighting: Option<WeightingName>,
    /// SSIM weight of the photometric loss.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub c1: Option<f64>,
    #[arg(long, global = true)]
    pub c2: Option<f64>,
    /// Odd side of the swept patch.
    #[arg(long, global = true)]
    pub patch: Option<usize>,
    #[arg(long, global = true)]
    pub hyp_min: Option<f64>,
    #[arg(long, global = true)]
    pub hyp_max: Option<f64>,
    #[arg(long, global = true)]
    pub hyp_step: Option<f64>,
}

impl ConfigFlags {
    pub fn as_layer(&self) -> ConfigFile {
        ConfigFile {
            ambiguity: AmbiguitySection {
                delta: self.delta,
                mode: self.mask_mode,
                gamma: self.gamma,
            },
            autoblur: AutoBlurSection {
                lambda: self.lambda,
                s: self.window,
                eta_pct: self.eta,
                kernel_size: self.kernel_size,
                sigma: self.sigma,
                border: self.blur_border,
                reduction: self.reduction,
                weighting: self.weighting,
            },
            loss: LossSection {
                alpha: self.alpha,
                c1: self.c1,
                c2: self.c2,
            },
            sweep: SweepSection {
                patch: self.patch,
                min: self.hyp_min,
                max: self.hyp_max,
                step: self.hyp_step,
            },
        }
    }

    /// `base`, then the config file, then these flags.
    pub fn resolve(&self, base: RunConfig) -> Result<RunConfig> {
        let mut cfg = base;
        if let Some(path) = &self.config {
            cfg.apply(&ConfigFile::load(path)?);
        }
        cfg.apply(&self.as_layer());
        cfg.validate()?;
        Ok(cfg)
    }
}
