use std::path::PathBuf;

use clap::Args;
use freqloss_core::ambiguity::{ambiguity_weight_mask, fused_ambiguity};
use serde::Serialize;

use super::{fraction_nonzero, SamplerArgs};
use crate::colormap::{render, AMBIGUITY_RANGE};
use crate::config::{ConfigFlags, MaskModeName, RunConfig};
use crate::error::{CliError, Result};
use crate::io::{load_image, save_image, save_map, save_mask, Format};

#[derive(Debug, Clone, Args)]
pub struct AmbiguityArgs {
    #[arg(long)]
    pub target: PathBuf,
    /// Source frames; each needs a sampler.
    #[arg(long)]
    pub source: Vec<PathBuf>,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    /// Loss mask: PNG for a binary picture, PFM for the weights.
    #[arg(long)]
    pub out: PathBuf,
    /// Fused ambiguity: PFM raw, PNG false-colour.
    #[arg(long)]
    pub amax: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmbiguitySummary {
    pub height: usize,
    pub width: usize,
    pub sources: usize,
    pub mode: MaskModeName,
    /// Pixels with zero weight.
    pub excluded_fraction: f64,
    pub mean_weight: f64,
    pub amax_max: f64,
}

pub fn run(args: &AmbiguityArgs, flags: &ConfigFlags) -> Result<AmbiguitySummary> {
    let cfg = flags.resolve(RunConfig::default())?;
    let target = load_image(&args.target)?;
    let (h, w) = (target.height(), target.width());
    let sources = args.source.iter().map(|p| load_image(p)).collect::<Result<Vec<_>>>()?;
    let samplers = if sources.is_empty() {
        if !args.sampler.is_empty() {
            return Err(CliError::Usage("sampler options need at least one --source".into()));
        }
        Vec::new()
    } else {
        args.sampler.samplers(h, w, sources.len())?
    };
    let pairs: Vec<_> = sources.iter().zip(&samplers).collect();
    let a_max = fused_ambiguity(&target, &pairs)?;
    let weight = ambiguity_weight_mask(&a_max, &cfg.ambiguity)?;
    save_mask(&weight, &args.out)?;
    if let Some(path) = &args.amax {
        match Format::of(path)? {
            Format::Pfm => save_map(&a_max, path)?,
            Format::Png => save_image(&render(&a_max, AMBIGUITY_RANGE), path)?,
        }
    }
    let excluded = weight.map(|v| if v == 0.0 { 1.0 } else { 0.0 });
    Ok(AmbiguitySummary {
        height: h,
        width: w,
        sources: sources.len(),
        mode: cfg.ambiguity.mode.into(),
        excluded_fraction: fraction_nonzero(&excluded),
        mean_weight: weight.mean(),
        amax_max: a_max.max(),
    })
}
