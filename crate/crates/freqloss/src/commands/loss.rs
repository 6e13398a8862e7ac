use std::path::PathBuf;

use clap::Args;
use freqloss_core::ambiguity::{ambiguity_weight_mask, fused_ambiguity};
use freqloss_core::autoblur::auto_blur;
use freqloss_core::geometry::reconstruct;
use freqloss_core::photometric::{masked_mean_loss, photometric_loss_map};
use freqloss_core::{Image, ScalarMap};
use serde::Serialize;

use super::SamplerArgs;
use crate::colormap::{render, LOSS_RANGE};
use crate::config::{ConfigFlags, RunConfig};
use crate::error::{CliError, Result};
use crate::io::{load_image, save_image, save_map};

#[derive(Debug, Clone, Args)]
pub struct LossArgs {
    #[arg(long)]
    pub target: PathBuf,
    /// Ready-made reconstruction of the target.
    #[arg(long, conflicts_with = "source")]
    pub recon: Option<PathBuf>,
    /// Source image, warped with the sampler options.
    #[arg(long)]
    pub source: Option<PathBuf>,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    /// Loss map as PFM.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// False-colour loss map as PNG.
    #[arg(long)]
    pub png: Option<PathBuf>,
    /// Weight the mean by the ambiguity mask.
    #[arg(long)]
    pub mask: bool,
    /// Auto-blur both images before comparing them.
    #[arg(long)]
    pub blur: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LossSummary {
    pub height: usize,
    pub width: usize,
    /// Mean over all pixels.
    pub mean_loss: f64,
    /// Weighted mean over valid (and, with the mask, unambiguous) pixels;
    /// null when no pixel has weight.
    pub weighted_mean_loss: Option<f64>,
    pub valid_fraction: f64,
    pub masked: bool,
    pub blurred: bool,
}

pub fn run(args: &LossArgs, flags: &ConfigFlags) -> Result<LossSummary> {
    let cfg = flags.resolve(RunConfig::default())?;
    let target = load_image(&args.target)?;
    let (h, w) = (target.height(), target.width());
    let blur = |img: &Image| -> Result<Image> {
        Ok(if args.blur {
            auto_blur(img, &cfg.autoblur)?.0
        } else {
            img.clone()
        })
    };
    let (recon, validity, ambiguity) = match (&args.recon, &args.source) {
        (Some(path), None) => {
            if !args.sampler.is_empty() {
                return Err(CliError::Usage("sampler options need --source, not --recon".into()));
            }
            let recon = load_image(path)?;
            let a = if args.mask { Some(fused_ambiguity(&target, &[])?) } else { None };
            (blur(&recon)?, ScalarMap::filled(h, w, 1.0), a)
        }
        (None, Some(path)) => {
            let source = load_image(path)?;
            let sampler = args.sampler.samplers(h, w, 1)?.remove(0);
            let a = if args.mask {
                Some(fused_ambiguity(&target, &[(&source, &sampler)])?)
            } else {
                None
            };
            let (recon, validity) = reconstruct(&blur(&source)?, &sampler)?;
            (recon, validity, a)
        }
        _ => return Err(CliError::Usage("give exactly one of --recon or --source".into())),
    };
    let loss = photometric_loss_map(&blur(&target)?, &recon, &cfg.loss)?;
    let weight = match &ambiguity {
        Some(a) => validity.zip_map(&ambiguity_weight_mask(a, &cfg.ambiguity)?, |v, m| v * m)?,
        None => validity.clone(),
    };
    let weighted = masked_mean_loss(&loss, &weight)?;
    if let Some(path) = &args.out {
        save_map(&loss, path)?;
    }
    if let Some(path) = &args.png {
        save_image(&render(&loss, LOSS_RANGE), path)?;
    }
    Ok(LossSummary {
        height: h,
        width: w,
        mean_loss: loss.mean(),
        weighted_mean_loss: (!weighted.empty).then_some(weighted.value),
        valid_fraction: validity.mean(),
        masked: args.mask,
        blurred: args.blur,
    })
}
