use std::path::PathBuf;

use clap::Args;
use freqloss_core::autoblur::auto_blur;
use serde::Serialize;

use super::fraction_nonzero;
use crate::config::{ConfigFlags, RunConfig};
use crate::error::{CliError, Result};
use crate::io::{load_image, save_image, save_map, save_mask};

#[derive(Debug, Clone, Args)]
pub struct AutoBlurArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Blurred image, for loss computation only.
    #[arg(long)]
    pub out: PathBuf,
    /// Blend weight map as PFM.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Directory for the detection maps.
    #[arg(long)]
    pub maps: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AutoBlurSummary {
    pub height: usize,
    pub width: usize,
    pub hf_pixel_fraction: f64,
    pub hf_area_fraction: f64,
    pub blurred_fraction: f64,
}

pub fn run(args: &AutoBlurArgs, flags: &ConfigFlags) -> Result<AutoBlurSummary> {
    let cfg = flags.resolve(RunConfig::default())?;
    let img = load_image(&args.input)?;
    let (blurred, plan) = auto_blur(&img, &cfg.autoblur)?;
    save_image(&blurred, &args.out)?;
    if let Some(path) = &args.plan {
        save_map(&plan.w_blur, path)?;
    }
    if let Some(dir) = &args.maps {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        save_mask(&plan.hf_pixel, &dir.join("hf_pixel.png"))?;
        save_mask(&plan.hf_area, &dir.join("hf_area.png"))?;
        save_map(&plan.hf_avg, &dir.join("hf_avg.pfm"))?;
        save_map(&plan.w_blur, &dir.join("w_blur.pfm"))?;
    }
    Ok(AutoBlurSummary {
        height: img.height(),
        width: img.width(),
        hf_pixel_fraction: fraction_nonzero(&plan.hf_pixel),
        hf_area_fraction: fraction_nonzero(&plan.hf_area),
        blurred_fraction: plan.blurred_fraction(),
    })
}
