use std::path::PathBuf;

use clap::Args;
use freqloss_core::geometry::reconstruct;
use serde::Serialize;

use super::SamplerArgs;
use crate::config::ConfigFlags;
use crate::error::Result;
use crate::io::{load_image, save_image, save_mask};

#[derive(Debug, Clone, Args)]
pub struct WarpArgs {
    #[arg(long)]
    pub source: PathBuf,
    #[command(flatten)]
    pub sampler: SamplerArgs,
    /// Reconstructed target view.
    #[arg(long)]
    pub out: PathBuf,
    /// Validity mask: 1 where the sample fell inside the source.
    #[arg(long)]
    pub validity: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WarpSummary {
    pub height: usize,
    pub width: usize,
    pub valid_fraction: f64,
}

pub fn run(args: &WarpArgs, flags: &ConfigFlags) -> Result<WarpSummary> {
    flags.resolve(Default::default())?;
    let source = load_image(&args.source)?;
    let (h, w) = args.sampler.target_size()?.unwrap_or((source.height(), source.width()));
    let sampler = args.sampler.samplers(h, w, 1)?.remove(0);
    let (recon, validity) = reconstruct(&source, &sampler)?;
    save_image(&recon, &args.out)?;
    if let Some(path) = &args.validity {
        save_mask(&validity, path)?;
    }
    Ok(WarpSummary {
        height: h,
        width: w,
        valid_fraction: validity.mean(),
    })
}
