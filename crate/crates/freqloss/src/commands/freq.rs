use std::path::PathBuf;

use clap::{Args, ValueEnum};
use freqloss_core::frequency::{centered_frequency, one_sided_frequency, Direction};
use serde::Serialize;

use crate::colormap::{render, AMBIGUITY_RANGE};
use crate::config::{ConfigFlags, RunConfig};
use crate::error::Result;
use crate::io::{load_image, save_image, save_map, Format};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FreqKind {
    /// Norm of the forward differences (`du+`, `dv+`).
    Plus,
    /// Norm of the backward differences (`du-`, `dv-`).
    Minus,
    /// Norm of the centred half-differences of the luminance.
    Centered,
}

#[derive(Debug, Clone, Args)]
pub struct FreqArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// PFM gets raw values; PNG a false-colour rendering.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FreqKind::Plus)]
    pub kind: FreqKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct FreqSummary {
    pub kind: FreqKind,
    pub height: usize,
    pub width: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

pub fn run(args: &FreqArgs, flags: &ConfigFlags) -> Result<FreqSummary> {
    let cfg = flags.resolve(RunConfig::default())?;
    let img = load_image(&args.input)?;
    let reduction = cfg.autoblur.reduction;
    let map = match args.kind {
        FreqKind::Plus => one_sided_frequency(&img, Direction::Plus, reduction)?,
        FreqKind::Minus => one_sided_frequency(&img, Direction::Minus, reduction)?,
        FreqKind::Centered => centered_frequency(&img)?,
    };
    match Format::of(&args.out)? {
        Format::Pfm => save_map(&map, &args.out)?,
        Format::Png => save_image(&render(&map, AMBIGUITY_RANGE), &args.out)?,
    }
    Ok(FreqSummary {
        kind: args.kind,
        height: map.height(),
        width: map.width(),
        min: map.min(),
        max: map.max(),
        mean: map.mean(),
    })
}
