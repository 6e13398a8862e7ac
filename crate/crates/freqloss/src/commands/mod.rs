//! Subcommands. Each prints a one-line JSON [`Summary`] on success.
//!
//! Auto-blurred images only ever feed the loss; no subcommand hands them to
//! anything that predicts depth or disparity.

mod ambiguity;
mod autoblur;
mod fairness;
mod freq;
mod loss;
mod stats;
mod synth;
mod warp;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use freqloss_core::geometry::{disparity_sampler, reprojection_sampler, DepthMap};
use freqloss_core::{Sampler, ScalarMap};
use serde::Serialize;

use crate::calib::Calibration;
use crate::config::ConfigFlags;
use crate::error::{CliError, Result};
use crate::io::load_map;

pub use self::ambiguity::{AmbiguityArgs, AmbiguitySummary};
pub use self::autoblur::{AutoBlurArgs, AutoBlurSummary};
pub use self::fairness::{block_scene_defaults, fairness_report, FairnessArgs, FairnessSummary, SceneName};
pub use self::freq::{FreqArgs, FreqKind, FreqSummary};
pub use self::loss::{LossArgs, LossSummary};
pub use self::stats::{StatsArgs, StatsSummary};
pub use self::synth::{SynthArgs, SynthKind, SynthSummary};
pub use self::warp::{WarpArgs, WarpSummary};

/// Environment variable capping the worker count; 0 picks automatically.
pub const THREADS_ENV: &str = "FREQLOSS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "freqloss", version, about = "Frequency-aware photometric loss toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub config: ConfigFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spatial-frequency map of an image.
    Freq(FreqArgs),
    /// Fused ambiguity and the loss mask it implies.
    Ambiguity(AmbiguityArgs),
    /// Adaptive blur of high-frequency areas (loss path only).
    Autoblur(AutoBlurArgs),
    /// Per-pixel photometric loss of a reconstruction.
    Loss(LossArgs),
    /// Reconstruct the target view from a source image.
    Warp(WarpArgs),
    /// Loss landscapes with and without auto-blur at one probe.
    Fairness(FairnessArgs),
    /// Generate synthetic scenes with ground truth.
    Synth(SynthArgs),
    /// Loss statistics of ambiguous against other pixels over a batch.
    Stats(StatsArgs),
}

/// One-line result record, tagged by subcommand.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Summary {
    Freq(FreqSummary),
    Ambiguity(AmbiguitySummary),
    Autoblur(AutoBlurSummary),
    Loss(LossSummary),
    Warp(WarpSummary),
    Fairness(FairnessSummary),
    Synth(SynthSummary),
    Stats(StatsSummary),
}

impl Summary {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("summary serialises")
    }
}

/// How target pixels map into each source image.
#[derive(Debug, Clone, Default, Args)]
pub struct SamplerArgs {
    /// Constant disparity, one per source or one for all.
    #[arg(long, allow_negative_numbers = true)]
    pub disparity: Vec<f64>,
    /// Disparity map PFM, one per source or one for all.
    #[arg(long)]
    pub disparity_map: Vec<PathBuf>,
    /// Calibration JSON, one per source or one for all; needs --depth.
    #[arg(long)]
    pub calib: Vec<PathBuf>,
    /// Target depth PFM; non-positive or NaN values are holes.
    #[arg(long)]
    pub depth: Option<PathBuf>,
    /// Source column is `u - sign * d` for disparity samplers.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sign: f64,
}

fn broadcast<T: Clone>(items: &[T], n: usize, flag: &str) -> Result<Vec<T>> {
    match items.len() {
        1 => Ok(vec![items[0].clone(); n]),
        k if k == n => Ok(items.to_vec()),
        k => Err(CliError::Usage(format!("--{flag} given {k} times for {n} sources"))),
    }
}

fn load_depth(path: &Path) -> Result<DepthMap> {
    let depth = load_map(path)?;
    let valid = depth.map(|d| if d > 0.0 && d.is_finite() { 1.0 } else { 0.0 });
    let depth = depth.map(|d| if d > 0.0 && d.is_finite() { d } else { 1.0 });
    Ok(DepthMap::with_validity(depth, valid)?)
}

impl SamplerArgs {
    /// No sampler option given.
    pub fn is_empty(&self) -> bool {
        self.disparity.is_empty() && self.disparity_map.is_empty() && self.calib.is_empty() && self.depth.is_none()
    }

    /// One sampler per source for a `height` x `width` target.
    pub fn samplers(&self, height: usize, width: usize, n: usize) -> Result<Vec<Sampler>> {
        let kinds = [!self.disparity.is_empty(), !self.disparity_map.is_empty(), !self.calib.is_empty()];
        if kinds.iter().filter(|&&k| k).count() != 1 {
            return Err(CliError::Usage(
                "give exactly one of --disparity, --disparity-map or --calib".into(),
            ));
        }
        if self.calib.is_empty() && self.depth.is_some() {
            return Err(CliError::Usage("--depth only applies with --calib".into()));
        }
        let check = |s: Sampler, what: &Path| -> Result<Sampler> {
            if s.height() != height || s.width() != width {
                return Err(CliError::format(
                    what,
                    format!("is {}x{} but the target is {height}x{width}", s.height(), s.width()),
                ));
            }
            Ok(s)
        };
        if !self.disparity.is_empty() {
            return broadcast(&self.disparity, n, "disparity")?
                .into_iter()
                .map(|d| Ok(disparity_sampler(&ScalarMap::filled(height, width, d), self.sign)?))
                .collect();
        }
        if !self.disparity_map.is_empty() {
            return broadcast(&self.disparity_map, n, "disparity-map")?
                .iter()
                .map(|p| check(disparity_sampler(&load_map(p)?, self.sign)?, p))
                .collect();
        }
        let depth_path = self
            .depth
            .as_ref()
            .ok_or_else(|| CliError::Usage("--calib needs --depth".into()))?;
        let depth = load_depth(depth_path)?;
        broadcast(&self.calib, n, "calib")?
            .iter()
            .map(|p| {
                let c = Calibration::load(p)?;
                check(reprojection_sampler(&depth, &c.pose()?, &c.intrinsics()?), depth_path)
            })
            .collect()
    }

    /// Target size implied by the sampler inputs alone, if any.
    pub fn target_size(&self) -> Result<Option<(usize, usize)>> {
        if let Some(p) = self.disparity_map.first() {
            let m = load_map(p)?;
            return Ok(Some((m.height(), m.width())));
        }
        if let (false, Some(p)) = (self.calib.is_empty(), &self.depth) {
            let m = load_map(p)?;
            return Ok(Some((m.height(), m.width())));
        }
        Ok(None)
    }
}

/// Fraction of nonzero entries.
pub(crate) fn fraction_nonzero(map: &ScalarMap) -> f64 {
    map.count_nonzero() as f64 / map.len() as f64
}

fn configure_threads() -> Result<()> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}")))?,
        Err(_) => 0,
    };
    // the global pool can only be built once per process
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
        log::debug!("thread pool already configured: {e}");
    }
    Ok(())
}

/// Runs one parsed command.
pub fn execute(cli: &Cli) -> Result<Summary> {
    let flags = &cli.config;
    Ok(match &cli.command {
        Command::Freq(a) => Summary::Freq(freq::run(a, flags)?),
        Command::Ambiguity(a) => Summary::Ambiguity(ambiguity::run(a, flags)?),
        Command::Autoblur(a) => Summary::Autoblur(autoblur::run(a, flags)?),
        Command::Loss(a) => Summary::Loss(loss::run(a, flags)?),
        Command::Warp(a) => Summary::Warp(warp::run(a, flags)?),
        Command::Fairness(a) => Summary::Fairness(fairness::run(a, flags)?),
        Command::Synth(a) => Summary::Synth(synth::run(a, flags)?),
        Command::Stats(a) => Summary::Stats(stats::run(a, flags)?),
    })
}

/// Parses `argv`, runs it and reports on stdout or stderr. Returns the exit
/// code: 0 on success, 1 on usage errors, 2 on data errors.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = CliError::Usage(e.render().to_string().trim_end().to_string());
            eprintln!("{}", err.to_json_line());
            return err.exit_code();
        }
    };
    match configure_threads().and_then(|()| execute(&cli)) {
        Ok(summary) => {
            println!("{}", summary.to_json_line());
            0
        }
        Err(err) => {
            eprintln!("{}", err.to_json_line());
            err.exit_code()
        }
    }
}
