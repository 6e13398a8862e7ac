use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use freqloss_core::autoblur::AutoBlurConfig;
use freqloss_core::fairness::{FairnessReport, Fraction, LossCurve, SweepContext};
use freqloss_core::photometric::LossConfig;
use freqloss_core::synth::{make_block_scene, BlockSceneSpec, StereoScene};
use freqloss_core::ScalarMap;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigFile, ConfigFlags, RunConfig, SweepSettings};
use crate::error::{CliError, Result};
use crate::io::load_image;
use crate::scene::load_scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SceneName {
    /// Coloured blocks with a dimmed true match and a look-alike decoy.
    Blocks,
}

#[derive(Debug, Clone, Args)]
pub struct FairnessArgs {
    /// Built-in scene.
    #[arg(long, value_enum, conflicts_with_all = ["sidecar", "target"])]
    pub scene: Option<SceneName>,
    /// Block width of the built-in scene.
    #[arg(long, default_value_t = 3)]
    pub l: usize,
    /// Decoy distance from the true match in blocks; odd, at least 3.
    #[arg(long)]
    pub decoy_blocks: Option<usize>,
    /// Scene sidecar JSON written by `synth`.
    #[arg(long, conflicts_with = "target")]
    pub sidecar: Option<PathBuf>,
    #[arg(long, requires_all = ["source", "probe", "gt"])]
    pub target: Option<PathBuf>,
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Probe pixel as `ROW,COL`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub probe: Vec<usize>,
    /// Ground-truth disparity at the probe.
    #[arg(long, allow_negative_numbers = true)]
    pub gt: Option<f64>,
    /// Disparity of a known false match.
    #[arg(long, allow_negative_numbers = true)]
    pub fp: Option<f64>,
    /// Report JSON.
    #[arg(long)]
    pub out: PathBuf,
    /// Curves CSV: hypothesis, loss_baseline, loss_autoblur.
    #[arg(long)]
    pub curves: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionJson {
    pub passing: usize,
    pub intervals: usize,
    pub value: f64,
}

impl From<Fraction> for FractionJson {
    fn from(f: Fraction) -> Self {
        FractionJson {
            passing: f.passing,
            intervals: f.intervals,
            value: f.value(),
        }
    }
}

/// Report file contents.
#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub probe: [usize; 2],
    pub gt_disparity: f64,
    pub fp_disparity: Option<f64>,
    pub hypotheses: Vec<f64>,
    pub loss_baseline: Vec<f64>,
    pub loss_autoblur: Vec<f64>,
    pub d_fair_baseline: FractionJson,
    pub d_fair_autoblur: FractionJson,
    pub fp_hidden_baseline: bool,
    pub fp_exposed: bool,
    pub monotone_radius_baseline: f64,
    pub monotone_radius: f64,
    pub degenerate: bool,
    pub config: ConfigFile,
}

#[derive(Debug, Clone, Serialize)]
pub struct FairnessSummary {
    pub hypotheses: usize,
    pub gt_disparity: f64,
    pub fp_disparity: Option<f64>,
    pub d_fair_baseline: f64,
    pub d_fair_autoblur: f64,
    pub fp_hidden_baseline: bool,
    pub fp_exposed: bool,
    pub monotone_radius: f64,
    pub degenerate: bool,
}

/// Defaults of the built-in block scene: plain L1 and the block blur preset.
pub fn block_scene_defaults(spec: &BlockSceneSpec) -> RunConfig {
    let hyps = spec.hypotheses();
    RunConfig {
        loss: LossConfig::l1(),
        autoblur: AutoBlurConfig::block_pattern_preset(spec.block),
        sweep: SweepSettings {
            patch: 3,
            min: hyps[0],
            max: hyps[hyps.len() - 1],
            step: 1.0,
        },
        ..RunConfig::default()
    }
}

fn load_scene_inputs(args: &FairnessArgs) -> Result<(StereoScene, RunConfig)> {
    if let Some(name) = args.scene {
        match name {
            SceneName::Blocks => {
                let mut spec = BlockSceneSpec::new(args.l);
                if let Some(k) = args.decoy_blocks {
                    spec.decoy_blocks = k;
                }
                return Ok((make_block_scene(&spec)?, block_scene_defaults(&spec)));
            }
        }
    }
    if args.decoy_blocks.is_some() {
        return Err(CliError::Usage("--decoy-blocks only applies with --scene".into()));
    }
    if let Some(path) = &args.sidecar {
        return Ok((load_scene(path)?, RunConfig::default()));
    }
    let (Some(t), Some(s), Some(gt)) = (&args.target, &args.source, args.gt) else {
        return Err(CliError::Usage("give --scene, --sidecar or --target/--source/--probe/--gt".into()));
    };
    let [py, px] = args.probe[..] else {
        return Err(CliError::Usage("--probe takes ROW,COL".into()));
    };
    let target = load_image(t)?;
    let source = load_image(s)?;
    let (h, w) = (target.height(), target.width());
    if py >= h || px >= w {
        return Err(CliError::Usage(format!("probe ({py}, {px}) outside {h}x{w}")));
    }
    let scene = StereoScene {
        target,
        source,
        gt_disparity: ScalarMap::filled(h, w, gt),
        probe: (py, px),
        fp_disparity: args.fp,
        consistency: ScalarMap::filled(h, w, 1.0),
    };
    Ok((scene, RunConfig::default()))
}

fn sweep(ctx: &SweepContext, hyps: &[f64]) -> Result<Vec<f64>> {
    Ok(hyps
        .par_iter()
        .map(|&d| ctx.loss_at(d))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Both landscapes, evaluated in parallel and collected in grid order.
pub fn fairness_report(scene: &StereoScene, cfg: &RunConfig) -> Result<FairnessReport> {
    let hyps = cfg.sweep.hypotheses()?;
    let gt = scene.probe_disparity();
    let contexts = [None, Some(&cfg.autoblur)].map(|blur| {
        SweepContext::new(&scene.target, &scene.source, scene.probe, cfg.sweep.patch, &cfg.loss, blur)
    });
    let [base, blur] = contexts;
    let base = LossCurve::new(hyps.clone(), sweep(&base?, &hyps)?, gt)?;
    let blur = LossCurve::new(hyps.clone(), sweep(&blur?, &hyps)?, gt)?;
    Ok(FairnessReport::from_curves(base, blur, scene.fp_disparity)?)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}

/// Curves as CSV with a header row.
pub fn curves_csv(report: &FairnessReport) -> String {
    let mut out = String::from("hypothesis,loss_baseline,loss_autoblur\n");
    let b = &report.curve_baseline;
    for (i, h) in b.hypotheses().iter().enumerate() {
        out.push_str(&format!("{h},{},{}\n", b.losses()[i], report.curve_autoblur.losses()[i]));
    }
    out
}

pub fn run(args: &FairnessArgs, flags: &ConfigFlags) -> Result<FairnessSummary> {
    let (scene, defaults) = load_scene_inputs(args)?;
    let cfg = flags.resolve(defaults)?;
    let report = fairness_report(&scene, &cfg)?;
    let json = ReportJson {
        probe: [scene.probe.0, scene.probe.1],
        gt_disparity: report.curve_baseline.gt(),
        fp_disparity: report.fp_disparity,
        hypotheses: report.curve_baseline.hypotheses().to_vec(),
        loss_baseline: report.curve_baseline.losses().to_vec(),
        loss_autoblur: report.curve_autoblur.losses().to_vec(),
        d_fair_baseline: report.d_fair_baseline.into(),
        d_fair_autoblur: report.d_fair_autoblur.into(),
        fp_hidden_baseline: report.fp_hidden_baseline,
        fp_exposed: report.fp_exposed,
        monotone_radius_baseline: report.monotone_radius_baseline,
        monotone_radius: report.monotone_radius,
        degenerate: report.degenerate,
        config: cfg.to_layer(),
    };
    let mut text = serde_json::to_string_pretty(&json).expect("report serialises");
    text.push('\n');
    write_file(&args.out, &text)?;
    if let Some(path) = &args.curves {
        write_file(path, &curves_csv(&report))?;
    }
    Ok(FairnessSummary {
        hypotheses: json.hypotheses.len(),
        gt_disparity: json.gt_disparity,
        fp_disparity: json.fp_disparity,
        d_fair_baseline: json.d_fair_baseline.value,
        d_fair_autoblur: json.d_fair_autoblur.value,
        fp_hidden_baseline: json.fp_hidden_baseline,
        fp_exposed: json.fp_exposed,
        monotone_radius: json.monotone_radius,
        degenerate: json.degenerate,
    })
}
