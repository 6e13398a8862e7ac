use std::path::PathBuf;

use clap::{Args, ValueEnum};
use freqloss_core::synth::{
    make_antialiased_edge, make_block_scene, make_flat_scene, make_occlusion_pair, make_texture_scene,
    make_translation_pair, BlockSceneSpec, OcclusionPairSpec, StereoScene,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ConfigFlags, RunConfig};
use crate::error::{CliError, Result};
use crate::scene::{save_scene, ImageFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SynthKind {
    /// Coloured block pattern with a decoy.
    Blocks,
    /// Grey step edge with a random ramp of 0 to 4 pixels.
    Edge,
    /// Uniform random texture.
    Texture,
    /// Constant grey.
    Flat,
    /// Anti-aliased foreground rectangle over a background.
    Occlusion,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = ImageFormat::Png)]
    pub format: ImageFormat,
    /// Block width for `blocks`.
    #[arg(long, default_value_t = 3)]
    pub l: usize,
    #[arg(long, default_value_t = 40)]
    pub height: usize,
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    /// Disparity of `texture` and `flat` scenes.
    #[arg(long, default_value_t = 4)]
    pub shift: usize,
    /// Independent uniform noise amplitude per view for `occlusion`.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f32,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthSummary {
    pub kind: SynthKind,
    pub count: usize,
    pub seed: u64,
    /// Pair list, one `target source gt_map` line per scene.
    pub list: String,
}

fn generate(args: &SynthArgs, rng: &mut ChaCha8Rng) -> Result<StereoScene> {
    let (h, w) = (args.height, args.width);
    Ok(match args.kind {
        SynthKind::Blocks => make_block_scene(&BlockSceneSpec::new(args.l))?,
        SynthKind::Edge => {
            let ramp = rng.gen_range(0..=4usize);
            let edge_col = rng.gen_range(w / 4..w / 2);
            let (a, b) = (rng.gen::<f32>(), rng.gen::<f32>());
            let base = make_antialiased_edge(w, h, edge_col, ramp, a.min(b), a.max(b))?;
            make_translation_pair(&base, args.shift as f64)?
        }
        SynthKind::Texture => make_texture_scene(rng, h, w, args.shift)?,
        SynthKind::Flat => make_flat_scene(h, w, rng.gen(), args.shift)?,
        SynthKind::Occlusion => make_occlusion_pair(
            rng,
            &OcclusionPairSpec {
                height: h,
                width: w,
                noise: args.noise,
                ..OcclusionPairSpec::default()
            },
        )?,
    })
}

pub fn run(args: &SynthArgs, flags: &ConfigFlags) -> Result<SynthSummary> {
    flags.resolve(RunConfig::default())?;
    if args.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    if args.kind == SynthKind::Edge && args.width < 8 {
        return Err(CliError::Usage("edge scenes need a width of at least 8".into()));
    }
    if !(args.noise.is_finite() && args.noise >= 0.0) {
        return Err(CliError::Usage("--noise must be a non-negative number".into()));
    }
    let dir = &args.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let digits = (args.count - 1).to_string().len().max(3);
    let mut list = String::new();
    for i in 0..args.count {
        let scene = generate(args, &mut rng)?;
        let files = save_scene(&scene, dir, &format!("scene_{i:0digits$}"), args.format)?;
        list.push_str(&format!("{} {} {}\n", files.target, files.source, files.gt_map));
    }
    let list_path = dir.join("list.txt");
    std::fs::write(&list_path, list).map_err(|e| CliError::io(&list_path, e))?;
    Ok(SynthSummary {
        kind: args.kind,
        count: args.count,
        seed: args.seed,
        list: list_path.display().to_string(),
    })
}
