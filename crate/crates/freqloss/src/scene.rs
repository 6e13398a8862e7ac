//! Scene files: a target/source image pair plus a JSON sidecar.
//!
//! The sidecar holds the probe and its ground-truth disparity. Per-pixel
//! ground truth and the consistency mask go to single-channel PFM files
//! named in the sidecar, relative to it.

use std::path::{Path, PathBuf};

use freqloss_core::synth::StereoScene;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io::{load_image, load_map, save_image, save_map};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    /// Ground-truth disparity at the probe.
    pub gt_disparity: f64,
    /// Probe pixel `[row, column]`.
    pub probe: [usize; 2],
    pub fp_disparity: Option<f64>,
    pub target: String,
    pub source: String,
    /// Per-pixel ground-truth disparity PFM.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_map: Option<String>,
    /// PFM marking pixels the ground truth reconstructs exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistency: Option<String>,
}

impl Sidecar {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.into(),
            source,
        })
    }
}

/// Image extension used for scene pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ImageFormat {
    Png,
    Pfm,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Pfm => "pfm",
        }
    }
}

/// Relative file names written for one scene.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SceneFiles {
    pub target: String,
    pub source: String,
    pub gt_map: String,
    pub consistency: String,
    pub sidecar: String,
}

/// Writes `{stem}_target`, `{stem}_source`, `{stem}_gt.pfm`,
/// `{stem}_consistency.pfm` and `{stem}.json` into `dir`.
pub fn save_scene(scene: &StereoScene, dir: &Path, stem: &str, format: ImageFormat) -> Result<SceneFiles> {
    let ext = format.extension();
    let files = SceneFiles {
        target: format!("{stem}_target.{ext}"),
        source: format!("{stem}_source.{ext}"),
        gt_map: format!("{stem}_gt.pfm"),
        consistency: format!("{stem}_consistency.pfm"),
        sidecar: format!("{stem}.json"),
    };
    save_image(&scene.target, &dir.join(&files.target))?;
    save_image(&scene.source, &dir.join(&files.source))?;
    save_map(&scene.gt_disparity, &dir.join(&files.gt_map))?;
    save_map(&scene.consistency, &dir.join(&files.consistency))?;
    let sidecar = Sidecar {
        gt_disparity: scene.probe_disparity(),
        probe: [scene.probe.0, scene.probe.1],
        fp_disparity: scene.fp_disparity,
        target: files.target.clone(),
        source: files.source.clone(),
        gt_map: Some(files.gt_map.clone()),
        consistency: Some(files.consistency.clone()),
    };
    let path = dir.join(&files.sidecar);
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serialises");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(files)
}

fn resolve(base: &Path, name: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(name)
}

/// Reads a scene back from its sidecar. Missing maps default to the probe
/// disparity everywhere and full consistency.
pub fn load_scene(sidecar_path: &Path) -> Result<StereoScene> {
    let s = Sidecar::load(sidecar_path)?;
    let target = load_image(&resolve(sidecar_path, &s.target))?;
    let source = load_image(&resolve(sidecar_path, &s.source))?;
    let (h, w) = (target.height(), target.width());
    let gt_disparity = match &s.gt_map {
        Some(name) => load_map(&resolve(sidecar_path, name))?,
        None => freqloss_core::ScalarMap::filled(h, w, s.gt_disparity),
    };
    let consistency = match &s.consistency {
        Some(name) => load_map(&resolve(sidecar_path, name))?,
        None => freqloss_core::ScalarMap::filled(h, w, 1.0),
    };
    if !source.same_shape(&target) || gt_disparity.height() != h || gt_disparity.width() != w {
        return Err(CliError::format(sidecar_path, "scene files differ in size"));
    }
    if consistency.height() != h || consistency.width() != w {
        return Err(CliError::format(sidecar_path, "consistency map differs in size"));
    }
    let [py, px] = s.probe;
    if py >= h || px >= w {
        return Err(CliError::format(sidecar_path, format!("probe ({py}, {px}) outside {h}x{w}")));
    }
    Ok(StereoScene {
        target,
        source,
        gt_disparity,
        probe: (py, px),
        fp_disparity: s.fp_disparity,
        consistency,
    })
}
