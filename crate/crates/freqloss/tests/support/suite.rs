//! Drives the `freqloss` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use freqloss_core::ScalarMap;

pub const BIN: &str = env!("CARGO_BIN_EXE_freqloss");

pub fn freqloss(dir: &Path, threads: &str, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env("FREQLOSS_THREADS", threads)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

/// Runs a command that must succeed and returns its summary line.
pub fn ok(dir: &Path, threads: &str, args: &[&str]) -> String {
    let out = freqloss(dir, threads, args);
    assert!(
        out.status.success(),
        "freqloss {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "one summary line expected, got {text:?}");
    text.trim_end().to_string()
}

/// Every file under `dir`, keyed by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(base: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(base, &p, out);
            } else {
                let rel = p.strip_prefix(base).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

pub struct SuiteRun {
    pub summaries: Vec<String>,
    pub files: BTreeMap<String, Vec<u8>>,
}

/// Every subcommand on generated data, writing into `dir`.
pub fn run_suite(dir: &Path, threads: &str) -> SuiteRun {
    std::fs::write(
        dir.join("config.json"),
        r#"{"ambiguity": {"delta": 0.25}, "loss": {"alpha": 0.85}}"#,
    )
    .unwrap();
    std::fs::write(
        dir.join("calib.json"),
        r#"{"fx": 50, "fy": 50, "cx": 31.5, "cy": 19.5, "rotation": [1,0,0, 0,1,0, 0,0,1], "translation": [-0.4, 0, 0]}"#,
    )
    .unwrap();
    freqloss::io::save_map(
        &ScalarMap::from_fn(40, 64, |y, x| 5.0 + 0.05 * (x + y) as f64),
        &dir.join("depth.pfm"),
    )
    .unwrap();
    let mut s = Vec::new();
    let mut run = |args: &[&str]| s.push(ok(dir, threads, args));
    run(&["synth", "--kind", "blocks", "--l", "2", "--out-dir", "blocks"]);
    run(&["synth", "--kind", "edge", "--count", "5", "--seed", "3", "--out-dir", "edge"]);
    run(&["synth", "--kind", "texture", "--count", "2", "--seed", "4", "--out-dir", "texture"]);
    run(&["synth", "--kind", "flat", "--out-dir", "flat", "--format", "pfm"]);
    run(&["synth", "--kind", "occlusion", "--count", "12", "--seed", "5", "--out-dir", "occ"]);
    let tex_t = "texture/scene_000_target.png";
    let tex_s = "texture/scene_000_source.png";
    let occ_t = "occ/scene_000_target.png";
    let occ_s = "occ/scene_000_source.png";
    run(&["freq", "--in", tex_t, "--out", "freq_plus.pfm"]);
    run(&["freq", "--in", occ_t, "--out", "freq_centered.png", "--kind", "centered"]);
    run(&["autoblur", "--in", tex_t, "--out", "ab.png", "--plan", "plan.pfm", "--maps", "ab_maps"]);
    run(&["autoblur", "--in", "flat/scene_000_target.pfm", "--out", "ab_flat.pfm"]);
    run(&[
        "ambiguity", "--target", occ_t, "--source", occ_s, "--disparity-map", "occ/scene_000_gt.pfm",
        "--out", "mask.png", "--amax", "amax.pfm", "--config", "config.json",
    ]);
    run(&[
        "ambiguity", "--target", occ_t, "--source", occ_s, "--disparity-map", "occ/scene_000_gt.pfm",
        "--out", "weights.pfm", "--amax", "amax.png", "--mask-mode", "exponential",
    ]);
    run(&[
        "loss", "--target", tex_t, "--source", tex_s, "--disparity", "4", "--out", "loss.pfm", "--png",
        "loss.png", "--mask", "--blur",
    ]);
    run(&["warp", "--source", tex_s, "--disparity", "4", "--out", "warp.png", "--validity", "valid.png"]);
    run(&["warp", "--source", tex_s, "--calib", "calib.json", "--depth", "depth.pfm", "--out", "warp_calib.pfm"]);
    run(&["loss", "--target", tex_t, "--recon", "warp.png", "--out", "loss_recon.pfm"]);
    run(&["fairness", "--scene", "blocks", "--l", "3", "--out", "fair_blocks.json", "--curves", "fair_blocks.csv"]);
    run(&[
        "fairness", "--sidecar", "texture/scene_001.json", "--out", "fair_texture.json", "--hyp-max", "8",
        "--config", "config.json",
    ]);
    run(&["stats", "--pairs", "occ/list.txt", "--out", "stats.csv"]);
    SuiteRun {
        summaries: s,
        files: snapshot(dir),
    }
}
