//! Synthetic scenes with known correspondences.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::bail;
use crate::image::{bilinear_sample, Border, Image, Sampler, ScalarMap};
use crate::math::floor;
use crate::Result;

/// A rectified target/source pair with its ground truth.
///
/// The target pixel at column `u` shows the source pixel at column
/// `u - gt_disparity`.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoScene {
    pub target: Image,
    pub source: Image,
    pub gt_disparity: ScalarMap,
    /// Pixel `(row, column)` of interest in the target.
    pub probe: (usize, usize),
    /// Disparity at which the probe meets a look-alike that is not its match.
    pub fp_disparity: Option<f64>,
    /// 1 where the target really is the source seen through the ground truth.
    pub consistency: ScalarMap,
}

impl StereoScene {
    pub fn height(&self) -> usize {
        self.target.height()
    }

    pub fn width(&self) -> usize {
        self.target.width()
    }

    pub fn probe_disparity(&self) -> f64 {
        self.gt_disparity.get(self.probe.0, self.probe.1)
    }
}

/// Grey image `low | ramp | high` split at `edge_col`; the `ramp` pixels go
/// linearly from `low` to `high`, excluding both ends.
pub fn make_antialiased_edge(
    width: usize,
    height: usize,
    edge_col: usize,
    ramp: usize,
    low: f32,
    high: f32,
) -> Result<Image> {
    if edge_col == 0 || edge_col + ramp + 1 > width {
        bail!(
            Argument,
            "an edge at column {edge_col} with a {ramp}-pixel ramp does not fit in width {width}"
        );
    }
    let step = (f64::from(high) - f64::from(low)) / (ramp + 1) as f64;
    Image::from_fn(height, width, 1, |_, x, _| {
        if x < edge_col {
            low
        } else if x < edge_col + ramp {
            (f64::from(low) + step * (x - edge_col + 1) as f64) as f32
        } else {
            high
        }
    })
}

pub const RED: [f32; 3] = [1.0, 0.0, 0.0];
pub const GREEN: [f32; 3] = [0.0, 1.0, 0.0];
pub const BLUE: [f32; 3] = [0.0, 0.0, 1.0];

/// A repeating pattern of colour blocks with a red probe block and a red
/// decoy further away.
///
/// Blocks alternate between two background colours. The probe block in the
/// target matches a red block in the source whose neighbours are the first
/// background colour; the decoy's neighbours are the second one. The source
/// copy of the probe block is dimmed, so without context the decoy matches
/// the probe better than its true correspondence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSceneSpec {
    /// Block width in pixels.
    pub block: usize,
    /// Decoy distance from the true match, in blocks; odd and at least 3.
    pub decoy_blocks: usize,
    pub height: usize,
    /// Number of background blocks.
    pub blocks: usize,
    /// Colour of the true match in the source.
    pub match_colour: [f32; 3],
    pub backgrounds: [[f32; 3]; 2],
}

impl BlockSceneSpec {
    pub fn new(block: usize) -> Self {
        BlockSceneSpec {
            block,
            decoy_blocks: 5,
            height: 64,
            blocks: 40,
            match_colour: [0.7, 0.0, 0.0],
            backgrounds: [GREEN, BLUE],
        }
    }

    /// Ground-truth disparity: two blocks.
    pub fn gt_disparity(&self) -> usize {
        2 * self.block
    }

    pub fn fp_disparity(&self) -> usize {
        self.gt_disparity() + self.decoy_blocks * self.block
    }

    /// Integer hypotheses from 0 to one block past the decoy.
    pub fn hypotheses(&self) -> Vec<f64> {
        (0..=self.fp_disparity() + self.block).map(|d| d as f64).collect()
    }
}

pub fn make_block_scene(spec: &BlockSceneSpec) -> Result<StereoScene> {
    let l = spec.block;
    if l == 0 {
        bail!(Argument, "block width must be positive");
    }
    if spec.decoy_blocks < 3 || spec.decoy_blocks.is_multiple_of(2) {
        bail!(
            Argument,
            "decoy offset must be an odd number of blocks >= 3 (got {}); otherwise it sits on a true match",
            spec.decoy_blocks
        );
    }
    if spec.height < 3 {
        bail!(Argument, "scene height must be at least 3, got {}", spec.height);
    }
    let gt = spec.gt_disparity();
    let fp = spec.fp_disparity();
    let width = spec.blocks * l + fp + 4 * l;
    // red blocks get an odd width so the probe sits on their centre column
    let red_width = l | 1;
    let x0 = (width / 2) / l * l;
    let decoy = x0 - spec.decoy_blocks * l;
    let source_colour = |u: usize| -> [f32; 3] {
        if (x0..x0 + red_width).contains(&u) {
            return spec.match_colour;
        }
        if (decoy..decoy + red_width).contains(&u) {
            return RED;
        }
        let k = floor((u as f64 - x0 as f64) / l as f64) as i64;
        spec.backgrounds[if k.rem_euclid(2) == 0 { 1 } else { 0 }]
    };
    let probe_cols = x0 + gt..x0 + gt + red_width;
    let target_colour = |u: usize| -> [f32; 3] {
        if probe_cols.contains(&u) {
            RED
        } else {
            source_colour(u.saturating_sub(gt))
        }
    };
    let source = Image::from_fn(spec.height, width, 3, |_, x, c| source_colour(x)[c])?;
    let target = Image::from_fn(spec.height, width, 3, |_, x, c| target_colour(x)[c])?;
    let consistency = ScalarMap::from_fn(spec.height, width, |_, x| {
        if x < gt || (probe_cols.contains(&x) && spec.match_colour != RED) {
            0.0
        } else {
            1.0
        }
    });
    Ok(StereoScene {
        target,
        source,
        gt_disparity: ScalarMap::filled(spec.height, width, gt as f64),
        probe: (spec.height / 2, x0 + gt + red_width / 2),
        fp_disparity: Some(fp as f64),
        consistency,
    })
}

/// Pixels whose reconstruction at disparity `shift` only reads source
/// pixels that were themselves filled from inside `base`. With a fractional
/// shift the two interpolations only cancel where `base` is affine along
/// the three columns they touch.
fn translation_consistency(base: &Image, shift: f64) -> ScalarMap {
    let (height, width) = (base.height(), base.width());
    let last = (width - 1) as f64;
    let integral = shift == floor(shift);
    ScalarMap::from_fn(height, width, |y, x| {
        let s = x as f64 - shift;
        let (lo, hi) = (floor(s), floor(s) + if integral { 0.0 } else { 1.0 });
        let inside = |p: f64| p >= 0.0 && p <= last && p + shift >= 0.0 && p + shift <= last;
        if !(inside(lo) && inside(hi)) {
            return 0.0;
        }
        if !integral {
            let q = floor(lo + shift) as usize;
            if q + 2 >= width {
                return 0.0;
            }
            let curved = (0..base.channels()).any(|c| {
                let v = |col: usize| f64::from(base.get(y, col, c));
                (v(q) - 2.0 * v(q + 1) + v(q + 2)).abs() > 1e-6
            });
            if curved {
                return 0.0;
            }
        }
        1.0
    })
}

/// Pair whose source is `base` moved `shift` pixels to the left, so that
/// `base` is recovered from the source at disparity `shift`.
pub fn make_translation_pair(base: &Image, shift: f64) -> Result<StereoScene> {
    let (h, w) = (base.height(), base.width());
    if !shift.is_finite() || shift.abs() >= w as f64 / 2.0 {
        bail!(Argument, "shift {shift} must be smaller than half the width {w}");
    }
    let sampler = Sampler::from_fn(h, w, |y, x| (x as f64 + shift, y as f64));
    let (source, _) = bilinear_sample(base, &sampler, Border::Clamp)?;
    Ok(StereoScene {
        target: base.clone(),
        source,
        gt_disparity: ScalarMap::filled(h, w, shift),
        probe: (h / 2, w / 2),
        fp_disparity: None,
        consistency: translation_consistency(base, shift),
    })
}

/// Uniform random RGB texture.
pub fn random_texture<R: Rng>(rng: &mut R, height: usize, width: usize) -> Result<Image> {
    Image::from_fn(height, width, 3, |_, _, _| rng.gen::<f32>())
}

/// Random texture seen at a constant integer disparity.
pub fn make_texture_scene<R: Rng>(rng: &mut R, height: usize, width: usize, disparity: usize) -> Result<StereoScene> {
    make_translation_pair(&random_texture(rng, height, width)?, disparity as f64)
}

/// A constant grey pair: no texture, no signal.
pub fn make_flat_scene(height: usize, width: usize, value: f32, disparity: usize) -> Result<StereoScene> {
    make_translation_pair(&Image::filled(height, width, 3, value)?, disparity as f64)
}

/// Settings for [`make_occlusion_pair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcclusionPairSpec {
    pub height: usize,
    pub width: usize,
    /// Background disparity range.
    pub bg_disparity: (f64, f64),
    /// Extra foreground disparity range on top of the background.
    pub fg_extra: (f64, f64),
    /// Amplitude of independent additive uniform noise in each view; any
    /// noise leaves no pixel consistent.
    pub noise: f32,
}

impl Default for OcclusionPairSpec {
    fn default() -> Self {
        OcclusionPairSpec {
            height: 40,
            width: 64,
            bg_disparity: (1.0, 3.0),
            fg_extra: (2.0, 6.0),
            noise: 0.0,
        }
    }
}

/// Overlap of `[a0, a1)` with `[b0, b1)`.
fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

/// A flat foreground rectangle over a flat background, rendered with box
/// anti-aliasing in both views. The rectangle sits at a larger sub-pixel
/// disparity than the background, so its blended border pixels have no
/// exact correspondence.
///
/// The ground truth assigns each target pixel the disparity of the surface
/// covering most of it.
pub fn make_occlusion_pair<R: Rng>(rng: &mut R, spec: &OcclusionPairSpec) -> Result<StereoScene> {
    let (h, w) = (spec.height, spec.width);
    if h < 12 || w < 24 {
        bail!(Argument, "occlusion pairs need at least 12x24 pixels, got {h}x{w}");
    }
    let mut colour = || -> [f32; 3] { [rng.gen(), rng.gen(), rng.gen()] };
    let (bg, mut fg) = (colour(), colour());
    // keep a clear luminance contrast so the border is a real edge
    let lum = |c: &[f32; 3]| (c[0] + c[1] + c[2]) / 3.0;
    let target_contrast = rng.gen_range(0.45f32..0.95);
    let sign = if lum(&bg) > 0.5 { -1.0 } else { 1.0 };
    let delta = lum(&bg) + sign * target_contrast - lum(&fg);
    for c in fg.iter_mut() {
        *c = (*c + delta).clamp(0.0, 1.0);
    }
    let d_bg = rng.gen_range(spec.bg_disparity.0..spec.bg_disparity.1);
    let d_fg = d_bg + rng.gen_range(spec.fg_extra.0..spec.fg_extra.1);
    let wf = w as f64;
    let hf = h as f64;
    let x0 = rng.gen_range(wf * 0.3..wf * 0.45);
    let x1 = x0 + rng.gen_range(wf * 0.2..wf * 0.35);
    let y0 = rng.gen_range(hf * 0.15..hf * 0.3);
    let y1 = y0 + rng.gen_range(hf * 0.35..hf * 0.55);
    // anti-aliasing footprint in pixels
    let aa = rng.gen_range(1.0..2.0);

    let coverage = |x: usize, y: usize, shift: f64| -> f64 {
        let (cx, cy) = (x as f64, y as f64);
        let fx = overlap(cx - aa / 2.0, cx + aa / 2.0, x0 - shift, x1 - shift) / aa;
        let fy = overlap(cy - aa / 2.0, cy + aa / 2.0, y0, y1) / aa;
        fx * fy
    };
    let noise = spec.noise;
    let mut render = |shift: f64| -> Result<Image> {
        let mut data = Vec::with_capacity(h * w * 3);
        for y in 0..h {
            for x in 0..w {
                let k = coverage(x, y, shift);
                for c in 0..3 {
                    let v = k * f64::from(fg[c]) + (1.0 - k) * f64::from(bg[c]);
                    let n = if noise > 0.0 { rng.gen_range(-noise..noise) } else { 0.0 };
                    data.push((v as f32 + n).clamp(0.0, 1.0));
                }
            }
        }
        Image::new(h, w, 3, data)
    };
    let target = render(0.0)?;
    let source = render(d_fg)?;
    // the flat background makes its own shift invisible; only the foreground moves
    let gt_disparity = ScalarMap::from_fn(h, w, |y, x| if coverage(x, y, 0.0) >= 0.5 { d_fg } else { d_bg });
    // unblended pixels whose source neighbours show the same surface
    let consistency = ScalarMap::from_fn(h, w, |y, x| {
        let k = coverage(x, y, 0.0);
        if noise > 0.0 || (k != 0.0 && k != 1.0) {
            return 0.0;
        }
        let s = x as f64 - gt_disparity.get(y, x);
        let (lo, hi) = (floor(s), floor(s) + 1.0);
        if lo < 0.0 || hi > (w - 1) as f64 {
            return 0.0;
        }
        let same = [lo, hi].iter().all(|&p| coverage(p as usize, y, d_fg) == k);
        if same {
            1.0
        } else {
            0.0
        }
    });
    Ok(StereoScene {
        target,
        source,
        gt_disparity,
        probe: (h / 2, w / 2),
        fp_disparity: None,
        consistency,
    })
}
