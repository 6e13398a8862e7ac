//! Loss-versus-disparity sweeps and the fairness degree of a loss landscape.
//!
//! A landscape is fair at a hypothesis when its slope points away from the
//! ground truth. The fairness degree is the fraction of sweep intervals that
//! pass this test; an absolutely fair loss (`|x - gt|`, say) scores 1.

use alloc::vec::Vec;

use crate::autoblur::{auto_blur, AutoBlurConfig};
use crate::error::bail;
use crate::geometry::reconstruct;
use crate::image::{Image, Sampler};
use crate::photometric::{photometric_loss_map, LossConfig};
use crate::synth::StereoScene;
use crate::Result;

/// Losses for an increasing list of hypotheses and their ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    hypotheses: Vec<f64>,
    losses: Vec<f64>,
    gt: f64,
}

impl LossCurve {
    pub fn new(hypotheses: Vec<f64>, losses: Vec<f64>, gt: f64) -> Result<Self> {
        if hypotheses.len() != losses.len() {
            bail!(
                Argument,
                "{} hypotheses but {} losses",
                hypotheses.len(),
                losses.len()
            );
        }
        if hypotheses.len() < 3 {
            bail!(Argument, "a loss curve needs at least 3 points, got {}", hypotheses.len());
        }
        check_increasing(&hypotheses)?;
        if losses.iter().any(|l| !l.is_finite()) {
            bail!(Domain, "loss values must be finite");
        }
        let (lo, hi) = (hypotheses[0], hypotheses[hypotheses.len() - 1]);
        if !(lo..=hi).contains(&gt) {
            bail!(Domain, "ground truth {gt} lies outside the swept range [{lo}, {hi}]");
        }
        Ok(LossCurve { hypotheses, losses, gt })
    }

    pub fn hypotheses(&self) -> &[f64] {
        &self.hypotheses
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn gt(&self) -> f64 {
        self.gt
    }

    pub fn len(&self) -> usize {
        self.losses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.losses.is_empty()
    }

    /// Loss at the hypothesis equal to `x`, if it is on the grid.
    pub fn loss_at(&self, x: f64) -> Option<f64> {
        self.hypotheses
            .iter()
            .position(|&h| (h - x).abs() < 1e-9)
            .map(|i| self.losses[i])
    }

    /// Whether the loss varies by no more than `tol` over the sweep.
    pub fn is_flat(&self, tol: f64) -> bool {
        let hi = self.losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = self.losses.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo <= tol
    }
}

fn check_increasing(hypotheses: &[f64]) -> Result<()> {
    if hypotheses.iter().any(|h| !h.is_finite()) {
        bail!(Domain, "hypotheses must be finite");
    }
    if let Some(i) = hypotheses.windows(2).position(|w| !(w[1] > w[0])) {
        bail!(
            Argument,
            "hypotheses must be strictly increasing ({} then {})",
            hypotheses[i],
            hypotheses[i + 1]
        );
    }
    Ok(())
}

/// `passing / intervals`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub passing: usize,
    pub intervals: usize,
}

impl Fraction {
    pub fn value(&self) -> f64 {
        if self.intervals == 0 {
            0.0
        } else {
            self.passing as f64 / self.intervals as f64
        }
    }
}

impl core::fmt::Display for Fraction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}/{}", self.passing, self.intervals)
    }
}

/// Fairness degree of raw sweep data: the share of consecutive intervals
/// whose slope times `(midpoint - gt)` is strictly positive.
pub fn fairness_degree_of(hypotheses: &[f64], losses: &[f64], gt: f64) -> Result<Fraction> {
    if hypotheses.len() != losses.len() {
        bail!(Argument, "{} hypotheses but {} losses", hypotheses.len(), losses.len());
    }
    if hypotheses.len() < 2 {
        bail!(Argument, "fairness needs at least 2 hypotheses, got {}", hypotheses.len());
    }
    check_increasing(hypotheses)?;
    let passing = (0..hypotheses.len() - 1)
        .filter(|&i| {
            let slope = losses[i + 1] - losses[i];
            let mid = (hypotheses[i] + hypotheses[i + 1]) / 2.0;
            slope * (mid - gt) > 0.0
        })
        .count();
    Ok(Fraction {
        passing,
        intervals: hypotheses.len() - 1,
    })
}

pub fn fairness_degree(curve: &LossCurve) -> Fraction {
    fairness_degree_of(&curve.hypotheses, &curve.losses, curve.gt).expect("curve was validated")
}

/// Largest distance `r` from the ground truth such that, among hypotheses
/// within `r`, every strictly nearer hypothesis has a strictly lower loss.
pub fn monotone_radius(curve: &LossCurve) -> f64 {
    let gt = curve.gt;
    let mut order: Vec<usize> = (0..curve.len()).collect();
    order.sort_by(|&a, &b| {
        let (da, db) = ((curve.hypotheses[a] - gt).abs(), (curve.hypotheses[b] - gt).abs());
        da.partial_cmp(&db).expect("finite hypotheses")
    });
    let mut radius = 0.0;
    let mut nearer_max = f64::NEG_INFINITY;
    let mut i = 0;
    while i < order.len() {
        let dist = (curve.hypotheses[order[i]] - gt).abs();
        let mut j = i;
        let (mut group_min, mut group_max) = (f64::INFINITY, f64::NEG_INFINITY);
        while j < order.len() && (curve.hypotheses[order[j]] - gt).abs() == dist {
            let l = curve.losses[order[j]];
            group_min = group_min.min(l);
            group_max = group_max.max(l);
            j += 1;
        }
        if !(group_min > nearer_max) {
            break;
        }
        radius = dist;
        nearer_max = nearer_max.max(group_max);
        i = j;
    }
    radius
}

/// Where and what to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Probe pixel `(row, column)` in the target image.
    pub center: (usize, usize),
    /// Odd side of the square patch whose mean loss is recorded.
    pub patch: usize,
    pub hypotheses: Vec<f64>,
    pub gt: f64,
}

impl Sweep {
    /// Integer hypotheses `lo..=hi`.
    pub fn integer(center: (usize, usize), patch: usize, lo: i64, hi: i64, gt: f64) -> Self {
        Sweep {
            center,
            patch,
            hypotheses: (lo..=hi).map(|d| d as f64).collect(),
            gt,
        }
    }
}

/// A patch of the target and the full source, ready to be evaluated at any
/// disparity. Each evaluation is independent, so callers may run them in
/// parallel.
#[derive(Debug, Clone)]
pub struct SweepContext {
    target_window: Image,
    source: Image,
    y0: usize,
    x0: usize,
    patch: usize,
    cfg: LossConfig,
}

impl SweepContext {
    /// Crops the patch plus a one-pixel SSIM margin from `target`. With
    /// `blur`, both images are auto-blurred first.
    pub fn new(
        target: &Image,
        source: &Image,
        center: (usize, usize),
        patch: usize,
        cfg: &LossConfig,
        blur: Option<&AutoBlurConfig>,
    ) -> Result<Self> {
        cfg.validate()?;
        if !target.same_shape(source) {
            bail!(Dimension, "target and source differ in shape");
        }
        if patch == 0 || patch.is_multiple_of(2) {
            bail!(Argument, "patch side must be odd, got {patch}");
        }
        let (cy, cx) = center;
        let r = patch / 2 + 1;
        let side = 2 * r + 1;
        if cy < r || cx < r || cy + r >= target.height() || cx + r >= target.width() {
            bail!(
                Domain,
                "patch of side {patch} around ({cy}, {cx}) does not fit in {}x{} with its margin",
                target.height(),
                target.width()
            );
        }
        let (target, source) = match blur {
            Some(b) => (auto_blur(target, b)?.0, auto_blur(source, b)?.0),
            None => (target.clone(), source.clone()),
        };
        Ok(SweepContext {
            target_window: target.crop(cy - r, cx - r, side, side)?,
            source,
            y0: cy - r,
            x0: cx - r,
            patch,
            cfg: *cfg,
        })
    }

    /// Mean loss over the patch when the target is reconstructed from the
    /// source at disparity `d`.
    pub fn loss_at(&self, d: f64) -> Result<f64> {
        let side = self.target_window.height();
        let sampler = Sampler::from_fn(side, side, |y, x| ((self.x0 + x) as f64 - d, (self.y0 + y) as f64));
        let (recon, valid) = reconstruct(&self.source, &sampler)?;
        if valid.data().contains(&0.0) {
            bail!(Domain, "patch leaves the source image at hypothesis {d}");
        }
        let loss = photometric_loss_map(&self.target_window, &recon, &self.cfg)?;
        let mut sum = 0.0;
        for y in 1..=self.patch {
            for x in 1..=self.patch {
                sum += loss.get(y, x);
            }
        }
        Ok(sum / (self.patch * self.patch) as f64)
    }
}

/// Patch loss at every hypothesis.
pub fn loss_sweep(
    target: &Image,
    source: &Image,
    sweep: &Sweep,
    cfg: &LossConfig,
    blur: Option<&AutoBlurConfig>,
) -> Result<LossCurve> {
    check_increasing(&sweep.hypotheses)?;
    let ctx = SweepContext::new(target, source, sweep.center, sweep.patch, cfg, blur)?;
    let losses = sweep
        .hypotheses
        .iter()
        .map(|&d| ctx.loss_at(d))
        .collect::<Result<Vec<_>>>()?;
    LossCurve::new(sweep.hypotheses.clone(), losses, sweep.gt)
}

/// Loss spread below which a landscape counts as flat.
pub const FLAT_TOLERANCE: f64 = 1e-9;

/// Baseline and auto-blurred landscapes of one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct FairnessReport {
    pub curve_baseline: LossCurve,
    pub curve_autoblur: LossCurve,
    pub d_fair_baseline: Fraction,
    pub d_fair_autoblur: Fraction,
    /// Disparity of the false match, when the scene has one on the grid.
    pub fp_disparity: Option<f64>,
    /// Without blur the false match is at least as cheap as the truth.
    pub fp_hidden_baseline: bool,
    /// With blur the false match costs strictly more than the truth.
    pub fp_exposed: bool,
    pub monotone_radius_baseline: f64,
    pub monotone_radius: f64,
    /// Both landscapes are flat.
    pub degenerate: bool,
}

impl FairnessReport {
    pub fn from_curves(baseline: LossCurve, autoblur: LossCurve, fp_disparity: Option<f64>) -> Result<Self> {
        if baseline.hypotheses != autoblur.hypotheses || baseline.gt != autoblur.gt {
            bail!(Argument, "the two curves must share hypotheses and ground truth");
        }
        let gt = baseline.gt;
        let fp = fp_disparity.filter(|&f| baseline.loss_at(f).is_some());
        let compare = |c: &LossCurve| match (fp, c.loss_at(gt)) {
            (Some(f), Some(g)) => Some((c.loss_at(f).expect("fp is on the grid"), g)),
            _ => None,
        };
        let fp_hidden_baseline = compare(&baseline).is_some_and(|(f, g)| f <= g);
        let fp_exposed = compare(&autoblur).is_some_and(|(f, g)| f > g);
        Ok(FairnessReport {
            d_fair_baseline: fairness_degree(&baseline),
            d_fair_autoblur: fairness_degree(&autoblur),
            monotone_radius_baseline: monotone_radius(&baseline),
            monotone_radius: monotone_radius(&autoblur),
            degenerate: baseline.is_flat(FLAT_TOLERANCE) && autoblur.is_flat(FLAT_TOLERANCE),
            fp_disparity: fp,
            fp_hidden_baseline,
            fp_exposed,
            curve_baseline: baseline,
            curve_autoblur: autoblur,
        })
    }
}

/// Sweeps the scene's probe with and without auto-blur and summarises both.
pub fn compare_landscapes(
    scene: &StereoScene,
    hypotheses: &[f64],
    patch: usize,
    cfg: &LossConfig,
    blur: &AutoBlurConfig,
) -> Result<FairnessReport> {
    let sweep = Sweep {
        center: scene.probe,
        patch,
        hypotheses: hypotheses.to_vec(),
        gt: scene.probe_disparity(),
    };
    let baseline = loss_sweep(&scene.target, &scene.source, &sweep, cfg, None)?;
    let blurred = loss_sweep(&scene.target, &scene.source, &sweep, cfg, Some(blur))?;
    FairnessReport::from_curves(baseline, blurred, scene.fp_disparity)
}
