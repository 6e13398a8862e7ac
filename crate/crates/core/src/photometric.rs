//! The L1 + SSIM photometric loss, masked reductions, and the supervised L1
//! reference loss.

use alloc::vec::Vec;

use crate::error::bail;
use crate::image::{Image, ScalarMap};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    /// Weight of the SSIM term; `1 - alpha` goes to L1.
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            alpha: 0.85,
            c1: 1e-4,
            c2: 9e-4,
        }
    }
}

impl LossConfig {
    /// Plain per-pixel L1.
    pub fn l1() -> Self {
        LossConfig {
            alpha: 0.0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            bail!(Argument, "alpha must lie in [0, 1], got {}", self.alpha);
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            bail!(Argument, "SSIM constants must be positive, got c1={} c2={}", self.c1, self.c2);
        }
        Ok(())
    }
}

fn check_pair(a: &Image, b: &Image) -> Result<()> {
    if !a.same_shape(b) {
        bail!(
            Dimension,
            "image shapes differ: {}x{}x{} vs {}x{}x{}",
            a.height(),
            a.width(),
            a.channels(),
            b.height(),
            b.width(),
            b.channels()
        );
    }
    Ok(())
}

/// 3x3 box mean with replicated borders.
fn box3(plane: &[f64], h: usize, w: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(plane.len());
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in [-1isize, 0, 1] {
                let sy = (y as isize + dy).clamp(0, h as isize - 1) as usize;
                for dx in [-1isize, 0, 1] {
                    let sx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
                    acc += plane[sy * w + sx];
                }
            }
            out.push(acc / 9.0);
        }
    }
    out
}

/// Per-pixel SSIM over a uniform 3x3 window, averaged over channels.
pub fn ssim_map(a: &Image, b: &Image, cfg: &LossConfig) -> Result<ScalarMap> {
    check_pair(a, b)?;
    let (h, w, ch) = (a.height(), a.width(), a.channels());
    let mut acc = alloc::vec![0.0f64; h * w];
    for c in 0..ch {
        let pa = a.channel(c).into_data();
        let pb = b.channel(c).into_data();
        let prod = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> { pa.iter().zip(&pb).map(|(&x, &y)| f(x, y)).collect() };
        let mu_a = box3(&pa, h, w);
        let mu_b = box3(&pb, h, w);
        let e_aa = box3(&prod(&|x, _| x * x), h, w);
        let e_bb = box3(&prod(&|_, y| y * y), h, w);
        let e_ab = box3(&prod(&|x, y| x * y), h, w);
        for i in 0..h * w {
            let (ma, mb) = (mu_a[i], mu_b[i]);
            let var_a = e_aa[i] - ma * ma;
            let var_b = e_bb[i] - mb * mb;
            let cov = e_ab[i] - ma * mb;
            let num = (2.0 * ma * mb + cfg.c1) * (2.0 * cov + cfg.c2);
            let den = (ma * ma + mb * mb + cfg.c1) * (var_a + var_b + cfg.c2);
            acc[i] += num / den;
        }
    }
    let n = ch as f64;
    ScalarMap::new(h, w, acc.into_iter().map(|s| s / n).collect())
}

/// Per-pixel `alpha/2 (1 - SSIM) + (1 - alpha) mean_c |a - b|`, clamped at 0.
pub fn photometric_loss_map(target: &Image, recon: &Image, cfg: &LossConfig) -> Result<ScalarMap> {
    check_pair(target, recon)?;
    cfg.validate()?;
    let (h, w, ch) = (target.height(), target.width(), target.channels());
    let l1 = ScalarMap::from_fn(h, w, |y, x| {
        let (p, q) = (target.pixel(y, x), recon.pixel(y, x));
        p.iter().zip(q).map(|(&a, &b)| (f64::from(a) - f64::from(b)).abs()).sum::<f64>() / ch as f64
    });
    if cfg.alpha == 0.0 {
        return Ok(l1);
    }
    let ssim = ssim_map(target, recon, cfg)?;
    ssim.zip_map(&l1, |s, d| (cfg.alpha / 2.0 * (1.0 - s) + (1.0 - cfg.alpha) * d).max(0.0))
}

/// A weighted mean with a flag for an all-zero weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskedMean {
    pub value: f64,
    pub empty: bool,
}

/// `sum(loss * weight) / sum(weight)`, or 0 flagged empty when no weight.
pub fn masked_mean_loss(loss: &ScalarMap, weight: &ScalarMap) -> Result<MaskedMean> {
    if !loss.same_shape(weight) {
        bail!(Dimension, "loss and weight maps differ in size");
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (&l, &w) in loss.data().iter().zip(weight.data()) {
        num += l * w;
        den += w;
    }
    Ok(if den == 0.0 {
        MaskedMean {
            value: 0.0,
            empty: true,
        }
    } else {
        MaskedMean {
            value: num / den,
            empty: false,
        }
    })
}

/// Mean absolute difference between a prediction and its ground truth.
pub fn supervised_l1(pred: &ScalarMap, gt: &ScalarMap) -> Result<f64> {
    if !pred.same_shape(gt) {
        bail!(Dimension, "prediction and ground truth differ in size");
    }
    Ok(pred.data().iter().zip(gt.data()).map(|(p, g)| (p - g).abs()).sum::<f64>() / pred.len() as f64)
}
