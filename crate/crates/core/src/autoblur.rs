//! Frequency-adaptive Gaussian low-pass filtering ("auto-blur").
//!
//! Pixels whose one-sided frequency exceeds `lambda` are high-frequency
//! pixels. A pixel lies in a high-frequency *area* when more than `eta_pct`
//! percent of its `s x s` neighbourhood are high-frequency pixels, so a lone
//! thin edge never qualifies. Inside such areas the image is blended with its
//! Gaussian-blurred copy; everywhere else it is left bit-identical.
//!
//! The blurred image is meant for the loss only, never as input to a
//! predictor.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::bail;
use crate::frequency::{one_sided_frequency, ChannelReduction, Direction};
use crate::image::{Image, ScalarMap};
use crate::math::{exp, ln, sqrt};
use crate::Result;

/// How the blend weight is derived from the detection maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlurWeighting {
    /// `w_blur = hf_avg * hf_area`: the more high-frequency neighbours, the
    /// stronger the blur.
    #[default]
    Graded,
    /// `w_blur = hf_area`: detected areas are fully blurred.
    Full,
}

/// Padding used by the Gaussian convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlurBorder {
    Zero,
    #[default]
    Replicate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoBlurConfig {
    /// High-frequency pixel threshold.
    pub lambda: f64,
    /// Side of the pooling window (odd).
    pub s: usize,
    /// Area vote threshold in percent.
    pub eta_pct: f64,
    /// Side of the Gaussian kernel (odd).
    pub kernel_size: usize,
    pub sigma: f64,
    pub border: BlurBorder,
    pub reduction: ChannelReduction,
    pub weighting: BlurWeighting,
}

impl Default for AutoBlurConfig {
    fn default() -> Self {
        AutoBlurConfig {
            lambda: 0.2,
            s: 9,
            eta_pct: 60.0,
            kernel_size: 9,
            sigma: 1.5,
            border: BlurBorder::Replicate,
            reduction: ChannelReduction::Max,
            weighting: BlurWeighting::Graded,
        }
    }
}

impl AutoBlurConfig {
    /// Settings reproducing the repeated-colour-block illustration with
    /// blocks `l` pixels wide.
    ///
    /// The kernel spans `4l + 1` taps with `sigma = l / sqrt(2 ln 4)`, so the
    /// taps one block away weigh a quarter of the centre tap; borders are
    /// zero-padded. An `l`-wide block pattern has one edge pixel per `l`
    /// pixels, so the area vote is set at half that density and detected
    /// areas are blurred fully.
    pub fn block_pattern_preset(l: usize) -> Self {
        let l = l.max(1);
        AutoBlurConfig {
            kernel_size: 4 * l + 1,
            sigma: block_pattern_sigma(l),
            border: BlurBorder::Zero,
            eta_pct: 50.0 / l as f64,
            weighting: BlurWeighting::Full,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            bail!(Argument, "lambda must be positive, got {}", self.lambda);
        }
        if !(self.eta_pct > 0.0 && self.eta_pct < 100.0) {
            bail!(Argument, "eta must lie strictly between 0 and 100, got {}", self.eta_pct);
        }
        check_odd("pooling window", self.s)?;
        check_odd("kernel size", self.kernel_size)?;
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            bail!(Argument, "sigma must be positive, got {}", self.sigma);
        }
        Ok(())
    }
}

/// `l / sqrt(2 ln 4)`: the Gaussian whose value at `l` is a quarter of its peak.
pub fn block_pattern_sigma(l: usize) -> f64 {
    l as f64 / sqrt(2.0 * ln(4.0))
}

fn check_odd(what: &str, size: usize) -> Result<()> {
    if size < 3 || size.is_multiple_of(2) {
        bail!(Argument, "{what} must be odd and at least 3, got {size}");
    }
    Ok(())
}

/// Detection maps and the final blend weight of one auto-blur call.
#[derive(Debug, Clone, PartialEq)]
pub struct BlurPlan {
    pub hf_pixel: ScalarMap,
    pub hf_avg: ScalarMap,
    pub hf_area: ScalarMap,
    pub w_blur: ScalarMap,
}

impl BlurPlan {
    /// Fraction of pixels with a nonzero blend weight.
    pub fn blurred_fraction(&self) -> f64 {
        self.w_blur.count_nonzero() as f64 / self.w_blur.len() as f64
    }
}

/// `[freq > lambda]`, strict.
pub fn hf_pixel_mask(freq: &ScalarMap, lambda: f64) -> ScalarMap {
    freq.map(|f| if f > lambda { 1.0 } else { 0.0 })
}

/// Stride-1 average pooling of `hf_pixel` over an `s x s` window with zero
/// padding, and the area vote `[hf_avg > eta_pct / 100]`.
pub fn hf_area_mask(hf_pixel: &ScalarMap, s: usize, eta_pct: f64) -> Result<(ScalarMap, ScalarMap)> {
    check_odd("pooling window", s)?;
    let (h, w) = (hf_pixel.height(), hf_pixel.width());
    // summed-area table with a zero first row and column
    let stride = w + 1;
    let mut table = vec![0.0f64; (h + 1) * stride];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += hf_pixel.get(y, x);
            table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row;
        }
    }
    let r = s / 2;
    let norm = (s * s) as f64;
    let avg = ScalarMap::from_fn(h, w, |y, x| {
        let (y0, y1) = (y.saturating_sub(r), (y + r + 1).min(h));
        let (x0, x1) = (x.saturating_sub(r), (x + r + 1).min(w));
        let count = table[y1 * stride + x1] - table[y0 * stride + x1] - table[y1 * stride + x0]
            + table[y0 * stride + x0];
        count / norm
    });
    let threshold = eta_pct / 100.0;
    let area = avg.map(|a| if a > threshold { 1.0 } else { 0.0 });
    Ok((avg, area))
}

/// A normalised, odd-sized square weight table.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    size: usize,
    weights: Vec<f64>,
}

impl GaussianKernel {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    /// Weight at offset `(dy, dx)` from the centre.
    pub fn weight(&self, dy: isize, dx: isize) -> f64 {
        let r = self.radius() as isize;
        self.weights[((dy + r) as usize) * self.size + (dx + r) as usize]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Row sums: the 1-D marginal of the table.
    pub fn marginal(&self) -> Vec<f64> {
        self.weights.chunks_exact(self.size).map(|row| row.iter().sum()).collect()
    }
}

/// Isotropic Gaussian evaluated at integer offsets and normalised to sum 1.
pub fn gaussian_kernel(kernel_size: usize, sigma: f64) -> Result<GaussianKernel> {
    check_odd("kernel size", kernel_size)?;
    if !(sigma > 0.0) || !sigma.is_finite() {
        bail!(Argument, "sigma must be positive, got {sigma}");
    }
    let r = (kernel_size / 2) as isize;
    let two_var = 2.0 * sigma * sigma;
    let mut weights = Vec::with_capacity(kernel_size * kernel_size);
    for dy in -r..=r {
        for dx in -r..=r {
            weights.push(exp(-((dx * dx + dy * dy) as f64) / two_var));
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(GaussianKernel {
        size: kernel_size,
        weights,
    })
}

/// Per-channel convolution with `kernel`.
pub fn gaussian_blur(img: &Image, kernel: &GaussianKernel, border: BlurBorder) -> Image {
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    let r = kernel.radius() as isize;
    let mut out = Vec::with_capacity(img.data().len());
    for y in 0..h as isize {
        for x in 0..w as isize {
            for c in 0..ch {
                let mut acc = 0.0f64;
                for dy in -r..=r {
                    let sy = y + dy;
                    let sy = match border {
                        BlurBorder::Zero if sy < 0 || sy >= h as isize => continue,
                        BlurBorder::Zero => sy as usize,
                        BlurBorder::Replicate => sy.clamp(0, h as isize - 1) as usize,
                    };
                    for dx in -r..=r {
                        let sx = x + dx;
                        let sx = match border {
                            BlurBorder::Zero if sx < 0 || sx >= w as isize => continue,
                            BlurBorder::Zero => sx as usize,
                            BlurBorder::Replicate => sx.clamp(0, w as isize - 1) as usize,
                        };
                        acc += kernel.weight(dy, dx) * f64::from(img.get(sy, sx, c));
                    }
                }
                out.push(acc as f32);
            }
        }
    }
    Image::new(h, w, ch, out).expect("blur preserves the shape")
}

/// Detection maps for `img` under `cfg`.
pub fn blur_plan(img: &Image, cfg: &AutoBlurConfig) -> Result<BlurPlan> {
    cfg.validate()?;
    let freq = one_sided_frequency(img, Direction::Plus, cfg.reduction)?;
    let hf_pixel = hf_pixel_mask(&freq, cfg.lambda);
    let (hf_avg, hf_area) = hf_area_mask(&hf_pixel, cfg.s, cfg.eta_pct)?;
    let w_blur = match cfg.weighting {
        BlurWeighting::Graded => hf_avg.zip_map(&hf_area, |a, m| a * m)?,
        BlurWeighting::Full => hf_area.clone(),
    };
    Ok(BlurPlan {
        hf_pixel,
        hf_avg,
        hf_area,
        w_blur,
    })
}

/// Blends the Gaussian-blurred image into `img` by the per-pixel weight.
///
/// Pixels with zero weight are copied unchanged.
pub fn auto_blur(img: &Image, cfg: &AutoBlurConfig) -> Result<(Image, BlurPlan)> {
    let plan = blur_plan(img, cfg)?;
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    if h < cfg.kernel_size || w < cfg.kernel_size {
        bail!(
            Dimension,
            "image {h}x{w} is smaller than the {}-pixel kernel",
            cfg.kernel_size
        );
    }
    if plan.w_blur.count_nonzero() == 0 {
        return Ok((img.clone(), plan));
    }
    let blurred = gaussian_blur(img, &gaussian_kernel(cfg.kernel_size, cfg.sigma)?, cfg.border);
    let mut out = img.clone();
    for y in 0..h {
        for x in 0..w {
            let wb = plan.w_blur.get(y, x);
            if wb == 0.0 {
                continue;
            }
            for c in 0..ch {
                let orig = f64::from(img.get(y, x, c));
                let gb = f64::from(blurred.get(y, x, c));
                out.set(y, x, c, (wb * gb + (1.0 - wb) * orig) as f32);
            }
        }
    }
    Ok((out, plan))
}
