//! Raster containers and bilinear sampling.
//!
//! Coordinates follow the usual warping convention: pixel centres sit at
//! integer positions, `(u, v)` is `(column, row)` and the origin is the
//! top-left pixel.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::bail;
use crate::math::floor;
use crate::Result;

/// An `height x width x channels` raster of intensities, row-major with
/// interleaved channels.
///
/// Values loaded from files are in `[0, 1]`; operations that can leave that
/// range say so.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f32>,
}

impl Image {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            bail!(Dimension, "images have 1 or 3 channels, got {channels}");
        }
        if height == 0 || width == 0 {
            bail!(Dimension, "empty image ({height}x{width})");
        }
        if data.len() != height * width * channels {
            bail!(
                Dimension,
                "data length {} does not match {height}x{width}x{channels}",
                data.len()
            );
        }
        Ok(Image {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: f32) -> Result<Self> {
        Image::new(height, width, channels, vec![value; height * width * channels])
    }

    /// Builds an image from `f(row, col, channel)`.
    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f32,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(y, x, c));
                }
            }
        }
        Image::new(height, width, channels, data)
    }

    /// Single-channel image holding the values of `map` (narrowed to `f32`).
    pub fn from_map(map: &ScalarMap) -> Self {
        Image {
            height: map.height,
            width: map.width,
            channels: 1,
            data: map.data.iter().map(|&v| v as f32).collect(),
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f32 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, c: usize, value: f32) {
        self.data[(y * self.width + x) * self.channels + c] = value;
    }

    /// All channel values of pixel `(y, x)`.
    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> &[f32] {
        let start = (y * self.width + x) * self.channels;
        &self.data[start..start + self.channels]
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }

    /// One channel as a scalar map.
    pub fn channel(&self, c: usize) -> ScalarMap {
        assert!(c < self.channels, "channel {c} out of range");
        ScalarMap {
            height: self.height,
            width: self.width,
            data: self
                .data
                .iter()
                .skip(c)
                .step_by(self.channels)
                .map(|&v| f64::from(v))
                .collect(),
        }
    }

    /// Reassembles an image from per-channel maps (narrowed to `f32`).
    pub fn from_channels(maps: &[ScalarMap]) -> Result<Self> {
        let Some(first) = maps.first() else {
            bail!(Argument, "no channels given");
        };
        if maps.iter().any(|m| !m.same_shape(first)) {
            bail!(Dimension, "channel maps differ in size");
        }
        let channels = maps.len();
        let mut data = Vec::with_capacity(first.len() * channels);
        for i in 0..first.len() {
            for m in maps {
                data.push(m.data[i] as f32);
            }
        }
        Image::new(first.height, first.width, channels, data)
    }

    /// Whether every value is finite and inside `[0, 1]`.
    pub fn is_unit_range(&self) -> bool {
        self.data.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v))
    }

    /// The `height x width` window whose top-left pixel is `(y0, x0)`.
    pub fn crop(&self, y0: usize, x0: usize, height: usize, width: usize) -> Result<Image> {
        if y0 + height > self.height || x0 + width > self.width {
            bail!(
                Dimension,
                "crop {height}x{width} at ({y0}, {x0}) exceeds {}x{}",
                self.height,
                self.width
            );
        }
        let mut data = Vec::with_capacity(height * width * self.channels);
        for y in y0..y0 + height {
            let start = (y * self.width + x0) * self.channels;
            data.extend_from_slice(&self.data[start..start + width * self.channels]);
        }
        Image::new(height, width, self.channels, data)
    }
}

/// One scalar per pixel: frequency values, masks, weights, loss maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl ScalarMap {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            bail!(Dimension, "empty map ({height}x{width})");
        }
        if data.len() != height * width {
            bail!(
                Dimension,
                "data length {} does not match {height}x{width}",
                data.len()
            );
        }
        Ok(ScalarMap {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        ScalarMap {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        ScalarMap::filled(height, width, 0.0)
    }

    /// Builds a map from `f(row, col)`.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                data.push(f(y, x));
            }
        }
        ScalarMap {
            height,
            width,
            data,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, value: f64) {
        self.data[y * self.width + x] = value;
    }

    pub fn same_shape(&self, other: &ScalarMap) -> bool {
        self.height == other.height && self.width == other.width
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> ScalarMap {
        ScalarMap {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two maps of the same shape.
    pub fn zip_map(&self, other: &ScalarMap, mut f: impl FnMut(f64, f64) -> f64) -> Result<ScalarMap> {
        if !self.same_shape(other) {
            bail!(
                Dimension,
                "map sizes differ: {}x{} vs {}x{}",
                self.height,
                self.width,
                other.height,
                other.width
            );
        }
        Ok(ScalarMap {
            height: self.height,
            width: self.width,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.data.len() as f64
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Number of entries different from zero.
    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0.0).count()
    }
}

/// Per-target-pixel continuous source coordinates `(u, v)` in pixel units.
///
/// Coordinates may lie outside the source; validity is decided when
/// sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    height: usize,
    width: usize,
    coords: Vec<(f64, f64)>,
}

impl Sampler {
    pub fn new(height: usize, width: usize, coords: Vec<(f64, f64)>) -> Result<Self> {
        if height == 0 || width == 0 {
            bail!(Dimension, "empty sampler ({height}x{width})");
        }
        if coords.len() != height * width {
            bail!(
                Dimension,
                "{} coordinates for a {height}x{width} sampler",
                coords.len()
            );
        }
        Ok(Sampler {
            height,
            width,
            coords,
        })
    }

    /// `u = x, v = y` everywhere.
    pub fn identity(height: usize, width: usize) -> Self {
        Sampler::from_fn(height, width, |y, x| (x as f64, y as f64))
    }

    /// Builds a sampler from `f(row, col) -> (u, v)`.
    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> (f64, f64),
    ) -> Self {
        let mut coords = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                coords.push(f(y, x));
            }
        }
        Sampler {
            height,
            width,
            coords,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> (f64, f64) {
        self.coords[y * self.width + x]
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }
}

/// Out-of-bounds policy for interpolation and filtering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Border {
    /// Replicate edge pixels.
    #[default]
    Clamp,
    /// Read zero outside the image.
    Zero,
}

/// Integer cell and fractional offsets for one axis.
#[inline]
fn axis_cell(coord: f64, len: usize, border: Border) -> (isize, f64) {
    let c = match border {
        Border::Clamp => coord.clamp(0.0, (len - 1) as f64),
        Border::Zero => coord,
    };
    let mut base = floor(c);
    // keep the +1 neighbour inside for samples exactly on the last row/column
    if border == Border::Clamp && base as usize + 1 >= len && len > 1 {
        base = (len - 2) as f64;
    }
    (base as isize, c - base)
}

#[inline]
fn is_valid(u: f64, v: f64, height: usize, width: usize) -> bool {
    u >= 0.0 && v >= 0.0 && u <= (width - 1) as f64 && v <= (height - 1) as f64
}

/// Bilinear interpolation of a plane given a reader for in-bounds pixels.
#[inline]
fn interpolate(
    u: f64,
    v: f64,
    height: usize,
    width: usize,
    border: Border,
    read: impl Fn(usize, usize) -> f64,
) -> f64 {
    if !u.is_finite() || !v.is_finite() {
        return 0.0;
    }
    let (x0, fx) = axis_cell(u, width, border);
    let (y0, fy) = axis_cell(v, height, border);
    let fetch = |y: isize, x: isize| -> f64 {
        if y < 0 || x < 0 || y as usize >= height || x as usize >= width {
            0.0
        } else {
            read(y as usize, x as usize)
        }
    };
    let w00 = (1.0 - fx) * (1.0 - fy);
    let w01 = fx * (1.0 - fy);
    let w10 = (1.0 - fx) * fy;
    let w11 = fx * fy;
    let mut acc = w00 * fetch(y0, x0);
    if w01 != 0.0 {
        acc += w01 * fetch(y0, x0 + 1);
    }
    if w10 != 0.0 {
        acc += w10 * fetch(y0 + 1, x0);
    }
    if w11 != 0.0 {
        acc += w11 * fetch(y0 + 1, x0 + 1);
    }
    acc
}

fn check_sampling(height: usize, width: usize) -> Result<()> {
    if height < 2 || width < 2 {
        bail!(
            Dimension,
            "bilinear sampling needs a source of at least 2x2, got {height}x{width}"
        );
    }
    Ok(())
}

/// Samples `source` at every coordinate of `sampler`.
///
/// Returns the warped image (sampler-sized, same channel count) and a
/// validity map that is 1 where all contributing neighbours lie inside the
/// source and 0 elsewhere. Non-finite coordinates yield 0 and are invalid.
pub fn bilinear_sample(source: &Image, sampler: &Sampler, border: Border) -> Result<(Image, ScalarMap)> {
    let (h, w, ch) = (source.height, source.width, source.channels);
    check_sampling(h, w)?;
    let mut data = Vec::with_capacity(sampler.coords.len() * ch);
    let mut valid = Vec::with_capacity(sampler.coords.len());
    for &(u, v) in &sampler.coords {
        for c in 0..ch {
            let value = interpolate(u, v, h, w, border, |y, x| f64::from(source.get(y, x, c)));
            data.push(value as f32);
        }
        valid.push(if is_valid(u, v, h, w) { 1.0 } else { 0.0 });
    }
    Ok((
        Image::new(sampler.height, sampler.width, ch, data)?,
        ScalarMap::new(sampler.height, sampler.width, valid)?,
    ))
}

/// [`bilinear_sample`] for a scalar map; values stay in `f64`.
pub fn bilinear_sample_map(
    source: &ScalarMap,
    sampler: &Sampler,
    border: Border,
) -> Result<(ScalarMap, ScalarMap)> {
    let (h, w) = (source.height, source.width);
    check_sampling(h, w)?;
    let mut data = Vec::with_capacity(sampler.coords.len());
    let mut valid = Vec::with_capacity(sampler.coords.len());
    for &(u, v) in &sampler.coords {
        data.push(interpolate(u, v, h, w, border, |y, x| source.get(y, x)));
        valid.push(if is_valid(u, v, h, w) { 1.0 } else { 0.0 });
    }
    Ok((
        ScalarMap::new(sampler.height, sampler.width, data)?,
        ScalarMap::new(sampler.height, sampler.width, valid)?,
    ))
}
