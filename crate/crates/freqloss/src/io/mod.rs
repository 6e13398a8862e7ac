//! Image files: 8-bit PNG and little-endian PFM, picked by extension.

mod pfm;
mod png;

use std::path::Path;

use freqloss_core::{Image, ScalarMap};

use crate::error::{CliError, Result};

pub use self::pfm::{read_pfm, write_pfm, PfmRaster};
pub use self::png::{quantize, read_png, write_png};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Png,
    Pfm,
}

impl Format {
    pub fn of(path: &Path) -> Result<Format> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("png") => Ok(Format::Png),
            Some("pfm") => Ok(Format::Pfm),
            _ => Err(CliError::format(path, "unknown image extension (expected .png or .pfm)")),
        }
    }
}

/// Loads an image; PFM values outside `[0, 1]` are clamped with a warning.
pub fn load_image(path: &Path) -> Result<Image> {
    Ok(load_image_counting(path)?.0)
}

/// [`load_image`] that also reports how many values were clamped.
pub fn load_image_counting(path: &Path) -> Result<(Image, usize)> {
    match Format::of(path)? {
        Format::Png => Ok((read_png(path)?, 0)),
        Format::Pfm => {
            let raster = read_pfm(path)?;
            let mut clamped = 0;
            let data: Vec<f32> = raster
                .data
                .into_iter()
                .map(|v| {
                    let c = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
                    if c != v {
                        clamped += 1;
                    }
                    c
                })
                .collect();
            if clamped > 0 {
                log::warn!("{}: clamped {clamped} values into [0, 1]", path.display());
            }
            let img = Image::new(raster.height, raster.width, raster.channels, data)
                .map_err(|e| CliError::format(path, e.to_string()))?;
            Ok((img, clamped))
        }
    }
}

pub fn save_image(img: &Image, path: &Path) -> Result<()> {
    match Format::of(path)? {
        Format::Png => write_png(img, path),
        Format::Pfm => write_pfm(
            &PfmRaster {
                height: img.height(),
                width: img.width(),
                channels: img.channels(),
                data: img.data().to_vec(),
            },
            path,
        ),
    }
}

/// Writes a scalar map as a single-channel float PFM, unclamped.
pub fn save_map(map: &ScalarMap, path: &Path) -> Result<()> {
    write_pfm(
        &PfmRaster {
            height: map.height(),
            width: map.width(),
            channels: 1,
            data: map.data().iter().map(|&v| v as f32).collect(),
        },
        path,
    )
}

/// Reads a single-channel PFM into a scalar map, unclamped.
pub fn load_map(path: &Path) -> Result<ScalarMap> {
    let raster = read_pfm(path)?;
    if raster.channels != 1 {
        return Err(CliError::format(path, "expected a single-channel PFM"));
    }
    ScalarMap::new(
        raster.height,
        raster.width,
        raster.data.into_iter().map(f64::from).collect(),
    )
    .map_err(|e| CliError::format(path, e.to_string()))
}

/// Writes a binary or weight map: PNG as grey levels, PFM as floats.
pub fn save_mask(map: &ScalarMap, path: &Path) -> Result<()> {
    match Format::of(path)? {
        Format::Png => write_png(&Image::from_map(map), path),
        Format::Pfm => save_map(map, path),
    }
}
