use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use freqloss_core::Image;

use crate::error::{CliError, Result};

/// Round-half-up to 8 bits after clamping to `[0, 1]`.
pub fn quantize(v: f32) -> u8 {
    let scaled = f64::from(v.clamp(0.0, 1.0)) * 255.0;
    (scaled + 0.5).floor().min(255.0) as u8
}

/// Reads an 8-bit grey or RGB PNG into `[0, 1]`.
pub fn read_png(path: &Path) -> Result<Image> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let decoder = png::Decoder::new(BufReader::new(file));
    let mut reader = decoder
        .read_info()
        .map_err(|e| CliError::format(path, e.to_string()))?;
    let info = reader.info();
    let (colour, depth) = (info.color_type, info.bit_depth);
    if depth != png::BitDepth::Eight {
        return Err(CliError::format(path, format!("unsupported PNG bit depth {depth:?}")));
    }
    let channels = match colour {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => return Err(CliError::format(path, format!("unsupported PNG colour type {other:?}"))),
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| CliError::format(path, "PNG too large"))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| CliError::format(path, e.to_string()))?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let stride = frame.line_size;
    let mut data = Vec::with_capacity(w * h * channels);
    for row in buf.chunks(stride).take(h) {
        data.extend(row[..w * channels].iter().map(|&b| f32::from(b) / 255.0));
    }
    Image::new(h, w, channels, data).map_err(|e| CliError::format(path, e.to_string()))
}

/// Writes an 8-bit grey or RGB PNG.
pub fn write_png(img: &Image, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), img.width() as u32, img.height() as u32);
    encoder.set_color(if img.channels() == 1 {
        png::ColorType::Grayscale
    } else {
        png::ColorType::Rgb
    });
    encoder.set_depth(png::BitDepth::Eight);
    let encode_err = |e: png::EncodingError| CliError::format(path, e.to_string());
    let mut writer = encoder.write_header().map_err(encode_err)?;
    let bytes: Vec<u8> = img.data().iter().map(|&v| quantize(v)).collect();
    writer.write_image_data(&bytes).map_err(encode_err)?;
    writer.finish().map_err(encode_err)
}
