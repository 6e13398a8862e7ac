use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{CliError, Result};

/// Raw PFM contents, rows top-down.
#[derive(Debug, Clone, PartialEq)]
pub struct PfmRaster {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub data: Vec<f32>,
}

fn header_line<R: BufRead>(reader: &mut R, path: &Path) -> Result<String> {
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader.read_line(&mut line).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            return Err(CliError::format(path, "truncated PFM header"));
        }
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            return Ok(trimmed.to_string());
        }
    }
}

/// Reads a PFM of either byte order. PFM stores rows bottom-up.
pub fn read_pfm(path: &Path) -> Result<PfmRaster> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = BufReader::new(file);
    let channels = match header_line(&mut reader, path)?.as_str() {
        "PF" => 3,
        "Pf" => 1,
        other => return Err(CliError::format(path, format!("not a PFM file (magic {other:?})"))),
    };
    let dims = header_line(&mut reader, path)?;
    let parsed: Vec<usize> = dims.split_whitespace().filter_map(|t| t.parse().ok()).collect();
    let [width, height] = parsed[..] else {
        return Err(CliError::format(path, format!("bad PFM dimensions {dims:?}")));
    };
    if width == 0 || height == 0 {
        return Err(CliError::format(path, "empty PFM"));
    }
    let scale_line = header_line(&mut reader, path)?;
    let scale: f32 = scale_line
        .parse()
        .map_err(|_| CliError::format(path, format!("bad PFM scale {scale_line:?}")))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(CliError::format(path, "PFM scale must be non-zero"));
    }
    let little_endian = scale < 0.0;
    let count = width * height * channels;
    let mut bytes = vec![0u8; count * 4];
    reader
        .read_exact(&mut bytes)
        .map_err(|_| CliError::format(path, "truncated PFM data"))?;
    let values: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|b| {
            let b = [b[0], b[1], b[2], b[3]];
            if little_endian {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            }
        })
        .collect();
    let row = width * channels;
    let data = values.chunks_exact(row).rev().flatten().copied().collect();
    Ok(PfmRaster {
        height,
        width,
        channels,
        data,
    })
}

/// Writes little-endian (scale -1.0), rows bottom-up.
pub fn write_pfm(raster: &PfmRaster, path: &Path) -> Result<()> {
    let magic = match raster.channels {
        1 => "Pf",
        3 => "PF",
        c => return Err(CliError::format(path, format!("PFM holds 1 or 3 channels, not {c}"))),
    };
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    write!(out, "{magic}\n{} {}\n-1.0\n", raster.width, raster.height).map_err(io)?;
    let row = raster.width * raster.channels;
    for line in raster.data.chunks_exact(row).rev() {
        for v in line {
            out.write_all(&v.to_le_bytes()).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_stored_bottom_up() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.pfm");
        let raster = PfmRaster {
            height: 2,
            width: 1,
            channels: 1,
            data: vec![1.0, 2.0],
        };
        write_pfm(&raster, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let body = &bytes[bytes.len() - 8..];
        assert_eq!(&body[..4], &2.0f32.to_le_bytes());
        assert_eq!(read_pfm(&path).unwrap(), raster);
    }

    #[test]
    fn big_endian_files_are_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("be.pfm");
        let mut bytes = b"Pf\n2 1\n1.0\n".to_vec();
        bytes.extend_from_slice(&0.25f32.to_be_bytes());
        bytes.extend_from_slice(&0.75f32.to_be_bytes());
        std::fs::write(&path, bytes).unwrap();
        assert_eq!(read_pfm(&path).unwrap().data, vec![0.25, 0.75]);
    }

    #[test]
    fn malformed_files_are_format_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.pfm");
        for body in [&b"P6\n1 1\n-1.0\n"[..], b"Pf\n1\n-1.0\n", b"Pf\n2 2\n-1.0\n\0\0"] {
            std::fs::write(&path, body).unwrap();
            assert!(matches!(read_pfm(&path), Err(CliError::Format { .. })));
        }
    }
}
