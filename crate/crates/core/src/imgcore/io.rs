use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::{ColorType, DynamicImage, ImageEncoder};

use super::ImageBuffer;
use crate::error::{Error, Result};

/// Reads an 8-bit PNG as a float image (`byte / 255`).
///
/// Gray and RGB are kept as 1 and 3 channels. An alpha channel, if present,
/// is dropped. 16-bit and palette-expanded float formats are rejected.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        ));
    }
    let reader = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    if reader.format() != Some(image::ImageFormat::Png) {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            detail: "only PNG is supported".into(),
        });
    }
    let decoded = reader.decode().map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let (channels, bytes) = match decoded {
        DynamicImage::ImageLuma8(buf) => (1, buf.into_raw()),
        DynamicImage::ImageLumaA8(buf) => (1, buf.into_raw().chunks_exact(2).map(|p| p[0]).collect()),
        DynamicImage::ImageRgb8(buf) => (3, buf.into_raw()),
        DynamicImage::ImageRgba8(buf) => (
            3,
            buf.into_raw()
                .chunks_exact(4)
                .flat_map(|p| [p[0], p[1], p[2]])
                .collect(),
        ),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                detail: format!("color type {:?} is not 8-bit gray/RGB", other.color()),
            })
        }
    };
    let data = bytes.into_iter().map(|b| b as f32 / 255.0).collect();
    ImageBuffer::new(w, h, channels, data)
}

/// Quantizes one sample: round-half-to-even of `s * 255`.
#[inline]
pub(crate) fn quantize(s: f32) -> u8 {
    ((s as f64) * 255.0).round_ties_even().clamp(0.0, 255.0) as u8
}

/// Writes an 8-bit PNG (gray or RGB matching the channel count).
pub fn save_image(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = img.data().iter().map(|&s| quantize(s)).collect();
    let color = if img.channels() == 1 {
        ColorType::L8
    } else {
        ColorType::Rgb8
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let encoder = image::codecs::png::PngEncoder::new(BufWriter::new(file));
    encoder
        .write_image(&bytes, img.width() as u32, img.height() as u32, color.into())
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::Decode {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        })
}
