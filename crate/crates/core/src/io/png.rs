use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};

use crate::error::{Error, Result};
use crate::mask::LabelMask;
use crate::scale::GrayImage;

fn unreadable(path: &Path, reason: impl ToString) -> Error {
    Error::UnreadableFile {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

fn decode_luma8(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let reader = image::ImageReader::open(path).map_err(|e| unreadable(path, e))?;
    let decoded = reader
        .with_guessed_format()
        .map_err(|e| unreadable(path, e))?
        .decode()
        .map_err(|e| unreadable(path, e))?;
    match decoded {
        DynamicImage::ImageLuma8(buf) => {
            let (w, h) = buf.dimensions();
            Ok((w as usize, h as usize, buf.into_raw()))
        }
        other => Err(unreadable(
            path,
            format!(
                "expected 8-bit single-channel PNG, found {:?}",
                other.color()
            ),
        )),
    }
}

fn encode_luma8(path: &Path, width: usize, height: usize, data: Vec<u8>) -> Result<()> {
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> =
        ImageBuffer::from_raw(width as u32, height as u32, data)
            .ok_or_else(|| Error::InvalidInput("buffer does not match dimensions".into()))?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Reads a label mask; every pixel must be 0, 1, 2 or 3.
pub fn load_mask(path: impl AsRef<Path>) -> Result<LabelMask> {
    let path = path.as_ref();
    let (w, h, data) = decode_luma8(path)?;
    LabelMask::from_raw(w, h, &data)
}

pub fn save_mask(path: impl AsRef<Path>, mask: &LabelMask) -> Result<()> {
    encode_luma8(path.as_ref(), mask.width(), mask.height(), mask.to_raw())
}

pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let (w, h, data) = decode_luma8(path)?;
    GrayImage::from_vec(w, h, data)
}

pub fn save_gray(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    encode_luma8(
        path.as_ref(),
        image.width(),
        image.height(),
        image.data().to_vec(),
    )
}
