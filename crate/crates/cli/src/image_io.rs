//! Grayscale PNG input and output.
//!
//! Inputs of any color type are converted to luma with Rec. 601 weights and
//! scaled to `[0, 1]`. Outputs are 8-bit grayscale with round-to-nearest.

use std::path::Path;

use image::{GrayImage, Luma};
use vpcstereo_core::image::{Image, Mask};

use crate::error::{Error, Result};

fn image_err(path: &Path, source: image::ImageError) -> Error {
    match source {
        image::ImageError::IoError(e) => Error::io(path, e),
        source => Error::Image {
            path: path.to_path_buf(),
            source,
        },
    }
}

pub fn load_gray(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let rgb = image::open(path).map_err(|e| image_err(path, e))?.into_rgb32f();
    let (w, h) = rgb.dimensions();
    let data = rgb
        .pixels()
        .map(|p| (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]).clamp(0.0, 1.0))
        .collect();
    Ok(Image::from_vec(w as usize, h as usize, data).expect("decoder dimensions match"))
}

pub fn to_gray8(img: &Image) -> GrayImage {
    GrayImage::from_fn(img.width() as u32, img.height() as u32, |x, y| {
        let v = img.get(x as usize, y as usize);
        let v = if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 };
        Luma([(v * 255.0).round() as u8])
    })
}

pub fn save_gray(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    to_gray8(img).save(path).map_err(|e| image_err(path, e))
}

/// Valid pixels are 255, invalid 0.
pub fn save_mask(mask: &Mask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    GrayImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        Luma([if mask.get(x as usize, y as usize) { 255 } else { 0 }])
    })
    .save(path)
    .map_err(|e| image_err(path, e))
}

/// Pixels at or above mid-gray are valid.
pub fn load_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let img = load_gray(path)?;
    let data = img.as_slice().iter().map(|&v| v >= 0.5).collect();
    Ok(Mask::from_vec(img.width(), img.height(), data).expect("same dimensions"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_round_trip_is_exact_on_8bit_levels() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::from_fn(7, 3, |x, y| ((x * 3 + y * 40) as f32) / 255.0);
        let p = dir.path().join("a.png");
        save_gray(&img, &p).unwrap();
        let back = load_gray(&p).unwrap();
        assert_eq!(back.dimensions(), (7, 3));
        for (a, b) in img.as_slice().iter().zip(back.as_slice()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn color_input_uses_luma_weights() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.png");
        image::RgbImage::from_pixel(2, 2, image::Rgb([255, 0, 0])).save(&p).unwrap();
        let g = load_gray(&p).unwrap();
        assert!((g.get(0, 0) - 0.299).abs() < 1e-6);
    }

    #[test]
    fn mask_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let m = Mask::from_vec(3, 1, vec![true, false, true]).unwrap();
        let p = dir.path().join("m.png");
        save_mask(&m, &p).unwrap();
        assert_eq!(load_mask(&p).unwrap(), m);
    }

    #[test]
    fn missing_file_is_io_error() {
        let e = load_gray("/nonexistent/x.png").unwrap_err();
        assert!(matches!(e, Error::Io { .. }), "{e:?}");
    }
}
