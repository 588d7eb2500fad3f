//! Gaussian and Laplacian image pyramids (Burt–Adelson style).
//!
//! Downsampling blurs with the classic 5-tap kernel `[1 4 6 4 1]/16`
//! (replicate borders) and keeps the even-indexed samples, so level `i+1`
//! has dimensions `ceil(dims_i / 2)`. Upsampling is bilinear to the exact
//! target size; because the Laplacian levels store differences against that
//! same upsampling, [`collapse`] reconstructs the input up to rounding.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::ImageGray;
use crate::kernel::separable_convolve;

const KERNEL5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Clamp a requested level count so the smallest level stays at least one
/// pixel per side and at least one level exists.
fn effective_levels(mut w: usize, mut h: usize, requested: usize) -> usize {
    let mut levels = 1;
    while levels < requested && (w > 1 || h > 1) {
        w = w.div_ceil(2);
        h = h.div_ceil(2);
        levels += 1;
    }
    levels
}

fn downsample(img: &ImageGray) -> ImageGray {
    let blurred = separable_convolve(img, &KERNEL5);
    let (w, h) = img.dims();
    let (dw, dh) = (w.div_ceil(2), h.div_ceil(2));
    let mut out = ImageGray::new(dw, dh).expect("halved dims stay non-zero");
    for y in 0..dh {
        for x in 0..dw {
            out.set(x, y, blurred.get(x * 2, y * 2));
        }
    }
    out
}

/// Gaussian pyramid with `levels` levels (level 0 is the input). Errors if
/// `levels == 0`; the count is clamped once the levels reach 1×1.
pub fn gaussian_pyramid(img: &ImageGray, levels: usize) -> Result<Vec<ImageGray>> {
    if levels == 0 {
        return Err(Error::InvalidParam("pyramid needs at least one level"));
    }
    let (w, h) = img.dims();
    let levels = effective_levels(w, h, levels);
    let mut pyr = Vec::with_capacity(levels);
    pyr.push(img.clone());
    for _ in 1..levels {
        let next = downsample(pyr.last().expect("pyramid is non-empty"));
        pyr.push(next);
    }
    Ok(pyr)
}

/// Laplacian pyramid: each level is the Gaussian level minus the upsampled
/// next level; the last level is the Gaussian residual itself.
pub fn laplacian_pyramid(img: &ImageGray, levels: usize) -> Result<Vec<ImageGray>> {
    let gauss = gaussian_pyramid(img, levels)?;
    let mut pyr = Vec::with_capacity(gauss.len());
    for i in 0..gauss.len() - 1 {
        let (w, h) = gauss[i].dims();
        let up = gauss[i + 1].resize_bilinear(w, h)?;
        let data = gauss[i]
            .as_slice()
            .iter()
            .zip(up.as_slice())
            .map(|(&a, &b)| a - b)
            .collect();
        pyr.push(ImageGray::from_vec(w, h, data)?);
    }
    pyr.push(gauss.last().expect("pyramid is non-empty").clone());
    Ok(pyr)
}

/// Invert [`laplacian_pyramid`].
pub fn collapse(pyr: &[ImageGray]) -> Result<ImageGray> {
    let mut acc = match pyr.last() {
        Some(last) => last.clone(),
        None => return Err(Error::InvalidParam("cannot collapse an empty pyramid")),
    };
    for level in pyr.iter().rev().skip(1) {
        let (w, h) = level.dims();
        let up = acc.resize_bilinear(w, h)?;
        let data = level
            .as_slice()
            .iter()
            .zip(up.as_slice())
            .map(|(&l, &u)| l + u)
            .collect();
        acc = ImageGray::from_vec(w, h, data)?;
    }
    Ok(acc)
}
