//! Planar `f64` image buffers and the window geometry shared by all kernels.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// BT.601 luma weights used whenever a single gray plane is needed.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Square window Ω(x) of side `2·radius + 1` centered on each pixel.
///
/// Every windowed operation in this crate uses replicate-edge borders:
/// samples falling outside the image take the value of the nearest edge
/// pixel. The default radius of 7 gives a 15×15 window, sized for inputs
/// around 400×600 pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub radius: usize,
}

impl WindowSpec {
    pub const fn new(radius: usize) -> Self {
        Self { radius }
    }

    /// Window side length `2·radius + 1`.
    pub const fn side(self) -> usize {
        2 * self.radius + 1
    }

    /// Errors unless the window fits entirely inside a `width`×`height` image.
    pub fn check_fits(self, width: usize, height: usize) -> Result<()> {
        if self.side() > width || self.side() > height {
            Err(Error::WindowTooLarge {
                side: self.side(),
                width,
                height,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self { radius: 7 }
    }
}

/// Quantize a unit-range value to one of 256 levels (clamping first).
pub fn quantize8(v: f64) -> u8 {
    math::round(v.clamp(0.0, 1.0) * 255.0) as u8
}

/// Map an 8-bit level back to `[0, 1]`.
pub fn dequantize8(q: u8) -> f64 {
    f64::from(q) / 255.0
}

/// Single-channel row-major image. Values are nominally in `[0, 1]`, but a
/// few producers (e.g. the maximum intensity prior) emit signed maps; range
/// expectations are documented per operation.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGray {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ImageGray {
    /// All-zero image. Errors if either dimension is zero.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        Ok(Self {
            width,
            height,
            data: vec![value; width * height],
        })
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                got: (data.len(), 1),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut img = Self::new(width, height)?;
        for y in 0..height {
            for x in 0..width {
                img.data[y * width + x] = f(x, y);
            }
        }
        Ok(img)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = f(*v);
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn clamp_unit(&mut self) {
        for v in &mut self.data {
            *v = v.clamp(0.0, 1.0);
        }
    }

    /// Min-max normalize to `[0, 1]`. A flat image (max == min) has no
    /// meaningful normalization and maps to `fallback` everywhere.
    pub fn normalize_or(&self, fallback: f64) -> Self {
        let lo = self.min_value();
        let hi = self.max_value();
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            let mut out = self.clone();
            out.data.fill(fallback);
            return out;
        }
        self.map(|v| (v - lo) / (hi - lo))
    }

    /// Edge-clamped bilinear resize with pixel centers at `i + 0.5`.
    /// Resizing to the same dimensions reproduces the input.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        let mut out = Self::new(width, height)?;
        for y in 0..height {
            let (y0, y1, fy) = resample_axis(y, height, self.height);
            for x in 0..width {
                let (x0, x1, fx) = resample_axis(x, width, self.width);
                let top = self.get(x0, y0) * (1.0 - fx) + self.get(x1, y0) * fx;
                let bot = self.get(x0, y1) * (1.0 - fx) + self.get(x1, y1) * fx;
                out.set(x, y, top * (1.0 - fy) + bot * fy);
            }
        }
        Ok(out)
    }
}

/// Source interpolation support for destination index `i`: returns the two
/// source indices and the blend weight of the second one.
fn resample_axis(i: usize, dst: usize, src: usize) -> (usize, usize, f64) {
    let pos = (i as f64 + 0.5) * src as f64 / dst as f64 - 0.5;
    let clamped = pos.clamp(0.0, (src - 1) as f64);
    let i0 = math::floor(clamped) as usize;
    let i1 = (i0 + 1).min(src - 1);
    (i0, i1, clamped - i0 as f64)
}

/// Three-channel row-major RGB image, values nominally in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageRgb {
    width: usize,
    height: usize,
    data: Vec<[f64; 3]>,
}

impl ImageRgb {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, [0.0; 3])
    }

    pub fn filled(width: usize, height: usize, px: [f64; 3]) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        Ok(Self {
            width,
            height,
            data: vec![px; width * height],
        })
    }

    pub fn from_pixels(width: usize, height: usize, data: Vec<[f64; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                got: (data.len(), 1),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let mut img = Self::new(width, height)?;
        for y in 0..height {
            for x in 0..width {
                img.data[y * width + x] = f(x, y);
            }
        }
        Ok(img)
    }

    /// Reassemble from three planes of equal dimensions.
    pub fn from_channels(r: &ImageGray, g: &ImageGray, b: &ImageGray) -> Result<Self> {
        for plane in [g, b] {
            if plane.dims() != r.dims() {
                return Err(Error::DimensionMismatch {
                    expected: r.dims(),
                    got: plane.dims(),
                });
            }
        }
        let data = r
            .as_slice()
            .iter()
            .zip(g.as_slice())
            .zip(b.as_slice())
            .map(|((&r, &g), &b)| [r, g, b])
            .collect();
        Self::from_pixels(r.width(), r.height(), data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, px: [f64; 3]) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = px;
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn pixels_mut(&mut self) -> &mut [[f64; 3]] {
        &mut self.data
    }

    /// Extract channel `c` (0 = R, 1 = G, 2 = B) as a gray plane.
    pub fn channel(&self, c: usize) -> ImageGray {
        assert!(c < 3, "channel index out of range");
        ImageGray {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|px| px[c]).collect(),
        }
    }

    /// BT.601 luma plane.
    pub fn to_gray(&self) -> ImageGray {
        ImageGray {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .map(|px| {
                    LUMA_WEIGHTS[0] * px[0] + LUMA_WEIGHTS[1] * px[1] + LUMA_WEIGHTS[2] * px[2]
                })
                .collect(),
        }
    }

    pub fn map(&self, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = self.clone();
        for px in &mut out.data {
            *px = f(*px);
        }
        out
    }

    pub fn clamp_unit(&mut self) {
        for px in &mut self.data {
            for v in px {
                *v = v.clamp(0.0, 1.0);
            }
        }
    }

    /// Per-channel means `(μ_r, μ_g, μ_b)`.
    pub fn channel_means(&self) -> [f64; 3] {
        let mut sums = [0.0f64; 3];
        for px in &self.data {
            for c in 0..3 {
                sums[c] += px[c];
            }
        }
        let n = self.data.len() as f64;
        [sums[0] / n, sums[1] / n, sums[2] / n]
    }

    /// Edge-clamped bilinear resize with pixel centers at `i + 0.5`.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        let mut out = Self::new(width, height)?;
        for y in 0..height {
            let (y0, y1, fy) = resample_axis(y, height, self.height);
            for x in 0..width {
                let (x0, x1, fx) = resample_axis(x, width, self.width);
                let mut px = [0.0; 3];
                for c in 0..3 {
                    let top =
                        self.get(x0, y0)[c] * (1.0 - fx) + self.get(x1, y0)[c] * fx;
                    let bot =
                        self.get(x0, y1)[c] * (1.0 - fx) + self.get(x1, y1)[c] * fx;
                    px[c] = top * (1.0 - fy) + bot * fy;
                }
                out.set(x, y, px);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dimension_rejected() {
        assert_eq!(ImageGray::new(0, 4).unwrap_err(), Error::EmptyImage);
        assert_eq!(ImageRgb::new(3, 0).unwrap_err(), Error::EmptyImage);
    }

    #[test]
    fn window_fit() {
        let w = WindowSpec::new(2); // side 5
        assert!(w.check_fits(5, 5).is_ok());
        assert!(matches!(
            w.check_fits(4, 9),
            Err(Error::WindowTooLarge { side: 5, .. })
        ));
    }

    #[test]
    fn resize_identity_and_constant() {
        let img = ImageGray::from_fn(7, 5, |x, y| (x * 13 + y * 31) as f64 / 200.0).unwrap();
        let same = img.resize_bilinear(7, 5).unwrap();
        for (a, b) in img.as_slice().iter().zip(same.as_slice()) {
            assert!((a - b).abs() <= 1e-6);
        }
        let flat = ImageGray::filled(9, 4, 0.37).unwrap();
        let scaled = flat.resize_bilinear(30, 11).unwrap();
        for v in scaled.as_slice() {
            assert_eq!(*v, 0.37);
        }
    }

    #[test]
    fn resize_checkerboard_center() {
        // 2x2 checkerboard up to 3x3: the new center sits exactly between all
        // four source pixels and must average to 0.5.
        let img = ImageGray::from_vec(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let up = img.resize_bilinear(3, 3).unwrap();
        assert!((up.get(1, 1) - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn channel_round_trip() {
        let img = ImageRgb::from_fn(4, 3, |x, y| {
            [x as f64 / 4.0, y as f64 / 3.0, (x + y) as f64 / 7.0]
        })
        .unwrap();
        let back =
            ImageRgb::from_channels(&img.channel(0), &img.channel(1), &img.channel(2)).unwrap();
        assert_eq!(img, back);
    }

    #[test]
    fn quantize_round_trip() {
        for q in 0..=255u8 {
            assert_eq!(quantize8(dequantize8(q)), q);
        }
        assert_eq!(quantize8(-0.2), 0);
        assert_eq!(quantize8(1.7), 255);
    }

    #[test]
    fn normalize_flat_uses_fallback() {
        let flat = ImageGray::filled(3, 3, 0.42).unwrap();
        assert!(flat.normalize_or(0.5).as_slice().iter().all(|&v| v == 0.5));
        let ramp = ImageGray::from_vec(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(ramp.normalize_or(0.0).as_slice(), &[0.0, 0.5, 1.0]);
    }
}
