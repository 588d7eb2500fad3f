//! Scene priors extracted from a single underwater image.
//!
//! These maps are the raw material for background-light and transmission
//! estimation: the (underwater) dark channel, the maximum intensity prior
//! (MIP), the inverted-red dark channel, multi-scale blurriness and the
//! light-absorption depth model.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::image::{ImageGray, ImageRgb, WindowSpec};
use crate::kernel::{closing, gaussian_blur, guided_filter, window_max, window_min};

/// Peak wavelengths (nm) assumed for the R, G and B channels.
pub const WAVELENGTHS_NM: [f64; 3] = [620.0, 540.0, 450.0];

/// Window radius for the hole-filling closing inside [`blurriness_map`].
const BLUR_CLOSE_RADIUS: usize = 7;
/// Guided-filter parameters for the smoothing stage of [`blurriness_map`].
const BLUR_GUIDED_RADIUS: usize = 20;
const BLUR_GUIDED_EPS: f64 = 1e-3;

/// Tunable constants shared by the prior extractors and the estimators
/// built on them. [`PriorConstants::default`] gives the values used
/// throughout the literature; every field can be overridden from a config
/// file in the CLI layer.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorConstants {
    /// Coefficients `(μ0, μ1, μ2)` of the linear depth model
    /// `d = μ0 + μ1·max(G, B) + μ2·R` fitted by Song et al. (2018) for the
    /// underwater light-attenuation prior.
    pub ulap_coeffs: [f64; 3],
    /// Per-channel normalized residual energy ratios (fraction of energy
    /// surviving one depth unit). Defaults are the oceanic (Jerlov type I)
    /// values commonly quoted after Chiang & Chen (2012): red loses energy
    /// fastest, blue slowest.
    pub nrer: [f64; 3],
    /// `(m, i)` of the linear attenuation model `β(λ) ≈ m·λ + i` used to
    /// derive cross-channel attenuation ratios from the background light.
    pub atten_ratio_params: (f64, f64),
    /// Weight of the saturation term in the red-channel transmission.
    pub rcp_lambda: f64,
    /// Gaussian radii for the multi-scale blurriness estimate; radius `r`
    /// uses `σ = r/2`.
    pub blur_scales: Vec<f64>,
}

impl Default for PriorConstants {
    fn default() -> Self {
        Self {
            ulap_coeffs: [0.53214829, 0.51309827, -0.91066194],
            nrer: [0.83, 0.95, 0.97],
            atten_ratio_params: (-0.00113, 1.62517),
            rcp_lambda: 1.0,
            blur_scales: vec![2.0, 4.0, 8.0, 16.0],
        }
    }
}

/// Relative scene depth in `[0, 1]`: 0 is closest to the camera, 1 farthest.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthMap(pub ImageGray);

impl DepthMap {
    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }
}

/// Dark channel: windowed minimum over all three channels,
/// `min_{y∈Ω(x), c∈{r,g,b}} I^c(y)`.
pub fn dark_channel(img: &ImageRgb, win: WindowSpec) -> Result<ImageGray> {
    let (w, h) = img.dims();
    let data = img
        .pixels()
        .iter()
        .map(|px| px[0].min(px[1]).min(px[2]))
        .collect();
    window_min(&ImageGray::from_vec(w, h, data)?, win)
}

/// Underwater dark channel: as [`dark_channel`] but over G and B only —
/// red decays too fast underwater to carry dark-channel information.
pub fn underwater_dark_channel(img: &ImageRgb, win: WindowSpec) -> Result<ImageGray> {
    let (w, h) = img.dims();
    let data = img.pixels().iter().map(|px| px[1].min(px[2])).collect();
    window_min(&ImageGray::from_vec(w, h, data)?, win)
}

/// Maximum intensity prior: windowed max of red minus windowed max of the
/// larger of green/blue. Values lie in `[-1, 1]`; strongly negative values
/// mark pixels far from the camera.
pub fn mip_map(img: &ImageRgb, win: WindowSpec) -> Result<ImageGray> {
    let (w, h) = img.dims();
    let red = img.channel(0);
    let gb = ImageGray::from_vec(
        w,
        h,
        img.pixels().iter().map(|px| px[1].max(px[2])).collect(),
    )?;
    let max_r = window_max(&red, win)?;
    let max_gb = window_max(&gb, win)?;
    let data = max_r
        .as_slice()
        .iter()
        .zip(max_gb.as_slice())
        .map(|(&a, &b)| a - b)
        .collect();
    ImageGray::from_vec(w, h, data)
}

/// Dark channel of `(1 − R, G, B)`: the red-channel prior's building block.
pub fn red_inverted_dark(img: &ImageRgb, win: WindowSpec) -> Result<ImageGray> {
    let (w, h) = img.dims();
    let data = img
        .pixels()
        .iter()
        .map(|px| (1.0 - px[0]).min(px[1]).min(px[2]))
        .collect();
    window_min(&ImageGray::from_vec(w, h, data)?, win)
}

/// Raw multi-scale blurriness response: the mean over scales of
/// `|gray − Gaussian_r(gray)|`, min-max normalized to `[0, 1]`.
/// A flat input (response identically zero) normalizes to all zeros.
pub fn blurriness_raw(img: &ImageRgb, scales: &[f64]) -> ImageGray {
    let gray = img.to_gray();
    let (w, h) = gray.dims();
    let mut acc = vec![0.0f64; w * h];
    for &radius in scales {
        let blurred = gaussian_blur(&gray, radius / 2.0);
        for (a, (&g, &b)) in acc
            .iter_mut()
            .zip(gray.as_slice().iter().zip(blurred.as_slice()))
        {
            *a += (g - b).abs();
        }
    }
    let n = scales.len().max(1) as f64;
    for a in &mut acc {
        *a /= n;
    }
    ImageGray::from_vec(w, h, acc)
        .expect("same dims as input")
        .normalize_or(0.0)
}

/// Blurriness map: [`blurriness_raw`] hole-filled by a grayscale closing and
/// smoothed by a guided filter (guide = gray input), clamped to `[0, 1]`.
///
/// Needs the closing window (15×15) to fit inside the image.
pub fn blurriness_map(img: &ImageRgb, consts: &PriorConstants) -> Result<ImageGray> {
    let raw = blurriness_raw(img, &consts.blur_scales);
    let closed = closing(&raw, WindowSpec::new(BLUR_CLOSE_RADIUS))?;
    let mut smooth = guided_filter(
        &closed,
        &img.to_gray(),
        BLUR_GUIDED_RADIUS,
        BLUR_GUIDED_EPS,
    )?;
    smooth.clamp_unit();
    Ok(smooth)
}

/// Depth from the underwater light-attenuation prior:
/// `d_raw = μ0 + μ1·max(G, B) + μ2·R`, min-max normalized to `[0, 1]`.
/// A flat raw map normalizes to 0.5 everywhere (unknown but uniform depth).
pub fn ulap_depth(img: &ImageRgb, consts: &PriorConstants) -> DepthMap {
    let [mu0, mu1, mu2] = consts.ulap_coeffs;
    let (w, h) = img.dims();
    let data = img
        .pixels()
        .iter()
        .map(|px| mu0 + mu1 * px[1].max(px[2]) + mu2 * px[0])
        .collect();
    let raw = ImageGray::from_vec(w, h, data).expect("same dims as input");
    DepthMap(raw.normalize_or(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_img() -> ImageRgb {
        ImageRgb::from_fn(12, 10, |x, y| {
            let t = (x * 17 + y * 29) % 11;
            [
                t as f64 / 11.0,
                ((t + 3) % 11) as f64 / 11.0,
                ((t + 7) % 11) as f64 / 11.0,
            ]
        })
        .unwrap()
    }

    #[test]
    fn dark_channel_below_underwater_dark_channel() {
        let img = test_img();
        let win = WindowSpec::new(2);
        let dc = dark_channel(&img, win).unwrap();
        let udc = underwater_dark_channel(&img, win).unwrap();
        for (d, u) in dc.as_slice().iter().zip(udc.as_slice()) {
            assert!(d <= u);
        }
    }

    #[test]
    fn mip_flips_sign_when_red_and_gb_swap() {
        // Swapping R with max(G,B) (using equal G and B) negates the map.
        let img = test_img();
        let win = WindowSpec::new(1);
        let swapped = img.map(|[r, g, b]| [g.max(b), r, r]);
        let a = mip_map(&img, win).unwrap();
        let b = mip_map(&swapped, win).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x + y).abs() <= 1e-12);
        }
    }

    #[test]
    fn mip_range_is_signed_unit() {
        let img = test_img();
        let m = mip_map(&img, WindowSpec::new(2)).unwrap();
        for v in m.as_slice() {
            assert!((-1.0..=1.0).contains(v));
        }
    }

    #[test]
    fn ulap_depth_two_pixel_example() {
        // With coefficients (0, 1, −1): raw = {−1, +1} → normalized {0, 1}.
        let img =
            ImageRgb::from_pixels(2, 1, vec![[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]]).unwrap();
        let consts = PriorConstants {
            ulap_coeffs: [0.0, 1.0, -1.0],
            ..PriorConstants::default()
        };
        let d = ulap_depth(&img, &consts);
        assert_eq!(d.0.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn ulap_depth_invariant_to_positive_affine_coefficient_rescale() {
        let img = test_img();
        let base = PriorConstants::default();
        let scaled = PriorConstants {
            ulap_coeffs: [
                3.0 * base.ulap_coeffs[0] + 0.25,
                3.0 * base.ulap_coeffs[1],
                3.0 * base.ulap_coeffs[2],
            ],
            ..base.clone()
        };
        let a = ulap_depth(&img, &base);
        let b = ulap_depth(&img, &scaled);
        for (x, y) in a.0.as_slice().iter().zip(b.0.as_slice()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn flat_image_priors_degenerate() {
        let flat = ImageRgb::filled(20, 20, [0.3, 0.3, 0.3]).unwrap();
        let consts = PriorConstants::default();
        assert!(blurriness_raw(&flat, &consts.blur_scales)
            .as_slice()
            .iter()
            .all(|&v| v == 0.0));
        assert!(ulap_depth(&flat, &consts).0.as_slice().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn blurred_copy_scores_blurrier() {
        // A sharp step edge vs a heavily pre-blurred copy: after per-image
        // normalization the blurred copy's response is wider, so its mean
        // blurriness is strictly higher.
        let sharp = ImageRgb::from_fn(48, 48, |x, _| {
            let v = if x >= 24 { 1.0 } else { 0.0 };
            [v, v, v]
        })
        .unwrap();
        let gray = sharp.to_gray();
        let pre_blurred = gaussian_blur(&gray, 4.0);
        let blurred =
            ImageRgb::from_channels(&pre_blurred, &pre_blurred, &pre_blurred).unwrap();
        let scales = [2.0, 4.0, 8.0, 16.0];
        let ms = blurriness_raw(&sharp, &scales).mean();
        let mb = blurriness_raw(&blurred, &scales).mean();
        assert!(
            mb > ms,
            "blurred copy must score blurrier: sharp {ms}, blurred {mb}"
        );
        let consts = PriorConstants::default();
        let ms_full = blurriness_map(&sharp, &consts).unwrap().mean();
        let mb_full = blurriness_map(&blurred, &consts).unwrap().mean();
        assert!(mb_full > ms_full);
    }

    #[test]
    fn single_scale_blurriness_matches_direct_computation() {
        let img = test_img();
        let got = blurriness_raw(&img, &[6.0]);
        let gray = img.to_gray();
        let blurred = gaussian_blur(&gray, 3.0);
        let direct = ImageGray::from_vec(
            12,
            10,
            gray.as_slice()
                .iter()
                .zip(blurred.as_slice())
                .map(|(&a, &b)| (a - b).abs())
                .collect(),
        )
        .unwrap()
        .normalize_or(0.0);
        for (a, b) in got.as_slice().iter().zip(direct.as_slice()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}
