//! Color space conversions: HSV, HSI and CIELab (D65, sRGB companding).
//!
//! All functions take and return channel values in `[0, 1]` on the RGB side.
//! Hue is in degrees `[0, 360)` and is defined as 0 for achromatic pixels.

use crate::image::{ImageGray, ImageRgb};
use crate::math;

/// sRGB → XYZ (D65) matrix rows.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

/// Exact f64 inverse of [`RGB_TO_XYZ`], so round trips cost only rounding
/// noise instead of the ~1e-5 drift of the usual 7-digit published inverse.
const XYZ_TO_RGB: [[f64; 3]; 3] = [
    [3.2404548360214087, -1.5371388501025751, -0.498531546868481],
    [-0.9692663898756538, 1.876010928842491, 0.041556082346673545],
    [0.05564341960421367, -0.20402585426769818, 1.057225162457929],
];

/// D65 reference white.
const WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

/// RGB → HSV. Returns `[h, s, v]` with `h ∈ [0, 360)`, `s, v ∈ [0, 1]`.
pub fn rgb_to_hsv([r, g, b]: [f64; 3]) -> [f64; 3] {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else {
        let h6 = if max == r {
            (g - b) / delta
        } else if max == g {
            (b - r) / delta + 2.0
        } else {
            (r - g) / delta + 4.0
        };
        let mut h = h6 * 60.0;
        if h < 0.0 {
            h += 360.0;
        }
        // Guard the h6 == 6 - ulp case from landing on 360.
        if h >= 360.0 {
            h = 0.0;
        }
        h
    };
    [h, s, v]
}

/// HSV → RGB, inverse of [`rgb_to_hsv`].
pub fn hsv_to_rgb([h, s, v]: [f64; 3]) -> [f64; 3] {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - math::abs(hp % 2.0 - 1.0));
    let (r1, g1, b1) = match hp as usize {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r1 + m, g1 + m, b1 + m]
}

/// RGB → HSI. Returns `[h, s, i]` with `h ∈ [0, 360)` (geometric definition),
/// `s = 1 − min/I ∈ [0, 1]` and intensity `i = (R+G+B)/3`.
pub fn rgb_to_hsi([r, g, b]: [f64; 3]) -> [f64; 3] {
    let i = (r + g + b) / 3.0;
    let min = r.min(g).min(b);
    let s = if i > 0.0 { 1.0 - min / i } else { 0.0 };
    // den² = (R−G)² + (R−B)(G−B) = u² − uv + v² ≥ 0 for u = R−B, v = G−B.
    let den = math::sqrt((r - g) * (r - g) + (r - b) * (g - b));
    let h = if den == 0.0 {
        0.0
    } else {
        let cosine = (0.5 * ((r - g) + (r - b)) / den).clamp(-1.0, 1.0);
        let theta = math::acos(cosine).to_degrees();
        if b > g {
            360.0 - theta
        } else {
            theta
        }
    };
    [h, s, i]
}

/// HSI → RGB via the standard sector formulas, inverse of [`rgb_to_hsi`].
/// Out-of-gamut combinations (possible after stretching S or I) are not
/// clamped here; callers clamp at the image level.
pub fn hsi_to_rgb([h, s, i]: [f64; 3]) -> [f64; 3] {
    let sector = |hd: f64| {
        let hr = hd.to_radians();
        let shifted = (60.0 - hd).to_radians();
        let p = i * (1.0 - s);
        let q = i * (1.0 + s * math::cos(hr) / math::cos(shifted));
        (p, q)
    };
    if h < 120.0 {
        let (b, r) = sector(h);
        [r, 3.0 * i - (r + b), b]
    } else if h < 240.0 {
        let (r, g) = sector(h - 120.0);
        [r, g, 3.0 * i - (r + g)]
    } else {
        let (g, b) = sector(h - 240.0);
        [3.0 * i - (g + b), g, b]
    }
}

fn srgb_linearize(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        math::powf((v + 0.055) / 1.055, 2.4)
    }
}

fn srgb_compand(l: f64) -> f64 {
    if l <= 0.0031308 {
        12.92 * l
    } else {
        1.055 * math::powf(l, 1.0 / 2.4) - 0.055
    }
}

fn lab_f(t: f64) -> f64 {
    const DELTA3: f64 = 216.0 / 24389.0; // (6/29)³
    if t > DELTA3 {
        math::cbrt(t)
    } else {
        const K: f64 = 24389.0 / 27.0 / 116.0; // (29/6)²/3 scaled into f
        K * t + 16.0 / 116.0
    }
}

fn lab_f_inv(ft: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if ft > DELTA {
        ft * ft * ft
    } else {
        3.0 * DELTA * DELTA * (ft - 4.0 / 29.0)
    }
}

/// RGB → CIELab with D65 white and sRGB companding of the 8-bit-origin
/// values. Returns `[L, a, b]`, `L ∈ [0, 100]`.
///
/// Achromatic pixels (`r == g == b`) take the short path `a = b = 0`
/// exactly, so gray inputs always have zero chroma.
pub fn rgb_to_lab([r, g, b]: [f64; 3]) -> [f64; 3] {
    if r == g && g == b {
        let fy = lab_f(srgb_linearize(r));
        return [116.0 * fy - 16.0, 0.0, 0.0];
    }
    let lin = [srgb_linearize(r), srgb_linearize(g), srgb_linearize(b)];
    let mut xyz = [0.0; 3];
    for (i, row) in RGB_TO_XYZ.iter().enumerate() {
        xyz[i] = row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2];
    }
    let fx = lab_f(xyz[0] / WHITE[0]);
    let fy = lab_f(xyz[1] / WHITE[1]);
    let fz = lab_f(xyz[2] / WHITE[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// CIELab → RGB, inverse of [`rgb_to_lab`]. Not clamped.
pub fn lab_to_rgb([l, a, b]: [f64; 3]) -> [f64; 3] {
    let fy = (l + 16.0) / 116.0;
    let fx = fy + a / 500.0;
    let fz = fy - b / 200.0;
    let xyz = [
        lab_f_inv(fx) * WHITE[0],
        lab_f_inv(fy) * WHITE[1],
        lab_f_inv(fz) * WHITE[2],
    ];
    let mut rgb = [0.0; 3];
    for (i, row) in XYZ_TO_RGB.iter().enumerate() {
        rgb[i] = srgb_compand(row[0] * xyz[0] + row[1] * xyz[1] + row[2] * xyz[2]);
    }
    rgb
}

/// HSV saturation plane of an RGB image.
pub fn saturation_plane(img: &ImageRgb) -> ImageGray {
    let (w, h) = img.dims();
    let data = img.pixels().iter().map(|&px| rgb_to_hsv(px)[1]).collect();
    ImageGray::from_vec(w, h, data).expect("same dims as input")
}

/// CIELab planes `(L, a, b)` of an RGB image.
pub fn lab_planes(img: &ImageRgb) -> (ImageGray, ImageGray, ImageGray) {
    let (w, h) = img.dims();
    let mut l = ImageGray::new(w, h).expect("input dims are non-zero");
    let mut a = l.clone();
    let mut b = l.clone();
    for (i, px) in img.pixels().iter().enumerate() {
        let lab = rgb_to_lab(*px);
        l.as_mut_slice()[i] = lab[0];
        a.as_mut_slice()[i] = lab[1];
        b.as_mut_slice()[i] = lab[2];
    }
    (l, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_pixel_conventions() {
        assert_eq!(rgb_to_hsv([0.5, 0.5, 0.5]), [0.0, 0.0, 0.5]);
        let [h, s, i] = rgb_to_hsi([0.5, 0.5, 0.5]);
        assert_eq!(h, 0.0);
        assert_eq!(s, 0.0);
        assert!((i - 0.5).abs() < 1e-15);
        let [_, a, b] = rgb_to_lab([0.25, 0.25, 0.25]);
        assert_eq!([a, b], [0.0, 0.0]);
    }

    #[test]
    fn white_is_lab_100() {
        let [l, a, b] = rgb_to_lab([1.0, 1.0, 1.0]);
        assert!((l - 100.0).abs() <= 1e-3, "L = {l}");
        assert!(a.abs() <= 1e-3 && b.abs() <= 1e-3);
    }

    #[test]
    fn primary_hues() {
        assert_eq!(rgb_to_hsv([1.0, 0.0, 0.0])[0], 0.0);
        assert_eq!(rgb_to_hsv([0.0, 1.0, 0.0])[0], 120.0);
        assert_eq!(rgb_to_hsv([0.0, 0.0, 1.0])[0], 240.0);
        // HSI agrees on the primaries.
        assert!((rgb_to_hsi([0.0, 1.0, 0.0])[0] - 120.0).abs() < 1e-9);
        assert!((rgb_to_hsi([0.0, 0.0, 1.0])[0] - 240.0).abs() < 1e-9);
    }

    #[test]
    fn round_trips_on_sample_grid() {
        // 1000 deterministic samples covering the unit cube.
        let mut samples = alloc::vec::Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    samples.push([i as f64 / 9.0, j as f64 / 9.0, k as f64 / 9.0]);
                }
            }
        }
        for &px in &samples {
            let hsv = hsv_to_rgb(rgb_to_hsv(px));
            let hsi = hsi_to_rgb(rgb_to_hsi(px));
            let lab = lab_to_rgb(rgb_to_lab(px));
            for c in 0..3 {
                assert!((hsv[c] - px[c]).abs() <= 1e-9, "hsv {px:?}");
                assert!((hsi[c] - px[c]).abs() <= 1e-6, "hsi {px:?}");
                assert!((lab[c] - px[c]).abs() <= 1e-4, "lab {px:?}");
            }
        }
    }
}
