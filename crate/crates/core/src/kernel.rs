//! Windowed kernels: order statistics, running-sum box filter, Gaussian
//! smoothing, guided filter and small fixed-stencil operators.
//!
//! All kernels use replicate-edge borders. The min/max kernels run the
//! van Herk/Gil-Werman two-pass separable scheme (O(1) comparisons per pixel
//! regardless of radius); the box filter uses an integral image over the
//! replicate-padded input; the median uses a 256-bin sliding histogram over
//! the 8-bit-quantized image, so on 8-bit-origin data it is exact.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::image::{quantize8, ImageGray, WindowSpec};
use crate::math;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Extremum {
    Min,
    Max,
}

/// Replicate-pad a row into `padded` so that `padded[i..i + side]` covers the
/// window centered on element `i`.
fn pad_replicate(row: &[f64], radius: usize, padded: &mut Vec<f64>) {
    padded.clear();
    padded.extend(core::iter::repeat(row[0]).take(radius));
    padded.extend_from_slice(row);
    padded.extend(core::iter::repeat(row[row.len() - 1]).take(radius));
}

/// van Herk/Gil-Werman sliding extremum: `out[i]` is the min/max of
/// `padded[i..i + len]`. Prefix/suffix extrema are computed per `len`-sized
/// block, so each output costs one comparison plus amortized block work.
fn sliding_extremum(
    padded: &[f64],
    len: usize,
    which: Extremum,
    pre: &mut Vec<f64>,
    suf: &mut Vec<f64>,
    out: &mut [f64],
) {
    let pick = match which {
        Extremum::Min => f64::min,
        Extremum::Max => f64::max,
    };
    let m = padded.len();
    pre.resize(m, 0.0);
    suf.resize(m, 0.0);
    let mut start = 0;
    while start < m {
        let end = (start + len).min(m);
        pre[start] = padded[start];
        for j in start + 1..end {
            pre[j] = pick(pre[j - 1], padded[j]);
        }
        suf[end - 1] = padded[end - 1];
        for j in (start..end - 1).rev() {
            suf[j] = pick(suf[j + 1], padded[j]);
        }
        start = end;
    }
    for (i, o) in out.iter_mut().enumerate() {
        *o = pick(suf[i], pre[i + len - 1]);
    }
}

fn window_extremum(img: &ImageGray, win: WindowSpec, which: Extremum) -> Result<ImageGray> {
    let (w, h) = img.dims();
    win.check_fits(w, h)?;
    let r = win.radius;
    if r == 0 {
        return Ok(img.clone());
    }
    let len = win.side();
    let mut padded = Vec::with_capacity(w.max(h) + 2 * r);
    let (mut pre, mut suf) = (Vec::new(), Vec::new());

    // Horizontal pass.
    let mut horiz = ImageGray::new(w, h)?;
    let mut out_row = vec![0.0; w];
    for y in 0..h {
        pad_replicate(img.row(y), r, &mut padded);
        sliding_extremum(&padded, len, which, &mut pre, &mut suf, &mut out_row);
        for x in 0..w {
            horiz.set(x, y, out_row[x]);
        }
    }

    // Vertical pass over the horizontal result.
    let mut out = ImageGray::new(w, h)?;
    let mut col = vec![0.0; h];
    let mut out_col = vec![0.0; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = horiz.get(x, y);
        }
        pad_replicate(&col, r, &mut padded);
        sliding_extremum(&padded, len, which, &mut pre, &mut suf, &mut out_col);
        for y in 0..h {
            out.set(x, y, out_col[y]);
        }
    }
    Ok(out)
}

/// Windowed minimum (grayscale erosion). Errors if the window does not fit.
pub fn window_min(img: &ImageGray, win: WindowSpec) -> Result<ImageGray> {
    window_extremum(img, win, Extremum::Min)
}

/// Windowed maximum (grayscale dilation). Errors if the window does not fit.
pub fn window_max(img: &ImageGray, win: WindowSpec) -> Result<ImageGray> {
    window_extremum(img, win, Extremum::Max)
}

/// Grayscale morphological closing: dilation followed by erosion.
pub fn closing(img: &ImageGray, win: WindowSpec) -> Result<ImageGray> {
    window_min(&window_max(img, win)?, win)
}

/// Windowed median over the 8-bit-quantized image.
///
/// The input is quantized to 256 levels up front and the median is tracked
/// with a sliding histogram, so the result equals the naive per-window
/// median of the quantized values exactly (window size is always odd²,
/// hence a unique middle element). Output values are `level / 255`.
pub fn window_median(img: &ImageGray, win: WindowSpec) -> Result<ImageGray> {
    let (w, h) = img.dims();
    win.check_fits(w, h)?;
    let r = win.radius;
    let side = win.side();

    // Quantize and replicate-pad once.
    let pw = w + 2 * r;
    let ph = h + 2 * r;
    let mut q = vec![0u8; pw * ph];
    for y in 0..ph {
        let sy = y.saturating_sub(r).min(h - 1);
        for x in 0..pw {
            let sx = x.saturating_sub(r).min(w - 1);
            q[y * pw + x] = quantize8(img.get(sx, sy));
        }
    }

    let mut out = ImageGray::new(w, h)?;
    let target = (side * side) / 2 + 1; // rank of the middle element
    let mut hist = [0u32; 256];
    for y in 0..h {
        hist.fill(0);
        for wy in y..y + side {
            for wx in 0..side {
                hist[q[wy * pw + wx] as usize] += 1;
            }
        }
        for x in 0..w {
            if x > 0 {
                // Slide the window one column right.
                for wy in y..y + side {
                    hist[q[wy * pw + x - 1] as usize] -= 1;
                    hist[q[wy * pw + x + side - 1] as usize] += 1;
                }
            }
            let mut seen = 0u32;
            let mut level = 0usize;
            for (l, &count) in hist.iter().enumerate() {
                seen += count;
                if seen as usize >= target {
                    level = l;
                    break;
                }
            }
            out.set(x, y, level as f64 / 255.0);
        }
    }
    Ok(out)
}

/// Windowed mean with replicate borders, computed from an integral image of
/// the padded input. Unlike the order-statistic kernels this accepts any
/// window size (padding covers the overhang).
pub fn box_filter(img: &ImageGray, radius: usize) -> ImageGray {
    let (w, h) = img.dims();
    if radius == 0 {
        return img.clone();
    }
    let side = 2 * radius + 1;
    let pw = w + 2 * radius;
    let ph = h + 2 * radius;

    // Integral image of the replicate-padded input; S is (ph+1) x (pw+1).
    let mut s = vec![0.0f64; (pw + 1) * (ph + 1)];
    for y in 0..ph {
        let sy = y.saturating_sub(radius).min(h - 1);
        let mut row_sum = 0.0;
        for x in 0..pw {
            let sx = x.saturating_sub(radius).min(w - 1);
            row_sum += img.get(sx, sy);
            s[(y + 1) * (pw + 1) + (x + 1)] = s[y * (pw + 1) + (x + 1)] + row_sum;
        }
    }

    let inv_area = 1.0 / (side * side) as f64;
    let mut out = ImageGray::new(w, h).expect("input dims are non-zero");
    for y in 0..h {
        for x in 0..w {
            let sum = s[(y + side) * (pw + 1) + (x + side)] - s[y * (pw + 1) + (x + side)]
                - s[(y + side) * (pw + 1) + x]
                + s[y * (pw + 1) + x];
            out.set(x, y, sum * inv_area);
        }
    }
    out
}

/// Separable Gaussian smoothing with replicate borders. The kernel extends
/// to `ceil(3σ)` taps each side and is normalized to unit sum; `sigma <= 0`
/// returns the input unchanged.
pub fn gaussian_blur(img: &ImageGray, sigma: f64) -> ImageGray {
    if sigma <= 0.0 {
        return img.clone();
    }
    let radius = math::ceil(3.0 * sigma) as usize;
    let mut kernel = Vec::with_capacity(2 * radius + 1);
    for i in 0..=2 * radius {
        let d = i as f64 - radius as f64;
        kernel.push(math::exp(-d * d / (2.0 * sigma * sigma)));
    }
    let total: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= total;
    }
    separable_convolve(img, &kernel)
}

/// Convolve rows then columns with a symmetric 1D kernel, replicate borders.
pub(crate) fn separable_convolve(img: &ImageGray, kernel: &[f64]) -> ImageGray {
    let (w, h) = img.dims();
    let r = kernel.len() / 2;
    let mut tmp = ImageGray::new(w, h).expect("input dims are non-zero");
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                let sx = (x + i).saturating_sub(r).min(w - 1);
                acc += k * img.get(sx, y);
            }
            tmp.set(x, y, acc);
        }
    }
    let mut out = ImageGray::new(w, h).expect("input dims are non-zero");
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                let sy = (y + i).saturating_sub(r).min(h - 1);
                acc += k * tmp.get(x, sy);
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Edge-preserving guided filter (He et al., "Guided Image Filtering").
///
/// Per window: `a = cov(guide, p) / (var(guide) + eps)`, `b = mean(p) −
/// a·mean(guide)`, and the output is `mean(a)·guide + mean(b)` with all means
/// taken by [`box_filter`]. Windows whose regularized variance is not
/// meaningfully positive fall back to `a = 0, b = mean(p)`, which keeps the
/// filter exact on locally constant data. With `eps = 0` and `guide == p`
/// the filter is an identity; with a constant guide it reduces to a double
/// box filter of `p`.
pub fn guided_filter(p: &ImageGray, guide: &ImageGray, radius: usize, eps: f64) -> Result<ImageGray> {
    let (w, h) = p.dims();
    if guide.dims() != (w, h) {
        return Err(crate::Error::DimensionMismatch {
            expected: (w, h),
            got: guide.dims(),
        });
    }
    let mean_i = box_filter(guide, radius);
    let mean_p = box_filter(p, radius);
    let corr_ip = box_filter(
        &ImageGray::from_vec(
            w,
            h,
            guide
                .as_slice()
                .iter()
                .zip(p.as_slice())
                .map(|(&i, &v)| i * v)
                .collect(),
        )?,
        radius,
    );
    let corr_ii = box_filter(&guide.map(|v| v * v), radius);

    let mut a = ImageGray::new(w, h)?;
    let mut b = ImageGray::new(w, h)?;
    for (i, (av, bv)) in a
        .as_mut_slice()
        .iter_mut()
        .zip(b.as_mut_slice().iter_mut())
        .enumerate()
    {
        let mi = mean_i.as_slice()[i];
        let mp = mean_p.as_slice()[i];
        let var = corr_ii.as_slice()[i] - mi * mi;
        let cov = corr_ip.as_slice()[i] - mi * mp;
        let denom = var + eps;
        if denom > 1e-14 {
            *av = cov / denom;
            *bv = mp - *av * mi;
        } else {
            *av = 0.0;
            *bv = mp;
        }
    }
    let mean_a = box_filter(&a, radius);
    let mean_b = box_filter(&b, radius);
    let data = mean_a
        .as_slice()
        .iter()
        .zip(mean_b.as_slice())
        .zip(guide.as_slice())
        .map(|((&ma, &mb), &g)| ma * g + mb)
        .collect();
    ImageGray::from_vec(w, h, data)
}

/// Sobel gradient magnitude with replicate borders.
pub fn sobel_magnitude(img: &ImageGray) -> ImageGray {
    let (w, h) = img.dims();
    let mut out = ImageGray::new(w, h).expect("input dims are non-zero");
    let at = |x: isize, y: isize| -> f64 {
        let cx = x.clamp(0, w as isize - 1) as usize;
        let cy = y.clamp(0, h as isize - 1) as usize;
        img.get(cx, cy)
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let gx = -at(x - 1, y - 1) + at(x + 1, y - 1) - 2.0 * at(x - 1, y)
                + 2.0 * at(x + 1, y)
                - at(x - 1, y + 1)
                + at(x + 1, y + 1);
            let gy = -at(x - 1, y - 1) - 2.0 * at(x, y - 1) - at(x + 1, y - 1)
                + at(x - 1, y + 1)
                + 2.0 * at(x, y + 1)
                + at(x + 1, y + 1);
            out.set(x as usize, y as usize, math::hypot(gx, gy));
        }
    }
    out
}

/// Absolute response of the 4-neighbor Laplacian, replicate borders.
pub fn laplacian_abs(img: &ImageGray) -> ImageGray {
    let (w, h) = img.dims();
    let mut out = ImageGray::new(w, h).expect("input dims are non-zero");
    let at = |x: isize, y: isize| -> f64 {
        let cx = x.clamp(0, w as isize - 1) as usize;
        let cy = y.clamp(0, h as isize - 1) as usize;
        img.get(cx, cy)
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let v = at(x - 1, y) + at(x + 1, y) + at(x, y - 1) + at(x, y + 1) - 4.0 * at(x, y);
            out.set(x as usize, y as usize, math::abs(v));
        }
    }
    out
}
