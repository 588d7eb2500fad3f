//! Background light (veiling light) estimation.
//!
//! Ten estimators from the restoration literature, all reduced to the same
//! shape: build a prior map, pick (or average) pixels selected by that map,
//! and report the input color there. Selection ties always break towards
//! the smallest row-major pixel index, and "top k%" always means
//! `k = max(1, round(fraction · pixels))`, so every method is deterministic.

use alloc::vec::Vec;

use crate::error::Result;
use crate::image::{ImageGray, ImageRgb, WindowSpec};
use crate::priors::{
    dark_channel, mip_map, red_inverted_dark, ulap_depth, underwater_dark_channel,
    PriorConstants,
};

/// Available background-light estimators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlMethod {
    /// Color at the brightest dark-channel pixel.
    DcpBrightest,
    /// Brightest input pixel (max R+G+B) among the top 0.1% dark-channel pixels.
    DcpTop01,
    /// Pixel with the largest `max(B−G, G−R)` gap among the top 0.1%
    /// dark-channel pixels.
    DcpMipDiff,
    /// Color at the pixel minimizing the maximum intensity prior.
    Mip,
    /// Mean input color over all pixels tied for the MIP minimum.
    MipAvg,
    /// Color at the brightest underwater-dark-channel pixel.
    Udcp,
    /// Brightest input pixel among the top 10% of the inverted-red dark channel.
    RcpTop10,
    /// Mean input color over the top 0.1% brightest dark-channel pixels.
    BlurTop01Avg,
    /// Agreement-weighted blend of the DcpTop01, Mip and Ulap estimates.
    Fusion,
    /// Mean input color over the top 0.1% farthest pixels of the
    /// light-absorption depth map.
    Ulap,
}

impl BlMethod {
    /// All methods, in the canonical (deterministic) order.
    pub const ALL: [BlMethod; 10] = [
        BlMethod::DcpBrightest,
        BlMethod::DcpTop01,
        BlMethod::DcpMipDiff,
        BlMethod::Mip,
        BlMethod::MipAvg,
        BlMethod::Udcp,
        BlMethod::RcpTop10,
        BlMethod::BlurTop01Avg,
        BlMethod::Fusion,
        BlMethod::Ulap,
    ];

    pub fn cli_name(self) -> &'static str {
        match self {
            BlMethod::DcpBrightest => "dcp-bright",
            BlMethod::DcpTop01 => "dcp-top01",
            BlMethod::DcpMipDiff => "dcp-mip",
            BlMethod::Mip => "mip",
            BlMethod::MipAvg => "mip-avg",
            BlMethod::Udcp => "udcp",
            BlMethod::RcpTop10 => "rcp-top10",
            BlMethod::BlurTop01Avg => "blur-top01",
            BlMethod::Fusion => "fusion",
            BlMethod::Ulap => "ulap",
        }
    }

    pub fn from_cli_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.cli_name() == name)
    }
}

/// An estimated background light.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackgroundLight {
    /// RGB color in `[0, 1]`.
    pub color: [f64; 3],
    /// Method that produced the estimate; `None` for externally supplied
    /// values (e.g. simulator ground truth).
    pub source: Option<BlMethod>,
    /// Selected pixel for single-pixel methods; `None` for averaging ones.
    pub pixel: Option<(usize, usize)>,
}

impl BackgroundLight {
    /// Wrap an externally known background light (no estimation involved).
    pub fn from_color(color: [f64; 3]) -> Self {
        Self {
            color,
            source: None,
            pixel: None,
        }
    }
}

/// Index of the maximum value; ties break to the smallest row-major index.
fn argmax(map: &ImageGray) -> usize {
    let mut best = 0;
    for (i, &v) in map.as_slice().iter().enumerate() {
        if v > map.as_slice()[best] {
            best = i;
        }
    }
    best
}

/// All indices holding the exact minimum value, in row-major order.
fn argmin_ties(map: &ImageGray) -> Vec<usize> {
    let min = map.min_value();
    map.as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == min)
        .map(|(i, _)| i)
        .collect()
}

/// Indices of the `max(1, round(fraction·n))` largest values, ties resolved
/// towards smaller indices.
pub(crate) fn top_fraction_indices(map: &ImageGray, fraction: f64) -> Vec<usize> {
    let n = map.as_slice().len();
    let k = ((fraction * n as f64).round() as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        map.as_slice()[b]
            .partial_cmp(&map.as_slice()[a])
            .expect("prior maps contain no NaN")
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order
}

fn pixel_at(img: &ImageRgb, idx: usize) -> (usize, usize) {
    (idx % img.width(), idx / img.width())
}

fn mean_color(img: &ImageRgb, indices: &[usize]) -> [f64; 3] {
    let mut acc = [0.0f64; 3];
    for &i in indices {
        let px = img.pixels()[i];
        for c in 0..3 {
            acc[c] += px[c];
        }
    }
    let n = indices.len() as f64;
    [acc[0] / n, acc[1] / n, acc[2] / n]
}

/// Among `indices`, pick the one maximizing `score`; ties break to the
/// smallest index (indices are visited in ascending order).
fn select_by(img: &ImageRgb, indices: &[usize], score: impl Fn([f64; 3]) -> f64) -> usize {
    let mut sorted: Vec<usize> = indices.to_vec();
    sorted.sort_unstable();
    let mut best = sorted[0];
    let mut best_score = score(img.pixels()[best]);
    for &i in &sorted[1..] {
        let s = score(img.pixels()[i]);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// Estimate the background light of `img` with `method`.
///
/// Errors if the window does not fit inside the image (the priors need at
/// least one full window).
pub fn estimate_background_light(
    img: &ImageRgb,
    method: BlMethod,
    win: WindowSpec,
    consts: &PriorConstants,
) -> Result<BackgroundLight> {
    let selected = |idx: usize| BackgroundLight {
        color: img.pixels()[idx],
        source: Some(method),
        pixel: Some(pixel_at(img, idx)),
    };
    let averaged = |color: [f64; 3]| BackgroundLight {
        color,
        source: Some(method),
        pixel: None,
    };

    Ok(match method {
        BlMethod::DcpBrightest => selected(argmax(&dark_channel(img, win)?)),
        BlMethod::DcpTop01 => {
            let top = top_fraction_indices(&dark_channel(img, win)?, 0.001);
            selected(select_by(img, &top, |px| px[0] + px[1] + px[2]))
        }
        BlMethod::DcpMipDiff => {
            let top = top_fraction_indices(&dark_channel(img, win)?, 0.001);
            selected(select_by(img, &top, |px| (px[2] - px[1]).max(px[1] - px[0])))
        }
        BlMethod::Mip => {
            let ties = argmin_ties(&mip_map(img, win)?);
            selected(ties[0])
        }
        BlMethod::MipAvg => {
            let ties = argmin_ties(&mip_map(img, win)?);
            averaged(mean_color(img, &ties))
        }
        BlMethod::Udcp => selected(argmax(&underwater_dark_channel(img, win)?)),
        BlMethod::RcpTop10 => {
            let top = top_fraction_indices(&red_inverted_dark(img, win)?, 0.10);
            selected(select_by(img, &top, |px| px[0] + px[1] + px[2]))
        }
        BlMethod::BlurTop01Avg => {
            let top = top_fraction_indices(&dark_channel(img, win)?, 0.001);
            averaged(mean_color(img, &top))
        }
        BlMethod::Fusion => {
            let candidates = [
                estimate_background_light(img, BlMethod::DcpTop01, win, consts)?,
                estimate_background_light(img, BlMethod::Mip, win, consts)?,
                estimate_background_light(img, BlMethod::Ulap, win, consts)?,
            ];
            averaged(fuse_candidates(&candidates))
        }
        BlMethod::Ulap => {
            let depth = ulap_depth(img, consts);
            let top = top_fraction_indices(&depth.0, 0.001);
            averaged(mean_color(img, &top))
        }
    })
}

/// Blend candidate estimates with weights proportional to the inverse of
/// each candidate's mean absolute channel distance to the others, so
/// outliers get down-weighted. Candidates in exact agreement share weight
/// equally (the small epsilon keeps the weights finite).
fn fuse_candidates(candidates: &[BackgroundLight]) -> [f64; 3] {
    const EPS: f64 = 1e-6;
    let n = candidates.len();
    let mut weights = Vec::with_capacity(n);
    for (i, a) in candidates.iter().enumerate() {
        let mut dist = 0.0;
        for (j, b) in candidates.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut d = 0.0;
            for c in 0..3 {
                d += (a.color[c] - b.color[c]).abs();
            }
            dist += d / 3.0;
        }
        dist /= (n - 1) as f64;
        weights.push(1.0 / (dist + EPS));
    }
    let total: f64 = weights.iter().sum();
    let mut color = [0.0f64; 3];
    for (w, cand) in weights.iter().zip(candidates) {
        for c in 0..3 {
            color[c] += w / total * cand.color[c];
        }
    }
    color
}

/// Run every estimator (in [`BlMethod::ALL`] order) on the same image.
/// The first failing method aborts the ranking.
pub fn rank_bl_candidates(
    img: &ImageRgb,
    win: WindowSpec,
    consts: &PriorConstants,
) -> Result<Vec<(BlMethod, BackgroundLight)>> {
    BlMethod::ALL
        .into_iter()
        .map(|m| Ok((m, estimate_background_light(img, m, win, consts)?)))
        .collect()
}
