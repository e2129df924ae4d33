//! SAD block matching along image rows.
//!
//! For each left pixel `x` and disparity `d` the cost is the sum of absolute
//! differences between the left block centered at `x` and the right block
//! centered at `x − d`. Blocks must lie inside the image and contain only
//! valid (unmasked) pixels, and the left block must have enough horizontal
//! gradient. The winning integer disparity must be unique,
//! is refined with a parabola through its two neighbors, and must agree with
//! the right-to-left winner taken from the same cost volume.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::StereoError;
use crate::image::{Image, Mask};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatcherParams {
    /// Odd block side length, at least 3.
    pub block_size: usize,
    /// Largest disparity searched (inclusive), in pixels.
    pub max_disparity: usize,
    /// The best cost must be beaten by this factor by every disparity more
    /// than one step away.
    pub uniqueness_ratio: f64,
    /// Maximum allowed `|d_left − d_right|` in pixels.
    pub lr_tolerance: f64,
    /// Minimum mean absolute horizontal gradient inside the left block.
    /// Blocks below it carry no horizontal structure to match.
    pub texture_threshold: f64,
}

impl Default for MatcherParams {
    fn default() -> Self {
        Self {
            block_size: 9,
            max_disparity: 48,
            uniqueness_ratio: 1.05,
            lr_tolerance: 1.0,
            texture_threshold: 0.02,
        }
    }
}

impl MatcherParams {
    pub fn new(block_size: usize, max_disparity: usize) -> Result<Self, StereoError> {
        let p = Self {
            block_size,
            max_disparity,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), StereoError> {
        if self.block_size < 3 || self.block_size.is_multiple_of(2) {
            return Err(StereoError::BadParams("block_size must be odd and at least 3"));
        }
        if self.max_disparity == 0 {
            return Err(StereoError::BadParams("max_disparity must be positive"));
        }
        if !(self.uniqueness_ratio >= 1.0) {
            return Err(StereoError::BadParams("uniqueness_ratio must be at least 1"));
        }
        if !(self.lr_tolerance >= 0.0) {
            return Err(StereoError::BadParams("lr_tolerance must be non-negative"));
        }
        if !(self.texture_threshold >= 0.0) {
            return Err(StereoError::BadParams("texture_threshold must be non-negative"));
        }
        Ok(())
    }
}

/// Per-pixel disparity of the left image, in pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    width: usize,
    height: usize,
    data: Vec<Option<f64>>,
}

impl DisparityMap {
    pub fn from_vec(
        width: usize,
        height: usize,
        data: Vec<Option<f64>>,
    ) -> Result<Self, StereoError> {
        if data.len() != width * height {
            return Err(StereoError::DimensionMismatch(
                (width, height),
                (data.len(), 1),
            ));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> Option<f64> {
        self.data[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[Option<f64>] {
        &self.data
    }

    pub fn valid_count(&self) -> usize {
        self.data.iter().filter(|d| d.is_some()).count()
    }

    /// Median of the valid disparities.
    pub fn median(&self) -> Option<f64> {
        let mut v: Vec<f64> = self.data.iter().flatten().copied().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        Some(if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        })
    }
}

/// Per-row flags: is the block centered at `x` fully inside the image and
/// free of masked pixels.
fn block_validity(mask: &Mask, radius: usize) -> Vec<bool> {
    let (w, h) = mask.dimensions();
    // prefix[y][x]: invalid pixels in rows < y, columns < x
    let stride = w + 1;
    let mut prefix = vec![0u32; (h + 1) * stride];
    for y in 0..h {
        let mut run = 0u32;
        for x in 0..w {
            run += (!mask.get(x, y)) as u32;
            prefix[(y + 1) * stride + x + 1] = prefix[y * stride + x + 1] + run;
        }
    }
    let mut out = vec![false; w * h];
    if w <= 2 * radius || h <= 2 * radius {
        return out;
    }
    for y in radius..h - radius {
        for x in radius..w - radius {
            let (x0, x1, y0, y1) = (x - radius, x + radius + 1, y - radius, y + radius + 1);
            let bad = prefix[y1 * stride + x1] + prefix[y0 * stride + x0]
                - prefix[y0 * stride + x1]
                - prefix[y1 * stride + x0];
            out[y * w + x] = bad == 0;
        }
    }
    out
}

/// Dense disparity for a rectified pair. Masks flag valid (non-void) pixels.
pub fn compute_disparity(
    left: &Image,
    right: &Image,
    left_mask: &Mask,
    right_mask: &Mask,
    params: &MatcherParams,
) -> Result<DisparityMap, StereoError> {
    params.validate()?;
    let dims = left.dimensions();
    for other in [right.dimensions(), left_mask.dimensions(), right_mask.dimensions()] {
        if other != dims {
            return Err(StereoError::DimensionMismatch(dims, other));
        }
    }
    let (w, h) = dims;
    let r = params.block_size / 2;
    let left_ok = block_validity(left_mask, r);
    let right_ok = block_validity(right_mask, r);

    let rows = par::map_range(h, |y| {
        if y < r || y + r >= h {
            return vec![None; w];
        }
        match_row(left, right, &left_ok, &right_ok, y, params)
    });
    Ok(DisparityMap {
        width: w,
        height: h,
        data: rows.into_iter().flatten().collect(),
    })
}

fn match_row(
    left: &Image,
    right: &Image,
    left_ok: &[bool],
    right_ok: &[bool],
    y: usize,
    params: &MatcherParams,
) -> Vec<Option<f64>> {
    let w = left.width();
    let r = params.block_size / 2;
    let nd = params.max_disparity + 1;

    // cost[x * nd + d], infinite where either block is invalid
    let mut cost = vec![f64::INFINITY; w * nd];
    let mut column = vec![0.0f64; w];
    let mut prefix = vec![0.0f64; w + 1];
    for d in 0..nd.min(w) {
        for (x, c) in column.iter_mut().enumerate() {
            *c = if x < d {
                0.0
            } else {
                (y - r..=y + r)
                    .map(|yy| (left.get(x, yy) as f64 - right.get(x - d, yy) as f64).abs())
                    .sum()
            };
        }
        for x in 0..w {
            prefix[x + 1] = prefix[x] + column[x];
        }
        for x in (r + d)..w.saturating_sub(r) {
            if left_ok[y * w + x] && right_ok[y * w + x - d] {
                cost[x * nd + d] = prefix[x + r + 1] - prefix[x - r];
            }
        }
    }

    // mean |I(x+1) − I(x)| over the left block, differences inside it only
    let rows = y - r..=y + r;
    for (x, c) in column.iter_mut().enumerate() {
        *c = if x + 1 < w {
            rows.clone()
                .map(|yy| (left.get(x + 1, yy) as f64 - left.get(x, yy) as f64).abs())
                .sum()
        } else {
            0.0
        };
    }
    for x in 0..w {
        prefix[x + 1] = prefix[x] + column[x];
    }
    let texture_count = (2 * r * (2 * r + 1)) as f64;
    let textured: Vec<bool> = (0..w)
        .map(|x| {
            x >= r
                && x + r < w
                && (prefix[x + r] - prefix[x - r]) / texture_count >= params.texture_threshold
        })
        .collect();

    let right_best: Vec<Option<usize>> = (0..w)
        .map(|xr| {
            let mut best: Option<(usize, f64)> = None;
            for d in 0..nd {
                if xr + d >= w {
                    break;
                }
                let c = cost[(xr + d) * nd + d];
                if c.is_finite() && best.is_none_or(|(_, bc)| c < bc) {
                    best = Some((d, c));
                }
            }
            best.map(|(d, _)| d)
        })
        .collect();

    (0..w)
        .map(|x| {
            if !textured[x] {
                return None;
            }
            let costs = &cost[x * nd..(x + 1) * nd];
            let d = winner(costs, params)?;
            let refined = refine(costs, d);
            let dr = right_best[x - d]? as f64;
            ((refined - dr).abs() <= params.lr_tolerance).then_some(refined)
        })
        .collect()
}

/// Unique integer minimum of one cost curve with finite costs on both sides
/// (only `d = 0` may sit at the edge).
/// Needs at least one finite cost more than one step from the minimum.
fn winner(costs: &[f64], params: &MatcherParams) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (d, &c) in costs.iter().enumerate() {
        if c.is_finite() && best.is_none_or(|(_, bc)| c < bc) {
            best = Some((d, c));
        }
    }
    let (d, c) = best?;
    // a minimum on the edge of the searched range is not a minimum
    if d == params.max_disparity || !costs[d + 1].is_finite() {
        return None;
    }
    if d > 0 && !costs[d - 1].is_finite() {
        return None;
    }
    let second = costs
        .iter()
        .enumerate()
        .filter(|&(k, v)| v.is_finite() && k.abs_diff(d) > 1)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    // without a competitor, uniqueness cannot be established
    if !(second.is_finite() && second > params.uniqueness_ratio * c) {
        return None;
    }
    Some(d)
}

/// Parabolic sub-pixel offset through the costs at `d − 1`, `d`, `d + 1`.
fn refine(costs: &[f64], d: usize) -> f64 {
    if d == 0 || d + 1 >= costs.len() {
        return d as f64;
    }
    let (a, b, c) = (costs[d - 1], costs[d], costs[d + 1]);
    let denom = a - 2.0 * b + c;
    if !(a.is_finite() && c.is_finite()) || !(denom > 0.0) {
        return d as f64;
    }
    let offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
    d as f64 + offset
}
