//! Mask overlap and image difference measures.

use crate::error::{Error, Result};
use crate::imaging::{PixelGrid, Semantics};

pub const DEFAULT_IOU_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IoUConfig {
    /// Added to the union count so empty masks score 0 instead of 0/0.
    pub epsilon: f64,
}

impl IoUConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain(format!(
                "IoU epsilon must be a small positive value, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }
}

impl Default for IoUConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_IOU_EPSILON,
        }
    }
}

fn check_pair(a: &PixelGrid, b: &PixelGrid, semantics: Semantics) -> Result<()> {
    if a.semantics() != semantics || b.semantics() != semantics {
        return Err(Error::Semantics(format!(
            "expected two {semantics:?} grids, got {:?} and {:?}",
            a.semantics(),
            b.semantics()
        )));
    }
    if !a.same_shape(b) {
        return Err(Error::Domain(format!(
            "shape mismatch: {}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        )));
    }
    Ok(())
}

fn ratio(intersection: u64, union: u64, cfg: IoUConfig) -> f64 {
    intersection as f64 / (union as f64 + cfg.epsilon)
}

/// Bitwise IoU of two binary masks (0 = background, 1 = iris).
pub fn iou(mask_a: &PixelGrid, mask_b: &PixelGrid, cfg: IoUConfig) -> Result<f64> {
    check_pair(mask_a, mask_b, Semantics::Label)?;
    let (mut inter, mut union) = (0u64, 0u64);
    for (&a, &b) in mask_a.data().iter().zip(mask_b.data()) {
        if a > 1 || b > 1 {
            return Err(Error::Domain(format!(
                "binary masks expected, found label {}",
                a.max(b)
            )));
        }
        inter += (a & b) as u64;
        union += (a | b) as u64;
    }
    Ok(ratio(inter, union, cfg))
}

/// IoU of the pixels labelled `class_id` in each mask. A class absent from
/// both masks scores 0.
pub fn per_class_iou(
    mask_a: &PixelGrid,
    mask_b: &PixelGrid,
    class_id: u8,
    cfg: IoUConfig,
) -> Result<f64> {
    check_pair(mask_a, mask_b, Semantics::Label)?;
    let (mut inter, mut union) = (0u64, 0u64);
    for (&a, &b) in mask_a.data().iter().zip(mask_b.data()) {
        let (a, b) = (a == class_id, b == class_id);
        inter += (a && b) as u64;
        union += (a || b) as u64;
    }
    Ok(ratio(inter, union, cfg))
}

/// Mean absolute sample difference, optionally restricted to the pixels
/// where `region` is non-zero.
pub fn mean_abs_diff(a: &PixelGrid, b: &PixelGrid, region: Option<&PixelGrid>) -> Result<f64> {
    check_pair(a, b, Semantics::Intensity)?;
    let channels = a.channels();
    match region {
        None => {
            let total: u64 = a
                .data()
                .iter()
                .zip(b.data())
                .map(|(&x, &y)| x.abs_diff(y) as u64)
                .sum();
            Ok(total as f64 / a.data().len() as f64)
        }
        Some(region) => {
            if region.width() != a.width()
                || region.height() != a.height()
                || region.channels() != 1
            {
                return Err(Error::Domain(
                    "region must be a single-channel grid matching the images".into(),
                ));
            }
            let (mut total, mut count) = (0u64, 0u64);
            for ((pa, pb), &keep) in a
                .data()
                .chunks_exact(channels)
                .zip(b.data().chunks_exact(channels))
                .zip(region.data())
            {
                if keep != 0 {
                    total += pa
                        .iter()
                        .zip(pb)
                        .map(|(&x, &y)| x.abs_diff(y) as u64)
                        .sum::<u64>();
                    count += channels as u64;
                }
            }
            if count == 0 {
                return Err(Error::Domain("region selects no pixels".into()));
            }
            Ok(total as f64 / count as f64)
        }
    }
}
