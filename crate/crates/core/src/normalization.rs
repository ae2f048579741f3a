//! Rubber-sheet normalization: unwraps the iris annulus into a rectangle with
//! the pupil boundary on row 0 and the iris boundary on the last row.
//!
//! Any two dilations of the same eye should unwrap to nearly the same sheet,
//! which makes the sheet an independent check on the remap engine.

use std::f64::consts::TAU;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::geometry::IrisGeometry;
use crate::imaging::PixelGrid;
use crate::resampler::{sample_into, SamplingMethod};

pub const DEFAULT_SHEET_WIDTH: usize = 512;
pub const DEFAULT_SHEET_HEIGHT: usize = 64;

/// Normalized iris raster. Column `j` is the ray at `θ = 2πj / width`; row `i`
/// is the normalized radius `i / (height - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RubberSheet {
    grid: PixelGrid,
}

impl RubberSheet {
    pub fn width(&self) -> usize {
        self.grid.width()
    }

    pub fn height(&self) -> usize {
        self.grid.height()
    }

    pub fn channels(&self) -> usize {
        self.grid.channels()
    }

    pub fn data(&self) -> &[u8] {
        self.grid.data()
    }

    pub fn as_grid(&self) -> &PixelGrid {
        &self.grid
    }

    pub fn into_grid(self) -> PixelGrid {
        self.grid
    }

    /// Angle sampled by column `j`.
    pub fn theta(&self, j: usize) -> f64 {
        TAU * j as f64 / self.width() as f64
    }

    /// Rows whose sampled radius stays at least `band_px` pixels away from
    /// both boundaries of `g`.
    pub fn interior_rows(&self, g: &IrisGeometry, band_px: f64) -> Range<usize> {
        let span = g.r_iris() - g.r_pupil();
        let last = (self.height() - 1) as f64;
        let first = ((band_px * last / span).ceil().max(0.0) as usize).min(self.height());
        let end = ((span - band_px) * last / span).floor();
        let end = if end < 0.0 {
            0
        } else {
            (end as usize + 1).min(self.height())
        };
        first..end.max(first)
    }
}

pub fn rubber_sheet(
    image: &PixelGrid,
    g: &IrisGeometry,
    out_w: usize,
    out_h: usize,
    method: SamplingMethod,
) -> Result<RubberSheet> {
    if out_w < 2 || out_h < 2 {
        return Err(Error::Domain(format!(
            "rubber sheet needs at least 2x2 samples, got {out_w}x{out_h}"
        )));
    }
    method.check_legal_for(image.semantics())?;

    let channels = image.channels();
    let (cx, cy) = (g.center_x(), g.center_y());
    let r_inner = g.r_pupil();
    let span = g.r_iris() - r_inner;
    let rays: Vec<(f64, f64)> = (0..out_w)
        .map(|j| {
            let (sin, cos) = (TAU * j as f64 / out_w as f64).sin_cos();
            (cos, sin)
        })
        .collect();

    let mut data = vec![0u8; out_w * out_h * channels];
    for (i, row) in data.chunks_exact_mut(out_w * channels).enumerate() {
        let r = r_inner + (i as f64 / (out_h - 1) as f64) * span;
        for (px, &(cos, sin)) in row.chunks_exact_mut(channels).zip(&rays) {
            sample_into(image, cx + r * cos, cy + r * sin, method, px)?;
        }
    }
    Ok(RubberSheet {
        grid: PixelGrid::new(out_w, out_h, channels, image.semantics(), data)?,
    })
}
