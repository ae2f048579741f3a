//! Remap engine: renders an eye at a new pupil dilation by pulling every
//! output pixel from the source image along its own ray.
//!
//! The inverse map only changes the radius, so the source location of an
//! output pixel at offset `(dx, dy)` from the center is `(dx, dy)` scaled by
//! `r / r'`. This is the polar round trip without evaluating any trig.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{DilationLevel, IrisGeometry, RadialMapParams};
use crate::imaging::{PixelGrid, Semantics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SamplingMethod {
    #[default]
    Nearest,
    Bilinear,
}

impl SamplingMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplingMethod::Nearest => "nearest",
            SamplingMethod::Bilinear => "bilinear",
        }
    }

    pub(crate) fn check_legal_for(self, semantics: Semantics) -> Result<()> {
        if semantics == Semantics::Label && self != SamplingMethod::Nearest {
            return Err(Error::Semantics(format!(
                "label grids can only be sampled with nearest, not {self}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SamplingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nearest" | "nn" => Ok(SamplingMethod::Nearest),
            "bilinear" | "linear" => Ok(SamplingMethod::Bilinear),
            other => Err(Error::Domain(format!(
                "unknown sampling method '{other}' (expected nearest or bilinear)"
            ))),
        }
    }
}

/// Output of a dilation remap together with the geometry it was rendered at.
#[derive(Debug, Clone)]
pub struct RemapResult {
    pub image: PixelGrid,
    pub geometry: IrisGeometry,
    pub lambda: DilationLevel,
}

#[inline]
fn clamp_index(v: f64, max: usize) -> usize {
    // NaN never reaches here; `as` saturates negatives to 0.
    let i = v as isize;
    i.clamp(0, max as isize) as usize
}

#[inline]
fn sample_nearest(src: &PixelGrid, x: f64, y: f64, out: &mut [u8]) {
    let col = clamp_index((x + 0.5).floor(), src.width() - 1);
    let row = clamp_index((y + 0.5).floor(), src.height() - 1);
    out.copy_from_slice(src.pixel(col, row));
}

#[inline]
fn sample_bilinear(src: &PixelGrid, x: f64, y: f64, out: &mut [u8]) {
    let max_x = (src.width() - 1) as f64;
    let max_y = (src.height() - 1) as f64;
    let x = x.clamp(0.0, max_x);
    let y = y.clamp(0.0, max_y);
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (c0, r0) = (x0 as usize, y0 as usize);
    let c1 = (c0 + 1).min(src.width() - 1);
    let r1 = (r0 + 1).min(src.height() - 1);

    let p00 = src.pixel(c0, r0);
    let p10 = src.pixel(c1, r0);
    let p01 = src.pixel(c0, r1);
    let p11 = src.pixel(c1, r1);
    let w00 = (1.0 - fx) * (1.0 - fy);
    let w10 = fx * (1.0 - fy);
    let w01 = (1.0 - fx) * fy;
    let w11 = fx * fy;
    for (c, o) in out.iter_mut().enumerate() {
        let v =
            w00 * p00[c] as f64 + w10 * p10[c] as f64 + w01 * p01[c] as f64 + w11 * p11[c] as f64;
        *o = (v + 0.5).floor().clamp(0.0, 255.0) as u8;
    }
}

#[inline]
fn sample_unchecked(src: &PixelGrid, x: f64, y: f64, method: SamplingMethod, out: &mut [u8]) {
    match method {
        SamplingMethod::Nearest => sample_nearest(src, x, y, out),
        SamplingMethod::Bilinear => sample_bilinear(src, x, y, out),
    }
}

/// Samples all channels of `grid` at real coordinate `(x, y)` into `out`.
///
/// Coordinates outside the frame are clamped to the nearest edge pixel.
/// Nearest picks `(floor(x + 0.5), floor(y + 0.5))`.
pub fn sample_into(
    grid: &PixelGrid,
    x: f64,
    y: f64,
    method: SamplingMethod,
    out: &mut [u8],
) -> Result<()> {
    if x.is_nan() || y.is_nan() {
        return Err(Error::Domain("NaN sample coordinate".into()));
    }
    if out.len() != grid.channels() {
        return Err(Error::Domain(format!(
            "output buffer holds {} channels, grid has {}",
            out.len(),
            grid.channels()
        )));
    }
    sample_unchecked(grid, x, y, method, out);
    Ok(())
}

pub fn sample(grid: &PixelGrid, x: f64, y: f64, method: SamplingMethod) -> Result<Vec<u8>> {
    let mut out = vec![0; grid.channels()];
    sample_into(grid, x, y, method, &mut out)?;
    Ok(out)
}

/// Fills one output row. Rows entirely outside the iris circle are copied.
fn render_row(
    src: &PixelGrid,
    params: &RadialMapParams,
    cx: f64,
    cy: f64,
    method: SamplingMethod,
    row: usize,
    out: &mut [u8],
) {
    let channels = src.channels();
    let stride = src.row_stride();
    let src_row = &src.data()[row * stride..(row + 1) * stride];
    let dy = row as f64 - cy;
    let r3 = params.r3();
    if params.is_identity() || dy.abs() >= r3 {
        out.copy_from_slice(src_row);
        return;
    }
    for (col, px) in out.chunks_exact_mut(channels).enumerate() {
        let dx = col as f64 - cx;
        let r_prime = (dx * dx + dy * dy).sqrt();
        if r_prime >= r3 {
            px.copy_from_slice(&src_row[col * channels..(col + 1) * channels]);
            continue;
        }
        let s = params.radial_scale(r_prime);
        sample_unchecked(src, cx + dx * s, cy + dy * s, method, px);
    }
}

fn prepare(
    image: &PixelGrid,
    g: &IrisGeometry,
    lambda_target: DilationLevel,
    method: SamplingMethod,
) -> Result<(IrisGeometry, RadialMapParams)> {
    method.check_legal_for(image.semantics())?;
    if !g.center_within(image.width(), image.height()) {
        return Err(Error::Geometry(format!(
            "center ({}, {}) lies outside the {}x{} image",
            g.center_x(),
            g.center_y(),
            image.width(),
            image.height()
        )));
    }
    let target = g.with_dilation(lambda_target);
    let params = RadialMapParams::between(g, &target)?;
    Ok((target, params))
}

fn remap_impl(
    image: &PixelGrid,
    g: &IrisGeometry,
    lambda_target: DilationLevel,
    method: SamplingMethod,
    parallel: bool,
) -> Result<RemapResult> {
    let (target, params) = prepare(image, g, lambda_target, method)?;
    let (cx, cy) = (g.center_x(), g.center_y());
    let mut data = vec![0u8; image.data().len()];
    let stride = image.row_stride();
    if parallel {
        data.par_chunks_mut(stride)
            .enumerate()
            .for_each(|(row, out)| render_row(image, &params, cx, cy, method, row, out));
    } else {
        data.chunks_mut(stride)
            .enumerate()
            .for_each(|(row, out)| render_row(image, &params, cx, cy, method, row, out));
    }
    let out = PixelGrid::new(
        image.width(),
        image.height(),
        image.channels(),
        image.semantics(),
        data,
    )?;
    Ok(RemapResult {
        image: out,
        geometry: target,
        lambda: lambda_target,
    })
}

/// Re-renders `image`, whose eye is described by `g`, at dilation `lambda_target`.
///
/// The center and iris radius are kept; only the pupil radius changes.
/// Pixels at or beyond the iris radius are copied unchanged.
pub fn remap_dilation(
    image: &PixelGrid,
    g: &IrisGeometry,
    lambda_target: DilationLevel,
    method: SamplingMethod,
) -> Result<RemapResult> {
    remap_impl(image, g, lambda_target, method, false)
}

/// Same as [`remap_dilation`], with rows split across the current rayon pool.
/// Output bytes do not depend on the number of threads.
pub fn remap_dilation_parallel(
    image: &PixelGrid,
    g: &IrisGeometry,
    lambda_target: DilationLevel,
    method: SamplingMethod,
) -> Result<RemapResult> {
    remap_impl(image, g, lambda_target, method, true)
}

/// Remaps a label mask; always nearest so no new class ids appear.
pub fn remap_mask(
    mask: &PixelGrid,
    g: &IrisGeometry,
    lambda_target: DilationLevel,
) -> Result<RemapResult> {
    if mask.semantics() != Semantics::Label {
        return Err(Error::Semantics("remap_mask needs a label grid".into()));
    }
    remap_dilation(mask, g, lambda_target, SamplingMethod::Nearest)
}
