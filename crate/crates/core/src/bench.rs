//! Throughput measurement of the remap kernel, compute only.

use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::geometry::{DilationLevel, IrisGeometry};
use crate::imaging::PixelGrid;
use crate::pipeline::build_plan;
use crate::resampler::{remap_dilation, remap_dilation_parallel, SamplingMethod};

pub const MIN_ITERATIONS: usize = 10;
pub const WARMUP_ITERATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub n_images: usize,
    pub total_ms: f64,
    pub ms_per_image: f64,
    pub images_per_sec: f64,
    pub image_shape: (usize, usize, usize),
    pub method: SamplingMethod,
    pub threads: usize,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (w, h, c) = self.image_shape;
        write!(
            f,
            "n_images={} total_ms={:.3} ms_per_image={:.4} images_per_sec={:.1} shape={}x{}x{} method={} threads={}",
            self.n_images,
            self.total_ms,
            self.ms_per_image,
            self.images_per_sec,
            w,
            h,
            c,
            self.method,
            self.threads
        )
    }
}

/// Remaps `image` `n_iters` times, cycling the target level through the
/// 19-level 0.15..0.75 plan, and reports the timed throughput.
///
/// With `threads > 1` each remap splits its rows over a pool of that size.
pub fn run_bench(
    image: &PixelGrid,
    g: &IrisGeometry,
    n_iters: usize,
    method: SamplingMethod,
    threads: usize,
) -> Result<BenchReport> {
    if n_iters < MIN_ITERATIONS {
        return Err(Error::Domain(format!(
            "bench needs at least {MIN_ITERATIONS} iterations, got {n_iters}"
        )));
    }
    if threads == 0 {
        return Err(Error::Domain("threads must be at least 1".into()));
    }
    let plan = build_plan(
        19,
        DilationLevel::new(0.15)?,
        DilationLevel::new(0.75)?,
        false,
    )?;
    let levels = plan.levels();

    let timed = |remap: &dyn Fn(DilationLevel) -> Result<usize>| -> Result<f64> {
        for i in 0..WARMUP_ITERATIONS {
            remap(levels[i % levels.len()])?;
        }
        let mut sink = 0usize;
        let start = Instant::now();
        for i in 0..n_iters {
            sink = sink.wrapping_add(remap(levels[i % levels.len()])?);
        }
        let elapsed = start.elapsed();
        std::hint::black_box(sink);
        Ok(elapsed.as_secs_f64() * 1e3)
    };

    let total_ms = if threads == 1 {
        timed(&|lam| Ok(remap_dilation(image, g, lam, method)?.image.data()[0] as usize))?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Domain(format!("cannot start bench pool: {e}")))?;
        pool.install(|| {
            timed(&|lam| {
                Ok(remap_dilation_parallel(image, g, lam, method)?.image.data()[0] as usize)
            })
        })?
    };

    let ms_per_image = total_ms / n_iters as f64;
    Ok(BenchReport {
        n_images: n_iters,
        total_ms,
        ms_per_image,
        images_per_sec: 1e3 / ms_per_image,
        image_shape: (image.width(), image.height(), image.channels()),
        method,
        threads,
    })
}
