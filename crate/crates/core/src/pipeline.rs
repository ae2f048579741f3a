//! Offline dataset augmentation: every record of a manifest is re-rendered at
//! each dilation level of a plan, with masks remapped alongside and a
//! geometry sidecar written next to every output.
//!
//! Output layout under `out_dir`:
//!
//! ```text
//! images/<stem>_lam150.png   images/<stem>_lam150.geom
//! masks/<stem>_lam150.png    masks/<stem>_lam150.geom
//! images/<stem>_orig.png     (only with include_original)
//! ```

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use log::{info, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{DilationLevel, IrisGeometry};
use crate::imaging::{load_image, save_image, Semantics};
use crate::resampler::{remap_dilation, remap_mask, SamplingMethod};

pub const IMAGES_DIR: &str = "images";
pub const MASKS_DIR: &str = "masks";
pub const SIDECAR_EXTENSION: &str = "geom";

/// Dilation levels to synthesize for every input.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationPlan {
    levels: Vec<DilationLevel>,
    include_original: bool,
}

impl AugmentationPlan {
    pub fn new(levels: Vec<DilationLevel>, include_original: bool) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Domain("augmentation plan has no levels".into()));
        }
        for pair in levels.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::Domain(format!(
                    "plan levels must be strictly increasing ({} then {})",
                    pair[0], pair[1]
                )));
            }
        }
        let mut codes = HashSet::new();
        for &level in &levels {
            if !codes.insert(level_code(level)) {
                return Err(Error::Domain(format!(
                    "levels closer than 0.001 collide in output names (code {:03})",
                    level_code(level)
                )));
            }
        }
        Ok(Self {
            levels,
            include_original,
        })
    }

    pub fn levels(&self) -> &[DilationLevel] {
        &self.levels
    }

    pub fn include_original(&self) -> bool {
        self.include_original
    }

    /// Images produced per input image (masks double this).
    pub fn outputs_per_input(&self) -> usize {
        self.levels.len() + self.include_original as usize
    }
}

/// `n_levels` evenly spaced levels from `lambda_min` to `lambda_max` inclusive.
pub fn build_plan(
    n_levels: usize,
    lambda_min: DilationLevel,
    lambda_max: DilationLevel,
    include_original: bool,
) -> Result<AugmentationPlan> {
    if n_levels < 2 {
        return Err(Error::Domain(format!(
            "a plan needs at least 2 levels, got {n_levels}"
        )));
    }
    let (lo, hi) = (lambda_min.value(), lambda_max.value());
    if lo >= hi {
        return Err(Error::Domain(format!(
            "lambda_min {lo} must be below lambda_max {hi}"
        )));
    }
    let step = (hi - lo) / (n_levels - 1) as f64;
    let levels = (0..n_levels)
        .map(|i| {
            if i == n_levels - 1 {
                lambda_max
            } else {
                DilationLevel::new(lo + step * i as f64).expect("interior of (0, 1)")
            }
        })
        .collect();
    AugmentationPlan::new(levels, include_original)
}

/// Three-digit name code of a level: `round(1000 λ)`.
pub fn level_code(level: DilationLevel) -> u32 {
    (level.value() * 1000.0).round() as u32
}

/// `<stem>_lam<code>.<ext>`
pub fn output_name(stem: &str, level: DilationLevel, ext: &str) -> String {
    format!("{stem}_lam{:03}.{ext}", level_code(level))
}

pub fn original_name(stem: &str, ext: &str) -> String {
    format!("{stem}_orig.{ext}")
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension(SIDECAR_EXTENSION)
}

/// Circle parameters and achieved level of one generated image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sidecar {
    pub geometry: IrisGeometry,
    pub lambda: DilationLevel,
}

impl Sidecar {
    pub fn new(geometry: IrisGeometry) -> Self {
        Self {
            geometry,
            lambda: geometry.dilation_level(),
        }
    }

    pub fn to_text(&self) -> String {
        let g = &self.geometry;
        format!(
            "cx={}\ncy={}\nr_pupil={}\nr_iris={}\nlambda={}\n",
            g.center_x(),
            g.center_y(),
            g.r_pupil(),
            g.r_iris(),
            self.lambda
        )
    }

    /// Parses `key=value` lines; `lambda` is optional and recomputed when absent.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut vals: [Option<f64>; 5] = [None; 5];
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::format(path, format!("expected key=value, got '{line}'")))?;
            let slot = match key.trim() {
                "cx" => 0,
                "cy" => 1,
                "r_pupil" => 2,
                "r_iris" => 3,
                "lambda" => 4,
                _ => continue,
            };
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::format(path, format!("bad number for {key}: '{value}'")))?;
            vals[slot] = Some(v);
        }
        let need = |i: usize, name: &str| {
            vals[i].ok_or_else(|| Error::format(path, format!("missing key {name}")))
        };
        let geometry = IrisGeometry::new(
            need(0, "cx")?,
            need(1, "cy")?,
            need(2, "r_pupil")?,
            need(3, "r_iris")?,
        )?;
        let lambda = match vals[4] {
            Some(v) => DilationLevel::new(v)?,
            None => geometry.dilation_level(),
        };
        Ok(Self { geometry, lambda })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Circle values as written in a manifest row, validated only when the
/// record is processed so one bad row cannot sink a whole batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSpec {
    pub center_x: f64,
    pub center_y: f64,
    pub r_pupil: f64,
    pub r_iris: f64,
}

impl CircleSpec {
    pub fn geometry(&self) -> Result<IrisGeometry> {
        IrisGeometry::new(self.center_x, self.center_y, self.r_pupil, self.r_iris)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub image_path: PathBuf,
    pub mask_path: Option<PathBuf>,
    pub circle: CircleSpec,
    pub subject_id: Option<String>,
}

impl DatasetRecord {
    pub fn geometry(&self) -> Result<IrisGeometry> {
        self.circle.geometry()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub root: PathBuf,
    pub records: Vec<DatasetRecord>,
}

impl DatasetManifest {
    /// Reads a manifest; relative paths resolve against the manifest's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let root = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, root, path)
    }

    /// Parses `image_path,mask_path_or_dash,cx,cy,r_pupil,r_iris[,subject_id]`
    /// rows. Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str, root: PathBuf, source: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Manifest {
            path: source.to_path_buf(),
            line,
            msg,
        };
        let resolve = |p: &str| {
            let p = Path::new(p);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                root.join(p)
            }
        };
        let mut records = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if !(6..=7).contains(&fields.len()) {
                return Err(err(
                    line_no,
                    format!(
                        "expected 6 or 7 comma-separated fields, got {}",
                        fields.len()
                    ),
                ));
            }
            if fields[0].is_empty() {
                return Err(err(line_no, "empty image path".into()));
            }
            let mut nums = [0.0; 4];
            for (slot, (name, text)) in nums
                .iter_mut()
                .zip(["cx", "cy", "r_pupil", "r_iris"].iter().zip(&fields[2..6]))
            {
                *slot = text
                    .parse()
                    .map_err(|_| err(line_no, format!("{name} is not a number: '{text}'")))?;
            }
            let mask_path = match fields[1] {
                "-" | "" => None,
                m => Some(resolve(m)),
            };
            let subject_id = fields
                .get(6)
                .filter(|s| !s.is_empty())
                .map(|s| s.to_string());
            records.push(DatasetRecord {
                image_path: resolve(fields[0]),
                mask_path,
                circle: CircleSpec {
                    center_x: nums[0],
                    center_y: nums[1],
                    r_pupil: nums[2],
                    r_iris: nums[3],
                },
                subject_id,
            });
        }
        if records.is_empty() {
            return Err(err(0, "manifest contains no records".into()));
        }
        Ok(Self { root, records })
    }
}

fn stem_and_ext(path: &Path) -> Result<(String, String)> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::format(path, "path has no usable file stem"))?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("png");
    Ok((stem.to_string(), ext.to_string()))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes every plan level of one record; returns the image and mask paths
/// written (sidecars not included).
pub fn augment_record(
    rec: &DatasetRecord,
    plan: &AugmentationPlan,
    method: SamplingMethod,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let geometry = rec.geometry()?;
    let image = load_image(&rec.image_path, Semantics::Intensity)?;
    let mask = rec
        .mask_path
        .as_ref()
        .map(|p| load_image(p, Semantics::Label).map(|m| (p, m)))
        .transpose()?;
    if let Some((path, m)) = &mask {
        if m.width() != image.width() || m.height() != image.height() {
            return Err(Error::format(
                *path,
                format!(
                    "mask is {}x{} but image is {}x{}",
                    m.width(),
                    m.height(),
                    image.width(),
                    image.height()
                ),
            ));
        }
    }

    let images_dir = out_dir.join(IMAGES_DIR);
    ensure_dir(&images_dir)?;
    let masks_dir = out_dir.join(MASKS_DIR);
    if mask.is_some() {
        ensure_dir(&masks_dir)?;
    }

    let (stem, ext) = stem_and_ext(&rec.image_path)?;
    let mask_names = rec.mask_path.as_deref().map(stem_and_ext).transpose()?;
    let mut written = Vec::with_capacity(plan.outputs_per_input() * 2);

    if plan.include_original() {
        let copy = |src: &Path, dst: PathBuf| -> Result<PathBuf> {
            fs::copy(src, &dst).map_err(|e| Error::io(&dst, e))?;
            Sidecar::new(geometry).write(sidecar_path(&dst))?;
            Ok(dst)
        };
        written.push(copy(
            &rec.image_path,
            images_dir.join(original_name(&stem, &ext)),
        )?);
        if let (Some((mask_path, _)), Some((mstem, mext))) = (&mask, &mask_names) {
            written.push(copy(mask_path, masks_dir.join(original_name(mstem, mext)))?);
        }
    }

    for &level in plan.levels() {
        let res = remap_dilation(&image, &geometry, level, method)?;
        let sidecar = Sidecar {
            geometry: res.geometry,
            lambda: res.lambda,
        };
        let out = images_dir.join(output_name(&stem, level, &ext));
        save_image(&res.image, &out)?;
        sidecar.write(sidecar_path(&out))?;
        written.push(out);

        if let (Some((_, m)), Some((mstem, mext))) = (&mask, &mask_names) {
            let res = remap_mask(m, &geometry, level)?;
            let out = masks_dir.join(output_name(mstem, level, mext));
            save_image(&res.image, &out)?;
            sidecar.write(sidecar_path(&out))?;
            written.push(out);
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub processed: usize,
    pub skipped: usize,
    pub outputs: usize,
    pub wall_time: Duration,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "processed={} skipped={} outputs={} seconds={:.3}",
            self.processed,
            self.skipped,
            self.outputs,
            self.wall_time.as_secs_f64()
        )
    }
}

/// Indices of records whose image or mask name repeats an earlier record's,
/// which would make two records write the same output file.
fn name_collisions(records: &[DatasetRecord]) -> HashSet<usize> {
    let mut seen = HashSet::new();
    let mut dup = HashSet::new();
    for (i, rec) in records.iter().enumerate() {
        let mut keys = vec![(IMAGES_DIR, rec.image_path.file_stem().map(|s| s.to_owned()))];
        if let Some(m) = &rec.mask_path {
            keys.push((MASKS_DIR, m.file_stem().map(|s| s.to_owned())));
        }
        for key in keys {
            if !seen.insert(key) {
                dup.insert(i);
            }
        }
    }
    dup
}

/// Augments every record once, spreading records over `workers` threads.
/// Per-record failures are logged and counted as skipped.
pub fn run_manifest(
    manifest: &DatasetManifest,
    plan: &AugmentationPlan,
    method: SamplingMethod,
    out_dir: &Path,
    workers: usize,
) -> Result<RunSummary> {
    if workers == 0 {
        return Err(Error::Domain("workers must be at least 1".into()));
    }
    let start = Instant::now();
    ensure_dir(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    let collisions = name_collisions(&manifest.records);

    let results: Vec<Result<usize>> = pool.install(|| {
        manifest
            .records
            .par_iter()
            .enumerate()
            .map(|(i, rec)| {
                if collisions.contains(&i) {
                    return Err(Error::format(
                        &rec.image_path,
                        "output names collide with an earlier record",
                    ));
                }
                augment_record(rec, plan, method, out_dir).map(|v| v.len())
            })
            .collect()
    });

    let mut summary = RunSummary {
        processed: 0,
        skipped: 0,
        outputs: 0,
        wall_time: Duration::ZERO,
    };
    for (rec, res) in manifest.records.iter().zip(results) {
        match res {
            Ok(n) => {
                summary.processed += 1;
                summary.outputs += n;
            }
            Err(e) => {
                warn!("skipping {}: {e}", rec.image_path.display());
                summary.skipped += 1;
            }
        }
    }
    summary.wall_time = start.elapsed();
    info!("{summary}");
    Ok(summary)
}
