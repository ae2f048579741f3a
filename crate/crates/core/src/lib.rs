//! Pupil-dilation augmentation for iris images and segmentation masks.
//!
//! An eye captured at dilation `λ₁ = r_pupil / r_iris` is re-rendered at any
//! target `λ₂` by a closed-form inverse radial map: every output pixel pulls
//! its value from the source pixel on the same ray, with the pupil disc
//! scaled linearly, the iris annulus stretched linearly between the two
//! boundaries, and everything beyond the iris left in place.
//!
//! ```no_run
//! use iris_dilate::{remap_dilation, DilationLevel, IrisGeometry, SamplingMethod};
//! use iris_dilate::imaging::{load_image, save_image, Semantics};
//!
//! let eye = load_image("eye.png", Semantics::Intensity)?;
//! let g = IrisGeometry::new(160.0, 140.0, 28.2, 100.0)?;
//! let out = remap_dilation(&eye, &g, DilationLevel::new(0.55)?, SamplingMethod::Nearest)?;
//! save_image(&out.image, "eye_lam550.png")?;
//! # Ok::<(), iris_dilate::Error>(())
//! ```

pub mod bench;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod imaging;
pub mod metrics;
pub mod normalization;
pub mod pipeline;
pub mod resampler;
pub mod synthetic;

pub use error::{Error, Result};
pub use geometry::{
    dilation_level, make_radial_params, radial_map_inverse, target_geometry, to_cartesian,
    to_polar, CartesianPoint, DilationLevel, IrisGeometry, PolarPoint, RadialMapParams,
};
pub use imaging::{label_set, load_image, save_image, LabelSet, PixelGrid, Semantics};
pub use metrics::{iou, mean_abs_diff, per_class_iou, IoUConfig};
pub use normalization::{rubber_sheet, RubberSheet};
pub use pipeline::{
    augment_record, build_plan, run_manifest, AugmentationPlan, DatasetManifest, DatasetRecord,
    RunSummary,
};
pub use resampler::{remap_dilation, remap_mask, sample, RemapResult, SamplingMethod};
