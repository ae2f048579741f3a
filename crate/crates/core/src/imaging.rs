//! 8-bit raster containers and PNG persistence.
//!
//! Pixel `(col, row)` sits at real coordinate `(col, row)`; there is no
//! half-pixel offset. Label masks are single id-planes: one class id per pixel.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use image::{ColorType, DynamicImage, ImageEncoder, ImageFormat, ImageReader};

use crate::error::{Error, Result};

/// What the samples of a grid mean, which decides the legal samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// Radiometric values; any interpolation is meaningful.
    Intensity,
    /// Integer class ids; only nearest-neighbour sampling preserves them.
    Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelGrid {
    width: usize,
    height: usize,
    channels: usize,
    semantics: Semantics,
    data: Vec<u8>,
}

impl PixelGrid {
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        semantics: Semantics,
        data: Vec<u8>,
    ) -> Result<Self> {
        if width == 0 || height == 0 || channels == 0 {
            return Err(Error::Domain(format!(
                "grid dimensions must be positive, got {width}x{height}x{channels}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| Error::Domain("grid dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::Domain(format!(
                "grid {width}x{height}x{channels} needs {expected} samples, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            semantics,
            data,
        })
    }

    pub fn filled(
        width: usize,
        height: usize,
        channels: usize,
        semantics: Semantics,
        value: u8,
    ) -> Result<Self> {
        Self::new(
            width,
            height,
            channels,
            semantics,
            vec![value; width.saturating_mul(height).saturating_mul(channels)],
        )
    }

    /// Builds a grid by evaluating `f(col, row)` for every pixel; `f` fills one
    /// pixel's channels.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        semantics: Semantics,
        mut f: impl FnMut(usize, usize, &mut [u8]),
    ) -> Result<Self> {
        let mut grid = Self::filled(width, height, channels, semantics, 0)?;
        for (i, px) in grid.data.chunks_exact_mut(channels).enumerate() {
            f(i % width, i / width, px);
        }
        Ok(grid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn with_semantics(mut self, semantics: Semantics) -> Self {
        self.semantics = semantics;
        self
    }

    pub fn same_shape(&self, other: &PixelGrid) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    pub fn row_stride(&self) -> usize {
        self.width * self.channels
    }

    pub fn pixel(&self, col: usize, row: usize) -> &[u8] {
        let start = (row * self.width + col) * self.channels;
        &self.data[start..start + self.channels]
    }
}

/// Sorted distinct class ids of a label grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet(BTreeSet<u8>);

impl LabelSet {
    pub fn ids(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: u8) -> bool {
        self.0.contains(&id)
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&id| id <= 1)
    }

    pub fn is_subset(&self, other: &LabelSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

pub fn label_set(grid: &PixelGrid) -> Result<LabelSet> {
    if grid.semantics != Semantics::Label {
        return Err(Error::Semantics(
            "label set requested on an intensity grid".into(),
        ));
    }
    let mut seen = [false; 256];
    for &v in &grid.data {
        seen[v as usize] = true;
    }
    Ok(LabelSet(
        (0..=255u8).filter(|&id| seen[id as usize]).collect(),
    ))
}

/// Reads an 8-bit PNG with 1 to 4 channels.
pub fn load_image(path: impl AsRef<Path>, semantics: Semantics) -> Result<PixelGrid> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = ImageReader::new(BufReader::new(file))
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    if reader.format() != Some(ImageFormat::Png) {
        return Err(Error::format(path, "not a PNG file"));
    }
    let decoded = reader
        .decode()
        .map_err(|e| Error::format(path, e.to_string()))?;
    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let (channels, data) = match decoded {
        DynamicImage::ImageLuma8(b) => (1, b.into_raw()),
        DynamicImage::ImageLumaA8(b) => (2, b.into_raw()),
        DynamicImage::ImageRgb8(b) => (3, b.into_raw()),
        DynamicImage::ImageRgba8(b) => (4, b.into_raw()),
        other => {
            return Err(Error::format(
                path,
                format!("unsupported sample layout {:?}, need 8-bit", other.color()),
            ))
        }
    };
    PixelGrid::new(width, height, channels, semantics, data)
        .map_err(|e| Error::format(path, e.to_string()))
}

/// Writes a grid as PNG. Lossless: `load_image` returns identical bytes.
pub fn save_image(grid: &PixelGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let color = match grid.channels {
        1 => ColorType::L8,
        2 => ColorType::La8,
        3 => ColorType::Rgb8,
        4 => ColorType::Rgba8,
        n => {
            return Err(Error::format(
                path,
                format!("cannot store {n} channels in PNG"),
            ))
        }
    };
    let (width, height) = dims_u32(grid, path)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    image::codecs::png::PngEncoder::new(&mut writer)
        .write_image(&grid.data, width, height, color.into())
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::format(path, other.to_string()),
        })?;
    writer
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    Ok(())
}

fn dims_u32(grid: &PixelGrid, path: &Path) -> Result<(u32, u32)> {
    let w = u32::try_from(grid.width).map_err(|_| Error::format(path, "width too large"))?;
    let h = u32::try_from(grid.height).map_err(|_| Error::format(path, "height too large"))?;
    Ok((w, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(PixelGrid::new(0, 4, 1, Semantics::Intensity, vec![]).is_err());
        assert!(PixelGrid::new(2, 2, 1, Semantics::Intensity, vec![0; 3]).is_err());
        assert!(PixelGrid::new(2, 2, 3, Semantics::Intensity, vec![0; 12]).is_ok());
    }

    #[test]
    fn label_set_examples() {
        let zeros = PixelGrid::filled(5, 4, 1, Semantics::Label, 0).unwrap();
        assert_eq!(
            label_set(&zeros).unwrap().ids().collect::<Vec<_>>(),
            vec![0]
        );

        let binary = PixelGrid::from_fn(6, 6, 1, Semantics::Label, |c, r, p| {
            p[0] = ((c + r) % 2) as u8
        })
        .unwrap();
        let set = label_set(&binary).unwrap();
        assert_eq!(set.ids().collect::<Vec<_>>(), vec![0, 1]);
        assert!(set.is_binary());

        let four = PixelGrid::from_fn(8, 8, 1, Semantics::Label, |c, _, p| {
            p[0] = [0, 1, 2, 3][c % 4]
        })
        .unwrap();
        assert_eq!(label_set(&four).unwrap().len(), 4);

        let intensity = PixelGrid::filled(2, 2, 1, Semantics::Intensity, 7).unwrap();
        assert!(matches!(label_set(&intensity), Err(Error::Semantics(_))));
    }

    #[test]
    fn load_reports_missing_and_truncated_files() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.png");
        assert!(matches!(
            load_image(&missing, Semantics::Intensity),
            Err(Error::Io { .. })
        ));

        let grid = PixelGrid::filled(32, 32, 1, Semantics::Intensity, 9).unwrap();
        let full = dir.path().join("full.png");
        save_image(&grid, &full).unwrap();
        let bytes = std::fs::read(&full).unwrap();
        let cut = dir.path().join("cut.png");
        std::fs::write(&cut, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(
            load_image(&cut, Semantics::Intensity),
            Err(Error::Format { .. })
        ));

        let text = dir.path().join("text.png");
        std::fs::write(&text, b"hello").unwrap();
        assert!(matches!(
            load_image(&text, Semantics::Intensity),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn load_nir_sized_and_rgb() {
        let dir = tempfile::tempdir().unwrap();
        let nir = PixelGrid::from_fn(320, 280, 1, Semantics::Intensity, |c, r, p| {
            p[0] = (c ^ r) as u8
        })
        .unwrap();
        let path = dir.path().join("nir.png");
        save_image(&nir, &path).unwrap();
        let back = load_image(&path, Semantics::Intensity).unwrap();
        assert_eq!(
            (
                back.width(),
                back.height(),
                back.channels(),
                back.semantics()
            ),
            (320, 280, 1, Semantics::Intensity)
        );

        let rgb = PixelGrid::from_fn(7, 5, 3, Semantics::Intensity, |c, r, p| {
            p.copy_from_slice(&[c as u8, r as u8, 200])
        })
        .unwrap();
        let path = dir.path().join("rgb.png");
        save_image(&rgb, &path).unwrap();
        assert_eq!(load_image(&path, Semantics::Intensity).unwrap(), rgb);
    }

    #[test]
    fn masks_keep_their_labels() {
        let dir = tempfile::tempdir().unwrap();
        let mask = PixelGrid::from_fn(9, 9, 1, Semantics::Label, |c, r, p| {
            p[0] = ((c * r) % 4) as u8
        })
        .unwrap();
        let path = dir.path().join("mask.png");
        save_image(&mask, &path).unwrap();
        let back = load_image(&path, Semantics::Label).unwrap();
        assert_eq!(label_set(&back).unwrap(), label_set(&mask).unwrap());
        assert_eq!(back, mask);
    }

    #[test]
    fn save_to_missing_directory_is_io_error() {
        let grid = PixelGrid::filled(2, 2, 1, Semantics::Intensity, 0).unwrap();
        let err = save_image(&grid, "/nonexistent-dir/x/y.png").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn save_load_is_identity(
            w in 1usize..40, h in 1usize..40, ch in 1usize..=4, seed in any::<u64>()
        ) {
            let mut state = seed;
            let grid = PixelGrid::from_fn(w, h, ch, Semantics::Intensity, |_, _, p| {
                for v in p.iter_mut() {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    *v = (state >> 56) as u8;
                }
            }).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("g.png");
            save_image(&grid, &path).unwrap();
            prop_assert_eq!(load_image(&path, Semantics::Intensity).unwrap(), grid);
        }

        #[test]
        fn label_set_only_reports_present_values(values in proptest::collection::vec(any::<u8>(), 1..64)) {
            let n = values.len();
            let grid = PixelGrid::new(n, 1, 1, Semantics::Label, values.clone()).unwrap();
            let set = label_set(&grid).unwrap();
            for id in set.ids() {
                prop_assert!(values.contains(&id));
            }
            for v in values {
                prop_assert!(set.contains(v));
            }
        }
    }
}
