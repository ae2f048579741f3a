//! Analytic eye images and masks, used as fixtures by the test suites and as
//! the default workload of the `bench` subcommand.

use std::f64::consts::TAU;

use crate::error::Result;
use crate::geometry::IrisGeometry;
use crate::imaging::{PixelGrid, Semantics};

pub const PUPIL_LEVEL: u8 = 20;
pub const SCLERA_LEVEL: u8 = 190;

/// A grayscale eye with a smooth radial/angular iris texture.
///
/// The texture is a function of the normalized iris radius and the angle,
/// so the same eye rendered at any dilation unwraps to the same rubber sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticEye {
    pub width: usize,
    pub height: usize,
    pub center_x: f64,
    pub center_y: f64,
    pub r_pupil: f64,
    pub r_iris: f64,
}

impl Default for SyntheticEye {
    /// 320×280 NIR-sized frame, iris radius 100, dilation 0.4.
    fn default() -> Self {
        Self {
            width: 320,
            height: 280,
            center_x: 160.0,
            center_y: 140.0,
            r_pupil: 40.0,
            r_iris: 100.0,
        }
    }
}

/// Iris texture at normalized radius `rho` in [0, 1] and angle `theta`.
pub fn iris_texture(rho: f64, theta: f64) -> f64 {
    110.0
        + 45.0 * (TAU * 1.5 * rho).sin() * (6.0 * theta).cos()
        + 25.0 * (3.0 * theta + 2.0 * rho).sin()
        + 15.0 * (TAU * rho).cos()
}

impl SyntheticEye {
    pub fn geometry(&self) -> Result<IrisGeometry> {
        IrisGeometry::new(self.center_x, self.center_y, self.r_pupil, self.r_iris)
    }

    fn polar(&self, col: usize, row: usize) -> (f64, f64) {
        let dx = col as f64 - self.center_x;
        let dy = row as f64 - self.center_y;
        (dx.hypot(dy), dy.atan2(dx))
    }

    pub fn render(&self) -> Result<(PixelGrid, IrisGeometry)> {
        let g = self.geometry()?;
        let span = self.r_iris - self.r_pupil;
        let img = PixelGrid::from_fn(
            self.width,
            self.height,
            1,
            Semantics::Intensity,
            |c, r, p| {
                let (d, theta) = self.polar(c, r);
                p[0] = if d < self.r_pupil {
                    PUPIL_LEVEL
                } else if d < self.r_iris {
                    iris_texture((d - self.r_pupil) / span, theta)
                        .round()
                        .clamp(0.0, 255.0) as u8
                } else {
                    // sclera fading slowly toward the frame edge
                    (SCLERA_LEVEL as f64 - 0.15 * (d - self.r_iris))
                        .round()
                        .max(0.0) as u8
                };
            },
        )?;
        Ok((img, g))
    }

    /// Binary mask: 1 on the iris annulus, 0 elsewhere.
    pub fn annulus_mask(&self) -> Result<PixelGrid> {
        annulus_mask(self.width, self.height, &self.geometry()?)
    }

    /// Four classes: 0 skin, 1 iris, 2 pupil, 3 sclera.
    pub fn four_class_mask(&self) -> Result<PixelGrid> {
        PixelGrid::from_fn(self.width, self.height, 1, Semantics::Label, |c, r, p| {
            let (d, _) = self.polar(c, r);
            let dy = (r as f64 - self.center_y).abs();
            p[0] = if d < self.r_pupil {
                2
            } else if d < self.r_iris {
                1
            } else if d < 1.5 * self.r_iris && dy < 0.8 * self.r_iris {
                3
            } else {
                0
            };
        })
    }
}

/// Binary mask of the pixels whose center distance lies in `[r_pupil, r_iris)`.
pub fn annulus_mask(width: usize, height: usize, g: &IrisGeometry) -> Result<PixelGrid> {
    PixelGrid::from_fn(width, height, 1, Semantics::Label, |c, r, p| {
        let d = (c as f64 - g.center_x()).hypot(r as f64 - g.center_y());
        p[0] = (d >= g.r_pupil() && d < g.r_iris()) as u8;
    })
}
