//! Concentric circle model of the eye and the piecewise radial map that
//! re-renders one dilation level as another.
//!
//! All radii are in pixels. Polar angles are measured with `atan2(y, x)` in
//! the image frame and normalized to `[0, 2π)`.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};

/// Pupil and iris boundaries as two circles sharing one center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrisGeometry {
    center_x: f64,
    center_y: f64,
    r_pupil: f64,
    r_iris: f64,
}

impl IrisGeometry {
    pub fn new(center_x: f64, center_y: f64, r_pupil: f64, r_iris: f64) -> Result<Self> {
        if ![center_x, center_y, r_pupil, r_iris]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::Geometry(format!(
                "non-finite geometry (cx={center_x}, cy={center_y}, r_pupil={r_pupil}, r_iris={r_iris})"
            )));
        }
        if r_pupil <= 0.0 {
            return Err(Error::Geometry(format!(
                "pupil radius must be positive, got {r_pupil}"
            )));
        }
        if r_pupil >= r_iris {
            return Err(Error::Geometry(format!(
                "pupil radius {r_pupil} must be smaller than iris radius {r_iris}"
            )));
        }
        Ok(Self {
            center_x,
            center_y,
            r_pupil,
            r_iris,
        })
    }

    pub fn center_x(&self) -> f64 {
        self.center_x
    }

    pub fn center_y(&self) -> f64 {
        self.center_y
    }

    pub fn r_pupil(&self) -> f64 {
        self.r_pupil
    }

    pub fn r_iris(&self) -> f64 {
        self.r_iris
    }

    /// Ratio between pupil and iris radius.
    pub fn dilation_level(&self) -> DilationLevel {
        // r_pupil in (0, r_iris) guarantees the open interval.
        DilationLevel(self.r_pupil / self.r_iris)
    }

    /// Same center and iris radius, pupil resized to reach `level`.
    pub fn with_dilation(&self, level: DilationLevel) -> IrisGeometry {
        if level == self.dilation_level() {
            return *self;
        }
        IrisGeometry {
            r_pupil: level.value() * self.r_iris,
            ..*self
        }
    }

    /// Whether the center lies inside a `width`×`height` pixel lattice.
    pub fn center_within(&self, width: usize, height: usize) -> bool {
        (0.0..=(width as f64 - 1.0)).contains(&self.center_x)
            && (0.0..=(height as f64 - 1.0)).contains(&self.center_y)
    }
}

impl fmt::Display for IrisGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "center=({}, {}) r_pupil={} r_iris={}",
            self.center_x, self.center_y, self.r_pupil, self.r_iris
        )
    }
}

/// Pupil dilation level, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DilationLevel(f64);

impl DilationLevel {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 && lambda < 1.0 {
            Ok(Self(lambda))
        } else {
            Err(Error::Domain(format!(
                "dilation level must lie in (0, 1), got {lambda}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for DilationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn dilation_level(g: &IrisGeometry) -> DilationLevel {
    g.dilation_level()
}

pub fn target_geometry(g: &IrisGeometry, lambda_target: DilationLevel) -> IrisGeometry {
    g.with_dilation(lambda_target)
}

/// Precomputed constants of the inverse dilation map.
///
/// `r1` is the source pupil radius, `r2` the target pupil radius and `r3`
/// the iris radius shared by both images. `m = (r3 - r1) / (r3 - r2)` is the
/// slope of the iris branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialMapParams {
    r1: f64,
    r2: f64,
    r3: f64,
    m: f64,
    pupil_scale: f64,
    identity: bool,
}

impl RadialMapParams {
    pub fn from_radii(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        if ![r1, r2, r3].iter().all(|v| v.is_finite()) {
            return Err(Error::Geometry("non-finite radius".into()));
        }
        if r1 < 0.0 || r2 <= 0.0 {
            return Err(Error::Geometry(format!(
                "need r1 >= 0 and r2 > 0, got r1={r1}, r2={r2}"
            )));
        }
        if r1 >= r3 || r2 >= r3 {
            return Err(Error::Geometry(format!(
                "pupil radii must be below the iris radius: r1={r1}, r2={r2}, r3={r3}"
            )));
        }
        Ok(Self {
            r1,
            r2,
            r3,
            m: (r3 - r1) / (r3 - r2),
            pupil_scale: r1 / r2,
            identity: r1 == r2,
        })
    }

    /// Parameters mapping output pixels of `dst` back into `src`.
    pub fn between(src: &IrisGeometry, dst: &IrisGeometry) -> Result<Self> {
        if src.center_x != dst.center_x || src.center_y != dst.center_y {
            return Err(Error::Geometry(format!(
                "source and target centers differ: ({}, {}) vs ({}, {})",
                src.center_x, src.center_y, dst.center_x, dst.center_y
            )));
        }
        if src.r_iris != dst.r_iris {
            return Err(Error::Geometry(format!(
                "source and target iris radii differ: {} vs {}",
                src.r_iris, dst.r_iris
            )));
        }
        Self::from_radii(src.r_pupil, dst.r_pupil, src.r_iris)
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn r3(&self) -> f64 {
        self.r3
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Source and target pupils coincide, so the map is the identity.
    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// Source radius for target radius `r_prime`, with no range check.
    ///
    /// Branches are half-open: pupil for `r' < r2`, iris for
    /// `r2 <= r' < r3`, identity from `r3` outwards.
    #[inline]
    pub fn apply(&self, r_prime: f64) -> f64 {
        if self.identity {
            r_prime
        } else if r_prime < self.r2 {
            self.pupil_scale * r_prime
        } else if r_prime < self.r3 {
            self.m * (r_prime - self.r2) + self.r1
        } else {
            r_prime
        }
    }

    /// Ratio `source radius / target radius` at `r_prime`, used to scale a
    /// cartesian offset without leaving the ray. Defined as the pupil scale
    /// at the center.
    #[inline]
    pub(crate) fn radial_scale(&self, r_prime: f64) -> f64 {
        if self.identity {
            1.0
        } else if r_prime < self.r2 {
            self.pupil_scale
        } else if r_prime < self.r3 {
            (self.m * (r_prime - self.r2) + self.r1) / r_prime
        } else {
            1.0
        }
    }
}

pub fn make_radial_params(g_src: &IrisGeometry, g_dst: &IrisGeometry) -> Result<RadialMapParams> {
    RadialMapParams::between(g_src, g_dst)
}

pub fn radial_map_inverse(r_prime: f64, p: &RadialMapParams) -> Result<f64> {
    if r_prime.is_nan() || r_prime < 0.0 {
        return Err(Error::Domain(format!(
            "radius must be non-negative, got {r_prime}"
        )));
    }
    Ok(p.apply(r_prime))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

/// Offset from a geometry's center, in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
}

pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid of a tiny negative value rounds up to exactly TAU
    if t >= TAU {
        0.0
    } else {
        t
    }
}

pub fn to_polar(pt: CartesianPoint) -> PolarPoint {
    let r = pt.x.hypot(pt.y);
    if r == 0.0 {
        return PolarPoint { r: 0.0, theta: 0.0 };
    }
    PolarPoint {
        r,
        theta: normalize_angle(pt.y.atan2(pt.x)),
    }
}

pub fn to_cartesian(pt: PolarPoint) -> CartesianPoint {
    let (sin, cos) = pt.theta.sin_cos();
    CartesianPoint {
        x: pt.r * cos,
        y: pt.r * sin,
    }
}
