//! Pinhole camera with radial/tangential distortion, and radar-box projection.
//!
//! Radar frame: x right, y forward (boresight), z up.
//! Camera frame: x right, y down, z forward (optical axis).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointcloud::ClusterBox;
use crate::scalar::Scalar;

/// Corners closer than this to the image plane are dropped when projecting boxes.
pub const MIN_DEPTH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    /// `[rows, cols]`
    pub image_size: [usize; 2],
    /// row-major 3x3
    pub intrinsic: [f64; 9],
    /// `(k1, k2)`
    pub radial: [f64; 2],
    /// `(p1, p2)`
    pub tangential: [f64; 2],
    /// row-major 3x4, radar frame to camera frame
    pub extrinsic: [f64; 12],
}

impl Default for CameraModel {
    fn default() -> Self {
        Self::industrial_1536x2048()
    }
}

impl CameraModel {
    /// Calibrated industrial camera, co-located with the radar.
    pub fn industrial_1536x2048() -> Self {
        Self {
            image_size: [1536, 2048],
            intrinsic: [1208.2, 0.0, 1038.8, 0.0, 1210.4, 763.4, 0.0, 0.0, 1.0],
            radial: [-0.09635, 0.08026],
            tangential: [0.0, 0.0],
            extrinsic: radar_to_camera([0.0; 3]),
        }
    }

    /// Replaces the extrinsic with the axis swap plus a camera-frame translation.
    pub fn with_offset(mut self, offset: [f64; 3]) -> Self {
        self.extrinsic = radar_to_camera(offset);
        self
    }

    pub fn rows(&self) -> usize {
        self.image_size[0]
    }

    pub fn cols(&self) -> usize {
        self.image_size[1]
    }

    pub fn validate(&self) -> Result<()> {
        let k = &self.intrinsic;
        if self.image_size[0] == 0 || self.image_size[1] == 0 {
            return Err(Error::Config(format!(
                "image_size must be positive, got {:?}",
                self.image_size
            )));
        }
        let all = k
            .iter()
            .chain(&self.radial)
            .chain(&self.tangential)
            .chain(&self.extrinsic);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::Config("camera parameters must be finite".into()));
        }
        if !(k[0] > 0.0 && k[4] > 0.0) {
            return Err(Error::Config(format!(
                "focal lengths must be positive, got {} and {}",
                k[0], k[4]
            )));
        }
        if k[3] != 0.0 || k[6] != 0.0 || k[7] != 0.0 || k[8] != 1.0 {
            return Err(Error::Config(
                "intrinsic must be upper triangular with K[2][2] = 1".into(),
            ));
        }
        Ok(())
    }

    /// Radar-frame point to camera frame.
    pub fn to_camera<T: Scalar>(&self, p: [T; 3]) -> [T; 3] {
        let e = &self.extrinsic;
        let mut out = [T::zero(); 3];
        for (r, o) in out.iter_mut().enumerate() {
            *o = T::lit(e[r * 4]) * p[0]
                + T::lit(e[r * 4 + 1]) * p[1]
                + T::lit(e[r * 4 + 2]) * p[2]
                + T::lit(e[r * 4 + 3]);
        }
        out
    }

    /// Applies lens distortion to normalized image coordinates.
    pub fn distort<T: Scalar>(&self, xn: T, yn: T) -> (T, T) {
        let (k1, k2) = (T::lit(self.radial[0]), T::lit(self.radial[1]));
        let (p1, p2) = (T::lit(self.tangential[0]), T::lit(self.tangential[1]));
        let two = T::lit(2.0);
        let r2 = xn * xn + yn * yn;
        let radial = T::one() + k1 * r2 + k2 * r2 * r2;
        let xd = xn * radial + two * p1 * xn * yn + p2 * (r2 + two * xn * xn);
        let yd = yn * radial + p1 * (r2 + two * yn * yn) + two * p2 * xn * yn;
        (xd, yd)
    }

    /// Inverts [`distort`](Self::distort) by fixed-point iteration (at most 20 steps).
    pub fn undistort<T: Scalar>(&self, xd: T, yd: T) -> (T, T) {
        let (k1, k2) = (T::lit(self.radial[0]), T::lit(self.radial[1]));
        let (p1, p2) = (T::lit(self.tangential[0]), T::lit(self.tangential[1]));
        let two = T::lit(2.0);
        let (mut x, mut y) = (xd, yd);
        for _ in 0..20 {
            let r2 = x * x + y * y;
            let radial = T::one() + k1 * r2 + k2 * r2 * r2;
            let dx = two * p1 * x * y + p2 * (r2 + two * x * x);
            let dy = p1 * (r2 + two * y * y) + two * p2 * x * y;
            let nx = (xd - dx) / radial;
            let ny = (yd - dy) / radial;
            let step = (nx - x).abs().max((ny - y).abs());
            x = nx;
            y = ny;
            if step <= T::epsilon() {
                break;
            }
        }
        (x, y)
    }

    /// Distorted normalized coordinates to pixels through K.
    pub fn normalized_to_pixel<T: Scalar>(&self, xd: T, yd: T) -> PixelCoord<T> {
        let k = &self.intrinsic;
        let u = T::lit(k[0]) * xd + T::lit(k[1]) * yd + T::lit(k[2]);
        let v = T::lit(k[4]) * yd + T::lit(k[5]);
        PixelCoord { u, v }
    }

    /// Camera-frame point to pixels.
    pub fn project_camera_point<T: Scalar>(&self, pc: [T; 3]) -> Result<PixelCoord<T>> {
        if !(pc[2] > T::zero()) {
            return Err(Error::BehindCamera {
                depth: pc[2].as_f64(),
            });
        }
        let (xd, yd) = self.distort(pc[0] / pc[2], pc[1] / pc[2]);
        Ok(self.normalized_to_pixel(xd, yd))
    }

    pub fn bounds<T: Scalar>(&self) -> Box2D<T> {
        Box2D {
            u_min: T::zero(),
            v_min: T::zero(),
            u_max: T::from_usize_lossy(self.cols()),
            v_max: T::from_usize_lossy(self.rows()),
        }
    }
}

/// Axis swap radar (x right, y forward, z up) to camera (x right, y down, z forward).
pub fn radar_to_camera(offset: [f64; 3]) -> [f64; 12] {
    [
        1.0, 0.0, 0.0, offset[0], //
        0.0, 0.0, -1.0, offset[1], //
        0.0, 1.0, 0.0, offset[2],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelCoord<T> {
    pub u: T,
    pub v: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2D<T> {
    pub u_min: T,
    pub v_min: T,
    pub u_max: T,
    pub v_max: T,
}

impl<T: Scalar> Box2D<T> {
    pub fn new(u_min: T, v_min: T, u_max: T, v_max: T) -> Result<Self> {
        let b = Self {
            u_min,
            v_min,
            u_max,
            v_max,
        };
        if !b.is_valid() {
            return Err(Error::DegenerateBox(format!("{b:?}")));
        }
        Ok(b)
    }

    pub fn from_center(cu: T, cv: T, w: T, h: T) -> Self {
        let half = T::lit(0.5);
        Self {
            u_min: cu - half * w,
            v_min: cv - half * h,
            u_max: cu + half * w,
            v_max: cv + half * h,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.u_min, self.v_min, self.u_max, self.v_max]
            .iter()
            .all(|v| v.is_finite())
            && self.u_min <= self.u_max
            && self.v_min <= self.v_max
    }

    pub fn width(&self) -> T {
        self.u_max - self.u_min
    }

    pub fn height(&self) -> T {
        self.v_max - self.v_min
    }

    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    pub fn center(&self) -> PixelCoord<T> {
        let half = T::lit(0.5);
        PixelCoord {
            u: half * (self.u_min + self.u_max),
            v: half * (self.v_min + self.v_max),
        }
    }

    pub fn contains(&self, p: PixelCoord<T>) -> bool {
        p.u >= self.u_min && p.u <= self.u_max && p.v >= self.v_min && p.v <= self.v_max
    }

    pub fn translate(&self, du: T, dv: T) -> Self {
        Self {
            u_min: self.u_min + du,
            v_min: self.v_min + dv,
            u_max: self.u_max + du,
            v_max: self.v_max + dv,
        }
    }

    /// Overlap rectangle, if the boxes overlap with positive or zero area.
    pub fn intersection(&self, other: &Self) -> Option<Self> {
        let b = Self {
            u_min: self.u_min.max(other.u_min),
            v_min: self.v_min.max(other.v_min),
            u_max: self.u_max.min(other.u_max),
            v_max: self.v_max.min(other.v_max),
        };
        (b.u_min <= b.u_max && b.v_min <= b.v_max).then_some(b)
    }

    pub fn intersection_area(&self, other: &Self) -> T {
        self.intersection(other).map_or(T::zero(), |b| b.area())
    }

    /// Intersection over union; 0 when the union is empty.
    pub fn iou(&self, other: &Self) -> T {
        let inter = self.intersection_area(other);
        let union = self.area() + other.area() - inter;
        if union > T::zero() {
            inter / union
        } else {
            T::zero()
        }
    }

    pub fn clamp_to(&self, bounds: &Self) -> Self {
        let cu = |v: T| v.max(bounds.u_min).min(bounds.u_max);
        let cv = |v: T| v.max(bounds.v_min).min(bounds.v_max);
        Self {
            u_min: cu(self.u_min),
            v_min: cv(self.v_min),
            u_max: cu(self.u_max),
            v_max: cv(self.v_max),
        }
    }

    pub fn cast<U: Scalar>(&self) -> Box2D<U> {
        Box2D {
            u_min: U::lit(self.u_min.as_f64()),
            v_min: U::lit(self.v_min.as_f64()),
            u_max: U::lit(self.u_max.as_f64()),
            v_max: U::lit(self.v_max.as_f64()),
        }
    }
}

/// Projects a radar-frame point to pixels.
pub fn project_point<T: Scalar>(p: [T; 3], cam: &CameraModel) -> Result<PixelCoord<T>> {
    cam.project_camera_point(cam.to_camera(p))
}

/// Hull of the projected box, before clamping to the image.
///
/// The box is cut into `n_slices` horizontal cross-sections spanning its
/// height; the 4 corners of every section and the box centre are projected.
/// Corners within [`MIN_DEPTH`] of the camera plane are skipped.
pub fn project_box_unclamped<T: Scalar>(
    b: &ClusterBox<T>,
    cam: &CameraModel,
    n_slices: usize,
) -> Result<Box2D<T>> {
    if n_slices == 0 {
        return Err(Error::Config("n_slices must be >= 1".into()));
    }
    let half = T::lit(0.5);
    let min_depth = T::lit(MIN_DEPTH);
    let mut hull: Option<Box2D<T>> = None;
    let mut nearest = T::neg_infinity();
    let mut add = |p: [T; 3]| {
        let pc = cam.to_camera(p);
        nearest = nearest.max(pc[2]);
        if pc[2] <= min_depth {
            return;
        }
        if let Ok(px) = cam.project_camera_point(pc) {
            hull = Some(match hull {
                None => Box2D {
                    u_min: px.u,
                    v_min: px.v,
                    u_max: px.u,
                    v_max: px.v,
                },
                Some(h) => Box2D {
                    u_min: h.u_min.min(px.u),
                    v_min: h.v_min.min(px.v),
                    u_max: h.u_max.max(px.u),
                    v_max: h.v_max.max(px.v),
                },
            });
        }
    };
    add([b.x, b.y, b.z]);
    let denom = T::from_usize_lossy(n_slices.saturating_sub(1).max(1));
    for k in 0..n_slices {
        let z = if n_slices == 1 {
            b.z
        } else {
            b.z - half * b.h + b.h * T::from_usize_lossy(k) / denom
        };
        for sx in [-half, half] {
            for sy in [-half, half] {
                add([b.x + sx * b.w, b.y + sy * b.t, z]);
            }
        }
    }
    hull.ok_or(Error::BehindCamera {
        depth: nearest.as_f64(),
    })
}

/// Projects a 3D box and clamps the hull to the image.
pub fn project_box<T: Scalar>(
    b: &ClusterBox<T>,
    cam: &CameraModel,
    n_slices: usize,
) -> Result<Box2D<T>> {
    Ok(project_box_unclamped(b, cam, n_slices)?.clamp_to(&cam.bounds()))
}
