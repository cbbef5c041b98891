//! Pinhole projection of points and 3D boxes.
//!
//! Conventions: camera frame has x right, y down, z forward; a 3D box is
//! anchored at the center of its bottom face and yaws about the camera y
//! axis. The camera is assumed level (zero roll and pitch), so a vertical
//! object segment stays parallel to the image plane and the projected height
//! of a height-`H` segment at depth `Z` is exactly `f_v * H / Z`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kitti::CameraIntrinsics;

#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    #[error("point behind camera (z = {z})")]
    BehindCamera { z: f64 },
    #[error("box corner behind camera (z = {z})")]
    CornerBehindCamera { z: f64 },
    #[error("clipping requested but intrinsics carry no image dimensions")]
    MissingImageSize,
}

/// A point in the camera frame (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Object dimensions in meters: vertical height, lateral width, length
/// along the object's own x axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensions {
    pub height: f64,
    pub width: f64,
    pub length: f64,
}

impl Dimensions {
    pub fn new(height: f64, width: f64, length: f64) -> Self {
        Self {
            height,
            width,
            length,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.height > 0.0 && self.width > 0.0 && self.length > 0.0
    }
}

/// Axis-aligned 2D box in pixels, `right >= left` and `bottom >= top`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox2D {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
}

impl BBox2D {
    pub fn new(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Self {
            left,
            top,
            right,
            bottom,
        }
    }

    /// Pixel height of the box; this is `h_bbox` in the depth relations.
    pub fn height(&self) -> f64 {
        self.bottom - self.top
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn area(&self) -> f64 {
        (self.width().max(0.0)) * (self.height().max(0.0))
    }

    pub fn intersection_area(&self, other: &BBox2D) -> f64 {
        let w = self.right.min(other.right) - self.left.max(other.left);
        let h = self.bottom.min(other.bottom) - self.top.max(other.top);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    fn clip_to(&self, width: f64, height: f64) -> BBox2D {
        BBox2D {
            left: self.left.clamp(0.0, width),
            top: self.top.clamp(0.0, height),
            right: self.right.clamp(0.0, width),
            bottom: self.bottom.clamp(0.0, height),
        }
    }
}

/// A 3D box: `location` is the center of the bottom face in the camera
/// frame, `rotation_y` the yaw about the camera y axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3D {
    pub dims: Dimensions,
    pub location: Point3,
    pub rotation_y: f64,
}

impl Box3D {
    pub fn new(dims: Dimensions, location: Point3, rotation_y: f64) -> Self {
        Self {
            dims,
            location,
            rotation_y,
        }
    }
}

/// Project a camera-frame point through the full 3x4 matrix:
/// `u = (f_u x + c_u z + t_u) / w`, `v = (f_v y + c_v z + t_v) / w` with
/// `w = z + t_z`. Fails for points at or behind the camera plane.
pub fn project_point(intr: &CameraIntrinsics, p: Point3) -> Result<(f64, f64), CameraError> {
    let w = p.z + intr.tx[2];
    if p.z <= 0.0 || w <= 0.0 {
        return Err(CameraError::BehindCamera { z: p.z });
    }
    let u = (intr.f_u * p.x + intr.c_u * p.z + intr.tx[0]) / w;
    let v = (intr.f_v * p.y + intr.c_v * p.z + intr.tx[1]) / w;
    Ok((u, v))
}

/// Rotate an object-frame offset by `yaw` about the y axis.
#[inline]
pub(crate) fn rotate_y(yaw: f64, x: f64, z: f64) -> (f64, f64) {
    let (s, c) = yaw.sin_cos();
    (x * c + z * s, -x * s + z * c)
}

/// The eight corners of a box in the camera frame. The object frame puts
/// the bottom face at y' = 0 and the top at y' = -height; length spans x',
/// width spans z'.
pub fn box_corners(b: &Box3D) -> [Point3; 8] {
    let Dimensions {
        height,
        width,
        length,
    } = b.dims;
    let mut out = [Point3::new(0.0, 0.0, 0.0); 8];
    let mut i = 0;
    for &dx in &[length / 2.0, -length / 2.0] {
        for &dy in &[0.0, -height] {
            for &dz in &[width / 2.0, -width / 2.0] {
                let (rx, rz) = rotate_y(b.rotation_y, dx, dz);
                out[i] = Point3::new(
                    b.location.x + rx,
                    b.location.y + dy,
                    b.location.z + rz,
                );
                i += 1;
            }
        }
    }
    out
}

/// Axis-aligned image box of the eight projected corners (the amodal
/// `h_bbox` source). Rejects boxes with any corner at or behind the camera;
/// truncated objects are the evaluator's business, not the projector's.
pub fn project_box(
    intr: &CameraIntrinsics,
    b: &Box3D,
    clip_to_image: bool,
) -> Result<BBox2D, CameraError> {
    let corners = box_corners(b);
    let mut left = f64::INFINITY;
    let mut top = f64::INFINITY;
    let mut right = f64::NEG_INFINITY;
    let mut bottom = f64::NEG_INFINITY;
    for c in &corners {
        let (u, v) = project_point(intr, *c).map_err(|_| CameraError::CornerBehindCamera {
            z: c.z,
        })?;
        left = left.min(u);
        right = right.max(u);
        top = top.min(v);
        bottom = bottom.max(v);
    }
    let bbox = BBox2D::new(left, top, right, bottom);
    if clip_to_image {
        let (w, h) = intr.image_size.ok_or(CameraError::MissingImageSize)?;
        Ok(bbox.clip_to(w, h))
    } else {
        Ok(bbox)
    }
}

/// Projected central height `h_c = f_v * H / Z_c`: the pixel extent of a
/// vertical height-H segment through the box center, parallel to the image
/// plane.
pub fn projected_center_height(intr: &CameraIntrinsics, b: &Box3D) -> Result<f64, CameraError> {
    let z_c = b.location.z;
    if z_c <= 0.0 {
        return Err(CameraError::BehindCamera { z: z_c });
    }
    Ok(intr.f_v * b.dims.height / z_c)
}

/// Observation angle from global yaw and object position:
/// `alpha = rotation_y - atan2(x, z)`, wrapped to (-pi, pi].
pub fn alpha_from_rotation(rotation_y: f64, x: f64, z: f64) -> f64 {
    wrap_angle(rotation_y - x.atan2(z))
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = a % TAU;
    if r > PI {
        r -= TAU;
    } else if r <= -PI {
        r += TAU;
    }
    r
}
