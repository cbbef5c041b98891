//! Geometry toolkit for monocular 3D object detection.
//!
//! The crate decomposes raw object depth into a geometric depth obtained from
//! the perspective projection ratio `f * H / h_bbox` and a residual depth
//! error, together with the two equivalent height-error corrections. Around
//! that core it provides:
//!
//! - [`kitti`] — bit-exact parsing and serialization of KITTI calibration,
//!   label, and prediction files, plus split loading.
//! - [`camera`] — pinhole projection of points and 3D boxes.
//! - [`geodepth`] — geometric depth, the three error modes, and depth fusion.
//! - [`bias`] — closed-form camera-height bias bounds for a trapezoidal
//!   vehicle profile (wheel-depth bias and its attenuation factors).
//! - [`sim`] — a brute-force synthetic scene projector used as the
//!   independent oracle for every closed-form claim.
//! - [`stats`] — distribution summaries (quartiles, whiskers, skewness,
//!   histograms) and the depth-attribute difficulty report.
//! - [`losses`] — region Dice loss, Laplacian uncertainty depth loss with
//!   analytic gradients, and the weighted overall loss.
//! - [`eval`] — rotated BEV/3D IoU, KITTI difficulty assignment, and average
//!   precision at 40 recall positions.
//!
//! All geometry works in the camera frame: x right, y down, z forward,
//! meters; image coordinates in pixels. Every function here is pure and safe
//! for unrestricted parallel use.

pub mod bias;
pub mod camera;
pub mod eval;
pub mod geodepth;
pub mod kitti;
pub mod losses;
pub mod sim;
pub mod stats;

pub use camera::{BBox2D, Box3D, Dimensions, Point3};
pub use geodepth::GeometryRecord;
pub use kitti::{CameraIntrinsics, Dataset, ObjectLabel};
