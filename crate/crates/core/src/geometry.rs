//! Pinhole reprojection and rectified-stereo samplers, and view synthesis.

use crate::error::bail;
use crate::image::{bilinear_sample, Border, Image, Sampler, ScalarMap};
use crate::Result;

/// Coordinate given to pixels that land behind the camera; always invalid.
pub const BEHIND_CAMERA: f64 = -1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Intrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0) || !fx.is_finite() || !fy.is_finite() {
            bail!(Domain, "focal lengths must be positive, got fx={fx} fy={fy}");
        }
        if !cx.is_finite() || !cy.is_finite() {
            bail!(Domain, "principal point must be finite");
        }
        Ok(Intrinsics { fx, fy, cx, cy })
    }

    /// Camera-frame point at pixel `(u, v)` and depth `z`.
    #[inline]
    pub fn unproject(&self, u: f64, v: f64, z: f64) -> [f64; 3] {
        [(u - self.cx) / self.fx * z, (v - self.cy) / self.fy * z, z]
    }

    /// Pixel of a camera-frame point with positive depth.
    #[inline]
    pub fn project(&self, p: [f64; 3]) -> (f64, f64) {
        (self.fx * p[0] / p[2] + self.cx, self.fy * p[1] / p[2] + self.cy)
    }
}

/// A rigid transform `X' = R X + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: [[f64; 3]; 3],
    translation: [f64; 3],
}

const ORTHO_TOL: f64 = 1e-9;

impl Pose {
    /// Checks that `rotation` is orthonormal with determinant +1.
    pub fn new(rotation: [[f64; 3]; 3], translation: [f64; 3]) -> Result<Self> {
        let r = &rotation;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > ORTHO_TOL {
                    bail!(Domain, "rotation is not orthonormal (R^T R [{i}][{j}] = {dot})");
                }
            }
        }
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        if (det - 1.0).abs() > ORTHO_TOL {
            bail!(Domain, "rotation determinant is {det}, expected +1");
        }
        if translation.iter().any(|t| !t.is_finite()) {
            bail!(Domain, "translation must be finite");
        }
        Ok(Pose { rotation, translation })
    }

    pub fn identity() -> Self {
        Pose {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [0.0; 3],
        }
    }

    pub fn translation_only(t: [f64; 3]) -> Self {
        Pose {
            translation: t,
            ..Pose::identity()
        }
    }

    /// Rotation by `angle` radians about the camera y axis.
    pub fn yaw(angle: f64, t: [f64; 3]) -> Self {
        let (s, c) = (libm::sin(angle), libm::cos(angle));
        Pose {
            rotation: [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]],
            translation: t,
        }
    }

    pub fn rotation(&self) -> &[[f64; 3]; 3] {
        &self.rotation
    }

    pub fn translation(&self) -> &[f64; 3] {
        &self.translation
    }

    /// Exactly the identity rotation with zero translation.
    pub fn is_identity(&self) -> bool {
        *self == Pose::identity()
    }

    #[inline]
    pub fn apply(&self, p: [f64; 3]) -> [f64; 3] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2] + t[0],
            r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2] + t[1],
            r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2] + t[2],
        ]
    }

    /// `(R^T, -R^T t)`.
    pub fn inverse(&self) -> Pose {
        let r = &self.rotation;
        let mut rt = [[0.0; 3]; 3];
        for (i, row) in rt.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = r[j][i];
            }
        }
        let t = &self.translation;
        let ti = [
            -(rt[0][0] * t[0] + rt[0][1] * t[1] + rt[0][2] * t[2]),
            -(rt[1][0] * t[0] + rt[1][1] * t[1] + rt[1][2] * t[2]),
            -(rt[2][0] * t[0] + rt[2][1] * t[1] + rt[2][2] * t[2]),
        ];
        Pose {
            rotation: rt,
            translation: ti,
        }
    }
}

/// Per-pixel depth with a mask of holes.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    depth: ScalarMap,
    valid: ScalarMap,
}

impl DepthMap {
    /// Every pixel valid; depth must be positive everywhere.
    pub fn new(depth: ScalarMap) -> Result<Self> {
        let valid = ScalarMap::filled(depth.height(), depth.width(), 1.0);
        DepthMap::with_validity(depth, valid)
    }

    /// Pixels with `valid == 0` are holes and their depth is ignored.
    pub fn with_validity(depth: ScalarMap, valid: ScalarMap) -> Result<Self> {
        if !depth.same_shape(&valid) {
            bail!(Dimension, "depth and validity maps differ in size");
        }
        for (i, (&d, &m)) in depth.data().iter().zip(valid.data()).enumerate() {
            if m != 0.0 && !(d > 0.0 && d.is_finite()) {
                let w = depth.width();
                bail!(Domain, "non-positive depth {d} at valid pixel ({}, {})", i / w, i % w);
            }
        }
        Ok(DepthMap { depth, valid })
    }

    pub fn constant(height: usize, width: usize, depth: f64) -> Result<Self> {
        DepthMap::new(ScalarMap::filled(height, width, depth))
    }

    pub fn depth(&self) -> &ScalarMap {
        &self.depth
    }

    pub fn validity(&self) -> &ScalarMap {
        &self.valid
    }
}

/// For every target pixel, the source-image coordinate it maps to under the
/// target depth and the target-to-source pose.
///
/// Holes and points that end up at or behind the source camera get
/// [`BEHIND_CAMERA`] coordinates. The identity pose yields the pixel grid
/// itself, free of rounding.
pub fn reprojection_sampler(depth: &DepthMap, pose: &Pose, k: &Intrinsics) -> Sampler {
    let d = &depth.depth;
    let identity = pose.is_identity();
    Sampler::from_fn(d.height(), d.width(), |y, x| {
        if depth.valid.get(y, x) == 0.0 {
            return (BEHIND_CAMERA, BEHIND_CAMERA);
        }
        if identity {
            return (x as f64, y as f64);
        }
        let p = pose.apply(k.unproject(x as f64, y as f64, d.get(y, x)));
        if p[2] <= 0.0 {
            (BEHIND_CAMERA, BEHIND_CAMERA)
        } else {
            k.project(p)
        }
    })
}

/// `(u - sign * disparity, v)` for a rectified pair.
pub fn disparity_sampler(disparity: &ScalarMap, sign: f64) -> Result<Sampler> {
    if let Some(i) = disparity.data().iter().position(|&d| !(d >= 0.0) || !d.is_finite()) {
        let w = disparity.width();
        bail!(
            Domain,
            "disparity must be non-negative, got {} at ({}, {})",
            disparity.data()[i],
            i / w,
            i % w
        );
    }
    Ok(Sampler::from_fn(disparity.height(), disparity.width(), |y, x| {
        (x as f64 - sign * disparity.get(y, x), y as f64)
    }))
}

/// [`disparity_sampler`] for a constant disparity.
pub fn constant_disparity_sampler(height: usize, width: usize, disparity: f64, sign: f64) -> Result<Sampler> {
    disparity_sampler(&ScalarMap::filled(height, width, disparity), sign)
}

/// Translation of the second camera of a rectified pair with baseline `b`.
pub fn rectified_pose(baseline: f64) -> Pose {
    Pose::translation_only([-baseline, 0.0, 0.0])
}

/// Synthesises the target view from `source` (clamped borders).
pub fn reconstruct(source: &Image, sampler: &Sampler) -> Result<(Image, ScalarMap)> {
    bilinear_sample(source, sampler, Border::Clamp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photometric::{photometric_loss_map, LossConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k() -> Intrinsics {
        Intrinsics::new(120.0, 110.0, 15.5, 11.0).unwrap()
    }

    fn random_depth(seed: u64, h: usize, w: usize) -> DepthMap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DepthMap::new(ScalarMap::from_fn(h, w, |_, _| rng.gen_range(1.0..20.0))).unwrap()
    }

    #[test]
    fn identity_pose_is_identity_sampler() {
        let s = reprojection_sampler(&random_depth(1, 20, 30), &Pose::identity(), &k());
        for y in 0..20 {
            for x in 0..30 {
                let (u, v) = s.get(y, x);
                assert_eq!((u, v), (x as f64, y as f64));
            }
        }
    }

    #[test]
    fn lateral_translation_shift() {
        let (b, d) = (0.5, 4.0);
        let s = reprojection_sampler(&DepthMap::constant(10, 12, d).unwrap(), &Pose::translation_only([b, 0.0, 0.0]), &k());
        let s2 = reprojection_sampler(&DepthMap::constant(10, 12, 2.0 * d).unwrap(), &Pose::translation_only([b, 0.0, 0.0]), &k());
        let shift = k().fx * b / d;
        for y in 0..10 {
            for x in 0..12 {
                assert!((s.get(y, x).0 - x as f64 - shift).abs() < 1e-9);
                assert!((s2.get(y, x).0 - x as f64 - shift / 2.0).abs() < 1e-9);
                assert!((s.get(y, x).1 - y as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rectified_pose_matches_disparity_sampler() {
        let depth = random_depth(4, 16, 16);
        let b = 0.3;
        let rep = reprojection_sampler(&depth, &rectified_pose(b), &k());
        let disp = depth.depth().map(|z| k().fx * b / z);
        let ds = disparity_sampler(&disp, 1.0).unwrap();
        for (p, q) in rep.coords().iter().zip(ds.coords()) {
            assert!((p.0 - q.0).abs() < 1e-6 && (p.1 - q.1).abs() < 1e-6);
        }
    }

    #[test]
    fn behind_camera_and_holes_are_invalid() {
        let depth = DepthMap::with_validity(
            ScalarMap::filled(3, 3, 1.0),
            ScalarMap::from_fn(3, 3, |y, x| if y == 0 && x == 0 { 0.0 } else { 1.0 }),
        )
        .unwrap();
        let s = reprojection_sampler(&depth, &Pose::translation_only([0.0, 0.0, -2.0]), &k());
        assert!(s.coords().iter().all(|&c| c == (BEHIND_CAMERA, BEHIND_CAMERA)));
        let s = reprojection_sampler(&depth, &Pose::identity(), &k());
        assert_eq!(s.get(0, 0), (BEHIND_CAMERA, BEHIND_CAMERA));
        let img = Image::filled(3, 3, 1, 0.5).unwrap();
        let (_, valid) = reconstruct(&img, &s).unwrap();
        assert_eq!(valid.get(0, 0), 0.0);
        assert_eq!(valid.get(1, 1), 1.0);
    }

    #[test]
    fn invalid_inputs() {
        assert!(DepthMap::constant(2, 2, 0.0).is_err());
        assert!(Intrinsics::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(Pose::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]], [0.0; 3]).is_err());
        assert!(Pose::new([[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], [0.0; 3]).is_err());
        let neg = ScalarMap::from_fn(2, 2, |_, x| x as f64 - 0.5);
        assert!(matches!(disparity_sampler(&neg, 1.0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn disparity_sampler_examples() {
        let s = constant_disparity_sampler(4, 6, 0.0, 1.0).unwrap();
        assert_eq!(s, Sampler::identity(4, 6));
        let s = constant_disparity_sampler(4, 6, 3.0, 1.0).unwrap();
        assert!(s.coords().iter().enumerate().all(|(i, &(u, v))| u == (i % 6) as f64 - 3.0 && v == (i / 6) as f64));
    }

    #[test]
    fn forward_and_backward_disparity_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let img = Image::from_fn(6, 16, 3, |_, _, _| rng.gen::<f32>()).unwrap();
        let (fwd, _) = reconstruct(&img, &constant_disparity_sampler(6, 16, 3.0, 1.0).unwrap()).unwrap();
        let (back, _) = reconstruct(&fwd, &constant_disparity_sampler(6, 16, 3.0, -1.0).unwrap()).unwrap();
        for y in 0..6 {
            for x in 3..13 {
                assert_eq!(back.pixel(y, x), img.pixel(y, x));
            }
        }
    }

    #[test]
    fn wrong_disparity_costs_loss() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let source = Image::from_fn(12, 32, 3, |_, _, _| rng.gen::<f32>()).unwrap();
        let target = Image::from_fn(12, 32, 3, |y, x, c| source.get(y, x.saturating_sub(4), c)).unwrap();
        let cfg = LossConfig::default();
        let at = |d: f64| {
            let (rec, _) = reconstruct(&source, &constant_disparity_sampler(12, 32, d, 1.0).unwrap()).unwrap();
            let loss = photometric_loss_map(&target, &rec, &cfg).unwrap();
            (6..26).map(|x| loss.get(6, x)).sum::<f64>()
        };
        assert!(at(4.0) < 1e-9);
        assert!(at(6.0) > 0.1);
    }

    proptest::proptest! {
        #[test]
        fn pose_then_inverse_is_identity(
            seed in 0u64..500,
            angle in -0.3f64..0.3,
            tx in -0.5f64..0.5,
            tz in -0.5f64..0.5,
        ) {
            let pose = Pose::yaw(angle, [tx, 0.1, tz]);
            Pose::new(*pose.rotation(), *pose.translation()).unwrap();
            let inv = pose.inverse();
            let depth = random_depth(seed, 8, 8);
            let k = k();
            for y in 0..8 {
                for x in 0..8 {
                    let p = pose.apply(k.unproject(x as f64, y as f64, depth.depth().get(y, x)));
                    let (u, v) = k.project(p);
                    let q = inv.apply(k.unproject(u, v, p[2]));
                    let (u2, v2) = k.project(q);
                    proptest::prop_assert!((u2 - x as f64).abs() < 1e-6 && (v2 - y as f64).abs() < 1e-6);
                }
            }
        }
    }
}
