//! Ambiguity masking of anti-aliased object boundaries.
//!
//! An anti-aliased boundary pixel blends the colours of the two objects it
//! separates, so its one-sided differences towards the two sides have
//! opposite signs. Such pixels are scored by the centred frequency, the
//! scores of the target and of every warped source frame are fused by a
//! pixel-wise maximum, and the fused score is turned into a loss weight.

use alloc::vec::Vec;

use crate::error::bail;
use crate::frequency::{directional_gradients, freq_map_centered, to_luminance, GradientField};
use crate::geometry::reconstruct;
use crate::image::{bilinear_sample_map, Border, Image, Sampler, ScalarMap};
use crate::math::exp;
use crate::photometric::{photometric_loss_map, LossConfig};
use crate::Result;

/// Fused-ambiguity threshold used by the hard mask.
pub const DEFAULT_DELTA: f64 = 0.3;
/// Rate of the exponential mask.
pub const DEFAULT_GAMMA: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaskMode {
    /// Keep (1) where the fused ambiguity is below `delta`, drop (0) elsewhere.
    #[default]
    Hard,
    /// Weight `exp(-gamma * a_max)`.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbiguityConfig {
    pub delta: f64,
    pub mode: MaskMode,
    pub gamma: f64,
}

impl Default for AmbiguityConfig {
    fn default() -> Self {
        AmbiguityConfig {
            delta: DEFAULT_DELTA,
            mode: MaskMode::Hard,
            gamma: DEFAULT_GAMMA,
        }
    }
}

impl AmbiguityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            bail!(Argument, "delta must be positive, got {}", self.delta);
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            bail!(Argument, "gamma must be positive, got {}", self.gamma);
        }
        Ok(())
    }
}

/// 1 where the horizontal or the vertical one-sided differences have
/// strictly opposite signs, 0 elsewhere.
pub fn opposite_sign_mask(g: &GradientField) -> ScalarMap {
    ScalarMap::from_fn(g.height(), g.width(), |y, x| {
        let horizontal = g.du_plus.get(y, x) * g.du_minus.get(y, x) < 0.0;
        let vertical = g.dv_plus.get(y, x) * g.dv_minus.get(y, x) < 0.0;
        if horizontal || vertical {
            1.0
        } else {
            0.0
        }
    })
}

/// Opposite-sign mask times centred frequency, on the luminance image.
pub fn ambiguity_map(img: &Image) -> Result<ScalarMap> {
    let g = directional_gradients(&to_luminance(img)?)?;
    opposite_sign_mask(&g).zip_map(&freq_map_centered(&g), |m, f| m * f)
}

/// Carries a source frame's ambiguity into the target frame.
///
/// Uses clamped bilinear sampling; samples that fall outside the source are
/// set to 0.
pub fn warp_ambiguity(a_source: &ScalarMap, sampler: &Sampler) -> Result<ScalarMap> {
    let (warped, valid) = bilinear_sample_map(a_source, sampler, Border::Clamp)?;
    warped.zip_map(&valid, |a, v| if v > 0.0 { a } else { 0.0 })
}

/// Pixel-wise maximum over all maps.
pub fn fuse_ambiguity(maps: &[ScalarMap]) -> Result<ScalarMap> {
    let Some((first, rest)) = maps.split_first() else {
        bail!(Argument, "no ambiguity maps to fuse");
    };
    rest.iter()
        .try_fold(first.clone(), |acc, m| acc.zip_map(m, f64::max))
}

/// Loss weight from the fused ambiguity: 1 keeps a pixel, 0 excludes it.
pub fn ambiguity_weight_mask(a_max: &ScalarMap, cfg: &AmbiguityConfig) -> Result<ScalarMap> {
    cfg.validate()?;
    if a_max.data().iter().any(|&a| !(a >= 0.0)) {
        bail!(Domain, "ambiguity values must be non-negative");
    }
    Ok(match cfg.mode {
        MaskMode::Hard => a_max.map(|a| if a < cfg.delta { 1.0 } else { 0.0 }),
        MaskMode::Exponential => a_max.map(|a| exp(-cfg.gamma * a)),
    })
}

/// Fused ambiguity of a target frame and its warped source frames.
///
/// `sources` pairs each source image with the sampler that maps target
/// pixels into it.
pub fn fused_ambiguity(target: &Image, sources: &[(&Image, &Sampler)]) -> Result<ScalarMap> {
    let mut maps = Vec::with_capacity(sources.len() + 1);
    maps.push(ambiguity_map(target)?);
    for (source, sampler) in sources {
        maps.push(warp_ambiguity(&ambiguity_map(source)?, sampler)?);
    }
    fuse_ambiguity(&maps)
}

/// Pixel counts and loss sums split into the excluded (ambiguous) and kept
/// sets, accumulated over a batch of frames.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AmbiguityTally {
    pub ambiguous_count: u64,
    pub ambiguous_loss: f64,
    pub other_count: u64,
    pub other_loss: f64,
}

/// One row of the statistics table, percentages in `[0, 100]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TallyRow {
    pub number_pct: f64,
    pub mean_loss: f64,
    pub loss_pct: f64,
}

impl AmbiguityTally {
    /// Adds one frame. A pixel is excluded where the hard mask is 0; pixels
    /// with zero `validity` are skipped.
    pub fn add(&mut self, loss: &ScalarMap, keep: &ScalarMap, validity: &ScalarMap) -> Result<()> {
        if !loss.same_shape(keep) || !loss.same_shape(validity) {
            bail!(Dimension, "loss, mask and validity maps differ in size");
        }
        for ((&l, &k), &v) in loss.data().iter().zip(keep.data()).zip(validity.data()) {
            if v <= 0.0 {
                continue;
            }
            if k == 0.0 {
                self.ambiguous_count += 1;
                self.ambiguous_loss += l;
            } else {
                self.other_count += 1;
                self.other_loss += l;
            }
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &AmbiguityTally) {
        self.ambiguous_count += other.ambiguous_count;
        self.ambiguous_loss += other.ambiguous_loss;
        self.other_count += other.other_count;
        self.other_loss += other.other_loss;
    }

    fn row(count: u64, loss: f64, total_count: u64, total_loss: f64) -> TallyRow {
        let pct = |part: f64, whole: f64| if whole > 0.0 { 100.0 * part / whole } else { 0.0 };
        TallyRow {
            number_pct: pct(count as f64, total_count as f64),
            mean_loss: if count > 0 { loss / count as f64 } else { 0.0 },
            loss_pct: pct(loss, total_loss),
        }
    }

    /// `(ambiguous, other)` rows.
    pub fn rows(&self) -> (TallyRow, TallyRow) {
        let n = self.ambiguous_count + self.other_count;
        let l = self.ambiguous_loss + self.other_loss;
        (
            Self::row(self.ambiguous_count, self.ambiguous_loss, n, l),
            Self::row(self.other_count, self.other_loss, n, l),
        )
    }
}

/// Reconstructs `target` from `source` through `sampler` and tallies the
/// loss of the hard-masked ambiguous pixels against the rest.
pub fn tally_frame(
    target: &Image,
    source: &Image,
    sampler: &Sampler,
    loss_cfg: &LossConfig,
    cfg: &AmbiguityConfig,
) -> Result<AmbiguityTally> {
    let (recon, validity) = reconstruct(source, sampler)?;
    let loss = photometric_loss_map(target, &recon, loss_cfg)?;
    let a_max = fused_ambiguity(target, &[(source, sampler)])?;
    let hard = AmbiguityConfig {
        mode: MaskMode::Hard,
        ..*cfg
    };
    let keep = ambiguity_weight_mask(&a_max, &hard)?;
    let mut tally = AmbiguityTally::default();
    tally.add(&loss, &keep, &validity)?;
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rows3(row: &[f32]) -> Image {
        Image::from_fn(3, row.len(), 1, |_, x, _| row[x]).unwrap()
    }

    fn mu(img: &Image) -> ScalarMap {
        opposite_sign_mask(&directional_gradients(img).unwrap())
    }

    #[test]
    fn ramp_is_ambiguous_peak_is_not() {
        assert_eq!(mu(&rows3(&[0.0, 0.5, 1.0])).get(1, 1), 1.0);
        assert_eq!(mu(&rows3(&[0.0, 1.0, 0.0])).get(1, 1), 0.0);
    }

    #[test]
    fn hard_step_has_no_ambiguity() {
        let m = mu(&rows3(&[0.0, 0.0, 1.0, 1.0]));
        assert_eq!(m.count_nonzero(), 0);
    }

    #[test]
    fn ambiguity_map_examples() {
        assert_eq!(ambiguity_map(&Image::filled(4, 4, 3, 0.2).unwrap()).unwrap().max(), 0.0);
        assert_eq!(ambiguity_map(&rows3(&[0.0, 0.5, 1.0])).unwrap().get(1, 1), 0.5);
        let checker = Image::from_fn(6, 6, 1, |y, x, _| ((x + y) % 2) as f32).unwrap();
        assert_eq!(ambiguity_map(&checker).unwrap().max(), 0.0);
    }

    #[test]
    fn warp_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = ScalarMap::from_fn(5, 6, |_, _| rng.gen::<f64>());
        assert_eq!(warp_ambiguity(&a, &Sampler::identity(5, 6)).unwrap(), a);

        let zero = ScalarMap::zeros(5, 6);
        let wild = Sampler::from_fn(5, 6, |y, x| (x as f64 * 1.7 - 2.0, y as f64 + 0.3));
        assert_eq!(warp_ambiguity(&zero, &wild).unwrap().max(), 0.0);

        let mut hot = ScalarMap::zeros(5, 6);
        hot.set(2, 4, 0.8);
        let shift = Sampler::from_fn(5, 6, |y, x| (x as f64 + 3.0, y as f64));
        let out = warp_ambiguity(&hot, &shift).unwrap();
        assert_eq!(out.get(2, 1), 0.8);
        assert_eq!(out.count_nonzero(), 1);
        // columns 3.. sample outside the source
        assert_eq!(out.get(2, 5), 0.0);
    }

    #[test]
    fn fuse_examples() {
        let a = ScalarMap::new(1, 2, vec![0.2, 0.7]).unwrap();
        assert_eq!(fuse_ambiguity(core::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(fuse_ambiguity(&[a.clone(), ScalarMap::zeros(1, 2)]).unwrap(), a);
        let maps = [0.2, 0.5, 0.1].map(|v| ScalarMap::filled(1, 1, v));
        assert_eq!(fuse_ambiguity(&maps).unwrap().get(0, 0), 0.5);
        assert!(matches!(fuse_ambiguity(&[]), Err(crate::Error::Argument(_))));
        assert!(fuse_ambiguity(&[a, ScalarMap::zeros(2, 2)]).is_err());
    }

    #[test]
    fn weight_mask_examples() {
        let a = ScalarMap::new(1, 4, vec![0.5, 0.1, 0.3, 0.0]).unwrap();
        let hard = ambiguity_weight_mask(&a, &AmbiguityConfig::default()).unwrap();
        // a_max == delta is excluded by the strict comparison
        assert_eq!(hard.data(), &[0.0, 1.0, 0.0, 1.0]);
        let cfg = AmbiguityConfig {
            mode: MaskMode::Exponential,
            ..Default::default()
        };
        let soft = ambiguity_weight_mask(&a, &cfg).unwrap();
        assert_eq!(soft.get(0, 3), 1.0);
        assert!((soft.get(0, 0) - 0.223_130_160_148_429_83).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let a = ScalarMap::zeros(1, 1);
        for cfg in [
            AmbiguityConfig { delta: 0.0, ..Default::default() },
            AmbiguityConfig { gamma: -1.0, ..Default::default() },
        ] {
            assert!(ambiguity_weight_mask(&a, &cfg).is_err());
        }
        let negative = ScalarMap::filled(1, 1, -0.1);
        assert!(matches!(
            ambiguity_weight_mask(&negative, &AmbiguityConfig::default()),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn tally_percentages() {
        let loss = ScalarMap::new(1, 4, vec![0.4, 0.1, 0.1, 0.2]).unwrap();
        let keep = ScalarMap::new(1, 4, vec![0.0, 1.0, 1.0, 1.0]).unwrap();
        let valid = ScalarMap::new(1, 4, vec![1.0, 1.0, 1.0, 0.0]).unwrap();
        let mut tally = AmbiguityTally::default();
        tally.add(&loss, &keep, &valid).unwrap();
        let (amb, other) = tally.rows();
        assert!((amb.number_pct - 100.0 / 3.0).abs() < 1e-12);
        assert!((amb.mean_loss - 0.4).abs() < 1e-12);
        assert!((other.mean_loss - 0.1).abs() < 1e-12);
        assert!((amb.loss_pct + other.loss_pct - 100.0).abs() < 1e-12);
        assert!((amb.loss_pct - 400.0 / 6.0).abs() < 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn fuse_is_an_or(seed in 0u64..2000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = || ScalarMap::from_fn(3, 4, |_, _| rng.gen::<f64>());
            let (a, b, c) = (m(), m(), m());
            let ab = fuse_ambiguity(&[a.clone(), b.clone()]).unwrap();
            proptest::prop_assert_eq!(&ab, &fuse_ambiguity(&[b.clone(), a.clone()]).unwrap());
            proptest::prop_assert_eq!(
                fuse_ambiguity(&[ab.clone(), c.clone()]).unwrap(),
                fuse_ambiguity(&[a.clone(), fuse_ambiguity(&[b.clone(), c.clone()]).unwrap()]).unwrap()
            );
            proptest::prop_assert_eq!(fuse_ambiguity(&[a.clone(), a.clone()]).unwrap(), a.clone());
            for i in 0..ab.len() {
                proptest::prop_assert!(ab.data()[i] >= a.data()[i]);
            }
        }

        #[test]
        fn masks_are_order_preserving(a1 in 0.0f64..2.0, a2 in 0.0f64..2.0) {
            let a = ScalarMap::new(1, 2, vec![a1, a2]).unwrap();
            for mode in [MaskMode::Hard, MaskMode::Exponential] {
                let cfg = AmbiguityConfig { mode, ..Default::default() };
                let w = ambiguity_weight_mask(&a, &cfg).unwrap();
                if a1 < a2 {
                    proptest::prop_assert!(w.get(0, 0) >= w.get(0, 1));
                }
                proptest::prop_assert!(w.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
        }
    }
}
