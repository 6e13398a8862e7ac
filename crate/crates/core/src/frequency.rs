//! Spatial frequency from one-sided pixel differences.
//!
//! For a pixel at column `i`, row `j` the four signed differences are
//!
//! ```text
//! du+ = I(i, j) - I(i+1, j)    du- = I(i, j) - I(i-1, j)
//! dv+ = I(i, j) - I(i, j+1)    dv- = I(i, j) - I(i, j-1)
//! ```
//!
//! A difference whose neighbour falls outside the image is 0. Two frequency
//! maps are built from them: the one-sided norm `|(du±, dv±)|` and the
//! centred norm `|((du+ - du-)/2, (dv+ - dv-)/2)|`.

use alloc::vec::Vec;

use crate::error::bail;
use crate::image::{Image, ScalarMap};
use crate::math::hypot;
use crate::Result;

/// Signed one-sided differences of a single-channel image.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub du_plus: ScalarMap,
    pub du_minus: ScalarMap,
    pub dv_plus: ScalarMap,
    pub dv_minus: ScalarMap,
}

impl GradientField {
    pub fn height(&self) -> usize {
        self.du_plus.height()
    }

    pub fn width(&self) -> usize {
        self.du_plus.width()
    }
}

/// Which one-sided neighbour pair to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

/// How a colour image is reduced to one frequency value per pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelReduction {
    /// Differences of the channel-mean image.
    Mean,
    /// Per-channel frequency, maximum over channels.
    #[default]
    Max,
}

/// Unweighted channel mean; grey images pass through unchanged.
pub fn to_luminance(img: &Image) -> Result<Image> {
    match img.channels() {
        1 => Ok(img.clone()),
        3 => {
            let data: Vec<f32> = img
                .data()
                .chunks_exact(3)
                .map(|p| ((f64::from(p[0]) + f64::from(p[1]) + f64::from(p[2])) / 3.0) as f32)
                .collect();
            Image::new(img.height(), img.width(), 1, data)
        }
        c => bail!(Dimension, "luminance needs 1 or 3 channels, got {c}"),
    }
}

/// The four signed difference maps with zeroed borders.
pub fn directional_gradients(img: &Image) -> Result<GradientField> {
    if img.channels() != 1 {
        bail!(
            Dimension,
            "gradients need a single-channel image, got {} channels",
            img.channels()
        );
    }
    gradients_of(&img.channel(0))
}

/// [`directional_gradients`] on a scalar map.
pub fn gradients_of(plane: &ScalarMap) -> Result<GradientField> {
    let (h, w) = (plane.height(), plane.width());
    if h < 3 || w < 3 {
        bail!(Dimension, "gradients need at least 3x3 pixels, got {h}x{w}");
    }
    let at = |y: usize, x: usize| plane.get(y, x);
    Ok(GradientField {
        du_plus: ScalarMap::from_fn(h, w, |y, x| if x + 1 < w { at(y, x) - at(y, x + 1) } else { 0.0 }),
        du_minus: ScalarMap::from_fn(h, w, |y, x| if x > 0 { at(y, x) - at(y, x - 1) } else { 0.0 }),
        dv_plus: ScalarMap::from_fn(h, w, |y, x| if y + 1 < h { at(y, x) - at(y + 1, x) } else { 0.0 }),
        dv_minus: ScalarMap::from_fn(h, w, |y, x| if y > 0 { at(y, x) - at(y - 1, x) } else { 0.0 }),
    })
}

/// Per-pixel norm of `(du±, dv±)`.
pub fn freq_map_one_sided(g: &GradientField, direction: Direction) -> ScalarMap {
    let (du, dv) = match direction {
        Direction::Plus => (&g.du_plus, &g.dv_plus),
        Direction::Minus => (&g.du_minus, &g.dv_minus),
    };
    du.zip_map(dv, hypot).expect("gradient maps share a shape")
}

/// Per-pixel norm of the centred half-differences.
pub fn freq_map_centered(g: &GradientField) -> ScalarMap {
    let (h, w) = (g.height(), g.width());
    ScalarMap::from_fn(h, w, |y, x| {
        let du = (g.du_plus.get(y, x) - g.du_minus.get(y, x)) / 2.0;
        let dv = (g.dv_plus.get(y, x) - g.dv_minus.get(y, x)) / 2.0;
        hypot(du, dv)
    })
}

/// One-sided frequency of an image of any supported channel count.
pub fn one_sided_frequency(img: &Image, direction: Direction, reduction: ChannelReduction) -> Result<ScalarMap> {
    match reduction {
        ChannelReduction::Mean => {
            let g = directional_gradients(&to_luminance(img)?)?;
            Ok(freq_map_one_sided(&g, direction))
        }
        ChannelReduction::Max => {
            let mut out: Option<ScalarMap> = None;
            for c in 0..img.channels() {
                let f = freq_map_one_sided(&gradients_of(&img.channel(c))?, direction);
                out = Some(match out {
                    None => f,
                    Some(acc) => acc.zip_map(&f, f64::max)?,
                });
            }
            Ok(out.expect("images have at least one channel"))
        }
    }
}

/// Centred frequency of the luminance image.
pub fn centered_frequency(img: &Image) -> Result<ScalarMap> {
    Ok(freq_map_centered(&directional_gradients(&to_luminance(img)?)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Three identical rows of `row`, so vertical differences vanish.
    fn rows3(row: &[f32]) -> Image {
        Image::from_fn(3, row.len(), 1, |_, x, _| row[x]).unwrap()
    }

    #[test]
    fn luminance_is_channel_mean() {
        let img = Image::new(1, 1, 3, vec![0.2, 0.4, 0.6]).unwrap();
        assert!((to_luminance(&img).unwrap().get(0, 0, 0) - 0.4).abs() < 1e-7);
        let grey = Image::filled(2, 2, 1, 0.3).unwrap();
        assert_eq!(to_luminance(&grey).unwrap(), grey);
        let rgb = Image::filled(2, 2, 3, 0.7).unwrap();
        assert!(to_luminance(&rgb).unwrap().data().iter().all(|&v| (v - 0.7).abs() < 1e-7));
    }

    #[test]
    fn multichannel_gradients_are_rejected() {
        let rgb = Image::filled(4, 4, 3, 0.5).unwrap();
        assert!(matches!(directional_gradients(&rgb), Err(crate::Error::Dimension(_))));
        let small = Image::filled(2, 5, 1, 0.5).unwrap();
        assert!(directional_gradients(&small).is_err());
    }

    #[test]
    fn constant_image_has_no_frequency() {
        let g = directional_gradients(&Image::filled(5, 6, 1, 0.4).unwrap()).unwrap();
        for m in [&g.du_plus, &g.du_minus, &g.dv_plus, &g.dv_minus] {
            assert!(m.data().iter().all(|&v| v == 0.0));
        }
        assert_eq!(freq_map_one_sided(&g, Direction::Plus).max(), 0.0);
        assert_eq!(freq_map_centered(&g).max(), 0.0);
    }

    #[test]
    fn ramp_differences() {
        let g = directional_gradients(&rows3(&[0.0, 0.5, 1.0])).unwrap();
        assert_eq!(g.du_plus.get(1, 1), -0.5);
        assert_eq!(g.du_minus.get(1, 1), 0.5);
        assert_eq!(freq_map_centered(&g).get(1, 1), 0.5);
    }

    #[test]
    fn peak_differences() {
        let g = directional_gradients(&rows3(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(g.du_plus.get(1, 1), 1.0);
        assert_eq!(g.du_minus.get(1, 1), 1.0);
        assert_eq!(freq_map_centered(&g).get(1, 1), 0.0);
    }

    #[test]
    fn borders_are_zero() {
        let g = directional_gradients(&rows3(&[0.0, 0.5, 1.0])).unwrap();
        assert_eq!(g.du_plus.get(1, 2), 0.0);
        assert_eq!(g.du_minus.get(1, 0), 0.0);
        assert_eq!(g.dv_plus.get(2, 1), 0.0);
        assert_eq!(g.dv_minus.get(0, 1), 0.0);
    }

    #[test]
    fn three_four_five_norm() {
        // du+ = 0.3 and dv+ = 0.4 at the centre pixel
        let img = Image::new(3, 3, 1, vec![0.0, 0.0, 0.0, 0.0, 0.5, 0.2, 0.0, 0.1, 0.0]).unwrap();
        let g = directional_gradients(&img).unwrap();
        let f = freq_map_one_sided(&g, Direction::Plus);
        assert!((f.get(1, 1) - 0.5).abs() < 1e-7);
    }

    #[test]
    fn step_edge_one_sided() {
        let g = directional_gradients(&rows3(&[0.0, 0.0, 1.0, 1.0])).unwrap();
        let f = freq_map_one_sided(&g, Direction::Plus);
        assert_eq!(f.get(1, 1), 1.0);
        assert_eq!(f.get(1, 2), 0.0);
    }

    #[test]
    fn saturated_primaries_differ_only_under_max_reduction() {
        let colours = [[1.0f32, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let img = Image::from_fn(5, 9, 3, |_, x, c| colours[x % 3][c]).unwrap();
        let mean = one_sided_frequency(&img, Direction::Plus, ChannelReduction::Mean).unwrap();
        assert!(mean.max() < 1e-6);
        let max = one_sided_frequency(&img, Direction::Plus, ChannelReduction::Max).unwrap();
        for x in 0..8 {
            assert!((max.get(2, x) - 1.0).abs() < 1e-12);
        }
    }

    fn random_plane(seed: u64, h: usize, w: usize) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::from_fn(h, w, 1, |_, _, _| rng.gen::<f32>()).unwrap()
    }

    proptest::proptest! {
        #[test]
        fn centered_bounded_by_one_sided(seed in 0u64..5000) {
            let g = directional_gradients(&random_plane(seed, 6, 7)).unwrap();
            let c = freq_map_centered(&g);
            let p = freq_map_one_sided(&g, Direction::Plus);
            let m = freq_map_one_sided(&g, Direction::Minus);
            for i in 0..c.len() {
                proptest::prop_assert!(c.data()[i] >= 0.0);
                proptest::prop_assert!(c.data()[i] <= p.data()[i].max(m.data()[i]) + 1e-12);
            }
        }

        #[test]
        fn mirror_swaps_plus_and_minus(seed in 0u64..5000) {
            let img = random_plane(seed, 5, 8);
            let w = img.width();
            let mirrored = Image::from_fn(5, w, 1, |y, x, _| img.get(y, w - 1 - x, 0)).unwrap();
            let g = directional_gradients(&img).unwrap();
            let gm = directional_gradients(&mirrored).unwrap();
            let c = freq_map_centered(&g);
            let cm = freq_map_centered(&gm);
            for y in 0..5 {
                for x in 0..w {
                    proptest::prop_assert_eq!(g.du_plus.get(y, x), gm.du_minus.get(y, w - 1 - x));
                    proptest::prop_assert!((c.get(y, x) - cm.get(y, w - 1 - x)).abs() < 1e-12);
                }
            }
        }
    }
}
