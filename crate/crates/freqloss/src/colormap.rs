//! False-colour rendering of scalar maps.
//!
//! The "heat" map is piecewise linear through four stops over `[0, vmax]`:
//! black at 0, red at 1/3, yellow at 2/3 and white at 1. Values outside the
//! range are clamped, NaN renders black.

use freqloss_core::{Image, ScalarMap};

const STOPS: [[f32; 3]; 4] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 1.0, 1.0]];

/// Display range of photometric loss maps.
pub const LOSS_RANGE: f64 = 1.0;
/// Display range of ambiguity maps; the centred frequency never exceeds it.
pub const AMBIGUITY_RANGE: f64 = std::f64::consts::SQRT_2;

/// Heat colour of `t` in `[0, 1]`.
pub fn heat(t: f64) -> [f32; 3] {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let pos = t * (STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = (pos - i as f64) as f32;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    [a[0] + (b[0] - a[0]) * f, a[1] + (b[1] - a[1]) * f, a[2] + (b[2] - a[2]) * f]
}

/// RGB rendering of `map` scaled by `vmax`.
pub fn render(map: &ScalarMap, vmax: f64) -> Image {
    let scale = if vmax > 0.0 { 1.0 / vmax } else { 0.0 };
    Image::from_fn(map.height(), map.width(), 3, |y, x, c| heat(map.get(y, x) * scale)[c])
        .expect("map dimensions are valid")
}
