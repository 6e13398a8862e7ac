//! Brute-force reference implementations, written independently of the
//! library code they check.

use freqloss_core::{Image, ScalarMap};

/// Explicitly padded image, `pad` pixels on every side.
fn padded(img: &Image, c: usize, pad: usize, zero: bool) -> Vec<Vec<f64>> {
    let (h, w) = (img.height() as isize, img.width() as isize);
    let p = pad as isize;
    (-p..h + p)
        .map(|y| {
            (-p..w + p)
                .map(|x| {
                    let inside = y >= 0 && x >= 0 && y < h && x < w;
                    if zero && !inside {
                        0.0
                    } else {
                        f64::from(img.get(y.clamp(0, h - 1) as usize, x.clamp(0, w - 1) as usize, c))
                    }
                })
                .collect()
        })
        .collect()
}

/// Gaussian blur as two 1D passes of a normalised 1D kernel over an
/// explicitly padded copy.
#[allow(clippy::needless_range_loop)]
pub fn gaussian_blur(img: &Image, size: usize, sigma: f64, zero_border: bool) -> Image {
    let r = size / 2;
    let taps: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - r as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = taps.iter().sum();
    let taps: Vec<f64> = taps.iter().map(|t| t / total).collect();
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    let mut out = Image::filled(h, w, ch, 0.0).unwrap();
    for c in 0..ch {
        let p = padded(img, c, r, zero_border);
        // horizontal pass over every padded row
        let rows: Vec<Vec<f64>> = p
            .iter()
            .map(|row| (0..w).map(|x| (0..size).map(|k| taps[k] * row[x + k]).sum()).collect())
            .collect();
        for y in 0..h {
            for x in 0..w {
                let v: f64 = (0..size).map(|k| taps[k] * rows[y + k][x]).sum();
                out.set(y, x, c, v as f32);
            }
        }
    }
    out
}

/// SSIM from two-pass window statistics over replicated 3x3 windows.
pub fn ssim(a: &Image, b: &Image, c1: f64, c2: f64) -> ScalarMap {
    let (h, w, ch) = (a.height(), a.width(), a.channels());
    ScalarMap::from_fn(h, w, |y, x| {
        let mut total = 0.0;
        for c in 0..ch {
            let mut xs = Vec::with_capacity(9);
            let mut ys = Vec::with_capacity(9);
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let sy = (y as isize + dy).clamp(0, h as isize - 1) as usize;
                    let sx = (x as isize + dx).clamp(0, w as isize - 1) as usize;
                    xs.push(f64::from(a.get(sy, sx, c)));
                    ys.push(f64::from(b.get(sy, sx, c)));
                }
            }
            let mx = xs.iter().sum::<f64>() / 9.0;
            let my = ys.iter().sum::<f64>() / 9.0;
            let vx = xs.iter().map(|v| (v - mx).powi(2)).sum::<f64>() / 9.0;
            let vy = ys.iter().map(|v| (v - my).powi(2)).sum::<f64>() / 9.0;
            let cov = xs.iter().zip(&ys).map(|(p, q)| (p - mx) * (q - my)).sum::<f64>() / 9.0;
            total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
        total / ch as f64
    })
}

/// Bilinear sampling as a tent-weighted sum over every source pixel.
/// Clamp mode first clamps the coordinate into the image; zero mode lets
/// the tent reach outside, where nothing contributes.
pub fn bilinear(src: &Image, coords: &[(f64, f64)], clamp: bool) -> (Vec<f32>, Vec<f64>) {
    let (h, w, ch) = (src.height(), src.width(), src.channels());
    let mut values = Vec::with_capacity(coords.len() * ch);
    let mut valid = Vec::with_capacity(coords.len());
    for &(u, v) in coords {
        let inside = u >= 0.0 && v >= 0.0 && u <= (w - 1) as f64 && v <= (h - 1) as f64;
        valid.push(if inside { 1.0 } else { 0.0 });
        if !u.is_finite() || !v.is_finite() {
            values.extend(std::iter::repeat_n(0.0, ch));
            continue;
        }
        let (u, v) = if clamp {
            (u.clamp(0.0, (w - 1) as f64), v.clamp(0.0, (h - 1) as f64))
        } else {
            (u, v)
        };
        for c in 0..ch {
            let mut acc = 0.0;
            for y in 0..h {
                let wy = (1.0 - (v - y as f64).abs()).max(0.0);
                if wy == 0.0 {
                    continue;
                }
                for x in 0..w {
                    let wx = (1.0 - (u - x as f64).abs()).max(0.0);
                    acc += wx * wy * f64::from(src.get(y, x, c));
                }
            }
            values.push(acc as f32);
        }
    }
    (values, valid)
}

/// Intervals that slope down towards the ground truth.
pub fn fairness_degree(hyps: &[f64], losses: &[f64], gt: f64) -> (usize, usize) {
    let mut passing = 0;
    for i in 0..hyps.len() - 1 {
        let mid = 0.5 * (hyps[i] + hyps[i + 1]);
        let falling = losses[i + 1] < losses[i];
        let rising = losses[i + 1] > losses[i];
        if (mid < gt && falling) || (mid > gt && rising) {
            passing += 1;
        }
    }
    (passing, hyps.len() - 1)
}

/// Pixels whose horizontal or vertical neighbours lie strictly on opposite
/// sides of it, on the channel-mean image; missing neighbours count as equal.
pub fn opposite_sign_pixels(img: &Image) -> Vec<(usize, usize)> {
    let (h, w, ch) = (img.height(), img.width(), img.channels());
    let lum = |y: usize, x: usize| (0..ch).map(|c| f64::from(img.get(y, x, c))).sum::<f64>() / ch as f64;
    let at = |y: isize, x: isize, fallback: f64| {
        if y < 0 || x < 0 || y >= h as isize || x >= w as isize {
            fallback
        } else {
            lum(y as usize, x as usize)
        }
    };
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let c = lum(y, x);
            let (yi, xi) = (y as isize, x as isize);
            let (l, r) = (at(yi, xi - 1, c), at(yi, xi + 1, c));
            let (u, d) = (at(yi - 1, xi, c), at(yi + 1, xi, c));
            let between = |p: f64, q: f64| (p < c && c < q) || (q < c && c < p);
            if between(l, r) || between(u, d) {
                out.push((y, x));
            }
        }
    }
    out
}
