//! Deterministic procedural backgrounds for tests and benchmarks.

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of distinct patterns [`background`] can produce.
pub const PATTERN_COUNT: usize = 12;

/// Background number `pattern % PATTERN_COUNT`, varied by `seed`.
pub fn background(pattern: usize, width: u32, height: u32, seed: u64) -> RgbImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (pattern as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let base: [u8; 3] = rng.gen();
    let other: [u8; 3] = rng.gen();
    let fw = width.max(1) as f64;
    let fh = height.max(1) as f64;
    match pattern % PATTERN_COUNT {
        0 => RgbImage::from_pixel(width, height, Rgb(base)),
        1 => RgbImage::from_fn(width, height, |x, _| lerp(base, other, x as f64 / fw)),
        2 => RgbImage::from_fn(width, height, |_, y| lerp(base, other, y as f64 / fh)),
        3 => {
            let cell = rng.gen_range(8..40);
            RgbImage::from_fn(width, height, |x, y| {
                if (x / cell + y / cell) % 2 == 0 {
                    Rgb(base)
                } else {
                    Rgb(other)
                }
            })
        }
        4 => {
            let period = rng.gen_range(6..30);
            RgbImage::from_fn(width, height, |x, y| {
                if ((x + y) / period) % 2 == 0 {
                    Rgb(base)
                } else {
                    Rgb(other)
                }
            })
        }
        5 => {
            let amp = rng.gen_range(10..60) as i16;
            let mut img = RgbImage::from_pixel(width, height, Rgb(base));
            for p in img.pixels_mut() {
                for c in p.0.iter_mut() {
                    *c = (*c as i16 + rng.gen_range(-amp..=amp)).clamp(0, 255) as u8;
                }
            }
            img
        }
        6 => {
            let (cx, cy) = (rng.gen_range(0.0..fw), rng.gen_range(0.0..fh));
            let r = fw.hypot(fh);
            RgbImage::from_fn(width, height, |x, y| {
                lerp(base, other, (x as f64 - cx).hypot(y as f64 - cy) / r)
            })
        }
        7 => {
            let (kx, ky) = (rng.gen_range(0.01..0.08), rng.gen_range(0.01..0.08));
            RgbImage::from_fn(width, height, |x, y| {
                let t = 0.5 + 0.25 * ((x as f64 * kx).sin() + (y as f64 * ky).cos());
                lerp(base, other, t)
            })
        }
        8 => {
            let split = rng.gen_range(width / 4..=3 * width / 4);
            RgbImage::from_fn(width, height, |x, _| if x < split { Rgb(base) } else { Rgb(other) })
        }
        9 => {
            let cell = rng.gen_range(16..64);
            let cols = width.div_ceil(cell) as usize;
            let rows = height.div_ceil(cell) as usize;
            let colors: Vec<[u8; 3]> = (0..cols * rows).map(|_| rng.gen()).collect();
            RgbImage::from_fn(width, height, |x, y| {
                Rgb(colors[(y / cell) as usize * cols + (x / cell) as usize])
            })
        }
        10 => {
            // Coarse value noise, bilinearly interpolated.
            let cell = rng.gen_range(24..80) as f64;
            let cols = (fw / cell).ceil() as usize + 2;
            let rows = (fh / cell).ceil() as usize + 2;
            let grid: Vec<f64> = (0..cols * rows).map(|_| rng.gen()).collect();
            RgbImage::from_fn(width, height, |x, y| {
                let (gx, gy) = (x as f64 / cell, y as f64 / cell);
                let (ix, iy) = (gx as usize, gy as usize);
                let (tx, ty) = (gx - ix as f64, gy - iy as f64);
                let at = |c: usize, r: usize| grid[r * cols + c];
                let top = at(ix, iy) * (1.0 - tx) + at(ix + 1, iy) * tx;
                let bottom = at(ix, iy + 1) * (1.0 - tx) + at(ix + 1, iy + 1) * tx;
                lerp(base, other, top * (1.0 - ty) + bottom * ty)
            })
        }
        _ => {
            // Scattered rectangles over a flat base.
            let mut img = RgbImage::from_pixel(width, height, Rgb(base));
            for _ in 0..rng.gen_range(5..25) {
                let color: [u8; 3] = rng.gen();
                let (x0, y0) = (rng.gen_range(0..width), rng.gen_range(0..height));
                let (w, h) = (rng.gen_range(4..=width / 2 + 4), rng.gen_range(4..=height / 2 + 4));
                for y in y0..(y0 + h).min(height) {
                    for x in x0..(x0 + w).min(width) {
                        img.put_pixel(x, y, Rgb(color));
                    }
                }
            }
            img
        }
    }
}

/// Every row cycles through all 256 grays with period 256.
pub fn full_spectrum(width: u32, height: u32) -> RgbImage {
    RgbImage::from_fn(width, height, |x, _| Rgb([(x % 256) as u8; 3]))
}

fn lerp(a: [u8; 3], b: [u8; 3], t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0);
    Rgb([0, 1, 2].map(|i| (a[i] as f64 * (1.0 - t) + b[i] as f64 * t).round() as u8))
}
