use super::{BorderMask, GlyphMask};

/// Width of the sampled ring around each word, in pixels.
pub const DEFAULT_BORDER_RADIUS: u32 = 2;

/// Dilation by a `(2r+1)`-square structuring element.
///
/// The canvas grows by `radius` on every side, so output pixel `(x, y)`
/// corresponds to input pixel `(x - radius, y - radius)` and is set iff some
/// input pixel lies within Chebyshev distance `radius` of it.
pub fn dilate(mask: &GlyphMask, radius: u32) -> GlyphMask {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let r = radius as usize;
    let (ow, oh) = (w + 2 * r, h + 2 * r);
    let span = 2 * r + 1;

    // Horizontal pass: (ow x h), window [X - 2r, X] in input columns.
    let mut rows = vec![false; ow * h];
    for y in 0..h {
        let src = &mask.bits()[y * w..(y + 1) * w];
        let dst = &mut rows[y * ow..(y + 1) * ow];
        let mut live = 0usize;
        for (x, out) in dst.iter_mut().enumerate() {
            if x < w && src[x] {
                live += 1;
            }
            if x >= span && x - span < w && src[x - span] {
                live -= 1;
            }
            *out = live > 0;
        }
    }

    // Vertical pass over the horizontally dilated rows.
    let mut bits = vec![false; ow * oh];
    for x in 0..ow {
        let mut live = 0usize;
        for y in 0..oh {
            if y < h && rows[y * ow + x] {
                live += 1;
            }
            if y >= span && y - span < h && rows[(y - span) * ow + x] {
                live -= 1;
            }
            bits[y * ow + x] = live > 0;
        }
    }
    GlyphMask::from_bits(ow as u32, oh as u32, bits)
}

pub fn border_with_radius(mask: &GlyphMask, radius: u32) -> BorderMask {
    let grown = dilate(mask, radius);
    let (gw, w) = (grown.width() as usize, mask.width() as usize);
    let r = radius as usize;
    let mut bits = grown.bits().to_vec();
    for (x, y) in mask.iter_set() {
        bits[(y as usize + r) * gw + x as usize + r] = false;
    }
    debug_assert!(w + 2 * r == gw);
    BorderMask {
        width: grown.width(),
        height: grown.height(),
        radius,
        bits,
    }
}

/// The 2-pixel ring around `mask`.
pub fn border_of(mask: &GlyphMask) -> BorderMask {
    border_with_radius(mask, DEFAULT_BORDER_RADIUS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct definition: any ink within Chebyshev distance `r`.
    fn dilate_brute(mask: &GlyphMask, r: u32) -> GlyphMask {
        let (w, h) = (mask.width() as i64, mask.height() as i64);
        let ri = r as i64;
        let mut out = GlyphMask::new(mask.width() + 2 * r, mask.height() + 2 * r);
        for oy in 0..h + 2 * ri {
            for ox in 0..w + 2 * ri {
                let (cx, cy) = (ox - ri, oy - ri);
                let hit = (cy - ri..=cy + ri).any(|y| {
                    (cx - ri..=cx + ri)
                        .any(|x| x >= 0 && y >= 0 && x < w && y < h && mask.get(x as u32, y as u32))
                });
                out.set(ox as u32, oy as u32, hit);
            }
        }
        out
    }

    #[test]
    fn empty_mask_grows_canvas_only() {
        let d = dilate(&GlyphMask::new(4, 3), 2);
        assert_eq!((d.width(), d.height()), (8, 7));
        assert!(d.is_empty());
        assert_eq!(border_of(&GlyphMask::new(4, 3)).count(), 0);
        let d = dilate(&GlyphMask::new(0, 0), 2);
        assert_eq!((d.width(), d.height()), (4, 4));
    }

    #[test]
    fn single_pixel_dilates_to_square() {
        let d = dilate(&GlyphMask::filled(1, 1), 2);
        assert_eq!(d, GlyphMask::filled(5, 5));
        let b = border_of(&GlyphMask::filled(1, 1));
        assert_eq!(b.count(), 24);
        assert!(!b.get(2, 2));
    }

    #[test]
    fn block_dilates_to_block() {
        assert_eq!(dilate(&GlyphMask::filled(5, 5), 2), GlyphMask::filled(9, 9));
        assert_eq!(border_of(&GlyphMask::filled(5, 5)).count(), 56);
    }

    #[test]
    fn radius_zero_is_identity() {
        let m = GlyphMask::from_ascii("#..\n.#.\n..#");
        assert_eq!(dilate(&m, 0), m);
        assert_eq!(border_with_radius(&m, 0).count(), 0);
    }

    #[test]
    fn matches_brute_force_on_pattern() {
        let m = GlyphMask::from_ascii(
            "#.....#
             .......
             ...#...
             .......
             ##.....",
        );
        for r in 0..4 {
            assert_eq!(dilate(&m, r), dilate_brute(&m, r), "radius {r}");
        }
    }

    fn arb_mask() -> impl Strategy<Value = GlyphMask> {
        (1u32..24, 1u32..24, 0.0f64..1.0).prop_flat_map(|(w, h, density)| {
            proptest::collection::vec(proptest::bool::weighted(density), (w * h) as usize)
                .prop_map(move |bits| GlyphMask::from_bits(w, h, bits))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn dilate_agrees_with_definition(m in arb_mask(), r in 0u32..4) {
            prop_assert_eq!(dilate(&m, r), dilate_brute(&m, r));
        }
    }
}
