use graysynth_core::gray::oracle::candidate_oracle;
use graysynth_core::gray::{design_colors, edge_colors, unused_grays, AnalysisThresholds, GrayHistogram, LEVELS};
use proptest::prelude::*;

const MARGINS: [u8; 4] = [0, 8, 16, 24];

fn thresholds(margin: u8) -> AnalysisThresholds {
    AnalysisThresholds::new(0.0, margin).unwrap()
}

#[test]
fn single_used_level_matches_oracle_exhaustively() {
    for used in 0..LEVELS {
        let mut bins = [0u64; LEVELS];
        bins[used] = 3;
        let hist = GrayHistogram::from_bins(bins);
        for m in MARGINS {
            let t = thresholds(m);
            assert_eq!(design_colors(&hist, &t), candidate_oracle(&hist, &t), "used {used} margin {m}");
        }
    }
}

/// Histograms whose used-level density varies from sparse to full.
fn arb_hist() -> impl Strategy<Value = GrayHistogram> {
    (0.01f64..=1.0).prop_flat_map(|density| {
        proptest::collection::vec(
            (proptest::bool::weighted(density), 1u64..1000),
            LEVELS,
        )
        .prop_map(|cells| {
            let mut bins = [0u64; LEVELS];
            for (g, (used, count)) in cells.into_iter().enumerate() {
                if used {
                    bins[g] = count;
                }
            }
            GrayHistogram::from_bins(bins)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn design_colors_equals_oracle(hist in arb_hist(), m in proptest::sample::select(MARGINS.to_vec())) {
        let t = thresholds(m);
        prop_assert_eq!(design_colors(&hist, &t), candidate_oracle(&hist, &t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn candidates_are_unused_and_far_from_used(hist in arb_hist(), m in 0u8..40, frac in 0.0f64..=1.0) {
        let t = AnalysisThresholds::new(frac, m).unwrap();
        let unused = unused_grays(&hist, frac);
        let cands = design_colors(&hist, &t);
        prop_assert!(cands.is_subset(&unused));
        for g in cands.iter() {
            for u in (0..=255u8).filter(|&u| !unused.contains(u)) {
                prop_assert!((g as i32 - u as i32).abs() > m as i32);
            }
        }
    }

    #[test]
    fn larger_margins_never_add_candidates(hist in arb_hist(), m in 0u8..254) {
        let narrow = design_colors(&hist, &thresholds(m));
        let wide = design_colors(&hist, &thresholds(m + 1));
        prop_assert!(wide.is_subset(&narrow));
    }

    #[test]
    fn edges_are_disjoint_from_unused(hist in arb_hist(), frac in 0.0f64..=1.0) {
        let unused = unused_grays(&hist, frac);
        let edges = edge_colors(&unused);
        prop_assert!(edges.iter().all(|g| !unused.contains(g)));
        // And exactly the used levels with an unused neighbour.
        for g in 0..=255u8 {
            let neighbour_unused = (g > 0 && unused.contains(g - 1)) || (g < 255 && unused.contains(g + 1));
            prop_assert_eq!(edges.contains(g), !unused.contains(g) && neighbour_unused);
        }
    }

    #[test]
    fn histogram_total_is_conserved(samples in proptest::collection::vec(0i64..256, 0..500)) {
        let h = graysynth_core::histogram_from_samples(&samples).unwrap();
        prop_assert_eq!(h.total(), samples.len() as u64);
    }
}
