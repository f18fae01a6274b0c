mod common;

use common::oracles;
use proptest::prelude::*;
use tumorseg::fixtures::random_mask;
use tumorseg::morphology::{
    box_half_extent, connected_components, dilate, distance_transform, fill_holes,
    interior_holes, surface_mask, surface_voxels,
};
use tumorseg::{BinaryMask, Connectivity, Dims, Spacing};

fn manhattan(conn: Connectivity) -> i64 {
    match conn {
        Connectivity::Face6 => 1,
        Connectivity::Edge18 => 2,
        Connectivity::Vertex26 => 3,
    }
}

fn arb_mask(max: usize) -> impl Strategy<Value = BinaryMask> {
    (1..=max, 1..=max, 1..=max, 0.05f64..0.6, any::<u64>())
        .prop_map(|(nx, ny, nz, density, seed)| {
            random_mask(Dims::new(nx, ny, nz).unwrap(), Spacing::unit(), density, seed)
        })
}

fn arb_conn() -> impl Strategy<Value = Connectivity> {
    prop_oneof![
        Just(Connectivity::Face6),
        Just(Connectivity::Edge18),
        Just(Connectivity::Vertex26)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn components_match_bfs(mask in arb_mask(14), conn in arb_conn()) {
        let cc = connected_components(&mask, conn).unwrap();
        let (labels, n) = oracles::bfs_components(&mask, manhattan(conn));
        prop_assert_eq!(cc.len(), n);
        prop_assert!(oracles::same_partition(cc.ids(), &labels));
        // both number components in raster order of first voxel
        prop_assert_eq!(cc.ids(), &labels[..]);
        let total: usize = cc.all_stats().iter().map(|s| s.voxel_count).sum();
        prop_assert_eq!(total, mask.count());
    }

    #[test]
    fn dilation_matches_offset_scan(mask in arb_mask(10), r in 0.0f64..3.0) {
        let half = box_half_extent(r, mask.spacing());
        let got = dilate(&mask, r);
        let want = oracles::brute_dilate(&mask, half.map(|h| h as i64));
        prop_assert_eq!(got.data(), &want[..]);
        prop_assert!(mask.is_subset_of(&got));
    }

    #[test]
    fn dilation_monotone_in_radius(mask in arb_mask(10), r in 0.0f64..2.0, extra in 0.0f64..2.0) {
        prop_assert!(dilate(&mask, r).is_subset_of(&dilate(&mask, r + extra)));
    }

    #[test]
    fn holes_match_sweep(mask in arb_mask(10)) {
        let holes = interior_holes(&mask);
        prop_assert_eq!(holes.data(), &oracles::sweep_holes(&mask)[..]);
        let filled = fill_holes(&mask);
        prop_assert!(mask.is_subset_of(&filled));
        prop_assert_eq!(fill_holes(&filled), filled);
    }

    #[test]
    fn surface_matches_erosion(mask in arb_mask(10)) {
        let s = surface_mask(&mask);
        prop_assert!(s.is_subset_of(&mask));
        let want: Vec<[usize; 3]> = oracles::brute_surface(&mask)
            .into_iter()
            .map(|p| p.map(|v| v as usize))
            .collect();
        prop_assert_eq!(surface_voxels(&mask), want);
    }

    #[test]
    fn edt_exact_and_lipschitz(mask in arb_mask(9), aniso in any::<bool>()) {
        prop_assume!(mask.any());
        let spacing = if aniso { Spacing::new(1.0, 1.0, 2.0).unwrap() } else { Spacing::unit() };
        let mask = BinaryMask::new(mask.dims(), spacing, mask.data().to_vec()).unwrap();
        let edt = distance_transform(&mask).unwrap();
        let want = oracles::brute_edt(&mask);
        for (g, w) in edt.data().iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-6, "{} vs {}", g, w);
        }
        let d = mask.dims();
        let s = spacing.as_array();
        for z in 0..d.nz {
            for y in 0..d.ny {
                for x in 0..d.nx {
                    let here = *edt.get(x, y, z);
                    if x + 1 < d.nx { prop_assert!((here - edt.get(x + 1, y, z)).abs() <= s[0] + 1e-9); }
                    if y + 1 < d.ny { prop_assert!((here - edt.get(x, y + 1, z)).abs() <= s[1] + 1e-9); }
                    if z + 1 < d.nz { prop_assert!((here - edt.get(x, y, z + 1)).abs() <= s[2] + 1e-9); }
                }
            }
        }
    }
}

#[test]
fn anisotropic_half_extent_truncates_per_axis() {
    let s = Spacing::new(1.0, 1.0, 2.0).unwrap();
    assert_eq!(box_half_extent(1.0, s), [1, 1, 0]);
    assert_eq!(box_half_extent(2.0, s), [2, 2, 1]);
}
