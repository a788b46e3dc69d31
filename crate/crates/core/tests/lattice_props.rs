//! Property tests for the geometry and sampling layers.

use perclab_core::lattice::{nearest_site, EuclideanBall, Parallelogram, SiteCoord};
use perclab_core::rng;
use perclab_core::sampler::{ConfigView, Configuration, LazyConfig};
use proptest::prelude::*;

proptest! {
    #[test]
    fn nearest_site_inverts_embedding(m in -2000i32..2000, n in -2000i32..2000) {
        let s = SiteCoord::new(m, n);
        let (x, y) = s.embed();
        prop_assert_eq!(nearest_site(x, y), s);
    }

    #[test]
    fn neighbor_relation_is_symmetric(m in -100i32..100, n in -100i32..100) {
        let s = SiteCoord::new(m, n);
        for t in s.neighbors() {
            prop_assert!(t.neighbors().contains(&s));
        }
    }

    #[test]
    fn embedding_distances_of_neighbors_are_one(m in -500i32..500, n in -500i32..500) {
        let s = SiteCoord::new(m, n);
        for t in s.neighbors() {
            prop_assert!((s.euclidean_distance(t) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn nearest_site_minimizes_distance(x in -50.0f64..50.0, y in -50.0f64..50.0) {
        let best = nearest_site(x, y);
        let (bx, by) = best.embed();
        let bd = ((bx - x).powi(2) + (by - y).powi(2)).sqrt();
        // no lattice site in a local window beats it
        for dm in -3i32..=3 {
            for dn in -3i32..=3 {
                let t = best.offset(dm, dn);
                let (tx, ty) = t.embed();
                let td = ((tx - x).powi(2) + (ty - y).powi(2)).sqrt();
                prop_assert!(bd <= td + 1e-9);
            }
        }
    }

    #[test]
    fn ball_site_sets_nest_with_radius(r in 1.0f64..6.0, dr in 0.1f64..3.0,
                                       cx in -3.0f64..3.0, cy in -3.0f64..3.0) {
        let small = EuclideanBall::new((cx, cy), r).unwrap().sites();
        let large = EuclideanBall::new((cx, cy), r + dr).unwrap().sites();
        for s in &small {
            prop_assert!(large.contains(s));
        }
    }

    #[test]
    fn parallelogram_rank_roundtrip(m1 in -20i32..20, w in 1i32..12,
                                    n1 in -20i32..20, h in 1i32..12) {
        let p = Parallelogram::new(m1, m1 + w - 1, n1, n1 + h - 1).unwrap();
        prop_assert_eq!(p.len(), (w * h) as usize);
        for rank in 0..p.len() {
            prop_assert_eq!(p.rank(p.site_at(rank)), rank);
        }
    }

    #[test]
    fn sampled_configuration_matches_lazy_view(seed in any::<u64>(), idx in 0u64..1000) {
        let region = Parallelogram::new(-2, 4, -3, 2).unwrap();
        let cfg = Configuration::sample(region, 0.41, seed, idx).unwrap();
        let lazy = LazyConfig::new(region, 0.41, seed, idx);
        for s in region.iter() {
            prop_assert_eq!(cfg.is_open(s), lazy.is_open(s));
        }
    }

    #[test]
    fn site_states_are_coupled_monotonically_in_p(seed in any::<u64>(),
                                                  idx in 0u64..5000,
                                                  m in -50i32..50, n in -50i32..50) {
        // shared uniforms: open at p implies open at every p' >= p
        let lo = rng::site_is_open(seed, idx, m, n, 0.3);
        let hi = rng::site_is_open(seed, idx, m, n, 0.7);
        prop_assert!(!lo || hi);
    }

    #[test]
    fn flip_site_is_involutive(mask in 0u64..512, rank in 0usize..9) {
        let region = Parallelogram::new(0, 2, 0, 2).unwrap();
        let cfg = Configuration::from_mask(region, mask);
        let s = region.site_at(rank);
        let back = cfg.flip_site(s).unwrap().flip_site(s).unwrap();
        prop_assert_eq!(cfg, back);
    }
}
