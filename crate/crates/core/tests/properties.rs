use proptest::prelude::*;

use quadfeat::bench::{gram_exact, parse_csv, relative_frobenius_error};
use quadfeat::kernels::{kernel_exact, KernelKind};
use quadfeat::linalg::{fwht_normalized, simplex_vertices, ButterflyOrthogonal, OrthogonalKind};
use quadfeat::quadrature::{build_feature_map, sr33_estimate, sr33_estimate_even, SrSampler};
use quadfeat::rng::{fill_standard_normal, rng_from_seed};
use quadfeat::{build_mapper, feature_dim, FeatureMapper, Method};

fn gauss(seed: u64, d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    fill_standard_normal(&mut rng_from_seed(seed), &mut v);
    v
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn kernel_of(i: usize) -> KernelKind {
    [
        KernelKind::gaussian(0.2).unwrap(),
        KernelKind::ArcCos0,
        KernelKind::ArcCos1,
    ][i]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn butterfly_preserves_norms_and_inverts(d in 1usize..300, seed in any::<u64>()) {
        let b = ButterflyOrthogonal::sample(d, seed).unwrap();
        let x = gauss(seed ^ 1, d);
        let y = b.apply(&x).unwrap();
        prop_assert!((norm(&y) - norm(&x)).abs() < 1e-10 * (1.0 + norm(&x)));
        let back = b.apply_transpose(&y).unwrap();
        prop_assert!(x.iter().zip(&back).all(|(a, c)| (a - c).abs() < 1e-10));
    }

    #[test]
    fn hadamard_preserves_norms(k in 0u32..10, seed in any::<u64>()) {
        let x = gauss(seed, 1 << k);
        prop_assert!((norm(&fwht_normalized(&x).unwrap()) - norm(&x)).abs() < 1e-10 * (1.0 + norm(&x)));
    }

    #[test]
    fn simplex_projection_matches_dot_products(d in 1usize..50, seed in any::<u64>()) {
        let s = simplex_vertices(d).unwrap();
        let z = gauss(seed, d);
        let fast = s.project(&z).unwrap();
        for (j, v) in s.vertices().iter().enumerate() {
            let direct: f64 = v.iter().zip(&z).map(|(a, b)| a * b).sum();
            prop_assert!((fast[j] - direct).abs() < 1e-10);
        }
        prop_assert!(fast.iter().sum::<f64>().abs() < 1e-10);
    }

    #[test]
    fn kernels_are_symmetric(d in 1usize..20, seed in any::<u64>(), ki in 0usize..3) {
        let (x, y) = (gauss(seed, d), gauss(seed.wrapping_add(1), d));
        let k = kernel_of(ki);
        prop_assert_eq!(kernel_exact(&k, &x, &y).unwrap(), kernel_exact(&k, &y, &x).unwrap());
    }

    #[test]
    fn feature_products_equal_rule_averages(d in 3usize..24, n in 1usize..4, seed in any::<u64>(), ki in 0usize..3, haar in any::<bool>()) {
        let kind = if haar { OrthogonalKind::HaarQR } else { OrthogonalKind::ButterflyBP };
        let k = kernel_of(ki);
        let map = build_feature_map(k, d, n, seed, kind).unwrap();
        prop_assert_eq!(map.output_dim(), feature_dim(d, n));
        let (x, y) = (gauss(seed ^ 7, d), gauss(seed ^ 9, d));
        let (px, py) = (map.map_point(&x).unwrap(), map.map_point(&y).unwrap());
        let ip: f64 = px.iter().zip(&py).map(|(a, b)| a * b).sum();
        prop_assert!((ip - map.block_rule_average(&x, &y).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn even_rule_matches_full_rule(d in 3usize..40, seed in any::<u64>()) {
        let s = SrSampler::new(d, OrthogonalKind::ButterflyBP).unwrap().sample_seeded(seed).unwrap();
        let k = KernelKind::gaussian(0.3).unwrap();
        let (x, y) = (gauss(seed ^ 3, d), gauss(seed ^ 5, d));
        let full = sr33_estimate(&s, &k, &x, &y).unwrap();
        prop_assert!((full - sr33_estimate_even(&s, &k, &x, &y).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn every_method_emits_exactly_d_features(d in 3usize..20, n in 1usize..4, seed in any::<u64>(), ki in 0usize..3) {
        let dim = feature_dim(d, n);
        for m in Method::ALL {
            let mapper = build_mapper(m, kernel_of(ki), d, dim, seed).unwrap();
            prop_assert_eq!(mapper.output_dim(), dim);
            prop_assert!(mapper.map_point(&gauss(seed, d)).unwrap().iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn csv_roundtrip(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 2..20)) {
        let text: String = rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",") + "\n").collect();
        prop_assert_eq!(parse_csv(&text, "p").unwrap().rows, rows);
    }

    #[test]
    fn frobenius_error_is_scale_invariant(seed in any::<u64>(), scale in 0.1f64..10.0) {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| gauss(seed.wrapping_add(i), 3)).collect();
        let k = gram_exact(&KernelKind::gaussian(0.5).unwrap(), &rows).unwrap();
        let noisy = k.map(|v| v * 0.9 + 0.01);
        let a = relative_frobenius_error(&k, &noisy).unwrap();
        let b = relative_frobenius_error(&(&k * scale), &(&noisy * scale)).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }
}
