mod common;

use proptest::prelude::*;
use ridgesketch::densela::DenseMatrix;
use ridgesketch::sketch::{make_sketch, SketchKind};

#[test]
fn identity_and_rademacher_examples() {
    for seed in [0, 9, 12345] {
        assert_eq!(make_sketch(SketchKind::Identity, 5, 5, seed).unwrap().matrix(), &DenseMatrix::identity(5));
    }
    let op = make_sketch(SketchKind::Rademacher, 4, 4, 7).unwrap();
    assert!(op.matrix().as_slice().iter().all(|&v| v == 0.5 || v == -0.5));
}

#[test]
fn gaussian_entry_variance_matches_scale() {
    let op = make_sketch(SketchKind::Gaussian, 400, 50, 21).unwrap();
    let entries = op.matrix().as_slice();
    let count = entries.len() as f64;
    let mean = entries.iter().sum::<f64>() / count;
    let var = entries.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0);
    let target = 1.0 / 50.0;
    assert!((var - target).abs() <= 0.1 * target, "variance {var}");
}

#[test]
fn outer_product_is_unbiased() {
    for kind in [SketchKind::Gaussian, SketchKind::Rademacher] {
        let (n, m, trials) = (20, 10, 2000);
        let mut acc = vec![0.0; n * n];
        for seed in 0..trials {
            let s = make_sketch(kind, n, m, seed).unwrap();
            let sst = s.matrix().matmul_t(s.matrix());
            for (a, v) in acc.iter_mut().zip(sst.as_slice()) {
                *a += v;
            }
        }
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc[i * n + j] / trials as f64 - target).abs());
            }
        }
        assert!(worst <= 0.05, "{kind:?}: max deviation {worst}");
    }
}

proptest! {
    #[test]
    fn sketches_are_deterministic(input in 1usize..40, sk in 1usize..40, seed in any::<u64>(), rad in any::<bool>()) {
        let kind = if rad { SketchKind::Rademacher } else { SketchKind::Gaussian };
        let a = make_sketch(kind, input, sk, seed).unwrap();
        let b = make_sketch(kind, input, sk, seed).unwrap();
        prop_assert_eq!(a.matrix(), b.matrix());
        prop_assert_eq!(a.matrix().shape(), (input, sk));
    }
}
