//! Translation-distance oracle: a brute-force coarse-to-fine grid search
//! over aligning translations, sharing nothing with the subgradient
//! optimizer it checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use equipoint::generate::random_polytope;
use equipoint::metric::{class_distance_with, DirectionSet};
use equipoint::{class_distance, convex_hull, hausdorff_distance, Point, TranslationClass};

/// Objective the metric minimizes: worst support-gap after translating the
/// second body by `t`.
fn gap_after_shift(dirs: &DirectionSet<f64>, diff: &[f64], t: &[f64]) -> f64 {
    dirs.directions()
        .iter()
        .zip(diff)
        .map(|(u, d)| {
            let dot: f64 = u.iter().zip(t).map(|(a, b)| a * b).sum();
            (d - dot).abs()
        })
        .fold(0.0, f64::max)
}

/// Coarse-to-fine grid search over 2D translations, refining until the grid
/// step reaches 1e-3.
fn grid_search_distance(
    dirs: &DirectionSet<f64>,
    k1: &TranslationClass<f64>,
    k2: &TranslationClass<f64>,
) -> f64 {
    let h1 = dirs.support_values(k1.representative()).unwrap();
    let h2 = dirs.support_values(k2.representative()).unwrap();
    let diff: Vec<f64> = h1.iter().zip(&h2).map(|(a, b)| a - b).collect();

    let radius = k1
        .representative()
        .diameter()
        .max(k2.representative().diameter());
    let mut center = vec![0.0f64; 2];
    let mut half = radius;
    let mut best = (f64::INFINITY, center.clone());
    let mut step = (half / 10.0).max(1e-3);
    loop {
        let cells = (2.0 * half / step).ceil() as i64;
        for i in 0..=cells {
            for j in 0..=cells {
                let t = vec![
                    center[0] - half + step * i as f64,
                    center[1] - half + step * j as f64,
                ];
                let g = gap_after_shift(dirs, &diff, &t);
                if g < best.0 {
                    best = (g, t);
                }
            }
        }
        if step <= 1e-3 {
            return best.0;
        }
        // refine around the best cell; the final level runs at step 1e-3
        center = best.1.clone();
        half = 2.0 * step;
        step = (step / 5.0).max(1e-3);
    }
}

fn square(side: f64, corner: [f64; 2]) -> equipoint::Body {
    let pts = vec![
        Point(vec![corner[0], corner[1]]),
        Point(vec![corner[0] + side, corner[1]]),
        Point(vec![corner[0], corner[1] + side]),
        Point(vec![corner[0] + side, corner[1] + side]),
    ];
    convex_hull(&pts, 2).unwrap()
}

#[test]
fn unit_and_double_square_distance_is_half_diagonal() {
    // Axis-aligned squares of sides 1 and 2 sharing a corner. Optimal
    // translation aligns the centers; the worst direction is the diagonal,
    // where the support gap is sqrt(2)/2.
    let a = square(1.0, [0.0, 0.0]);
    let b = square(2.0, [0.0, 0.0]);
    let (ka, kb) = (TranslationClass::of(&a), TranslationClass::of(&b));
    let dirs = DirectionSet::new(2, 4096);

    let expected = 2f64.sqrt() / 2.0;
    let (opt, _) = class_distance_with(&dirs, &ka, &kb).unwrap();
    let grid = grid_search_distance(&dirs, &ka, &kb);

    assert!((opt - expected).abs() < 2e-4, "optimizer {opt} vs exact {expected}");
    assert!((grid - expected).abs() < 2e-3, "grid {grid} vs exact {expected}");
}

#[test]
fn grid_oracle_confirms_optimizer_on_random_pairs() {
    let dirs = DirectionSet::new(2, 1024);
    for seed in [11u64, 23, 47] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_polytope::<f64>(2, 9, &mut rng).unwrap();
        let b = random_polytope::<f64>(2, 7, &mut rng).unwrap();
        let (ka, kb) = (TranslationClass::of(&a), TranslationClass::of(&b));
        let (opt, _) = class_distance_with(&dirs, &ka, &kb).unwrap();
        let grid = grid_search_distance(&dirs, &ka, &kb);
        // The grid can only overshoot the true minimum; the optimizer must
        // come out at least as low (up to its own tolerance) and the two
        // must agree within the final grid resolution.
        assert!(opt <= grid + 1e-6, "seed {seed}: optimizer {opt} above grid value {grid}");
        assert!((opt - grid).abs() <= 2e-3, "seed {seed}: optimizer {opt}, grid {grid}");
    }
}

#[test]
fn translated_copies_are_at_distance_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let body = random_polytope::<f64>(2, 10, &mut rng).unwrap();
    for shift in 0..20 {
        let t = vec![(shift as f64) * 0.37 - 3.0, (shift as f64) * -0.21 + 1.0];
        let moved = body.translate(&t);
        let d = class_distance(&TranslationClass::of(&body), &TranslationClass::of(&moved))
            .unwrap();
        assert!(d <= 1e-8, "shift {shift}: class distance {d}");
    }
}

#[test]
fn class_distance_never_exceeds_hausdorff() {
    // Quotienting out translations can only shrink the metric.
    for seed in [3u64, 9, 27] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_polytope::<f64>(2, 8, &mut rng).unwrap();
        let b = random_polytope::<f64>(2, 8, &mut rng).unwrap();
        let h = hausdorff_distance(&a, &b).unwrap();
        let d = class_distance(&TranslationClass::of(&a), &TranslationClass::of(&b)).unwrap();
        assert!(d <= h + 1e-9, "seed {seed}: class {d} > hausdorff {h}");
    }
}
