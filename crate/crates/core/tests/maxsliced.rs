mod common;

use common::*;
use cwot_core::maxsliced::{grid_oracle_2d, maxsliced_w1, MaxSlicedConfig};
use cwot_core::ot1d::w1_1d;
use cwot_core::otlp::w1_exact;
use cwot_core::{DiscreteMeasure, Direction};

fn projected(mu: &DiscreteMeasure, nu: &DiscreteMeasure, theta: &Direction) -> f64 {
    w1_1d(&mu.project(theta).unwrap(), &nu.project(theta).unwrap()).unwrap()
}

#[test]
fn never_exceeds_the_full_distance() {
    let mut rng = rng(21);
    for trial in 0..120 {
        let dim = [2, 3, 5][trial % 3];
        let mu = random_measure(&mut rng, dim, 2 + trial % 9);
        let nu = random_measure(&mut rng, dim, 1 + trial % 7);
        let cfg = MaxSlicedConfig::with_restarts(8, trial as u64);
        let m = maxsliced_w1(&mu, &nu, &cfg).unwrap();
        let w = w1_exact(&mu, &nu).unwrap().value;
        assert!(m.value <= w + 1e-8, "trial {trial}: {} > {w}", m.value);
        assert!((m.value - projected(&mu, &nu, &m.direction)).abs() < 1e-10);
    }
}

#[test]
fn dominates_a_fine_grid_in_the_plane() {
    let mut rng = rng(22);
    let instances = 100;
    let mut wins = 0;
    for trial in 0..instances {
        let mu = random_uniform(&mut rng, 2, 20);
        let nu = random_uniform(&mut rng, 2, 20);
        let m = maxsliced_w1(&mu, &nu, &MaxSlicedConfig::with_restarts(32, trial)).unwrap();
        let grid = grid_oracle_2d(&mu, &nu, 512).unwrap();
        if m.value >= grid - 1e-6 {
            wins += 1;
        }
    }
    eprintln!("grid dominance {wins}/{instances}");
    assert!(wins * 100 >= 95 * instances, "{wins}/{instances}");
}

#[test]
fn direction_is_canonical_and_sign_invariant() {
    let mut rng = rng(23);
    for trial in 0..30 {
        let dim = 2 + trial % 3;
        let mu = random_measure(&mut rng, dim, 6);
        let nu = random_measure(&mut rng, dim, 5);
        let m = maxsliced_w1(&mu, &nu, &MaxSlicedConfig::with_restarts(6, 1)).unwrap();
        let first = m.direction.components().iter().find(|c| **c != 0.0).unwrap();
        assert!(*first > 0.0);
        let flipped = Direction::new(m.direction.components().iter().map(|c| -c).collect()).unwrap();
        assert!((projected(&mu, &nu, &flipped) - m.value).abs() < 1e-12);
    }
}

#[test]
fn scaling_both_measures_scales_the_value() {
    let mut rng = rng(24);
    for trial in 0..20 {
        let dim = 2 + trial % 2;
        let mu = random_measure(&mut rng, dim, 7);
        let nu = random_measure(&mut rng, dim, 7);
        let cfg = MaxSlicedConfig::with_restarts(10, 3);
        let base = maxsliced_w1(&mu, &nu, &cfg).unwrap();
        for lambda in [0.25, 2.0, 8.0] {
            let s = maxsliced_w1(&mu.scaled(lambda).unwrap(), &nu.scaled(lambda).unwrap(), &cfg).unwrap();
            assert!((s.value - lambda * base.value).abs() <= 1e-10 * lambda * base.value.max(1.0));
            for (a, b) in s.direction.components().iter().zip(base.direction.components()) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        let s = maxsliced_w1(&mu.scaled(3.7).unwrap(), &nu.scaled(3.7).unwrap(), &cfg).unwrap();
        assert!((s.value - 3.7 * base.value).abs() <= 1e-10 * 3.7 * base.value.max(1.0));
    }
}

#[test]
fn more_restarts_never_hurt() {
    let mut rng = rng(25);
    for trial in 0..10 {
        let mu = random_measure(&mut rng, 3, 10);
        let nu = random_measure(&mut rng, 3, 10);
        let mut last = 0.0;
        for r in [1, 2, 4, 8, 16] {
            let m = maxsliced_w1(&mu, &nu, &MaxSlicedConfig::with_restarts(r, trial)).unwrap();
            // Ties within 1e-12 go to the lexicographically smaller direction.
            assert!(m.value >= last - 1e-12, "R={r}: {} < {last}", m.value);
            last = m.value;
        }
    }
}

#[test]
fn rotating_both_measures_keeps_the_value() {
    let mut rng = rng(26);
    for trial in 0..15 {
        let mu = random_uniform(&mut rng, 2, 12);
        let nu = random_uniform(&mut rng, 2, 12);
        let (s, c) = (0.3 + trial as f64).sin_cos();
        let rot = |m: &DiscreteMeasure| m.map_points(2, |x, y| { y[0] = c * x[0] - s * x[1]; y[1] = s * x[0] + c * x[1]; }).unwrap();
        let a = grid_oracle_2d(&mu, &nu, 4096).unwrap();
        let m0 = maxsliced_w1(&mu, &nu, &MaxSlicedConfig::with_restarts(32, 5)).unwrap().value;
        let m1 = maxsliced_w1(&rot(&mu), &rot(&nu), &MaxSlicedConfig::with_restarts(32, 5)).unwrap().value;
        // Both runs sit at or above the fine grid, so they agree to grid accuracy.
        assert!(m0 >= a - 1e-6 && m1 >= a - 1e-6, "{m0} {m1} {a}");
        assert!((m0 - m1).abs() < 1e-3 * a.max(1e-3));
    }
}
