//! Property checks shared by the property tests and the acceptance suite.
//! Each check panics on the first violation.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xkan_core::data::{sample_dataset, sample_raw, Dataset, TestFunction};
use xkan_core::evo::{train_ruleset_observed, EvoParams, Population, Rule, TrainEvent};
use xkan_core::kan::{KanConfig, KanNetwork};
use xkan_core::mlp::MlpNetwork;
use xkan_core::model::{Consequent, ConsequentSpec};
use xkan_core::optim::{TrainConfig, Trainable};
use xkan_core::spline::SplineGrid;
use xkan_core::stats::wilcoxon_exact;

pub const PROPERTY_CHECKS: &[(&str, fn())] = &[
    ("spline partition of unity", spline_partition_of_unity),
    ("gradient checks", gradients_match_finite_differences),
    ("subsumption numerosity conservation", subsumption_conserves_numerosity),
    ("budget after every step", budget_holds_after_every_step),
    ("covering containment", covering_contains_point),
    ("wilcoxon vs enumeration", wilcoxon_matches_enumeration),
    ("normalization round-trip", normalization_round_trip),
];

pub fn rows(data: &[Vec<f64>]) -> Vec<&[f64]> {
    data.iter().map(|r| r.as_slice()).collect()
}

pub fn random_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect()
}

pub fn unit_square(m: usize, seed: u64, target: impl Fn(&[f64]) -> f64) -> Dataset {
    let pts = random_points(2, m, seed);
    let ys = pts.iter().map(|p| target(p)).collect();
    Dataset::from_normalized(2, pts.concat(), ys, "synthetic").unwrap()
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

pub fn spline_partition_of_unity() {
    let strategy = (1usize..8, 1usize..5, -5.0f64..5.0, 0.1f64..10.0, 0.0f64..1.0);
    runner(2000)
        .run(&strategy, |(g, k, lo, span, u)| {
            let grid = SplineGrid::new(g, k, lo, lo + span).unwrap();
            let x = lo + u * span;
            let b = grid.basis(x);
            prop_assert!(b.iter().all(|v| *v >= 0.0));
            let sum: f64 = b.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9, "G={} K={} x={} sum {}", g, k, x, sum);
            Ok(())
        })
        .unwrap();
}

pub fn normalization_round_trip() {
    runner(100)
        .run(&(0u64..10_000, 0usize..5), |(seed, which)| {
            let f = TestFunction::ALL[which];
            let raw = sample_raw(f, 50, seed).unwrap();
            let data = sample_dataset(f, 50, seed).unwrap();
            let scaler = data.scaler();
            for (y, z) in raw.targets.iter().zip(data.targets()) {
                prop_assert!((-1.0..=1.0).contains(z));
                prop_assert!((scaler.denormalize_target(*z) - y).abs() < 1e-12);
            }
            for i in 0..data.len() {
                prop_assert!(data.row(i).iter().all(|v| (0.0..=1.0).contains(v)));
            }
            Ok(())
        })
        .unwrap();
}

/// Central differences on evenly spaced parameters.
pub fn check_gradient<T: Trainable>(model: &mut T, xs: &[&[f64]], ys: &[f64], probes: usize) {
    let (_, analytic) = model.mse_grad(xs, ys).unwrap();
    let base = model.params();
    let step = (base.len() / probes).max(1);
    let h = 1e-6;
    for i in (0..base.len()).step_by(step) {
        let mut p = base.clone();
        p[i] = base[i] + h;
        model.set_params(&p);
        let (up, _) = model.mse_grad(xs, ys).unwrap();
        p[i] = base[i] - h;
        model.set_params(&p);
        let (down, _) = model.mse_grad(xs, ys).unwrap();
        model.set_params(&base);
        let numeric = (up - down) / (2.0 * h);
        let err = (numeric - analytic[i]).abs();
        assert!(
            err <= 1e-4 * numeric.abs().max(analytic[i].abs()) || err < 1e-7,
            "param {i}: analytic {} numeric {numeric}",
            analytic[i]
        );
    }
}

pub fn gradients_match_finite_differences() {
    for (n, seed) in [(1, 1u64), (2, 2), (3, 3)] {
        let data = random_points(n, 12, seed);
        let xs = rows(&data);
        let ys: Vec<f64> = xs.iter().map(|x| x.iter().map(|v| (3.0 * v).sin()).sum()).collect();
        let mut net = KanNetwork::new(n, 3, 3, (0.0, 1.0), seed).unwrap();
        // move off the initial configuration so gates and weights differ from 1
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        let perturbed: Vec<f64> = net
            .params()
            .iter()
            .map(|p| p + rng.random_range(-0.3..0.3))
            .collect();
        net.set_params(&perturbed);
        net.adapt_grids(&xs).unwrap();
        check_gradient(&mut net, &xs, &ys, 40);
    }

    let data = random_points(2, 8, 7);
    let xs = rows(&data);
    let ys: Vec<f64> = xs.iter().map(|x| x[0] * x[1]).collect();
    let cfg = KanConfig {
        hidden_width: Some(9),
        grid_count: 5,
        ..KanConfig::default()
    };
    let mut wide = KanNetwork::from_config(2, &cfg, 5).unwrap();
    check_gradient(&mut wide, &xs, &ys, 30);

    let data = random_points(3, 10, 11);
    let xs = rows(&data);
    let ys: Vec<f64> = xs.iter().map(|x| x[0] - x[1] * x[2]).collect();
    let mut mlp = MlpNetwork::new(3, 7, TrainConfig::default(), 4).unwrap();
    check_gradient(&mut mlp, &xs, &ys, 1000);
}

pub fn subsumption_conserves_numerosity() {
    // exact plane: every linear rule is accurate, so identical offspring
    // (no crossover or mutation) are absorbed by their parents
    let data = unit_square(200, 5, |x| 0.3 * x[0] - 0.7 * x[1] + 0.1);
    let params = EvoParams {
        chi: 0.0,
        mu: 0.0,
        n: 1000,
        ..EvoParams::default()
    };
    let mut pop: Population<Consequent> = Population::new(params, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for x in [[0.2, 0.2], [0.8, 0.7], [0.5, 0.5]] {
        let r = pop.cover_rule(&x, &data, &ConsequentSpec::Linear, &mut rng).unwrap();
        assert_eq!(r.accuracy(), 1.0);
        pop.push(r);
    }
    let matched = pop.match_set(&[0.5, 0.5]);
    let before_len = pop.len();
    let before = pop.total_numerosity();
    pop.run_ea(&matched, &data, &ConsequentSpec::Linear, &mut rng, 1).unwrap();
    assert_eq!(pop.len(), before_len);
    assert_eq!(pop.total_numerosity(), before + 2);

    // general case: every new micro-rule is either a new macro-rule or an
    // increment on an existing one
    let data = unit_square(400, 8, |x| (5.0 * x[0]).sin() + x[1] * x[1]);
    for seed in 0..20u64 {
        let params = EvoParams {
            n: 10_000,
            r0: 0.5,
            ..EvoParams::default()
        };
        let mut pop: Population<Consequent> = Population::new(params, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = data.row(seed as usize).to_vec();
        for _ in 0..4 {
            let r = pop.cover_rule(&x, &data, &ConsequentSpec::Linear, &mut rng).unwrap();
            pop.push(r);
        }
        let matched = pop.match_set(&x);
        let nums_before: Vec<u32> = pop.rules().iter().map(Rule::numerosity).collect();
        let len_before = pop.len();
        let total_before = pop.total_numerosity();
        pop.run_ea(&matched, &data, &ConsequentSpec::Linear, &mut rng, 1).unwrap();
        let added_rules = (pop.len() - len_before) as u64;
        let absorbed: u64 = pop.rules()[..len_before]
            .iter()
            .zip(&nums_before)
            .map(|(r, b)| (r.numerosity() - b) as u64)
            .sum();
        let delta = pop.total_numerosity() - total_before;
        assert_eq!(delta, added_rules + absorbed, "seed {seed}");
        assert!(delta <= 2);
        assert!(pop.rules()[len_before..].iter().all(|r| r.numerosity() == 1));
    }
}

pub fn budget_holds_after_every_step() {
    let data = unit_square(300, 3, |x| (6.0 * x[0]).sin() * x[1]);
    let params = EvoParams {
        n: 8,
        epochs: 3,
        theta_ea: 10.0,
        r0: 0.3,
        eps0: 0.001,
        ..EvoParams::default()
    };
    let mut steps = 0;
    let mut evolved = 0;
    let pop = train_ruleset_observed(&data, &params, &ConsequentSpec::Linear, 9, &mut |ev, pop| {
        steps += 1;
        if ev == TrainEvent::Evolved {
            evolved += 1;
        }
        assert!(
            pop.total_numerosity() <= 8,
            "{} micro-rules after {ev:?}",
            pop.total_numerosity()
        );
        assert!(pop.rules().iter().all(|r| r.numerosity() >= 1));
    })
    .unwrap();
    assert!(evolved > 0);
    assert!(steps >= 900);
    assert_eq!(pop.iteration(), 900);
}

pub fn covering_contains_point() {
    let data = unit_square(500, 12, |x| x[0] + 2.0 * x[1]);
    for (seed, p_hash) in [(0u64, 0.0), (1, 0.5), (2, 1.0)] {
        let params = EvoParams {
            p_hash,
            r0: 0.2,
            ..EvoParams::default()
        };
        let mut pop: Population<Consequent> = Population::new(params, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..40 {
            let x = data.row(i).to_vec();
            let r = pop.cover_rule(&x, &data, &ConsequentSpec::Linear, &mut rng).unwrap();
            assert!(r.antecedent().matches(&x));
            assert!(r.error() < 1e-9, "exact plane should fit exactly, got {}", r.error());
            assert_eq!(r.accuracy(), 1.0);
            assert_eq!(r.fitness(), 0.01);
            for j in 0..2 {
                let (l, u) = (r.antecedent().lower()[j], r.antecedent().upper()[j]);
                assert!((0.0..=1.0).contains(&l) && (0.0..=1.0).contains(&u) && l <= u);
                if p_hash == 1.0 {
                    assert_eq!((l, u), (0.0, 1.0));
                } else if p_hash == 0.0 {
                    assert!(u - l <= 0.4 + 1e-12);
                }
            }
        }
    }
}

/// Mid-rank by counting, independent of the library's sorting approach.
fn count_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let less = v.iter().filter(|y| *y < x).count() as f64;
            let equal = v.iter().filter(|y| *y == x).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Two-sided p by listing every sign assignment.
pub fn enumerate_p(diffs: &[f64]) -> f64 {
    let d: Vec<f64> = diffs.iter().copied().filter(|v| *v != 0.0).collect();
    let ranks = count_ranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
    let m = d.len();
    let centre = ranks.iter().sum::<f64>() / 2.0;
    let observed: f64 = ranks.iter().zip(&d).filter(|(_, v)| **v > 0.0).map(|(r, _)| r).sum();
    let dev = (observed - centre).abs();
    let mut hits = 0u64;
    for mask in 0u64..(1 << m) {
        let w: f64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if (w - centre).abs() >= dev - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << m) as f64
}

pub fn wilcoxon_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut tied = 0;
    while checked < 50 {
        let coarse = checked % 5 == 0;
        let draw = |rng: &mut ChaCha8Rng| {
            let v = rng.random_range(0.0..1.0);
            // coarse values make tied magnitudes and zero differences likely
            if coarse {
                (v * 5.0f64).round() / 5.0
            } else {
                v
            }
        };
        let a: Vec<f64> = (0..6).map(|_| draw(&mut rng)).collect();
        let b: Vec<f64> = (0..6).map(|_| draw(&mut rng)).collect();
        let diffs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        if diffs.iter().filter(|d| **d != 0.0).count() < 2 {
            continue;
        }
        let mags: Vec<f64> = diffs.iter().filter(|d| **d != 0.0).map(|d| d.abs()).collect();
        if mags.iter().enumerate().any(|(i, x)| mags[..i].contains(x)) {
            tied += 1;
        }
        let p = wilcoxon_exact(&a, &b).unwrap();
        let oracle = enumerate_p(&diffs);
        assert!((p - oracle).abs() < 1e-12, "sample {checked}: {p} vs {oracle}");
        checked += 1;
    }
    assert!(tied > 0, "no tied samples were generated");
}
