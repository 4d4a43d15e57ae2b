//! Structure-modifying operators used inside the elementary reactions.
//!
//! All operators are pure: they read their inputs and return new solutions,
//! drawing randomness only from the generator they are handed.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{CroError, Result};
use crate::reactor::{Bounds, Solution};

/// What happens to a coordinate that leaves its interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryRule {
    /// `BP`: resample the coordinate uniformly inside its interval.
    Resample,
    /// `HP`: with probability 1/2 clamp to the violated bound, otherwise resample.
    Hybrid,
}

impl fmt::Display for BoundaryRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryRule::Resample => "BP",
            BoundaryRule::Hybrid => "HP",
        })
    }
}

/// How synthesis fuses two parent structures into one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SynthesisRule {
    /// Each coordinate copied from either parent with equal probability.
    ProbabilisticSelect,
    /// Blend crossover BLX-0.5.
    Blx05,
}

const BLX_ALPHA: f64 = 0.5;

fn uniform_in<R: Rng + ?Sized>(lower: f64, upper: f64, rng: &mut R) -> f64 {
    lower + (upper - lower) * rng.random::<f64>()
}

/// Maps `value` back into `[lower, upper]` according to `rule`.
pub fn apply_boundary<R: Rng + ?Sized>(
    value: f64,
    lower: f64,
    upper: f64,
    rule: BoundaryRule,
    rng: &mut R,
) -> f64 {
    if (lower..=upper).contains(&value) {
        return value;
    }
    match rule {
        BoundaryRule::Resample => uniform_in(lower, upper, rng),
        BoundaryRule::Hybrid => {
            if rng.random_bool(0.5) {
                if value > upper {
                    upper
                } else {
                    lower
                }
            } else {
                uniform_in(lower, upper, rng)
            }
        }
    }
}

fn perturb<R: Rng + ?Sized>(
    value: f64,
    sigma: f64,
    (lower, upper): (f64, f64),
    rule: BoundaryRule,
    rng: &mut R,
) -> f64 {
    let delta: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
    apply_boundary(value + delta, lower, upper, rule, rng)
}

/// Gaussian move on a single uniformly chosen coordinate.
pub fn neighborhood_search<R: Rng + ?Sized>(
    s: &[f64],
    step_size: &[f64],
    bounds: &Bounds,
    rule: BoundaryRule,
    rng: &mut R,
) -> Solution {
    debug_assert_eq!(s.len(), step_size.len());
    let mut out = s.to_vec();
    let i = rng.random_range(0..s.len());
    out[i] = perturb(s[i], step_size[i], bounds.interval(i), rule, rng);
    Solution::new(out)
}

/// Two independent children, each perturbing every coordinate with
/// probability 1/2.
pub fn decompose_structure<R: Rng + ?Sized>(
    s: &[f64],
    step_size: &[f64],
    bounds: &Bounds,
    rule: BoundaryRule,
    rng: &mut R,
) -> (Solution, Solution) {
    let child = |rng: &mut R| {
        let values = s
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if rng.random_bool(0.5) {
                    perturb(v, step_size[i], bounds.interval(i), rule, rng)
                } else {
                    v
                }
            })
            .collect();
        Solution::new(values)
    };
    let first = child(rng);
    let second = child(rng);
    (first, second)
}

/// Fuses two parents into one child.
pub fn synthesize_structure<R: Rng + ?Sized>(
    a: &[f64],
    b: &[f64],
    rule: SynthesisRule,
    bounds: &Bounds,
    boundary: BoundaryRule,
    rng: &mut R,
) -> Result<Solution> {
    if a.len() != b.len() {
        return Err(CroError::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let values = match rule {
        SynthesisRule::ProbabilisticSelect => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| if rng.random_bool(0.5) { x } else { y })
            .collect(),
        SynthesisRule::Blx05 => a
            .iter()
            .zip(b)
            .enumerate()
            .map(|(i, (&x, &y))| {
                let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
                let d = hi - lo;
                let v = uniform_in(lo - BLX_ALPHA * d, hi + BLX_ALPHA * d, rng);
                let (lower, upper) = bounds.interval(i);
                apply_boundary(v, lower, upper, boundary, rng)
            })
            .collect(),
    };
    Ok(Solution::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn in_bounds_value_passes_through() {
        let mut r = rng(1);
        for rule in [BoundaryRule::Resample, BoundaryRule::Hybrid] {
            assert_eq!(apply_boundary(50.0, -100.0, 100.0, rule, &mut r), 50.0);
        }
    }

    #[test]
    fn resample_is_uniform() {
        let mut r = rng(2);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| apply_boundary(150.0, -100.0, 100.0, BoundaryRule::Resample, &mut r))
            .collect();
        assert!(draws.iter().all(|v| (-100.0..=100.0).contains(v)));
        let m = mean(&draws);
        assert!((-2.0..=2.0).contains(&m), "mean {m}");
    }

    #[test]
    fn hybrid_clamps_about_half_the_time() {
        let mut r = rng(3);
        let clamped = (0..10_000)
            .filter(|_| apply_boundary(150.0, -100.0, 100.0, BoundaryRule::Hybrid, &mut r) == 100.0)
            .count();
        let freq = clamped as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&freq), "clamp frequency {freq}");
        let low = apply_boundary(-150.0, -100.0, 100.0, BoundaryRule::Hybrid, &mut rng(0));
        assert!((-100.0..=100.0).contains(&low));
    }

    #[test]
    fn neighborhood_search_gaussian_width() {
        let bounds = Bounds::uniform(5, -100.0, 100.0).unwrap();
        let s = vec![0.0; 5];
        let step = vec![100.0; 5];
        let mut r = rng(4);
        // About a third of N(0, 100) draws leave [-100, 100] and get resampled,
        // so the raw width is measured on a box that never binds.
        let wide = Bounds::uniform(5, -1e6, 1e6).unwrap();
        let deltas: Vec<f64> = (0..10_000)
            .map(|_| {
                let out = neighborhood_search(&s, &step, &wide, BoundaryRule::Resample, &mut r);
                out.iter().copied().find(|v| *v != 0.0).unwrap_or(0.0)
            })
            .collect();
        let m = mean(&deltas);
        let sd = (deltas.iter().map(|d| (d - m).powi(2)).sum::<f64>() / deltas.len() as f64).sqrt();
        assert!((97.0..=103.0).contains(&sd), "sample sd {sd}");
        let out = neighborhood_search(&s, &step, &bounds, BoundaryRule::Hybrid, &mut r);
        assert!(bounds.contains(&out));
    }

    #[test]
    fn neighborhood_search_changes_exactly_one_coordinate() {
        let bounds = Bounds::uniform(30, -100.0, 100.0).unwrap();
        let mut r = rng(5);
        let s: Vec<f64> = (0..30).map(|i| i as f64 - 15.0).collect();
        for _ in 0..1_000 {
            let out = neighborhood_search(&s, &[1.0; 30], &bounds, BoundaryRule::Resample, &mut r);
            let changed = out.iter().zip(&s).filter(|(a, b)| a != b).count();
            assert_eq!(changed, 1);
        }
    }

    #[test]
    fn vanishing_step_leaves_structure_unchanged() {
        let bounds = Bounds::uniform(4, -10.0, 10.0).unwrap();
        let s = [1.0, -2.0, 3.0, -4.0];
        let tiny = [1e-300; 4];
        let mut r = rng(6);
        let out = neighborhood_search(&s, &tiny, &bounds, BoundaryRule::Resample, &mut r);
        assert_eq!(out.as_slice(), &s);
        let (a, b) = decompose_structure(&s, &tiny, &bounds, BoundaryRule::Hybrid, &mut r);
        assert_eq!(a.as_slice(), &s);
        assert_eq!(b.as_slice(), &s);
    }

    #[test]
    fn decomposition_modifies_half_the_coordinates() {
        let bounds = Bounds::uniform(30, -100.0, 100.0).unwrap();
        let s = vec![0.0; 30];
        let mut r = rng(7);
        let mut counts = Vec::new();
        for _ in 0..1_000 {
            let (a, _) =
                decompose_structure(&s, &[1.0; 30], &bounds, BoundaryRule::Resample, &mut r);
            counts.push(a.iter().filter(|v| **v != 0.0).count() as f64);
        }
        let m = mean(&counts);
        assert!((14.4..=15.6).contains(&m), "mean modified {m}");
    }

    #[test]
    fn decomposition_children_stay_in_bounds() {
        let bounds = Bounds::uniform(10, -1.0, 1.0).unwrap();
        let mut r = rng(8);
        for _ in 0..10_000 {
            let s: Vec<f64> = (0..10).map(|_| r.random_range(-1.0..=1.0)).collect();
            let (a, b) = decompose_structure(&s, &[5.0; 10], &bounds, BoundaryRule::Hybrid, &mut r);
            assert!(bounds.contains(&a) && bounds.contains(&b));
        }
    }

    #[test]
    fn identical_parents_synthesize_to_themselves() {
        let bounds = Bounds::uniform(3, -10.0, 10.0).unwrap();
        let a = [1.0, 2.0, -3.0];
        let mut r = rng(9);
        for rule in [SynthesisRule::ProbabilisticSelect, SynthesisRule::Blx05] {
            let child = synthesize_structure(&a, &a, rule, &bounds, BoundaryRule::Resample, &mut r)
                .unwrap();
            assert_eq!(child.as_slice(), &a);
        }
    }

    #[test]
    fn probabilistic_select_frequency() {
        let bounds = Bounds::uniform(4, -10.0, 10.0).unwrap();
        let a = [0.0; 4];
        let b = [1.0; 4];
        let mut r = rng(10);
        let mut ones = [0usize; 4];
        for _ in 0..10_000 {
            let c = synthesize_structure(
                &a,
                &b,
                SynthesisRule::ProbabilisticSelect,
                &bounds,
                BoundaryRule::Resample,
                &mut r,
            )
            .unwrap();
            for (k, v) in c.iter().enumerate() {
                assert!(*v == 0.0 || *v == 1.0);
                if *v == 1.0 {
                    ones[k] += 1;
                }
            }
        }
        for n in ones {
            let f = n as f64 / 10_000.0;
            assert!((0.47..=0.53).contains(&f), "frequency {f}");
        }
    }

    #[test]
    fn blx_interval_and_mean() {
        let bounds = Bounds::uniform(1, -100.0, 100.0).unwrap();
        let mut r = rng(11);
        let draws: Vec<f64> = (0..10_000)
            .map(|_| {
                synthesize_structure(
                    &[0.0],
                    &[2.0],
                    SynthesisRule::Blx05,
                    &bounds,
                    BoundaryRule::Resample,
                    &mut r,
                )
                .unwrap()[0]
            })
            .collect();
        assert!(draws.iter().all(|v| (-1.0..=3.0).contains(v)));
        let m = mean(&draws);
        assert!((0.9..=1.1).contains(&m), "mean {m}");
    }

    #[test]
    fn synthesis_rejects_mismatched_parents() {
        let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
        let err = synthesize_structure(
            &[0.0, 0.0],
            &[0.0],
            SynthesisRule::Blx05,
            &bounds,
            BoundaryRule::Resample,
            &mut rng(0),
        )
        .unwrap_err();
        assert_eq!(err.kind(), "DimensionMismatch");
    }

    fn rule_strategy() -> impl Strategy<Value = BoundaryRule> {
        prop_oneof![Just(BoundaryRule::Resample), Just(BoundaryRule::Hybrid)]
    }

    proptest! {
        #[test]
        fn operators_return_in_bounds_and_leave_inputs_alone(
            seed in any::<u64>(),
            rule in rule_strategy(),
            blx in any::<bool>(),
            half_width in 0.5f64..200.0,
            step in 1e-3f64..500.0,
            raw in proptest::collection::vec(-1.0f64..=1.0, 1..12),
            raw_b in proptest::collection::vec(-1.0f64..=1.0, 12),
        ) {
            let d = raw.len();
            let bounds = Bounds::uniform(d, -half_width, half_width).unwrap();
            let a: Vec<f64> = raw.iter().map(|v| v * half_width).collect();
            let b: Vec<f64> = raw_b[..d].iter().map(|v| v * half_width).collect();
            let (a0, b0) = (a.clone(), b.clone());
            let steps = vec![step; d];
            let mut r = rng(seed);

            let n = neighborhood_search(&a, &steps, &bounds, rule, &mut r);
            prop_assert!(bounds.contains(&n));
            prop_assert!(n.iter().zip(&a).filter(|(x, y)| x != y).count() <= 1);

            let (c1, c2) = decompose_structure(&a, &steps, &bounds, rule, &mut r);
            prop_assert!(bounds.contains(&c1) && bounds.contains(&c2));

            let synth = if blx { SynthesisRule::Blx05 } else { SynthesisRule::ProbabilisticSelect };
            let s = synthesize_structure(&a, &b, synth, &bounds, rule, &mut r).unwrap();
            prop_assert!(bounds.contains(&s));

            prop_assert_eq!(a, a0);
            prop_assert_eq!(b, b0);
        }
    }
}
