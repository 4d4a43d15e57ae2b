//! Known-value checks run by `acro verify-benchmarks`.

use super::{u_penalty, BenchmarkId, BenchmarkInstance, SCHWEFEL_226_ARGMAX};
use crate::reactor::Objective;

/// Tolerance for an instance evaluated at its constructed optimum.
pub const OPTIMUM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct GoldenCheck {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    /// Pass when `|value - expected| <= tolerance`; a tolerance of 0 means exact.
    pub tolerance: f64,
}

impl GoldenCheck {
    fn new(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        GoldenCheck {
            name: name.into(),
            value,
            expected,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

/// Every instance at its constructed optimum, the u-penalty branches, and the
/// unscaled Schwefel 2.26 optimum.
pub fn golden_checks(dimension: usize, transform_seed: u64) -> Vec<GoldenCheck> {
    let mut checks = Vec::new();
    for id in BenchmarkId::all() {
        let inst = BenchmarkInstance::generate(id, dimension, transform_seed);
        let x = inst.constructed_optimum();
        checks.push(GoldenCheck::new(
            format!("{id} at constructed optimum"),
            inst.evaluate(&x),
            0.0,
            OPTIMUM_TOLERANCE,
        ));
    }
    for (x, expected) in [(6.0, 100.0), (3.0, 0.0), (-7.0, 1600.0)] {
        checks.push(GoldenCheck::new(
            format!("u({x}, 5, 100, 4)"),
            u_penalty(x, 5.0, 100.0, 4),
            expected,
            0.0,
        ));
    }
    let f13 = BenchmarkInstance::generate(BenchmarkId::new(13).unwrap(), dimension, transform_seed);
    checks.push(GoldenCheck::new(
        "f13 at x_i = 84.19374",
        f13.evaluate(&vec![84.19374; dimension]),
        0.0,
        1e-3,
    ));
    checks.push(GoldenCheck::new(
        "f13 at the exact argmax",
        f13.evaluate(&vec![SCHWEFEL_226_ARGMAX / 5.0; dimension]),
        0.0,
        OPTIMUM_TOLERANCE,
    ));
    checks
}
