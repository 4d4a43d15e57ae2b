//! Unshifted, unrotated base functions. Each is minimized at
//! [`BaseFunction::optimum`] with value 0.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

/// Per-dimension maximum of `z * sin(sqrt(|z|))`, attained at
/// [`SCHWEFEL_226_ARGMAX`].
pub const SCHWEFEL_226_OFFSET: f64 = 418.982_887_272_433_7;
pub const SCHWEFEL_226_ARGMAX: f64 = 420.968_746_359_982_03;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseFunction {
    Sphere,
    Schwefel12,
    Schwefel221,
    Schwefel222,
    Rosenbrock,
    Discus,
    Ackley,
    Schwefel226,
    Rastrigin,
    Griewank,
    Levy,
    Penalized1,
    Penalized2,
}

/// Boundary penalty `k (|x| - a)^m` outside `[-a, a]`, zero inside.
pub fn u_penalty(x: f64, a: f64, k: f64, m: i32) -> f64 {
    if x > a {
        k * (x - a).powi(m)
    } else if x < -a {
        k * (-x - a).powi(m)
    } else {
        0.0
    }
}

/// `y = 1 + (z + 1) / 4`.
fn levy_map(z: f64) -> f64 {
    1.0 + (z + 1.0) / 4.0
}

fn sin2(x: f64) -> f64 {
    let s = x.sin();
    s * s
}

impl BaseFunction {
    pub fn name(self) -> &'static str {
        match self {
            BaseFunction::Sphere => "Sphere",
            BaseFunction::Schwefel12 => "Schwefel 1.2",
            BaseFunction::Schwefel221 => "Schwefel 2.21",
            BaseFunction::Schwefel222 => "Schwefel 2.22",
            BaseFunction::Rosenbrock => "Rosenbrock",
            BaseFunction::Discus => "Discus",
            BaseFunction::Ackley => "Ackley",
            BaseFunction::Schwefel226 => "Schwefel 2.26",
            BaseFunction::Rastrigin => "Rastrigin",
            BaseFunction::Griewank => "Griewank",
            BaseFunction::Levy => "Levy",
            BaseFunction::Penalized1 => "Penalized 1",
            BaseFunction::Penalized2 => "Penalized 2",
        }
    }

    /// Coordinate value of the minimizer (the same in every dimension).
    pub fn optimum(self) -> f64 {
        match self {
            BaseFunction::Rosenbrock | BaseFunction::Penalized1 => 1.0,
            BaseFunction::Levy | BaseFunction::Penalized2 => -1.0,
            BaseFunction::Schwefel226 => SCHWEFEL_226_ARGMAX,
            _ => 0.0,
        }
    }

    pub fn evaluate(self, z: &[f64]) -> f64 {
        let n = z.len();
        let nf = n as f64;
        match self {
            BaseFunction::Sphere => z.iter().map(|v| v * v).sum(),
            BaseFunction::Schwefel12 => z
                .iter()
                .enumerate()
                .map(|(i, v)| (i + 1) as f64 * v * v)
                .sum(),
            BaseFunction::Schwefel221 => z.iter().fold(0.0, |m, v| m.max(v.abs())),
            BaseFunction::Schwefel222 => {
                z.iter().map(|v| v.abs()).sum::<f64>() + z.iter().map(|v| v.abs()).product::<f64>()
            }
            BaseFunction::Rosenbrock => z
                .windows(2)
                .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
                .sum(),
            BaseFunction::Discus => 1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>(),
            BaseFunction::Ackley => {
                let sq = z.iter().map(|v| v * v).sum::<f64>() / nf;
                let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / nf;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            BaseFunction::Schwefel226 => {
                SCHWEFEL_226_OFFSET * nf - z.iter().map(|v| v * v.abs().sqrt().sin()).sum::<f64>()
            }
            BaseFunction::Rastrigin => z
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
            BaseFunction::Griewank => {
                let sum = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / (i + 1) as f64).cos())
                    .product::<f64>();
                sum - prod + 1.0
            }
            BaseFunction::Levy => {
                let y: Vec<f64> = z.iter().map(|&v| levy_map(v)).collect();
                let body: f64 = y
                    .windows(2)
                    .map(|w| (w[0] - 1.0).powi(2) * (1.0 + 10.0 * sin2(w[1])))
                    .sum();
                let last = y[n - 1];
                sin2(PI * y[0]) + body + (last - 1.0).powi(2) * (1.0 + sin2(2.0 * PI * last))
            }
            BaseFunction::Penalized1 => {
                let body: f64 = z
                    .windows(2)
                    .map(|w| (w[0] - 1.0).powi(2) * (1.0 + sin2(3.0 * PI * w[1])))
                    .sum();
                let last = z[n - 1];
                let core = sin2(3.0 * PI * z[0])
                    + body
                    + (last - 1.0).powi(2) * (1.0 + sin2(2.0 * PI * last));
                0.1 * core + z.iter().map(|&v| u_penalty(v, 5.0, 100.0, 4)).sum::<f64>()
            }
            BaseFunction::Penalized2 => {
                let y: Vec<f64> = z.iter().map(|&v| levy_map(v)).collect();
                let body: f64 = y
                    .windows(2)
                    .map(|w| (w[0] - 1.0).powi(2) * (1.0 + 10.0 * sin2(PI * w[1])))
                    .sum();
                let core = 10.0 * sin2(PI * y[0]) + body + (y[n - 1] - 1.0).powi(2);
                PI / nf * core + z.iter().map(|&v| u_penalty(v, 10.0, 100.0, 4)).sum::<f64>()
            }
        }
    }
}
