//! The 24 shifted and/or rotated benchmark functions.
//!
//! Each instance maps a point `x` to `z` (shift, optional rotation, scale) and
//! evaluates a [`BaseFunction`] at `z`. Every function has global minimum 0.

mod functions;
mod golden;
mod transform;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use functions::{u_penalty, BaseFunction, SCHWEFEL_226_ARGMAX, SCHWEFEL_226_OFFSET};
pub use golden::{golden_checks, GoldenCheck};
pub use transform::{
    generate_transform, import_cec_transform, load_raw_numbers, load_transform, save_transform,
    Rotation, TransformData, SHIFT_ENVELOPE,
};

use crate::error::{CroError, Result};
use crate::reactor::{Bounds, Objective};

/// Search box of every benchmark, per dimension.
pub const SEARCH_LOWER: f64 = -100.0;
pub const SEARCH_UPPER: f64 = 100.0;

/// `f1` .. `f24`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BenchmarkId(u8);

/// Static description of one benchmark row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionInfo {
    pub base: BaseFunction,
    pub shifted: bool,
    pub rotated: bool,
    pub scale: f64,
    pub name: &'static str,
}

const fn row(
    base: BaseFunction,
    shifted: bool,
    rotated: bool,
    scale: f64,
    name: &'static str,
) -> FunctionInfo {
    FunctionInfo {
        base,
        shifted,
        rotated,
        scale,
        name,
    }
}

use BaseFunction as B;

static TABLE: [FunctionInfo; 24] = [
    row(B::Sphere, true, false, 1.0, "Shifted Sphere"),
    row(B::Schwefel12, true, false, 1.0, "Shifted Schwefel 1.2"),
    row(
        B::Schwefel12,
        true,
        true,
        1.0,
        "Shifted Rotated Schwefel 1.2",
    ),
    row(B::Schwefel221, true, false, 1.0, "Shifted Schwefel 2.21"),
    row(
        B::Schwefel221,
        true,
        true,
        1.0,
        "Shifted Rotated Schwefel 2.21",
    ),
    row(B::Schwefel222, true, false, 0.1, "Shifted Schwefel 2.22"),
    row(
        B::Schwefel222,
        true,
        true,
        0.1,
        "Shifted Rotated Schwefel 2.22",
    ),
    row(B::Rosenbrock, true, false, 0.3, "Shifted Rosenbrock"),
    row(B::Rosenbrock, true, true, 0.3, "Shifted Rotated Rosenbrock"),
    row(B::Discus, true, false, 1.0, "Shifted Discus"),
    row(B::Ackley, true, false, 0.32, "Shifted Ackley"),
    row(B::Ackley, true, true, 0.32, "Shifted Rotated Ackley"),
    row(B::Schwefel226, false, false, 5.0, "Schwefel 2.26"),
    row(B::Schwefel226, false, true, 5.0, "Rotated Schwefel 2.26"),
    row(B::Rastrigin, true, false, 0.0512, "Shifted Rastrigin"),
    row(
        B::Rastrigin,
        true,
        true,
        0.0512,
        "Shifted Rotated Rastrigin",
    ),
    row(B::Griewank, true, false, 6.0, "Shifted Griewank"),
    row(B::Griewank, true, true, 6.0, "Shifted Rotated Griewank"),
    row(B::Levy, true, false, 0.1, "Shifted Levy"),
    row(B::Levy, true, true, 0.1, "Shifted Rotated Levy"),
    row(B::Penalized1, true, false, 0.5, "Shifted Penalized 1"),
    row(
        B::Penalized1,
        true,
        true,
        0.5,
        "Shifted Rotated Penalized 1",
    ),
    row(B::Penalized2, true, false, 0.5, "Shifted Penalized 2"),
    row(
        B::Penalized2,
        true,
        true,
        0.5,
        "Shifted Rotated Penalized 2",
    ),
];

impl BenchmarkId {
    pub fn new(number: u8) -> Option<Self> {
        (1..=24).contains(&number).then_some(BenchmarkId(number))
    }

    pub fn all() -> impl Iterator<Item = BenchmarkId> {
        (1..=24).map(BenchmarkId)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn info(self) -> &'static FunctionInfo {
        &TABLE[usize::from(self.0) - 1]
    }
}

impl fmt::Display for BenchmarkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}", self.0)
    }
}

impl FromStr for BenchmarkId {
    type Err = CroError;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s.trim().trim_start_matches(['f', 'F']);
        digits
            .parse::<u8>()
            .ok()
            .and_then(BenchmarkId::new)
            .ok_or_else(|| CroError::UnknownBenchmark(s.to_string()))
    }
}

impl TryFrom<String> for BenchmarkId {
    type Error = CroError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BenchmarkId> for String {
    fn from(id: BenchmarkId) -> String {
        id.to_string()
    }
}

/// One benchmark function bound to a dimension and its transform data.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkInstance {
    id: BenchmarkId,
    bounds: Bounds,
    transform: TransformData,
}

impl BenchmarkInstance {
    pub fn new(transform: TransformData) -> Self {
        let d = transform.dimension();
        BenchmarkInstance {
            id: transform.id,
            bounds: Bounds::uniform(d, SEARCH_LOWER, SEARCH_UPPER)
                .expect("dimension of a transform is at least 1"),
            transform,
        }
    }

    /// Instance with freshly generated transform data.
    pub fn generate(id: BenchmarkId, dimension: usize, transform_seed: u64) -> Self {
        BenchmarkInstance::new(generate_transform(transform_seed, id, dimension))
    }

    pub fn id(&self) -> BenchmarkId {
        self.id
    }

    pub fn info(&self) -> &'static FunctionInfo {
        self.id.info()
    }

    pub fn transform(&self) -> &TransformData {
        &self.transform
    }

    /// `z` for a given `x`.
    pub fn map_to_base(&self, x: &[f64]) -> Vec<f64> {
        let info = self.info();
        let t = &self.transform;
        let shifted: Vec<f64> = if info.shifted {
            x.iter().zip(&t.shift).map(|(a, o)| a - o).collect()
        } else {
            x.to_vec()
        };
        let mut z = if info.rotated {
            let mut out = vec![0.0; x.len()];
            t.rotation.apply(&shifted, &mut out);
            out
        } else {
            shifted
        };
        if t.scale != 1.0 {
            z.iter_mut().for_each(|v| *v *= t.scale);
        }
        z
    }

    /// The point where the base function's minimizer lands: the shift plus
    /// the back-rotated, unscaled base optimum.
    pub fn constructed_optimum(&self) -> Vec<f64> {
        let info = self.info();
        let d = self.dimension();
        let z_star = vec![info.base.optimum() / self.transform.scale; d];
        let unrotated = if info.rotated {
            self.transform.rotation.apply_transpose(&z_star)
        } else {
            z_star
        };
        if info.shifted {
            unrotated
                .iter()
                .zip(&self.transform.shift)
                .map(|(a, o)| a + o)
                .collect()
        } else {
            unrotated
        }
    }

    /// Checked evaluation.
    pub fn evaluate_benchmark(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dimension() {
            return Err(CroError::DimensionMismatch {
                expected: self.dimension(),
                actual: x.len(),
            });
        }
        Ok(self.evaluate(x))
    }
}

impl Objective for BenchmarkInstance {
    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension());
        self.info().base.evaluate(&self.map_to_base(x))
    }
}
