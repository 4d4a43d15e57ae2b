//! Shift vectors and rotation matrices: seeded generation, a checksummed text
//! format, and import of raw whitespace-separated data files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::BenchmarkId;
use crate::error::{CroError, Result};

/// Generated shift coordinates are drawn from `[-SHIFT_ENVELOPE, SHIFT_ENVELOPE]`.
pub const SHIFT_ENVELOPE: f64 = 80.0;

/// Dense row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    dim: usize,
    data: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Rotation { dim, data }
    }

    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(CroError::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Rotation { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Rotation::identity(self.dim)
    }

    /// `out = M v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    /// `M^T v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self.get(i, j) * v[i]).sum())
            .collect()
    }

    /// Largest entry-wise deviation of `M^T M` from the identity.
    pub fn orthogonality_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                let dot: f64 = (0..d).map(|k| self.get(k, a) * self.get(k, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Shift, rotation and scale binding a base function to one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformData {
    pub id: BenchmarkId,
    pub shift: Vec<f64>,
    pub rotation: Rotation,
    pub scale: f64,
    /// Seed the data was generated from (0 for imported data).
    pub seed: u64,
}

impl TransformData {
    pub fn dimension(&self) -> usize {
        self.shift.len()
    }
}

/// Deterministic transform for `(base_seed, id, dimension)`.
///
/// Shifted functions get a shift drawn uniformly from the shift envelope;
/// rotated functions get the orthogonal factor of a QR decomposition of a
/// standard Gaussian matrix, with column signs fixed so the result is
/// Haar-distributed.
pub fn generate_transform(base_seed: u64, id: BenchmarkId, dimension: usize) -> TransformData {
    assert!(dimension >= 1, "dimension must be positive");
    let info = id.info();
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream((u64::from(id.number()) << 32) | dimension as u64);

    let shift = if info.shifted {
        (0..dimension)
            .map(|_| rng.random_range(-SHIFT_ENVELOPE..=SHIFT_ENVELOPE))
            .collect()
    } else {
        vec![0.0; dimension]
    };
    let rotation = if info.rotated {
        random_orthogonal(dimension, &mut rng)
    } else {
        Rotation::identity(dimension)
    };
    TransformData {
        id,
        shift,
        rotation,
        scale: info.scale,
        seed: base_seed,
    }
}

fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Rotation {
    let gaussian = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    let data = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| q[(i, j)])
        .collect();
    Rotation { dim: d, data }
}

fn render_row(values: &[f64]) -> String {
    let mut line = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            line.push(' ');
        }
        // `{:e}` is the shortest representation that parses back exactly.
        write!(line, "{v:e}").unwrap();
    }
    line
}

/// Header, shift and rotation rows, each newline-terminated. The checksum
/// covers exactly these bytes.
fn canonical_payload(data: &TransformData) -> String {
    let d = data.dimension();
    let mut out = format!("{} {} {}\n", data.id, d, data.seed);
    out.push_str(&render_row(&data.shift));
    out.push('\n');
    for i in 0..d {
        out.push_str(&render_row(data.rotation.row(i)));
        out.push('\n');
    }
    out
}

pub fn save_transform(path: &Path, data: &TransformData) -> Result<()> {
    let payload = canonical_payload(data);
    let crc = crc32fast::hash(payload.as_bytes());
    fs::write(path, format!("{payload}{crc}\n")).map_err(|e| CroError::io(path, e))
}

fn parse_numbers(path: &Path, line: &str, expected: usize, what: &str) -> Result<Vec<f64>> {
    let values = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| CroError::format(path, format!("bad number `{tok}` in {what}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(CroError::format(
            path,
            format!("{what}: expected {expected} values, found {}", values.len()),
        ));
    }
    Ok(values)
}

pub fn load_transform(path: &Path) -> Result<TransformData> {
    let text = fs::read_to_string(path).map_err(|e| CroError::io(path, e))?;
    let lines: Vec<&str> = text.lines().collect();
    let header = lines
        .first()
        .ok_or_else(|| CroError::format(path, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [id, d, seed] = fields[..] else {
        return Err(CroError::format(path, "header must be `id D seed`"));
    };
    let id: BenchmarkId = id
        .parse()
        .map_err(|_| CroError::format(path, format!("unknown id `{id}`")))?;
    let d: usize = d
        .parse()
        .ok()
        .filter(|d| *d >= 1)
        .ok_or_else(|| CroError::format(path, format!("bad dimension `{d}`")))?;
    let seed: u64 = seed
        .parse()
        .map_err(|_| CroError::format(path, format!("bad seed `{seed}`")))?;
    if lines.len() != d + 3 {
        return Err(CroError::format(
            path,
            format!("expected {} lines for D={d}, found {}", d + 3, lines.len()),
        ));
    }
    let shift = parse_numbers(path, lines[1], d, "shift row")?;
    let mut rows = Vec::with_capacity(d * d);
    for (i, line) in lines[2..d + 2].iter().enumerate() {
        rows.extend(parse_numbers(path, line, d, &format!("rotation row {i}"))?);
    }
    let stored: u32 = lines[d + 2]
        .trim()
        .parse()
        .map_err(|_| CroError::format(path, "bad checksum line"))?;
    let data = TransformData {
        id,
        shift,
        rotation: Rotation::from_row_major(d, rows)?,
        scale: id.info().scale,
        seed,
    };
    let computed = crc32fast::hash(canonical_payload(&data).as_bytes());
    if stored != computed {
        return Err(CroError::ChecksumMismatch {
            path: path.to_path_buf(),
            stored,
            computed,
        });
    }
    Ok(data)
}

/// First `count` numbers of a whitespace-separated text file.
pub fn load_raw_numbers(path: &Path, count: usize) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CroError::io(path, e))?;
    let values = text
        .split_whitespace()
        .take(count)
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| CroError::format(path, format!("bad number `{tok}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() < count {
        return Err(CroError::format(
            path,
            format!("expected at least {count} numbers, found {}", values.len()),
        ));
    }
    Ok(values)
}

fn first_existing(candidates: Vec<PathBuf>) -> Option<PathBuf> {
    candidates.into_iter().find(|p| p.is_file())
}

/// Reads a transform from a directory of raw competition-style data files.
///
/// Per-function files are preferred: `shift_data_<k>.txt` and
/// `M_<k>_D<D>.txt` for benchmark `f<k>`. Shared `shift_data.txt` and
/// `M_D<D>.txt` are used as a fallback. Only the leading `D` (or `D*D`)
/// numbers of each file are read.
pub fn import_cec_transform(
    dir: &Path,
    id: BenchmarkId,
    dimension: usize,
) -> Result<TransformData> {
    let info = id.info();
    let k = id.number();
    let missing =
        |what: &str| CroError::format(dir, format!("no {what} file for {id} in directory"));

    let shift = if info.shifted {
        let path = first_existing(vec![
            dir.join(format!("shift_data_{k}.txt")),
            dir.join("shift_data.txt"),
        ])
        .ok_or_else(|| missing("shift"))?;
        load_raw_numbers(&path, dimension)?
    } else {
        vec![0.0; dimension]
    };
    let rotation = if info.rotated {
        let path = first_existing(vec![
            dir.join(format!("M_{k}_D{dimension}.txt")),
            dir.join(format!("M_D{dimension}.txt")),
        ])
        .ok_or_else(|| missing("rotation"))?;
        Rotation::from_row_major(dimension, load_raw_numbers(&path, dimension * dimension)?)?
    } else {
        Rotation::identity(dimension)
    };
    Ok(TransformData {
        id,
        shift,
        rotation,
        scale: info.scale,
        seed: 0,
    })
}
