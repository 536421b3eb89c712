//! Print-parameter table: loading, validation, encoding, splitting and scaling.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column order of the CSV schema.
pub const HEADER: [&str; 9] = [
    "layer_height",
    "wall_thickness",
    "infill_density",
    "infill_pattern",
    "nozzle_temperature",
    "bed_temperature",
    "print_speed",
    "fan_speed",
    "surface_roughness",
];

/// Number of encoded input features per sample.
pub const NUM_FEATURES: usize = 8;

const TABLE1: &str = include_str!("../data/table1.csv");

/// Infill pattern, ordinal-coded in the order the patterns first appear in the
/// experiment table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfillPattern {
    Grid,
    Honeycomb,
    Triangles,
    Cubic,
}

impl InfillPattern {
    pub fn as_str(self) -> &'static str {
        match self {
            InfillPattern::Grid => "grid",
            InfillPattern::Honeycomb => "honeycomb",
            InfillPattern::Triangles => "triangles",
            InfillPattern::Cubic => "cubic",
        }
    }

    /// Ordinal code: grid 0, honeycomb 1, triangles 2, cubic 3.
    pub fn code(self) -> f64 {
        match self {
            InfillPattern::Grid => 0.0,
            InfillPattern::Honeycomb => 1.0,
            InfillPattern::Triangles => 2.0,
            InfillPattern::Cubic => 3.0,
        }
    }
}

impl FromStr for InfillPattern {
    type Err = Error;

    /// Accepts any casing and embedded whitespace ("Honey comb", "triangl es").
    fn from_str(s: &str) -> Result<Self> {
        let token: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .flat_map(char::to_lowercase)
            .collect();
        match token.as_str() {
            "grid" => Ok(InfillPattern::Grid),
            "honeycomb" => Ok(InfillPattern::Honeycomb),
            "triangles" => Ok(InfillPattern::Triangles),
            "cubic" => Ok(InfillPattern::Cubic),
            _ => Err(Error::UnknownPattern(s.to_string())),
        }
    }
}

impl fmt::Display for InfillPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordinal code of a pattern token.
pub fn encode_pattern(token: &str) -> Result<f64> {
    token.parse::<InfillPattern>().map(InfillPattern::code)
}

/// One print run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// mm
    pub layer_height: f64,
    /// mm
    pub wall_thickness: f64,
    /// %
    pub infill_density: f64,
    pub infill_pattern: InfillPattern,
    /// °C
    pub nozzle_temperature: f64,
    /// °C
    pub bed_temperature: f64,
    /// mm/s
    pub print_speed: f64,
    /// %
    pub fan_speed: f64,
    /// μm, the regression target
    pub surface_roughness: f64,
}

impl Sample {
    /// Numeric feature vector in schema order with the pattern ordinal-coded.
    pub fn features(&self) -> [f64; NUM_FEATURES] {
        [
            self.layer_height,
            self.wall_thickness,
            self.infill_density,
            self.infill_pattern.code(),
            self.nozzle_temperature,
            self.bed_temperature,
            self.print_speed,
            self.fan_speed,
        ]
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let numeric = [
            ("layer_height", self.layer_height),
            ("wall_thickness", self.wall_thickness),
            ("infill_density", self.infill_density),
            ("nozzle_temperature", self.nozzle_temperature),
            ("bed_temperature", self.bed_temperature),
            ("print_speed", self.print_speed),
            ("fan_speed", self.fan_speed),
            ("surface_roughness", self.surface_roughness),
        ];
        if let Some((name, v)) = numeric.iter().find(|(_, v)| !v.is_finite()) {
            return Err(format!("{name} is not finite ({v})"));
        }
        if self.layer_height <= 0.0 {
            return Err(format!("layer_height must be positive, got {}", self.layer_height));
        }
        for (name, v) in [("infill_density", self.infill_density), ("fan_speed", self.fan_speed)] {
            if !(0.0..=100.0).contains(&v) {
                return Err(format!("{name} must be within [0, 100], got {v}"));
            }
        }
        Ok(())
    }
}

/// Loads a CSV file with the nine-column schema.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file)
}

/// Parses samples from any reader. Lines starting with `#` are comments.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<Sample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header = rdr.headers()?.clone();
    let matches = header.len() == HEADER.len()
        && header
            .iter()
            .zip(HEADER)
            .all(|(got, want)| got.eq_ignore_ascii_case(want));
    if !matches {
        return Err(Error::Schema(format!(
            "expected header `{}`, found `{}`",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut samples = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        // data rows are numbered from 1
        let row = i as u64 + 1;
        let row_err = |message: String| Error::Row { row, message };
        if record.len() != HEADER.len() {
            return Err(row_err(format!(
                "expected {} fields, found {}",
                HEADER.len(),
                record.len()
            )));
        }
        let num = |idx: usize| -> Result<f64> {
            let field = &record[idx];
            field.parse::<f64>().map_err(|_| {
                row_err(format!("{}: cannot parse {field:?} as a number", HEADER[idx]))
            })
        };
        let infill_pattern = record[3].parse::<InfillPattern>()?;
        let sample = Sample {
            layer_height: num(0)?,
            wall_thickness: num(1)?,
            infill_density: num(2)?,
            infill_pattern,
            nozzle_temperature: num(4)?,
            bed_temperature: num(5)?,
            print_speed: num(6)?,
            fan_speed: num(7)?,
            surface_roughness: num(8)?,
        };
        sample.validate().map_err(row_err)?;
        samples.push(sample);
    }
    Ok(samples)
}

/// Writes samples in the canonical schema (header plus one row each).
pub fn write_csv<W: Write>(samples: &[Sample], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(HEADER)?;
    for s in samples {
        wtr.write_record([
            s.layer_height.to_string(),
            s.wall_thickness.to_string(),
            s.infill_density.to_string(),
            s.infill_pattern.to_string(),
            s.nozzle_temperature.to_string(),
            s.bed_temperature.to_string(),
            s.print_speed.to_string(),
            s.fan_speed.to_string(),
            s.surface_roughness.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// The bundled 30-run experiment table.
pub fn table1() -> Vec<Sample> {
    read_csv(TABLE1.as_bytes()).expect("bundled table is valid")
}

/// Raw text of the bundled table, comments included.
pub fn table1_csv() -> &'static str {
    TABLE1
}

/// Feature matrix and target vector of a sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedDataset {
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl EncodedDataset {
    pub fn from_samples(samples: &[Sample]) -> Self {
        Self {
            features: samples.iter().map(|s| s.features().to_vec()).collect(),
            targets: samples.iter().map(|s| s.surface_roughness).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Train/test index partition of `n` items.
///
/// Indices are shuffled with a ChaCha8 stream seeded by `seed`; the first
/// `round(n · test_fraction)` shuffled indices form the test part. Both parts
/// are returned in ascending order.
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::Split(format!("need at least 2 samples, got {n}")));
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n_test = (n as f64 * test_fraction).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(Error::Split(format!(
            "test fraction {test_fraction} of {n} samples leaves an empty part"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = order[..n_test].to_vec();
    let mut train = order[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Splits `items` into (train, test) via [`split_indices`].
pub fn split<T: Clone>(items: &[T], test_fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    let (train, test) = split_indices(items.len(), test_fraction, seed)?;
    let pick = |idx: Vec<usize>| idx.into_iter().map(|i| items[i].clone()).collect();
    Ok((pick(train), pick(test)))
}

/// Per-feature min-max scaler onto [0, π].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureScaler {
    /// (min, max) per column, fitted on training rows.
    pub ranges: Vec<(f64, f64)>,
}

impl FeatureScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyTrainingSet)?;
        let width = first.len();
        let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); width];
        for row in rows {
            if row.len() != width {
                return Err(Error::Shape {
                    expected: width,
                    actual: row.len(),
                });
            }
            for (r, &v) in ranges.iter_mut().zip(row) {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        }
        Ok(Self { ranges })
    }

    pub fn width(&self) -> usize {
        self.ranges.len()
    }

    /// Maps each coordinate to π·(x − min)/(max − min), clamped to [0, π].
    /// Constant training columns map to π/2.
    pub fn transform(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.ranges.len() {
            return Err(Error::Shape {
                expected: self.ranges.len(),
                actual: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(&self.ranges)
            .map(|(&x, &(lo, hi))| {
                if hi > lo {
                    (PI * (x - lo) / (hi - lo)).clamp(0.0, PI)
                } else {
                    FRAC_PI_2
                }
            })
            .collect())
    }

    pub fn transform_all(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}

/// Affine map between the target range [min, max] and the readout range [−1, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetRange {
    pub y_min: f64,
    pub y_max: f64,
}

impl TargetRange {
    pub fn new(y_min: f64, y_max: f64) -> Result<Self> {
        if !(y_min.is_finite() && y_max.is_finite()) {
            return Err(Error::Config(format!("non-finite target range [{y_min}, {y_max}]")));
        }
        if y_min >= y_max {
            return Err(Error::DegenerateTargets(y_min));
        }
        Ok(Self { y_min, y_max })
    }

    pub fn fit(targets: &[f64]) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let lo = targets.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = targets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo, hi)
    }

    pub fn span(&self) -> f64 {
        self.y_max - self.y_min
    }

    /// y = y_min + (e + 1)/2 · (y_max − y_min)
    pub fn from_expectation(&self, e: f64) -> f64 {
        self.y_min + (e + 1.0) / 2.0 * self.span()
    }

    /// Inverse of [`from_expectation`](Self::from_expectation).
    pub fn to_expectation(&self, y: f64) -> f64 {
        2.0 * (y - self.y_min) / self.span() - 1.0
    }
}
