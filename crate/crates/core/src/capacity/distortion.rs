use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Allowed deviation of a tabulated distortion from `u(0) = 0`, `u(1) = 1`.
pub const TABLE_ENDPOINT_TOLERANCE: f64 = 1e-12;

/// A normalized nondecreasing map `u: [0, 1] -> [0, 1]`.
///
/// Composed with a probability (or normalized Lebesgue measure) it yields a
/// distorted capacity `A -> u(P(A))`. Concave distortions give submodular
/// capacities.
#[derive(Clone, Debug, PartialEq)]
pub enum Distortion {
    /// `u(t) = t`; the undistorted, additive case.
    Identity,
    /// `u(t) = t^alpha` with `alpha > 0`.
    Power(f64),
    /// `u(t) = 2t / (t + 1)`.
    Moebius,
    /// Piecewise-linear interpolation of a monotone table.
    Tabulated(DistortionTable),
    /// The dual distortion `t -> 1 - u(1 - t)`, so that the dual capacity of
    /// `u o P` is `dual(u) o P`.
    Dual(Box<Distortion>),
}

impl Distortion {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Distortion(format!("power exponent must be positive and finite, got {alpha}")));
        }
        Ok(Distortion::Power(alpha))
    }

    /// Parses a distortion as written on the command line: `identity`, `power:<alpha>`,
    /// `moebius` or `table:<path>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        match spec {
            "identity" => return Ok(Distortion::Identity),
            "moebius" => return Ok(Distortion::Moebius),
            _ => {}
        }
        if let Some(alpha) = spec.strip_prefix("power:") {
            let alpha: f64 =
                alpha.trim().parse().map_err(|_| Error::Distortion(format!("bad power exponent `{alpha}`")))?;
            return Distortion::power(alpha);
        }
        if let Some(path) = spec.strip_prefix("table:") {
            return DistortionTable::from_csv_path(path.trim()).map(Distortion::Tabulated);
        }
        Err(Error::Distortion(format!(
            "unknown distortion `{spec}` (expected identity, power:<alpha>, moebius or table:<path>)"
        )))
    }

    /// Evaluates `u(t)`; arguments are clamped to `[0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self {
            Distortion::Identity => t,
            Distortion::Power(alpha) => t.powf(*alpha),
            Distortion::Moebius => 2.0 * t / (t + 1.0),
            Distortion::Tabulated(table) => table.eval(t),
            Distortion::Dual(inner) => 1.0 - inner.eval(1.0 - t),
        }
    }

    /// The distortion of the dual capacity. The identity is self-dual.
    pub fn dual(&self) -> Distortion {
        match self {
            Distortion::Identity => Distortion::Identity,
            other => Distortion::Dual(Box::new(other.clone())),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Distortion::Identity)
    }

    /// Short name, in the command-line grammar where possible.
    pub fn label(&self) -> String {
        match self {
            Distortion::Identity => "identity".into(),
            Distortion::Power(alpha) => format!("power:{alpha}"),
            Distortion::Moebius => "moebius".into(),
            Distortion::Tabulated(table) => match &table.source {
                Some(path) => format!("table:{path}"),
                None => "table".into(),
            },
            Distortion::Dual(inner) => format!("dual({})", inner.label()),
        }
    }
}

impl fmt::Display for Distortion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl serde::Serialize for Distortion {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl FromStr for Distortion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Distortion::from_spec(s)
    }
}

/// Sample table `(t_i, u_i)` of a distortion, interpolated linearly.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionTable {
    ts: Vec<f64>,
    us: Vec<f64>,
    source: Option<String>,
}

impl DistortionTable {
    /// Builds a table. `t` must increase strictly from 0 to 1, `u` must be
    /// nondecreasing with `u(0) = 0` and `u(1) = 1` up to
    /// [`TABLE_ENDPOINT_TOLERANCE`].
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Distortion("table needs at least two rows".into()));
        }
        let bad = |msg: String| Err(Error::Distortion(msg));
        if points.iter().any(|(t, u)| !t.is_finite() || !u.is_finite()) {
            return bad("table contains non-finite entries".into());
        }
        let (t0, u0) = points[0];
        let (t1, u1) = points[points.len() - 1];
        if t0 != 0.0 || t1 != 1.0 {
            return bad(format!("table must span t = 0 .. 1, got {t0} .. {t1}"));
        }
        if u0.abs() > TABLE_ENDPOINT_TOLERANCE || (u1 - 1.0).abs() > TABLE_ENDPOINT_TOLERANCE {
            return bad(format!("table must satisfy u(0) = 0 and u(1) = 1, got {u0} and {u1}"));
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return bad(format!("t not strictly increasing at row {}", i + 1));
            }
            if w[1].1 < w[0].1 {
                return bad(format!("u decreases at row {}", i + 1));
            }
        }
        Ok(DistortionTable {
            ts: points.iter().map(|p| p.0).collect(),
            us: points.iter().map(|p| p.1.clamp(0.0, 1.0)).collect(),
            source: None,
        })
    }

    /// Samples `u` on `size + 1` equispaced nodes.
    pub fn sample(u: impl Fn(f64) -> f64, size: usize) -> Result<Self> {
        let size = size.max(1);
        let points: Vec<(f64, f64)> = (0..=size)
            .map(|i| {
                let t = i as f64 / size as f64;
                (t, u(t))
            })
            .collect();
        Self::from_points(&points)
    }

    /// Reads a two-column `t,u` CSV file. A non-numeric first row is
    /// treated as a header.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut points = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            if record.len() != 2 {
                return Err(Error::Distortion(format!(
                    "{}: row {} has {} columns, expected 2",
                    path.display(),
                    row + 1,
                    record.len()
                )));
            }
            match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(t), Ok(u)) => points.push((t, u)),
                _ if row == 0 => continue,
                _ => return Err(Error::Distortion(format!("{}: row {} is not numeric", path.display(), row + 1))),
            }
        }
        let mut table = Self::from_points(&points)?;
        table.source = Some(path.display().to_string());
        Ok(table)
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ts.iter().copied().zip(self.us.iter().copied())
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.ts.partition_point(|&x| x <= t);
        if i == 0 {
            return self.us[0];
        }
        if i >= self.ts.len() {
            return self.us[self.us.len() - 1];
        }
        let (t0, t1) = (self.ts[i - 1], self.ts[i]);
        let (u0, u1) = (self.us[i - 1], self.us[i]);
        u0 + (u1 - u0) * (t - t0) / (t1 - t0)
    }
}
