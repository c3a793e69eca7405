//! Model files.
//!
//! A model file is TOML:
//!
//! ```toml
//! name = "two_lambda"
//! mode = "exact"
//!
//! [lambda]
//! weights = ["1/2", "1/2"]
//! labels = ["lambda1", "lambda2"]
//!
//! [station1]
//! axes = [[0.0, 0.0, 1.0]]
//!
//! [station2]
//! axes = [[0.0, 0.0, 1.0]]
//!
//! [[kernel]]
//! setting = [0, 0]
//! lambda = 0
//! probs = ["0", "1", "0", "0"]
//! ```
//!
//! `probs` lists `p(↑↑), p(↑↓), p(↓↑), p(↓↓)`. Every (setting, lambda)
//! combination appears exactly once. Numbers may be TOML integers or floats,
//! or strings holding a decimal (`"0.25"`, `"2.5e-1"`) or a ratio (`"1/4"`).
//! In exact mode decimals are read exactly, so `0.1` is 1/10.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use bellcheck_core::model::{Axis, HiddenVariableModel, JointDistribution, SettingIndex, Station};
use bellcheck_core::prob::{Measure, SampleSpace};
use bellcheck_core::{Rational, Scalar, Tolerances};
use serde::{Deserialize, Serialize};

/// Axes whose norm is off by more than this are rejected; smaller errors are
/// normalized away.
pub const AXIS_SLACK: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] toml::de::Error),
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl fmt::Display) -> ModelFileError {
    ModelFileError::Field {
        path: path.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

/// A number as written in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational, String> {
        match self {
            Number::Int(n) => Ok(Rational::from_ratio(*n, 1)),
            Number::Float(x) if x.is_finite() => parse_rational(&format!("{x:?}")),
            Number::Float(x) => Err(format!("{x} is not finite")),
            Number::Text(s) => parse_rational(s),
        }
    }

    pub fn to_f64(&self) -> Result<f64, String> {
        match self {
            Number::Int(n) => Ok(*n as f64),
            Number::Float(x) if x.is_finite() => Ok(*x),
            Number::Float(x) => Err(format!("{x} is not finite")),
            Number::Text(s) => {
                if s.contains('/') {
                    parse_rational(s).map(|r| r.to_f64())
                } else {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| format!("{s:?} is not a number"))
                }
            }
        }
    }
}

/// `"p/q"`, an integer, or a decimal with optional exponent, read exactly.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    let bad = || format!("{text:?} is not a decimal or p/q ratio");
    if s.contains('/') {
        let r = Rational::from_str(s).map_err(|_| bad())?;
        return Ok(r);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    if exponent.unsigned_abs() > 400 {
        return Err(bad());
    }
    let scale = exponent - frac_part.len() as i32;
    let mut numer = format!("{}{int_part}{frac_part}", if negative { "-" } else { "" });
    let mut denom = String::from("1");
    if scale >= 0 {
        numer.extend(std::iter::repeat('0').take(scale as usize));
    } else {
        denom.extend(std::iter::repeat('0').take((-scale) as usize));
    }
    Rational::from_str(&format!("{numer}/{denom}")).map_err(|_| bad())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSection {
    pub weights: Vec<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationSection {
    pub axes: Vec<[Number; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelEntry {
    pub setting: [usize; 2],
    pub lambda: usize,
    pub probs: [Number; 4],
}

/// The file exactly as written, before any arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    #[serde(default)]
    pub mode: Mode,
    pub lambda: LambdaSection,
    pub station1: StationSection,
    pub station2: StationSection,
    pub kernel: Vec<KernelEntry>,
}

/// Conversion from file numbers into an arithmetic mode.
pub trait FromNumber: Scalar {
    fn from_number(n: &Number) -> Result<Self, String>;
}

impl FromNumber for Rational {
    fn from_number(n: &Number) -> Result<Self, String> {
        n.to_rational()
    }
}

impl FromNumber for f64 {
    fn from_number(n: &Number) -> Result<Self, String> {
        n.to_f64()
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, ModelFileError> {
        let file: ModelFile = toml::from_str(text)?;
        file.validate_shape()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, ModelFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ModelFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    fn validate_shape(&self) -> Result<(), ModelFileError> {
        let n = self.lambda.weights.len();
        if n == 0 {
            return Err(field("lambda.weights", "needs at least one weight"));
        }
        if let Some(labels) = &self.lambda.labels {
            if labels.len() != n {
                return Err(field(
                    "lambda.labels",
                    format!("{} labels for {n} weights", labels.len()),
                ));
            }
        }
        for (name, st) in [("station1", &self.station1), ("station2", &self.station2)] {
            if st.axes.is_empty() {
                return Err(field(format!("{name}.axes"), "needs at least one axis"));
            }
        }
        let (n1, n2) = (self.station1.axes.len(), self.station2.axes.len());
        let mut seen = vec![None; n1 * n2 * n];
        for (k, e) in self.kernel.iter().enumerate() {
            let [i, j] = e.setting;
            if i >= n1 || j >= n2 {
                return Err(field(
                    format!("kernel[{k}].setting"),
                    format!("[{i}, {j}] is outside the declared {n1} x {n2} axes"),
                ));
            }
            if e.lambda >= n {
                return Err(field(
                    format!("kernel[{k}].lambda"),
                    format!("{} is outside the {n} declared weights", e.lambda),
                ));
            }
            let slot = &mut seen[(i * n2 + j) * n + e.lambda];
            if let Some(first) = slot {
                return Err(field(
                    format!("kernel[{k}]"),
                    format!("duplicates kernel[{first}]"),
                ));
            }
            *slot = Some(k);
        }
        if let Some(missing) = seen.iter().position(Option::is_none) {
            let (pair, lambda) = (missing / n, missing % n);
            return Err(field(
                "kernel",
                format!(
                    "no entry for setting [{}, {}], lambda {lambda}",
                    pair / n2,
                    pair % n2
                ),
            ));
        }
        Ok(())
    }

    pub fn axes(&self, station: Station) -> Result<Vec<Axis>, ModelFileError> {
        let (name, st) = match station {
            Station::One => ("station1", &self.station1),
            Station::Two => ("station2", &self.station2),
        };
        st.axes
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let path = format!("{name}.axes[{k}]");
                let mut d = [0.0; 3];
                for (slot, n) in d.iter_mut().zip(v) {
                    *slot = n.to_f64().map_err(|m| field(path.clone(), m))?;
                }
                Axis::new(d)
                    .or_else(|_| Axis::normalized(d, AXIS_SLACK))
                    .map_err(|e| field(path, e))
            })
            .collect()
    }

    /// The model in arithmetic `S`.
    pub fn build<S: FromNumber>(&self) -> Result<HiddenVariableModel<S>, ModelFileError> {
        let weights = self
            .lambda
            .weights
            .iter()
            .enumerate()
            .map(|(k, w)| S::from_number(w).map_err(|m| field(format!("lambda.weights[{k}]"), m)))
            .collect::<Result<Vec<S>, _>>()?;
        let space = match &self.lambda.labels {
            Some(labels) => SampleSpace::with_labels(labels.clone()),
            None => SampleSpace::new(weights.len()),
        }
        .map_err(|e| field("lambda", e))?;
        let prior = Measure::with_tolerance(space, weights, Tolerances::DEFAULT.norm)
            .map_err(|e| field("lambda.weights", e))?;
        let axes1 = self.axes(Station::One)?;
        let axes2 = self.axes(Station::Two)?;
        let n = self.lambda.weights.len();
        let n2 = axes2.len();
        let mut order = vec![0usize; self.kernel.len()];
        for (k, e) in self.kernel.iter().enumerate() {
            order[(e.setting[0] * n2 + e.setting[1]) * n + e.lambda] = k;
        }
        let mut kernels = Vec::with_capacity(order.len());
        for &k in &order {
            let e = &self.kernel[k];
            let mut p = Vec::with_capacity(4);
            for (c, v) in e.probs.iter().enumerate() {
                p.push(S::from_number(v).map_err(|m| field(format!("kernel[{k}].probs[{c}]"), m))?);
            }
            let p: [S; 4] = p.try_into().expect("four entries");
            kernels.push(
                JointDistribution::with_tolerance(p, Tolerances::DEFAULT.norm)
                    .map_err(|err| field(format!("kernel[{k}].probs"), err))?,
            );
        }
        HiddenVariableModel::new(prior, axes1, axes2, kernels).map_err(|e| field("station axes", e))
    }

    /// Canonical form of a model: numbers as exact ratio strings in exact
    /// mode and as floats in float mode, kernels sorted by (setting, lambda).
    pub fn from_model<S: Scalar>(name: &str, mode: Mode, model: &HiddenVariableModel<S>) -> Self {
        let number = |v: &S| match mode {
            Mode::Exact => Number::Text(v.to_string()),
            Mode::Float => Number::Float(v.to_f64()),
        };
        let station = |st: Station| StationSection {
            axes: model
                .axes(st)
                .iter()
                .map(|a| a.direction().map(Number::Float))
                .collect(),
        };
        let mut kernel = Vec::new();
        for s in model.settings() {
            for lambda in 0..model.lambda_count() {
                kernel.push(KernelEntry {
                    setting: [s.station1, s.station2],
                    lambda,
                    probs: model.kernel(s, lambda).probs().clone().map(|p| number(&p)),
                });
            }
        }
        ModelFile {
            name: name.to_string(),
            mode,
            lambda: LambdaSection {
                weights: model.prior().weights().iter().map(number).collect(),
                labels: model.lambda_space().labels().map(<[String]>::to_vec),
            },
            station1: station(Station::One),
            station2: station(Station::Two),
            kernel,
        }
    }

    /// Rewrites the file in canonical form.
    pub fn canonical(&self) -> Result<Self, ModelFileError> {
        Ok(match self.mode {
            Mode::Exact => Self::from_model(&self.name, Mode::Exact, &self.build::<Rational>()?),
            Mode::Float => Self::from_model(&self.name, Mode::Float, &self.build::<f64>()?),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model files serialize")
    }

    pub fn lambda_label(&self, lambda: usize) -> String {
        self.lambda
            .labels
            .as_ref()
            .map(|l| l[lambda].clone())
            .unwrap_or_else(|| format!("lambda{lambda}"))
    }

    pub fn settings(&self) -> impl Iterator<Item = SettingIndex> + '_ {
        let n2 = self.station2.axes.len();
        (0..self.station1.axes.len() * n2).map(move |k| SettingIndex::new(k / n2, k % n2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/4").unwrap(), r(1, 4));
        assert_eq!(parse_rational("0.1").unwrap(), r(1, 10));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), r(-1, 4));
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert_eq!(parse_rational(".5").unwrap(), r(1, 2));
        assert_eq!(parse_rational("1e2").unwrap(), r(100, 1));
        for bad in ["", ".", "x", "1/0", "1.2.3", "1e", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn floats_read_as_their_shortest_decimal() {
        assert_eq!(Number::Float(0.1).to_rational().unwrap(), r(1, 10));
        assert_eq!(Number::Float(1e-7).to_rational().unwrap(), r(1, 10_000_000));
        assert_eq!(Number::Text("1/3".into()).to_f64().unwrap(), 1.0 / 3.0);
    }
}
