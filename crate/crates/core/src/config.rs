//! Run configuration: metrics, parameter entries, sampling and tolerances.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ad::{CovectorField, MatrixField, ScalarField};
use crate::cases::{self, CaseChoices};
use crate::error::{Error, Result};
use crate::finsler::{ChartBox, ChartPoint, FinslerStructure};
use crate::tripathi::{EndoParam, FormParam, TripathiParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub dimension: usize,
    #[serde(default)]
    pub sample: SampleConfig,
    #[serde(default)]
    pub metrics: Vec<MetricEntry>,
    #[serde(default)]
    pub params: Vec<ParamEntry>,
    /// Overrides keyed by tolerance name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    pub seed: u64,
    pub points: usize,
    /// Points are drawn with `|xⁱ| ≤ half_width`.
    pub half_width: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 42,
            points: 50,
            half_width: 0.5,
            y_min: 0.5,
            y_max: 1.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricEntry {
    pub name: String,
    /// Source text of `L(x, y)`.
    pub source: String,
    /// Half width of the chart cube.
    #[serde(default = "default_chart")]
    pub chart: f64,
}

fn default_chart() -> f64 {
    1.0
}

/// A covector parameter: `"ell"`, `"zero"`, or one source per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormSource {
    Named(String),
    Components(Vec<String>),
}

/// An endomorphism parameter: `"identity"`, `"ricci"`, `"zero"`, or
/// row-major component sources `φⁱ_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EndoSource {
    Named(String),
    Components(Vec<String>),
}

/// Parameters given by a preset (`"vc"`, `"random"`), a case id with its
/// free choices, or explicit sources (missing ones are zero).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<FormSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<FormSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<FormSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<EndoSource>,
}

/// Parameters with the name they were configured under.
#[derive(Clone, Debug)]
pub struct NamedParams {
    pub name: String,
    pub params: TripathiParams,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        let cfg: Config =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// The bundled configuration: three planar metrics, the vanishing
    /// parameters and five random parameter fields.
    pub fn default_config() -> Config {
        let metric = |name: &str, source: &str| MetricEntry {
            name: name.into(),
            source: source.into(),
            chart: 1.0,
        };
        let mut params = vec![ParamEntry {
            name: "vc".into(),
            preset: Some("vc".into()),
            ..ParamEntry::default()
        }];
        params.extend((1..=5).map(|i| ParamEntry {
            name: format!("random-{i}"),
            preset: Some("random".into()),
            ..ParamEntry::default()
        }));
        Config {
            dimension: 2,
            sample: SampleConfig::default(),
            metrics: vec![
                metric("euclidean", "sqrt(y1^2 + y2^2)"),
                metric("riemannian", "sqrt(y1^2 + exp(2*x1)*y2^2)"),
                metric(
                    "randers",
                    "sqrt((1 + x2^2)*y1^2 + y2^2) + 0.5*sqrt(1 + x2^2)*y1",
                ),
            ],
            params,
            tolerances: BTreeMap::new(),
            output: None,
        }
    }

    /// The three sample metrics in dimension 3.
    pub fn default_config_3d() -> Config {
        let mut cfg = Config::default_config();
        cfg.dimension = 3;
        cfg.metrics = vec![
            MetricEntry {
                name: "euclidean".into(),
                source: "sqrt(y1^2 + y2^2 + y3^2)".into(),
                chart: 1.0,
            },
            MetricEntry {
                name: "riemannian".into(),
                source: "sqrt(y1^2 + exp(2*x1)*y2^2 + (1 + x2^2)*y3^2)".into(),
                chart: 1.0,
            },
            MetricEntry {
                name: "randers".into(),
                source: "sqrt((1 + x2^2)*y1^2 + y2^2 + exp(x1)*y3^2) + 0.5*sqrt(1 + x2^2)*y1"
                    .into(),
                chart: 1.0,
            },
        ];
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::Config("metric list is empty".into()));
        }
        let s = &self.sample;
        if s.points == 0 {
            return Err(Error::Config("sample.points must be positive".into()));
        }
        if !(s.y_min >= 0.1 && s.y_min < s.y_max) {
            return Err(Error::Config(
                "sample y-shell needs 0.1 ≤ y_min < y_max".into(),
            ));
        }
        if !(s.half_width > 0.0) {
            return Err(Error::Config("sample.half_width must be positive".into()));
        }
        for m in &self.metrics {
            if m.chart < s.half_width {
                return Err(Error::Config(format!(
                    "metric `{}`: chart half width {} is smaller than the sample box",
                    m.name, m.chart
                )));
            }
            self.structure_of(m)?;
        }
        for p in &self.params {
            p.resolve(self.dimension, self.sample.seed)?;
        }
        Ok(())
    }

    fn structure_of(&self, m: &MetricEntry) -> Result<FinslerStructure> {
        FinslerStructure::parse(
            m.name.clone(),
            self.dimension,
            &m.source,
            ChartBox::cube(self.dimension, m.chart),
        )
    }

    pub fn structures(&self) -> Result<Vec<FinslerStructure>> {
        self.metrics.iter().map(|m| self.structure_of(m)).collect()
    }

    pub fn metric(&self, name: &str) -> Result<FinslerStructure> {
        let m = self
            .metrics
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| Error::Config(format!("no metric named `{name}`")))?;
        self.structure_of(m)
    }

    pub fn resolved_params(&self) -> Result<Vec<NamedParams>> {
        self.params
            .iter()
            .map(|p| {
                Ok(NamedParams {
                    name: p.name.clone(),
                    params: p.resolve(self.dimension, self.sample.seed)?,
                })
            })
            .collect()
    }

    pub fn param(&self, name: &str) -> Result<NamedParams> {
        let p = self
            .params
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| Error::Config(format!("no parameter entry named `{name}`")))?;
        Ok(NamedParams {
            name: p.name.clone(),
            params: p.resolve(self.dimension, self.sample.seed)?,
        })
    }
}

fn scalar(n: usize, src: &str) -> Result<ScalarField> {
    ScalarField::parse(n, src)
}

fn form(n: usize, src: &FormSource) -> Result<FormParam> {
    match src {
        FormSource::Named(s) if s == "ell" => Ok(FormParam::Ell),
        FormSource::Named(s) if s == "zero" => Ok(FormParam::zero(n)),
        FormSource::Named(s) => Err(Error::Config(format!(
            "unknown covector `{s}` (use \"ell\", \"zero\" or a list)"
        ))),
        FormSource::Components(c) => Ok(FormParam::Field(CovectorField::parse(n, c)?)),
    }
}

fn matrix(n: usize, c: &[String]) -> Result<MatrixField> {
    MatrixField::parse(n, c)
}

fn endo(n: usize, src: &EndoSource) -> Result<EndoParam> {
    match src {
        EndoSource::Named(s) if s == "identity" => Ok(EndoParam::Identity),
        EndoSource::Named(s) if s == "ricci" => Ok(EndoParam::RicciCartan),
        EndoSource::Named(s) if s == "zero" => Ok(EndoParam::zero(n)),
        EndoSource::Named(s) => Err(Error::Config(format!(
            "unknown endomorphism `{s}` (use \"identity\", \"ricci\", \"zero\" or a list)"
        ))),
        EndoSource::Components(c) => Ok(EndoParam::Field(matrix(n, c)?)),
    }
}

/// Stable 64-bit hash of a name, used to give each entry its own stream.
pub(crate) fn name_stream(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

impl ParamEntry {
    pub fn resolve(&self, n: usize, seed: u64) -> Result<TripathiParams> {
        let bad = |msg: String| Error::Config(format!("parameter entry `{}`: {msg}", self.name));
        if let Some(preset) = &self.preset {
            if self.case.is_some() {
                return Err(bad("give either a preset or a case id".into()));
            }
            return match preset.as_str() {
                "vc" => Ok(TripathiParams::vc(n)),
                "random" => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(name_stream(&self.name));
                    random_params(n, &mut rng)
                }
                other => Err(bad(format!("unknown preset `{other}`"))),
            };
        }
        if let Some(id) = self.case {
            let choices = CaseChoices {
                t: self.t,
                f1: self.f1.as_deref().map(|s| scalar(n, s)).transpose()?,
                f2: self.f2.as_deref().map(|s| scalar(n, s)).transpose()?,
                a: self.a.as_ref().map(|s| form(n, s)).transpose()?,
                b: self.b.as_ref().map(|s| form(n, s)).transpose()?,
                u: self.u.as_ref().map(|s| form(n, s)).transpose()?,
                phi: match &self.phi {
                    None => None,
                    Some(EndoSource::Components(c)) => Some(matrix(n, c)?),
                    Some(EndoSource::Named(_)) => {
                        return Err(bad("a case takes φ as a component list".into()));
                    }
                },
            };
            return cases::preset(id, n, &choices);
        }
        let zero = || ScalarField::parse(n, "0");
        let params = TripathiParams {
            f1: self.f1.as_deref().map_or_else(zero, |s| scalar(n, s))?,
            f2: self.f2.as_deref().map_or_else(zero, |s| scalar(n, s))?,
            a: self
                .a
                .as_ref()
                .map_or_else(|| Ok(FormParam::zero(n)), |s| form(n, s))?,
            b: self
                .b
                .as_ref()
                .map_or_else(|| Ok(FormParam::zero(n)), |s| form(n, s))?,
            u: self
                .u
                .as_ref()
                .map_or_else(|| Ok(FormParam::zero(n)), |s| form(n, s))?,
            phi: self
                .phi
                .as_ref()
                .map_or_else(|| Ok(EndoParam::zero(n)), |s| endo(n, s))?,
        };
        params.check_dim(n)?;
        Ok(params)
    }
}

/// Source text of a polynomial of degree at most two in `(x, y)` with
/// coefficients drawn from `[−1, 1]`: all constant and linear terms plus one
/// quadratic monomial.
pub fn random_polynomial(n: usize, rng: &mut impl Rng) -> String {
    let names: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=n).map(|i| format!("y{i}")))
        .collect();
    let mut coef = || rng.gen_range(-1.0..=1.0f64);
    let mut out = format!("{:.6}", coef());
    for v in &names {
        out.push_str(&format!(" + ({:.6})*{v}", coef()));
    }
    let c = coef();
    let i = rng.gen_range(0..names.len());
    let j = rng.gen_range(0..names.len());
    out.push_str(&format!(" + ({c:.6})*{}*{}", names[i], names[j]));
    out
}

fn random_sources(n: usize, count: usize, rng: &mut impl Rng) -> Vec<String> {
    (0..count).map(|_| random_polynomial(n, rng)).collect()
}

/// Parameters whose every field is a random low-degree polynomial.
pub fn random_params(n: usize, rng: &mut impl Rng) -> Result<TripathiParams> {
    Ok(TripathiParams {
        f1: ScalarField::parse(n, &random_polynomial(n, rng))?,
        f2: ScalarField::parse(n, &random_polynomial(n, rng))?,
        a: FormParam::Field(CovectorField::parse(n, &random_sources(n, n, rng))?),
        b: FormParam::Field(CovectorField::parse(n, &random_sources(n, n, rng))?),
        u: FormParam::Field(CovectorField::parse(n, &random_sources(n, n, rng))?),
        phi: EndoParam::Field(MatrixField::parse(n, &random_sources(n, n * n, rng))?),
    })
}

/// Free case choices filled with random polynomials and a random `t`.
pub fn random_choices(n: usize, rng: &mut impl Rng) -> Result<CaseChoices> {
    Ok(CaseChoices {
        t: Some(rng.gen_range(-1.0..=1.0)),
        f1: Some(ScalarField::parse(n, &random_polynomial(n, rng))?),
        f2: Some(ScalarField::parse(n, &random_polynomial(n, rng))?),
        a: Some(FormParam::Field(CovectorField::parse(
            n,
            &random_sources(n, n, rng),
        )?)),
        b: Some(FormParam::Field(CovectorField::parse(
            n,
            &random_sources(n, n, rng),
        )?)),
        u: Some(FormParam::Field(CovectorField::parse(
            n,
            &random_sources(n, n, rng),
        )?)),
        phi: Some(MatrixField::parse(n, &random_sources(n, n * n, rng))?),
    })
}

/// Read points from text: one point per line as `2n` numbers, `x` first.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_points(text: &str, n: usize) -> Result<Vec<ChartPoint>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!("points line {}: `{s}` is not a number", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        if nums.len() != 2 * n {
            return Err(Error::Config(format!(
                "points line {}: expected {} numbers, found {}",
                lineno + 1,
                2 * n,
                nums.len()
            )));
        }
        out.push(ChartPoint::new(nums[..n].to_vec(), nums[n..].to_vec())?);
    }
    if out.is_empty() {
        return Err(Error::Config("points file holds no points".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = Config::default_config();
        let text = cfg.to_toml();
        assert_eq!(Config::from_toml(&text).unwrap(), cfg);
        let cfg3 = Config::default_config_3d();
        assert_eq!(Config::from_toml(&cfg3.to_toml()).unwrap(), cfg3);
    }

    #[test]
    fn empty_metric_list_is_rejected() {
        let mut cfg = Config::default_config();
        cfg.metrics.clear();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn shell_must_exclude_zero() {
        let mut cfg = Config::default_config();
        cfg.sample.y_min = 0.05;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn entries_resolve() {
        let text = r#"
dimension = 2
[[metrics]]
name = "e"
source = "sqrt(y1^2 + y2^2)"
[[params]]
name = "c22"
case = 22
u = ["0.3", "x1"]
[[params]]
name = "custom"
f1 = "0.5"
a = "ell"
phi = "identity"
"#;
        let cfg = Config::from_toml(text).unwrap();
        assert_eq!(cfg.resolved_params().unwrap().len(), 2);
        assert!(cfg.param("missing").is_err());
        assert!(cfg.metric("e").is_ok());
    }

    #[test]
    fn random_params_depend_on_name_and_seed() {
        let entry = |name: &str| ParamEntry {
            name: name.into(),
            preset: Some("random".into()),
            ..ParamEntry::default()
        };
        let src = |p: TripathiParams| p.f1.expr().to_string();
        let a = src(entry("r1").resolve(2, 42).unwrap());
        assert_eq!(a, src(entry("r1").resolve(2, 42).unwrap()));
        assert_ne!(a, src(entry("r2").resolve(2, 42).unwrap()));
        assert_ne!(a, src(entry("r1").resolve(2, 43).unwrap()));
    }

    #[test]
    fn points_file() {
        let pts = parse_points("# x1 x2 y1 y2\n0.1 0.2 1 0\n\n-0.1, 0, 0.5, 0.5\n", 2).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(parse_points("0.1 0.2 1\n", 2).is_err());
        assert!(parse_points("0 0 0 0\n", 2).is_err());
    }
}
