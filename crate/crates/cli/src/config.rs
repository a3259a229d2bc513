//! Experiment configuration: JSON documents validated before any computation.

use std::fmt;
use std::path::PathBuf;

use cradon_core::distributions::{TestDistribution, XFunction};
use cradon_core::geometry::CompactSet;
use cradon_core::harness::{
    BridgeParams, CalibrationCheck, DualBoundCheck, ForwardCheck, GeometryParams, PairingParams, RoundTripCheck,
    SupportParams,
};
use cradon_core::transform::TestFunction;
use cradon_core::Point;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Transform,
    Invert,
    Calibrate,
    Duality,
    Lemma1,
    DualBound,
    SupportForward,
    SupportConverse,
    RealBridge,
    Geometry,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Transform => "transform",
            ExperimentKind::Invert => "invert",
            ExperimentKind::Calibrate => "calibrate",
            ExperimentKind::Duality => "duality",
            ExperimentKind::Lemma1 => "lemma1",
            ExperimentKind::DualBound => "dual-bound",
            ExperimentKind::SupportForward => "support-forward",
            ExperimentKind::SupportConverse => "support-converse",
            ExperimentKind::RealBridge => "real-bridge",
            ExperimentKind::Geometry => "geometry",
        }
    }

    /// Object fields the experiment requires, and those it accepts.
    fn fields(self) -> (&'static [&'static str], &'static [&'static str]) {
        use ExperimentKind::*;
        match self {
            Transform | Invert | RealBridge => (&["function"], &["function"]),
            Calibrate => (&[], &[]),
            Duality => (&["function", "xfunction"], &["function", "xfunction"]),
            Lemma1 => (&["function", "xfunction"], &["function", "xfunction", "probes"]),
            DualBound => (&["xfunction", "radius"], &["xfunction", "radius", "probes"]),
            SupportForward => (&["distribution", "set", "margin"], &["distribution", "set", "margin"]),
            SupportConverse => (&["distribution", "set", "witness"], &["distribution", "set", "witness", "inside"]),
            Geometry => (&["set"], &["set"]),
        }
    }
}

/// Evaluation points: seeded random points in a ball, or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeSpec {
    /// The origin plus `count − 1` seeded points with `|z| ≤ radius`.
    Random { count: usize, radius: f64, seed: u64 },
    Points(Vec<Point>),
}

/// Requested artifacts besides the JSON and CSV reports.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory; `--out` takes precedence.
    pub dir: Option<PathBuf>,
    /// Write the forward sinogram (transform, invert, real-bridge).
    pub sinogram: bool,
    /// Write the reconstructed volume (invert).
    pub volume: bool,
}

/// An experiment document. `P` is the parameter block of the experiment kind; missing
/// parameters take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config<P> {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<TestFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xfunction: Option<XFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<TestDistribution>,
    /// Distribution supported in the set, for the proof-chain inclusions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inside: Option<TestDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<CompactSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// Support radius `R` of `h` in the dual-bound experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<ProbeSpec>,
    #[serde(default)]
    pub params: P,
    #[serde(default, skip_serializing)]
    pub output: OutputSpec,
}

/// A parsed configuration with the parameter block of its kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Experiment {
    Transform(Config<ForwardCheck>),
    Invert(Config<RoundTripCheck>),
    Calibrate(Config<CalibrationCheck>),
    Duality(Config<PairingParams>),
    Lemma1(Config<PairingParams>),
    DualBound(Config<DualBoundCheck>),
    SupportForward(Config<SupportParams>),
    SupportConverse(Config<SupportParams>),
    RealBridge(Config<BridgeParams>),
    Geometry(Config<GeometryParams>),
}

/// Invalid configuration, with the JSON path and source position when known.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), line: None, column: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, "line {l}, column {c}: ")?;
        }
        if !self.path.is_empty() && self.path != "." {
            write!(f, "at `{}`: ", self.path)?;
        }
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn from_json_error(path: String, e: &serde_json::Error) -> ConfigError {
    let (line, column) = if e.line() > 0 { (Some(e.line()), Some(e.column())) } else { (None, None) };
    // serde_json appends " at line L column C"; the position is reported separately.
    let msg = e.to_string();
    let message = match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg,
    };
    ConfigError { path, line, column, message }
}

fn typed<T: DeserializeOwned>(text: &str) -> Result<T, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        from_json_error(path, e.inner())
    })?;
    de.end().map_err(|e| from_json_error(String::new(), &e))?;
    Ok(value)
}

/// Applies `key=value` overrides to a JSON document. Keys are dotted paths; numeric
/// segments index arrays. Values are parsed as JSON, falling back to a string.
pub fn apply_overrides(doc: &mut Value, overrides: &[String]) -> Result<(), ConfigError> {
    for ov in overrides {
        let (key, raw) = ov
            .split_once('=')
            .ok_or_else(|| ConfigError::at("", format!("override `{ov}` is not of the form key=value")))?;
        if key.is_empty() {
            return Err(ConfigError::at("", format!("override `{ov}` has an empty key")));
        }
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut node = &mut *doc;
        let segments: Vec<&str> = key.split('.').collect();
        for (i, seg) in segments.iter().enumerate() {
            let last = i + 1 == segments.len();
            node = match node {
                Value::Array(items) => {
                    let idx: usize = seg
                        .parse()
                        .map_err(|_| ConfigError::at(key, format!("`{seg}` does not index an array")))?;
                    let len = items.len();
                    items.get_mut(idx).ok_or_else(|| ConfigError::at(key, format!("index {idx} out of range (length {len})")))?
                }
                Value::Object(map) => {
                    if last {
                        map.insert(seg.to_string(), Value::Null);
                    }
                    map.entry(seg.to_string()).or_insert_with(|| Value::Object(Default::default()))
                }
                _ => return Err(ConfigError::at(key, format!("`{seg}` cannot be set on a scalar"))),
            };
        }
        *node = value;
    }
    Ok(())
}

/// Parses a document, applying overrides first. Positions refer to the original text
/// when there are no overrides.
pub fn parse(text: &str, overrides: &[String]) -> Result<Experiment, ConfigError> {
    let owned;
    let text = if overrides.is_empty() {
        text
    } else {
        let mut doc: Value = typed(text)?;
        apply_overrides(&mut doc, overrides)?;
        owned = serde_json::to_string_pretty(&doc).expect("a JSON value serialises");
        &owned
    };

    #[derive(Deserialize)]
    struct Head {
        experiment: Option<Value>,
    }
    let head: Head = typed(text)?;
    let kind: ExperimentKind = match head.experiment {
        None => return Err(ConfigError::at("experiment", "missing field `experiment`")),
        Some(v) => serde_json::from_value(v).map_err(|e| {
            ConfigError::at(
                "experiment",
                format!(
                    "{e}; expected one of transform, invert, calibrate, duality, lemma1, dual-bound, \
                     support-forward, support-converse, real-bridge, geometry"
                ),
            )
        })?,
    };
    let exp = match kind {
        ExperimentKind::Transform => Experiment::Transform(typed(text)?),
        ExperimentKind::Invert => Experiment::Invert(typed(text)?),
        ExperimentKind::Calibrate => Experiment::Calibrate(typed(text)?),
        ExperimentKind::Duality => Experiment::Duality(typed(text)?),
        ExperimentKind::Lemma1 => Experiment::Lemma1(typed(text)?),
        ExperimentKind::DualBound => Experiment::DualBound(typed(text)?),
        ExperimentKind::SupportForward => Experiment::SupportForward(typed(text)?),
        ExperimentKind::SupportConverse => Experiment::SupportConverse(typed(text)?),
        ExperimentKind::RealBridge => Experiment::RealBridge(typed(text)?),
        ExperimentKind::Geometry => Experiment::Geometry(typed(text)?),
    };
    exp.validate()?;
    Ok(exp)
}

fn present<P>(c: &Config<P>) -> Vec<&'static str> {
    let mut out = Vec::new();
    let flags = [
        ("function", c.function.is_some()),
        ("xfunction", c.xfunction.is_some()),
        ("distribution", c.distribution.is_some()),
        ("inside", c.inside.is_some()),
        ("set", c.set.is_some()),
        ("witness", c.witness.is_some()),
        ("margin", c.margin.is_some()),
        ("radius", c.radius.is_some()),
        ("probes", c.probes.is_some()),
    ];
    for (name, on) in flags {
        if on {
            out.push(name);
        }
    }
    out
}

fn core_err(path: &str) -> impl Fn(cradon_core::Error) -> ConfigError + '_ {
    move |e| ConfigError::at(path, e.to_string())
}

impl<P> Config<P> {
    fn check_objects(&self) -> Result<(), ConfigError> {
        let (required, allowed) = self.experiment.fields();
        let have = present(self);
        for r in required {
            if !have.contains(r) {
                return Err(ConfigError::at(
                    *r,
                    format!("missing field `{r}`, required by the {} experiment", self.experiment.name()),
                ));
            }
        }
        for h in have {
            if !allowed.contains(&h) {
                return Err(ConfigError::at(h, format!("field `{h}` is not used by the {} experiment", self.experiment.name())));
            }
        }
        if let Some(f) = &self.function {
            for (i, t) in f.terms.iter().enumerate() {
                t.validate().map_err(|e| ConfigError::at(format!("function.terms[{i}]"), e.to_string()))?;
            }
        }
        if let Some(x) = &self.xfunction {
            for (i, t) in x.terms.iter().enumerate() {
                t.validate().map_err(|e| ConfigError::at(format!("xfunction.terms[{i}]"), e.to_string()))?;
            }
        }
        if let Some(d) = &self.distribution {
            d.validate().map_err(core_err("distribution"))?;
        }
        if let Some(d) = &self.inside {
            d.validate().map_err(core_err("inside"))?;
        }
        if let Some(k) = &self.set {
            k.validate().map_err(core_err("set"))?;
        }
        if let Some(w) = &self.witness {
            if !w.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                return Err(ConfigError::at("witness", "witness must be finite"));
            }
        }
        if let Some(m) = self.margin {
            if !(m > 0.0 && m.is_finite()) {
                return Err(ConfigError::at("margin", format!("margin must be positive, got {m}")));
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(ConfigError::at("radius", format!("radius must be positive, got {r}")));
            }
        }
        match &self.probes {
            Some(ProbeSpec::Random { count, radius, .. }) => {
                if *count == 0 || !(*radius > 0.0 && radius.is_finite()) {
                    return Err(ConfigError::at("probes.random", "probe count must be ≥ 1 and radius positive"));
                }
            }
            Some(ProbeSpec::Points(p)) if p.is_empty() => {
                return Err(ConfigError::at("probes.points", "probe list is empty"));
            }
            _ => {}
        }
        Ok(())
    }
}

impl Experiment {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            Experiment::Transform(c) => c.experiment,
            Experiment::Invert(c) => c.experiment,
            Experiment::Calibrate(c) => c.experiment,
            Experiment::Duality(c) | Experiment::Lemma1(c) => c.experiment,
            Experiment::DualBound(c) => c.experiment,
            Experiment::SupportForward(c) | Experiment::SupportConverse(c) => c.experiment,
            Experiment::RealBridge(c) => c.experiment,
            Experiment::Geometry(c) => c.experiment,
        }
    }

    pub fn description(&self) -> &str {
        match self {
            Experiment::Transform(c) => &c.description,
            Experiment::Invert(c) => &c.description,
            Experiment::Calibrate(c) => &c.description,
            Experiment::Duality(c) | Experiment::Lemma1(c) => &c.description,
            Experiment::DualBound(c) => &c.description,
            Experiment::SupportForward(c) | Experiment::SupportConverse(c) => &c.description,
            Experiment::RealBridge(c) => &c.description,
            Experiment::Geometry(c) => &c.description,
        }
    }

    pub fn output(&self) -> &OutputSpec {
        match self {
            Experiment::Transform(c) => &c.output,
            Experiment::Invert(c) => &c.output,
            Experiment::Calibrate(c) => &c.output,
            Experiment::Duality(c) | Experiment::Lemma1(c) => &c.output,
            Experiment::DualBound(c) => &c.output,
            Experiment::SupportForward(c) | Experiment::SupportConverse(c) => &c.output,
            Experiment::RealBridge(c) => &c.output,
            Experiment::Geometry(c) => &c.output,
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let params = core_err("params");
        match self {
            Experiment::Transform(c) => {
                c.check_objects()?;
                c.params.validate().map_err(params)
            }
            Experiment::Invert(c) => {
                c.check_objects()?;
                c.params.validate().map_err(params)
            }
            Experiment::Calibrate(c) => {
                c.check_objects()?;
                c.params.validate().map_err(params)
            }
            Experiment::Duality(c) | Experiment::Lemma1(c) => {
                c.check_objects()?;
                if !c.function.as_ref().is_some_and(|f| f.is_compactly_supported()) {
                    return Err(ConfigError::at("function", "φ must be compactly supported (bump profiles only)"));
                }
                c.params.validate().map_err(params)
            }
            Experiment::DualBound(c) => {
                c.check_objects()?;
                c.params.validate().map_err(params)
            }
            Experiment::SupportForward(c) | Experiment::SupportConverse(c) => {
                c.check_objects()?;
                c.params.validate().map_err(params)
            }
            Experiment::RealBridge(c) => {
                c.check_objects()?;
                c.params.validate().map_err(params)
            }
            Experiment::Geometry(c) => {
                c.check_objects()?;
                c.params.validate().map_err(params)
            }
        }
    }

    /// The configuration with all defaults filled in, without output settings.
    pub fn resolved(&self) -> Value {
        let v = match self {
            Experiment::Transform(c) => serde_json::to_value(c),
            Experiment::Invert(c) => serde_json::to_value(c),
            Experiment::Calibrate(c) => serde_json::to_value(c),
            Experiment::Duality(c) | Experiment::Lemma1(c) => serde_json::to_value(c),
            Experiment::DualBound(c) => serde_json::to_value(c),
            Experiment::SupportForward(c) | Experiment::SupportConverse(c) => serde_json::to_value(c),
            Experiment::RealBridge(c) => serde_json::to_value(c),
            Experiment::Geometry(c) => serde_json::to_value(c),
        };
        v.expect("configurations serialise")
    }

    /// SHA-256 of the compact resolved configuration (keys sorted).
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(&self.resolved()).expect("configurations serialise");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }
}
