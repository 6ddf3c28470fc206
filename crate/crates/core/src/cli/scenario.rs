use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::impulse::{BenchmarkParams, DEFAULT_ALLOWANCE};
use crate::pattern::{MarkovChain, OverlapMode, Pattern, Source, DEFAULT_STEP_CAP};
use crate::renewal::{BlackwellMode, RenewalSpec};
use crate::sde::MarkDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Simulate,
    RenewalCheck,
    PatternExpect,
    PatternRace,
    ImpulseSolve,
    ImpulseVerify,
}

impl Kind {
    pub const ALL: [Kind; 6] =
        [Kind::Simulate, Kind::RenewalCheck, Kind::PatternExpect, Kind::PatternRace, Kind::ImpulseSolve, Kind::ImpulseVerify];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::RenewalCheck => "renewal-check",
            Kind::PatternExpect => "pattern-expect",
            Kind::PatternRace => "pattern-race",
            Kind::ImpulseSolve => "impulse-solve",
            Kind::ImpulseVerify => "impulse-verify",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| Error::Config(format!("unknown kind: {s}")))
    }
}

/// Jumps for the `simulate` kind.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpParams {
    pub intensity: f64,
    pub marks: MarkDistribution,
    #[serde(default)]
    pub compensated: bool,
}

/// `dX = a X dt + σ dW` plus optional additive jumps.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    pub x0: f64,
    pub horizon: f64,
    pub dt: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub jumps: Option<JumpParams>,
    #[serde(default = "one")]
    pub n_paths: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenewalCheckKind {
    Elementary,
    Blackwell,
    RewardRate,
    Wald,
    Delayed,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenewalParams {
    pub renewal: RenewalSpec,
    pub t: f64,
    pub n_paths: usize,
    #[serde(default = "unit")]
    pub a: f64,
    #[serde(default = "default_mode")]
    pub mode: BlackwellMode,
    #[serde(default = "default_checks")]
    pub checks: Vec<RenewalCheckKind>,
}

/// Symbol source: either `probs` (iid) or `transition` with `initial`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceParams {
    #[serde(default)]
    pub probs: Option<Vec<f64>>,
    #[serde(default)]
    pub transition: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub initial: Option<usize>,
}

impl SourceParams {
    pub fn build(&self) -> Result<Source> {
        match (&self.probs, &self.transition) {
            (Some(p), None) if self.initial.is_none() => Source::iid(p.clone()),
            (None, Some(rows)) => {
                let initial = self.initial.ok_or_else(|| Error::Config("missing field: parameters.source.initial".into()))?;
                Source::markov(MarkovChain::from_rows(rows)?, initial)
            }
            _ => Err(Error::Config(
                "invalid field: parameters.source (give either probs, or transition with initial)".into(),
            )),
        }
    }
}

/// A pattern as symbol indices, or as text over `alphabet`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PatternParam {
    Symbols(Vec<usize>),
    Text(String),
}

impl PatternParam {
    pub fn build(&self, alphabet: Option<&str>) -> Result<Pattern> {
        match self {
            PatternParam::Symbols(s) => Pattern::new(s.clone()),
            PatternParam::Text(text) => {
                let symbols = text
                    .chars()
                    .map(|ch| match alphabet {
                        Some(a) => a.chars().position(|c| c == ch),
                        None => ch.to_digit(10).map(|d| d as usize),
                    })
                    .collect::<Option<Vec<usize>>>()
                    .ok_or_else(|| Error::Config(format!("invalid field: pattern {text:?} has a symbol outside the alphabet")))?;
                Pattern::new(symbols)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternExpectParams {
    pub source: SourceParams,
    pub pattern: PatternParam,
    #[serde(default)]
    pub alphabet: Option<String>,
    #[serde(default = "yes")]
    pub closed_form: bool,
    #[serde(default)]
    pub overlap_mode: OverlapMode,
    #[serde(default)]
    pub trials: usize,
    #[serde(default = "default_step_cap")]
    pub step_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternRaceParams {
    pub source: SourceParams,
    pub patterns: Vec<PatternParam>,
    #[serde(default)]
    pub alphabet: Option<String>,
    #[serde(default)]
    pub trials: usize,
    #[serde(default = "default_step_cap")]
    pub step_cap: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpulseSolveParams {
    #[serde(default)]
    pub benchmark: BenchmarkParams,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpulseVerifyParams {
    #[serde(default)]
    pub benchmark: BenchmarkParams,
    /// Defaults to `0` and both band edges.
    #[serde(default)]
    pub y0: Option<Vec<f64>>,
    #[serde(default = "default_paths")]
    pub n_paths: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_allowance")]
    pub allowance: f64,
    #[serde(default = "yes")]
    pub alternatives: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Parameters {
    Simulate(SimulateParams),
    RenewalCheck(RenewalParams),
    PatternExpect(PatternExpectParams),
    PatternRace(PatternRaceParams),
    ImpulseSolve(ImpulseSolveParams),
    ImpulseVerify(ImpulseVerifyParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: Kind,
    pub seed: u64,
    pub workers: usize,
    pub output: Option<PathBuf>,
    pub parameters: Parameters,
}

fn one() -> usize {
    1
}
fn unit() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_mode() -> BlackwellMode {
    BlackwellMode::Nonlattice
}
fn default_checks() -> Vec<RenewalCheckKind> {
    vec![RenewalCheckKind::Elementary, RenewalCheckKind::Blackwell]
}
fn default_step_cap() -> u64 {
    DEFAULT_STEP_CAP
}
fn default_paths() -> usize {
    10_000
}
fn default_dt() -> f64 {
    1e-3
}
fn default_allowance() -> f64 {
    DEFAULT_ALLOWANCE
}

const TOP_LEVEL: [&str; 5] = ["kind", "seed", "workers", "output", "parameters"];

/// Rewrite serde's messages so they name the offending field by path.
fn field_error(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    let quoted = |prefix: &str| msg.strip_prefix(prefix).and_then(|r| r.split('`').next()).map(str::to_string);
    if let Some(f) = quoted("missing field `") {
        Error::Config(format!("missing field: parameters.{f}"))
    } else if let Some(f) = quoted("unknown field `") {
        Error::Config(format!("unknown field: parameters.{f}"))
    } else {
        Error::Config(format!("invalid field in parameters: {msg}"))
    }
}

fn typed<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(field_error)
}

/// Parse and validate a scenario document. Errors name the first offending
/// field.
pub fn parse_config(document: &str) -> Result<Scenario> {
    let doc: Value = serde_json::from_str(document).map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| Error::Config("malformed JSON: top level must be an object".into()))?;
    let missing = |f: &str| Error::Config(format!("missing field: {f}"));
    let invalid = |f: &str| Error::Config(format!("invalid field: {f}"));

    let kind: Kind = obj.get("kind").ok_or_else(|| missing("kind"))?.as_str().ok_or_else(|| invalid("kind"))?.parse()?;
    let seed = obj.get("seed").ok_or_else(|| missing("seed"))?.as_u64().ok_or_else(|| invalid("seed"))?;
    let workers = match obj.get("workers") {
        None => 1,
        Some(w) => w.as_u64().filter(|&w| w >= 1).ok_or_else(|| invalid("workers"))? as usize,
    };
    let output = match obj.get("output") {
        None => None,
        Some(o) => Some(PathBuf::from(o.as_str().ok_or_else(|| invalid("output"))?)),
    };
    if let Some(k) = obj.keys().find(|k| !TOP_LEVEL.contains(&k.as_str())) {
        return Err(Error::Config(format!("unknown field: {k}")));
    }
    let raw = obj.get("parameters").ok_or_else(|| missing("parameters"))?.clone();
    if !raw.is_object() {
        return Err(invalid("parameters"));
    }
    let parameters = match kind {
        Kind::Simulate => Parameters::Simulate(typed(raw)?),
        Kind::RenewalCheck => Parameters::RenewalCheck(typed(raw)?),
        Kind::PatternExpect => Parameters::PatternExpect(typed(raw)?),
        Kind::PatternRace => Parameters::PatternRace(typed(raw)?),
        Kind::ImpulseSolve => Parameters::ImpulseSolve(typed(raw)?),
        Kind::ImpulseVerify => Parameters::ImpulseVerify(typed(raw)?),
    };
    Ok(Scenario { kind, seed, workers, output, parameters })
}
