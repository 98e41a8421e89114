//! Run configuration: a line-oriented `key = value` format with `#` comment
//! lines and dotted section keys, layered over preset defaults.
//!
//! ```text
//! # fig1 with fewer runs
//! run.preset = fig1
//! sweep.runs = 200
//! sweep.sigma_r2_list = 0, 0.4
//! ```
//!
//! Later layers win: preset defaults, then the environment's worker count,
//! then the file, then command-line flags. The result is validated as a whole
//! before anything runs.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiments::{Preset, SweepSpec};
use crate::scenario::{parse_rational, DiscreteScenario, JournalComposition, Rational};
use crate::simulation::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Sweep,
    Scenario,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Scenario => "scenario",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "simulate" => Command::Simulate,
            "sweep" => Command::Sweep,
            "scenario" => Command::Scenario,
            _ => return None,
        })
    }
}

/// Which discrete scenario to start from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    One,
    Two,
    Custom,
}

impl ScenarioName {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioName::One => "1",
            ScenarioName::Two => "2",
            ScenarioName::Custom => "custom",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "1" => ScenarioName::One,
            "2" => ScenarioName::Two,
            "custom" => ScenarioName::Custom,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSettings {
    pub name: ScenarioName,
    pub q: Rational,
    pub r: Rational,
    pub journals: Vec<JournalComposition>,
    /// Articles taken by the IF rule; the top journal's size when unset.
    pub select_count: Option<u64>,
}

impl ScenarioSettings {
    fn preset(name: ScenarioName) -> Self {
        let base = match name {
            ScenarioName::Two => DiscreteScenario::scenario_2(),
            ScenarioName::One | ScenarioName::Custom => DiscreteScenario::scenario_1(),
        };
        ScenarioSettings {
            name,
            q: base.q,
            r: base.r,
            journals: base.journals,
            select_count: None,
        }
    }

    pub fn scenario(&self) -> Result<DiscreteScenario> {
        DiscreteScenario::new(self.q, self.r, self.journals.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub preset: Preset,
    pub model: ModelParams,
    pub sweep: SweepSpec,
    pub scenario: ScenarioSettings,
    pub output: Option<PathBuf>,
    pub workers: usize,
}

pub const KEYS: &[&str] = &[
    "run.command",
    "run.preset",
    "run.workers",
    "output.path",
    "model.n",
    "model.m",
    "model.sigma_v2",
    "model.sigma_c2",
    "model.sigma_r2",
    "model.seed",
    "sweep.sigma_r2_list",
    "sweep.sigma_c2_grid",
    "sweep.m_list",
    "sweep.weight_if_list",
    "sweep.runs",
    "sweep.n",
    "sweep.alpha",
    "sweep.total_log_variance",
    "sweep.master_seed",
    "scenario.name",
    "scenario.q",
    "scenario.r",
    "scenario.journals",
    "scenario.select_count",
];

/// One `key = value` assignment with its source line (0 for flags).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Entry {
    pub fn flag(key: &str, value: impl Into<String>) -> Self {
        Entry {
            key: key.to_owned(),
            value: value.into(),
            line: 0,
        }
    }
}

/// Splits config text into entries. Checks syntax and key names only.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(
                format!("line {}", idx + 1),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let key = key.trim();
        check_key(key)?;
        out.push(Entry {
            key: key.to_owned(),
            value: value.trim().to_owned(),
            line: idx + 1,
        });
    }
    Ok(out)
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::config(key, "unknown key"))
    }
}

fn parse_scalar<T: FromStr>(key: &str, value: &str, expected: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("expected {expected}, got `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str, expected: &str) -> Result<Vec<T>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| parse_scalar(key, item.trim(), expected))
        .collect()
}

fn parse_real(key: &str, value: &str) -> Result<f64> {
    let v: f64 = parse_scalar(key, value, "a real number")?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(
            key,
            format!("expected a finite real, got `{value}`"),
        ))
    }
}

fn parse_probability(key: &str, value: &str) -> Result<Rational> {
    parse_rational(value).ok_or_else(|| {
        Error::config(
            key,
            format!("expected a decimal or fraction, got `{value}`"),
        )
    })
}

fn parse_journals(key: &str, value: &str) -> Result<Vec<JournalComposition>> {
    value
        .split(',')
        .map(|item| {
            let item = item.trim();
            let (high, low) = item.split_once(':').ok_or_else(|| {
                Error::config(key, format!("expected `high:low` pairs, got `{item}`"))
            })?;
            Ok(JournalComposition {
                high_value: parse_scalar(key, high.trim(), "a non-negative integer")?,
                low_value: parse_scalar(key, low.trim(), "a non-negative integer")?,
            })
        })
        .collect()
}

/// Last assignment of `key` across `layers`, in layer order.
fn last_value<'a>(layers: &[&'a [Entry]], key: &str) -> Option<&'a Entry> {
    layers
        .iter()
        .rev()
        .flat_map(|layer| layer.iter().rev())
        .find(|e| e.key == key)
}

impl RunConfig {
    pub fn defaults(command: Command, preset: Preset, scenario: ScenarioName) -> Self {
        RunConfig {
            command,
            preset,
            model: ModelParams::default(),
            sweep: SweepSpec::preset(preset),
            scenario: ScenarioSettings::preset(scenario),
            output: None,
            workers: 1,
        }
    }

    /// Builds a validated config from entry layers, lowest precedence first.
    ///
    /// `run.command`, `run.preset` and `scenario.name` pick the defaults the
    /// other keys are applied on top of.
    pub fn from_layers(layers: &[&[Entry]]) -> Result<Self> {
        for entry in layers.iter().flat_map(|l| l.iter()) {
            check_key(&entry.key)?;
        }
        let command = match last_value(layers, "run.command") {
            Some(e) => Command::from_name(&e.value).ok_or_else(|| {
                Error::config(
                    &e.key,
                    format!("expected simulate|sweep|scenario, got `{}`", e.value),
                )
            })?,
            None => Command::Sweep,
        };
        let preset = match last_value(layers, "run.preset") {
            Some(e) => Preset::from_name(&e.value).ok_or_else(|| {
                Error::config(
                    &e.key,
                    format!("expected fig1|fig2|fig3|custom, got `{}`", e.value),
                )
            })?,
            None => Preset::Custom,
        };
        let scenario = match last_value(layers, "scenario.name") {
            Some(e) => ScenarioName::from_name(&e.value).ok_or_else(|| {
                Error::config(&e.key, format!("expected 1|2|custom, got `{}`", e.value))
            })?,
            None => ScenarioName::One,
        };

        let mut cfg = RunConfig::defaults(command, preset, scenario);
        for entry in layers.iter().flat_map(|l| l.iter()) {
            cfg.set(&entry.key, &entry.value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        const UINT: &str = "a non-negative integer";
        match key {
            // Already applied when choosing defaults.
            "run.command" | "run.preset" | "scenario.name" => {}
            "run.workers" => self.workers = parse_scalar(key, value, UINT)?,
            "output.path" => {
                self.output = if value.is_empty() {
                    None
                } else {
                    Some(PathBuf::from(value))
                }
            }
            "model.n" => self.model.n = parse_scalar(key, value, UINT)?,
            "model.m" => self.model.m = parse_scalar(key, value, UINT)?,
            "model.sigma_v2" => self.model.sigma_v2 = parse_real(key, value)?,
            "model.sigma_c2" => self.model.sigma_c2 = parse_real(key, value)?,
            "model.sigma_r2" => self.model.sigma_r2 = parse_real(key, value)?,
            "model.seed" => {
                self.model.seed = parse_scalar(key, value, "a 64-bit unsigned integer")?
            }
            "sweep.sigma_r2_list" => {
                self.sweep.sigma_r2_list = parse_list(key, value, "a list of reals")?
            }
            "sweep.sigma_c2_grid" => {
                self.sweep.sigma_c2_grid = parse_list(key, value, "a list of reals")?
            }
            "sweep.m_list" => self.sweep.m_list = parse_list(key, value, "a list of integers")?,
            "sweep.weight_if_list" => {
                self.sweep.weight_if_list = parse_list(key, value, "a list of reals")?
            }
            "sweep.runs" => self.sweep.runs = parse_scalar(key, value, UINT)?,
            "sweep.n" => self.sweep.n = parse_scalar(key, value, UINT)?,
            "sweep.alpha" => self.sweep.alpha = parse_real(key, value)?,
            "sweep.total_log_variance" => self.sweep.total_log_variance = parse_real(key, value)?,
            "sweep.master_seed" => {
                self.sweep.master_seed = parse_scalar(key, value, "a 64-bit unsigned integer")?
            }
            "scenario.q" => self.scenario.q = parse_probability(key, value)?,
            "scenario.r" => self.scenario.r = parse_probability(key, value)?,
            "scenario.journals" => self.scenario.journals = parse_journals(key, value)?,
            "scenario.select_count" => {
                self.scenario.select_count = if value.is_empty() {
                    None
                } else {
                    Some(parse_scalar(key, value, UINT)?)
                }
            }
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Checks every section, reporting errors against config key names.
    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::config("run.workers", "must be at least 1"));
        }
        self.model.validate().map_err(|e| rename(e, "model"))?;
        self.sweep.validate().map_err(|e| rename(e, "sweep"))?;
        self.scenario
            .scenario()
            .map_err(|e| rename(e, "scenario"))?;
        Ok(())
    }

    /// Serializes every key; `RunConfig::from_layers` on the result gives
    /// back an equal config.
    pub fn to_config_string(&self) -> String {
        fn list<T: ToString>(items: &[T]) -> String {
            items
                .iter()
                .map(T::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        }
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("run.command", self.command.name().into());
        put("run.preset", self.preset.name().into());
        put("run.workers", self.workers.to_string());
        if let Some(path) = &self.output {
            put("output.path", path.display().to_string());
        }
        put("model.n", self.model.n.to_string());
        put("model.m", self.model.m.to_string());
        put("model.sigma_v2", self.model.sigma_v2.to_string());
        put("model.sigma_c2", self.model.sigma_c2.to_string());
        put("model.sigma_r2", self.model.sigma_r2.to_string());
        put("model.seed", self.model.seed.to_string());
        put("sweep.sigma_r2_list", list(&self.sweep.sigma_r2_list));
        put("sweep.sigma_c2_grid", list(&self.sweep.sigma_c2_grid));
        put("sweep.m_list", list(&self.sweep.m_list));
        put("sweep.weight_if_list", list(&self.sweep.weight_if_list));
        put("sweep.runs", self.sweep.runs.to_string());
        put("sweep.n", self.sweep.n.to_string());
        put("sweep.alpha", self.sweep.alpha.to_string());
        put(
            "sweep.total_log_variance",
            self.sweep.total_log_variance.to_string(),
        );
        put("sweep.master_seed", self.sweep.master_seed.to_string());
        put("scenario.name", self.scenario.name.name().into());
        put("scenario.q", self.scenario.q.to_string());
        put("scenario.r", self.scenario.r.to_string());
        put(
            "scenario.journals",
            self.scenario
                .journals
                .iter()
                .map(|j| format!("{}:{}", j.high_value, j.low_value))
                .collect::<Vec<_>>()
                .join(", "),
        );
        put(
            "scenario.select_count",
            self.scenario
                .select_count
                .map(|c| c.to_string())
                .unwrap_or_default(),
        );
        out
    }
}

/// Re-labels a parameter error with its config key.
fn rename(err: Error, section: &str) -> Error {
    match err {
        Error::Param { name, reason } => {
            let key = match (section, name) {
                ("sweep", "weight_if") => "sweep.weight_if_list".to_owned(),
                ("sweep", "scores" | "k") => "sweep.alpha".to_owned(),
                ("scenario", "q" | "r" | "journals") => format!("scenario.{name}"),
                (s, n) => format!("{s}.{n}"),
            };
            Error::Config {
                key,
                message: reason,
            }
        }
        other => other,
    }
}

/// Parses config text plus flag entries on top of it.
pub fn parse_config(file: Option<&str>, flags: &[Entry]) -> Result<RunConfig> {
    let file_entries = match file {
        Some(text) => parse_entries(text)?,
        None => Vec::new(),
    };
    RunConfig::from_layers(&[&file_entries, flags])
}
