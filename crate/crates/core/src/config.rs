//! `key = value` run configuration.
//!
//! ```text
//! # one-noise model on (0, π)
//! exponents.m = 1
//! exponents.n = 1
//! exponents.p = 1
//! exponents.q = 1
//! noise.k1 = 1
//! noise.k2 = 1
//! init.C1 = 1
//! init.C2 = 1
//! domain.kind = interval
//! domain.lengths = pi
//! sim.dt = 1e-3
//! sim.horizon = 10
//! sim.n_paths = 1000
//! sim.seed = 7
//! ```
//!
//! Reals accept `pi` and `<number>*pi`. A model is optional so that the
//! perpetuity and comparison runs need only the sections they read.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;

use crate::dist::CompareScalars;
use crate::error::{Error, Result};
use crate::model::{ModelParams, ModelParams2D};
use crate::spectral::{DomainKind, DomainSpec};

const KNOWN_KEYS: &[&str] = &[
    "exponents.m",
    "exponents.n",
    "exponents.p",
    "exponents.q",
    "noise.k1",
    "noise.k2",
    "noise.k11",
    "noise.k12",
    "noise.k21",
    "noise.k22",
    "init.C1",
    "init.C2",
    "init.M1",
    "init.M2",
    "coeff.C11",
    "coeff.C12",
    "coeff.C21",
    "coeff.C22",
    "domain.kind",
    "domain.lengths",
    "sim.dt",
    "sim.horizon",
    "sim.n_paths",
    "sim.seed",
    "compare.rho1",
    "compare.rho2",
    "compare.l1",
    "compare.l2",
    "compare.lambda",
    "compare.beta",
    "compare.gamma",
    "compare.eps0",
    "compare.E0",
    "compare.C3",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelConfig {
    OneNoise(ModelParams),
    TwoNoise(ModelParams2D),
}

impl ModelConfig {
    pub fn domain(&self) -> &DomainSpec {
        match self {
            ModelConfig::OneNoise(p) => &p.domain,
            ModelConfig::TwoNoise(p) => &p.domain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: u64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 10.0,
            n_paths: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: Option<ModelConfig>,
    pub sim: SimConfig,
    pub compare: Option<CompareScalars>,
}

impl RunConfig {
    pub fn one_noise(&self) -> Result<&ModelParams> {
        match &self.model {
            Some(ModelConfig::OneNoise(p)) => Ok(p),
            Some(ModelConfig::TwoNoise(_)) => Err(Error::ConfigMissing(
                "this run needs a one-noise model (noise.k1, noise.k2)".into(),
            )),
            None => Err(Error::ConfigMissing("no model section in the config".into())),
        }
    }

    pub fn model(&self) -> Result<&ModelConfig> {
        self.model
            .as_ref()
            .ok_or_else(|| Error::ConfigMissing("no model section in the config".into()))
    }
}

struct Entry {
    line: usize,
    value: String,
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigMissing(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config {
                line,
                msg: format!("unknown key `{key}`"),
            });
        }
        if let Some(prev) = entries.get(key) {
            return Err(Error::Config {
                line,
                msg: format!("`{key}` already set on line {}", prev.line),
            });
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    let cfg = Parsed { entries };
    Ok(RunConfig {
        model: cfg.model()?,
        sim: cfg.sim()?,
        compare: cfg.compare()?,
    })
}

struct Parsed {
    entries: BTreeMap<String, Entry>,
}

fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if s == "pi" {
        return Some(PI);
    }
    if let Some(factor) = s.strip_suffix("*pi") {
        return factor.trim().parse::<f64>().ok().map(|f| f * PI);
    }
    s.parse::<f64>().ok()
}

impl Parsed {
    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn any(&self, prefix: &str) -> bool {
        self.entries.keys().any(|k| k.starts_with(prefix))
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        match parse_real(&e.value) {
            Some(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(Error::Config {
                line: e.line,
                msg: format!("`{key}` needs a finite real, got `{}`", e.value),
            }),
        }
    }

    fn require(&self, key: &str) -> Result<f64> {
        self.real(key)?
            .ok_or_else(|| Error::ConfigMissing(format!("missing key `{key}`")))
    }

    fn integer(&self, key: &str) -> Result<Option<u64>> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        e.value.parse::<u64>().map(Some).map_err(|_| Error::Config {
            line: e.line,
            msg: format!("`{key}` needs a non-negative integer, got `{}`", e.value),
        })
    }

    /// Line of the first key with `prefix`, for errors about a whole section.
    fn line_of(&self, prefix: &str) -> usize {
        self.entries
            .iter()
            .filter(|(k, _)| k.starts_with(prefix))
            .map(|(_, e)| e.line)
            .min()
            .unwrap_or(0)
    }

    fn at_section<T>(&self, prefix: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Config { .. } | Error::ConfigMissing(_) => e,
            other => Error::Config {
                line: self.line_of(prefix),
                msg: other.to_string(),
            },
        })
    }

    fn domain(&self) -> Result<DomainSpec> {
        let kind = match self.entries.get("domain.kind") {
            None => return Err(Error::ConfigMissing("missing key `domain.kind`".into())),
            Some(e) => match e.value.as_str() {
                "interval" => DomainKind::Interval,
                "box" => DomainKind::Box,
                other => {
                    return Err(Error::Config {
                        line: e.line,
                        msg: format!("`domain.kind` must be interval or box, got `{other}`"),
                    })
                }
            },
        };
        let e = self
            .entries
            .get("domain.lengths")
            .ok_or_else(|| Error::ConfigMissing("missing key `domain.lengths`".into()))?;
        let lengths = e
            .value
            .split(',')
            .map(|s| parse_real(s).filter(|l| l.is_finite() && *l > 0.0))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::Config {
                line: e.line,
                msg: format!("`domain.lengths` needs comma-separated positive reals, got `{}`", e.value),
            })?;
        DomainSpec::new(kind, lengths).map_err(|err| Error::Config {
            line: e.line,
            msg: err.to_string(),
        })
    }

    fn model(&self) -> Result<Option<ModelConfig>> {
        let model_keys = ["exponents.", "noise.", "init.", "coeff.", "domain."];
        if !model_keys.iter().any(|p| self.any(p)) {
            return Ok(None);
        }
        let exps = [
            self.require("exponents.m")?,
            self.require("exponents.n")?,
            self.require("exponents.p")?,
            self.require("exponents.q")?,
        ];
        let domain = self.domain()?;
        let one = ["noise.k1", "noise.k2", "init.C1", "init.C2"];
        let two = [
            "noise.k11",
            "noise.k12",
            "noise.k21",
            "noise.k22",
            "init.M1",
            "init.M2",
            "coeff.C11",
            "coeff.C12",
            "coeff.C21",
            "coeff.C22",
        ];
        let is_one = one.iter().any(|k| self.has(k));
        let is_two = two.iter().any(|k| self.has(k));
        if is_one && is_two {
            return Err(Error::Config {
                line: self.line_of("noise."),
                msg: "mixes one-noise keys (k1, k2, C1, C2) with two-noise keys".into(),
            });
        }
        if is_two {
            let k = [
                [self.require("noise.k11")?, self.require("noise.k12")?],
                [self.require("noise.k21")?, self.require("noise.k22")?],
            ];
            let coeff = [
                [self.require("coeff.C11")?, self.require("coeff.C12")?],
                [self.require("coeff.C21")?, self.require("coeff.C22")?],
            ];
            let init = [self.require("init.M1")?, self.require("init.M2")?];
            let p = ModelParams2D::new_allowing_zero_noise(exps, k, coeff, init, domain);
            return self.at_section("exponents.", p).map(|p| Some(ModelConfig::TwoNoise(p)));
        }
        let noise = [self.require("noise.k1")?, self.require("noise.k2")?];
        let init = [self.require("init.C1")?, self.require("init.C2")?];
        let p = ModelParams::new(exps, noise, init, domain);
        self.at_section("exponents.", p).map(|p| Some(ModelConfig::OneNoise(p)))
    }

    fn sim(&self) -> Result<SimConfig> {
        let d = SimConfig::default();
        let sim = SimConfig {
            dt: self.real("sim.dt")?.unwrap_or(d.dt),
            horizon: self.real("sim.horizon")?.unwrap_or(d.horizon),
            n_paths: self.integer("sim.n_paths")?.unwrap_or(d.n_paths),
            seed: self.integer("sim.seed")?.unwrap_or(d.seed),
        };
        if sim.n_paths == 0 {
            return Err(Error::Config {
                line: self.line_of("sim.n_paths"),
                msg: "`sim.n_paths` must be at least 1".into(),
            });
        }
        let grid = crate::paths::SimGrid::new(sim.dt, sim.horizon);
        self.at_section("sim.", grid)?;
        Ok(sim)
    }

    fn compare(&self) -> Result<Option<CompareScalars>> {
        if !self.any("compare.") {
            return Ok(None);
        }
        Ok(Some(CompareScalars {
            rho1: self.require("compare.rho1")?,
            rho2: self.require("compare.rho2")?,
            l1: self.require("compare.l1")?,
            l2: self.require("compare.l2")?,
            lambda: self.require("compare.lambda")?,
            beta: self.require("compare.beta")?,
            gamma: self.require("compare.gamma")?,
            eps0: self.require("compare.eps0")?,
            e0: self.require("compare.E0")?,
            c3: self.require("compare.C3")?,
        }))
    }
}
