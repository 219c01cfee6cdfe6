//! JSON experiment files and the built-in presets.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tailcomb::combine::WeightVector;
use tailcomb::simulate::{dense_mean, sparse_mean};
use tailcomb::{CombinationMethod, Distribution, ExchangeableModel, Sidedness, StatFamily};

use crate::failure::Failure;

pub const PRESETS: &[(&str, &str)] = &[
    ("table2a", include_str!("../presets/table2a.json")),
    ("tableS1", include_str!("../presets/tableS1.json")),
    ("tableS2", include_str!("../presets/tableS2.json")),
    ("tableS3", include_str!("../presets/tableS3.json")),
    ("fig3", include_str!("../presets/fig3.json")),
    ("fig5", include_str!("../presets/fig5.json")),
];

/// A scalar or a list of values to sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sweep<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> Sweep<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            Sweep::One(v) => vec![v.clone()],
            Sweep::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Normal,
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Dense,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Signal {
    pub pattern: Pattern,
    pub mu: Sweep<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: FamilyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    pub n: Sweep<usize>,
    pub rho: Sweep<f64>,
    #[serde(default = "one_sided")]
    pub sided: Sidedness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<Signal>,
}

fn one_sided() -> Sidedness {
    Sidedness::OneSided
}

/// Shared shape of every experiment file; each command reads the fields it
/// needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub model: ModelSpec,
    /// Method specifiers for `simulate`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<String>,
    /// Distribution for `equiv-ratio`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    /// Weights for `weighted:` methods and `equiv-ratio`; equal weights when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub replications: u64,
    pub seed: u64,
}

impl ExperimentFile {
    pub fn load(preset: Option<&str>, path: Option<&Path>) -> Result<Self> {
        let (text, origin) = match (preset, path) {
            (Some(name), None) => {
                let Some((_, text)) = PRESETS.iter().find(|(n, _)| *n == name) else {
                    let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
                    return Err(Failure::Config.msg(format!(
                        "unknown preset {name:?}; available: {}",
                        names.join(", ")
                    )));
                };
                (text.to_string(), format!("preset {name}"))
            }
            (None, Some(p)) => (
                std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read {}", p.display()))
                    .map_err(|e| Failure::Config.wrap(e))?,
                p.display().to_string(),
            ),
            _ => return Err(Failure::Config.msg("give exactly one of --preset or --config")),
        };
        serde_json::from_str(&text)
            .with_context(|| format!("cannot parse {origin}"))
            .map_err(|e| Failure::Config.wrap(e))
    }

    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        let m = &self.model;
        let family = match (m.family, m.nu) {
            (FamilyName::Normal, None) => StatFamily::Normal,
            (FamilyName::StudentT, Some(nu)) => StatFamily::StudentT { nu },
            (FamilyName::Normal, Some(_)) => {
                bail!(Failure::Config.msg("nu only applies to student_t"))
            }
            (FamilyName::StudentT, None) => bail!(Failure::Config.msg("student_t needs nu")),
        };
        let mus: Vec<Option<f64>> = match &m.signal {
            Some(s) => s.mu.values().into_iter().map(Some).collect(),
            None => vec![None],
        };
        let mut out = Vec::new();
        for n in m.n.values() {
            for rho in m.rho.values() {
                for &mu in &mus {
                    let mean = match (mu, m.signal.as_ref().map(|s| s.pattern)) {
                        (Some(mu), Some(Pattern::Dense)) => dense_mean(n, mu),
                        (Some(mu), Some(Pattern::Sparse)) => sparse_mean(n, mu),
                        _ => vec![0.0; n],
                    };
                    let model = ExchangeableModel::new(family, rho, mean, m.sided)?;
                    out.push(Scenario { n, rho, mu, model });
                }
            }
        }
        Ok(out)
    }

    pub fn weights(&self, n: usize) -> Result<WeightVector<f64>> {
        let w = match &self.weights {
            Some(w) if w.len() != n => {
                return Err(Failure::Config.msg(format!("{} weights for n = {n}", w.len())))
            }
            Some(w) => WeightVector::new(w.clone()),
            None => WeightVector::equal(n, 1.0),
        };
        w.map_err(|e| Failure::Config.wrap(e.into()))
    }

    pub fn methods(&self, n: usize) -> Result<Vec<CombinationMethod>> {
        if self.methods.is_empty() {
            return Err(Failure::Config.msg("the experiment lists no methods"));
        }
        self.methods
            .iter()
            .map(|s| parse_method(s, || self.weights(n)))
            .collect()
    }

    pub fn distribution(&self) -> Result<Distribution> {
        let spec = self.dist.as_deref().unwrap_or("cauchy");
        parse_dist(spec)
    }
}

pub struct Scenario {
    pub n: usize,
    pub rho: f64,
    pub mu: Option<f64>,
    pub model: ExchangeableModel,
}

pub fn parse_dist(spec: &str) -> Result<Distribution> {
    spec.parse::<Distribution>()
        .map_err(|e| Failure::Config.msg(format!("distribution {spec:?}: {e}")))
}

/// `standard:DIST`, `average:DIST`, `weighted:DIST`, `bonferroni`, `fisher`
/// or `minp:CUTOFF`.
pub fn parse_method(
    spec: &str,
    weights: impl FnOnce() -> Result<WeightVector<f64>>,
) -> Result<CombinationMethod> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let method = match (kind, rest) {
        ("standard", d) => CombinationMethod::Standard(parse_dist(d)?),
        ("average", d) => CombinationMethod::Average(parse_dist(d)?),
        ("weighted", d) => CombinationMethod::Weighted(parse_dist(d)?, weights()?),
        ("bonferroni", "") => CombinationMethod::Bonferroni(None),
        ("fisher", "") => CombinationMethod::Fisher,
        ("minp", c) => {
            let cutoff = c
                .parse::<f64>()
                .ok()
                .filter(|c| *c > 0.0 && *c <= 1.0)
                .ok_or_else(|| {
                    Failure::Config.msg(format!("minp needs a cutoff in (0, 1]: {spec:?}"))
                })?;
            CombinationMethod::MinP { cutoff }
        }
        _ => return Err(Failure::Config.msg(format!("unknown method {spec:?}"))),
    };
    if let CombinationMethod::Average(d) = &method {
        if d.tail_index() != 1.0 {
            return Err(Failure::Config.msg(format!(
                "average needs a tail-index-1 distribution: {spec:?}"
            )));
        }
    }
    Ok(method)
}
