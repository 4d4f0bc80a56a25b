//! Experiment configuration: a declarative JSON file plus flag overrides,
//! with flags winning over file values. Hidden family parameters may be
//! omitted, in which case verification sweeps every instance.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{FamilyParams, FamilyShape};
use crate::learners::LearnerSpec;
use crate::opponents::OpponentSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("missing required setting: {0}")]
    Missing(&'static str),
    #[error("unknown {what} '{got}' (expected one of {options})")]
    UnknownName {
        what: &'static str,
        got: String,
        options: &'static str,
    },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Family selection with optionally omitted hidden parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    GetClose {
        n: u32,
        #[serde(skip_serializing_if = "Option::is_none")]
        k: Option<u32>,
    },
    RpsDuds {
        m: u32,
        n: u32,
        #[serde(skip_serializing_if = "Option::is_none")]
        f: Option<Vec<u32>>,
    },
    RandomOrientationRpsDuds {
        m: u32,
        n: u32,
        #[serde(skip_serializing_if = "Option::is_none")]
        f: Option<Vec<u32>>,
    },
    TwoTargets {
        n: u32,
        p1: f64,
        p2: f64,
        r1: f64,
        r2: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        k1: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none")]
        k2: Option<u32>,
    },
    MpDuds {
        m: u32,
        n: u32,
        #[serde(skip_serializing_if = "Option::is_none")]
        duds: Option<Vec<u32>>,
    },
}

impl FamilyConfig {
    pub fn shape(&self) -> FamilyShape {
        match self {
            FamilyConfig::GetClose { n, .. } => FamilyShape::GetClose { n: *n },
            FamilyConfig::RpsDuds { m, n, .. } => FamilyShape::RpsDuds { m: *m, n: *n },
            FamilyConfig::RandomOrientationRpsDuds { m, n, .. } => {
                FamilyShape::RandomOrientationRpsDuds { m: *m, n: *n }
            }
            FamilyConfig::TwoTargets { n, p1, p2, r1, r2, .. } => FamilyShape::TwoTargets {
                n: *n,
                p1: *p1,
                p2: *p2,
                r1: *r1,
                r2: *r2,
            },
            FamilyConfig::MpDuds { m, n, .. } => FamilyShape::MpDuds { m: *m, n: *n },
        }
    }

    /// The concrete instance, requiring every hidden parameter.
    pub fn instance(&self) -> Result<FamilyParams, ConfigError> {
        let params = match self {
            FamilyConfig::GetClose { n, k } => FamilyParams::GetClose {
                n: *n,
                k: k.ok_or(ConfigError::Missing("family.k (hidden target)"))?,
            },
            FamilyConfig::RpsDuds { m, n, f } => FamilyParams::RpsDuds {
                m: *m,
                n: *n,
                f: f.clone().ok_or(ConfigError::Missing("family.f (hidden permutation)"))?,
            },
            FamilyConfig::RandomOrientationRpsDuds { m, n, f } => {
                FamilyParams::RandomOrientationRpsDuds {
                    m: *m,
                    n: *n,
                    f: f.clone()
                        .ok_or(ConfigError::Missing("family.f (hidden permutation)"))?,
                }
            }
            FamilyConfig::TwoTargets { n, p1, p2, r1, r2, k1, k2 } => FamilyParams::TwoTargets {
                n: *n,
                k1: k1.ok_or(ConfigError::Missing("family.k1 (hidden target)"))?,
                k2: k2.ok_or(ConfigError::Missing("family.k2 (hidden target)"))?,
                p1: *p1,
                p2: *p2,
                r1: *r1,
                r2: *r2,
            },
            FamilyConfig::MpDuds { m, n, duds } => FamilyParams::MpDuds {
                m: *m,
                n: *n,
                duds: duds
                    .clone()
                    .ok_or(ConfigError::Missing("family.duds (hidden dud set)"))?
                    .into_iter()
                    .collect(),
            },
        };
        params
            .validate()
            .map_err(|e| invalid(format!("family.{}", field_of(&e)), e.to_string()))?;
        Ok(params)
    }

    /// Whether every hidden parameter is pinned.
    pub fn is_concrete(&self) -> bool {
        match self {
            FamilyConfig::GetClose { k, .. } => k.is_some(),
            FamilyConfig::RpsDuds { f, .. }
            | FamilyConfig::RandomOrientationRpsDuds { f, .. } => f.is_some(),
            FamilyConfig::TwoTargets { k1, k2, .. } => k1.is_some() && k2.is_some(),
            FamilyConfig::MpDuds { duds, .. } => duds.is_some(),
        }
    }

    /// Validate the public parameters even when hidden ones are omitted.
    pub fn validate_shape(&self) -> Result<(), ConfigError> {
        match self {
            FamilyConfig::GetClose { n, .. } => {
                if *n == 0 {
                    return Err(invalid("family.n", "board size must be positive"));
                }
            }
            FamilyConfig::RpsDuds { m, .. } | FamilyConfig::RandomOrientationRpsDuds { m, .. } => {
                if *m <= 2 {
                    return Err(invalid("family.m", "circle needs m > 2 nonduds"));
                }
            }
            FamilyConfig::TwoTargets { n, p1, p2, r1, r2, .. } => {
                if *n < 2 {
                    return Err(invalid("family.n", "two distinct targets need n >= 2"));
                }
                if (p1 + p2 - 1.0).abs() > 1e-12 {
                    return Err(invalid(
                        "family.p2",
                        format!("p1 + p2 must equal 1 (got {})", p1 + p2),
                    ));
                }
                if *r1 <= 0.0 || *r2 <= 0.0 || r1 == r2 {
                    return Err(invalid("family.r2", "rewards must be positive and distinct"));
                }
            }
            FamilyConfig::MpDuds { m, .. } => {
                if *m == 0 {
                    return Err(invalid("family.m", "need at least one nondud (m > 0)"));
                }
            }
        }
        if self.is_concrete() {
            self.instance()?;
        }
        Ok(())
    }
}

fn field_of(e: &crate::families::FamilyError) -> String {
    match e {
        crate::families::FamilyError::InvalidParam { field, .. } => (*field).to_string(),
        _ => "params".to_string(),
    }
}

/// A verification check to run, with its claimed bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckConfig {
    Guaranteed {
        #[serde(skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
    },
    Expected {
        #[serde(skip_serializing_if = "Option::is_none")]
        bound: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        horizons: Option<Vec<u32>>,
    },
    Approximate {
        bound: f64,
        epsilon: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        horizons: Option<Vec<u32>>,
    },
    Lemma {
        #[serde(skip_serializing_if = "Option::is_none")]
        constants: Option<Vec<f64>>,
    },
}

pub const DEFAULT_EPISODES: u32 = 10_000;
pub const DEFAULT_ROUNDS: u32 = 100;

fn default_episodes() -> u32 {
    DEFAULT_EPISODES
}

fn default_rounds() -> u32 {
    DEFAULT_ROUNDS
}

/// One experiment: what to play, against whom, for how long, and what to
/// verify.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: FamilyConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learner: Option<LearnerSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub opponent: Option<OpponentSpec>,
    #[serde(default = "default_rounds")]
    pub rounds: u32,
    #[serde(default = "default_episodes")]
    pub episodes: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckConfig>,
}

/// Parse and validate a JSON config. Parse errors carry line and column;
/// invariant violations name the field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let config: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    config.family.validate_shape()?;
    if config.rounds == 0 {
        return Err(invalid("rounds", "horizon must be at least 1"));
    }
    if config.episodes == 0 {
        return Err(invalid("episodes", "episode count must be at least 1"));
    }
    Ok(config)
}

/// `key=value` pairs collected from repeatable `--param` flags.
#[derive(Debug, Clone, Default)]
pub struct ParamBag(BTreeMap<String, String>);

impl ParamBag {
    pub fn parse(pairs: &[String]) -> Result<ParamBag, ConfigError> {
        let mut map = BTreeMap::new();
        for pair in pairs {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| invalid(pair.clone(), "expected key=value"))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(ParamBag(map))
    }

    fn get_u32(&self, key: &str) -> Result<Option<u32>, ConfigError> {
        self.0
            .get(key)
            .map(|v| v.parse().map_err(|_| invalid(key, format!("not an integer: {v}"))))
            .transpose()
    }

    fn get_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.0
            .get(key)
            .map(|v| v.parse().map_err(|_| invalid(key, format!("not a number: {v}"))))
            .transpose()
    }

    fn get_list(&self, key: &str) -> Result<Option<Vec<u32>>, ConfigError> {
        self.0
            .get(key)
            .map(|v| {
                if v.trim().is_empty() {
                    return Ok(Vec::new());
                }
                v.split(',')
                    .map(|x| {
                        x.trim()
                            .parse()
                            .map_err(|_| invalid(key, format!("not an integer list: {v}")))
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn budget(&self) -> Result<Option<u32>, ConfigError> {
        self.get_u32("r")
    }

    /// Build a family selection from a `--family` name and this bag.
    pub fn family(&self, name: &str) -> Result<FamilyConfig, ConfigError> {
        let need_u32 = |key: &'static str| self.get_u32(key)?.ok_or(ConfigError::Missing(key));
        let need_f64 = |key: &'static str| self.get_f64(key)?.ok_or(ConfigError::Missing(key));
        let fam = match name {
            "get_close" => FamilyConfig::GetClose {
                n: need_u32("n")?,
                k: self.get_u32("k")?,
            },
            "rps_duds" => FamilyConfig::RpsDuds {
                m: need_u32("m")?,
                n: need_u32("n")?,
                f: self.get_list("f")?,
            },
            "random_orientation_rps_duds" => FamilyConfig::RandomOrientationRpsDuds {
                m: need_u32("m")?,
                n: need_u32("n")?,
                f: self.get_list("f")?,
            },
            "two_targets" => FamilyConfig::TwoTargets {
                n: need_u32("n")?,
                p1: need_f64("p1")?,
                p2: need_f64("p2")?,
                r1: need_f64("r1")?,
                r2: need_f64("r2")?,
                k1: self.get_u32("k1")?,
                k2: self.get_u32("k2")?,
            },
            "mp_duds" => FamilyConfig::MpDuds {
                m: need_u32("m")?,
                n: need_u32("n")?,
                duds: self.get_list("duds")?,
            },
            other => {
                return Err(ConfigError::UnknownName {
                    what: "family",
                    got: other.to_string(),
                    options:
                        "get_close, rps_duds, random_orientation_rps_duds, two_targets, mp_duds",
                })
            }
        };
        Ok(fam)
    }

    /// Override individual fields of an existing family selection.
    pub fn apply_to_family(&self, family: &mut FamilyConfig) -> Result<(), ConfigError> {
        match family {
            FamilyConfig::GetClose { n, k } => {
                if let Some(v) = self.get_u32("n")? {
                    *n = v;
                }
                if let Some(v) = self.get_u32("k")? {
                    *k = Some(v);
                }
            }
            FamilyConfig::RpsDuds { m, n, f }
            | FamilyConfig::RandomOrientationRpsDuds { m, n, f } => {
                if let Some(v) = self.get_u32("m")? {
                    *m = v;
                }
                if let Some(v) = self.get_u32("n")? {
                    *n = v;
                }
                if let Some(v) = self.get_list("f")? {
                    *f = Some(v);
                }
            }
            FamilyConfig::TwoTargets { n, p1, p2, r1, r2, k1, k2 } => {
                if let Some(v) = self.get_u32("n")? {
                    *n = v;
                }
                if let Some(v) = self.get_f64("p1")? {
                    *p1 = v;
                }
                if let Some(v) = self.get_f64("p2")? {
                    *p2 = v;
                }
                if let Some(v) = self.get_f64("r1")? {
                    *r1 = v;
                }
                if let Some(v) = self.get_f64("r2")? {
                    *r2 = v;
                }
                if let Some(v) = self.get_u32("k1")? {
                    *k1 = Some(v);
                }
                if let Some(v) = self.get_u32("k2")? {
                    *k2 = Some(v);
                }
            }
            FamilyConfig::MpDuds { m, n, duds } => {
                if let Some(v) = self.get_u32("m")? {
                    *m = v;
                }
                if let Some(v) = self.get_u32("n")? {
                    *n = v;
                }
                if let Some(v) = self.get_list("duds")? {
                    *duds = Some(v);
                }
            }
        }
        Ok(())
    }
}

/// Parse a `--learner` flag value. The approximate learner takes its budget
/// from `--param r=...`; `wrap:` prefixes the maximin-freezing wrapper.
pub fn parse_learner(name: &str, bag: &ParamBag) -> Result<LearnerSpec, ConfigError> {
    if let Some(inner) = name.strip_prefix("wrap:") {
        return Ok(LearnerSpec::WrapMaximin {
            inner: Box::new(parse_learner(inner, bag)?),
        });
    }
    let spec = match name {
        "binary_search" => LearnerSpec::BinarySearch,
        "approx_binary_search" => LearnerSpec::ApproxBinarySearch {
            budget: bag
                .budget()?
                .ok_or(ConfigError::Missing("--param r=<loss budget>"))?,
        },
        "chase_winner" => LearnerSpec::ChaseWinner,
        "random_orientation" => LearnerSpec::RandomOrientation,
        "two_targets" => LearnerSpec::TwoTargets,
        "dud_elimination" => LearnerSpec::DudElimination,
        "omniscient" => LearnerSpec::Omniscient,
        "uniform" => LearnerSpec::Uniform,
        other => {
            return Err(ConfigError::UnknownName {
                what: "learner",
                got: other.to_string(),
                options: "binary_search, approx_binary_search, chase_winner, \
                          random_orientation, two_targets, dud_elimination, omniscient, \
                          uniform, wrap:<learner>",
            })
        }
    };
    Ok(spec)
}

/// Parse an `--opponent` flag value. `scripted:<path>` loads one action per
/// line from a plain-text file.
pub fn parse_opponent(name: &str) -> Result<OpponentSpec, ConfigError> {
    if let Some(path) = name.strip_prefix("scripted:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid("opponent", format!("cannot read script {path}: {e}")))?;
        return OpponentSpec::scripted_from_text(&text)
            .map_err(|e| invalid("opponent", e.to_string()));
    }
    let spec = match name {
        "worst_case_dp" => OpponentSpec::WorstCaseDp,
        "middle_camper" => OpponentSpec::MiddleCamper,
        "best_response" => OpponentSpec::BestResponse,
        "match_probable" => OpponentSpec::MatchProbable,
        "uniform_random" => OpponentSpec::UniformRandom,
        other => {
            return Err(ConfigError::UnknownName {
                what: "opponent",
                got: other.to_string(),
                options: "worst_case_dp, middle_camper, best_response, match_probable, \
                          uniform_random, scripted:<path>",
            })
        }
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config(r#"{"family": {"name": "get_close", "n": 16, "k": 11}}"#).unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.episodes, 10_000);
        assert_eq!(cfg.rounds, 100);
        assert!(cfg.checks.is_empty());
        assert!(cfg.family.is_concrete());
        assert_eq!(
            cfg.family.instance().unwrap(),
            FamilyParams::GetClose { n: 16, k: 11 }
        );
    }

    #[test]
    fn bad_probabilities_are_rejected_by_field_name() {
        let err = parse_config(
            r#"{"family": {"name": "two_targets", "n": 4, "p1": 0.7, "p2": 0.4,
                "r1": 4.0, "r2": 1.0}}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("p2"), "message should name the field: {msg}");
    }

    #[test]
    fn non_bijective_permutation_is_rejected() {
        let err = parse_config(
            r#"{"family": {"name": "rps_duds", "m": 3, "n": 1, "f": [1, 2, 2, 4]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("f"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(
            r#"{"family": {"name": "get_close", "n": 16}, "surprise": true}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
    }

    #[test]
    fn shape_only_config_is_valid_for_verification() {
        let cfg = parse_config(r#"{"family": {"name": "mp_duds", "m": 2, "n": 1}}"#).unwrap();
        assert!(!cfg.family.is_concrete());
        assert!(cfg.family.instance().is_err());
        assert_eq!(cfg.family.shape(), FamilyShape::MpDuds { m: 2, n: 1 });
    }

    #[test]
    fn param_bag_builds_families() {
        let bag = ParamBag::parse(&[
            "n=16".into(),
            "k=11".into(),
        ])
        .unwrap();
        let fam = bag.family("get_close").unwrap();
        assert_eq!(
            fam,
            FamilyConfig::GetClose { n: 16, k: Some(11) }
        );
        let bag = ParamBag::parse(&["m=3".into(), "n=1".into(), "f=2,3,1,4".into()]).unwrap();
        let fam = bag.family("rps_duds").unwrap();
        assert!(fam.is_concrete());
    }

    #[test]
    fn flags_override_file_values() {
        let mut cfg =
            parse_config(r#"{"family": {"name": "get_close", "n": 16, "k": 11}}"#).unwrap();
        let bag = ParamBag::parse(&["k=3".into()]).unwrap();
        bag.apply_to_family(&mut cfg.family).unwrap();
        assert_eq!(
            cfg.family.instance().unwrap(),
            FamilyParams::GetClose { n: 16, k: 3 }
        );
    }

    #[test]
    fn learner_flag_parsing() {
        let bag = ParamBag::parse(&["r=2".into()]).unwrap();
        assert_eq!(
            parse_learner("approx_binary_search", &bag).unwrap(),
            LearnerSpec::ApproxBinarySearch { budget: 2 }
        );
        assert_eq!(
            parse_learner("wrap:binary_search", &bag).unwrap(),
            LearnerSpec::WrapMaximin {
                inner: Box::new(LearnerSpec::BinarySearch)
            }
        );
        assert!(parse_learner("nope", &bag).is_err());
        assert!(parse_learner("approx_binary_search", &ParamBag::default()).is_err());
    }

    #[test]
    fn opponent_flag_parsing() {
        assert_eq!(parse_opponent("worst_case_dp").unwrap(), OpponentSpec::WorstCaseDp);
        assert!(parse_opponent("nope").is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig {
            family: FamilyConfig::TwoTargets {
                n: 4,
                p1: 0.6,
                p2: 0.4,
                r1: 4.0,
                r2: 1.0,
                k1: Some(1),
                k2: Some(3),
            },
            learner: Some(LearnerSpec::TwoTargets),
            opponent: Some(OpponentSpec::WorstCaseDp),
            rounds: 12,
            episodes: 100,
            seed: 7,
            out: None,
            checks: vec![CheckConfig::Expected {
                bound: Some(8.0),
                horizons: None,
            }],
        };
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = parse_config(&text).unwrap();
        assert_eq!(back.family, cfg.family);
        assert_eq!(back.checks, cfg.checks);
    }
}
