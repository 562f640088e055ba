//! Flat-text run configuration.
//!
//! Format: one `key = value` per line, `#` starts a comment, blank lines are
//! ignored. Unknown keys are a hard error so typos cannot silently fall back
//! to defaults.
//!
//! Recognized keys (with defaults in parentheses):
//!
//! | key            | meaning                                              |
//! |----------------|------------------------------------------------------|
//! | `n_photons`    | photons per run (2000)                               |
//! | `delta`        | tolerated test error rate (0.05)                     |
//! | `p_t`          | Bernoulli test-side probability (0.5)                |
//! | `beta`         | error-correction slack (0.05)                        |
//! | `epsilon`      | privacy slack (0.01)                                 |
//! | `tau`          | random-code slack (0.01)                             |
//! | `n_e_min`      | minimum key-side size floor (100)                    |
//! | `n_omega_min`  | minimum sifted size floor (200)                      |
//! | `m_max`        | key-length cap; 0 derives it from fair estimates (0) |
//! | `cap_slack`    | headroom term in the fair cap (0.1)                  |
//! | `p_loss`       | per-photon loss probability (0.0)                    |
//! | `p_err`        | matched-basis flip probability (0.0)                 |
//! | `attack`       | `none`, `intercept_resend`, `fixed_plus`, `fixed_times` (`none`) |
//! | `p_attack`     | intercept-resend per-photon probability (1.0)        |
//! | `code_family`  | `repetition`, `hamming74`, `systematic_random` (`hamming74`) |
//! | `block_len`    | repetition block length (5)                          |
//! | `code_rows`    | systematic-random check rows (4)                     |
//! | `trials`       | Monte Carlo run count (1000)                         |
//! | `seed`         | master RNG seed (42)                                 |
//! | `eve_knows_g`  | leakage diagnostic: credit Eve with all of g (false) |
//! | `leak_f`       | tiny-N parity rows, `;`-separated (`11`)             |
//! | `leak_k`       | tiny-N privacy rows, `;`-separated (`10`)            |

use std::path::Path;

use thiserror::Error;

use crate::gf2codes::{BitMatrix, Gf2Error};
use crate::protocol::{AttackStrategy, Basis, ChannelModel, CodeFamily};
use crate::secbounds::ProtocolParams;

/// Configuration errors carry the offending line for context.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: bad value for {key}: {reason}")]
    BadValue {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid matrix in {key}: {source}")]
    Matrix { key: String, source: Gf2Error },
}

/// Everything a CLI run needs, resolved from defaults plus a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ProtocolParams,
    pub p_loss: f64,
    pub p_err: f64,
    pub attack_kind: String,
    pub p_attack: f64,
    pub family_kind: String,
    pub block_len: usize,
    pub code_rows: usize,
    pub trials: usize,
    pub seed: u64,
    pub eve_knows_g: bool,
    pub leak_f: String,
    pub leak_k: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: ProtocolParams::default(),
            p_loss: 0.0,
            p_err: 0.0,
            attack_kind: "none".into(),
            p_attack: 1.0,
            family_kind: "hamming74".into(),
            block_len: 5,
            code_rows: 4,
            trials: 1000,
            seed: 42,
            eve_knows_g: false,
            leak_f: "11".into(),
            leak_k: "10".into(),
        }
    }
}

fn parse_as<T: std::str::FromStr>(
    value: &str,
    line: usize,
    key: &str,
) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| ConfigError::BadValue {
        line,
        key: key.to_string(),
        reason: e.to_string(),
    })
}

impl RunConfig {
    /// Parses a config body on top of the defaults.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line,
                    text: raw.trim().to_string(),
                });
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "n_photons" => cfg.params.n_photons = parse_as(value, line, key)?,
                "delta" => cfg.params.delta = parse_as(value, line, key)?,
                "p_t" => cfg.params.p_t = parse_as(value, line, key)?,
                "beta" => cfg.params.beta = parse_as(value, line, key)?,
                "epsilon" => cfg.params.epsilon = parse_as(value, line, key)?,
                "tau" => cfg.params.tau = parse_as(value, line, key)?,
                "n_e_min" => cfg.params.n_e_min = parse_as(value, line, key)?,
                "n_omega_min" => cfg.params.n_omega_min = parse_as(value, line, key)?,
                "m_max" => cfg.params.m_max = parse_as(value, line, key)?,
                "cap_slack" => cfg.params.cap_slack = parse_as(value, line, key)?,
                "p_loss" => cfg.p_loss = parse_as(value, line, key)?,
                "p_err" => cfg.p_err = parse_as(value, line, key)?,
                "attack" => match value {
                    "none" | "intercept_resend" | "fixed_plus" | "fixed_times" => {
                        cfg.attack_kind = value.to_string();
                    }
                    _ => {
                        return Err(ConfigError::BadValue {
                            line,
                            key: key.into(),
                            reason: format!(
                                "{value:?} is not one of none, intercept_resend, fixed_plus, fixed_times"
                            ),
                        })
                    }
                },
                "p_attack" => cfg.p_attack = parse_as(value, line, key)?,
                "code_family" => match value {
                    "repetition" | "hamming74" | "systematic_random" => {
                        cfg.family_kind = value.to_string();
                    }
                    _ => {
                        return Err(ConfigError::BadValue {
                            line,
                            key: key.into(),
                            reason: format!(
                                "{value:?} is not one of repetition, hamming74, systematic_random"
                            ),
                        })
                    }
                },
                "block_len" => cfg.block_len = parse_as(value, line, key)?,
                "code_rows" => cfg.code_rows = parse_as(value, line, key)?,
                "trials" => cfg.trials = parse_as(value, line, key)?,
                "seed" => cfg.seed = parse_as(value, line, key)?,
                "eve_knows_g" => cfg.eve_knows_g = parse_as(value, line, key)?,
                "leak_f" => cfg.leak_f = value.to_string(),
                "leak_k" => cfg.leak_k = value.to_string(),
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
            }
        }
        Ok(cfg)
    }

    /// Reads and parses a config file.
    pub fn from_file(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        RunConfig::parse(&text)
    }

    /// The channel model these settings describe.
    pub fn channel(&self) -> ChannelModel {
        ChannelModel {
            p_loss: self.p_loss,
            p_err: self.p_err,
        }
    }

    /// The attack strategy these settings describe.
    pub fn attack(&self) -> AttackStrategy {
        match self.attack_kind.as_str() {
            "intercept_resend" => AttackStrategy::InterceptResend {
                p_attack: self.p_attack,
            },
            "fixed_plus" => AttackStrategy::FixedBasisMeasure { basis: Basis::Plus },
            "fixed_times" => AttackStrategy::FixedBasisMeasure {
                basis: Basis::Times,
            },
            _ => AttackStrategy::None,
        }
    }

    /// The reconciliation code family these settings describe.
    pub fn family(&self) -> CodeFamily {
        match self.family_kind.as_str() {
            "repetition" => CodeFamily::Repetition {
                block_len: self.block_len,
            },
            "systematic_random" => CodeFamily::SystematicRandom {
                rows: self.code_rows,
            },
            _ => CodeFamily::Hamming74,
        }
    }

    /// Parses a `;`-separated row list into a matrix (for the tiny-N leakage
    /// matrices).
    pub fn matrix_from_key(&self, key: &str) -> Result<BitMatrix, ConfigError> {
        let raw = match key {
            "leak_f" => &self.leak_f,
            "leak_k" => &self.leak_k,
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: 0,
                    key: key.into(),
                })
            }
        };
        let rows: Vec<&str> = raw.split(';').map(str::trim).collect();
        BitMatrix::parse_rows(&rows).map_err(|source| ConfigError::Matrix {
            key: key.into(),
            source,
        })
    }
}
