//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Every key is optional; anything not set keeps its default. Unknown and
//! repeated keys are errors.
//!
//! | key | meaning |
//! |-----|---------|
//! | `a_N`, `a_F` | power shares (either one implies the other) |
//! | `speed_kmh`, `carrier_hz`, `symbol_s`, `time_index` | mobility |
//! | `omega_RN`, `omega_RF`, `omega_RB`, `omega_BN`, `omega_BF` | average link powers |
//! | `omega_e`, `omega_eps` | error variances of every time-varying link |
//! | `omega_e_<link>`, `omega_eps_<link>` | per-link override (`RN`, `RF`, `BN`, `BF`) |
//! | `beta` | reflection efficiency |
//! | `gamma_db` | transmit SNR |
//! | `R_sN`, `R_sF`, `R_sC` | rates |
//! | `blocklength` | blocklength of all three streams |
//! | `L_sN`, `L_sF`, `L_sC` | per-stream blocklength override |
//! | `d_term_mode` | `derivation-consistent` or `as-printed` |
//! | `theorem1_mode` | `composition` or `paper-literal` |

use ambc_noma::config::LinkInput;
use ambc_noma::{DTermMode, Scenario, SystemConfig, Theorem1Mode};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(#[from] ambc_noma::Error),
}

const LINKS: [&str; 4] = ["RN", "RF", "BN", "BF"];

#[derive(Debug, Clone, Copy)]
enum Kind {
    Real,
    Count,
    DMode,
    TMode,
}

fn kind_of(key: &str) -> Option<Kind> {
    let kind = match key {
        "a_N" | "a_F" | "speed_kmh" | "carrier_hz" | "symbol_s" | "beta" | "gamma_db"
        | "omega_RN" | "omega_RF" | "omega_RB" | "omega_BN" | "omega_BF" | "omega_e"
        | "omega_eps" | "R_sN" | "R_sF" | "R_sC" => Kind::Real,
        "time_index" | "blocklength" | "L_sN" | "L_sF" | "L_sC" => Kind::Count,
        "d_term_mode" => Kind::DMode,
        "theorem1_mode" => Kind::TMode,
        _ => {
            let link = key
                .strip_prefix("omega_eps_")
                .or_else(|| key.strip_prefix("omega_e_"))?;
            if !LINKS.contains(&link) {
                return None;
            }
            Kind::Real
        }
    };
    Some(kind)
}

#[derive(Debug, Clone, Copy)]
enum Value {
    Real(f64),
    Count(u32),
    DMode(DTermMode),
    TMode(Theorem1Mode),
}

fn parse_value(kind: Kind, text: &str) -> Result<Value, String> {
    match kind {
        Kind::Real => text
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Value::Real)
            .ok_or_else(|| format!("expected a finite number, found `{text}`")),
        Kind::Count => text
            .parse::<u32>()
            .map(Value::Count)
            .map_err(|_| format!("expected a nonnegative integer, found `{text}`")),
        Kind::DMode => match text {
            "derivation-consistent" => Ok(Value::DMode(DTermMode::DerivationConsistent)),
            "as-printed" => Ok(Value::DMode(DTermMode::AsPrinted)),
            _ => Err(format!(
                "expected `derivation-consistent` or `as-printed`, found `{text}`"
            )),
        },
        Kind::TMode => match text {
            "composition" => Ok(Value::TMode(Theorem1Mode::Composition)),
            "paper-literal" => Ok(Value::TMode(Theorem1Mode::PaperLiteral)),
            _ => Err(format!(
                "expected `composition` or `paper-literal`, found `{text}`"
            )),
        },
    }
}

/// Column of byte offset `at` in `line`, counted in characters from 1.
fn column(line: &str, at: usize) -> usize {
    line[..at].chars().count() + 1
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn is_key(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn collect(text: &str) -> Result<BTreeMap<String, Value>, ConfigError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let start = body.len() - body.trim_start().len();
        let Some(eq) = body.find('=') else {
            return Err(parse_error(
                line_no,
                column(raw, start),
                "expected `key = value`",
            ));
        };
        let key = body[..eq].trim();
        if !is_key(key) {
            return Err(parse_error(
                line_no,
                column(raw, start),
                format!("malformed key `{key}`"),
            ));
        }
        let rest = &body[eq + 1..];
        let value_at = eq + 1 + (rest.len() - rest.trim_start().len());
        let value = rest.trim();
        if value.is_empty() {
            return Err(parse_error(line_no, column(raw, value_at), "missing value"));
        }
        let Some(kind) = kind_of(key) else {
            return Err(parse_error(
                line_no,
                column(raw, start),
                format!("unknown key `{key}`"),
            ));
        };
        let parsed = parse_value(kind, value)
            .map_err(|m| parse_error(line_no, column(raw, value_at), format!("{key}: {m}")))?;
        if out.insert(key.to_string(), parsed).is_some() {
            return Err(parse_error(
                line_no,
                column(raw, start),
                format!("duplicate key `{key}`"),
            ));
        }
    }
    Ok(out)
}

fn link_mut<'a>(c: &'a mut SystemConfig, name: &str) -> &'a mut LinkInput {
    match name {
        "RN" => &mut c.links.rsu_near,
        "RF" => &mut c.links.rsu_far,
        "BN" => &mut c.links.bd_near,
        _ => &mut c.links.bd_far,
    }
}

fn build(values: &BTreeMap<String, Value>) -> SystemConfig {
    let mut c = SystemConfig::default();
    let real = |k: &str| match values.get(k) {
        Some(Value::Real(v)) => Some(*v),
        _ => None,
    };
    let count = |k: &str| match values.get(k) {
        Some(Value::Count(v)) => Some(*v),
        _ => None,
    };

    match (real("a_N"), real("a_F")) {
        (Some(n), Some(f)) => (c.power.near, c.power.far) = (n, f),
        (Some(n), None) => (c.power.near, c.power.far) = (n, 1.0 - n),
        (None, Some(f)) => (c.power.near, c.power.far) = (1.0 - f, f),
        (None, None) => {}
    }
    let m = &mut c.mobility;
    m.speed_kmh = real("speed_kmh").unwrap_or(m.speed_kmh);
    m.carrier_hz = real("carrier_hz").unwrap_or(m.carrier_hz);
    m.symbol_s = real("symbol_s").unwrap_or(m.symbol_s);
    m.time_index = count("time_index").unwrap_or(m.time_index);
    c.beta = real("beta").unwrap_or(c.beta);
    c.gamma_db = real("gamma_db").unwrap_or(c.gamma_db);
    c.links.rsu_bd = real("omega_RB").unwrap_or(c.links.rsu_bd);

    for name in LINKS {
        let l = link_mut(&mut c, name);
        l.omega = real(&format!("omega_{name}")).unwrap_or(l.omega);
        l.omega_e = real(&format!("omega_e_{name}"))
            .or(real("omega_e"))
            .unwrap_or(l.omega_e);
        l.omega_eps = real(&format!("omega_eps_{name}"))
            .or(real("omega_eps"))
            .unwrap_or(l.omega_eps);
    }

    if let Some(l) = count("blocklength") {
        c = c.with_blocklength(l);
    }
    let p = &mut c.packets;
    for (suffix, packet) in [
        ("sN", &mut p.near),
        ("sF", &mut p.far),
        ("sC", &mut p.backscatter),
    ] {
        packet.rate = real(&format!("R_{suffix}")).unwrap_or(packet.rate);
        packet.blocklength = count(&format!("L_{suffix}")).unwrap_or(packet.blocklength);
    }
    if let Some(Value::DMode(m)) = values.get("d_term_mode") {
        c.d_term_mode = *m;
    }
    if let Some(Value::TMode(m)) = values.get("theorem1_mode") {
        c.theorem1_mode = *m;
    }
    c
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<SystemConfig, ConfigError> {
    let config = build(&collect(text)?);
    Scenario::new(&config)?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<SystemConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
