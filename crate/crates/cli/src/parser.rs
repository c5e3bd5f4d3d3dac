//! Sectioned key/value configuration files.
//!
//! ```text
//! # comment
//! [grid]
//! dx = 0.02
//! [scenario]
//! type = rarefaction
//! ```
//!
//! Keys override scenario-specific defaults; the scenario type may appear
//! anywhere in the file. Errors carry the line number and key.

use std::fmt;
use std::path::Path;

use traffic_gpc::config::{Scenario, ScenarioConfig};

#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(key) => write!(f, "line {}: key `{}`: {}", self.line, key, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

struct Entry {
    line: usize,
    section: String,
    key: String,
    value: String,
}

fn err(line: usize, key: &str, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        key: Some(key.to_string()),
        message: message.into(),
    }
}

fn scan(text: &str) -> Result<Vec<Entry>, ParseError> {
    let mut entries = Vec::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(ParseError {
                line,
                key: None,
                message: "unterminated section header".into(),
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ParseError {
            line,
            key: None,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        if section.is_empty() {
            return Err(ParseError {
                line,
                key: Some(key.trim().to_string()),
                message: "key outside any [section]".into(),
            });
        }
        entries.push(Entry {
            line,
            section: section.clone(),
            key: key.trim().to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(entries)
}

fn parse_f64(e: &Entry) -> Result<f64, ParseError> {
    e.value
        .parse()
        .map_err(|_| err(e.line, &e.key, format!("expected a number, got `{}`", e.value)))
}

fn parse_usize(e: &Entry) -> Result<usize, ParseError> {
    e.value
        .parse()
        .map_err(|_| err(e.line, &e.key, format!("expected an integer, got `{}`", e.value)))
}

fn parse_u64(e: &Entry) -> Result<u64, ParseError> {
    e.value
        .parse()
        .map_err(|_| err(e.line, &e.key, format!("expected an integer, got `{}`", e.value)))
}

fn parse_u32(e: &Entry) -> Result<u32, ParseError> {
    e.value
        .parse()
        .map_err(|_| err(e.line, &e.key, format!("expected an integer, got `{}`", e.value)))
}

fn parse_bool(e: &Entry) -> Result<bool, ParseError> {
    match e.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(err(e.line, &e.key, format!("expected true/false, got `{other}`"))),
    }
}

fn parse_times(e: &Entry) -> Result<Vec<f64>, ParseError> {
    e.value
        .split([',', ' '])
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.parse()
                .map_err(|_| err(e.line, &e.key, format!("bad time value `{part}`")))
        })
        .collect()
}

pub fn parse_config_str(text: &str) -> Result<ScenarioConfig, ParseError> {
    let entries = scan(text)?;

    // the scenario type selects the defaults everything else overrides
    let mut config = ScenarioConfig::default();
    for e in &entries {
        if e.section == "scenario" && e.key == "type" {
            config = match e.value.as_str() {
                "rarefaction" => ScenarioConfig::rarefaction(),
                "shock" => ScenarioConfig::shock(),
                "steady-sweep" => ScenarioConfig::steady_sweep(),
                "sigma-sweep" => ScenarioConfig::sigma_sweep(0.4),
                "custom" => ScenarioConfig {
                    scenario: Scenario::CustomRiemann {
                        left_rho_lo: 0.55,
                        left_rho_hi: 0.85,
                        left_v: 0.2,
                        right_rho: 0.2,
                        right_v: 0.7,
                        split: 1.0,
                    },
                    ..ScenarioConfig::default()
                },
                other => {
                    return Err(err(
                        e.line,
                        &e.key,
                        format!(
                            "unknown scenario `{other}` (expected rarefaction, shock, \
                             steady-sweep, sigma-sweep or custom)"
                        ),
                    ))
                }
            };
        }
    }

    for e in &entries {
        match (e.section.as_str(), e.key.as_str()) {
            ("scenario", "type") => {}
            ("grid", "domain_start") => config.domain.0 = parse_f64(e)?,
            ("grid", "domain_end") => config.domain.1 = parse_f64(e)?,
            ("grid", "dx") => config.dx = parse_f64(e)?,
            ("grid", "t_final") => config.t_final = parse_f64(e)?,
            ("grid", "cfl") => config.cfl = parse_f64(e)?,
            ("expansion", "k") => config.k = parse_usize(e)?,
            ("physics", "gamma") => config.gamma = parse_u32(e)?,
            ("physics", "n_v") => config.n_v = parse_usize(e)?,
            ("physics", "epsilon") => config.epsilon = parse_f64(e)?,
            ("physics", "v_max") => config.v_max = parse_f64(e)?,
            ("physics", "rho_max") => config.rho_max = parse_f64(e)?,
            ("random", "n_xi") => config.n_xi = parse_usize(e)?,
            ("random", "seed") => config.seed = parse_u64(e)?,
            ("scenario", "n_v_compare") => config.n_v_compare = Some(parse_usize(e)?),
            ("scenario", "gamma_compare") => config.gamma_compare = Some(parse_u32(e)?),
            ("scenario", sub) => apply_scenario_key(&mut config.scenario, sub, e)?,
            ("output", "dir") => config.output_dir = e.value.clone().into(),
            ("output", "snapshots") => config.snapshots = parse_times(e)?,
            ("output", "mc_samples") => config.mc_samples = parse_usize(e)?,
            ("output", "write_kinetic") => config.write_kinetic = parse_bool(e)?,
            ("output", "rho_ref") => config.rho_ref = Some(parse_f64(e)?),
            (section, key) => {
                return Err(err(
                    e.line,
                    key,
                    format!("unknown key in section [{section}]"),
                ))
            }
        }
    }
    Ok(config)
}

fn apply_scenario_key(
    scenario: &mut Scenario,
    sub: &str,
    e: &Entry,
) -> Result<(), ParseError> {
    let mismatch = |e: &Entry, name: &str| {
        Err(err(
            e.line,
            &e.key,
            format!("key not valid for scenario `{name}`"),
        ))
    };
    match scenario {
        Scenario::SteadySweep {
            rho0_min,
            rho0_max,
            rho0_steps,
            sigma,
        } => match sub {
            "rho0_min" => *rho0_min = parse_f64(e)?,
            "rho0_max" => *rho0_max = parse_f64(e)?,
            "rho0_steps" => *rho0_steps = parse_usize(e)?,
            "sigma" => *sigma = parse_f64(e)?,
            _ => return mismatch(e, "steady-sweep"),
        },
        Scenario::SigmaSweep {
            rho0,
            sigma_min,
            sigma_max,
            sigma_steps,
        } => match sub {
            "rho0" => *rho0 = parse_f64(e)?,
            "sigma_min" => *sigma_min = parse_f64(e)?,
            "sigma_max" => *sigma_max = parse_f64(e)?,
            "sigma_steps" => *sigma_steps = parse_usize(e)?,
            _ => return mismatch(e, "sigma-sweep"),
        },
        Scenario::Rarefaction => return mismatch(e, "rarefaction"),
        Scenario::Shock => return mismatch(e, "shock"),
        Scenario::CustomRiemann {
            left_rho_lo,
            left_rho_hi,
            left_v,
            right_rho,
            right_v,
            split,
        } => match sub {
            "left_rho_lo" => *left_rho_lo = parse_f64(e)?,
            "left_rho_hi" => *left_rho_hi = parse_f64(e)?,
            "left_v" => *left_v = parse_f64(e)?,
            "right_rho" => *right_rho = parse_f64(e)?,
            "right_v" => *right_v = parse_f64(e)?,
            "split" => *split = parse_f64(e)?,
            _ => return mismatch(e, "custom"),
        },
    }
    Ok(())
}

pub fn parse_config_file(path: &Path) -> Result<ScenarioConfig, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError {
        line: 0,
        key: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_rarefaction_config() {
        let cfg = parse_config_str("[scenario]\ntype = rarefaction\n").unwrap();
        assert_eq!(cfg.scenario.name(), "rarefaction");
        assert_eq!(cfg.k, 64);
    }

    #[test]
    fn overrides_apply_in_any_order() {
        let text = "[scenario]\nsigma = 0.2\ntype = steady-sweep\n[expansion]\nk = 8\n";
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.k, 8);
        match cfg.scenario {
            Scenario::SteadySweep { sigma, .. } => assert_eq!(sigma, 0.2),
            other => panic!("unexpected scenario {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_report_line_and_key() {
        let e = parse_config_str("[grid]\nwidth = 3\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.key.as_deref(), Some("width"));
    }

    #[test]
    fn bad_numbers_report_the_value() {
        let e = parse_config_str("[grid]\ndx = tiny\n").unwrap_err();
        assert!(e.to_string().contains("tiny"));
    }

    #[test]
    fn scenario_key_mismatch_is_an_error() {
        let e = parse_config_str("[scenario]\ntype = shock\nsigma = 0.1\n").unwrap_err();
        assert!(e.to_string().contains("not valid"));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# experiment\n\n[grid] # grid block\ndx = 0.1 # coarse\n";
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.dx, 0.1);
    }
}
