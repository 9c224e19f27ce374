//! Parsing of resource, input and protocol descriptions from flags and
//! `key=value` config files.

use std::collections::HashMap;
use std::path::Path;

use gauss_teleport::mc::McConfig;
use gauss_teleport::realizability::{make, ResourceKind};
use gauss_teleport::{GaussianState, PhasePoint, ProtocolVariant, Resource, ResourceParams};

use crate::CliError;

/// Samples a `mc` run needs at minimum.
pub const MIN_MC_SAMPLES: u64 = 10_000;

/// A parsed `--resource` argument together with its original text.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceSpec {
    pub label: String,
    pub resource: Resource,
}

/// Accepts `a,b,c1,c2`, `tmss:R`, `mirror-tmss:R`, `epr`, `mirror` or `point`.
pub fn parse_resource(text: &str) -> Result<ResourceSpec, CliError> {
    let text = text.trim();
    let kind = match text {
        "epr" => Some(ResourceKind::EprLimit),
        "mirror" => Some(ResourceKind::MirrorLimit),
        "point" => Some(ResourceKind::ClassicalPoint),
        _ => {
            if let Some(r) = text.strip_prefix("tmss:") {
                Some(ResourceKind::Tmss { r: parse_number(r, "squeezing")? })
            } else if let Some(r) = text.strip_prefix("mirror-tmss:") {
                Some(ResourceKind::MirrorTmss { r: parse_number(r, "squeezing")? })
            } else {
                None
            }
        }
    };
    let resource = match kind {
        Some(kind) => make(kind).map_err(|e| CliError::Parse(e.to_string()))?.resource,
        None => {
            let [a, b, c1, c2] = parse_list::<4>(text, "resource")?;
            Resource::Finite(ResourceParams::new(a, b, c1, c2).map_err(|e| CliError::Parse(e.to_string()))?)
        }
    };
    Ok(ResourceSpec { label: text.to_string(), resource })
}

pub fn parse_variant(text: &str) -> Result<ProtocolVariant, CliError> {
    match text.trim() {
        "standard" => Ok(ProtocolVariant::Standard),
        "classical" => Ok(ProtocolVariant::ClassicalVariant),
        other => Err(CliError::Parse(format!("unknown variant '{other}' (expected standard or classical)"))),
    }
}

pub fn parse_point(text: &str, what: &str) -> Result<PhasePoint, CliError> {
    let [q, p] = parse_list::<2>(text, what)?;
    Ok(PhasePoint { q, p })
}

/// `coherent` / `vacuum` shorthand, optionally overridden by explicit moments.
pub fn parse_input(
    shorthand: Option<&str>,
    mean: Option<&str>,
    cov: Option<&str>,
) -> Result<GaussianState, CliError> {
    let (mut m, mut v) = match shorthand.map(str::trim) {
        None | Some("coherent") | Some("vacuum") => ([0.0, 0.0], [0.5, 0.0, 0.5]),
        Some(other) => return Err(CliError::Parse(format!("unknown input '{other}' (expected coherent)"))),
    };
    if let Some(mean) = mean {
        m = parse_list::<2>(mean, "input mean")?;
    }
    if let Some(cov) = cov {
        v = parse_list::<3>(cov, "input covariance")?;
    }
    GaussianState::single_mode(m, [[v[0], v[1]], [v[1], v[2]]]).map_err(|e| CliError::Parse(e.to_string()))
}

fn parse_number(text: &str, what: &str) -> Result<f64, CliError> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("invalid {what} value '{text}'")))?;
    if !value.is_finite() {
        return Err(CliError::Parse(format!("{what} value must be finite, got '{text}'")));
    }
    Ok(value)
}

fn parse_list<const N: usize>(text: &str, what: &str) -> Result<[f64; N], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != N {
        return Err(CliError::Parse(format!("{what} needs {N} comma-separated numbers, got '{text}'")));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = parse_number(part, what)?;
    }
    Ok(out)
}

/// Raw scenario settings before parsing; flags take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct ScenarioArgs {
    pub resource: Option<String>,
    pub input: Option<String>,
    pub input_mean: Option<String>,
    pub input_cov: Option<String>,
    pub variant: Option<String>,
    pub beta: Option<String>,
    pub tol: Option<String>,
    pub seed: Option<String>,
    pub samples: Option<String>,
    pub streams: Option<String>,
}

impl ScenarioArgs {
    /// Fills unset fields from `key=value` lines (`#` starts a comment).
    pub fn with_file_defaults(mut self, contents: &str) -> Result<Self, CliError> {
        let mut file = HashMap::new();
        for (lineno, line) in contents.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Parse(format!("config line {}: expected key=value", lineno + 1)))?;
            file.insert(key.trim().to_string(), value.trim().to_string());
        }
        let fields: [(&str, &mut Option<String>); 10] = [
            ("resource", &mut self.resource),
            ("input", &mut self.input),
            ("input_mean", &mut self.input_mean),
            ("input_cov", &mut self.input_cov),
            ("variant", &mut self.variant),
            ("beta", &mut self.beta),
            ("tol", &mut self.tol),
            ("seed", &mut self.seed),
            ("samples", &mut self.samples),
            ("streams", &mut self.streams),
        ];
        let known: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        if let Some(unknown) = file.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(CliError::Parse(format!("unknown config key '{unknown}'")));
        }
        for (key, slot) in fields {
            if slot.is_none() {
                *slot = file.remove(key);
            }
        }
        Ok(self)
    }

    pub fn load_file(self, path: &Path) -> Result<Self, CliError> {
        let contents = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
        self.with_file_defaults(&contents)
    }

    pub fn parse(&self) -> Result<ScenarioConfig, CliError> {
        let resource = parse_resource(
            self.resource
                .as_deref()
                .ok_or_else(|| CliError::Parse("a resource is required (--resource)".into()))?,
        )?;
        let input = parse_input(self.input.as_deref(), self.input_mean.as_deref(), self.input_cov.as_deref())?;
        let variant = self.variant.as_deref().map(parse_variant).transpose()?.unwrap_or(ProtocolVariant::Standard);
        let beta = self.beta.as_deref().map(|b| parse_point(b, "beta")).transpose()?;
        let tol = self.tol.as_deref().map(|t| parse_number(t, "tol")).transpose()?;
        Ok(ScenarioConfig { input, resource, variant, beta, tol })
    }

    /// Monte Carlo settings; the seed falls back to `default_seed`.
    pub fn mc_config(&self, default_seed: u64) -> Result<McConfig, CliError> {
        let int = |text: &Option<String>, what: &str, default: u64| -> Result<u64, CliError> {
            match text {
                None => Ok(default),
                Some(t) => t.trim().parse().map_err(|_| CliError::Parse(format!("invalid {what} '{t}'"))),
            }
        };
        let defaults = McConfig::default();
        let seed = int(&self.seed, "seed", default_seed)?;
        let samples = int(&self.samples, "samples", defaults.samples)?;
        let streams = int(&self.streams, "streams", u64::from(defaults.streams))?;
        if samples < MIN_MC_SAMPLES {
            return Err(CliError::Parse(format!("samples must be at least {MIN_MC_SAMPLES}, got {samples}")));
        }
        let streams = u32::try_from(streams).map_err(|_| CliError::Parse("stream count too large".into()))?;
        McConfig::new(seed, samples, streams).map_err(|e| CliError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub input: GaussianState,
    pub resource: ResourceSpec,
    pub variant: ProtocolVariant,
    pub beta: Option<PhasePoint>,
    pub tol: Option<f64>,
}
