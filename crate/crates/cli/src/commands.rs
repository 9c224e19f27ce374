use std::fmt::Write as _;
use std::path::Path;

use gauss_teleport::mc::{conditioned_run, run_protocol, BetaWindow, McConfig};
use gauss_teleport::realizability::{check, make, ResourceKind};
use gauss_teleport::teleport::{
    added_noise, averaged_output, conditional_output, ensemble_perfect, fidelity, is_perfect,
};
use gauss_teleport::{ExactLimit, GaussianState, PhasePoint, ProtocolVariant, Resource};

use crate::format::significant;
use crate::report::{
    Analytic, CheckReport, ConditionalSummary, Conditioning, Empirical, LimitRealizability, McReport, Realizability,
    StateSummary, TeleportReport,
};
use crate::scenario::{ResourceSpec, ScenarioConfig};
use crate::CliError;

/// Window half-width used by `mc --beta` when `--tol` is absent.
pub const DEFAULT_TOL: f64 = 0.05;

/// Digits written to the sweep CSV.
pub const CSV_DIGITS: usize = 12;

pub fn realizability(resource: &Resource) -> Realizability {
    match resource {
        Resource::Finite(params) => Realizability::Finite(check(params)),
        Resource::Limit(limit) => match limit.finite_params() {
            Some(params) => Realizability::Finite(check(&params)),
            None => Realizability::Limit(LimitRealizability {
                limit: *limit,
                verdict: limit.verdict(),
                mirror_entangled: limit.mirror_entangled(),
            }),
        },
    }
}

pub fn cmd_check(spec: &ResourceSpec) -> CheckReport {
    CheckReport { resource: spec.label.clone(), realizability: realizability(&spec.resource) }
}

pub fn cmd_teleport(cfg: &ScenarioConfig) -> Result<TeleportReport, CliError> {
    let resource = &cfg.resource.resource;
    let noise = added_noise(resource, cfg.variant)?;
    let averaged = averaged_output(&cfg.input, resource, cfg.variant)?;
    let fidelity = fidelity(&cfg.input, &averaged)?;
    let conditional = match cfg.beta {
        None => None,
        Some(beta) => {
            let out = StateSummary::of(&conditional_output(&cfg.input, resource, beta, cfg.variant)?);
            Some(ConditionalSummary {
                beta,
                mean: out.mean,
                cov: out.cov,
                physically_measurable: cfg.variant.physically_measurable(),
            })
        }
    };
    let note = (!cfg.variant.physically_measurable())
        .then(|| "classical variant: beta is not the outcome of any physical measurement".to_string());
    Ok(TeleportReport {
        resource: cfg.resource.label.clone(),
        variant: cfg.variant,
        realizability: realizability(resource),
        noise_q: noise.q,
        noise_p: noise.p,
        averaged_output: StateSummary::of(&averaged),
        fidelity,
        perfect: is_perfect(resource, cfg.variant),
        ensemble_perfect: ensemble_perfect(resource, cfg.variant),
        conditional_output: conditional,
        note,
    })
}

/// One row of the coherent-state fidelity sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    pub f_tmss: f64,
    pub f_mirror: f64,
}

fn coherent_fidelity(kind: ResourceKind) -> Result<f64, CliError> {
    let input = GaussianState::coherent(0.0, 0.0)?;
    let resource = make(kind)?.resource;
    let out = averaged_output(&input, &resource, ProtocolVariant::Standard)?;
    Ok(fidelity(&input, &out)?)
}

/// Coherent-state fidelity of the TMSS and its mirror on `steps` evenly
/// spaced squeezing values from `r_min` to `r_max`.
pub fn sweep_rows(r_min: f64, r_max: f64, steps: usize) -> Result<Vec<SweepRow>, CliError> {
    if !(r_min.is_finite() && r_max.is_finite() && 0.0 <= r_min && r_min < r_max) {
        return Err(CliError::Parse(format!("need 0 <= r_min < r_max, got {r_min} and {r_max}")));
    }
    if steps < 2 {
        return Err(CliError::Parse(format!("need at least 2 steps, got {steps}")));
    }
    let h = (r_max - r_min) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            let r = if i + 1 == steps { r_max } else { r_min + i as f64 * h };
            Ok(SweepRow {
                r,
                f_tmss: coherent_fidelity(ResourceKind::Tmss { r })?,
                f_mirror: coherent_fidelity(ResourceKind::MirrorTmss { r })?,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut csv = String::from("r,f_tmss,f_mirror\n");
    for row in rows {
        let _ = writeln!(
            csv,
            "{},{},{}",
            significant(row.r, CSV_DIGITS),
            significant(row.f_tmss, CSV_DIGITS),
            significant(row.f_mirror, CSV_DIGITS)
        );
    }
    csv
}

pub fn write_sweep(csv: &str, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, csv).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Runs the sweep and writes the CSV to `out`, or returns it for stdout.
pub fn cmd_sweep(r_min: f64, r_max: f64, steps: usize, out: Option<&Path>) -> Result<String, CliError> {
    let csv = sweep_csv(&sweep_rows(r_min, r_max, steps)?);
    if let Some(path) = out {
        write_sweep(&csv, path)?;
    }
    Ok(csv)
}

/// Simulates the scenario and compares it with the analytic engine. With a
/// `beta` the run is conditioned on a window around it and the reference is
/// the conditional output; otherwise it is the averaged output.
pub fn cmd_mc(cfg: &ScenarioConfig, mc: McConfig) -> Result<McReport, CliError> {
    let resource = &cfg.resource.resource;
    let (est, reference, conditioning) = match cfg.beta {
        None => {
            if cfg.tol.is_some() {
                return Err(CliError::Parse("--tol needs --beta".into()));
            }
            let est = run_protocol(&cfg.input, resource, cfg.variant, mc)?;
            (est, averaged_output(&cfg.input, resource, cfg.variant)?, None)
        }
        Some(beta) => {
            let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
            let window = BetaWindow { center: beta, tolerance: tol };
            let est = conditioned_run(&cfg.input, resource, cfg.variant, window, mc)?;
            let reference = conditional_output(&cfg.input, resource, beta, cfg.variant)?;
            let conditioning =
                Conditioning { beta, tol, accepted: est.samples, acceptance_rate: est.acceptance_rate() };
            (est, reference, Some(conditioning))
        }
    };
    let analytic_fidelity = fidelity(&cfg.input, &reference)?;
    let z = est.z_scores(&reference, analytic_fidelity)?;
    let summary = StateSummary::of(&reference);
    Ok(McReport {
        resource: cfg.resource.label.clone(),
        variant: cfg.variant,
        seed: mc.seed,
        samples: mc.samples,
        streams: mc.streams,
        conditioning,
        empirical: Empirical::of(&est),
        standard_errors: est.standard_errors,
        analytic: Analytic { mean: summary.mean, cov: summary.cov, fidelity: analytic_fidelity },
        z_scores: z,
        max_abs_z: z.max_abs(),
        single_shot_delta: single_shot_delta(&cfg.input, resource, cfg.variant)?,
    })
}

/// Whether the output of a single shot, given its `β`, is a point.
fn single_shot_delta(input: &GaussianState, resource: &Resource, variant: ProtocolVariant) -> Result<bool, CliError> {
    if let Resource::Limit(ExactLimit::Epr | ExactLimit::Mirror) = resource {
        return Ok(false);
    }
    let out = conditional_output(input, resource, PhasePoint::ORIGIN, variant)?;
    Ok(out.cov().iter().all(|&v| v == 0.0))
}
