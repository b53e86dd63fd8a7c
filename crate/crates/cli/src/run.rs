//! The `exact`, `sample`, `im` and `dressing` runs. Each one turns a config
//! file into a rendered CSV table plus any invariant violations found on the
//! way; the caller decides where the table goes.

use rayon::prelude::*;

use otoc_sim::dressing::{
    is_inverted, scan_curve, search_inversion, InversionSearch, LevelScheme,
};
use otoc_sim::dynamics::Propagator;
use otoc_sim::otoc::otoc_direct;
use otoc_sim::protocol::{
    corr_from_table, im_otoc_via_protocol, outcome_probabilities, re_otoc_via_protocol,
};
use otoc_sim::sampling::{
    repeated_estimates, sample_rotation_protocol, sample_std, SampleConfig, GENERATOR,
};

use crate::config::{RunConfig, SpinSystem};
use crate::csv::{render_dressing, render_results, DressingRow, Header, ResultRow};
use crate::{CliError, IDENTITY_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Exact,
    Sample,
    Im,
    Dressing,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Exact => "exact",
            Command::Sample => "sample",
            Command::Im => "im",
            Command::Dressing => "dressing",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    /// Rows whose identity residual exceeded [`IDENTITY_TOL`].
    pub violations: Vec<String>,
}

pub fn execute(command: Command, config_text: &str, seed_override: Option<u64>) -> Result<RunOutput, CliError> {
    let config = RunConfig::parse(config_text)?;
    let mut header = Header::new(command.name(), config_text.as_bytes());
    match command {
        Command::Exact => {
            let system = config.spin_system()?;
            let angles = config.angles()?;
            let rows = par_rows(&system, |prop, t| {
                let c = otoc_direct(&system.state, &system.spec, prop, t)?;
                let re = re_otoc_via_protocol(&system.state, &system.spec, prop, t)?;
                let im = im_otoc_via_protocol(&system.state, &system.spec, prop, t, &angles)?;
                Ok(ResultRow {
                    t,
                    re_exact: c.re,
                    im_exact: c.im,
                    re_protocol: Some(re),
                    im_protocol: Some(im),
                    identity_residual: Some((re - c.re).abs().max((im - c.im).abs())),
                    ..Default::default()
                })
            })?;
            header.extra.push(("angles".into(), format_angles(&config)?));
            Ok(finish_results(&header, rows))
        }
        Command::Sample => {
            let system = config.spin_system()?;
            let sampling = config.sample_config(seed_override)?;
            header.seed = Some(sampling.seed);
            header.generator = Some(GENERATOR.into());
            header.extra.push(("n_repeats".into(), sampling.n_repeats.to_string()));
            let rows = par_rows_indexed(&system, |prop, k, t| {
                let c = otoc_direct(&system.state, &system.spec, prop, t)?;
                let table = outcome_probabilities(&system.state, &system.spec, prop, t)?;
                let re = 2.0 * corr_from_table(&table)? - 1.0;
                let estimates = repeated_estimates(&table, &sampling.with_stream(k))?;
                let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
                let band = (values.len() >= 2).then(|| sample_std(&values));
                Ok(ResultRow {
                    t,
                    re_exact: c.re,
                    im_exact: c.im,
                    re_protocol: Some(re),
                    identity_residual: Some((re - c.re).abs()),
                    re_estimate: Some(estimates[0].value),
                    re_stderr: Some(estimates[0].stderr),
                    re_band: band,
                    n_shots: Some(sampling.n_shots),
                    ..Default::default()
                })
            })?;
            Ok(finish_results(&header, rows))
        }
        Command::Im => {
            let system = config.spin_system()?;
            let angles = config.angles()?;
            let sampling: Option<SampleConfig> = match config.sampling {
                Some(_) => Some(config.sample_config(seed_override)?),
                None => None,
            };
            header.seed = sampling.map(|s| s.seed);
            header.generator = sampling.map(|_| GENERATOR.into());
            header.extra.push(("angles".into(), format_angles(&config)?));
            let rows = par_rows_indexed(&system, |prop, k, t| {
                let c = otoc_direct(&system.state, &system.spec, prop, t)?;
                let im = im_otoc_via_protocol(&system.state, &system.spec, prop, t, &angles)?;
                let estimate = sampling
                    .map(|s| sample_rotation_protocol(&system.state, &system.spec, prop, t, &angles, &s.with_stream(k)))
                    .transpose()?;
                Ok(ResultRow {
                    t,
                    re_exact: c.re,
                    im_exact: c.im,
                    im_protocol: Some(im),
                    identity_residual: Some((im - c.im).abs()),
                    im_estimate: estimate.map(|e| e.value),
                    im_stderr: estimate.map(|e| e.stderr),
                    n_shots: estimate.map(|e| e.n_shots),
                    ..Default::default()
                })
            })?;
            Ok(finish_results(&header, rows))
        }
        Command::Dressing => run_dressing(&config, header),
    }
}

fn format_angles(config: &RunConfig) -> Result<String, CliError> {
    let a = config.angles()?;
    Ok(format!("{:.16e} {:.16e} {:.16e}", a.theta1, a.theta2, a.theta3))
}

fn par_rows<F>(system: &SpinSystem, row: F) -> Result<Vec<ResultRow>, CliError>
where
    F: Fn(&Propagator, f64) -> Result<ResultRow, otoc_sim::Error> + Sync,
{
    par_rows_indexed(system, |prop, _, t| row(prop, t))
}

/// Evaluates every time point in parallel; rows come back in grid order.
fn par_rows_indexed<F>(system: &SpinSystem, row: F) -> Result<Vec<ResultRow>, CliError>
where
    F: Fn(&Propagator, u64, f64) -> Result<ResultRow, otoc_sim::Error> + Sync,
{
    let prop = Propagator::new(&system.hamiltonian);
    let rows: Result<Vec<_>, _> = system
        .times
        .par_iter()
        .enumerate()
        .map(|(k, &t)| row(&prop, k as u64, t))
        .collect();
    Ok(rows?)
}

fn finish_results(header: &Header, rows: Vec<ResultRow>) -> RunOutput {
    let violations = rows
        .iter()
        .filter_map(|row| {
            let residual = row.identity_residual?;
            (residual.is_nan() || residual > IDENTITY_TOL)
                .then(|| format!("t = {}: identity residual {residual:.3e} exceeds {IDENTITY_TOL:.0e}", row.t))
        })
        .collect();
    RunOutput { csv: render_results(header, &rows), violations }
}

fn run_dressing(config: &RunConfig, mut header: Header) -> Result<RunOutput, CliError> {
    let setup = config.dressing()?;
    let microwave = match setup.microwave {
        Some(drive) => drive,
        None => {
            let search = InversionSearch {
                r_min: setup.r_min,
                r_max: setup.r_max,
                n_points: setup.n_points,
                ..Default::default()
            };
            let found = search_inversion(setup.laser, &setup.coeffs, &search)?
                .ok_or_else(|| CliError::Invariant("no microwave configuration on the search grid inverts J".into()))?;
            header.extra.push(("microwave_search".into(), "default grid".into()));
            found.microwave
        }
    };
    header.extra.push(("microwave_rabi_mhz".into(), crate::csv::real(microwave.rabi)));
    header.extra.push(("microwave_detuning_mhz".into(), crate::csv::real(microwave.detuning)));

    let scheme = LevelScheme::new(setup.laser, microwave)?;
    let off = scan_curve(&scheme, &setup.coeffs, setup.r_min, setup.r_max, setup.n_points, false)?;
    let on = if setup.emit_on {
        Some(scan_curve(&scheme, &setup.coeffs, setup.r_min, setup.r_max, setup.n_points, true)?)
    } else {
        None
    };
    let rows: Vec<DressingRow> = (0..off.len())
        .map(|k| {
            let j_on = on.as_ref().map(|c| c.j_values[k]);
            DressingRow {
                r: off.distances[k],
                j_off: off.j_values[k],
                j_on,
                inverted: j_on.map(|j| is_inverted(off.j_values[k], j)),
            }
        })
        .collect();
    Ok(RunOutput { csv: render_dressing(&header, &rows), violations: Vec::new() })
}
