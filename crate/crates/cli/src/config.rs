//! Run configuration: a TOML file with fixed section and key names. Unknown
//! keys are rejected.
//!
//! ```toml
//! [system]
//! n_sites = 4
//! hamiltonian = "xy"          # or "custom", with [[system.terms]]
//! initial_state = "all_up"    # or "maximally_mixed"
//!
//! [otoc]
//! i = 2
//! a = "x"
//! j = 3
//! b = "x"
//! t_min = 0.0
//! t_max = 3.0
//! n_times = 31
//!
//! [sampling]
//! n_shots = 10000
//! seed = 42
//! n_repeats = 100
//!
//! [angles]
//! theta1 = 1.5707963267948966
//! theta2 = 1.5707963267948966
//! theta3 = 1.5707963267948966
//!
//! [dressing]
//! laser_rabi = 2.0
//! laser_detuning = 4.0
//! microwave_rabi = 40.0       # omit both microwave keys to search
//! microwave_detuning = 45.0
//! c6 = 20000.0
//! c3 = -1000.0
//! r_min = 1.0
//! r_max = 12.0
//! n_points = 111
//! microwave = true
//! ```

use std::f64::consts::FRAC_PI_2;

use serde::Deserialize;

use otoc_sim::dressing::{Drive, InteractionCoefficients, LevelScheme};
use otoc_sim::dynamics::{build_custom, build_xy_chain, Hamiltonian, Term};
use otoc_sim::hilbert::{DensityOperator, PauliAxis, SiteIndex};
use otoc_sim::otoc::OtocSpec;
use otoc_sim::protocol::RotationAngles;
use otoc_sim::sampling::SampleConfig;

use crate::CliError;

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: Option<SystemConfig>,
    pub otoc: Option<OtocConfig>,
    pub sampling: Option<SamplingConfig>,
    pub angles: Option<AnglesConfig>,
    pub dressing: Option<DressingConfig>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    Xy,
    Custom,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    AllUp,
    MaximallyMixed,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum TermConfig {
    Pair { i: usize, a: String, j: usize, b: String, strength: f64 },
    Field { site: usize, axis: String, strength: f64 },
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub n_sites: usize,
    pub hamiltonian: HamiltonianKind,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub terms: Vec<TermConfig>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OtocConfig {
    pub i: usize,
    pub a: String,
    pub j: usize,
    pub b: String,
    #[serde(default)]
    pub t_min: f64,
    pub t_max: f64,
    pub n_times: usize,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub n_shots: u64,
    pub seed: u64,
    #[serde(default = "default_repeats")]
    pub n_repeats: u64,
}

fn default_repeats() -> u64 {
    100
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnglesConfig {
    #[serde(default = "half_pi")]
    pub theta1: f64,
    #[serde(default = "half_pi")]
    pub theta2: f64,
    #[serde(default = "half_pi")]
    pub theta3: f64,
}

fn half_pi() -> f64 {
    FRAC_PI_2
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DressingConfig {
    pub laser_rabi: f64,
    pub laser_detuning: f64,
    pub microwave_rabi: Option<f64>,
    pub microwave_detuning: Option<f64>,
    pub c6: f64,
    pub c3: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
    #[serde(default = "yes")]
    pub microwave: bool,
}

fn yes() -> bool {
    true
}

fn invalid(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {message}"))
}

fn axis(field: &str, value: &str) -> Result<PauliAxis, CliError> {
    value.parse().map_err(|e| invalid(field, e))
}

fn site(field: &str, value: usize, n_sites: usize) -> Result<SiteIndex, CliError> {
    let s = SiteIndex::new(value).map_err(|e| invalid(field, e))?;
    s.check(n_sites).map_err(|e| invalid(field, e))?;
    Ok(s)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    fn section<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        value.as_ref().ok_or_else(|| CliError::Config(format!("missing [{name}] section")))
    }

    pub fn spin_system(&self) -> Result<SpinSystem, CliError> {
        let system = Self::section(&self.system, "system")?;
        let otoc = Self::section(&self.otoc, "otoc")?;
        let n = system.n_sites;
        if !(2..=otoc_sim::hilbert::MAX_SITES).contains(&n) {
            return Err(invalid("system.n_sites", format!("must be in 2..={}", otoc_sim::hilbert::MAX_SITES)));
        }

        let hamiltonian = match system.hamiltonian {
            HamiltonianKind::Xy => {
                if !system.terms.is_empty() {
                    return Err(invalid("system.terms", "only allowed with hamiltonian = \"custom\""));
                }
                build_xy_chain(n).map_err(|e| invalid("system.hamiltonian", e))?
            }
            HamiltonianKind::Custom => {
                let mut terms = Vec::with_capacity(system.terms.len());
                for (k, term) in system.terms.iter().enumerate() {
                    let field = format!("system.terms[{k}]");
                    terms.push(match term {
                        TermConfig::Pair { i, a, j, b, strength } => Term::Pair {
                            i: site(&format!("{field}.i"), *i, n)?,
                            a: axis(&format!("{field}.a"), a)?,
                            j: site(&format!("{field}.j"), *j, n)?,
                            b: axis(&format!("{field}.b"), b)?,
                            strength: *strength,
                        },
                        TermConfig::Field { site: s, axis: ax, strength } => Term::Field {
                            site: site(&format!("{field}.site"), *s, n)?,
                            axis: axis(&format!("{field}.axis"), ax)?,
                            strength: *strength,
                        },
                    });
                }
                build_custom(n, &terms).map_err(|e| invalid("system.terms", e))?
            }
        };

        let state = match system.initial_state {
            InitialState::AllUp => DensityOperator::all_up(n),
            InitialState::MaximallyMixed => DensityOperator::maximally_mixed(n),
        }
        .map_err(|e| invalid("system.initial_state", e))?;

        let spec = OtocSpec {
            i: site("otoc.i", otoc.i, n)?,
            a: axis("otoc.a", &otoc.a)?,
            j: site("otoc.j", otoc.j, n)?,
            b: axis("otoc.b", &otoc.b)?,
        };
        let times = time_grid(otoc.t_min, otoc.t_max, otoc.n_times)?;
        Ok(SpinSystem { hamiltonian, state, spec, times })
    }

    pub fn sample_config(&self, seed_override: Option<u64>) -> Result<SampleConfig, CliError> {
        let s = Self::section(&self.sampling, "sampling")?;
        SampleConfig::new(s.n_shots, seed_override.unwrap_or(s.seed), s.n_repeats)
            .map_err(|e| invalid("sampling", e))
    }

    /// Seed from `[sampling]` or the override, if either is present.
    pub fn seed(&self, seed_override: Option<u64>) -> Option<u64> {
        seed_override.or(self.sampling.as_ref().map(|s| s.seed))
    }

    pub fn angles(&self) -> Result<RotationAngles, CliError> {
        let angles = match &self.angles {
            Some(a) => RotationAngles::new(a.theta1, a.theta2, a.theta3),
            None => RotationAngles::default(),
        };
        angles.validate().map_err(|e| invalid("angles", e))?;
        if angles.prefactor().abs() <= otoc_sim::protocol::PREFACTOR_GUARD {
            return Err(invalid("angles", format!("degenerate prefactor {:.3e}", angles.prefactor())));
        }
        Ok(angles)
    }

    pub fn dressing(&self) -> Result<DressingSetup, CliError> {
        let d = Self::section(&self.dressing, "dressing")?;
        let laser = Drive::new(d.laser_rabi, d.laser_detuning);
        let microwave = match (d.microwave_rabi, d.microwave_detuning) {
            (Some(rabi), Some(detuning)) => Some(Drive::new(rabi, detuning)),
            (None, None) => None,
            _ => {
                return Err(invalid(
                    "dressing.microwave_rabi",
                    "set both microwave_rabi and microwave_detuning, or neither to search",
                ))
            }
        };
        LevelScheme::new(laser, microwave.unwrap_or(Drive::OFF)).map_err(|e| invalid("dressing", e))?;
        if !(d.c6.is_finite() && d.c3.is_finite()) {
            return Err(invalid("dressing.c6", "coefficients must be finite"));
        }
        otoc_sim::dressing::uniform_grid(d.r_min, d.r_max, d.n_points).map_err(|e| invalid("dressing.r_min", e))?;
        Ok(DressingSetup {
            laser,
            microwave,
            coeffs: InteractionCoefficients { c6: d.c6, c3: d.c3 },
            r_min: d.r_min,
            r_max: d.r_max,
            n_points: d.n_points,
            emit_on: d.microwave,
        })
    }
}

/// Uniform grid from `t_min` to `t_max`; a single point needs `t_min == t_max`.
pub fn time_grid(t_min: f64, t_max: f64, n_times: usize) -> Result<Vec<f64>, CliError> {
    if !(t_min.is_finite() && t_max.is_finite()) {
        return Err(invalid("otoc.t_max", "times must be finite"));
    }
    match n_times {
        0 => Err(invalid("otoc.n_times", "must be at least 1")),
        1 if t_min == t_max => Ok(vec![t_min]),
        1 => Err(invalid("otoc.n_times", "a single time point needs t_min = t_max")),
        _ if t_max <= t_min => Err(invalid("otoc.t_max", "time grid must be strictly increasing")),
        _ => {
            let step = (t_max - t_min) / (n_times - 1) as f64;
            Ok((0..n_times)
                .map(|k| if k + 1 == n_times { t_max } else { t_min + step * k as f64 })
                .collect())
        }
    }
}

pub struct SpinSystem {
    pub hamiltonian: Hamiltonian,
    pub state: DensityOperator,
    pub spec: OtocSpec,
    pub times: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DressingSetup {
    pub laser: Drive,
    /// `None` runs the grid search for an inverting configuration.
    pub microwave: Option<Drive>,
    pub coeffs: InteractionCoefficients,
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
    pub emit_on: bool,
}
