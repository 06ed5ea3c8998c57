//! JSON run configuration.
//!
//! ```json
//! {
//!   "protocol": "stirap-resonant-case2",
//!   "profile": {
//!     "system": "three-state",
//!     "pump":   { "kind": "sin2", "peak": 1.0, "width": 1.0, "delay": 0.2 },
//!     "stokes": { "kind": "sin2", "peak": 1.0, "width": 1.0, "delay": 0.0 },
//!     "detuning": { "kind": "zero" }
//!   },
//!   "sweep": { "parameter": "pulse-area", "lo": 0.0, "hi": 31.41592653589793, "points": 101 },
//!   "output": "case2.csv"
//! }
//! ```
//!
//! Unknown keys are rejected everywhere.

use serde::Deserialize;

use doublepass::drive::DriveError;
use doublepass::evolve::PropagationOptions;
use doublepass::harness::{Profile, ProtocolKind, Settings, SweepParameter, SweepSpec};
use doublepass::inversion::NoiseSlack;
use doublepass::{DetuningShape, DriveProfile2, DriveProfile3, PulseShape, Window};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: ProtocolKind,
    pub profile: ProfileConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "system", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    TwoState {
        rabi: PulseConfig,
        #[serde(default)]
        detuning: DetuningConfig,
        #[serde(default)]
        window: Option<WindowConfig>,
        #[serde(default)]
        steps: Option<usize>,
    },
    ThreeState {
        pump: PulseConfig,
        stokes: PulseConfig,
        #[serde(default)]
        detuning: DetuningConfig,
        #[serde(default)]
        two_photon_detuning: f64,
        #[serde(default)]
        pump_phase: f64,
        #[serde(default)]
        stokes_phase: f64,
        #[serde(default)]
        window: Option<WindowConfig>,
        #[serde(default)]
        steps: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PulseConfig {
    Sin2 { peak: f64, width: f64, delay: f64 },
    Gaussian { peak: f64, width: f64, center: f64 },
    Sech { peak: f64, width: f64, center: f64 },
    Constant { peak: f64 },
    Zero,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DetuningConfig {
    #[default]
    Zero,
    Constant { value: f64 },
    LinearChirp { rate: f64 },
    TanhChirp { amplitude: f64, width: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub noise_slack: Option<f64>,
    pub convergence: Option<f64>,
    pub max_steps: Option<usize>,
    pub adaptive: Option<bool>,
}

impl PulseConfig {
    fn build(self) -> Result<PulseShape, DriveError> {
        match self {
            PulseConfig::Sin2 { peak, width, delay } => PulseShape::sin2(peak, width, delay),
            PulseConfig::Gaussian { peak, width, center } => PulseShape::gaussian(peak, width, center),
            PulseConfig::Sech { peak, width, center } => PulseShape::sech(peak, width, center),
            PulseConfig::Constant { peak } => PulseShape::constant(peak),
            PulseConfig::Zero => Ok(PulseShape::zero()),
        }
    }
}

impl DetuningConfig {
    fn build(self) -> DetuningShape {
        match self {
            DetuningConfig::Zero => DetuningShape::Zero,
            DetuningConfig::Constant { value } => DetuningShape::Constant(value),
            DetuningConfig::LinearChirp { rate } => DetuningShape::LinearChirp { rate },
            DetuningConfig::TanhChirp { amplitude, width } => DetuningShape::TanhChirp { amplitude, width },
        }
    }
}

fn window(config: Option<WindowConfig>, pulses: &[&PulseShape]) -> Result<Window, DriveError> {
    match config {
        Some(w) => Window::new(w.start, w.end),
        None => Ok(Window::covering(pulses)),
    }
}

impl ProfileConfig {
    pub fn build(&self) -> Result<Profile, DriveError> {
        match *self {
            ProfileConfig::TwoState {
                rabi,
                detuning,
                window: w,
                steps,
            } => {
                let rabi = rabi.build()?;
                let window = window(w, &[&rabi])?;
                let steps = steps.unwrap_or(doublepass::drive::DEFAULT_STEPS);
                Ok(DriveProfile2::new(rabi, detuning.build(), window, steps)?.into())
            }
            ProfileConfig::ThreeState {
                pump,
                stokes,
                detuning,
                two_photon_detuning,
                pump_phase,
                stokes_phase,
                window: w,
                steps,
            } => {
                let (pump, stokes) = (pump.build()?, stokes.build()?);
                let window = window(w, &[&pump, &stokes])?;
                let steps = steps.unwrap_or(doublepass::drive::DEFAULT_STEPS);
                let profile = DriveProfile3::new(pump, stokes, detuning.build(), window, steps)?
                    .with_two_photon_detuning(two_photon_detuning)
                    .with_phases(pump_phase, stokes_phase);
                profile.validate()?;
                Ok(profile.into())
            }
        }
    }
}

impl Tolerances {
    pub fn settings(&self) -> Result<Settings, String> {
        let mut settings = Settings::default();
        if let Some(slack) = self.noise_slack {
            if !(slack.is_finite() && slack >= 0.0) {
                return Err(format!("noise_slack must be finite and non-negative, got {slack}"));
            }
            settings.slack = NoiseSlack(slack);
        }
        let defaults = PropagationOptions::default();
        settings.propagation = PropagationOptions {
            adaptive: self.adaptive.unwrap_or(defaults.adaptive),
            convergence_tol: self.convergence.unwrap_or(defaults.convergence_tol),
            max_steps: self.max_steps.unwrap_or(defaults.max_steps),
        };
        if !(settings.propagation.convergence_tol > 0.0) {
            return Err("convergence tolerance must be positive".into());
        }
        Ok(settings)
    }
}

impl RunConfig {
    pub fn settings(&self) -> Result<Settings, String> {
        self.tolerances.unwrap_or_default().settings()
    }

    pub fn sweep_spec(&self, profile: Profile) -> Option<SweepSpec> {
        self.sweep.map(|s| SweepSpec {
            protocol: self.protocol,
            base: profile,
            parameter: s.parameter,
            lo: s.lo,
            hi: s.hi,
            points: s.points,
        })
    }
}
