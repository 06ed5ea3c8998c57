use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drive::{DriveProfile3, PulseShape, Window};

use super::protocol::{run_protocol, HarnessError, Profile, ProtocolKind, Settings};
use super::record::MeasurementRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    /// Area of every pulse; peaks are rescaled, shapes kept.
    PulseArea,
    /// Pump delay relative to the Stokes pulse; the window is recomputed.
    Delay,
    /// Magnitude of the detuning (constant value, chirp rate or amplitude).
    Detuning,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::PulseArea => "pulse-area",
            SweepParameter::Delay => "delay",
            SweepParameter::Detuning => "detuning",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [SweepParameter::PulseArea, SweepParameter::Delay, SweepParameter::Detuning]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown sweep parameter '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub protocol: ProtocolKind,
    pub base: Profile,
    pub parameter: SweepParameter,
    pub lo: f64,
    pub hi: f64,
    /// Grid points for a non-empty range; `lo == hi` gives a single point.
    pub points: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.lo.is_finite() && self.hi.is_finite()) {
            return Err(HarnessError::Sweep("range must be finite".into()));
        }
        if self.lo > self.hi {
            return Err(HarnessError::Sweep(format!("lo = {} exceeds hi = {}", self.lo, self.hi)));
        }
        if self.points < 2 {
            return Err(HarnessError::Sweep(format!("at least 2 points are required, got {}", self.points)));
        }
        if self.parameter == SweepParameter::Delay && !matches!(self.base, Profile::Three(_)) {
            return Err(HarnessError::Sweep("delay sweeps need a three-state profile".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.lo == self.hi {
            return vec![self.lo];
        }
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / n as f64
                }
            })
            .collect()
    }

    /// The base profile with the swept parameter set to `value`.
    pub fn profile_at(&self, value: f64) -> Result<Profile, HarnessError> {
        match (self.parameter, self.base) {
            (SweepParameter::PulseArea, Profile::Two(mut p)) => {
                p.rabi = with_area(&p.rabi, value, p.window)?;
                Ok(Profile::Two(p))
            }
            (SweepParameter::PulseArea, Profile::Three(mut p)) => {
                p.pump = with_area(&p.pump, value, p.window)?;
                p.stokes = with_area(&p.stokes, value, p.window)?;
                Ok(Profile::Three(p))
            }
            (SweepParameter::Detuning, Profile::Two(mut p)) => {
                p.detuning = p.detuning.with_magnitude(value);
                Ok(Profile::Two(p))
            }
            (SweepParameter::Detuning, Profile::Three(mut p)) => {
                p.detuning = p.detuning.with_magnitude(value);
                Ok(Profile::Three(p))
            }
            (SweepParameter::Delay, Profile::Three(p)) => Ok(Profile::Three(with_delay(&p, value)?)),
            (SweepParameter::Delay, Profile::Two(_)) => {
                Err(HarnessError::Sweep("delay sweeps need a three-state profile".into()))
            }
        }
    }
}

fn with_area(pulse: &PulseShape<f64>, area: f64, window: Window<f64>) -> Result<PulseShape<f64>, HarnessError> {
    let unit = pulse.unit_area(window);
    if !(unit > 0.0) {
        return Err(HarnessError::Sweep(format!("a {:?} pulse has no area to rescale", pulse.kind())));
    }
    Ok(pulse.with_peak(area / unit)?)
}

fn with_delay(p: &DriveProfile3<f64>, delay: f64) -> Result<DriveProfile3<f64>, HarnessError> {
    let pump = p.pump.with_offset(p.stokes.offset() + delay)?;
    let mut out = *p;
    out.pump = pump;
    out.window = Window::covering(&[&pump, &p.stokes]);
    Ok(out)
}

/// Runs the protocol at every grid point. Points are evaluated in parallel
/// and returned in grid order; a failing point becomes an error row.
pub fn sweep(spec: &SweepSpec, settings: &Settings) -> Result<Vec<MeasurementRecord>, HarnessError> {
    spec.validate()?;
    Ok(spec
        .values()
        .into_par_iter()
        .map(|value| {
            let result = spec
                .profile_at(value)
                .and_then(|profile| run_protocol(spec.protocol, &profile, settings));
            match result {
                Ok(mut rec) => {
                    rec.swept_value = Some(value);
                    rec
                }
                Err(e) => MeasurementRecord::failed(Some(value), e.to_string()),
            }
        })
        .collect())
}
