use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drive::{DriveError, DriveProfile2, DriveProfile3};
use crate::evolve::{cayley_klein, propagate2, propagate3, EvolveError, Mat2, Mat3, PropagationOptions};
use crate::inversion::{Estimate, InversionError, NoiseSlack};
use crate::su2;
use crate::su3::{self, PhasePair};

use super::record::{MeasurementRecord, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    TwoStateGeneral,
    TwoStateRap,
    TwoStateConstDetuning,
    StirapResonantCase1,
    StirapResonantCase2,
    StirapDetuned,
    ThreeStateGeneral,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 7] = [
        ProtocolKind::TwoStateGeneral,
        ProtocolKind::TwoStateRap,
        ProtocolKind::TwoStateConstDetuning,
        ProtocolKind::StirapResonantCase1,
        ProtocolKind::StirapResonantCase2,
        ProtocolKind::StirapDetuned,
        ProtocolKind::ThreeStateGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::TwoStateGeneral => "two-state-general",
            ProtocolKind::TwoStateRap => "two-state-rap",
            ProtocolKind::TwoStateConstDetuning => "two-state-const-detuning",
            ProtocolKind::StirapResonantCase1 => "stirap-resonant-case1",
            ProtocolKind::StirapResonantCase2 => "stirap-resonant-case2",
            ProtocolKind::StirapDetuned => "stirap-detuned",
            ProtocolKind::ThreeStateGeneral => "three-state-general",
        }
    }

    pub fn is_two_state(self) -> bool {
        matches!(
            self,
            ProtocolKind::TwoStateGeneral | ProtocolKind::TwoStateRap | ProtocolKind::TwoStateConstDetuning
        )
    }

    /// Number of propagations (single passes or complete double passes) the
    /// protocol performs.
    pub fn simulations(self) -> usize {
        match self {
            ProtocolKind::TwoStateGeneral => 3,
            ProtocolKind::StirapDetuned => 5,
            ProtocolKind::ThreeStateGeneral => 6,
            _ => 2,
        }
    }

    /// Whether the estimate comes from a phase or sign average rather than a
    /// single return probability.
    pub fn is_averaged(self) -> bool {
        matches!(
            self,
            ProtocolKind::TwoStateGeneral | ProtocolKind::StirapDetuned | ProtocolKind::ThreeStateGeneral
        )
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProtocolKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown protocol '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Two(DriveProfile2<f64>),
    Three(DriveProfile3<f64>),
}

impl From<DriveProfile2<f64>> for Profile {
    fn from(p: DriveProfile2<f64>) -> Self {
        Profile::Two(p)
    }
}

impl From<DriveProfile3<f64>> for Profile {
    fn from(p: DriveProfile3<f64>) -> Self {
        Profile::Three(p)
    }
}

/// Numerical knobs shared by all protocol runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub propagation: PropagationOptions<f64>,
    pub slack: NoiseSlack<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            propagation: PropagationOptions::default(),
            slack: NoiseSlack::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid drive: {0}")]
    Drive(#[from] DriveError),
    #[error("propagation failed: {0}")]
    Evolve(#[from] EvolveError),
    #[error("{protocol}: {source}")]
    Inversion {
        protocol: ProtocolKind,
        source: InversionError,
    },
    #[error("invalid sweep: {0}")]
    Sweep(String),
}

/// Executes the passes of one protocol run. Every double pass repeats the
/// forward pass; its propagator is computed once and reused, which gives the
/// same matrices as propagating it afresh.
struct Runner<'a> {
    settings: &'a Settings,
    simulations: usize,
    forward2: Option<Mat2<f64>>,
    forward3: Option<Mat3<f64>>,
}

impl<'a> Runner<'a> {
    fn new(settings: &'a Settings) -> Self {
        Self {
            settings,
            simulations: 0,
            forward2: None,
            forward3: None,
        }
    }

    fn forward2(&mut self, profile: &DriveProfile2<f64>) -> Result<Mat2<f64>, HarnessError> {
        if let Some(u) = self.forward2 {
            return Ok(u);
        }
        let u = propagate2(profile, &self.settings.propagation)?.matrix;
        self.forward2 = Some(u);
        Ok(u)
    }

    fn forward3(&mut self, profile: &DriveProfile3<f64>) -> Result<Mat3<f64>, HarnessError> {
        if let Some(u) = self.forward3 {
            return Ok(u);
        }
        let u = propagate3(profile, &self.settings.propagation)?.matrix;
        self.forward3 = Some(u);
        Ok(u)
    }

    fn single2(&mut self, profile: &DriveProfile2<f64>) -> Result<Mat2<f64>, HarnessError> {
        self.simulations += 1;
        self.forward2(profile)
    }

    /// Forward pass followed by the same pass with the requested sign flips.
    fn double2(&mut self, profile: &DriveProfile2<f64>, variant: su2::DoublePassVariant) -> Result<f64, HarnessError> {
        self.simulations += 1;
        let (flip_rabi, flip_det) = variant.flips();
        let first = self.forward2(profile)?;
        let second = propagate2(&profile.flipped(flip_rabi, flip_det), &self.settings.propagation)?.matrix;
        Ok((second * first).return_population())
    }

    fn single3(&mut self, profile: &DriveProfile3<f64>) -> Result<Mat3<f64>, HarnessError> {
        self.simulations += 1;
        self.forward3(profile)
    }

    fn backward3(&mut self, profile: &DriveProfile3<f64>) -> Result<Mat3<f64>, HarnessError> {
        self.simulations += 1;
        Ok(propagate3(&profile.reversed(0.0, 0.0), &self.settings.propagation)?.matrix)
    }

    fn double3(&mut self, profile: &DriveProfile3<f64>, phases: PhasePair<f64>) -> Result<f64, HarnessError> {
        self.simulations += 1;
        let first = self.forward3(profile)?;
        let second = propagate3(&profile.reversed(phases.xi, phases.eta), &self.settings.propagation)?.matrix;
        Ok((second * first).return_population())
    }
}

fn require(ok: bool, message: impl FnOnce() -> String) -> Result<(), HarnessError> {
    if ok {
        Ok(())
    } else {
        Err(HarnessError::Precondition(message()))
    }
}

fn check_stirap(kind: ProtocolKind, p: &DriveProfile3<f64>) -> Result<(), HarnessError> {
    require(p.is_symmetric_pair(), || {
        format!("{kind} needs pump and Stokes pulses of identical shape, peak and width")
    })?;
    require(p.is_centered_pair(), || {
        format!("{kind} needs the pulse pair centered in the window")
    })?;
    require(p.two_photon_detuning == 0.0, || {
        format!("{kind} needs zero two-photon detuning")
    })?;
    match kind {
        ProtocolKind::StirapDetuned => require(p.detuning.parity().is_even(), || {
            format!("{kind} needs an even single-photon detuning, got {:?} parity", p.detuning.parity())
        }),
        _ => require(p.detuning.is_zero(), || format!("{kind} needs zero single-photon detuning")),
    }
}

/// Checks that `profile` has the dimension and symmetries `kind` relies on.
pub fn check_preconditions(kind: ProtocolKind, profile: &Profile) -> Result<(), HarnessError> {
    match (kind.is_two_state(), profile) {
        (true, Profile::Two(p)) => match kind {
            ProtocolKind::TwoStateRap => require(p.has_crossing_symmetry(), || {
                format!(
                    "{kind} needs an even Rabi pulse and odd detuning about the window midpoint \
                     (detuning parity {:?})",
                    p.detuning.parity()
                )
            }),
            ProtocolKind::TwoStateConstDetuning => require(p.has_even_symmetry(), || {
                format!(
                    "{kind} needs an even Rabi pulse and even detuning about the window midpoint \
                     (detuning parity {:?})",
                    p.detuning.parity()
                )
            }),
            _ => Ok(()),
        },
        (false, Profile::Three(p)) => match kind {
            ProtocolKind::ThreeStateGeneral => Ok(()),
            _ => check_stirap(kind, p),
        },
        (true, Profile::Three(_)) => Err(HarnessError::Precondition(format!("{kind} needs a two-state profile"))),
        (false, Profile::Two(_)) => Err(HarnessError::Precondition(format!("{kind} needs a three-state profile"))),
    }
}

/// Runs the complete measurement protocol `kind` on `profile`: the forward
/// pass for the directly simulated probabilities, the prescribed double
/// passes, and the matching inversion.
pub fn run_protocol(kind: ProtocolKind, profile: &Profile, settings: &Settings) -> Result<MeasurementRecord, HarnessError> {
    check_preconditions(kind, profile)?;
    let mut runner = Runner::new(settings);
    let mut rec = MeasurementRecord::default();
    let slack = settings.slack;
    let inv = |r: Result<Estimate<f64>, InversionError>| r.map_err(|source| HarnessError::Inversion { protocol: kind, source });

    let estimate = match profile {
        Profile::Two(prof) => {
            let u = runner.single2(prof)?;
            let ck = cayley_klein(&u)?;
            rec.p_direct = Some(ck.p());
            rec.q = Some(ck.q());
            use su2::DoublePassVariant as V;
            match kind {
                ProtocolKind::TwoStateGeneral => {
                    let same = runner.double2(prof, V::Same)?;
                    let flip = runner.double2(prof, V::FlipRabi)?;
                    let q_bar = su2::average_return(same, flip);
                    rec.q_variants[0] = Some(same);
                    rec.q_variants[1] = Some(flip);
                    rec.q_bar = Some(q_bar);
                    rec.classical_estimate = Some(q_bar.sqrt());
                    inv(su2::invert_p_general(q_bar, slack))?
                }
                ProtocolKind::TwoStateRap => {
                    let same = runner.double2(prof, V::Same)?;
                    rec.q_variants[0] = Some(same);
                    rec.classical_estimate = Some(same.sqrt());
                    inv(su2::invert_p_rap(same, slack))?
                }
                _ => {
                    let flip = runner.double2(prof, V::FlipDetuning)?;
                    rec.q_variants[2] = Some(flip);
                    rec.classical_estimate = Some(flip.sqrt());
                    inv(su2::invert_p_const_detuning(flip, slack))?
                }
            }
        }
        Profile::Three(prof) => {
            let u = runner.single3(prof)?;
            let (p, q) = (u[(2, 0)].norm_sqr(), u[(0, 0)].norm_sqr());
            rec.p_direct = Some(p);
            rec.q = Some(q);
            let phases = PhasePair::sign_combinations();
            match kind {
                ProtocolKind::StirapResonantCase1 => {
                    let q00 = runner.double3(prof, phases[0])?;
                    rec.q_variants[0] = Some(q00);
                    rec.classical_estimate = Some(q00.sqrt());
                    inv(su3::invert_case1(q00, q, slack))?
                }
                ProtocolKind::StirapResonantCase2 => {
                    let qpi0 = runner.double3(prof, phases[1])?;
                    rec.q_variants[1] = Some(qpi0);
                    rec.classical_estimate = Some(qpi0.sqrt());
                    inv(su3::invert_case2(qpi0, slack))?
                }
                _ => {
                    let r = if kind == ProtocolKind::ThreeStateGeneral {
                        let ur = runner.backward3(prof)?;
                        Some(ur[(0, 0)].norm_sqr())
                    } else {
                        None
                    };
                    let mut q_set = [0.0; 4];
                    for (slot, ph) in q_set.iter_mut().zip(phases) {
                        *slot = runner.double3(prof, ph)?;
                    }
                    let q_bar = su3::four_phase_average(q_set);
                    rec.r = r;
                    rec.q_variants = q_set.map(Some);
                    rec.q_bar = Some(q_bar);
                    rec.classical_estimate = Some(q_bar.sqrt());
                    match r {
                        Some(r) => inv(su3::invert_general(q_bar, q, r, slack))?,
                        None => inv(su3::invert_detuned(q_bar, q, slack))?,
                    }
                }
            }
        }
    };
    debug_assert_eq!(runner.simulations, kind.simulations());
    rec.simulations = runner.simulations;
    rec.p_estimated = Some(estimate.p);
    rec.status = Status::classify(rec.p_direct.unwrap_or(f64::NAN), &estimate);
    Ok(rec)
}
