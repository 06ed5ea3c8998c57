use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::drive::{DetuningShape, DriveProfile2, DriveProfile3, PulseShape, Window};
use crate::evolve::{cayley_klein, hamiltonian2, hamiltonian3, propagate2, propagate3, propagate_adaptive, Mat2, Mat3};
use crate::su2::{self, DoublePassVariant};
use crate::su3::{self, PhasePair};

use super::protocol::{run_protocol, Profile, ProtocolKind, Settings};
use super::random::{self, draw_seed, rng_for};

/// A registered invariant checked over random drive profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Propagators are unitary with unimodular determinant.
    Unitarity,
    /// Propagating over a split window equals the product of the halves.
    Composition,
    /// Analytic sign-flip transforms match propagation of flipped profiles.
    SignFlip,
    /// Even Rabi pulse and odd detuning give a real `a`.
    RapRealA,
    /// Even Rabi pulse and even detuning give an imaginary `b`.
    ConstDetuningImaginaryB,
    /// The two-state average return equals `p^2 + (1-p)^2`.
    AverageReturn,
    /// The general two-state inverter recovers `p`, or `1 - p` below one half.
    BranchRoundTrip,
    /// Under crossing symmetry `Q_flipRabi = 1` and `Q_same = (1-2p)^2`.
    RapReturns,
    /// Under even symmetry `Q_flipDetuning = (1-2p)^2`.
    ConstDetuningReturn,
    /// `p = 1 - e` gives `|Qbar - (1 - 2e)| <= 2 e^2`, checked exactly.
    TwoStateDegradation,
    /// The index-swapped backward propagator stays unitary.
    BackwardUnitarity,
    /// The index-swapped backward propagator matches direct propagation.
    BackwardSimulation,
    /// Resonant symmetric pairs fit the `(alpha, beta, gamma)` template.
    ResonantTemplate,
    /// Resonant double-pass returns follow the two sign cases.
    ResonantCases,
    /// Detuned symmetric pairs have `u11 = u33`, `u12 = u23`, `u21 = u32`.
    ElementPairs,
    /// The simulated four-phase average equals its propagator-element form.
    PhaseAverageElements,
    /// Detuned symmetric pairs obey `Qbar = p^2 + q^2 + (1-p-q)^2`.
    DetunedAverage,
    /// Any three-level drive obeys `Qbar = p^2 + qr + (1-p-q)(1-p-r)`.
    GeneralAverage,
    /// The backward-order survival `r` does not depend on the field phases.
    RPhaseIndependence,
    /// Strongly adiabatic resonant STIRAP: `|(1-Q) - 4(1-p)| <= 8 (1-p)^2`.
    StirapDegradation,
}

impl Suite {
    pub const ALL: [Suite; 20] = [
        Suite::Unitarity,
        Suite::Composition,
        Suite::SignFlip,
        Suite::RapRealA,
        Suite::ConstDetuningImaginaryB,
        Suite::AverageReturn,
        Suite::BranchRoundTrip,
        Suite::RapReturns,
        Suite::ConstDetuningReturn,
        Suite::TwoStateDegradation,
        Suite::BackwardUnitarity,
        Suite::BackwardSimulation,
        Suite::ResonantTemplate,
        Suite::ResonantCases,
        Suite::ElementPairs,
        Suite::PhaseAverageElements,
        Suite::DetunedAverage,
        Suite::GeneralAverage,
        Suite::RPhaseIndependence,
        Suite::StirapDegradation,
    ];

    /// Short aliases accepted on the command line.
    pub const ALIASES: [(&'static str, Suite); 5] = [
        ("eq3", Suite::SignFlip),
        ("eq8", Suite::AverageReturn),
        ("eq25", Suite::ElementPairs),
        ("eq28", Suite::DetunedAverage),
        ("eq31", Suite::GeneralAverage),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Unitarity => "unitarity",
            Suite::Composition => "composition",
            Suite::SignFlip => "sign-flip",
            Suite::RapRealA => "rap-real-a",
            Suite::ConstDetuningImaginaryB => "const-detuning-imaginary-b",
            Suite::AverageReturn => "average-return",
            Suite::BranchRoundTrip => "branch-round-trip",
            Suite::RapReturns => "rap-returns",
            Suite::ConstDetuningReturn => "const-detuning-return",
            Suite::TwoStateDegradation => "two-state-degradation",
            Suite::BackwardUnitarity => "backward-unitarity",
            Suite::BackwardSimulation => "backward-simulation",
            Suite::ResonantTemplate => "resonant-template",
            Suite::ResonantCases => "resonant-cases",
            Suite::ElementPairs => "element-pairs",
            Suite::PhaseAverageElements => "phase-average-elements",
            Suite::DetunedAverage => "detuned-average",
            Suite::GeneralAverage => "general-average",
            Suite::RPhaseIndependence => "r-phase-independence",
            Suite::StirapDegradation => "stirap-degradation",
        }
    }

    /// Pass threshold on the per-draw residual (`residual <= tolerance`).
    pub fn tolerance(self) -> f64 {
        match self {
            Suite::Unitarity | Suite::BackwardUnitarity => 1e-10,
            Suite::Composition | Suite::PhaseAverageElements | Suite::RPhaseIndependence => 1e-9,
            Suite::SignFlip | Suite::RapRealA | Suite::ConstDetuningImaginaryB | Suite::AverageReturn => 1e-8,
            Suite::BranchRoundTrip
            | Suite::RapReturns
            | Suite::ConstDetuningReturn
            | Suite::BackwardSimulation
            | Suite::ResonantTemplate
            | Suite::ResonantCases
            | Suite::ElementPairs
            | Suite::DetunedAverage => 1e-7,
            Suite::GeneralAverage => 1e-6,
            // residuals of the inequality suites are the excess over the bound
            Suite::TwoStateDegradation => 0.0,
            Suite::StirapDegradation => 1e-9,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .or_else(|| Suite::ALIASES.iter().find(|(a, _)| *a == s).map(|&(_, k)| k))
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub draw: usize,
    pub draw_seed: u64,
    pub residual: Option<f64>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub draws: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub passed: bool,
    pub worst_residual: Option<f64>,
    pub worst_draw: Option<usize>,
    pub failures: Vec<Failure>,
}

type DrawResult = Result<f64, String>;

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn double2(p: &DriveProfile2<f64>, v: DoublePassVariant, s: &Settings) -> Result<f64, String> {
    let (fr, fd) = v.flips();
    let first = propagate2(p, &s.propagation).map_err(err)?.matrix;
    let second = propagate2(&p.flipped(fr, fd), &s.propagation).map_err(err)?.matrix;
    Ok((second * first).return_population())
}

fn double3(p: &DriveProfile3<f64>, ph: PhasePair<f64>, s: &Settings) -> Result<f64, String> {
    let first = propagate3(p, &s.propagation).map_err(err)?.matrix;
    let second = propagate3(&p.reversed(ph.xi, ph.eta), &s.propagation).map_err(err)?.matrix;
    Ok((second * first).return_population())
}

fn u2(p: &DriveProfile2<f64>, s: &Settings) -> Result<Mat2<f64>, String> {
    Ok(propagate2(p, &s.propagation).map_err(err)?.matrix)
}

fn u3(p: &DriveProfile3<f64>, s: &Settings) -> Result<Mat3<f64>, String> {
    Ok(propagate3(p, &s.propagation).map_err(err)?.matrix)
}

fn split_point(rng: &mut ChaCha8Rng, w: Window<f64>) -> f64 {
    w.start + w.len() * rng.random_range(0.2..0.8)
}

/// Resonant sin^2 or Gaussian pair deep in the adiabatic regime.
fn adiabatic_pair(rng: &mut ChaCha8Rng) -> DriveProfile3<f64> {
    let area = std::f64::consts::PI * rng.random_range(20.0..40.0);
    let (stokes, delay) = if rng.random_bool(0.5) {
        (PulseShape::sin2(2.0 * area, 1.0, 0.0), rng.random_range(0.15..0.3))
    } else {
        let width = 0.25;
        let peak = area / (width * std::f64::consts::PI.sqrt());
        (PulseShape::gaussian(peak, width, 0.0), width * rng.random_range(1.0..1.5))
    };
    DriveProfile3::stirap(stokes.expect("valid pulse"), delay, DetuningShape::Zero).expect("valid profile")
}

fn check(suite: Suite, rng: &mut ChaCha8Rng, index: usize, s: &Settings) -> DrawResult {
    use DoublePassVariant as V;
    match suite {
        Suite::Unitarity => {
            let (unitarity, det) = if index % 2 == 0 {
                let u = u2(&random::profile2(rng), s)?;
                (u.unitarity_defect(), u.det().norm())
            } else {
                let u = u3(&random::general_profile3(rng), s)?;
                (u.unitarity_defect(), u.det().norm())
            };
            Ok(unitarity.max((det - 1.0).abs()))
        }
        Suite::Composition => {
            let opts = &s.propagation;
            if index % 2 == 0 {
                let p = random::profile2(rng);
                let t1 = split_point(rng, p.window);
                let h = |t| hamiltonian2(&p, t);
                let whole = propagate_adaptive(h, p.window, p.steps, opts).map_err(err)?.matrix;
                let a = propagate_adaptive(h, Window::new(p.window.start, t1).map_err(err)?, p.steps, opts).map_err(err)?;
                let b = propagate_adaptive(h, Window::new(t1, p.window.end).map_err(err)?, p.steps, opts).map_err(err)?;
                Ok((b.matrix * a.matrix).max_abs_diff(&whole))
            } else {
                let p = random::general_profile3(rng);
                let t1 = split_point(rng, p.window);
                let h = |t| hamiltonian3(&p, t);
                let whole = propagate_adaptive(h, p.window, p.steps, opts).map_err(err)?.matrix;
                let a = propagate_adaptive(h, Window::new(p.window.start, t1).map_err(err)?, p.steps, opts).map_err(err)?;
                let b = propagate_adaptive(h, Window::new(t1, p.window.end).map_err(err)?, p.steps, opts).map_err(err)?;
                Ok((b.matrix * a.matrix).max_abs_diff(&whole))
            }
        }
        Suite::SignFlip => {
            let p = random::profile2(rng);
            let (fr, fd) = [(true, false), (false, true), (true, true)][index % 3];
            let ck = cayley_klein(&u2(&p, s)?).map_err(err)?;
            let direct = u2(&p.flipped(fr, fd), s)?;
            Ok(ck.flipped_propagator(fr, fd).max_abs_diff(&direct))
        }
        Suite::RapRealA => {
            let ck = cayley_klein(&u2(&random::crossing_profile2(rng), s)?).map_err(err)?;
            Ok(ck.a.im.abs())
        }
        Suite::ConstDetuningImaginaryB => {
            let ck = cayley_klein(&u2(&random::even_profile2(rng), s)?).map_err(err)?;
            Ok(ck.b.re.abs())
        }
        Suite::AverageReturn => {
            let rec = run_protocol(ProtocolKind::TwoStateGeneral, &Profile::Two(random::profile2(rng)), s).map_err(err)?;
            let p = rec.p_direct.unwrap_or(f64::NAN);
            Ok((rec.q_bar.unwrap_or(f64::NAN) - su2::average_return_for(p)).abs())
        }
        Suite::BranchRoundTrip => {
            let rec = run_protocol(ProtocolKind::TwoStateGeneral, &Profile::Two(random::profile2(rng)), s).map_err(err)?;
            let (p, est) = (rec.p_direct.unwrap_or(f64::NAN), rec.p_estimated.unwrap_or(f64::NAN));
            Ok(if p >= 0.5 + 1e-6 {
                (est - p).abs()
            } else if p < 0.5 {
                (est - (1.0 - p)).abs()
            } else {
                0.0
            })
        }
        Suite::RapReturns => {
            let prof = random::crossing_profile2(rng);
            let p = cayley_klein(&u2(&prof, s)?).map_err(err)?.p();
            let same = double2(&prof, V::Same, s)?;
            let flip = double2(&prof, V::FlipRabi, s)?;
            Ok((flip - 1.0).abs().max((same - (1.0 - 2.0 * p).powi(2)).abs()))
        }
        Suite::ConstDetuningReturn => {
            let prof = random::even_profile2(rng);
            let p = cayley_klein(&u2(&prof, s)?).map_err(err)?.p();
            Ok((double2(&prof, V::FlipDetuning, s)? - (1.0 - 2.0 * p).powi(2)).abs())
        }
        Suite::TwoStateDegradation => {
            let eps = rng.random_range(1e-6..=1e-2);
            let e = BigRational::from_f64(eps).ok_or("unrepresentable epsilon")?;
            let one = BigRational::from_integer(1.into());
            let two = BigRational::from_integer(2.into());
            let q_bar = su2::average_return_for(one.clone() - e.clone());
            let excess = (q_bar - (one - two.clone() * e.clone())).abs() - two * e.clone() * e;
            Ok(excess.to_f64().unwrap_or(f64::NAN))
        }
        Suite::BackwardUnitarity => {
            let u = u3(&random::general_profile3(rng), s)?;
            let ph = PhasePair::new(rng.random_range(0.0..7.0), rng.random_range(0.0..7.0));
            Ok(su3::backward_propagator(&u, ph).unitarity_defect())
        }
        Suite::BackwardSimulation => {
            let p = random::general_profile3(rng);
            let ph = PhasePair::new(rng.random_range(0.0..7.0), rng.random_range(0.0..7.0));
            let u = u3(&p, s)?;
            let direct = u3(&p.reversed(ph.xi, ph.eta), s)?;
            Ok(su3::backward_propagator(&u, ph).max_abs_diff(&direct))
        }
        Suite::ResonantTemplate => {
            let u = u3(&random::resonant_pair(rng), s)?;
            let ck = su3::extract_resonant_ck(&u).map_err(err)?;
            let fit = su3::resonant_propagator(&ck).max_abs_diff(&u);
            let dq = (u[(0, 0)].norm_sqr() - ck.q()).abs();
            let dp = (u[(2, 0)].norm_sqr() - ck.p()).abs();
            Ok(fit.max(dq).max(dp))
        }
        Suite::ResonantCases => {
            let prof = random::resonant_pair(rng);
            let u = u3(&prof, s)?;
            let (p, q) = (u[(2, 0)].norm_sqr(), u[(0, 0)].norm_sqr());
            let [q00, qpi0, ..] = PhasePair::sign_combinations();
            let d1 = (double3(&prof, q00, s)? - su3::case1_return(p, q)).abs();
            let d2 = (double3(&prof, qpi0, s)? - su3::case2_return(p)).abs();
            Ok(d1.max(d2))
        }
        Suite::ElementPairs => Ok(su3::element_pair_residual(&u3(&random::detuned_pair(rng), s)?)),
        Suite::PhaseAverageElements => {
            let prof = random::detuned_pair(rng);
            let u = u3(&prof, s)?;
            let mut q_set = [0.0; 4];
            for (slot, ph) in q_set.iter_mut().zip(PhasePair::sign_combinations()) {
                *slot = double3(&prof, ph, s)?;
            }
            Ok((su3::four_phase_average(q_set) - su3::average_from_elements(&u)).abs())
        }
        Suite::DetunedAverage => {
            let rec = run_protocol(ProtocolKind::StirapDetuned, &Profile::Three(random::detuned_pair(rng)), s).map_err(err)?;
            let (p, q) = (rec.p_direct.unwrap_or(f64::NAN), rec.q.unwrap_or(f64::NAN));
            Ok((rec.q_bar.unwrap_or(f64::NAN) - su3::detuned_average(p, q)).abs())
        }
        Suite::GeneralAverage => {
            let rec =
                run_protocol(ProtocolKind::ThreeStateGeneral, &Profile::Three(random::general_profile3(rng)), s).map_err(err)?;
            let (p, q, r) = (
                rec.p_direct.unwrap_or(f64::NAN),
                rec.q.unwrap_or(f64::NAN),
                rec.r.unwrap_or(f64::NAN),
            );
            Ok((rec.q_bar.unwrap_or(f64::NAN) - su3::general_average(p, q, r)).abs())
        }
        Suite::RPhaseIndependence => {
            let p = random::general_profile3(rng);
            let mut rs = Vec::with_capacity(4);
            for ph in PhasePair::sign_combinations() {
                rs.push(u3(&p.reversed(ph.xi, ph.eta), s)?[(0, 0)].norm_sqr());
            }
            let (lo, hi) = rs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
            Ok(hi - lo)
        }
        Suite::StirapDegradation => {
            let prof = adiabatic_pair(rng);
            let p = u3(&prof, s)?[(2, 0)].norm_sqr();
            let q = double3(&prof, PhasePair::new(std::f64::consts::PI, 0.0), s)?;
            let d = 1.0 - p;
            Ok(((1.0 - q) - 4.0 * d).abs() - 8.0 * d * d)
        }
    }
}

/// Checks `suite` on `draws` random profiles. Draw `i` uses a generator
/// seeded from `(seed, i)`; draws run in parallel and are reported in index
/// order, so the report depends only on the arguments.
pub fn verify(suite: Suite, draws: usize, seed: u64, settings: &Settings) -> VerifyReport {
    let tolerance = suite.tolerance();
    let outcomes: Vec<DrawResult> = (0..draws)
        .into_par_iter()
        .map(|i| check(suite, &mut rng_for(seed, i), i, settings))
        .collect();
    let mut worst: Option<(usize, f64)> = None;
    let mut failures = Vec::new();
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(residual) => {
                if worst.is_none_or(|(_, w)| residual > w || residual.is_nan()) {
                    worst = Some((i, residual));
                }
                if !(residual <= tolerance) {
                    failures.push(Failure {
                        draw: i,
                        draw_seed: draw_seed(seed, i),
                        residual: Some(residual),
                        message: None,
                    });
                }
            }
            Err(message) => failures.push(Failure {
                draw: i,
                draw_seed: draw_seed(seed, i),
                residual: None,
                message: Some(message),
            }),
        }
    }
    VerifyReport {
        suite: suite.name().to_string(),
        draws,
        seed,
        tolerance,
        passed: failures.is_empty(),
        worst_residual: worst.map(|(_, w)| w),
        worst_draw: worst.map(|(i, _)| i),
        failures,
    }
}
