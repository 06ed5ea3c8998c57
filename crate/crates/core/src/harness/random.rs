//! Seeded random drive profiles for the verification suites.
//!
//! Peaks are drawn from `[0.5, 20]`, pump delays from `[0.05, 0.5]` and
//! detunings from `[-20, 20]` (units of `1/T` and `T`). Each draw owns a
//! generator seeded from `(seed, index)`, so draws are independent of
//! evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drive::{DetuningShape, DriveProfile2, DriveProfile3, PulseShape, Window};

pub const PEAK_RANGE: (f64, f64) = (0.5, 20.0);
pub const DELAY_RANGE: (f64, f64) = (0.05, 0.5);
pub const DETUNING_RANGE: (f64, f64) = (-20.0, 20.0);

/// SplitMix64 finalizer, used to decorrelate consecutive draw seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn draw_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed.wrapping_add(index as u64))
}

pub fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(draw_seed(seed, index))
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    rng.random_range(lo..hi)
}

fn peak(rng: &mut impl Rng) -> f64 {
    uniform(rng, PEAK_RANGE)
}

/// A bell-shaped or sin^2 pulse centered at `center`.
pub fn centered_pulse(rng: &mut impl Rng, center: f64) -> PulseShape<f64> {
    let peak = peak(rng);
    let pulse = match rng.random_range(0..3) {
        0 => PulseShape::sin2(peak, 1.0, center - 0.5),
        1 => PulseShape::gaussian(peak, uniform(rng, (0.15, 0.4)), center),
        _ => PulseShape::sech(peak, uniform(rng, (0.1, 0.3)), center),
    };
    pulse.expect("sampled pulse parameters are valid")
}

/// Any catalog pulse, including constant ones.
pub fn any_pulse(rng: &mut impl Rng) -> PulseShape<f64> {
    if rng.random_bool(0.15) {
        return PulseShape::constant(peak(rng) * 0.5).expect("valid constant pulse");
    }
    let center = uniform(rng, (-0.3, 0.3));
    centered_pulse(rng, center)
}

pub fn constant_detuning(rng: &mut impl Rng) -> DetuningShape<f64> {
    DetuningShape::Constant(uniform(rng, DETUNING_RANGE))
}

/// Odd detuning whose excursion at the window edge stays within the
/// detuning range.
pub fn odd_detuning(rng: &mut impl Rng, window: Window<f64>) -> DetuningShape<f64> {
    let edge = uniform(rng, DETUNING_RANGE);
    if rng.random_bool(0.5) {
        DetuningShape::LinearChirp {
            rate: edge / (window.len() * 0.5),
        }
    } else {
        DetuningShape::TanhChirp {
            amplitude: edge,
            width: uniform(rng, (0.05, 0.3)),
        }
    }
}

pub fn any_detuning(rng: &mut impl Rng, window: Window<f64>) -> DetuningShape<f64> {
    match rng.random_range(0..4) {
        0 => DetuningShape::Zero,
        1 => constant_detuning(rng),
        _ => odd_detuning(rng, window),
    }
}

/// Unrestricted two-state profile.
pub fn profile2(rng: &mut impl Rng) -> DriveProfile2<f64> {
    let rabi = any_pulse(rng);
    let window = Window::covering(&[&rabi]);
    let detuning = any_detuning(rng, window);
    DriveProfile2::with_default_window(rabi, detuning).expect("valid random profile")
}

/// Even Rabi pulse and odd detuning about the window midpoint.
pub fn crossing_profile2(rng: &mut impl Rng) -> DriveProfile2<f64> {
    let rabi = centered_pulse(rng, 0.0);
    let window = Window::covering(&[&rabi]);
    let detuning = odd_detuning(rng, window);
    DriveProfile2::with_default_window(rabi, detuning).expect("valid random profile")
}

/// Even Rabi pulse and constant detuning.
pub fn even_profile2(rng: &mut impl Rng) -> DriveProfile2<f64> {
    let rabi = centered_pulse(rng, 0.0);
    let detuning = constant_detuning(rng);
    DriveProfile2::with_default_window(rabi, detuning).expect("valid random profile")
}

fn stirap_pair(rng: &mut impl Rng, detuning: DetuningShape<f64>) -> DriveProfile3<f64> {
    let stokes = centered_pulse(rng, 0.0);
    let delay = uniform(rng, DELAY_RANGE);
    DriveProfile3::stirap(stokes, delay, detuning).expect("valid random profile")
}

/// Symmetric delayed pair on resonance.
pub fn resonant_pair(rng: &mut impl Rng) -> DriveProfile3<f64> {
    stirap_pair(rng, DetuningShape::Zero)
}

/// Symmetric delayed pair with a constant single-photon detuning.
pub fn detuned_pair(rng: &mut impl Rng) -> DriveProfile3<f64> {
    let detuning = constant_detuning(rng);
    stirap_pair(rng, detuning)
}

/// Independent pump and Stokes pulses, any detuning, a two-photon detuning
/// and random field phases.
pub fn general_profile3(rng: &mut impl Rng) -> DriveProfile3<f64> {
    let stokes_center = uniform(rng, (-0.3, 0.3));
    let stokes = centered_pulse(rng, stokes_center);
    let pump_center = stokes_center + uniform(rng, DELAY_RANGE);
    let pump = centered_pulse(rng, pump_center);
    let window = Window::covering(&[&pump, &stokes]);
    let detuning = any_detuning(rng, window);
    let tau = std::f64::consts::TAU;
    DriveProfile3::with_default_window(pump, stokes, detuning)
        .expect("valid random profile")
        .with_two_photon_detuning(uniform(rng, DETUNING_RANGE) * 0.25)
        .with_phases(uniform(rng, (0.0, tau)), uniform(rng, (0.0, tau)))
}
