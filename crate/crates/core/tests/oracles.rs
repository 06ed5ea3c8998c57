//! Closed-form two-level transition probabilities used as oracles for the
//! integrator and the inverters.

use std::f64::consts::PI;

use doublepass::drive::{DetuningShape, DriveProfile2, PulseShape, Window};
use doublepass::evolve::{cayley_klein, propagate2, PropagationOptions};
use doublepass::harness::{run_protocol, Profile, ProtocolKind, Settings};

fn transition(profile: &DriveProfile2<f64>) -> f64 {
    let u = propagate2(profile, &PropagationOptions::default()).unwrap().matrix;
    u[(1, 0)].norm_sqr()
}

fn landau_zener_profile(rabi: f64, rate: f64, half: f64) -> DriveProfile2<f64> {
    DriveProfile2::new(
        PulseShape::constant(rabi).unwrap(),
        DetuningShape::LinearChirp { rate },
        Window::new(-half, half).unwrap(),
        4000,
    )
    .unwrap()
}

#[test]
fn landau_zener() {
    for (rabi, rate) in [(1.0, 1.0), (0.5, 2.0), (2.0, 10.0)] {
        let expected = 1.0 - (-PI * rabi * rabi / (2.0 * rate)).exp();
        // window of +-50 sweep widths rabi / rate; the abrupt cut leaves a
        // tail oscillating in rate * L^2 / 2 with amplitude ~ rabi / (rate L)
        let half = 50.0 * rabi / rate;
        let p = transition(&landau_zener_profile(rabi, rate, half));
        assert!((p - expected).abs() < 2.0 * rabi / (rate * half), "rabi {rabi} rate {rate}: {p}");
        // averaging over one period of the tail phase removes it
        let m = 32;
        let mean = (0..m)
            .map(|k| {
                let l2 = half * half + 4.0 * PI * k as f64 / (m as f64 * rate);
                transition(&landau_zener_profile(rabi, rate, l2.sqrt()))
            })
            .sum::<f64>()
            / m as f64;
        assert!((mean - expected).abs() < 1e-3, "rabi {rabi} rate {rate}: {mean} vs {expected}");
    }
}

#[test]
fn rosen_zener() {
    for (peak, width, det) in [(1.0, 1.0, 0.0), (1.0, 1.0, 0.7), (2.3, 0.5, 3.0), (0.4, 2.0, -0.9)] {
        let pulse = PulseShape::sech(peak, width, 0.0).unwrap();
        let profile = DriveProfile2::with_default_window(pulse, DetuningShape::Constant(det)).unwrap();
        let sech = 1.0 / (PI * det * width / 2.0).cosh();
        let expected = (PI * peak * width / 2.0).sin().powi(2) * sech * sech;
        let p = transition(&profile);
        assert!((p - expected).abs() < 1e-8, "{peak} {width} {det}: {p} vs {expected}");
    }
}

#[test]
fn resonant_rotation() {
    for area in [0.3, PI / 2.0, PI, 2.5, 3.0 * PI] {
        let pulse = PulseShape::gaussian(1.0, 0.3, 0.0).unwrap();
        let window = Window::covering(&[&pulse]);
        let pulse = pulse.with_peak(area / pulse.unit_area(window)).unwrap();
        let profile = DriveProfile2::new(pulse, DetuningShape::Zero, window, 4000).unwrap();
        let ck = cayley_klein(&propagate2(&profile, &PropagationOptions::default()).unwrap().matrix).unwrap();
        assert!((ck.p() - (area / 2.0).sin().powi(2)).abs() < 1e-8, "area {area}");
    }
}

#[test]
fn rap_inversion_on_landau_zener_drive() {
    let pulse = PulseShape::gaussian(6.0, 0.6, 0.0).unwrap();
    let window = Window::covering(&[&pulse]);
    let profile = DriveProfile2::new(pulse, DetuningShape::LinearChirp { rate: 8.0 }, window, 4000).unwrap();
    assert!(profile.has_crossing_symmetry());
    let rec = run_protocol(ProtocolKind::TwoStateRap, &Profile::Two(profile), &Settings::default()).unwrap();
    assert!(rec.p_direct.unwrap() > 0.5);
    assert!(rec.residual().unwrap() < 1e-6, "{rec:?}");
}

#[test]
fn constant_detuning_inversion_for_sech_and_gaussian() {
    let pulses = [
        PulseShape::sech(3.0, 0.5, 0.0).unwrap(),
        PulseShape::gaussian(4.0, 0.4, 0.0).unwrap(),
    ];
    for pulse in pulses {
        for det in [0.0, 0.8, -1.5] {
            let profile = DriveProfile2::with_default_window(pulse, DetuningShape::Constant(det)).unwrap();
            let rec =
                run_protocol(ProtocolKind::TwoStateConstDetuning, &Profile::Two(profile), &Settings::default()).unwrap();
            let (p, est) = (rec.p_direct.unwrap(), rec.p_estimated.unwrap());
            let expected = if p >= 0.5 { p } else { 1.0 - p };
            assert!((est - expected).abs() < 1e-6, "{:?} {det}: {p} {est}", pulse.kind());
        }
    }
}
