use std::f64::consts::PI;

use doublepass::drive::{DetuningShape, DriveProfile3, PulseShape};
use doublepass::evolve::{propagate3, PropagationOptions};
use doublepass::su3::*;

fn stirap(peak: f64, delay: f64, detuning: f64) -> DriveProfile3<f64> {
    let stokes = PulseShape::sin2(peak, 1.0, 0.0).unwrap();
    DriveProfile3::stirap(stokes, delay, DetuningShape::Constant(detuning)).unwrap()
}

#[test]
fn resonant_pair_fits_template() {
    for (peak, delay) in [(10.0, 0.3), (25.0, 0.2), (3.0, 0.45)] {
        let profile = stirap(peak, delay, 0.0);
        assert!(profile.is_symmetric_pair() && profile.is_centered_pair());
        let u = propagate3(&profile, &PropagationOptions::default()).unwrap().matrix;
        let ck = extract_resonant_ck(&u).unwrap();
        assert!(resonant_propagator(&ck).max_abs_diff(&u) < 1e-9, "{peak} {delay}");
    }
}

#[test]
fn detuned_pair_is_rejected_by_template() {
    let u = propagate3(&stirap(10.0, 0.3, 5.0), &PropagationOptions::default()).unwrap().matrix;
    assert!(extract_resonant_ck(&u).is_err());
}

#[test]
fn backward_matches_direct_simulation() {
    let opts = PropagationOptions::default();
    for (det, d2) in [(0.0, 0.0), (4.0, 0.0), (-3.0, 1.5)] {
        let fwd = stirap(12.0, 0.3, det).with_two_photon_detuning(d2).with_phases(0.4, 1.1);
        let u = propagate3(&fwd, &opts).unwrap().matrix;
        for (xi, eta) in [(0.0, 0.0), (PI, 0.0), (0.7, 2.9)] {
            let ur = propagate3(&fwd.reversed(xi, eta), &opts).unwrap().matrix;
            let analytic = backward_propagator(&u, PhasePair::new(xi, eta));
            assert!(ur.max_abs_diff(&analytic) < 1e-8, "{det} {d2} {xi} {eta}: {}", ur.max_abs_diff(&analytic));
        }
    }
}
