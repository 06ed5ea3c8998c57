//! Hamiltonians, time-ordered propagators and Cayley-Klein parameters.
//!
//! Each step uses the fourth-order Magnus exponent built from two
//! Gauss-Legendre samples of the Hamiltonian, exponentiated exactly, so every
//! propagator is unitary to rounding whatever the step size; resolution only
//! controls accuracy. The scheme also preserves the discrete time-reversal and
//! conjugation symmetries of the sampled drive, which the double-pass
//! relations rely on.

use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

use crate::drive::{DriveProfile2, DriveProfile3, Endpoint, Window};
use crate::linalg::{c, CMat};
use crate::scalar::Real;

pub type Mat2<T> = CMat<T, 2>;
pub type Mat3<T> = CMat<T, 3>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error("propagator did not converge: entrywise change {change:e} at {steps} steps exceeds {tolerance:e}")]
    NotConverged {
        steps: usize,
        change: f64,
        tolerance: f64,
    },
    #[error("at least 2 integration steps are required, got {0}")]
    TooFewSteps(usize),
    #[error("matrix is not of the Cayley-Klein form [[a, -b*], [b, a*]] (residual {0:e})")]
    TemplateMismatch(f64),
    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),
}

/// Resolution control for [`propagate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions<T> {
    /// Double the resolution until successive propagators agree.
    pub adaptive: bool,
    /// Entrywise change between successive resolutions considered converged.
    pub convergence_tol: T,
    pub max_steps: usize,
}

impl<T: Real> Default for PropagationOptions<T> {
    fn default() -> Self {
        Self {
            adaptive: true,
            convergence_tol: T::tolerance(1e-9, 1e4),
            max_steps: 1 << 20,
        }
    }
}

impl<T: Real> PropagationOptions<T> {
    pub fn fixed() -> Self {
        Self {
            adaptive: false,
            ..Self::default()
        }
    }
}

/// Propagator together with the resolution that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation<T, const N: usize> {
    pub matrix: CMat<T, N>,
    pub steps: usize,
    /// Entrywise change against the previous resolution (zero when not
    /// adaptive).
    pub change: T,
}

/// Two-level Hamiltonian `1/2 [[-D, W], [W, D]]` with the profile signs
/// applied.
pub fn hamiltonian2<T: Real>(profile: &DriveProfile2<T>, t: T) -> Mat2<T> {
    let half = T::lit(0.5);
    let rabi = profile.rabi_at(t) * half;
    let det = profile.detuning_at(t) * half;
    Mat2::from_rows([
        [c(-det, T::zero()), c(rabi, T::zero())],
        [c(rabi, T::zero()), c(det, T::zero())],
    ])
}

/// Lambda-system Hamiltonian.
///
/// `H[0][1] = Wp e^{i xi} / 2`, `H[2][1] = Ws e^{i eta} / 2`,
/// `H[1][1] = D(t)` and the two-photon detuning on the end level named by the
/// profile; Hermitian conjugates fill the rest and levels 1 and 3 are not
/// coupled.
pub fn hamiltonian3<T: Real>(profile: &DriveProfile3<T>, t: T) -> Mat3<T> {
    hamiltonian3_with(profile, t, field_phases(profile))
}

fn field_phases<T: Real>(profile: &DriveProfile3<T>) -> (Complex<T>, Complex<T>) {
    (
        Complex::from_polar(T::one(), profile.pump_phase()),
        Complex::from_polar(T::one(), profile.stokes_phase()),
    )
}

fn hamiltonian3_with<T: Real>(profile: &DriveProfile3<T>, t: T, (ep, es): (Complex<T>, Complex<T>)) -> Mat3<T> {
    let half = T::lit(0.5);
    let pump = ep * (profile.pump.sample(t) * half);
    let stokes = es * (profile.stokes.sample(t) * half);
    let mut h = Mat3::zeros();
    h[(0, 1)] = pump;
    h[(1, 0)] = pump.conj();
    h[(2, 1)] = stokes;
    h[(1, 2)] = stokes.conj();
    h[(1, 1)] = c(profile.detuning_at(t), T::zero());
    let delta = c(profile.two_photon_detuning, T::zero());
    match profile.two_photon_site {
        Endpoint::Target => h[(2, 2)] = delta,
        Endpoint::Initial => h[(0, 0)] = delta,
    }
    h
}

/// Time-ordered propagator `U(end, start)` with a fixed number of steps.
pub fn propagate<T, const N: usize, H>(hamiltonian: H, window: Window<T>, steps: usize) -> CMat<T, N>
where
    T: Real,
    H: Fn(T) -> CMat<T, N>,
{
    let steps = steps.max(1);
    let dt = window.len() / T::from_usize(steps).unwrap();
    let sqrt3 = T::lit(3.0).sqrt();
    let offset = sqrt3 / T::lit(6.0);
    let (c1, c2) = (T::lit(0.5) - offset, T::lit(0.5) + offset);
    let half_dt = dt * T::lit(0.5);
    let commutator_weight = Complex::new(T::zero(), -sqrt3 / T::lit(12.0) * dt * dt);
    let mut u = CMat::<T, N>::identity();
    for k in 0..steps {
        let t0 = window.start + dt * T::from_usize(k).unwrap();
        let h1 = hamiltonian(t0 + c1 * dt);
        let h2 = hamiltonian(t0 + c2 * dt);
        // K = dt/2 (H1 + H2) - i sqrt(3)/12 dt^2 [H2, H1], step = exp(-i K)
        let k_step = (h1 + h2).scale_real(half_dt) + h2.commutator(&h1).scale(commutator_weight);
        u = k_step.exp_neg_i_hermitian() * u;
    }
    u
}

/// [`propagate`] with optional resolution doubling until the entrywise change
/// drops below `options.convergence_tol`.
pub fn propagate_adaptive<T, const N: usize, H>(
    hamiltonian: H,
    window: Window<T>,
    steps: usize,
    options: &PropagationOptions<T>,
) -> Result<Propagation<T, N>, EvolveError>
where
    T: Real,
    H: Fn(T) -> CMat<T, N>,
{
    if steps < 2 {
        return Err(EvolveError::TooFewSteps(steps));
    }
    let mut current = propagate(&hamiltonian, window, steps);
    if !options.adaptive {
        return Ok(Propagation {
            matrix: current,
            steps,
            change: T::zero(),
        });
    }
    let mut n = steps;
    let mut last_change = T::infinity();
    loop {
        let finer_steps = n.saturating_mul(2);
        if finer_steps > options.max_steps {
            return Err(EvolveError::NotConverged {
                steps: n,
                change: last_change.to_f64().unwrap_or(f64::INFINITY),
                tolerance: options.convergence_tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        let finer = propagate(&hamiltonian, window, finer_steps);
        let change = finer.max_abs_diff(&current);
        if change < options.convergence_tol {
            return Ok(Propagation {
                matrix: finer,
                steps: finer_steps,
                change,
            });
        }
        current = finer;
        n = finer_steps;
        last_change = change;
    }
}

/// Single-pass propagator of a two-level profile.
pub fn propagate2<T: Real>(
    profile: &DriveProfile2<T>,
    options: &PropagationOptions<T>,
) -> Result<Propagation<T, 2>, EvolveError> {
    propagate_adaptive(|t| hamiltonian2(profile, t), profile.window, profile.steps, options)
}

/// Single-pass propagator of a three-level profile.
pub fn propagate3<T: Real>(
    profile: &DriveProfile3<T>,
    options: &PropagationOptions<T>,
) -> Result<Propagation<T, 3>, EvolveError> {
    let phases = field_phases(profile);
    propagate_adaptive(|t| hamiltonian3_with(profile, t, phases), profile.window, profile.steps, options)
}

/// The pair `(a, b)` of an SU(2) propagator `[[a, -b*], [b, a*]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CayleyKlein<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
}

impl<T: Real> CayleyKlein<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Self {
        Self { a, b }
    }

    /// Identity propagator.
    pub fn identity() -> Self {
        Self::new(Complex::new(T::one(), T::zero()), Complex::zero())
    }

    /// Reads `(a, b)` from the first column after checking the template.
    pub fn from_matrix(u: &Mat2<T>) -> Result<Self, EvolveError> {
        let tol = T::tolerance(1e-8, 1e3);
        let defect = u.unitarity_defect();
        if !(defect < tol) {
            return Err(EvolveError::NotUnitary(defect.to_f64().unwrap_or(f64::NAN)));
        }
        let a = u[(0, 0)];
        let b = u[(1, 0)];
        let residual = (u[(0, 1)] + b.conj()).norm().max((u[(1, 1)] - a.conj()).norm());
        if !(residual < tol) {
            return Err(EvolveError::TemplateMismatch(residual.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { a, b })
    }

    /// `| |a|^2 + |b|^2 - 1 |`.
    pub fn normalization_defect(&self) -> T {
        (self.a.norm_sqr() + self.b.norm_sqr() - T::one()).abs()
    }

    /// Transition probability `|b|^2`.
    pub fn p(&self) -> T {
        self.b.norm_sqr()
    }

    /// Survival probability `|a|^2`.
    pub fn q(&self) -> T {
        self.a.norm_sqr()
    }

    pub fn matrix(&self) -> Mat2<T> {
        self.flipped_propagator(false, false)
    }

    /// Propagator of the same pass with the Rabi frequency and/or the
    /// detuning sign-flipped, written in terms of the unflipped `(a, b)`.
    pub fn flipped_propagator(&self, flip_rabi: bool, flip_detuning: bool) -> Mat2<T> {
        let (a, b) = (self.a, self.b);
        let rows = match (flip_rabi, flip_detuning) {
            (false, false) => [[a, -b.conj()], [b, a.conj()]],
            (false, true) => [[a.conj(), b], [-b.conj(), a]],
            (true, false) => [[a, b.conj()], [-b, a.conj()]],
            (true, true) => [[a.conj(), -b], [b.conj(), a]],
        };
        Mat2::from_rows(rows)
    }
}

/// Alias of [`CayleyKlein::from_matrix`].
pub fn cayley_klein<T: Real>(u: &Mat2<T>) -> Result<CayleyKlein<T>, EvolveError> {
    CayleyKlein::from_matrix(u)
}

/// Alias of [`CayleyKlein::flipped_propagator`].
pub fn sign_flip_transform<T: Real>(ck: &CayleyKlein<T>, flip_rabi: bool, flip_detuning: bool) -> Mat2<T> {
    ck.flipped_propagator(flip_rabi, flip_detuning)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::{DetuningShape, PulseShape};

    #[test]
    fn two_level_hamiltonian_entries() {
        let w = Window::new(0.0, 1.0).unwrap();
        let zero = DriveProfile2::new(PulseShape::zero(), DetuningShape::Zero, w, 10).unwrap();
        assert_eq!(hamiltonian2(&zero, 0.3), Mat2::zeros());

        let p = DriveProfile2::new(PulseShape::constant(1.0).unwrap(), DetuningShape::Constant(2.0), w, 10)
            .unwrap();
        let expected = Mat2::from_rows([[c(-1.0, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(1.0, 0.0)]]);
        assert_eq!(hamiltonian2(&p, 0.3), expected);

        let flipped = hamiltonian2(&p.flipped(false, true), 0.3);
        assert_eq!(flipped[(0, 0)], c(1.0, 0.0));
        assert_eq!(flipped[(1, 1)], c(-1.0, 0.0));
        assert_eq!(flipped[(0, 1)], expected[(0, 1)]);
    }

    #[test]
    fn three_level_hamiltonian_entries() {
        let w = Window::new(0.0, 1.0).unwrap();
        let zero = DriveProfile3::new(PulseShape::zero(), PulseShape::zero(), DetuningShape::Zero, w, 10).unwrap();
        assert_eq!(hamiltonian3(&zero, 0.5), Mat3::zeros());

        let p = DriveProfile3::new(
            PulseShape::constant(1.0).unwrap(),
            PulseShape::constant(2.0).unwrap(),
            DetuningShape::Constant(3.0),
            w,
            10,
        )
        .unwrap();
        let h = hamiltonian3(&p, 0.5);
        let expected = Mat3::from_rows([
            [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
            [c(0.5, 0.0), c(3.0, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        assert!(h.max_abs_diff(&expected) < 1e-15);

        let h_pi = hamiltonian3(&p.with_phases(std::f64::consts::PI, 0.0), 0.5);
        assert!((h_pi[(0, 1)] + expected[(0, 1)]).norm() < 1e-15);
        assert!((h_pi[(1, 0)] + expected[(1, 0)]).norm() < 1e-15);
        assert!(h_pi.hermiticity_defect() < 1e-15);

        let detuned = hamiltonian3(&p.with_two_photon_detuning(0.7), 0.5);
        assert_eq!(detuned[(2, 2)], c(0.7, 0.0));
        assert_eq!(detuned[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let w = Window::new(-1.0, 2.0).unwrap();
        let u = propagate(|_| Mat3::<f64>::zeros(), w, 10);
        assert_eq!(u, Mat3::identity());
    }

    #[test]
    fn resonant_rabi_rotation() {
        // Independent oracle: constant resonant coupling rotates by the area,
        // p = sin^2(A/2).
        for area in [0.3, 1.0, std::f64::consts::PI, 5.5] {
            let w = Window::new(0.0, 1.0).unwrap();
            let profile =
                DriveProfile2::new(PulseShape::constant(area).unwrap(), DetuningShape::Zero, w, 100).unwrap();
            let prop = propagate2(&profile, &PropagationOptions::default()).unwrap();
            let ck = CayleyKlein::from_matrix(&prop.matrix).unwrap();
            let oracle = (area / 2.0).sin().powi(2);
            assert!((ck.p() - oracle).abs() < 1e-8, "area {area}");
        }
        let w = Window::new(0.0, 1.0).unwrap();
        let pi_pulse = DriveProfile2::new(
            PulseShape::constant(std::f64::consts::PI).unwrap(),
            DetuningShape::Zero,
            w,
            100,
        )
        .unwrap();
        let ck = CayleyKlein::from_matrix(&propagate2(&pi_pulse, &Default::default()).unwrap().matrix).unwrap();
        assert!(ck.a.norm() < 1e-8 && (ck.b.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cayley_klein_of_identity_and_template_rejection() {
        let ck = CayleyKlein::from_matrix(&Mat2::<f64>::identity()).unwrap();
        assert_eq!(ck, CayleyKlein::identity());
        // unitary but U(1,2) != -conj(U(2,1)): a reflection
        let bad = Mat2::from_rows([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
        assert!(matches!(
            CayleyKlein::from_matrix(&bad),
            Err(EvolveError::TemplateMismatch(_))
        ));
        let non_unitary = Mat2::identity().scale_real(2.0);
        assert!(matches!(
            CayleyKlein::from_matrix(&non_unitary),
            Err(EvolveError::NotUnitary(_))
        ));
    }

    #[test]
    fn flip_templates() {
        let ck = CayleyKlein::new(c(0.6, 0.0), c(0.0, 0.8));
        assert_eq!(ck.flipped_propagator(false, false), ck.matrix());
        let both = ck.flipped_propagator(true, true);
        assert_eq!(both[(0, 0)], ck.a.conj());
        assert_eq!(both[(0, 1)], -ck.b);
        assert_eq!(both[(1, 0)], ck.b.conj());
        assert_eq!(both[(1, 1)], ck.a);
        let det_only = ck.flipped_propagator(false, true);
        assert_eq!(det_only, Mat2::from_rows([[ck.a.conj(), ck.b], [-ck.b.conj(), ck.a]]));
    }

    #[test]
    fn adaptive_rejects_single_step_and_reports_non_convergence() {
        let w = Window::new(0.0, 1.0).unwrap();
        let h = |t: f64| Mat2::from_rows([[c(50.0 * t, 0.0), c(30.0, 0.0)], [c(30.0, 0.0), c(-50.0 * t, 0.0)]]);
        assert_eq!(
            propagate_adaptive(h, w, 1, &PropagationOptions::default()),
            Err(EvolveError::TooFewSteps(1))
        );
        let strict = PropagationOptions {
            adaptive: true,
            convergence_tol: 1e-15,
            max_steps: 64,
        };
        assert!(matches!(
            propagate_adaptive(h, w, 8, &strict),
            Err(EvolveError::NotConverged { .. })
        ));
    }

    #[test]
    fn fourth_order_convergence() {
        let profile = DriveProfile2::with_default_window(
            PulseShape::gaussian(6.0, 1.0, 0.0).unwrap(),
            DetuningShape::LinearChirp { rate: 8.0 },
        )
        .unwrap();
        let h = |t| hamiltonian2(&profile, t);
        let reference = propagate(h, profile.window, 1 << 14);
        let err = |n: usize| propagate(h, profile.window, n).max_abs_diff(&reference);
        let (e1, e2) = (err(64), err(128));
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}, errors {e1:e} {e2:e}");
    }

    #[test]
    fn single_precision_instantiation() {
        let w = Window::new(0.0f32, 1.0).unwrap();
        let profile =
            DriveProfile2::new(PulseShape::constant(std::f32::consts::PI).unwrap(), DetuningShape::Zero, w, 64)
                .unwrap();
        let prop = propagate2(&profile, &PropagationOptions::default()).unwrap();
        assert!((prop.matrix[(1, 0)].norm_sqr() - 1.0).abs() < 1e-5);
        assert!(prop.matrix.unitarity_defect() < 1e-5);
    }
}
