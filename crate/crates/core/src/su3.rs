//! Three-level (Lambda system) double-pass algebra.
//!
//! The backward pass exchanges the pump and Stokes envelopes and gives the
//! fields extra phases `xi` and `eta`. Its propagator is the forward one with
//! levels 1 and 3 exchanged and phase factors attached, so every double-pass
//! return probability is a function of the forward propagator alone.
//!
//! Resonant STIRAP with a symmetric pulse pair is described by three real
//! numbers `(alpha, beta, gamma)` with `alpha^2 + beta^2 + 2 gamma^2 = 1`:
//!
//! ```text
//! [ alpha^2 - beta^2           -2i (alpha + beta) gamma   2 (alpha beta - gamma^2) ]
//! [ 2i (beta - alpha) gamma    1 - 4 gamma^2              -2i (alpha + beta) gamma ]
//! [ -2 (alpha beta + gamma^2)  2i (beta - alpha) gamma    alpha^2 - beta^2         ]
//! ```

use num_complex::Complex;
use num_traits::{Float, Num};
use thiserror::Error;

use crate::evolve::Mat3;
use crate::inversion::{Estimate, InversionError, NoiseSlack};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Su3Error {
    #[error("alpha^2 + beta^2 + 2 gamma^2 = 1 violated by {0:e}")]
    Constraint(f64),
    #[error("propagator does not fit the resonant symmetric-pair template (residual {0:e})")]
    TemplateMismatch(f64),
}

/// Real parameters of a resonant symmetric-pair STIRAP propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantCK<T> {
    alpha: T,
    beta: T,
    gamma: T,
}

impl<T: Real> ResonantCK<T> {
    pub fn new(alpha: T, beta: T, gamma: T) -> Result<Self, Su3Error> {
        let defect = (alpha * alpha + beta * beta + T::lit(2.0) * gamma * gamma - T::one()).abs();
        if !(defect < T::tolerance(1e-9, 64.0)) {
            return Err(Su3Error::Constraint(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Single-pass survival probability `(alpha^2 - beta^2)^2`.
    pub fn q(&self) -> T {
        let d = self.alpha * self.alpha - self.beta * self.beta;
        d * d
    }

    /// Single-pass transfer probability `((alpha - beta)^2 - 1)^2`.
    pub fn p(&self) -> T {
        let d = self.alpha - self.beta;
        let x = d * d - T::one();
        x * x
    }

    /// The `(alpha, beta, gamma) -> (-alpha, -beta, -gamma)` partner, which
    /// yields the same propagator.
    pub fn negated(&self) -> Self {
        Self {
            alpha: -self.alpha,
            beta: -self.beta,
            gamma: -self.gamma,
        }
    }
}

/// The resonant symmetric-pair propagator.
pub fn resonant_propagator<T: Real>(ck: &ResonantCK<T>) -> Mat3<T> {
    let (a, b, g) = (ck.alpha, ck.beta, ck.gamma);
    let two = T::lit(2.0);
    let re = |x: T| Complex::new(x, T::zero());
    let im = |x: T| Complex::new(T::zero(), x);
    let diag = re(a * a - b * b);
    let upper = im(-two * (a + b) * g);
    let lower = im(two * (b - a) * g);
    Mat3::from_rows([
        [diag, upper, re(two * (a * b - g * g))],
        [lower, re(T::one() - T::lit(4.0) * g * g), upper],
        [re(-two * (a * b + g * g)), lower, diag],
    ])
}

/// Recovers `(alpha, beta, gamma)` from a propagator of the resonant
/// symmetric-pair form, up to the overall sign (see [`ResonantCK::negated`]).
///
/// The parameters are fitted from symmetric combinations of the entries and
/// the sign of `gamma` is picked by least squares; the fit is accepted when
/// the re-synthesized matrix matches `u` within `1e-7`.
pub fn extract_resonant_ck<T: Real>(u: &Mat3<T>) -> Result<ResonantCK<T>, Su3Error> {
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    // u22 = 1 - 4 g^2 and u13 + u31 = -4 g^2
    let g2 = ((T::one() - u[(1, 1)].re) * quarter - (u[(0, 2)].re + u[(2, 0)].re) * quarter) * half;
    let g2 = g2.max(T::zero());
    // (alpha + i beta)^2 = (alpha^2 - beta^2) + 2i alpha beta
    let diff = (u[(0, 0)].re + u[(2, 2)].re) * half;
    let prod2 = (u[(0, 2)].re - u[(2, 0)].re) * half;
    let z = Complex::new(diff, prod2).sqrt();
    let (alpha, beta) = (z.re, z.im);
    let g = g2.sqrt();
    let residual_for = |gamma: T| {
        let fitted = ResonantCK { alpha, beta, gamma };
        resonant_propagator(&fitted).max_abs_diff(u)
    };
    let (gamma, residual) = {
        let (rp, rm) = (residual_for(g), residual_for(-g));
        if rp <= rm {
            (g, rp)
        } else {
            (-g, rm)
        }
    };
    if !(residual < T::tolerance(1e-7, 1e4)) {
        return Err(Su3Error::TemplateMismatch(residual.to_f64().unwrap_or(f64::NAN)));
    }
    ResonantCK::new(alpha, beta, gamma).map_err(|_| Su3Error::TemplateMismatch(residual.to_f64().unwrap_or(f64::NAN)))
}

/// Extra phases of the backward pump (`xi`) and Stokes (`eta`) fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePair<T> {
    pub xi: T,
    pub eta: T,
}

impl<T: Real> PhasePair<T> {
    pub fn new(xi: T, eta: T) -> Self {
        Self {
            xi: crate::drive::reduce_phase(xi),
            eta: crate::drive::reduce_phase(eta),
        }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// `(0, 0), (pi, 0), (0, pi), (pi, pi)`: the sign combinations averaged
    /// over by the four-phase protocol.
    pub fn sign_combinations() -> [Self; 4] {
        let pi = T::PI();
        [
            Self::new(T::zero(), T::zero()),
            Self::new(pi, T::zero()),
            Self::new(T::zero(), pi),
            Self::new(pi, pi),
        ]
    }
}

/// Propagator of the backward pass built from the forward propagator `u` by
/// exchanging levels 1 and 3 and attaching the field phases.
pub fn backward_propagator<T: Real>(u: &Mat3<T>, phases: PhasePair<T>) -> Mat3<T> {
    let (xi, eta) = (phases.xi, phases.eta);
    let e = |phi: T| Complex::from_polar(T::one(), phi);
    let m = |i: usize, j: usize| u[(i, j)];
    Mat3::from_rows([
        [m(2, 2), m(2, 1) * e(xi), m(2, 0) * e(xi - eta)],
        [m(1, 2) * e(-xi), m(1, 1), m(1, 0) * e(-eta)],
        [m(0, 2) * e(eta - xi), m(0, 1) * e(eta), m(0, 0)],
    ])
}

/// Return probability after the forward pass `u` and the backward pass with
/// `phases`.
pub fn double_pass_return<T: Real>(u: &Mat3<T>, phases: PhasePair<T>) -> T {
    (backward_propagator(u, phases) * *u).return_population()
}

/// `(2p + 2q - 1)^2`: return probability with unchanged field signs.
pub fn case1_return<T: Num + Clone>(p: T, q: T) -> T {
    let two = T::one() + T::one();
    let x = two.clone() * p + two * q - T::one();
    x.clone() * x
}

/// `p = (sqrt(Q) + 1) / 2 - q`.
pub fn invert_case1<T: Real>(q_double: T, q: T, slack: NoiseSlack<T>) -> Result<Estimate<T>, InversionError> {
    let (q_double, c1) = slack.probability("Q", q_double)?;
    let (q, c2) = slack.probability("q", q)?;
    let (root, c3) = slack.sqrt(q_double)?;
    let half = T::lit(0.5);
    slack.estimate(half - q, root * half, c1 | c2 | c3)
}

/// `(1 - 2p)^2`: return probability when the backward pump is sign-flipped.
pub fn case2_return<T: Num + Clone>(p: T) -> T {
    let x = T::one() - (T::one() + T::one()) * p;
    x.clone() * x
}

/// `p = (sqrt(Q) + 1) / 2`.
pub fn invert_case2<T: Real>(q_double: T, slack: NoiseSlack<T>) -> Result<Estimate<T>, InversionError> {
    let (q_double, c1) = slack.probability("Q", q_double)?;
    let (root, c2) = slack.sqrt(q_double)?;
    let half = T::lit(0.5);
    slack.estimate(half, root * half, c1 | c2)
}

/// Mean of the four sign-combination return probabilities.
pub fn four_phase_average<T: Num + Clone>(returns: [T; 4]) -> T {
    let four = T::one() + T::one() + T::one() + T::one();
    returns.into_iter().fold(T::zero(), |acc, q| acc + q) / four
}

/// `|u31|^4 + |u21|^2 |u32|^2 + |u11|^2 |u33|^2`: the four-phase average
/// written in forward propagator entries.
pub fn average_from_elements<T: Real>(u: &Mat3<T>) -> T {
    let n = |i: usize, j: usize| u[(i, j)].norm_sqr();
    n(2, 0) * n(2, 0) + n(1, 0) * n(2, 1) + n(0, 0) * n(2, 2)
}

/// `p^2 + q^2 + (1 - p - q)^2`.
pub fn detuned_average<T: Num + Clone>(p: T, q: T) -> T {
    let m = T::one() - p.clone() - q.clone();
    p.clone() * p + q.clone() * q + m.clone() * m
}

/// `p = (1 - q + sqrt(2 Qbar - 3 q^2 + 2 q - 1)) / 2`.
pub fn invert_detuned<T: Real>(q_bar: T, q: T, slack: NoiseSlack<T>) -> Result<Estimate<T>, InversionError> {
    let (q_bar, c1) = slack.probability("Qbar", q_bar)?;
    let (q, c2) = slack.probability("q", q)?;
    let two = T::lit(2.0);
    let radicand = (two * q_bar - T::one() + two * q) - T::lit(3.0) * q * q;
    let (root, c3) = slack.sqrt(radicand)?;
    let half = T::lit(0.5);
    slack.estimate((T::one() - q) * half, root * half, c1 | c2 | c3)
}

/// `p^2 + q r + (1 - p - q)(1 - p - r)`.
pub fn general_average<T: Num + Clone>(p: T, q: T, r: T) -> T {
    let mq = T::one() - p.clone() - q.clone();
    let mr = T::one() - p.clone() - r.clone();
    p.clone() * p + q * r + mq * mr
}

/// `p = (2 - q - r + sqrt(8 Qbar - 4 + 4q + 4r + q^2 + r^2 - 14 q r)) / 4`.
pub fn invert_general<T: Real>(
    q_bar: T,
    q: T,
    r: T,
    slack: NoiseSlack<T>,
) -> Result<Estimate<T>, InversionError> {
    let (q_bar, c1) = slack.probability("Qbar", q_bar)?;
    let (q, c2) = slack.probability("q", q)?;
    let (r, c3) = slack.probability("r", r)?;
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    // 8Qbar - 4 + 4q + 4r + q^2 + r^2 - 14qr regrouped so that r = q rounds
    // exactly like the detuned radicand
    let radicand = T::lit(4.0) * ((two * q_bar - T::one() + (q + r)) - T::lit(3.0) * q * r) + (q - r) * (q - r);
    let (root, c4) = slack.sqrt(radicand)?;
    let center = (T::one() - (q + r) * half) * half;
    slack.estimate(center, root * T::lit(0.25), c1 | c2 | c3 | c4)
}

/// Single- and double-pass probabilities of one three-level pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassProbabilities3<T> {
    /// Forward transfer `1 -> 3`.
    pub p: T,
    /// Forward survival `1 -> 1`.
    pub q: T,
    /// Survival `1 -> 1` of the backward pulse order alone.
    pub r: T,
    /// Return probabilities at `(0,0), (pi,0), (0,pi), (pi,pi)`.
    pub q_set: [T; 4],
    pub q_bar: T,
}

impl<T: Real> PassProbabilities3<T> {
    /// Everything derived algebraically from the forward propagator.
    pub fn from_propagator(u: &Mat3<T>) -> Self {
        let q_set = PhasePair::sign_combinations().map(|ph| double_pass_return(u, ph));
        Self {
            p: u[(2, 0)].norm_sqr(),
            q: u[(0, 0)].norm_sqr(),
            r: u[(2, 2)].norm_sqr(),
            q_set,
            q_bar: four_phase_average(q_set),
        }
    }

    /// Every value in `[0, 1]` and `p + q <= 1`, within `tol`.
    pub fn is_consistent(&self, tol: T) -> bool {
        let in_unit = |x: T| x >= -tol && x <= T::one() + tol;
        [self.p, self.q, self.r, self.q_bar]
            .into_iter()
            .chain(self.q_set)
            .all(in_unit)
            && self.p + self.q <= T::one() + tol
    }
}

/// `max(|u11 - u33|, |u12 - u23|, |u21 - u32|)`.
pub fn element_pair_residual<T: Real>(u: &Mat3<T>) -> T {
    let d = |a: (usize, usize), b: (usize, usize)| (u[a] - u[b]).norm();
    Float::max(
        d((0, 0), (2, 2)),
        Float::max(d((0, 1), (1, 2)), d((1, 0), (2, 1))),
    )
}
