//! Two-level double-pass algebra.
//!
//! A forward pass with Cayley-Klein parameters `(a, b)` is followed by a
//! second pass that repeats it, possibly with the Rabi frequency and/or the
//! detuning sign-flipped. The return probabilities of the unflipped and
//! Rabi-flipped variants depend on the phase of `a`; their average does not
//! and equals `p^2 + (1 - p)^2`.

use num_complex::Complex;
use num_traits::Num;

use crate::evolve::{CayleyKlein, Mat2};
use crate::inversion::{Estimate, InversionError, NoiseSlack};
use crate::scalar::Real;

/// Sign arrangement of the second pass relative to the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DoublePassVariant {
    Same,
    FlipRabi,
    FlipDetuning,
    FlipBoth,
}

impl DoublePassVariant {
    pub const ALL: [DoublePassVariant; 4] = [
        DoublePassVariant::Same,
        DoublePassVariant::FlipRabi,
        DoublePassVariant::FlipDetuning,
        DoublePassVariant::FlipBoth,
    ];

    /// `(flip_rabi, flip_detuning)`.
    pub fn flips(self) -> (bool, bool) {
        match self {
            DoublePassVariant::Same => (false, false),
            DoublePassVariant::FlipRabi => (true, false),
            DoublePassVariant::FlipDetuning => (false, true),
            DoublePassVariant::FlipBoth => (true, true),
        }
    }
}

/// Closed-form product `U_second * U_first` in terms of `(a, b)`.
pub fn double_pass_propagator<T: Real>(ck: &CayleyKlein<T>, variant: DoublePassVariant) -> Mat2<T> {
    let (a, b) = (ck.a, ck.b);
    let two = T::lit(2.0);
    let i = Complex::new(T::zero(), T::one());
    let re = |z: Complex<T>| Complex::new(z.re, T::zero());
    let im = |z: Complex<T>| Complex::new(z.im, T::zero());
    let abs2 = |z: Complex<T>| Complex::new(z.norm_sqr(), T::zero());
    let rows = match variant {
        DoublePassVariant::Same => [
            [a * a - abs2(b), -b.conj() * re(a) * two],
            [b * re(a) * two, a.conj() * a.conj() - abs2(b)],
        ],
        DoublePassVariant::FlipRabi => [
            [a * a + abs2(b), -i * b.conj() * im(a) * two],
            [-i * b * im(a) * two, a.conj() * a.conj() + abs2(b)],
        ],
        DoublePassVariant::FlipDetuning => [
            [abs2(a) + b * b, i * a.conj() * im(b) * two],
            [i * a * im(b) * two, abs2(a) + b.conj() * b.conj()],
        ],
        DoublePassVariant::FlipBoth => [
            [abs2(a) - b * b, -a.conj() * re(b) * two],
            [a * re(b) * two, abs2(a) - b.conj() * b.conj()],
        ],
    };
    Mat2::from_rows(rows)
}

/// Probability to be back in the initial level after the double pass.
///
/// The unflipped and Rabi-flipped variants use `1 - 4 p Re(a)^2` and
/// `1 - 4 p Im(a)^2`; the detuning-flipped ones are read off the closed-form
/// product.
pub fn return_probability<T: Real>(ck: &CayleyKlein<T>, variant: DoublePassVariant) -> T {
    let four = T::lit(4.0);
    match variant {
        DoublePassVariant::Same => T::one() - four * ck.p() * ck.a.re * ck.a.re,
        DoublePassVariant::FlipRabi => T::one() - four * ck.p() * ck.a.im * ck.a.im,
        DoublePassVariant::FlipDetuning | DoublePassVariant::FlipBoth => {
            double_pass_propagator(ck, variant).return_population()
        }
    }
}

/// `(Q_same + Q_flip_rabi) / 2`.
pub fn average_return<T: Num + Clone>(q_same: T, q_flip_rabi: T) -> T {
    (q_same + q_flip_rabi) / (T::one() + T::one())
}

/// `p^2 + (1 - p)^2`, the average return probability of a pass with
/// transition probability `p`.
pub fn average_return_for<T: Num + Clone>(p: T) -> T {
    let q = T::one() - p.clone();
    p.clone() * p + q.clone() * q
}

/// `p = (sqrt(2 Qbar - 1) + 1) / 2` from the averaged return probability.
///
/// Only the root `p >= 1/2` is reported as `p`; a pass with `p < 1/2` comes
/// back mirrored as `1 - p` (see [`Estimate::lower_root`]).
pub fn invert_p_general<T: Real>(q_bar: T, slack: NoiseSlack<T>) -> Result<Estimate<T>, InversionError> {
    let (q_bar, c1) = slack.probability("Qbar", q_bar)?;
    let (root, c2) = slack.sqrt(T::lit(2.0) * q_bar - T::one())?;
    let half = T::lit(0.5);
    slack.estimate(half, root * half, c1 | c2)
}

/// `p = (sqrt(Q) + 1) / 2` from a single double-pass return probability `Q`
/// that equals `(1 - 2p)^2`.
fn invert_square_law<T: Real>(
    name: &'static str,
    q: T,
    slack: NoiseSlack<T>,
) -> Result<Estimate<T>, InversionError> {
    let (q, c1) = slack.probability(name, q)?;
    let (root, c2) = slack.sqrt(q)?;
    let half = T::lit(0.5);
    slack.estimate(half, root * half, c1 | c2)
}

/// Inversion valid when `a` is real (even Rabi frequency, odd detuning):
/// `p = (sqrt(Q_same) + 1) / 2`.
pub fn invert_p_rap<T: Real>(q_same: T, slack: NoiseSlack<T>) -> Result<Estimate<T>, InversionError> {
    invert_square_law("Q_same", q_same, slack)
}

/// Inversion valid when `b` is imaginary (even Rabi frequency and detuning):
/// `p = (sqrt(Q_flip_detuning) + 1) / 2`.
pub fn invert_p_const_detuning<T: Real>(
    q_flip_detuning: T,
    slack: NoiseSlack<T>,
) -> Result<Estimate<T>, InversionError> {
    invert_square_law("Q_flip_detuning", q_flip_detuning, slack)
}

/// Single- and double-pass probabilities of one two-level pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassProbabilities2<T> {
    pub p: T,
    pub q: T,
    pub q_same: T,
    pub q_flip_rabi: T,
    pub q_flip_detuning: T,
    pub q_bar: T,
}

impl<T: Real> PassProbabilities2<T> {
    pub fn from_cayley_klein(ck: &CayleyKlein<T>) -> Self {
        let q_same = return_probability(ck, DoublePassVariant::Same);
        let q_flip_rabi = return_probability(ck, DoublePassVariant::FlipRabi);
        Self {
            p: ck.p(),
            q: ck.q(),
            q_same,
            q_flip_rabi,
            q_flip_detuning: return_probability(ck, DoublePassVariant::FlipDetuning),
            q_bar: average_return(q_same, q_flip_rabi),
        }
    }

    /// Every field in `[0, 1]`, `p + q = 1` and `Qbar >= 1/2`, all within `tol`.
    pub fn is_consistent(&self, tol: T) -> bool {
        let in_unit = |x: T| x >= -tol && x <= T::one() + tol;
        [self.p, self.q, self.q_same, self.q_flip_rabi, self.q_flip_detuning, self.q_bar]
            .into_iter()
            .all(in_unit)
            && (self.p + self.q - T::one()).abs() <= tol
            && self.q_bar >= T::lit(0.5) - tol
    }
}
