//! Shared radicand and range policy of the probability inverters.
//!
//! Measured probabilities carry noise, so a radicand or probability that
//! falls outside its admissible range by at most `noise_slack` is clamped and
//! the clamp is reported; anything further out is an inconsistency error.

use thiserror::Error;

use crate::scalar::Real;

pub const DEFAULT_NOISE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InversionError {
    #[error("{name} = {value} lies outside [0, 1] by more than the noise slack {slack:e}")]
    ProbabilityOutOfRange {
        name: &'static str,
        value: f64,
        slack: f64,
    },
    #[error("inconsistent inputs: radicand {radicand} is negative beyond the noise slack {slack:e}")]
    NegativeRadicand { radicand: f64, slack: f64 },
}

/// Result of inverting a double-pass measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    /// Upper root, the one consistent with near-complete transfer.
    pub p: T,
    /// The discarded lower root, for diagnostics.
    pub lower_root: T,
    /// An input, radicand or output was clamped into range.
    pub clamped: bool,
}

/// Noise tolerance applied by every inverter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSlack<T>(pub T);

impl<T: Real> Default for NoiseSlack<T> {
    fn default() -> Self {
        Self(T::tolerance(DEFAULT_NOISE_SLACK, 64.0))
    }
}

impl<T: Real> NoiseSlack<T> {
    /// Clamps `value` into `[0, 1]`; returns whether it was moved.
    pub fn probability(&self, name: &'static str, value: T) -> Result<(T, bool), InversionError> {
        if !value.is_finite() || value < -self.0 || value > T::one() + self.0 {
            return Err(InversionError::ProbabilityOutOfRange {
                name,
                value: value.to_f64().unwrap_or(f64::NAN),
                slack: self.0.to_f64().unwrap_or(f64::NAN),
            });
        }
        let clamped = value.max(T::zero()).min(T::one());
        Ok((clamped, clamped != value))
    }

    /// Square root of a radicand that may dip below zero by noise.
    pub fn sqrt(&self, radicand: T) -> Result<(T, bool), InversionError> {
        if !radicand.is_finite() || radicand < -self.0 {
            return Err(InversionError::NegativeRadicand {
                radicand: radicand.to_f64().unwrap_or(f64::NAN),
                slack: self.0.to_f64().unwrap_or(f64::NAN),
            });
        }
        if radicand < T::zero() {
            Ok((T::zero(), true))
        } else {
            Ok((radicand.sqrt(), false))
        }
    }

    /// Builds an [`Estimate`] from `center +/- half_width`, clamping the upper
    /// root into `[0, 1]`.
    pub(crate) fn estimate(
        &self,
        center: T,
        half_width: T,
        mut clamped: bool,
    ) -> Result<Estimate<T>, InversionError> {
        let (p, moved) = self.probability("p", center + half_width)?;
        clamped |= moved;
        Ok(Estimate {
            p,
            lower_root: center - half_width,
            clamped,
        })
    }
}
