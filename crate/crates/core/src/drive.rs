//! Pulse shapes and drive profiles for a single interaction pass.
//!
//! Time is dimensionless: the pulse width `T = 1` sets the unit and all
//! frequencies are measured in units of `1/T`. Couplings are real envelopes;
//! the sign of a two-level Rabi frequency and the phases of the three-level
//! pump and Stokes fields are stored next to the envelopes rather than inside
//! them, which keeps every protocol variant a flip of a few flags.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

/// Relative level below which non-compact pulses are treated as switched off
/// when computing their effective support.
const TAIL_CUTOFF: f64 = 1e-14;

/// Fraction of the support length added on either side by the default window.
pub const DEFAULT_PADDING: f64 = 0.1;

/// Integration steps per pass unless a profile says otherwise.
pub const DEFAULT_STEPS: usize = 4000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriveError {
    #[error("pulse peak must be finite and non-negative, got {0}")]
    NegativePeak(f64),
    #[error("pulse width must be finite and positive, got {0}")]
    NonPositiveWidth(f64),
    #[error("window [{start}, {end}] must have positive length")]
    EmptyWindow { start: f64, end: f64 },
    #[error("at least 2 integration steps are required, got {0}")]
    TooFewSteps(usize),
    #[error("{0} must be finite")]
    NotFinite(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseKind {
    /// `peak * sin^2(pi (t - offset) / width)` on `[offset, offset + width]`,
    /// exactly zero elsewhere.
    Sin2,
    /// `peak * exp(-((t - offset) / width)^2)`.
    Gaussian,
    /// `peak * sech((t - offset) / width)`.
    Sech,
    /// `peak` at all times.
    Constant,
    Zero,
}

/// Real non-negative pulse envelope.
///
/// `offset` is the start of the support for `Sin2` and the center for the
/// bell-shaped kinds; it is ignored by `Constant` and `Zero`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape<T> {
    kind: PulseKind,
    peak: T,
    width: T,
    offset: T,
}

impl<T: Real> PulseShape<T> {
    pub fn new(kind: PulseKind, peak: T, width: T, offset: T) -> Result<Self, DriveError> {
        if !(peak.is_finite() && peak >= T::zero()) {
            return Err(DriveError::NegativePeak(peak.to_f64().unwrap_or(f64::NAN)));
        }
        if !(width.is_finite() && width > T::zero()) {
            return Err(DriveError::NonPositiveWidth(width.to_f64().unwrap_or(f64::NAN)));
        }
        if !offset.is_finite() {
            return Err(DriveError::NotFinite("pulse offset"));
        }
        Ok(Self {
            kind,
            peak,
            width,
            offset,
        })
    }

    pub fn sin2(peak: T, width: T, delay: T) -> Result<Self, DriveError> {
        Self::new(PulseKind::Sin2, peak, width, delay)
    }

    pub fn gaussian(peak: T, width: T, center: T) -> Result<Self, DriveError> {
        Self::new(PulseKind::Gaussian, peak, width, center)
    }

    pub fn sech(peak: T, width: T, center: T) -> Result<Self, DriveError> {
        Self::new(PulseKind::Sech, peak, width, center)
    }

    pub fn constant(peak: T) -> Result<Self, DriveError> {
        Self::new(PulseKind::Constant, peak, T::one(), T::zero())
    }

    pub fn zero() -> Self {
        Self {
            kind: PulseKind::Zero,
            peak: T::zero(),
            width: T::one(),
            offset: T::zero(),
        }
    }

    pub fn kind(&self) -> PulseKind {
        self.kind
    }

    pub fn peak(&self) -> T {
        self.peak
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    /// Same shape with a different peak value.
    pub fn with_peak(&self, peak: T) -> Result<Self, DriveError> {
        Self::new(self.kind, peak, self.width, self.offset)
    }

    /// Same shape moved to a different offset.
    pub fn with_offset(&self, offset: T) -> Result<Self, DriveError> {
        Self::new(self.kind, self.peak, self.width, offset)
    }

    /// Same shape translated by `dt`.
    pub fn shifted(&self, dt: T) -> Self {
        Self {
            offset: self.offset + dt,
            ..*self
        }
    }

    /// Instantaneous Rabi frequency.
    pub fn sample(&self, t: T) -> T {
        let x = (t - self.offset) / self.width;
        match self.kind {
            PulseKind::Sin2 => {
                if x < T::zero() || x > T::one() {
                    T::zero()
                } else {
                    let s = (T::PI() * x).sin();
                    self.peak * s * s
                }
            }
            PulseKind::Gaussian => self.peak * (-x * x).exp(),
            PulseKind::Sech => self.peak / x.cosh(),
            PulseKind::Constant => self.peak,
            PulseKind::Zero => T::zero(),
        }
    }

    /// Symmetry center of the envelope; `None` for shapes that are flat.
    pub fn center(&self) -> Option<T> {
        match self.kind {
            PulseKind::Sin2 => Some(self.offset + self.width * T::lit(0.5)),
            PulseKind::Gaussian | PulseKind::Sech => Some(self.offset),
            PulseKind::Constant | PulseKind::Zero => None,
        }
    }

    /// Interval outside which the envelope is zero, or below `1e-14` of the
    /// peak for the bell-shaped kinds. `None` when unbounded or absent.
    pub fn support(&self) -> Option<(T, T)> {
        let half = match self.kind {
            PulseKind::Sin2 => return Some((self.offset, self.offset + self.width)),
            // exp(-x^2) = cutoff
            PulseKind::Gaussian => (-T::lit(TAIL_CUTOFF).ln()).sqrt(),
            // sech(x) = cutoff, i.e. x = acosh(1 / cutoff)
            PulseKind::Sech => T::lit(1.0 / TAIL_CUTOFF).acosh(),
            PulseKind::Constant | PulseKind::Zero => return None,
        };
        Some((self.offset - half * self.width, self.offset + half * self.width))
    }

    /// Whether the envelope is an even function about `mid`.
    pub fn is_even_about(&self, mid: T, tol: T) -> bool {
        match self.center() {
            Some(c) => (c - mid).abs() <= tol,
            None => true,
        }
    }

    /// Exact integral of the envelope over `window`.
    pub fn area(&self, window: Window<T>) -> T {
        let (a, b) = (window.start, window.end);
        let w = self.width;
        match self.kind {
            PulseKind::Sin2 => {
                let lo = a.max(self.offset);
                let hi = b.min(self.offset + w);
                if hi <= lo {
                    return T::zero();
                }
                // antiderivative of sin^2(pi (t - offset) / w)
                let prim = |t: T| {
                    let x = t - self.offset;
                    x * T::lit(0.5) - w / (T::lit(4.0) * T::PI()) * (T::lit(2.0) * T::PI() * x / w).sin()
                };
                self.peak * (prim(hi) - prim(lo))
            }
            PulseKind::Gaussian => {
                let erf = |t: T| ((t - self.offset) / w).erf();
                self.peak * w * T::PI().sqrt() * T::lit(0.5) * (erf(b) - erf(a))
            }
            PulseKind::Sech => {
                // d/dx atan(sinh x) = sech x
                let gd = |t: T| ((t - self.offset) / w).sinh().atan();
                self.peak * w * (gd(b) - gd(a))
            }
            PulseKind::Constant => self.peak * (b - a),
            PulseKind::Zero => T::zero(),
        }
    }

    /// Area of the same shape with unit peak over `window`.
    pub fn unit_area(&self, window: Window<T>) -> T {
        Self {
            peak: T::one(),
            ..*self
        }
        .area(window)
    }
}

/// Parity of a detuning function about the window midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    /// Identically zero: both even and odd.
    Both,
}

impl Parity {
    pub fn is_even(self) -> bool {
        matches!(self, Parity::Even | Parity::Both)
    }

    pub fn is_odd(self) -> bool {
        matches!(self, Parity::Odd | Parity::Both)
    }
}

/// Time-dependent detuning, measured from the midpoint of the profile window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetuningShape<T> {
    Zero,
    Constant(T),
    /// `rate * (t - mid)`.
    LinearChirp { rate: T },
    /// `amplitude * tanh((t - mid) / width)`.
    TanhChirp { amplitude: T, width: T },
}

impl<T: Real> DetuningShape<T> {
    pub fn validate(&self) -> Result<(), DriveError> {
        let finite = match *self {
            DetuningShape::Zero => true,
            DetuningShape::Constant(v) => v.is_finite(),
            DetuningShape::LinearChirp { rate } => rate.is_finite(),
            DetuningShape::TanhChirp { amplitude, width } => {
                if !(width.is_finite() && width > T::zero()) {
                    return Err(DriveError::NonPositiveWidth(width.to_f64().unwrap_or(f64::NAN)));
                }
                amplitude.is_finite()
            }
        };
        if finite {
            Ok(())
        } else {
            Err(DriveError::NotFinite("detuning"))
        }
    }

    pub fn sample(&self, t: T, mid: T) -> T {
        match *self {
            DetuningShape::Zero => T::zero(),
            DetuningShape::Constant(v) => v,
            DetuningShape::LinearChirp { rate } => rate * (t - mid),
            DetuningShape::TanhChirp { amplitude, width } => amplitude * ((t - mid) / width).tanh(),
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            DetuningShape::Zero => Parity::Both,
            DetuningShape::Constant(v) if v.is_zero() => Parity::Both,
            DetuningShape::Constant(_) => Parity::Even,
            DetuningShape::LinearChirp { .. } | DetuningShape::TanhChirp { .. } => Parity::Odd,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.parity() == Parity::Both
    }

    /// Replaces the defining magnitude (constant value, chirp rate or chirp
    /// amplitude). A zero detuning becomes a constant one.
    pub fn with_magnitude(&self, value: T) -> Self {
        match *self {
            DetuningShape::Zero | DetuningShape::Constant(_) => DetuningShape::Constant(value),
            DetuningShape::LinearChirp { .. } => DetuningShape::LinearChirp { rate: value },
            DetuningShape::TanhChirp { width, .. } => DetuningShape::TanhChirp {
                amplitude: value,
                width,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn flip_if(self, flip: bool) -> Self {
        if flip {
            self.flipped()
        } else {
            self
        }
    }

    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

/// Integration interval of one pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<T> {
    pub start: T,
    pub end: T,
}

impl<T: Real> Window<T> {
    pub fn new(start: T, end: T) -> Result<Self, DriveError> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(DriveError::NotFinite("window"));
        }
        if end <= start {
            return Err(DriveError::EmptyWindow {
                start: start.to_f64().unwrap_or(f64::NAN),
                end: end.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { start, end })
    }

    pub fn len(&self) -> T {
        self.end - self.start
    }

    pub fn midpoint(&self) -> T {
        (self.start + self.end) * T::lit(0.5)
    }

    pub fn shifted(&self, dt: T) -> Self {
        Self {
            start: self.start + dt,
            end: self.end + dt,
        }
    }

    /// Window covering the union of the pulse supports, padded by
    /// [`DEFAULT_PADDING`] of its length on each side. Falls back to
    /// `[-1/2, 1/2]` padded when no pulse has a bounded support.
    pub fn covering(pulses: &[&PulseShape<T>]) -> Self {
        let mut bounds: Option<(T, T)> = None;
        for (lo, hi) in pulses.iter().filter_map(|p| p.support()) {
            bounds = Some(match bounds {
                None => (lo, hi),
                Some((a, b)) => (a.min(lo), b.max(hi)),
            });
        }
        let (lo, hi) = bounds.unwrap_or((-T::lit(0.5), T::lit(0.5)));
        let pad = (hi - lo) * T::lit(DEFAULT_PADDING);
        Self {
            start: lo - pad,
            end: hi + pad,
        }
    }
}

/// Drive of a two-level system for one pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveProfile2<T> {
    pub rabi: PulseShape<T>,
    pub detuning: DetuningShape<T>,
    pub rabi_sign: Sign,
    pub detuning_sign: Sign,
    pub window: Window<T>,
    /// Number of integration steps across the window.
    pub steps: usize,
}

impl<T: Real> DriveProfile2<T> {
    pub fn new(
        rabi: PulseShape<T>,
        detuning: DetuningShape<T>,
        window: Window<T>,
        steps: usize,
    ) -> Result<Self, DriveError> {
        let profile = Self {
            rabi,
            detuning,
            rabi_sign: Sign::Plus,
            detuning_sign: Sign::Plus,
            window,
            steps,
        };
        profile.validate()?;
        Ok(profile)
    }

    /// Profile over the default padded window with [`DEFAULT_STEPS`].
    pub fn with_default_window(
        rabi: PulseShape<T>,
        detuning: DetuningShape<T>,
    ) -> Result<Self, DriveError> {
        Self::new(rabi, detuning, Window::covering(&[&rabi]), DEFAULT_STEPS)
    }

    pub fn validate(&self) -> Result<(), DriveError> {
        self.detuning.validate()?;
        Window::new(self.window.start, self.window.end)?;
        if self.steps < 2 {
            return Err(DriveError::TooFewSteps(self.steps));
        }
        Ok(())
    }

    /// Signed Rabi frequency at `t`.
    pub fn rabi_at(&self, t: T) -> T {
        self.rabi_sign.value::<T>() * self.rabi.sample(t)
    }

    /// Signed detuning at `t`.
    pub fn detuning_at(&self, t: T) -> T {
        self.detuning_sign.value::<T>() * self.detuning.sample(t, self.window.midpoint())
    }

    /// The same pass with the Rabi frequency and/or detuning negated.
    pub fn flipped(&self, flip_rabi: bool, flip_detuning: bool) -> Self {
        Self {
            rabi_sign: self.rabi_sign.flip_if(flip_rabi),
            detuning_sign: self.detuning_sign.flip_if(flip_detuning),
            ..*self
        }
    }

    /// Even Rabi frequency and odd detuning about the window midpoint: the
    /// level-crossing symmetry under which the Cayley-Klein `a` is real.
    pub fn has_crossing_symmetry(&self) -> bool {
        self.rabi.is_even_about(self.window.midpoint(), symmetry_tol::<T>())
            && self.detuning.parity().is_odd()
    }

    /// Even Rabi frequency and even detuning about the window midpoint: the
    /// symmetry under which the Cayley-Klein `b` is imaginary.
    pub fn has_even_symmetry(&self) -> bool {
        self.rabi.is_even_about(self.window.midpoint(), symmetry_tol::<T>())
            && self.detuning.parity().is_even()
    }
}

/// Which end level of the three-level chain carries the two-photon detuning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Endpoint {
    Initial,
    #[default]
    Target,
}

impl Endpoint {
    pub fn swapped(self) -> Self {
        match self {
            Endpoint::Initial => Endpoint::Target,
            Endpoint::Target => Endpoint::Initial,
        }
    }
}

/// Reduces an angle to `[0, 2 pi)`.
pub fn reduce_phase<T: Real>(phi: T) -> T {
    let two_pi = T::TAU();
    let r = phi % two_pi;
    let r = if r < T::zero() { r + two_pi } else { r };
    if r >= two_pi {
        T::zero()
    } else {
        r
    }
}

/// Drive of a three-level Lambda system (pump on 1-2, Stokes on 2-3) for one
/// pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveProfile3<T> {
    pub pump: PulseShape<T>,
    pub stokes: PulseShape<T>,
    pump_phase: T,
    stokes_phase: T,
    pub detuning: DetuningShape<T>,
    pub two_photon_detuning: T,
    pub two_photon_site: Endpoint,
    pub window: Window<T>,
    pub steps: usize,
}

impl<T: Real> DriveProfile3<T> {
    pub fn new(
        pump: PulseShape<T>,
        stokes: PulseShape<T>,
        detuning: DetuningShape<T>,
        window: Window<T>,
        steps: usize,
    ) -> Result<Self, DriveError> {
        let profile = Self {
            pump,
            stokes,
            pump_phase: T::zero(),
            stokes_phase: T::zero(),
            detuning,
            two_photon_detuning: T::zero(),
            two_photon_site: Endpoint::Target,
            window,
            steps,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn with_default_window(
        pump: PulseShape<T>,
        stokes: PulseShape<T>,
        detuning: DetuningShape<T>,
    ) -> Result<Self, DriveError> {
        Self::new(
            pump,
            stokes,
            detuning,
            Window::covering(&[&pump, &stokes]),
            DEFAULT_STEPS,
        )
    }

    /// Counterintuitive STIRAP pair: the Stokes pulse starts at `start` and
    /// the pump is the same pulse delayed by `delay`.
    pub fn stirap(
        stokes: PulseShape<T>,
        delay: T,
        detuning: DetuningShape<T>,
    ) -> Result<Self, DriveError> {
        Self::with_default_window(stokes.shifted(delay), stokes, detuning)
    }

    pub fn validate(&self) -> Result<(), DriveError> {
        self.detuning.validate()?;
        Window::new(self.window.start, self.window.end)?;
        if !(self.pump_phase.is_finite() && self.stokes_phase.is_finite()) {
            return Err(DriveError::NotFinite("phase"));
        }
        if !self.two_photon_detuning.is_finite() {
            return Err(DriveError::NotFinite("two-photon detuning"));
        }
        if self.steps < 2 {
            return Err(DriveError::TooFewSteps(self.steps));
        }
        Ok(())
    }

    pub fn pump_phase(&self) -> T {
        self.pump_phase
    }

    pub fn stokes_phase(&self) -> T {
        self.stokes_phase
    }

    pub fn with_phases(&self, pump_phase: T, stokes_phase: T) -> Self {
        Self {
            pump_phase: reduce_phase(pump_phase),
            stokes_phase: reduce_phase(stokes_phase),
            ..*self
        }
    }

    pub fn with_two_photon_detuning(&self, delta: T) -> Self {
        Self {
            two_photon_detuning: delta,
            ..*self
        }
    }

    pub fn detuning_at(&self, t: T) -> T {
        self.detuning.sample(t, self.window.midpoint())
    }

    /// Pump and Stokes share kind, peak and width and differ only by a delay.
    pub fn is_symmetric_pair(&self) -> bool {
        let tol = symmetry_tol::<T>();
        let (p, s) = (&self.pump, &self.stokes);
        p.kind() == s.kind()
            && p.center().is_some()
            && (p.peak() - s.peak()).abs() <= tol * (T::one() + p.peak().abs())
            && (p.width() - s.width()).abs() <= tol * (T::one() + p.width().abs())
    }

    /// The pulse pair is mirror symmetric about the window midpoint, which
    /// together with [`Self::is_symmetric_pair`] makes the time-reversed
    /// pass equal to the pump-Stokes swapped one.
    pub fn is_centered_pair(&self) -> bool {
        match (self.pump.center(), self.stokes.center()) {
            (Some(p), Some(s)) => {
                ((p + s) * T::lit(0.5) - self.window.midpoint()).abs() <= symmetry_tol::<T>()
            }
            _ => false,
        }
    }

    /// Backward pass: pump and Stokes envelopes are exchanged (so the pump now
    /// leads by the forward delay) and the fields acquire the extra phases
    /// `xi` (pump) and `eta` (Stokes) relative to the forward fields. The
    /// two-photon detuning moves to the other end of the chain, so the
    /// backward Hamiltonian is the forward one with levels 1 and 3 exchanged.
    pub fn reversed(&self, xi: T, eta: T) -> Self {
        Self {
            pump: self.stokes,
            stokes: self.pump,
            pump_phase: reduce_phase(self.stokes_phase + xi),
            stokes_phase: reduce_phase(self.pump_phase + eta),
            two_photon_site: self.two_photon_site.swapped(),
            ..*self
        }
    }

    /// Shared pulse area (of the pump) over the window.
    pub fn pulse_area(&self) -> T {
        self.pump.area(self.window)
    }
}

fn symmetry_tol<T: Real>() -> T {
    T::tolerance(1e-12, 16.0)
}
