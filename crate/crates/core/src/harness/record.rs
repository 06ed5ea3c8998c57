use std::fmt;
use std::io::Write;

use crate::inversion::Estimate;

pub const CSV_HEADER: [&str; 13] = [
    "swept_value",
    "p_direct",
    "q",
    "r",
    "Q00",
    "Qpi0",
    "Q0pi",
    "Qpipi",
    "Q_bar",
    "p_estimated",
    "classical_estimate",
    "residual",
    "status",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Status {
    #[default]
    Ok,
    /// An input, radicand or the estimate was clamped within the noise slack.
    Clamped,
    /// The directly simulated probability lies on the discarded root, so the
    /// estimate is its mirror image.
    LowerBranch,
    Error(String),
}

impl Status {
    pub(crate) fn classify(p_direct: f64, estimate: &Estimate<f64>) -> Self {
        if (p_direct - estimate.lower_root).abs() < (p_direct - estimate.p).abs() {
            Status::LowerBranch
        } else if estimate.clamped {
            Status::Clamped
        } else {
            Status::Ok
        }
    }

    /// `Ok` or `Clamped`: the estimate is meant to reproduce the direct value.
    pub fn is_usable(&self) -> bool {
        matches!(self, Status::Ok | Status::Clamped)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::Clamped => f.write_str("clamped"),
            Status::LowerBranch => f.write_str("lower_branch"),
            Status::Error(msg) => write!(f, "error: {msg}"),
        }
    }
}

/// One protocol run. Quantities the protocol does not measure are `None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasurementRecord {
    pub swept_value: Option<f64>,
    pub p_direct: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    /// Return probabilities at sign/phase combinations `(0,0), (pi,0),
    /// (0,pi), (pi,pi)`. Two-state runs use the same slots for the unflipped,
    /// Rabi-flipped, detuning-flipped and doubly flipped passes.
    pub q_variants: [Option<f64>; 4],
    pub q_bar: Option<f64>,
    pub p_estimated: Option<f64>,
    pub classical_estimate: Option<f64>,
    pub status: Status,
    /// Propagations performed (not written to CSV).
    pub simulations: usize,
}

impl MeasurementRecord {
    pub fn failed(swept_value: Option<f64>, message: String) -> Self {
        Self {
            swept_value,
            status: Status::Error(message),
            ..Self::default()
        }
    }

    /// `|p_direct - p_estimated|`.
    pub fn residual(&self) -> Option<f64> {
        Some((self.p_direct? - self.p_estimated?).abs())
    }

    fn csv_fields(&self) -> Vec<String> {
        let num = |x: Option<f64>| x.map(|v| format!("{v:.16e}")).unwrap_or_default();
        let mut out = vec![
            num(self.swept_value),
            num(self.p_direct),
            num(self.q),
            num(self.r),
        ];
        out.extend(self.q_variants.iter().map(|&v| num(v)));
        out.extend([
            num(self.q_bar),
            num(self.p_estimated),
            num(self.classical_estimate),
            num(self.residual()),
            self.status.to_string(),
        ]);
        out
    }
}

/// Writes `records` as CSV with the [`CSV_HEADER`] columns. Numbers use 17
/// significant digits, which round-trips `f64`.
pub fn write_csv<W: Write>(records: &[MeasurementRecord], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for rec in records {
        w.write_record(rec.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}
