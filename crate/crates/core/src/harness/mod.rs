//! Measurement protocols, parameter sweeps and randomized verification.
//!
//! Everything here works in `f64`: it is the numerical front end of the
//! generic algebra in [`crate::su2`] and [`crate::su3`].

mod protocol;
pub mod random;
mod record;
mod sweep;
mod verify;

pub use protocol::{check_preconditions, run_protocol, HarnessError, Profile, ProtocolKind, Settings};
pub use record::{write_csv, MeasurementRecord, Status, CSV_HEADER};
pub use sweep::{sweep, SweepParameter, SweepSpec};
pub use verify::{verify, Failure, Suite, VerifyReport};
