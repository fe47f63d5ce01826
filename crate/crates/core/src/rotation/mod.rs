//! Sturmian coding of circle orbits and the walk functionals built on it.

pub mod angle;
pub mod interval_set;
pub mod orbit;
pub mod recurrence;
pub mod verify;

pub use angle::{Angle, Linear};
pub use interval_set::{Arc, IntervalSet};
pub use orbit::{block_sums, code_symbol, omega, prefix_scan, walk, walk_record, Checkpoint, Orbit, WalkRecord};
pub use recurrence::{recurrence_set, verify_members, MemberCheck, RecurrenceMode, RecurrenceResult};
pub use verify::{Check, Report};
