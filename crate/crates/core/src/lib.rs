//! Pulse-level compilation and simulation of Cirac-Zoller multi-controlled
//! gates on a trapped-ion register sharing one motional mode.
//!
//! Gates are lowered to red-sideband (RSB) and carrier pulses. Successive
//! gates pick opposite sideband signs at their boundaries so that a peephole
//! pass can remove the redundant pulses. Schedules can be checked against the
//! ideal gate with an exact state-vector simulator, or run through a Monte
//! Carlo wavefunction simulation with motional heating and dephasing.

pub mod circuit;
pub mod compiler;
pub mod error;
pub mod exact;
pub mod exec;
pub mod gates_io;
pub mod labels;
pub mod lcu;
pub mod linalg;
pub mod model;
pub mod noisy;
pub mod schedule_io;

pub use circuit::{ControlString, GateSequence, GateSpec, Gauge, Sign};
pub use compiler::{compile, CompileOptions, CountReport, LoweringStyle};
pub use error::{Error, Result};
pub use exec::Execution;
pub use labels::LabelTable;
pub use model::{Angle, Level, PhysParams, PulseKind, PulseOp, Schedule, TimingPolicy};
