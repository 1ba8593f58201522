//! Composite π pulses robust to (or selective in) pulse-area error.
//!
//! Propagators live in [`su2`], the structured families and builders in
//! [`sequences`], the published tables in [`golden`], error-profile figures of
//! merit in [`metrics`], phase derivation and table checking in [`optimizer`],
//! and the wave-plate picture in [`jones`].

pub mod error;
pub mod golden;
pub mod io;
pub mod jones;
pub mod metrics;
pub mod optimizer;
pub mod quadrature;
pub mod sequences;
pub mod su2;

pub use error::Error;
pub use golden::{find_row, golden_table, golden_tables, lookup, GoldenRow, GoldenTable};
pub use metrics::{metrics, MetricsReport, ProfileKind};
pub use sequences::{build, CompositeSequence, Family};
pub use su2::{compose, Propagator, Pulse};
