//! Passive impedance shaping of constrained-layer-damped soft fins.
//!
//! The crate is split along the pipeline:
//!
//! * [`cld`] predicts the complex bending stiffness of a sandwich layup and
//!   fits a causal Prony surrogate to it.
//! * [`signal`] recovers complex stiffness from torque–angle records by
//!   single-frequency regression and computes loop energies.
//! * [`foil`] integrates a heaving foil with a passive viscoelastic hinge,
//!   either clamped in a freestream or on a virtual-mass carriage.
//! * [`harness`] strings these together into the bender, Strouhal-sweep and
//!   free-swim protocols and handles config and CSV persistence.

pub mod cld;
pub mod error;
pub mod foil;
pub mod harness;
pub mod ode;
pub mod signal;
pub mod stiffness;

pub use error::{Error, Result};
pub use stiffness::{impedance_fractions, ComplexStiffness, ImpedanceFractions};

/// Version of the config file schema understood by [`harness::ProtocolConfig`].
pub const CONFIG_SCHEMA_VERSION: u32 = 1;
