//! Spectral estimates and exact bound-state counts for one-dimensional
//! Schrodinger operators `-u'' - alpha*G` on the half-line and the line.

pub mod bounds;
pub mod bsop;
pub mod constants;
pub mod corpus;
pub mod error;
pub mod potential;
pub mod ode;
pub mod oscillate;
pub mod partition;
pub mod quad;
pub mod radial2d;
pub mod seq;
pub mod tridiag;

pub use bounds::{BoundKind, EstimateReport, Provenance, WeightedPairBound};
pub use bsop::{
    assemble_bs, bs_principle_check, finite_interval_eigs, graded_mesh, hille_bracket,
    n_plus_bs, ns_diagnostic, trace_check, truncation_radius, BsCtrl, BsPrincipleReport,
    ConvergedCount, DenominatorMode, DiscretePencil, HilleBracket, TraceCheck,
};
pub use constants::Constants;
pub use error::{Error, Result};
pub use oscillate::{
    count_bound_states, count_line_shifted, prufer_trace, BoundaryMode, CoordChoice, Coords,
    CountBracket, CountCtrl, PruferTrace,
};
pub use partition::{build_partition, phi, phi_bound, uniform_partition, Partition};
pub use radial2d::{
    count_radial, validate_radial_bound, ChannelReport, RadialCount, RadialCtrl,
    RadialValidationReport, RadialValidationRow,
};
pub use potential::{Convention, Domain, Interpolation, Potential, PotentialKind};
pub use quad::IntegralValue;
