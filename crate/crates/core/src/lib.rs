//! Negativity monogamy for three-party pure states.
//!
//! The crate is layered bottom-up:
//!
//! * [`linalg`]: dense complex matrices, partial trace and transpose, and a
//!   cyclic Jacobi eigensolver that every other module is checked against.
//! * [`states`]: canonical qubit states, the qudit family and its swap
//!   rotation, Haar-random pure states.
//! * [`measures`]: negativity, concurrence (pure cut and Wootters), monogamy
//!   residuals and marginal spectra.
//! * [`boundary`]: the quartic satisfied by the A|C negativity, the closed form
//!   boundary triples, the implicit boundary surface and a membership test.
//! * [`qudit`]: block structure of the qudit partial transposes, closed forms,
//!   marginal-eigenvalue conditions and large-D asymptotics.
//! * [`explorer`]: sampling, region filling, perturbation search and dataset
//!   IO.

pub mod boundary;
pub mod error;
pub mod explorer;
pub mod linalg;
pub mod measures;
pub mod qudit;
pub mod states;

pub use boundary::{BoundaryCurve, Region};
pub use error::{Error, Result};
pub use explorer::{SampleRecord, SearchReport, Source};
pub use linalg::{ComplexMatrix, PureState, Spectrum, C64};
pub use measures::{ConcurrenceTriple, MarginalSpectra, NegativityTriple};
pub use qudit::PtBlockDecomposition;
pub use states::{AcinParams, NamedState, QuditFamilyParams, SwapFamilyParams};
