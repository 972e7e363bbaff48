//! Free induction decay of a one-dimensional dipolar-coupled spin-1/2 chain
//! driven by the multi-pulse multiple-quantum NMR sequence.
//!
//! The FID is available from three independent engines:
//!
//! * [`oracle`]: brute-force dense evolution in the full `2^N` spin basis.
//! * [`fermion`]: exact finite-N mode sums after fermionization, `O(N)` per
//!   time point.
//! * [`closed_form`]: Bessel-function expressions valid for long chains.
//!
//! [`experiment`] ingests multi-pulse intensity data and fits the dipolar
//! coupling constant; [`cli`] wires everything to the `fid` binary.

pub mod bessel;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod fermion;
pub mod model;
pub mod oracle;

pub use error::{FidError, Result};
pub use exec::Execution;
pub use model::{beta_from_physical, make_chain, ChainSpec, FidSeries, Normalization, ThermalSpec, TimeGrid};
