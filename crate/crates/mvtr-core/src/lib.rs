#![no_std]
//! Exact algebra behind the Laplace-transformed cut-and-join equation of the
//! Mariño–Vafa formula and the framed-vertex topological recursion.

extern crate alloc;

pub mod audit;
pub mod cutjoin;
pub mod hodge;
pub mod lambda;
pub mod mpoly;
pub mod psi;
pub mod q;
pub mod quad;
pub mod ratfn;
pub mod series;
pub mod spectral;
pub mod upoly;

pub use mpoly::{MPoly, TPoly};
pub use q::{Ring, Q};
pub use ratfn::{RatFn, TauPoint};
pub use series::{Series, SeriesError};
pub use upoly::UPoly;
