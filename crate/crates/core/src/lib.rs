//! Completely positive maps on finite Coxeter groups, braided (Yang–Baxter)
//! Fock spaces, pair-partition moments and operator-space norm estimates,
//! together with numerical certificates for each identity and inequality.
//!
//! Module map:
//!
//! * [`coxeter`]: finite Coxeter groups as enumerated element tables.
//! * [`qmap`]: quasi-multiplicative operator-valued maps and positivity.
//! * [`fock`]: truncated deformed Fock spaces and their operators.
//! * [`wick`]: pair partitions, crossings and vacuum moments.
//! * [`opspace`]: max norm, sandwich inequality and the tensor-square bound.
//! * [`shell`]: scenario documents, pipelines, reports and the CLI plumbing.

pub mod certificate;
pub mod coxeter;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod opspace;
pub mod qmap;
pub mod shell;
pub mod wick;

pub use certificate::{Certificate, Direction, Tolerances};
pub use error::{Error, Result};
pub use linalg::{CMat, CVec, C64};
