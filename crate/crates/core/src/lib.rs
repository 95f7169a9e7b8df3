//! Construction and coefficient analysis of the q-starlike class
//! `S*_q(alpha)` and the q-convex class `C_q(alpha)` for real `q` in (0, 1).
//!
//! The crate is organized bottom-up:
//!
//! * [`series`]: truncated complex power series,
//! * [`qcalc`]: q-difference operator, Jackson q-integral, parameters,
//! * [`caratheodory`]: atomic Herglotz measures and Carathéodory functions,
//! * [`extremal`]: closed-form representing and extremal functions,
//! * [`classes`]: class members from Carathéodory data and grid certificates,
//! * [`functionals`]: Fekete–Szegő, Hankel and Bieberbach-type bounds,
//! * [`explorer`]: seeded extremal sweeps and their reports.

pub mod caratheodory;
pub mod classes;
pub mod error;
pub mod explorer;
pub mod extremal;
pub mod functionals;
pub mod qcalc;
pub mod series;

pub use caratheodory::{AtomicMeasure, Atom};
pub use error::{Error, Result};
pub use qcalc::{ClassParams, QLogRatios};
pub use series::TruncatedSeries;

pub use num_complex::Complex64;
