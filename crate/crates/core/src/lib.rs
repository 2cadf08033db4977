//! Averaged-function analysis, Chebyshev certificates and Filippov simulation
//! for discontinuous quadratic perturbations of the isochronous center S4.

pub mod averaging;
pub mod ellfun;
pub mod error;
pub mod filippov;
pub mod hp;
pub mod poly;
pub mod qfield;
pub mod symdiff;
pub mod verify;

pub use error::{Error, Result};
pub use hp::HPReal;
pub use poly::{QPoly, QPoly2, RootInterval};
pub use qfield::{Sign, Sqrt2Rational};
