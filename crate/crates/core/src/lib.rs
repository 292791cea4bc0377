//! High-precision computation of the Stirling–Ramanujan constants S_n and the
//! related Upsilon constants from their exponential-period integral
//! representations, cross-validated by an independent Euler–Maclaurin oracle,
//! together with the exact rational combinatorics behind them and numerical
//! verifiers for the higher Frullani, Malmstén, and zeta integral identities.

pub mod constants;
pub mod em;
pub mod error;
pub mod exact;
pub mod integrand;
pub mod poly;
pub mod quad;
pub mod real;
pub mod verify;

pub use error::{Error, Result};
pub use exact::Rational;
pub use poly::RPoly;
pub use real::{PrecisionPolicy, Real};
