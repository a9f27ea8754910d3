//! Linear-programming and three-point semidefinite bounds for spherical codes.
//!
//! The crate evaluates Gegenbauer expansions, measures codes (distance
//! distributions, moments, energies), checks certificate side conditions on
//! `T` and `D_3(T)`, evaluates the resulting bounds, and runs the cap
//! configuration pipeline that rules out a 25-point kissing configuration in
//! four dimensions.

pub mod bounds;
pub mod capopt;
pub mod codes;
pub mod error;
pub mod gegenbauer;
pub mod poly;
pub mod sum;
pub mod threepoint;
pub mod verify;

pub use codes::{DistanceDistribution, SphericalCode};
pub use error::{Error, Result};
pub use gegenbauer::GegenbauerExpansion;
