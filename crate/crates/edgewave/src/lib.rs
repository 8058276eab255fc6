//! Numerics for the Airy-kernel Fredholm determinant, the Hastings-McLeod
//! Painleve II solution, the Painleve I hierarchy, and the large-gap
//! asymptotics of the higher-order Tracy-Widom distributions.

pub mod acceptance;
pub mod asymptotics;
pub mod banded;
pub mod dd;
pub mod error;
pub mod fredholm;
pub mod hierarchy;
pub mod interp;
pub mod painleve2;
pub mod pi2k_profile;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
