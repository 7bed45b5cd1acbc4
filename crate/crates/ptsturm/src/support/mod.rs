//! Internal numeric building blocks shared across the crate.

pub mod dd;
pub mod gamma;
pub mod quad;
pub mod roots;
