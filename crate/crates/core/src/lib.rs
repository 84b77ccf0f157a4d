//! Exact computations on approximate groups: product sets, Ruzsa calculus,
//! structure detectors, progressions, Cayley graphs and scaling limits.

pub mod caps;
pub mod cayley;
pub mod error;
pub mod fixtures;
pub mod group;
pub mod limits;
pub mod progressions;
pub mod rational;
pub mod set;
pub mod setcalc;
pub mod structure;
pub mod verify;

pub use caps::Caps;
pub use error::{Error, Result};
pub use group::{Element, Group, GroupSpec};
pub use rational::Rat;
pub use set::ElementSet;
