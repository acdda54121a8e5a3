//! Exact laboratory for random times on finite filtered probability spaces.
//!
//! The finite part works over exact rationals: sample spaces with strictly
//! positive masses, filtrations as refining partition sequences on the grid
//! `0..=T`, optional and dual optional projections, and executable checks of
//! the equivalences relating pseudo-stopping times, immersion of
//! filtrations, and the Azéma supermartingales of a random time. The
//! [`montecarlo`] module covers the continuous-time examples that have no
//! finite counterpart.

pub mod campaign;
pub mod error;
pub mod filtration;
pub mod fixtures;
pub mod lab;
pub mod montecarlo;
pub mod process;
pub mod projections;
pub mod rational;
pub mod report;
pub mod space;
pub mod time;

pub use error::{Error, Result};
pub use filtration::{FilteredPair, Filtration};
pub use process::Process;
pub use rational::Rational;
pub use report::{CheckReport, Verdict, Witness};
pub use space::{Partition, SampleSpace};
pub use time::{RandomTime, Time};
