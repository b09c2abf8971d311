//! Strong-field electron dynamics in periodic systems.

pub mod band;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod interband;
pub mod intraband;
pub mod kgrid;
pub mod ladders;
pub mod material;
pub mod ode;
pub mod output;
pub mod pulse;
pub mod quad;
pub mod regimes;
pub mod resonant;
pub mod special;
pub mod units;

pub use error::{Error, Result};
