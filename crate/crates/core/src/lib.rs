//! Young functions, Orlicz norms, Hardy operators and numerical Korn-type
//! inequalities for vector fields sampled on box grids.

pub mod error;
pub mod fields;
pub mod hardy;
pub mod laminate;
pub mod balance;
pub mod bogovskii;
pub mod cli;
pub mod quad;
pub mod rearrange;
pub mod young;

pub use error::{Error, Result};
pub use young::YoungFunction;
