pub mod combinatorics;
mod dd;
pub mod error;
pub mod hyper;
pub mod integrals;
pub mod oracles;
pub mod special;
pub mod verify;
pub mod walks;

pub use combinatorics::IntParamSet;
pub use error::{Error, Result};
pub use hyper::SeriesValue;
pub use integrals::{BResult, MethodTag, ParamSet};
pub use oracles::{MCEstimate, QuadratureResult};
pub use walks::{ExitTimeReport, WalkConfig};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
