//! Exact and floating-point evaluation of Macdonald-type random walks on
//! strictly decreasing particle configurations.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod kernels;
pub mod macdonald;
pub mod partitions;
pub mod tilings;
pub mod verify;

pub use algebra::{Field, Mode, QTParams, Rational, Scalar};
pub use error::{Error, Result};
pub use partitions::{enumerate_interlacing, interlaces, BoxStats, ParticleConfig, Partition};
