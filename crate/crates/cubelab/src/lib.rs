//! Analysis of boolean and real-valued functions on the discrete cube
//! `{0,1}^n`: influences, Walsh–Fourier spectra, martingale difference
//! decompositions, entropy functionals, and verifiers for the
//! edge-isoperimetric / log-Sobolev family of inequalities, together with
//! extremal constructions and search engines over small function spaces.
//!
//! Start with the `examples/` directory: each example is a runnable tour of
//! one capability (family analytics, the inequality battery, exhaustive
//! conjecture scans, Krawchouk near-extremal builds, junta extraction,
//! biased-measure log-Sobolev constants, martingale decompositions).

pub mod analysis;
pub mod constructions;
pub mod error;
pub mod funcspec;
pub mod function;
pub mod inequalities;
pub mod io;
pub mod junta;
pub mod measure;
pub mod numeric;
pub mod search;
pub mod spectral;
pub mod symmetric;

pub use error::{Error, Result};
pub use function::{BooleanFunction, RealFunction, BOOL_DENSE_CAP, REAL_DENSE_CAP};
pub use io::CubeFunction;
pub use measure::{CoordinateOrdering, ProductMeasure};
pub use symmetric::{NumericMode, SymmetricProfile};
