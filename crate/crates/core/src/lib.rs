//! Reduction of discrete probability measures to at most `n+1` atoms with
//! the same mean (recombination).
//!
//! ```
//! use nalgebra::DMatrix;
//! use recombination::{validate_reduction, DiscreteMeasure, Registry, ReducerConfig};
//!
//! let points = DMatrix::from_fn(2, 50, |k, j| ((j * 7 + k * 3) % 11) as f64 - 5.0);
//! let measure = DiscreteMeasure::uniform(points).unwrap();
//! let registry = Registry::with_defaults(&ReducerConfig::default());
//! let sol = registry.get("greedy").unwrap().reduce(&measure, 42).unwrap();
//! assert!(sol.support() <= 3);
//! assert!(validate_reduction(&measure, &sol, 1e-10).unwrap().passed);
//! ```

pub mod cone;
pub mod deterministic;
pub mod error;
pub mod linalg;
pub mod lsq;
pub mod measure;
pub mod oracle;
pub mod pipeline;
pub mod recombine;
pub mod registry;
pub mod seed;
pub mod synth;

pub use cone::ConeBasis;
pub use deterministic::reduce_deterministic;
pub use error::{Error, Result};
pub use lsq::{build_coreset, solve_reduced, LsqCoreset};
pub use measure::{center, normalize_sphere, validate_reduction, CenteredCloud, DiscreteMeasure, ValidationReport};
pub use pipeline::{reduce_divide_conquer, reduce_hybrid};
pub use recombine::{Method, RecombinationSolution, ReductionStats};
pub use registry::{Reducer, ReducerConfig, Registry, BUILTIN_REDUCERS};
pub use seed::derive_seed;
