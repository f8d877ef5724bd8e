//! Differentially 4-uniform permutations of GF(2^n) obtained by switching the
//! inverse function on a subset S, f(x) = x^{-1} + 1_S(x), together with exact
//! differential, Walsh and degree analysis.
//!
//! ```
//! use std::sync::Arc;
//! use switchbox::{construct, field::FieldCtx, spectral};
//!
//! let ctx = Arc::new(FieldCtx::with_default(6).unwrap());
//! let built = construct::subfield(&ctx, 1, construct::CheckMode::Full).unwrap();
//! assert_eq!(spectral::walsh_stats(&built.perm).nonlinearity, 24);
//! ```

pub mod construct;
pub mod field;
pub mod io;
pub mod perm;
pub mod repro;
pub mod spectral;
pub mod subset;

pub use construct::{CheckMode, ConstructionError, ConstructionResult, Provenance};
pub use field::{Elem, FieldCtx, FieldError, QuadraticRoots};
pub use perm::{AnfTable, PermError, Permutation};
pub use spectral::{BoundCertificate, CczFingerprint, DiffSpectrum, WalshStats};
pub use subset::{ElementSet, SetFamilySpec};
