//! Exact-arithmetic workbench for Turan-type lower bounds on the rate of
//! codes built from power codes `C^n`.
//!
//! The crate computes distance enumerators of explicit codes, the asymptotic
//! Gilbert-Varshamov baseline, the enumerator-based lower bound and its
//! Caro-Wei refinement, the Delsarte spectrum behind the "no improvement"
//! argument, the improvement conditions as functions of `z`, searches over
//! small code spaces for codes meeting the Caro-Wei condition, and a
//! finite-length brute-force oracle on the graph with vertex set `C^n`.

pub mod bounds;
pub mod code;
pub mod conditions;
pub mod delsarte;
pub mod error;
pub mod oracle;
pub mod par;
pub mod poly;
pub mod search;

pub use code::{
    distance_enumerator, hamming_distance, local_distance_enumerator, Code,
    DistanceEnumerator, LocalDistanceEnumerator, Word,
};
pub use error::{Error, Result};
pub use par::Execution;
pub use poly::{power_enumerator, RationalPolynomial};
