//! Black-box group algorithms for groups of Lie type in odd characteristic.
//!
//! The centerpiece is a one-sided Monte-Carlo procedure that constructs a
//! long root SL2(q)-subgroup in a black-box group `X` with `X/O_p(X)` a
//! (quasi-)simple group of Lie type over a field of odd order `q = p^k > 3`,
//! together with a recognizer for a nontrivial p-core. Both work purely
//! through the multiply / invert / identity-test oracle plus a global
//! exponent `E` with `x^E = 1`; no order oracle is assumed.
//!
//! The concrete backend is a dense matrix group over GF(p^k) with standard
//! generator models for the classical families. A separate white-box layer
//! ([`oracle`]) inspects matrix entries to adjudicate the black-box outputs
//! in tests and in the CLI `verify` command; algorithm code never looks
//! inside an element.

pub mod algorithms;
pub mod blackbox;
pub mod cli;
pub mod gf;
pub mod involution;
pub mod matgrp;
pub mod oracle;
pub mod random;
pub mod subgrp;
pub mod transcript;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
