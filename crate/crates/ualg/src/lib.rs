//! Finite universal algebra toolkit.
//!
//! Everything here works on finite carriers `{0, .., n-1}` with explicit
//! operation tables, in three flavors that share a common syntactic core:
//!
//! - **classical** Σ-algebras ([`finalg`]): congruences, quotients, kernels,
//!   free algebras in a finitely generated variety, and HSP membership
//!   ([`variety`]), plus Birkhoff's equational deduction system ([`eqlogic`]);
//! - **ordered** Σ-algebras ([`ordalg`]): stable preorders, ordered quotients,
//!   and term inequations;
//! - **quantitative** Σ-algebras ([`quantalg`]): extended rational metrics,
//!   pseudometric congruences, metric quotients, c-reflexive quotients,
//!   c-clustered equations, and the quantitative deduction system.
//!
//! The shared core ([`sigterm`]) provides signatures, variable sets, terms,
//! substitution, evaluation, and bounded term enumeration. All values are
//! immutable after construction and all operations are pure, so everything is
//! safe to use from multiple threads.
//!
//! Results that deny something (an equation fails, membership is refuted, a
//! proof is found) carry certificates: witness assignments, separating
//! equations, countermodels, or checkable derivation trees.

pub mod eqlogic;
pub mod error;
pub mod finalg;
pub mod io;
pub mod limits;
pub mod ordalg;
pub mod quantalg;
pub mod ratext;
pub mod report;
pub mod sigterm;
mod tuples;
pub mod variety;

pub use error::Error;
pub use limits::Limits;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
