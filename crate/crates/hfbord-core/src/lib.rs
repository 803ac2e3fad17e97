//! Exact F2 homological algebra for bordered Floer theory over the torus
//! algebra: type-D structures and their morphism complexes, A-infinity and
//! DA bimodules with box tensor products, knot Floer complexes over
//! F2[U,V] and F2[U,V]/(UV) with basepoint actions and skew-involutions,
//! the complement translation, and the hat-flavored involution pipeline.
//!
//! All computations are exact and deterministic; identical inputs produce
//! identical serialized outputs.

pub mod algebra;
pub mod config;
pub mod error;
pub mod bimod;
pub mod builtins;
pub mod cfk;
pub mod typed;
pub mod translate;
pub mod f2;
pub mod involution;

pub use algebra::{AlgebraElement, Basis, Idem};
pub use config::Config;
pub use error::HfError;
