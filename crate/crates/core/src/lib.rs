//! Deterministic multivariate multipoint evaluation over `Z/r^s Z` and its
//! extension rings.
//!
//! Two algorithm families are provided: [`mme_a`] reduces to evaluation over
//! prime fields on explicit Kakeya sets, and [`mme_b`] recursively reduces to
//! small prime-power moduli with product-set evaluation at the leaves. Every
//! building block is exposed so it can be tested against [`MultiPoly::naive_eval`].

pub mod arith;
pub mod checks;
pub mod error;
pub mod interp;
pub mod kakeya;
pub mod mme_a;
pub mod mme_b;
pub mod mpoly;
pub mod primes;
pub mod prodeval;

pub use arith::{ExtRing, Natural, PowerModulus, ResidueRing, Ring, RingElem, UnitRing, Zn, Zn64};
pub use error::{Error, Result};
pub use mpoly::{ExpVec, IntMultiPoly, MultiPoly, UniPoly};
