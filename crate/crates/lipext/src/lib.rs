//! Lipschitz extension of partially defined maps on finite metric spaces.
//!
//! Given a finite metric space `X`, a subset `A ⊂ X`, and a Lipschitz map
//! `f : A → Y`, this crate constructs total extensions `F : X → Y` by every
//! classical explicit construction — McShane's infimal formula, Whitney-type
//! coverings with Lipschitz partitions of unity, the Lee–Naor multiscale
//! scheme for finite domains, and nerve-complex pipelines through simplicial
//! extensors — and *certifies* the Lipschitz constant of the result exactly,
//! comparing it against the explicit bound each construction guarantees.
//!
//! Everything is exact at desk scale: certificates enumerate all point pairs,
//! covering multiplicities are computed by exhaustive search, Wasserstein-1
//! distances are solved to LP optimality with a transport-plan witness, and
//! padded-decomposition counts are integer arithmetic over full permutation
//! enumerations.
//!
//! The `lipext` binary exposes the same functionality on JSON inputs; see the
//! `cli` module and the book under `book/` for a guided tour.

pub mod covering;
pub mod extend;
pub mod metric;
pub mod partition;
pub mod selftest;
pub mod simplicial;
pub mod tol;
pub mod transport;
pub mod whitney;

pub mod cli;

pub use metric::{
    FiniteMetricSpace, LipschitzCertificate, PartialLipschitzMap, PointCloud, Subset,
};
