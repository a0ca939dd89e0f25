//! Distances between finite metric spaces and finite-dimensional normed
//! spaces, together with the constructive reductions that transform a
//! closeness certificate for one distance into one for another, each with
//! its quantitative guarantee asserted.
//!
//! The crate is organized around five pieces:
//!
//! - [`space`]: finite metric spaces, correspondences and bijections with
//!   their distortion, Hausdorff distance, greedy nets, capped graph
//!   metrics.
//! - [`dist`]: exact solvers at desk scale for the Gromov-Hausdorff
//!   distance (correspondence and bijective forms), three Lipschitz-distance
//!   variants, HL(ε)-closeness, and the coarse-Lipschitz fit.
//! - [`norm`]: norm specifications (l_p, polytopal, renorm-of-l_2), operator
//!   norms, Banach-Mazur upper bounds, Kadets certificates and the glue
//!   norm.
//! - [`reduce`]: the certificate transformers — suspension (Lipschitz to GH
//!   and HL to GH), the Banach-Mazur path gadget, unit-ball truncation, the
//!   Kadets sphere gadget, and the renorm construction (GH to BM).
//! - [`verify`]: seeded instance generators and per-theorem verification
//!   campaigns with JSON reports.
//!
//! The `examples/` directory has one runnable program per capability; the
//! thin `mdz` binary exposes the same operations as subcommands.

pub mod dist;
pub mod error;
pub mod linalg;
pub mod linprog;
pub mod norm;
pub mod reduce;
pub mod space;
pub mod verify;

pub use error::{Error, Result};
pub use space::{
    Bijection, ClassBounds, Correspondence, FiniteMetricSpace, Witness, WitnessKind,
    WitnessPayload, METRIC_TOL,
};
