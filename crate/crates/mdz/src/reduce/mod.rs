//! The reduction constructions and their witness transformers. Each theorem
//! direction becomes a build step plus push/pull operations whose
//! quantitative bounds are asserted at call time: pushes turn a closeness
//! certificate on the inputs into one on the constructed spaces, pulls
//! verify the proof's conditions on a given certificate and return the
//! certified bound (or a structured report of the first violated
//! condition).

mod bm;
mod kadets;
mod renorm;
mod suspension;
mod unitize;

pub use bm::{
    bm_gadget, bm_gadget_pull, bm_gadget_push, covering_constants, default_rationals,
    detect_instances, gadget_lipschitz, BmGadget, BmGadgetConfig, BmPull, BmPullOutcome, BmPush,
    BmVertex, Rational,
};
pub use kadets::{
    kadets_gadget, kadets_pull, kadets_push, KadetsGadget, KadetsPull, KadetsPullOutcome,
    KadetsPush, KadetsVertex,
};
pub use renorm::{eta_max, renorm_build, renorm_push, renorm_reverse_constant, RenormPush};
pub use suspension::{
    hl_pull, hl_push, suspend, suspend_pull, suspend_push, HlPullOutcome, SuspendPullOutcome,
    Suspension, SuspensionPoint,
};
pub use unitize::{unitize, unitize_pull, LargeScaleLip, UnitizePullOutcome};
