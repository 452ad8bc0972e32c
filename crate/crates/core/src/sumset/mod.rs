//! Sumsets, representation counts and finite-depth density profiles.

mod blocked;
mod frame;
mod profile;
mod reps;
mod shift_or;

pub use frame::{candidate_range, BitFrame};
pub use blocked::{blocked_sumset, Block, BlockedSet, PairInfo, PairSearch};
pub use profile::{
    estimate_subject, profile_estimate, CheckpointDensity, CheckpointPlan, ProfileEstimate, ProfileRun, Subject,
    ESTIMATOR_SLACK, MIN_TAIL_CHECKPOINTS,
};
pub use reps::{check_repres_lemma, check_repres_lemma_on, rep_count, rep_count_closed_form, RepCounts, RepresReport};
pub use shift_or::{sumset_intervals, sumset_window};
