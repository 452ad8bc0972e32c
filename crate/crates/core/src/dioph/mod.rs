//! Irrational rotations in fixed point, Bohr sets and discrepancy checks.

mod bohr;
mod circle;
mod discrepancy;
mod diophsum;
mod theta;

pub use bohr::{bohr_fill, bohr_set, decision_margin};
pub use circle::CircleArc;
pub use discrepancy::{
    default_m, discrepancy_decay, empirical_discrepancy, erdos_turan_bound, DecayReport, DiscrepancyReport,
    ERDOS_TURAN_MULTIPLIER,
};
pub use diophsum::{diophsum_repcheck, DiophSumInput, DiophSumReport, DIOPHSUM_BUDGET, DIOPHSUM_CONSTANT};
pub use theta::{convergents, norm_dist, Convergent, Rotation, ThetaSource, ThetaValue, DEFAULT_PRECISION_BITS};
