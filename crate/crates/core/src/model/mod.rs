//! Shared vocabulary: signals, the first-difference operator, disjoint and
//! overlapping group structures, penalty and ADMM settings, objectives and
//! the reconstruction error metric.

mod config;
mod groups;
mod objective;
mod operator;
mod signal;

pub use config::{AdmmConfig, PenaltyConfig, UpdateOrder};
pub use groups::{build_latent_layout, build_partition, GroupPartition, LatentGroupLayout};
pub use objective::{
    data_fit, fusion_penalty, lgf_objective, mse, sgf_objective, sgf_split_objective,
};
pub use operator::{build_difference_operator, DifferenceOperator};
pub use signal::SignalVector;
