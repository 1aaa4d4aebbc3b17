//! Inner and outer bounds on the rate regions of relay channels with
//! confidential messages, for discrete memoryless and Gaussian channels, plus a
//! desk-scale simulator of the block-Markov superposition and binning code.
//!
//! Rates are in bits per channel use throughout.

pub mod channel;
pub mod error;
pub mod gaussian;
pub mod info;
pub mod io;
pub mod regions;
pub mod sim;
pub mod var;

pub use channel::{classify, conditional_marginal, validate_channel, ChannelClass, ClassTag, GaussianRelayParams, RelayChannelDMC};
pub use error::{Error, Result};
pub use info::{build_joint, build_joint_p2, build_joint_stoch, check_markov, delta_gap, mutual_info, zeta, AuxInput, AuxInputP2, AuxInputStoch, JointDist};
pub use regions::{evaluate_bounds, scalarize_max, trace_region, Aux, Encoder, Family, OptBudget, RatePoint, RateRegion, Slice};
pub use var::Var;
