//! `(alpha, beta, gamma)` weighted Wigner-Yanase-Dyson skew information and the
//! sum uncertainty bounds built on it, for observables and quantum channels.

pub mod audit;
pub mod chan_bounds;
pub mod error;
pub mod example1;
pub mod io;
pub mod matcore;
pub mod modelzoo;
pub mod obs_bounds;
pub mod skew;

pub use chan_bounds::{
    channel_bounds, covariance_matrix, lb_thm15, optimize_assignment, Assignment, ChannelBoundEntry,
    ChannelBoundReport, ChannelProblem, ChannelTheorem, KrausChannel, SearchConfig, SearchOutcome, SearchStrategy,
};
pub use error::{Result, SkewError};
pub use io::MatrixFile;
pub use matcore::{commutator, herm_eig, hs_norm_sq, mat_pow, ComplexMatrix, DensityMatrix, Spectrum};
pub use modelzoo::{pauli, qubit_from_bloch, standard_channel, BlochVector, ChannelKind, RandomKind, RandomSpec};
pub use obs_bounds::{best_bounds, BoundReport, BoundTarget, ObservableSet, Sign};
pub use skew::{channel_skew, mwwyd_skew, wwyd_skew, wy_skew, SkewContext, SkewParams, SkewValue};
