//! Coherence dispersion `Δc` of finite-dimensional quantum states: the
//! spread of the absolute values of a density matrix's off-diagonal
//! entries, its maximizing states, its closed-form multi-copy scaling, and
//! its behaviour on partially coherent Gibbs states of `d`-level ladders.
//!
//! The [`scan`] module sweeps the thermal model over coherent-site counts,
//! coherence levels and ladder sizes and reports the window of temperatures
//! at which the dispersion peaks.

pub mod density;
pub mod error;
pub mod hyperbolic;
pub mod logscalar;
pub mod maximal;
pub mod multicopy;
pub mod optimize;
pub mod scan;
pub mod thermal;

pub use density::{CoherenceStats, DensityMatrix, PsdCheck, PureState, Tolerances, C64};
pub use error::{Error, Result};
pub use logscalar::LogScalar;
pub use maximal::{dispersion_at_rank, optimal_rank, OptimalRankResult};
pub use multicopy::SingleCopySummary;
pub use thermal::{find_tau_star, DispersionModel, TauStarResult, ThermalParams};
