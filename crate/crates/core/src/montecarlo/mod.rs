//! Monte-Carlo and exact-enumeration oracles for the spatial mean.

mod ensemble;
mod enumeration;
pub mod stream;
mod sweep;

pub use ensemble::{
    empirical_tail_frequency, empty_mask_probability, simulate_epoch_ensemble, EnsembleResult,
    MAX_EMPTY_PROBABILITY,
};
pub use enumeration::{
    exact_enumeration_epoch, exact_enumeration_field, exact_moment_enumeration,
    EPOCH_ENUMERATION_CAP, FIELD_ENUMERATION_CAP, MOMENT_ENUMERATION_CAP,
};
pub use sweep::{
    cell_seed, relative_error_sweep, subset_indices, SweepCell, SweepConfig, SweepGrid, CSV_HEADER,
    ERROR_THRESHOLD,
};
