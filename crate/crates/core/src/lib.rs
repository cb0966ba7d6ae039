//! Coherent information of the Λ-system → photon-field quantum channel.
//!
//! The crate is layered bottom-up:
//!
//! * [`linalg`]: dense complex matrices, Hermitian eigensolver, entropy.
//! * [`channel`]: generic finite-dimensional channels in transfer-operator
//!   form, purification, entropy exchange and coherent information.
//! * [`lambda`]: the pulsed Raman excitation and spontaneous-emission model
//!   that produces the Λ channel.
//! * [`sweep`]: parameter grids, the figure presets and the optimiser.
//! * [`cli`]: configuration, report formatting and the command runners used
//!   by the `lambda-capacity` binary.

pub mod channel;
pub mod cli;
pub mod extended_real;
pub mod lambda;
pub mod linalg;
mod nelder_mead;
pub mod sweep;

pub use channel::{
    analyze, apply_channel, coherent_information, entropy_exchange, joint_output, purify,
    shannon_mutual_information, validate_channel, ChannelDiagnostics, ChannelError, ChannelMap,
    CoherentInfo, DensityMatrix, JointProbabilityTable, PurifiedState,
};
pub use lambda::{
    channel_map, closed_form_channel, decay_isometry, pulse_propagator, Isometry, LambdaError,
    LambdaParams,
};
pub use linalg::{entropy_bits, hermitian_eigensystem, kron, ComplexMatrix, LinalgError, Spectrum};
pub use sweep::{
    figure_preset, grid_sweep, maximize_ic, Axis, FigureId, FreeParam, InputState, Optimum, Param,
    SweepError, SweepResult, SweepSpec,
};
