//! Electromagnetic analog: normal-incidence scattering from parity-symmetric
//! slabs and the PT-symmetric absorber/amplifier pair.
//!
//! Units `c = μ₀ = 1`. Waves on either side of a scatterer are written as
//! `A e^{ikx} + B e^{−ikx}`, and the transfer matrix maps the left amplitudes
//! `(A_L, B_L)` to the right amplitudes `(A_R, B_R)`.

pub mod double_barrier;
pub mod interface;
pub mod lineshape;
pub mod transfer;

pub use double_barrier::{
    double_barrier_transfer, interference_power, smatrix_eigensystem, transmission_sweep, DoubleBarrier,
    SEigensystem, SweepRow,
};
pub use interface::{box_reflection, cavity_modes, interface_reflection, MediumParams, Side};
pub use lineshape::{
    balanced_smatrix, exact_width, fit_lineshape, parity_at, resonance_predict, Parity, ResonanceFit,
};
pub use transfer::{
    params_from_transfer, physical_slab_transfer, shift, time_reverse, to_smatrix, transfer_from_params,
    ScatteringMatrix, SlabParams, TransferMatrix,
};
