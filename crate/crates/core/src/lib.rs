//! Linear-optical multiport simulation on sparse photon-number states.
//!
//! The crate builds the single-particle transfer matrices of passive
//! networks ([`multiport`]), evolves multimode Fock and truncated coherent
//! inputs through them ([`evolve`]), and conditions the result on photon
//! counts ([`measure`]) to prepare and characterize two-mode `|N,0> + |0,N>`
//! states. [`identity`] carries the scalar product identity behind the
//! vanishing cross terms of the postselected multiport output.
//!
//! Everything here is `no_std` + `alloc`; IO, configuration and the CLI live
//! in the companion `noonsim` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![deny(missing_debug_implementations)]

extern crate alloc;

pub mod error;
pub mod evolve;
pub mod fock;
pub mod identity;
mod math;
pub mod measure;
pub mod multiport;

pub use error::{Error, Result};
pub use evolve::{evolve, evolve_mzi, mzi_network, TERM_LIMIT};
pub use fock::{
    inner_product, make_input, number_distribution, FockState, InputSpec, Occupation, Source,
    AMPLITUDE_EPSILON, DEFAULT_TAIL_EPSILON,
};
pub use identity::{
    check_identity, circulant_determinant, product_lhs, product_rhs, IdentityCheck,
};
pub use measure::{
    condition_counts, fringe_point, fringe_scan, nonresolving_n3_coincidence, noon_fidelity,
    parity_expectation, phase_uncertainty, postselect_total, project_vacuum, stirling_scaling,
    success_probability_exact, NoonReport, PostselectionResult, ScanResult, ScanRow,
    StirlingScaling, UncertaintyPoint,
};
pub use multiport::{
    beamsplitter, canonical_multiport, compose, embedded_final_bs, free_phase_8port, phase_shifter,
    Element, ModeUnitary, NetworkTransfer, UNITARITY_TOLERANCE,
};

pub use num_complex::Complex64;
