//! Quantum propagator of a harmonic oscillator with a time-dependent frequency.
//!
//! The pipeline runs in one direction:
//!
//! 1. [`profiles`] describes `ω(t)`.
//! 2. [`amplitude`] integrates the amplitude equation `Ä + 2iωȦ + iω̇A = 0`
//!    and yields the mode `f = A·e^{i∫ω}`.
//! 3. [`structure`] turns the mode into the classical basis `u, v` and the action.
//! 4. [`propagator`] evaluates `⟨q,t|q0,t0⟩`.
//! 5. [`evolution`] applies it to wavefunctions and compares against a
//!    Crank–Nicolson solution of the Schrödinger equation.
//!
//! [`ermakov`] is an independent check through the amplitude–phase form `S·e^{iγ}`.
//!
//! ```
//! use tdho::prelude::*;
//!
//! let profile = FrequencyProfile::constant(1.0, 0.0, 2.0)?;
//! let traj = solve_amplitude(&profile, 0.0, 2.0, InitialAmplitude::default(), Tolerance::default())?;
//! let sf = StructureFunctions::build(traj, 1.0, 1.0)?;
//! let k = kernel(&sf, 0.3, -0.2, 1.0)?;
//! let exact = mehler_kernel(1.0, 1.0, 1.0, 0.3, -0.2, 1.0)?;
//! assert!((k.value - exact).norm() < 1e-10 * exact.norm());
//! # Ok::<(), tdho::Error>(())
//! ```
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitude;
pub mod catalog;
pub mod ermakov;
pub mod error;
pub mod evolution;
pub mod integrator;
pub mod profiles;
pub mod propagator;
pub mod structure;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// The types and functions most programs need.
pub mod prelude {
    pub use crate::amplitude::{classical_oracle, solve_amplitude, AmplitudeTrajectory, InitialAmplitude};
    pub use crate::ermakov::ErmakovSolution;
    pub use crate::error::{Error, Result};
    pub use crate::evolution::{
        apply_kernel, apply_kernel_onto, crank_nicolson_checkpoints, crank_nicolson_evolve, fidelity, gaussian_state,
        l2_error, GridSpec, WavefunctionGrid,
    };
    pub use crate::integrator::Tolerance;
    pub use crate::profiles::{FrequencyProfile, ProfileKind, Side};
    pub use crate::propagator::{
        delta_family_check, kernel, maslov_index, mehler_kernel, DeltaFamilySpec, PropagatorSample,
    };
    pub use crate::structure::StructureFunctions;
    pub use num_complex::Complex64;
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/profiles.md")]
    mod profiles {}
    #[doc = include_str!("../../../book/src/amplitude.md")]
    mod amplitude {}
    #[doc = include_str!("../../../book/src/structure.md")]
    mod structure {}
    #[doc = include_str!("../../../book/src/propagator.md")]
    mod propagator {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/ermakov.md")]
    mod ermakov {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
