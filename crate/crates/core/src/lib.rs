//! Simulation and energy bookkeeping for interacting bipartite open quantum
//! systems driven by local GKLS dissipators.
//!
//! The total energy `U = Tr[ρH]` of a state `ρ = ρ_A ⊗ ρ_B + χ` splits into
//! local energies `U_A + U_B = Tr[(ρ_A ⊗ ρ_B) H]` and a correlation energy
//! `U_χ = Tr[χV]`. The crate provides
//!
//! * [`mat`]: dense complex linear algebra (Kronecker products, partial traces,
//!   Jacobi eigensolver),
//! * [`model`]: system description and detailed-balance thermal baths,
//! * [`dynamics`]: the GKLS generator, its adjoint, an RK4 integrator and a
//!   null-space steady-state solver,
//! * [`energetics`]: the state decomposition, effective Hamiltonians and the
//!   energy ledger with instantaneous rates,
//! * [`conditions`]: checks of the two sufficient conditions for local-energy
//!   preserving dynamics and the conservation test that follows from them,
//! * [`qubit_example`]: the two-qubit thermalizing scenario and its closed form.

#![allow(clippy::needless_range_loop)]

pub mod conditions;
pub mod dynamics;
pub mod energetics;
pub mod error;
pub mod mat;
pub mod model;
pub mod qubit_example;
pub mod random;

pub use error::{Error, Result};
pub use mat::{BipartiteShape, ComplexMatrix, Subsystem, C64};
pub use model::{BipartiteSystem, JumpChannel, ThermalBathSpec};
