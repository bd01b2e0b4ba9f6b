//! Energy decomposition of a bipartite state.
//!
//! A state splits as `ρ = ρ_A ⊗ ρ_B + χ` with `Tr_A[χ] = Tr_B[χ] = 0`. The
//! state-dependent effective Hamiltonians
//!
//! ```text
//! Ĥ_A = H_A + Tr_B[V ρ_B] − α_A Tr[V ρ_A⊗ρ_B] I
//! Ĥ_B = H_B + Tr_A[V ρ_A] − α_B Tr[V ρ_A⊗ρ_B] I
//! V̂   = V − Tr_B[V ρ_B]⊗I − I⊗Tr_A[V ρ_A] + Tr[V ρ_A⊗ρ_B] I
//! ```
//!
//! satisfy `Ĥ_A ⊗ I + I ⊗ Ĥ_B + V̂ = H`, and the energy splits into
//! `U_A = Tr[ρ_A Ĥ_A]`, `U_B = Tr[ρ_B Ĥ_B]` and `U_χ = Tr[χV]`.
//!
//! The local energy changes at the rate
//!
//! ```text
//! dU_⊗/dt = −i Tr[[Ĥ_A + Ĥ_B, V] χ] + Tr[(L_A^#[H] + L_B^#[H]) ρ_A⊗ρ_B]
//! ```
//!
//! while the total energy changes at `Tr[(L_A^#[H] + L_B^#[H]) ρ]`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{Generator, Trajectory};
use crate::error::Result;
use crate::mat::{commutator, kron, partial_trace, BipartiteShape, ComplexMatrix, Subsystem, C64, I, ONE};
use crate::model::BipartiteSystem;

/// Imaginary parts of energies above this are reported as inconsistent.
pub const IMAG_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub rho_a: ComplexMatrix,
    pub rho_b: ComplexMatrix,
    pub chi: ComplexMatrix,
}

impl Decomposition {
    pub fn product(&self) -> ComplexMatrix {
        kron(&self.rho_a, &self.rho_b)
    }

    pub fn marginal(&self, side: Subsystem) -> &ComplexMatrix {
        match side {
            Subsystem::A => &self.rho_a,
            Subsystem::B => &self.rho_b,
        }
    }
}

/// Splits `rho` into its marginals and correlation operator.
pub fn decompose(rho: &ComplexMatrix, shape: BipartiteShape) -> Result<Decomposition> {
    let rho_a = partial_trace(rho, shape, Subsystem::A)?;
    let rho_b = partial_trace(rho, shape, Subsystem::B)?;
    let chi = rho - &kron(&rho_a, &rho_b);
    Ok(Decomposition { rho_a, rho_b, chi })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonians {
    pub h_a: ComplexMatrix,
    pub h_b: ComplexMatrix,
    pub v: ComplexMatrix,
}

impl EffectiveHamiltonians {
    /// `Ĥ_A ⊗ I + I ⊗ Ĥ_B`.
    pub fn local_sum(&self, shape: BipartiteShape) -> ComplexMatrix {
        let a = shape.embed(&self.h_a, Subsystem::A).expect("Ĥ_A has dimension d_A");
        let b = shape.embed(&self.h_b, Subsystem::B).expect("Ĥ_B has dimension d_B");
        &a + &b
    }
}

/// Mean-field operators `(Tr_B[V (I⊗ρ_B)], Tr_A[V (ρ_A⊗I)])` and `Tr[V ρ_A⊗ρ_B]`.
fn mean_fields(sys: &BipartiteSystem, dec: &Decomposition) -> Result<(ComplexMatrix, ComplexMatrix, f64)> {
    let shape = sys.shape();
    let v = sys.interaction();
    let on_a = partial_trace(&(v * &shape.embed(&dec.rho_b, Subsystem::B)?), shape, Subsystem::A)?.hermitian_part();
    let on_b = partial_trace(&(v * &shape.embed(&dec.rho_a, Subsystem::A)?), shape, Subsystem::B)?.hermitian_part();
    let product_interaction = real_part(v.trace_product(&dec.product()), "Tr[V ρ_A⊗ρ_B]");
    Ok((on_a, on_b, product_interaction))
}

pub fn effective_hamiltonians(sys: &BipartiteSystem, dec: &Decomposition) -> Result<EffectiveHamiltonians> {
    let shape = sys.shape();
    let (w_a, w_b, e) = mean_fields(sys, dec)?;
    let mut h_a = sys.h_a() + &w_a;
    h_a.add_scaled(C64::new(-sys.alpha_a() * e, 0.0), &ComplexMatrix::identity(shape.d_a));
    let mut h_b = sys.h_b() + &w_b;
    h_b.add_scaled(C64::new(-sys.alpha_b() * e, 0.0), &ComplexMatrix::identity(shape.d_b));
    let mut v = sys.interaction() - &shape.embed(&w_a, Subsystem::A)?;
    v.add_scaled(-ONE, &shape.embed(&w_b, Subsystem::B)?);
    v.add_scaled(C64::new(e, 0.0), &ComplexMatrix::identity(shape.total()));
    Ok(EffectiveHamiltonians { h_a, h_b, v })
}

fn real_part(z: C64, what: &str) -> f64 {
    if z.im.abs() > IMAG_GUARD {
        log::warn!("{what} has imaginary residue {:.3e}; expected a real value", z.im);
    }
    z.re
}

/// Energies and their instantaneous rates at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "U_A")]
    pub u_a: f64,
    #[serde(rename = "U_B")]
    pub u_b: f64,
    #[serde(rename = "U_prod")]
    pub u_prod: f64,
    #[serde(rename = "U_chi")]
    pub u_chi: f64,
    #[serde(rename = "dU_prod_dt")]
    pub du_prod_dt: f64,
    #[serde(rename = "dU_chi_dt")]
    pub du_chi_dt: f64,
    #[serde(rename = "dU_dt")]
    pub du_dt: f64,
}

/// Precomputed pieces for evaluating ledgers along a trajectory.
pub struct LedgerEvaluator<'a> {
    sys: &'a BipartiteSystem,
    /// `L_A^#[H] + L_B^#[H]`.
    adjoint_h: ComplexMatrix,
}

impl<'a> LedgerEvaluator<'a> {
    pub fn new(sys: &'a BipartiteSystem) -> Self {
        let adjoint_h = Generator::new(sys)
            .adjoint(sys.total_hamiltonian(), None)
            .expect("H has the system dimension");
        Self { sys, adjoint_h }
    }

    pub fn adjoint_of_hamiltonian(&self) -> &ComplexMatrix {
        &self.adjoint_h
    }

    pub fn ledger(&self, rho: &ComplexMatrix) -> Result<EnergyLedger> {
        let sys = self.sys;
        let shape = sys.shape();
        let h = sys.total_hamiltonian();
        let dec = decompose(rho, shape)?;
        let eff = effective_hamiltonians(sys, &dec)?;
        let product = dec.product();

        let u = real_part(rho.trace_product(h), "U");
        let u_a = real_part(dec.rho_a.trace_product(&eff.h_a), "U_A");
        let u_b = real_part(dec.rho_b.trace_product(&eff.h_b), "U_B");
        let u_prod = real_part(product.trace_product(h), "U_prod");
        let u_chi = real_part(dec.chi.trace_product(sys.interaction()), "U_chi");

        let comm = commutator(&eff.local_sum(shape), sys.interaction())?;
        let coherent = -I * comm.trace_product(&dec.chi);
        let dissipative = self.adjoint_h.trace_product(&product);
        let du_prod_dt = real_part(coherent + dissipative, "dU_prod/dt");
        let du_dt = real_part(self.adjoint_h.trace_product(rho), "dU/dt");

        Ok(EnergyLedger { u, u_a, u_b, u_prod, u_chi, du_prod_dt, du_chi_dt: du_dt - du_prod_dt, du_dt })
    }
}

/// Energy ledger of `rho` under `sys`.
pub fn energy_ledger(sys: &BipartiteSystem, rho: &ComplexMatrix) -> Result<EnergyLedger> {
    LedgerEvaluator::new(sys).ledger(rho)
}

/// Dissipative part of `dU_⊗/dt` written per side,
/// `Tr[L_A^#[H_A⊗I + V] ρ_A⊗ρ_B] + Tr[L_B^#[I⊗H_B + V] ρ_A⊗ρ_B]`.
///
/// Equals the full-`H` form because `L_A^#[I⊗H_B] = L_B^#[H_A⊗I] = 0`.
pub fn local_dissipative_rate(sys: &BipartiteSystem, rho: &ComplexMatrix) -> Result<f64> {
    let shape = sys.shape();
    let generator = Generator::new(sys);
    let product = decompose(rho, shape)?.product();
    let mut total = C64::new(0.0, 0.0);
    for side in [Subsystem::A, Subsystem::B] {
        let local_plus_v = &shape.embed(sys.local_hamiltonian(side), side)? + sys.interaction();
        total += generator.adjoint(&local_plus_v, Some(side))?.trace_product(&product);
    }
    Ok(real_part(total, "local dissipative rate"))
}

/// `ΔU_χ(t) = Tr[V (χ(t) − χ(0))]` for every record of `traj`.
pub fn delta_u_chi(traj: &Trajectory, sys: &BipartiteSystem) -> Result<Vec<f64>> {
    let shape = sys.shape();
    let mut out = Vec::with_capacity(traj.len());
    let mut chi0: Option<ComplexMatrix> = None;
    for rho in &traj.states {
        let chi = decompose(rho, shape)?.chi;
        let reference = chi0.get_or_insert_with(|| chi.clone());
        let delta = &chi - reference;
        out.push(real_part(sys.interaction().trace_product(&delta), "ΔU_χ"));
    }
    Ok(out)
}
