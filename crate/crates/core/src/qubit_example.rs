//! Two thermalizing qubits coupled by `V = g σ_z ⊗ σ_z`.
//!
//! Each qubit has `H = ω σ_z` and its own bath with decay `|1⟩⟨0|` at rate
//! `e^{βω}` and excitation `|0⟩⟨1|` at rate `e^{−βω}` (`|0⟩` is the `+ω`
//! level). Starting from `π_A ⊗ π_B + c σ_z ⊗ σ_z`, the marginals stay
//! thermal while the correlation decays as `χ(t) = e^{−λt} χ(0)` with
//! `λ` the sum of all four rates, so `ΔU_χ(t) = 4gc(e^{−λt} − 1)`.

use serde::{Deserialize, Serialize};

use crate::conditions::valid_c_range;
use crate::error::{validation, Result};
use crate::mat::{kron, sigma_z, BipartiteShape, ComplexMatrix, Subsystem};
use crate::model::{gibbs_state, BipartiteSystem, JumpChannel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleParams {
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub beta_a: f64,
    pub beta_b: f64,
    pub c: f64,
}

impl Default for ExampleParams {
    fn default() -> Self {
        Self { omega_a: 1.0, omega_b: 1.0, g: 0.2, beta_a: 0.5, beta_b: 1.0, c: 0.02 }
    }
}

impl ExampleParams {
    pub fn validate(&self) -> Result<()> {
        if !self.g.is_finite() || !self.c.is_finite() {
            return Err(validation("g and c must be finite"));
        }
        valid_c_range(self.beta_a, self.omega_a, self.beta_b, self.omega_b)?.require(self.c)
    }
}

/// Jump rates of the two baths; `down` is `|1⟩⟨0|`, `up` is `|0⟩⟨1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleRates {
    pub a_down: f64,
    pub a_up: f64,
    pub b_down: f64,
    pub b_up: f64,
}

impl ExampleRates {
    pub fn of(p: &ExampleParams) -> Self {
        Self {
            a_down: (p.beta_a * p.omega_a).exp(),
            a_up: (-p.beta_a * p.omega_a).exp(),
            b_down: (p.beta_b * p.omega_b).exp(),
            b_up: (-p.beta_b * p.omega_b).exp(),
        }
    }

    /// Correlation decay rate `λ`.
    pub fn lambda(&self) -> f64 {
        self.a_down + self.a_up + self.b_down + self.b_up
    }
}

pub fn zz() -> ComplexMatrix {
    kron(&sigma_z(), &sigma_z())
}

/// The example system and its correlated initial state.
pub fn build_example(p: &ExampleParams) -> Result<(BipartiteSystem, ComplexMatrix)> {
    p.validate()?;
    let shape = BipartiteShape::new(2, 2)?;
    let rates = ExampleRates::of(p);
    let down = ComplexMatrix::basis_op(2, 1, 0);
    let up = ComplexMatrix::basis_op(2, 0, 1);
    let channels = vec![
        JumpChannel::local(shape, &down, rates.a_down, Subsystem::A, "A:1<-0")?,
        JumpChannel::local(shape, &up, rates.a_up, Subsystem::A, "A:0<-1")?,
        JumpChannel::local(shape, &down, rates.b_down, Subsystem::B, "B:1<-0")?,
        JumpChannel::local(shape, &up, rates.b_up, Subsystem::B, "B:0<-1")?,
    ];
    let h_a = sigma_z().scale_real(p.omega_a);
    let h_b = sigma_z().scale_real(p.omega_b);
    let pi = kron(&gibbs_state(&h_a, p.beta_a)?, &gibbs_state(&h_b, p.beta_b)?);
    let sys = BipartiteSystem::new(shape, h_a, h_b, zz().scale_real(p.g), channels)?;
    let rho0 = &pi + &zz().scale_real(p.c);
    Ok((sys, rho0))
}

/// `χ(t) = e^{−λt} c σ_z ⊗ σ_z`.
pub fn analytic_chi(p: &ExampleParams, t: f64) -> ComplexMatrix {
    let lambda = ExampleRates::of(p).lambda();
    zz().scale_real(p.c * (-lambda * t).exp())
}

/// `ΔU_χ(t) = 4gc(e^{−λt} − 1)`.
pub fn analytic_delta_u_chi(p: &ExampleParams, t: f64) -> f64 {
    let lambda = ExampleRates::of(p).lambda();
    4.0 * p.g * p.c * ((-lambda * t).exp() - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exchange {
    /// Energy flows into the baths.
    Releases,
    /// Energy flows out of the baths.
    Absorbs,
    None,
}

/// Direction of the energy exchanged while the correlation decays.
pub fn sign_of_exchange(p: &ExampleParams) -> Exchange {
    let gc = p.g * p.c;
    if gc > 0.0 {
        Exchange::Releases
    } else if gc < 0.0 {
        Exchange::Absorbs
    } else {
        Exchange::None
    }
}
