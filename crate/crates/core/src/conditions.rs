//! Sufficient conditions for local-energy preserving dynamics.
//!
//! `dU_⊗/dt` vanishes for every state when
//!
//! 1. `[Ĥ_A + Ĥ_B, V] = 0` (with the effective Hamiltonians of the state), and
//! 2. `L_A^#[H] + L_B^#[H] = 0`.
//!
//! Condition 2 also forces `dU/dt = 0`, so a system meeting both conserves its
//! total energy: [`verify_theorem`] checks that by direct integration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, Generator, IntegrationSettings};
use crate::energetics::{decompose, effective_hamiltonians, LedgerEvaluator};
use crate::error::{validation, Error, Result};
use crate::mat::{commutator, ComplexMatrix};
use crate::model::BipartiteSystem;
use crate::random::random_product_state;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Drift bound used by [`verify_theorem`].
pub const CONSERVATION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `‖[Ĥ_A + Ĥ_B, V]‖_F`.
    pub commutator_residual: f64,
    /// `‖L_A^#[H] + L_B^#[H]‖_F`.
    pub adjoint_residual: f64,
    /// `false` when the commutator residual is a maximum over sampled states.
    pub state_dependent: bool,
    pub tol: f64,
    pub condition_i: bool,
    pub condition_ii: bool,
    /// Sampling metadata for the universal mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ConditionReport {
    pub fn both_hold(&self) -> bool {
        self.condition_i && self.condition_ii
    }
}

fn adjoint_residual(sys: &BipartiteSystem) -> f64 {
    Generator::new(sys)
        .adjoint(sys.total_hamiltonian(), None)
        .expect("H has the system dimension")
        .frobenius_norm()
}

fn commutator_residual(sys: &BipartiteSystem, rho: &ComplexMatrix) -> Result<f64> {
    let shape = sys.shape();
    let eff = effective_hamiltonians(sys, &decompose(rho, shape)?)?;
    Ok(commutator(&eff.local_sum(shape), sys.interaction())?.frobenius_norm())
}

/// Both residuals at the state `rho`.
pub fn check_conditions(sys: &BipartiteSystem, rho: &ComplexMatrix, tol: f64) -> Result<ConditionReport> {
    sys.shape().check(rho)?;
    let commutator_residual = commutator_residual(sys, rho)?;
    let adjoint_residual = adjoint_residual(sys);
    Ok(ConditionReport {
        commutator_residual,
        adjoint_residual,
        state_dependent: true,
        tol,
        condition_i: commutator_residual <= tol,
        condition_ii: adjoint_residual <= tol,
        samples: None,
        seed: None,
    })
}

/// Condition (i) as a maximum over `samples` random product states drawn from
/// a ChaCha8 stream seeded with `seed`. This samples, it does not prove, the
/// "every state" quantifier.
pub fn check_conditions_sampled(sys: &BipartiteSystem, samples: usize, seed: u64, tol: f64) -> Result<ConditionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let rho = random_product_state(sys.shape(), &mut rng);
        worst = worst.max(commutator_residual(sys, &rho)?);
    }
    let adjoint_residual = adjoint_residual(sys);
    Ok(ConditionReport {
        commutator_residual: worst,
        adjoint_residual,
        state_dependent: false,
        tol,
        condition_i: worst <= tol,
        condition_ii: adjoint_residual <= tol,
        samples: Some(samples),
        seed: Some(seed),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateDrift {
    /// `max_t |U(t) − U(0)|`.
    pub energy: f64,
    /// `max_t |U_⊗(t) − U_⊗(0)|`.
    pub local_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TheoremReport {
    /// The conditions failed at `state_index`; conservation is not implied.
    NotApplicable { state_index: usize, report: ConditionReport },
    Checked { drifts: Vec<StateDrift>, conserved: bool },
}

impl TheoremReport {
    pub fn conserved(&self) -> Option<bool> {
        match self {
            TheoremReport::NotApplicable { .. } => None,
            TheoremReport::Checked { conserved, .. } => Some(*conserved),
        }
    }
}

/// Integrates every state over `[0, horizon]` (step `dt`) and records the
/// largest drifts of `U` and `U_⊗`, provided both conditions hold at every
/// supplied state.
pub fn verify_theorem(sys: &BipartiteSystem, states: &[ComplexMatrix], dt: f64, horizon: f64) -> Result<TheoremReport> {
    for (state_index, rho) in states.iter().enumerate() {
        let report = check_conditions(sys, rho, DEFAULT_TOL)?;
        if !report.both_hold() {
            return Ok(TheoremReport::NotApplicable { state_index, report });
        }
    }
    let settings = IntegrationSettings::new(horizon, dt, 1)?;
    let evaluator = LedgerEvaluator::new(sys);
    let mut drifts = Vec::with_capacity(states.len());
    for rho in states {
        let traj = integrate(sys, rho, settings)?;
        let first = evaluator.ledger(&traj.states[0])?;
        let mut drift = StateDrift { energy: 0.0, local_energy: 0.0 };
        for state in &traj.states[1..] {
            let l = evaluator.ledger(state)?;
            drift.energy = drift.energy.max((l.u - first.u).abs());
            drift.local_energy = drift.local_energy.max((l.u_prod - first.u_prod).abs());
        }
        drifts.push(drift);
    }
    let conserved = drifts.iter().all(|d| d.energy <= CONSERVATION_TOL && d.local_energy <= CONSERVATION_TOL);
    Ok(TheoremReport::Checked { drifts, conserved })
}

/// Closed interval of correlation amplitudes `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CRange {
    pub min: f64,
    pub max: f64,
}

impl CRange {
    pub fn contains(&self, c: f64) -> bool {
        c >= self.min && c <= self.max
    }

    pub fn require(&self, c: f64) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::CorrelationOutOfRange { c, min: self.min, max: self.max })
        }
    }
}

/// Positivity range of `c` for `diag(p_A) ⊗ diag(p_B) + c σ_z ⊗ σ_z`, where
/// `p[0]` is the population of `|0⟩`.
pub fn c_range_from_populations(p_a: [f64; 2], p_b: [f64; 2]) -> CRange {
    CRange {
        min: -(p_a[0] * p_b[0]).min(p_a[1] * p_b[1]),
        max: (p_a[0] * p_b[1]).min(p_a[1] * p_b[0]),
    }
}

/// Gibbs populations `(p_0, p_1)` of `ωσ_z` at inverse temperature `β`.
pub fn qubit_populations(beta: f64, omega: f64) -> [f64; 2] {
    let x = beta * omega;
    [1.0 / (1.0 + (2.0 * x).exp()), 1.0 / (1.0 + (-2.0 * x).exp())]
}

/// Exact range of `c` keeping `π_A ⊗ π_B + c σ_z ⊗ σ_z` positive for
/// `H_{A,B} = ω_{A,B} σ_z`.
pub fn valid_c_range(beta_a: f64, omega_a: f64, beta_b: f64, omega_b: f64) -> Result<CRange> {
    for (name, x) in [("beta_A", beta_a), ("omega_A", omega_a), ("beta_B", beta_b), ("omega_B", omega_b)] {
        if !x.is_finite() || x < 0.0 {
            return Err(validation(format!("{name} must be finite and nonnegative, got {x}")));
        }
    }
    Ok(c_range_from_populations(qubit_populations(beta_a, omega_a), qubit_populations(beta_b, omega_b)))
}
