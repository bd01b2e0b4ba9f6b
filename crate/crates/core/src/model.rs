//! Bipartite system description and thermal (detailed-balance) dissipators.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::mat::{
    check_dim, hermitian_eig, kron, partial_trace, BipartiteShape, ComplexMatrix, Subsystem, HERMITIAN_TOL,
};

/// Minimum gap between consecutive local eigenvalues for a thermal jump set.
pub const DEGENERACY_GAP: f64 = 1e-9;

const LOCALITY_TOL: f64 = 1e-12;

/// One jump operator `L` with rate `γ`, produced by the bath on `bath`.
///
/// `operator` acts on the full space (`L ⊗ I` or `I ⊗ L`).
#[derive(Debug, Clone, PartialEq)]
pub struct JumpChannel {
    pub operator: ComplexMatrix,
    pub rate: f64,
    pub bath: Subsystem,
    pub label: String,
}

impl JumpChannel {
    pub fn new(operator: ComplexMatrix, rate: f64, bath: Subsystem, label: impl Into<String>) -> Result<Self> {
        if !rate.is_finite() || rate < 0.0 {
            return Err(validation(format!("jump rate must be finite and nonnegative, got {rate}")));
        }
        Ok(Self { operator, rate, bath, label: label.into() })
    }

    /// Embeds a local jump operator on `bath` into the full space.
    pub fn local(
        shape: BipartiteShape,
        local_op: &ComplexMatrix,
        rate: f64,
        bath: Subsystem,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::new(shape.embed(local_op, bath)?, rate, bath, label)
    }

    /// Recovers the local operator from the embedded one.
    pub fn local_operator(&self, shape: BipartiteShape) -> Result<ComplexMatrix> {
        let other = shape.local(self.bath.other()) as f64;
        Ok(partial_trace(&self.operator, shape, self.bath)?.scale_real(1.0 / other))
    }
}

/// An interacting bipartite system with time-independent `H = H_A + H_B + V`.
///
/// Immutable once built; the total Hamiltonian is assembled at construction.
#[derive(Debug, Clone)]
pub struct BipartiteSystem {
    shape: BipartiteShape,
    h_a: ComplexMatrix,
    h_b: ComplexMatrix,
    v: ComplexMatrix,
    channels: Vec<JumpChannel>,
    alpha_a: f64,
    h_total: ComplexMatrix,
}

impl BipartiteSystem {
    pub fn new(
        shape: BipartiteShape,
        h_a: ComplexMatrix,
        h_b: ComplexMatrix,
        v: ComplexMatrix,
        channels: Vec<JumpChannel>,
    ) -> Result<Self> {
        check_dim(shape.d_a, h_a.dim())?;
        check_dim(shape.d_b, h_b.dim())?;
        shape.check(&v)?;
        for (name, m) in [("H_A", &h_a), ("H_B", &h_b), ("V", &v)] {
            let residual = m.hermiticity_residual();
            if residual > HERMITIAN_TOL {
                log::debug!("{name} fails the Hermiticity check");
                return Err(Error::NotHermitian { residual });
            }
        }
        for ch in &channels {
            shape.check(&ch.operator)?;
            let local = ch.local_operator(shape)?;
            let residual = (&shape.embed(&local, ch.bath)? - &ch.operator).max_abs();
            if residual > LOCALITY_TOL {
                return Err(validation(format!(
                    "channel '{}' is not local to subsystem {} (residual {residual:.3e})",
                    ch.label, ch.bath
                )));
            }
        }
        let h_total = &(&shape.embed(&h_a, Subsystem::A)? + &shape.embed(&h_b, Subsystem::B)?) + &v;
        Ok(Self { shape, h_a, h_b, v, channels, alpha_a: 0.5, h_total })
    }

    /// Sets the split `α_A` (with `α_B = 1 − α_A`) of the product-energy shift.
    pub fn with_alpha_a(mut self, alpha_a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_a) {
            return Err(validation(format!("alpha_A must lie in [0, 1], got {alpha_a}")));
        }
        self.alpha_a = alpha_a;
        Ok(self)
    }

    pub fn with_channels(self, channels: Vec<JumpChannel>) -> Result<Self> {
        let alpha_a = self.alpha_a;
        Self::new(self.shape, self.h_a, self.h_b, self.v, channels)?.with_alpha_a(alpha_a)
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    pub fn h_a(&self) -> &ComplexMatrix {
        &self.h_a
    }

    pub fn h_b(&self) -> &ComplexMatrix {
        &self.h_b
    }

    pub fn local_hamiltonian(&self, side: Subsystem) -> &ComplexMatrix {
        match side {
            Subsystem::A => &self.h_a,
            Subsystem::B => &self.h_b,
        }
    }

    pub fn interaction(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn channels(&self) -> &[JumpChannel] {
        &self.channels
    }

    pub fn alpha_a(&self) -> f64 {
        self.alpha_a
    }

    pub fn alpha_b(&self) -> f64 {
        1.0 - self.alpha_a
    }

    /// `H_A ⊗ I + I ⊗ H_B + V`.
    pub fn total_hamiltonian(&self) -> &ComplexMatrix {
        &self.h_total
    }
}

/// Free rate of one transition `from → to` between ascending-ordered local
/// eigenlevels; the reverse rate is derived from detailed balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRate {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// A heat bath at inverse temperature `beta` (`k_B = 1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalBathSpec {
    pub beta: f64,
    pub base_rates: Vec<LevelRate>,
}

impl ThermalBathSpec {
    pub fn validate(&self, levels: usize) -> Result<()> {
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(validation(format!("beta must be finite and nonnegative, got {}", self.beta)));
        }
        let mut seen = std::collections::BTreeSet::new();
        for r in &self.base_rates {
            if !r.rate.is_finite() || r.rate < 0.0 {
                return Err(validation(format!(
                    "base rate {}->{} must be finite and nonnegative, got {}",
                    r.from, r.to, r.rate
                )));
            }
            if r.from == r.to {
                return Err(validation(format!("base rate {}->{} connects a level to itself", r.from, r.to)));
            }
            if r.from >= levels || r.to >= levels {
                return Err(validation(format!(
                    "base rate {}->{} references a level outside 0..{levels}",
                    r.from, r.to
                )));
            }
            if !seen.insert((r.from.min(r.to), r.from.max(r.to))) {
                return Err(validation(format!(
                    "level pair {{{}, {}}} given more than once; supply one direction only",
                    r.from, r.to
                )));
            }
        }
        Ok(())
    }
}

fn check_nondegenerate(values: &[f64]) -> Result<()> {
    for w in values.windows(2) {
        let gap = w[1] - w[0];
        if gap < DEGENERACY_GAP {
            return Err(Error::DegenerateSpectrum { gap, threshold: DEGENERACY_GAP });
        }
    }
    Ok(())
}

/// Thermal jump set for one side: every base rate `γ` for `n → m` yields
/// `|m⟩⟨n|` at rate `γ` and `|n⟩⟨m|` at `γ·e^{−β(E_n − E_m)}`.
///
/// Levels are the eigenvectors of `h_local` in ascending energy order.
pub fn build_thermal_channels(
    h_local: &ComplexMatrix,
    bath: &ThermalBathSpec,
    side: Subsystem,
    shape: BipartiteShape,
) -> Result<Vec<JumpChannel>> {
    check_dim(shape.local(side), h_local.dim())?;
    bath.validate(h_local.dim())?;
    let eig = hermitian_eig(h_local)?;
    check_nondegenerate(&eig.values)?;

    let mut channels = Vec::with_capacity(2 * bath.base_rates.len());
    for r in &bath.base_rates {
        let (n, m) = (r.from, r.to);
        let forward = eig.transition(m, n);
        let backward = eig.transition(n, m);
        let reverse_rate = r.rate * (-bath.beta * (eig.values[n] - eig.values[m])).exp();
        channels.push(JumpChannel::local(shape, &forward, r.rate, side, format!("{side}:{m}<-{n}"))?);
        channels.push(JumpChannel::local(shape, &backward, reverse_rate, side, format!("{side}:{n}<-{m}"))?);
    }
    Ok(channels)
}

/// Largest violation `|γ_mn − γ_nm e^{−β(E_m − E_n)}|` among the channels on
/// `side`, each of which must be an eigenbasis transition `|m⟩⟨n|` of `h_local`
/// (up to a phase).
pub fn detailed_balance_residual(
    channels: &[JumpChannel],
    side: Subsystem,
    h_local: &ComplexMatrix,
    beta: f64,
    shape: BipartiteShape,
) -> Result<f64> {
    check_dim(shape.local(side), h_local.dim())?;
    let eig = hermitian_eig(h_local)?;
    let d = h_local.dim();
    let u = &eig.vectors;
    let mut rates = vec![vec![0.0; d]; d];
    for ch in channels.iter().filter(|c| c.bath == side) {
        let local = ch.local_operator(shape)?;
        let in_eigenbasis = &(&u.dagger() * &local) * u;
        let mut hit = None;
        for m in 0..d {
            for n in 0..d {
                let z = in_eigenbasis[(m, n)].norm();
                if z > 1e-9 {
                    if hit.is_some() || (z - 1.0).abs() > 1e-9 || m == n {
                        return Err(validation(format!(
                            "channel '{}' is not a single eigenlevel transition",
                            ch.label
                        )));
                    }
                    hit = Some((m, n));
                }
            }
        }
        if let Some((m, n)) = hit {
            rates[m][n] += ch.rate;
        }
    }
    let mut worst: f64 = 0.0;
    for m in 0..d {
        for n in 0..d {
            if m != n {
                let expected = rates[n][m] * (-beta * (eig.values[m] - eig.values[n])).exp();
                worst = worst.max((rates[m][n] - expected).abs());
            }
        }
    }
    Ok(worst)
}

/// `e^{−βH} / Tr[e^{−βH}]`.
pub fn gibbs_state(h: &ComplexMatrix, beta: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    let ground = eig.values[0];
    let z: f64 = eig.values.iter().map(|&e| (-beta * (e - ground)).exp()).sum();
    Ok(eig.map_spectrum(|e| (-beta * (e - ground)).exp() / z).hermitian_part())
}

/// `π_A ⊗ π_B` for two local Gibbs states.
pub fn product_gibbs_state(sys: &BipartiteSystem, beta_a: f64, beta_b: f64) -> Result<ComplexMatrix> {
    Ok(kron(&gibbs_state(sys.h_a(), beta_a)?, &gibbs_state(sys.h_b(), beta_b)?))
}
