//! JSON scenario files.
//!
//! Matrices are flat row-major arrays of `[re, im]` pairs. Besides the thermal
//! `baths`, explicit local `channels` may be listed, and `V` may be given as
//! `{"preset": "zz", "g": ...}` for two qubits.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use corrflux::conditions::c_range_from_populations;
use corrflux::dynamics::IntegrationSettings;
use corrflux::mat::{BipartiteShape, ComplexMatrix, Subsystem, C64};
use corrflux::model::{build_thermal_channels, gibbs_state, BipartiteSystem, JumpChannel, LevelRate, ThermalBathSpec};
use corrflux::qubit_example::zz;
use serde::{Deserialize, Serialize};

pub type MatrixSpec = Vec<[f64; 2]>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    #[serde(rename = "dA")]
    pub d_a: usize,
    #[serde(rename = "dB")]
    pub d_b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InteractionSpec {
    Matrix(MatrixSpec),
    Preset { preset: String, g: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialStateSpec {
    Matrix(MatrixSpec),
    Preset { preset: String, c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathEntry {
    pub side: Subsystem,
    pub beta: f64,
    pub base_rates: Vec<LevelRate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelEntry {
    pub side: Subsystem,
    pub operator: MatrixSpec,
    pub rate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub shape: ShapeSpec,
    #[serde(rename = "H_A")]
    pub h_a: MatrixSpec,
    #[serde(rename = "H_B")]
    pub h_b: MatrixSpec,
    #[serde(rename = "V")]
    pub v: InteractionSpec,
    #[serde(rename = "alpha_A", default, skip_serializing_if = "Option::is_none")]
    pub alpha_a: Option<f64>,
    #[serde(default)]
    pub baths: Vec<BathEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub channels: Vec<ChannelEntry>,
    pub initial_state: InitialStateSpec,
    pub integration: IntegrationSettings,
}

/// A scenario turned into a system, an initial state and integration settings.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub sys: BipartiteSystem,
    pub rho0: ComplexMatrix,
    pub settings: IntegrationSettings,
}

pub fn parse_value(text: &str, origin: &str) -> Result<serde_json::Value> {
    serde_json::from_str(text).map_err(|e| anyhow!("{origin}: line {} column {}: {e}", e.line(), e.column()))
}

pub fn from_value(value: serde_json::Value, origin: &str) -> Result<Scenario> {
    serde_json::from_value(value).map_err(|e| anyhow!("{origin}: {e}"))
}

pub fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let origin = path.display().to_string();
    serde_json::from_str(&text).map_err(|e| anyhow!("{origin}: line {} column {}: {e}", e.line(), e.column()))
}

fn matrix(spec: &MatrixSpec, dim: usize, field: &str) -> Result<ComplexMatrix> {
    if spec.len() != dim * dim {
        bail!("{field}: expected {} entries for a {dim}x{dim} matrix, found {}", dim * dim, spec.len());
    }
    let data = spec.iter().map(|&[re, im]| C64::new(re, im)).collect();
    ComplexMatrix::new(dim, data).with_context(|| field.to_string())
}

fn is_diagonal(m: &ComplexMatrix) -> bool {
    m.off_diagonal_norm() == 0.0
}

impl Scenario {
    pub fn prepare(&self) -> Result<Prepared> {
        let shape = BipartiteShape::new(self.shape.d_a, self.shape.d_b).context("shape")?;
        let h_a = matrix(&self.h_a, shape.d_a, "H_A")?;
        let h_b = matrix(&self.h_b, shape.d_b, "H_B")?;
        let v = match &self.v {
            InteractionSpec::Matrix(m) => matrix(m, shape.total(), "V")?,
            InteractionSpec::Preset { preset, g } => {
                if preset != "zz" {
                    bail!("V: unknown preset {preset:?}");
                }
                if (shape.d_a, shape.d_b) != (2, 2) {
                    bail!("V: preset \"zz\" needs two qubits");
                }
                zz().scale_real(*g)
            }
        };

        let mut channels = Vec::new();
        for (k, bath) in self.baths.iter().enumerate() {
            let h = if bath.side == Subsystem::A { &h_a } else { &h_b };
            let spec = ThermalBathSpec { beta: bath.beta, base_rates: bath.base_rates.clone() };
            channels.extend(build_thermal_channels(h, &spec, bath.side, shape).with_context(|| format!("baths[{k}]"))?);
        }
        for (k, ch) in self.channels.iter().enumerate() {
            let op = matrix(&ch.operator, shape.local(ch.side), &format!("channels[{k}].operator"))?;
            let label = ch.label.clone().unwrap_or_else(|| format!("{}:ch{k}", ch.side));
            channels.push(JumpChannel::local(shape, &op, ch.rate, ch.side, label).with_context(|| format!("channels[{k}]"))?);
        }

        let rho0 = match &self.initial_state {
            InitialStateSpec::Matrix(m) => matrix(m, shape.total(), "initial_state")?,
            InitialStateSpec::Preset { preset, c } => self.thermal_plus_zz(preset, *c, shape, &h_a, &h_b)?,
        };

        let mut sys = BipartiteSystem::new(shape, h_a, h_b, v, channels)?;
        if let Some(alpha) = self.alpha_a {
            sys = sys.with_alpha_a(alpha).context("alpha_A")?;
        }
        self.integration.validate().context("integration")?;
        Ok(Prepared { sys, rho0, settings: self.integration })
    }

    fn bath_beta(&self, side: Subsystem) -> Result<f64> {
        let mut betas = self.baths.iter().filter(|b| b.side == side).map(|b| b.beta);
        let beta = betas.next().ok_or_else(|| anyhow!("initial_state: preset needs a bath on side {side}"))?;
        if betas.any(|b| b != beta) {
            bail!("initial_state: baths on side {side} disagree on beta");
        }
        Ok(beta)
    }

    fn thermal_plus_zz(
        &self,
        preset: &str,
        c: f64,
        shape: BipartiteShape,
        h_a: &ComplexMatrix,
        h_b: &ComplexMatrix,
    ) -> Result<ComplexMatrix> {
        if preset != "thermal_plus_zz" {
            bail!("initial_state: unknown preset {preset:?}");
        }
        if (shape.d_a, shape.d_b) != (2, 2) || !is_diagonal(h_a) || !is_diagonal(h_b) {
            bail!("initial_state: preset \"thermal_plus_zz\" needs two qubits with diagonal H_A and H_B");
        }
        let pi_a = gibbs_state(h_a, self.bath_beta(Subsystem::A)?)?;
        let pi_b = gibbs_state(h_b, self.bath_beta(Subsystem::B)?)?;
        let populations = |m: &ComplexMatrix| [m[(0, 0)].re, m[(1, 1)].re];
        c_range_from_populations(populations(&pi_a), populations(&pi_b)).require(c).context("initial_state.c")?;
        Ok(&corrflux::mat::kron(&pi_a, &pi_b) + &zz().scale_real(c))
    }
}

/// Resolves a sweep parameter to a JSON pointer; `c` and `g` are shorthands.
pub fn parameter_pointer(param: &str) -> Result<String> {
    match param {
        "c" => Ok("/initial_state/c".into()),
        "g" => Ok("/V/g".into()),
        p if p.starts_with('/') => Ok(p.into()),
        p => bail!("unknown parameter {p:?}: use c, g or a JSON pointer such as /integration/dt"),
    }
}

/// Sets the scalar at `pointer`, which must already hold a number.
pub fn set_parameter(value: &mut serde_json::Value, pointer: &str, x: f64) -> Result<()> {
    let slot = value.pointer_mut(pointer).ok_or_else(|| anyhow!("unknown parameter path {pointer}"))?;
    if !slot.is_number() {
        bail!("parameter path {pointer} does not hold a number");
    }
    *slot = serde_json::Value::from(x);
    Ok(())
}
