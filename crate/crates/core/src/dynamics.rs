//! GKLS generator, its Hilbert–Schmidt adjoint, RK4 integration, and steady
//! states from the null space of the vectorized generator.

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::mat::{min_eigenvalue, right_singular, ComplexMatrix, Subsystem, C64, I, ONE};
use crate::model::BipartiteSystem;

/// Tolerance for accepting an initial state.
pub const STATE_TOL: f64 = 1e-10;

/// Trace drift or negativity beyond this flags a trajectory.
pub const BREACH_TOL: f64 = 1e-6;

/// Second-smallest singular value of the superoperator below this means the
/// kernel is not one-dimensional.
pub const KERNEL_GAP: f64 = 1e-8;

struct Term {
    bath: Subsystem,
    rate: f64,
    l: ComplexMatrix,
    l_dag: ComplexMatrix,
    l_dag_l: ComplexMatrix,
}

/// Precomputed right-hand side `ρ ↦ −i[H, ρ] + Σ γ (LρL† − ½{L†L, ρ})`.
pub struct Generator {
    dim: usize,
    h: ComplexMatrix,
    terms: Vec<Term>,
}

impl Generator {
    pub fn new(sys: &BipartiteSystem) -> Self {
        let terms = sys
            .channels()
            .iter()
            .filter(|ch| ch.rate > 0.0)
            .map(|ch| {
                let l_dag = ch.operator.dagger();
                let l_dag_l = &l_dag * &ch.operator;
                Term { bath: ch.bath, rate: ch.rate, l: ch.operator.clone(), l_dag, l_dag_l }
            })
            .collect();
        Self { dim: sys.shape().total(), h: sys.total_hamiltonian().clone(), terms }
    }

    fn check(&self, m: &ComplexMatrix) -> Result<()> {
        crate::mat::check_dim(self.dim, m.dim())
    }

    /// Full generator applied to `rho`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check(rho)?;
        let mut out = self.dissipate(rho, None);
        let hr = &self.h * rho;
        let rh = rho * &self.h;
        out.add_scaled(-I, &hr);
        out.add_scaled(I, &rh);
        Ok(out)
    }

    /// Dissipative part only, from the baths on `side` (all baths for `None`).
    pub fn dissipator(&self, rho: &ComplexMatrix, side: Option<Subsystem>) -> Result<ComplexMatrix> {
        self.check(rho)?;
        Ok(self.dissipate(rho, side))
    }

    fn dissipate(&self, rho: &ComplexMatrix, side: Option<Subsystem>) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        for t in self.terms.iter().filter(|t| side.is_none_or(|s| s == t.bath)) {
            let jump = &(&t.l * rho) * &t.l_dag;
            let anti = &(&t.l_dag_l * rho) + &(rho * &t.l_dag_l);
            out.add_scaled(C64::new(t.rate, 0.0), &jump);
            out.add_scaled(C64::new(-0.5 * t.rate, 0.0), &anti);
        }
        out
    }

    /// Adjoint dissipator `Σ γ (L† O L − ½{O, L†L})` for the baths on `side`.
    pub fn adjoint(&self, observable: &ComplexMatrix, side: Option<Subsystem>) -> Result<ComplexMatrix> {
        self.check(observable)?;
        let mut out = ComplexMatrix::zeros(self.dim);
        for t in self.terms.iter().filter(|t| side.is_none_or(|s| s == t.bath)) {
            let jump = &(&t.l_dag * observable) * &t.l;
            let anti = &(observable * &t.l_dag_l) + &(&t.l_dag_l * observable);
            out.add_scaled(C64::new(t.rate, 0.0), &jump);
            out.add_scaled(C64::new(-0.5 * t.rate, 0.0), &anti);
        }
        Ok(out)
    }
}

/// `ρ̇` for the system's GKLS equation.
pub fn gkls_generator(sys: &BipartiteSystem, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    Generator::new(sys).apply(rho)
}

pub fn dissipator(sys: &BipartiteSystem, rho: &ComplexMatrix, side: Option<Subsystem>) -> Result<ComplexMatrix> {
    Generator::new(sys).dissipator(rho, side)
}

/// Hilbert–Schmidt adjoint of the dissipator, restricted to `side` if given.
pub fn adjoint_generator(
    sys: &BipartiteSystem,
    observable: &ComplexMatrix,
    side: Option<Subsystem>,
) -> Result<ComplexMatrix> {
    Generator::new(sys).adjoint(observable, side)
}

/// Checks that `rho` is Hermitian, unit-trace and positive within `tol`.
pub fn validate_state(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    let herm = rho.hermiticity_residual();
    if herm > tol {
        return Err(validation(format!("state is not Hermitian (residual {herm:.3e})")));
    }
    let tr = rho.trace();
    if (tr - ONE).norm() > tol {
        return Err(validation(format!("state trace is {} + {}i, expected 1", tr.re, tr.im)));
    }
    let min = min_eigenvalue(rho);
    if min < -tol {
        return Err(validation(format!("state has negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationSettings {
    pub t_final: f64,
    pub dt: f64,
    pub record_every: usize,
}

impl IntegrationSettings {
    pub fn new(t_final: f64, dt: f64, record_every: usize) -> Result<Self> {
        let s = Self { t_final, dt, record_every };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(validation(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(validation(format!("t_final must be nonnegative, got {}", self.t_final)));
        }
        if self.record_every == 0 {
            return Err(validation("record_every must be at least 1"));
        }
        Ok(())
    }

    /// Step sizes covering `[0, t_final]`: whole steps of `dt`, with a shorter
    /// last step when `t_final` is not a multiple of `dt`.
    fn step_plan(&self) -> (usize, f64) {
        let ratio = self.t_final / self.dt;
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            (nearest as usize, self.dt)
        } else {
            let n = ratio.ceil() as usize;
            (n, self.t_final - (n - 1) as f64 * self.dt)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub trace_drift: f64,
    pub hermiticity_residual: f64,
    pub min_eigenvalue: f64,
}

impl Diagnostics {
    pub fn of(rho: &ComplexMatrix) -> Self {
        Self {
            trace_drift: (rho.trace() - ONE).norm(),
            hermiticity_residual: rho.hermiticity_residual(),
            min_eigenvalue: min_eigenvalue(rho),
        }
    }

    pub fn breached(&self) -> bool {
        self.trace_drift > BREACH_TOL || self.min_eigenvalue < -BREACH_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrajectoryStatus {
    Clean,
    /// A record breached the diagnostic bounds; the index is the first one.
    Flagged { first_breach: usize },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    pub diagnostics: Vec<Diagnostics>,
    pub status: TrajectoryStatus,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &ComplexMatrix {
        self.states.last().expect("trajectory always holds the initial state")
    }

    fn push(&mut self, t: f64, rho: &ComplexMatrix) {
        let diag = Diagnostics::of(rho);
        if diag.breached() && self.status == TrajectoryStatus::Clean {
            log::warn!("diagnostic breach at t = {t}: {diag:?}");
            self.status = TrajectoryStatus::Flagged { first_breach: self.times.len() };
        }
        self.times.push(t);
        self.states.push(rho.clone());
        self.diagnostics.push(diag);
    }
}

/// One classical RK4 step of size `dt`.
pub fn rk4_step(generator: &Generator, rho: &ComplexMatrix, dt: f64) -> Result<ComplexMatrix> {
    let k1 = generator.apply(rho)?;
    let mut tmp = rho.clone();
    tmp.add_scaled(C64::new(0.5 * dt, 0.0), &k1);
    let k2 = generator.apply(&tmp)?;
    let mut tmp = rho.clone();
    tmp.add_scaled(C64::new(0.5 * dt, 0.0), &k2);
    let k3 = generator.apply(&tmp)?;
    let mut tmp = rho.clone();
    tmp.add_scaled(C64::new(dt, 0.0), &k3);
    let k4 = generator.apply(&tmp)?;

    let mut next = rho.clone();
    next.add_scaled(C64::new(dt / 6.0, 0.0), &k1);
    next.add_scaled(C64::new(dt / 3.0, 0.0), &k2);
    next.add_scaled(C64::new(dt / 3.0, 0.0), &k3);
    next.add_scaled(C64::new(dt / 6.0, 0.0), &k4);
    Ok(next)
}

/// Fixed-step RK4 solution of the master equation from `rho0`.
///
/// Records the initial state, every `record_every`-th step, and the final
/// state. The trace is never renormalized; drift shows up in the diagnostics.
pub fn integrate(sys: &BipartiteSystem, rho0: &ComplexMatrix, settings: IntegrationSettings) -> Result<Trajectory> {
    settings.validate()?;
    sys.shape().check(rho0)?;
    validate_state(rho0, STATE_TOL)?;

    let generator = Generator::new(sys);
    let (steps, last_dt) = settings.step_plan();
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        diagnostics: Vec::new(),
        status: TrajectoryStatus::Clean,
    };
    traj.push(0.0, rho0);

    let mut rho = rho0.clone();
    for k in 1..=steps {
        let h = if k == steps { last_dt } else { settings.dt };
        rho = rk4_step(&generator, &rho, h)?;
        if k == steps {
            traj.push(settings.t_final, &rho);
        } else if k % settings.record_every == 0 {
            traj.push(k as f64 * settings.dt, &rho);
        }
    }
    Ok(traj)
}

/// Matrix of the generator acting on row-major vectorized operators:
/// column `i*d + j` is `vec(L[|i⟩⟨j|])`.
pub fn superoperator(sys: &BipartiteSystem) -> ComplexMatrix {
    let generator = Generator::new(sys);
    let d = sys.shape().total();
    let mut s = ComplexMatrix::zeros(d * d);
    for i in 0..d {
        for j in 0..d {
            let image = generator
                .apply(&ComplexMatrix::basis_op(d, i, j))
                .expect("basis operator has the system dimension");
            let col = i * d + j;
            for (row, z) in image.as_slice().iter().enumerate() {
                s[(row, col)] = *z;
            }
        }
    }
    s
}

/// Unique steady state from the kernel of the vectorized generator.
pub fn steady_state(sys: &BipartiteSystem) -> Result<ComplexMatrix> {
    let d = sys.shape().total();
    let svd = right_singular(&superoperator(sys));
    if let Some(&second) = svd.values.get(1) {
        if second < KERNEL_GAP {
            return Err(Error::NonuniqueSteadyState { second, threshold: KERNEL_GAP });
        }
    }
    let kernel = ComplexMatrix::new(d, svd.vectors.column(0)).expect("kernel vector has d*d entries");
    let tr = kernel.trace();
    if tr.norm() < 1e-12 {
        return Err(validation("kernel vector of the generator is traceless"));
    }
    let rho = kernel.scale(ONE / tr).hermitian_part();
    let residual = Generator::new(sys).apply(&rho)?.frobenius_norm();
    if residual > 1e-9 {
        log::warn!("steady-state residual {residual:.3e} exceeds 1e-9");
    }
    Ok(rho)
}
