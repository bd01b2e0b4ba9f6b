use std::fmt::Write as _;

use anyhow::Result;
use corrflux::conditions::check_conditions;
use corrflux::dynamics::Trajectory;
use corrflux::energetics::{decompose, LedgerEvaluator};
use corrflux::model::BipartiteSystem;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str =
    "t,U,U_A,U_B,U_prod,U_chi,dU_prod_dt,dU_chi_dt,dU_dt,chi_norm,trace_drift,min_eig,cond_i_resid,cond_ii_resid";

/// Tolerance used for the per-record condition verdicts.
const CONDITION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub t: f64,
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
    pub chi_norm: f64,
    pub trace_drift: f64,
    pub min_eig: f64,
    pub cond_i_resid: f64,
    pub cond_ii_resid: f64,
}

impl RunRecord {
    fn values(&self) -> [f64; 14] {
        [
            self.t,
            self.u,
            self.u_a,
            self.u_b,
            self.u_prod,
            self.u_chi,
            self.du_prod_dt,
            self.du_chi_dt,
            self.du_dt,
            self.chi_norm,
            self.trace_drift,
            self.min_eig,
            self.cond_i_resid,
            self.cond_ii_resid,
        ]
    }
}

pub fn records(sys: &BipartiteSystem, traj: &Trajectory) -> Result<Vec<RunRecord>> {
    let evaluator = LedgerEvaluator::new(sys);
    let mut out = Vec::with_capacity(traj.len());
    for ((&t, rho), diag) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        let l = evaluator.ledger(rho)?;
        let chi = decompose(rho, sys.shape())?.chi;
        let cond = check_conditions(sys, rho, CONDITION_TOL)?;
        out.push(RunRecord {
            t,
            u: l.u,
            u_a: l.u_a,
            u_b: l.u_b,
            u_prod: l.u_prod,
            u_chi: l.u_chi,
            du_prod_dt: l.du_prod_dt,
            du_chi_dt: l.du_chi_dt,
            du_dt: l.du_dt,
            chi_norm: chi.frobenius_norm(),
            trace_drift: diag.trace_drift,
            min_eig: diag.min_eigenvalue,
            cond_i_resid: cond.commutator_residual,
            cond_ii_resid: cond.adjoint_residual,
        });
    }
    Ok(out)
}

/// Fixed 17-significant-digit scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(records: &[RunRecord]) -> String {
    let mut s = String::with_capacity(64 + records.len() * 14 * 24);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in records {
        let row: Vec<String> = r.values().iter().map(|&x| format_float(x)).collect();
        let _ = writeln!(s, "{}", row.join(","));
    }
    s
}

pub fn to_json(records: &[RunRecord]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(records)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Vec<RunRecord>> {
    Ok(serde_json::from_str(text)?)
}
