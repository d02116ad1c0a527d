//! Run counts of full state tomography against the witness scheme.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostEstimate {
    /// `C·3^{1+2M}`.
    pub tomography_runs: f64,
    /// `C + C·(1/(p_cnot·f))^{2M}`.
    pub witness_runs: f64,
    pub witness_wins: bool,
    /// CNOT success probability above which the witness wins for large `M`: `1/(3f)`.
    pub crossover_p: f64,
    /// CNOT success probability at which the two totals are equal for this `M`.
    pub crossover_p_at_m: f64,
}

/// Compares tomography of `m_envs` two-photon environments plus the system
/// with the witness scheme, both collecting `c` successful runs per setting.
pub fn cost_model(m_envs: u32, c: u64, p_cnot: f64, f_cnot: f64) -> Result<CostEstimate> {
    if m_envs == 0 || c == 0 {
        return Err(Error::InvalidArgument(
            "need at least one environment and one run".into(),
        ));
    }
    if !(p_cnot > 0.0 && p_cnot <= 1.0) {
        return Err(Error::InvalidProbability {
            name: "p_cnot",
            value: p_cnot,
        });
    }
    if !(f_cnot > 0.0 && f_cnot <= 1.0) {
        return Err(Error::InvalidProbability {
            name: "f_cnot",
            value: f_cnot,
        });
    }
    let c = c as f64;
    let exponent = 2.0 * m_envs as f64;
    let settings = 3f64.powf(1.0 + exponent);
    let tomography_runs = c * settings;
    let witness_runs = c + c * (1.0 / (p_cnot * f_cnot)).powf(exponent);
    Ok(CostEstimate {
        tomography_runs,
        witness_runs,
        witness_wins: witness_runs < tomography_runs,
        crossover_p: 1.0 / (3.0 * f_cnot),
        crossover_p_at_m: (settings - 1.0).powf(-1.0 / exponent) / f_cnot,
    })
}
