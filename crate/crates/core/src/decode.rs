//! Pauli rounding and approximation ratios.

use alloc::vec::Vec;

use crate::encoding::{EncodingMap, Observable};
use crate::engine::{self, Statevector};
use crate::graph::{Graph, Spin};
use crate::qsci::{self, QsciResult};
use crate::{Error, Result};

/// Goemans-Williamson approximation guarantee, used as a reference line.
pub const ALPHA_GW: f64 = 0.878;

pub const DEFAULT_TIE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinSolution {
    pub spins: Vec<Spin>,
    pub cut_value: usize,
    /// Variables whose expectation fell within the tie threshold (set to +1).
    pub ties: Vec<usize>,
    /// `<P_i>` per variable.
    pub expectations: Vec<f64>,
}

impl SpinSolution {
    /// Binary solution with `s = +1` mapped to `0`.
    pub fn bits(&self) -> Vec<u8> {
        self.spins.iter().map(|&s| u8::from(s < 0)).collect()
    }
}

/// `s_i = sgn <v|P_i|v>`, with `+1` when `|<P_i>| <= tie`.
pub fn pauli_round(v: &Statevector, m: &EncodingMap, g: &Graph, tie: f64) -> Result<SpinSolution> {
    if v.n_qubits() != m.n_qubits() {
        return Err(Error::WidthMismatch {
            expected: m.n_qubits(),
            found: v.n_qubits(),
        });
    }
    if m.num_variables() != g.n() {
        return Err(Error::Encoding("encoding and graph disagree on variable count".into()));
    }
    let mut spins = Vec::with_capacity(g.n());
    let mut ties = Vec::new();
    let mut expectations = Vec::with_capacity(g.n());
    for i in 0..g.n() {
        let e = engine::pauli_expectation(&m.variable_string(i)?, v)?;
        expectations.push(e);
        spins.push(if e > tie {
            1
        } else if e < -tie {
            -1
        } else {
            ties.push(i);
            1
        });
    }
    let cut_value = g.cut_value(&spins);
    Ok(SpinSolution {
        spins,
        cut_value,
        ties,
        expectations,
    })
}

/// Exact references for the ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oracles {
    /// Ground energy of the relaxed Hamiltonian.
    pub e_min: f64,
    /// Optimal (or best known) cut.
    pub c_opt: usize,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub alpha_r: f64,
    pub alpha_c: f64,
    pub e_min: f64,
    pub energy: f64,
    pub c_opt: usize,
    pub cut: usize,
    pub certified_c_opt: bool,
}

/// The state being scored.
#[derive(Debug, Clone, Copy)]
pub enum Prepared<'a> {
    /// Energy is `<psi|H|psi>`.
    State(&'a Statevector),
    /// Energy is the subspace eigenvalue; rounding uses the lifted state.
    Qsci(&'a QsciResult),
}

/// `alpha_r = energy / e_min`, `alpha_c = cut / c_opt` with the cut from
/// Pauli rounding.
pub fn compute_metrics(
    g: &Graph,
    h: &Observable,
    prepared: Prepared<'_>,
    m: &EncodingMap,
    oracles: &Oracles,
    tie: f64,
) -> Result<(Metrics, SpinSolution)> {
    if oracles.e_min == 0.0 || oracles.c_opt == 0 {
        return Err(Error::Domain("approximation ratio with zero denominator".into()));
    }
    let (energy, solution) = match prepared {
        Prepared::State(v) => (engine::expectation(h, v)?, pauli_round(v, m, g, tie)?),
        Prepared::Qsci(res) => {
            let lifted = qsci::lift_to_statevector(res, h.n_qubits())?;
            (res.energy, pauli_round(&lifted, m, g, tie)?)
        }
    };
    let metrics = Metrics {
        alpha_r: energy / oracles.e_min,
        alpha_c: solution.cut_value as f64 / oracles.c_opt as f64,
        e_min: oracles.e_min,
        energy,
        c_opt: oracles.c_opt,
        cut: solution.cut_value,
        certified_c_opt: oracles.certified,
    };
    Ok((metrics, solution))
}
