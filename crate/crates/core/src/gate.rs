//! Phase accumulation under the reduced Hamiltonian, one-qubit corrections,
//! and scoring of simulated gates against the ideal truth table.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::config::SystemConfig;
use crate::couplings::{reduced_couplings, EffectiveCouplings};
use crate::dynamics::{extract_phase, propagate, PropagationSettings};
use crate::error::{Error, Result};
use crate::hilbert::hamiltonian::qubit_is_g;
use crate::hilbert::{build_full_hamiltonian, build_space, effective_energies, StateVector};

/// Relative spread of `Λ′_{1,j}` tolerated when fixing a common gate time.
pub const SIMULTANEITY_TOL: f64 = 1e-3;

/// Reference coupling `g = 2π × 34 MHz`, as an angular frequency in rad/s.
pub const DEFAULT_G_HZ: f64 = 2.0 * PI * 34e6;

/// Phases (radians) accumulated by the reduced dynamics after time `t`,
/// indexed by target `j` at `j - 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTable {
    /// `φ_j = ξ′_j t`
    pub phi: Vec<f64>,
    /// `ψ_{1,j} = ζ′_{1,j} t`
    pub psi: Vec<f64>,
    /// `φ_{1,j} = Λ′_{1,j} t`
    pub phi_cond: Vec<f64>,
}

impl PhaseTable {
    /// Phase removed by the one-qubit corrections from computational state
    /// `bits`: `Σ_j ψ_{1,j}` if the control is in `g`, plus `φ_j` for each
    /// target in `g`.
    pub fn correction(&self, bits: usize) -> f64 {
        let n = self.phi.len() + 1;
        let mut c = 0.0;
        if qubit_is_g(bits, 1, n) {
            c += self.psi.iter().sum::<f64>();
        }
        for j in 2..=n {
            if qubit_is_g(bits, j, n) {
                c += self.phi[j - 2];
            }
        }
        c
    }
}

pub fn effective_phases(coup: &EffectiveCouplings, t: f64) -> PhaseTable {
    PhaseTable {
        phi: coup.xi_prime.iter().map(|x| x * t).collect(),
        psi: coup.zeta_prime.iter().map(|x| x * t).collect(),
        phi_cond: coup.lambda_prime.iter().map(|x| x * t).collect(),
    }
}

/// `π / Λ′_{1,2}`, the time at which every conditional phase reaches `π`.
pub fn gate_time(coup: &EffectiveCouplings) -> Result<f64> {
    gate_time_with_tol(coup, SIMULTANEITY_TOL)
}

pub fn gate_time_with_tol(coup: &EffectiveCouplings, rel_tol: f64) -> Result<f64> {
    let first = coup.lambda_prime[0];
    if first == 0.0 || !first.is_finite() {
        return Err(Error::Singular(format!("Λ′_(1,2) = {first}")));
    }
    let spread = coup.lambda_spread();
    if spread > rel_tol {
        return Err(Error::Design(format!(
            "conditional couplings differ by {spread:.3e} (relative), above {rel_tol:.1e}"
        )));
    }
    Ok(PI / first)
}

/// Ideal diagonal: `+1` when the control is in `a`, otherwise
/// `(−1)^(number of targets in g)`.
pub fn ideal_gate_diag(n_sites: usize) -> Vec<f64> {
    (0..1usize << n_sites)
        .map(|bits| {
            if !qubit_is_g(bits, 1, n_sites) {
                1.0
            } else {
                let flips = (2..=n_sites)
                    .filter(|&j| qubit_is_g(bits, j, n_sites))
                    .count();
                if flips % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        })
        .collect()
}

/// Which model generates the phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Effective,
    Full,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Effective => "effective",
            Source::Full => "full",
        }
    }
}

/// Per-basis-state diagnostics of a full-model run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateRun {
    pub leakage: f64,
    pub norm_drift: f64,
    pub mean_excited: f64,
    pub max_excited: f64,
    pub mean_photons: f64,
    pub max_photons: f64,
}

/// Result of [`simulated_gate_diag`], indexed by computational state.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedGate {
    pub source: Source,
    pub t: f64,
    /// Unimodular diagonal after the one-qubit corrections.
    pub diag: Vec<C64>,
    /// Accumulated phase `φ_s` before corrections.
    pub raw_phases: Vec<f64>,
    /// `φ_s − correction_s`, i.e. `diag_s = e^{−i·corrected_s}`.
    pub corrected_phases: Vec<f64>,
    /// Empty for the effective source.
    pub runs: Vec<StateRun>,
}

/// Diagonal gate realised by the chosen model at time `t`, with corrections
/// taken from the effective phase table.
pub fn simulated_gate_diag(
    cfg: &SystemConfig,
    t: f64,
    source: Source,
    settings: &PropagationSettings,
) -> Result<SimulatedGate> {
    let coup = reduced_couplings(cfg)?;
    let table = effective_phases(&coup, t);
    let n_states = 1usize << cfg.n_sites;

    let (raw_phases, runs) = match source {
        Source::Effective => {
            let phases = effective_energies(&coup)
                .into_iter()
                .map(|e| e * t)
                .collect();
            (phases, Vec::new())
        }
        Source::Full => {
            let space = build_space(cfg.n_sites, cfg.n_max)?;
            let gen = build_full_hamiltonian(cfg, &space);
            let results: Vec<Result<(f64, StateRun)>> = (0..n_states)
                .into_par_iter()
                .map(|bits| {
                    let psi = StateVector::basis(space.total_dim, space.qubit_state_index(bits));
                    let (traj, _) = propagate(&psi, &gen, Some(&space), t, settings)?;
                    let phase = extract_phase(&traj)?;
                    let run = StateRun {
                        leakage: traj.final_leakage(),
                        norm_drift: traj.max_norm_drift(),
                        mean_excited: traj.time_average(&traj.excited_pop),
                        max_excited: traj.excited_pop.iter().copied().fold(0.0, f64::max),
                        mean_photons: traj.time_average(&traj.photon_num),
                        max_photons: traj.photon_num.iter().copied().fold(0.0, f64::max),
                    };
                    Ok((phase, run))
                })
                .collect();
            let mut phases = Vec::with_capacity(n_states);
            let mut runs = Vec::with_capacity(n_states);
            for r in results {
                let (p, run) = r?;
                phases.push(p);
                runs.push(run);
            }
            (phases, runs)
        }
    };

    let corrected_phases: Vec<f64> = raw_phases
        .iter()
        .enumerate()
        .map(|(bits, p)| p - table.correction(bits))
        .collect();
    let diag = corrected_phases
        .iter()
        .map(|p| C64::from_polar(1.0, -p))
        .collect();
    Ok(SimulatedGate {
        source,
        t,
        diag,
        raw_phases,
        corrected_phases,
        runs,
    })
}

/// Correction-independent conditional phase `φ_gg − φ_ga − φ_ag + φ_aa`.
pub fn conditional_phase_from_runs(phi_gg: f64, phi_ga: f64, phi_ag: f64, phi_aa: f64) -> f64 {
    phi_gg - phi_ga - phi_ag + phi_aa
}

/// Conditional phase between the control and target `j` from a simulated
/// gate, with every other atom held in `a`.
pub fn conditional_phase(gate: &SimulatedGate, n_sites: usize, j: usize) -> f64 {
    let ctrl = 1usize << (n_sites - 1);
    let tgt = 1usize << (n_sites - j);
    let p = &gate.raw_phases;
    conditional_phase_from_runs(p[ctrl | tgt], p[ctrl], p[tgt], p[0])
}

/// `|Σ_s ideal_s · sim_s| / 2^N`, insensitive to a global phase.
pub fn gate_fidelity(sim: &[C64], ideal: &[f64]) -> Result<f64> {
    if sim.len() != ideal.len() {
        return Err(Error::Length(format!(
            "simulated diagonal has {} entries, ideal {}",
            sim.len(),
            ideal.len()
        )));
    }
    if sim.is_empty() {
        return Err(Error::Length("empty diagonal".into()));
    }
    let overlap: C64 = sim.iter().zip(ideal).map(|(s, i)| s * i).sum();
    Ok((overlap.norm() / sim.len() as f64).min(1.0))
}

/// Summary of a gate evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub source: Source,
    /// Corrected phases, radians.
    pub diag_phases: Vec<f64>,
    pub fidelity: f64,
    pub gate_time: f64,
    pub gate_time_seconds: f64,
    /// `1 − |⟨s|ψ_s(t)⟩|²` per basis state (zeros for the effective source).
    pub leakage: Vec<f64>,
    pub conditional_phases: Vec<f64>,
}

/// Evaluates the gate at its design time `π / Λ′_{1,2}`.
pub fn gate_report(
    cfg: &SystemConfig,
    source: Source,
    settings: &PropagationSettings,
    g_hz: f64,
) -> Result<GateReport> {
    let coup = reduced_couplings(cfg)?;
    let t = gate_time(&coup)?;
    let sim = simulated_gate_diag(cfg, t, source, settings)?;
    let fidelity = gate_fidelity(&sim.diag, &ideal_gate_diag(cfg.n_sites))?;
    let leakage = if sim.runs.is_empty() {
        vec![0.0; sim.diag.len()]
    } else {
        sim.runs.iter().map(|r| r.leakage).collect()
    };
    let conditional_phases = (2..=cfg.n_sites)
        .map(|j| conditional_phase(&sim, cfg.n_sites, j))
        .collect();
    Ok(GateReport {
        source,
        diag_phases: sim.corrected_phases,
        fidelity,
        gate_time: t,
        gate_time_seconds: t / g_hz,
        leakage,
        conditional_phases,
    })
}
