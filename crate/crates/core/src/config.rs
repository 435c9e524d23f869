//! Physical configuration of the cavity ring and its drives.
//!
//! Every frequency is dimensionless, measured in units of a reference
//! atom-cavity coupling `g` (with ħ = 1); times are in units of `1/g`.
//!
//! Index conventions used throughout the crate (all zero-based in storage):
//!
//! * atoms, cavities and modes are numbered `1..=N`; atom 1 is the control;
//! * `rabi_ctrl[m - 1]`, `delta_ctrl[m - 1]` hold the `m`-th drive on atom 1,
//!   `m = 1..N-1`;
//! * `rabi_tgt[n - 2]`, `delta_tgt[n - 2]` hold the drive on target atom `n`,
//!   `n = 2..=N`.

use std::collections::BTreeMap;
use std::fmt;

/// Parameters of the ring, in units of `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub n_sites: usize,
    /// Cavity-cavity hopping `J_c`.
    pub hop: f64,
    /// Atom-cavity couplings `g_j`, one per site.
    pub g_atom: Vec<f64>,
    /// Cavity detunings `Δ_j^(c)`, one per site.
    pub delta_cav: Vec<f64>,
    /// Rabi frequencies `Ω_1^(m)` of the drives on the control atom.
    pub rabi_ctrl: Vec<f64>,
    /// Detunings `Δ_1^(m)` of the drives on the control atom.
    pub delta_ctrl: Vec<f64>,
    /// Rabi frequencies `Ω_n` of the target drives.
    pub rabi_tgt: Vec<f64>,
    /// Detunings `Δ_n` of the target drives.
    pub delta_tgt: Vec<f64>,
    /// Atomic excited-state decay rate.
    pub gamma: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Per-mode photon cutoff used by the full simulation.
    pub n_max: usize,
}

impl SystemConfig {
    /// Uniform ring: every coupling and Rabi frequency equal to `1` (i.e. `g`),
    /// every cavity detuning equal to `delta_c`, and drive pair `j` tuned to
    /// `pairs[j - 2]` (`Δ_1^(j-1) = Δ_j`).
    pub fn uniform(n_sites: usize, hop: f64, delta_c: f64, pairs: &[f64]) -> Self {
        Self {
            n_sites,
            hop,
            g_atom: vec![1.0; n_sites],
            delta_cav: vec![delta_c; n_sites],
            rabi_ctrl: vec![1.0; pairs.len()],
            delta_ctrl: pairs.to_vec(),
            rabi_tgt: vec![1.0; pairs.len()],
            delta_tgt: pairs.to_vec(),
            gamma: 3e-3,
            kappa: 3e-3,
            n_max: 1,
        }
    }

    /// Three-qubit parameter set: `J_c = 0.5`, `Δ^(c) = 20`, pairs 18 and 21.2842.
    pub fn paper_n3() -> Self {
        Self::uniform(3, 0.5, 20.0, &[18.0, 21.2842])
    }

    /// Four-qubit parameter set: pairs 18, 18.34 and 21.7492.
    pub fn paper_n4() -> Self {
        Self::uniform(4, 0.5, 20.0, &[18.0, 18.34, 21.7492])
    }

    /// 200-site ring with only the anchor pair (18) specified; every other pair
    /// is filled with the anchor value so the configuration stays on resonance.
    pub fn paper_n200() -> Self {
        Self::uniform(200, 0.5, 20.0, &[18.0; 199])
    }

    /// Cavity detuning `Δ_j^(c)` for site `j` in `1..=N`.
    pub fn cav(&self, j: usize) -> f64 {
        self.delta_cav[j - 1]
    }

    /// Control-drive detuning `Δ_1^(m)` for `m` in `1..N`.
    pub fn ctrl_detuning(&self, m: usize) -> f64 {
        self.delta_ctrl[m - 1]
    }

    /// Target-drive detuning `Δ_n` for `n` in `2..=N`.
    pub fn tgt_detuning(&self, n: usize) -> f64 {
        self.delta_tgt[n - 2]
    }

    /// Sets both members of detuning pair `j` (`Δ_1^(j-1)` and `Δ_j`).
    pub fn set_pair(&mut self, j: usize, value: f64) {
        self.delta_ctrl[j - 2] = value;
        self.delta_tgt[j - 2] = value;
    }

    /// Returns a copy with every frequency (couplings, Rabi frequencies,
    /// detunings, hopping, decay rates) multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let scale = |v: &[f64]| v.iter().map(|x| x * s).collect::<Vec<_>>();
        Self {
            n_sites: self.n_sites,
            hop: self.hop * s,
            g_atom: scale(&self.g_atom),
            delta_cav: scale(&self.delta_cav),
            rabi_ctrl: scale(&self.rabi_ctrl),
            delta_ctrl: scale(&self.delta_ctrl),
            rabi_tgt: scale(&self.rabi_tgt),
            delta_tgt: scale(&self.delta_tgt),
            gamma: self.gamma * s,
            kappa: self.kappa * s,
            n_max: self.n_max,
        }
    }

    /// Largest oscillation frequency appearing in the lab-frame Hamiltonian.
    pub fn max_frequency(&self) -> f64 {
        self.delta_cav
            .iter()
            .chain(&self.delta_ctrl)
            .chain(&self.delta_tgt)
            .fold(0.0_f64, |acc, d| acc.max(d.abs()))
            + 2.0 * self.hop.abs()
    }
}

/// One violated configuration invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Outcome of [`validate_config`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_field(&self, field: &str) -> bool {
        self.violations.iter().any(|v| v.field == field)
    }
}

/// Checks every invariant of [`SystemConfig`], collecting all violations.
pub fn validate_config(cfg: &SystemConfig) -> Validation {
    let mut out = Vec::new();
    let mut push = |field: &'static str, message: String| out.push(Violation { field, message });

    if cfg.n_sites < 2 {
        push(
            "n_sites",
            format!("n_sites ≥ 2 required, got {}", cfg.n_sites),
        );
    }
    let n = cfg.n_sites;
    let drives = n.saturating_sub(1);

    let per_site: [(&'static str, &Vec<f64>); 2] =
        [("g_atom", &cfg.g_atom), ("delta_cav", &cfg.delta_cav)];
    for (name, v) in per_site {
        if v.len() != n {
            push(name, format!("length must be N = {n}, got {}", v.len()));
        }
    }
    let per_drive: [(&'static str, &Vec<f64>); 4] = [
        ("rabi_ctrl", &cfg.rabi_ctrl),
        ("delta_ctrl", &cfg.delta_ctrl),
        ("rabi_tgt", &cfg.rabi_tgt),
        ("delta_tgt", &cfg.delta_tgt),
    ];
    for (name, v) in per_drive {
        if v.len() != drives {
            push(
                name,
                format!("length must be N−1 = {drives}, got {}", v.len()),
            );
        }
    }

    let nonneg: [(&'static str, &Vec<f64>); 3] = [
        ("g_atom", &cfg.g_atom),
        ("rabi_ctrl", &cfg.rabi_ctrl),
        ("rabi_tgt", &cfg.rabi_tgt),
    ];
    for (name, v) in nonneg {
        for (i, x) in v.iter().enumerate() {
            if !x.is_finite() || *x < 0.0 {
                push(
                    name,
                    format!("entry {} must be finite and ≥ 0, got {x}", i + 1),
                );
            }
        }
    }
    let detunings: [(&'static str, &Vec<f64>); 3] = [
        ("delta_cav", &cfg.delta_cav),
        ("delta_ctrl", &cfg.delta_ctrl),
        ("delta_tgt", &cfg.delta_tgt),
    ];
    for (name, v) in detunings {
        for (i, x) in v.iter().enumerate() {
            if !x.is_finite() || *x == 0.0 {
                push(
                    name,
                    format!("entry {} must be finite and nonzero, got {x}", i + 1),
                );
            }
        }
    }
    let scalars: [(&'static str, f64); 3] =
        [("hop", cfg.hop), ("gamma", cfg.gamma), ("kappa", cfg.kappa)];
    for (name, x) in scalars {
        if !x.is_finite() || x < 0.0 {
            push(name, format!("must be finite and ≥ 0, got {x}"));
        }
    }

    Validation { violations: out }
}

/// Detuning bookkeeping for the resonance and off-resonance conditions.
///
/// Keys are one-based `(m, n)` / `(p, q)` index pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResonanceReport {
    /// Signed `Δ_n^(c) − Δ_1^(c) − Δ_n + Δ_1^(m)` for `m = n − 1`.
    pub pair_residuals: BTreeMap<(usize, usize), f64>,
    /// `|Δ_n^(c) − Δ_1^(c) − Δ_n + Δ_1^(m)|` for `m ≠ n − 1`.
    pub cross_separations: BTreeMap<(usize, usize), f64>,
    /// `|Δ_p^(c) − Δ_q^(c) − Δ_p + Δ_q|` for targets `p ≠ q`.
    pub target_separations: BTreeMap<(usize, usize), f64>,
}

impl ResonanceReport {
    pub fn max_abs_residual(&self) -> f64 {
        self.pair_residuals
            .values()
            .fold(0.0, |a, r| a.max(r.abs()))
    }
}

/// Control-target detuning mismatch `Δ_n^(c) − Δ_1^(c) − Δ_n + Δ_1^(m)`.
pub fn cross_detuning(cfg: &SystemConfig, m: usize, n: usize) -> f64 {
    cfg.cav(n) - cfg.cav(1) - cfg.tgt_detuning(n) + cfg.ctrl_detuning(m)
}

/// Target-target detuning mismatch `Δ_p^(c) − Δ_q^(c) − Δ_p + Δ_q`.
pub fn target_detuning(cfg: &SystemConfig, p: usize, q: usize) -> f64 {
    cfg.cav(p) - cfg.cav(q) - cfg.tgt_detuning(p) + cfg.tgt_detuning(q)
}

/// Evaluates the resonance residuals and off-resonance separations. `cfg`
/// must be valid.
pub fn resonance_pairing(cfg: &SystemConfig) -> ResonanceReport {
    let n_sites = cfg.n_sites;
    let mut report = ResonanceReport::default();
    for m in 1..n_sites {
        for n in 2..=n_sites {
            let d = cross_detuning(cfg, m, n);
            if m == n - 1 {
                report.pair_residuals.insert((m, n), d);
            } else {
                report.cross_separations.insert((m, n), d.abs());
            }
        }
    }
    for p in 2..=n_sites {
        for q in 2..=n_sites {
            if p != q {
                report
                    .target_separations
                    .insert((p, q), target_detuning(cfg, p, q).abs());
            }
        }
    }
    report
}
