//! Normal-mode spectrum and the second-order coefficients obtained by
//! adiabatically eliminating the excited atomic levels and the (virtually
//! excited) bosonic modes.
//!
//! Coefficient matrices are stored with zero-based rows and columns:
//! row `m - 1` for control drive `m`, row `n - 2` for target `n`, row `l - 1`
//! for site `l`, and column `k - 1` for normal mode `k = 1..=N`. Every sum over
//! `k` runs in ascending order with compensated summation.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::config::{cross_detuning, resonance_pairing, target_detuning, SystemConfig};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, compensated_sum_c, cos_frac, phase_factor};

/// Largest pairing residual tolerated by [`reduced_couplings`].
pub const RESONANCE_TOL: f64 = 1e-9;

/// Normal-mode frequencies `ω_k = 2·J_c·cos(2πk/N)`, `k = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub omega: Vec<f64>,
}

impl ModeSpectrum {
    /// `ω_k` for one-based `k`.
    pub fn at(&self, k: usize) -> f64 {
        self.omega[k - 1]
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

pub fn mode_frequencies(n_sites: usize, hop: f64) -> Result<ModeSpectrum> {
    if n_sites < 2 {
        return Err(Error::Domain(format!("n_sites must be ≥ 2, got {n_sites}")));
    }
    let omega = (1..=n_sites)
        .map(|k| 2.0 * hop * cos_frac(k as i64, n_sites))
        .collect();
    Ok(ModeSpectrum { omega })
}

/// First-stage (excited-level elimination) coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanCoefficients {
    /// `η_m = (Ω_1^(m))² / Δ_1^(m)`
    pub eta: Vec<f64>,
    /// `μ_n = Ω_n² / Δ_n`
    pub mu: Vec<f64>,
    /// `χ_{l,k} = g_l² / (N (Δ_l^(c) − ω_k))`
    pub chi: Vec<Vec<f64>>,
    /// `ξ_{m,k} = g_1 Ω_1^(m) / (2√N) · (1/(Δ_1^(c) − ω_k) + 1/Δ_1^(m))`
    pub xi: Vec<Vec<f64>>,
    /// `ζ_{n,k} = g_n Ω_n / (2√N) · (1/(Δ_n^(c) − ω_k) + 1/Δ_n)`
    pub zeta: Vec<Vec<f64>>,
}

impl RamanCoefficients {
    pub fn xi_at(&self, m: usize, k: usize) -> f64 {
        self.xi[m - 1][k - 1]
    }

    pub fn zeta_at(&self, n: usize, k: usize) -> f64 {
        self.zeta[n - 2][k - 1]
    }

    pub fn chi_at(&self, l: usize, k: usize) -> f64 {
        self.chi[l - 1][k - 1]
    }
}

/// Second-stage (mode elimination) coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderCoefficients {
    /// `θ_{m,k} = ξ_{m,k}² / (Δ_1^(c) − ω_k − Δ_1^(m))`
    pub theta: Vec<Vec<f64>>,
    /// `ϑ_{n,k} = ζ_{n,k}² / (Δ_n^(c) − ω_k − Δ_n)`
    pub vartheta: Vec<Vec<f64>>,
    /// Target-target exchange `Γ_{p,q,k}`, keyed by one-based `(p, q)`, `p ≠ q`;
    /// each value is the series over `k`.
    pub gamma_cross: BTreeMap<(usize, usize), Vec<C64>>,
    /// Control-target exchange `Λ_{m,n,k}`, keyed by one-based `(m, n)`.
    pub lambda_cross: BTreeMap<(usize, usize), Vec<C64>>,
}

/// Couplings of the reduced diagonal Hamiltonian, indexed by target `j = 2..=N`
/// (stored at `j - 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveCouplings {
    /// `ζ′_{1,j} = Σ_k θ_{j−1,k} − η_{j−1}`
    pub zeta_prime: Vec<f64>,
    /// `ξ′_j = Σ_k ϑ_{j,k} − μ_j`
    pub xi_prime: Vec<f64>,
    /// `Λ′_{1,j}`, the control-target conditional coupling.
    pub lambda_prime: Vec<f64>,
}

impl EffectiveCouplings {
    pub fn n_sites(&self) -> usize {
        self.lambda_prime.len() + 1
    }

    pub fn lambda_at(&self, j: usize) -> f64 {
        self.lambda_prime[j - 2]
    }

    /// Relative spread `(max − min) / |mean|` of the conditional couplings.
    pub fn lambda_spread(&self) -> f64 {
        let lo = self
            .lambda_prime
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .lambda_prime
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mean =
            compensated_sum(self.lambda_prime.iter().copied()) / self.lambda_prime.len() as f64;
        (hi - lo) / mean.abs()
    }
}

fn nonzero(value: f64, what: impl FnOnce() -> String) -> Result<f64> {
    if value == 0.0 || !value.is_finite() {
        Err(Error::Singular(what()))
    } else {
        Ok(value)
    }
}

/// Raman amplitude `g Ω / (2√N) · (1/(Δ^(c) − ω) + 1/Δ)`, unchecked.
fn raman(g: f64, rabi: f64, n: usize, cav_gap: f64, drive: f64) -> f64 {
    g * rabi / (2.0 * (n as f64).sqrt()) * (1.0 / cav_gap + 1.0 / drive)
}

pub fn raman_coefficients(cfg: &SystemConfig) -> Result<RamanCoefficients> {
    let n = cfg.n_sites;
    let spec = mode_frequencies(n, cfg.hop)?;
    let nf = n as f64;

    let mut eta = Vec::with_capacity(n - 1);
    let mut xi = Vec::with_capacity(n - 1);
    for m in 1..n {
        let d = nonzero(cfg.ctrl_detuning(m), || format!("Δ_1^({m}) = 0"))?;
        eta.push(cfg.rabi_ctrl[m - 1].powi(2) / d);
        let mut row = Vec::with_capacity(n);
        for k in 1..=n {
            let gap = nonzero(cfg.cav(1) - spec.at(k), || format!("Δ_1^(c) − ω_{k} = 0"))?;
            row.push(raman(cfg.g_atom[0], cfg.rabi_ctrl[m - 1], n, gap, d));
        }
        xi.push(row);
    }

    let mut mu = Vec::with_capacity(n - 1);
    let mut zeta = Vec::with_capacity(n - 1);
    for t in 2..=n {
        let d = nonzero(cfg.tgt_detuning(t), || format!("Δ_{t} = 0"))?;
        mu.push(cfg.rabi_tgt[t - 2].powi(2) / d);
        let mut row = Vec::with_capacity(n);
        for k in 1..=n {
            let gap = nonzero(cfg.cav(t) - spec.at(k), || format!("Δ_{t}^(c) − ω_{k} = 0"))?;
            row.push(raman(cfg.g_atom[t - 1], cfg.rabi_tgt[t - 2], n, gap, d));
        }
        zeta.push(row);
    }

    let mut chi = Vec::with_capacity(n);
    for l in 1..=n {
        let mut row = Vec::with_capacity(n);
        for k in 1..=n {
            let gap = nonzero(cfg.cav(l) - spec.at(k), || format!("Δ_{l}^(c) − ω_{k} = 0"))?;
            row.push(cfg.g_atom[l - 1].powi(2) / (nf * gap));
        }
        chi.push(row);
    }

    Ok(RamanCoefficients {
        eta,
        mu,
        chi,
        xi,
        zeta,
    })
}

/// Dispersive denominator `Δ_1^(c) − ω_k − Δ_1^(m)` for control drive `m`.
fn ctrl_gap(cfg: &SystemConfig, spec: &ModeSpectrum, m: usize, k: usize) -> f64 {
    cfg.cav(1) - spec.at(k) - cfg.ctrl_detuning(m)
}

/// Dispersive denominator `Δ_n^(c) − ω_k − Δ_n` for target `n`.
fn tgt_gap(cfg: &SystemConfig, spec: &ModeSpectrum, n: usize, k: usize) -> f64 {
    cfg.cav(n) - spec.at(k) - cfg.tgt_detuning(n)
}

fn checked_ctrl_gap(cfg: &SystemConfig, spec: &ModeSpectrum, m: usize, k: usize) -> Result<f64> {
    nonzero(ctrl_gap(cfg, spec, m, k), || {
        format!("Δ_1^(c) − ω_{k} − Δ_1^({m}) = 0")
    })
}

fn checked_tgt_gap(cfg: &SystemConfig, spec: &ModeSpectrum, n: usize, k: usize) -> Result<f64> {
    nonzero(tgt_gap(cfg, spec, n, k), || {
        format!("Δ_{n}^(c) − ω_{k} − Δ_{n} = 0")
    })
}

pub fn second_order_coefficients(cfg: &SystemConfig) -> Result<SecondOrderCoefficients> {
    let n = cfg.n_sites;
    let spec = mode_frequencies(n, cfg.hop)?;
    let rc = raman_coefficients(cfg)?;

    let mut ctrl_gaps = vec![vec![0.0; n]; n - 1];
    let mut tgt_gaps = vec![vec![0.0; n]; n - 1];
    for i in 1..n {
        for k in 1..=n {
            ctrl_gaps[i - 1][k - 1] = checked_ctrl_gap(cfg, &spec, i, k)?;
            tgt_gaps[i - 1][k - 1] = checked_tgt_gap(cfg, &spec, i + 1, k)?;
        }
    }

    let theta = (0..n - 1)
        .map(|m| {
            (0..n)
                .map(|k| rc.xi[m][k].powi(2) / ctrl_gaps[m][k])
                .collect()
        })
        .collect();
    let vartheta = (0..n - 1)
        .map(|t| {
            (0..n)
                .map(|k| rc.zeta[t][k].powi(2) / tgt_gaps[t][k])
                .collect()
        })
        .collect();

    let mut gamma_cross = BTreeMap::new();
    for p in 2..=n {
        for q in 2..=n {
            if p == q {
                continue;
            }
            let series = (1..=n)
                .map(|k| {
                    let amp = rc.zeta_at(p, k) * rc.zeta_at(q, k) / 2.0
                        * (1.0 / tgt_gaps[p - 2][k - 1] + 1.0 / tgt_gaps[q - 2][k - 1]);
                    phase_factor((p as i64 - q as i64) * k as i64, n) * amp
                })
                .collect();
            gamma_cross.insert((p, q), series);
        }
    }

    let mut lambda_cross = BTreeMap::new();
    for m in 1..n {
        for t in 2..=n {
            let series = (1..=n)
                .map(|k| {
                    let amp = rc.xi_at(m, k) * rc.zeta_at(t, k) / 2.0
                        * (1.0 / ctrl_gaps[m - 1][k - 1] + 1.0 / tgt_gaps[t - 2][k - 1]);
                    phase_factor((t as i64 - 1) * k as i64, n) * amp
                })
                .collect();
            lambda_cross.insert((m, t), series);
        }
    }

    Ok(SecondOrderCoefficients {
        theta,
        vartheta,
        gamma_cross,
        lambda_cross,
    })
}

/// `Λ′_{1,j}` from the pair `(Δ_1^(j−1), Δ_j)` and the shared parameters only.
pub fn conditional_coupling(cfg: &SystemConfig, j: usize) -> Result<f64> {
    let n = cfg.n_sites;
    let spec = mode_frequencies(n, cfg.hop)?;
    let m = j - 1;
    let dm = nonzero(cfg.ctrl_detuning(m), || format!("Δ_1^({m}) = 0"))?;
    let dj = nonzero(cfg.tgt_detuning(j), || format!("Δ_{j} = 0"))?;
    let mut terms = Vec::with_capacity(n);
    for k in 1..=n {
        let cgap1 = nonzero(cfg.cav(1) - spec.at(k), || format!("Δ_1^(c) − ω_{k} = 0"))?;
        let cgapj = nonzero(cfg.cav(j) - spec.at(k), || format!("Δ_{j}^(c) − ω_{k} = 0"))?;
        let xi = raman(cfg.g_atom[0], cfg.rabi_ctrl[m - 1], n, cgap1, dm);
        let zeta = raman(cfg.g_atom[j - 1], cfg.rabi_tgt[j - 2], n, cgapj, dj);
        let g1 = checked_ctrl_gap(cfg, &spec, m, k)?;
        let gj = checked_tgt_gap(cfg, &spec, j, k)?;
        let c = cos_frac(((j - 1) * k) as i64, n);
        terms.push(xi * zeta * c * (1.0 / g1 + 1.0 / gj));
    }
    Ok(compensated_sum(terms))
}

/// Reduced couplings of the diagonal effective Hamiltonian. Requires every
/// pair `(Δ_1^(j−1), Δ_j)` to be exactly on resonance.
pub fn reduced_couplings(cfg: &SystemConfig) -> Result<EffectiveCouplings> {
    let report = resonance_pairing(cfg);
    if let Some((&(m, n), r)) = report
        .pair_residuals
        .iter()
        .find(|(_, r)| r.abs() > RESONANCE_TOL)
    {
        return Err(Error::Precondition(format!(
            "pair ({m}, {n}) is off resonance by {r:.3e} g; the reduced model needs exact pairing"
        )));
    }
    let n = cfg.n_sites;
    let spec = mode_frequencies(n, cfg.hop)?;
    let rc = raman_coefficients(cfg)?;

    let mut zeta_prime = Vec::with_capacity(n - 1);
    let mut xi_prime = Vec::with_capacity(n - 1);
    let mut lambda_prime = Vec::with_capacity(n - 1);
    for j in 2..=n {
        let m = j - 1;
        let mut theta = Vec::with_capacity(n);
        let mut vartheta = Vec::with_capacity(n);
        for k in 1..=n {
            theta.push(rc.xi_at(m, k).powi(2) / checked_ctrl_gap(cfg, &spec, m, k)?);
            vartheta.push(rc.zeta_at(j, k).powi(2) / checked_tgt_gap(cfg, &spec, j, k)?);
        }
        zeta_prime.push(compensated_sum(theta) - rc.eta[m - 1]);
        xi_prime.push(compensated_sum(vartheta) - rc.mu[j - 2]);
        lambda_prime.push(conditional_coupling(cfg, j)?);
    }
    Ok(EffectiveCouplings {
        zeta_prime,
        xi_prime,
        lambda_prime,
    })
}

/// Thresholds for the "much greater than" validity conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub adiabatic: f64,
    pub dispersive: f64,
    pub cross: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            adiabatic: 10.0,
            dispersive: 10.0,
            cross: 100.0,
        }
    }
}

/// Quantitative validity ratios; each must exceed its threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub adiabatic_cavity: f64,
    pub adiabatic_ctrl: f64,
    pub adiabatic_tgt: f64,
    pub dispersive_ctrl: f64,
    pub dispersive_tgt: f64,
    pub cross_ratio: f64,
    pub target_ratio: f64,
    pub thresholds: Thresholds,
    pub passed: bool,
}

impl ConditionReport {
    /// Row names of [`ConditionReport::rows`], in order.
    pub fn column_names() -> [&'static str; 7] {
        [
            "adiabatic_cavity",
            "adiabatic_ctrl",
            "adiabatic_tgt",
            "dispersive_ctrl",
            "dispersive_tgt",
            "cross_ratio",
            "target_ratio",
        ]
    }

    /// `(name, ratio, threshold, pass)` rows in a fixed order.
    pub fn rows(&self) -> Vec<(&'static str, f64, f64, bool)> {
        let t = self.thresholds;
        [
            ("adiabatic_cavity", self.adiabatic_cavity, t.adiabatic),
            ("adiabatic_ctrl", self.adiabatic_ctrl, t.adiabatic),
            ("adiabatic_tgt", self.adiabatic_tgt, t.adiabatic),
            ("dispersive_ctrl", self.dispersive_ctrl, t.dispersive),
            ("dispersive_tgt", self.dispersive_tgt, t.dispersive),
            ("cross_ratio", self.cross_ratio, t.cross),
            ("target_ratio", self.target_ratio, t.cross),
        ]
        .into_iter()
        .map(|(name, r, th)| (name, r, th, r >= th))
        .collect()
    }
}

/// Quotient used for "≫" checks: NaN is mapped to 0 (fails) and a zero
/// denominator to +∞.
fn ratio(num: f64, den: f64) -> f64 {
    let r = num.abs() / den.abs();
    if r.is_nan() {
        0.0
    } else {
        r
    }
}

fn min_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(f64::INFINITY, f64::min)
}

/// Evaluates every validity ratio without failing on singular parameters
/// (a singular point simply yields a ratio of 0 or ∞).
pub fn condition_ratios(cfg: &SystemConfig, thresholds: Thresholds) -> ConditionReport {
    let n = cfg.n_sites.max(2);
    let spec = match mode_frequencies(n, cfg.hop) {
        Ok(s) => s,
        Err(_) => unreachable!("n clamped to ≥ 2"),
    };
    let sqrt_n = (n as f64).sqrt();

    let adiabatic_cavity = min_of((1..=n).flat_map(|j| {
        let spec = &spec;
        (1..=n).map(move |k| ratio((cfg.cav(j) - spec.at(k)) * sqrt_n, cfg.g_atom[j - 1]))
    }));
    let adiabatic_ctrl = min_of((1..n).map(|m| ratio(cfg.ctrl_detuning(m), cfg.rabi_ctrl[m - 1])));
    let adiabatic_tgt = min_of((2..=n).map(|t| ratio(cfg.tgt_detuning(t), cfg.rabi_tgt[t - 2])));

    let xi = |m: usize, k: usize| {
        raman(
            cfg.g_atom[0],
            cfg.rabi_ctrl[m - 1],
            n,
            cfg.cav(1) - spec.at(k),
            cfg.ctrl_detuning(m),
        )
    };
    let zeta = |t: usize, k: usize| {
        raman(
            cfg.g_atom[t - 1],
            cfg.rabi_tgt[t - 2],
            n,
            cfg.cav(t) - spec.at(k),
            cfg.tgt_detuning(t),
        )
    };

    let dispersive_ctrl = min_of(
        (1..n)
            .flat_map(|m| (1..=n).map(move |k| (m, k)))
            .map(|(m, k)| ratio(ctrl_gap(cfg, &spec, m, k), xi(m, k))),
    );
    let dispersive_tgt = min_of(
        (2..=n)
            .flat_map(|t| (1..=n).map(move |k| (t, k)))
            .map(|(t, k)| ratio(tgt_gap(cfg, &spec, t, k), zeta(t, k))),
    );

    let lambda_sum = |m: usize, t: usize| {
        compensated_sum_c((1..=n).map(|k| {
            let amp = xi(m, k) * zeta(t, k) / 2.0
                * (1.0 / ctrl_gap(cfg, &spec, m, k) + 1.0 / tgt_gap(cfg, &spec, t, k));
            phase_factor((t as i64 - 1) * k as i64, n) * amp
        }))
    };
    let gamma_sum = |p: usize, q: usize| {
        compensated_sum_c((1..=n).map(|k| {
            let amp = zeta(p, k) * zeta(q, k) / 2.0
                * (1.0 / tgt_gap(cfg, &spec, p, k) + 1.0 / tgt_gap(cfg, &spec, q, k));
            phase_factor((p as i64 - q as i64) * k as i64, n) * amp
        }))
    };

    let cross_ratio = min_of(
        (1..n)
            .flat_map(|m| (2..=n).map(move |t| (m, t)))
            .filter(|&(m, t)| m != t - 1)
            .map(|(m, t)| ratio(cross_detuning(cfg, m, t), lambda_sum(m, t).norm())),
    );
    // Γ is conjugate-symmetric in (p, q) and the separation symmetric, so p < q suffices.
    let target_ratio = min_of(
        (2..=n)
            .flat_map(|p| (p + 1..=n).map(move |q| (p, q)))
            .map(|(p, q)| ratio(target_detuning(cfg, p, q), gamma_sum(p, q).norm())),
    );

    let mut report = ConditionReport {
        adiabatic_cavity,
        adiabatic_ctrl,
        adiabatic_tgt,
        dispersive_ctrl,
        dispersive_tgt,
        cross_ratio,
        target_ratio,
        thresholds,
        passed: false,
    };
    report.passed = report.rows().iter().all(|r| r.3);
    report
}
