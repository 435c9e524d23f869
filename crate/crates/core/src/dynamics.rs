//! Fixed-step integration of `i dψ/dt = H(t) ψ` and overlap-phase extraction.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{HamiltonianGenerator, Level, SpaceDescriptor, StateVector};

/// Largest wrapped phase increment accepted between two trajectory samples.
pub const UNWRAP_GUARD: f64 = FRAC_PI_2;

/// Settings for the classical fourth-order Runge-Kutta integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationSettings {
    /// Step size in units of `1/g`; rounded down so that an integer number of
    /// steps lands exactly on the final time.
    pub dt: f64,
    /// Record a sample every `sample_stride` steps.
    pub sample_stride: usize,
    /// Abort when `| ‖ψ‖ − 1 |` exceeds this.
    pub norm_tol: f64,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            sample_stride: 100,
            norm_tol: 1e-8,
        }
    }
}

impl PropagationSettings {
    /// Largest step resolving a frequency `f_max` with 20 steps per period.
    pub fn max_dt(f_max: f64) -> f64 {
        TAU / (20.0 * f_max)
    }

    pub fn validate(&self, f_max: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Settings(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::Settings("sample_stride must be ≥ 1".into()));
        }
        if !(self.norm_tol > 0.0) {
            return Err(Error::Settings(format!(
                "norm_tol must be positive, got {}",
                self.norm_tol
            )));
        }
        let limit = Self::max_dt(f_max);
        if f_max > 0.0 && self.dt > limit {
            return Err(Error::Settings(format!(
                "dt = {} exceeds 2π/(20·f_max) = {limit:.6} for f_max = {f_max:.6}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// Fastest frequency of `gen`: the largest tone plus a Gershgorin bound on the
/// static part.
pub fn generator_max_frequency(gen: &HamiltonianGenerator) -> f64 {
    let mut rows = vec![0.0_f64; gen.dim];
    for (r, _, v) in gen.static_part.triplets() {
        rows[r] += v.norm();
    }
    gen.max_frequency() + rows.into_iter().fold(0.0, f64::max)
}

/// Sampled record of a propagation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `⟨ψ(0)|ψ(t)⟩`
    pub overlaps: Vec<C64>,
    pub norms: Vec<f64>,
    /// Total excited-state population `Σ_j ⟨|e⟩⟨e|_j⟩`.
    pub excited_pop: Vec<f64>,
    /// Total photon number `Σ_j ⟨â_j^† â_j⟩`.
    pub photon_num: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().fold(0.0, |m, n| m.max((n - 1.0).abs()))
    }

    /// `1 − |⟨ψ(0)|ψ(t_final)⟩|²`.
    pub fn final_leakage(&self) -> f64 {
        self.overlaps.last().map_or(0.0, |o| 1.0 - o.norm_sqr())
    }

    /// Trapezoid-rule time average of a sampled series.
    pub fn time_average(&self, series: &[f64]) -> f64 {
        if self.times.len() < 2 {
            return series.first().copied().unwrap_or(0.0);
        }
        let total = self.times[self.times.len() - 1] - self.times[0];
        let area: f64 = self
            .times
            .windows(2)
            .zip(series.windows(2))
            .map(|(t, y)| (t[1] - t[0]) * (y[0] + y[1]) / 2.0)
            .sum();
        area / total
    }

    /// CSV dump with columns `t,re_overlap,im_overlap,norm,excited_pop,photon_num`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,re_overlap,im_overlap,norm,excited_pop,photon_num")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                sig6(self.times[i]),
                sig6(self.overlaps[i].re),
                sig6(self.overlaps[i].im),
                sig6(self.norms[i]),
                sig6(self.excited_pop[i]),
                sig6(self.photon_num[i]),
            )?;
        }
        Ok(())
    }
}

/// Six-significant-digit scientific formatting used by every report.
pub fn sig6(x: f64) -> String {
    format!("{x:.5e}")
}

/// Diagonal observables sampled along a trajectory.
struct Observables {
    excited: Vec<f64>,
    photons: Vec<f64>,
}

impl Observables {
    fn new(space: Option<&SpaceDescriptor>, dim: usize) -> Self {
        match space {
            Some(s) => {
                let excited = (0..dim)
                    .map(|i| {
                        (1..=s.n_sites)
                            .filter(|&j| s.level(i, j) == Level::E)
                            .count() as f64
                    })
                    .collect();
                let photons = (0..dim)
                    .map(|i| (1..=s.n_sites).map(|j| s.photons(i, j)).sum::<usize>() as f64)
                    .collect();
                Self { excited, photons }
            }
            None => Self {
                excited: vec![0.0; dim],
                photons: vec![0.0; dim],
            },
        }
    }

    fn expect(weights: &[f64], psi: &[C64]) -> f64 {
        weights
            .iter()
            .zip(psi)
            .filter(|(w, _)| **w != 0.0)
            .map(|(w, a)| w * a.norm_sqr())
            .sum()
    }
}

fn norm(psi: &[C64]) -> f64 {
    psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Integrates from `t = 0` to `t_final` with fixed RK4 steps. `space` (when
/// given) enables the excited-population and photon-number samples.
///
/// The state is never renormalized; a norm excursion beyond
/// `settings.norm_tol` aborts with [`Error::NormDrift`].
pub fn propagate(
    state: &StateVector,
    gen: &HamiltonianGenerator,
    space: Option<&SpaceDescriptor>,
    t_final: f64,
    settings: &PropagationSettings,
) -> Result<(Trajectory, StateVector)> {
    settings.validate(generator_max_frequency(gen))?;
    if state.dim() != gen.dim {
        return Err(Error::Length(format!(
            "state has dimension {}, Hamiltonian {}",
            state.dim(),
            gen.dim
        )));
    }
    if !state.is_normalized(settings.norm_tol) {
        return Err(Error::Precondition(format!(
            "initial state norm {} is not 1",
            state.norm()
        )));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::Settings(format!(
            "t_final must be ≥ 0, got {t_final}"
        )));
    }

    let steps = (t_final / settings.dt).ceil() as usize;
    let dt = if steps == 0 {
        0.0
    } else {
        t_final / steps as f64
    };
    let obs = Observables::new(space, gen.dim);
    let psi0 = state.amplitudes.clone();
    let mut psi = psi0.clone();
    let dim = gen.dim;
    let zero = C64::new(0.0, 0.0);
    let mut k = [
        vec![zero; dim],
        vec![zero; dim],
        vec![zero; dim],
        vec![zero; dim],
    ];
    let mut tmp = vec![zero; dim];
    let minus_i = C64::new(0.0, -1.0);

    let mut traj = Trajectory::default();
    let record = |traj: &mut Trajectory, t: f64, psi: &[C64], nrm: f64| {
        traj.times.push(t);
        traj.overlaps.push(inner(&psi0, psi));
        traj.norms.push(nrm);
        traj.excited_pop
            .push(Observables::expect(&obs.excited, psi));
        traj.photon_num.push(Observables::expect(&obs.photons, psi));
    };
    record(&mut traj, 0.0, &psi, norm(&psi));

    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        // k1 = −i H(t) ψ
        gen.apply(t, &psi, &mut k[0]);
        for (i, v) in tmp.iter_mut().enumerate() {
            k[0][i] *= minus_i;
            *v = psi[i] + k[0][i] * (dt / 2.0);
        }
        gen.apply(t + dt / 2.0, &tmp, &mut k[1]);
        for (i, v) in tmp.iter_mut().enumerate() {
            k[1][i] *= minus_i;
            *v = psi[i] + k[1][i] * (dt / 2.0);
        }
        gen.apply(t + dt / 2.0, &tmp, &mut k[2]);
        for (i, v) in tmp.iter_mut().enumerate() {
            k[2][i] *= minus_i;
            *v = psi[i] + k[2][i] * dt;
        }
        gen.apply(t + dt, &tmp, &mut k[3]);
        for (i, p) in psi.iter_mut().enumerate() {
            k[3][i] *= minus_i;
            *p += (k[0][i] + (k[1][i] + k[2][i]) * 2.0 + k[3][i]) * (dt / 6.0);
        }

        let nrm = norm(&psi);
        let drift = (nrm - 1.0).abs();
        if drift > settings.norm_tol {
            return Err(Error::NormDrift {
                step,
                drift,
                tol: settings.norm_tol,
            });
        }
        if step % settings.sample_stride == 0 || step == steps {
            record(&mut traj, step as f64 * dt, &psi, nrm);
        }
    }
    Ok((traj, StateVector { amplitudes: psi }))
}

/// Accumulated phase `φ` with `⟨ψ(0)|ψ(t_final)⟩ = |o|·e^{−iφ}`, unwrapped
/// across the samples. A diagonal energy `E` yields `φ = E·t`.
pub fn extract_phase(traj: &Trajectory) -> Result<f64> {
    unwrapped_phases(traj).map(|p| p.last().copied().unwrap_or(0.0))
}

/// Unwrapped phase `φ(t)` at every sample.
pub fn unwrapped_phases(traj: &Trajectory) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(traj.len());
    let Some(first) = traj.overlaps.first() else {
        return Ok(out);
    };
    let mut acc = -first.arg();
    out.push(acc);
    for (i, w) in traj.overlaps.windows(2).enumerate() {
        let mut d = -(w[1].arg() - w[0].arg());
        if d > PI {
            d -= TAU;
        } else if d <= -PI {
            d += TAU;
        }
        if d.abs() > UNWRAP_GUARD {
            return Err(Error::Unwrap { index: i, jump: d });
        }
        acc += d;
        out.push(acc);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Channel, SparseOperator, Tone};

    fn static_gen(diag: &[f64]) -> HamiltonianGenerator {
        let d: Vec<C64> = diag.iter().map(|&e| C64::new(e, 0.0)).collect();
        HamiltonianGenerator {
            dim: diag.len(),
            static_part: SparseOperator::from_diagonal(&d),
            channels: vec![],
        }
    }

    fn synthetic(times: Vec<f64>, phases: Vec<f64>) -> Trajectory {
        let n = times.len();
        Trajectory {
            overlaps: phases.iter().map(|p| C64::from_polar(1.0, -p)).collect(),
            times,
            norms: vec![1.0; n],
            excited_pop: vec![0.0; n],
            photon_num: vec![0.0; n],
        }
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let gen = static_gen(&[0.0; 4]);
        let psi = StateVector {
            amplitudes: vec![
                C64::new(0.5, 0.5),
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.5),
                C64::new(0.0, 0.0),
            ],
        };
        let (traj, out) =
            propagate(&psi, &gen, None, 3.0, &PropagationSettings::default()).unwrap();
        assert_eq!(out, psi);
        assert_eq!(traj.max_norm_drift(), 0.0);
    }

    #[test]
    fn static_diagonal_phase() {
        let e = 0.7;
        let gen = static_gen(&[e, -1.0]);
        let psi = StateVector::basis(2, 0);
        let t_final = 1.0 / e;
        let s = PropagationSettings {
            dt: 1e-3,
            sample_stride: 10,
            norm_tol: 1e-8,
        };
        let (traj, _) = propagate(&psi, &gen, None, t_final, &s).unwrap();
        let phi = extract_phase(&traj).unwrap();
        assert!((phi - 1.0).abs() < 1e-10, "{phi}");
        assert!((traj.times.last().unwrap() - t_final).abs() < 1e-12);
    }

    #[test]
    fn phase_extraction_examples() {
        let t = synthetic(vec![0.0, 1.0], vec![0.0, 0.3]);
        assert!((extract_phase(&t).unwrap() - 0.3).abs() < 1e-15);
        let times: Vec<f64> = (0..=35).map(|i| i as f64 * 0.1).collect();
        let phases = times.clone();
        let t = synthetic(times, phases);
        assert!((extract_phase(&t).unwrap() - 3.5).abs() < 1e-12);
    }

    #[test]
    fn coarse_sampling_rejected() {
        let t = synthetic(vec![0.0, 1.0, 2.0], vec![0.0, 0.2, 2.4]);
        assert!(matches!(
            extract_phase(&t),
            Err(Error::Unwrap { index: 1, .. })
        ));
    }

    #[test]
    fn settings_checked() {
        let gen = HamiltonianGenerator {
            dim: 2,
            static_part: SparseOperator::zeros(2),
            channels: vec![Channel {
                label: "x".into(),
                op: SparseOperator::from_triplets(2, [(1, 0, C64::new(1.0, 0.0))]),
                op_adj: SparseOperator::from_triplets(2, [(0, 1, C64::new(1.0, 0.0))]),
                tones: vec![Tone {
                    amplitude: C64::new(0.1, 0.0),
                    freq: 20.0,
                }],
            }],
        };
        let psi = StateVector::basis(2, 0);
        let bad = PropagationSettings {
            dt: 0.05,
            ..Default::default()
        };
        assert!(matches!(
            propagate(&psi, &gen, None, 1.0, &bad),
            Err(Error::Settings(_))
        ));
        let zero_stride = PropagationSettings {
            sample_stride: 0,
            ..Default::default()
        };
        assert!(matches!(
            propagate(&psi, &gen, None, 1.0, &zero_stride),
            Err(Error::Settings(_))
        ));
    }

    #[test]
    fn norm_drift_reported() {
        // Non-Hermitian generator: amplitude grows.
        let gen = HamiltonianGenerator {
            dim: 1,
            static_part: SparseOperator::from_diagonal(&[C64::new(0.0, 0.1)]),
            channels: vec![],
        };
        let psi = StateVector::basis(1, 0);
        match propagate(&psi, &gen, None, 1.0, &PropagationSettings::default()) {
            Err(Error::NormDrift { step, .. }) => assert_eq!(step, 1),
            other => panic!("expected drift error, got {other:?}"),
        }
    }

    #[test]
    fn trajectory_csv_header() {
        let t = synthetic(vec![0.0, 1.0], vec![0.0, 0.3]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("t,re_overlap,im_overlap,norm,excited_pop,photon_num\n"));
        assert_eq!(s.lines().count(), 3);
    }
}
