use num_complex::Complex64 as C64;

use super::fourier::fourier_mode_map;
use super::space::{Level, SpaceDescriptor};
use super::sparse::SparseOperator;
use crate::config::SystemConfig;
use crate::couplings::{mode_frequencies, reduced_couplings, EffectiveCouplings};
use crate::error::Result;

/// One oscillating contribution `amplitude · e^{i·freq·t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub amplitude: C64,
    pub freq: f64,
}

/// An operator together with all tones multiplying it; contributes
/// `c(t)·T + c(t)*·T†` with `c(t) = Σ tones`.
#[derive(Debug, Clone)]
pub struct Channel {
    pub label: String,
    pub op: SparseOperator,
    pub op_adj: SparseOperator,
    pub tones: Vec<Tone>,
}

impl Channel {
    fn new(label: String, op: SparseOperator, tones: Vec<Tone>) -> Self {
        let op_adj = op.adjoint();
        Self {
            label,
            op,
            op_adj,
            tones,
        }
    }

    pub fn coefficient(&self, t: f64) -> C64 {
        self.tones
            .iter()
            .map(|tone| tone.amplitude * C64::from_polar(1.0, tone.freq * t))
            .sum()
    }
}

/// `H(t) = H_static + Σ_r [c_r(t) T_r + h.c.]`.
#[derive(Debug, Clone)]
pub struct HamiltonianGenerator {
    pub dim: usize,
    pub static_part: SparseOperator,
    pub channels: Vec<Channel>,
}

impl HamiltonianGenerator {
    /// Writes `H(t)·psi` into `out`.
    pub fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        out.fill(C64::new(0.0, 0.0));
        self.static_part.matvec_acc(C64::new(1.0, 0.0), psi, out);
        for ch in &self.channels {
            let c = ch.coefficient(t);
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            ch.op.matvec_acc(c, psi, out);
            ch.op_adj.matvec_acc(c.conj(), psi, out);
        }
    }

    /// Materializes `H(t)`.
    pub fn evaluate(&self, t: f64) -> SparseOperator {
        let mut trip: Vec<(usize, usize, C64)> = self.static_part.triplets().collect();
        for ch in &self.channels {
            let c = ch.coefficient(t);
            trip.extend(ch.op.triplets().map(|(r, col, v)| (r, col, v * c)));
            trip.extend(
                ch.op_adj
                    .triplets()
                    .map(|(r, col, v)| (r, col, v * c.conj())),
            );
        }
        SparseOperator::from_triplets(self.dim, trip)
    }

    /// Largest `|freq|` over all tones.
    pub fn max_frequency(&self) -> f64 {
        self.channels
            .iter()
            .flat_map(|c| c.tones.iter())
            .fold(0.0, |m, t| m.max(t.freq.abs()))
    }

    /// Copy without the channels matching `pred`.
    pub fn without_channels(&self, pred: impl Fn(&Channel) -> bool) -> Self {
        Self {
            dim: self.dim,
            static_part: self.static_part.clone(),
            channels: self.channels.iter().filter(|c| !pred(c)).cloned().collect(),
        }
    }
}

/// `â_j^† â_{j+1} + â_j â_{j+1}^†` summed over the ring, scaled by `hop`.
///
/// The sum runs over `j = 1..=N` with `â_{N+1} = â_1`; for `N = 2` both terms
/// connect the same pair of cavities, so that link carries `2·hop`.
pub fn hopping_operator(space: &SpaceDescriptor, hop: f64) -> SparseOperator {
    let n = space.n_sites;
    let mut trip = Vec::new();
    for j in 1..=n {
        let next = j % n + 1;
        for idx in 0..space.total_dim {
            // â_j^† â_{j+1}
            if let Some(mid) = space.shift_photons(idx, next, -1) {
                let n_next = space.photons(idx, next) as f64;
                if let Some(out) = space.shift_photons(mid, j, 1) {
                    let n_j = space.photons(mid, j) as f64 + 1.0;
                    let v = hop * (n_next * n_j).sqrt();
                    trip.push((out, idx, C64::new(v, 0.0)));
                    trip.push((idx, out, C64::new(v, 0.0)));
                }
            }
        }
    }
    SparseOperator::from_triplets(space.total_dim, trip)
}

/// `â_mode |e⟩⟨g|_atom`: absorbs a photon from `mode` while exciting `atom`.
pub fn absorption_operator(space: &SpaceDescriptor, atom: usize, mode: usize) -> SparseOperator {
    let mut trip = Vec::new();
    for idx in 0..space.total_dim {
        if space.level(idx, atom) != Level::G {
            continue;
        }
        if let Some(lowered) = space.shift_photons(idx, mode, -1) {
            let n = space.photons(idx, mode) as f64;
            let out = space.with_level(lowered, atom, Level::E);
            trip.push((out, idx, C64::new(n.sqrt(), 0.0)));
        }
    }
    SparseOperator::from_triplets(space.total_dim, trip)
}

/// `|to⟩⟨from|` on `atom`, identity elsewhere.
pub fn transition_operator(
    space: &SpaceDescriptor,
    atom: usize,
    from: Level,
    to: Level,
) -> SparseOperator {
    let trip = (0..space.total_dim)
        .filter(|&idx| space.level(idx, atom) == from)
        .map(|idx| (space.with_level(idx, atom, to), idx, C64::new(1.0, 0.0)));
    SparseOperator::from_triplets(space.total_dim, trip)
}

/// `Σ_j |e⟩⟨e|_j + Σ_j â_j^† â_j`, conserved by the cavity terms.
pub fn excitation_number(space: &SpaceDescriptor) -> SparseOperator {
    let diag: Vec<C64> = (0..space.total_dim)
        .map(|idx| {
            let count: usize = (1..=space.n_sites)
                .map(|j| (space.level(idx, j) == Level::E) as usize + space.photons(idx, j))
                .sum();
            C64::new(count as f64, 0.0)
        })
        .collect();
    SparseOperator::from_diagonal(&diag)
}

fn real_tone(amplitude: f64, freq: f64) -> Tone {
    Tone {
        amplitude: C64::new(amplitude, 0.0),
        freq,
    }
}

fn drive_channels(cfg: &SystemConfig, space: &SpaceDescriptor) -> Vec<Channel> {
    let mut out = Vec::new();
    let ctrl_tones = cfg
        .rabi_ctrl
        .iter()
        .zip(&cfg.delta_ctrl)
        .map(|(&o, &d)| real_tone(o, d))
        .collect();
    out.push(Channel::new(
        "drive_1".into(),
        transition_operator(space, 1, Level::G, Level::E),
        ctrl_tones,
    ));
    for n in 2..=cfg.n_sites {
        out.push(Channel::new(
            format!("drive_{n}"),
            transition_operator(space, n, Level::G, Level::E),
            vec![real_tone(cfg.rabi_tgt[n - 2], cfg.tgt_detuning(n))],
        ));
    }
    out
}

/// Site-picture Hamiltonian: static ring hopping plus cavity and drive terms
/// oscillating at their detunings.
pub fn build_full_hamiltonian(cfg: &SystemConfig, space: &SpaceDescriptor) -> HamiltonianGenerator {
    assert_eq!(
        cfg.n_sites, space.n_sites,
        "space does not match configuration"
    );
    let mut channels = Vec::with_capacity(2 * cfg.n_sites);
    for j in 1..=cfg.n_sites {
        channels.push(Channel::new(
            format!("cavity_{j}"),
            absorption_operator(space, j, j),
            vec![real_tone(cfg.g_atom[j - 1], cfg.cav(j))],
        ));
    }
    channels.extend(drive_channels(cfg, space));
    HamiltonianGenerator {
        dim: space.total_dim,
        static_part: hopping_operator(space, cfg.hop),
        channels,
    }
}

/// Normal-mode picture, rotating with the hopping term: photon slot `k` of
/// `space` holds mode `b_k`, and the cavity coupling of atom `j` to mode `k`
/// carries `g_j e^{−i2πjk/N}/√N` at frequency `Δ_j^(c) − ω_k`. There is no
/// static part.
pub fn build_mode_hamiltonian(
    cfg: &SystemConfig,
    space: &SpaceDescriptor,
) -> Result<HamiltonianGenerator> {
    assert_eq!(
        cfg.n_sites, space.n_sites,
        "space does not match configuration"
    );
    let n = cfg.n_sites;
    let spec = mode_frequencies(n, cfg.hop)?;
    let f = fourier_mode_map(n)?;
    let mut channels = Vec::with_capacity(n * n + n);
    for j in 1..=n {
        for k in 1..=n {
            channels.push(Channel::new(
                format!("cavity_{j}_mode_{k}"),
                absorption_operator(space, j, k),
                vec![Tone {
                    amplitude: f[j - 1][k - 1] * cfg.g_atom[j - 1],
                    freq: cfg.cav(j) - spec.at(k),
                }],
            ));
        }
    }
    channels.extend(drive_channels(cfg, space));
    Ok(HamiltonianGenerator {
        dim: space.total_dim,
        static_part: SparseOperator::zeros(space.total_dim),
        channels,
    })
}

/// Whether atom `i` (one-based) is in `|g⟩` in qubit state `bits` of an
/// `n`-atom register (atom 1 is the most significant bit).
pub fn qubit_is_g(bits: usize, i: usize, n: usize) -> bool {
    bits >> (n - i) & 1 == 1
}

/// Diagonal of the reduced effective Hamiltonian over `{a, g}^N`.
pub fn effective_energies(coup: &EffectiveCouplings) -> Vec<f64> {
    let n = coup.n_sites();
    (0..1usize << n)
        .map(|bits| {
            let ctrl = qubit_is_g(bits, 1, n);
            let mut e = 0.0;
            for j in 2..=n {
                let tgt = qubit_is_g(bits, j, n);
                if ctrl {
                    e += coup.zeta_prime[j - 2];
                }
                if tgt {
                    e += coup.xi_prime[j - 2];
                }
                if ctrl && tgt {
                    e += coup.lambda_prime[j - 2];
                }
            }
            e
        })
        .collect()
}

/// Reduced effective Hamiltonian as a diagonal operator on the qubit space.
/// Photon-number-dependent Stark terms vanish on the mode vacuum and are dropped.
pub fn build_effective_hamiltonian(cfg: &SystemConfig) -> Result<SparseOperator> {
    let coup = reduced_couplings(cfg)?;
    let diag: Vec<C64> = effective_energies(&coup)
        .into_iter()
        .map(|e| C64::new(e, 0.0))
        .collect();
    Ok(SparseOperator::from_diagonal(&diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::space::build_space;

    #[test]
    fn hermitian_at_zero() {
        let cfg = SystemConfig::paper_n3();
        let space = build_space(3, 1).unwrap();
        let h = build_full_hamiltonian(&cfg, &space).evaluate(0.0);
        assert!(h.hermiticity_defect() <= 1e-12 * h.max_abs());
    }

    #[test]
    fn drive_matrix_element_at_zero() {
        let cfg = SystemConfig::paper_n3();
        let space = build_space(3, 1).unwrap();
        let h = build_full_hamiltonian(&cfg, &space).evaluate(0.0);
        let g = space.basis_index(&[Level::G, Level::A, Level::A], &[0; 3]);
        let e = space.basis_index(&[Level::E, Level::A, Level::A], &[0; 3]);
        assert_eq!(h.get(e, g), C64::new(2.0, 0.0));
    }

    #[test]
    fn hopping_element() {
        let cfg = SystemConfig::paper_n3();
        let space = build_space(3, 1).unwrap();
        let h = build_full_hamiltonian(&cfg, &space).evaluate(0.0);
        for j in 1..=3 {
            let next = j % 3 + 1;
            let mut from = [0; 3];
            from[j - 1] = 1;
            let mut to = [0; 3];
            to[next - 1] = 1;
            let a = space.basis_index(&[Level::A; 3], &from);
            let b = space.basis_index(&[Level::A; 3], &to);
            assert_eq!(h.get(b, a), C64::new(0.5, 0.0));
        }
    }

    #[test]
    fn two_site_ring_doubles_link() {
        let space = build_space(2, 1).unwrap();
        let h = hopping_operator(&space, 0.5);
        let a = space.basis_index(&[Level::A; 2], &[1, 0]);
        let b = space.basis_index(&[Level::A; 2], &[0, 1]);
        assert_eq!(h.get(b, a), C64::new(1.0, 0.0));
    }

    #[test]
    fn effective_diagonal_n3() {
        let cfg = SystemConfig::paper_n3();
        let coup = reduced_couplings(&cfg).unwrap();
        let h = build_effective_hamiltonian(&cfg).unwrap();
        assert_eq!(h.dim(), 8);
        let d = h.diagonal();
        assert_eq!(d[0], C64::new(0.0, 0.0));
        assert!(d.iter().all(|z| z.im == 0.0));
        // |g, g, a⟩ = bits 0b110
        let expected =
            coup.zeta_prime[0] + coup.zeta_prime[1] + coup.xi_prime[0] + coup.lambda_prime[0];
        assert!((d[0b110].re - expected).abs() < 1e-16);
        // |a, g, g⟩: no control, no conditional term
        assert!((d[0b011].re - coup.xi_prime[0] - coup.xi_prime[1]).abs() < 1e-16);
    }
}
