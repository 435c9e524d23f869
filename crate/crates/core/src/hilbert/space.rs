use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default ceiling on the full-model dimension.
pub const DEFAULT_CAPACITY: usize = 10_000_000;

/// Atomic level; the discriminant is the local basis index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    A = 0,
    G = 1,
    E = 2,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::A, Level::G, Level::E];

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }
}

/// Truncated product space `(C³)^⊗N ⊗ (C^(n_max+1))^⊗N`.
///
/// Flat indices are row-major with all atoms before all modes; atom 1 is the
/// slowest-varying factor, and mode 1 the slowest among the modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceDescriptor {
    pub n_sites: usize,
    pub n_max: usize,
    pub total_dim: usize,
    mode_dim: usize,
}

impl SpaceDescriptor {
    pub const ATOM_DIM: usize = 3;

    /// Number of photon configurations, `(n_max+1)^N`.
    pub fn mode_dim(&self) -> usize {
        self.mode_dim
    }

    fn atom_stride(&self, j: usize) -> usize {
        3usize.pow((self.n_sites - j) as u32) * self.mode_dim
    }

    fn mode_stride(&self, j: usize) -> usize {
        (self.n_max + 1).pow((self.n_sites - j) as u32)
    }

    /// Flat index of `|atoms⟩ ⊗ |photons⟩`.
    ///
    /// *Panics* on length mismatch or occupations above the cutoff.
    pub fn basis_index(&self, atoms: &[Level], photons: &[usize]) -> usize {
        assert_eq!(atoms.len(), self.n_sites);
        assert_eq!(photons.len(), self.n_sites);
        let a = atoms.iter().fold(0, |acc, l| acc * 3 + *l as usize);
        let p = photons.iter().fold(0, |acc, &n| {
            assert!(
                n <= self.n_max,
                "occupation {n} above cutoff {}",
                self.n_max
            );
            acc * (self.n_max + 1) + n
        });
        a * self.mode_dim + p
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn decompose(&self, index: usize) -> (Vec<Level>, Vec<usize>) {
        let atoms = (1..=self.n_sites).map(|j| self.level(index, j)).collect();
        let photons = (1..=self.n_sites).map(|j| self.photons(index, j)).collect();
        (atoms, photons)
    }

    /// Level of atom `j` (one-based) in basis state `index`.
    pub fn level(&self, index: usize, j: usize) -> Level {
        Level::from_index(index / self.atom_stride(j) % 3)
    }

    /// Occupation of mode `j` (one-based) in basis state `index`.
    pub fn photons(&self, index: usize, j: usize) -> usize {
        index % self.mode_dim / self.mode_stride(j) % (self.n_max + 1)
    }

    /// Index obtained by changing atom `j` from its current level to `to`.
    pub fn with_level(&self, index: usize, j: usize, to: Level) -> usize {
        let from = self.level(index, j) as usize;
        index - from * self.atom_stride(j) + to as usize * self.atom_stride(j)
    }

    /// Index obtained by changing the occupation of mode `j` by `delta`, or
    /// `None` if it leaves `[0, n_max]`.
    pub fn shift_photons(&self, index: usize, j: usize, delta: isize) -> Option<usize> {
        let n = self.photons(index, j) as isize + delta;
        if n < 0 || n > self.n_max as isize {
            return None;
        }
        let stride = self.mode_stride(j) as isize;
        Some((index as isize + delta * stride) as usize)
    }

    /// Basis index of a computational state (levels in {a, g}) with all modes
    /// empty; `bits` uses the qubit ordering of the effective model (atom 1 is
    /// the most significant bit, 1 = g).
    pub fn qubit_state_index(&self, bits: usize) -> usize {
        let atoms: Vec<Level> = (0..self.n_sites)
            .map(|i| {
                if bits >> (self.n_sites - 1 - i) & 1 == 1 {
                    Level::G
                } else {
                    Level::A
                }
            })
            .collect();
        self.basis_index(&atoms, &vec![0; self.n_sites])
    }
}

pub fn build_space(n_sites: usize, n_max: usize) -> Result<SpaceDescriptor> {
    build_space_with_cap(n_sites, n_max, DEFAULT_CAPACITY)
}

pub fn build_space_with_cap(n_sites: usize, n_max: usize, cap: usize) -> Result<SpaceDescriptor> {
    if n_sites < 2 {
        return Err(Error::Domain(format!("n_sites must be ≥ 2, got {n_sites}")));
    }
    let dim = (3u128 * (n_max as u128 + 1)).checked_pow(n_sites as u32);
    match dim {
        Some(d) if d <= cap as u128 => {
            let mode_dim = (n_max + 1).pow(n_sites as u32);
            Ok(SpaceDescriptor {
                n_sites,
                n_max,
                total_dim: d as usize,
                mode_dim,
            })
        }
        Some(d) => Err(Error::Capacity { dim: d, cap }),
        None => Err(Error::Capacity {
            dim: u128::MAX,
            cap,
        }),
    }
}

/// Complex amplitudes over a [`SpaceDescriptor`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}
