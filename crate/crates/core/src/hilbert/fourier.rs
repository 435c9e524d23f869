use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numeric::phase_factor;

/// Dense `N×N` map from normal modes to sites, `â_j = Σ_k F[j][k] b̂_k` with
/// `F[j][k] = e^{−i2πjk/N}/√N` for one-based `j, k` (stored at `j-1, k-1`).
pub fn fourier_mode_map(n_sites: usize) -> Result<Vec<Vec<C64>>> {
    if n_sites < 2 {
        return Err(Error::Domain(format!("n_sites must be ≥ 2, got {n_sites}")));
    }
    let norm = 1.0 / (n_sites as f64).sqrt();
    Ok((1..=n_sites)
        .map(|j| {
            (1..=n_sites)
                .map(|k| phase_factor((j * k) as i64, n_sites) * norm)
                .collect()
        })
        .collect())
}

/// Single-particle hopping matrix of the ring (`h[j][j±1] = hop`, with the
/// wrap-around link; links counted once per term of the ring sum).
pub fn ring_hopping_matrix(n_sites: usize, hop: f64) -> Vec<Vec<f64>> {
    let mut h = vec![vec![0.0; n_sites]; n_sites];
    for j in 0..n_sites {
        let next = (j + 1) % n_sites;
        h[j][next] += hop;
        h[next][j] += hop;
    }
    h
}
