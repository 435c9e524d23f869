//! Selection of the free detuning pairs so that every conditional coupling
//! equals the anchor coupling `Λ′_{1,2}`.
//!
//! `Λ′_{1,j}` depends only on pair `j`, so each unknown is a 1-D root-finding
//! problem in `x = Δ_1^(j−1)`, with `Δ_j = x + Δ_j^(c) − Δ_1^(c)` keeping the
//! pair on resonance. Under that pairing every off-resonance separation
//! between pairs `i` and `j` reduces to `|x_i − x_j|`.

use std::io::Write;

use rayon::prelude::*;

use crate::config::SystemConfig;
use crate::couplings::{
    condition_ratios, conditional_coupling, mode_frequencies, ConditionReport, Thresholds,
};
use crate::dynamics::sig6;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    /// Shared parameters; the detunings of pairs `3..=N` are ignored.
    pub base: SystemConfig,
    /// `Δ_1^(1)`; `Δ_2` follows from the pairing.
    pub anchor: f64,
    /// Search interval for `x` of each unknown pair `j = 3..=N`.
    pub brackets: Vec<(f64, f64)>,
    pub min_separation: f64,
    pub grid_step: f64,
    pub root_tol: f64,
    pub thresholds: Thresholds,
}

impl DesignProblem {
    /// Default half-width of the search bracket around the anchor, in `g`.
    pub const BRACKET_HALF_WIDTH: f64 = 8.0;

    pub fn new(base: SystemConfig, anchor: f64) -> Self {
        let unknowns = base.n_sites.saturating_sub(2);
        let w = Self::BRACKET_HALF_WIDTH;
        Self {
            base,
            anchor,
            brackets: vec![(anchor - w, anchor + w); unknowns],
            min_separation: 0.25,
            grid_step: 0.01,
            root_tol: 1e-6,
            thresholds: Thresholds::default(),
        }
    }

    /// Base config with pair `j` set to `x` under resonant pairing.
    pub fn with_pair(&self, mut cfg: SystemConfig, j: usize, x: f64) -> SystemConfig {
        cfg.delta_ctrl[j - 2] = x;
        cfg.delta_tgt[j - 2] = x + cfg.cav(j) - cfg.cav(1);
        cfg
    }

    fn anchored(&self) -> SystemConfig {
        self.with_pair(self.base.clone(), 2, self.anchor)
    }

    fn bracket(&self, j: usize) -> Result<(f64, f64)> {
        let (lo, hi) = *self
            .brackets
            .get(j.wrapping_sub(3))
            .ok_or_else(|| Error::Domain(format!("no bracket for pair {j}")))?;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Domain(format!(
                "invalid bracket [{lo}, {hi}] for pair {j}"
            )));
        }
        Ok((lo, hi))
    }

    /// `x` values where a denominator of `Λ′_{1,j}(x)` vanishes.
    fn poles(&self) -> Result<Vec<f64>> {
        let spec = mode_frequencies(self.base.n_sites, self.base.hop)?;
        let mut p: Vec<f64> = spec.omega.iter().map(|w| self.base.cav(1) - w).collect();
        p.push(0.0);
        // Δ_j = 0 is x = Δ_1^(c) − Δ_j^(c).
        for j in 3..=self.base.n_sites {
            p.push(self.base.cav(1) - self.base.cav(j));
        }
        Ok(p)
    }
}

/// A root of the mismatch that was not selected.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRoot {
    pub delta: f64,
    pub reason: String,
}

/// `Λ′_{1,j}(x) − Λ′_{1,2}(anchor)`.
pub fn coupling_mismatch(problem: &DesignProblem, j: usize, x: f64) -> Result<f64> {
    if j < 3 || j > problem.base.n_sites {
        return Err(Error::Domain(format!("pair {j} is not an unknown")));
    }
    let anchored = problem.anchored();
    let target = conditional_coupling(&anchored, 2)?;
    Ok(conditional_coupling(&problem.with_pair(anchored, j, x), j)? - target)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignRow {
    pub j: usize,
    pub solved_delta: f64,
    pub mismatch_residual: f64,
    pub min_separation_achieved: f64,
    pub rejected_roots: Vec<RejectedRoot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignOutcome {
    pub config: SystemConfig,
    pub rows: Vec<DesignRow>,
    pub conditions: ConditionReport,
}

impl DesignOutcome {
    /// Columns `j, solved_delta, mismatch_residual, min_separation_achieved,
    /// rejected_roots`; rejected roots are `;`-separated.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "j,solved_delta,mismatch_residual,min_separation_achieved,rejected_roots"
        )?;
        for r in &self.rows {
            let rejected = r
                .rejected_roots
                .iter()
                .map(|x| sig6(x.delta))
                .collect::<Vec<_>>()
                .join(";");
            writeln!(
                w,
                "{},{},{},{},{}",
                r.j,
                sig6(r.solved_delta),
                sig6(r.mismatch_residual),
                sig6(r.min_separation_achieved),
                rejected
            )?;
        }
        Ok(())
    }
}

/// All roots of the mismatch for pair `j`, ascending. Grid intervals that
/// contain a pole are skipped, so pole sign flips are never reported.
pub fn mismatch_roots(problem: &DesignProblem, j: usize) -> Result<Vec<f64>> {
    let (lo, hi) = problem.bracket(j)?;
    if !(problem.grid_step > 0.0) || !(problem.root_tol > 0.0) {
        return Err(Error::Domain(
            "grid_step and root_tol must be positive".into(),
        ));
    }
    let poles = problem.poles()?;
    let f = |x: f64| {
        coupling_mismatch(problem, j, x)
            .ok()
            .filter(|v| v.is_finite())
    };
    let steps = ((hi - lo) / problem.grid_step).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| (lo + i as f64 * problem.grid_step).min(hi))
        .collect();
    let values: Vec<Option<f64>> = grid.iter().map(|&x| f(x)).collect();

    let mut roots = Vec::new();
    for i in 0..grid.len() {
        let Some(va) = values[i] else { continue };
        if va == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        let Some(&Some(vb)) = values.get(i + 1) else {
            continue;
        };
        let (a, b) = (grid[i], grid[i + 1]);
        if vb == 0.0 || va.signum() == vb.signum() || poles.iter().any(|p| (a..=b).contains(p)) {
            continue;
        }
        roots.push(bisect(&f, a, va, b, problem.root_tol));
    }
    Ok(roots)
}

fn bisect(f: &impl Fn(f64) -> Option<f64>, mut a: f64, mut fa: f64, mut b: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        let Some(fm) = f(m) else { break };
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Solves every unknown pair. Roots are found in parallel; selection runs in
/// ascending `j` so that each pair keeps its distance from the anchor and from
/// the pairs already chosen. Among admissible roots the one with the largest
/// minimum separation wins.
pub fn equalize_couplings(problem: &DesignProblem) -> Result<DesignOutcome> {
    let n = problem.base.n_sites;
    if n < 2 {
        return Err(Error::Domain(format!("n_sites must be ≥ 2, got {n}")));
    }
    if problem.brackets.len() != n - 2 {
        return Err(Error::Domain(format!(
            "{} brackets for {} unknown pairs",
            problem.brackets.len(),
            n - 2
        )));
    }
    let all_roots: Vec<Vec<f64>> = (3..=n)
        .into_par_iter()
        .map(|j| mismatch_roots(problem, j))
        .collect::<Result<_>>()?;

    let mut cfg = problem.anchored();
    let mut fixed = vec![(2usize, problem.anchor)];
    let mut rows = Vec::with_capacity(n - 2);
    for (j, roots) in (3..=n).zip(all_roots) {
        let mut best: Option<(f64, f64)> = None;
        let mut rejected = Vec::new();
        for x in roots {
            let (sep, nearest) = fixed.iter().map(|&(i, xi)| ((x - xi).abs(), i)).fold(
                (f64::INFINITY, 0),
                |acc, v| if v.0 < acc.0 { v } else { acc },
            );
            if sep < problem.min_separation {
                rejected.push(RejectedRoot {
                    delta: x,
                    reason: format!(
                        "separation {} from pair {nearest} below {}",
                        sig6(sep),
                        problem.min_separation
                    ),
                });
                continue;
            }
            match best {
                Some((bx, bs)) if bs >= sep => rejected.push(RejectedRoot {
                    delta: x,
                    reason: format!("separation {} smaller than at x = {}", sig6(sep), sig6(bx)),
                }),
                Some((bx, bs)) => {
                    rejected.push(RejectedRoot {
                        delta: bx,
                        reason: format!("separation {} smaller than at x = {}", sig6(bs), sig6(x)),
                    });
                    best = Some((x, sep));
                }
                None => best = Some((x, sep)),
            }
        }
        let Some((x, sep)) = best else {
            return Err(Error::DesignInfeasible {
                target: j,
                rejected,
            });
        };
        rejected.sort_by(|a, b| a.delta.total_cmp(&b.delta));
        cfg = problem.with_pair(cfg, j, x);
        fixed.push((j, x));
        rows.push(DesignRow {
            j,
            solved_delta: x,
            mismatch_residual: coupling_mismatch(problem, j, x)?,
            min_separation_achieved: sep,
            rejected_roots: rejected,
        });
    }
    let conditions = condition_ratios(&cfg, problem.thresholds);
    Ok(DesignOutcome {
        config: cfg,
        rows,
        conditions,
    })
}
