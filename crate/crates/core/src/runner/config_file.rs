//! Plain-text configuration files.
//!
//! ```text
//! [system]
//! n_sites = 3
//! hop = 0.5
//! g_atom = 1, 1, 1
//! delta_cav = 20, 20, 20
//! rabi_ctrl = 1, 1
//! delta_ctrl = 18, 21.2842
//! rabi_tgt = 1, 1
//! delta_tgt = 18, 21.2842
//!
//! [decay]
//! gamma = 0.003
//! kappa = 0.003
//!
//! [simulation]
//! n_max = 1
//! ```
//!
//! Keys are the [`SystemConfig`] field names; section headers are optional
//! and only group keys. `#` starts a comment. Every key is required once.

use anyhow::{anyhow, bail, Context, Result};

use crate::config::{validate_config, SystemConfig};

const SECTIONS: [&str; 3] = ["system", "decay", "simulation"];

pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let mut n_sites = None;
    let mut hop = None;
    let mut g_atom = None;
    let mut delta_cav = None;
    let mut rabi_ctrl = None;
    let mut delta_ctrl = None;
    let mut rabi_tgt = None;
    let mut delta_tgt = None;
    let mut gamma = None;
    let mut kappa = None;
    let mut n_max = None;

    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ctx = || format!("line {}: {raw:?}", no + 1);
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            if !SECTIONS.contains(&name.trim()) {
                bail!("{}: unknown section [{}]", ctx(), name.trim());
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}: expected key = value", ctx()))?;
        let (key, value) = (key.trim(), value.trim());
        let scalar = || value.parse::<f64>().with_context(ctx);
        let list = || -> Result<Vec<f64>> {
            value
                .split(',')
                .map(|s| s.trim().parse::<f64>().with_context(ctx))
                .collect()
        };
        let slot_f = |slot: &mut Option<f64>| -> Result<()> { set_once(slot, scalar()?, key) };
        let slot_v = |slot: &mut Option<Vec<f64>>| -> Result<()> { set_once(slot, list()?, key) };
        match key {
            "n_sites" => set_once(&mut n_sites, value.parse::<usize>().with_context(ctx)?, key)?,
            "n_max" => set_once(&mut n_max, value.parse::<usize>().with_context(ctx)?, key)?,
            "hop" => slot_f(&mut hop)?,
            "gamma" => slot_f(&mut gamma)?,
            "kappa" => slot_f(&mut kappa)?,
            "g_atom" => slot_v(&mut g_atom)?,
            "delta_cav" => slot_v(&mut delta_cav)?,
            "rabi_ctrl" => slot_v(&mut rabi_ctrl)?,
            "delta_ctrl" => slot_v(&mut delta_ctrl)?,
            "rabi_tgt" => slot_v(&mut rabi_tgt)?,
            "delta_tgt" => slot_v(&mut delta_tgt)?,
            other => bail!("{}: unknown key {other:?}", ctx()),
        }
    }

    fn req<T>(v: Option<T>, key: &str) -> Result<T> {
        v.ok_or_else(|| anyhow!("missing key {key:?}"))
    }
    let cfg = SystemConfig {
        n_sites: req(n_sites, "n_sites")?,
        hop: req(hop, "hop")?,
        g_atom: req(g_atom, "g_atom")?,
        delta_cav: req(delta_cav, "delta_cav")?,
        rabi_ctrl: req(rabi_ctrl, "rabi_ctrl")?,
        delta_ctrl: req(delta_ctrl, "delta_ctrl")?,
        rabi_tgt: req(rabi_tgt, "rabi_tgt")?,
        delta_tgt: req(delta_tgt, "delta_tgt")?,
        gamma: req(gamma, "gamma")?,
        kappa: req(kappa, "kappa")?,
        n_max: req(n_max, "n_max")?,
    };
    let v = validate_config(&cfg);
    if !v.is_ok() {
        let msgs: Vec<String> = v.violations.iter().map(ToString::to_string).collect();
        bail!("invalid configuration: {}", msgs.join("; "));
    }
    Ok(cfg)
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str) -> Result<()> {
    if slot.replace(value).is_some() {
        bail!("duplicate key {key:?}");
    }
    Ok(())
}

/// Inverse of [`parse_config`]; values use the shortest round-trip form.
pub fn write_config(cfg: &SystemConfig) -> String {
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:?}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        "[system]\nn_sites = {}\nhop = {:?}\ng_atom = {}\ndelta_cav = {}\nrabi_ctrl = {}\n\
         delta_ctrl = {}\nrabi_tgt = {}\ndelta_tgt = {}\n\n[decay]\ngamma = {:?}\nkappa = {:?}\n\n\
         [simulation]\nn_max = {}\n",
        cfg.n_sites,
        cfg.hop,
        join(&cfg.g_atom),
        join(&cfg.delta_cav),
        join(&cfg.rabi_ctrl),
        join(&cfg.delta_ctrl),
        join(&cfg.rabi_tgt),
        join(&cfg.delta_tgt),
        cfg.gamma,
        cfg.kappa,
        cfg.n_max
    )
}

/// Sets the scalar addressed by `path`. Indices follow the physical labels:
/// `g_atom[j]`, `delta_cav[j]` for sites `1..=N`; `rabi_ctrl[m]`,
/// `delta_ctrl[m]` for drives `1..N`; `rabi_tgt[n]`, `delta_tgt[n]` for
/// targets `2..=N`; `pair[j]` moves `Δ_1^(j−1)` and `Δ_j` together, keeping
/// the pair on resonance.
pub fn set_field(cfg: &mut SystemConfig, path: &str, value: f64) -> Result<()> {
    let (name, index) = match path.split_once('[') {
        Some((name, rest)) => {
            let idx = rest
                .strip_suffix(']')
                .and_then(|i| i.trim().parse::<usize>().ok())
                .ok_or_else(|| anyhow!("malformed index in {path:?}"))?;
            (name.trim(), Some(idx))
        }
        None => (path.trim(), None),
    };
    let n = cfg.n_sites;
    let bad = || anyhow!("invalid parameter path {path:?}");
    let in_range = |i: usize, lo: usize, hi: usize| {
        if (lo..=hi).contains(&i) {
            Ok(i)
        } else {
            Err(bad())
        }
    };
    match (name, index) {
        ("hop", None) => cfg.hop = value,
        ("gamma", None) => cfg.gamma = value,
        ("kappa", None) => cfg.kappa = value,
        ("g_atom", Some(j)) => cfg.g_atom[in_range(j, 1, n)? - 1] = value,
        ("delta_cav", Some(j)) => cfg.delta_cav[in_range(j, 1, n)? - 1] = value,
        ("rabi_ctrl", Some(m)) => cfg.rabi_ctrl[in_range(m, 1, n - 1)? - 1] = value,
        ("delta_ctrl", Some(m)) => cfg.delta_ctrl[in_range(m, 1, n - 1)? - 1] = value,
        ("rabi_tgt", Some(t)) => cfg.rabi_tgt[in_range(t, 2, n)? - 2] = value,
        ("delta_tgt", Some(t)) => cfg.delta_tgt[in_range(t, 2, n)? - 2] = value,
        ("pair", Some(j)) => {
            let j = in_range(j, 2, n)?;
            cfg.delta_ctrl[j - 2] = value;
            cfg.delta_tgt[j - 2] = value + cfg.cav(j) - cfg.cav(1);
        }
        _ => return Err(bad()),
    }
    Ok(())
}
