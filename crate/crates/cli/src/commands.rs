//! Subcommand implementations. Each returns the table to emit.

use std::path::Path;

use energy_simo::channel::sigma_from_snr;
use energy_simo::decode::AssumedStats;
use energy_simo::design::{
    ask_constellation, design_exact, design_moments, design_robust, equalized_regions, min_distance_constellation, pam_constellation,
};
use energy_simo::montecarlo::{histogram, min_antennas, simulate, MinAntennas, Scheme, SimReport, SimScenario};
use energy_simo::rates::{chernoff_ser_bound, error_exponent, level_exponents};
use energy_simo::{ChannelSpec, Constellation, DesignConfig, RobustOutcome, UncertaintyBox};
use serde_json::{json, Value};

use crate::config::{ChannelBlock, ChannelKind, ExperimentConfig, Method, SchemeKind};
use crate::error::CliError;
use crate::table::{Cell, Table};

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Fading law and noise power described by a channel block.
pub fn resolve_channel(block: &ChannelBlock, field: &str) -> Result<(ChannelSpec, f64), CliError> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| config_err(format!("{field}.{name}: required for kind {:?}", block.kind)));
    let spec = match block.kind {
        ChannelKind::Rayleigh => ChannelSpec::rayleigh(),
        ChannelKind::Rician => ChannelSpec::rician(need(block.K_dB, "K_dB")?)?,
        ChannelKind::Nakagami => match (block.m, block.K_dB) {
            (Some(m), _) => ChannelSpec::nakagami(m)?,
            (None, Some(k)) => ChannelSpec::nakagami_matched(k)?,
            (None, None) => return Err(config_err(format!("{field}.m: required for kind nakagami (or give K_dB)"))),
        },
        ChannelKind::Moments => ChannelSpec::moments_only(need(block.alpha1, "alpha1")?)?,
    };
    let sigma2 = sigma_from_snr(block.gamma_dB).map_err(|e| config_err(format!("{field}.gamma_dB: {e}")))?;
    Ok((spec, sigma2))
}

/// Constellation from `design.artifact` or a fresh design.
pub enum Designed {
    Ready {
        constellation: Constellation,
        t_star: Option<f64>,
        extras: Vec<(&'static str, Value)>,
    },
    Infeasible {
        epsilon: f64,
        mean_power: f64,
    },
}

pub fn build_constellation(cfg: &ExperimentConfig) -> Result<Designed, CliError> {
    if let Some(path) = &cfg.design.artifact {
        return read_artifact(path);
    }
    let (channel, sigma2) = resolve_channel(&cfg.channel, "channel")?;
    let d = &cfg.design;
    let dc = DesignConfig::new(d.L).with_budget(d.budget).with_epsilon(d.epsilon);
    dc.validate().map_err(|e| config_err(format!("design: {e}")))?;
    let from_outcome = |o: energy_simo::DesignOutcome| Designed::Ready {
        t_star: Some(o.t_star),
        extras: vec![("iterations", json!(o.iterations)), ("mean_power", json!(o.mean_power))],
        constellation: o.constellation,
    };
    Ok(match d.method {
        Method::Exact => from_outcome(design_exact(&channel, sigma2, &dc)?),
        Method::Moments => from_outcome(design_moments(channel.alpha1(), sigma2, &dc)?),
        Method::Robust => {
            let a = d.a_dB.ok_or_else(|| config_err("design.a_dB: required for the robust method"))?;
            let k_db = match cfg.channel.kind {
                ChannelKind::Rayleigh => f64::NEG_INFINITY,
                ChannelKind::Rician => cfg.channel.K_dB.ok_or_else(|| config_err("channel.K_dB: required"))?,
                other => return Err(config_err(format!("channel.kind: robust boxes are built from Rician K, not {other:?}"))),
            };
            let b = UncertaintyBox::from_rician_db(k_db, cfg.channel.gamma_dB, a)?;
            match design_robust(&b, &dc)? {
                RobustOutcome::Designed(o) => from_outcome(o),
                RobustOutcome::Infeasible { epsilon, mean_power } => Designed::Infeasible { epsilon, mean_power },
            }
        }
        Method::Mindist => Designed::Ready {
            constellation: min_distance_constellation(d.L, sigma2)?,
            t_star: None,
            extras: vec![],
        },
        Method::Ask => Designed::Ready {
            constellation: ask_constellation(d.L, sigma2)?,
            t_star: None,
            extras: vec![],
        },
    })
}

fn read_artifact(path: &Path) -> Result<Designed, CliError> {
    let where_ = path.display();
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("design.artifact: {where_}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| config_err(format!("design.artifact: {where_}: {e}")))?;
    if v["status"] == "infeasible" {
        return Err(config_err(format!("design.artifact: {where_} records an infeasible design")));
    }
    let floats = |key: &str| -> Result<Option<Vec<f64>>, CliError> {
        match &v[key] {
            Value::Null => Ok(None),
            other => serde_json::from_value(other.clone())
                .map(Some)
                .map_err(|e| config_err(format!("design.artifact: {where_}: field `{key}`: {e}"))),
        }
    };
    let levels = floats("levels")?.ok_or_else(|| config_err(format!("design.artifact: {where_}: missing `levels`")))?;
    let sigma2 = v["sigma2_design"]
        .as_f64()
        .ok_or_else(|| config_err(format!("design.artifact: {where_}: missing `sigma2_design`")))?;
    let constellation = match floats("boundaries")? {
        Some(b) => Constellation::new(levels, sigma2, b)?,
        None => Constellation::levels_only(levels, sigma2)?,
    };
    Ok(Designed::Ready {
        constellation,
        t_star: v["t_star"].as_f64(),
        extras: vec![],
    })
}

pub fn cmd_design(cfg: &ExperimentConfig) -> Result<(Table, bool), CliError> {
    let mut t = Table::new(&["symbol", "level", "upper_boundary", "right_exponent", "left_exponent"]);
    t.extras.push(("method", json!(cfg.design.method)));
    match build_constellation(cfg)? {
        Designed::Infeasible { epsilon, mean_power } => {
            t.extras.push(("status", json!("infeasible")));
            t.extras.push(("epsilon", json!(epsilon)));
            t.extras.push(("required_mean_power", json!(if mean_power.is_finite() { json!(mean_power) } else { json!("inf") })));
            Ok((t, false))
        }
        Designed::Ready {
            constellation,
            t_star,
            extras,
        } => {
            let (channel, _) = resolve_channel(&cfg.channel, "channel")?;
            let exps = match (constellation.has_regions(), channel.is_samplable()) {
                (true, true) => Some(level_exponents(&constellation, &channel, constellation.sigma2_design())?),
                _ => None,
            };
            let bounds = constellation.boundaries().ok();
            for (k, &p) in constellation.levels().iter().enumerate() {
                let upper = bounds.and_then(|b| b.get(k)).map_or(Cell::Empty, |&c| Cell::Num(c));
                let (l, r) = exps.as_ref().map_or((Cell::Empty, Cell::Empty), |e| (Cell::Num(e[k].0), Cell::Num(e[k].1)));
                t.push(vec![k.into(), p.into(), upper, r, l]);
            }
            t.extras.push(("status", json!("designed")));
            t.extras.push(("levels", json!(constellation.levels())));
            t.extras.push(("boundaries", json!(bounds)));
            t.extras.push(("sigma2_design", json!(constellation.sigma2_design())));
            if let Some(ts) = t_star {
                t.extras.push(("t_star", json!(ts)));
            }
            t.extras.extend(extras);
            Ok((t, true))
        }
    }
}

fn require_ready(d: Designed) -> Result<(Constellation, Option<f64>), CliError> {
    match d {
        Designed::Ready { constellation, t_star, .. } => Ok((constellation, t_star)),
        Designed::Infeasible { .. } => Err(CliError::Infeasible),
    }
}

/// Channel the symbols cross: `sim.true_channel` or the nominal block.
fn true_channel(cfg: &ExperimentConfig) -> Result<(ChannelSpec, f64), CliError> {
    match &cfg.sim.true_channel {
        Some(b) => resolve_channel(b, "sim.true_channel"),
        None => resolve_channel(&cfg.channel, "channel"),
    }
}

pub fn cmd_evaluate(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    if cfg.design.artifact.is_none() {
        return Err(config_err("design.artifact: evaluate needs a constellation file"));
    }
    let (c, t_star) = require_ready(build_constellation(cfg)?)?;
    let (channel, sigma2) = true_channel(cfg)?;
    let exps = level_exponents(&c, &channel, sigma2)?;
    let ie = error_exponent(&c, &channel, sigma2)?;
    let mut t = Table::new(&["n", "chernoff_bound", "error_exponent", "boundary", "right_exponent", "left_exponent"]);
    if let Some(ts) = t_star {
        t.extras.push(("t_star", json!(ts)));
    }
    for &n in &cfg.sim.n {
        let bound = chernoff_ser_bound(&c, &channel, sigma2, n)?;
        for k in 0..c.len().saturating_sub(1) {
            t.push(vec![n.into(), bound.into(), ie.into(), k.into(), exps[k].1.into(), exps[k + 1].0.into()]);
        }
    }
    Ok(t)
}

fn scheme(cfg: &ExperimentConfig) -> Result<Scheme, CliError> {
    let (nominal, sigma2) = resolve_channel(&cfg.channel, "channel")?;
    let stats = || AssumedStats::of_channel(&nominal, sigma2).map_err(|e| config_err(format!("channel: decoder statistics: {e}")));
    Ok(match cfg.sim.scheme {
        SchemeKind::PilotPam => Scheme::PilotPam {
            pam: pam_constellation(cfg.design.L).map_err(|e| config_err(format!("design.L: {e}")))?,
            stats: stats()?,
            block_len: cfg.sim.T,
            pilots: cfg.sim.T_l,
            pilot_amp: cfg.sim.pilot_amp,
        },
        kind => {
            let (c, _) = require_ready(build_constellation(cfg)?)?;
            match kind {
                SchemeKind::Energy if c.has_regions() => Scheme::EnergyRegions { constellation: c },
                SchemeKind::Energy => Scheme::EnergyRegions {
                    constellation: equalized_regions(c.levels(), &nominal, sigma2)?,
                },
                SchemeKind::NoncoherentMl => Scheme::NoncoherentMl {
                    levels: c.levels().to_vec(),
                    stats: stats()?,
                },
                _ => Scheme::AskEnergyMl {
                    levels: c.levels().to_vec(),
                    stats: stats()?,
                },
            }
        }
    })
}

fn scenario(cfg: &ExperimentConfig, n: usize) -> Result<SimScenario, CliError> {
    let (channel, sigma2) = true_channel(cfg)?;
    let s = SimScenario::new(scheme(cfg)?, channel, sigma2, n)
        .with_symbols(cfg.sim.symbols)
        .with_seed(cfg.sim.seed)
        .with_shards(cfg.sim.shards)
        .with_min_bit_errors(cfg.sim.min_bit_errors);
    s.validate().map_err(|e| config_err(format!("sim: {e}")))?;
    Ok(s)
}

const SIM_COLUMNS: [&str; 11] = [
    "n",
    "ser",
    "ber",
    "ser_ci_low",
    "ser_ci_high",
    "ber_ci_low",
    "ber_ci_high",
    "symbols",
    "symbol_errors",
    "bit_errors",
    "seed",
];

fn sim_row(n: usize, r: &SimReport) -> Vec<Cell> {
    vec![
        n.into(),
        r.ser.into(),
        r.ber.into(),
        r.ser_ci.0.into(),
        r.ser_ci.1.into(),
        r.ber_ci.0.into(),
        r.ber_ci.1.into(),
        r.symbols.into(),
        r.symbol_errors.into(),
        r.bit_errors.into(),
        r.seed.into(),
    ]
}

pub fn cmd_simulate(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let [n] = cfg.sim.n[..] else {
        return Err(config_err("sim.n: simulate takes exactly one antenna count; use sweep-n for a list"));
    };
    let report = simulate(&scenario(cfg, n)?)?;
    eprintln!("wall time {:.3}s", report.wall_time_secs);
    let mut t = Table::new(&SIM_COLUMNS);
    t.push(sim_row(n, &report));
    Ok(t)
}

pub fn cmd_sweep_n(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    if cfg.sim.n.is_empty() {
        return Err(config_err("sim.n: need at least one antenna count"));
    }
    let mut t = Table::new(&SIM_COLUMNS);
    for &n in &cfg.sim.n {
        let report = simulate(&scenario(cfg, n)?)?;
        eprintln!("n={n}: wall time {:.3}s", report.wall_time_secs);
        t.push(sim_row(n, &report));
    }
    Ok(t)
}

pub fn cmd_min_antennas(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let template = scenario(cfg, 1)?;
    let rate = template.scheme.effective_rate();
    let result = min_antennas(&template, cfg.sim.target_ber, cfg.sim.n_max).map_err(|e| config_err(format!("sim: {e}")))?;
    let mut t = Table::new(&["scheme", "L", "effective_rate", "n_star", "ber", "ber_ci_high", "symbols"]);
    let name = serde_json::to_value(cfg.sim.scheme).expect("scheme serializes");
    let name = name.as_str().unwrap_or_default();
    let (n_star, report) = match &result {
        MinAntennas::Found { n, report } => (Cell::Int(*n as u64), report),
        MinAntennas::NotReached { report, .. } => (Cell::Text("NOT_REACHED".into()), report),
    };
    t.push(vec![
        name.into(),
        cfg.design.L.into(),
        rate.into(),
        n_star,
        report.ber.into(),
        report.ber_ci.1.into(),
        report.symbols.into(),
    ]);
    Ok(t)
}

pub fn cmd_histogram(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let (c, _) = require_ready(build_constellation(cfg)?)?;
    let (nominal, nominal_s2) = resolve_channel(&cfg.channel, "channel")?;
    let c = if c.has_regions() { c } else { equalized_regions(c.levels(), &nominal, nominal_s2)? };
    let (channel, sigma2) = true_channel(cfg)?;
    let n = *cfg.sim.n.first().ok_or_else(|| config_err("sim.n: need an antenna count"))?;
    let h = histogram(&c, &channel, sigma2, n, cfg.sim.trials, cfg.sim.bins, cfg.sim.seed)
        .map_err(|e| config_err(format!("sim: {e}")))?;
    let mut t = Table::new(&["record", "symbol", "bin_left", "bin_right", "value"]);
    for (k, counts) in h.counts.iter().enumerate() {
        for (b, &count) in counts.iter().enumerate() {
            t.push(vec!["bin".into(), k.into(), h.edges[b].into(), h.edges[b + 1].into(), count.into()]);
        }
    }
    for (k, &b) in h.boundaries.iter().enumerate() {
        t.push(vec!["boundary".into(), k.into(), b.into(), b.into(), b.into()]);
    }
    for (k, &r) in h.receiver_points.iter().enumerate() {
        t.push(vec!["receiver_point".into(), k.into(), r.into(), r.into(), r.into()]);
    }
    for (k, &o) in h.outside.iter().enumerate() {
        t.push(vec!["outside_mass".into(), k.into(), Cell::Empty, Cell::Empty, o.into()]);
    }
    t.extras.push(("overlap", json!(h.overlap())));
    Ok(t)
}
