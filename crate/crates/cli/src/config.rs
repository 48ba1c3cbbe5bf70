//! Key=value sweep configuration files and CSV re-parsing for plots.
//!
//! Recognized keys:
//!
//! ```text
//! problem = 2-sat | 3-sat | k-sat | 1-in-k-sat | k-xor-sat | gbp
//! k = 3
//! n = 16,24,32
//! c = 3.0,3.5,4.0        or a range  c = 3.0:0.5:6.0
//! samples = 300
//! seed = 1               (the --seed flag wins when given)
//! analyzers = spine,backbone,constraint-fracs,dpll,mus
//! probe_etas = 0.1,0.3
//! spine_n_max = 40
//! backbone_n_max = 10
//! dpll_n_max = 120
//! oracle_calls = 3000000
//! eo_restarts = 20
//! threshold_eps = 0.25
//! out = table.csv
//! ```

use std::path::PathBuf;

use anyhow::{bail, Context, Result};

use spine_core::gen::NamedFamily;
use spine_core::harness::{Analyzers, SweepBudgets, SweepConfig, SweepPoint, SweepProblem};

pub struct ParsedSweep {
    pub config: SweepConfig,
    pub out: Option<PathBuf>,
    pub threshold_eps: Option<f64>,
}

fn parse_f64_list(value: &str) -> Result<Vec<f64>> {
    if let Some((start, rest)) = value.split_once(':') {
        let (step, stop) = rest.split_once(':').context("range is start:step:stop")?;
        let (start, step, stop): (f64, f64, f64) = (start.parse()?, step.parse()?, stop.parse()?);
        if step <= 0.0 {
            bail!("range step must be positive");
        }
        let mut out = Vec::new();
        let mut x = start;
        while x <= stop + 1e-9 {
            out.push((x * 1e9).round() / 1e9);
            x += step;
        }
        Ok(out)
    } else {
        value
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(Into::into))
            .collect()
    }
}

pub fn parse_sweep_config(text: &str, seed_flag: u64) -> Result<ParsedSweep> {
    let mut problem: Option<SweepProblem> = None;
    let mut k: usize = 3;
    let mut family: Option<String> = None;
    let mut n_list: Vec<usize> = Vec::new();
    let mut densities: Vec<f64> = Vec::new();
    let mut samples: usize = 100;
    let mut seed: u64 = seed_flag;
    let mut analyzers = Analyzers::default();
    let mut budgets = SweepBudgets::default();
    let mut probe_etas: Vec<f64> = Vec::new();
    let mut out: Option<PathBuf> = None;
    let mut threshold_eps: Option<f64> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected key=value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "problem" => family = Some(value.to_string()),
            "k" => k = value.parse()?,
            "n" => {
                n_list = value
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(anyhow::Error::from))
                    .collect::<Result<_>>()?;
            }
            "c" => densities = parse_f64_list(value)?,
            "samples" => samples = value.parse()?,
            "seed" => seed = value.parse()?,
            "analyzers" => {
                for tok in value.split(',') {
                    match tok.trim() {
                        "spine" => analyzers.spine = true,
                        "backbone" => analyzers.backbone = true,
                        "constraint-fracs" => analyzers.constraint_fracs = true,
                        "dpll" => analyzers.dpll = true,
                        "mus" => analyzers.mus = true,
                        "" => {}
                        other => bail!("unknown analyzer `{other}`"),
                    }
                }
            }
            "probe_etas" => probe_etas = parse_f64_list(value)?,
            "spine_n_max" => budgets.spine_n_max = value.parse()?,
            "backbone_n_max" => budgets.backbone_n_max = value.parse()?,
            "dpll_n_max" => budgets.dpll_n_max = value.parse()?,
            "oracle_calls" => budgets.order.max_oracle_calls = value.parse()?,
            "eo_restarts" => budgets.eo_restarts = value.parse()?,
            "threshold_eps" => threshold_eps = Some(value.parse()?),
            "out" => out = Some(PathBuf::from(value)),
            other => bail!("line {}: unknown key `{other}`", lineno + 1),
        }
    }

    if let Some(name) = family {
        problem = Some(match name.as_str() {
            "gbp" => SweepProblem::Gbp,
            other => {
                let fam = NamedFamily::parse(other)
                    .with_context(|| format!("unknown problem `{other}`"))?;
                let k = if fam == NamedFamily::TwoSat { 2 } else { k };
                SweepProblem::BoolFamily { family: fam, k }
            }
        });
    }
    let problem = problem.context("config must set `problem`")?;
    let config = SweepConfig {
        problem,
        n_list,
        densities,
        samples,
        seed,
        analyzers,
        budgets,
        probe_etas,
    };
    config.validate()?;
    Ok(ParsedSweep {
        config,
        out,
        threshold_eps,
    })
}

/// Reads a sweep CSV back into plot-ready points (per-sample records are
/// not reconstructed).
pub fn parse_csv_points(text: &str) -> Result<Vec<SweepPoint>> {
    let mut lines = text.lines();
    let header = lines.next().context("empty CSV")?;
    if header != spine_core::harness::CSV_HEADER {
        bail!("unrecognized CSV header");
    }
    let parse_opt = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            Ok(Some(s.parse()?))
        }
    };
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            bail!("line {}: expected 13 fields", lineno + 2);
        }
        out.push(SweepPoint {
            problem: f[0].to_string(),
            n: f[1].parse()?,
            c: f[2].parse()?,
            samples: f[3].parse()?,
            p_sat: f[4].parse()?,
            f_s_mean: parse_opt(f[5])?,
            f_b_mean: parse_opt(f[6])?,
            f_sc_mean: parse_opt(f[7])?,
            f_bc_mean: parse_opt(f[8])?,
            dpll_nodes_median: parse_opt(f[9])?,
            width_median: parse_opt(f[10])?,
            mus_varfrac_mean: parse_opt(f[11])?,
            reason: f[12].to_string(),
            records: Vec::new(),
        });
    }
    Ok(out)
}
