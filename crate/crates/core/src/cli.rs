//! Command-line entry points behind the thin `bb84` binary.
//!
//! Subcommands: `simulate`, `bounds`, `sweep`, `verify`, `maxrate`,
//! `leakage`. Exit codes: 0 on success, 1 on usage/config errors, 2 when any
//! verification cell fails.
//!
//! All emitted floats carry 17 significant digits, and every output is a
//! deterministic function of (config, seed), so repeated runs are
//! byte-identical.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::protocol::{self, CodeFamily};
use crate::quantum::{self, TinyProtocol};
use crate::secbounds;
use crate::verify::{self, CodeWeightFixture, VerificationReport};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Parser)]
#[command(name = "bb84", version, about = "BB84 security toolkit", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to a `key = value` config file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master RNG seed (overrides the config).
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Trial count (overrides the config).
    #[arg(long, value_name = "N")]
    trials: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run Monte Carlo protocol instances; emit per-run records + a summary.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Print the security-parameter bundle for a config.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Vary one parameter over a grid; emit one CSV row per point.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Grid spec `key=lo:hi:steps` (steps = point count, endpoints
        /// inclusive).
        #[arg(long, value_name = "key=lo:hi:steps")]
        grid: String,
    },
    /// Run the Monte Carlo and golden verification suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Which suite: fictive | chernoff | code | quantum | all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Deliberately breaks the closed form's phase factor so the harness
        /// itself can be shown to catch a wrong build.
        #[arg(long, hide = true)]
        inject_sign_flip: bool,
    },
    /// Print the maximum tolerated error rate.
    Maxrate {
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive exact leakage enumeration at tiny photon counts.
    Leakage {
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(common: &Common) -> Result<RunConfig, String> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    Ok(cfg)
}

fn emit(common: &Common, text: &str) -> Result<(), String> {
    match &common.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn family_name(f: CodeFamily) -> String {
    match f {
        CodeFamily::Repetition { block_len } => format!("repetition{block_len}"),
        CodeFamily::Hamming74 => "hamming74".into(),
        CodeFamily::SystematicRandom { rows } => format!("systematic_random{rows}"),
    }
}

fn run_bounds(cfg: &RunConfig) -> Result<String, String> {
    let m_max = protocol::effective_m_max(&cfg.params, &cfg.channel())
        .map_err(|e| e.to_string())?;
    let params = secbounds::ProtocolParams {
        m_max,
        ..cfg.params.clone()
    };
    let b = secbounds::security_bundle(&params).map_err(|e| e.to_string())?;
    Ok(format!(
        "{{\"mu\":{},\"gamma\":{},\"eta\":{},\"lambda\":{},\"xi\":{},\"sigma\":{},\"f\":{},\"m_max\":{}}}\n",
        fmt_f64(b.mu),
        fmt_f64(b.gamma),
        fmt_f64(b.eta),
        fmt_f64(b.lambda),
        fmt_f64(b.xi),
        fmt_f64(b.sigma),
        fmt_f64(b.f),
        m_max
    ))
}

fn run_simulate(cfg: &RunConfig) -> Result<String, String> {
    use rayon::prelude::*;
    let channel = cfg.channel();
    let attack = cfg.attack();
    let family = cfg.family();
    let records: Vec<String> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let seed = cfg.seed.wrapping_add(t);
            let tr = protocol::run_protocol(&cfg.params, &channel, &attack, family, seed)
                .map_err(|e| e.to_string())?;
            let qber = if tr.t_set.is_empty() {
                0.0
            } else {
                tr.d_t as f64 / tr.t_set.len() as f64
            };
            Ok(format!(
                "{{\"trial\":{t},\"seed\":{seed},\"accepted\":{},\"m\":{},\"d_T\":{},\"n_omega\":{},\"n_E\":{},\"r\":{},\"d_prime\":{},\"e_errors\":{},\"qber_T\":{},\"key_agree\":{}}}\n",
                tr.accepted,
                tr.m,
                tr.d_t,
                tr.omega.len(),
                tr.e_set.len(),
                tr.r,
                tr.d_prime,
                tr.e_errors,
                fmt_f64(qber),
                tr.k_alice == tr.k_bob
            ))
        })
        .collect::<Result<_, String>>()?;
    let summary = protocol::run_batch(&cfg.params, &channel, &attack, family, cfg.trials, cfg.seed)
        .map_err(|e| e.to_string())?;
    let mut out = records.concat();
    write!(
        out,
        "{{\"summary\":{{\"trials\":{},\"accept_rate\":{},\"mean_qber_T\":{},\"key_agree_rate\":{},\"mean_m\":{}}}}}\n",
        summary.trials,
        fmt_f64(summary.accept_rate),
        fmt_f64(summary.mean_qber_t),
        fmt_f64(summary.key_agree_rate),
        fmt_f64(summary.mean_m)
    )
    .unwrap();
    Ok(out)
}

/// CSV header for `sweep` output.
pub const SWEEP_HEADER: &str = "n_photons,delta,p_t,beta,epsilon,tau,p_loss,p_err,attack,code_family,trials,seed,mu,gamma,eta,lambda,xi,sigma,f,m_max,accept_rate,mean_qber_T,key_agree_rate";

fn apply_grid_value(cfg: &mut RunConfig, key: &str, value: f64) -> Result<(), String> {
    match key {
        "delta" => cfg.params.delta = value,
        "p_t" => cfg.params.p_t = value,
        "beta" => cfg.params.beta = value,
        "epsilon" => cfg.params.epsilon = value,
        "tau" => cfg.params.tau = value,
        "p_err" => cfg.p_err = value,
        "p_loss" => cfg.p_loss = value,
        "p_attack" => cfg.p_attack = value,
        "n_photons" => cfg.params.n_photons = value.round() as usize,
        _ => {
            return Err(format!(
                "unsupported sweep key {key:?} (one of delta, p_t, beta, epsilon, tau, p_err, p_loss, p_attack, n_photons)"
            ))
        }
    }
    Ok(())
}

fn run_sweep(cfg: &RunConfig, grid: &str) -> Result<String, String> {
    let (key, rest) = grid
        .split_once('=')
        .ok_or_else(|| format!("grid spec {grid:?} is not key=lo:hi:steps"))?;
    let parts: Vec<&str> = rest.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err(format!("grid spec {grid:?} is not key=lo:hi:steps"));
    };
    let lo: f64 = lo.parse().map_err(|e| format!("bad grid lo: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("bad grid hi: {e}"))?;
    let steps: usize = steps.parse().map_err(|e| format!("bad grid steps: {e}"))?;
    if steps == 0 {
        return Err("grid needs at least one step".into());
    }

    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for i in 0..steps {
        let value = if steps == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (steps - 1) as f64
        };
        let mut point = cfg.clone();
        apply_grid_value(&mut point, key, value)?;
        let channel = point.channel();
        let m_max = protocol::effective_m_max(&point.params, &channel)
            .map_err(|e| e.to_string())?;
        let bundle_params = secbounds::ProtocolParams {
            m_max,
            ..point.params.clone()
        };
        let b = secbounds::security_bundle(&bundle_params).map_err(|e| e.to_string())?;
        let summary = protocol::run_batch(
            &point.params,
            &channel,
            &point.attack(),
            point.family(),
            point.trials,
            point.seed,
        )
        .map_err(|e| e.to_string())?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            point.params.n_photons,
            fmt_f64(point.params.delta),
            fmt_f64(point.params.p_t),
            fmt_f64(point.params.beta),
            fmt_f64(point.params.epsilon),
            fmt_f64(point.params.tau),
            fmt_f64(point.p_loss),
            fmt_f64(point.p_err),
            point.attack_kind,
            family_name(point.family()),
            point.trials,
            point.seed,
            fmt_f64(b.mu),
            fmt_f64(b.gamma),
            fmt_f64(b.eta),
            fmt_f64(b.lambda),
            fmt_f64(b.xi),
            fmt_f64(b.sigma),
            fmt_f64(b.f),
            m_max,
            fmt_f64(summary.accept_rate),
            fmt_f64(summary.mean_qber_t),
            fmt_f64(summary.key_agree_rate)
        )
        .unwrap();
    }
    Ok(out)
}

fn run_verify(
    cfg: &RunConfig,
    suite: &str,
    trials_override: Option<usize>,
    sign_flip: bool,
) -> Result<(String, bool), String> {
    let mut reports: Vec<VerificationReport> = Vec::new();
    let seed = cfg.seed;
    let trials = |default: u64| trials_override.map(|t| t as u64).unwrap_or(default);
    let want = |name: &str| suite == "all" || suite == name;
    let mut known = false;
    if want("fictive") {
        known = true;
        reports.push(
            verify::mc_fictive_test(0.05, 0.5, 0.2, &[200, 500, 1000], trials(100_000), seed)
                .map_err(|e| e.to_string())?,
        );
    }
    if want("chernoff") {
        known = true;
        reports.push(
            verify::mc_chernoff(25, 0.3, &[0.0, 0.1, 0.2], trials(100_000), seed)
                .map_err(|e| e.to_string())?,
        );
        reports.push(
            verify::mc_chernoff(200, 0.3, &[0.05, 0.1], trials(100_000), seed ^ 1)
                .map_err(|e| e.to_string())?,
        );
    }
    if want("code") {
        known = true;
        reports.push(
            verify::mc_code_weight(16, 2, 2, 0.25, trials(10_000), seed, CodeWeightFixture::RandomF)
                .map_err(|e| e.to_string())?,
        );
    }
    if want("quantum") {
        known = true;
        reports.push(verify::quantum_suite(seed, 50, sign_flip).map_err(|e| e.to_string())?);
    }
    if !known {
        return Err(format!(
            "unknown suite {suite:?} (one of fictive, chernoff, code, quantum, all)"
        ));
    }
    let all_pass = reports.iter().all(VerificationReport::all_pass);
    let mut out = String::new();
    for r in &reports {
        out.push_str(&r.render());
    }
    writeln!(out, "overall: {}", if all_pass { "PASS" } else { "FAIL" }).unwrap();
    Ok((out, all_pass))
}

fn run_leakage(cfg: &RunConfig) -> Result<String, String> {
    let f = cfg.matrix_from_key("leak_f").map_err(|e| e.to_string())?;
    let k = cfg.matrix_from_key("leak_k").map_err(|e| e.to_string())?;
    let tiny = TinyProtocol {
        n_photons: cfg.params.n_photons,
        p_t: cfg.params.p_t,
        delta: cfg.params.delta,
        f,
        k,
        attack: cfg.attack(),
        eve_knows_g: cfg.eve_knows_g,
    };
    let rep = quantum::exhaustive_leakage(&tiny).map_err(|e| e.to_string())?;
    let p_m: Vec<String> = rep
        .p_m
        .iter()
        .map(|(m, p)| format!("[{m},{}]", fmt_f64(*p)))
        .collect();
    Ok(format!(
        "{{\"leakage_bits\":{},\"exactly_zero\":{},\"p_accept\":{},\"branches\":{},\"views\":{},\"p_m\":[{}]}}\n",
        fmt_f64(rep.leakage_bits),
        rep.exactly_zero,
        fmt_f64(rep.p_accept),
        rep.branches,
        rep.views.len(),
        p_m.join(",")
    ))
}

/// Runs the CLI on explicit arguments; returns the process exit code.
pub fn cli_run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successful exits.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result: Result<(Common, String, i32), String> = (|| {
        match cli.command {
            Command::Simulate { common } => {
                let cfg = load_config(&common)?;
                let out = run_simulate(&cfg)?;
                Ok((common, out, 0))
            }
            Command::Bounds { common } => {
                let cfg = load_config(&common)?;
                let out = run_bounds(&cfg)?;
                Ok((common, out, 0))
            }
            Command::Sweep { common, grid } => {
                let cfg = load_config(&common)?;
                let out = run_sweep(&cfg, &grid)?;
                Ok((common, out, 0))
            }
            Command::Verify {
                common,
                suite,
                inject_sign_flip,
            } => {
                let cfg = load_config(&common)?;
                let (out, pass) = run_verify(&cfg, &suite, common.trials, inject_sign_flip)?;
                Ok((common, out, if pass { 0 } else { 2 }))
            }
            Command::Maxrate { common } => {
                let _ = load_config(&common)?;
                let delta_star = secbounds::max_tolerated_delta(1e-9).map_err(|e| e.to_string())?;
                Ok((common, format!("{}\n", fmt_f64(delta_star)), 0))
            }
            Command::Leakage { common } => {
                let cfg = load_config(&common)?;
                let out = run_leakage(&cfg)?;
                Ok((common, out, 0))
            }
        }
    })();
    match result {
        Ok((common, out, code)) => {
            if let Err(e) = emit(&common, &out) {
                eprintln!("error: {e}");
                return 1;
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
