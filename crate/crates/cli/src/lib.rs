//! `bellbench` command-line front end.

pub mod config;

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use bellbench_core::criteria::{
    chsh_value, classify, four_corner_bound, g_value, separability_test,
    ChshConfig as GenericConfig,
};
use bellbench_core::experiments::{self, format_sig9, FigureScan, Series, TOOL_VERSION};
use bellbench_core::hv::{self, bloch_vectors, SIGMA_MULTIPLIER};
use bellbench_core::optimizer::{maximize_chsh, maximize_g};
use bellbench_core::quantum::{marginal_expectation, pauli_expectation, Side};
use bellbench_core::{ChshConfig, Direction, Error};

pub use config::{parse_run_config, Command, ConfigError, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

/// Environment variable naming the default directory for CSV output.
pub const OUT_DIR_ENV: &str = "BELLBENCH_OUT";

/// Parses, validates and executes one invocation; returns the process exit code.
///
/// Panics inside the numerical code (broken invariants) map to exit code 2.
pub fn run<W: Write, E: Write>(
    argv: &[String],
    env_out_dir: Option<PathBuf>,
    out: &mut W,
    err: &mut E,
) -> i32 {
    let rc = match parse_run_config(argv.iter().cloned(), env_out_dir) {
        Ok(rc) => rc,
        Err(ConfigError::Clap(e)) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INVALID
                }
            };
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let result = panic::catch_unwind(AssertUnwindSafe(|| execute(&rc, out)));
    match result {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            let _ = writeln!(err, "internal assertion failure: {msg}");
            EXIT_INTERNAL
        }
    }
}

fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn fmt_dir(d: &Direction) -> String {
    format!("({}, {}, {})", fmt6(d.x()), fmt6(d.y()), fmt6(d.z()))
}

const PAIR_NAMES: [&str; 4] = ["G(a,b)  ", "G(a,b') ", "G(a',b) ", "G(a',b')"];

type CmdResult = Result<(), Error>;

pub fn execute<W: Write>(rc: &RunConfig, out: &mut W) -> CmdResult {
    match rc.command {
        Command::Chsh | Command::Classify => cmd_chsh(rc, out),
        Command::Gisin => cmd_gisin(rc, out),
        Command::HvSim => cmd_hv_sim(rc, out),
        Command::Optimize => cmd_optimize(rc, out),
        Command::Figure1 => {
            let scan = experiments::figure1_scan::<f64>(&rc.figure_configs, rc.n_points)?;
            emit_scan(rc, &scan, out)
        }
        Command::Figure2 => {
            let scan = experiments::figure2_scan::<f64>(&rc.figure_configs, rc.n_points)?;
            emit_scan(rc, &scan, out)
        }
        Command::Figure3 => {
            let scan = experiments::figure3_curve(&rc.rates, rc.n_points)?;
            writeln!(
                out,
                "G(phi) = {} cos(2 phi)",
                format_sig9(rc.rates.coefficient())
            )?;
            emit_scan(rc, &scan, out)
        }
    }
}

fn emit_scan<W: Write>(rc: &RunConfig, scan: &FigureScan, out: &mut W) -> CmdResult {
    let path = rc
        .out
        .as_deref()
        .expect("figure commands always have an output path");
    let meta = scan.save(path)?;
    writeln!(
        out,
        "wrote {} ({} rows, columns: {}) and {}",
        path.display(),
        scan.x.len(),
        std::iter::once(scan.x_label.as_str())
            .chain(scan.series.iter().map(|s| s.name.as_str()))
            .collect::<Vec<_>>()
            .join(","),
        meta.display()
    )?;
    Ok(())
}

/// Writes `quantity,value` rows for commands whose CSV output is optional.
fn write_quantities(path: &Path, rows: &[(String, f64)]) -> CmdResult {
    let mut text = String::from("quantity,value\n");
    for (k, v) in rows {
        text.push_str(&format!("{k},{}\n", format_sig9(*v)));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn state_of(rc: &RunConfig) -> &bellbench_core::TwoQubitState {
    &rc.state.as_ref().expect("validated: state present").1
}

fn cmd_chsh<W: Write>(rc: &RunConfig, out: &mut W) -> CmdResult {
    let (spec, _) = rc.state.as_ref().expect("validated");
    let state = state_of(rc);
    let (source, cfg) = rc.chsh.as_ref().expect("validated: config present");
    let verdict = classify(state, cfg, rc.tol)?;
    writeln!(out, "state: {spec}")?;
    writeln!(out, "configuration: {}", describe_config(source, cfg))?;
    writeln!(out, "<B> = {}", fmt6(verdict.chsh_value))?;
    writeln!(
        out,
        "CHSH verdict: {}   (|<B>| {} 2, Tsirelson bound {})",
        if verdict.chsh_violated {
            "violated"
        } else {
            "not violated"
        },
        if verdict.chsh_violated { ">" } else { "<=" },
        if verdict.tsirelson_ok {
            "respected"
        } else {
            "EXCEEDED"
        }
    )?;
    writeln!(out, "G verdicts (tolerance {:e}):", rc.tol)?;
    for (name, g) in PAIR_NAMES.iter().zip(verdict.g_values) {
        let zero = g.abs() <= rc.tol;
        writeln!(
            out,
            "  {name} = {:>10}   {}",
            fmt6(g),
            if zero {
                "zero (local realism holds)"
            } else {
                "nonzero (violates local realism)"
            }
        )?;
    }
    writeln!(out, "case: {}", verdict.case_label)?;
    if rc.command == Command::Classify {
        let (n1, n2) = bloch_vectors(state);
        let (lo, hi) = four_corner_bound(
            cfg.a.dot_array(&n1),
            cfg.a_prime.dot_array(&n1),
            cfg.b.dot_array(&n2),
            cfg.b_prime.dot_array(&n2),
        )?;
        writeln!(
            out,
            "separable-state CHSH range from marginals: [{}, {}]",
            fmt6(lo),
            fmt6(hi)
        )?;
    }
    if let Some(path) = &rc.out {
        let mut rows = vec![
            ("chsh_value".to_string(), verdict.chsh_value),
            (
                "chsh_violated".to_string(),
                f64::from(u8::from(verdict.chsh_violated)),
            ),
        ];
        for (tag, g) in ["g_ab", "g_abp", "g_apb", "g_apbp"]
            .iter()
            .zip(verdict.g_values)
        {
            rows.push((tag.to_string(), g));
        }
        write_quantities(path, &rows)?;
    }
    Ok(())
}

fn describe_config(source: &config::ConfigSource, cfg: &ChshConfig) -> String {
    match source {
        config::ConfigSource::Named(label) => format!("{label} ({})", label.angle_literals()),
        _ => format!(
            "a={} a'={} b={} b'={}",
            fmt_dir(&cfg.a),
            fmt_dir(&cfg.a_prime),
            fmt_dir(&cfg.b),
            fmt_dir(&cfg.b_prime)
        ),
    }
}

fn cmd_gisin<W: Write>(rc: &RunConfig, out: &mut W) -> CmdResult {
    let (spec, _) = rc.state.as_ref().expect("validated");
    let state = state_of(rc);
    let (a, b) = match (&rc.pair, &rc.chsh) {
        (Some(pair), _) => *pair,
        (None, Some((_, cfg))) => (cfg.a, cfg.b),
        (None, None) => unreachable!("validated: direction pair present"),
    };
    let g = g_value(state, &a, &b);
    let sep = separability_test(state, rc.tol)?;
    writeln!(out, "state: {spec}")?;
    writeln!(out, "a = {}  b = {}", fmt_dir(&a), fmt_dir(&b))?;
    writeln!(out, "G(a,b) = {}", fmt6(g))?;
    writeln!(
        out,
        "verdict: {}",
        if g.abs() <= rc.tol {
            "consistent with local realism"
        } else {
            "inconsistent with local realism"
        }
    )?;
    writeln!(
        out,
        "max |G| over all directions = {} ({})",
        fmt6(sep.max_abs_g),
        if sep.compatible {
            "every pair factorizes: local-realism-compatible"
        } else {
            "local-realism-incompatible"
        }
    )?;
    if !sep.compatible {
        writeln!(
            out,
            "witness: a = {}  b = {}",
            fmt_dir(&sep.witness_a),
            fmt_dir(&sep.witness_b)
        )?;
    }
    if let Some(path) = &rc.out {
        write_quantities(
            path,
            &[("g_ab".into(), g), ("max_abs_g".into(), sep.max_abs_g)],
        )?;
    }
    Ok(())
}

fn cmd_hv_sim<W: Write>(rc: &RunConfig, out: &mut W) -> CmdResult {
    let (spec, _) = rc.state.as_ref().expect("validated");
    let state = state_of(rc);
    let (source, cfg) = rc.chsh.as_ref().expect("validated");
    let run = hv::hv_chsh(&rc.model, state, cfg, rc.n_samples, rc.seed)?;
    writeln!(out, "state: {spec}")?;
    writeln!(out, "configuration: {}", describe_config(source, cfg))?;
    writeln!(
        out,
        "model: {} (n_samples={}, seed={})",
        rc.model_name, rc.n_samples, rc.seed
    )?;
    if !run.product_state {
        writeln!(
            out,
            "note: state is entangled; the model only sees its marginal Bloch vectors"
        )?;
    }
    writeln!(
        out,
        "<B>_HV = {} +- {}  (samples at +2: {}, at -2: {})",
        fmt6(run.estimate.mean),
        fmt6(run.estimate.std_error),
        run.plus_two,
        run.minus_two
    )?;
    writeln!(out, "<B>_QM = {}", fmt6(chsh_value(state, cfg)))?;

    let pairs = cfg.pairs();
    let mut hv_mean = Vec::new();
    let mut hv_se = Vec::new();
    let mut qm = Vec::new();
    let mut product = Vec::new();
    for (name, (a, b)) in ["E(a,b)  ", "E(a,b') ", "E(a',b) ", "E(a',b')"]
        .iter()
        .zip(pairs)
    {
        let r = hv::hv_correlation(&rc.model, state, &a, &b, rc.n_samples, rc.seed)?;
        let marg = marginal_expectation(state, &a, Side::First)
            * marginal_expectation(state, &b, Side::Second);
        let q = pauli_expectation(state, &a, &b);
        writeln!(
            out,
            "  {name}: HV {} +- {}   marginal product {}   QM {}   {}",
            fmt6(r.estimate.mean),
            fmt6(r.estimate.std_error),
            fmt6(marg),
            fmt6(q),
            if r.estimate.within(marg, SIGMA_MULTIPLIER) {
                "HV = marginal product"
            } else {
                "HV deviates from marginal product"
            }
        )?;
        hv_mean.push(r.estimate.mean);
        hv_se.push(r.estimate.std_error);
        qm.push(q);
        product.push(marg);
    }
    let scan = FigureScan {
        x_label: "pair_index".into(),
        y_label: "correlation".into(),
        x: vec![0.0, 1.0, 2.0, 3.0],
        series: vec![
            Series {
                name: "hv_mean".into(),
                y: hv_mean,
            },
            Series {
                name: "hv_std_error".into(),
                y: hv_se,
            },
            Series {
                name: "marginal_product".into(),
                y: product,
            },
            Series {
                name: "qm_correlation".into(),
                y: qm,
            },
        ],
        metadata: vec![
            ("config".into(), describe_config(source, cfg)),
            ("state_family".into(), spec.to_string()),
            ("seed".into(), rc.seed.to_string()),
            ("n_points".into(), "4".into()),
            ("tool_version".into(), TOOL_VERSION.into()),
            ("model".into(), rc.model_name.clone()),
            ("n_samples".into(), rc.n_samples.to_string()),
        ],
    };
    emit_scan(rc, &scan, out)
}

fn cmd_optimize<W: Write>(rc: &RunConfig, out: &mut W) -> CmdResult {
    let (spec, _) = rc.state.as_ref().expect("validated");
    let state = state_of(rc);
    let chsh = maximize_chsh(state, rc.planar);
    let g = maximize_g(state);
    let sep = separability_test(state, rc.tol)?;
    writeln!(out, "state: {spec}")?;
    writeln!(
        out,
        "max |<B>| = {} ({} search, {} sweeps) -> {}",
        fmt6(chsh.best_value),
        if rc.planar { "planar" } else { "general" },
        chsh.iterations,
        if chsh.best_value > 2.0 + 1e-6 {
            "violates CHSH for this configuration"
        } else {
            "no CHSH violation found"
        }
    )?;
    if let Some(cfg) = chsh.config() {
        print_config(out, cfg)?;
    }
    writeln!(
        out,
        "max |G(a,b)| = {} (largest singular value {})",
        fmt6(g.best_value),
        fmt6(sep.max_abs_g)
    )?;
    if let Some((a, b)) = g.pair() {
        writeln!(out, "  a = {}  b = {}", fmt_dir(&a), fmt_dir(&b))?;
    }
    if let Some(path) = &rc.out {
        write_quantities(
            path,
            &[
                ("max_abs_chsh".into(), chsh.best_value),
                ("max_abs_g".into(), g.best_value),
                ("g_singular_value".into(), sep.max_abs_g),
            ],
        )?;
    }
    Ok(())
}

fn print_config<W: Write>(out: &mut W, cfg: &GenericConfig<f64>) -> CmdResult {
    writeln!(
        out,
        "  a = {}  a' = {}\n  b = {}  b' = {}",
        fmt_dir(&cfg.a),
        fmt_dir(&cfg.a_prime),
        fmt_dir(&cfg.b),
        fmt_dir(&cfg.b_prime)
    )?;
    Ok(())
}
