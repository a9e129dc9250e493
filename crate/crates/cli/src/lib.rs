//! Command-line surface for the discriminator toolkit.
//!
//! Exit codes: `0` all checks passed, `1` checks failed, `2` usage or file
//! format error.

pub mod formats;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use discrim_core::discriminator::{
    build_optimal_equal, build_trivial, build_universal, PovmValidation,
};
use discrim_core::gram::INDEPENDENCE_TOL;
use discrim_core::{
    check_support_reduction, check_unambiguity_structure, closed_form_success, covariance_gram,
    gram_det, gram_matrix, run_experiment, success_probabilities, validate_povm,
    ExperimentConfig, ExperimentSummary, Povm, PovmKind, Tolerances,
};
use formats::{read_json, write_json, PovmFile, StateSetFile};
use serde_json::json;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default numeric tolerance for structural residuals.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Positivity slack for eigenvalue checks (separate from residual checks:
/// eigensolves of dim-1024 operators carry more round-off).
pub const PSD_TOL: f64 = 1e-9;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or inconsistent configuration.
    Usage(String),
    /// Unreadable or malformed input file.
    Format(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Format(msg) => write!(f, "format error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Parser, Debug)]
#[command(
    name = "discrim",
    about = "Build and verify programmable unambiguous discriminators",
    version
)]
pub struct Cli {
    /// Residual tolerance applied by checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    /// RNG seed for randomized commands.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Output path (POVM JSON for `build`, CSV for `bench`/`discriminate`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Emit a machine-readable JSON report on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct DeviceSpec {
    /// Number of program states.
    #[arg(short = 'n', long)]
    pub n: usize,

    /// Hilbert space dimension.
    #[arg(short = 'm', long)]
    pub m: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a discriminator and write it as a POVM file.
    Build {
        /// Device family: optimal-equal (m = n), universal (m > n), trivial.
        #[arg(long)]
        kind: String,
        #[command(flatten)]
        spec: DeviceSpec,
    },
    /// Check a POVM file: completeness, positivity, structure.
    Verify {
        /// Path to a POVM JSON file.
        povm: PathBuf,
    },
    /// Evaluate the outcome probability table for a program.
    Discriminate {
        /// Path to a POVM JSON file.
        povm: PathBuf,
        /// Path to a state-set JSON file.
        states: PathBuf,
        /// Restrict the report to one data state (1-based).
        #[arg(long)]
        data_index: Option<usize>,
    },
    /// Seeded Monte Carlo sweep; writes one CSV row per trial.
    Bench {
        #[arg(long)]
        kind: String,
        #[command(flatten)]
        spec: DeviceSpec,
        /// Number of random programs.
        #[arg(long, default_value_t = 500)]
        trials: usize,
    },
    /// Block spectrum of the covariance Gram matrix and the maximal scale.
    Spectrum {
        #[command(flatten)]
        spec: DeviceSpec,
    },
}

/// Runs a parsed invocation and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Build { kind, spec } => cmd_build(cli, kind, spec),
        Command::Verify { povm } => cmd_verify(cli, povm),
        Command::Discriminate {
            povm,
            states,
            data_index,
        } => cmd_discriminate(cli, povm, states, *data_index),
        Command::Bench { kind, spec, trials } => cmd_bench(cli, kind, spec, *trials),
        Command::Spectrum { spec } => cmd_spectrum(cli, spec),
    };
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECKS_FAILED,
        Err(e) => {
            eprintln!("{e}");
            EXIT_USAGE
        }
    }
}

fn parse_kind(kind: &str) -> Result<PovmKind, CliError> {
    PovmKind::parse(kind).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown kind {kind:?}; expected optimal-equal, universal, or trivial"
        ))
    })
}

fn build_kind(kind: PovmKind, n: usize, m: usize) -> Result<Povm, CliError> {
    let built = match kind {
        PovmKind::OptimalEqual => {
            if m != n {
                return Err(CliError::Usage(format!(
                    "optimal-equal requires m = n (got n={n}, m={m})"
                )));
            }
            build_optimal_equal(n)
        }
        PovmKind::Universal => build_universal(n, m),
        PovmKind::Trivial => build_trivial(n, m),
        PovmKind::Custom => {
            return Err(CliError::Usage(
                "custom devices are loaded from files, not built".into(),
            ))
        }
    };
    built.map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_build(cli: &Cli, kind: &str, spec: &DeviceSpec) -> Result<bool, CliError> {
    let kind = parse_kind(kind)?;
    let povm = build_kind(kind, spec.n, spec.m)?;
    let out = cli
        .out
        .as_ref()
        .ok_or_else(|| CliError::Usage("build requires --out <path>".into()))?;
    let file = PovmFile::from_povm(&povm);
    write_json(out, &file)?;
    let traces: Vec<f64> = povm.elements().iter().map(|e| e.trace()).collect();
    if cli.json {
        println!(
            "{}",
            json!({
                "kind": kind.as_str(),
                "n": spec.n,
                "m": spec.m,
                "dim": povm.layout().total_dim(),
                "c": povm.scale(),
                "element_traces": traces,
                "out": out.display().to_string(),
            })
        );
    } else {
        println!(
            "built {} device: n={} m={} dim={}",
            kind.as_str(),
            spec.n,
            spec.m,
            povm.layout().total_dim()
        );
        match povm.scale() {
            Some(c) => println!("c = {c:.12}"),
            None => println!("c = (none)"),
        }
        for (i, t) in traces.iter().enumerate() {
            println!("trace(element {i}) = {t:.12}");
        }
        println!("wrote {}", out.display());
    }
    Ok(true)
}

fn cmd_verify(cli: &Cli, path: &PathBuf) -> Result<bool, CliError> {
    let file: PovmFile = read_json(path)?;
    let (povm, kind) = file.into_povm()?;
    let validation: PovmValidation =
        validate_povm(&povm, PSD_TOL.max(cli.tol)).map_err(|e| CliError::Format(e.to_string()))?;
    let completeness_pass = validation.completeness_residual <= cli.tol;
    let psd_pass = validation.pass;
    let unambiguity = check_unambiguity_structure(&povm, cli.tol)
        .map_err(|e| CliError::Format(e.to_string()))?;
    let reduction = check_support_reduction(&povm, cli.tol)
        .map_err(|e| CliError::Format(e.to_string()))?;
    let unambiguity_pass = unambiguity.iter().all(|r| r.pass);
    let pass = completeness_pass && psd_pass && unambiguity_pass && reduction.pass;

    let report = json!({
        "kind": kind.as_str(),
        "n": povm.n(),
        "m": povm.m(),
        "tol": cli.tol,
        "psd_tol": PSD_TOL.max(cli.tol),
        "completeness_residual": validation.completeness_residual,
        "min_eig_per_element": validation.min_eig_per_element,
        "unambiguity": unambiguity.iter().map(|r| json!({
            "outcome": r.outcome,
            "residual": r.residual,
            "trace": r.trace,
            "pass": r.pass,
        })).collect::<Vec<_>>(),
        "reduction_scale_spread": reduction.scale_spread,
        "reduction_records": reduction.records.iter().map(|r| json!({
            "outcome": r.outcome,
            "fitted_scale": r.fitted_scale,
            "deviation": r.deviation,
        })).collect::<Vec<_>>(),
        "pass": pass,
    });
    if cli.json {
        println!("{report}");
    } else {
        println!(
            "verify {} (kind={}, n={}, m={})",
            path.display(),
            kind.as_str(),
            povm.n(),
            povm.m()
        );
        println!(
            "completeness residual = {:.3e} [{}]",
            validation.completeness_residual,
            if completeness_pass { "ok" } else { "FAIL" }
        );
        for (i, e) in validation.min_eig_per_element.iter().enumerate() {
            println!(
                "min eig(element {i}) = {:+.3e} [{}]",
                e,
                if *e >= -PSD_TOL.max(cli.tol) { "ok" } else { "FAIL" }
            );
        }
        for r in &unambiguity {
            println!(
                "reduced-support residual (outcome {}) = {:.3e} of trace {:.3e} [{}]",
                r.outcome,
                r.residual,
                r.trace,
                if r.pass { "ok" } else { "FAIL" }
            );
        }
        println!(
            "reduction scalar spread = {:.3e} [{}]",
            reduction.scale_spread,
            if reduction.pass { "ok" } else { "FAIL" }
        );
        println!("result: {}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(pass)
}

fn cmd_discriminate(
    cli: &Cli,
    povm_path: &PathBuf,
    states_path: &PathBuf,
    data_index: Option<usize>,
) -> Result<bool, CliError> {
    let povm_file: PovmFile = read_json(povm_path)?;
    let (povm, kind) = povm_file.into_povm()?;
    let state_file: StateSetFile = read_json(states_path)?;
    if state_file.m != povm.m() {
        return Err(CliError::Usage(format!(
            "dimension mismatch: device has m={}, states have m={}",
            povm.m(),
            state_file.m
        )));
    }
    let states = state_file.into_states()?;
    if states.len() != povm.n() {
        return Err(CliError::Usage(format!(
            "device expects {} program states, file has {}",
            povm.n(),
            states.len()
        )));
    }
    let n = povm.n();
    if let Some(j) = data_index {
        if j < 1 || j > n {
            return Err(CliError::Usage(format!(
                "data index {j} out of range 1..={n}"
            )));
        }
    }
    let table =
        success_probabilities(&povm, &states).map_err(|e| CliError::Usage(e.to_string()))?;
    let x = gram_matrix(&states).map_err(|e| CliError::Format(e.to_string()))?;
    let det = gram_det(&x).map_err(|e| CliError::Format(e.to_string()))?;
    let closed = match kind {
        PovmKind::Custom => None,
        k => Some(closed_form_success(&states, k).map_err(|e| CliError::Format(e.to_string()))?),
    };
    let dependent = det.abs() <= INDEPENDENCE_TOL;

    let rows: Vec<usize> = match data_index {
        Some(j) => vec![j - 1],
        None => (0..n).collect(),
    };
    let row_sums: Vec<f64> = rows
        .iter()
        .map(|&j| (0..=n).map(|i| table[(j, i)]).sum())
        .collect();

    if let Some(out) = &cli.out {
        let mut csv = String::from("data_state,outcome,probability\n");
        for &j in &rows {
            for i in 0..=n {
                csv.push_str(&format!("{},{},{:.17e}\n", j + 1, i, table[(j, i)]));
            }
        }
        std::fs::write(out, csv)
            .map_err(|e| CliError::Format(format!("cannot write {}: {e}", out.display())))?;
    }

    if cli.json {
        println!(
            "{}",
            json!({
                "kind": kind.as_str(),
                "n": n,
                "m": povm.m(),
                "gram_det": det,
                "closed_form": closed,
                "linearly_dependent": dependent,
                "rows": rows.iter().map(|&j| json!({
                    "data_state": j + 1,
                    "probabilities": (0..=n).map(|i| table[(j, i)]).collect::<Vec<f64>>(),
                })).collect::<Vec<_>>(),
                "row_sums": row_sums,
            })
        );
    } else {
        println!("gram det = {det:.12}");
        if let Some(p) = closed {
            println!("closed-form success ({}) = {p:.12}", kind.as_str());
        }
        if dependent {
            println!("note: linearly dependent program (success column is 0)");
        }
        println!("P[data state j][outcome i], outcome 0 = inconclusive:");
        for (&j, sum) in rows.iter().zip(&row_sums) {
            let cells: Vec<String> =
                (0..=n).map(|i| format!("{:.12}", table[(j, i)])).collect();
            println!("  j={} : {}  (sum {:.12})", j + 1, cells.join("  "), sum);
        }
    }
    Ok(true)
}

/// Fixed CSV schema for `bench`; asserted by the test suite.
pub const BENCH_CSV_HEADER: &str =
    "trial,det_X,p_s,p_measured_min,p_closed_form,max_error_entry,sandwich_lo,sandwich_hi,pass";

pub fn bench_csv(summary: &ExperimentSummary) -> String {
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for r in &summary.records {
        let p_min = r.measured.iter().copied().fold(f64::INFINITY, f64::min);
        out.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
            r.trial,
            r.gram_det,
            r.p_s,
            p_min,
            r.closed_form,
            r.max_error_entry,
            r.sandwich_lo,
            r.sandwich_hi,
            r.pass
        ));
    }
    out
}

fn cmd_bench(cli: &Cli, kind: &str, spec: &DeviceSpec, trials: usize) -> Result<bool, CliError> {
    let kind = parse_kind(kind)?;
    let mut cfg = ExperimentConfig::new(spec.n, spec.m, trials, cli.seed, kind);
    cfg.tolerances = Tolerances {
        unambiguity: cli.tol,
        closed_form: cli.tol,
        psd: PSD_TOL.max(cli.tol),
    };
    let summary = run_experiment(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(out) = &cli.out {
        std::fs::write(out, bench_csv(&summary))
            .map_err(|e| CliError::Format(format!("cannot write {}: {e}", out.display())))?;
    }
    let pass = summary.failures == 0;
    if cli.json {
        println!(
            "{}",
            json!({
                "kind": kind.as_str(),
                "n": spec.n,
                "m": spec.m,
                "trials": trials,
                "seed": cli.seed,
                "max_error_entry": summary.max_error_entry,
                "max_closed_form_residual": summary.max_closed_form_residual,
                "max_row_sum_residual": summary.max_row_sum_residual,
                "failures": summary.failures,
                "pass": pass,
            })
        );
    } else {
        println!(
            "bench {} n={} m={} trials={} seed={}",
            kind.as_str(),
            spec.n,
            spec.m,
            trials,
            cli.seed
        );
        println!("max misidentification entry = {:.3e}", summary.max_error_entry);
        println!(
            "max closed-form residual    = {:.3e}",
            summary.max_closed_form_residual
        );
        println!(
            "max row-sum residual        = {:.3e}",
            summary.max_row_sum_residual
        );
        println!(
            "records: {} pass, {} fail",
            summary.records.len() - summary.failures,
            summary.failures
        );
    }
    Ok(pass)
}

fn cmd_spectrum(cli: &Cli, spec: &DeviceSpec) -> Result<bool, CliError> {
    let report =
        covariance_gram(spec.n, spec.m).map_err(|e| CliError::Usage(e.to_string()))?;
    let n = spec.n as f64;
    let expected_gamma = (n + 1.0) / n;
    let expected_lambda = n;
    let gamma_ok = (report.gamma_max - expected_gamma).abs() <= 1e-9;
    let lambda_ok = match report.lambda_block_max {
        Some(l) => (l - expected_lambda).abs() <= 1e-9,
        None => true,
    };
    let expected_c = 1.0 / report.lambda_max;
    let pass = gamma_ok && lambda_ok && report.spectrum_residual <= cli.tol;

    if cli.json {
        println!(
            "{}",
            json!({
                "n": spec.n,
                "m": spec.m,
                "gamma_blocks": report.gamma_blocks.len(),
                "lambda_blocks": report.lambda_blocks.len(),
                "gamma_max": report.gamma_max,
                "lambda_block_max": report.lambda_block_max,
                "lambda_max": report.lambda_max,
                "c_max": report.c_max,
                "expected_gamma_max": expected_gamma,
                "expected_lambda_max": expected_lambda,
                "spectrum_residual": report.spectrum_residual,
                "pass": pass,
            })
        );
    } else {
        println!("covariance Gram spectrum for n={} m={}", spec.n, spec.m);
        println!(
            "gamma blocks: {} of dim {}x{}, lambda blocks: {}",
            report.gamma_blocks.len(),
            spec.n * spec.n,
            spec.n * spec.n,
            report.lambda_blocks.len()
        );
        println!(
            "lambda_max over gamma blocks  = {:.12} (expected (n+1)/n = {:.12})",
            report.gamma_max, expected_gamma
        );
        match report.lambda_block_max {
            Some(l) => println!(
                "lambda_max over lambda blocks = {l:.12} (expected n = {expected_lambda:.12})"
            ),
            None => println!("lambda blocks absent (no increasing (n+1)-tuples at this m)"),
        }
        println!("global lambda_max = {:.12}", report.lambda_max);
        println!("c_max = {:.12} (= 1/lambda_max = {expected_c:.12})", report.c_max);
        println!(
            "full-vs-block spectrum residual = {:.3e}",
            report.spectrum_residual
        );
        println!("result: {}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(pass)
}
