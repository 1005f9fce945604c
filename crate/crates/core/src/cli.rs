//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 bad input.
//! In `--output json` mode standard output carries exactly one JSON document
//! (one per line for `search`); diagnostics go to standard error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::campaign::{check_sampling, theorem1_campaign, SamplingCheck};
use crate::classical::{
    three_value_counterexample, Classification, JointDistribution, THREE_VALUE_DEFECT,
};
use crate::quantum::bell_state;
use crate::quantum::Observable2;
use crate::rng::derive_seed;
use crate::separation::{
    bell_counterexample_observables, check_bell_counterexample, induced_joint_distribution,
    random_separation_instance, SeparationReport, Verdict,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check the Bell-state counterexample and the three-valued classical case
    ReproducePaper,
    /// Randomized check that zero covariance and independence coincide for two-valued pairs
    VerifyTheorem1,
    /// Classify a joint distribution file
    Analyze {
        /// JSON file: {"x_values": [...], "y_values": [...], "probs": [[...], ...]}
        input: PathBuf,
    },
    /// Generate entangled, uncorrelated observable pairs (JSON lines)
    Search,
    /// Monte-Carlo sampling of a distribution file, or of the counterexample's outcome table
    Sample { input: Option<PathBuf> },
}

#[derive(Debug, Parser)]
#[command(
    name = "covsep",
    version,
    about = "Covariance versus independence, classical and two-qubit"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Number of randomized trials (draws for `sample`)
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = parse_tol)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    output: OutputFormat,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let tol: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err("tolerance must be a positive finite number".into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub output: OutputFormat,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            trials: 100_000,
            seed: 0,
            tol: 1e-10,
            output: OutputFormat::Human,
        }
    }

    fn json(&self) -> bool {
        self.output == OutputFormat::Json
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let cfg = RunConfig {
        command: args.command,
        trials: args.trials,
        seed: args.seed,
        tol: args.tol,
        output: args.output,
    };
    execute(&cfg, out, err)
}

pub fn execute(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match &cfg.command {
        Command::ReproducePaper => {
            let (q, r) = bell_counterexample_observables();
            cmd_reproduce_paper(cfg, &q, &r, out, err)
        }
        Command::VerifyTheorem1 => cmd_verify_theorem1(cfg, out),
        Command::Analyze { input } => cmd_analyze(cfg, input, out, err),
        Command::Search => cmd_search(cfg, out, err),
        Command::Sample { input } => cmd_sample(cfg, input.as_deref(), out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "covsep: cannot write output: {e}");
            EXIT_FAILURE
        }
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn fmt_matrix(q: &Observable2) -> String {
    let cell = |i, j| {
        let z = q.get(i, j);
        if z.im == 0.0 {
            format!("{}", z.re)
        } else {
            format!("{}{:+}i", z.re, z.im)
        }
    };
    format!(
        "[[{}, {}], [{}, {}]]",
        cell(0, 0),
        cell(0, 1),
        cell(1, 0),
        cell(1, 1)
    )
}

fn write_table(out: &mut dyn Write, d: &JointDistribution) -> std::io::Result<()> {
    write!(out, "    {:>12}", "x \\ y")?;
    for y in d.y_values() {
        write!(out, " {y:>20.12}")?;
    }
    writeln!(out)?;
    for (x, row) in d.x_values().iter().zip(d.probs()) {
        write!(out, "    {x:>12.6}")?;
        for p in row {
            write!(out, " {p:>20.12}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn write_report(out: &mut dyn Write, report: &SeparationReport) -> std::io::Result<()> {
    writeln!(out, "  Q_A = {}", fmt_matrix(&report.q))?;
    writeln!(out, "  R_B = {}", fmt_matrix(&report.r))?;
    writeln!(out, "  E[XY]                  = {}", report.expectation_xy)?;
    writeln!(
        out,
        "  E[X]E[Y]               = {}   (E[X] = {}, E[Y] = {})",
        report.expectation_x * report.expectation_y,
        report.expectation_x,
        report.expectation_y
    )?;
    writeln!(out, "  Cov[X,Y]               = {:e}", report.quantum_cov)?;
    writeln!(
        out,
        "  Schmidt coefficients   = ({}, {})",
        report.schmidt.0, report.schmidt.1
    )?;
    writeln!(out, "  separable              = {}", report.separable)?;
    writeln!(out, "  induced outcome table (eigenvalue pairs):")?;
    write_table(out, &report.induced_table)?;
    writeln!(out, "  induced Cov            = {:e}", report.induced_cov)?;
    writeln!(
        out,
        "  induced defect         = {:e}",
        report.induced_defect
    )?;
    writeln!(
        out,
        "  induced independent    = {}",
        report.induced_independent
    )?;
    writeln!(out, "  verdict                = {}", report.verdict)
}

#[derive(Serialize)]
struct ThreeValueSummary {
    table: JointDistribution,
    covariance: f64,
    independence_defect: f64,
    expected_defect: f64,
    classification: Classification,
}

/// Bell-state check on `(q, r)` plus the three-valued classical case.
pub fn cmd_reproduce_paper(
    cfg: &RunConfig,
    q: &Observable2,
    r: &Observable2,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<u8> {
    let three = three_value_counterexample();
    let three_summary = ThreeValueSummary {
        covariance: three.covariance(),
        independence_defect: three.independence_defect(),
        expected_defect: THREE_VALUE_DEFECT,
        classification: three.classify(cfg.tol),
        table: three,
    };
    let mut failure = None;
    if three_summary.covariance.abs() > 1e-12 {
        failure = Some(format!(
            "three-valued covariance = {:e}, expected 0",
            three_summary.covariance
        ));
    } else if (three_summary.independence_defect - THREE_VALUE_DEFECT).abs() > 1e-12 {
        failure = Some(format!(
            "three-valued independence defect = {}, expected {}",
            three_summary.independence_defect, THREE_VALUE_DEFECT
        ));
    }

    let bell = match check_bell_counterexample(q, r) {
        Ok(report) => Some(report),
        Err(e) => {
            failure.get_or_insert_with(|| e.to_string());
            None
        }
    };

    if cfg.json() {
        write_json(
            out,
            &json!({
                "passed": failure.is_none(),
                "failure": failure,
                "bell_counterexample": bell,
                "three_value": three_summary,
            }),
        )?;
    } else {
        writeln!(out, "Bell state |phi> = (|a1 b1> + |a2 b2>)/sqrt(2)")?;
        if let Some(report) = &bell {
            write_report(out, report)?;
        }
        writeln!(out)?;
        writeln!(out, "X uniform on {{-1, 0, 1}}, Y = X^2")?;
        write_table(out, &three_summary.table)?;
        writeln!(
            out,
            "  Cov[X,Y]               = {:e}",
            three_summary.covariance
        )?;
        writeln!(
            out,
            "  independence defect    = {} (expected 2/9)",
            three_summary.independence_defect
        )?;
        writeln!(
            out,
            "  classification         = {}",
            three_summary.classification
        )?;
        writeln!(out)?;
        writeln!(
            out,
            "result: {}",
            if failure.is_none() { "PASS" } else { "FAIL" }
        )?;
    }
    Ok(match failure {
        None => EXIT_OK,
        Some(msg) => {
            writeln!(err, "covsep: check failed: {msg}")?;
            EXIT_FAILURE
        }
    })
}

pub fn cmd_verify_theorem1(cfg: &RunConfig, out: &mut dyn Write) -> std::io::Result<u8> {
    let summary = theorem1_campaign(cfg.trials, cfg.seed, cfg.tol);
    if cfg.json() {
        write_json(out, &summary)?;
    } else {
        writeln!(out, "two-valued covariance/independence campaign")?;
        writeln!(out, "  trials                 = {}", summary.trials)?;
        writeln!(out, "  seed                   = {}", summary.seed)?;
        writeln!(out, "  tol                    = {:e}", summary.tol)?;
        writeln!(
            out,
            "  max identity residual  = {:e}",
            summary.max_identity_residual
        )?;
        writeln!(
            out,
            "  max deviation residual = {:e}",
            summary.max_deviation_residual
        )?;
        writeln!(out, "  failures               = {}", summary.failure_count)?;
        for f in &summary.failures {
            writeln!(
                out,
                "    trial {} ({}): {}",
                f.trial,
                f.reason,
                serde_json::to_string(&f.parameterization).unwrap_or_default()
            )?;
        }
    }
    Ok(if summary.passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn load_distribution(
    path: &Path,
    err: &mut dyn Write,
) -> std::io::Result<Option<JointDistribution>> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            writeln!(err, "covsep: cannot read {}: {e}", path.display())?;
            return Ok(None);
        }
    };
    match serde_json::from_str(&text) {
        Ok(d) => Ok(Some(d)),
        Err(e) => {
            writeln!(
                err,
                "covsep: invalid joint distribution in {}: {e}",
                path.display()
            )?;
            Ok(None)
        }
    }
}

pub fn cmd_analyze(
    cfg: &RunConfig,
    path: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<u8> {
    let Some(d) = load_distribution(path, err)? else {
        return Ok(EXIT_INPUT);
    };
    let e = d.expectations();
    let cov = e.exy - e.ex * e.ey;
    let defect = d.independence_defect();
    let classification = d.classify(cfg.tol);
    let binary = d.shape() == (2, 2);
    let contradiction = binary && classification == Classification::UncorrelatedDependent;
    let note = if contradiction {
        Some("two-valued pair classified uncorrelated but dependent: equivalence violated")
    } else if binary && d.is_uncorrelated(cfg.tol) {
        Some("zero covariance between two-valued variables forces independence")
    } else {
        None
    };
    if cfg.json() {
        write_json(
            out,
            &json!({
                "shape": [d.shape().0, d.shape().1],
                "expectations": e,
                "covariance": cov,
                "independence_defect": defect,
                "classification": classification,
                "two_valued": binary,
                "note": note,
            }),
        )?;
    } else {
        writeln!(out, "joint distribution {}x{}", d.shape().0, d.shape().1)?;
        write_table(out, &d)?;
        writeln!(out, "  E[X]                   = {}", e.ex)?;
        writeln!(out, "  E[Y]                   = {}", e.ey)?;
        writeln!(out, "  E[XY]                  = {}", e.exy)?;
        writeln!(out, "  Cov[X,Y]               = {:e}", cov)?;
        writeln!(out, "  independence defect    = {:e}", defect)?;
        writeln!(out, "  classification         = {classification}")?;
        if let Some(note) = note {
            writeln!(out, "  note: {note}")?;
        }
    }
    if contradiction {
        writeln!(
            err,
            "covsep: two-valued table is uncorrelated but dependent"
        )?;
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

pub fn cmd_search(
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<u8> {
    let mut all_separate = true;
    for i in 0..cfg.trials {
        let seed = derive_seed(cfg.seed, i);
        let report = match random_separation_instance(seed) {
            Ok((_, _, report)) => report,
            Err(e) => {
                writeln!(err, "covsep: instance {i} (seed {seed}): {e}")?;
                return Ok(EXIT_FAILURE);
            }
        };
        all_separate &= report.verdict == Verdict::QuantumSeparation;
        if cfg.json() {
            serde_json::to_writer(&mut *out, &report)?;
            writeln!(out)?;
        } else {
            writeln!(
                out,
                "seed {seed:>20}  Cov = {:>10.3e}  Schmidt = ({:.6}, {:.6})  R = {}  {}",
                report.quantum_cov,
                report.schmidt.0,
                report.schmidt.1,
                fmt_matrix(&report.r),
                report.verdict
            )?;
        }
    }
    if !all_separate {
        writeln!(err, "covsep: some instances did not separate")?;
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

pub fn cmd_sample(
    cfg: &RunConfig,
    input: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> std::io::Result<u8> {
    let (source, d) = match input {
        Some(path) => match load_distribution(path, err)? {
            Some(d) => (path.display().to_string(), d),
            None => return Ok(EXIT_INPUT),
        },
        None => {
            let (q, r) = bell_counterexample_observables();
            let d = induced_joint_distribution(&bell_state(), &q, &r)
                .expect("counterexample observables are non-degenerate");
            ("Bell-state counterexample outcome table".to_string(), d)
        }
    };
    let count = match usize::try_from(cfg.trials) {
        Ok(count) => count,
        Err(_) => {
            writeln!(err, "covsep: --trials too large for this platform")?;
            return Ok(EXIT_INPUT);
        }
    };
    let check: SamplingCheck = match check_sampling(&d, count, cfg.seed) {
        Ok(check) => check,
        Err(e) => {
            writeln!(err, "covsep: {e}")?;
            return Ok(EXIT_INPUT);
        }
    };
    if cfg.json() {
        write_json(out, &json!({ "source": source, "check": check }))?;
    } else {
        writeln!(out, "sampling {source}")?;
        writeln!(out, "  draws                  = {}", check.summary.count)?;
        writeln!(out, "  seed                   = {}", check.summary.seed)?;
        writeln!(
            out,
            "  empirical Cov          = {:e}",
            check.summary.empirical_cov
        )?;
        writeln!(out, "  analytic Cov           = {:e}", check.analytic_cov)?;
        writeln!(out, "  sigma                  = {:e}", check.sigma)?;
        match check.within_5_sigma {
            Some(ok) => writeln!(
                out,
                "  5-sigma check          = {}",
                if ok { "pass" } else { "FAIL" }
            )?,
            None => writeln!(
                out,
                "  5-sigma check          = skipped (insufficient draws)"
            )?,
        }
    }
    if !check.passed() {
        writeln!(err, "covsep: empirical covariance outside the 5-sigma band")?;
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}
