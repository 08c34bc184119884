//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use momentpick_core::experiments::{run_trials, verify_homogeneous_equality, ExperimentReport};
use momentpick_core::sdp::{assemble_sdp, solve, SdpProblem, SolveOptions, SolveStatus};
use momentpick_core::seed::{derive_seed, SeedRole};
use momentpick_core::{
    algebraic_partition, build_moment_matrix, compare_partitions, count_unique, detect_partition, generate_basis,
    sample_realization, CountConvention, EqualityPartition, LevelSpec, Monomial, Scenario,
};

use crate::formats::{
    parse_experiment_spec, parse_functional, parse_scenario, read_file, ConstraintDocument, ExperimentMode,
    FormatError, Source,
};
use crate::sdpa::write_sdpa;

#[derive(Debug, Parser)]
#[command(name = "momentpick", version, about = "Moment-matrix constraints by random quantum sampling")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample realizations and detect equal and vanishing moment-matrix entries.
    SampleConstraints(Common),
    /// Derive the equality structure from the projector algebra.
    Algebraic(Common),
    /// Compare a sampled partition with the algebraic one.
    Compare(Common),
    /// Distinct-entry counts at level 3 for the ten reference scenarios.
    Table1(Table1Args),
    /// Bound a Bell functional with the moment SDP.
    Solve(SolveArgs),
    /// Write the moment SDP in SDPA sparse format.
    ExportSdpa(SolveArgs),
    /// Run block-pair Monte-Carlo experiments from a spec table.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PartitionSource {
    Algebraic,
    Sampled,
}

#[derive(Debug, Args)]
struct Common {
    /// `chsh`, `3322`, `X,Y:A,B` or a scenario JSON file.
    #[arg(long, default_value = "chsh")]
    scenario: String,
    /// NPA level such as `3` or `1+AB`.
    #[arg(long)]
    level: Option<String>,
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Independent realizations intersected per partition.
    #[arg(long, default_value_t = 2)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol_eq: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_zero: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// all, nonzero, nonzero-nonunit or conjugate-merged.
    #[arg(long, default_value = "conjugate-merged")]
    convention: String,
}

#[derive(Debug, Args)]
struct Table1Args {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol_eq: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_zero: f64,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// `chsh`, `zero` or a JSON list of {x, y, a, b, c} terms (outcomes 1-based).
    #[arg(long, default_value = "chsh")]
    functional: String,
    #[arg(long, value_enum, default_value_t = PartitionSource::Algebraic)]
    partition: PartitionSource,
    /// Also write the SDP in SDPA sparse format.
    #[arg(long)]
    export_sdpa: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    gap_tol: f64,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Spec file, or one of the bundled tables: table2, table3, homogeneous-control.
    spec: String,
    /// Override the runs column of every row.
    #[arg(long)]
    runs: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Experiment(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Experiment(_) => 5,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Io { .. } => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Reference rows `(X, Y, A, B)` with their expected algebraic and rank-1
/// counts at level 3.
pub type Table1Row = ((usize, usize, usize, usize), usize, usize);

pub const TABLE1: [Table1Row; 10] = [
    ((2, 2, 2, 2), 61, 61),
    ((2, 2, 2, 3), 422, 410),
    ((2, 2, 3, 3), 1449, 1412),
    ((2, 3, 2, 2), 319, 292),
    ((2, 3, 2, 3), 7048, 6495),
    ((2, 3, 3, 2), 1122, 1077),
    ((2, 3, 3, 3), 12531, 11919),
    ((3, 3, 2, 2), 868, 808),
    ((3, 3, 3, 2), 10438, 9822),
    ((3, 3, 3, 3), 38017, 36717),
];

pub const BUNDLED_SPECS: [(&str, &str); 3] = [
    ("table2", include_str!("../specs/table2.spec")),
    ("table3", include_str!("../specs/table3.spec")),
    ("homogeneous-control", include_str!("../specs/homogeneous-control.spec")),
];

/// `samples` realizations from sub-seeds of `seed`, intersected.
pub fn sampled_partition(
    scenario: &Scenario,
    basis: &[Monomial],
    rank: usize,
    samples: usize,
    seed: u64,
    tol_eq: f64,
    tol_zero: f64,
) -> momentpick_core::Result<EqualityPartition> {
    let mats = (0..samples)
        .map(|i| {
            let real = sample_realization(scenario, rank, derive_seed(seed, SeedRole::Sample(i as u32)))?;
            build_moment_matrix(&real, basis)
        })
        .collect::<momentpick_core::Result<Vec<_>>>()?;
    detect_partition(&mats, tol_eq, tol_zero)
}

struct Setup {
    scenario: Scenario,
    level: LevelSpec,
    basis: Vec<Monomial>,
    convention: CountConvention,
}

impl Common {
    fn setup(&self, default_level: &str) -> Result<Setup, CliError> {
        let scenario = parse_scenario(&self.scenario)?;
        let level: LevelSpec = self.level.as_deref().unwrap_or(default_level).parse().map_err(usage)?;
        let convention = self.convention.parse().map_err(usage)?;
        if self.rank == 0 || self.samples == 0 {
            return Err(usage("--rank and --samples must be at least 1"));
        }
        let basis = generate_basis(&scenario, &level).map_err(usage)?;
        Ok(Setup { scenario, level, basis, convention })
    }

    fn sampled(&self, s: &Setup) -> Result<EqualityPartition, CliError> {
        sampled_partition(&s.scenario, &s.basis, self.rank, self.samples, self.seed, self.tol_eq, self.tol_zero)
            .map_err(usage)
    }

    fn source(&self) -> Source {
        Source::Sampled {
            rank: self.rank,
            samples: self.samples,
            seed: self.seed,
            tol_eq: self.tol_eq,
            tol_zero: self.tol_zero,
        }
    }
}

fn emit(out: &mut impl Write, path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| io_error(p, e)),
        None => out.write_all(content.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn constraints(c: &Common, sampled: bool, out: &mut impl Write) -> Result<(), CliError> {
    let s = c.setup("3")?;
    let (p, source) =
        if sampled { (c.sampled(&s)?, c.source()) } else { (algebraic_partition(&s.basis), Source::Algebraic) };
    let doc = ConstraintDocument::new(&s.scenario, &s.level, source, &s.basis, &p, s.convention);
    let body = match c.format {
        Format::Text => doc.to_text(),
        Format::Structured => doc.to_json(),
    };
    emit(out, c.out.as_deref(), &body)?;
    if c.out.is_none() && c.format == Format::Structured {
        // keep standard output a single JSON document
        return Ok(());
    }
    writeln!(out, "classes={}", doc.classes).map_err(|e| CliError::Io(e.to_string()))
}

fn compare(c: &Common, out: &mut impl Write) -> Result<(), CliError> {
    let s = c.setup("3")?;
    let sampled = c.sampled(&s)?;
    let algebraic = algebraic_partition(&s.basis);
    let r = compare_partitions(&sampled, &algebraic).map_err(usage)?;
    let mut text = format!(
        "classes_sampled={} classes_algebraic={} merges={} splits={} coarsens={}\n",
        count_unique(&sampled, s.convention),
        count_unique(&algebraic, s.convention),
        r.merges.len(),
        r.splits.len(),
        r.coarsens
    );
    if c.format == Format::Structured {
        let v = serde_json::json!({
            "classes_sampled": count_unique(&sampled, s.convention),
            "classes_algebraic": count_unique(&algebraic, s.convention),
            "coarsens": r.coarsens,
            "merges": r.merges,
            "splits": r.splits,
        });
        text = format!("{}\n", serde_json::to_string_pretty(&v).expect("json"));
    }
    emit(out, c.out.as_deref(), &text)
}

fn table1(a: &Table1Args, out: &mut impl Write) -> Result<(), CliError> {
    let level = LevelSpec::new(3);
    let convention = CountConvention::default();
    writeln!(out, "{:>2} {:>2} {:>2} {:>2} {:>10} {:>10} {:>10}", "X", "Y", "A", "B", "algebraic", "rank-2", "rank-1")
        .map_err(|e| CliError::Io(e.to_string()))?;
    let mut mismatch = false;
    for ((x, y, oa, ob), _, _) in TABLE1 {
        let sc = Scenario::bipartite(x, y, oa, ob).map_err(usage)?;
        let basis = generate_basis(&sc, &level).map_err(usage)?;
        let alg = count_unique(&algebraic_partition(&basis), convention);
        let sample = |rank| {
            sampled_partition(&sc, &basis, rank, a.samples, a.seed, a.tol_eq, a.tol_zero)
                .map(|p| count_unique(&p, convention))
                .map_err(usage)
        };
        let (r2, r1) = (sample(2)?, sample(1)?);
        mismatch |= r2 != alg;
        writeln!(out, "{x:>2} {y:>2} {oa:>2} {ob:>2} {alg:>10} {r2:>10} {r1:>10}")
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    if mismatch {
        return Err(CliError::Experiment("rank-2 sampling disagrees with the algebraic count".into()));
    }
    Ok(())
}

fn build_problem(a: &SolveArgs) -> Result<(SdpProblem, Setup), CliError> {
    let s = a.common.setup("1+AB")?;
    let functional = parse_functional(&a.functional, &s.scenario)?;
    if functional.scenario() != &s.scenario {
        return Err(usage("the functional belongs to a different scenario"));
    }
    let p = match a.partition {
        PartitionSource::Algebraic => algebraic_partition(&s.basis),
        PartitionSource::Sampled => a.common.sampled(&s)?,
    };
    let problem = assemble_sdp(&p, &s.basis, &functional).map_err(usage)?;
    Ok((problem, s))
}

fn write_sdpa_file(problem: &SdpProblem, path: &Path) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_sdpa(problem, &mut w).and_then(|_| w.flush()).map_err(|e| io_error(path, e))
}

fn solve_cmd(a: &SolveArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (problem, _) = build_problem(a)?;
    if let Some(path) = &a.export_sdpa {
        write_sdpa_file(&problem, path)?;
    }
    let opts = SolveOptions { max_iter: a.max_iter, gap_tol: a.gap_tol };
    let r = solve(&problem, &opts).map_err(|e| CliError::Solver(e.to_string()))?;
    let text = match a.common.format {
        Format::Text => format!(
            "value={:.10} status={} primal={:.12} dual={:.12} gap={:.3e} iterations={}\n",
            r.dual_value, r.status, r.primal_value, r.dual_value, r.gap, r.iterations
        ),
        Format::Structured => format!(
            "{}\n",
            serde_json::to_string_pretty(&serde_json::json!({
                "value": r.dual_value,
                "status": r.status.to_string(),
                "primal": r.primal_value,
                "dual": r.dual_value,
                "gap": r.gap,
                "iterations": r.iterations,
            }))
            .expect("json")
        ),
    };
    emit(out, a.common.out.as_deref(), &text)?;
    if r.status != SolveStatus::Optimal {
        return Err(CliError::Solver(format!("solver stopped with status {}", r.status)));
    }
    Ok(())
}

fn export_cmd(a: &SolveArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (problem, _) = build_problem(a)?;
    match a.common.out.as_deref().or(a.export_sdpa.as_deref()) {
        Some(path) => write_sdpa_file(&problem, path),
        None => write_sdpa(&problem, out).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn experiment(a: &ExperimentArgs, out: &mut impl Write) -> Result<(), CliError> {
    let text = match BUNDLED_SPECS.iter().find(|(name, _)| *name == a.spec) {
        Some((_, text)) => text.to_string(),
        None => read_file(Path::new(&a.spec))?,
    };
    let rows = parse_experiment_spec(&text)?;
    let w = |out: &mut dyn Write, line: String| writeln!(out, "{line}").map_err(|e| CliError::Io(e.to_string()));
    w(
        out,
        format!(
            "{:>3} {:>3} {:>4} {:>2} {:>3} {:>8} {:>8} {:>8} {:>10} {:>10} {:>9} {}",
            "l1", "l2", "MNIP", "r", "d", "Runs", "Equal", "AbsEq", "MinRel", "MinAbs", "Time[s]", "Result"
        ),
    )?;
    let mut failures = 0;
    for row in rows {
        let mut spec = row.spec;
        if let Some(runs) = a.runs {
            if runs == 0 {
                return Err(usage("--runs must be at least 1"));
            }
            spec.runs = runs;
        }
        let result: momentpick_core::Result<ExperimentReport> = match row.mode {
            ExperimentMode::Generated => run_trials(&spec),
            ExperimentMode::Homogeneous => verify_homogeneous_equality(spec.runs, spec.dim, spec.seed),
        };
        let prefix = format!(
            "{:>3} {:>3} {:>4} {:>2} {:>3} {:>8}",
            spec.len1, spec.len2, spec.mnip, spec.rank, spec.dim, spec.runs
        );
        match result {
            Ok(r) => {
                let verdict = match row.mode {
                    ExperimentMode::Generated if r.equalities_found == 0 => "OK",
                    ExperimentMode::Homogeneous if r.equalities_found == r.runs_done => "EQ",
                    _ => "FAIL",
                };
                if verdict == "FAIL" {
                    failures += 1;
                }
                w(
                    out,
                    format!(
                        "{prefix} {:>8} {:>8} {:>10.3e} {:>10.3e} {:>9.3} {verdict}",
                        r.equalities_found,
                        r.absolute_equalities,
                        r.min_rel_difference,
                        r.min_abs_difference,
                        r.wall_time.as_secs_f64()
                    ),
                )?;
            }
            Err(e) => {
                failures += 1;
                w(out, format!("{prefix} {:>8} {:>8} {:>10} {:>10} {:>9} INFEASIBLE", "-", "-", "-", "-", "-"))?;
                eprintln!("momentpick: {e}");
            }
        }
    }
    if failures > 0 {
        return Err(CliError::Experiment(format!("{failures} experiment row(s) failed")));
    }
    Ok(())
}

/// Parses `args` and runs the command, writing data to standard output and
/// diagnostics to standard error.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::SampleConstraints(c) => constraints(c, true, &mut out),
        Command::Algebraic(c) => constraints(c, false, &mut out),
        Command::Compare(c) => compare(c, &mut out),
        Command::Table1(a) => table1(a, &mut out),
        Command::Solve(a) => solve_cmd(a, &mut out),
        Command::ExportSdpa(a) => export_cmd(a, &mut out),
        Command::Experiment(a) => experiment(a, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("momentpick: {e}");
            ExitCode::from(e.code())
        }
    }
}
