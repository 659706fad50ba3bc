//! `upsolve` — solve one of the built-in two-time initial-value problems and
//! emit error tables, sample grids, or figure-style slices as CSV.
//!
//! Exit codes: 0 success (warnings included), 1 invalid configuration,
//! 2 solver failure, 3 I/O failure.

mod config;
mod emit;

use clap::Parser;
use config::{EmitKind, RunConfig, Settings};
use emit::{sci, TableColumn};
use std::path::{Path, PathBuf};
use upsolve_core::{example, Example, RunParams, SolverError};

#[derive(Parser, Debug)]
#[command(
    name = "upsolve",
    version,
    about = "Spectral-characteristic solver for initial-value problems with two time variables"
)]
struct Cli {
    /// Built-in problem entry (1-4).
    #[arg(long, value_name = "N")]
    example: Option<String>,

    /// Configuration file with `key = value` lines; flags override it.
    #[arg(long, value_name = "FILE")]
    problem: Option<PathBuf>,

    /// Time steps per axis.
    #[arg(long = "M", value_name = "STEPS")]
    m_steps: Option<usize>,

    /// Spatial sampling intervals for reporting (default 20).
    #[arg(long = "L", value_name = "INTERVALS")]
    l_intervals: Option<usize>,

    /// Mode truncation (default 8).
    #[arg(long = "nmax", value_name = "MODES")]
    n_max: Option<usize>,

    /// Fixed sweep count for nonlinear entries; omit to iterate until the
    /// sup-increment falls below 1e-10 (at most 16 sweeps).
    #[arg(long, value_name = "SWEEPS")]
    q: Option<usize>,

    /// Quadrature index for state-dependent terms: j0 + 1 points (default 5).
    #[arg(long, value_name = "INDEX")]
    j0: Option<usize>,

    /// Time horizon override.
    #[arg(long = "T", value_name = "HORIZON")]
    horizon: Option<f64>,

    /// What to write: table, grid, or slice.
    #[arg(long, value_name = "KIND")]
    emit: Option<String>,

    /// Freeze one coordinate for slice emission, e.g. t=0.5 or x=0.785.
    #[arg(long, value_name = "AXIS=VALUE")]
    slice: Option<String>,

    /// Output file for single runs, output directory for --tables.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Reproduce the published error tables for these entries
    /// (comma-separated subset of 1,2,3,4; bare flag selects none).
    #[arg(long, value_name = "LIST", num_args = 0..=1)]
    tables: Option<Option<String>>,

    /// Add published reference values and relative deviations to table
    /// output; the run must match a published column's M (and q).
    #[arg(long)]
    compare_published: bool,
}

/// A failed invocation, carrying its exit code class.
#[derive(Debug)]
enum Failure {
    Config(String),
    Solver(SolverError),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(message) => write!(f, "{message}"),
            Failure::Solver(error) => write!(f, "solver failure: {error}"),
            Failure::Io(message) => write!(f, "{message}"),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            let code = match error.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = error.print();
            std::process::exit(code);
        }
    };
    if let Err(failure) = execute(cli) {
        eprintln!("error: {failure}");
        std::process::exit(failure.exit_code());
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    if let Some(tables) = &cli.tables {
        reject_run_flags_with_tables(&cli)?;
        let which = parse_tables_list(tables.as_deref()).map_err(Failure::Config)?;
        let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
        return reproduce_tables(&which, &out_dir);
    }

    let mut settings = Settings::default();
    if let Some(path) = &cli.problem {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("reading {}: {e}", path.display())))?;
        settings = Settings::from_file_text(&text, &path.display().to_string())
            .map_err(Failure::Config)?;
    }
    let config = flag_settings(&cli)
        .merge_over(settings)
        .resolve(cli.compare_published)
        .map_err(Failure::Config)?;
    run_single(&config)
}

fn flag_settings(cli: &Cli) -> Settings {
    Settings {
        example: cli.example.clone(),
        m_steps: cli.m_steps,
        l_intervals: cli.l_intervals,
        n_max: cli.n_max,
        q: cli.q,
        j0: cli.j0,
        horizon: cli.horizon,
        emit: cli.emit.clone(),
        slice: cli.slice.clone(),
        out: cli.out.clone(),
    }
}

fn reject_run_flags_with_tables(cli: &Cli) -> Result<(), Failure> {
    let set: &[(&str, bool)] = &[
        ("--example", cli.example.is_some()),
        ("--problem", cli.problem.is_some()),
        ("--M", cli.m_steps.is_some()),
        ("--L", cli.l_intervals.is_some()),
        ("--nmax", cli.n_max.is_some()),
        ("--q", cli.q.is_some()),
        ("--j0", cli.j0.is_some()),
        ("--T", cli.horizon.is_some()),
        ("--emit", cli.emit.is_some()),
        ("--slice", cli.slice.is_some()),
        ("--compare-published", cli.compare_published),
    ];
    for (flag, present) in set {
        if *present {
            return Err(Failure::Config(format!(
                "{flag} does not combine with --tables; table reproduction fixes its own \
                 parameters (and always includes published comparisons)"
            )));
        }
    }
    Ok(())
}

fn parse_tables_list(text: Option<&str>) -> Result<Vec<usize>, String> {
    let Some(text) = text else {
        return Ok(Vec::new());
    };
    let mut which = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        match part.parse::<usize>() {
            Ok(id @ 1..=4) => {
                if !which.contains(&id) {
                    which.push(id);
                }
            }
            _ => return Err(format!("table ids are 1-4, got {part:?}")),
        }
    }
    which.sort_unstable();
    Ok(which)
}

fn reproduce_tables(which: &[usize], out_dir: &Path) -> Result<(), Failure> {
    if which.is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Io(format!("creating {}: {e}", out_dir.display())))?;
    for &id in which {
        let entry = example(id).map_err(Failure::Solver)?;
        let labels = entry.column_labels();
        let mut columns = Vec::with_capacity(4);
        let mut printed = Vec::with_capacity(4);
        for col in 0..4 {
            let output = entry.run(&entry.table_cell(col)).map_err(Failure::Solver)?;
            let published = (entry.published.l2[col], entry.published.linf[col]);
            printed.push(format!(
                "  {:<10}  l2 = {} [dev {:.3}%]  linf = {} [dev {:.3}%]",
                labels[col],
                sci(output.report.l2),
                100.0 * (output.report.l2 - published.0).abs() / published.0,
                sci(output.report.linf),
                100.0 * (output.report.linf - published.1).abs() / published.1,
            ));
            columns.push(TableColumn {
                label: labels[col].clone(),
                l2: output.report.l2,
                linf: output.report.linf,
                published: Some(published),
            });
        }
        let path = out_dir.join(format!("table_{id}.csv"));
        emit::to_file(&path, |w| emit::render_table_csv(w, &columns))
            .map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))?;
        println!("table {id} -> {}", path.display());
        for line in printed {
            println!("{line}");
        }
    }
    Ok(())
}

fn run_single(config: &RunConfig) -> Result<(), Failure> {
    let entry = example(config.example).map_err(Failure::Solver)?;
    let mut params = RunParams::new(config.m_steps);
    params.l_intervals = config.l_intervals;
    params.n_max = config.n_max;
    params.q = config.q;
    params.state_rule_points = config.j0 + 1;
    params.horizon = config.horizon;

    let output = entry.run(&params).map_err(Failure::Solver)?;

    let mut headline = format!(
        "entry {} ({}): M={} L={} n_max={}",
        entry.id, entry.title, config.m_steps, config.l_intervals, config.n_max
    );
    if let Some(report) = &output.iteration {
        headline.push_str(&format!(" j0={} q={}", config.j0, report.q));
    }
    if let Some(horizon) = config.horizon {
        headline.push_str(&format!(" T={horizon}"));
    }
    println!("{headline}");
    println!("l2 = {}", sci(output.report.l2));
    println!("linf = {}", sci(output.report.linf));

    let published = if config.compare_published {
        let reference = published_cell(&entry, config)?;
        println!(
            "l2 published = {} (deviation {:.3}%)",
            sci(reference.0),
            100.0 * (output.report.l2 - reference.0).abs() / reference.0
        );
        println!(
            "linf published = {} (deviation {:.3}%)",
            sci(reference.1),
            100.0 * (output.report.linf - reference.1).abs() / reference.1
        );
        Some(reference)
    } else {
        None
    };

    if let Some(report) = &output.iteration {
        if report.kappa_bound >= 1.0 {
            eprintln!(
                "warning: contraction bound kappa = {:.3} is >= 1; the fixed-point \
                 iteration is not guaranteed to converge on this horizon",
                report.kappa_bound
            );
        }
    }

    match config.emit {
        EmitKind::Table => {
            if let Some(path) = &config.out {
                let column = TableColumn {
                    label: match &output.iteration {
                        Some(report) => format!("q={},M={}", report.q, config.m_steps),
                        None => format!("M={}", config.m_steps),
                    },
                    l2: output.report.l2,
                    linf: output.report.linf,
                    published,
                };
                emit::to_file(path, |w| emit::render_table_csv(w, std::slice::from_ref(&column)))
                    .map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))?;
                println!("wrote table -> {}", path.display());
            }
        }
        EmitKind::Grid => {
            let path = config.out.as_ref().expect("validated");
            emit::to_file(path, |w| emit::render_grid_csv(w, &output, &entry.exact()))
                .map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))?;
            println!("wrote grid -> {}", path.display());
        }
        EmitKind::Slice => {
            let path = config.out.as_ref().expect("validated");
            let spec = config.slice.unwrap_or(entry.slice);
            let snapped = emit::to_file(path, |w| {
                emit::render_slice_csv(w, &output, &entry.exact(), spec)
            })
            .map_err(|e| Failure::Io(format!("writing {}: {e}", path.display())))?;
            println!(
                "wrote slice {} = {} -> {}",
                snapped.axis,
                snapped.value,
                path.display()
            );
        }
    }
    Ok(())
}

/// The published (l2, linf) cell this run reproduces, if any: M must match a
/// table column, and nonlinear entries additionally need the column's fixed
/// sweep count.
fn published_cell(entry: &Example, config: &RunConfig) -> Result<(f64, f64), Failure> {
    for col in 0..4 {
        if entry.table_m[col] != config.m_steps {
            continue;
        }
        if let Some(qs) = entry.table_q {
            if config.q != Some(qs[col]) {
                continue;
            }
        }
        return Ok((entry.published.l2[col], entry.published.linf[col]));
    }
    let labels = entry.column_labels();
    Err(Failure::Config(format!(
        "no published reference for this configuration of entry {}; published columns: {}",
        entry.id,
        labels.join(", ")
    )))
}
