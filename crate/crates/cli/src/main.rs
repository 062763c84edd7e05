//! `fqfd`: batch front end for the AHP and fuzzy House of Quality engine.
//!
//! Data goes to stdout, diagnostics to stderr. Exit statuses are listed in
//! [`exit::Status`].

mod exit;
mod render;

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqfd_core::ahp::WeightMethod;
use fqfd_core::pipeline::{analyze_ahp, rank_project, RunOptions};
use fqfd_core::project::{self, bundled_project, write_atomic, HoqProject, Selection};
use fqfd_core::sensitivity::{run_sensitivity_with, PerturbationSpec};
use fqfd_core::table::{self, import_matrix_csv, Imported, TableKind};
use fqfd_server::{AppState, Store};

use exit::{Failure, Status};

#[derive(Parser)]
#[command(name = "fqfd", version, about = "AHP weights and fuzzy House of Quality rankings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a project file and list every violation.
    Validate { project: PathBuf },
    /// Derive weights and consistency for every judgment matrix.
    Ahp {
        project: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Rank technical requirements through the House of Quality.
    Rank {
        project: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Full-precision report; `.json` writes JSON, anything else CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `(code, crisp)` series in descending crisp order.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Monte-Carlo stability of the ranking under perturbed judgments.
    Sensitivity {
        project: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        judgment_step_prob: f64,
        #[arg(long, default_value_t = 0.05)]
        cell_flip_prob: f64,
        #[arg(long)]
        perturb_roof: bool,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Rank histogram as CSV.
        #[arg(long)]
        histogram: Option<PathBuf>,
        /// Pairwise reversal rates as CSV.
        #[arg(long)]
        reversals: Option<PathBuf>,
    },
    /// Serve the HTTP API until interrupted.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        /// Directory for project files; in-memory only when omitted.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
    /// Print or write the bundled illustrative project.
    Bundled {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse a questionnaire table and print it as JSON.
    Import {
        table: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Use one respondent's judgments.
    #[arg(long, conflicts_with = "group")]
    respondent: Option<String>,
    /// Use the geometric-mean aggregate of all respondents (default).
    #[arg(long)]
    group: bool,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Synthesize weights even when a matrix exceeds the threshold.
    #[arg(long)]
    allow_inconsistent: bool,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            selection: self.respondent.clone().map_or(Selection::Group, Selection::Respondent),
            method: self.method.map(|m| match m {
                MethodArg::Eigenvector => WeightMethod::Eigenvector,
                MethodArg::Rowgeomean => WeightMethod::Rowgeomean,
            }),
            allow_inconsistent: self.allow_inconsistent.then_some(true),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Eigenvector,
    Rowgeomean,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    PairwiseUpper,
    PairwiseFull,
    Relationships,
    Roof,
}

impl From<KindArg> for TableKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::PairwiseUpper => TableKind::PairwiseUpper,
            KindArg::PairwiseFull => TableKind::PairwiseFull,
            KindArg::Relationships => TableKind::Relationships,
            KindArg::Roof => TableKind::Roof,
        }
    }
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::new(Status::Internal, "CannotWrite", format!("stdout: {e}"))),
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    write_atomic(path, bytes).map_err(Failure::from)
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("in-memory csv write");
    buf
}

fn load(path: &Path) -> Result<HoqProject, Failure> {
    project::load(path).map_err(|e| {
        if let project::ProjectError::Validation(issues) = &e {
            for issue in issues {
                eprintln!("  {issue}");
            }
        }
        Failure::from(e)
    })
}

fn warn_all(lines: &[String]) {
    for w in lines {
        eprintln!("warning: {w}");
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { project } => {
            let p = load(&project)?;
            emit(&format!(
                "valid: {} ({} CRs, {} TRs, {} criteria, {} respondents)\n",
                p.name,
                p.crs.len(),
                p.trs.len(),
                p.criteria.len(),
                p.respondents.len()
            ))
        }
        Command::Ahp { project, run, format } => {
            let p = load(&project)?;
            let a = analyze_ahp(&p, &run.options())?;
            warn_all(&a.warnings);
            emit(&match format {
                Format::Table => render::ahp(&a),
                Format::Json => json(&a),
            })
        }
        Command::Rank { project, run, format, out, plot_data } => {
            let p = load(&project)?;
            let opts = run.options();
            let a = analyze_ahp(&p, &opts)?;
            warn_all(&a.warnings);
            let report = rank_project(&p, &opts)?;
            if let Some(path) = out {
                let bytes = if path.extension().is_some_and(|e| e == "json") {
                    json(&report).into_bytes()
                } else {
                    csv_bytes(|b| table::write_priority_table(&report, b))
                };
                write_file(&path, &bytes)?;
            }
            if let Some(path) = plot_data {
                write_file(&path, &csv_bytes(|b| table::write_plot_data(&report, b)))?;
            }
            emit(&match format {
                Format::Table => render::priorities(&report),
                Format::Json => json(&report),
            })
        }
        Command::Sensitivity {
            project,
            trials,
            seed,
            judgment_step_prob,
            cell_flip_prob,
            perturb_roof,
            run,
            format,
            histogram,
            reversals,
        } => {
            let p = load(&project)?;
            let spec = PerturbationSpec { trials, seed, judgment_step_prob, cell_flip_prob, perturb_roof };
            let report = run_sensitivity_with(&p, &spec, &run.options())?;
            if report.discarded > 0 {
                eprintln!("warning: {} of {} trials discarded", report.discarded, report.trials);
            }
            if let Some(path) = histogram {
                write_file(&path, &csv_bytes(|b| table::write_rank_histogram(&report, b)))?;
            }
            if let Some(path) = reversals {
                write_file(&path, &csv_bytes(|b| table::write_reversals(&report, b)))?;
            }
            emit(&match format {
                Format::Table => render::stability(&report),
                Format::Json => json(&report),
            })
        }
        Command::Serve { listen, data_dir } => serve(listen, data_dir),
        Command::Bundled { out } => {
            let text = bundled_project().to_json();
            match out {
                Some(path) => write_file(&path, text.as_bytes()),
                None => emit(&text),
            }
        }
        Command::Import { table, kind } => {
            let value = match import_matrix_csv(&table, kind.into()) {
                Err(fqfd_core::table::ImportError::Io(e)) => {
                    return Err(Failure::new(Status::CannotOpen, "CannotOpen", format!("{}: {e}", table.display())))
                }
                other => other?,
            };
            let doc = match value {
                Imported::Matrix(m) => serde_json::json!({
                    "element_ids": m.element_ids(),
                    "rows": m.entries(),
                }),
                Imported::Relationships(g) => serde_json::json!({
                    "row_codes": g.row_codes,
                    "column_codes": g.column_codes,
                    "cells": g.cells,
                }),
                Imported::Roof { codes, roof } => serde_json::json!({
                    "codes": codes,
                    "cells": roof.to_grid(),
                }),
            };
            emit(&json(&doc))
        }
    }
}

fn serve(listen: SocketAddr, data_dir: Option<PathBuf>) -> Result<(), Failure> {
    let _ = tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .try_init();
    let store = match &data_dir {
        Some(dir) => Store::open(dir)
            .map_err(|e| Failure::new(Status::CannotCreate, "CannotWrite", format!("{}: {e}", dir.display())))?,
        None => Store::in_memory(),
    };
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::new(Status::Internal, "Internal", e.to_string()))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(listen)
            .await
            .map_err(|e| Failure::new(Status::CannotOpen, "CannotOpen", format!("bind {listen}: {e}")))?;
        let addr = listener.local_addr().map_err(|e| Failure::new(Status::Internal, "Internal", e.to_string()))?;
        eprintln!("listening on http://{addr}/v1");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
            eprintln!("shutting down");
        };
        fqfd_server::serve(listener, AppState::new(store), shutdown)
            .await
            .map_err(|e| Failure::new(Status::Internal, "Internal", e.to_string()))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Usage.into() } else { Status::Ok.into() };
        }
    };
    match run(cli.command) {
        Ok(()) => Status::Ok.into(),
        Err(f) => {
            eprintln!("{f}");
            f.status.into()
        }
    }
}
