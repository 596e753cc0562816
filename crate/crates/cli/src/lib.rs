//! Library side of the `sgm` binary: run configurations, the four
//! subcommands and CSV output.
//!
//! Every CSV starts with `# ` followed by the JSON [`RunConfig`] that produced
//! it. Feeding that line back through [`RunConfig::from_header`] repeats the
//! run; all columns except wall-clock times come out byte-identical.

pub mod args;
pub mod commands;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use signed_geomean::clustering::{KmeansConfig, SpectralConfig};
use signed_geomean::{GraphError, IpmConfig, ShiftConfig};
use thiserror::Error;

pub use args::{
    BenchArgs, Cli, ClusterArgs, Command, CommonArgs, ConditioningArg, MethodArg, SbmClusterArgs,
    SbmRegionArgs, SymmetrizationArg, TargetArg,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl CliError {
    /// 0 success, 1 numeric failure, 2 usage or I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } | CliError::Input(_) => 2,
        }
    }

    fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::InvalidShift(m) => CliError::Usage(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "args", rename_all = "kebab-case")]
pub enum Task {
    SbmRegion(SbmRegionArgs),
    SbmCluster(SbmClusterArgs),
    Cluster(ClusterArgs),
    Bench(BenchArgs),
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: String,
    pub common: CommonArgs,
    #[serde(flatten)]
    pub task: Task,
}

impl RunConfig {
    pub fn new(common: CommonArgs, task: Task) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            common,
            task,
        }
    }

    pub fn header(&self) -> String {
        format!(
            "# {}",
            serde_json::to_string(self).expect("config serializes")
        )
    }

    /// Reads the configuration from the first line of an output file.
    pub fn from_header(text: &str) -> Result<Self, CliError> {
        let line = text.lines().next().unwrap_or("");
        let json = line.strip_prefix("# ").ok_or_else(|| {
            CliError::Input("first line is not a '# {json}' run configuration".into())
        })?;
        serde_json::from_str(json).map_err(|e| CliError::Input(format!("run configuration: {e}")))
    }

    pub fn shift(&self) -> Result<ShiftConfig, CliError> {
        Ok(ShiftConfig::new(
            self.common.shift_eps1,
            self.common.shift_eps2,
        )?)
    }

    pub fn spectral(&self) -> Result<SpectralConfig, CliError> {
        if !(self.common.tol > 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be positive, got {}",
                self.common.tol
            )));
        }
        if self.common.kmeans_restarts == 0 {
            return Err(CliError::Usage(
                "--kmeans-restarts must be at least 1".into(),
            ));
        }
        let base = SpectralConfig::default();
        Ok(SpectralConfig {
            shift: self.shift()?,
            ipm: IpmConfig {
                tol: self.common.tol,
                ..base.ipm
            },
            kmeans: KmeansConfig {
                restarts: self.common.kmeans_restarts,
                ..base.kmeans
            },
            ..base
        })
    }
}

/// Output of one subcommand: CSV body plus optional extra files.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Trailing `#` lines after the rows.
    pub trailer: Vec<String>,
    pub extra_files: Vec<(PathBuf, String)>,
}

impl Report {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            trailer: Vec::new(),
            extra_files: Vec::new(),
        }
    }

    pub fn to_csv(&self, cfg: &RunConfig) -> String {
        let mut s = cfg.header();
        s.push('\n');
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        for line in &self.trailer {
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}

/// Runs the task on a pool of `common.threads` workers.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.common.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match &cfg.task {
        Task::SbmRegion(a) => commands::sbm_region(cfg, a),
        Task::SbmCluster(a) => commands::sbm_cluster(cfg, a),
        Task::Cluster(a) => commands::cluster(cfg, a),
        Task::Bench(a) => commands::bench(cfg, a),
    })
}

/// Runs the task and writes its CSV to `common.out` (or standard output).
pub fn execute(cfg: &RunConfig) -> Result<(), CliError> {
    let report = run(cfg)?;
    let csv = report.to_csv(cfg);
    match &cfg.common.out {
        Some(path) => write_file(path, &csv)?,
        None => io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::io("standard output", e))?,
    }
    for (path, text) in &report.extra_files {
        write_file(path, text)?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))
}

/// Turns parsed arguments into a run configuration; `rerun` reads it back
/// from a file, keeping a new `--out` if one was given.
pub fn config_from_cli(cli: Cli) -> Result<RunConfig, CliError> {
    let task = match cli.command {
        Command::SbmRegion(a) => Task::SbmRegion(a),
        Command::SbmCluster(a) => Task::SbmCluster(a),
        Command::Cluster(a) => Task::Cluster(a),
        Command::Bench(a) => Task::Bench(a),
        Command::Rerun(r) => {
            let mut cfg = RunConfig::from_header(&read_file(&r.from)?)?;
            cfg.common.out = cli.common.out;
            return Ok(cfg);
        }
    };
    Ok(RunConfig::new(cli.common, task))
}

/// Columns of a CSV whose name does not end in `seconds`, without the
/// header line. Used to compare repeated runs.
pub fn deterministic_columns(csv: &str) -> Vec<Vec<String>> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let Some(head) = lines.next() else {
        return Vec::new();
    };
    let keep: Vec<bool> = head.split(',').map(|c| !c.ends_with("seconds")).collect();
    std::iter::once(head)
        .chain(lines)
        .map(|l| {
            l.split(',')
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(v, _)| v.to_string())
                .collect()
        })
        .collect()
}
