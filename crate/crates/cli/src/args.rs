//! Command-line arguments. Everything except `rerun` is also the serialized
//! [`RunConfig`](crate::RunConfig) written at the top of each output file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use signed_geomean::clustering::{Method, Symmetrization};
use signed_geomean::sbm::{Conditioning, Target};

#[derive(Debug, Parser)]
#[command(
    name = "sgm",
    version,
    about = "Spectral clustering of signed graphs with the geometric mean of Laplacians"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CommonArgs {
    /// Base seed; run `r` of a sweep uses `seed + r`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for sweeps (default: all cores). `bench` always times on one thread.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Step tolerance of the inverse power method.
    #[arg(long, global = true, default_value = "1e-8")]
    pub tol: f64,
    /// Diagonal shift added to the normalized positive Laplacian.
    #[arg(long = "shift-eps1", global = true, default_value = "1e-6")]
    pub shift_eps1: f64,
    /// Diagonal shift added to the normalized negative signless Laplacian.
    #[arg(long = "shift-eps2", global = true, default_value = "1e-6")]
    pub shift_eps2: f64,
    /// Random restarts of k-means.
    #[arg(long, global = true, default_value_t = 10)]
    pub kmeans_restarts: usize,
}

impl Default for CommonArgs {
    fn default() -> Self {
        Self {
            seed: 0,
            threads: None,
            out: None,
            tol: 1e-8,
            shift_eps1: 1e-6,
            shift_eps2: 1e-6,
            kmeans_restarts: 10,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fraction of SBM parameter grid points where each eigenvector condition holds in expectation.
    SbmRegion(SbmRegionArgs),
    /// Clustering error of each method on sampled signed SBM graphs.
    SbmCluster(SbmClusterArgs),
    /// Cluster an edge list or a point cloud.
    Cluster(ClusterArgs),
    /// Time the smallest-eigenvector computation on graphs with two perfect clusters.
    Bench(BenchArgs),
    /// Repeat the run recorded in the header line of an output file.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SbmRegionArgs {
    /// Numbers of clusters.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [2, 5, 10, 20, 50])]
    pub k: Vec<usize>,
    /// Grid points per probability axis; the grid is `{1/(2s), 3/(2s), …}⁴`.
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, value_delimiter = ',', ignore_case = true, default_values_t = ConditioningArg::ALL)]
    pub conditioning: Vec<ConditioningArg>,
    #[arg(long, value_delimiter = ',', ignore_case = true, default_values_t = TargetArg::ALL)]
    pub target: Vec<TargetArg>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SbmClusterArgs {
    /// Number of clusters.
    #[arg(long = "k", default_value_t = 2)]
    pub k: usize,
    /// Vertices per cluster.
    #[arg(long, default_value_t = 100)]
    pub cluster_size: usize,
    #[arg(long, default_value_t = 0.08)]
    pub p_plus_in: f64,
    #[arg(long, default_value_t = 0.02)]
    pub p_plus_out: f64,
    #[arg(long, default_value_t = 0.02)]
    pub p_minus_in: f64,
    #[arg(long, default_value_t = 0.08)]
    pub p_minus_out: f64,
    #[arg(long, value_delimiter = ',', ignore_case = true, default_values_t = MethodArg::ALL)]
    pub methods: Vec<MethodArg>,
    /// Sampled graphs per method.
    #[arg(long, default_value_t = 50)]
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ClusterArgs {
    /// Signed edge list, one `i j w` per line.
    #[arg(long, conflicts_with = "points", required_unless_present = "points")]
    pub edges: Option<PathBuf>,
    /// Point cloud, one comma- or space-separated row per line.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// Nearest neighbours joined by positive edges (point input).
    #[arg(long, default_value_t = 10)]
    pub k_plus: usize,
    /// Farthest neighbours joined by negative edges (point input).
    #[arg(long, default_value_t = 10)]
    pub k_minus: usize,
    #[arg(long, value_enum, ignore_case = true, default_value_t = SymmetrizationArg::Union)]
    pub symmetrization: SymmetrizationArg,
    /// Number of clusters.
    #[arg(long = "k")]
    pub k: usize,
    #[arg(long, value_enum, ignore_case = true, default_value_t = MethodArg::Gm)]
    pub method: MethodArg,
    /// Ground-truth labels, one per line, for the majority-vote error.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Labels JSON; defaults to `<out>.labels.json`, or a `# labels:` line on standard output.
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Graph orders, ascending.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Target average degree, split evenly between positive edges inside
    /// each cluster and negative edges across. This replaces a fixed edge
    /// density such as 2.5%, which is infeasible at n = 100 000 on a desktop.
    #[arg(long, default_value_t = 50.0)]
    pub avg_degree: f64,
    #[arg(long, value_delimiter = ',', ignore_case = true, default_values_t = [MethodArg::Sn, MethodArg::Gm])]
    pub methods: Vec<MethodArg>,
    /// Timed repetitions per cell; the median is reported.
    #[arg(long, default_value_t = 10)]
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct RerunArgs {
    /// Output file whose first line holds the `# {json}` run configuration.
    pub from: PathBuf,
}

macro_rules! value_enum {
    ($name:ident => $target:ty { $($variant:ident = $label:literal => $value:expr),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
        pub enum $name {
            $(
                #[value(name = $label)]
                #[serde(rename = $label)]
                $variant,
            )+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];
        }

        impl From<$name> for $target {
            fn from(v: $name) -> Self {
                match v {
                    $($name::$variant => $value),+
                }
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
            }
        }
    };
}

value_enum!(MethodArg => Method {
    Sn = "SN" => Method::SignedNormalized,
    Bn = "BN" => Method::BalanceNormalized,
    Am = "AM" => Method::ArithmeticMean,
    Gm = "GM" => Method::GeometricMean,
});

value_enum!(ConditioningArg => Conditioning {
    All = "all" => Conditioning::All,
    Bal = "e_bal" => Conditioning::Bal,
    PlusOrMinus = "e_plus_or_minus" => Conditioning::PlusOrMinus,
    PlusAndMinus = "e_plus_and_minus" => Conditioning::PlusAndMinus,
});

value_enum!(TargetArg => Target {
    Geometric = "e_g" => Target::Geometric,
    BalVol = "e_bal_and_e_vol" => Target::BalVol,
});

value_enum!(SymmetrizationArg => Symmetrization {
    Union = "union" => Symmetrization::Union,
    Intersection = "intersection" => Symmetrization::Intersection,
});
