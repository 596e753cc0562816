//! The four subcommands. Each returns a [`Report`]; rows come out in a fixed
//! cell order whatever the thread count.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use signed_geomean::clustering::{
    clustering_error, kfn_neg_graph, knn_pos_graph, load_labels, load_points, spectral_cluster,
    spectral_embedding, ClusterLabels, Method,
};
use signed_geomean::error::{ClusterError, SbmError};
use signed_geomean::graph::load_edge_list;
use signed_geomean::sbm::{region_counts, sample, SbmParams};
use signed_geomean::SignedGraph;

use crate::args::{BenchArgs, ClusterArgs, SbmClusterArgs, SbmRegionArgs};
use crate::{CliError, Report, RunConfig};

fn cluster_error(e: ClusterError) -> CliError {
    match e {
        ClusterError::InvalidK { .. } | ClusterError::TooManyNeighbours { .. } => {
            CliError::Usage(e.to_string())
        }
        ClusterError::Eigen(_) | ClusterError::Linalg(_) => CliError::Numeric(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn sbm_error(e: SbmError) -> CliError {
    match e {
        SbmError::Linalg(_) => CliError::Numeric(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

/// Keeps free-text fields from breaking the CSV.
fn csv_text(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or large magnitudes.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), num)
}

pub fn sbm_region(_cfg: &RunConfig, a: &SbmRegionArgs) -> Result<Report, CliError> {
    if a.steps < 2 {
        return Err(CliError::Usage(format!(
            "--steps must be at least 2, got {}",
            a.steps
        )));
    }
    if a.k.is_empty() || a.k.iter().any(|&k| k < 2) {
        return Err(CliError::Usage("every --k must be at least 2".into()));
    }
    let counts =
        a.k.par_iter()
            .map(|&k| region_counts(k, a.steps))
            .collect::<Result<Vec<_>, _>>()
            .map_err(sbm_error)?;
    let mut report = Report::new(vec![
        "k",
        "steps",
        "conditioning",
        "target",
        "fraction",
        "denominator_count",
    ]);
    for c in &counts {
        for &cond in &a.conditioning {
            for &target in &a.target {
                let f = c.get(cond.into(), target.into());
                report.rows.push(vec![
                    c.k.to_string(),
                    c.steps.to_string(),
                    cond.to_string(),
                    target.to_string(),
                    opt(f.fraction()),
                    f.denominator.to_string(),
                ]);
            }
        }
    }
    Ok(report)
}

struct CellResult {
    error: Result<f64, String>,
    seconds: f64,
}

pub fn sbm_cluster(cfg: &RunConfig, a: &SbmClusterArgs) -> Result<Report, CliError> {
    let spectral = cfg.spectral()?;
    let params = SbmParams::new(
        a.k,
        a.cluster_size,
        a.p_plus_in,
        a.p_plus_out,
        a.p_minus_in,
        a.p_minus_out,
    )
    .map_err(sbm_error)?;
    if a.k < 2 {
        return Err(CliError::Usage("--k must be at least 2".into()));
    }
    if a.methods.is_empty() || a.runs == 0 {
        return Err(CliError::Usage(
            "need at least one method and one run".into(),
        ));
    }
    let truth = ClusterLabels::from_labels(params.planted_labels());
    let seeds: Vec<u64> = (0..a.runs as u64)
        .map(|r| cfg.common.seed.wrapping_add(r))
        .collect();
    let graphs = seeds
        .par_iter()
        .map(|&s| sample(&params, s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(sbm_error)?;
    let cells: Vec<(Method, usize)> = a
        .methods
        .iter()
        .flat_map(|&m| (0..a.runs).map(move |r| (Method::from(m), r)))
        .collect();
    let results: Vec<CellResult> = cells
        .par_iter()
        .map(|&(method, r)| {
            let start = Instant::now();
            let error = spectral_cluster(&graphs[r], a.k, method, &spectral, seeds[r])
                .map_err(|e| e.to_string())
                .and_then(|res| clustering_error(&res.labels, &truth).map_err(|e| e.to_string()));
            if let Err(e) = &error {
                log::warn!("{method} run {r}: {e}");
            }
            CellResult {
                error,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();

    let mut report = Report::new(vec![
        "kind", "method", "run", "seed", "error", "seconds", "status",
    ]);
    for (&(method, r), res) in cells.iter().zip(&results) {
        let (err, status) = match &res.error {
            Ok(e) => (num(*e), "ok".to_string()),
            Err(msg) => ("NA".to_string(), csv_text(msg)),
        };
        report.rows.push(vec![
            "run".into(),
            method.to_string(),
            r.to_string(),
            seeds[r].to_string(),
            err,
            num(res.seconds),
            status,
        ]);
    }
    for &m in &a.methods {
        let method = Method::from(m);
        let mine: Vec<&CellResult> = cells
            .iter()
            .zip(&results)
            .filter(|(c, _)| c.0 == method)
            .map(|(_, res)| res)
            .collect();
        let errors: Vec<f64> = mine
            .iter()
            .filter_map(|c| c.error.as_ref().ok().copied())
            .collect();
        let secs: Vec<f64> = mine.iter().map(|c| c.seconds).collect();
        let failed = mine.len() - errors.len();
        report.rows.push(vec![
            "median".into(),
            method.to_string(),
            "NA".into(),
            "NA".into(),
            opt(median(&errors)),
            opt(median(&secs)),
            if failed == 0 {
                "ok".into()
            } else {
                format!("{failed} failed")
            },
        ]);
    }
    Ok(report)
}

fn with_path<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

fn load_graph(a: &ClusterArgs) -> Result<SignedGraph, CliError> {
    if let Some(path) = &a.edges {
        let (g, report) = load_edge_list(path).map_err(with_path(path))?;
        if report.self_loops_dropped > 0 {
            log::warn!("dropped {} self-loops", report.self_loops_dropped);
        }
        return Ok(g);
    }
    let Some(path) = &a.points else {
        return Err(CliError::Usage(
            "one of --edges or --points is required".into(),
        ));
    };
    let pts = load_points(path).map_err(with_path(path))?;
    let sym = a.symmetrization.into();
    let wp = knn_pos_graph(&pts, a.k_plus, sym).map_err(cluster_error)?;
    let wm = kfn_neg_graph(&pts, a.k_minus, sym).map_err(cluster_error)?;
    Ok(SignedGraph::new(wp, wm)?)
}

pub fn cluster(cfg: &RunConfig, a: &ClusterArgs) -> Result<Report, CliError> {
    let spectral = cfg.spectral()?;
    let g = load_graph(a)?;
    let n = g.n();
    if a.k < 2 || a.k > n {
        return Err(CliError::Usage(format!(
            "--k = {} must lie in 2..={n}",
            a.k
        )));
    }
    let truth = match &a.truth {
        Some(path) => {
            let t = load_labels(path).map_err(with_path(path))?;
            if t.labels.len() != n {
                return Err(CliError::Input(format!(
                    "{}: {} labels for {n} vertices",
                    path.display(),
                    t.labels.len()
                )));
            }
            Some(t)
        }
        None => None,
    };
    let method = Method::from(a.method);
    let res =
        spectral_cluster(&g, a.k, method, &spectral, cfg.common.seed).map_err(cluster_error)?;
    let sizes = res.labels.sizes();

    let mut report = Report::new(vec!["metric", "index", "value"]);
    let mut push = |m: &str, i: String, v: String| report.rows.push(vec![m.into(), i, v]);
    push("n", "NA".into(), n.to_string());
    push("k", "NA".into(), a.k.to_string());
    for (c, s) in sizes.iter().enumerate() {
        push("cluster_size", c.to_string(), s.to_string());
    }
    for (j, v) in res.embedding.eigenvalues.iter().enumerate() {
        push("eigenvalue", j.to_string(), num(*v));
    }
    if let Some(t) = &truth {
        let err = clustering_error(&res.labels, t).map_err(|e| CliError::Input(e.to_string()))?;
        push("error", "NA".into(), num(err));
    }

    let labels_json = serde_json::json!({
        "method": method.short_name(),
        "k": a.k,
        "labels": res.labels.labels,
        "sizes": sizes,
    })
    .to_string();
    let labels_path = a.labels_out.clone().or_else(|| {
        cfg.common.out.as_ref().map(|o| {
            let mut p = o.clone().into_os_string();
            p.push(".labels.json");
            p.into()
        })
    });
    match labels_path {
        Some(p) => report.extra_files.push((p, labels_json + "\n")),
        None => report.trailer.push(format!("# labels: {labels_json}")),
    }
    Ok(report)
}

/// Two clusters of `n/2` vertices: positive edges only inside, negative
/// edges only across, each sign contributing half of `avg_degree`.
pub fn two_cluster_params(n: usize, avg_degree: f64) -> Result<SbmParams, CliError> {
    if n < 4 || n % 2 == 1 {
        return Err(CliError::Usage(format!(
            "--n values must be even and at least 4, got {n}"
        )));
    }
    let c = n / 2;
    let p_in = 0.5 * avg_degree / (c - 1) as f64;
    let p_out = 0.5 * avg_degree / c as f64;
    if !(avg_degree > 0.0) || p_in > 1.0 || p_out > 1.0 {
        return Err(CliError::Usage(format!(
            "average degree {avg_degree} is not achievable at n = {n}"
        )));
    }
    SbmParams::new(2, c, p_in, 0.0, 0.0, p_out).map_err(sbm_error)
}

pub fn bench(cfg: &RunConfig, a: &BenchArgs) -> Result<Report, CliError> {
    let spectral = cfg.spectral()?;
    if a.n.is_empty() || a.n.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage(
            "--n must be a non-empty ascending list".into(),
        ));
    }
    if a.repetitions == 0 || a.methods.is_empty() {
        return Err(CliError::Usage(
            "need at least one repetition and one method".into(),
        ));
    }
    let params =
        a.n.iter()
            .map(|&n| two_cluster_params(n, a.avg_degree))
            .collect::<Result<Vec<_>, _>>()?;
    // timings are single-threaded whatever --threads says
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;

    let mut report = Report::new(vec![
        "n",
        "method",
        "median_seconds",
        "iterations",
        "eigenvalue",
        "status",
    ]);
    for (p, &n) in params.iter().zip(&a.n) {
        let g = sample(p, cfg.common.seed).map_err(sbm_error)?;
        for &m in &a.methods {
            let method = Method::from(m);
            let mut secs = Vec::with_capacity(a.repetitions);
            let mut last = None;
            for _ in 0..a.repetitions {
                let start = Instant::now();
                let r = single.install(|| spectral_embedding(&g, 1, method, &spectral));
                secs.push(start.elapsed().as_secs_f64());
                let failed = r.is_err();
                last = Some(r);
                if failed {
                    break;
                }
            }
            let row = match last.expect("at least one repetition") {
                Ok(e) => vec![
                    n.to_string(),
                    method.to_string(),
                    opt(median(&secs)),
                    e.iterations[0].to_string(),
                    num(e.eigenvalues[0]),
                    "ok".into(),
                ],
                Err(e) => {
                    log::warn!("n = {n} {method}: {e}");
                    vec![
                        n.to_string(),
                        method.to_string(),
                        "NA".into(),
                        "NA".into(),
                        "NA".into(),
                        csv_text(&e.to_string()),
                    ]
                }
            };
            report.rows.push(row);
        }
    }
    Ok(report)
}
