use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use mrp_core::cluster::{
    cluster_mrp, evaluate_clustering, ClusterKind, ClusterOrigin, Clustering, MrpParams,
};
use mrp_core::entropy::{cluster_entropy, EntropyParams};
use mrp_core::oracle::{generate_sbm, SbmSpec};
use mrp_core::walk::{diagnose, DiagnoseConfig};
use mrp_core::{Error, VertexSet, WeightedGraph};
use serde_json::{json, Value};

use crate::args::{
    ClusterEntropyArgs, ClusterMrpArgs, Command, Common, DiagnoseArgs, EvaluateArgs, GenerateArgs,
    Sizes,
};
use crate::config::ConfigFile;
use crate::error::{CliError, Result};

const COMMON_KEYS: [&str; 3] = ["seed", "output", "threads"];

fn allowed(extra: &[&'static str]) -> Vec<&'static str> {
    COMMON_KEYS
        .iter()
        .copied()
        .chain(extra.iter().copied())
        .collect()
}

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Generate(a) => generate(a),
        Command::ClusterMrp(a) => cluster(a),
        Command::ClusterEntropy(a) => entropy(a),
        Command::Diagnose(a) => diagnose_cmd(a),
        Command::Evaluate(a) => evaluate(a),
    }
}

/// Thread count from the flag, the config file, or `MRP_THREADS`.
fn threads(common: &Common, file: &ConfigFile) -> Result<Option<usize>> {
    let from_env = match std::env::var("MRP_THREADS") {
        Ok(v) if !v.trim().is_empty() => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|e| CliError::Config(format!("MRP_THREADS: {e}")))?,
        ),
        _ => None,
    };
    let t = file.pick(common.threads, "threads")?.or(from_env);
    if t == Some(0) {
        return Err(CliError::Config("threads must be at least 1".into()));
    }
    Ok(t)
}

/// Run `job` on a pool bounded by the requested thread count.
fn with_threads<T: Send>(count: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = count {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

fn load_graph(path: &Path) -> Result<WeightedGraph> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    WeightedGraph::parse_edge_list(&text).map_err(|source| CliError::Graph {
        path: path.to_path_buf(),
        source,
    })
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Write every artifact to a temporary sibling first and rename only once
/// all of them are complete, so a failure leaves nothing behind.
fn write_artifacts(files: &[(PathBuf, String)]) -> Result<()> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    let mut staged = Vec::with_capacity(files.len());
    for (path, content) in files {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(format!(".tmp-{}", std::process::id()));
        let tmp = path.with_file_name(name);
        if let Err(e) = fs::write(&tmp, content).map_err(io(path)) {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            return Err(e);
        }
        staged.push((tmp, path));
    }
    for (tmp, path) in &staged {
        fs::rename(tmp, path).map_err(io(path))?;
    }
    Ok(())
}

fn emit(output: Option<&Path>, report: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).expect("JSON values always serialize");
    text.push('\n');
    match output {
        Some(path) => write_artifacts(&[(path.to_path_buf(), text)]),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn generate(a: GenerateArgs) -> Result<ExitCode> {
    let file = ConfigFile::load(a.common.config.as_deref())?;
    file.check_keys(&allowed(&["sizes", "p-in", "p-out", "truth"]))?;
    let seed: u64 = file.require(a.common.seed, "seed")?;
    let output: PathBuf = file.require(a.common.output.clone(), "output")?;
    let truth = file
        .pick(a.truth, "truth")?
        .unwrap_or_else(|| output.with_extension("truth.json"));
    let spec = SbmSpec {
        sizes: file.pick_or(a.sizes, "sizes", Sizes(vec![30, 30]))?.0,
        p_in: file.pick_or(a.p_in, "p-in", 0.5)?,
        p_out: file.pick_or(a.p_out, "p-out", 0.01)?,
        seed,
    };
    let threads = threads(&a.common, &file)?;
    let sbm = with_threads(threads, || generate_sbm(&spec))??;

    let sizes: Vec<String> = spec.sizes.iter().map(usize::to_string).collect();
    let edge_list = format!(
        "# mrp generate\n# seed = {seed}\n# sizes = {}\n# p-in = {}\n# p-out = {}\n# attempt = {}\n# connected = {}\n{}",
        sizes.join(","),
        spec.p_in,
        spec.p_out,
        sbm.attempt,
        sbm.connected,
        sbm.graph.to_edge_list()
    );
    let report = json!({
        "command": "generate",
        "seed": seed,
        "params": spec,
        "vertices": sbm.graph.n(),
        "edges": sbm.graph.edge_count(),
        "connected": sbm.connected,
        "attempt": sbm.attempt,
        "labels": sbm.labels,
    });
    let mut truth_text =
        serde_json::to_string_pretty(&report).expect("JSON values always serialize");
    truth_text.push('\n');
    write_artifacts(&[(output, edge_list), (truth, truth_text)])?;
    Ok(ExitCode::SUCCESS)
}

/// Reference or clustering labels from JSON holding `labels` or `clusters`.
fn read_labels(path: &Path, n: usize) -> Result<Vec<usize>> {
    let clustering = read_clustering(path, n)?;
    Ok(clustering.labels(n))
}

fn read_clustering(path: &Path, n: usize) -> Result<Clustering> {
    let value = read_json(path)?;
    let bad = |msg: &str| CliError::Config(format!("{}: {msg}", path.display()));
    let clusters: Vec<VertexSet> = if let Some(labels) = value.get("labels") {
        let labels: Vec<usize> = serde_json::from_value(labels.clone())
            .map_err(|_| bad("`labels` must be a list of integers"))?;
        if labels.len() != n {
            return Err(bad(&format!("{} labels for {n} vertices", labels.len())));
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (v, l) in labels.into_iter().enumerate() {
            groups.entry(l).or_default().push(v);
        }
        groups.into_values().map(VertexSet::new).collect()
    } else if let Some(clusters) = value.get("clusters") {
        serde_json::from_value(clusters.clone())
            .map_err(|_| bad("`clusters` must be a list of vertex lists"))?
    } else {
        return Err(bad("expected a `labels` or `clusters` field"));
    };
    let mut seen = vec![false; n];
    for v in clusters.iter().flat_map(|c| c.iter()) {
        if v >= n {
            return Err(bad(&format!("vertex {v} outside 0..{n}")));
        }
        if seen[v] {
            return Err(bad(&format!("vertex {v} in two clusters")));
        }
        seen[v] = true;
    }
    let origin = ClusterOrigin {
        center: 0,
        kind: ClusterKind::SafeMerge,
        rings: 0,
        safe_sets: 0,
    };
    Ok(Clustering {
        origins: vec![origin; clusters.len()],
        clusters,
        unassigned: (0..n).filter(|&v| !seen[v]).collect(),
    })
}

fn cluster(a: ClusterMrpArgs) -> Result<ExitCode> {
    let file = ConfigFile::load(a.common.config.as_deref())?;
    file.check_keys(&allowed(&[
        "graph",
        "n-c",
        "scale",
        "n-b",
        "fraction",
        "ra-al",
        "phi-al",
        "repeats",
        "merge-rule",
        "complete",
        "max-tries",
        "reference",
    ]))?;
    let graph_path: PathBuf = file.require(a.graph, "graph")?;
    let defaults = MrpParams::default();
    let params = MrpParams {
        n_c: file.pick_or(a.n_c, "n-c", defaults.n_c)?,
        scale: file.pick_or(a.scale, "scale", defaults.scale)?,
        n_b: file.pick_or(a.n_b, "n-b", defaults.n_b)?,
        fraction: file.pick_or(a.fraction, "fraction", defaults.fraction)?,
        ra_threshold: file.pick_or(a.ra_al, "ra-al", defaults.ra_threshold)?,
        phi_threshold: file.pick_or(a.phi_al, "phi-al", defaults.phi_threshold)?,
        repeats: file.pick_or(a.repeats, "repeats", defaults.repeats)?,
        seed: file.require(a.common.seed, "seed")?,
        merge_rule: file.pick_or(a.merge_rule, "merge-rule", defaults.merge_rule)?,
        complete: file.pick_or(a.complete, "complete", defaults.complete)?,
        max_tries: file.pick_or(a.max_tries, "max-tries", defaults.max_tries)?,
    };
    params.validate()?;
    let reference_path: Option<PathBuf> = file.pick(a.reference, "reference")?;
    let output: Option<PathBuf> = file.pick(a.common.output.clone(), "output")?;
    let threads = threads(&a.common, &file)?;

    let g = load_graph(&graph_path)?;
    let reference = reference_path
        .as_deref()
        .map(|p| read_labels(p, g.n()))
        .transpose()?;
    let (run, metrics) = with_threads(threads, || -> Result<_> {
        let run = cluster_mrp(&g, &params)?;
        let metrics = evaluate_clustering(&g, &run.clustering, reference.as_deref())?;
        Ok((run, metrics))
    })??;
    let report = json!({
        "command": "cluster-mrp",
        "graph": graph_path,
        "reference": reference_path,
        "seed": params.seed,
        "params": params,
        "clusters": run.clustering.clusters,
        "unassigned": run.clustering.unassigned,
        "origins": run.clustering.origins,
        "metrics": metrics,
        "diagnostics": run.diagnostics,
    });
    emit(output.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}

fn entropy(a: ClusterEntropyArgs) -> Result<ExitCode> {
    let file = ConfigFile::load(a.common.config.as_deref())?;
    file.check_keys(&allowed(&[
        "graph", "kappa", "n-sets", "top-m", "rho", "horizon", "scope",
    ]))?;
    let graph_path: PathBuf = file.require(a.graph, "graph")?;
    let defaults = EntropyParams::default();
    let params = EntropyParams {
        kappa: file.pick_or(a.kappa, "kappa", defaults.kappa)?,
        n_sets: file.pick_or(a.n_sets, "n-sets", defaults.n_sets)?,
        top_m: file.pick_or(a.top_m, "top-m", defaults.top_m)?,
        radius: file.pick_or(a.rho, "rho", defaults.radius)?,
        horizon: file.pick(a.horizon, "horizon")?,
        seed: file.require(a.common.seed, "seed")?,
        scope: file.pick_or(a.scope, "scope", defaults.scope)?,
    };
    if params.horizon == Some(0) {
        return Err(CliError::Config("horizon must be at least 1".into()));
    }
    let output: Option<PathBuf> = file.pick(a.common.output.clone(), "output")?;
    let threads = threads(&a.common, &file)?;

    let g = load_graph(&graph_path)?;
    let run = with_threads(threads, || cluster_entropy(&g, &params))??;
    let report = json!({
        "command": "cluster-entropy",
        "graph": graph_path,
        "seed": params.seed,
        "params": params,
        "horizon": run.horizon,
        "balls": run.balls,
        "ranked": run.ranked,
    });
    emit(output.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}

fn diagnose_cmd(a: DiagnoseArgs) -> Result<ExitCode> {
    let file = ConfigFile::load(a.common.config.as_deref())?;
    file.check_keys(&allowed(&[
        "graph",
        "instances",
        "duality-max-n",
        "carne-t-max",
        "hoeffding-max-n",
        "epsilon",
    ]))?;
    let graph_path: PathBuf = file.require(a.graph, "graph")?;
    let defaults = DiagnoseConfig::default();
    let cfg = DiagnoseConfig {
        instances: file.pick_or(a.instances, "instances", defaults.instances)?,
        duality_max_n: file.pick_or(a.duality_max_n, "duality-max-n", defaults.duality_max_n)?,
        carne_t_max: file.pick_or(a.carne_t_max, "carne-t-max", defaults.carne_t_max)?,
        hoeffding_max_n: file.pick_or(
            a.hoeffding_max_n,
            "hoeffding-max-n",
            defaults.hoeffding_max_n,
        )?,
        epsilon: file.pick_or(a.epsilon, "epsilon", defaults.epsilon)?,
        seed: file.require(a.common.seed, "seed")?,
    };
    if !(cfg.epsilon > 0.0 && cfg.epsilon < 1.0) {
        return Err(
            Error::InvalidParameter(format!("epsilon {} outside (0, 1)", cfg.epsilon)).into(),
        );
    }
    let output: Option<PathBuf> = file.pick(a.common.output.clone(), "output")?;
    let threads = threads(&a.common, &file)?;

    let g = load_graph(&graph_path)?;
    let report = with_threads(threads, || diagnose(&g, &cfg))??;
    let pass = report.all_pass();
    let out = json!({
        "command": "diagnose",
        "graph": graph_path,
        "seed": cfg.seed,
        "config": cfg,
        "pass": pass,
        "identities": report.identities,
        "statistics": report.statistics,
    });
    emit(output.as_deref(), &out)?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn evaluate(a: EvaluateArgs) -> Result<ExitCode> {
    let file = ConfigFile::load(a.common.config.as_deref())?;
    file.check_keys(&allowed(&["graph", "clustering", "reference"]))?;
    let graph_path: PathBuf = file.require(a.graph, "graph")?;
    let clustering_path: PathBuf = file.require(a.clustering, "clustering")?;
    let reference_path: Option<PathBuf> = file.pick(a.reference, "reference")?;
    let seed: Option<u64> = file.pick(a.common.seed, "seed")?;
    let output: Option<PathBuf> = file.pick(a.common.output.clone(), "output")?;
    let threads = threads(&a.common, &file)?;

    let g = load_graph(&graph_path)?;
    let clustering = read_clustering(&clustering_path, g.n())?;
    let reference = reference_path
        .as_deref()
        .map(|p| read_labels(p, g.n()))
        .transpose()?;
    let metrics = with_threads(threads, || {
        evaluate_clustering(&g, &clustering, reference.as_deref())
    })??;
    let report = json!({
        "command": "evaluate",
        "graph": graph_path,
        "clustering": clustering_path,
        "reference": reference_path,
        "seed": seed,
        "clusters": clustering.clusters.len(),
        "unassigned": clustering.unassigned.len(),
        "metrics": metrics,
    });
    emit(output.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}
