use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rwclust::io::{self, ColumnRef, LoadOptions, RunReport, Scaling, SweepRow};
use rwclust::pipeline::{self, RunConfig};
use rwclust::{Error, ModelParams, ParticleSystem, RangeSpec, Result, Variant};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Algorithm {
    Rw1,
    Rw2,
    Naive,
}

impl From<Algorithm> for Variant {
    fn from(a: Algorithm) -> Self {
        match a {
            Algorithm::Rw1 => Variant::Rw1,
            Algorithm::Rw2 => Variant::Rw2,
            Algorithm::Naive => Variant::NaiveRw1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Minmax,
    Zscore,
    None,
}

impl From<Scale> for Scaling {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Minmax => Scaling::MinMax,
            Scale::Zscore => Scaling::ZScore,
            Scale::None => Scaling::None,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// Label column: header name, or zero-based index (negative counts from the end).
    #[arg(long = "label-col", default_value = "-1", allow_hyphen_values = true)]
    label_col: String,
    /// Comma-separated columns to drop, e.g. record ids.
    #[arg(long = "ignore-cols", value_delimiter = ',', allow_hyphen_values = true)]
    ignore_cols: Vec<String>,
    #[arg(long, default_value = "?")]
    missing: String,
    #[arg(long, value_enum, default_value = "rw1")]
    algorithm: Algorithm,
    /// Rank of the initial distance whose median sets the interaction range.
    #[arg(long, conflicts_with = "range")]
    b: Option<usize>,
    /// Interaction range given directly.
    #[arg(long)]
    range: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.1)]
    theta: f64,
    /// Stopping threshold on the summed walk length [default: 1e-3 * N].
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long = "max-iters", default_value_t = 1000)]
    max_iters: usize,
    /// Merge down to this many clusters.
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// RW2 runs per b in sweep mode.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, value_enum, default_value = "none")]
    scale: Scale,
    /// Run once per listed b instead of a single run.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["b", "range"])]
    sweep: Vec<usize>,
    /// Do not count a particle as its own neighbor.
    #[arg(long = "exclude-self")]
    exclude_self: bool,
    /// Directory for the report files.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: ClusterArgs) -> Result<()> {
    let opts = LoadOptions {
        label_column: args.label_col.parse()?,
        missing_token: args.missing.clone(),
        seed: args.seed,
        ignore_columns: args
            .ignore_cols
            .iter()
            .map(|c| c.parse())
            .collect::<Result<Vec<ColumnRef>>>()?,
        ..Default::default()
    };
    let mut data = io::load_dataset(&args.input, &opts)?;
    data.scale(args.scale.into());
    println!(
        "dataset {}: N={} m={} classes={} imputed={}",
        data.name,
        data.len(),
        data.dim(),
        data.class_count(),
        data.imputed_cells.len()
    );

    let range = match (args.b, args.range) {
        (_, Some(r)) => RangeSpec::Radius(r),
        (Some(b), None) => RangeSpec::Rank(b),
        (None, None) if !args.sweep.is_empty() => RangeSpec::Rank(args.sweep[0]),
        (None, None) => return Err(Error::Usage("one of --b, --range or --sweep is required".into())),
    };
    let params = ModelParams {
        sigma: args.sigma,
        theta: args.theta,
        range,
        epsilon: args.epsilon,
        max_iters: args.max_iters,
        variant: args.algorithm.into(),
        seed: args.seed,
        include_self: !args.exclude_self,
    };
    let config = RunConfig {
        params: params.clone(),
        target_clusters: args.clusters,
        trace: true,
    };
    let system = ParticleSystem::new(data.features.clone(), &params)?.with_labels(data.labels.clone())?;

    if !args.sweep.is_empty() {
        let entries = pipeline::sweep_b(&system, &config, &args.sweep, args.trials)?;
        let rows: Vec<SweepRow> = entries.iter().map(SweepRow::from).collect();
        println!("b\tR\traw\tmerged\tacc_mean\tacc_var\tacc_max");
        for r in &rows {
            println!(
                "{}\t{:.6}\t{:.2}\t{:.2}\t{}\t{}\t{}",
                r.b,
                r.range,
                r.raw_clusters,
                r.merged_clusters,
                fmt_opt(r.accuracy_mean),
                fmt_opt(r.accuracy_var),
                fmt_opt(r.accuracy_max)
            );
        }
        if let Some(dir) = &args.out {
            io::write_sweep_table(&rows, dir.join(io::SWEEP_FILE))?;
        }
        return Ok(());
    }

    let start = Instant::now();
    let result = pipeline::run_clustering(&system, &config)?;
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "R={:.6} iterations={} stop={:?} raw_clusters={} merged_clusters={} accuracy={} time={:.3}s",
        result.range,
        result.iterations,
        result.stop_reason,
        result.raw_cluster_count,
        result.merged_cluster_count,
        fmt_opt(result.accuracy),
        elapsed
    );
    if let Some(dir) = &args.out {
        let report = RunReport::from_result(
            data.name.clone(),
            &params,
            args.clusters,
            &result,
            Some(&data.labels),
            elapsed,
        );
        io::write_run_report(&report, dir)?;
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}
