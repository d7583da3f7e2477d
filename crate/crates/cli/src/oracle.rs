use clap::Args;
use rand::Rng;
use rwclust::theory::{self, OracleRow, PairWalkSpec};
use rwclust::{rng, Error, Result};

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 10_000)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step-away probabilities for the line-walk grid (q = 1 − p).
    #[arg(long, value_delimiter = ',', default_value = "0.4,0.5,0.6,0.75")]
    p: Vec<f64>,
    /// Starting distances for the line-walk grid.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,5")]
    l: Vec<u64>,
    /// Number of random pair-walk specs.
    #[arg(long, default_value_t = 20)]
    pairs: usize,
    /// Emit JSON instead of a tab-separated table.
    #[arg(long)]
    json: bool,
}

pub fn run(args: OracleArgs) -> Result<()> {
    if args.trials == 0 || args.horizon == 0 {
        return Err(Error::Usage("trials and horizon must be >= 1".into()));
    }
    let mut rows = theory::line_walk_grid(&args.p, &args.l, args.trials, args.horizon, args.seed)?;
    let pair_trials = (args.trials / 10).max(1);
    rows.extend(theory::pair_walk_table(
        &random_pair_specs(args.pairs, args.seed)?,
        pair_trials,
        args.horizon,
        args.seed,
    )?);
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
    } else {
        print_table(&rows);
    }
    Ok(())
}

pub fn random_pair_specs(count: usize, seed: u64) -> Result<Vec<PairWalkSpec>> {
    let mut r = rng::stream(seed, u32::MAX as u64, 0);
    (0..count)
        .map(|_| {
            let pa = r.random_range(0.2..0.8);
            let pb = r.random_range(0.2..0.8);
            let gap = r.random_range(0..=6);
            PairWalkSpec::new(pa, pb, 0, gap)
        })
        .collect()
}

fn print_table(rows: &[OracleRow]) {
    println!("walk\tspec\tclosed_form\testimate\tstderr\tagrees");
    for r in rows {
        println!(
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{}",
            r.walk, r.spec, r.closed_form, r.estimate, r.stderr, r.agrees
        );
    }
}
