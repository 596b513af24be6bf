//! Command-line driver: single rankings, property suites, and the full
//! offline experiment with trade-off sweeps.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use divrank::data::parse_movielens;
use divrank::diversity::{capped_coverage, normalize_diversity, topic_coverage, Diversity};
use divrank::experiment::{
    run_experiment, write_details_csv, write_summary_csv, ExperimentConfig, UtilitySource,
};
use divrank::rankers::{dum_rank, mmr_rank, TradeoffWeight};
use divrank::types::{GroundSet, RankedList, TopicCatalog, UserProfile, UtilityVector};
use divrank::verify::{run_all, VerifyConfig};

#[derive(Parser)]
#[command(name = "divrank", about = "Diversified recommendation ranking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank the items of a file and print the resulting list.
    Rank(RankArgs),
    /// Run the offline evaluation protocol and emit CSVs.
    Experiment(ExperimentArgs),
    /// Run the randomized property suites against their oracles.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Dum,
    Mmr,
}

#[derive(Args)]
struct RankArgs {
    /// Items file: one `id<TAB>utility<TAB>genre1|genre2|...` per line.
    #[arg(long)]
    items: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// MMR diversity weight in [0, 1]; required for --method mmr.
    #[arg(long)]
    lambda: Option<f64>,
    /// MMR list length; defaults to the length of the paired greedy list.
    #[arg(long)]
    length: Option<usize>,
    /// Per-genre quota `Genre=N`; repeat to switch to capped coverage.
    #[arg(long = "quota", value_name = "GENRE=N")]
    quotas: Vec<String>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// MovieLens-style ratings file (`user::movie::rating::timestamp`).
    #[arg(long)]
    ratings: PathBuf,
    /// MovieLens-style movies file (`movie::title::genre|genre`).
    #[arg(long)]
    movies: PathBuf,
    /// Output directory for details.csv and summary.csv.
    #[arg(long)]
    out: PathBuf,
    /// Recommendation list length used for quotas.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Step of the MMR diversity-weight grid over [0, 1].
    #[arg(long, default_value_t = 0.01)]
    lambda_step: f64,
    /// Comma-separated split seeds.
    #[arg(long, default_value = "1,2,3", value_delimiter = ',')]
    seed: Vec<u64>,
    /// Drop users with fewer ratings than this.
    #[arg(long, default_value_t = 300)]
    min_ratings: usize,
    #[arg(long, default_value_t = 16)]
    factor_dimension: usize,
    #[arg(long, default_value_t = 0.05)]
    regularization: f64,
    #[arg(long, default_value_t = 30)]
    iterations: usize,
    #[arg(long, value_enum, default_value_t = UtilitySourceArg::Predicted)]
    utility_source: UtilitySourceArg,
    /// Weight each genre of a multi-genre movie by 1/g in user profiles.
    #[arg(long)]
    fractional_genres: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UtilitySourceArg {
    Actual,
    Predicted,
}

#[derive(Args)]
struct VerifyArgs {
    /// Maximum ground-set size per random instance (<= 8, factorial oracle).
    #[arg(long, default_value_t = 6)]
    max_items: usize,
    #[arg(long, default_value_t = 4)]
    max_topics: usize,
    #[arg(long, default_value_t = 3)]
    max_quota: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Rank(args) => cmd_rank(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

struct ItemsFile {
    catalog: TopicCatalog,
    ground: GroundSet,
    utilities: UtilityVector,
}

fn parse_items_file(path: &Path) -> anyhow::Result<ItemsFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read items file {}", path.display()))?;
    let mut genre_names: Vec<String> = Vec::new();
    let mut ids = Vec::new();
    let mut utilities = Vec::new();
    let mut raw_genres: Vec<Vec<String>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 || fields.len() > 3 {
            anyhow::bail!(
                "{}:{}: expected 2 or 3 tab-separated fields",
                path.display(),
                lineno + 1
            );
        }
        ids.push(fields[0].to_string());
        let u: f64 = fields[1].parse().with_context(|| {
            format!(
                "{}:{}: bad utility {:?}",
                path.display(),
                lineno + 1,
                fields[1]
            )
        })?;
        utilities.push(u);
        let genres: Vec<String> = fields
            .get(2)
            .map(|g| {
                g.split('|')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default();
        for g in &genres {
            if !genre_names.contains(g) {
                genre_names.push(g.clone());
            }
        }
        raw_genres.push(genres);
    }
    let catalog = TopicCatalog::new(genre_names.clone())?;
    let incidence = raw_genres
        .iter()
        .map(|gs| {
            gs.iter()
                .map(|g| catalog.index_of(g).expect("genre was registered above"))
                .collect()
        })
        .collect();
    let ground = GroundSet::new(ids, incidence, &catalog)?;
    let utilities = UtilityVector::new(utilities)?;
    Ok(ItemsFile {
        catalog,
        ground,
        utilities,
    })
}

fn parse_quotas(specs: &[String], catalog: &TopicCatalog) -> anyhow::Result<Vec<usize>> {
    let mut quotas = vec![0usize; catalog.len()];
    for spec in specs {
        let (genre, count) = spec
            .split_once('=')
            .with_context(|| format!("quota {spec:?} is not GENRE=N"))?;
        let t = catalog
            .index_of(genre.trim())
            .with_context(|| format!("unknown genre {genre:?} in quota"))?;
        quotas[t] = count
            .trim()
            .parse()
            .with_context(|| format!("bad quota count {count:?}"))?;
    }
    Ok(quotas)
}

fn print_list(list: &RankedList, ground: &GroundSet, utilities: &UtilityVector) {
    for (pos, (&item, &gain)) in list.ordering().iter().zip(list.gains()).enumerate() {
        println!(
            "{}\t{}\t{}\t{}",
            pos + 1,
            ground.item_id(item),
            utilities.get(item),
            gain
        );
    }
}

fn cmd_rank(args: RankArgs) -> anyhow::Result<ExitCode> {
    if args.method == MethodArg::Mmr && args.lambda.is_none() {
        eprintln!("error: --lambda is required with --method mmr");
        return Ok(ExitCode::from(2));
    }
    let items = parse_items_file(&args.items)?;
    let f: Box<dyn Diversity> = if args.quotas.is_empty() {
        Box::new(topic_coverage(&items.catalog, &items.ground))
    } else {
        let quotas = parse_quotas(&args.quotas, &items.catalog)?;
        let k = quotas.iter().sum::<usize>().max(1);
        let weights = vec![0.0; items.catalog.len()];
        let profile = UserProfile::new(weights, quotas, k)?;
        Box::new(capped_coverage(&items.catalog, &items.ground, &profile)?)
    };
    match args.method {
        MethodArg::Dum => {
            let list = dum_rank(&items.utilities, f.as_ref())?;
            print_list(&list, &items.ground, &items.utilities);
        }
        MethodArg::Mmr => {
            let normalized = items.utilities.normalized();
            let f = normalize_diversity(f)?;
            let length = match args.length {
                Some(n) => n,
                None => dum_rank(&normalized, &f)?.len(),
            };
            let weight = TradeoffWeight::new(args.lambda.expect("checked above"))?;
            let list = mmr_rank(&normalized, &f, weight, length)?;
            print_list(&list, &items.ground, &normalized);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_experiment(args: ExperimentArgs) -> anyhow::Result<ExitCode> {
    if !(args.lambda_step > 0.0 && args.lambda_step <= 1.0) {
        eprintln!("error: --lambda-step must be in (0, 1]");
        return Ok(ExitCode::from(2));
    }
    let data = parse_movielens(&args.ratings, &args.movies)?;
    let steps = (1.0 / args.lambda_step).round() as usize;
    let lambda_grid: Vec<f64> = (0..=steps)
        .map(|i| (i as f64 / steps as f64).min(1.0))
        .collect();
    let cfg = ExperimentConfig {
        k: args.k,
        lambda_grid,
        seeds: args.seed.clone(),
        min_ratings: args.min_ratings,
        factor_dimension: args.factor_dimension,
        regularization: args.regularization,
        iterations: args.iterations,
        utility_source: match args.utility_source {
            UtilitySourceArg::Actual => UtilitySource::Actual,
            UtilitySourceArg::Predicted => UtilitySource::Predicted,
        },
        fractional_genres: args.fractional_genres,
    };
    let result = run_experiment(&data, &cfg)?;
    std::fs::create_dir_all(&args.out)?;
    let mut details = std::fs::File::create(args.out.join("details.csv"))?;
    write_details_csv(&mut details, &result.details)?;
    let mut summary = std::fs::File::create(args.out.join("summary.csv"))?;
    write_summary_csv(&mut summary, &result.summary)?;
    eprintln!(
        "{} users, {} ratings after filtering; mean profile size {:.1}, mean candidate pool {:.1}",
        result.user_count, result.rating_count, result.mean_train_size, result.mean_candidate_size
    );
    eprintln!(
        "wrote {} detail rows and {} summary rows to {}",
        result.details.len(),
        result.summary.len(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    if args.max_items > 8 {
        eprintln!("error: --max-items must be <= 8 (factorial oracle)");
        return Ok(ExitCode::from(2));
    }
    if args.trials == 0 {
        eprintln!("warning: 0 trials requested; every property passes vacuously");
    }
    let cfg = VerifyConfig {
        max_items: args.max_items.max(1),
        max_topics: args.max_topics.max(1),
        max_quota: args.max_quota,
        trials: args.trials,
        seed: args.seed,
    };
    let results = run_all(&cfg)?;
    let mut all_passed = true;
    for r in &results {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!("[{status}] {} ({} trials)", r.name, r.trials);
        for failure in r.failures.iter().take(5) {
            println!("        counterexample: {failure}");
        }
        if r.failures.len() > 5 {
            println!("        ... {} more", r.failures.len() - 5);
        }
        all_passed &= r.passed();
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
