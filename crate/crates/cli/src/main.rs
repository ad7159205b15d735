//! `profrank` — command-line frontend for the ranking pipeline.
//!
//! Subcommands: rank, sweep, search, baseline (votes|cefr), signals,
//! simulate. All outputs are written atomically (temp file + rename) and
//! embed the resolved configuration; a JSON summary line goes to stdout.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use profrank_core::baselines;
use profrank_core::config::TypeSelection;
use profrank_core::eval::GoldLabels;
use profrank_core::rank::proficiency_rank;
use profrank_core::search::grid_search;
use profrank_core::signals::{voter_pools, SignalSet};
use profrank_core::synth::{generate_network, GenParams};
use profrank_core::{RankConfig, SignalType, VoteDataset};

#[derive(Parser)]
#[command(name = "profrank", version, about = "Signed vote-graph proficiency ranking")]
struct Cli {
    /// Suppress the summary line on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for grid-search evaluation (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Directory containing users.csv, answers.csv, votes.csv.
    #[arg(long)]
    data: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Compute rank vectors for one configuration.
    Rank {
        #[command(flatten)]
        data: DataArgs,
        /// Preset name (conf1..conf7) or path to a config JSON file.
        #[arg(long)]
        config: String,
        /// Output CSV: user_id,pr,pr_plus,pr_minus,incoming_votes.
        #[arg(long)]
        out: PathBuf,
    },
    /// Threshold sweep of the rank/gold correlation.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        config: String,
        /// Output JSON with per-threshold records and the objective.
        #[arg(long)]
        out: PathBuf,
        /// Optional CSV with theta,n_users,r,p,significant rows.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Coarse-to-fine parameter search for a signal-type selection.
    Search {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated signal types, e.g. exp+,exp-,iav-,iov-.
        #[arg(long)]
        types: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Comparison measures.
    Baseline {
        #[command(subcommand)]
        which: BaselineCommand,
    },
    /// Dump the six signal matrices' totals and per-user degrees.
    Signals {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic dataset with planted levels.
    Simulate {
        /// Generator parameters JSON.
        #[arg(long)]
        params: PathBuf,
        /// Directory to write users.csv, answers.csv, votes.csv.
        #[arg(long)]
        out_dir: PathBuf,
        /// Overrides the seed in the params file.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum BaselineCommand {
    /// Spearman of raw incoming vote counts against the gold labels.
    Votes {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vocabulary-profile score sweep against the gold labels.
    Cefr {
        #[command(flatten)]
        data: DataArgs,
        /// Directory with A1.txt .. C2.txt word lists.
        #[arg(long)]
        profiles: PathBuf,
        /// Config whose incoming-vote counts drive the threshold sweep.
        #[arg(long, default_value = "conf1")]
        config: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve_config(spec: &str) -> Result<RankConfig> {
    if RankConfig::PRESET_NAMES.contains(&spec) {
        return Ok(RankConfig::preset(spec)?);
    }
    let content = std::fs::read_to_string(spec)
        .with_context(|| format!("config '{spec}' is neither a preset nor a readable file"))?;
    let cfg: RankConfig = serde_json::from_str(&content)
        .with_context(|| format!("cannot parse config file {spec}"))?;
    cfg.validate()?;
    Ok(cfg)
}

fn load_inputs(data: &DataArgs) -> Result<(VoteDataset, SignalSet)> {
    let dataset = VoteDataset::load_dir(&data.data)?;
    let signals = SignalSet::build(&dataset);
    Ok((dataset, signals))
}

fn summary(quiet: bool, value: serde_json::Value) {
    if !quiet {
        println!("{value}");
    }
}

fn run(cli: Cli) -> Result<()> {
    #[cfg(feature = "parallel")]
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .context("failed to configure worker threads")?;
    }

    match cli.command {
        Command::Rank { data, config, out } => {
            let cfg = resolve_config(&config)?;
            let (dataset, signals) = load_inputs(&data)?;
            let ranks = proficiency_rank(&signals, &cfg)?;
            let counts = dataset.incoming_vote_counts(&signals, &cfg);
            let mut body = format!("# config: {}\n", serde_json::to_string(&cfg)?);
            body.push_str("user_id,pr,pr_plus,pr_minus,incoming_votes\n");
            for (i, user) in dataset.users().iter().enumerate() {
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    user.id, ranks.pr[i], ranks.pr_plus[i], ranks.pr_minus[i], counts[i]
                ));
            }
            output::write_atomic(&out, body.as_bytes())?;
            summary(
                cli.quiet,
                json!({
                    "command": "rank",
                    "config": cfg.name,
                    "n_users": dataset.n_users(),
                    "converged": ranks.converged,
                    "out": out,
                }),
            );
        }
        Command::Sweep {
            data,
            config,
            out,
            plot_data,
        } => {
            let cfg = resolve_config(&config)?;
            let (dataset, signals) = load_inputs(&data)?;
            let ranks = proficiency_rank(&signals, &cfg)?;
            let counts = dataset.incoming_vote_counts(&signals, &cfg);
            let gold = GoldLabels::from_dataset(&dataset);
            let report = profrank_core::eval::theta_sweep(&ranks.pr, &counts, &gold)?;
            let doc = json!({
                "config": cfg,
                "records": report.records,
                "objective": report.objective,
            });
            output::write_atomic(&out, (serde_json::to_string_pretty(&doc)? + "\n").as_bytes())?;
            if let Some(plot) = plot_data {
                let mut body = format!("# config: {}\n", serde_json::to_string(&cfg)?);
                body.push_str("theta,n_users,r,p,significant\n");
                for rec in &report.records {
                    let (r, p) = rec
                        .result
                        .map(|c| (c.r.to_string(), c.p.to_string()))
                        .unwrap_or_default();
                    body.push_str(&format!(
                        "{},{},{},{},{}\n",
                        rec.theta, rec.n_users, r, p, rec.significant
                    ));
                }
                output::write_atomic(&plot, body.as_bytes())?;
            }
            summary(
                cli.quiet,
                json!({
                    "command": "sweep",
                    "config": cfg.name,
                    "records": report.records.len(),
                    "objective": report.objective,
                    "out": out,
                }),
            );
        }
        Command::Search { data, types, out } => {
            let selection = TypeSelection::parse(&types)?;
            let (dataset, signals) = load_inputs(&data)?;
            let result = grid_search(&dataset, &signals, selection)?;
            let doc = json!({
                "types": selection,
                "best": result.best,
                "objective": result.best_objective,
                "trace": result.trace,
            });
            output::write_atomic(&out, (serde_json::to_string_pretty(&doc)? + "\n").as_bytes())?;
            summary(
                cli.quiet,
                json!({
                    "command": "search",
                    "types": types,
                    "objective": result.best_objective,
                    "evaluations": result.trace.len(),
                    "out": out,
                }),
            );
        }
        Command::Baseline { which } => match which {
            BaselineCommand::Votes { data, config, out } => {
                let cfg = resolve_config(&config)?;
                let (dataset, signals) = load_inputs(&data)?;
                let gold = GoldLabels::from_dataset(&dataset);
                let result = baselines::votes_baseline(&dataset, &signals, &cfg, &gold)?;
                let doc = json!({
                    "command": "baseline-votes",
                    "config": cfg,
                    "result": result,
                });
                if let Some(out) = &out {
                    output::write_atomic(out, (serde_json::to_string_pretty(&doc)? + "\n").as_bytes())?;
                }
                summary(
                    cli.quiet,
                    json!({
                        "command": "baseline-votes",
                        "config": cfg.name,
                        "result": result,
                    }),
                );
            }
            BaselineCommand::Cefr {
                data,
                profiles,
                config,
                out,
            } => {
                let cfg = resolve_config(&config)?;
                let (dataset, signals) = load_inputs(&data)?;
                let gold = GoldLabels::from_dataset(&dataset);
                let (profile_set, profile_report) = baselines::CefrProfileSet::load(&profiles)?;
                let scores = baselines::score_all_authors(&dataset, &profile_set);
                let sweep = baselines::cefr_baseline_correlation(
                    &dataset, &signals, &cfg, &profile_set, &gold,
                )?;
                let doc = json!({
                    "config": cfg,
                    "profiles": profile_report,
                    "scores": scores,
                    "records": sweep.records,
                    "objective": sweep.objective,
                });
                output::write_atomic(&out, (serde_json::to_string_pretty(&doc)? + "\n").as_bytes())?;
                summary(
                    cli.quiet,
                    json!({
                        "command": "baseline-cefr",
                        "scored_users": scores.iter().filter(|s| s.score.is_some()).count(),
                        "objective": sweep.objective,
                        "out": out,
                    }),
                );
            }
        },
        Command::Signals { data, out } => {
            let (dataset, signals) = load_inputs(&data)?;
            let pools = voter_pools(&dataset);
            let totals: serde_json::Map<String, serde_json::Value> = SignalType::ALL
                .iter()
                .map(|&ty| {
                    (
                        ty.as_str().to_string(),
                        json!(signals.matrix(ty).total()),
                    )
                })
                .collect();
            let users: Vec<serde_json::Value> = dataset
                .users()
                .iter()
                .enumerate()
                .map(|(i, u)| {
                    let degrees: serde_json::Map<String, serde_json::Value> = SignalType::ALL
                        .iter()
                        .map(|&ty| {
                            let m = signals.matrix(ty);
                            (
                                ty.as_str().to_string(),
                                json!({"in": m.row_sum(i), "out": m.col_sum(i)}),
                            )
                        })
                        .collect();
                    json!({"user_id": u.id, "degrees": degrees})
                })
                .collect();
            let doc = json!({
                "n_users": dataset.n_users(),
                "n_answers": dataset.answers().len(),
                "n_votes": dataset.votes().len(),
                "n_pools": pools.len(),
                "totals": totals,
                "users": users,
            });
            output::write_atomic(&out, (serde_json::to_string_pretty(&doc)? + "\n").as_bytes())?;
            summary(
                cli.quiet,
                json!({"command": "signals", "totals": totals, "out": out}),
            );
        }
        Command::Simulate {
            params,
            out_dir,
            seed,
        } => {
            let content = std::fs::read_to_string(&params)
                .with_context(|| format!("cannot read params file {}", params.display()))?;
            let mut gen_params: GenParams =
                serde_json::from_str(&content).context("cannot parse generator params")?;
            if let Some(seed) = seed {
                gen_params.seed = seed;
            }
            let (dataset, _gold) = generate_network(&gen_params)?;
            std::fs::create_dir_all(&out_dir)
                .with_context(|| format!("cannot create {}", out_dir.display()))?;
            dataset.write_dir(&out_dir)?;
            let manifest = json!({
                "params": gen_params,
                "n_users": dataset.n_users(),
                "n_answers": dataset.answers().len(),
                "n_votes": dataset.votes().len(),
            });
            output::write_atomic(
                &out_dir.join("manifest.json"),
                (serde_json::to_string_pretty(&manifest)? + "\n").as_bytes(),
            )?;
            summary(
                cli.quiet,
                json!({
                    "command": "simulate",
                    "seed": gen_params.seed,
                    "n_users": dataset.n_users(),
                    "n_votes": dataset.votes().len(),
                    "out_dir": out_dir,
                }),
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("profrank: {err:#}");
            ExitCode::FAILURE
        }
    }
}
