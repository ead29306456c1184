use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hammersley::*;
use serde_json::json;

mod report;

use report::Report;

/// Memo cache directory for multiplicity computations.
const MEMO_ENV: &str = "HAMMERSLEY_MEMO_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "hammersley",
    version,
    about = "Hammersley word processes: membership, multiplicities and increment statistics"
)]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Number of lives per particle (1..=9).
    #[arg(long, short, global = true, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=9))]
    k: u8,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for the sampling and table engines; 1 runs sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Language {
    Dominant,
    Pda,
    Interval,
    Effective,
    Sk,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide membership of a word. Exit status 0 member, 1 non-member, 2 invalid input.
    Check {
        #[arg(long, value_enum, default_value_t = Language::Dominant)]
        which: Language,
        /// Digits 0..=k, with `*` (or `◇`) for the diamond.
        word: String,
    },
    /// Number of trajectories producing a word and its probability.
    Mult {
        #[arg(long)]
        interval: bool,
        word: String,
    },
    /// Multiplicity of every word of length n.
    Table {
        #[arg(long, short)]
        n: usize,
        #[arg(long)]
        interval: bool,
    },
    /// Compares the reverse-move table against brute-force enumeration.
    EnumOracle {
        #[arg(long, short)]
        n: usize,
    },
    /// Distribution of the number of increments.
    Inc {
        #[command(flatten)]
        mode: ModeArgs,
        /// Label rows by trailing zeros (raw count minus one).
        #[arg(long)]
        shift: bool,
    },
    /// Scaling constant estimate from the mean number of increments.
    Lambda {
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// Runs one random trajectory and prints it with its word.
    Simulate {
        #[arg(long, short)]
        n: usize,
        #[arg(long)]
        interval: bool,
    },
    /// A trajectory producing the given dominant word.
    Witness { word: String },
}

#[derive(Args, Debug)]
struct ModeArgs {
    #[arg(long, short)]
    n: usize,
    /// Exact computation (n <= 13).
    #[arg(long, conflicts_with = "samples")]
    exact: bool,
    /// Number of sampled trajectories.
    #[arg(long, required_unless_present = "exact")]
    samples: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, code)) => match emit(&cli.run, &report) {
            Ok(()) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(run: &RunConfig, report: &Report) -> anyhow::Result<()> {
    let text = report.render(run.format)?;
    match &run.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execution(run: &RunConfig) -> anyhow::Result<Execution> {
    match run.threads {
        Some(0) => bail!("--threads must be at least 1"),
        Some(1) => Ok(Execution::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(_n)
                .build_global()
                .context("configuring the thread pool")?;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::default()),
    }
}

fn run(cli: &Cli) -> anyhow::Result<(Report, u8)> {
    let run = &cli.run;
    let k = Alphabet::new(run.k)?;
    let exec = execution(run)?;
    match &cli.command {
        Command::Check { which, word } => cmd_check(k, *which, word),
        Command::Mult { interval, word } => cmd_mult(k, *interval, word).map(|r| (r, 0)),
        Command::Table { n, interval } => cmd_table(k, *n, *interval, exec).map(|r| (r, 0)),
        Command::EnumOracle { n } => cmd_enum_oracle(k, *n, exec),
        Command::Inc { mode, shift } => cmd_inc(k, mode, *shift, run.seed, exec).map(|r| (r, 0)),
        Command::Lambda { mode } => cmd_lambda(k, mode, run.seed, exec).map(|r| (r, 0)),
        Command::Simulate { n, interval } => {
            cmd_simulate(k, *n, *interval, run.seed).map(|r| (r, 0))
        }
        Command::Witness { word } => cmd_witness(k, word).map(|r| (r, 0)),
    }
}

fn parse_word(text: &str, k: Alphabet) -> anyhow::Result<Word> {
    Word::parse_in(text, k).with_context(|| format!("invalid word {text:?}"))
}

fn verdict(member: bool) -> &'static str {
    if member {
        "member"
    } else {
        "non-member"
    }
}

/// Prefix reaching the smallest structural difference (the shortest one on
/// ties).
fn minimum_prefix(w: &Word, k: Alphabet) -> anyhow::Result<(usize, i64)> {
    let mut best = (0, i64::MAX);
    for len in 1..=w.len() {
        let d = structural_difference(&w.prefix(len), k)?;
        if d < best.1 {
            best = (len, d);
        }
    }
    Ok(best)
}

fn cmd_check(k: Alphabet, which: Language, text: &str) -> anyhow::Result<(Report, u8)> {
    let w = parse_word(text, k)?;
    let mut out =
        json!({ "word": w.to_string(), "k": k.k(), "which": format!("{which:?}").to_lowercase() });
    let (member, detail) = match which {
        Language::Dominant | Language::Effective => {
            let member = if which == Language::Dominant {
                accept_dominant(&w, k)?
            } else {
                accept_effective(&w, k)?
            };
            let detail = match failing_prefix(&w, k)? {
                Some((len, diff)) => {
                    let (min_len, min_diff) = minimum_prefix(&w, k)?;
                    out["failing_prefix"] =
                        json!({ "prefix": w.prefix(len).to_string(), "difference": diff });
                    out["minimum_prefix"] =
                        json!({ "prefix": w.prefix(min_len).to_string(), "difference": min_diff });
                    if (min_len, min_diff) == (len, diff) {
                        format!("prefix {} difference {diff}", w.prefix(len))
                    } else {
                        format!(
                            "prefix {} difference {diff}; minimum at prefix {} difference {min_diff}",
                            w.prefix(len),
                            w.prefix(min_len)
                        )
                    }
                }
                None if w.is_empty() => "empty word".to_string(),
                None => format!("difference {}", structural_difference(&w, k)?),
            };
            (member, detail)
        }
        Language::Pda => {
            let run = pda_run(&w, k)?;
            out["trace"] = json!(run.counters());
            if let Some(at) = run.rejected_at() {
                out["rejected_at"] = json!(at);
            }
            let detail = match run.rejected_at() {
                Some(at) => format!("trace {:?}, rejected at letter {at}", run.counters()),
                None => format!("trace {:?}", run.counters()),
            };
            (run.accepted, detail)
        }
        Language::Interval => {
            let violation = interval_violation(&w, k)?;
            let detail = match &violation {
                Some(v) => {
                    out["violation"] = serde_json::to_value(v)?;
                    out["condition"] = json!(v.label());
                    match v {
                        IntervalViolation::Empty => "empty word".to_string(),
                        IntervalViolation::DiamondBalance { diamonds, len } => {
                            format!("condition 1: {diamonds} diamonds in {len} letters")
                        }
                        IntervalViolation::PrefixDiamonds { prefix_len } => {
                            format!("condition 2a fails at prefix {}", w.prefix(*prefix_len))
                        }
                        IntervalViolation::PrefixLives { prefix_len } => {
                            format!("condition 2b fails at prefix {}", w.prefix(*prefix_len))
                        }
                    }
                }
                None => "all conditions hold".to_string(),
            };
            (violation.is_none(), detail)
        }
        Language::Sk => {
            let decomposition = sk_decompose(&w, k);
            let detail = match (&decomposition, sk_shape(&w, k)) {
                (Some(d), _) => {
                    out["decomposition"] = json!({ "c": d.c, "d": d.d, "e": d.e });
                    format!("(c, d, e) = ({}, {}, {})", d.c, d.d, d.e)
                }
                (None, Some((a, b, g, d))) => {
                    out["shape"] = json!([a, b, g, d]);
                    format!("block lengths ({a}, {b}, {g}, {d}) admit no (c, d, e)")
                }
                (None, None) => "not of the block shape".to_string(),
            };
            (decomposition.is_some(), detail)
        }
    };
    out["member"] = json!(member);
    out["detail"] = json!(detail);
    let plain = format!("{}: {detail}\n", verdict(member));
    Ok((Report::new(out, plain), if member { 0 } else { 1 }))
}

fn memo_dir() -> Option<PathBuf> {
    std::env::var_os(MEMO_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn with_memo<T>(
    process: ProcessKind,
    k: Alphabet,
    f: impl FnOnce(&MemoStore) -> anyhow::Result<T>,
) -> anyhow::Result<T> {
    let memo = MemoStore::new();
    let dir = memo_dir();
    if let Some(dir) = &dir {
        memo.load_dir(dir, process, k)?;
    }
    let value = f(&memo)?;
    if let Some(dir) = &dir {
        memo.save_dir(Path::new(dir), process, k)?;
    }
    Ok(value)
}

fn cmd_mult(k: Alphabet, interval: bool, text: &str) -> anyhow::Result<Report> {
    let w = parse_word(text, k)?;
    let (process, f, mass) = if interval {
        let f = with_memo(ProcessKind::Interval, k, |m| {
            Ok(interval_multiplicity_with(&w, k, m)?)
        })?;
        let mass = if w.len() % 2 == 0 {
            interval_mass(w.len() / 2)
        } else {
            0u32.into()
        };
        (ProcessKind::Interval, f, mass)
    } else {
        k.validate_plain(&w)?;
        let f = with_memo(ProcessKind::Had, k, |m| Ok(multiplicity_with(&w, k, m)?))?;
        (ProcessKind::Had, f, factorial(w.len()))
    };
    let p = if mass == 0u32.into() {
        ExactProbability::zero()
    } else {
        ExactProbability::from_counts(&f, &mass)
    };
    let unreduced = format!("{f}/{mass}");
    let out = json!({
        "word": w.to_string(),
        "k": k.k(),
        "process": process,
        "multiplicity": f.to_string(),
        "mass": mass.to_string(),
        "probability": p.to_string(),
        "probability_unreduced": unreduced,
        "probability_decimal": round6(p.to_f64()),
    });
    let plain = match process {
        ProcessKind::Had => format!("{f}, {unreduced}\n"),
        ProcessKind::Interval => format!("{f} of {mass}, {unreduced}\n"),
    };
    Ok(Report::new(out, plain))
}

fn table_plain(table: &SeriesTable) -> String {
    let mass = table.expected_mass();
    let mut plain = String::new();
    for (w, c) in table.counts() {
        plain.push_str(&format!("{w} {c} {c}/{mass}\n"));
    }
    plain
}

fn cmd_table(k: Alphabet, n: usize, interval: bool, exec: Execution) -> anyhow::Result<Report> {
    let table = if interval {
        interval_table_with(n, k, exec)?
    } else {
        series_table_with(n, k, exec)?
    };
    Ok(Report::new(table.to_json(), table_plain(&table)).with_csv(table.to_csv()))
}

fn cmd_enum_oracle(k: Alphabet, n: usize, exec: Execution) -> anyhow::Result<(Report, u8)> {
    let method = if n <= HAD_TRAJECTORY_LIMIT {
        Enumeration::Trajectories
    } else {
        Enumeration::LevelDp
    };
    let enumerated = had_enumerate_with(n, k, method, exec)?;
    let reverse = with_memo(ProcessKind::Had, k, |m| Ok(series_table_reverse(n, k, m)?))?;
    let differences = reverse.diff(&enumerated);
    let identical = differences.is_empty();
    let mass = enumerated.mass();
    let out = json!({
        "k": k.k(),
        "n": n,
        "enumeration": match method {
            Enumeration::Trajectories => "trajectories",
            Enumeration::LevelDp => "level_dp",
        },
        "identical": identical,
        "words": enumerated.len(),
        "mass": mass.to_string(),
        "expected_mass": factorial(n).to_string(),
        "differences": differences
            .iter()
            .map(|(w, a, b)| json!({ "word": w.to_string(), "reverse": a.to_string(), "enumeration": b.to_string() }))
            .collect::<Vec<_>>(),
    });
    let mut plain = if identical {
        format!("tables identical, mass {mass}\n")
    } else {
        format!(
            "tables differ in {} words, mass {mass}\n",
            differences.len()
        )
    };
    for (w, a, b) in &differences {
        plain.push_str(&format!("{w} reverse {a} enumeration {b}\n"));
    }
    Ok((Report::new(out, plain), if identical { 0 } else { 1 }))
}

fn distribution(
    k: Alphabet,
    mode: &ModeArgs,
    seed: u64,
    exec: Execution,
) -> anyhow::Result<IncrementDistribution> {
    if mode.exact {
        if mode.n > EXACT_INCREMENT_LIMIT {
            bail!(
                "exact mode is limited to n <= {EXACT_INCREMENT_LIMIT} (the number of words grows exponentially); use --samples"
            );
        }
        Ok(exact_increment_distribution_with(mode.n, k, exec)?)
    } else {
        let samples = mode
            .samples
            .context("either --exact or --samples is required")?;
        Ok(sampled_increment_distribution(
            mode.n, k, samples, seed, exec,
        )?)
    }
}

fn cmd_inc(
    k: Alphabet,
    mode: &ModeArgs,
    shift: bool,
    seed: u64,
    exec: Execution,
) -> anyhow::Result<Report> {
    let d = distribution(k, mode, seed, exec)?;
    let mut out = d.to_json();
    let json_pmf = out["pmf"].clone();
    let mut plain = String::new();
    for i in d.pmf().keys() {
        let label = if shift { i - 1 } else { *i };
        let p = json_pmf[i.to_string()].as_str().unwrap_or_default();
        plain.push_str(&format!("{label} {p} {:.6}\n", d.probability(*i)));
    }
    plain.push_str(&format!(
        "mean {} {:.6}\n",
        out["mean"].as_str().unwrap_or_default(),
        d.mean()
    ));
    out["mean_decimal"] = json!(round6(d.mean()));
    Ok(Report::new(out, plain).with_csv(d.to_csv(shift)))
}

fn cmd_lambda(k: Alphabet, mode: &ModeArgs, seed: u64, exec: Execution) -> anyhow::Result<Report> {
    let d = distribution(k, mode, seed, exec)?;
    let est = ScalingEstimate::from_distribution(&d);
    let residuals = geometric_residuals(&d.pmf(), P_STAR, 6);
    let mut out = est.to_json();
    out["residuals"] = json!(residuals
        .iter()
        .map(|&(i, r)| json!({ "i": i, "residual": round6(r) }))
        .collect::<Vec<_>>());
    let mut plain = format!("lambda_hat {:.6}", est.lambda_hat);
    if let Some(h) = est.half_width {
        plain.push_str(&format!(" ± {h:.6}"));
    }
    plain.push_str(&format!(
        " (mean {})\n",
        out["mean"].as_str().unwrap_or_default()
    ));
    plain.push_str(&format!(
        "phi {:.6} gap {:.6}\nfitted_p {:.6} p_star {:.6}\n",
        est.phi,
        est.gap_to_phi(),
        est.fitted_p,
        est.p_star
    ));
    for (i, r) in &residuals {
        plain.push_str(&format!("residual {i} {r:.6}\n"));
    }
    Ok(Report::new(out, plain))
}

fn cmd_simulate(k: Alphabet, n: usize, interval: bool, seed: u64) -> anyhow::Result<Report> {
    let (trajectory, word, process) = if interval {
        let (t, w) = interval_sample(n, k, seed)?;
        (json!(t.picks()), w, ProcessKind::Interval)
    } else {
        let (t, w) = had_sample_with_trajectory(n, k, seed)?;
        (json!(t.gaps()), w, ProcessKind::Had)
    };
    let steps: Vec<String> = trajectory
        .as_array()
        .map(|a| a.iter().map(|s| s.to_string()).collect())
        .unwrap_or_default();
    let plain = format!("trajectory {}\nword {word}\n", steps.join(" "));
    let out = json!({
        "k": k.k(),
        "n": n,
        "seed": seed,
        "process": process,
        "trajectory": trajectory,
        "word": word.to_string(),
    });
    Ok(Report::new(out, plain))
}

fn cmd_witness(k: Alphabet, text: &str) -> anyhow::Result<Report> {
    let w = parse_word(text, k)?;
    let t = witness_trajectory(&w, k)?;
    let replayed = had_replay(&t, k)?;
    anyhow::ensure!(replayed == w, "witness replays to {replayed}, not {w}");
    let gaps: Vec<String> = t.gaps().iter().map(usize::to_string).collect();
    let out = json!({ "word": w.to_string(), "k": k.k(), "trajectory": t.gaps() });
    Ok(Report::new(
        out,
        format!("trajectory {}\nword {w}\n", gaps.join(" ")),
    ))
}
